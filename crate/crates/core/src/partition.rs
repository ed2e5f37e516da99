//! Node-to-community assignments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Community labels densely numbered `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Densifies arbitrary labels, preserving their relative order, so an
    /// already dense labelling is returned unchanged.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let mut distinct: Vec<usize> = labels.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let dense = distinct.last().is_none_or(|&m| m + 1 == distinct.len());
        let k = distinct.len();
        if dense {
            return Self { labels, k };
        }
        let labels = labels
            .into_iter()
            .map(|l| distinct.binary_search(&l).expect("label present"))
            .collect();
        Self { labels, k }
    }

    /// Relabels communities in order of first appearance.
    pub fn canonical(&self) -> Self {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect();
        Self { labels, k: self.k }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
            k: n,
        }
    }

    pub fn single(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of communities.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.len() == n {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                left: self.len(),
                right: n,
            })
        }
    }

    /// Two-column `external_node_id community_id` text.
    pub fn to_text<T: Scalar>(&self, g: &Graph<T>) -> Result<String> {
        self.check_len(g.n_nodes())?;
        let mut out = String::new();
        for (i, &l) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "{} {}", g.label(i), l);
        }
        Ok(out)
    }

    /// JSON object mapping external node id to community.
    pub fn to_json<T: Scalar>(&self, g: &Graph<T>) -> Result<String> {
        self.check_len(g.n_nodes())?;
        let doc = PartitionDoc {
            k: self.k,
            assignment: self
                .labels
                .iter()
                .enumerate()
                .map(|(i, &l)| (g.label(i).to_owned(), l))
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Reads the two-column text form against the node labels of `g`.
    /// Every node of `g` must be listed exactly once.
    pub fn from_text<T: Scalar>(g: &Graph<T>, text: &str) -> Result<Self> {
        let mut labels = vec![usize::MAX; g.n_nodes()];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let mut tok = line.split_whitespace();
            let (Some(node), Some(comm), None) = (tok.next(), tok.next(), tok.next()) else {
                return Err(err("expected `node community`".into()));
            };
            let i = g
                .index_of(node)
                .ok_or_else(|| err(format!("unknown node {node:?}")))?;
            let c: usize = comm
                .parse()
                .map_err(|_| err(format!("invalid community {comm:?}")))?;
            if labels[i] != usize::MAX {
                return Err(err(format!("node {node:?} listed twice")));
            }
            labels[i] = c;
        }
        if let Some(i) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidArgument(format!(
                "node {:?} has no community",
                g.label(i)
            )));
        }
        Ok(Self::from_labels(labels))
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionDoc {
    k: usize,
    assignment: BTreeMap<String, usize>,
}
