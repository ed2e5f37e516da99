//! Seed selection for super nodes: CoreHD and a highest-degree baseline.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{k_core_within, Graph, NodeSet};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SeedMethod {
    #[default]
    CoreHd,
    Degree,
}

impl fmt::Display for SeedMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeedMethod::CoreHd => "corehd",
            SeedMethod::Degree => "degree",
        })
    }
}

impl FromStr for SeedMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "corehd" => Ok(SeedMethod::CoreHd),
            "degree" => Ok(SeedMethod::Degree),
            other => Err(Error::InvalidArgument(format!("unknown seed method {other:?}"))),
        }
    }
}

/// One selection step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedStep {
    pub node: usize,
    /// Degree at selection time: within the current 2-core when
    /// `from_core`, otherwise in the original graph.
    pub degree: usize,
    /// Size of the 2-core the node was drawn from (0 for fallback picks).
    pub core_size: usize,
    pub from_core: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet {
    pub seeds: NodeSet,
    pub method: SeedMethod,
    pub s_requested: usize,
    pub trace: Vec<SeedStep>,
}

impl SeedSet {
    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        self.seeds.as_slice()
    }

    /// Number of seeds picked by the degree fallback after the 2-core emptied.
    pub fn fallback_count(&self) -> usize {
        self.trace.iter().filter(|s| !s.from_core).count()
    }
}

pub fn select_seeds<T: Scalar>(g: &Graph<T>, s: usize, method: SeedMethod) -> Result<SeedSet> {
    match method {
        SeedMethod::CoreHd => corehd_seeds(g, s),
        SeedMethod::Degree => degree_seeds(g, s),
    }
}

fn check_request(n: usize, s: usize) -> Result<()> {
    if s == 0 {
        return Err(Error::InvalidArgument("need at least one seed".into()));
    }
    if s > n {
        return Err(Error::TooManySeeds {
            requested: s,
            n_nodes: n,
        });
    }
    Ok(())
}

/// Nodes by descending unweighted degree, lowest index first among ties.
fn by_degree<T: Scalar>(g: &Graph<T>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.n_nodes()).collect();
    order.sort_by_key(|&i| (Reverse(g.unweighted_degree(i)), i));
    order
}

/// CoreHD: repeatedly take the highest-degree node of the current 2-core,
/// delete it, and re-prune. When the 2-core is exhausted the remaining
/// seeds come from the original degree ranking.
pub fn corehd_seeds<T: Scalar>(g: &Graph<T>, s: usize) -> Result<SeedSet> {
    let n = g.n_nodes();
    check_request(n, s)?;

    let mut alive = k_core_within(g, 2, &vec![true; n]);
    let mut core_size = alive.iter().filter(|&&a| a).count();
    let mut deg: Vec<usize> = (0..n)
        .map(|i| {
            if alive[i] {
                g.neighbors(i).iter().filter(|&&j| alive[j]).count()
            } else {
                0
            }
        })
        .collect();
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> = (0..n)
        .filter(|&i| alive[i])
        .map(|i| (deg[i], Reverse(i)))
        .collect();

    let mut selected = vec![false; n];
    let mut trace = Vec::with_capacity(s);
    let mut peel = Vec::new();

    while trace.len() < s {
        let Some(v) = next_valid(&mut heap, &alive, &deg) else {
            break;
        };
        trace.push(SeedStep {
            node: v,
            degree: deg[v],
            core_size,
            from_core: true,
        });
        selected[v] = true;
        alive[v] = false;
        core_size -= 1;
        peel.push(v);
        // Deleting v (and anything that drops below degree 2) shrinks the core.
        while let Some(u) = peel.pop() {
            for &w in g.neighbors(u) {
                if !alive[w] {
                    continue;
                }
                deg[w] -= 1;
                if deg[w] < 2 {
                    alive[w] = false;
                    core_size -= 1;
                    peel.push(w);
                } else {
                    heap.push((deg[w], Reverse(w)));
                }
            }
        }
    }

    if trace.len() < s {
        for v in by_degree(g) {
            if trace.len() == s {
                break;
            }
            if !selected[v] {
                selected[v] = true;
                trace.push(SeedStep {
                    node: v,
                    degree: g.unweighted_degree(v),
                    core_size: 0,
                    from_core: false,
                });
            }
        }
    }

    Ok(SeedSet {
        seeds: NodeSet::from_unique(trace.iter().map(|t| t.node).collect()),
        method: SeedMethod::CoreHd,
        s_requested: s,
        trace,
    })
}

fn next_valid(
    heap: &mut BinaryHeap<(usize, Reverse<usize>)>,
    alive: &[bool],
    deg: &[usize],
) -> Option<usize> {
    while let Some((d, Reverse(v))) = heap.pop() {
        if alive[v] && deg[v] == d {
            return Some(v);
        }
    }
    None
}

/// The `s` highest-degree nodes.
pub fn degree_seeds<T: Scalar>(g: &Graph<T>, s: usize) -> Result<SeedSet> {
    check_request(g.n_nodes(), s)?;
    let trace: Vec<SeedStep> = by_degree(g)
        .into_iter()
        .take(s)
        .map(|v| SeedStep {
            node: v,
            degree: g.unweighted_degree(v),
            core_size: 0,
            from_core: false,
        })
        .collect();
    Ok(SeedSet {
        seeds: NodeSet::from_unique(trace.iter().map(|t| t.node).collect()),
        method: SeedMethod::Degree,
        s_requested: s,
        trace,
    })
}
