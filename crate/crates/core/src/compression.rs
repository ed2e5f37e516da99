//! Super-node growth around seeds, contraction to the weighted super-node
//! network, and lifting of super-node partitions back to the original nodes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};
use crate::partition::Partition;
use crate::scalar::Scalar;
use crate::seeding::{select_seeds, SeedMethod, SeedSet};

/// Default maximum neighborhood order for growth.
pub const DEFAULT_O_MAX: usize = 5;

/// Node-to-super-node map. `None` marks the periphery.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuperNodeAssignment {
    pub assign: Vec<Option<usize>>,
    /// Growth round that absorbed each node; 0 for seeds, `None` for periphery.
    pub absorbed_at: Vec<Option<usize>>,
    pub o_max: usize,
    /// Seed node of each super node.
    pub seed_of: Vec<usize>,
}

impl SuperNodeAssignment {
    pub fn n_nodes(&self) -> usize {
        self.assign.len()
    }

    pub fn n_supernodes(&self) -> usize {
        self.seed_of.len()
    }

    pub fn periphery_count(&self) -> usize {
        self.assign.iter().filter(|a| a.is_none()).count()
    }

    /// Number of original nodes in each super node.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_supernodes()];
        for &u in self.assign.iter().flatten() {
            sizes[u] += 1;
        }
        sizes
    }

    /// Two-column `external_node_id supernode_index` text, `P` for periphery.
    pub fn to_text<T: Scalar>(&self, g: &Graph<T>) -> String {
        let mut out = String::new();
        for (i, a) in self.assign.iter().enumerate() {
            let _ = match a {
                Some(u) => writeln!(out, "{} {}", g.label(i), u),
                None => writeln!(out, "{} P", g.label(i)),
            };
        }
        out
    }

    pub fn to_json<T: Scalar>(&self, g: &Graph<T>) -> Result<String> {
        #[derive(Serialize)]
        struct Row<'a> {
            node: &'a str,
            supernode: Option<usize>,
            absorbed_at: Option<usize>,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            o_max: usize,
            n_supernodes: usize,
            periphery: usize,
            seeds: Vec<&'a str>,
            nodes: Vec<Row<'a>>,
        }
        let doc = Doc {
            o_max: self.o_max,
            n_supernodes: self.n_supernodes(),
            periphery: self.periphery_count(),
            seeds: self.seed_of.iter().map(|&s| g.label(s)).collect(),
            nodes: (0..self.n_nodes())
                .map(|i| Row {
                    node: g.label(i),
                    supernode: self.assign[i],
                    absorbed_at: self.absorbed_at[i],
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

/// Grows one super node per seed by synchronized frontier expansion.
///
/// In round `o` every unassigned node adjacent to an already assigned node
/// is claimed by the adjacent super node it is most strongly connected to
/// (total edge weight into that super node's members from earlier rounds),
/// lowest super-node index on ties. Nodes left after `o_max` rounds form
/// the periphery.
pub fn grow_supernodes<T: Scalar>(
    g: &Graph<T>,
    seeds: &[usize],
    o_max: usize,
) -> Result<SuperNodeAssignment> {
    let n = g.n_nodes();
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("no seeds".into()));
    }
    if o_max == 0 {
        return Err(Error::InvalidArgument("o_max must be at least 1".into()));
    }
    let mut assign: Vec<Option<usize>> = vec![None; n];
    let mut absorbed_at: Vec<Option<usize>> = vec![None; n];
    for (u, &s) in seeds.iter().enumerate() {
        g.check_node(s)?;
        if assign[s].is_some() {
            return Err(Error::InvalidArgument(format!("duplicate seed {s}")));
        }
        assign[s] = Some(u);
        absorbed_at[s] = Some(0);
    }

    let mut frontier: Vec<usize> = seeds.to_vec();
    let mut stamp = vec![usize::MAX; n];
    let mut links: Vec<(usize, T)> = Vec::new();
    for order in 1..=o_max {
        let mut candidates = Vec::new();
        for &f in &frontier {
            for &c in g.neighbors(f) {
                if assign[c].is_none() && stamp[c] != order {
                    stamp[c] = order;
                    candidates.push(c);
                }
            }
        }
        if candidates.is_empty() {
            break;
        }
        candidates.sort_unstable();

        let mut claims = Vec::with_capacity(candidates.len());
        for &c in &candidates {
            links.clear();
            links.extend(g.adjacency(c).filter_map(|(j, w)| assign[j].map(|u| (u, w))));
            links.sort_unstable_by_key(|&(u, _)| u);
            let mut best: Option<(usize, T)> = None;
            let mut k = 0;
            while k < links.len() {
                let u = links[k].0;
                let mut w = T::zero();
                while k < links.len() && links[k].0 == u {
                    w = w + links[k].1;
                    k += 1;
                }
                // Ascending u: strict comparison keeps the lowest index on ties.
                if best.is_none_or(|(_, bw)| w > bw) {
                    best = Some((u, w));
                }
            }
            let (u, _) = best.expect("candidate touches an assigned node");
            claims.push((c, u));
        }
        for &(c, u) in &claims {
            assign[c] = Some(u);
            absorbed_at[c] = Some(order);
        }
        frontier = candidates;
    }

    Ok(SuperNodeAssignment {
        assign,
        absorbed_at,
        o_max,
        seed_of: seeds.to_vec(),
    })
}

/// Weighted network between super nodes plus the weight it leaves out.
#[derive(Debug, Clone)]
pub struct SuperNodeNetwork<T> {
    /// One node per super node, labelled by its seed's external id. No self loops.
    pub graph: Graph<T>,
    /// Total weight of original edges inside each super node.
    pub internal_weight: Vec<T>,
    /// Total weight of original edges touching a periphery node.
    pub periphery_edge_weight: T,
    /// Member count of each super node.
    pub sizes: Vec<usize>,
}

impl<T: Scalar> SuperNodeNetwork<T> {
    pub fn cross_weight(&self) -> T {
        self.graph.total_weight()
    }

    /// Cross, internal and periphery weight summed; equals the original
    /// graph's total edge weight.
    pub fn accounted_weight(&self) -> T {
        self.cross_weight()
            + self.internal_weight.iter().copied().sum::<T>()
            + self.periphery_edge_weight
    }

    pub fn conserves(&self, original: &Graph<T>, rel_tol: f64) -> bool {
        crate::scalar::close(self.accounted_weight(), original.total_weight(), rel_tol)
    }
}

/// Contracts `g` along `a`: the weight between two distinct super nodes is
/// the total weight of original edges joining their members.
pub fn contract<T: Scalar>(g: &Graph<T>, a: &SuperNodeAssignment) -> Result<SuperNodeNetwork<T>> {
    a_matches(g, a)?;
    let s = a.n_supernodes();
    let mut b = GraphBuilder::new();
    for &seed in &a.seed_of {
        b.add_node(g.label(seed));
    }
    let mut internal = vec![T::zero(); s];
    let mut periphery = T::zero();
    for (i, j, w) in g.edges() {
        match (a.assign[i], a.assign[j]) {
            (Some(u), Some(v)) if u == v => internal[u] = internal[u] + w,
            (Some(u), Some(v)) => b.add_edge(u, v, w)?,
            _ => periphery = periphery + w,
        }
    }
    Ok(SuperNodeNetwork {
        graph: b.build(),
        internal_weight: internal,
        periphery_edge_weight: periphery,
        sizes: a.sizes(),
    })
}

fn a_matches<T: Scalar>(g: &Graph<T>, a: &SuperNodeAssignment) -> Result<()> {
    if a.n_nodes() != g.n_nodes() {
        return Err(Error::LengthMismatch {
            left: a.n_nodes(),
            right: g.n_nodes(),
        });
    }
    Ok(())
}

/// Lifts a partition of the super nodes to the original nodes. Periphery
/// nodes share one extra community labelled after the super-node ones.
pub fn map_partition(sp: &Partition, a: &SuperNodeAssignment) -> Result<Partition> {
    sp.check_len(a.n_supernodes())?;
    let periphery = sp.k();
    let labels = a
        .assign
        .iter()
        .map(|slot| slot.map_or(periphery, |u| sp.label(u)))
        .collect();
    Ok(Partition::from_labels(labels))
}

/// Seeds, growth and contraction in one call.
#[derive(Debug, Clone)]
pub struct Compression<T> {
    pub seeds: SeedSet,
    pub assignment: SuperNodeAssignment,
    pub network: SuperNodeNetwork<T>,
}

pub fn compress<T: Scalar>(
    g: &Graph<T>,
    s: usize,
    method: SeedMethod,
    o_max: usize,
) -> Result<Compression<T>> {
    let seeds = select_seeds(g, s, method)?;
    let assignment = grow_supernodes(g, seeds.as_slice(), o_max)?;
    let network = contract(g, &assignment)?;
    Ok(Compression {
        seeds,
        assignment,
        network,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> Graph<f64> {
        Graph::from_unweighted(
            6,
            &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)],
        )
        .unwrap()
    }

    #[test]
    fn grows_two_triangles() {
        let g = two_triangles();
        let a = grow_supernodes(&g, &[2, 3], 1).unwrap();
        let sn: Vec<_> = a.assign.iter().map(|x| x.unwrap()).collect();
        assert_eq!(sn, vec![0, 0, 0, 1, 1, 1]);
        assert_eq!(a.absorbed_at[2], Some(0));
        assert_eq!(a.absorbed_at[0], Some(1));
        assert_eq!(a.sizes(), vec![3, 3]);
    }

    #[test]
    fn path_leaves_periphery() {
        let g = Graph::<f64>::from_unweighted(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let a = grow_supernodes(&g, &[0], 2).unwrap();
        assert_eq!(a.assign, vec![Some(0), Some(0), Some(0), None, None]);
        assert_eq!(a.absorbed_at, vec![Some(0), Some(1), Some(2), None, None]);
        assert_eq!(a.periphery_count(), 2);
        assert_eq!(a.to_text(&g).lines().last(), Some("4 P"));
    }

    #[test]
    fn all_seeds_is_identity() {
        let g = two_triangles();
        let seeds: Vec<usize> = (0..6).collect();
        let a = grow_supernodes(&g, &seeds, 3).unwrap();
        assert_eq!(a.assign, (0..6).map(Some).collect::<Vec<_>>());
        let w = contract(&g, &a).unwrap();
        assert_eq!(w.graph.to_edge_list(), g.to_edge_list());
    }

    #[test]
    fn conflicts_go_to_the_stronger_connection() {
        // Node 4 touches super node 0 through 1 (weight 1) and super node 1
        // through 3 (weight 5); both 1 and 3 were absorbed in round one.
        let g = Graph::<f64>::from_edges(
            5,
            &[(0, 1, 1.0), (2, 3, 1.0), (1, 4, 1.0), (3, 4, 5.0)],
        )
        .unwrap();
        let a = grow_supernodes(&g, &[0, 2], 2).unwrap();
        assert_eq!(a.assign[4], Some(1));
        // Equal weights fall back to the lower super-node index.
        let g = Graph::<f64>::from_unweighted(3, &[(0, 1), (1, 2)]).unwrap();
        let a = grow_supernodes(&g, &[2, 0], 1).unwrap();
        assert_eq!(a.assign[1], Some(0));
    }

    #[test]
    fn rejects_bad_seeds() {
        let g = two_triangles();
        assert!(grow_supernodes(&g, &[], 1).is_err());
        assert!(grow_supernodes(&g, &[9], 1).is_err());
        assert!(grow_supernodes(&g, &[1, 1], 1).is_err());
        assert!(grow_supernodes(&g, &[1], 0).is_err());
    }

    #[test]
    fn contracts_two_triangles() {
        let g = two_triangles();
        let a = grow_supernodes(&g, &[2, 3], 1).unwrap();
        let w = contract(&g, &a).unwrap();
        assert_eq!(w.graph.n_nodes(), 2);
        assert_eq!(w.graph.n_edges(), 1);
        assert_eq!(w.graph.neighbor_weights(0), &[1.0]);
        assert_eq!(w.internal_weight, vec![3.0, 3.0]);
        assert_eq!(w.periphery_edge_weight, 0.0);
        assert!(w.conserves(&g, 1e-12));
    }

    #[test]
    fn single_supernode_keeps_everything_internal() {
        let g = two_triangles();
        let a = grow_supernodes(&g, &[2], 5).unwrap();
        let w = contract(&g, &a).unwrap();
        assert_eq!(w.graph.n_edges(), 0);
        assert_eq!(w.internal_weight, vec![7.0]);
    }

    #[test]
    fn maps_partitions_back() {
        let g = two_triangles();
        let a = grow_supernodes(&g, &[2, 3], 1).unwrap();
        let z = map_partition(&Partition::from_labels(vec![0, 1]), &a).unwrap();
        assert_eq!(z.labels(), &[0, 0, 0, 1, 1, 1]);
        assert!(map_partition(&Partition::singletons(3), &a).is_err());

        let p = Graph::<f64>::from_unweighted(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let a = grow_supernodes(&p, &[0], 2).unwrap();
        let z = map_partition(&Partition::single(1), &a).unwrap();
        assert_eq!(z.labels(), &[0, 0, 0, 1, 1]);
        assert_eq!(z.k(), 2);

        let seeds: Vec<usize> = (0..6).collect();
        let a = grow_supernodes(&g, &seeds, 1).unwrap();
        let sp = Partition::from_labels(vec![1, 0, 1, 2, 2, 0]);
        assert_eq!(map_partition(&sp, &a).unwrap(), sp);
    }
}
