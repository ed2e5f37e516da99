//! Modularity with a resolution parameter and its Louvain maximization.
//!
//! Modularity of a partition `z` of a weighted graph is
//!
//! ```text
//! Q = 1/(2m) * sum_{i,j} [a_ij - gamma * k_i k_j / (2m)] * [z_i == z_j]
//! ```
//!
//! where `k_i` is node strength and `m` the total edge weight. The Louvain
//! heuristic alternates greedy single-node moves with aggregation of the
//! resulting communities into super vertices until nothing improves.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::scalar::Scalar;

/// A full sweep gaining less modularity than this ends a level.
pub const SWEEP_TOLERANCE: f64 = 1e-10;

const MAX_SWEEPS: usize = 10_000;

pub fn modularity<T: Scalar>(g: &Graph<T>, p: &Partition, gamma: T) -> Result<T> {
    p.check_len(g.n_nodes())?;
    if !(gamma > T::zero()) {
        return Err(Error::InvalidArgument("gamma must be positive".into()));
    }
    let two_m = g.total_strength();
    if g.n_edges() == 0 || two_m <= T::zero() {
        return Err(Error::UndefinedModularity);
    }
    let mut inside = vec![T::zero(); p.k()];
    let mut tot = vec![T::zero(); p.k()];
    for i in 0..g.n_nodes() {
        let c = p.label(i);
        tot[c] = tot[c] + g.strength(i);
        for (j, w) in g.adjacency(i) {
            if p.label(j) == c {
                inside[c] = inside[c] + w;
            }
        }
    }
    Ok(community_sum(&inside, &tot, two_m, gamma))
}

fn community_sum<T: Scalar>(inside: &[T], tot: &[T], two_m: T, gamma: T) -> T {
    inside
        .iter()
        .zip(tot)
        .map(|(&a, &t)| a / two_m - gamma * (t / two_m) * (t / two_m))
        .sum()
}

/// Outcome of a Louvain run.
#[derive(Debug, Clone)]
pub struct LouvainRun<T> {
    pub partition: Partition,
    pub q: T,
    /// Modularity after each completed level, measured on the original graph.
    pub level_q: Vec<T>,
}

/// Louvain modularity maximization. Node visiting order is shuffled from
/// `rng_seed`; the returned modularity is recomputed on `g`.
pub fn louvain<T: Scalar>(g: &Graph<T>, gamma: T, rng_seed: u64) -> Result<(Partition, T)> {
    let run = louvain_detailed(g, gamma, rng_seed)?;
    Ok((run.partition, run.q))
}

pub fn louvain_detailed<T: Scalar>(g: &Graph<T>, gamma: T, rng_seed: u64) -> Result<LouvainRun<T>> {
    if !(gamma > T::zero()) {
        return Err(Error::InvalidArgument("gamma must be positive".into()));
    }
    if g.n_edges() == 0 {
        return Err(Error::UndefinedModularity);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut level = LevelGraph::from_graph(g);
    let mut membership: Vec<usize> = (0..g.n_nodes()).collect();
    let mut level_q = Vec::new();

    loop {
        let mut mover = LocalMover::new(&level, gamma);
        let mut order: Vec<usize> = (0..level.n()).collect();
        order.shuffle(&mut rng);
        let mut moved_any = false;
        for _ in 0..MAX_SWEEPS {
            let (moves, gain) = mover.sweep(&level, &order);
            moved_any |= moves > 0;
            if moves == 0 || gain < T::of(SWEEP_TOLERANCE) {
                break;
            }
        }
        if !moved_any {
            break;
        }
        let (dense, k) = densify(&mover.comm);
        for m in membership.iter_mut() {
            *m = dense[*m];
        }
        level_q.push(modularity(g, &Partition::from_labels(membership.clone()), gamma)?);
        if k == level.n() {
            break;
        }
        level = level.aggregate(&dense, k);
    }

    let partition = Partition::from_labels(membership).canonical();
    let q = modularity(g, &partition, gamma)?;
    Ok(LouvainRun {
        partition,
        q,
        level_q,
    })
}

fn densify(comm: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![usize::MAX; comm.len()];
    let mut next = 0;
    let dense = comm
        .iter()
        .map(|&c| {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
            map[c]
        })
        .collect();
    (dense, next)
}

/// Weighted graph with self loops, as produced by aggregation.
#[derive(Debug, Clone)]
struct LevelGraph<T> {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<T>,
    /// `sum_{i,j in block} a_ij` over ordered pairs, i.e. twice the internal weight.
    loops: Vec<T>,
    strength: Vec<T>,
    two_m: T,
}

impl<T: Scalar> LevelGraph<T> {
    fn from_graph(g: &Graph<T>) -> Self {
        let n = g.n_nodes();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for i in 0..n {
            targets.extend_from_slice(g.neighbors(i));
            weights.extend_from_slice(g.neighbor_weights(i));
            offsets.push(targets.len());
        }
        let strength: Vec<T> = (0..n).map(|i| g.strength(i)).collect();
        Self {
            offsets,
            targets,
            weights,
            loops: vec![T::zero(); n],
            strength,
            two_m: g.total_strength(),
        }
    }

    fn n(&self) -> usize {
        self.loops.len()
    }

    fn adjacency(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.targets[r.clone()]
            .iter()
            .copied()
            .zip(self.weights[r].iter().copied())
    }

    /// Collapses each block of `comm` (dense, `k` blocks) into one vertex.
    fn aggregate(&self, comm: &[usize], k: usize) -> Self {
        let mut loops = vec![T::zero(); k];
        let mut strength = vec![T::zero(); k];
        let mut pairs: Vec<(usize, usize, T)> = Vec::new();
        for i in 0..self.n() {
            let ci = comm[i];
            loops[ci] = loops[ci] + self.loops[i];
            strength[ci] = strength[ci] + self.strength[i];
            for (j, w) in self.adjacency(i) {
                let cj = comm[j];
                if ci == cj {
                    loops[ci] = loops[ci] + w;
                } else {
                    pairs.push((ci, cj, w));
                }
            }
        }
        pairs.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut offsets = vec![0; k + 1];
        let mut targets = Vec::new();
        let mut weights: Vec<T> = Vec::new();
        let mut idx = 0;
        for c in 0..k {
            while idx < pairs.len() && pairs[idx].0 == c {
                let (_, d, w) = pairs[idx];
                if targets.len() > offsets[c] && *targets.last().unwrap() == d {
                    let last = weights.last_mut().unwrap();
                    *last = *last + w;
                } else {
                    targets.push(d);
                    weights.push(w);
                }
                idx += 1;
            }
            offsets[c + 1] = targets.len();
        }
        Self {
            offsets,
            targets,
            weights,
            loops,
            strength,
            two_m: self.two_m,
        }
    }

    #[cfg(test)]
    fn modularity(&self, comm: &[usize], gamma: T) -> T {
        let k = comm.iter().max().map_or(0, |&m| m + 1);
        let mut inside = vec![T::zero(); k];
        let mut tot = vec![T::zero(); k];
        for i in 0..self.n() {
            let c = comm[i];
            tot[c] = tot[c] + self.strength[i];
            inside[c] = inside[c] + self.loops[i];
            for (j, w) in self.adjacency(i) {
                if comm[j] == c {
                    inside[c] = inside[c] + w;
                }
            }
        }
        community_sum(&inside, &tot, self.two_m, gamma)
    }
}

/// Local-moving phase state over one level.
struct LocalMover<T> {
    comm: Vec<usize>,
    tot: Vec<T>,
    gamma: T,
    link: Vec<T>,
    touched: Vec<usize>,
}

impl<T: Scalar> LocalMover<T> {
    fn new(level: &LevelGraph<T>, gamma: T) -> Self {
        let n = level.n();
        Self {
            comm: (0..n).collect(),
            tot: level.strength.clone(),
            gamma,
            link: vec![T::zero(); n],
            touched: Vec::new(),
        }
    }

    /// Scaled gain of inserting a node of strength `k` with `link` weight
    /// into community `c`; the modularity change is `2 / two_m` times this.
    fn gain(&self, level: &LevelGraph<T>, link: T, c: usize, k: T) -> T {
        link - self.gamma * self.tot[c] * k / level.two_m
    }

    /// One pass over `order`. Returns the number of moves and the total
    /// modularity gained.
    fn sweep(&mut self, level: &LevelGraph<T>, order: &[usize]) -> (usize, T) {
        let mut moves = 0;
        let mut gained = T::zero();
        let two = T::of(2.0);
        for &i in order {
            let ci = self.comm[i];
            let ki = level.strength[i];
            for (j, w) in level.adjacency(i) {
                let cj = self.comm[j];
                if self.link[cj] == T::zero() {
                    self.touched.push(cj);
                }
                self.link[cj] = self.link[cj] + w;
            }
            self.tot[ci] = self.tot[ci] - ki;
            let stay = self.gain(level, self.link[ci], ci, ki);
            let mut best = (ci, stay);
            self.touched.sort_unstable();
            for &c in &self.touched {
                if c == ci {
                    continue;
                }
                let g = self.gain(level, self.link[c], c, ki);
                if g > best.1 {
                    best = (c, g);
                }
            }
            for &c in &self.touched {
                self.link[c] = T::zero();
            }
            self.touched.clear();
            let (target, g) = best;
            self.tot[target] = self.tot[target] + ki;
            if target != ci {
                self.comm[i] = target;
                moves += 1;
                gained = gained + two * (g - stay) / level.two_m;
            }
        }
        (moves, gained)
    }
}
