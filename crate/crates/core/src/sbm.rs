//! Non-degree-corrected stochastic block model.
//!
//! The likelihood of an undirected simple graph under a partition `z` and
//! block connection probabilities `pi` is a product of independent
//! Bernoulli terms over unordered node pairs. With `pi` at its maximum
//! likelihood estimate the log-likelihood collapses to a sum over block
//! pairs of `e ln(e/n) + (n - e) ln(1 - e/n)`, where `e` counts edges and
//! `n` possible pairs between the two blocks. [`SbmState`] maintains that
//! profile log-likelihood incrementally for merges and single-node moves.
//!
//! Fitting starts from singleton blocks and agglomerates: every block
//! proposes merge partners among the blocks it is connected to, a
//! Metropolis chain at unit temperature over the proposals picks one
//! candidate per block, and the best candidates are merged until the block
//! count has shrunk by [`MERGE_RATIO`] (or reached the target). Rounds that
//! merge nothing fall back to the single best merge over all connected
//! block pairs. Node-level reassignment sweeps then polish the result.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::compression::SuperNodeNetwork;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::scalar::Scalar;

type DetMap<K, V> = FxHashMap<K, V>;

/// Block count shrink factor per agglomeration round.
pub const MERGE_RATIO: f64 = 2.0;
/// Merge partners proposed per block and round.
pub const MERGE_PROPOSALS: usize = 10;
/// Candidate target blocks drawn per node move.
pub const MOVE_PROPOSALS: usize = 4;
/// Nodes linked to at most this many blocks try every one of them.
pub const MAX_LINKED_CANDIDATES: usize = 8;
pub const DEFAULT_SWEEPS: usize = 10;

const MOVE_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockModelParams {
    pub k: usize,
    /// Symmetric `k x k` matrix of connection probabilities.
    pub pi: Vec<Vec<f64>>,
}

impl BlockModelParams {
    pub fn new(pi: Vec<Vec<f64>>) -> Result<Self> {
        let k = pi.len();
        for (a, row) in pi.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidArgument("pi must be square".into()));
            }
            for (b, &x) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::InvalidArgument(format!("pi[{a}][{b}] = {x} outside [0, 1]")));
                }
                if x != pi[b][a] {
                    return Err(Error::InvalidArgument("pi must be symmetric".into()));
                }
            }
        }
        Ok(Self { k, pi })
    }
}

/// Edge and pair counts between blocks of a partition.
struct BlockCensus {
    edges: Vec<Vec<u64>>,
    pairs: Vec<Vec<f64>>,
}

fn census<T: Scalar>(g: &Graph<T>, p: &Partition) -> Result<BlockCensus> {
    if !g.is_unweighted() {
        return Err(Error::WeightedGraph);
    }
    p.check_len(g.n_nodes())?;
    let k = p.k();
    let mut edges = vec![vec![0u64; k]; k];
    for (u, v, _) in g.edges() {
        let (a, b) = (p.label(u), p.label(v));
        edges[a][b] += 1;
        if a != b {
            edges[b][a] += 1;
        }
    }
    let sizes = p.sizes();
    let pairs = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| pair_count(sizes[a] as f64, sizes[b] as f64, a == b))
                .collect()
        })
        .collect();
    Ok(BlockCensus { edges, pairs })
}

fn pair_count(na: f64, nb: f64, same: bool) -> f64 {
    if same {
        na * (na - 1.0) / 2.0
    } else {
        na * nb
    }
}

/// `x ln y` with `0 ln 0 = 0`.
fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// Log-likelihood over unordered pairs `i < j`. Returns `-inf` when an
/// observed pair is impossible under `params`.
pub fn sbm_loglik<T: Scalar>(g: &Graph<T>, p: &Partition, params: &BlockModelParams) -> Result<f64> {
    if params.k != p.k() {
        return Err(Error::LengthMismatch {
            left: params.k,
            right: p.k(),
        });
    }
    let c = census(g, p)?;
    let mut ll = 0.0;
    for a in 0..p.k() {
        for b in a..p.k() {
            let e = c.edges[a][b] as f64;
            let n = c.pairs[a][b];
            let pi = params.pi[a][b];
            ll += xlny(e, pi) + xlny(n - e, 1.0 - pi);
        }
    }
    Ok(ll)
}

/// Maximum likelihood `pi` for a fixed partition: observed edges over
/// possible pairs per block pair, zero where no pair exists.
pub fn estimate_pi<T: Scalar>(g: &Graph<T>, p: &Partition) -> Result<BlockModelParams> {
    let c = census(g, p)?;
    let k = p.k();
    let pi = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    let n = c.pairs[a][b];
                    if n > 0.0 {
                        c.edges[a][b] as f64 / n
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Ok(BlockModelParams { k, pi })
}

/// Profile log-likelihood contribution of one block pair.
fn profile_term(e: u64, n: f64) -> f64 {
    if e == 0 {
        return 0.0;
    }
    let e = e as f64;
    let p = e / n;
    let mut t = e * p.ln();
    if n > e {
        t += (n - e) * (-p).ln_1p();
    }
    t
}

/// Fitting input: nodes with a multiplicity, edge counts between them, and
/// edge counts hidden inside each node.
///
/// A plain graph has unit multiplicities and no hidden edges. A super-node
/// network can be fit either binarized or with multiplicities, in which case
/// the likelihood is that of the original graph restricted to partitions
/// that keep every super node whole.
#[derive(Debug, Clone)]
pub struct BlockData {
    sizes: Vec<u64>,
    internal: Vec<u64>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    counts: Vec<u64>,
}

impl BlockData {
    /// Requires unit weights.
    pub fn from_graph<T: Scalar>(g: &Graph<T>) -> Result<Self> {
        if !g.is_unweighted() {
            return Err(Error::WeightedGraph);
        }
        Ok(Self::binarized(g))
    }

    /// Every edge counts once regardless of weight.
    pub fn binarized<T: Scalar>(g: &Graph<T>) -> Self {
        let n = g.n_nodes();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for i in 0..n {
            targets.extend_from_slice(g.neighbors(i));
            offsets.push(targets.len());
        }
        let counts = vec![1; targets.len()];
        Self {
            sizes: vec![1; n],
            internal: vec![0; n],
            offsets,
            targets,
            counts,
        }
    }

    /// Super nodes weighted by member count; edge weights must be integral
    /// (i.e. the compressed graph was unweighted).
    pub fn with_multiplicity<T: Scalar>(net: &SuperNodeNetwork<T>) -> Result<Self> {
        let g = &net.graph;
        let as_count = |w: T| -> Result<u64> {
            let w = w.as_f64();
            let r = w.round();
            if (w - r).abs() > 1e-6 || r < 0.0 {
                Err(Error::WeightedGraph)
            } else {
                Ok(r as u64)
            }
        };
        let mut data = Self::binarized(g);
        for (slot, &w) in data.counts.iter_mut().zip(
            (0..g.n_nodes()).flat_map(|i| g.neighbor_weights(i).iter()),
        ) {
            *slot = as_count(w)?;
        }
        data.sizes = net.sizes.iter().map(|&s| s as u64).collect();
        data.internal = net
            .internal_weight
            .iter()
            .map(|&w| as_count(w))
            .collect::<Result<_>>()?;
        Ok(data)
    }

    pub fn n(&self) -> usize {
        self.sizes.len()
    }

    /// Total multiplicity.
    pub fn total_size(&self) -> u64 {
        self.sizes.iter().sum()
    }

    fn adjacency(&self, i: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.targets[r.clone()]
            .iter()
            .copied()
            .zip(self.counts[r].iter().copied())
    }
}

/// Block assignment with incrementally maintained profile log-likelihood.
#[derive(Debug, Clone)]
pub struct SbmState<'a> {
    data: &'a BlockData,
    block: Vec<usize>,
    members: Vec<Vec<usize>>,
    pos: Vec<usize>,
    size: Vec<u64>,
    edges: Vec<DetMap<usize, u64>>,
    loglik: f64,
    n_blocks: usize,
    stamp: Vec<usize>,
    epoch: usize,
}

impl<'a> SbmState<'a> {
    /// Every node in its own block.
    pub fn singletons(data: &'a BlockData) -> Self {
        let labels: Vec<usize> = (0..data.n()).collect();
        Self::from_labels(data, &labels)
    }

    /// State for an arbitrary labelling; labels index blocks directly.
    pub fn from_labels(data: &'a BlockData, labels: &[usize]) -> Self {
        let n = data.n();
        assert_eq!(labels.len(), n);
        let nb = labels.iter().max().map_or(0, |&m| m + 1);
        let mut members = vec![Vec::new(); nb];
        let mut pos = vec![0; n];
        let mut size = vec![0u64; nb];
        let mut edges: Vec<DetMap<usize, u64>> = vec![DetMap::default(); nb];
        for (i, &b) in labels.iter().enumerate() {
            pos[i] = members[b].len();
            members[b].push(i);
            size[b] += data.sizes[i];
            if data.internal[i] > 0 {
                *edges[b].entry(b).or_default() += data.internal[i];
            }
            for (j, c) in data.adjacency(i) {
                // Both directions are stored; count each undirected edge once.
                if i < j {
                    let bj = labels[j];
                    *edges[b].entry(bj).or_default() += c;
                    if b != bj {
                        *edges[bj].entry(b).or_default() += c;
                    }
                }
            }
        }
        let n_blocks = members.iter().filter(|m| !m.is_empty()).count();
        let mut s = Self {
            data,
            block: labels.to_vec(),
            members,
            pos,
            size,
            edges,
            loglik: 0.0,
            n_blocks,
            stamp: vec![0; nb],
            epoch: 0,
        };
        s.loglik = s.recompute_loglik();
        s
    }

    pub fn loglik(&self) -> f64 {
        self.loglik
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block[i]
    }

    fn pairs(&self, r: usize, s: usize) -> f64 {
        pair_count(self.size[r] as f64, self.size[s] as f64, r == s)
    }

    fn e(&self, r: usize, s: usize) -> u64 {
        self.edges[r].get(&s).copied().unwrap_or(0)
    }

    /// From-scratch profile log-likelihood.
    pub fn recompute_loglik(&self) -> f64 {
        let mut ll = 0.0;
        for r in 0..self.edges.len() {
            for (&s, &c) in &self.edges[r] {
                if r <= s {
                    ll += profile_term(c, self.pairs(r, s));
                }
            }
        }
        ll
    }

    /// Active blocks in ascending order.
    pub fn active_blocks(&self) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&b| !self.members[b].is_empty())
            .collect()
    }

    /// Partition of the data nodes with dense labels.
    pub fn partition(&self) -> Partition {
        Partition::from_labels(self.block.clone()).canonical()
    }

    /// Change in log-likelihood from merging blocks `r` and `s`.
    pub fn merge_delta(&self, r: usize, s: usize) -> f64 {
        debug_assert!(r != s);
        let e_rs = self.e(r, s);
        let mut old = 0.0;
        for (&t, &c) in &self.edges[r] {
            old += profile_term(c, self.pairs(r, t));
        }
        for (&t, &c) in &self.edges[s] {
            if t != r {
                old += profile_term(c, self.pairs(s, t));
            }
        }
        let merged = self.size[r] + self.size[s];
        let mut new = profile_term(
            self.e(r, r) + self.e(s, s) + e_rs,
            pair_count(merged as f64, 0.0, true),
        );
        let m = merged as f64;
        for (&t, &c) in &self.edges[r] {
            if t != r && t != s {
                new += profile_term(c + self.e(s, t), m * self.size[t] as f64);
            }
        }
        for (&t, &c) in &self.edges[s] {
            if t != r && t != s && self.e(r, t) == 0 {
                new += profile_term(c, m * self.size[t] as f64);
            }
        }
        new - old
    }

    /// Merges block `s` into `r`. Returns the surviving block id.
    pub fn merge(&mut self, r: usize, s: usize) -> usize {
        let delta = self.merge_delta(r, s);
        // Keep the larger member list to limit relabelling.
        let (r, s) = if self.members[r].len() >= self.members[s].len() {
            (r, s)
        } else {
            (s, r)
        };
        let moved = std::mem::take(&mut self.members[s]);
        for &i in &moved {
            self.block[i] = r;
            self.pos[i] = self.members[r].len();
            self.members[r].push(i);
        }
        self.size[r] += self.size[s];
        self.size[s] = 0;
        let es = std::mem::take(&mut self.edges[s]);
        for (t, c) in es {
            if t == s || t == r {
                *self.edges[r].entry(r).or_default() += c;
                if t == r {
                    self.edges[r].remove(&s);
                }
            } else {
                *self.edges[r].entry(t).or_default() += c;
                self.edges[t].remove(&s);
                *self.edges[t].entry(r).or_default() += c;
            }
        }
        self.n_blocks -= 1;
        self.loglik += delta;
        r
    }

    /// Edge counts from node `i` into each block, excluding itself.
    fn links(&self, i: usize, out: &mut Vec<(usize, u64)>) {
        out.clear();
        for (j, c) in self.data.adjacency(i) {
            out.push((self.block[j], c));
        }
        out.sort_unstable_by_key(|p| p.0);
        out.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
    }

    fn link_to(links: &[(usize, u64)], b: usize) -> u64 {
        links
            .binary_search_by_key(&b, |p| p.0)
            .map_or(0, |k| links[k].1)
    }

    /// Change in log-likelihood from moving node `i` to block `s`.
    pub fn move_delta(&mut self, i: usize, s: usize) -> f64 {
        let mut links = Vec::new();
        self.links(i, &mut links);
        self.move_delta_with(i, s, &links)
    }

    fn move_delta_with(&mut self, i: usize, s: usize, links: &[(usize, u64)]) -> f64 {
        let leave = self.leave_delta(i, links);
        self.move_delta_given(i, s, links, leave)
    }

    /// Change of the terms pairing `i`'s block `r` with every other block
    /// when `i` leaves `r`, taking the other blocks' sizes as they are now.
    /// This part does not depend on where `i` goes.
    fn leave_delta(&self, i: usize, links: &[(usize, u64)]) -> f64 {
        let r = self.block[i];
        let nr = self.size[r] as f64;
        let nr2 = (self.size[r] - self.data.sizes[i]) as f64;
        let mut d = 0.0;
        for (&t, &e_rt) in &self.edges[r] {
            if t == r {
                continue;
            }
            let nt = self.size[t] as f64;
            let k_t = Self::link_to(links, t);
            d += profile_term(e_rt - k_t, nr2 * nt) - profile_term(e_rt, nr * nt);
        }
        d
    }

    fn move_delta_given(&mut self, i: usize, s: usize, links: &[(usize, u64)], leave: f64) -> f64 {
        let r = self.block[i];
        if r == s {
            return 0.0;
        }
        let ni = self.data.sizes[i];
        let ci = self.data.internal[i];
        let k_r = Self::link_to(links, r);
        let k_s = Self::link_to(links, s);
        let (nr, ns) = (self.size[r], self.size[s]);
        let (nr2, ns2) = ((nr - ni) as f64, (ns + ni) as f64);
        let (nr, ns) = (nr as f64, ns as f64);

        let e_rr = self.e(r, r);
        let e_ss = self.e(s, s);
        let e_rs = self.e(r, s);
        // `leave` counted the (r, s) pair with s at its old size; swap that
        // contribution for the exact one.
        let mut d = leave - (profile_term(e_rs - k_s, nr2 * ns) - profile_term(e_rs, nr * ns));
        d += profile_term(e_rr - k_r - ci, pair_count(nr2, 0.0, true))
            - profile_term(e_rr, pair_count(nr, 0.0, true));
        d += profile_term(e_ss + k_s + ci, pair_count(ns2, 0.0, true))
            - profile_term(e_ss, pair_count(ns, 0.0, true));
        d += profile_term(e_rs + k_r - k_s, nr2 * ns2) - profile_term(e_rs, nr * ns);

        self.epoch += 1;
        let epoch = self.epoch;
        for (&t, &e_st) in &self.edges[s] {
            if t == r || t == s {
                continue;
            }
            self.stamp[t] = epoch;
            let nt = self.size[t] as f64;
            let k_t = Self::link_to(links, t);
            d += profile_term(e_st + k_t, ns2 * nt) - profile_term(e_st, ns * nt);
        }
        for &(t, k_t) in links {
            if t == r || t == s || self.stamp[t] == epoch {
                continue;
            }
            d += profile_term(k_t, ns2 * self.size[t] as f64);
        }
        d
    }

    fn bump(&mut self, a: usize, b: usize, add: u64, sub: u64) {
        let entry = self.edges[a].entry(b).or_default();
        *entry = *entry + add - sub;
        if *entry == 0 {
            self.edges[a].remove(&b);
        }
    }

    /// Moves node `i` to block `s`, which must be active or `i`'s own.
    pub fn move_node(&mut self, i: usize, s: usize) {
        let r = self.block[i];
        if r == s {
            return;
        }
        let mut links = Vec::new();
        self.links(i, &mut links);
        let delta = self.move_delta_with(i, s, &links);
        let ni = self.data.sizes[i];
        let ci = self.data.internal[i];
        for &(t, c) in &links {
            // Edges from i to block t leave (r, t) and join (s, t).
            if t == r {
                self.bump(r, r, 0, c);
                self.bump(r, s, c, 0);
                self.bump(s, r, c, 0);
            } else if t == s {
                self.bump(s, s, c, 0);
                self.bump(r, s, 0, c);
                self.bump(s, r, 0, c);
            } else {
                self.bump(r, t, 0, c);
                self.bump(t, r, 0, c);
                self.bump(s, t, c, 0);
                self.bump(t, s, c, 0);
            }
        }
        if ci > 0 {
            self.bump(r, r, 0, ci);
            self.bump(s, s, ci, 0);
        }
        let p = self.pos[i];
        self.members[r].swap_remove(p);
        if let Some(&moved) = self.members[r].get(p) {
            self.pos[moved] = p;
        }
        if self.members[r].is_empty() {
            self.n_blocks -= 1;
        }
        self.pos[i] = self.members[s].len();
        self.members[s].push(i);
        self.size[r] -= ni;
        self.size[s] += ni;
        self.block[i] = s;
        self.loglik += delta;
    }

    /// Agglomerates down to `k` blocks. Within a round every block takes part
    /// in at most one merge, so blocks grow by pairing rather than by
    /// snowballing around a few early winners.
    pub fn agglomerate(&mut self, k: usize, level_sweeps: usize, rng: &mut ChaCha8Rng) {
        let mut busy = vec![false; self.members.len()];
        while self.n_blocks > k {
            let mut active = self.active_blocks();
            let b = active.len();
            let target = k.max((b as f64 / MERGE_RATIO).ceil() as usize).min(b - 1);
            let wanted = b - target;
            active.shuffle(rng);

            let mut proposals: Vec<(f64, usize, usize)> = Vec::with_capacity(b);
            let mut nbrs = Vec::new();
            for &r in &active {
                nbrs.clear();
                nbrs.extend(self.edges[r].keys().copied().filter(|&t| t != r));
                nbrs.sort_unstable();
                let mut current: Option<(usize, f64)> = None;
                for _ in 0..MERGE_PROPOSALS {
                    let s = if nbrs.is_empty() {
                        let s = active[rng.gen_range(0..b)];
                        if s == r {
                            continue;
                        }
                        s
                    } else {
                        nbrs[rng.gen_range(0..nbrs.len())]
                    };
                    let d = self.merge_delta(r, s);
                    current = match current {
                        None => Some((s, d)),
                        Some((cs, cd)) => {
                            if d >= cd || rng.gen::<f64>() < (d - cd).exp() {
                                Some((s, d))
                            } else {
                                Some((cs, cd))
                            }
                        }
                    };
                }
                if let Some((s, d)) = current {
                    proposals.push((d, r, s));
                }
            }
            proposals.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));

            let mut merged = 0;
            for &(_, r, s) in &proposals {
                if merged == wanted {
                    break;
                }
                if busy[r] || busy[s] {
                    continue;
                }
                self.merge(r, s);
                busy[r] = true;
                busy[s] = true;
                merged += 1;
            }
            for &r in &active {
                busy[r] = false;
            }
            if merged == 0 {
                let (r, s) = self.best_merge();
                self.merge(r, s);
            }
            if self.n_blocks > k && level_sweeps > 0 {
                self.sweep(level_sweeps, rng);
            }
        }
    }

    /// Exhaustive best merge over connected block pairs, or over all pairs
    /// when no two blocks are connected.
    fn best_merge(&self) -> (usize, usize) {
        let active = self.active_blocks();
        let mut best: Option<(f64, usize, usize)> = None;
        let consider = |best: &mut Option<(f64, usize, usize)>, d: f64, r: usize, s: usize| {
            if best.is_none_or(|(bd, _, _)| d > bd) {
                *best = Some((d, r, s));
            }
        };
        for &r in &active {
            let mut nbrs: Vec<usize> = self.edges[r].keys().copied().filter(|&s| s > r).collect();
            nbrs.sort_unstable();
            for s in nbrs {
                consider(&mut best, self.merge_delta(r, s), r, s);
            }
        }
        if best.is_none() {
            for (x, &r) in active.iter().enumerate() {
                for &s in &active[x + 1..] {
                    consider(&mut best, self.merge_delta(r, s), r, s);
                }
            }
        }
        let (_, r, s) = best.expect("at least two blocks");
        (r, s)
    }

    /// Node reassignment sweeps: each node considers the blocks of its
    /// neighbors (a random subset of them when there are many) plus one
    /// uniformly random block, and moves to the best one if that increases
    /// the log-likelihood. Blocks are never emptied.
    pub fn sweep(&mut self, sweeps: usize, rng: &mut ChaCha8Rng) -> usize {
        let n = self.data.n();
        let mut order: Vec<usize> = (0..n).collect();
        let mut links = Vec::new();
        let mut candidates = Vec::new();
        let mut accepted = 0;
        for _ in 0..sweeps {
            let active = self.active_blocks();
            if active.len() < 2 {
                break;
            }
            order.shuffle(rng);
            let mut moved = 0;
            for &i in &order {
                let r = self.block[i];
                if self.members[r].len() == 1 {
                    continue;
                }
                self.links(i, &mut links);
                candidates.clear();
                if links.len() <= MAX_LINKED_CANDIDATES {
                    candidates.extend(links.iter().map(|l| l.0));
                } else {
                    for _ in 0..MOVE_PROPOSALS - 1 {
                        candidates.push(links[rng.gen_range(0..links.len())].0);
                    }
                }
                candidates.push(active[rng.gen_range(0..active.len())]);
                let leave = self.leave_delta(i, &links);
                let mut best: Option<(f64, usize)> = None;
                for x in 0..candidates.len() {
                    let s = candidates[x];
                    if s == r || self.members[s].is_empty() {
                        continue;
                    }
                    let d = self.move_delta_given(i, s, &links, leave);
                    if best.is_none_or(|(bd, bs)| d > bd || (d == bd && s < bs)) {
                        best = Some((d, s));
                    }
                }
                if let Some((d, s)) = best {
                    if d > MOVE_EPS {
                        self.move_node(i, s);
                        moved += 1;
                    }
                }
            }
            accepted += moved;
            if moved == 0 {
                break;
            }
        }
        accepted
    }
}

/// Fit settings beyond the target block count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Reassignment sweeps after agglomeration.
    pub sweeps: usize,
    /// Reassignment sweeps after every intermediate agglomeration round.
    pub level_sweeps: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            sweeps: DEFAULT_SWEEPS,
            level_sweeps: 1,
        }
    }
}

/// Fits `k` blocks to `data`. Returns the partition of the data nodes and
/// its profile log-likelihood.
pub fn fit_blocks(data: &BlockData, k: usize, rng_seed: u64, opts: FitOptions) -> Result<(Partition, f64)> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if k > data.n() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds node count {}",
            data.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut state = SbmState::singletons(data);
    state.agglomerate(k, opts.level_sweeps, &mut rng);
    state.sweep(opts.sweeps, &mut rng);
    let p = state.partition();
    let ll = SbmState::from_labels(data, p.labels()).recompute_loglik();
    Ok((p, ll))
}

/// Fits a `k`-block model to an unweighted graph.
pub fn fit_sbm<T: Scalar>(g: &Graph<T>, k: usize, rng_seed: u64, sweeps: usize) -> Result<(Partition, f64)> {
    fit_sbm_with(
        g,
        k,
        rng_seed,
        FitOptions {
            sweeps,
            ..FitOptions::default()
        },
    )
}

pub fn fit_sbm_with<T: Scalar>(
    g: &Graph<T>,
    k: usize,
    rng_seed: u64,
    opts: FitOptions,
) -> Result<(Partition, f64)> {
    let data = BlockData::from_graph(g)?;
    let (p, _) = fit_blocks(&data, k, rng_seed, opts)?;
    let ll = sbm_loglik(g, &p, &estimate_pi(g, &p)?)?;
    Ok((p, ll))
}

/// Penalized score used for choosing the number of blocks: one half
/// `ln(pairs)` per block-pair parameter.
pub fn penalized_score(loglik: f64, k: usize, n: u64) -> f64 {
    let n = n as f64;
    let params = (k * (k + 1) / 2) as f64;
    loglik - params * (n * (n - 1.0) / 2.0).ln() / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSelection {
    pub k: usize,
    /// `(k, loglik, score)` for every candidate.
    pub table: Vec<(usize, f64, f64)>,
    pub partition: Partition,
}

/// Fits every `k` in `k_min..=k_max` and keeps the best penalized score,
/// lowest `k` on ties.
pub fn select_k_blocks(
    data: &BlockData,
    k_min: usize,
    k_max: usize,
    rng_seed: u64,
    opts: FitOptions,
) -> Result<KSelection> {
    if k_min == 0 || k_min > k_max || k_max > data.n() {
        return Err(Error::InvalidArgument(format!(
            "invalid k range {k_min}..={k_max} for {} nodes",
            data.n()
        )));
    }
    let n = data.total_size();
    let fits: Vec<(usize, Partition, f64)> = (k_min..=k_max)
        .into_par_iter()
        .map(|k| fit_blocks(data, k, rng_seed, opts).map(|(p, ll)| (k, p, ll)))
        .collect::<Result<_>>()?;
    let mut best: Option<(f64, usize)> = None;
    let mut table = Vec::with_capacity(fits.len());
    for (x, (k, _, ll)) in fits.iter().enumerate() {
        let score = penalized_score(*ll, *k, n);
        table.push((*k, *ll, score));
        if best.is_none_or(|(bs, _)| score > bs) {
            best = Some((score, x));
        }
    }
    let (_, x) = best.expect("nonempty range");
    let (k, partition, _) = fits.into_iter().nth(x).expect("index in range");
    Ok(KSelection { k, table, partition })
}

/// Number of blocks for an unweighted graph by penalized likelihood.
pub fn select_k<T: Scalar>(g: &Graph<T>, k_min: usize, k_max: usize, rng_seed: u64) -> Result<usize> {
    let data = BlockData::from_graph(g)?;
    Ok(select_k_blocks(&data, k_min, k_max, rng_seed, FitOptions::default())?.k)
}
