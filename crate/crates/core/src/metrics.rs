//! Partition comparison and local-agreement metrics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Bfs, Graph};
use crate::partition::Partition;
use crate::scalar::Scalar;

/// Normalized mutual information, mutual information over the mean of the
/// two entropies (natural logs). Two single-community partitions score 1.
pub fn nmi(a: &Partition, b: &Partition) -> Result<f64> {
    a.check_len(b.len())?;
    let n = a.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty partitions".into()));
    }
    let mut joint: Vec<(usize, usize)> = a
        .labels()
        .iter()
        .copied()
        .zip(b.labels().iter().copied())
        .collect();
    joint.sort_unstable();
    let nf = n as f64;
    let (sa, sb) = (a.sizes(), b.sizes());
    let entropy = |sizes: &[usize]| -> f64 {
        sizes
            .iter()
            .filter(|&&s| s > 0)
            .map(|&s| {
                let p = s as f64 / nf;
                -p * p.ln()
            })
            .sum()
    };
    let (ha, hb) = (entropy(&sa), entropy(&sb));
    if ha + hb == 0.0 {
        return Ok(1.0);
    }
    let mut mi = 0.0;
    let mut x = 0;
    while x < joint.len() {
        let cell = joint[x];
        let mut count = 0usize;
        while x < joint.len() && joint[x] == cell {
            count += 1;
            x += 1;
        }
        let c = count as f64;
        mi += c / nf * (c * nf / (sa[cell.0] as f64 * sb[cell.1] as f64)).ln();
    }
    Ok((2.0 * mi / (ha + hb)).clamp(0.0, 1.0))
}

/// Ranks ascending values from 1, giving tied values their average rank.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut x = 0;
    while x < idx.len() {
        let mut y = x;
        while y + 1 < idx.len() && values[idx[y + 1]] == values[idx[x]] {
            y += 1;
        }
        let mid = (x + y) as f64 / 2.0 + 1.0;
        for &i in &idx[x..=y] {
            ranks[i] = mid;
        }
        x = y + 1;
    }
    ranks
}

/// Midrank of every node keyed by the size of its community.
pub fn community_size_ranking(p: &Partition) -> Vec<f64> {
    let sizes = p.sizes();
    let keys: Vec<f64> = p.labels().iter().map(|&l| sizes[l] as f64).collect();
    midranks(&keys)
}

/// Kendall's tau-b in `O(n log n)`.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two observations".into()));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("NaN in ranking".into()));
    }
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let tie_pairs = |t: u64| t * t.saturating_sub(1) / 2;
    let mut ties_x = 0u64;
    let mut ties_xy = 0u64;
    let (mut run_x, mut run_xy) = (1u64, 1u64);
    for w in pairs.windows(2) {
        if w[0].0 == w[1].0 {
            run_x += 1;
            if w[0].1 == w[1].1 {
                run_xy += 1;
            } else {
                ties_xy += tie_pairs(run_xy);
                run_xy = 1;
            }
        } else {
            ties_x += tie_pairs(run_x);
            ties_xy += tie_pairs(run_xy);
            run_x = 1;
            run_xy = 1;
        }
    }
    ties_x += tie_pairs(run_x);
    ties_xy += tie_pairs(run_xy);

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut ys, &mut buf);

    let mut ties_y = 0u64;
    let mut run_y = 1u64;
    for w in ys.windows(2) {
        if w[0] == w[1] {
            run_y += 1;
        } else {
            ties_y += tie_pairs(run_y);
            run_y = 1;
        }
    }
    ties_y += tie_pairs(run_y);

    let n0 = tie_pairs(n as u64);
    let denom = ((n0 - ties_x) as f64 * (n0 - ties_y) as f64).sqrt();
    if denom == 0.0 {
        return Err(Error::DegenerateRanking);
    }
    let numer = n0 as i128 - ties_x as i128 - ties_y as i128 + ties_xy as i128 - 2 * swaps as i128;
    Ok(numer as f64 / denom)
}

/// Stable merge sort returning the number of strictly inverted pairs.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid], &mut buf[..mid]) + merge_count(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Which neighbors count at a given order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NeighborhoodMode {
    /// Hop distance `1..=order`.
    #[default]
    Within,
    /// Hop distance exactly `order`.
    Exactly,
}

fn neighbor_support<T: Scalar>(
    g: &Graph<T>,
    p: &Partition,
    i: usize,
    order: usize,
    mode: NeighborhoodMode,
    bfs: &mut Bfs,
) -> Vec<(usize, f64)> {
    let mut labels = Vec::new();
    bfs.run(g, i, order, |j, d| {
        if mode == NeighborhoodMode::Within || d == order {
            labels.push(p.label(j));
        }
    });
    if labels.is_empty() {
        return Vec::new();
    }
    let total = labels.len() as f64;
    labels.sort_unstable();
    let mut out: Vec<(usize, f64)> = Vec::new();
    for l in labels {
        match out.last_mut() {
            Some(last) if last.0 == l => last.1 += 1.0,
            _ => out.push((l, 1.0)),
        }
    }
    for e in &mut out {
        e.1 /= total;
    }
    out
}

/// Fraction of `i`'s neighbors (within `order` hops) in each community;
/// all zeros when the neighborhood is empty.
pub fn neighbor_community_distribution<T: Scalar>(
    g: &Graph<T>,
    p: &Partition,
    i: usize,
    order: usize,
) -> Result<Vec<f64>> {
    neighbor_community_distribution_with(g, p, i, order, NeighborhoodMode::Within)
}

pub fn neighbor_community_distribution_with<T: Scalar>(
    g: &Graph<T>,
    p: &Partition,
    i: usize,
    order: usize,
    mode: NeighborhoodMode,
) -> Result<Vec<f64>> {
    p.check_len(g.n_nodes())?;
    g.check_node(i)?;
    if order == 0 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    let mut dist = vec![0.0; p.k()];
    for (c, f) in neighbor_support(g, p, i, order, mode, &mut Bfs::new(g.n_nodes())) {
        dist[c] = f;
    }
    Ok(dist)
}

/// Area under the ROC curve of `scores` for separating positives from
/// negatives, ties counted half (Mann-Whitney with midranks). `None` when
/// either class is empty.
pub fn auc(scores: &[f64], positive: &[bool]) -> Option<f64> {
    let n_pos = positive.iter().filter(|&&b| b).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let ranks = midranks(scores);
    let rank_sum: f64 = ranks
        .iter()
        .zip(positive)
        .filter(|(_, &b)| b)
        .map(|(r, _)| r)
        .sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Some(u / (n_pos as f64 * n_neg as f64))
}

/// AUC per community of predicting membership from neighbor fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AucTable {
    /// `None` for communities lacking members or non-members.
    pub per_community: Vec<Option<f64>>,
}

impl AucTable {
    pub fn min(&self) -> Option<f64> {
        self.per_community.iter().flatten().copied().reduce(f64::min)
    }

    pub fn skipped(&self) -> Vec<usize> {
        (0..self.per_community.len())
            .filter(|&c| self.per_community[c].is_none())
            .collect()
    }
}

pub fn community_aucs<T: Scalar>(
    g: &Graph<T>,
    p: &Partition,
    order: usize,
    mode: NeighborhoodMode,
) -> Result<AucTable> {
    p.check_len(g.n_nodes())?;
    if order == 0 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    let n = g.n_nodes();
    let supports: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map_init(
            || Bfs::new(n),
            |bfs, i| neighbor_support(g, p, i, order, mode, bfs),
        )
        .collect();

    // Scores are zero except where a node's neighborhood touches the
    // community, so only nonzero scores are materialized.
    let mut nonzero: Vec<Vec<(f64, bool)>> = vec![Vec::new(); p.k()];
    for (i, sup) in supports.iter().enumerate() {
        for &(c, f) in sup {
            nonzero[c].push((f, p.label(i) == c));
        }
    }
    let sizes = p.sizes();
    let per_community = nonzero
        .into_par_iter()
        .enumerate()
        .map(|(c, mut scored)| {
            let n_pos = sizes[c];
            let n_neg = n - n_pos;
            if n_pos == 0 || n_neg == 0 {
                return None;
            }
            scored.sort_by(|a, b| a.0.total_cmp(&b.0));
            let zeros = n - scored.len();
            let pos_nonzero = scored.iter().filter(|s| s.1).count();
            // Zero scores occupy ranks 1..=zeros.
            let mut rank_sum = (n_pos - pos_nonzero) as f64 * (zeros as f64 + 1.0) / 2.0;
            let mut x = 0;
            while x < scored.len() {
                let mut y = x;
                while y + 1 < scored.len() && scored[y + 1].0 == scored[x].0 {
                    y += 1;
                }
                let mid = (zeros + x + zeros + y) as f64 / 2.0 + 1.0;
                let pos = scored[x..=y].iter().filter(|s| s.1).count();
                rank_sum += pos as f64 * mid;
                x = y + 1;
            }
            let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
            Some(u / (n_pos as f64 * n_neg as f64))
        })
        .collect();
    Ok(AucTable { per_community })
}

/// Minimum over communities of the membership-prediction AUC.
pub fn min_auc<T: Scalar>(g: &Graph<T>, p: &Partition, order: usize) -> Result<f64> {
    min_auc_with(g, p, order, NeighborhoodMode::Within)
}

pub fn min_auc_with<T: Scalar>(
    g: &Graph<T>,
    p: &Partition,
    order: usize,
    mode: NeighborhoodMode,
) -> Result<f64> {
    community_aucs(g, p, order, mode)?
        .min()
        .ok_or(Error::DegeneratePartition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_tau(x: &[f64], y: &[f64]) -> Option<f64> {
        let n = x.len();
        let (mut conc, mut disc, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
        for i in 0..n {
            for j in i + 1..n {
                let dx = x[i] - x[j];
                let dy = y[i] - y[j];
                if dx == 0.0 && dy == 0.0 {
                    continue;
                } else if dx == 0.0 {
                    tx += 1;
                } else if dy == 0.0 {
                    ty += 1;
                } else if (dx > 0.0) == (dy > 0.0) {
                    conc += 1;
                } else {
                    disc += 1;
                }
            }
        }
        let d = (((conc + disc + tx) * (conc + disc + ty)) as f64).sqrt();
        (d > 0.0).then(|| (conc - disc) as f64 / d)
    }

    #[test]
    fn nmi_examples() {
        let p = Partition::from_labels(vec![0, 0, 1, 1, 2]);
        assert!((nmi(&p, &p).unwrap() - 1.0).abs() < 1e-15);
        let a = Partition::from_labels(vec![0, 0, 1, 1]);
        let b = Partition::from_labels(vec![0, 1, 0, 1]);
        assert_eq!(nmi(&a, &b).unwrap(), 0.0);
        assert_eq!(nmi(&a, &Partition::single(4)).unwrap(), 0.0);
        assert_eq!(nmi(&Partition::single(4), &Partition::single(4)).unwrap(), 1.0);
        assert!(nmi(&a, &Partition::single(3)).is_err());
    }

    #[test]
    fn ranking_examples() {
        let p = Partition::from_labels(vec![0, 0, 0, 1]);
        assert_eq!(community_size_ranking(&p), vec![3.0, 3.0, 3.0, 1.0]);
        assert_eq!(community_size_ranking(&Partition::singletons(4)), vec![2.5; 4]);
        assert_eq!(community_size_ranking(&Partition::single(3)), vec![2.0; 3]);
    }

    #[test]
    fn tau_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(kendall_tau(&x, &x).unwrap(), 1.0);
        assert_eq!(kendall_tau(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
        let t = kendall_tau(&x, &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((t - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            kendall_tau(&[1.0, 1.0], &[1.0, 1.0]),
            Err(Error::DegenerateRanking)
        ));
        assert!(matches!(
            kendall_tau(&x, &[2.0; 4]),
            Err(Error::DegenerateRanking)
        ));
        assert!(kendall_tau(&x, &x[..3]).is_err());
        assert!(kendall_tau(&[1.0], &[1.0]).is_err());
    }

    fn path3() -> Graph<f64> {
        Graph::from_unweighted(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn neighbor_distribution_examples() {
        let tri = Graph::<f64>::from_unweighted(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(
            neighbor_community_distribution(&tri, &Partition::single(3), 0, 1).unwrap(),
            vec![1.0]
        );
        assert_eq!(
            neighbor_community_distribution(&path3(), &Partition::singletons(3), 1, 1).unwrap(),
            vec![0.5, 0.0, 0.5]
        );
        let mut b = crate::graph::GraphBuilder::<f64>::with_nodes(3);
        b.add_edge(0, 1, 1.0).unwrap();
        let g = b.build();
        assert_eq!(
            neighbor_community_distribution(&g, &Partition::from_labels(vec![0, 1, 1]), 2, 1)
                .unwrap(),
            vec![0.0, 0.0]
        );
        // Exactly-at-order variant.
        let p4 = Graph::<f64>::from_unweighted(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let z = Partition::from_labels(vec![0, 0, 1, 1]);
        assert_eq!(
            neighbor_community_distribution_with(&p4, &z, 0, 2, NeighborhoodMode::Exactly).unwrap(),
            vec![0.0, 1.0]
        );
        assert_eq!(
            neighbor_community_distribution(&p4, &z, 0, 2).unwrap(),
            vec![0.5, 0.5]
        );
    }

    #[test]
    fn min_auc_examples() {
        let two_tri =
            Graph::<f64>::from_unweighted(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
                .unwrap();
        let comps = Partition::from_labels(vec![0, 0, 0, 1, 1, 1]);
        assert_eq!(min_auc(&two_tri, &comps, 1).unwrap(), 1.0);

        let dyads = Graph::<f64>::from_unweighted(4, &[(0, 1), (2, 3)]).unwrap();
        let crossed = Partition::from_labels(vec![0, 1, 0, 1]);
        let table = community_aucs(&dyads, &crossed, 1, NeighborhoodMode::Within).unwrap();
        assert_eq!(table.per_community, vec![Some(0.0), Some(0.0)]);

        assert!(matches!(
            min_auc(&two_tri, &Partition::single(6), 1),
            Err(Error::DegeneratePartition)
        ));
    }

    #[test]
    fn auc_helper() {
        assert_eq!(auc(&[0.1, 0.9], &[false, true]), Some(1.0));
        assert_eq!(auc(&[0.5, 0.5], &[false, true]), Some(0.5));
        assert_eq!(auc(&[0.5], &[true]), None);
    }

    proptest! {
        #[test]
        fn tau_matches_pair_count(
            x in prop::collection::vec(0u8..6, 2..60),
            y in prop::collection::vec(0u8..6, 2..60),
        ) {
            let n = x.len().min(y.len());
            let x: Vec<f64> = x[..n].iter().map(|&v| v as f64).collect();
            let y: Vec<f64> = y[..n].iter().map(|&v| v as f64).collect();
            match (kendall_tau(&x, &y), brute_tau(&x, &y)) {
                (Ok(a), Some(b)) => prop_assert!((a - b).abs() < 1e-12),
                (Err(Error::DegenerateRanking), None) => {}
                (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
            }
        }

        #[test]
        fn tau_invariant_under_monotone_maps(x in prop::collection::vec(-50i32..50, 3..40), y in prop::collection::vec(-50i32..50, 3..40)) {
            let n = x.len().min(y.len());
            let x: Vec<f64> = x[..n].iter().map(|&v| v as f64).collect();
            let y: Vec<f64> = y[..n].iter().map(|&v| v as f64).collect();
            let fx: Vec<f64> = x.iter().map(|v| (v / 10.0).exp()).collect();
            let gy: Vec<f64> = y.iter().map(|v| v * v * v + 3.0).collect();
            if let (Ok(a), Ok(b)) = (kendall_tau(&x, &y), kendall_tau(&fx, &gy)) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn nmi_symmetric_and_label_invariant(
            a in prop::collection::vec(0usize..5, 1..80),
            b in prop::collection::vec(0usize..5, 1..80),
        ) {
            let n = a.len().min(b.len());
            let pa = Partition::from_labels(a[..n].to_vec());
            let pb = Partition::from_labels(b[..n].to_vec());
            let ab = nmi(&pa, &pb).unwrap();
            prop_assert!((ab - nmi(&pb, &pa).unwrap()).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab));
            let permuted = Partition::from_labels(pa.labels().iter().map(|&l| 7 * (pa.k() - l)).collect());
            prop_assert!((ab - nmi(&permuted, &pb).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn complemented_scores_flip_auc(scores in prop::collection::vec(0u8..5, 2..50), labels in prop::collection::vec(any::<bool>(), 2..50)) {
            let n = scores.len().min(labels.len());
            let s: Vec<f64> = scores[..n].iter().map(|&v| v as f64 / 4.0).collect();
            let c: Vec<f64> = s.iter().map(|v| 1.0 - v).collect();
            if let (Some(a), Some(b)) = (auc(&s, &labels[..n]), auc(&c, &labels[..n])) {
                prop_assert!((a + b - 1.0).abs() < 1e-12);
            }
        }
    }
}
