//! Planted-partition graphs with known communities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};
use crate::partition::Partition;
use crate::scalar::Scalar;

/// Group of each node when `n` nodes are split into `k` contiguous groups
/// whose sizes differ by at most one, larger groups first.
pub fn even_groups(n: usize, k: usize) -> Vec<usize> {
    let (base, extra) = (n / k, n % k);
    (0..k)
        .flat_map(|g| std::iter::repeat_n(g, base + usize::from(g < extra)))
        .collect()
}

/// Samples an undirected graph where each pair inside a group is linked with
/// probability `p_in` and each pair across groups with `p_out`. Returns the
/// graph (isolated nodes kept) and the planted groups.
pub fn planted_partition<T: Scalar>(
    n: usize,
    k: usize,
    p_in: f64,
    p_out: f64,
    rng_seed: u64,
) -> Result<(Graph<T>, Partition)> {
    if k == 0 || n < k {
        return Err(Error::InvalidArgument(format!("need n >= k >= 1, got n={n}, k={k}")));
    }
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) || p_out > p_in {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= p_out <= p_in <= 1, got p_in={p_in}, p_out={p_out}"
        )));
    }
    let groups = even_groups(n, k);
    let mut ends = vec![0usize; k];
    for (i, &g) in groups.iter().enumerate() {
        ends[g] = i + 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut b = GraphBuilder::<T>::with_nodes(n);
    // Groups are contiguous, so node i's candidate partners j > i form one
    // run inside its group followed by one run outside it.
    for i in 0..n {
        let end = ends[groups[i]];
        for (lo, hi, p) in [(i + 1, end, p_in), (end, n, p_out)] {
            sample_run(lo, hi, p, &mut rng, |j| {
                b.add_edge(i, j, T::one()).expect("valid pair")
            });
        }
    }
    Ok((b.build(), Partition::from_labels(groups)))
}

/// Visits each index of `lo..hi` independently with probability `p`, jumping
/// between hits with geometric gaps.
fn sample_run(lo: usize, hi: usize, p: f64, rng: &mut ChaCha8Rng, mut hit: impl FnMut(usize)) {
    if p <= 0.0 || lo >= hi {
        return;
    }
    if p >= 1.0 {
        (lo..hi).for_each(hit);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut j = lo;
    loop {
        let u: f64 = rng.gen();
        let gap = ((1.0 - u).ln() / log_q).floor();
        if gap >= (hi - j) as f64 {
            return;
        }
        j += gap as usize;
        hit(j);
        j += 1;
    }
}
