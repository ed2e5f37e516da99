//! Experiment harnesses: detection on either representation, resolution
//! matching, run-to-run variability and wall-clock timing.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compression::{map_partition, Compression};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::louvain::louvain;
use crate::metrics::{community_size_ranking, kendall_tau, nmi};
use crate::partition::Partition;
use crate::sbm::{fit_blocks, select_k_blocks, BlockData, FitOptions, KSelection};
use crate::scalar::Scalar;

/// How the weighted super-node network is presented to the block model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SbmWeighting {
    /// An edge wherever the contracted weight is positive.
    #[default]
    Binarize,
    /// Super nodes keep their member counts and edge multiplicities, so the
    /// likelihood is that of the original graph restricted to partitions
    /// that keep every super node whole. Requires unit input weights.
    Multiplicity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepresentationKind {
    Full,
    #[serde(rename = "supernode")]
    SuperNode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Louvain,
    Sbm,
}

macro_rules! named_enum {
    ($ty:ty { $($variant:path => $name:literal),+ $(,)? }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($variant => $name),+ })
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_lowercase().as_str() {
                    $($name => Ok($variant),)+
                    other => Err(Error::InvalidArgument(format!(
                        concat!("unknown ", stringify!($ty), " {:?}"),
                        other
                    ))),
                }
            }
        }
    };
}

named_enum!(SbmWeighting { SbmWeighting::Binarize => "binarize", SbmWeighting::Multiplicity => "multiplicity" });
named_enum!(RepresentationKind { RepresentationKind::Full => "full", RepresentationKind::SuperNode => "supernode" });
named_enum!(Algorithm { Algorithm::Louvain => "louvain", Algorithm::Sbm => "sbm" });

/// A community detection result expressed over the original nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Over the original nodes (periphery included for super nodes).
    pub partition: Partition,
    /// Over the nodes the algorithm actually saw.
    pub native: Partition,
    /// Modularity for Louvain, profile log-likelihood for the block model.
    pub objective: f64,
}

/// The graph community detection runs on: the original network, or its
/// super-node contraction with results mapped back.
pub struct Representation<'a, T> {
    graph: &'a Graph<T>,
    compression: Option<&'a Compression<T>>,
    blocks: Result<BlockData, String>,
    weighting: SbmWeighting,
}

impl<'a, T: Scalar> Representation<'a, T> {
    pub fn full(g: &'a Graph<T>) -> Self {
        Self {
            graph: g,
            compression: None,
            blocks: BlockData::from_graph(g).map_err(|e| e.to_string()),
            weighting: SbmWeighting::Binarize,
        }
    }

    pub fn supernode(g: &'a Graph<T>, c: &'a Compression<T>, weighting: SbmWeighting) -> Self {
        let blocks = match weighting {
            SbmWeighting::Binarize => Ok(BlockData::binarized(&c.network.graph)),
            SbmWeighting::Multiplicity => {
                if g.is_unweighted() {
                    BlockData::with_multiplicity(&c.network).map_err(|e| e.to_string())
                } else {
                    Err(Error::WeightedGraph.to_string())
                }
            }
        };
        Self {
            graph: g,
            compression: Some(c),
            blocks,
            weighting,
        }
    }

    pub fn kind(&self) -> RepresentationKind {
        match self.compression {
            None => RepresentationKind::Full,
            Some(_) => RepresentationKind::SuperNode,
        }
    }

    pub fn weighting(&self) -> SbmWeighting {
        self.weighting
    }

    pub fn original(&self) -> &'a Graph<T> {
        self.graph
    }

    /// The graph handed to Louvain.
    pub fn detection_graph(&self) -> &'a Graph<T> {
        match self.compression {
            None => self.graph,
            Some(c) => &c.network.graph,
        }
    }

    fn blocks(&self) -> Result<&BlockData> {
        self.blocks.as_ref().map_err(|e| match self.compression {
            None => Error::WeightedGraph,
            Some(_) => Error::InvalidArgument(e.clone()),
        })
    }

    fn lift(&self, native: Partition, objective: f64) -> Result<Detection> {
        let partition = match self.compression {
            None => native.clone(),
            Some(c) => map_partition(&native, &c.assignment)?,
        };
        Ok(Detection {
            partition,
            native,
            objective,
        })
    }

    pub fn louvain(&self, gamma: f64, rng_seed: u64) -> Result<Detection> {
        let (p, q) = louvain(self.detection_graph(), T::of(gamma), rng_seed)?;
        self.lift(p, q.as_f64())
    }

    pub fn sbm(&self, k: usize, rng_seed: u64, opts: FitOptions) -> Result<Detection> {
        let (p, ll) = fit_blocks(self.blocks()?, k, rng_seed, opts)?;
        self.lift(p, ll)
    }

    pub fn detect(&self, algorithm: Algorithm, gamma: f64, k: usize, rng_seed: u64, opts: FitOptions) -> Result<Detection> {
        match algorithm {
            Algorithm::Louvain => self.louvain(gamma, rng_seed),
            Algorithm::Sbm => self.sbm(k, rng_seed, opts),
        }
    }

    /// Chooses the number of blocks by penalized likelihood; the range is
    /// clipped to the number of nodes the model sees.
    pub fn select_k(&self, k_min: usize, k_max: usize, rng_seed: u64, opts: FitOptions) -> Result<(KSelection, Detection)> {
        let data = self.blocks()?;
        let sel = select_k_blocks(data, k_min, k_max.min(data.n()), rng_seed, opts)?;
        let ll = sel.table.iter().find(|r| r.0 == sel.k).map_or(f64::NAN, |r| r.1);
        let det = self.lift(sel.partition.clone(), ll)?;
        Ok((sel, det))
    }
}

/// Independent seed number `index` of stream `stream` under `master`.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.set_word_pos(2 * index as u128);
    rng.next_u64()
}

/// `n` points spaced evenly in log scale over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

pub const GAMMA_MIN: f64 = 0.05;
pub const GAMMA_MAX: f64 = 2.5;
pub const GAMMA_GRID_POINTS: usize = 50;

pub fn default_gamma_grid() -> Vec<f64> {
    log_grid(GAMMA_MIN, GAMMA_MAX, GAMMA_GRID_POINTS)
}

/// One resolution of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionPoint {
    pub gamma: f64,
    pub communities: usize,
    /// `None` when every community has the same size, leaving the ranking
    /// without order.
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionMatch {
    pub gamma: f64,
    pub tau: f64,
    pub table: Vec<ResolutionPoint>,
}

/// Resolution whose Louvain partition of `g` ranks nodes by community size
/// most like `target` does (Kendall tau-b), lowest resolution on ties.
pub fn match_resolution<T: Scalar>(
    g: &Graph<T>,
    target: &Partition,
    gammas: &[f64],
    rng_seed: u64,
) -> Result<ResolutionMatch> {
    target.check_len(g.n_nodes())?;
    if gammas.is_empty() {
        return Err(Error::InvalidArgument("empty resolution grid".into()));
    }
    let reference = community_size_ranking(target);
    if reference.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::DegenerateRanking);
    }
    let table = gammas
        .par_iter()
        .map(|&gamma| {
            let (p, _) = louvain(g, T::of(gamma), rng_seed)?;
            let tau = match kendall_tau(&community_size_ranking(&p), &reference) {
                Ok(t) => Some(t),
                Err(Error::DegenerateRanking) => None,
                Err(e) => return Err(e),
            };
            Ok(ResolutionPoint {
                gamma,
                communities: p.k(),
                tau,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(f64, f64)> = None;
    for pt in &table {
        if let Some(t) = pt.tau {
            if best.is_none_or(|(bt, bg)| t > bt || (t == bt && pt.gamma < bg)) {
                best = Some((t, pt.gamma));
            }
        }
    }
    let (tau, gamma) = best.ok_or(Error::DegenerateRanking)?;
    Ok(ResolutionMatch { gamma, tau, table })
}

/// Median and quartiles (linear interpolation between order statistics).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub iqr: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let x = p * (v.len() - 1) as f64;
            let lo = x.floor() as usize;
            let hi = x.ceil() as usize;
            v[lo] + (v[hi] - v[lo]) * (x - lo as f64)
        };
        let (q1, q3) = (q(0.25), q(0.75));
        Some(Self {
            n: v.len(),
            min: v[0],
            q1,
            median: q(0.5),
            q3,
            max: v[v.len() - 1],
            iqr: q3 - q1,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariabilityConfig {
    pub runs: usize,
    pub gamma: f64,
    pub k: usize,
    pub master_seed: u64,
    /// When false every run reuses one seed per algorithm.
    pub distinct_seeds: bool,
    pub fit: FitOptions,
}

impl VariabilityConfig {
    pub fn new(runs: usize, gamma: f64, k: usize, master_seed: u64) -> Self {
        Self {
            runs,
            gamma,
            k,
            master_seed,
            distinct_seeds: true,
            fit: FitOptions::default(),
        }
    }

    pub fn seed(&self, algorithm: Algorithm, run: usize) -> u64 {
        let stream = match algorithm {
            Algorithm::Louvain => 1,
            Algorithm::Sbm => 2,
        };
        let index = if self.distinct_seeds { run as u64 } else { 0 };
        derive_seed(self.master_seed, stream, index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variability {
    pub louvain: Vec<Detection>,
    pub sbm: Vec<Detection>,
    /// Wall-clock seconds per run, same order as the detections.
    pub louvain_seconds: Vec<f64>,
    pub sbm_seconds: Vec<f64>,
    pub louvain_louvain: Vec<f64>,
    pub sbm_sbm: Vec<f64>,
    pub louvain_sbm: Vec<f64>,
}

impl Variability {
    pub fn summaries(&self) -> [(&'static str, Option<Summary>); 3] {
        [
            ("louvain-louvain", Summary::of(&self.louvain_louvain)),
            ("sbm-sbm", Summary::of(&self.sbm_sbm)),
            ("louvain-sbm", Summary::of(&self.louvain_sbm)),
        ]
    }
}

/// NMI between every unordered pair of `a`.
pub fn pairwise_nmi(a: &[Partition]) -> Result<Vec<f64>> {
    let pairs: Vec<(usize, usize)> = (0..a.len())
        .flat_map(|i| (i + 1..a.len()).map(move |j| (i, j)))
        .collect();
    pairs.par_iter().map(|&(i, j)| nmi(&a[i], &a[j])).collect()
}

/// NMI between every element of `a` and every element of `b`.
pub fn cross_nmi(a: &[Partition], b: &[Partition]) -> Result<Vec<f64>> {
    let pairs: Vec<(usize, usize)> = (0..a.len())
        .flat_map(|i| (0..b.len()).map(move |j| (i, j)))
        .collect();
    pairs.par_iter().map(|&(i, j)| nmi(&a[i], &b[j])).collect()
}

fn timed<R>(f: impl FnOnce() -> Result<R>) -> Result<(R, f64)> {
    let t = Instant::now();
    let r = f()?;
    Ok((r, t.elapsed().as_secs_f64()))
}

/// `runs` Louvain runs and `runs` block-model fits with derived seeds, and
/// the NMI between all pairs within and across the two algorithms.
pub fn variability_experiment<T: Scalar>(rep: &Representation<'_, T>, cfg: &VariabilityConfig) -> Result<Variability> {
    if cfg.runs < 2 {
        return Err(Error::InvalidArgument("variability needs at least two runs".into()));
    }
    let (louvain_runs, louvain_seconds): (Vec<_>, Vec<_>) = (0..cfg.runs)
        .into_par_iter()
        .map(|r| timed(|| rep.louvain(cfg.gamma, cfg.seed(Algorithm::Louvain, r))))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let (sbm_runs, sbm_seconds): (Vec<_>, Vec<_>) = (0..cfg.runs)
        .into_par_iter()
        .map(|r| timed(|| rep.sbm(cfg.k, cfg.seed(Algorithm::Sbm, r), cfg.fit)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let lp: Vec<Partition> = louvain_runs.iter().map(|d| d.partition.clone()).collect();
    let sp: Vec<Partition> = sbm_runs.iter().map(|d| d.partition.clone()).collect();
    Ok(Variability {
        louvain_louvain: pairwise_nmi(&lp)?,
        sbm_sbm: pairwise_nmi(&sp)?,
        louvain_sbm: cross_nmi(&lp, &sp)?,
        louvain: louvain_runs,
        sbm: sbm_runs,
        louvain_seconds,
        sbm_seconds,
    })
}

/// Wall-clock statistics over repetitions, in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub samples: Vec<f64>,
    pub median: f64,
    pub min: f64,
}

impl Timing {
    pub fn from_samples(samples: Vec<f64>) -> Option<Self> {
        let s = Summary::of(&samples)?;
        Some(Self {
            median: s.median,
            min: s.min,
            samples,
        })
    }
}

/// Runs `leg` `repetitions` times back to back and returns the timing with
/// the last result.
pub fn benchmark<R>(repetitions: usize, mut leg: impl FnMut() -> Result<R>) -> Result<(Timing, R)> {
    if repetitions == 0 {
        return Err(Error::InvalidArgument("need at least one repetition".into()));
    }
    let mut samples = Vec::with_capacity(repetitions);
    let mut last = None;
    for _ in 0..repetitions {
        let (r, s) = timed(&mut leg)?;
        samples.push(s);
        last = Some(r);
    }
    let timing = Timing::from_samples(samples).expect("nonempty");
    Ok((timing, last.expect("nonempty")))
}
