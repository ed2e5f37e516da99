//! Config-driven evaluation: compress each network, run both algorithms on
//! both representations, and collect variability, matched-scale,
//! local-agreement and timing results into a report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compression::{compress, DEFAULT_O_MAX};
use crate::error::{Error, Result};
use crate::experiment::{
    cross_nmi, default_gamma_grid, derive_seed, match_resolution, variability_experiment, Algorithm,
    Representation, RepresentationKind, ResolutionPoint, SbmWeighting, Summary, Timing, Variability,
    VariabilityConfig,
};
use crate::generator::planted_partition;
use crate::graph::{extract_core_subgraph, parse_edge_list, Graph};
use crate::metrics::{community_aucs, NeighborhoodMode};
use crate::partition::Partition;
use crate::sbm::FitOptions;
use crate::seeding::SeedMethod;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SUPERNODES: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n: usize,
    pub k: usize,
    pub p_in: f64,
    pub p_out: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSpec>,
    #[serde(default)]
    pub extract_core: bool,
}

fn default_supernodes() -> usize {
    DEFAULT_SUPERNODES
}
fn default_o_max() -> usize {
    DEFAULT_O_MAX
}
fn default_runs() -> usize {
    10
}
fn default_gamma() -> f64 {
    1.0
}
fn default_orders() -> Vec<usize> {
    vec![1]
}
fn default_k_range() -> [usize; 2] {
    [1, 20]
}
fn default_sweeps() -> usize {
    FitOptions::default().sweeps
}
fn default_level_sweeps() -> usize {
    FitOptions::default().level_sweeps
}

/// Evaluation settings, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateConfig {
    #[serde(default)]
    pub networks: Vec<NetworkSpec>,
    #[serde(default = "default_supernodes")]
    pub num_supernodes: usize,
    #[serde(default = "default_o_max")]
    pub o_max: usize,
    #[serde(default)]
    pub seed_method: SeedMethod,
    #[serde(default = "default_runs")]
    pub runs: usize,
    /// Louvain resolution for the variability runs.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Resolution grid for scale matching; log-spaced default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    #[serde(default = "default_orders")]
    pub orders: Vec<usize>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_k_range")]
    pub k_range: [usize; 2],
    #[serde(default = "default_sweeps")]
    pub sweeps: usize,
    #[serde(default = "default_level_sweeps")]
    pub level_sweeps: usize,
    #[serde(default)]
    pub sbm_weighting: SbmWeighting,
    /// Also report min-AUC with neighbors at exactly each order.
    #[serde(default)]
    pub exact_order_auc: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

impl EvaluateConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative network paths are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_toml(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for net in &mut cfg.networks {
            if let Some(p) = &net.path {
                if p.is_relative() {
                    net.path = Some(base.join(p));
                }
            }
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        for net in &self.networks {
            if net.path.is_some() == net.synthetic.is_some() {
                return bad(format!("network {:?} needs exactly one of `path` and `synthetic`", net.name));
            }
        }
        if self.runs < 2 {
            return bad("runs must be at least 2".into());
        }
        if self.orders.is_empty() || self.orders.contains(&0) {
            return bad("orders must be a nonempty list of positive integers".into());
        }
        if self.k_range[0] == 0 || self.k_range[0] > self.k_range[1] {
            return bad(format!("invalid k_range {:?}", self.k_range));
        }
        if !(self.gamma > 0.0) || self.gammas.as_ref().is_some_and(|g| g.is_empty() || g.iter().any(|&x| !(x > 0.0))) {
            return bad("resolutions must be positive".into());
        }
        if self.num_supernodes == 0 || self.o_max == 0 {
            return bad("num_supernodes and o_max must be positive".into());
        }
        Ok(())
    }

    pub fn fit_options(&self) -> FitOptions {
        FitOptions {
            sweeps: self.sweeps,
            level_sweeps: self.level_sweeps,
        }
    }

    pub fn gamma_grid(&self) -> Vec<f64> {
        self.gammas.clone().unwrap_or_else(default_gamma_grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionSummary {
    pub num_supernodes: usize,
    pub periphery: usize,
    pub seed_fallbacks: usize,
    pub supernode_edges: usize,
    pub cross_weight: f64,
    pub internal_weight: f64,
    pub periphery_edge_weight: f64,
    pub total_weight: f64,
    pub conserved: bool,
}

/// Deterministic results for one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct NetworkReport {
    pub name: String,
    pub n_nodes: usize,
    pub n_edges: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compression: Option<CompressionSummary>,
    /// `"<representation>/<pair kind>"` and `"full-vs-supernode/<algorithm>"`.
    pub nmi_pairs: BTreeMap<String, Vec<f64>>,
    pub nmi_summary: BTreeMap<String, Summary>,
    pub matched_gamma: Option<f64>,
    pub matched_gamma_tau: Option<f64>,
    pub gamma_table: Vec<ResolutionPoint>,
    pub matched_k: Option<usize>,
    /// `(k, loglik, penalized score)` on the super-node network.
    pub k_table: Vec<(usize, f64, f64)>,
    /// `"<representation>/<algorithm>/<order>"`, neighbors within the order.
    pub min_auc: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub min_auc_exact_order: BTreeMap<String, f64>,
    /// Communities left out of the minimum for lacking members or non-members.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub auc_skipped: BTreeMap<String, Vec<usize>>,
    /// Per-run objective: modularity for Louvain, log-likelihood for SBM.
    pub objectives: BTreeMap<String, Vec<f64>>,
    pub run_seeds: BTreeMap<String, Vec<u64>>,
    pub failures: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub crate_version: String,
    pub config: EvaluateConfig,
    pub decisions: BTreeMap<String, String>,
}

/// The deterministic part of an evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub networks: Vec<NetworkReport>,
}

/// Everything that varies between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub generated_at_unix: f64,
    /// Network name to leg to wall-clock seconds.
    pub runtimes: BTreeMap<String, BTreeMap<String, Timing>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub report: EvaluationReport,
    pub metadata: Metadata,
}

impl Evaluation {
    pub fn succeeded(&self) -> bool {
        self.report.networks.iter().all(|n| n.failures.is_empty())
    }
}

pub fn decisions(cfg: &EvaluateConfig) -> BTreeMap<String, String> {
    let entries = [
        ("graph", "undirected; reciprocal and duplicate edges summed; self loops dropped"),
        ("growth", "frontier-synchronized; conflicts to the strongest connection, lowest index on ties"),
        ("periphery", "one extra community, excluded from the super-node network"),
        ("sbm", "non-degree-corrected, unordered pairs, profile likelihood"),
        ("k_selection", "loglik - k(k+1)/2 * ln(N(N-1)/2) / 2 on the super-node representation; full network fitted at that k"),
        ("nmi", "mutual information over mean entropy"),
        ("auc_ties", "midrank; communities without members or non-members skipped"),
        ("neighborhood", "hop distance up to the order"),
        ("gamma_match", "Kendall tau-b of community-size midranks; lowest gamma on ties; constant rankings skipped"),
    ];
    let mut m: BTreeMap<String, String> = entries.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    m.insert("sbm_weighting".into(), cfg.sbm_weighting.to_string());
    m
}

/// Runs every configured network. Networks and runs are spread over the
/// current rayon pool; results are assembled in config order.
pub fn evaluate(cfg: &EvaluateConfig) -> Result<Evaluation> {
    cfg.validate()?;
    if cfg.networks.is_empty() {
        return Err(Error::NothingToEvaluate);
    }
    let results: Vec<(NetworkReport, BTreeMap<String, Timing>)> = cfg
        .networks
        .par_iter()
        .enumerate()
        .map(|(x, spec)| evaluate_network(cfg, x, spec))
        .collect();
    let mut runtimes = BTreeMap::new();
    let mut networks = Vec::with_capacity(results.len());
    for (report, times) in results {
        runtimes.insert(report.name.clone(), times);
        networks.push(report);
    }
    let generated_at_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64());
    Ok(Evaluation {
        report: EvaluationReport {
            schema_version: SCHEMA_VERSION,
            provenance: Provenance {
                crate_version: env!("CARGO_PKG_VERSION").to_string(),
                config: cfg.clone(),
                decisions: decisions(cfg),
            },
            networks,
        },
        metadata: Metadata {
            generated_at_unix,
            runtimes,
        },
    })
}

pub fn load_network(spec: &NetworkSpec) -> Result<Graph<f64>> {
    let g = match (&spec.path, &spec.synthetic) {
        (Some(p), None) => parse_edge_list(BufReader::new(File::open(p)?))?,
        (None, Some(s)) => planted_partition(s.n, s.k, s.p_in, s.p_out, s.seed)?.0,
        _ => return Err(Error::Config(format!("network {:?} needs exactly one source", spec.name))),
    };
    if spec.extract_core {
        extract_core_subgraph(&g)
    } else {
        Ok(g)
    }
}

const STREAM_SELECT_K: u64 = 10;
const STREAM_MATCH: u64 = 11;

struct Legs {
    report: NetworkReport,
    times: BTreeMap<String, Timing>,
}

impl Legs {
    /// Runs one leg, recording its failure (if any) instead of aborting.
    fn run<R>(&mut self, name: &str, f: impl FnOnce() -> Result<R>) -> Option<R> {
        let t = Instant::now();
        let out = f();
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(r) => {
                self.times.insert(name.to_string(), Timing::from_samples(vec![secs]).expect("one sample"));
                Some(r)
            }
            Err(e) => {
                self.report.failures.insert(name.to_string(), e.to_string());
                None
            }
        }
    }

    fn record_variability(&mut self, rep: RepresentationKind, v: &Variability, cfg: &VariabilityConfig) {
        for (kind, values) in [
            ("louvain-louvain", &v.louvain_louvain),
            ("sbm-sbm", &v.sbm_sbm),
            ("louvain-sbm", &v.louvain_sbm),
        ] {
            self.add_pairs(format!("{rep}/{kind}"), values.clone());
        }
        for (alg, runs, secs) in [
            (Algorithm::Louvain, &v.louvain, &v.louvain_seconds),
            (Algorithm::Sbm, &v.sbm, &v.sbm_seconds),
        ] {
            let key = format!("{rep}/{alg}");
            self.report
                .objectives
                .insert(key.clone(), runs.iter().map(|d| d.objective).collect());
            self.report
                .run_seeds
                .insert(key.clone(), (0..cfg.runs).map(|r| cfg.seed(alg, r)).collect());
            if let Some(t) = Timing::from_samples(secs.clone()) {
                self.times.insert(format!("detect/{key}"), t);
            }
        }
    }

    fn add_pairs(&mut self, key: String, values: Vec<f64>) {
        if let Some(s) = Summary::of(&values) {
            self.report.nmi_summary.insert(key.clone(), s);
        }
        self.report.nmi_pairs.insert(key, values);
    }
}

fn evaluate_network(cfg: &EvaluateConfig, index: usize, spec: &NetworkSpec) -> (NetworkReport, BTreeMap<String, Timing>) {
    let seed = derive_seed(cfg.master_seed, 0, index as u64);
    let mut legs = Legs {
        report: NetworkReport {
            name: spec.name.clone(),
            seed,
            ..NetworkReport::default()
        },
        times: BTreeMap::new(),
    };
    let Some(g) = legs.run("load", || load_network(spec)) else {
        return (legs.report, legs.times);
    };
    legs.report.n_nodes = g.n_nodes();
    legs.report.n_edges = g.n_edges();
    // Loading is I/O; only the computation legs are timed.
    legs.times.remove("load");

    let fit = cfg.fit_options();
    let s = cfg.num_supernodes.min(g.n_nodes());
    let Some(c) = legs.run("compression", || compress(&g, s, cfg.seed_method, cfg.o_max)) else {
        return (legs.report, legs.times);
    };
    let net = &c.network;
    legs.report.compression = Some(CompressionSummary {
        num_supernodes: s,
        periphery: c.assignment.periphery_count(),
        seed_fallbacks: c.seeds.fallback_count(),
        supernode_edges: net.graph.n_edges(),
        cross_weight: net.cross_weight(),
        internal_weight: net.internal_weight.iter().sum(),
        periphery_edge_weight: net.periphery_edge_weight,
        total_weight: g.total_weight(),
        conserved: net.conserves(&g, 1e-9),
    });

    let full = Representation::full(&g);
    let sn = Representation::supernode(&g, &c, cfg.sbm_weighting);

    let k_seed = derive_seed(seed, STREAM_SELECT_K, 0);
    let selection = legs.run("select_k", || sn.select_k(cfg.k_range[0], cfg.k_range[1], k_seed, fit));
    let matched_k = selection.as_ref().map(|(sel, _)| sel.k);
    if let Some((sel, _)) = &selection {
        legs.report.k_table = sel.table.clone();
    }
    legs.report.matched_k = matched_k;

    let mut runs: BTreeMap<RepresentationKind, Variability> = BTreeMap::new();
    if let Some(k) = matched_k {
        for rep in [&sn, &full] {
            let mut vc = VariabilityConfig::new(cfg.runs, cfg.gamma, k, seed);
            vc.fit = fit;
            let kind = rep.kind();
            if let Some(v) = legs.run(&format!("variability/{kind}"), || variability_experiment(rep, &vc)) {
                legs.record_variability(kind, &v, &vc);
                runs.insert(kind, v);
            }
        }
    }

    if let (Some(f), Some(s)) = (runs.get(&RepresentationKind::Full), runs.get(&RepresentationKind::SuperNode)) {
        let parts = |ds: &[crate::experiment::Detection]| ds.iter().map(|d| d.partition.clone()).collect::<Vec<_>>();
        let pairs = [
            (Algorithm::Louvain, parts(&f.louvain), parts(&s.louvain)),
            (Algorithm::Sbm, parts(&f.sbm), parts(&s.sbm)),
        ];
        for (alg, a, b) in pairs {
            if let Some(v) = legs.run(&format!("full-vs-supernode/{alg}"), || cross_nmi(&a, &b)) {
                legs.add_pairs(format!("full-vs-supernode/{alg}"), v);
            }
        }
    }

    if let Some(target) = runs.get(&RepresentationKind::SuperNode).map(|v| v.louvain[0].partition.clone()) {
        let grid = cfg.gamma_grid();
        let m_seed = derive_seed(seed, STREAM_MATCH, 0);
        if let Some(m) = legs.run("match_resolution", || match_resolution(&g, &target, &grid, m_seed)) {
            legs.report.matched_gamma = Some(m.gamma);
            legs.report.matched_gamma_tau = Some(m.tau);
            legs.report.gamma_table = m.table;
        }
    }

    // Local agreement of the first run of each representation and algorithm.
    let firsts: Vec<(String, Partition)> = runs
        .iter()
        .flat_map(|(kind, v)| {
            [
                (format!("{kind}/{}", Algorithm::Louvain), v.louvain[0].partition.clone()),
                (format!("{kind}/{}", Algorithm::Sbm), v.sbm[0].partition.clone()),
            ]
        })
        .collect();
    let mut modes = vec![NeighborhoodMode::Within];
    if cfg.exact_order_auc {
        modes.push(NeighborhoodMode::Exactly);
    }
    for (key, p) in &firsts {
        for &order in &cfg.orders {
            for &mode in &modes {
                let name = format!("{key}/{order}");
                let leg = match mode {
                    NeighborhoodMode::Within => format!("min_auc/{name}"),
                    NeighborhoodMode::Exactly => format!("min_auc_exact_order/{name}"),
                };
                let Some(table) = legs.run(&leg, || community_aucs(&g, p, order, mode)) else {
                    continue;
                };
                match table.min() {
                    Some(v) => {
                        let map = match mode {
                            NeighborhoodMode::Within => &mut legs.report.min_auc,
                            NeighborhoodMode::Exactly => &mut legs.report.min_auc_exact_order,
                        };
                        map.insert(name.clone(), v);
                    }
                    None => {
                        legs.report.failures.insert(leg, Error::DegeneratePartition.to_string());
                    }
                }
                let skipped = table.skipped();
                if mode == NeighborhoodMode::Within && !skipped.is_empty() {
                    legs.report.auc_skipped.insert(name, skipped);
                }
            }
        }
    }
    (legs.report, legs.times)
}

impl EvaluationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// One row per value: network, representation, algorithm, metric,
    /// parameter, value, rng seed.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("network,representation,algorithm,metric,param,value,rng_seed\n");
        let mut row = |net: &str, rep: &str, alg: &str, metric: &str, param: &str, value: f64, seed: &str| {
            let _ = writeln!(out, "{},{rep},{alg},{metric},{param},{value},{seed}", csv_field(net));
        };
        for n in &self.networks {
            let seed = n.seed.to_string();
            for (key, values) in &n.nmi_pairs {
                let (rep, kind) = key.split_once('/').unwrap_or((key, ""));
                for (x, v) in values.iter().enumerate() {
                    row(&n.name, rep, kind, "nmi", &x.to_string(), *v, &seed);
                }
            }
            for (key, v) in &n.min_auc {
                let parts: Vec<&str> = key.splitn(3, '/').collect();
                row(&n.name, parts[0], parts[1], "min_auc", parts[2], *v, &seed);
            }
            for (key, v) in &n.min_auc_exact_order {
                let parts: Vec<&str> = key.splitn(3, '/').collect();
                row(&n.name, parts[0], parts[1], "min_auc_exact_order", parts[2], *v, &seed);
            }
            for (key, values) in &n.objectives {
                let (rep, alg) = key.split_once('/').unwrap_or((key, ""));
                let metric = if alg == "louvain" { "modularity" } else { "loglik" };
                let seeds = n.run_seeds.get(key);
                for (x, v) in values.iter().enumerate() {
                    let s = seeds.and_then(|s| s.get(x)).map_or(String::new(), u64::to_string);
                    row(&n.name, rep, alg, metric, &x.to_string(), *v, &s);
                }
            }
            for pt in &n.gamma_table {
                if let Some(t) = pt.tau {
                    row(&n.name, "full", "louvain", "tau", &pt.gamma.to_string(), t, &seed);
                }
            }
            if let Some(g) = n.matched_gamma {
                row(&n.name, "full", "louvain", "matched_gamma", "", g, &seed);
            }
            if let Some(k) = n.matched_k {
                row(&n.name, "supernode", "sbm", "matched_k", "", k as f64, &seed);
            }
            for (k, ll, score) in &n.k_table {
                row(&n.name, "supernode", "sbm", "loglik", &format!("k={k}"), *ll, &seed);
                row(&n.name, "supernode", "sbm", "penalized_score", &format!("k={k}"), *score, &seed);
            }
        }
        out
    }
}

impl Metadata {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// One row per timing sample.
    pub fn runtimes_csv(&self) -> String {
        let mut out = String::from("network,leg,sample,seconds\n");
        for (net, legs) in &self.runtimes {
            for (leg, t) in legs {
                for (x, s) in t.samples.iter().enumerate() {
                    let _ = writeln!(out, "{},{leg},{x},{s}", csv_field(net));
                }
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
