use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use supercomm::evaluate::{evaluate, EvaluateConfig, DEFAULT_SUPERNODES};
use supercomm::experiment::{Algorithm, Representation, RepresentationKind, SbmWeighting, VariabilityConfig};
use supercomm::graph::extract_core_subgraph;
use supercomm::sbm::FitOptions;
use supercomm::{compress, parse_edge_list, planted_partition, Graph, SeedMethod};

#[derive(Parser)]
#[command(name = "supercomm", version, about = "Community detection on super-node compressed networks")]
struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "SUPERCOMM_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow super nodes around seeds and write the contracted network.
    Compress {
        input: PathBuf,
        #[command(flatten)]
        compression: CompressionArgs,
        /// Output prefix.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Detect communities on the full or super-node representation.
    Detect(DetectArgs),
    /// Run the experiment matrix described by a TOML config.
    Evaluate {
        config: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Sample a planted-partition graph.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p_in: f64,
        #[arg(long)]
        p_out: f64,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct CompressionArgs {
    #[arg(long, default_value_t = DEFAULT_SUPERNODES)]
    num_supernodes: usize,
    #[arg(long, default_value_t = SeedMethod::CoreHd)]
    seed_method: SeedMethod,
    #[arg(long, default_value_t = supercomm::compression::DEFAULT_O_MAX)]
    o_max: usize,
    /// Restrict to nodes of degree at least two, their neighbors and next-nearest neighbors.
    #[arg(long)]
    extract_core: bool,
}

#[derive(Args)]
struct DetectArgs {
    input: PathBuf,
    #[arg(long, default_value_t = RepresentationKind::Full)]
    representation: RepresentationKind,
    #[arg(long, default_value_t = Algorithm::Louvain)]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Number of blocks; selected by penalized likelihood when omitted.
    #[arg(long, conflicts_with = "k_range")]
    k: Option<usize>,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [1, 20])]
    k_range: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long, default_value_t = FitOptions::default().sweeps)]
    sweeps: usize,
    #[arg(long, default_value_t = FitOptions::default().level_sweeps)]
    level_sweeps: usize,
    #[arg(long, default_value_t = SbmWeighting::Binarize)]
    sbm_weighting: SbmWeighting,
    #[command(flatten)]
    compression: CompressionArgs,
    #[arg(long, short)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Compress { input, compression, out } => cmd_compress(&input, &compression, &out),
        Command::Detect(args) => cmd_detect(&args),
        Command::Evaluate { config, out } => cmd_evaluate(&config, &out),
        Command::Generate { n, k, p_in, p_out, rng_seed, out } => {
            let (g, p) = planted_partition::<f64>(n, k, p_in, p_out, rng_seed)?;
            write(&out, "edges", g.to_edge_list())?;
            write(&out, "partition.txt", p.to_text(&g)?)?;
            println!("{} nodes, {} edges, {} groups", g.n_nodes(), g.n_edges(), p.k());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn output_path(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

fn write(prefix: &Path, suffix: &str, contents: impl AsRef<[u8]>) -> Result<()> {
    let path = output_path(prefix, suffix);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn read_graph(path: &Path, extract_core: bool) -> Result<Graph> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let g = parse_edge_list(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))?;
    Ok(if extract_core { extract_core_subgraph(&g)? } else { g })
}

fn cmd_compress(input: &Path, args: &CompressionArgs, out: &Path) -> Result<ExitCode> {
    let g = read_graph(input, args.extract_core)?;
    let start = Instant::now();
    let c = compress(&g, args.num_supernodes, args.seed_method, args.o_max)?;
    let seconds = start.elapsed().as_secs_f64();
    let net = &c.network;
    let conserved = net.conserves(&g, 1e-9);
    write(out, "supernodes.edges", net.graph.to_edge_list())?;
    write(out, "assignment.txt", c.assignment.to_text(&g))?;
    let summary = json!({
        "num_supernodes": c.assignment.n_supernodes(),
        "seed_method": args.seed_method.to_string(),
        "seed_fallbacks": c.seeds.fallback_count(),
        "o_max": args.o_max,
        "n_nodes": g.n_nodes(),
        "n_edges": g.n_edges(),
        "periphery": c.assignment.periphery_count(),
        "supernode_edges": net.graph.n_edges(),
        "cross_weight": net.cross_weight(),
        "internal_weight": net.internal_weight.iter().sum::<f64>(),
        "periphery_edge_weight": net.periphery_edge_weight,
        "total_weight": g.total_weight(),
        "conserved": conserved,
    });
    write(out, "summary.json", serde_json::to_string_pretty(&summary)? + "\n")?;
    println!(
        "{} super nodes, {} periphery nodes, {} super-node edges, conservation {} ({seconds:.3}s)",
        c.assignment.n_supernodes(),
        c.assignment.periphery_count(),
        net.graph.n_edges(),
        if conserved { "ok" } else { "FAILED" },
    );
    Ok(if conserved { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_detect(args: &DetectArgs) -> Result<ExitCode> {
    if args.runs == 0 {
        bail!("--runs must be positive");
    }
    let g = read_graph(&args.input, args.compression.extract_core)?;
    let compression = match args.representation {
        RepresentationKind::Full => None,
        RepresentationKind::SuperNode => {
            let s = args.compression.num_supernodes.min(g.n_nodes());
            Some(compress(&g, s, args.compression.seed_method, args.compression.o_max)?)
        }
    };
    let rep = match &compression {
        None => Representation::full(&g),
        Some(c) => Representation::supernode(&g, c, args.sbm_weighting),
    };
    let opts = FitOptions {
        sweeps: args.sweeps,
        level_sweeps: args.level_sweeps,
    };

    let mut k = args.k;
    let mut k_table = None;
    if args.algorithm == Algorithm::Sbm && k.is_none() {
        let seed = supercomm::experiment::derive_seed(args.rng_seed, 0, 0);
        let (sel, _) = rep.select_k(args.k_range[0], args.k_range[1], seed, opts)?;
        println!("selected K = {}", sel.k);
        k = Some(sel.k);
        k_table = Some(sel.table);
    }
    let k = k.unwrap_or(0);
    let seeds = VariabilityConfig::new(args.runs, args.gamma, k, args.rng_seed);

    let mut runs = Vec::with_capacity(args.runs);
    for r in 0..args.runs {
        let seed = seeds.seed(args.algorithm, r);
        let start = Instant::now();
        let d = rep.detect(args.algorithm, args.gamma, k, seed, opts)?;
        let seconds = start.elapsed().as_secs_f64();
        write(&args.out, &format!("run{r}.partition.txt"), d.partition.to_text(&g)?)?;
        println!("run {r}: {} communities, objective {:.6}", d.partition.k(), d.objective);
        runs.push(json!({
            "run": r,
            "rng_seed": seed,
            "communities": d.partition.k(),
            "objective": d.objective,
            "seconds": seconds,
        }));
    }
    let summary = json!({
        "representation": args.representation.to_string(),
        "algorithm": args.algorithm.to_string(),
        "gamma": (args.algorithm == Algorithm::Louvain).then_some(args.gamma),
        "k": (args.algorithm == Algorithm::Sbm).then_some(k),
        "k_table": k_table,
        "periphery": compression.as_ref().map(|c| c.assignment.periphery_count()),
        "runs": runs,
    });
    write(&args.out, "summary.json", serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_evaluate(config: &Path, out: &Path) -> Result<ExitCode> {
    let cfg = EvaluateConfig::load(config).with_context(|| format!("reading {}", config.display()))?;
    let run = || evaluate(&cfg);
    let ev = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build()?.install(run),
        None => run(),
    }?;
    write(out, "report.json", ev.report.to_json()?)?;
    write(out, "report.csv", ev.report.to_csv())?;
    write(out, "meta.json", ev.metadata.to_json()?)?;
    write(out, "runtimes.csv", ev.metadata.runtimes_csv())?;
    let mut ok = true;
    for n in &ev.report.networks {
        for (leg, reason) in &n.failures {
            eprintln!("{}: {leg} failed: {reason}", n.name);
            ok = false;
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
