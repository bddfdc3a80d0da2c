use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use cyclewalk::cycles::minimum_cycle_basis;
use cyclewalk::graph::{load_graph_relaxed, save_graph, Family, Graph};
use cyclewalk::runner::{self, GraphSpec, RunConfig, SweepConfig};
use cyclewalk::Error;

/// Quantum walks with Ising spins on random graphs.
#[derive(Parser)]
#[command(name = "cyclewalk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as JSON.
    Graph {
        #[command(flatten)]
        spec: GraphArgs,
        /// Output file; stdout when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Minimum cycle basis of a graph file, as JSON on stdout.
    Mcb {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Evolve the initial state and record entropies.
    Simulate(SimulateArgs),
    /// Run simulations over families, sizes and seeds.
    Sweep(SweepArgs),
    /// Summarize a sweep dataset.
    Compare {
        /// `sweep.csv` written by `sweep`.
        #[arg(long)]
        input: PathBuf,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// ws (Watts-Strogatz) or er (Erdős-Rényi).
    #[arg(long)]
    family: Option<Family>,
    #[arg(long)]
    nodes: Option<usize>,
    /// Ring-lattice degree for ws.
    #[arg(long)]
    k: Option<usize>,
    /// Rewiring probability (ws) or edge probability (er).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl GraphArgs {
    /// Overrides the fields of `base` that were given on the command line.
    fn merge(&self, base: Option<GraphSpec>) -> Option<GraphSpec> {
        let given = self.family.is_some()
            || self.nodes.is_some()
            || self.k.is_some()
            || self.p.is_some()
            || self.seed.is_some();
        if base.is_none() && !given {
            return None;
        }
        let family = self.family.or(base.as_ref().map(|b| b.family)).unwrap_or(Family::WattsStrogatz);
        let default_p = match family {
            Family::ErdosRenyi => runner::DEFAULT_ER_P,
            _ => runner::DEFAULT_WS_P,
        };
        Some(GraphSpec {
            family,
            nodes: self.nodes.or(base.as_ref().map(|b| b.nodes)).unwrap_or(0),
            k: self.k.or(base.as_ref().map(|b| b.k)).unwrap_or(runner::DEFAULT_WS_K),
            p: self.p.or(base.as_ref().map(|b| b.p)).unwrap_or(default_p),
            seed: self.seed.or(base.as_ref().map(|b| b.seed)).unwrap_or(0),
        })
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Read the graph from a file instead of generating it.
    #[arg(long, conflicts_with_all = ["family", "nodes", "k", "p", "seed"])]
    graph: Option<PathBuf>,
    #[command(flatten)]
    spec: GraphArgs,
    #[arg(long)]
    t_max: Option<usize>,
    #[arg(long)]
    measure_every: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Leave the position columns out of the time series.
    #[arg(long)]
    no_positions: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',')]
    families: Option<Vec<Family>>,
    /// Node counts, e.g. `6,7,8` or a range `6-15`.
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    seeds_per_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    /// Rewiring probability for ws graphs.
    #[arg(long)]
    p_rewire: Option<f64>,
    /// Edge probability for er graphs.
    #[arg(long)]
    p_edge: Option<f64>,
    #[arg(long)]
    t_max: Option<usize>,
    #[arg(long)]
    measure_every: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Keep each run's graph, time series and summary under `runs/`.
    #[arg(long)]
    write_runs: bool,
}

fn parse_sizes(text: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::InvalidParameters(format!("cannot parse sizes `{text}`"));
    let mut sizes = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once('-') {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            sizes.extend(a..=b);
        } else {
            sizes.push(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(sizes)
}

fn generate(spec: &GraphArgs) -> anyhow::Result<Graph> {
    let spec = spec
        .merge(None)
        .filter(|s| s.nodes > 0)
        .ok_or_else(|| Error::InvalidParameters("--family and --nodes are required".into()))?;
    Ok(spec.generate()?)
}

fn simulate(args: &SimulateArgs) -> anyhow::Result<()> {
    let mut config: RunConfig = match &args.config {
        Some(path) => runner::read_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(path) = &args.graph {
        config.graph_file = Some(path.clone());
        config.generate = None;
    } else if let Some(spec) = args.spec.merge(config.generate.take()) {
        config.generate = Some(spec);
        config.graph_file = None;
    }
    config.t_max = args.t_max.unwrap_or(config.t_max);
    config.measure_every = args.measure_every.unwrap_or(config.measure_every);
    config.threads = args.threads.or(config.threads);
    if let Some(dir) = &args.out_dir {
        config.out_dir = dir.clone();
    }
    if args.no_positions {
        config.emit.positions = false;
    }
    let (record, files) = runner::simulate(&config)?;
    let s = &record.summary;
    log::info!(
        "S_s_late={:.4} S_C={} S_page={:.4}",
        s.s_s_late,
        s.s_c.map_or("none".to_string(), |c| format!("{c:.4}")),
        s.s_page
    );
    for path in [files.timeseries, files.summary].into_iter().flatten() {
        println!("{}", path.display());
    }
    Ok(())
}

fn sweep(args: &SweepArgs) -> anyhow::Result<()> {
    let mut config: SweepConfig = match &args.config {
        Some(path) => runner::read_config(path)?,
        None => SweepConfig::default(),
    };
    if let Some(families) = &args.families {
        config.families = families.clone();
    }
    if let Some(sizes) = &args.sizes {
        config.sizes = parse_sizes(sizes)?;
    }
    config.seeds_per_size = args.seeds_per_size.unwrap_or(config.seeds_per_size);
    config.base_seed = args.seed.unwrap_or(config.base_seed);
    config.ws_k = args.k.unwrap_or(config.ws_k);
    config.ws_p = args.p_rewire.unwrap_or(config.ws_p);
    config.er_p = args.p_edge.unwrap_or(config.er_p);
    config.t_max = args.t_max.unwrap_or(config.t_max);
    config.measure_every = args.measure_every.unwrap_or(config.measure_every);
    config.threads = args.threads.or(config.threads);
    if let Some(dir) = &args.out_dir {
        config.out_dir = dir.clone();
    }
    config.write_runs |= args.write_runs;
    let (rows, path) = runner::sweep(&config)?;
    eprint!("{}", runner::compare(&rows));
    println!("{}", path.display());
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Graph { spec, output } => {
            let graph = generate(&spec)?;
            let report = graph.validate();
            log::info!(
                "{} nodes, {} edges, degree {}..{} (mean {:.3})",
                report.num_nodes,
                report.num_edges,
                report.min_degree,
                report.max_degree,
                report.mean_degree
            );
            match output {
                Some(path) => {
                    save_graph(&graph, &path).with_context(|| format!("writing {}", path.display()))?;
                    println!("{}", path.display());
                }
                None => println!("{}", graph.to_json()?),
            }
        }
        Command::Mcb { graph } => {
            let g = load_graph_relaxed(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let basis = minimum_cycle_basis(&g)?;
            let mut out = io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, &basis.summary(&g))?;
            writeln!(out)?;
        }
        Command::Simulate(args) => simulate(&args)?,
        Command::Sweep(args) => sweep(&args)?,
        Command::Compare { input, json } => {
            let file = File::open(&input).with_context(|| format!("reading {}", input.display()))?;
            let rows = runner::read_sweep_csv(BufReader::new(file))?;
            let stats = runner::compare(&rows);
            if json {
                println!("{}", serde_json::to_string_pretty(&stats)?);
            } else {
                print!("{stats}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = matches!(e.downcast_ref::<Error>(), Some(Error::InvalidParameters(_)));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
