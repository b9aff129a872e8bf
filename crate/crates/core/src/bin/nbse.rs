use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nbse::cover::Cover;
use nbse::edgelist::load_edge_list;
use nbse::harness::{
    estimate_once, results_csv, run_overlap_sweep, run_real_data_file, run_simulation,
    run_traversal_study, Estimator, ExperimentConfig, ResultRow, Scenario,
};
use nbse::{par, Result, SymMatrix};

#[derive(Parser)]
#[command(name = "nbse", version, about = "Graphon estimation from overlapping observed subgraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample networks from a graphon and score the estimators.
    Simulate(Flags),
    /// Repeat `simulate` over a list of overlap sizes.
    Sweep(Flags),
    /// Compare single merge traversals with the averaged distance.
    Traversals(Flags),
    /// Partial-observation study on an edge-list graph.
    Realdata(Flags),
    /// Estimate the probability matrix of one observed graph.
    Estimate(EstimateArgs),
}

/// Overrides for the config file, one per config key.
#[derive(Args)]
struct Flags {
    /// TOML config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    graphon: Option<String>,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(short, long)]
    n: Option<usize>,
    /// full, two-block, chain or file
    #[arg(long)]
    scenario: Option<Scenario>,
    #[arg(short = 'T', long)]
    blocks: Option<usize>,
    /// Fraction of n when below 1, else a vertex count.
    #[arg(long)]
    overlap: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    overlaps: Option<Vec<f64>>,
    #[arg(long)]
    cover_file: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    estimators: Option<Vec<Estimator>>,
    #[arg(long)]
    trees: Option<usize>,
    #[arg(long)]
    traversals: Option<usize>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    rule: Option<String>,
    #[arg(long)]
    bandwidth_c: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    usvt_eta: Option<f64>,
    #[arg(long)]
    reference: Option<Estimator>,
    #[arg(short = 'R', long)]
    replications: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Result CSV; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    dump_dir: Option<PathBuf>,
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Adjacency matrix as CSV (`.csv`) or an edge list.
    input: PathBuf,
    /// Cover file; the whole graph is one block when absent.
    #[arg(long)]
    cover: Option<PathBuf>,
    #[arg(long, default_value = "nbse")]
    estimator: Estimator,
    #[command(flatten)]
    flags: Flags,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl Flags {
    fn resolve(self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if self.graphon.is_some() {
            cfg.graphon = self.graphon;
        }
        if self.graph.is_some() {
            cfg.graph = self.graph;
        }
        if self.cover_file.is_some() {
            cfg.cover_file = self.cover_file;
        }
        if self.output.is_some() {
            cfg.output = self.output;
        }
        if self.dump_dir.is_some() {
            cfg.dump_dir = self.dump_dir;
        }
        set(&mut cfg.n, self.n);
        set(&mut cfg.scenario, self.scenario);
        set(&mut cfg.blocks, self.blocks);
        set(&mut cfg.overlap, self.overlap);
        set(&mut cfg.overlaps, self.overlaps);
        set(&mut cfg.estimators, self.estimators);
        set(&mut cfg.trees, self.trees);
        set(&mut cfg.traversals, self.traversals);
        set(&mut cfg.strategy, self.strategy);
        set(&mut cfg.rule, self.rule);
        set(&mut cfg.bandwidth_c, self.bandwidth_c);
        set(&mut cfg.epsilon, self.epsilon);
        set(&mut cfg.max_iterations, self.max_iterations);
        set(&mut cfg.usvt_eta, self.usvt_eta);
        set(&mut cfg.reference, self.reference);
        set(&mut cfg.replications, self.replications);
        set(&mut cfg.seed, self.seed);
        set(&mut cfg.threads, self.threads);
        cfg.timing |= self.timing;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_rows(cfg: &ExperimentConfig, rows: &[ResultRow]) -> Result<()> {
    emit(&results_csv(rows), cfg.output.as_deref())
}

fn load_matrix(path: &Path) -> Result<SymMatrix> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let m = SymMatrix::read_csv(path)?;
        m.validate_adjacency()?;
        Ok(m)
    } else {
        load_edge_list(path)
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate(flags) => {
            let cfg = flags.resolve()?;
            emit_rows(&cfg, &run_simulation(&cfg)?)
        }
        Command::Sweep(flags) => {
            let cfg = flags.resolve()?;
            emit_rows(&cfg, &run_overlap_sweep(&cfg, &cfg.overlaps)?)
        }
        Command::Traversals(flags) => {
            let cfg = flags.resolve()?;
            emit_rows(&cfg, &run_traversal_study(&cfg)?)
        }
        Command::Realdata(flags) => {
            let cfg = flags.resolve()?;
            emit_rows(&cfg, &run_real_data_file(&cfg)?)
        }
        Command::Estimate(args) => {
            let cfg = args.flags.resolve()?;
            let adj = load_matrix(&args.input)?;
            let cover = match &args.cover {
                Some(path) => Cover::read(path, adj.n())?,
                None => Cover::full(adj.n()),
            };
            let est = par::with_threads(cfg.threads, || estimate_once(&cfg, args.estimator, &adj, &cover))?;
            emit(&est.to_csv(), cfg.output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
