//! Experiment configuration and orchestration.
//!
//! Every replication is an independent task whose random draws come from
//! seeds derived with [`crate::seed::derive_seed`] from
//! `(master seed, replication, overlap index, stream)`. Tasks may run in
//! parallel; rows are gathered in `(overlap, replication, estimator)` order, so
//! the CSV output does not depend on the worker count.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Deserialize;

use crate::baselines::{nbs_vanilla_with, usvt, DEFAULT_USVT_ETA};
use crate::cover::{
    build_supergraph, dfs_traversal, ensure_valid, make_chain_cover, make_two_block_cover,
    maximal_spanning_tree, observed_set, Cover, SpanningTree, Traversal,
};
use crate::distance::dist_for_blocks;
use crate::edgelist::load_edge_list;
use crate::error::{Error, Result};
use crate::extension::{
    average_over, block_partials, nbse, nbse_from_distance, AveragingRule, NbseParams, TreeStrategy,
};
use crate::graphon::{build_prob_matrix, sample_adjacency, sample_latents, GraphonSpec};
use crate::matrix::{frobenius_error, mask_observed, SymMatrix};
use crate::par;
use crate::seed::{derive_seed, mix, stream};

pub const CSV_HEADER: &str = "estimator,dataset,n,T,overlap,rep,error,seconds,iterations";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Nbse,
    Nbs,
    Usvt,
}

impl Estimator {
    fn stream(self) -> u64 {
        match self {
            Estimator::Nbse => stream::NBSE,
            Estimator::Nbs => stream::NBS,
            Estimator::Usvt => stream::USVT,
        }
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nbse" => Ok(Estimator::Nbse),
            "nbs" => Ok(Estimator::Nbs),
            "usvt" => Ok(Estimator::Usvt),
            other => Err(Error::Config(format!("unknown estimator {other:?}"))),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Nbse => "nbse",
            Estimator::Nbs => "nbs",
            Estimator::Usvt => "usvt",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// One block holding every vertex.
    Full,
    TwoBlock,
    Chain,
    /// Blocks read from `cover_file`.
    File,
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(Scenario::Full),
            "two-block" => Ok(Scenario::TwoBlock),
            "chain" => Ok(Scenario::Chain),
            "file" => Ok(Scenario::File),
            other => Err(Error::Config(format!("unknown cover scenario {other:?}"))),
        }
    }
}

/// Study settings. Every field has a default, so a config file only needs the
/// keys it changes.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Letter `a`–`f` or path to a CSV grid.
    pub graphon: Option<String>,
    /// Edge-list file for real-data runs and `estimate`.
    pub graph: Option<PathBuf>,
    pub n: usize,
    pub scenario: Scenario,
    /// Number of blocks for the chain scenario.
    pub blocks: usize,
    /// Overlap between adjacent blocks: a fraction of `n` when below 1, else a
    /// vertex count.
    pub overlap: f64,
    /// Overlap values for sweeps, same convention as `overlap`.
    pub overlaps: Vec<f64>,
    pub cover_file: Option<PathBuf>,
    pub estimators: Vec<Estimator>,
    pub trees: usize,
    pub traversals: usize,
    pub strategy: String,
    pub rule: String,
    pub bandwidth_c: f64,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub usvt_eta: f64,
    /// Estimator used for the full-graph reference in real-data runs.
    pub reference: Estimator,
    pub replications: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// Directory for per-run estimate CSVs.
    pub dump_dir: Option<PathBuf>,
    /// Fill the `seconds` column. Off by default so outputs are reproducible
    /// byte for byte.
    pub timing: bool,
    /// Worker threads (0 = all cores).
    pub threads: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = NbseParams::default();
        ExperimentConfig {
            graphon: None,
            graph: None,
            n: 1000,
            scenario: Scenario::Chain,
            blocks: 5,
            overlap: 0.05,
            overlaps: vec![0.01, 0.05, 0.1, 0.3],
            cover_file: None,
            estimators: vec![Estimator::Nbse, Estimator::Nbs],
            trees: p.trees,
            traversals: p.traversals,
            strategy: p.strategy.to_string(),
            rule: p.rule.to_string(),
            bandwidth_c: p.bandwidth_c,
            epsilon: p.epsilon,
            max_iterations: p.max_iterations,
            usvt_eta: DEFAULT_USVT_ETA,
            reference: Estimator::Nbs,
            replications: 5,
            seed: 1,
            output: None,
            dump_dir: None,
            timing: false,
            threads: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("estimator list is empty".into()));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if self.bandwidth_c.is_nan() || self.bandwidth_c <= 0.0 {
            return Err(Error::Config("bandwidth constant must be positive".into()));
        }
        self.nbse_params(0)?;
        Ok(())
    }

    pub fn nbse_params(&self, seed: u64) -> Result<NbseParams> {
        Ok(NbseParams {
            trees: self.trees,
            traversals: self.traversals,
            strategy: self.strategy.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            rule: self.rule.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            bandwidth_c: self.bandwidth_c,
            epsilon: self.epsilon,
            max_iterations: self.max_iterations,
            seed,
        })
    }

    pub fn graphon_spec(&self) -> Result<GraphonSpec> {
        let name = self
            .graphon
            .as_deref()
            .ok_or_else(|| Error::Config("no graphon given".into()))?;
        GraphonSpec::from_name_or_path(name).map_err(|e| match e {
            Error::Io(_) | Error::Parse { .. } | Error::NotSymmetric { .. } => e,
            other => Error::Config(other.to_string()),
        })
    }

    /// Builds the cover for an `n`-vertex graph at the given overlap value.
    pub fn build_cover(&self, n: usize, overlap: f64, seed: u64) -> Result<Cover> {
        let cover = match self.scenario {
            Scenario::Full => Cover::full(n),
            Scenario::TwoBlock => make_two_block_cover(n, resolve_overlap(n, overlap)?, seed)
                .map_err(|e| Error::Config(e.to_string()))?,
            Scenario::Chain => make_chain_cover(n, self.blocks, resolve_overlap(n, overlap)?, seed)
                .map_err(|e| Error::Config(e.to_string()))?,
            Scenario::File => {
                let path = self
                    .cover_file
                    .as_deref()
                    .ok_or_else(|| Error::Config("scenario `file` needs cover_file".into()))?;
                Cover::read(path, n)?
            }
        };
        ensure_valid(&cover).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cover)
    }
}

/// Overlap as a vertex count: values below 1 are fractions of `n` (rounded,
/// at least 1), others are counts.
pub fn resolve_overlap(n: usize, overlap: f64) -> Result<usize> {
    if !overlap.is_finite() || overlap <= 0.0 {
        return Err(Error::Config(format!("overlap {overlap} must be positive")));
    }
    if overlap < 1.0 {
        Ok(((overlap * n as f64).round() as usize).max(1))
    } else if overlap.fract() == 0.0 {
        Ok(overlap as usize)
    } else {
        Err(Error::Config(format!("overlap count {overlap} is not an integer")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub estimator: String,
    pub dataset: String,
    pub n: usize,
    pub blocks: usize,
    pub overlap: usize,
    pub rep: usize,
    pub error: f64,
    pub seconds: Option<f64>,
    pub iterations: Option<usize>,
}

pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let secs = r.seconds.map(|s| format!("{s:.6}")).unwrap_or_default();
        let iters = r.iterations.map(|i| i.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.estimator, r.dataset, r.n, r.blocks, r.overlap, r.rep, r.error, secs, iters
        );
    }
    out
}

pub fn write_results(rows: &[ResultRow], path: &Path) -> Result<()> {
    std::fs::write(path, results_csv(rows))?;
    Ok(())
}

/// One sampled or loaded network with its cover and observed matrix.
struct Instance {
    dataset: String,
    cover: Cover,
    adj_obs: SymMatrix,
    /// Matrix the errors are measured against.
    target: SymMatrix,
    overlap: usize,
    rep: usize,
    overlap_index: usize,
}

fn timed<T>(enabled: bool, f: impl FnOnce() -> Result<T>) -> Result<(T, Option<f64>)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, enabled.then(|| start.elapsed().as_secs_f64())))
}

fn run_estimator(
    cfg: &ExperimentConfig,
    est: Estimator,
    inst: &Instance,
) -> Result<(SymMatrix, Option<usize>, Option<f64>)> {
    let seed = derive_seed(cfg.seed, inst.rep as u64, inst.overlap_index as u64, est.stream());
    let ((estimate, iters), secs) = timed(cfg.timing, || match est {
        Estimator::Nbse => {
            let out = nbse(&inst.adj_obs, &inst.cover, &cfg.nbse_params(seed)?)?;
            Ok((out.estimate, Some(out.iterations)))
        }
        Estimator::Nbs => Ok((nbs_vanilla_with(&inst.adj_obs, cfg.bandwidth_c)?, None)),
        Estimator::Usvt => Ok((usvt(&inst.adj_obs, &observed_set(&inst.cover), cfg.usvt_eta)?, None)),
    })?;
    Ok((estimate, iters, secs))
}

fn dump(cfg: &ExperimentConfig, name: &str, inst: &Instance, m: &SymMatrix) -> Result<()> {
    if let Some(dir) = &cfg.dump_dir {
        std::fs::create_dir_all(dir)?;
        let file = format!("{}_{}_m{}_r{}.csv", name, inst.dataset, inst.overlap, inst.rep);
        m.write_csv(&dir.join(file))?;
    }
    Ok(())
}

fn evaluate(cfg: &ExperimentConfig, inst: &Instance) -> Result<Vec<ResultRow>> {
    cfg.estimators
        .iter()
        .map(|&est| {
            let (estimate, iterations, seconds) = run_estimator(cfg, est, inst)?;
            dump(cfg, &est.to_string(), inst, &estimate)?;
            Ok(ResultRow {
                estimator: est.to_string(),
                dataset: inst.dataset.clone(),
                n: inst.adj_obs.n(),
                blocks: inst.cover.num_blocks(),
                overlap: inst.overlap,
                rep: inst.rep,
                error: frobenius_error(&estimate, &inst.target)?,
                seconds,
                iterations,
            })
        })
        .collect()
}

/// Samples the synthetic network for one task.
fn synthetic_instance(
    cfg: &ExperimentConfig,
    spec: &GraphonSpec,
    overlap: f64,
    overlap_index: usize,
    rep: usize,
) -> Result<Instance> {
    let n = cfg.n;
    let data_seed = derive_seed(cfg.seed, rep as u64, overlap_index as u64, stream::DATA);
    let cover_seed = derive_seed(cfg.seed, rep as u64, overlap_index as u64, stream::COVER);
    let xi = sample_latents(n, data_seed)?;
    let prob = build_prob_matrix(spec, &xi);
    let adj = sample_adjacency(&prob, mix(data_seed));
    let cover = cfg.build_cover(n, overlap, cover_seed)?;
    let adj_obs = mask_observed(&adj, &observed_set(&cover))?;
    Ok(Instance {
        dataset: spec.name(),
        overlap: overlap_count(&cover),
        cover,
        adj_obs,
        target: prob,
        rep,
        overlap_index,
    })
}

/// Size of the largest pairwise block overlap (0 for a single block).
fn overlap_count(cover: &Cover) -> usize {
    build_supergraph(cover).edges().iter().map(|e| e.2).max().unwrap_or(0)
}

fn run_tasks<T, F>(cfg: &ExperimentConfig, tasks: &[T], f: F) -> Result<Vec<ResultRow>>
where
    T: Sync,
    F: Fn(&T) -> Result<Vec<ResultRow>> + Sync + Send,
{
    let results = par::with_threads(cfg.threads, || par::map_slice(tasks, &f));
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

fn check_simulation(cfg: &ExperimentConfig, overlaps: &[f64]) -> Result<GraphonSpec> {
    cfg.validate()?;
    let spec = cfg.graphon_spec()?;
    if cfg.n < 3 {
        return Err(Error::Config(format!("n = {} is too small", cfg.n)));
    }
    for &m in overlaps {
        cfg.build_cover(cfg.n, m, 0)?;
    }
    Ok(spec)
}

/// Samples `replications` networks from the configured graphon, observes them
/// through the configured cover and scores each estimator against the true
/// probability matrix.
pub fn run_simulation(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let spec = check_simulation(cfg, &[cfg.overlap])?;
    let tasks: Vec<usize> = (0..cfg.replications).collect();
    run_tasks(cfg, &tasks, |&rep| evaluate(cfg, &synthetic_instance(cfg, &spec, cfg.overlap, 0, rep)?))
}

/// [`run_simulation`] at each overlap value; rows are tagged with the
/// resolved overlap count.
pub fn run_overlap_sweep(cfg: &ExperimentConfig, overlaps: &[f64]) -> Result<Vec<ResultRow>> {
    if overlaps.is_empty() {
        return Err(Error::Config("no overlap values to sweep".into()));
    }
    let spec = check_simulation(cfg, overlaps)?;
    let tasks: Vec<(usize, f64, usize)> = overlaps
        .iter()
        .enumerate()
        .flat_map(|(k, &m)| (0..cfg.replications).map(move |rep| (k, m, rep)))
        .collect();
    run_tasks(cfg, &tasks, |&(k, m, rep)| {
        evaluate(cfg, &synthetic_instance(cfg, &spec, m, k, rep)?)
    })
}

/// The three single traversals of the traversal study: a walk from the
/// middle block, the end-to-end walk of the maximal spanning tree, and the
/// walk from the last block.
pub fn study_traversals(tree: &SpanningTree) -> Result<[Traversal; 3]> {
    let t = tree.num_nodes();
    Ok([
        dfs_traversal(tree, t / 2, None)?,
        dfs_traversal(tree, 0, None)?,
        dfs_traversal(tree, t - 1, None)?,
    ])
}

/// Extended smoothing with each single traversal and with the distance
/// averaged over all three. Rows are named `nbse-path1..3` and `nbse-avg`.
pub fn run_traversal_study(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    if cfg.scenario != Scenario::Chain {
        return Err(Error::Config("the traversal study needs the chain scenario".into()));
    }
    let spec = check_simulation(cfg, &[cfg.overlap])?;
    let tasks: Vec<usize> = (0..cfg.replications).collect();
    run_tasks(cfg, &tasks, |&rep| {
        let inst = synthetic_instance(cfg, &spec, cfg.overlap, 0, rep)?;
        let params = cfg.nbse_params(derive_seed(cfg.seed, rep as u64, 0, stream::NBSE))?;
        let blocks = block_partials(&inst.cover, dist_for_blocks(&inst.adj_obs, &inst.cover)?)?;
        let tree = maximal_spanning_tree(&build_supergraph(&inst.cover))?;
        let walks = study_traversals(&tree)?;
        let plans: Vec<(String, Vec<(SpanningTree, Traversal)>)> = walks
            .iter()
            .enumerate()
            .map(|(k, w)| (format!("nbse-path{}", k + 1), vec![(tree.clone(), w.clone())]))
            .chain(std::iter::once((
                "nbse-avg".to_string(),
                walks.iter().map(|w| (tree.clone(), w.clone())).collect(),
            )))
            .collect();
        plans
            .into_iter()
            .map(|(name, plan)| {
                let ((estimate, iterations), seconds) = timed(cfg.timing, || {
                    let d = average_over(&blocks, &plan, params.rule, inst.adj_obs.n())?;
                    let out = nbse_from_distance(&inst.adj_obs, &inst.cover, d, &params)?;
                    Ok((out.estimate, out.iterations))
                })?;
                dump(cfg, &name, &inst, &estimate)?;
                Ok(ResultRow {
                    estimator: name,
                    dataset: inst.dataset.clone(),
                    n: inst.adj_obs.n(),
                    blocks: inst.cover.num_blocks(),
                    overlap: inst.overlap,
                    rep,
                    error: frobenius_error(&estimate, &inst.target)?,
                    seconds,
                    iterations: Some(iterations),
                })
            })
            .collect()
    })
}

/// Estimate from a fully observed graph, used as the reference in real-data runs.
pub fn reference_estimate(cfg: &ExperimentConfig, adj: &SymMatrix) -> Result<SymMatrix> {
    let n = adj.n();
    match cfg.reference {
        Estimator::Nbs => nbs_vanilla_with(adj, cfg.bandwidth_c),
        Estimator::Nbse => Ok(nbse(adj, &Cover::full(n), &cfg.nbse_params(cfg.seed)?)?.estimate),
        Estimator::Usvt => usvt(adj, &crate::matrix::ObservedSet::full(n), cfg.usvt_eta),
    }
}

/// Real-network protocol: estimate from the full graph, then measure how far
/// each estimator on partially observed copies lands from that reference.
/// Sweeps `cfg.overlaps` for the two-block scenario, otherwise uses
/// `cfg.overlap`.
pub fn run_real_data(cfg: &ExperimentConfig, adj: &SymMatrix, dataset: &str) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let n = adj.n();
    if n < 3 {
        return Err(Error::TooSmall { n, min: 3 });
    }
    let overlaps: Vec<f64> = if cfg.scenario == Scenario::TwoBlock {
        cfg.overlaps.clone()
    } else {
        vec![cfg.overlap]
    };
    for &m in &overlaps {
        cfg.build_cover(n, m, 0)?;
    }
    let reference = reference_estimate(cfg, adj)?;
    let tasks: Vec<(usize, f64, usize)> = overlaps
        .iter()
        .enumerate()
        .flat_map(|(k, &m)| (0..cfg.replications).map(move |rep| (k, m, rep)))
        .collect();
    run_tasks(cfg, &tasks, |&(k, m, rep)| {
        let cover_seed = derive_seed(cfg.seed, rep as u64, k as u64, stream::COVER);
        let cover = cfg.build_cover(n, m, cover_seed)?;
        let inst = Instance {
            dataset: dataset.to_string(),
            overlap: overlap_count(&cover),
            adj_obs: mask_observed(adj, &observed_set(&cover))?,
            cover,
            target: reference.clone(),
            rep,
            overlap_index: k,
        };
        evaluate(cfg, &inst)
    })
}

/// Loads `cfg.graph` and runs [`run_real_data`], naming the dataset after the
/// file stem.
pub fn run_real_data_file(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let path = cfg
        .graph
        .as_deref()
        .ok_or_else(|| Error::Config("no input graph given".into()))?;
    let adj = load_edge_list(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".into());
    run_real_data(cfg, &adj, &name)
}

/// One-shot estimate of an observed matrix under `cover`.
pub fn estimate_once(cfg: &ExperimentConfig, est: Estimator, adj_obs: &SymMatrix, cover: &Cover) -> Result<SymMatrix> {
    ensure_valid(cover)?;
    let adj_obs = mask_observed(adj_obs, &observed_set(cover))?;
    match est {
        Estimator::Nbse => Ok(nbse(&adj_obs, cover, &cfg.nbse_params(cfg.seed)?)?.estimate),
        Estimator::Nbs => nbs_vanilla_with(&adj_obs, cfg.bandwidth_c),
        Estimator::Usvt => usvt(&adj_obs, &observed_set(cover), cfg.usvt_eta),
    }
}

impl Error {
    /// Process exit code: 2 for configuration problems, 3 for bad input data.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) | Error::InvalidCover(_) | Error::Disconnected => 2,
            Error::BlockTooSmall { .. } | Error::EmptyIntersection(_) | Error::TooSmall { .. } => 2,
            Error::Parse { .. }
            | Error::Io(_)
            | Error::NotSymmetric { .. }
            | Error::DimensionMismatch { .. }
            | Error::VertexOutOfRange { .. } => 3,
        }
    }
}

// Kept next to the config so a config file can name strategies and rules.
impl ExperimentConfig {
    pub fn strategy(&self) -> Result<TreeStrategy> {
        self.strategy.parse().map_err(|e: Error| Error::Config(e.to_string()))
    }

    pub fn rule(&self) -> Result<AveragingRule> {
        self.rule.parse().map_err(|e: Error| Error::Config(e.to_string()))
    }
}
