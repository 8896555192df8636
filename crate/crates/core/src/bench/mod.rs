//! Experiment harness: head-to-head comparison of deposition rules,
//! (alpha, beta) grid sweeps and dynamics trace tables.

pub mod cli;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{self, DepositionForm, DynamicsError, DynamicsParams};
use crate::roadmap::{NodeId, Roadmap, RoadmapError};
use crate::solver::{self, AsParams, RunReport, SolverError};

/// Sweeps larger than this need an explicit override.
pub const MAX_SWEEP_CELLS: usize = 10_000;
/// Fewer seeds than this trigger a small-sample warning in comparisons.
pub const RECOMMENDED_SEEDS: usize = 10;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Roadmap(#[from] RoadmapError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Other(String),
}

impl BenchError {
    pub fn is_usage(&self) -> bool {
        matches!(self, BenchError::Usage(_))
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoints {
    Explicit(NodeId, NodeId),
    /// The two cities farthest apart.
    FarthestPair,
}

pub fn resolve_endpoints(roadmap: &Roadmap, endpoints: Endpoints) -> Result<(NodeId, NodeId)> {
    match endpoints {
        Endpoints::FarthestPair => Ok(roadmap.farthest_pair()),
        Endpoints::Explicit(s, d) => {
            let n = roadmap.node_count();
            if !roadmap.contains(s) || !roadmap.contains(d) {
                return Err(BenchError::Usage(format!(
                    "endpoints must lie in [0, {n}), got {s} and {d}"
                )));
            }
            if s == d {
                return Err(BenchError::Usage(
                    "source and destination must differ".into(),
                ));
            }
            Ok((s, d))
        }
    }
}

/// JSON summary of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub params: AsParams,
    pub source: NodeId,
    pub destination: NodeId,
    pub oracle_length: f64,
    pub oracle_hops: usize,
    pub best_length: Option<f64>,
    pub best_path: Option<Vec<NodeId>>,
    pub best_deviation: Option<f64>,
    pub final_deviation: Option<f64>,
    pub convergence_iteration: Option<usize>,
    pub converged: bool,
    pub iterations_run: usize,
    pub no_success: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<u64>,
}

impl RunSummary {
    pub fn new(report: &RunReport, wall_time_ms: Option<u64>) -> Self {
        Self {
            params: report.params.clone(),
            source: report.source,
            destination: report.destination,
            oracle_length: report.oracle.length,
            oracle_hops: report.oracle.hops,
            best_length: report.best_length(),
            best_path: report.best.as_ref().map(|t| t.route.path.clone()),
            best_deviation: report.best_deviation(),
            final_deviation: report.final_deviation(),
            convergence_iteration: report.convergence_iteration,
            converged: report.converged,
            iterations_run: report.iterations.len(),
            no_success: report.no_success(),
            wall_time_ms,
        }
    }
}

/// One configuration under comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    pub name: String,
    pub params: AsParams,
}

/// Head-to-head comparison of two arms on a shared instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub arms: [Arm; 2],
    pub seeds: Vec<u64>,
    pub endpoints: Endpoints,
}

/// Result of one arm on one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmOutcome {
    pub final_deviation: Option<f64>,
    pub best_deviation: Option<f64>,
    pub best_length: Option<f64>,
    pub convergence_iteration: Option<usize>,
    pub iterations_run: usize,
}

impl From<&RunReport> for ArmOutcome {
    fn from(report: &RunReport) -> Self {
        Self {
            final_deviation: report.final_deviation(),
            best_deviation: report.best_deviation(),
            best_length: report.best_length(),
            convergence_iteration: report.convergence_iteration,
            iterations_run: report.iterations.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRow {
    pub seed: u64,
    pub outcomes: [ArmOutcome; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmAggregate {
    pub name: String,
    pub mean_deviation: Option<f64>,
    pub median_deviation: Option<f64>,
    pub mean_convergence: Option<f64>,
    pub median_convergence: Option<f64>,
    /// Runs where no ant reached the destination.
    pub failed_runs: usize,
}

/// Paired win counts for one metric; `wins[0] + wins[1] + ties` equals the
/// number of seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WinCount {
    pub wins: [usize; 2],
    pub ties: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub source: NodeId,
    pub destination: NodeId,
    pub oracle_length: f64,
    pub arms: [Arm; 2],
    pub rows: Vec<SeedRow>,
    pub aggregates: [ArmAggregate; 2],
    /// Lower final deviation wins.
    pub deviation: WinCount,
    /// Earlier convergence iteration wins.
    pub convergence: WinCount,
    pub warnings: Vec<String>,
}

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    })
}

/// Lower is better; a missing value loses to any present one.
fn paired<T: PartialOrd>(a: Option<T>, b: Option<T>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) if x < y => Some(0),
        (Some(x), Some(y)) if y < x => Some(1),
        (Some(_), None) => Some(0),
        (None, Some(_)) => Some(1),
        _ => None,
    }
}

fn tally<T: PartialOrd>(pairs: impl Iterator<Item = (Option<T>, Option<T>)>) -> WinCount {
    let mut count = WinCount::default();
    for (a, b) in pairs {
        match paired(a, b) {
            Some(w) => count.wins[w] += 1,
            None => count.ties += 1,
        }
    }
    count
}

fn aggregate(name: &str, outcomes: &[&ArmOutcome]) -> ArmAggregate {
    let devs: Vec<f64> = outcomes.iter().filter_map(|o| o.final_deviation).collect();
    let convs: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| o.convergence_iteration.map(|c| c as f64))
        .collect();
    ArmAggregate {
        name: name.to_string(),
        mean_deviation: mean(&devs),
        median_deviation: median(&devs),
        mean_convergence: mean(&convs),
        median_convergence: median(&convs),
        failed_runs: outcomes.iter().filter(|o| o.best_length.is_none()).count(),
    }
}

/// A comparison that stopped on a failing run, with the rows completed before it.
#[derive(Debug)]
pub struct CompareFailure {
    pub error: BenchError,
    pub partial: Vec<SeedRow>,
}

/// Runs both arms for every seed on the shared instance.
pub fn compare(
    roadmap: &Roadmap,
    spec: &ExperimentSpec,
) -> std::result::Result<ComparisonReport, CompareFailure> {
    let fail = |error: BenchError| CompareFailure {
        error,
        partial: Vec::new(),
    };
    if spec.seeds.is_empty() {
        return Err(fail(BenchError::Usage(
            "at least one seed is required".into(),
        )));
    }
    let (source, destination) = resolve_endpoints(roadmap, spec.endpoints).map_err(fail)?;

    let jobs: Vec<(u64, usize)> = spec.seeds.iter().flat_map(|&s| [(s, 0), (s, 1)]).collect();
    let results: Vec<std::result::Result<RunReport, SolverError>> = jobs
        .par_iter()
        .map(|&(seed, arm)| {
            let params = spec.arms[arm].params.clone().with_seed(seed);
            solver::run(roadmap, source, destination, &params)
        })
        .collect();

    let mut rows = Vec::with_capacity(spec.seeds.len());
    let mut oracle_length = f64::NAN;
    for (i, pair) in results.chunks(2).enumerate() {
        match (&pair[0], &pair[1]) {
            (Ok(a), Ok(b)) => {
                oracle_length = a.oracle.length;
                rows.push(SeedRow {
                    seed: spec.seeds[i],
                    outcomes: [ArmOutcome::from(a), ArmOutcome::from(b)],
                });
            }
            (Err(e), _) | (_, Err(e)) => {
                return Err(CompareFailure {
                    error: BenchError::Other(format!("seed {}: {e}", spec.seeds[i])),
                    partial: rows,
                });
            }
        }
    }

    let mut warnings = Vec::new();
    if spec.seeds.len() < RECOMMENDED_SEEDS {
        warnings.push(format!(
            "only {} seed(s); at least {RECOMMENDED_SEEDS} are recommended for a meaningful comparison",
            spec.seeds.len()
        ));
    }
    let side = |k: usize| rows.iter().map(|r| &r.outcomes[k]).collect::<Vec<_>>();
    let aggregates = [
        aggregate(&spec.arms[0].name, &side(0)),
        aggregate(&spec.arms[1].name, &side(1)),
    ];
    let deviation = tally(
        rows.iter()
            .map(|r| (r.outcomes[0].final_deviation, r.outcomes[1].final_deviation)),
    );
    let convergence = tally(rows.iter().map(|r| {
        (
            r.outcomes[0].convergence_iteration,
            r.outcomes[1].convergence_iteration,
        )
    }));
    Ok(ComparisonReport {
        source,
        destination,
        oracle_length,
        arms: spec.arms.clone(),
        rows,
        aggregates,
        deviation,
        convergence,
        warnings,
    })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_row<W: Write>(out: &mut W, header: &[&str], row: &[String]) -> std::io::Result<()> {
    if row.len() != header.len() {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("row has {} fields, header has {}", row.len(), header.len()),
        ));
    }
    writeln!(out, "{}", row.join(","))
}

pub const COMPARE_CSV_HEADER: [&str; 9] = [
    "seed",
    "arm",
    "final_deviation",
    "final_deviation_abs",
    "best_deviation",
    "best_length",
    "convergence_iteration",
    "iterations_run",
    "success",
];

/// One row per (seed, arm).
pub fn write_comparison_rows<W: Write>(
    rows: &[SeedRow],
    arms: &[Arm; 2],
    oracle_length: f64,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "{}", COMPARE_CSV_HEADER.join(","))?;
    for row in rows {
        for (arm, o) in arms.iter().zip(&row.outcomes) {
            let fields = [
                row.seed.to_string(),
                arm.name.clone(),
                opt(o.final_deviation),
                opt(o.final_deviation.map(|d| d * oracle_length)),
                opt(o.best_deviation),
                opt(o.best_length),
                opt(o.convergence_iteration),
                o.iterations_run.to_string(),
                o.best_length.is_some().to_string(),
            ];
            write_row(&mut out, &COMPARE_CSV_HEADER, &fields)?;
        }
    }
    Ok(())
}

impl ComparisonReport {
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_comparison_rows(&self.rows, &self.arms, self.oracle_length, out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub alpha: f64,
    pub beta: f64,
    /// Mean over seeds of the final best length; `None` if no run succeeded.
    pub mean_best: Option<f64>,
    pub mean_convergence: Option<f64>,
    pub failed_runs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub base: AsParams,
    pub endpoints: Endpoints,
    /// Allow grids above [`MAX_SWEEP_CELLS`].
    pub force: bool,
}

/// Mean best length and convergence iteration per (alpha, beta) cell, in
/// alpha-major order.
pub fn sweep(roadmap: &Roadmap, spec: &SweepSpec) -> Result<Vec<SweepCell>> {
    if spec.alphas.is_empty() || spec.betas.is_empty() {
        return Err(BenchError::Usage(
            "alpha and beta grids must be non-empty".into(),
        ));
    }
    if spec.seeds.is_empty() {
        return Err(BenchError::Usage("at least one seed is required".into()));
    }
    let cells = spec.alphas.len() * spec.betas.len();
    if cells > MAX_SWEEP_CELLS && !spec.force {
        return Err(BenchError::Usage(format!(
            "grid has {cells} cells (limit {MAX_SWEEP_CELLS}); pass --force to run it anyway"
        )));
    }
    let (source, destination) = resolve_endpoints(roadmap, spec.endpoints)?;
    let grid: Vec<(f64, f64)> = spec
        .alphas
        .iter()
        .flat_map(|&a| spec.betas.iter().map(move |&b| (a, b)))
        .collect();
    for &(alpha, beta) in &grid {
        AsParams {
            alpha,
            beta,
            ..spec.base.clone()
        }
        .validate()?;
    }

    let jobs: Vec<(usize, u64)> = (0..grid.len())
        .flat_map(|c| spec.seeds.iter().map(move |&s| (c, s)))
        .collect();
    let outcomes: Vec<RunReport> = jobs
        .par_iter()
        .map(|&(c, seed)| {
            let (alpha, beta) = grid[c];
            let params = AsParams {
                alpha,
                beta,
                seed,
                ..spec.base.clone()
            };
            solver::run(roadmap, source, destination, &params)
        })
        .collect::<std::result::Result<_, _>>()?;

    Ok(grid
        .iter()
        .zip(outcomes.chunks(spec.seeds.len()))
        .map(|(&(alpha, beta), runs)| {
            let best: Vec<f64> = runs.iter().filter_map(|r| r.best_length()).collect();
            let conv: Vec<f64> = runs
                .iter()
                .filter_map(|r| r.convergence_iteration.map(|c| c as f64))
                .collect();
            SweepCell {
                alpha,
                beta,
                mean_best: mean(&best),
                mean_convergence: mean(&conv),
                failed_runs: runs.len() - best.len(),
            }
        })
        .collect())
}

pub const SWEEP_CSV_HEADER: [&str; 4] = ["alpha", "beta", "mean_best", "mean_convergence"];

pub fn write_sweep_csv<W: Write>(cells: &[SweepCell], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", SWEEP_CSV_HEADER.join(","))?;
    for c in cells {
        let fields = [
            c.alpha.to_string(),
            c.beta.to_string(),
            opt(c.mean_best),
            opt(c.mean_convergence),
        ];
        write_row(&mut out, &SWEEP_CSV_HEADER, &fields)?;
    }
    Ok(())
}

/// Pheromone traces for several evaporation rates sharing `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsTable {
    pub rhos: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
}

pub fn dynamics_table(
    rhos: &[f64],
    tau0: f64,
    c_sum: f64,
    form: DepositionForm,
    steps: u64,
    closed_form: bool,
) -> Result<DynamicsTable> {
    if rhos.is_empty() {
        return Err(BenchError::Usage("at least one rho is required".into()));
    }
    let columns = rhos
        .iter()
        .map(|&rho| {
            let params = DynamicsParams::new(rho, tau0, c_sum)?;
            let trace = if closed_form {
                dynamics::sample_closed_form(&params, form, steps)?
            } else {
                dynamics::simulate_recurrence(&params, form, steps)?
            };
            Ok(trace.values().collect())
        })
        .collect::<std::result::Result<Vec<Vec<f64>>, DynamicsError>>()?;
    Ok(DynamicsTable {
        rhos: rhos.to_vec(),
        columns,
    })
}

impl DynamicsTable {
    /// `t,rho=<r1>,rho=<r2>,...`
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend(self.rhos.iter().map(|r| format!("rho={r}")));
        writeln!(out, "{}", header.join(","))?;
        let len = self.columns.first().map_or(0, Vec::len);
        for t in 0..len {
            let mut row = vec![t.to_string()];
            row.extend(self.columns.iter().map(|c| c[t].to_string()));
            debug_assert_eq!(row.len(), header.len());
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}
