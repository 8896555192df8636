//! Ant System search for a source-to-destination route.
//!
//! Every iteration, `m` ants build routes from the source by repeatedly
//! applying the pseudo-random proportional choice rule over unvisited
//! neighbours. The pheromone table is then evaporated and each ant that
//! reached the destination deposits on the edges it used, either a uniform
//! amount `Q / L_k` per edge or an amount that grows along the route as
//! `Q / L_k * (1 - e^{-s/T})` for the `s`-th edge.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::roadmap::{self, NodeId, PathResult, Roadmap, RoadmapError};

/// Lower bound applied to every pheromone value after evaporation.
pub const TAU_MIN: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Roadmap(#[from] RoadmapError),
}

pub type Result<T> = std::result::Result<T, SolverError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepositionRule {
    /// Every edge of a route receives `Q / L_k`.
    Uniform,
    /// The `s`-th edge from the source receives `Q / L_k * (1 - e^{-s/T})`.
    ExponentialGradient,
}

impl std::fmt::Display for DepositionRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DepositionRule::Uniform => write!(f, "uniform"),
            DepositionRule::ExponentialGradient => write!(f, "exponential"),
        }
    }
}

impl std::str::FromStr for DepositionRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(DepositionRule::Uniform),
            "exponential" | "exponential-gradient" => Ok(DepositionRule::ExponentialGradient),
            other => Err(format!("unknown deposition rule {other:?}")),
        }
    }
}

/// Full solver configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsParams {
    /// Pheromone weight.
    pub alpha: f64,
    /// Visibility weight.
    pub beta: f64,
    /// Evaporation rate, in (0, 1).
    pub rho: f64,
    /// Draws below `q0` use the proportional rule, others pick the best move.
    pub q0: f64,
    pub ants: usize,
    /// Deposition scale; ant `k` deposits `Q / L_k`.
    pub q: f64,
    pub rule: DepositionRule,
    /// `T` as a fraction of the mean hop count of the iteration's routes.
    pub t_fraction: f64,
    pub tau0: f64,
    pub max_iterations: usize,
    /// Iterations without improvement that mark convergence.
    pub stagnation_window: usize,
    pub seed: u64,
}

impl Default for AsParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 2.0,
            rho: 0.1,
            q0: 0.8,
            ants: 25,
            q: 100.0,
            rule: DepositionRule::Uniform,
            t_fraction: 0.2,
            tau0: 0.1,
            max_iterations: 1000,
            stagnation_window: 50,
            seed: 0,
        }
    }
}

impl AsParams {
    pub fn new(rule: DepositionRule, alpha: f64, beta: f64) -> Self {
        Self {
            rule,
            alpha,
            beta,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(msg: String) -> Result<()> {
            Err(SolverError::InvalidParams(msg))
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be >= 0, got {}", self.alpha));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be >= 0, got {}", self.beta));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad(format!("rho must lie in (0, 1), got {}", self.rho));
        }
        if !(0.0..=1.0).contains(&self.q0) {
            return bad(format!("q0 must lie in [0, 1], got {}", self.q0));
        }
        if self.ants == 0 {
            return bad("ants must be positive".into());
        }
        if !(self.q > 0.0 && self.q.is_finite()) {
            return bad(format!("Q must be positive, got {}", self.q));
        }
        if !(self.t_fraction > 0.0 && self.t_fraction <= 1.0) {
            return bad(format!(
                "t_fraction must lie in (0, 1], got {}",
                self.t_fraction
            ));
        }
        if !(self.tau0 > 0.0 && self.tau0.is_finite()) {
            return bad(format!("tau0 must be positive, got {}", self.tau0));
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive".into());
        }
        if self.stagnation_window == 0 {
            return bad("stagnation_window must be positive".into());
        }
        Ok(())
    }
}

/// Pheromone level per edge, indexed like [`Roadmap::edges`].
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneTable {
    values: Vec<f64>,
}

impl PheromoneTable {
    pub fn uniform(roadmap: &Roadmap, tau0: f64) -> Self {
        Self {
            values: vec![tau0; roadmap.edge_count()],
        }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    #[inline]
    pub fn get(&self, edge: usize) -> f64 {
        self.values[edge]
    }

    /// Level on the edge joining `a` and `b`.
    pub fn between(&self, roadmap: &Roadmap, a: NodeId, b: NodeId) -> Option<f64> {
        roadmap.edge_index(a, b).map(|e| self.values[e])
    }

    pub fn set(&mut self, edge: usize, value: f64) {
        self.values[edge] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `alpha ln tau + beta ln eta` per edge, frozen for one iteration.
///
/// Working with logarithms keeps `tau^alpha eta^beta` representable for any
/// weights; the choice rule only depends on weight ratios.
#[derive(Debug, Clone)]
pub struct Desirability {
    log_weight: Vec<f64>,
}

impl Desirability {
    pub fn new(roadmap: &Roadmap, table: &PheromoneTable, alpha: f64, beta: f64) -> Self {
        let log_weight = roadmap
            .edges()
            .iter()
            .zip(table.values())
            .map(|(e, &tau)| {
                let pher = if alpha == 0.0 { 0.0 } else { alpha * tau.ln() };
                let vis = if beta == 0.0 {
                    0.0
                } else {
                    -beta * e.length.ln()
                };
                pher + vis
            })
            .collect();
        Self { log_weight }
    }

    #[inline]
    pub fn log_weight(&self, edge: usize) -> f64 {
        self.log_weight[edge]
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    node: NodeId,
    log_weight: f64,
}

fn feasible(
    roadmap: &Roadmap,
    desirability: &Desirability,
    current: NodeId,
    visited: &[bool],
    out: &mut Vec<Candidate>,
) {
    out.clear();
    out.extend(
        roadmap
            .neighbors(current)
            .iter()
            .filter(|nb| !visited[nb.node.index()])
            .map(|nb| Candidate {
                node: nb.node,
                log_weight: desirability.log_weight(nb.edge),
            }),
    );
}

/// Relative weights `exp(s_j - max s)`, in candidate order.
fn relative_weights(candidates: &[Candidate], out: &mut Vec<f64>) -> f64 {
    let top = candidates
        .iter()
        .map(|c| c.log_weight)
        .fold(f64::NEG_INFINITY, f64::max);
    out.clear();
    out.extend(candidates.iter().map(|c| (c.log_weight - top).exp()));
    out.iter().sum()
}

/// Probability of each unvisited neighbour of `current`, proportional to
/// `tau^alpha eta^beta`. `None` when every neighbour has been visited.
pub fn transition_probabilities(
    roadmap: &Roadmap,
    desirability: &Desirability,
    current: NodeId,
    visited: &[bool],
) -> Option<Vec<(NodeId, f64)>> {
    let mut candidates = Vec::new();
    feasible(roadmap, desirability, current, visited, &mut candidates);
    if candidates.is_empty() {
        return None;
    }
    let mut weights = Vec::new();
    let total = relative_weights(&candidates, &mut weights);
    Some(
        candidates
            .iter()
            .zip(&weights)
            .map(|(c, w)| (c.node, w / total))
            .collect(),
    )
}

fn greedy(candidates: &[Candidate]) -> NodeId {
    // candidates are in ascending id order; strict > keeps the smallest id
    let mut best = candidates[0];
    for c in &candidates[1..] {
        if c.log_weight > best.log_weight {
            best = *c;
        }
    }
    best.node
}

fn roulette(candidates: &[Candidate], weights: &[f64], total: f64, draw: f64) -> NodeId {
    let target = draw * total;
    let mut cumulative = 0.0;
    for (c, w) in candidates.iter().zip(weights) {
        cumulative += w;
        if target < cumulative {
            return c.node;
        }
    }
    candidates[candidates.len() - 1].node
}

/// Scratch buffers reused across the moves of one ant.
#[derive(Default)]
struct Scratch {
    candidates: Vec<Candidate>,
    weights: Vec<f64>,
}

fn choose_with<R: Rng + ?Sized>(
    scratch: &mut Scratch,
    roadmap: &Roadmap,
    desirability: &Desirability,
    current: NodeId,
    visited: &[bool],
    q0: f64,
    q: f64,
    rng: &mut R,
) -> Option<NodeId> {
    feasible(
        roadmap,
        desirability,
        current,
        visited,
        &mut scratch.candidates,
    );
    if scratch.candidates.is_empty() {
        return None;
    }
    if scratch.candidates.len() == 1 {
        return Some(scratch.candidates[0].node);
    }
    if q < q0 {
        let total = relative_weights(&scratch.candidates, &mut scratch.weights);
        let draw: f64 = rng.gen();
        Some(roulette(&scratch.candidates, &scratch.weights, total, draw))
    } else {
        Some(greedy(&scratch.candidates))
    }
}

/// Next node for an ant at `current`, given the pseudo-random draw `q`.
///
/// `q < q0` samples a neighbour by roulette wheel (one uniform draw from
/// `rng`, cumulative sums in ascending id order); otherwise the neighbour
/// maximising `tau^alpha eta^beta` is returned, ties to the smallest id.
/// `None` when no unvisited neighbour exists.
pub fn choose_next<R: Rng + ?Sized>(
    roadmap: &Roadmap,
    desirability: &Desirability,
    current: NodeId,
    visited: &[bool],
    params: &AsParams,
    q: f64,
    rng: &mut R,
) -> Option<NodeId> {
    let mut scratch = Scratch::default();
    choose_with(
        &mut scratch,
        roadmap,
        desirability,
        current,
        visited,
        params.q0,
        q,
        rng,
    )
}

/// Route built by one ant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub ant_index: usize,
    /// Nodes visited so far; ends at the destination iff `success`.
    pub route: PathResult,
    /// Edge indices along `route`.
    #[serde(skip)]
    pub edges: Vec<usize>,
    pub success: bool,
}

/// Random stream for ant `ant_index` in `iteration`: the ChaCha key comes
/// from `seed` and the stream id from `(iteration, ant_index)`, so results do
/// not depend on the order in which ants are scheduled.
pub fn ant_rng(seed: u64, iteration: usize, ant_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((iteration as u64) << 32) | (ant_index as u64 & 0xFFFF_FFFF));
    rng
}

pub fn construct_tour<R: Rng + ?Sized>(
    ant_index: usize,
    roadmap: &Roadmap,
    source: NodeId,
    destination: NodeId,
    desirability: &Desirability,
    params: &AsParams,
    rng: &mut R,
) -> Tour {
    let mut visited = vec![false; roadmap.node_count()];
    let mut scratch = Scratch::default();
    let mut path = vec![source];
    let mut edges = Vec::new();
    let mut length = 0.0;
    visited[source.index()] = true;
    let mut current = source;
    while current != destination {
        let q: f64 = rng.gen();
        let Some(next) = choose_with(
            &mut scratch,
            roadmap,
            desirability,
            current,
            &visited,
            params.q0,
            q,
            rng,
        ) else {
            break;
        };
        let edge = roadmap
            .edge_index(current, next)
            .expect("chosen node is a neighbour");
        length += roadmap.edge(edge).length;
        edges.push(edge);
        path.push(next);
        visited[next.index()] = true;
        current = next;
    }
    Tour {
        ant_index,
        success: current == destination,
        route: PathResult {
            hops: edges.len(),
            length,
            path,
        },
        edges,
    }
}

/// Multiplies every level by `1 - rho`, flooring at [`TAU_MIN`].
pub fn evaporate(table: &mut PheromoneTable, rho: f64) {
    let keep = 1.0 - rho;
    for v in &mut table.values {
        *v = (*v * keep).max(TAU_MIN);
    }
}

/// Adds the deposits of all successful tours, in ascending ant order.
/// Returns the time constant `T` used by the exponential rule, if any.
pub fn deposit(tours: &[Tour], table: &mut PheromoneTable, params: &AsParams) -> Option<f64> {
    let mut done: Vec<&Tour> = tours.iter().filter(|t| t.success).collect();
    if done.is_empty() {
        return None;
    }
    done.sort_by_key(|t| t.ant_index);
    match params.rule {
        DepositionRule::Uniform => {
            for tour in done {
                let amount = params.q / tour.route.length;
                for &e in &tour.edges {
                    table.values[e] += amount;
                }
            }
            None
        }
        DepositionRule::ExponentialGradient => {
            let mean_hops =
                done.iter().map(|t| t.route.hops as f64).sum::<f64>() / done.len() as f64;
            let time_constant = params.t_fraction * mean_hops;
            for tour in done {
                let amount = params.q / tour.route.length;
                for (s, &e) in tour.edges.iter().enumerate() {
                    table.values[e] += gradient_deposit(amount, (s + 1) as f64, time_constant);
                }
            }
            Some(time_constant)
        }
    }
}

/// `c (1 - e^{-s/T})`.
#[inline]
pub fn gradient_deposit(c: f64, s: f64, time_constant: f64) -> f64 {
    -c * (-s / time_constant).exp_m1()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    /// 1-based.
    pub iteration: usize,
    pub best_length_so_far: Option<f64>,
    /// Mean length of this iteration's successful tours.
    pub mean_length: Option<f64>,
    pub success_count: usize,
    /// `(mean_length - oracle) / oracle`.
    pub deviation: Option<f64>,
    /// `mean_length - oracle`.
    pub deviation_abs: Option<f64>,
    /// Time constant used by the exponential rule this iteration.
    pub time_constant: Option<f64>,
}

/// Stepwise Ant System run over a fixed instance.
pub struct Colony<'a> {
    roadmap: &'a Roadmap,
    source: NodeId,
    destination: NodeId,
    params: AsParams,
    oracle: PathResult,
    table: PheromoneTable,
    iteration: usize,
    best: Option<Tour>,
    last_improvement: Option<usize>,
}

impl<'a> Colony<'a> {
    pub fn new(
        roadmap: &'a Roadmap,
        source: NodeId,
        destination: NodeId,
        params: AsParams,
    ) -> Result<Self> {
        params.validate()?;
        let oracle = roadmap::dijkstra(roadmap, source, destination)?;
        Ok(Self {
            table: PheromoneTable::uniform(roadmap, params.tau0),
            roadmap,
            source,
            destination,
            params,
            oracle,
            iteration: 0,
            best: None,
            last_improvement: None,
        })
    }

    pub fn pheromones(&self) -> &PheromoneTable {
        &self.table
    }

    pub fn oracle(&self) -> &PathResult {
        &self.oracle
    }

    pub fn best(&self) -> Option<&Tour> {
        self.best.as_ref()
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Tours of the next iteration against the current (frozen) table.
    pub fn construct_tours(&self) -> Vec<Tour> {
        let iteration = self.iteration + 1;
        let desirability = Desirability::new(
            self.roadmap,
            &self.table,
            self.params.alpha,
            self.params.beta,
        );
        (0..self.params.ants)
            .into_par_iter()
            .map(|k| {
                let mut rng = ant_rng(self.params.seed, iteration, k);
                construct_tour(
                    k,
                    self.roadmap,
                    self.source,
                    self.destination,
                    &desirability,
                    &self.params,
                    &mut rng,
                )
            })
            .collect()
    }

    /// One iteration: construct, evaporate, deposit.
    pub fn step(&mut self) -> IterationStats {
        let tours = self.construct_tours();
        self.iteration += 1;
        evaporate(&mut self.table, self.params.rho);
        let time_constant = deposit(&tours, &mut self.table, &self.params);

        let oracle = self.oracle.length;
        let mut success_count = 0;
        let mut excess = 0.0;
        for tour in tours.iter().filter(|t| t.success) {
            success_count += 1;
            excess += tour.route.length - oracle;
            let improves = self
                .best
                .as_ref()
                .is_none_or(|b| tour.route.length < b.route.length);
            if improves {
                self.best = Some(tour.clone());
                self.last_improvement = Some(self.iteration);
            }
        }
        // mean excess over the optimum, exactly zero when every route is optimal
        let mean_excess = (success_count > 0).then(|| excess / success_count as f64);
        IterationStats {
            iteration: self.iteration,
            best_length_so_far: self.best.as_ref().map(|b| b.route.length),
            mean_length: mean_excess.map(|e| oracle + e),
            success_count,
            deviation: mean_excess.map(|e| e / oracle),
            deviation_abs: mean_excess,
            time_constant,
        }
    }

    /// True once the best length has not improved for a full stagnation window.
    pub fn has_converged(&self) -> bool {
        self.last_improvement
            .is_some_and(|last| self.iteration - last >= self.params.stagnation_window)
    }

    pub fn run(mut self) -> RunReport {
        let mut iterations = Vec::new();
        while self.iteration < self.params.max_iterations && !self.has_converged() {
            iterations.push(self.step());
        }
        RunReport {
            converged: self.has_converged(),
            convergence_iteration: self.last_improvement,
            params: self.params,
            source: self.source,
            destination: self.destination,
            oracle: self.oracle,
            iterations,
            best: self.best,
        }
    }
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub params: AsParams,
    pub source: NodeId,
    pub destination: NodeId,
    pub oracle: PathResult,
    pub iterations: Vec<IterationStats>,
    pub best: Option<Tour>,
    /// Iteration of the last improvement of the best length.
    pub convergence_iteration: Option<usize>,
    /// Whether the stagnation window elapsed before `max_iterations`.
    pub converged: bool,
}

impl RunReport {
    /// True when no ant reached the destination during the whole run.
    pub fn no_success(&self) -> bool {
        self.best.is_none()
    }

    pub fn best_length(&self) -> Option<f64> {
        self.best.as_ref().map(|t| t.route.length)
    }

    /// Deviation of the mean route length in the last iteration that had a
    /// successful ant.
    pub fn final_deviation(&self) -> Option<f64> {
        self.iterations.iter().rev().find_map(|s| s.deviation)
    }

    pub fn best_deviation(&self) -> Option<f64> {
        self.best_length()
            .map(|b| (b - self.oracle.length) / self.oracle.length)
    }

    /// Per-iteration CSV:
    /// `iteration,best_length,mean_length,success_count,deviation,deviation_abs`.
    /// Missing values are empty fields.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        fn opt(v: Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        writeln!(out, "{}", RUN_CSV_HEADER.join(","))?;
        for s in &self.iterations {
            let row = [
                s.iteration.to_string(),
                opt(s.best_length_so_far),
                opt(s.mean_length),
                s.success_count.to_string(),
                opt(s.deviation),
                opt(s.deviation_abs),
            ];
            debug_assert_eq!(row.len(), RUN_CSV_HEADER.len());
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

pub const RUN_CSV_HEADER: [&str; 6] = [
    "iteration",
    "best_length",
    "mean_length",
    "success_count",
    "deviation",
    "deviation_abs",
];

/// Runs the Ant System from `source` to `destination`.
pub fn run(
    roadmap: &Roadmap,
    source: NodeId,
    destination: NodeId,
    params: &AsParams,
) -> Result<RunReport> {
    Ok(Colony::new(roadmap, source, destination, params.clone())?.run())
}
