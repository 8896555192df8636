//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on runtime errors.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::{
    compare, dynamics_table, resolve_endpoints, sweep, write_comparison_rows, write_sweep_csv, Arm,
    BenchError, Endpoints, ExperimentSpec, Result, RunSummary, SweepSpec,
};
use crate::advisor::{Advisor, CoefficientFile, SeriesKind};
use crate::dynamics::DepositionForm;
use crate::roadmap::{self, generate_roadmap, load_roadmap, save_roadmap, NodeId, Roadmap};
use crate::solver::{self, AsParams, DepositionRule};

#[derive(Debug, Parser)]
#[command(
    name = "ant-system",
    version,
    about = "Ant System shortest-path experiments"
)]
pub struct Cli {
    /// Base random seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Suppress progress and summary output.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random k-nearest-neighbour roadmap.
    Generate(GenerateArgs),
    /// Run the solver once.
    Solve(SolveArgs),
    /// Compare the uniform and exponential deposition rules across seeds.
    Compare(CompareArgs),
    /// Grid sweep over alpha and beta.
    Sweep(SweepArgs),
    /// Pheromone dynamics traces for one or more evaporation rates.
    Dynamics(DynamicsArgs),
    /// Instance features and recommended (alpha, beta).
    Recommend(RecommendArgs),
}

fn parse_area(s: &str) -> std::result::Result<(f64, f64), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WIDTHxHEIGHT, got {s:?}"))?;
    let w: f64 = w.trim().parse().map_err(|e| format!("width: {e}"))?;
    let h: f64 = h.trim().parse().map_err(|e| format!("height: {e}"))?;
    if w > 0.0 && h > 0.0 {
        Ok((w, h))
    } else {
        Err("area dimensions must be positive".into())
    }
}

fn parse_nodes(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < 2 {
        Err("a roadmap needs at least 2 nodes".into())
    } else {
        Ok(n)
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_parser = parse_nodes)]
    pub nodes: usize,
    #[arg(long, value_parser = parse_area, default_value = "300x300")]
    pub area: (f64, f64),
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    /// Output file; relative paths resolve against --out-dir.
    #[arg(long, default_value = "roadmap.rm")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Roadmap file to load.
    #[arg(long, conflicts_with_all = ["nodes", "map_seed"])]
    pub roadmap: Option<PathBuf>,
    /// Generate an instance with this many nodes instead of loading one.
    #[arg(long, value_parser = parse_nodes)]
    pub nodes: Option<usize>,
    #[arg(long, value_parser = parse_area, default_value = "300x300")]
    pub area: (f64, f64),
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    /// Seed for instance generation (defaults to --seed).
    #[arg(long)]
    pub map_seed: Option<u64>,
    /// Source node; defaults to one end of the farthest pair.
    #[arg(long, requires = "dest")]
    pub source: Option<usize>,
    /// Destination node.
    #[arg(long, requires = "source")]
    pub dest: Option<usize>,
}

impl InstanceArgs {
    fn load(&self, seed: u64) -> Result<Roadmap> {
        match (&self.roadmap, self.nodes) {
            (Some(path), _) => Ok(load_roadmap(path)?),
            (None, Some(n)) => Ok(generate_roadmap(
                n,
                self.area,
                self.k as usize,
                self.map_seed.unwrap_or(seed),
            )?),
            (None, None) => Err(BenchError::Usage(
                "either --roadmap <FILE> or --nodes <N> is required".into(),
            )),
        }
    }

    fn endpoints(&self) -> Endpoints {
        match (self.source, self.dest) {
            (Some(s), Some(d)) => Endpoints::Explicit(NodeId(s), NodeId(d)),
            _ => Endpoints::FarthestPair,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Uniform,
    Exponential,
}

impl From<RuleArg> for DepositionRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Uniform => DepositionRule::Uniform,
            RuleArg::Exponential => DepositionRule::ExponentialGradient,
        }
    }
}

/// Solver settings shared by all solver-driven commands.
#[derive(Debug, Args)]
pub struct ColonyArgs {
    #[arg(long, default_value_t = 0.1)]
    pub rho: f64,
    #[arg(long, default_value_t = 0.8)]
    pub q0: f64,
    #[arg(long, default_value_t = 25)]
    pub ants: usize,
    /// Deposition scale Q.
    #[arg(long = "deposit-scale", default_value_t = 100.0)]
    pub q: f64,
    #[arg(long, default_value_t = 0.2)]
    pub t_fraction: f64,
    #[arg(long, default_value_t = 0.1)]
    pub tau0: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 50)]
    pub stagnation_window: usize,
}

impl ColonyArgs {
    fn params(&self, rule: DepositionRule, alpha: f64, beta: f64, seed: u64) -> AsParams {
        AsParams {
            alpha,
            beta,
            rho: self.rho,
            q0: self.q0,
            ants: self.ants,
            q: self.q,
            rule,
            t_fraction: self.t_fraction,
            tau0: self.tau0,
            max_iterations: self.max_iterations,
            stagnation_window: self.stagnation_window,
            seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub colony: ColonyArgs,
    #[arg(long, value_enum, default_value = "exponential")]
    pub rule: RuleArg,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Defaults to 2.0 for the uniform rule and 3.5 for the exponential rule.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Take alpha and beta from the parameter surfaces (exponential rule only).
    #[arg(long, conflicts_with_all = ["alpha", "beta"])]
    pub recommended: bool,
    /// File name prefix for `<prefix>.csv` and `<prefix>.json`.
    #[arg(long, default_value = "run")]
    pub name: String,
    /// Include wall-clock time in the JSON summary (output is then not reproducible).
    #[arg(long)]
    pub record_timing: bool,
}

/// Seed list given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedList(pub Vec<u64>);

fn parse_seeds(s: &str) -> std::result::Result<SeedList, String> {
    parse_seed_values(s).map(SeedList)
}

fn parse_seed_values(s: &str) -> std::result::Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.parse().map_err(|e| format!("{e}"))?;
        let b: u64 = b.parse().map_err(|e| format!("{e}"))?;
        if b <= a {
            return Err(format!("empty seed range {s:?}"));
        }
        return Ok((a..b).collect());
    }
    s.split(',')
        .map(|p| p.trim().parse::<u64>().map_err(|e| format!("{p:?}: {e}")))
        .collect()
}

#[derive(Debug, Args)]
pub struct SeedArgs {
    /// Explicit seeds: `1,2,3` or a half-open range `0..30`.
    #[arg(long, value_parser = parse_seeds)]
    pub seeds: Option<SeedList>,
    /// Number of consecutive seeds starting at --seed.
    #[arg(long, conflicts_with = "seeds")]
    pub seed_count: Option<u64>,
}

impl SeedArgs {
    fn resolve(&self, base: u64, default_count: u64) -> Vec<u64> {
        match &self.seeds {
            Some(s) => s.0.clone(),
            None => {
                let n = self.seed_count.unwrap_or(default_count);
                (0..n).map(|i| base.wrapping_add(i)).collect()
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub colony: ColonyArgs,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[arg(long, default_value_t = 1.0)]
    pub uniform_alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    pub uniform_beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub exp_alpha: f64,
    #[arg(long, default_value_t = 3.8)]
    pub exp_beta: f64,
    #[arg(long, default_value = "compare")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub colony: ColonyArgs,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1.0,1.5")]
    pub alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2.0,3.0,3.5,4.0")]
    pub betas: Vec<f64>,
    #[arg(long, value_enum, default_value = "exponential")]
    pub rule: RuleArg,
    /// Run grids larger than 10^4 cells.
    #[arg(long)]
    pub force: bool,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Constant,
    Exponential,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    /// Comma-separated evaporation rates.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,0.9")]
    pub rho: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub tau0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_sum: f64,
    /// Time constant of the exponential deposition.
    #[arg(long = "T", default_value_t = 5.0)]
    pub time_constant: f64,
    #[arg(long, value_enum, default_value = "constant")]
    pub form: FormArg,
    #[arg(long, default_value_t = 100)]
    pub steps: u64,
    /// Sample the continuous closed form instead of iterating the update.
    #[arg(long)]
    pub closed_form: bool,
    #[arg(long, default_value = "dynamics.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    #[arg(long)]
    pub roadmap: PathBuf,
    /// Coefficient file for the alpha surface.
    #[arg(long)]
    pub alpha_surface: Option<PathBuf>,
    /// Coefficient file for the beta surface.
    #[arg(long)]
    pub beta_surface: Option<PathBuf>,
}

struct Ctx {
    out_dir: PathBuf,
    quiet: bool,
    seed: u64,
}

impl Ctx {
    fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.out_dir.join(p)
        }
    }

    fn create(&self, p: &Path) -> Result<BufWriter<File>> {
        let path = self.path(p);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        Ok(BufWriter::new(File::create(path)?))
    }

    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }

    fn warn(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("warning: {}", msg.as_ref());
        }
    }
}

fn endpoints_for(roadmap: &Roadmap, args: &InstanceArgs) -> Result<(NodeId, NodeId)> {
    resolve_endpoints(roadmap, args.endpoints())
}

fn cmd_generate(ctx: &Ctx, args: &GenerateArgs) -> Result<()> {
    let roadmap = generate_roadmap(args.nodes, args.area, args.k as usize, ctx.seed)?;
    let path = ctx.path(&args.out);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    save_roadmap(&roadmap, &path)?;
    ctx.say(format!(
        "wrote {} ({} nodes, {} edges)",
        path.display(),
        roadmap.node_count(),
        roadmap.edge_count()
    ));
    Ok(())
}

fn cmd_solve(ctx: &Ctx, args: &SolveArgs) -> Result<()> {
    let roadmap = args.instance.load(ctx.seed)?;
    let (source, destination) = endpoints_for(&roadmap, &args.instance)?;
    let rule = DepositionRule::from(args.rule);
    let (alpha, beta) = if args.recommended {
        if rule != DepositionRule::ExponentialGradient {
            return Err(BenchError::Usage(
                "--recommended applies to the exponential rule".into(),
            ));
        }
        let rec = Advisor::default().recommend(&roadmap);
        ctx.say(format!(
            "recommended alpha = {}, beta = {}",
            rec.alpha, rec.beta
        ));
        (rec.alpha, rec.beta)
    } else {
        let default_beta = match rule {
            DepositionRule::Uniform => 2.0,
            DepositionRule::ExponentialGradient => 3.5,
        };
        (args.alpha, args.beta.unwrap_or(default_beta))
    };
    let params = args.colony.params(rule, alpha, beta, ctx.seed);
    params
        .validate()
        .map_err(|e| BenchError::Usage(e.to_string()))?;

    let started = Instant::now();
    let report = solver::run(&roadmap, source, destination, &params)?;
    let wall = args
        .record_timing
        .then(|| started.elapsed().as_millis() as u64);

    let mut csv = ctx.create(Path::new(&format!("{}.csv", args.name)))?;
    report.write_csv(&mut csv)?;
    csv.flush()?;
    let summary = RunSummary::new(&report, wall);
    let mut json = ctx.create(Path::new(&format!("{}.json", args.name)))?;
    serde_json::to_writer_pretty(&mut json, &summary)?;
    writeln!(json)?;
    json.flush()?;

    ctx.say(format!(
        "{source} -> {destination}: oracle length {}, best found {}",
        report.oracle.length,
        report.best_length().map_or_else(
            || "none (no ant reached the destination)".into(),
            |b| b.to_string()
        )
    ));
    if report.no_success() {
        ctx.warn("no ant reached the destination");
    }
    Ok(())
}

fn cmd_compare(ctx: &Ctx, args: &CompareArgs) -> Result<()> {
    let roadmap = args.instance.load(ctx.seed)?;
    let seeds = args.seeds.resolve(ctx.seed, 30);
    if seeds.is_empty() {
        return Err(BenchError::Usage("at least one seed is required".into()));
    }
    let arms = [
        Arm {
            name: "uniform".into(),
            params: args.colony.params(
                DepositionRule::Uniform,
                args.uniform_alpha,
                args.uniform_beta,
                0,
            ),
        },
        Arm {
            name: "exponential".into(),
            params: args.colony.params(
                DepositionRule::ExponentialGradient,
                args.exp_alpha,
                args.exp_beta,
                0,
            ),
        },
    ];
    for arm in &arms {
        arm.params
            .validate()
            .map_err(|e| BenchError::Usage(format!("{} arm: {e}", arm.name)))?;
    }
    let spec = ExperimentSpec {
        arms,
        seeds,
        endpoints: args.instance.endpoints(),
    };
    let report = match compare(&roadmap, &spec) {
        Ok(r) => r,
        Err(failure) => {
            if !failure.partial.is_empty() {
                let name = format!("{}.partial.csv", args.name);
                let mut out = ctx.create(Path::new(&name))?;
                write_comparison_rows(&failure.partial, &spec.arms, f64::NAN, &mut out)?;
                out.flush()?;
                ctx.warn(format!("partial results written to {name}"));
            }
            return Err(failure.error);
        }
    };
    for w in &report.warnings {
        ctx.warn(w);
    }
    let mut csv = ctx.create(Path::new(&format!("{}.csv", args.name)))?;
    report.write_csv(&mut csv)?;
    csv.flush()?;
    let mut json = ctx.create(Path::new(&format!("{}.json", args.name)))?;
    serde_json::to_writer_pretty(&mut json, &report)?;
    writeln!(json)?;
    json.flush()?;

    for agg in &report.aggregates {
        ctx.say(format!(
            "{:<12} mean deviation {:?}, median convergence {:?}, failed runs {}",
            agg.name, agg.mean_deviation, agg.median_convergence, agg.failed_runs
        ));
    }
    ctx.say(format!(
        "deviation wins: uniform {} / exponential {} / ties {}",
        report.deviation.wins[0], report.deviation.wins[1], report.deviation.ties
    ));
    ctx.say(format!(
        "convergence wins: uniform {} / exponential {} / ties {}",
        report.convergence.wins[0], report.convergence.wins[1], report.convergence.ties
    ));
    Ok(())
}

fn cmd_sweep(ctx: &Ctx, args: &SweepArgs) -> Result<()> {
    let roadmap = args.instance.load(ctx.seed)?;
    let base = args.colony.params(args.rule.into(), 1.0, 1.0, 0);
    let spec = SweepSpec {
        alphas: args.alphas.clone(),
        betas: args.betas.clone(),
        seeds: args.seeds.resolve(ctx.seed, 10),
        base,
        endpoints: args.instance.endpoints(),
        force: args.force,
    };
    let cells = sweep(&roadmap, &spec)?;
    let mut out = ctx.create(&args.out)?;
    write_sweep_csv(&cells, &mut out)?;
    out.flush()?;
    ctx.say(format!(
        "wrote {} ({} cells)",
        ctx.path(&args.out).display(),
        cells.len()
    ));
    Ok(())
}

fn cmd_dynamics(ctx: &Ctx, args: &DynamicsArgs) -> Result<()> {
    let form = match args.form {
        FormArg::Constant => DepositionForm::Constant,
        FormArg::Exponential => DepositionForm::Exponential {
            time_constant: args.time_constant,
        },
    };
    let table = dynamics_table(
        &args.rho,
        args.tau0,
        args.c_sum,
        form,
        args.steps,
        args.closed_form,
    )?;
    let mut out = ctx.create(&args.out)?;
    table.write_csv(&mut out)?;
    out.flush()?;
    ctx.say(format!("wrote {}", ctx.path(&args.out).display()));
    Ok(())
}

fn load_surface(path: &Path, expected: SeriesKind) -> Result<CoefficientFile> {
    let text = fs::read_to_string(path)?;
    let file: CoefficientFile = text
        .parse()
        .map_err(|e| BenchError::Other(format!("{}: {e}", path.display())))?;
    if file.kind != expected {
        return Err(BenchError::Other(format!(
            "{}: expected a {expected} series, found {}",
            path.display(),
            file.kind
        )));
    }
    Ok(file)
}

fn cmd_recommend(ctx: &Ctx, args: &RecommendArgs) -> Result<()> {
    let roadmap = load_roadmap(&args.roadmap)?;
    let mut advisor = Advisor::default();
    if let Some(p) = &args.alpha_surface {
        advisor.alpha_surface = load_surface(p, SeriesKind::Sigmoid)?.into_sigmoid();
    }
    if let Some(p) = &args.beta_surface {
        advisor.beta_surface = load_surface(p, SeriesKind::Cosine)?.into_cosine();
    }
    let rec = advisor.recommend(&roadmap);
    let f = rec.features;
    println!(
        "n = {} (area {}x{}, density {})",
        f.n,
        f.width,
        f.height,
        f.density()
    );
    println!("sigma_v = {}", f.sigma_v);
    println!(
        "exponential rule: alpha = {}, beta = {}{}",
        rec.alpha,
        rec.beta,
        if rec.clamped {
            format!(" (clamped from {}, {})", rec.raw_alpha, rec.raw_beta)
        } else {
            String::new()
        }
    );
    let (ua, ub) = advisor.uniform_baseline();
    println!("uniform rule: alpha = {ua}, beta = {ub}");
    if rec.input_clamped {
        ctx.warn("features lie outside the surface input ranges and were clamped");
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    let ctx = Ctx {
        out_dir: cli.out_dir.clone(),
        quiet: cli.quiet,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Generate(a) => cmd_generate(&ctx, a),
        Command::Solve(a) => cmd_solve(&ctx, a),
        Command::Compare(a) => cmd_compare(&ctx, a),
        Command::Sweep(a) => cmd_sweep(&ctx, a),
        Command::Dynamics(a) => cmd_dynamics(&ctx, a),
        Command::Recommend(a) => cmd_recommend(&ctx, a),
    }
}

fn exit_code(err: &BenchError) -> u8 {
    match err {
        BenchError::Usage(_) => 2,
        BenchError::Roadmap(roadmap::RoadmapError::InvalidArgument(_)) => 2,
        _ => 1,
    }
}

/// Parses `args` and runs the selected command.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
