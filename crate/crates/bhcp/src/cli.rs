//! Subcommands of the `bhcp` binary.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use bhcp_core::benchmarks::{self, BenchmarkProblem, NoiseSpec, ProblemId};
use bhcp_core::diffusivity::{DiffusivityProfile, MuSource};
use bhcp_core::grid::{Axis, UniformGrid};
use bhcp_core::regularizer::{regularized_solve, select_level, RegularizationConfig, SolveReport};
use bhcp_core::RealField;
use clap::{Args, Parser, Subcommand};

use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::{field_file, kappa, parallel};

#[derive(Debug, Parser)]
#[command(name = "bhcp", version, about = "Meyer-wavelet regularization of backward heat conduction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reconstruct one benchmark problem from noisy final data.
    Demo(DemoArgs),
    /// Error table over noise levels and resolution levels.
    Sweep(SweepArgs),
    /// Unregularized reconstruction under high-frequency data perturbations.
    Illposed(IllposedArgs),
    /// Reconstruct the initial state from a field file.
    Solve(SolveArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Benchmark problem number.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=5))]
    pub example: u32,
    /// Diffusivity: affine:<s>,<i> | rational100exp | file:<path>.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    /// Final time.
    #[arg(long = "T")]
    pub horizon: Option<f64>,
    /// Points per axis, `N` or `N,N`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Domain box, `a,b` or `a,b,a,b`.
    #[arg(long = "box", allow_hyphen_values = true)]
    pub domain: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Smoothness gap p − q.
    #[arg(long, default_value_t = 0.0)]
    pub pq: f64,
    /// A-priori bound M on the initial state.
    #[arg(long = "bigM", default_value_t = 1.0)]
    pub big_m: f64,
    /// Fixed resolution level; skips the selection rule.
    #[arg(long = "J")]
    pub level: Option<u32>,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Noise amplitude ε.
    #[arg(long, default_value_t = 1e-4)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Noise bound δ; defaults to the measured L² size of the noise.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Reconstruction time.
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3,1e-4")]
    pub epsilons: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
    pub levels: Vec<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IllposedArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Perturbation frequencies.
    #[arg(long = "m", value_delimiter = ',', default_value = "4,8,16")]
    pub m: Vec<String>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "rational100exp", allow_hyphen_values = true)]
    pub kappa: String,
    #[arg(long = "T", default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub delta: f64,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Demo(a) => demo(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Illposed(a) => illposed(&a),
        Command::Solve(a) => solve(&a),
    }
}

fn numbers(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{what}: bad number `{v}`"))))
        .collect()
}

fn build_grid(id: ProblemId, args: &ProblemArgs) -> Result<UniformGrid> {
    let dim = id.default_dim();
    let counts: Vec<usize> = match &args.grid {
        Some(g) => g
            .split(',')
            .map(|v| v.trim().parse().map_err(|_| CliError::Usage(format!("--grid: bad count `{v}`"))))
            .collect::<Result<_>>()?,
        None => vec![256],
    };
    let bounds = match &args.domain {
        Some(b) => numbers(b, "--box")?,
        None if id == ProblemId::Sine => vec![0.0, 2.0 * PI],
        None => vec![-10.0, 10.0],
    };
    if !(counts.len() == 1 || counts.len() == dim) {
        return Err(CliError::Usage(format!("--grid needs 1 or {dim} counts for example {}", id.number())));
    }
    if !(bounds.len() == 2 || bounds.len() == 2 * dim) {
        return Err(CliError::Usage(format!("--box needs 2 or {} numbers for example {}", 2 * dim, id.number())));
    }
    let axes = (0..dim)
        .map(|i| {
            let n = counts[if counts.len() == 1 { 0 } else { i }];
            let j = if bounds.len() == 2 { 0 } else { 2 * i };
            Axis::new(bounds[j], bounds[j + 1], n)
        })
        .collect();
    Ok(UniformGrid::new(axes)?)
}

fn build_problem(args: &ProblemArgs) -> Result<BenchmarkProblem> {
    let id = ProblemId::from_number(args.example)
        .ok_or_else(|| CliError::Usage(format!("unknown example {}", args.example)))?;
    let problem = BenchmarkProblem::with_grid(id, build_grid(id, args)?)?;
    let horizon = args.horizon.unwrap_or(benchmarks::HORIZON);
    let profile = match (&args.kappa, id) {
        (Some(spec), _) => kappa::parse_profile(spec, horizon)?,
        (None, _) if args.horizon.is_none() => return Ok(problem),
        (None, ProblemId::Sine) => DiffusivityProfile::affine(2.0, 1.0, horizon)?,
        (None, _) => DiffusivityProfile::rational_100_exp(horizon)?,
    };
    Ok(problem.with_profile(profile))
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_text(path: PathBuf, text: &str) -> Result<()> {
    fs::write(&path, text).map_err(|e| CliError::io(path, e))
}

fn describe_problem(m: &mut RunManifest, args: &ProblemArgs, problem: &BenchmarkProblem) {
    let grid = problem.grid();
    let counts: Vec<String> = grid.axes().iter().map(|a| a.count.to_string()).collect();
    let bounds: Vec<String> = grid.axes().iter().flat_map(|a| [a.lower.to_string(), a.upper.to_string()]).collect();
    m.set("example", args.example)
        .set("grid", counts.join(","))
        .set("box", bounds.join(","))
        .set("kappa", args.kappa.as_deref().unwrap_or("default"))
        .set("T", problem.horizon());
}

fn solve_report_text(report: &SolveReport, level_rule: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "J={}", report.level_used.0);
    let _ = writeln!(out, "level_rule={level_rule}");
    let _ = writeln!(out, "mu={}", report.mu);
    let _ = writeln!(out, "max_amplification={}", report.max_amplification);
    let _ = writeln!(out, "log_max_amplification={}", report.log_max_amplification);
    let _ = writeln!(out, "clamped={}", report.clamped);
    let _ = writeln!(out, "saturated={}", report.saturated);
    let _ = writeln!(out, "passband_truncated={}", report.passband_truncated);
    out
}

fn regularization(config: &ConfigArgs, delta: f64) -> RegularizationConfig {
    RegularizationConfig {
        delta,
        p_minus_q: config.pq,
        bound_m: config.big_m,
        manual_level: config.level,
        ..RegularizationConfig::default()
    }
}

fn level_rule(config: &ConfigArgs) -> &'static str {
    if config.level.is_some() {
        "manual"
    } else {
        "selected"
    }
}

pub fn demo(args: &DemoArgs) -> Result<()> {
    let problem = build_problem(&args.problem)?;
    let clean = problem.final_data()?;
    let noisy = benchmarks::add_noise(&clean, NoiseSpec::new(args.epsilon, args.seed))?;
    let delta = match args.delta {
        Some(d) => d,
        None if args.epsilon == 0.0 => f64::EPSILON * clean.l2_norm(),
        None => benchmarks::measured_delta(&noisy, &clean)?,
    };
    let cfg = regularization(&args.config, delta);
    let (recon, solve) = regularized_solve(&noisy, args.t, problem.profile(), &cfg)?;
    let exact = problem.exact_solution(args.t)?;
    let report = benchmarks::error_report_masked(&recon, &exact, problem.report_mask())?;

    prepare_out(&args.out)?;
    let grid = problem.grid();
    let path = args.out.join("fields.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::csv(&path, e))?;
    let mut header: Vec<String> = (0..grid.dim()).map(|i| format!("x{i}")).collect();
    header.extend(["exact", "noisy", "reconstruction", "error"].map(String::from));
    w.write_record(&header).map_err(|e| CliError::csv(&path, e))?;
    for i in 0..grid.len() {
        let (e, r) = (exact.values()[i], recon.values()[i]);
        let mut row: Vec<String> = grid.point(i).iter().map(f64::to_string).collect();
        row.extend([e, noisy.values()[i], r, r - e].map(|v| v.to_string()));
        w.write_record(&row).map_err(|e| CliError::csv(&path, e))?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;

    let mut text = format!("absolute={}\nrelative={}\ndelta={delta}\n", report.absolute, report.relative);
    text.push_str(&solve_report_text(&solve, level_rule(&args.config)));
    write_text(args.out.join("report.txt"), &text)?;

    let mut m = RunManifest::new("demo");
    describe_problem(&mut m, &args.problem, &problem);
    m.set("epsilon", args.epsilon)
        .set("seed", args.seed)
        .set("pq", args.config.pq)
        .set("bigM", args.config.big_m)
        .set("delta", delta)
        .set("J", solve.level_used.0)
        .set("level_rule", level_rule(&args.config))
        .set("t", args.t)
        .stamp();
    m.write(&args.out)?;

    println!("relative error: {}", report.relative);
    println!("absolute error: {}", report.absolute);
    println!("level: J={}", solve.level_used.0);
    Ok(())
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let problem = build_problem(&args.problem)?;
    let cells = parallel::run_sweep(&problem, &args.epsilons, &args.levels, args.t, args.seed, parallel::thread_cap()?)?;
    prepare_out(&args.out)?;
    let path = args.out.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::csv(&path, e))?;
    w.write_record(["space", "epsilon", "absolute", "relative"]).map_err(|e| CliError::csv(&path, e))?;
    for c in &cells {
        let r = c.outcome.report;
        w.write_record([format!("V{}", c.level.0), c.epsilon.to_string(), r.absolute.to_string(), r.relative.to_string()])
            .map_err(|e| CliError::csv(&path, e))?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;

    let list = |v: Vec<String>| v.join(",");
    let mut m = RunManifest::new("sweep");
    describe_problem(&mut m, &args.problem, &problem);
    m.set("epsilon", list(args.epsilons.iter().map(f64::to_string).collect()))
        .set("J", list(args.levels.iter().map(u32::to_string).collect()))
        .set("seed", args.seed)
        .set("t", args.t)
        .stamp();
    m.write(&args.out)?;
    println!("{} cells written to {}", cells.len(), path.display());
    Ok(())
}

pub fn illposed(args: &IllposedArgs) -> Result<()> {
    let ms: Vec<f64> = args
        .m
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("--m: bad number `{s}`"))))
        .collect::<Result<_>>()?;
    if ms.is_empty() {
        return Err(CliError::Usage("--m needs at least one frequency".into()));
    }
    let problem = build_problem(&args.problem)?;
    let rows = ms
        .iter()
        .map(|&m| benchmarks::illposedness_demo(&problem, m, None))
        .collect::<bhcp_core::Result<Vec<_>>>()?;
    prepare_out(&args.out)?;
    let path = args.out.join("illposed.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::csv(&path, e))?;
    w.write_record(["m", "data_error", "solution_error", "ratio_bound"]).map_err(|e| CliError::csv(&path, e))?;
    for r in &rows {
        w.write_record([r.m, r.data_error, r.solution_error, r.ratio_bound].map(|v| v.to_string()))
            .map_err(|e| CliError::csv(&path, e))?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;

    let mut m = RunManifest::new("illposed");
    describe_problem(&mut m, &args.problem, &problem);
    m.set("m", ms.iter().map(f64::to_string).collect::<Vec<_>>().join(",")).set("t", 0.0).stamp();
    m.write(&args.out)?;
    println!("{} rows written to {}", rows.len(), path.display());
    Ok(())
}

pub fn solve(args: &SolveArgs) -> Result<()> {
    let data: RealField = field_file::read(&args.input)?;
    let profile = kappa::parse_profile(&args.kappa, args.horizon)?;
    let cfg = regularization(&args.config, args.delta);
    let choice = match cfg.manual_level {
        Some(_) => select_level(&cfg, f64::NAN)?,
        None => select_level(&cfg, profile.mu_to_horizon(0.0)?.value)?,
    };
    let (recon, report) = regularized_solve(&data, args.t, &profile, &cfg)?;
    prepare_out(&args.out)?;
    field_file::write(&args.out.join("reconstruction.field"), &recon)?;
    let mut text = format!("log_selection_argument={}\n", choice.log_argument);
    text.push_str(&solve_report_text(&report, level_rule(&args.config)));
    write_text(args.out.join("report.txt"), &text)?;

    let mut m = RunManifest::new("solve");
    m.set("input", args.input.display())
        .set("kappa", &args.kappa)
        .set("T", args.horizon)
        .set("delta", args.delta)
        .set("pq", args.config.pq)
        .set("bigM", args.config.big_m)
        .set("J", report.level_used.0)
        .set("level_rule", level_rule(&args.config))
        .set("t", args.t)
        .stamp();
    m.write(&args.out)?;
    println!("J={} written to {}", report.level_used.0, args.out.join("reconstruction.field").display());
    Ok(())
}
