//! Acceptance criteria, one PASS/FAIL line each. The oracle gate runs first;
//! if any closed form disagrees with the spectral oracle, criteria 1 to 6
//! are reported as blocked.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bhcp::parallel;
use bhcp_core::benchmarks::{
    self, illposedness_demo, oracle_gate, pde_residual, run_case, BenchmarkProblem, CaseOutcome, CaseSpec,
    NoiseSpec, ProblemId, SolutionForm,
};
use bhcp_core::diffusivity::DiffusivityProfile;
use bhcp_core::grid::UniformGrid;
use bhcp_core::meyer::{detail_multiplier, projection_multiplier, scaling_hat, wavelet_hat_magnitude, MeyerLevel};
use bhcp_core::regularizer::{rate_function, rate_inverse_asymptotic, solve_at_level};
use bhcp_core::RealField;

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const TABLE_EPSILONS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
const TABLE_LEVELS: [u32; 5] = [2, 3, 4, 5, 6];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Self::new(false, format!("error: {e}"))
    }
}

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, title: &str, o: &Outcome) {
        if !o.pass {
            self.failures += 1;
        }
        println!("{id:<4} {} {title}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

/// Gain audit over every regularized run of criteria 1 to 6.
#[derive(Default)]
struct Audit {
    runs: usize,
    violations: Vec<String>,
}

impl Audit {
    fn case(&mut self, label: &str, c: &CaseOutcome) {
        self.runs += 1;
        if !c.stability_respected() {
            self.violations.push(format!("{label}: ln gain {} > bound {}", c.log_noise_gain, c.log_gain_bound));
        }
    }

    fn gain(&mut self, label: &str, log_gain: f64, bound: f64) {
        self.runs += 1;
        if log_gain > bound + 1e-9 {
            self.violations.push(format!("{label}: ln gain {log_gain} > bound {bound}"));
        }
    }
}

fn criterion9() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for id in ProblemId::ALL {
        match oracle_gate(id, SolutionForm::Corrected) {
            Ok(c) => {
                pass &= c.passed;
                notes.push(format!("Ex{} {:.1e}/{:.0e}", id.number(), c.worst_relative, c.tolerance));
            }
            Err(e) => return Outcome::error(e),
        }
    }
    // residual of the heat equation itself, away from kinks and the box boundary
    for id in ProblemId::ALL {
        let grid = match id {
            ProblemId::Sine => None,
            ProblemId::ExpL1 => Some(UniformGrid::cube(2, -10.0, 10.0, 512)),
            ProblemId::Gaussian => Some(UniformGrid::cube(2, -10.0, 10.0, 128)),
            _ => Some(UniformGrid::line(-10.0, 10.0, 1024)),
        };
        let problem = match grid {
            None => BenchmarkProblem::standard(id),
            Some(g) => g.and_then(|g| BenchmarkProblem::with_grid(id, g)),
        };
        let problem = match problem {
            Ok(p) => p,
            Err(e) => return Outcome::error(e),
        };
        let g = problem.grid();
        let mask: Vec<bool> = (0..g.len())
            .map(|f| id == ProblemId::Sine || g.point(f).iter().all(|v| (0.5..=9.5).contains(&v.abs())))
            .collect();
        let mut worst = 0.0f64;
        for t in [0.2, 0.5, 0.8] {
            let r = pde_residual(&problem, t, 1e-4, &mask).and_then(|r| Ok(r / problem.exact_solution(t)?.sup_norm()));
            match r {
                Ok(r) => worst = worst.max(r),
                Err(e) => return Outcome::error(e),
            }
        }
        pass &= worst <= 1e-4;
        notes.push(format!("res{} {:.1e}", id.number(), worst));
    }
    let mut caught = Vec::new();
    for id in ProblemId::ALL {
        if let Ok(c) = oracle_gate(id, SolutionForm::Printed) {
            if !c.passed {
                caught.push(format!("Ex{}", id.number()));
            }
        }
    }
    notes.push(format!("printed forms rejected: {}", caught.join(",")));
    Outcome::new(pass, notes.join("; "))
}

fn sine_problem() -> bhcp_core::Result<BenchmarkProblem> {
    BenchmarkProblem::standard(ProblemId::Sine)
}

fn criterion1(audit: &mut Audit) -> Outcome {
    let start = Instant::now();
    let res = sine_problem().and_then(|p| {
        run_case(&p, CaseSpec { level: MeyerLevel(3), noise: NoiseSpec::new(0.0, 0), t: 0.0 })
    });
    let elapsed = start.elapsed();
    match res {
        Ok(c) => {
            audit.case("C1", &c);
            let rel = c.report.relative;
            let pass = rel <= 1e-8 && elapsed < Duration::from_secs(1);
            Outcome::new(
                pass,
                format!("relative {rel:.3e} (limit 1e-8), ln max gain {:.1}, {}", c.solve.log_max_amplification, secs(elapsed)),
            )
        }
        Err(e) => Outcome::error(e),
    }
}

type Table = Vec<Vec<benchmarks::SweepCell>>;

fn table_sweeps(audit: &mut Audit) -> Result<(Table, Duration), String> {
    let p = sine_problem().map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    let mut slowest = Duration::ZERO;
    for seed in SEEDS {
        let start = Instant::now();
        let cells = parallel::run_sweep(&p, &TABLE_EPSILONS, &TABLE_LEVELS, 0.0, seed, None).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        for c in &cells {
            audit.case(&format!("C2 seed {seed} J={} eps={}", c.level.0, c.epsilon), &c.outcome);
        }
        out.push(cells);
    }
    Ok((out, slowest))
}

fn cell(sweep: &[benchmarks::SweepCell], level: u32, eps: f64) -> &benchmarks::SweepCell {
    sweep.iter().find(|c| c.level.0 == level && c.epsilon == eps).expect("cell present")
}

fn criterion2(table: &Table, slowest: Duration) -> Outcome {
    // (ε, relative limit, printed absolute error at J = 3)
    let targets = [(1e-3, 0.05, 0.0010), (1e-4, 0.02, 1.71e-4)];
    let mut pass = slowest < Duration::from_secs(10);
    let mut notes = Vec::new();
    for (eps, rel_limit, printed) in targets {
        let mut worst_rel = 0.0f64;
        let mut abs_range = (f64::INFINITY, 0.0f64);
        for sweep in table {
            let r = cell(sweep, 3, eps).outcome.report;
            worst_rel = worst_rel.max(r.relative);
            abs_range = (abs_range.0.min(r.absolute), abs_range.1.max(r.absolute));
            pass &= r.relative <= rel_limit && r.absolute <= 10.0 * printed && r.absolute >= printed / 10.0;
        }
        notes.push(format!(
            "eps={eps:e}: worst relative {worst_rel:.3e} (limit {rel_limit}), absolute {:.2e}..{:.2e} (printed {printed:e})",
            abs_range.0, abs_range.1
        ));
    }
    notes.push(format!("slowest 5x4 sweep {}", secs(slowest)));
    Outcome::new(pass, notes.join("; "))
}

fn criterion3(table: &Table) -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for level in TABLE_LEVELS {
        let mut inversions = 0;
        for sweep in table {
            let errs: Vec<f64> = TABLE_EPSILONS.iter().map(|&e| cell(sweep, level, e).outcome.report.relative).collect();
            inversions += errs.windows(2).filter(|w| w[1] > w[0] || w[1].is_nan()).count();
        }
        pass &= inversions <= 1;
        notes.push(format!("V{level}: {inversions} inversions"));
    }
    Outcome::new(pass, notes.join(", "))
}

fn criterion4(audit: &mut Audit) -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for level in [2, 3] {
        let res = DiffusivityProfile::affine(200.0, 1.0, benchmarks::HORIZON).and_then(|k| {
            let p = sine_problem()?.with_profile(k);
            run_case(&p, CaseSpec { level: MeyerLevel(level), noise: NoiseSpec::new(1e-4, SEEDS[0]), t: 0.0 })
        });
        match res {
            Ok(c) => {
                audit.case(&format!("C4 J={level}"), &c);
                pass &= c.report.relative <= 5e-2;
                notes.push(format!(
                    "J={level}: relative {:.3e}, ln max gain {:.0}{}",
                    c.report.relative,
                    c.solve.log_max_amplification,
                    if c.solve.saturated { " (saturated)" } else { "" }
                ));
            }
            Err(e) => return Outcome::error(e),
        }
    }
    notes.push("limit 5e-2".into());
    Outcome::new(pass, notes.join("; "))
}

fn criterion5(audit: &mut Audit) -> Outcome {
    let start = Instant::now();
    let res = BenchmarkProblem::standard(ProblemId::Gaussian).and_then(|p| {
        run_case(&p, CaseSpec { level: MeyerLevel(2), noise: NoiseSpec::new(1e-3, SEEDS[0]), t: 0.0 })
    });
    let elapsed = start.elapsed();
    match res {
        Ok(c) => {
            audit.case("C5", &c);
            let pass = c.report.relative <= 5e-2 && elapsed < Duration::from_secs(30);
            Outcome::new(
                pass,
                format!("relative {:.3e} (limit 5e-2), absolute {:.3e}, {}", c.report.relative, c.report.absolute, secs(elapsed)),
            )
        }
        Err(e) => Outcome::error(e),
    }
}

fn criterion6(audit: &mut Audit) -> Outcome {
    let ms = [4.0, 8.0, 16.0];
    let problem = match BenchmarkProblem::standard(ProblemId::Gaussian) {
        Ok(p) => p,
        Err(e) => return Outcome::error(e),
    };
    // largest level whose passband lies below every m
    let level = MeyerLevel((0..8).rev().find(|&j| MeyerLevel(j).passband_edge() < ms[0]).unwrap_or(0));
    let mut rows = Vec::new();
    for m in ms {
        match illposedness_demo(&problem, m, Some(level)) {
            Ok(r) => rows.push(r),
            Err(e) => return Outcome::error(e),
        }
        let pert = RealField::from_fn(problem.grid().clone(), |x| {
            (m * x.iter().map(|v| v * v).sum::<f64>().sqrt()).sin() / (m * m)
        });
        let gain = pert.and_then(|p| {
            let (out, rep) = solve_at_level(&p, 0.0, problem.profile(), level, false)?;
            Ok((out.l2_norm().ln() - p.l2_norm().ln(), rep.log_amplification_bound(problem.grid().dim())))
        });
        match gain {
            Ok((g, b)) => audit.gain(&format!("C6 m={m}"), g, b),
            Err(e) => return Outcome::error(e),
        }
    }
    let sol: Vec<f64> = rows.iter().map(|r| r.solution_error).collect();
    let increasing = sol.windows(2).all(|w| w[1] > w[0]);
    let inverse_square = rows.iter().all(|r| (r.data_error * r.m * r.m - 1.0).abs() <= 1e-3)
        && rows.windows(2).all(|w| w[1].data_error < w[0].data_error);
    let reg: Vec<f64> = rows.iter().map(|r| r.regularized_error.unwrap_or(f64::NAN)).collect();
    let reg_bounded = reg.iter().all(|&e| e <= 2.0 * reg[0]);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(",");
    Outcome::new(
        increasing && inverse_square && reg_bounded,
        format!(
            "unregularized error increasing={increasing} [{}]; data error ~1/m^2={inverse_square} [{}]; \
             regularized (J={}) within 2x={reg_bounded} [{}]",
            fmt(&sol),
            fmt(&rows.iter().map(|r| r.data_error).collect::<Vec<_>>()),
            level.0,
            fmt(&reg)
        ),
    )
}

fn criterion7() -> Outcome {
    let grids = [UniformGrid::line(-10.0, 10.0, 256), UniformGrid::cube(2, -10.0, 10.0, 128)];
    let mut checked = (0usize, 0usize);
    for grid in grids {
        let grid = match grid {
            Ok(g) => g,
            Err(e) => return Outcome::error(e),
        };
        for j in 0..=6 {
            let level = MeyerLevel(j);
            let p = projection_multiplier(&grid, level);
            let q = detail_multiplier(&grid, level);
            for flat in 0..grid.len() {
                let w = match grid.frequency_at(&grid.wave_vector(flat)) {
                    Ok(w) => w,
                    Err(e) => return Outcome::error(e),
                };
                if level.in_passband(&w) {
                    checked.0 += 1;
                    if p.gains()[flat] != 1.0 || q.gains()[flat] != 0.0 {
                        return Outcome::new(false, format!("J={j}: passband gain {} at {w:?}", p.gains()[flat]));
                    }
                }
                if MeyerLevel(j + 1).in_stopband(&w) {
                    checked.1 += 1;
                    if p.gains()[flat] != 0.0 || q.gains()[flat] != 0.0 {
                        return Outcome::new(false, format!("J={j}: stopband gain {} at {w:?}", p.gains()[flat]));
                    }
                }
            }
        }
    }
    let samples = 20_001;
    let mut worst = 0.0f64;
    for i in 0..samples {
        let w = 2.0 * PI / 3.0 + (2.0 * PI / 3.0) * i as f64 / (samples - 1) as f64;
        for w in [w, -w] {
            let (s, p) = (scaling_hat(w), wavelet_hat_magnitude(w));
            worst = worst.max((s * s + p * p - 1.0).abs());
        }
    }
    Outcome::new(
        worst <= 1e-12,
        format!("{} passband and {} stopband points exact; partition defect {worst:.1e} (limit 1e-12)", checked.0, checked.1),
    )
}

fn criterion8() -> Outcome {
    let pq = 1.0;
    let params = [(1.0, 1.0, 1.0), (2.0, 0.5, 1.0), (2.0, pq / 2.0, 1.0)];
    let ratio = |y: f64, (b, c, d): (f64, f64, f64)| rate_inverse_asymptotic(y, b, c, d).and_then(|x| rate_function(x, b, c, d)).map(|f| f / y);
    let mut pass = true;
    let mut notes = Vec::new();
    for p in params {
        match (ratio(1e-8, p), ratio(1e-16, p)) {
            (Ok(r8), Ok(r16)) => {
                pass &= (0.8..=1.2).contains(&r8) && (r16 - 1.0).abs() < (r8 - 1.0).abs();
                notes.push(format!("{p:?}: {r8:.6} -> {r16:.6}"));
            }
            (Err(e), _) | (_, Err(e)) => return Outcome::error(e),
        }
    }
    Outcome::new(pass, notes.join("; "))
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    let mut audit = Audit::default();

    let gate = criterion9();
    report.line("C9", "oracle gate and PDE residuals", &gate);
    if !gate.pass {
        println!("!!!! ORACLE GATE FAILED: closed-form solutions disagree with the spectral oracle; criteria 1-6 not evaluated");
        let blocked = Outcome::new(false, "blocked by the oracle gate".into());
        for (id, title) in [
            ("C1", "noise-free recovery"),
            ("C2", "table magnitudes"),
            ("C3", "monotone trend"),
            ("C4", "large-kappa stress"),
            ("C5", "2D gaussian"),
            ("C6", "ill-posedness demonstration"),
        ] {
            report.line(id, title, &blocked);
        }
    } else {
        report.line("C1", "noise-free recovery", &criterion1(&mut audit));
        match table_sweeps(&mut audit) {
            Ok((table, slowest)) => {
                report.line("C2", "table magnitudes", &criterion2(&table, slowest));
                report.line("C3", "monotone trend", &criterion3(&table));
            }
            Err(e) => {
                report.line("C2", "table magnitudes", &Outcome::error(&e));
                report.line("C3", "monotone trend", &Outcome::error(&e));
            }
        }
        report.line("C4", "large-kappa stress", &criterion4(&mut audit));
        report.line("C5", "2D gaussian", &criterion5(&mut audit));
        report.line("C6", "ill-posedness demonstration", &criterion6(&mut audit));
    }
    report.line("C7", "support exactness and partition", &criterion7());
    report.line("C8", "rate-function asymptotics", &criterion8());
    let c10 = Outcome::new(
        gate.pass && audit.violations.is_empty(),
        if audit.violations.is_empty() {
            format!("{} runs, zero violations", audit.runs)
        } else {
            format!("{} of {} runs violate: {}", audit.violations.len(), audit.runs, audit.violations.join("; "))
        },
    );
    report.line("C10", "stability-bound audit", &c10);

    println!("acceptance: {} of 10 criteria failed", report.failures);
    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
