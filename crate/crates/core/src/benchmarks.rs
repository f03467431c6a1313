//! Analytical test problems, noise injection, error metrics and the
//! experiment drivers built on them.
//!
//! Every closed form here is validated against [`spectral_oracle_forward`],
//! an independent forward heat solver; [`oracle_gate`] runs that check and
//! also accepts the uncorrected printed forms so a regression to them fails
//! loudly.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::diffusivity::{DiffusivityProfile, MuSource};
use crate::error::{Error, Result};
use crate::field::{forward_transform, inverse_transform, RealField};
use crate::grid::UniformGrid;
use crate::meyer::MeyerLevel;
use crate::regularizer::{forward_multiplier, solve_at_level, unregularized_solve, SolveReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    /// `sin x` on `[0, π]`, smooth final data.
    Sine,
    /// `e^{−|x|}` initial state with a kink at the origin.
    ExpAbs,
    /// Indicator of `[−5, 5]` as initial state.
    BoxPulse,
    /// Gaussian in `n` dimensions.
    Gaussian,
    /// `e^{−‖x‖₁}`, kinked along every coordinate hyperplane.
    ExpL1,
}

impl ProblemId {
    pub const ALL: [ProblemId; 5] =
        [ProblemId::Sine, ProblemId::ExpAbs, ProblemId::BoxPulse, ProblemId::Gaussian, ProblemId::ExpL1];

    pub fn from_number(n: u32) -> Option<Self> {
        Self::ALL.get((n as usize).wrapping_sub(1)).copied()
    }

    pub fn number(self) -> u32 {
        Self::ALL.iter().position(|&p| p == self).unwrap() as u32 + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Sine => "sine",
            ProblemId::ExpAbs => "exp-abs",
            ProblemId::BoxPulse => "box",
            ProblemId::Gaussian => "gaussian",
            ProblemId::ExpL1 => "exp-l1",
        }
    }

    /// Dimension of the standard instance.
    pub fn default_dim(self) -> usize {
        match self {
            ProblemId::Gaussian | ProblemId::ExpL1 => 2,
            _ => 1,
        }
    }
}

/// Which closed form to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionForm {
    /// Forms that satisfy the heat equation.
    Corrected,
    /// Forms as originally published, kept as a negative control.
    Printed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkProblem {
    id: ProblemId,
    grid: UniformGrid,
    profile: DiffusivityProfile,
    report_mask: Vec<bool>,
}

pub const HORIZON: f64 = 1.0;

fn mask_where<F: Fn(&[f64]) -> bool>(grid: &UniformGrid, f: F) -> Vec<bool> {
    let mut out = Vec::with_capacity(grid.len());
    grid.sample(|x| {
        out.push(f(x));
        0.0
    });
    out
}

impl BenchmarkProblem {
    /// The standard instance: `[0, 2π)` with 256 points for the sine problem,
    /// `[−10, 10]ⁿ` with 256 points per axis otherwise.
    pub fn standard(id: ProblemId) -> Result<Self> {
        let grid = match id {
            ProblemId::Sine => UniformGrid::line(0.0, 2.0 * PI, 256)?,
            _ => UniformGrid::cube(id.default_dim(), -10.0, 10.0, 256)?,
        };
        Self::with_grid(id, grid)
    }

    /// A problem on a caller-chosen grid with its standard diffusivity.
    pub fn with_grid(id: ProblemId, grid: UniformGrid) -> Result<Self> {
        let profile = match id {
            ProblemId::Sine => DiffusivityProfile::affine(2.0, 1.0, HORIZON)?,
            _ => DiffusivityProfile::rational_100_exp(HORIZON)?,
        };
        let report_mask = match id {
            ProblemId::Sine => mask_where(&grid, |x| x[0] <= PI),
            ProblemId::BoxPulse => mask_where(&grid, |x| x.iter().all(|v| v.abs() <= 5.0)),
            _ => alloc::vec![true; grid.len()],
        };
        Ok(Self { id, grid, profile, report_mask })
    }

    pub fn with_profile(mut self, profile: DiffusivityProfile) -> Self {
        self.profile = profile;
        self
    }

    pub fn id(&self) -> ProblemId {
        self.id
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn profile(&self) -> &DiffusivityProfile {
        &self.profile
    }

    pub fn horizon(&self) -> f64 {
        self.profile.horizon()
    }

    /// Samples where errors are reported.
    pub fn report_mask(&self) -> &[bool] {
        &self.report_mask
    }

    pub fn exact_solution(&self, t: f64) -> Result<RealField> {
        self.solution(t, SolutionForm::Corrected)
    }

    pub fn printed_solution(&self, t: f64) -> Result<RealField> {
        self.solution(t, SolutionForm::Printed)
    }

    /// Final data `u(·, T)`.
    pub fn final_data(&self) -> Result<RealField> {
        self.exact_solution(self.horizon())
    }

    pub fn solution(&self, t: f64, form: SolutionForm) -> Result<RealField> {
        // elapsed diffusion time since 0, and remaining until T
        let elapsed = self.profile.mu(0.0, t)?.value;
        let remaining = self.profile.mu_to_horizon(t)?.value;
        let n = self.grid.dim() as f64;
        let id = self.id;
        RealField::from_fn(self.grid.clone(), |x| match (id, form) {
            (ProblemId::Sine, SolutionForm::Corrected) => libm::exp(remaining) * libm::sin(x[0]),
            (ProblemId::Sine, SolutionForm::Printed) => libm::exp(elapsed - 2.0) * libm::sin(x[0]),
            (ProblemId::ExpAbs, SolutionForm::Corrected) => heat_exp_abs(x[0], elapsed),
            (ProblemId::ExpAbs, SolutionForm::Printed) => libm::exp(elapsed - x[0].abs()),
            (ProblemId::BoxPulse, _) => heat_box(x[0], elapsed),
            (ProblemId::Gaussian, form) => {
                let s = 1.0 + 4.0 * elapsed;
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let pre = match form {
                    SolutionForm::Corrected => libm::pow(s, -n / 2.0),
                    SolutionForm::Printed => 1.0 / libm::sqrt(s),
                };
                pre * libm::exp(-r2 / s)
            }
            (ProblemId::ExpL1, SolutionForm::Corrected) => x.iter().map(|&v| heat_exp_abs(v, elapsed)).product(),
            (ProblemId::ExpL1, SolutionForm::Printed) => {
                libm::exp(n * elapsed - x.iter().map(|v| v.abs()).sum::<f64>())
            }
        })
    }
}

/// Heat flow of `e^{−|x|}` after diffusion time `mu`.
fn heat_exp_abs(x: f64, mu: f64) -> f64 {
    if mu == 0.0 {
        return libm::exp(-x.abs());
    }
    let s = 2.0 * libm::sqrt(mu);
    // far in a tail one factor overflows while the other underflows to 0
    let left = libm::exp(mu - x) * libm::erfc((2.0 * mu - x) / s);
    let right = libm::exp(mu + x) * libm::erfc((2.0 * mu + x) / s);
    let left = if left.is_finite() { left } else { 0.0 };
    let right = if right.is_finite() { right } else { 0.0 };
    0.5 * (left + right)
}

/// Heat flow of the indicator of `[−5, 5]`; at `mu = 0` the jump points
/// take the midpoint value.
fn heat_box(x: f64, mu: f64) -> f64 {
    if mu == 0.0 {
        return match x.abs() {
            a if a < 5.0 => 1.0,
            5.0 => 0.5,
            _ => 0.0,
        };
    }
    let s = 2.0 * libm::sqrt(mu);
    0.5 * (libm::erf((x + 5.0) / s) - libm::erf((x - 5.0) / s))
}

/// Forward heat flow `e^{−‖ω‖² μ_t(0)}` applied spectrally to `u(·, 0)`.
pub fn spectral_oracle_forward<S: MuSource>(initial: &RealField, source: &S, t: f64) -> Result<RealField> {
    let mu = source.mu(0.0, t)?.value;
    let prop = forward_multiplier(initial.grid(), mu)?;
    inverse_transform(&forward_transform(initial).scaled_by(&prop.gains)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub epsilon: f64,
    pub seed: u64,
    /// Independent substream, e.g. a sweep cell index.
    pub stream: u64,
}

impl NoiseSpec {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self { epsilon, seed, stream: 0 }
    }
}

/// `f + ε·g` with `g` i.i.d. standard normal from ChaCha20 keyed by
/// `(seed, stream)`.
pub fn add_noise(f: &RealField, spec: NoiseSpec) -> Result<RealField> {
    if !(spec.epsilon >= 0.0 && spec.epsilon.is_finite()) {
        return Err(Error::InvalidConfig(format!("noise level {} must be non-negative", spec.epsilon)));
    }
    if spec.epsilon == 0.0 {
        return Ok(f.clone());
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    rng.set_stream(spec.stream);
    let values = f
        .values()
        .iter()
        .map(|&v| {
            let g: f64 = StandardNormal.sample(&mut rng);
            v + spec.epsilon * g
        })
        .collect();
    RealField::new(f.grid().clone(), values)
}

/// Discrete L² distance `sqrt(h Σ (noisy − clean)²)`.
pub fn measured_delta(noisy: &RealField, clean: &RealField) -> Result<f64> {
    Ok(noisy.sub(clean)?.l2_norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Largest pointwise error.
    pub absolute: f64,
    /// Discrete L² error over the L² norm of the reference.
    pub relative: f64,
}

pub fn error_report(approx: &RealField, exact: &RealField) -> Result<ErrorReport> {
    error_report_masked(approx, exact, &alloc::vec![true; exact.len()])
}

/// [`error_report`] restricted to the samples where `mask` holds.
pub fn error_report_masked(approx: &RealField, exact: &RealField, mask: &[bool]) -> Result<ErrorReport> {
    let diff = approx.sub(exact)?;
    if mask.len() != diff.len() {
        return Err(Error::ShapeMismatch { expected: diff.len(), got: mask.len() });
    }
    let reference = exact.l2_norm_where(mask);
    if reference == 0.0 {
        return Err(Error::ZeroReference);
    }
    let absolute = diff
        .values()
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .fold(0.0f64, |a, (v, _)| a.max(v.abs()));
    Ok(ErrorReport { absolute, relative: diff.l2_norm_where(mask) / reference })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCheck {
    pub id: ProblemId,
    pub worst_relative: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Times at which closed forms are compared with the oracle.
pub const ORACLE_TIMES: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];

/// Grid, comparison mask and tolerance for each problem's oracle check.
///
/// Kinked data cannot meet `1e−6` on the full grid: the sampled kink and
/// the periodic wrap at the box edge carry an `O(h²)` aliasing error, so
/// the comparison excludes a band around each kink and the box boundary.
pub fn oracle_setup(id: ProblemId) -> Result<(BenchmarkProblem, Vec<bool>, f64)> {
    let keep = |v: f64| (0.5..=9.5).contains(&v.abs());
    Ok(match id {
        ProblemId::Sine => {
            let p = BenchmarkProblem::standard(id)?;
            let mask = alloc::vec![true; p.grid().len()];
            (p, mask, 1e-6)
        }
        ProblemId::ExpAbs => {
            let p = BenchmarkProblem::with_grid(id, UniformGrid::line(-10.0, 10.0, 512)?)?;
            let mask = mask_where(p.grid(), |x| keep(x[0]));
            (p, mask, 1e-6)
        }
        ProblemId::BoxPulse => {
            let p = BenchmarkProblem::with_grid(id, UniformGrid::line(-10.0, 10.0, 1024)?)?;
            let mask = alloc::vec![true; p.grid().len()];
            (p, mask, 1e-3)
        }
        ProblemId::Gaussian => {
            let p = BenchmarkProblem::standard(id)?;
            let mask = alloc::vec![true; p.grid().len()];
            (p, mask, 1e-6)
        }
        ProblemId::ExpL1 => {
            let p = BenchmarkProblem::with_grid(id, UniformGrid::cube(2, -10.0, 10.0, 512)?)?;
            let mask = mask_where(p.grid(), |x| x.iter().all(|&v| keep(v)));
            (p, mask, 1e-6)
        }
    })
}

/// Compares the chosen closed form with the forward oracle started from the
/// same form at `t = 0`, at every time in [`ORACLE_TIMES`].
pub fn oracle_gate(id: ProblemId, form: SolutionForm) -> Result<OracleCheck> {
    let (problem, mask, tolerance) = oracle_setup(id)?;
    let initial = problem.solution(0.0, form)?;
    let mut worst = 0.0f64;
    for &t in &ORACLE_TIMES {
        let oracle = spectral_oracle_forward(&initial, problem.profile(), t)?;
        let closed = problem.solution(t, form)?;
        let rel = error_report_masked(&closed, &oracle, &mask)?.relative;
        worst = worst.max(if rel.is_nan() { f64::INFINITY } else { rel });
    }
    Ok(OracleCheck { id, worst_relative: worst, tolerance, passed: worst <= tolerance })
}

/// `sup |∂_t u − κ(t) Δu|` over `mask`, with a centered difference of step
/// `dt` in time and the spectral Laplacian in space.
pub fn pde_residual(problem: &BenchmarkProblem, t: f64, dt: f64, mask: &[bool]) -> Result<f64> {
    let ahead = problem.exact_solution(t + dt)?;
    let behind = problem.exact_solution(t - dt)?;
    let here = problem.exact_solution(t)?;
    let lap = inverse_transform(&forward_transform(&here).laplacian())?;
    let kappa = problem.profile().kappa(t)?;
    let mut worst = 0.0f64;
    for i in 0..here.len() {
        if mask[i] {
            let dudt = (ahead.values()[i] - behind.values()[i]) / (2.0 * dt);
            worst = worst.max((dudt - kappa * lap.values()[i]).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IllPosedRow {
    pub m: f64,
    /// `sup |sin(m‖x‖)/m²|` on the grid.
    pub data_error: f64,
    /// Sup error of the unregularized reconstruction at `t = 0`.
    pub solution_error: f64,
    /// `e^{m² μ_T(0)} / m²`.
    pub ratio_bound: f64,
    pub saturated: bool,
    /// Sup error of the regularized reconstruction, when requested.
    pub regularized_error: Option<f64>,
}

/// Perturbs the final data by `sin(m‖x‖)/m²` and measures how the
/// reconstruction at `t = 0` reacts.
pub fn illposedness_demo(problem: &BenchmarkProblem, m: f64, regularized: Option<MeyerLevel>) -> Result<IllPosedRow> {
    let nyquist = problem.grid().min_nyquist();
    if !(m > 0.0 && m <= nyquist) {
        return Err(Error::Aliasing { m, nyquist });
    }
    let exact = problem.exact_solution(0.0)?;
    let clean = problem.final_data()?;
    let m2 = m * m;
    let perturbation = RealField::from_fn(problem.grid().clone(), |x| {
        let r = libm::sqrt(x.iter().map(|v| v * v).sum::<f64>());
        libm::sin(m * r) / m2
    })?;
    let data = clean.add(&perturbation)?;
    let (u, rep) = unregularized_solve(&data, 0.0, problem.profile())?;
    let regularized_error = match regularized {
        Some(level) => {
            let (r, _) = solve_at_level(&data, 0.0, problem.profile(), level, false)?;
            Some(r.sub(&exact)?.sup_norm())
        }
        None => None,
    };
    Ok(IllPosedRow {
        m,
        data_error: perturbation.sup_norm(),
        solution_error: u.sub(&exact)?.sup_norm(),
        ratio_bound: libm::exp(m2 * rep.mu) / m2,
        saturated: rep.saturated,
        regularized_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseSpec {
    pub level: MeyerLevel,
    pub noise: NoiseSpec,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseOutcome {
    pub report: ErrorReport,
    pub solve: SolveReport,
    /// `‖u(t) − F_{t,J} φ_T‖₂`, the approximation part.
    pub n1: f64,
    /// `‖F_{t,J}(φ_T − φ_{T,m})‖₂`, the propagated noise.
    pub n2: f64,
    /// `‖u(t) − F_{t,J} φ_{T,m}‖₂`.
    pub total: f64,
    pub delta: f64,
    /// `ln(n2 / δ)`, or `−∞` for noise-free runs.
    pub log_noise_gain: f64,
    /// `ln` of the support-sharp gain bound.
    pub log_gain_bound: f64,
    pub reconstruction: RealField,
    pub noisy: RealField,
}

impl CaseOutcome {
    pub fn stability_respected(&self) -> bool {
        // the measured gain is a ratio of computed norms; allow for their rounding
        self.log_noise_gain <= self.log_gain_bound + 1e-9
    }

    pub fn split_respected(&self) -> bool {
        self.total <= self.n1 + self.n2 + 1e-10 + 4.0 * f64::EPSILON * (self.n1 + self.n2)
    }
}

/// One noisy reconstruction with the error split and noise-gain audit.
pub fn run_case(problem: &BenchmarkProblem, spec: CaseSpec) -> Result<CaseOutcome> {
    run_case_with(problem, problem.profile(), spec)
}

/// [`run_case`] with the propagator's `μ` drawn from `profile`, e.g. a
/// memoizing wrapper around the problem's own diffusivity.
pub fn run_case_with<S: MuSource>(problem: &BenchmarkProblem, profile: &S, spec: CaseSpec) -> Result<CaseOutcome> {
    let clean = problem.final_data()?;
    let noisy = add_noise(&clean, spec.noise)?;
    let exact = problem.exact_solution(spec.t)?;
    let (recon, solve) = solve_at_level(&noisy, spec.t, profile, spec.level, false)?;
    let (recon_clean, _) = solve_at_level(&clean, spec.t, profile, spec.level, false)?;
    let noise = noisy.sub(&clean)?;
    let (noise_out, _) = solve_at_level(&noise, spec.t, profile, spec.level, false)?;
    let delta = noise.l2_norm();
    let n2 = noise_out.l2_norm();
    let log_noise_gain = if delta == 0.0 { f64::NEG_INFINITY } else { libm::log(n2) - libm::log(delta) };
    let report = error_report_masked(&recon, &exact, problem.report_mask())?;
    Ok(CaseOutcome {
        report,
        solve,
        n1: exact.sub(&recon_clean)?.l2_norm(),
        n2,
        total: exact.sub(&recon)?.l2_norm(),
        delta,
        log_noise_gain,
        log_gain_bound: solve.log_amplification_bound(problem.grid().dim()),
        reconstruction: recon,
        noisy,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub level: MeyerLevel,
    pub epsilon: f64,
    pub outcome: CaseOutcome,
}

/// Noise substream of cell `(level_index, epsilon_index)`.
pub fn cell_stream(level_index: usize, epsilon_index: usize, epsilon_count: usize) -> u64 {
    (level_index * epsilon_count + epsilon_index) as u64
}

/// Runs one sweep cell; parallel drivers call this directly.
pub fn run_cell<S: MuSource>(
    problem: &BenchmarkProblem,
    profile: &S,
    levels: &[u32],
    epsilons: &[f64],
    cell: usize,
    t: f64,
    seed: u64,
) -> Result<SweepCell> {
    let (li, ei) = (cell / epsilons.len(), cell % epsilons.len());
    let level = MeyerLevel(levels[li]);
    let epsilon = epsilons[ei];
    let noise = NoiseSpec { epsilon, seed, stream: cell_stream(li, ei, epsilons.len()) };
    let outcome = run_case_with(problem, profile, CaseSpec { level, noise, t })?;
    Ok(SweepCell { level, epsilon, outcome })
}

/// Serial sweep over every `(level, ε)` pair, level-major.
pub fn run_sweep(problem: &BenchmarkProblem, epsilons: &[f64], levels: &[u32], t: f64, seed: u64) -> Result<Vec<SweepCell>> {
    if epsilons.is_empty() || levels.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one ε and one level".into()));
    }
    (0..epsilons.len() * levels.len())
        .map(|c| run_cell(problem, problem.profile(), levels, epsilons, c, t, seed))
        .collect()
}
