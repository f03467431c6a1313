//! Backward and forward heat propagators, the level-selection rule, and the
//! regularized solver `F_{t,J} = F_t P_J`.
//!
//! For `u_t = κ(t) Δu` the Fourier modes evolve independently, so recovering
//! `u(·, t)` from `u(·, T)` multiplies each coefficient by
//! `exp(‖ω‖² μ_T(t))`. Without a frequency cutoff this gain is unbounded;
//! the Meyer projection limits it to
//! `exp(((4π/3)·2^J)² · n · μ_T(t))`.

use alloc::format;
use alloc::vec::Vec;

use crate::diffusivity::MuSource;
use crate::error::{Error, Result};
use crate::field::{forward_transform, inverse_transform, RealField};
use crate::grid::UniformGrid;
use crate::meyer::{projection_multiplier, MeyerLevel};

/// Largest exponent a propagator gain may carry before saturating.
pub const EXPONENT_CAP: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverflowPolicy {
    /// Fail with [`Error::AmplificationOverflow`].
    Error,
    /// Clamp the exponent at [`EXPONENT_CAP`] and flag it.
    Saturate,
}

/// Real, symmetric spectral gains of a heat propagator.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    pub gains: Vec<f64>,
    /// Largest exponent `‖ω‖²μ` requested, before any clamping.
    pub max_exponent: f64,
    pub saturated: bool,
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::Domain { what: "μ must be finite and non-negative", value: mu });
    }
    Ok(())
}

/// `exp(‖ω‖² μ)` for every spectral slot.
pub fn backward_multiplier(grid: &UniformGrid, mu: f64, policy: OverflowPolicy) -> Result<Propagator> {
    check_mu(mu)?;
    let exponents: Vec<f64> = grid.frequency_norms_squared().into_iter().map(|w2| w2 * mu).collect();
    let max_exponent = exponents.iter().fold(0.0f64, |m, &e| m.max(e));
    if max_exponent > EXPONENT_CAP && policy == OverflowPolicy::Error {
        return Err(Error::AmplificationOverflow { exponent: max_exponent });
    }
    let gains = exponents.iter().map(|&e| libm::exp(e.min(EXPONENT_CAP))).collect();
    Ok(Propagator { gains, max_exponent, saturated: max_exponent > EXPONENT_CAP })
}

/// `exp(−‖ω‖² μ)` for every spectral slot.
pub fn forward_multiplier(grid: &UniformGrid, mu: f64) -> Result<Propagator> {
    check_mu(mu)?;
    let gains = grid.frequency_norms_squared().into_iter().map(|w2| libm::exp(-w2 * mu)).collect();
    Ok(Propagator { gains, max_exponent: 0.0, saturated: false })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizationConfig {
    /// Data error bound `δ`.
    pub delta: f64,
    /// Smoothness gap `p − q`.
    pub p_minus_q: f64,
    /// A-priori bound `M` on the initial state.
    pub bound_m: f64,
    /// Forces the level, bypassing the selection rule.
    pub manual_level: Option<u32>,
    /// Level returned when the rule's argument collapses.
    pub clamp_floor: u32,
}

impl Default for RegularizationConfig {
    fn default() -> Self {
        Self { delta: 1e-4, p_minus_q: 0.0, bound_m: 1.0, manual_level: None, clamp_floor: 0 }
    }
}

impl RegularizationConfig {
    pub fn with_delta(delta: f64) -> Self {
        Self { delta, ..Self::default() }
    }

    pub fn with_level(level: u32) -> Self {
        Self { manual_level: Some(level), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidConfig(format!("δ = {} must be positive", self.delta)));
        }
        if !(self.bound_m > 0.0 && self.bound_m.is_finite()) {
            return Err(Error::InvalidConfig(format!("M = {} must be positive", self.bound_m)));
        }
        if !(self.p_minus_q >= 0.0 && self.p_minus_q.is_finite()) {
            return Err(Error::InvalidConfig(format!("p − q = {} must be non-negative", self.p_minus_q)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelChoice {
    pub level: MeyerLevel,
    /// The rule's argument fell to `A ≤ e` and the floor was used.
    pub clamped: bool,
    /// `ln A`, or NaN when the level was set manually.
    pub log_argument: f64,
}

/// `ln A` with `A = (M/δ)^{1/μ} · ((1/μ) ln(M/δ))^{−(p−q)/(2μ)}`.
pub fn log_selection_argument(cfg: &RegularizationConfig, mu_t0: f64) -> Result<f64> {
    cfg.validate()?;
    if !(mu_t0 > 0.0 && mu_t0.is_finite()) {
        return Err(Error::Domain { what: "μ_T(0) must be positive", value: mu_t0 });
    }
    if cfg.delta >= cfg.bound_m {
        return Err(Error::NoiseExceedsPrior { delta: cfg.delta, bound: cfg.bound_m });
    }
    let l = libm::log(cfg.bound_m / cfg.delta);
    Ok(l / mu_t0 - cfg.p_minus_q / (2.0 * mu_t0) * libm::log(l / mu_t0))
}

/// The same argument evaluated without logarithms; overflows for small `μ`.
pub fn direct_selection_argument(cfg: &RegularizationConfig, mu_t0: f64) -> f64 {
    let ratio = cfg.bound_m / cfg.delta;
    libm::pow(ratio, 1.0 / mu_t0)
        * libm::pow(libm::log(ratio) / mu_t0, -cfg.p_minus_q / (2.0 * mu_t0))
}

/// `J* = ⌊½ log₂ ln A⌋`, clamped from below by `clamp_floor`.
pub fn select_level(cfg: &RegularizationConfig, mu_t0: f64) -> Result<LevelChoice> {
    if let Some(j) = cfg.manual_level {
        return Ok(LevelChoice { level: MeyerLevel(j), clamped: false, log_argument: f64::NAN });
    }
    let ln_a = log_selection_argument(cfg, mu_t0)?;
    if ln_a <= 1.0 {
        return Ok(LevelChoice { level: MeyerLevel(cfg.clamp_floor), clamped: true, log_argument: ln_a });
    }
    let j = libm::floor(0.5 * libm::log2(ln_a)) as u32;
    Ok(LevelChoice { level: MeyerLevel(j.max(cfg.clamp_floor)), clamped: false, log_argument: ln_a })
}

fn check_rate(x: f64, b: f64, d: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain { what: "argument must lie in (0, 1)", value: x });
    }
    if !(b > 0.0) {
        return Err(Error::Domain { what: "exponent b must be positive", value: b });
    }
    if !(d > 0.0) {
        return Err(Error::Domain { what: "scale d must be positive", value: d });
    }
    Ok(())
}

/// `f(λ) = λ^b (d ln(1/λ))^{−c}`.
pub fn rate_function(lambda: f64, b: f64, c: f64, d: f64) -> Result<f64> {
    check_rate(lambda, b, d)?;
    Ok(libm::pow(lambda, b) * libm::pow(d * libm::log(1.0 / lambda), -c))
}

/// Leading-order inverse of [`rate_function`] as `y → 0`:
/// `y^{1/b} ((d/b) ln(1/y))^{c/b}`.
pub fn rate_inverse_asymptotic(y: f64, b: f64, c: f64, d: f64) -> Result<f64> {
    check_rate(y, b, d)?;
    if c == 0.0 {
        return Ok(libm::pow(y, 1.0 / b));
    }
    Ok(libm::pow(y, 1.0 / b) * libm::pow(d / b * libm::log(1.0 / y), c / b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub level_used: MeyerLevel,
    /// `μ_T(t)` used by the propagator.
    pub mu: f64,
    /// Largest `exp(‖ω‖²μ)` applied where the projection gain is nonzero.
    pub max_amplification: f64,
    /// Natural log of `max_amplification`, exact even when saturated.
    pub log_max_amplification: f64,
    pub clamped: bool,
    pub saturated: bool,
    /// The grid cannot represent all of `Λ_J`.
    pub passband_truncated: bool,
}

impl SolveReport {
    /// `((4π/3)·2^J)² · n · μ`, the log of the support-sharp gain bound.
    pub fn log_amplification_bound(&self, dim: usize) -> f64 {
        let edge = self.level_used.stopband_edge();
        edge * edge * dim as f64 * self.mu
    }
}

fn check_time<S: MuSource>(t: f64, source: &S) -> Result<()> {
    if !(0.0..=source.horizon()).contains(&t) {
        return Err(Error::Domain { what: "time outside [0, T]", value: t });
    }
    Ok(())
}

/// `F_t P_J φ`: transform, project, propagate backward, transform back.
pub fn regularized_solve<S: MuSource>(
    data: &RealField,
    t: f64,
    source: &S,
    cfg: &RegularizationConfig,
) -> Result<(RealField, SolveReport)> {
    check_time(t, source)?;
    let choice = match cfg.manual_level {
        Some(_) => select_level(cfg, f64::NAN)?,
        None => select_level(cfg, source.mu_to_horizon(0.0)?.value)?,
    };
    solve_at_level(data, t, source, choice.level, choice.clamped)
}

/// [`regularized_solve`] at a fixed level.
pub fn solve_at_level<S: MuSource>(
    data: &RealField,
    t: f64,
    source: &S,
    level: MeyerLevel,
    clamped: bool,
) -> Result<(RealField, SolveReport)> {
    check_time(t, source)?;
    let mu = source.mu_to_horizon(t)?.value;
    let grid = data.grid();
    let projection = projection_multiplier(grid, level);
    let norms = grid.frequency_norms_squared();
    let mut log_max = 0.0f64;
    let gains: Vec<f64> = projection
        .gains()
        .iter()
        .zip(&norms)
        .map(|(&p, &w2)| {
            if p == 0.0 {
                return 0.0;
            }
            let e = w2 * mu;
            log_max = log_max.max(e);
            p * libm::exp(e.min(EXPONENT_CAP))
        })
        .collect();
    let spectrum = forward_transform(data).scaled_by(&gains)?;
    let out = inverse_transform(&spectrum)?;
    let report = SolveReport {
        level_used: level,
        mu,
        max_amplification: libm::exp(log_max.min(EXPONENT_CAP)),
        log_max_amplification: log_max,
        clamped,
        saturated: log_max > EXPONENT_CAP,
        passband_truncated: level.passband_truncated(grid),
    };
    Ok((out, report))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnregularizedReport {
    pub mu: f64,
    pub max_exponent: f64,
    pub saturated: bool,
}

/// `F_t φ` with no frequency cutoff; gains saturate at `exp(700)`.
pub fn unregularized_solve<S: MuSource>(
    data: &RealField,
    t: f64,
    source: &S,
) -> Result<(RealField, UnregularizedReport)> {
    check_time(t, source)?;
    let mu = source.mu_to_horizon(t)?.value;
    let prop = backward_multiplier(data.grid(), mu, OverflowPolicy::Saturate)?;
    let spectrum = forward_transform(data).scaled_by(&prop.gains)?;
    let out = inverse_transform(&spectrum)?;
    Ok((out, UnregularizedReport { mu, max_exponent: prop.max_exponent, saturated: prop.saturated }))
}
