//! Time-dependent diffusivity `κ(t)` and its accumulated integral
//! `μ_T(t) = ∫_t^T κ(ν) dν`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quadrature::{self, Options};

/// Dense positivity check resolution for analytic profiles.
pub const POSITIVITY_SAMPLES: usize = 1024;

/// Absolute tolerance for quadrature-based `μ`.
pub const MU_ABS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuValue {
    pub value: f64,
    pub estimated_error: f64,
}

/// Anything that can report `μ` over a subinterval of `[0, T]`.
pub trait MuSource {
    fn horizon(&self) -> f64;

    /// `∫_lower^upper κ`, for `0 ≤ lower ≤ upper ≤ T`.
    fn mu(&self, lower: f64, upper: f64) -> Result<MuValue>;

    /// `μ_T(t)`, the backward amplification time from `t` to the horizon.
    fn mu_to_horizon(&self, t: f64) -> Result<MuValue> {
        self.mu(t, self.horizon())
    }
}

impl<S: MuSource + ?Sized> MuSource for &S {
    fn horizon(&self) -> f64 {
        (**self).horizon()
    }

    fn mu(&self, lower: f64, upper: f64) -> Result<MuValue> {
        (**self).mu(lower, upper)
    }
}

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch–Carlson
/// slopes with the usual one-sided end conditions).
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    t: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    pub fn new(t: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if t.len() != y.len() {
            return Err(Error::InvalidProfile(format!(
                "{} times but {} values",
                t.len(),
                y.len()
            )));
        }
        if t.len() < 2 {
            return Err(Error::InvalidProfile("need at least two knots".into()));
        }
        if t.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("non-finite knot".into()));
        }
        if let Some(w) = t.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidProfile(format!(
                "knot times not strictly increasing at index {}",
                w + 1
            )));
        }
        let slopes = pchip_slopes(&t, &y);
        Ok(Self { t, y, slopes })
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.t, &self.y)
    }

    fn segment(&self, x: f64) -> usize {
        match self.t.partition_point(|&k| k <= x) {
            0 => 0,
            i => (i - 1).min(self.t.len() - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.t[i + 1] - self.t[i];
        let s = (x - self.t[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.slopes[i] + h01 * self.y[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

fn pchip_slopes(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        return alloc::vec![delta[0]; 2];
    }
    let mut m = alloc::vec![0.0; n];
    for k in 1..n - 1 {
        let (d0, d1) = (delta[k - 1], delta[k]);
        if d0 == 0.0 || d1 == 0.0 || d0.signum() != d1.signum() {
            m[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
        }
    }
    m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `κ(t) = slope·t + intercept`.
    Affine { slope: f64, intercept: f64 },
    /// `κ(t) = 1 / (100 + e^{t²})`.
    Rational100Exp,
    Tabulated(Pchip),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusivityProfile {
    kind: ProfileKind,
    horizon: f64,
}

impl DiffusivityProfile {
    pub fn new(kind: ProfileKind, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidProfile(format!("horizon {horizon} must be positive")));
        }
        let p = Self { kind, horizon };
        p.validate()?;
        Ok(p)
    }

    pub fn affine(slope: f64, intercept: f64, horizon: f64) -> Result<Self> {
        Self::new(ProfileKind::Affine { slope, intercept }, horizon)
    }

    pub fn rational_100_exp(horizon: f64) -> Result<Self> {
        Self::new(ProfileKind::Rational100Exp, horizon)
    }

    pub fn tabulated(t: Vec<f64>, kappa: Vec<f64>, horizon: f64) -> Result<Self> {
        Self::new(ProfileKind::Tabulated(Pchip::new(t, kappa)?), horizon)
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    fn validate(&self) -> Result<()> {
        match &self.kind {
            ProfileKind::Affine { slope, intercept } => {
                if !(slope.is_finite() && intercept.is_finite()) {
                    return Err(Error::InvalidProfile("non-finite affine coefficients".into()));
                }
                if *intercept <= 0.0 || slope * self.horizon + intercept <= 0.0 {
                    return Err(Error::InvalidProfile(format!(
                        "affine κ = {slope}·t + {intercept} is not positive on [0, {}]",
                        self.horizon
                    )));
                }
            }
            ProfileKind::Tabulated(p) => {
                let (t, y) = p.knots();
                if t[0] > 0.0 || t[t.len() - 1] < self.horizon {
                    return Err(Error::InvalidProfile(format!(
                        "knots span [{}, {}] but must cover [0, {}]",
                        t[0],
                        t[t.len() - 1],
                        self.horizon
                    )));
                }
                // the interpolant stays between neighbouring knot values
                if let Some(i) = y.iter().position(|&v| v <= 0.0) {
                    return Err(Error::InvalidProfile(format!("κ ≤ 0 at knot {i}")));
                }
            }
            ProfileKind::Rational100Exp => {}
        }
        for i in 0..=POSITIVITY_SAMPLES {
            let t = self.horizon * i as f64 / POSITIVITY_SAMPLES as f64;
            let k = self.eval_unchecked(t);
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::InvalidProfile(format!("κ({t}) = {k} is not positive")));
            }
        }
        Ok(())
    }

    fn eval_unchecked(&self, t: f64) -> f64 {
        match &self.kind {
            ProfileKind::Affine { slope, intercept } => slope * t + intercept,
            ProfileKind::Rational100Exp => 1.0 / (100.0 + libm::exp(t * t)),
            ProfileKind::Tabulated(p) => p.eval(t),
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::Domain { what: "time outside [0, T]", value: t });
        }
        Ok(())
    }

    pub fn kappa(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.eval_unchecked(t))
    }

    /// Smallest and largest κ over the positivity sampling lattice.
    pub fn sampled_range(&self) -> (f64, f64) {
        (0..=POSITIVITY_SAMPLES).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let k = self.eval_unchecked(self.horizon * i as f64 / POSITIVITY_SAMPLES as f64);
            (lo.min(k), hi.max(k))
        })
    }
}

impl MuSource for DiffusivityProfile {
    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn mu(&self, lower: f64, upper: f64) -> Result<MuValue> {
        self.check_time(lower)?;
        self.check_time(upper)?;
        if lower > upper {
            return Err(Error::Domain { what: "μ lower limit exceeds upper limit", value: lower });
        }
        if lower == upper {
            return Ok(MuValue { value: 0.0, estimated_error: 0.0 });
        }
        let opts = Options { abs_tol: MU_ABS_TOL, ..Options::default() };
        match &self.kind {
            ProfileKind::Affine { slope, intercept } => {
                // factored to avoid cancellation between the two antiderivative values
                let value = (upper - lower) * (0.5 * slope * (upper + lower) + intercept);
                Ok(MuValue { value, estimated_error: 0.0 })
            }
            ProfileKind::Rational100Exp => {
                let r = quadrature::integrate(|t| self.eval_unchecked(t), lower, upper, opts)?;
                Ok(MuValue { value: r.value, estimated_error: r.error })
            }
            ProfileKind::Tabulated(p) => {
                // integrate knot by knot so every panel sees a single cubic
                let (t, _) = p.knots();
                let mut cuts: Vec<f64> = alloc::vec![lower];
                cuts.extend(t.iter().copied().filter(|&k| k > lower && k < upper));
                cuts.push(upper);
                let mut value = 0.0;
                let mut err = 0.0;
                for w in cuts.windows(2) {
                    let r = quadrature::integrate(|x| p.eval(x), w[0], w[1], opts)?;
                    value += r.value;
                    err += r.error;
                }
                Ok(MuValue { value, estimated_error: err })
            }
        }
    }
}
