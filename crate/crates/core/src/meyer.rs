//! Meyer scaling and wavelet functions in the frequency domain, and the
//! level-`J` multiresolution projection realized as a separable spectral
//! multiplier.
//!
//! The projection gain is `p_J(ω) = Πᵢ |φ̂(ωᵢ / 2^J)|²`. It equals 1 on the
//! closed box `Λ_J = 2^J[−2π/3, 2π/3]ⁿ` and vanishes wherever some
//! `|ωᵢ| ≥ 2^J·4π/3`; both facts hold bitwise on grid frequencies. Unlike an
//! orthogonal projection it is not idempotent inside the transition band,
//! where applying it twice squares the gain.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::UniformGrid;

const TWO_PI_3: f64 = 2.0 * PI / 3.0;
const FOUR_PI_3: f64 = 4.0 * PI / 3.0;
const EIGHT_PI_3: f64 = 8.0 * PI / 3.0;

/// Degree-7 auxiliary polynomial `ν(x) = x⁴(35 − 84x + 70x² − 20x³)`,
/// evaluated on `x` clamped to `[0, 1]`.
pub fn aux_poly(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    let x2 = x * x;
    x2 * x2 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)))
}

/// `φ̂(ω)` with unit passband gain.
pub fn scaling_hat(omega: f64) -> f64 {
    let w = omega.abs();
    if w <= TWO_PI_3 {
        1.0
    } else if w >= FOUR_PI_3 {
        0.0
    } else {
        libm::cos(FRAC_PI_2 * aux_poly(3.0 * w / (2.0 * PI) - 1.0))
    }
}

/// `|ψ̂(ω)|`; the phase `e^{iω/2}` is never needed.
pub fn wavelet_hat_magnitude(omega: f64) -> f64 {
    let w = omega.abs();
    if w <= TWO_PI_3 || w >= EIGHT_PI_3 {
        0.0
    } else if w <= FOUR_PI_3 {
        libm::sin(FRAC_PI_2 * aux_poly(3.0 * w / (2.0 * PI) - 1.0))
    } else {
        libm::cos(FRAC_PI_2 * aux_poly(3.0 * w / (4.0 * PI) - 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MeyerLevel(pub u32);

impl MeyerLevel {
    fn dilation(self) -> f64 {
        libm::ldexp(1.0, self.0 as i32)
    }

    /// Half-width of `Λ_J`, `(2π/3)·2^J`.
    pub fn passband_edge(self) -> f64 {
        TWO_PI_3 * self.dilation()
    }

    /// `(4π/3)·2^J`, beyond which the projection gain is exactly zero.
    pub fn stopband_edge(self) -> f64 {
        FOUR_PI_3 * self.dilation()
    }

    /// True when part of the passband lies beyond the grid's Nyquist limit.
    pub fn passband_truncated(self, grid: &UniformGrid) -> bool {
        grid.min_nyquist() < self.passband_edge()
    }

    /// True when the transition band is cut off by the grid's Nyquist limit.
    pub fn stopband_beyond_nyquist(self, grid: &UniformGrid) -> bool {
        grid.min_nyquist() < self.stopband_edge()
    }

    /// Whether every component of `ω` lies in the closed box `Λ_J`.
    pub fn in_passband(self, omega: &[f64]) -> bool {
        let edge = self.passband_edge();
        omega.iter().all(|w| w.abs() <= edge)
    }

    /// Whether some component of `ω` lies at or beyond the stopband edge.
    pub fn in_stopband(self, omega: &[f64]) -> bool {
        let edge = self.stopband_edge();
        omega.iter().any(|w| w.abs() >= edge)
    }
}

/// Real gains in `[0, 1]` aligned with a grid's spectral storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMultiplier {
    grid: UniformGrid,
    gains: Vec<f64>,
}

impl SpectralMultiplier {
    pub fn new(grid: UniformGrid, gains: Vec<f64>) -> Result<Self> {
        if gains.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), got: gains.len() });
        }
        if let Some(i) = gains.iter().position(|g| !(0.0..=1.0).contains(g)) {
            return Err(Error::InvalidConfig(format!("gain {} at slot {i} outside [0, 1]", gains[i])));
        }
        Ok(Self { grid, gains })
    }

    fn from_fn<F: FnMut(&[f64]) -> f64>(grid: &UniformGrid, f: F) -> Self {
        let gains = grid.map_frequencies(f);
        Self { grid: grid.clone(), gains }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn apply(&self, field: &SpectralField) -> Result<SpectralField> {
        if field.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        field.scaled_by(&self.gains)
    }
}

/// `p_J(ω) = Πᵢ |φ̂(ωᵢ/2^J)|²`.
pub fn projection_multiplier(grid: &UniformGrid, level: MeyerLevel) -> SpectralMultiplier {
    let scale = level.dilation();
    SpectralMultiplier::from_fn(grid, |w| {
        w.iter()
            .map(|&wi| {
                let s = scaling_hat(wi / scale);
                s * s
            })
            .product()
    })
}

pub fn apply_projection(field: &SpectralField, level: MeyerLevel) -> SpectralField {
    projection_multiplier(field.grid(), level)
        .apply(field)
        .expect("multiplier built on the field's own grid")
}

/// `1 − χ_J`: zero on the closed box `Λ_J`, one outside it.
pub fn high_pass_multiplier(grid: &UniformGrid, level: MeyerLevel) -> SpectralMultiplier {
    SpectralMultiplier::from_fn(grid, |w| if level.in_passband(w) { 0.0 } else { 1.0 })
}

/// `p_{J+1} − p_J`, the detail band between consecutive levels.
pub fn detail_multiplier(grid: &UniformGrid, level: MeyerLevel) -> SpectralMultiplier {
    let fine = projection_multiplier(grid, MeyerLevel(level.0 + 1));
    let coarse = projection_multiplier(grid, level);
    let gains = fine.gains.iter().zip(&coarse.gains).map(|(f, c)| f - c).collect();
    SpectralMultiplier { grid: grid.clone(), gains }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{forward_transform, inverse_transform, RealField};
    use alloc::vec;
    use core::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn aux_poly_examples() {
        assert_eq!(aux_poly(0.0), 0.0);
        assert_eq!(aux_poly(1.0), 1.0);
        assert_eq!(aux_poly(0.5), 0.5);
        assert_eq!(aux_poly(-3.0), 0.0);
        assert_eq!(aux_poly(7.0), 1.0);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert!((aux_poly(x) + aux_poly(1.0 - x) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn scaling_and_wavelet_examples() {
        assert_eq!(scaling_hat(0.0), 1.0);
        assert_eq!(scaling_hat(FOUR_PI_3), 0.0);
        assert!((scaling_hat(PI) - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(wavelet_hat_magnitude(0.0), 0.0);
        assert_eq!(wavelet_hat_magnitude(TWO_PI_3), 0.0);
        assert!((wavelet_hat_magnitude(PI) - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((wavelet_hat_magnitude(FOUR_PI_3) - 1.0).abs() < 1e-15);
        assert!(wavelet_hat_magnitude(EIGHT_PI_3) == 0.0);
    }

    #[test]
    fn partition_of_unity_on_transition() {
        for i in 0..1000 {
            let w = TWO_PI_3 + (FOUR_PI_3 - TWO_PI_3) * i as f64 / 999.0;
            let s = scaling_hat(w);
            let p = wavelet_hat_magnitude(w);
            assert!((s * s + p * p - 1.0).abs() < 1e-12, "ω = {w}");
        }
    }

    #[test]
    fn shannon_sum() {
        for i in 0..=1000 {
            let w = -PI + 2.0 * PI * i as f64 / 1000.0;
            let s: f64 = (-1..=1).map(|k| libm::pow(scaling_hat(w + 2.0 * PI * k as f64), 2.0)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_examples() {
        let g = UniformGrid::line(0.0, 2.0 * PI, 64).unwrap();
        let p0 = projection_multiplier(&g, MeyerLevel(0));
        assert_eq!(p0.gains()[0], 1.0);

        let long = UniformGrid::line(0.0, 64.0, 256).unwrap();
        // ω = 2π sits at k = 64 on a box of length 64
        let idx = long.spectral_index(&[64]).unwrap();
        let p1 = projection_multiplier(&long, MeyerLevel(1));
        assert!((p1.gains()[idx] - 0.5).abs() < 1e-15);

        let wide = UniformGrid::cube(2, 0.0, 3.0 * PI / 2.0, 64).unwrap();
        // k = 4 gives ω = 16/3, any axis at 16π/3 ≈ 16.755 needs k = 4π
        let p2 = projection_multiplier(&wide, MeyerLevel(2));
        for flat in 0..wide.len() {
            let w = wide.frequency_at(&wide.wave_vector(flat)).unwrap();
            if w.iter().any(|x| x.abs() >= 16.0 * PI / 3.0) {
                assert_eq!(p2.gains()[flat], 0.0);
            }
        }
    }

    #[test]
    fn apply_projection_examples() {
        let g = UniformGrid::line(0.0, 2.0 * PI, 64).unwrap();
        let sin1 = forward_transform(&RealField::from_fn(g.clone(), |x| libm::sin(x[0])).unwrap());
        let kept = apply_projection(&sin1, MeyerLevel(1));
        for (a, b) in kept.coeffs().iter().zip(sin1.coeffs()) {
            assert!((a - b).norm() < 1e-15);
        }
        assert_eq!(kept.coeff(&[1]).unwrap(), sin1.coeff(&[1]).unwrap());

        let sin20 = forward_transform(&RealField::from_fn(g.clone(), |x| libm::sin(20.0 * x[0])).unwrap());
        let out = apply_projection(&sin20, MeyerLevel(2));
        assert_eq!(out.coeff(&[20]).unwrap().norm(), 0.0);
        assert_eq!(out.coeff(&[-20]).unwrap().norm(), 0.0);
        assert!(inverse_transform(&out).unwrap().sup_norm() < 1e-14);

        let zero = SpectralField::zeros(g.clone());
        assert_eq!(apply_projection(&zero, MeyerLevel(4)), zero);

        let other = UniformGrid::line(0.0, PI, 64).unwrap();
        let m = projection_multiplier(&other, MeyerLevel(1));
        assert_eq!(m.apply(&sin1), Err(Error::GridMismatch));
    }

    #[test]
    fn high_pass_examples() {
        let g = UniformGrid::line(0.0, 2.0 * PI, 64).unwrap();
        assert_eq!(high_pass_multiplier(&g, MeyerLevel(3)).gains()[0], 0.0);

        // ω = π at k = 1 on a box of length 2
        let g = UniformGrid::line(0.0, 2.0, 64).unwrap();
        let i = g.spectral_index(&[1]).unwrap();
        assert_eq!(high_pass_multiplier(&g, MeyerLevel(0)).gains()[i], 1.0);

        // ω = 4π/3 exactly at k = 2 on a box of length 3
        let g = UniformGrid::line(0.0, 3.0, 64).unwrap();
        let i = g.spectral_index(&[2]).unwrap();
        assert_eq!(g.frequency_at(&[2]).unwrap()[0], MeyerLevel(1).passband_edge());
        assert_eq!(high_pass_multiplier(&g, MeyerLevel(1)).gains()[i], 0.0);
    }

    #[test]
    fn support_exactness_in_two_dimensions() {
        let g = UniformGrid::cube(2, -10.0, 10.0, 128).unwrap();
        for j in 0..=6 {
            let level = MeyerLevel(j);
            let m = projection_multiplier(&g, level);
            let fine = projection_multiplier(&g, MeyerLevel(j + 1));
            let detail = detail_multiplier(&g, level);
            for flat in 0..g.len() {
                let w = g.frequency_at(&g.wave_vector(flat)).unwrap();
                if level.in_passband(&w) {
                    assert_eq!(m.gains()[flat], 1.0);
                    assert_eq!(fine.gains()[flat], 1.0);
                    assert_eq!(detail.gains()[flat], 0.0);
                }
                if level.in_stopband(&w) {
                    assert_eq!(m.gains()[flat], 0.0);
                }
                if MeyerLevel(j + 1).in_stopband(&w) {
                    assert_eq!(detail.gains()[flat], 0.0);
                }
                assert!((0.0..=1.0).contains(&detail.gains()[flat]));
            }
        }
    }

    #[test]
    fn projection_twice_squares_the_gain() {
        let g = UniformGrid::line(-10.0, 10.0, 256).unwrap();
        let f = forward_transform(&RealField::from_fn(g.clone(), |x| libm::exp(-x[0] * x[0])).unwrap());
        let once = apply_projection(&f, MeyerLevel(1));
        let twice = apply_projection(&once, MeyerLevel(1));
        let p = projection_multiplier(&g, MeyerLevel(1));
        for ((a, b), gain) in twice.coeffs().iter().zip(f.coeffs()).zip(p.gains()) {
            assert!((a - b * gain * gain).norm() < 1e-15);
        }
        let back = inverse_transform(&once).unwrap();
        assert_eq!(back.len(), 256);
    }

    #[test]
    fn multiplier_rejects_out_of_range_gains() {
        let g = UniformGrid::line(0.0, 1.0, 8).unwrap();
        assert!(SpectralMultiplier::new(g.clone(), vec![1.5; 8]).is_err());
        assert!(SpectralMultiplier::new(g, vec![0.5; 7]).is_err());
    }
}
