//! Physical samples and their Fourier coefficients.
//!
//! The discrete transform mimics the continuous one used throughout the
//! solver, `ĝ(ω) = (2π)^{−n/2} ∫ g(x) e^{−iω·x} dx`, by the periodic
//! trapezoid rule:
//!
//! ```text
//! F(k) = (2π)^{−n/2} · h · Σ_x f(x) e^{−i ω(k)·x}
//! ```
//!
//! with `h` the cell volume and `x` the true sample coordinates (so the
//! phase of a shifted box is retained). With this scaling a spectral gain
//! `g(ω)` acts exactly as the continuous multiplier `ĝ ↦ g·ĝ`, and
//! Parseval reads `h Σ|f|² = Δω Σ|F|²`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{transform_nd, Direction};
use crate::grid::UniformGrid;

/// Imaginary residue (relative to `max(1, sup|Re|)`) tolerated when
/// collapsing an inverse transform to real values.
pub const IMAGINARY_RESIDUE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        let values = alloc::vec![0.0; grid.len()];
        Self { grid, values }
    }

    /// Samples a function of the physical coordinates.
    pub fn from_fn<F: FnMut(&[f64]) -> f64>(grid: UniformGrid, f: F) -> Result<Self> {
        let values = grid.sample(f);
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check_grid(&self, other: &RealField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `self − other`, pointwise.
    pub fn sub(&self, other: &RealField) -> Result<RealField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &RealField) -> Result<RealField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &RealField, f: F) -> Result<RealField> {
        self.check_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        RealField::new(self.grid.clone(), values)
    }

    pub fn scale(&self, factor: f64) -> Result<RealField> {
        RealField::new(self.grid.clone(), self.values.iter().map(|v| v * factor).collect())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    /// Discrete L² norm `sqrt(h Σ f²)`, overflow-safe.
    pub fn l2_norm(&self) -> f64 {
        scaled_l2(self.values.iter().copied()) * libm::sqrt(self.grid.cell_volume())
    }

    /// Discrete L² norm restricted to the samples where `mask` holds.
    pub fn l2_norm_where(&self, mask: &[bool]) -> f64 {
        let it = self.values.iter().zip(mask).filter(|(_, &m)| m).map(|(&v, _)| v);
        scaled_l2(it) * libm::sqrt(self.grid.cell_volume())
    }
}

/// Euclidean norm with running rescaling, as in reference BLAS `nrm2`.
pub(crate) fn scaled_l2<I: Iterator<Item = f64>>(values: I) -> f64 {
    let mut scale = 0.0f64;
    let mut ssq = 1.0f64;
    for v in values {
        if v != 0.0 {
            let a = v.abs();
            if scale < a {
                ssq = 1.0 + ssq * (scale / a) * (scale / a);
                scale = a;
            } else {
                ssq += (a / scale) * (a / scale);
            }
        }
    }
    scale * libm::sqrt(ssq)
}

/// Fourier coefficients in per-axis FFT storage order (see [`crate::grid`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: UniformGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: UniformGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), got: coeffs.len() });
        }
        if let Some(i) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        let coeffs = alloc::vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of a centered wave vector.
    pub fn coeff(&self, k: &[i64]) -> Result<Complex64> {
        Ok(self.coeffs[self.grid.spectral_index(k)?])
    }

    /// `Σ|F|²·Δω`, the spectral side of Parseval (overflow-safe).
    pub fn energy(&self) -> f64 {
        let n = scaled_l2(self.coeffs.iter().flat_map(|c| [c.re, c.im]));
        n * n * self.grid.frequency_cell_volume()
    }

    /// Multiplies every coefficient by a real gain.
    pub fn scaled_by(&self, gains: &[f64]) -> Result<SpectralField> {
        if gains.len() != self.coeffs.len() {
            return Err(Error::ShapeMismatch { expected: self.coeffs.len(), got: gains.len() });
        }
        let coeffs = self.coeffs.iter().zip(gains).map(|(c, &g)| c * g).collect();
        SpectralField::new(self.grid.clone(), coeffs)
    }

    /// Spectral derivative `∂/∂x_axis`, i.e. multiplication by `iω_axis`.
    /// The unpaired Nyquist slot is zeroed so real fields stay real.
    pub fn derivative(&self, axis: usize) -> SpectralField {
        let ax = *self.grid.axis(axis);
        let nyquist_k = -(ax.count as i64) / 2;
        let mut idx = alloc::vec![0usize; self.grid.dim()];
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(flat, c)| {
                self.grid.unravel(flat, &mut idx);
                let k = ax.wavenumber(idx[axis]);
                if k == nyquist_k {
                    return Complex64::new(0.0, 0.0);
                }
                let w = 2.0 * PI * k as f64 / ax.length();
                c * Complex64::new(0.0, w)
            })
            .collect();
        SpectralField { grid: self.grid.clone(), coeffs }
    }

    /// Spectral Laplacian, multiplication by `−‖ω‖²`.
    pub fn laplacian(&self) -> SpectralField {
        let gains: Vec<f64> = self.grid.frequency_norms_squared().into_iter().map(|w| -w).collect();
        let coeffs = self.coeffs.iter().zip(&gains).map(|(c, &g)| c * g).collect();
        SpectralField { grid: self.grid.clone(), coeffs }
    }

    /// Largest deviation from `F(−k) = conj F(k)` relative to the largest
    /// coefficient; slots whose mirror is not representable are skipped.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.coeffs.iter().fold(0.0, |m, c| f64::max(m, c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for flat in 0..self.coeffs.len() {
            let k = self.grid.wave_vector(flat);
            let neg: Vec<i64> = k.iter().map(|&x| -x).collect();
            if let Ok(j) = self.grid.spectral_index(&neg) {
                let d = (self.coeffs[j] - self.coeffs[flat].conj()).norm();
                worst = worst.max(d / scale);
            }
        }
        worst
    }
}

/// Per-axis phase factors `e^{∓iω aᵢ}` for the box offset.
fn offset_phases(grid: &UniformGrid, sign: f64) -> Vec<Vec<Complex64>> {
    grid.axes()
        .iter()
        .map(|axis| {
            axis.frequencies()
                .into_iter()
                .map(|w| {
                    let theta = sign * w * axis.lower;
                    Complex64::new(libm::cos(theta), libm::sin(theta))
                })
                .collect()
        })
        .collect()
}

fn apply_phases(grid: &UniformGrid, data: &mut [Complex64], phases: &[Vec<Complex64>]) {
    if grid.axes().iter().all(|a| a.lower == 0.0) {
        return;
    }
    let mut idx = alloc::vec![0usize; grid.dim()];
    for (flat, c) in data.iter_mut().enumerate() {
        grid.unravel(flat, &mut idx);
        for (axis, &j) in idx.iter().enumerate() {
            *c *= phases[axis][j];
        }
    }
}

fn two_pi_pow(dim: usize) -> f64 {
    libm::pow(2.0 * PI, dim as f64 / 2.0)
}

/// `F(k) = (2π)^{−n/2} h Σ f(x) e^{−iω(k)·x}`.
pub fn forward_transform(f: &RealField) -> SpectralField {
    let grid = f.grid().clone();
    let mut data: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_nd(&mut data, &grid.shape(), Direction::Forward);
    let scale = grid.cell_volume() / two_pi_pow(grid.dim());
    for c in data.iter_mut() {
        *c *= scale;
    }
    apply_phases(&grid, &mut data, &offset_phases(&grid, -1.0));
    symmetrize(&grid, &mut data);
    SpectralField { grid, coeffs: data }
}

/// Makes `F(−k) = conj F(k)` hold exactly wherever `−k` is representable.
///
/// Rounding leaves the two halves of a real signal's spectrum asymmetric at
/// the 1e−16 level. Backward propagation multiplies that asymmetry by gains
/// up to `e^{700}`, turning it into a spurious imaginary part; with exact
/// pairs and real symmetric gains it cannot arise.
fn symmetrize(grid: &UniformGrid, data: &mut [Complex64]) {
    let mut neg = alloc::vec![0i64; grid.dim()];
    for flat in 0..data.len() {
        let k = grid.wave_vector(flat);
        for (n, &ki) in neg.iter_mut().zip(&k) {
            *n = -ki;
        }
        match grid.spectral_index(&neg) {
            Ok(mirror) if mirror > flat => {
                let avg = (data[flat] + data[mirror].conj()) * 0.5;
                data[flat] = avg;
                data[mirror] = avg.conj();
            }
            Ok(mirror) if mirror == flat => data[flat].im = 0.0,
            _ => {}
        }
    }
}

/// Exact inverse of [`forward_transform`]. Fails when the result carries an
/// imaginary part above [`IMAGINARY_RESIDUE_TOLERANCE`], which only happens
/// when a non-Hermitian multiplier was applied.
pub fn inverse_transform(spectrum: &SpectralField) -> Result<RealField> {
    let grid = spectrum.grid().clone();
    let mut data = spectrum.coeffs().to_vec();
    apply_phases(&grid, &mut data, &offset_phases(&grid, 1.0));
    transform_nd(&mut data, &grid.shape(), Direction::Inverse);
    let scale = two_pi_pow(grid.dim()) / grid.volume();
    let mut sup_re = 0.0f64;
    let mut sup_im = 0.0f64;
    for c in data.iter_mut() {
        *c *= scale;
        sup_re = sup_re.max(c.re.abs());
        sup_im = sup_im.max(c.im.abs());
    }
    // an unpaired Nyquist slot legitimately leaves a tiny imaginary residue
    if sup_im > IMAGINARY_RESIDUE_TOLERANCE * sup_re.max(1.0) {
        return Err(Error::NonRealReconstruction { residue: sup_im });
    }
    RealField::new(grid, data.into_iter().map(|c| c.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn lcg_values(n: usize, mut state: u64) -> Vec<f64> {
        (0..n)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect()
    }

    #[test]
    fn sine_has_two_equal_modes() {
        let g = UniformGrid::line(0.0, 2.0 * PI, 64).unwrap();
        let f = RealField::from_fn(g, |x| libm::sin(x[0])).unwrap();
        let s = forward_transform(&f);
        let big: Vec<usize> = (0..64).filter(|&i| s.coeffs()[i].norm() > 1e-12).collect();
        assert_eq!(big.len(), 2);
        let a = s.coeff(&[1]).unwrap();
        let b = s.coeff(&[-1]).unwrap();
        assert!((a.norm() - b.norm()).abs() < 1e-14);
        // continuous transform of sin on one period: ∓iπ/√(2π)
        let expected = PI / libm::sqrt(2.0 * PI);
        assert!((a.im + expected).abs() < 1e-13 && a.re.abs() < 1e-13);
    }

    #[test]
    fn constant_is_dc_only() {
        let g = UniformGrid::line(-3.0, 5.0, 32).unwrap();
        let f = RealField::from_fn(g, |_| 1.0).unwrap();
        let s = forward_transform(&f);
        for (i, c) in s.coeffs().iter().enumerate() {
            if i == 0 {
                assert!((c.norm() - 8.0 / libm::sqrt(2.0 * PI)).abs() < 1e-13);
            } else {
                assert!(c.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn parseval_against_direct_summation() {
        let g = UniformGrid::line(-1.0, 2.0, 32).unwrap();
        let vals = lcg_values(32, 7);
        let f = RealField::new(g.clone(), vals.clone()).unwrap();
        // oracle: direct O(N²) evaluation of the defining sum
        let h = g.cell_volume();
        let mut direct = 0.0;
        for k in -16i64..16 {
            let w = g.frequency_at(&[k]).unwrap()[0];
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in vals.iter().enumerate() {
                let x = g.axis(0).coordinate(j);
                acc += Complex64::new(libm::cos(w * x), -libm::sin(w * x)) * *v;
            }
            let c = acc * h / libm::sqrt(2.0 * PI);
            let fast = forward_transform(&f).coeff(&[k]).unwrap();
            assert!((c - fast).norm() < 1e-13);
            direct += c.norm_sqr();
        }
        let physical = h * vals.iter().map(|v| v * v).sum::<f64>();
        let spectral = direct * g.frequency_cell_volume();
        assert!(((physical - spectral) / physical).abs() < 1e-10);
    }

    #[test]
    fn zero_spectrum_inverts_to_zero() {
        let g = UniformGrid::cube(2, 0.0, 1.0, 8).unwrap();
        let out = inverse_transform(&SpectralField::zeros(g)).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn scaled_sine_mode() {
        let g = UniformGrid::line(0.0, 2.0 * PI, 64).unwrap();
        let f = RealField::from_fn(g.clone(), |x| libm::sin(x[0])).unwrap();
        let s = forward_transform(&f);
        let e2 = libm::exp(2.0);
        let out = inverse_transform(&s.scaled_by(&vec![e2; 64]).unwrap()).unwrap();
        for (j, v) in out.values().iter().enumerate() {
            let x = g.axis(0).coordinate(j);
            assert!((v - e2 * libm::sin(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn non_hermitian_multiplier_is_rejected() {
        let g = UniformGrid::line(0.0, 2.0 * PI, 16).unwrap();
        let f = RealField::from_fn(g, |x| libm::cos(x[0])).unwrap();
        let mut s = forward_transform(&f);
        let i1 = s.grid().spectral_index(&[1]).unwrap();
        s.coeffs_mut()[i1] *= 3.0;
        assert!(matches!(inverse_transform(&s), Err(Error::NonRealReconstruction { .. })));
    }

    #[test]
    fn l2_norm_does_not_overflow() {
        let g = UniformGrid::line(0.0, 1.0, 8).unwrap();
        let f = RealField::new(g, vec![1e300; 8]).unwrap();
        assert!((f.l2_norm() - 1e300).abs() / 1e300 < 1e-14);
    }

    #[test]
    fn rejects_non_finite_samples() {
        let g = UniformGrid::line(0.0, 1.0, 8).unwrap();
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert_eq!(RealField::new(g.clone(), v), Err(Error::NonFinite(3)));
        assert!(matches!(RealField::new(g, vec![0.0; 7]), Err(Error::ShapeMismatch { .. })));
    }
}
