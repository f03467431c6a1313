//! Uniform periodic sampling lattices.
//!
//! Samples sit at `x_j = a + j·(b − a)/N` for `j = 0..N` on every axis; the
//! point `b` is the periodic image of `a`. Fields are stored row-major with
//! the last axis varying fastest.
//!
//! Spectral coefficients use the usual FFT storage order per axis: slot `j`
//! holds wave number `k = j` for `j < N/2` and `k = j − N` otherwise, so the
//! representable range is `k ∈ [−N/2, N/2)`. [`UniformGrid::frequency_at`]
//! is the single place where wave numbers become angular frequencies.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Smallest accepted sample count per axis.
pub const MIN_COUNT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(lower: f64, upper: f64, count: usize) -> Self {
        Self { lower, upper, count }
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn spacing(&self) -> f64 {
        self.length() / self.count as f64
    }

    pub fn coordinate(&self, index: usize) -> f64 {
        self.lower + index as f64 * self.spacing()
    }

    /// Largest representable angular frequency, `π N / (b − a)`.
    pub fn nyquist(&self) -> f64 {
        PI * self.count as f64 / self.length()
    }

    /// Signed wave number stored in slot `index`.
    pub fn wavenumber(&self, index: usize) -> i64 {
        let n = self.count as i64;
        let j = index as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Storage slot of wave number `k`, if representable.
    pub fn slot(&self, k: i64) -> Option<usize> {
        let n = self.count as i64;
        if k < -n / 2 || k >= n / 2 {
            return None;
        }
        Some(if k >= 0 { k as usize } else { (k + n) as usize })
    }

    /// Angular frequencies of every storage slot.
    pub fn frequencies(&self) -> Vec<f64> {
        let scale = 2.0 * PI / self.length();
        (0..self.count)
            .map(|j| scale * self.wavenumber(j) as f64)
            .collect()
    }

    fn validate(&self, index: usize) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite()) {
            return Err(Error::InvalidGrid(format!("axis {index}: non-finite bounds")));
        }
        if self.upper <= self.lower {
            return Err(Error::InvalidGrid(format!(
                "axis {index}: upper bound {} must exceed lower bound {}",
                self.upper, self.lower
            )));
        }
        if self.count < MIN_COUNT || !self.count.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "axis {index}: count {} must be a power of two >= {MIN_COUNT}",
                self.count
            )));
        }
        Ok(())
    }
}

/// An n-dimensional periodic box sampled with power-of-two counts.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformGrid {
    axes: Vec<Axis>,
}

impl UniformGrid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidGrid("grid needs at least one axis".into()));
        }
        for (i, axis) in axes.iter().enumerate() {
            axis.validate(i)?;
        }
        let grid = Self { axes };
        if !(grid.cell_volume() > 0.0) {
            return Err(Error::InvalidGrid("cell volume is not positive".into()));
        }
        Ok(grid)
    }

    /// Same axis repeated `dim` times.
    pub fn cube(dim: usize, lower: f64, upper: f64, count: usize) -> Result<Self> {
        Self::new(core::iter::repeat(Axis::new(lower, upper, count)).take(dim).collect())
    }

    pub fn line(lower: f64, upper: f64, count: usize) -> Result<Self> {
        Self::cube(1, lower, upper, count)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    /// Physical cell volume `h = Π (bᵢ − aᵢ)/Nᵢ`.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    /// Volume of the periodic box.
    pub fn volume(&self) -> f64 {
        self.axes.iter().map(Axis::length).product()
    }

    /// Frequency-lattice cell volume `Π 2π/(bᵢ − aᵢ)`.
    pub fn frequency_cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| 2.0 * PI / a.length()).product()
    }

    /// Smallest per-axis Nyquist frequency.
    pub fn min_nyquist(&self) -> f64 {
        self.axes
            .iter()
            .map(Axis::nyquist)
            .fold(f64::INFINITY, f64::min)
    }

    /// `ωᵢ = 2π kᵢ / (bᵢ − aᵢ)` for a centered wave vector `k`.
    pub fn frequency_at(&self, k: &[i64]) -> Result<Vec<f64>> {
        if k.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: k.len() });
        }
        k.iter()
            .zip(&self.axes)
            .enumerate()
            .map(|(i, (&ki, axis))| {
                axis.slot(ki)
                    .map(|_| 2.0 * PI * ki as f64 / axis.length())
                    .ok_or(Error::IndexOutOfRange { axis: i, k: ki, count: axis.count })
            })
            .collect()
    }

    /// Flat storage index of a centered wave vector.
    pub fn spectral_index(&self, k: &[i64]) -> Result<usize> {
        if k.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: k.len() });
        }
        let mut flat = 0;
        for (i, (&ki, axis)) in k.iter().zip(&self.axes).enumerate() {
            let slot = axis
                .slot(ki)
                .ok_or(Error::IndexOutOfRange { axis: i, k: ki, count: axis.count })?;
            flat = flat * axis.count + slot;
        }
        Ok(flat)
    }

    /// Splits a flat row-major index into per-axis indices.
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for (slot, axis) in out.iter_mut().zip(&self.axes).rev() {
            *slot = flat % axis.count;
            flat /= axis.count;
        }
    }

    /// Physical coordinates of the sample at a flat index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut idx = alloc::vec![0; self.dim()];
        self.unravel(flat, &mut idx);
        idx.iter()
            .zip(&self.axes)
            .map(|(&j, axis)| axis.coordinate(j))
            .collect()
    }

    /// Samples `f` at every grid point, in storage order.
    pub fn sample<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> Vec<f64> {
        let coords: Vec<Vec<f64>> = self
            .axes
            .iter()
            .map(|a| (0..a.count).map(|j| a.coordinate(j)).collect())
            .collect();
        let mut idx = alloc::vec![0usize; self.dim()];
        let mut x = alloc::vec![0.0; self.dim()];
        (0..self.len())
            .map(|flat| {
                self.unravel(flat, &mut idx);
                for (i, &j) in idx.iter().enumerate() {
                    x[i] = coords[i][j];
                }
                f(&x)
            })
            .collect()
    }

    /// `Σᵢ ωᵢ²` for every spectral slot, in storage order.
    pub fn frequency_norms_squared(&self) -> Vec<f64> {
        self.map_frequencies(|w| w.iter().map(|x| x * x).sum())
    }

    /// Evaluates `f(ω)` for every spectral slot, in storage order.
    pub fn map_frequencies<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> Vec<f64> {
        let freqs: Vec<Vec<f64>> = self.axes.iter().map(Axis::frequencies).collect();
        let mut idx = alloc::vec![0usize; self.dim()];
        let mut w = alloc::vec![0.0; self.dim()];
        (0..self.len())
            .map(|flat| {
                self.unravel(flat, &mut idx);
                for (i, &j) in idx.iter().enumerate() {
                    w[i] = freqs[i][j];
                }
                f(&w)
            })
            .collect()
    }

    /// Wave vector of every spectral slot.
    pub fn wave_vector(&self, flat: usize) -> Vec<i64> {
        let mut idx = alloc::vec![0; self.dim()];
        self.unravel(flat, &mut idx);
        idx.iter()
            .zip(&self.axes)
            .map(|(&j, axis)| axis.wavenumber(j))
            .collect()
    }
}
