//! Meyer-wavelet regularization for the backward heat conduction problem
//! with a time-dependent diffusivity factor.
//!
//! The backward problem `∂ₜu = κ(t)∇²u`, `u(·,T) = φ_T` is solved in the
//! frequency domain, where the exact backward propagator multiplies each
//! mode by `exp(‖ω‖² μ_T(t))` with `μ_T(t) = ∫ₜᵀ κ`. The regularized solver
//! first projects the data onto the Meyer multiresolution space `V_J`,
//! which removes every frequency outside the cube `(4π/3)·2^J`, and only
//! then applies the propagator.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the CLI and
//! the parallel sweep driver live in the `bhcp` companion crate.
//!
//! Module map:
//!
//! - [`grid`], [`fft`], [`field`]: periodic sampling grids and the
//!   continuous-normalized discrete Fourier transform.
//! - [`diffusivity`], [`quadrature`]: `κ(t)` and the accumulated
//!   diffusivity `μ`.
//! - [`meyer`]: Meyer scaling/wavelet functions and the level-`J`
//!   projection multiplier.
//! - [`regularizer`]: propagators, the level-selection rule and the
//!   regularized / unregularized solvers.
//! - [`benchmarks`]: closed-form test problems, noise injection, error
//!   metrics and experiment sweeps.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod benchmarks;
pub mod diffusivity;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod meyer;
pub mod quadrature;
pub mod regularizer;

pub use benchmarks::{BenchmarkProblem, ErrorReport, NoiseSpec, ProblemId};
pub use diffusivity::{DiffusivityProfile, MuSource, MuValue};
pub use error::{Error, Result};
pub use field::{RealField, SpectralField};
pub use grid::{Axis, UniformGrid};
pub use meyer::{MeyerLevel, SpectralMultiplier};
pub use regularizer::{RegularizationConfig, SolveReport};
