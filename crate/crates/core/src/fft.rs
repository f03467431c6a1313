//! Iterative radix-2 complex FFT and its row-major n-dimensional extension.
//!
//! Transforms are unnormalized in both directions: `forward` computes
//! `X_k = Σ x_j e^{−2πi jk/N}` and `inverse` the same sum with `+i`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Precomputed twiddles and bit-reversal table for one power-of-two length.
#[derive(Debug, Clone)]
pub struct Radix2Plan {
    len: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Radix2Plan {
    /// # Panics
    /// If `len` is not a power of two.
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "FFT length {len} is not a power of two");
        let twiddles = (0..len / 2)
            .map(|k| {
                let theta = -2.0 * PI * k as f64 / len as f64;
                Complex64::new(libm::cos(theta), libm::sin(theta))
            })
            .collect();
        let bits = len.trailing_zeros();
        let bitrev = (0..len)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Self { len, twiddles, bitrev }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn process(&self, buf: &mut [Complex64], direction: Direction) {
        debug_assert_eq!(buf.len(), self.len);
        let n = self.len;
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if direction == Direction::Inverse {
                        w = w.conj();
                    }
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

/// Transforms a row-major array of the given shape along every axis.
pub fn transform_nd(data: &mut [Complex64], shape: &[usize], direction: Direction) {
    let total: usize = shape.iter().product();
    debug_assert_eq!(data.len(), total);
    let mut inner = total;
    for &len in shape {
        inner /= len;
        let plan = Radix2Plan::new(len);
        let outer = total / (len * inner);
        let mut scratch = alloc::vec![Complex64::new(0.0, 0.0); len];
        for o in 0..outer {
            for i in 0..inner {
                let base = o * len * inner + i;
                for (j, s) in scratch.iter_mut().enumerate() {
                    *s = data[base + j * inner];
                }
                plan.process(&mut scratch, direction);
                for (j, s) in scratch.iter().enumerate() {
                    data[base + j * inner] = *s;
                }
            }
        }
    }
}
