//! Deterministic low-discrepancy points for the condition checkers.

use crate::tensor::{Mat3, Vec3};

const PRIMES: [u64; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

/// Halton sequence in up to 24 dimensions, skipping the origin.
#[derive(Debug, Clone)]
pub struct Halton {
    index: u64,
}

impl Default for Halton {
    fn default() -> Self {
        Self::new()
    }
}

impl Halton {
    pub fn new() -> Self {
        Halton { index: 1 }
    }

    /// Radical inverse of `n` in base `b`.
    pub fn radical_inverse(mut n: u64, b: u64) -> f64 {
        let inv = 1.0 / b as f64;
        let mut f = inv;
        let mut r = 0.0;
        while n > 0 {
            r += f * (n % b) as f64;
            n /= b;
            f *= inv;
        }
        r
    }

    /// Next point in `[0,1)^D`.
    pub fn next_point<const D: usize>(&mut self) -> [f64; D] {
        assert!(D <= PRIMES.len());
        let n = self.index;
        self.index += 1;
        core::array::from_fn(|d| Self::radical_inverse(n, PRIMES[d]))
    }
}

/// Maps a point of the cube to a direction on the unit sphere.
pub(crate) fn sphere(u: &[f64]) -> Vec3 {
    let z = 2.0 * u[0] - 1.0;
    let phi = 2.0 * core::f64::consts::PI * u[1];
    let r = libm::sqrt(f64::max(0.0, 1.0 - z * z));
    Vec3::new(r * libm::cos(phi), r * libm::sin(phi), z)
}

/// Maps nine cube coordinates to a unit-norm matrix.
pub(crate) fn unit_matrix(u: &[f64]) -> Mat3 {
    let m = Mat3::from_fn(|i, j| 2.0 * u[3 * i + j] - 1.0);
    let n = m.norm();
    if n > 0.0 {
        m.scale(1.0 / n)
    } else {
        Mat3::unit(0, 0)
    }
}

/// Radius in `[0, max]`, alternating between linear and logarithmic spacing
/// so that both small and large magnitudes are visited.
pub(crate) fn radius(u: f64, max: f64, logarithmic: bool) -> f64 {
    let floor = f64::min(1e-3, max);
    if logarithmic && max > floor {
        floor * libm::exp(u * libm::log(max / floor))
    } else {
        u * max
    }
}
