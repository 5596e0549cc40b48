//! Galerkin eigenbases on the periodic box.
//!
//! Each real basis field is `c p cos(k·x)` or `c p sin(k·x)` with `k` in the half
//! space whose first nonzero component is positive, `|p| = 1` and
//! `c = √2/(2π)^{3/2}`; the constant fields use `c = 1/(2π)^{3/2}`. Both bases are
//! `L²`-orthonormal.

use std::f64::consts::PI;

use ericksen_core::energy::check_legendre_hadamard_with;
use ericksen_core::{FreeEnergy, Mat3, Tensor4, Vec3};
use nalgebra::{Matrix3, SymmetricEigen};
use thiserror::Error;

use crate::grid::WaveVector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("elasticity tensor is not pair-symmetric (violation {0:e})")]
    NotSymmetric(f64),
    #[error("elasticity tensor fails the Legendre-Hadamard condition (worst form value {0:e})")]
    NotElliptic(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Cos,
    Sin,
}

impl Parity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Cos => "cos",
            Parity::Sin => "sin",
        }
    }
}

/// Common view of a real Fourier basis field.
pub trait Mode {
    fn k(&self) -> WaveVector;
    fn vector(&self) -> Vec3;
    fn parity(&self) -> Parity;

    fn k_vec(&self) -> Vec3 {
        let k = self.k();
        Vec3::new(k[0] as f64, k[1] as f64, k[2] as f64)
    }

    fn k_sq(&self) -> f64 {
        self.k_vec().norm_sq()
    }

    /// Normalization constant `c`.
    fn amplitude(&self) -> f64 {
        if self.k() == [0, 0, 0] {
            (2.0 * PI).powf(-1.5)
        } else {
            2f64.sqrt() * (2.0 * PI).powf(-1.5)
        }
    }

    /// Pointwise value at `x`.
    fn value_at(&self, x: &[f64; 3]) -> Vec3 {
        let k = self.k_vec();
        let phase = k.0[0] * x[0] + k.0[1] * x[1] + k.0[2] * x[2];
        let w = match self.parity() {
            Parity::Cos => phase.cos(),
            Parity::Sin => phase.sin(),
        };
        self.vector().scale(self.amplitude() * w)
    }
}

/// Divergence-free Stokes eigenfield with eigenvalue `|k|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityMode {
    pub k: WaveVector,
    pub polarization: Vec3,
    pub parity: Parity,
}

impl Mode for VelocityMode {
    fn k(&self) -> WaveVector {
        self.k
    }
    fn vector(&self) -> Vec3 {
        self.polarization
    }
    fn parity(&self) -> Parity {
        self.parity
    }
}

/// Eigenfield of `z ↦ −div(Λ:∇z)` with eigenvalue `σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectorMode {
    pub k: WaveVector,
    pub vector: Vec3,
    pub sigma: f64,
    pub parity: Parity,
}

impl Mode for DirectorMode {
    fn k(&self) -> WaveVector {
        self.k
    }
    fn vector(&self) -> Vec3 {
        self.vector
    }
    fn parity(&self) -> Parity {
        self.parity
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Basis<T> {
    modes: Vec<T>,
}

pub type VelocityBasis = Basis<VelocityMode>;
pub type DirectorBasis = Basis<DirectorMode>;

impl<T> Basis<T> {
    pub fn modes(&self) -> &[T] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
}

impl<T: Mode> Basis<T> {
    /// Largest `|k|_∞` among the modes.
    pub fn max_wavenumber(&self) -> i32 {
        self.modes
            .iter()
            .map(|m| m.k().iter().map(|x| x.abs()).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }
}

/// Wavevectors with `|k|_∞ ≤ cutoff` whose first nonzero component is positive.
pub fn half_space(cutoff: i32, include_zero: bool) -> Vec<WaveVector> {
    let mut out = Vec::new();
    for a in -cutoff..=cutoff {
        for b in -cutoff..=cutoff {
            for c in -cutoff..=cutoff {
                let k = [a, b, c];
                let first = k.iter().copied().find(|&x| x != 0);
                match first {
                    None if include_zero => out.push(k),
                    Some(x) if x > 0 => out.push(k),
                    _ => {}
                }
            }
        }
    }
    out
}

fn k_sq(k: &WaveVector) -> i64 {
    k.iter().map(|&x| (x as i64) * (x as i64)).sum()
}

/// Leray projection of a single Fourier amplitude: `g − (k·g/|k|²) k`.
pub fn leray(k: &Vec3, g: &Vec3) -> Vec3 {
    let kk = k.norm_sq();
    if kk == 0.0 {
        return Vec3::ZERO;
    }
    *g - k.scale(k.dot(g) / kk)
}

/// The two transverse polarizations at `k ≠ 0`: `m = e_j × k` with the axis `j` of
/// smallest `|k_j|` (first on ties), then `k × m`.
pub fn polarizations(k: &WaveVector) -> [Vec3; 2] {
    let kv = Vec3::new(k[0] as f64, k[1] as f64, k[2] as f64);
    let mut j = 0;
    for i in 1..3 {
        if k[i].abs() < k[j].abs() {
            j = i;
        }
    }
    let m = Vec3::unit(j).cross(&kv);
    let n = kv.cross(&m);
    [m.normalized().unwrap(), n.normalized().unwrap()]
}

/// Stokes eigenbasis with `0 < |k|_∞ ≤ cutoff`, sorted by `|k|²`, then `k`,
/// polarization and parity; truncated to `n_modes` if given.
pub fn build_velocity_basis(cutoff: i32, n_modes: Option<usize>) -> VelocityBasis {
    let mut keyed = Vec::new();
    for k in half_space(cutoff, false) {
        for (pi, p) in polarizations(&k).into_iter().enumerate() {
            for parity in [Parity::Cos, Parity::Sin] {
                keyed.push((
                    (k_sq(&k), k, pi, parity),
                    VelocityMode {
                        k,
                        polarization: p,
                        parity,
                    },
                ));
            }
        }
    }
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let mut modes: Vec<_> = keyed.into_iter().map(|(_, m)| m).collect();
    if let Some(n) = n_modes {
        modes.truncate(n);
    }
    Basis { modes }
}

/// Fourier symbol `M(k)_im = Σ_jl Λ_ijml k_j k_l` of `−div(Λ:∇·)`.
pub fn symbol_matrix(lambda: &Tensor4, k: &Vec3) -> Mat3 {
    lambda.symbol(k)
}

/// Eigenpairs of a symmetric 3×3 matrix with a deterministic frame inside
/// degenerate eigenspaces: each cluster's projector is applied to `e₁, e₂, e₃`
/// and the images are orthonormalized in that order.
pub fn deterministic_eigen(m: &Mat3) -> Vec<(f64, Vec3)> {
    let a = Matrix3::from_fn(|i, j| 0.5 * (m.0[i][j] + m.0[j][i]));
    let eig = SymmetricEigen::new(a);
    let mut pairs: Vec<(f64, Vec3)> = (0..3)
        .map(|i| {
            let v = eig.eigenvectors.column(i);
            (eig.eigenvalues[i], Vec3::new(v[0], v[1], v[2]))
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let scale = pairs.iter().fold(1.0f64, |s, p| s.max(p.0.abs()));
    let mut clusters: Vec<Vec<(f64, Vec3)>> = Vec::new();
    for p in pairs {
        match clusters.last_mut() {
            Some(c) if (p.0 - c[0].0).abs() <= 1e-10 * scale => c.push(p),
            _ => clusters.push(vec![p]),
        }
    }
    let mut out = Vec::new();
    for c in clusters {
        let proj = |x: &Vec3| {
            c.iter()
                .fold(Vec3::ZERO, |acc, (_, v)| acc + v.scale(v.dot(x)))
        };
        let mut frame: Vec<Vec3> = Vec::new();
        for axis in 0..3 {
            if frame.len() == c.len() {
                break;
            }
            let mut w = proj(&Vec3::unit(axis));
            for f in &frame {
                w -= f.scale(f.dot(&w));
            }
            // a second pass keeps the frame orthogonal to rounding level
            for f in &frame {
                w -= f.scale(f.dot(&w));
            }
            if w.norm() > 1e-6 {
                frame.push(w.normalized().unwrap());
            }
        }
        for v in frame {
            let rayleigh = v.dot(&m.sym().mul_vec(&v));
            out.push((rayleigh, v));
        }
    }
    out
}

/// Director eigenbasis for `Λ` with `|k|_∞ ≤ cutoff` including the constants,
/// sorted by `σ`, then `k`, eigenvector index and parity; truncated to `n_modes`.
///
/// Refused unless `Λ` is pair-symmetric and passes the Legendre–Hadamard check with
/// constant `eta`.
pub fn build_director_basis(
    lambda: &Tensor4,
    eta: f64,
    cutoff: i32,
    n_modes: Option<usize>,
) -> Result<DirectorBasis, BasisError> {
    let asym = lambda.pair_asymmetry();
    if asym > 1e-12 * lambda.max_abs().max(1.0) {
        return Err(BasisError::NotSymmetric(asym));
    }
    let lh = check_legendre_hadamard_with(lambda, eta, 2000);
    if !lh.passed {
        return Err(BasisError::NotElliptic(lh.worst_value));
    }
    let mut keyed = Vec::new();
    for k in half_space(cutoff, true) {
        let kv = Vec3::new(k[0] as f64, k[1] as f64, k[2] as f64);
        let pairs = if k == [0, 0, 0] {
            (0..3).map(|i| (0.0, Vec3::unit(i))).collect()
        } else {
            deterministic_eigen(&symbol_matrix(lambda, &kv))
        };
        let parities: &[Parity] = if k == [0, 0, 0] {
            &[Parity::Cos]
        } else {
            &[Parity::Cos, Parity::Sin]
        };
        for (ei, (sigma, v)) in pairs.into_iter().enumerate() {
            if k != [0, 0, 0] && sigma <= 0.0 {
                return Err(BasisError::NotElliptic(sigma));
            }
            for &parity in parities {
                keyed.push((
                    ((sigma * (1u64 << 30) as f64).round() as i64, k, ei, parity),
                    DirectorMode {
                        k,
                        vector: v,
                        sigma,
                        parity,
                    },
                ));
            }
        }
    }
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let mut modes: Vec<_> = keyed.into_iter().map(|(_, m)| m).collect();
    if let Some(n) = n_modes {
        modes.truncate(n);
    }
    Ok(Basis { modes })
}

pub fn director_basis_for<M: FreeEnergy + ?Sized>(
    model: &M,
    cutoff: i32,
    n_modes: Option<usize>,
) -> Result<DirectorBasis, BasisError> {
    build_director_basis(&model.lambda(), model.ellipticity(), cutoff, n_modes)
}

/// Norm-equivalence constants of the retained director span (nonconstant modes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    /// `min σ/|k|²`, the constant in `‖div(Λ:∇z)‖ ≥ c_Λ ‖Δz‖`.
    pub c_lambda: f64,
    /// `max ‖z‖_{H²}/‖Δz‖ = max √(1+|k|²+|k|⁴)/|k|²`.
    pub c_h2: f64,
    /// `max ‖z‖_{H²}/‖div(Λ:∇z)‖ = max √(1+|k|²+|k|⁴)/σ`.
    pub h2_regularity: f64,
}

pub fn calibrate(basis: &DirectorBasis) -> Calibration {
    let mut c_lambda = f64::INFINITY;
    let mut c_h2 = 0.0f64;
    let mut reg = 0.0f64;
    for m in basis.modes() {
        let kk = m.k_sq();
        if kk == 0.0 {
            continue;
        }
        let h2 = (1.0 + kk + kk * kk).sqrt();
        c_lambda = c_lambda.min(m.sigma / kk);
        c_h2 = c_h2.max(h2 / kk);
        reg = reg.max(h2 / m.sigma);
    }
    Calibration {
        c_lambda,
        c_h2,
        h2_regularity: reg,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ericksen_core::SimplifiedOseenFrank;

    #[test]
    fn velocity_count_and_transversality() {
        let b = build_velocity_basis(1, None);
        let shell: Vec<_> = b.modes().iter().filter(|m| m.k_sq() == 1.0).collect();
        assert_eq!(shell.len(), 12);
        for m in b.modes() {
            assert_eq!(m.k_vec().dot(&m.polarization), 0.0);
            assert!((m.polarization.norm() - 1.0).abs() < 1e-15);
        }
        assert_eq!(b.modes()[0].k_sq(), 1.0);
    }

    #[test]
    fn leray_example() {
        let p = leray(&Vec3::unit(0), &Vec3::new(1.0, 1.0, 0.0));
        assert_eq!(p, Vec3::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn director_counts_for_identity() {
        let b = build_director_basis(&Tensor4::identity(), 1.0, 1, None).unwrap();
        let zero: Vec<_> = b.modes().iter().filter(|m| m.k == [0, 0, 0]).collect();
        assert_eq!(zero.len(), 3);
        assert!(zero.iter().all(|m| m.sigma == 0.0));
        let shell: Vec<_> = b.modes().iter().filter(|m| m.k_sq() == 1.0).collect();
        assert_eq!(shell.len(), 18);
        assert!(shell.iter().all(|m| (m.sigma - 1.0).abs() < 1e-14));
        assert_eq!(b.modes()[3].sigma, 1.0);
    }

    #[test]
    fn oseen_frank_symbol_and_eigen() {
        let m = SimplifiedOseenFrank::new(2.0, 1.0, 0.0).unwrap();
        let s = symbol_matrix(&m.lambda(), &Vec3::unit(0));
        assert_eq!(s, Mat3::diag([4.0, 2.0, 2.0]));
        let e = deterministic_eigen(&s);
        assert_eq!(e.len(), 3);
        assert!((e[0].0 - 2.0).abs() < 1e-12 && (e[2].0 - 4.0).abs() < 1e-12);
        assert!((e[0].1 - Vec3::unit(1)).norm() < 1e-12);
        assert!((e[1].1 - Vec3::unit(2)).norm() < 1e-12);
    }

    #[test]
    fn eigen_lower_bound() {
        let m = SimplifiedOseenFrank::new(0.7, 1.3, 0.2).unwrap();
        let b = director_basis_for(&m, 3, None).unwrap();
        for mode in b.modes() {
            assert!(mode.sigma >= m.ellipticity() * mode.k_sq() * (1.0 - 1e-12));
            let s = symbol_matrix(&m.lambda(), &mode.k_vec());
            let r = s.mul_vec(&mode.vector) - mode.vector.scale(mode.sigma);
            assert!(r.norm() < 1e-10 * (1.0 + mode.sigma));
        }
    }

    #[test]
    fn refuses_non_elliptic() {
        let bad = Tensor4::identity().scale(-1.0);
        assert!(matches!(
            build_director_basis(&bad, 1.0, 2, None),
            Err(BasisError::NotElliptic(_))
        ));
        let mut asym = Tensor4::identity();
        asym.0[0][1][2][2] = 0.3;
        assert!(matches!(
            build_director_basis(&asym, 1.0, 2, None),
            Err(BasisError::NotSymmetric(_))
        ));
    }

    #[test]
    fn calibration_of_laplacian() {
        let b = build_director_basis(&Tensor4::identity(), 1.0, 3, None).unwrap();
        let c = calibrate(&b);
        assert!((c.c_lambda - 1.0).abs() < 1e-14);
        assert!((c.c_h2 - 3f64.sqrt()).abs() < 1e-14);
        assert!((c.h2_regularity - 3f64.sqrt()).abs() < 1e-14);
    }
}
