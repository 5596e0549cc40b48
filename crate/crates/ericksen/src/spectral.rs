//! Transforms between basis coefficients, spectra and grid fields, and the
//! pseudospectral derivatives of synthesized fields.

use std::f64::consts::PI;

use ericksen_core::{Mat3, Tensor3, Vec3};
use rustfft::num_complex::Complex64;

use crate::basis::{Basis, Mode, Parity};
use crate::grid::{GridError, SpectralGrid, Spectrum};

/// Real scalar values at the grid points.
pub type Field = Vec<f64>;
/// Three component fields.
pub type VectorField = [Field; 3];

#[derive(Debug, Clone, Copy)]
struct Entry {
    pos: usize,
    neg: usize,
    /// `c p`
    amp: Vec3,
    parity: Parity,
    zero: bool,
}

/// Precomputed placement of a basis in the spectral arrays of a grid.
#[derive(Debug, Clone)]
pub struct ModeTable {
    entries: Vec<Entry>,
    len: usize,
}

impl ModeTable {
    pub fn new<T: Mode>(grid: &SpectralGrid, basis: &Basis<T>) -> Self {
        let entries = basis
            .modes()
            .iter()
            .map(|m| {
                let k = m.k();
                Entry {
                    pos: grid.index_of(k),
                    neg: grid.index_of([-k[0], -k[1], -k[2]]),
                    amp: m.vector().scale(m.amplitude()),
                    parity: m.parity(),
                    zero: k == [0, 0, 0],
                }
            })
            .collect();
        ModeTable {
            entries,
            len: grid.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Spectra `û(k)` of `Σ cᵢ zᵢ`.
    pub fn synthesize(&self, coeffs: &[f64]) -> [Spectrum; 3] {
        assert_eq!(coeffs.len(), self.entries.len(), "coefficient count");
        let mut s: [Spectrum; 3] = std::array::from_fn(|_| vec![Complex64::default(); self.len]);
        for (e, &a) in self.entries.iter().zip(coeffs) {
            for c in 0..3 {
                let v = a * e.amp.0[c];
                if e.zero {
                    s[c][e.pos] += v;
                    continue;
                }
                let half = 0.5 * v;
                match e.parity {
                    Parity::Cos => {
                        s[c][e.pos] += half;
                        s[c][e.neg] += half;
                    }
                    Parity::Sin => {
                        s[c][e.pos] += Complex64::new(0.0, -half);
                        s[c][e.neg] += Complex64::new(0.0, half);
                    }
                }
            }
        }
        s
    }

    /// Grid inner products `(u, zᵢ)` from the spectra of a real field `u`.
    pub fn analyze(&self, spectra: [&Spectrum; 3]) -> Vec<f64> {
        let vol = SpectralGrid::volume();
        self.entries
            .iter()
            .map(|e| {
                let mut acc = 0.0;
                for c in 0..3 {
                    let u = spectra[c][e.pos];
                    acc += e.amp.0[c]
                        * match (e.zero, e.parity) {
                            (true, _) => u.re,
                            (false, Parity::Cos) => u.re,
                            (false, Parity::Sin) => -u.im,
                        };
                }
                vol * acc
            })
            .collect()
    }
}

/// Synthesized grid values of a coefficient vector.
pub fn synthesize_field(grid: &SpectralGrid, table: &ModeTable, coeffs: &[f64]) -> VectorField {
    let s = table.synthesize(coeffs);
    let mut f = grid.grid_fields(&[&s[0], &s[1], &s[2]]).expect("grid shape");
    let c = f.pop().unwrap();
    let b = f.pop().unwrap();
    let a = f.pop().unwrap();
    [a, b, c]
}

/// Grid inner products of a vector field with every basis mode.
pub fn project(grid: &SpectralGrid, table: &ModeTable, field: &VectorField) -> Result<Vec<f64>, GridError> {
    let s = grid.spectra(&[&field[0], &field[1], &field[2]])?;
    Ok(table.analyze([&s[0], &s[1], &s[2]]))
}

/// `L²` norm of a vector field by grid quadrature.
pub fn l2_norm(grid: &SpectralGrid, field: &VectorField) -> f64 {
    let sum: f64 = (0..grid.len())
        .map(|i| field[0][i].powi(2) + field[1][i].powi(2) + field[2][i].powi(2))
        .sum();
    (sum * grid.cell_volume()).sqrt()
}

/// Grid values of a synthesized director field and its first two derivatives.
#[derive(Debug, Clone)]
pub struct DirectorFields {
    pub d: VectorField,
    /// `grad[i][j] = ∂_j d_i`
    pub grad: [[Field; 3]; 3],
    /// `hess[k][a][b] = ∂_a ∂_b d_k`, filled for `a ≤ b` and mirrored.
    pub hess: Option<[[[Field; 3]; 3]; 3]>,
}

impl DirectorFields {
    pub fn d_at(&self, p: usize) -> Vec3 {
        Vec3::new(self.d[0][p], self.d[1][p], self.d[2][p])
    }

    pub fn grad_at(&self, p: usize) -> Mat3 {
        Mat3::from_fn(|i, j| self.grad[i][j][p])
    }

    /// `H_jkl = ∂_j ∂_l d_k` at point `p`.
    pub fn hess_at(&self, p: usize) -> Tensor3 {
        let h = self.hess.as_ref().expect("second derivatives not computed");
        Tensor3::from_fn(|j, k, l| h[k][j][l][p])
    }

    /// `Δd` at point `p`.
    pub fn laplacian_at(&self, p: usize) -> Vec3 {
        let h = self.hess.as_ref().expect("second derivatives not computed");
        let lap = |k: usize| h[k][0][0][p] + h[k][1][1][p] + h[k][2][2][p];
        Vec3::new(lap(0), lap(1), lap(2))
    }
}

fn mul_ik(grid: &SpectralGrid, s: &Spectrum, axes: &[usize]) -> Spectrum {
    s.iter()
        .enumerate()
        .map(|(idx, &c)| {
            let k = grid.derivative_wavevector(idx);
            let mut f = Complex64::new(1.0, 0.0);
            for &a in axes {
                f *= Complex64::new(0.0, k[a]);
            }
            c * f
        })
        .collect()
}

/// Values, gradient and optionally second derivatives of `Σ cᵢ zᵢ`.
pub fn director_fields(
    grid: &SpectralGrid,
    table: &ModeTable,
    coeffs: &[f64],
    second: bool,
) -> DirectorFields {
    let s = table.synthesize(coeffs);
    let mut spectra: Vec<Spectrum> = Vec::new();
    for c in 0..3 {
        spectra.push(s[c].clone());
    }
    for c in 0..3 {
        for j in 0..3 {
            spectra.push(mul_ik(grid, &s[c], &[j]));
        }
    }
    let pairs: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    if second {
        for c in 0..3 {
            for &(a, b) in &pairs {
                spectra.push(mul_ik(grid, &s[c], &[a, b]));
            }
        }
    }
    let refs: Vec<&Spectrum> = spectra.iter().collect();
    let mut fields = grid.grid_fields(&refs).expect("grid shape").into_iter();
    let d: VectorField = std::array::from_fn(|_| fields.next().unwrap());
    let grad: [[Field; 3]; 3] =
        std::array::from_fn(|_| std::array::from_fn(|_| fields.next().unwrap()));
    let hess = if second {
        let mut h: [[[Field; 3]; 3]; 3] = Default::default();
        for hc in h.iter_mut() {
            for &(a, b) in &pairs {
                let f = fields.next().unwrap();
                hc[b][a] = f.clone();
                hc[a][b] = f;
            }
        }
        Some(h)
    } else {
        None
    };
    DirectorFields { d, grad, hess }
}

/// Grid values of a synthesized velocity field, its gradient and divergence.
#[derive(Debug, Clone)]
pub struct VelocityFields {
    pub v: VectorField,
    /// `grad[i][j] = ∂_j v_i`
    pub grad: [[Field; 3]; 3],
}

impl VelocityFields {
    pub fn v_at(&self, p: usize) -> Vec3 {
        Vec3::new(self.v[0][p], self.v[1][p], self.v[2][p])
    }

    pub fn grad_at(&self, p: usize) -> Mat3 {
        Mat3::from_fn(|i, j| self.grad[i][j][p])
    }

    pub fn divergence(&self) -> Field {
        (0..self.v[0].len())
            .map(|p| self.grad[0][0][p] + self.grad[1][1][p] + self.grad[2][2][p])
            .collect()
    }
}

pub fn velocity_fields(grid: &SpectralGrid, table: &ModeTable, coeffs: &[f64]) -> VelocityFields {
    let s = table.synthesize(coeffs);
    let mut spectra: Vec<Spectrum> = Vec::new();
    for c in 0..3 {
        spectra.push(s[c].clone());
    }
    for c in 0..3 {
        for j in 0..3 {
            spectra.push(mul_ik(grid, &s[c], &[j]));
        }
    }
    let refs: Vec<&Spectrum> = spectra.iter().collect();
    let mut fields = grid.grid_fields(&refs).expect("grid shape").into_iter();
    let v: VectorField = std::array::from_fn(|_| fields.next().unwrap());
    let grad = std::array::from_fn(|_| std::array::from_fn(|_| fields.next().unwrap()));
    VelocityFields { v, grad }
}

/// Spectrum of `div T` for a matrix field, `(div T)_i = Σ_j ∂_j T_ij`.
pub fn divergence_spectrum(grid: &SpectralGrid, t: &[Spectrum; 9]) -> [Spectrum; 3] {
    std::array::from_fn(|i| {
        (0..grid.len())
            .map(|idx| {
                let k = grid.derivative_wavevector(idx);
                let mut acc = Complex64::default();
                for j in 0..3 {
                    acc += t[3 * i + j][idx] * Complex64::new(0.0, k[j]);
                }
                acc
            })
            .collect()
    })
}

/// Synthesizes a field from pointwise values of a function of position.
pub fn sample_field(grid: &SpectralGrid, f: impl Fn([f64; 3]) -> Vec3) -> VectorField {
    let mut out: VectorField = std::array::from_fn(|_| vec![0.0; grid.len()]);
    for p in 0..grid.len() {
        let v = f(grid.point(p));
        for c in 0..3 {
            out[c][p] = v.0[c];
        }
    }
    out
}

/// `(2π)^{3/2}`, the coefficient of a unit constant field on the normalized constant mode.
pub fn constant_mode_weight() -> f64 {
    (2.0 * PI).powf(1.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_director_basis, build_velocity_basis};
    use ericksen_core::Tensor4;

    fn grid() -> SpectralGrid {
        SpectralGrid::new(16).unwrap()
    }

    fn pseudo(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    #[test]
    fn synthesized_mode_matches_pointwise_value() {
        let g = grid();
        let b = build_director_basis(&Tensor4::identity(), 1.0, 2, None).unwrap();
        let t = ModeTable::new(&g, &b);
        for i in [0, 5, 40, 100] {
            let mut c = vec![0.0; b.len()];
            c[i] = 1.0;
            let f = synthesize_field(&g, &t, &c);
            let m = &b.modes()[i];
            for p in (0..g.len()).step_by(37) {
                let v = m.value_at(&g.point(p));
                for k in 0..3 {
                    assert!((f[k][p] - v.0[k]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn analyze_inverts_synthesize() {
        let g = grid();
        let b = build_velocity_basis(g.cutoff(), None);
        let t = ModeTable::new(&g, &b);
        let mut seed = 3;
        let c: Vec<f64> = (0..b.len()).map(|_| pseudo(&mut seed)).collect();
        let f = synthesize_field(&g, &t, &c);
        let back = project(&g, &t, &f).unwrap();
        for (x, y) in c.iter().zip(&back) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn laplacian_of_sine_mode() {
        let g = grid();
        let b = build_director_basis(&Tensor4::identity(), 1.0, g.cutoff(), None).unwrap();
        let t = ModeTable::new(&g, &b);
        let idx = b
            .modes()
            .iter()
            .position(|m| m.k == [1, 0, 0] && m.vector == Vec3::unit(1) && m.parity == Parity::Sin)
            .unwrap();
        let a = 0.7;
        let mut c = vec![0.0; b.len()];
        c[idx] = a / b.modes()[idx].amplitude();
        let f = director_fields(&g, &t, &c, true);
        for p in (0..g.len()).step_by(11) {
            let x = g.point(p);
            let lap = f.laplacian_at(p);
            assert!((lap - Vec3::new(0.0, -a * x[0].sin(), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn velocity_fields_are_solenoidal() {
        let g = grid();
        let b = build_velocity_basis(g.cutoff(), None);
        let t = ModeTable::new(&g, &b);
        let mut seed = 9;
        let c: Vec<f64> = (0..b.len()).map(|_| pseudo(&mut seed)).collect();
        let f = velocity_fields(&g, &t, &c);
        let div = f.divergence();
        let scale = f.grad[0][0].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(div.iter().all(|x| x.abs() < 1e-12 * scale.max(1.0)));
    }

    #[test]
    fn constant_field_projection() {
        let g = grid();
        let b = build_director_basis(&Tensor4::identity(), 1.0, 1, None).unwrap();
        let t = ModeTable::new(&g, &b);
        let f = sample_field(&g, |_| Vec3::unit(0));
        let c = project(&g, &t, &f).unwrap();
        assert!((c[0] - constant_mode_weight()).abs() < 1e-12);
        assert!(c[1..].iter().all(|x| x.abs() < 1e-12));
    }
}
