//! Field-level free energy and its variational derivative on the grid.

use ericksen_core::{variational_derivative_pointwise, FreeEnergy};
use rustfft::num_complex::Complex64;

use crate::grid::{SpectralGrid, Spectrum};
use crate::spectral::{director_fields, DirectorFields, Field, ModeTable, VectorField};

/// `𝓕(d) = ∫ F(d, ∇d)` by grid quadrature.
pub fn total_energy<M: FreeEnergy + ?Sized>(model: &M, grid: &SpectralGrid, f: &DirectorFields) -> f64 {
    let sum: f64 = (0..grid.len())
        .map(|p| model.evaluate(&f.d_at(p), &f.grad_at(p)))
        .sum();
    sum * grid.cell_volume()
}

/// Energy of a coefficient state in the basis described by `table`.
pub fn total_energy_of<M: FreeEnergy + ?Sized>(
    model: &M,
    grid: &SpectralGrid,
    table: &ModeTable,
    coeffs: &[f64],
) -> f64 {
    total_energy(model, grid, &director_fields(grid, table, coeffs, false))
}

/// `q = ∂F/∂h − div(∂F/∂S)` with the divergence taken spectrally; returns the
/// spectra of `q` (all modes, Nyquist derivative zeroed).
pub fn variational_derivative_spectra<M: FreeEnergy + ?Sized>(
    model: &M,
    grid: &SpectralGrid,
    f: &DirectorFields,
) -> [Spectrum; 3] {
    let n = grid.len();
    let mut comps: Vec<Field> = vec![vec![0.0; n]; 12];
    for p in 0..n {
        let (gh, gs) = model.gradients(&f.d_at(p), &f.grad_at(p));
        for c in 0..3 {
            comps[c][p] = gh.0[c];
        }
        for i in 0..3 {
            for j in 0..3 {
                comps[3 + 3 * i + j][p] = gs.0[i][j];
            }
        }
    }
    let refs: Vec<&[f64]> = comps.iter().map(|c| c.as_slice()).collect();
    let s = grid.spectra(&refs).expect("grid shape");
    std::array::from_fn(|i| {
        (0..n)
            .map(|idx| {
                let k = grid.derivative_wavevector(idx);
                let mut div = Complex64::default();
                for j in 0..3 {
                    div += s[3 + 3 * i + j][idx] * Complex64::new(0.0, k[j]);
                }
                s[i][idx] - div
            })
            .collect()
    })
}

/// Grid values of `q` in divergence form.
pub fn variational_derivative_divergence<M: FreeEnergy + ?Sized>(
    model: &M,
    grid: &SpectralGrid,
    f: &DirectorFields,
) -> VectorField {
    let s = variational_derivative_spectra(model, grid, f);
    let mut out = grid.grid_fields(&[&s[0], &s[1], &s[2]]).expect("grid shape");
    let c = out.pop().unwrap();
    let b = out.pop().unwrap();
    let a = out.pop().unwrap();
    [a, b, c]
}

/// Grid values of `q = ∂F/∂h − (Λ+Θ) ⋮ ∇∇d − M : ∇dᵀ` evaluated pointwise;
/// requires second derivatives in `f`.
pub fn variational_derivative<M: FreeEnergy + ?Sized>(
    model: &M,
    grid: &SpectralGrid,
    f: &DirectorFields,
) -> VectorField {
    let n = grid.len();
    let mut out: VectorField = std::array::from_fn(|_| vec![0.0; n]);
    for p in 0..n {
        let q = variational_derivative_pointwise(model, &f.d_at(p), &f.grad_at(p), &f.hess_at(p));
        for c in 0..3 {
            out[c][p] = q.0[c];
        }
    }
    out
}

/// Centered difference of `𝓕` along `ψ` compared with `(q, ψ)`:
/// `|(𝓕(d+εψ) − 𝓕(d−εψ))/(2ε) − (q,ψ)| / max(1, |(q,ψ)|)`.
pub fn gateaux_check<M: FreeEnergy + ?Sized>(
    model: &M,
    grid: &SpectralGrid,
    table: &ModeTable,
    d: &[f64],
    psi: &[f64],
    eps: f64,
) -> f64 {
    let shifted = |s: f64| -> Vec<f64> { d.iter().zip(psi).map(|(a, b)| a + s * b).collect() };
    let fp = total_energy_of(model, grid, table, &shifted(eps));
    let fm = total_energy_of(model, grid, table, &shifted(-eps));
    let fd = (fp - fm) / (2.0 * eps);
    let f = director_fields(grid, table, d, false);
    let qs = variational_derivative_spectra(model, grid, &f);
    let q = table.analyze([&qs[0], &qs[1], &qs[2]]);
    let pairing: f64 = q.iter().zip(psi).map(|(a, b)| a * b).sum();
    (fd - pairing).abs() / pairing.abs().max(1.0)
}
