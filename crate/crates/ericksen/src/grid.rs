//! Periodic grid on `[0, 2π)³` and its discrete Fourier transforms.
//!
//! Spectra use the normalization `u(x) = Σ_k û(k) e^{ik·x}`, so the forward
//! transform divides by `N³` and the inverse is a plain sum. Grid arrays are
//! indexed `(i₁ N + i₂) N + i₃` with `i₁` along `x₁`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

pub type Spectrum = Vec<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid resolution N = {0} must be even and at least 8")]
    Resolution(usize),
    #[error("mode cutoff {cutoff} exceeds the dealiasing limit {limit} for N = {n}")]
    Cutoff { cutoff: i32, limit: i32, n: usize },
    #[error("field has {got} points, grid has {expected}")]
    Shape { got: usize, expected: usize },
}

/// Integer wavevector on the 2π-periodic box.
pub type WaveVector = [i32; 3];

#[derive(Clone)]
pub struct SpectralGrid {
    n: usize,
    cutoff: i32,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n", &self.n)
            .field("cutoff", &self.cutoff)
            .finish()
    }
}

/// Largest `K` with `3K < N`, so that triple products of modes with `|k|_∞ ≤ K` are
/// integrated exactly by the grid sum.
pub fn dealias_limit(n: usize) -> i32 {
    (n as i32 - 1) / 3
}

impl SpectralGrid {
    /// Grid with the default cutoff `K = ⌈N/3⌉ − 1`.
    pub fn new(n: usize) -> Result<Self, GridError> {
        Self::with_cutoff(n, None)
    }

    pub fn with_cutoff(n: usize, cutoff: Option<i32>) -> Result<Self, GridError> {
        if n < 8 || n % 2 != 0 {
            return Err(GridError::Resolution(n));
        }
        let limit = dealias_limit(n);
        let cutoff = cutoff.unwrap_or(limit);
        if cutoff > limit || cutoff < 0 {
            return Err(GridError::Cutoff { cutoff, limit, n });
        }
        Ok(Self::unchecked(n, cutoff))
    }

    /// Grid whose cutoff is not limited by the dealiasing rule; used to demonstrate aliasing.
    pub fn aliased(n: usize, cutoff: i32) -> Result<Self, GridError> {
        if n < 8 || n % 2 != 0 {
            return Err(GridError::Resolution(n));
        }
        if cutoff < 0 || cutoff as usize >= n / 2 {
            return Err(GridError::Cutoff {
                cutoff,
                limit: n as i32 / 2 - 1,
                n,
            });
        }
        Ok(Self::unchecked(n, cutoff))
    }

    fn unchecked(n: usize, cutoff: i32) -> Self {
        let mut planner = FftPlanner::new();
        SpectralGrid {
            n,
            cutoff,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest retained `|k|_∞`.
    pub fn cutoff(&self) -> i32 {
        self.cutoff
    }

    /// Number of grid points `N³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `(2π/N)³`, the quadrature weight of one grid point.
    pub fn cell_volume(&self) -> f64 {
        let h = 2.0 * PI / self.n as f64;
        h * h * h
    }

    pub fn volume() -> f64 {
        (2.0 * PI).powi(3)
    }

    pub fn point(&self, index: usize) -> [f64; 3] {
        let h = 2.0 * PI / self.n as f64;
        let n = self.n;
        [
            (index / (n * n)) as f64 * h,
            ((index / n) % n) as f64 * h,
            (index % n) as f64 * h,
        ]
    }

    /// Array position of wavevector `k` (taken modulo `N`).
    pub fn index_of(&self, k: WaveVector) -> usize {
        let n = self.n as i32;
        let w = |x: i32| x.rem_euclid(n) as usize;
        (w(k[0]) * self.n + w(k[1])) * self.n + w(k[2])
    }

    /// Signed wavevector at an array position; the Nyquist index maps to `−N/2`.
    pub fn wavevector(&self, index: usize) -> WaveVector {
        let n = self.n;
        let s = |i: usize| {
            if i >= n / 2 {
                i as i32 - n as i32
            } else {
                i as i32
            }
        };
        [s(index / (n * n)), s((index / n) % n), s(index % n)]
    }

    /// Wavenumber used for first derivatives: zero at the Nyquist index so that
    /// differentiated real fields stay real.
    pub fn derivative_wavevector(&self, index: usize) -> [f64; 3] {
        let k = self.wavevector(index);
        let half = self.n as i32 / 2;
        k.map(|x| if x == -half { 0.0 } else { x as f64 })
    }

    /// Grid sum `Σ f (2π/N)³`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() * self.cell_volume()
    }

    fn check(&self, len: usize) -> Result<(), GridError> {
        if len == self.len() {
            Ok(())
        } else {
            Err(GridError::Shape {
                got: len,
                expected: self.len(),
            })
        }
    }

    /// Applies a 1-D transform along each axis; three rotations restore the layout.
    fn transform3(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        let mut tmp = vec![Complex64::default(); data.len()];
        for _ in 0..3 {
            plan.process_with_scratch(data, &mut scratch);
            // (a, b, c) -> (c, a, b)
            for a in 0..n {
                for b in 0..n {
                    let row = (a * n + b) * n;
                    for c in 0..n {
                        tmp[(c * n + a) * n + b] = data[row + c];
                    }
                }
            }
            data.copy_from_slice(&tmp);
        }
    }

    /// In-place forward transform, normalized by `1/N³`.
    pub fn forward(&self, data: &mut [Complex64]) -> Result<(), GridError> {
        self.check(data.len())?;
        self.transform3(data, &self.fwd);
        let scale = 1.0 / self.len() as f64;
        for x in data.iter_mut() {
            *x *= scale;
        }
        Ok(())
    }

    /// In-place inverse transform (plain sum over modes).
    pub fn inverse(&self, data: &mut [Complex64]) -> Result<(), GridError> {
        self.check(data.len())?;
        self.transform3(data, &self.inv);
        Ok(())
    }

    /// Spectra of real fields, transforming two fields per complex FFT.
    pub fn spectra(&self, fields: &[&[f64]]) -> Result<Vec<Spectrum>, GridError> {
        let len = self.len();
        let mut out = Vec::with_capacity(fields.len());
        for pair in fields.chunks(2) {
            for f in pair {
                self.check(f.len())?;
            }
            let mut buf: Spectrum = match pair {
                [a, b] => a.iter().zip(b.iter()).map(|(&x, &y)| Complex64::new(x, y)).collect(),
                [a] => a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
                _ => unreachable!(),
            };
            self.forward(&mut buf)?;
            if pair.len() == 1 {
                out.push(buf);
                continue;
            }
            let mut fa = vec![Complex64::default(); len];
            let mut fb = vec![Complex64::default(); len];
            for idx in 0..len {
                let k = self.wavevector(idx);
                let c = buf[idx];
                let cm = buf[self.index_of([-k[0], -k[1], -k[2]])].conj();
                fa[idx] = (c + cm) * 0.5;
                fb[idx] = (c - cm) * Complex64::new(0.0, -0.5);
            }
            out.push(fa);
            out.push(fb);
        }
        Ok(out)
    }

    /// Real fields from Hermitian spectra, two per complex FFT.
    /// Imaginary residue of each inverse is discarded; see [`SpectralGrid::grid_fields_checked`].
    pub fn grid_fields(&self, spectra: &[&Spectrum]) -> Result<Vec<Vec<f64>>, GridError> {
        Ok(self.grid_fields_checked(spectra)?.0)
    }

    /// Like [`SpectralGrid::grid_fields`], also returning the largest discarded
    /// imaginary part relative to the field magnitude (zero for single fields).
    pub fn grid_fields_checked(
        &self,
        spectra: &[&Spectrum],
    ) -> Result<(Vec<Vec<f64>>, f64), GridError> {
        let mut out = Vec::with_capacity(spectra.len());
        let mut worst = 0.0f64;
        for pair in spectra.chunks(2) {
            for s in pair {
                self.check(s.len())?;
            }
            match pair {
                [a, b] => {
                    let mut buf: Spectrum = a
                        .iter()
                        .zip(b.iter())
                        .map(|(&x, &y)| x + Complex64::new(-y.im, y.re))
                        .collect();
                    self.inverse(&mut buf)?;
                    out.push(buf.iter().map(|c| c.re).collect());
                    out.push(buf.iter().map(|c| c.im).collect());
                }
                [a] => {
                    let mut buf: Spectrum = a.to_vec();
                    self.inverse(&mut buf)?;
                    let mag = buf.iter().fold(0.0f64, |m, c| m.max(c.re.abs()));
                    let im = buf.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
                    worst = worst.max(im / mag.max(1e-300));
                    out.push(buf.iter().map(|c| c.re).collect());
                }
                _ => unreachable!(),
            }
        }
        Ok((out, worst))
    }

    /// `∂_axis` of a spectrum.
    pub fn differentiate(&self, s: &Spectrum, axis: usize) -> Spectrum {
        s.iter()
            .enumerate()
            .map(|(idx, &c)| c * Complex64::new(0.0, self.derivative_wavevector(idx)[axis]))
            .collect()
    }

    /// Zeroes every mode with `|k|_∞` above `cutoff`.
    pub fn truncate(&self, s: &mut Spectrum, cutoff: i32) {
        for (idx, c) in s.iter_mut().enumerate() {
            let k = self.wavevector(idx);
            if k.iter().any(|x| x.abs() > cutoff) {
                *c = Complex64::default();
            }
        }
    }
}
