//! Forward-mode automatic differentiation over the twelve free-energy arguments.
//!
//! Variables are ordered as the nine entries of `S` (row-major) followed by the
//! three components of `h`. [`Dual`] carries a gradient, [`Jet`] additionally a
//! dense Hessian.

use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::tensor::{Mat3, Tensor3, Tensor4, Vec3};

/// Number of independent variables: `S` (9) then `h` (3).
pub const NVARS: usize = 12;

/// Index of `S_ij` in the variable vector.
pub const fn s_index(i: usize, j: usize) -> usize {
    3 * i + j
}

/// Index of `h_k` in the variable vector.
pub const fn h_index(k: usize) -> usize {
    9 + k
}

/// Scalar arithmetic shared by `f64` and the dual number types.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(x: f64) -> Self;
    fn value(&self) -> f64;
    /// `self^p` for a real exponent; requires a positive base when `p` is not an integer.
    fn powf(self, p: f64) -> Self;
    fn scale(self, s: f64) -> Self;
}

impl Scalar for f64 {
    fn cst(x: f64) -> Self {
        x
    }
    fn value(&self) -> f64 {
        *self
    }
    fn powf(self, p: f64) -> Self {
        libm::pow(self, p)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

/// Value with first derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub g: [f64; NVARS],
}

impl Dual {
    pub fn var(value: f64, index: usize) -> Self {
        let mut g = [0.0; NVARS];
        g[index] = 1.0;
        Dual { v: value, g }
    }

    fn chain(self, f: f64, df: f64) -> Self {
        Dual {
            v: f,
            g: self.g.map(|x| df * x),
        }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        let mut g = self.g;
        for (a, b) in g.iter_mut().zip(o.g) {
            *a += b;
        }
        Dual { v: self.v + o.v, g }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        let mut g = self.g;
        for (a, b) in g.iter_mut().zip(o.g) {
            *a -= b;
        }
        Dual { v: self.v - o.v, g }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        let mut g = [0.0; NVARS];
        for (k, x) in g.iter_mut().enumerate() {
            *x = self.g[k] * o.v + self.v * o.g[k];
        }
        Dual { v: self.v * o.v, g }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let r = 1.0 / o.v;
        self * o.chain(r, -r * r)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        self.scale(-1.0)
    }
}

impl Scalar for Dual {
    fn cst(x: f64) -> Self {
        Dual {
            v: x,
            g: [0.0; NVARS],
        }
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn powf(self, p: f64) -> Self {
        let f = libm::pow(self.v, p);
        let df = if p == 0.0 {
            0.0
        } else {
            p * libm::pow(self.v, p - 1.0)
        };
        self.chain(f, df)
    }
    fn scale(self, s: f64) -> Self {
        Dual {
            v: self.v * s,
            g: self.g.map(|x| x * s),
        }
    }
}

/// Value with gradient and full Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub g: [f64; NVARS],
    pub h: [[f64; NVARS]; NVARS],
}

impl Jet {
    pub fn var(value: f64, index: usize) -> Self {
        let mut j = Jet::cst(value);
        j.g[index] = 1.0;
        j
    }

    /// Composition with a scalar function given its value and first two derivatives.
    fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        let mut out = Jet::cst(f);
        for a in 0..NVARS {
            out.g[a] = df * self.g[a];
            for b in 0..NVARS {
                out.h[a][b] = df * self.h[a][b] + d2f * self.g[a] * self.g[b];
            }
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        self.v += o.v;
        for a in 0..NVARS {
            self.g[a] += o.g[a];
            for b in 0..NVARS {
                self.h[a][b] += o.h[a][b];
            }
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut out = Jet::cst(self.v * o.v);
        for a in 0..NVARS {
            out.g[a] = self.g[a] * o.v + self.v * o.g[a];
            for b in 0..NVARS {
                out.h[a][b] = self.h[a][b] * o.v
                    + self.v * o.h[a][b]
                    + self.g[a] * o.g[b]
                    + self.g[b] * o.g[a];
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let r = 1.0 / o.v;
        self * o.chain(r, -r * r, 2.0 * r * r * r)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Scalar for Jet {
    fn cst(x: f64) -> Self {
        Jet {
            v: x,
            g: [0.0; NVARS],
            h: [[0.0; NVARS]; NVARS],
        }
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn powf(self, p: f64) -> Self {
        let f = libm::pow(self.v, p);
        let df = if p == 0.0 {
            0.0
        } else {
            p * libm::pow(self.v, p - 1.0)
        };
        let d2f = if p == 0.0 || p == 1.0 {
            0.0
        } else {
            p * (p - 1.0) * libm::pow(self.v, p - 2.0)
        };
        self.chain(f, df, d2f)
    }
    fn scale(mut self, s: f64) -> Self {
        self.v *= s;
        for a in 0..NVARS {
            self.g[a] *= s;
            for b in 0..NVARS {
                self.h[a][b] *= s;
            }
        }
        self
    }
}

/// Seeds the argument pair `(h, S)` as independent variables.
pub fn seed_dual(h: &Vec3, s: &Mat3) -> ([Dual; 3], [[Dual; 3]; 3]) {
    let hv = [0, 1, 2].map(|k| Dual::var(h.0[k], h_index(k)));
    let sv = [0, 1, 2].map(|i| [0, 1, 2].map(|j| Dual::var(s.0[i][j], s_index(i, j))));
    (hv, sv)
}

/// Seeds the argument pair `(h, S)` as independent second-order variables.
pub fn seed_jet(h: &Vec3, s: &Mat3) -> ([Jet; 3], [[Jet; 3]; 3]) {
    let hv = [0, 1, 2].map(|k| Jet::var(h.0[k], h_index(k)));
    let sv = [0, 1, 2].map(|i| [0, 1, 2].map(|j| Jet::var(s.0[i][j], s_index(i, j))));
    (hv, sv)
}

/// Splits a gradient into `(∂/∂h, ∂/∂S)`.
pub fn split_gradient(g: &[f64; NVARS]) -> (Vec3, Mat3) {
    (
        Vec3([g[h_index(0)], g[h_index(1)], g[h_index(2)]]),
        Mat3::from_fn(|i, j| g[s_index(i, j)]),
    )
}

/// The `S`–`S` block of a Hessian as a fourth-order tensor `∂²F/∂S_ij∂S_kl`.
pub fn hessian_ss(h: &[[f64; NVARS]; NVARS]) -> Tensor4 {
    Tensor4::from_fn(|i, j, k, l| h[s_index(i, j)][s_index(k, l)])
}

/// The mixed block `∂²F/∂S_ij∂h_k`.
pub fn hessian_sh(h: &[[f64; NVARS]; NVARS]) -> Tensor3 {
    Tensor3::from_fn(|i, j, k| h[s_index(i, j)][h_index(k)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly<T: Scalar>(h: [T; 3], s: [[T; 3]; 3]) -> T {
        let a = h[0] * h[1] * s[0][1] + s[2][2] / (T::cst(1.0) + h[2] * h[2]);
        a + (T::cst(2.0) + s[1][0] * s[1][0]).powf(-0.3)
    }

    #[test]
    fn dual_and_jet_agree_with_finite_differences() {
        let h = Vec3::new(0.3, -0.7, 1.1);
        let s = Mat3::from_fn(|i, j| 0.1 * (i as f64) - 0.2 * (j as f64) + 0.05);
        let f = |h: &Vec3, s: &Mat3| poly(h.0, s.0);
        let (hd, sd) = seed_dual(&h, &s);
        let d = poly(hd, sd);
        let (hj, sj) = seed_jet(&h, &s);
        let j = poly(hj, sj);
        assert!((d.v - f(&h, &s)).abs() < 1e-15);
        assert!((j.v - d.v).abs() < 1e-15);

        let step = 1e-5;
        let perturb = |a: usize, e: f64| {
            let mut hh = h;
            let mut ss = s;
            if a >= 9 {
                hh.0[a - 9] += e;
            } else {
                ss.0[a / 3][a % 3] += e;
            }
            (hh, ss)
        };
        for a in 0..NVARS {
            let (hp, sp) = perturb(a, step);
            let (hm, sm) = perturb(a, -step);
            let fd = (f(&hp, &sp) - f(&hm, &sm)) / (2.0 * step);
            assert!((fd - d.g[a]).abs() < 1e-8, "grad {a}");
            assert!((j.g[a] - d.g[a]).abs() < 1e-14);
            let (hdp, sdp) = seed_dual(&hp, &sp);
            let (hdm, sdm) = seed_dual(&hm, &sm);
            let gp = poly(hdp, sdp).g;
            let gm = poly(hdm, sdm).g;
            for b in 0..NVARS {
                let fd2 = (gp[b] - gm[b]) / (2.0 * step);
                assert!((fd2 - j.h[a][b]).abs() < 1e-7, "hess {a} {b}");
            }
        }
    }
}
