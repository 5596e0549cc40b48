//! Free-energy potentials `F(h, S)` evaluated at `h = d`, `S = ∇d`.
//!
//! The second derivative in `S` splits as `∂²F/∂S² = Λ + Θ(h, S)` with a constant,
//! pair-symmetric `Λ`. The mixed derivative is indexed as
//! `M_ijk = ∂²F/(∂S_ij ∂h_k)`, so that `div(∂F/∂S)` contains the term
//! `contract32(M, ∇dᵀ)`.

mod checks;
mod models;
mod sampling;

use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

pub use checks::{
    check_coercivity, check_coercivity_with, check_growth, check_growth_with,
    check_legendre_hadamard, check_legendre_hadamard_with, check_theta_bound, ConditionReport,
    SamplePoint,
};
pub use models::{
    GinzburgLandau, ScaledOseenFrank, SimplifiedOseenFrank, WithField, WithFreedom,
};
pub use sampling::Halton;

use crate::tensor::{contract32, contract43, Mat3, Tensor3, Tensor4, Vec3};

/// Declared growth exponents and constants of the `h`-derivatives.
///
/// `|∂²F/∂S∂h| ≤ C_Sh (|S|^{γ₁/2−1} + |h|^{γ₃} + 1)` and
/// `|∂F/∂h| ≤ C_h (|S|^{γ₁/2} + |h|^{γ₂/2} + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub gamma1: f64,
    pub gamma2: f64,
    pub c_sh: f64,
    pub c_h: f64,
}

impl Growth {
    /// `γ₃ = (γ₁ − 2) γ₂ / (2 γ₁)`.
    pub fn gamma3(&self) -> f64 {
        (self.gamma1 - 2.0) * self.gamma2 / (2.0 * self.gamma1)
    }

    /// Whether the exponents lie in the admissible ranges `γ₁ ∈ [2, 10/3)`, `γ₂ ∈ [6, 10)`.
    pub fn exponents_admissible(&self) -> bool {
        (2.0..10.0 / 3.0).contains(&self.gamma1) && (6.0..10.0).contains(&self.gamma2)
    }

    pub fn mixed_bound(&self, h_norm: f64, s_norm: f64) -> f64 {
        self.c_sh
            * (libm::pow(s_norm, self.gamma1 / 2.0 - 1.0) + libm::pow(h_norm, self.gamma3()) + 1.0)
    }

    pub fn dh_bound(&self, h_norm: f64, s_norm: f64) -> f64 {
        self.c_h
            * (libm::pow(s_norm, self.gamma1 / 2.0) + libm::pow(h_norm, self.gamma2 / 2.0) + 1.0)
    }
}

/// Declared constants of `F(h, S) ≥ η₁|S|² − η₂|h|² − η₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coercivity {
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
}

impl Coercivity {
    pub fn lower_bound(&self, h: &Vec3, s: &Mat3) -> f64 {
        self.eta1 * s.norm_sq() - self.eta2 * h.norm_sq() - self.eta3
    }

    pub fn is_admissible(&self) -> bool {
        self.eta1 > 0.0 && self.eta2 >= 0.0 && self.eta3 >= 0.0
    }
}

/// Rejected model parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// A parameter is outside its admissible range.
    InvalidParameter { name: &'static str, value: f64 },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvalidParameter { name, value } => {
                write!(f, "invalid model parameter {name} = {value}")
            }
        }
    }
}

pub(crate) fn require(name: &'static str, value: f64, ok: bool) -> Result<(), ModelError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { name, value })
    }
}

/// A free-energy potential together with its structural data.
pub trait FreeEnergy: Send + Sync {
    fn name(&self) -> String;

    fn evaluate(&self, h: &Vec3, s: &Mat3) -> f64;

    /// `(∂F/∂h, ∂F/∂S)`.
    fn gradients(&self, h: &Vec3, s: &Mat3) -> (Vec3, Mat3);

    /// The constant principal part `Λ` of `∂²F/∂S²`.
    fn lambda(&self) -> Tensor4;

    /// The state-dependent remainder `Θ = ∂²F/∂S² − Λ`.
    fn theta(&self, _h: &Vec3, _s: &Mat3) -> Tensor4 {
        Tensor4::ZERO
    }

    /// `M_ijk = ∂²F/(∂S_ij ∂h_k)`.
    fn d2f_dsdh(&self, _h: &Vec3, _s: &Mat3) -> Tensor3 {
        Tensor3::ZERO
    }

    /// False when `Θ ≡ 0` identically.
    fn has_theta(&self) -> bool {
        false
    }

    /// False when the mixed derivative vanishes identically.
    fn has_mixed(&self) -> bool {
        false
    }

    fn growth(&self) -> Growth;

    fn coercivity(&self) -> Coercivity;

    /// Declared Legendre–Hadamard constant `η` in `a⊗b:Λ:a⊗b ≥ η|a|²|b|²`.
    fn ellipticity(&self) -> f64;

    fn df_dh(&self, h: &Vec3, s: &Mat3) -> Vec3 {
        self.gradients(h, s).0
    }

    fn df_ds(&self, h: &Vec3, s: &Mat3) -> Mat3 {
        self.gradients(h, s).1
    }
}

impl<M: FreeEnergy + ?Sized> FreeEnergy for Box<M> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn evaluate(&self, h: &Vec3, s: &Mat3) -> f64 {
        (**self).evaluate(h, s)
    }
    fn gradients(&self, h: &Vec3, s: &Mat3) -> (Vec3, Mat3) {
        (**self).gradients(h, s)
    }
    fn lambda(&self) -> Tensor4 {
        (**self).lambda()
    }
    fn theta(&self, h: &Vec3, s: &Mat3) -> Tensor4 {
        (**self).theta(h, s)
    }
    fn d2f_dsdh(&self, h: &Vec3, s: &Mat3) -> Tensor3 {
        (**self).d2f_dsdh(h, s)
    }
    fn has_theta(&self) -> bool {
        (**self).has_theta()
    }
    fn has_mixed(&self) -> bool {
        (**self).has_mixed()
    }
    fn growth(&self) -> Growth {
        (**self).growth()
    }
    fn coercivity(&self) -> Coercivity {
        (**self).coercivity()
    }
    fn ellipticity(&self) -> f64 {
        (**self).ellipticity()
    }
}

/// Pointwise variational derivative
/// `q = ∂F/∂h − (Λ + Θ) ⋮ H − M : ∇dᵀ`, with `H_jkl = ∂_j ∂_l d_k`.
pub fn variational_derivative_pointwise<M: FreeEnergy + ?Sized>(
    model: &M,
    d: &Vec3,
    grad_d: &Mat3,
    hess_d: &Tensor3,
) -> Vec3 {
    let dfdh = model.df_dh(d, grad_d);
    let mut g = model.lambda();
    if model.has_theta() {
        g += model.theta(d, grad_d);
    }
    let mut q = dfdh - contract43(&g, hess_d);
    if model.has_mixed() {
        q -= contract32(&model.d2f_dsdh(d, grad_d), &grad_d.transpose());
    }
    q
}

/// Smallest eigenvalue of the symmetric part of `Λ` acting on 3×3 matrices.
pub fn lambda_min_eigenvalue(lambda: &Tensor4) -> f64 {
    let m = lambda.as_matrix();
    let mut a = [[0.0; 9]; 9];
    for i in 0..9 {
        for j in 0..9 {
            a[i][j] = 0.5 * (m[i][j] + m[j][i]);
        }
    }
    jacobi_min_eigenvalue(a)
}

/// Cyclic Jacobi rotations on a small symmetric matrix.
fn jacobi_min_eigenvalue<const N: usize>(mut a: [[f64; N]; N]) -> f64 {
    for _sweep in 0..100 {
        let mut off = 0.0;
        for (i, row) in a.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j {
                    off += x * x;
                }
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..N).map(|i| a[i][i]).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_min_of_reference_tensors() {
        assert!((lambda_min_eigenvalue(&Tensor4::identity()) - 1.0).abs() < 1e-12);
        // Λ¹ has eigenvalue 3 on I and 0 elsewhere.
        assert!(lambda_min_eigenvalue(&Tensor4::trace_trace()).abs() < 1e-12);
        // Λ² is the transposition: +1 on symmetric, −1 on skew matrices.
        assert!((lambda_min_eigenvalue(&Tensor4::transposition()) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma3_relation() {
        let g = Growth {
            gamma1: 3.0,
            gamma2: 6.0,
            c_sh: 1.0,
            c_h: 1.0,
        };
        assert_eq!(g.gamma3(), 1.0);
        assert!(g.exponents_admissible());
        let bad = Growth { gamma1: 10.0 / 3.0, ..g };
        assert!(!bad.exponents_admissible());
    }
}
