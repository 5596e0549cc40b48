use alloc::format;
use alloc::string::String;

use super::{require, Coercivity, FreeEnergy, Growth, ModelError};
use crate::ad::{hessian_sh, hessian_ss, seed_dual, seed_jet, split_gradient, Scalar};
use crate::tensor::{outer, Mat3, Tensor3, Tensor4, Vec3};

/// `pen (|h|² − 1)²` and its `h`-gradient.
fn penalty(pen: f64, h: &Vec3) -> (f64, Vec3) {
    if pen == 0.0 {
        return (0.0, Vec3::ZERO);
    }
    let u = h.norm_sq() - 1.0;
    (pen * u * u, h.scale(4.0 * pen * u))
}

fn penalty_coefficient(eps: f64) -> Result<f64, ModelError> {
    require("eps", eps, eps > 0.0)?;
    Ok(1.0 / (4.0 * eps * eps))
}

/// Growth data shared by models whose only `h`-dependence is the penalty.
fn penalty_growth(pen: f64) -> Growth {
    Growth {
        gamma1: 2.0,
        gamma2: 6.0,
        c_sh: 1.0,
        c_h: if pen > 0.0 { 8.0 * pen } else { 1.0 },
    }
}

/// `F = ½|S|² + (1/4ε²)(|h|² − 1)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GinzburgLandau {
    eps: Option<f64>,
    pen: f64,
}

impl GinzburgLandau {
    pub fn new(eps: f64) -> Result<Self, ModelError> {
        Ok(GinzburgLandau {
            eps: Some(eps),
            pen: penalty_coefficient(eps)?,
        })
    }

    /// The Dirichlet energy `½|S|²` without penalty.
    pub fn dirichlet() -> Self {
        GinzburgLandau { eps: None, pen: 0.0 }
    }

    pub fn eps(&self) -> Option<f64> {
        self.eps
    }

    /// Coefficient `1/(4ε²)` in front of `(|h|² − 1)²`.
    pub fn penalty(&self) -> f64 {
        self.pen
    }
}

impl FreeEnergy for GinzburgLandau {
    fn name(&self) -> String {
        match self.eps {
            Some(e) => format!("ginzburg_landau(eps={e})"),
            None => String::from("dirichlet"),
        }
    }

    fn evaluate(&self, h: &Vec3, s: &Mat3) -> f64 {
        0.5 * s.norm_sq() + penalty(self.pen, h).0
    }

    fn gradients(&self, h: &Vec3, s: &Mat3) -> (Vec3, Mat3) {
        (penalty(self.pen, h).1, *s)
    }

    fn lambda(&self) -> Tensor4 {
        Tensor4::identity()
    }

    fn growth(&self) -> Growth {
        penalty_growth(self.pen)
    }

    fn coercivity(&self) -> Coercivity {
        Coercivity {
            eta1: 0.5,
            eta2: 0.0,
            eta3: 0.0,
        }
    }

    fn ellipticity(&self) -> f64 {
        1.0
    }
}

/// One-constant-pair Oseen–Frank energy
/// `k₁(div d)² + k₂|curl d|² + α(tr(∇d²) − (div d)²)` written as `½ S:Λ:S`,
/// with `Λ = 2k₂Λ⁰ + 2(k₁−α)Λ¹ − 2(k₂−α)Λ²`, plus an optional penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplifiedOseenFrank {
    k1: f64,
    k2: f64,
    alpha: f64,
    pen: f64,
    lambda: Tensor4,
}

impl SimplifiedOseenFrank {
    pub fn new(k1: f64, k2: f64, alpha: f64) -> Result<Self, ModelError> {
        require("k1", k1, k1 > 0.0)?;
        require("k2", k2, k2 > 0.0)?;
        require("alpha", alpha, true)?;
        let lambda = Tensor4::identity().scale(2.0 * k2)
            + Tensor4::trace_trace().scale(2.0 * (k1 - alpha))
            - Tensor4::transposition().scale(2.0 * (k2 - alpha));
        Ok(SimplifiedOseenFrank {
            k1,
            k2,
            alpha,
            pen: 0.0,
            lambda,
        })
    }

    /// Adds the penalty `(1/4ε²)(|h|² − 1)²`.
    pub fn with_eps(mut self, eps: f64) -> Result<Self, ModelError> {
        self.pen = penalty_coefficient(eps)?;
        Ok(self)
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Smallest eigenvalue of `Λ` on matrices: skew `4k₂−2α`, symmetric traceless `2α`, trace `6k₁−4α`.
    pub fn lambda_min(&self) -> f64 {
        let (k1, k2, a) = (self.k1, self.k2, self.alpha);
        f64::min(f64::min(4.0 * k2 - 2.0 * a, 2.0 * a), 6.0 * k1 - 4.0 * a)
    }
}

impl FreeEnergy for SimplifiedOseenFrank {
    fn name(&self) -> String {
        format!(
            "simplified_oseen_frank(k1={}, k2={}, alpha={})",
            self.k1, self.k2, self.alpha
        )
    }

    fn evaluate(&self, h: &Vec3, s: &Mat3) -> f64 {
        0.5 * self.lambda.quadratic(s) + penalty(self.pen, h).0
    }

    fn gradients(&self, h: &Vec3, s: &Mat3) -> (Vec3, Mat3) {
        (
            penalty(self.pen, h).1,
            crate::tensor::contract42(&self.lambda, s),
        )
    }

    fn lambda(&self) -> Tensor4 {
        self.lambda
    }

    fn growth(&self) -> Growth {
        penalty_growth(self.pen)
    }

    fn coercivity(&self) -> Coercivity {
        Coercivity {
            eta1: 0.5 * self.lambda_min(),
            eta2: 0.0,
            eta3: 0.0,
        }
    }

    fn ellipticity(&self) -> f64 {
        2.0 * f64::min(self.k1, self.k2)
    }
}

/// Scaled Oseen–Frank energy
/// `(k₁/2)(div d)² + (k₂/2)|curl d|² + (1+|∇d|²)^{−s}(1+|d|²)^{−1}((k₃/2)(d·curl d)² + (k₄/2)|d×curl d|²)`,
/// with an optional null-Lagrangian term `(α/2)(tr(∇d²) − (div d)²)` and an optional penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledOseenFrank {
    k1: f64,
    k2: f64,
    k3: f64,
    k4: f64,
    s: f64,
    alpha: f64,
    pen: f64,
}

fn curl<T: Scalar>(s: &[[T; 3]; 3]) -> [T; 3] {
    [
        s[2][1] - s[1][2],
        s[0][2] - s[2][0],
        s[1][0] - s[0][1],
    ]
}

fn dot3<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl ScaledOseenFrank {
    pub fn new(k1: f64, k2: f64, k3: f64, k4: f64, s: f64) -> Result<Self, ModelError> {
        require("k1", k1, k1 > 0.0)?;
        require("k2", k2, k2 > 0.0)?;
        require("k3", k3, true)?;
        require("k4", k4, true)?;
        require("s", s, s >= 0.0)?;
        Ok(ScaledOseenFrank {
            k1,
            k2,
            k3,
            k4,
            s,
            alpha: 0.0,
            pen: 0.0,
        })
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self, ModelError> {
        self.pen = penalty_coefficient(eps)?;
        Ok(self)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self, ModelError> {
        require("alpha", alpha, true)?;
        self.alpha = alpha;
        Ok(self)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `k₃ + k₄`, the size of the non-quadratic part.
    pub fn k34(&self) -> f64 {
        self.k3 + self.k4
    }

    /// Copy with `k₃`, `k₄` multiplied by `factor`.
    pub fn scale_k34(&self, factor: f64) -> Self {
        ScaledOseenFrank {
            k3: self.k3 * factor,
            k4: self.k4 * factor,
            ..*self
        }
    }

    /// Smallest eigenvalue of `Λ` on matrices: skew `2k₂−α`, symmetric traceless `α`, trace `3k₁−2α`.
    pub fn lambda_min(&self) -> f64 {
        let (k1, k2, a) = (self.k1, self.k2, self.alpha);
        f64::min(f64::min(2.0 * k2 - a, a), 3.0 * k1 - 2.0 * a)
    }

    fn quadratic<T: Scalar>(&self, s: &[[T; 3]; 3]) -> T {
        let tr = s[0][0] + s[1][1] + s[2][2];
        let c = curl(s);
        let mut out = (tr * tr).scale(0.5 * self.k1) + dot3(&c, &c).scale(0.5 * self.k2);
        if self.alpha != 0.0 {
            let mut tr_sq = T::cst(0.0);
            for i in 0..3 {
                for j in 0..3 {
                    tr_sq = tr_sq + s[i][j] * s[j][i];
                }
            }
            out = out + (tr_sq - tr * tr).scale(0.5 * self.alpha);
        }
        out
    }

    /// The non-quadratic anisotropic term.
    fn scaled_term<T: Scalar>(&self, h: &[T; 3], s: &[[T; 3]; 3]) -> T {
        let c = curl(s);
        let hc = dot3(h, &c);
        let hh = dot3(h, h);
        let cc = dot3(&c, &c);
        let q = (hc * hc).scale(0.5 * (self.k3 - self.k4)) + (hh * cc).scale(0.5 * self.k4);
        let mut ss = T::cst(1.0);
        for row in s {
            for x in row {
                ss = ss + *x * *x;
            }
        }
        q * ss.powf(-self.s) / (T::cst(1.0) + hh)
    }

    fn density<T: Scalar>(&self, h: &[T; 3], s: &[[T; 3]; 3]) -> T {
        let mut out = self.quadratic(s) + self.scaled_term(h, s);
        if self.pen != 0.0 {
            let u = dot3(h, h) - T::cst(1.0);
            out = out + (u * u).scale(self.pen);
        }
        out
    }
}

impl FreeEnergy for ScaledOseenFrank {
    fn name(&self) -> String {
        format!(
            "scaled_oseen_frank(k1={}, k2={}, k3={}, k4={}, s={}, alpha={})",
            self.k1, self.k2, self.k3, self.k4, self.s, self.alpha
        )
    }

    fn evaluate(&self, h: &Vec3, s: &Mat3) -> f64 {
        self.density(&h.0, &s.0)
    }

    fn gradients(&self, h: &Vec3, s: &Mat3) -> (Vec3, Mat3) {
        let (hd, sd) = seed_dual(h, s);
        split_gradient(&self.density(&hd, &sd).g)
    }

    fn lambda(&self) -> Tensor4 {
        Tensor4::trace_trace().scale(self.k1 - self.alpha)
            + Tensor4::curl_curl().scale(self.k2)
            + Tensor4::transposition().scale(self.alpha)
    }

    fn theta(&self, h: &Vec3, s: &Mat3) -> Tensor4 {
        if self.k3 == 0.0 && self.k4 == 0.0 {
            return Tensor4::ZERO;
        }
        let (hj, sj) = seed_jet(h, s);
        hessian_ss(&self.scaled_term(&hj, &sj).h)
    }

    fn d2f_dsdh(&self, h: &Vec3, s: &Mat3) -> Tensor3 {
        if self.k3 == 0.0 && self.k4 == 0.0 {
            return Tensor3::ZERO;
        }
        let (hj, sj) = seed_jet(h, s);
        hessian_sh(&self.scaled_term(&hj, &sj).h)
    }

    fn has_theta(&self) -> bool {
        self.k3 != 0.0 || self.k4 != 0.0
    }

    fn has_mixed(&self) -> bool {
        self.has_theta()
    }

    /// `∂F/∂h` of the scaled term grows like `|S|^{2−2s}`, so `γ₁ = max(2, 4 − 4s)`;
    /// for `s ≤ 1/6` this leaves `[2, 10/3)` and the declared exponent is capped just below 10/3.
    fn growth(&self) -> Growth {
        let k = self.k3.abs() + self.k4.abs();
        let positive_or_one = |x: f64| if x > 0.0 { x } else { 1.0 };
        Growth {
            gamma1: f64::min(f64::max(2.0, 4.0 - 4.0 * self.s), 10.0 / 3.0 - 1e-9),
            gamma2: 6.0,
            c_sh: positive_or_one(2.0 * (4.0 * self.s + 8.0) * k),
            c_h: positive_or_one(4.0 * k + 8.0 * self.pen),
        }
    }

    fn coercivity(&self) -> Coercivity {
        Coercivity {
            eta1: 0.5 * self.lambda_min() + f64::min(f64::min(self.k3, self.k4), 0.0),
            eta2: 0.0,
            eta3: 0.0,
        }
    }

    fn ellipticity(&self) -> f64 {
        f64::min(self.k1, self.k2)
    }
}

/// Adds a constant external field `H`: `F − χ⊥|H|² − (χ∥ − χ⊥)(h·H)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WithField<M> {
    base: M,
    field: Vec3,
    chi_perp: f64,
    chi_par: f64,
}

impl<M: FreeEnergy> WithField<M> {
    pub fn new(base: M, field: Vec3, chi_perp: f64, chi_par: f64) -> Result<Self, ModelError> {
        require("chi_perp", chi_perp, true)?;
        require("chi_par", chi_par, true)?;
        require("field", field.max_abs(), field.is_finite())?;
        Ok(WithField {
            base,
            field,
            chi_perp,
            chi_par,
        })
    }

    pub fn base(&self) -> &M {
        &self.base
    }

    fn dchi(&self) -> f64 {
        self.chi_par - self.chi_perp
    }
}

impl<M: FreeEnergy> FreeEnergy for WithField<M> {
    fn name(&self) -> String {
        format!(
            "{} + field(H={:?}, chi_perp={}, chi_par={})",
            self.base.name(),
            self.field.0,
            self.chi_perp,
            self.chi_par
        )
    }

    fn evaluate(&self, h: &Vec3, s: &Mat3) -> f64 {
        let hh = h.dot(&self.field);
        self.base.evaluate(h, s) - self.chi_perp * self.field.norm_sq() - self.dchi() * hh * hh
    }

    fn gradients(&self, h: &Vec3, s: &Mat3) -> (Vec3, Mat3) {
        let (gh, gs) = self.base.gradients(h, s);
        let hh = h.dot(&self.field);
        (gh - self.field.scale(2.0 * self.dchi() * hh), gs)
    }

    fn lambda(&self) -> Tensor4 {
        self.base.lambda()
    }

    fn theta(&self, h: &Vec3, s: &Mat3) -> Tensor4 {
        self.base.theta(h, s)
    }

    fn d2f_dsdh(&self, h: &Vec3, s: &Mat3) -> Tensor3 {
        self.base.d2f_dsdh(h, s)
    }

    fn has_theta(&self) -> bool {
        self.base.has_theta()
    }

    fn has_mixed(&self) -> bool {
        self.base.has_mixed()
    }

    fn growth(&self) -> Growth {
        let mut g = self.base.growth();
        g.c_h += 2.0 * self.dchi().abs() * self.field.norm_sq();
        g
    }

    fn coercivity(&self) -> Coercivity {
        let mut c = self.base.coercivity();
        let hh = self.field.norm_sq();
        c.eta2 += self.dchi().abs() * hh;
        c.eta3 += f64::max(self.chi_perp, 0.0) * hh;
        c
    }

    fn ellipticity(&self) -> f64 {
        self.base.ellipticity()
    }
}

/// Adds the extra degrees of freedom `F − h·S b + (b̄/2)|h|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WithFreedom<M> {
    base: M,
    b: Vec3,
    bbar: f64,
}

impl<M: FreeEnergy> WithFreedom<M> {
    pub fn new(base: M, b: Vec3, bbar: f64) -> Result<Self, ModelError> {
        require("b", b.max_abs(), b.is_finite())?;
        require("bbar", bbar, true)?;
        Ok(WithFreedom { base, b, bbar })
    }

    pub fn base(&self) -> &M {
        &self.base
    }
}

impl<M: FreeEnergy> FreeEnergy for WithFreedom<M> {
    fn name(&self) -> String {
        format!(
            "{} + freedom(b={:?}, bbar={})",
            self.base.name(),
            self.b.0,
            self.bbar
        )
    }

    fn evaluate(&self, h: &Vec3, s: &Mat3) -> f64 {
        self.base.evaluate(h, s) - h.dot(&s.mul_vec(&self.b)) + 0.5 * self.bbar * h.norm_sq()
    }

    fn gradients(&self, h: &Vec3, s: &Mat3) -> (Vec3, Mat3) {
        let (gh, gs) = self.base.gradients(h, s);
        (
            gh - s.mul_vec(&self.b) + h.scale(self.bbar),
            gs - outer(h, &self.b),
        )
    }

    fn lambda(&self) -> Tensor4 {
        self.base.lambda()
    }

    fn theta(&self, h: &Vec3, s: &Mat3) -> Tensor4 {
        self.base.theta(h, s)
    }

    /// Base mixed derivative plus `−δ_ik b_j`.
    fn d2f_dsdh(&self, h: &Vec3, s: &Mat3) -> Tensor3 {
        let mut m = self.base.d2f_dsdh(h, s);
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j][i] -= self.b.0[j];
            }
        }
        m
    }

    fn has_theta(&self) -> bool {
        self.base.has_theta()
    }

    fn has_mixed(&self) -> bool {
        true
    }

    fn growth(&self) -> Growth {
        let mut g = self.base.growth();
        g.c_sh += libm::sqrt(3.0) * self.b.norm();
        g.c_h += self.b.norm() + self.bbar.abs();
        g
    }

    /// Young's inequality on `h·Sb` spends half of `η₁`.
    fn coercivity(&self) -> Coercivity {
        let c = self.base.coercivity();
        Coercivity {
            eta1: 0.5 * c.eta1,
            eta2: c.eta2
                + if c.eta1 > 0.0 {
                    self.b.norm_sq() / (2.0 * c.eta1)
                } else {
                    f64::INFINITY
                }
                + f64::max(-0.5 * self.bbar, 0.0),
            eta3: c.eta3,
        }
    }

    fn ellipticity(&self) -> f64 {
        self.base.ellipticity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::FreeEnergy;
    use alloc::boxed::Box;
    use alloc::vec;
    use alloc::vec::Vec;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn models() -> Vec<Box<dyn FreeEnergy>> {
        vec![
            Box::new(GinzburgLandau::new(1.0).unwrap()),
            Box::new(
                WithField::new(
                    GinzburgLandau::new(0.7).unwrap(),
                    Vec3::new(0.3, -0.2, 0.5),
                    0.4,
                    1.1,
                )
                .unwrap(),
            ),
            Box::new(
                WithFreedom::new(
                    GinzburgLandau::new(1.0).unwrap(),
                    Vec3::new(0.2, 0.1, -0.3),
                    0.5,
                )
                .unwrap(),
            ),
            Box::new(
                SimplifiedOseenFrank::new(2.0, 1.0, 0.5)
                    .unwrap()
                    .with_eps(1.0)
                    .unwrap(),
            ),
            Box::new(
                ScaledOseenFrank::new(1.5, 1.0, 0.3, 0.2, 0.2)
                    .unwrap()
                    .with_eps(1.0)
                    .unwrap(),
            ),
        ]
    }

    #[test]
    fn gl_values() {
        let gl = GinzburgLandau::new(1.0).unwrap();
        assert_eq!(gl.evaluate(&Vec3::unit(0), &Mat3::ZERO), 0.0);
        assert_eq!(gl.evaluate(&Vec3::ZERO, &Mat3::ZERO), 0.25);
        let (gh, gs) = gl.gradients(&Vec3::new(2.0, 0.0, 0.0), &Mat3::ZERO);
        assert_eq!(gh, Vec3::new(6.0, 0.0, 0.0));
        assert_eq!(gs, Mat3::ZERO);
        let (gh, gs) = gl.gradients(&Vec3::unit(1), &Mat3::ZERO);
        assert_eq!((gh, gs), (Vec3::ZERO, Mat3::ZERO));
    }

    #[test]
    fn simplified_oseen_frank_divergence_mode() {
        let of = SimplifiedOseenFrank::new(2.0, 1.0, 0.0).unwrap();
        assert_eq!(of.evaluate(&Vec3::ZERO, &Mat3::unit(0, 0)), 2.0);
    }

    #[test]
    fn simplified_oseen_frank_matches_invariant_form() {
        let mut seed = 8;
        for &alpha in &[-1.0, 0.0, 0.7] {
            let of = SimplifiedOseenFrank::new(1.3, 0.4, alpha).unwrap();
            for _ in 0..50 {
                let s = Mat3::from_fn(|_, _| lcg(&mut seed));
                let tr = s.trace();
                let c = Vec3::new(
                    s.0[2][1] - s.0[1][2],
                    s.0[0][2] - s.0[2][0],
                    s.0[1][0] - s.0[0][1],
                );
                let tr_sq = s.matmul(&s).trace();
                let expect = 1.3 * tr * tr + 0.4 * c.norm_sq() + alpha * (tr_sq - tr * tr);
                assert!((of.evaluate(&Vec3::ZERO, &s) - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn freedom_gradient_closed_form() {
        let base = GinzburgLandau::new(1.0).unwrap();
        let b = Vec3::new(0.2, 0.1, -0.3);
        let m = WithFreedom::new(base, b, 0.5).unwrap();
        let h = Vec3::new(0.4, 0.9, -0.1);
        let s = Mat3::from_fn(|i, j| (i as f64) - 0.5 * (j as f64));
        let gs = m.df_ds(&h, &s);
        assert!((gs - (base.df_ds(&h, &s) - outer(&h, &b))).max_abs() < 1e-15);
    }

    fn fd_state(h: &Vec3, s: &Mat3, a: usize, e: f64) -> (Vec3, Mat3) {
        let (mut hh, mut ss) = (*h, *s);
        if a >= 9 {
            hh.0[a - 9] += e;
        } else {
            ss.0[a / 3][a % 3] += e;
        }
        (hh, ss)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / f64::max(1.0, f64::max(a.abs(), b.abs()))
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut seed = 42;
        for m in models() {
            for _ in 0..100 {
                let h = Vec3([lcg(&mut seed), lcg(&mut seed), lcg(&mut seed)]).scale(1.5);
                let s = Mat3::from_fn(|_, _| lcg(&mut seed));
                let (gh, gs) = m.gradients(&h, &s);
                let step = 1e-5;
                for a in 0..12 {
                    let (hp, sp) = fd_state(&h, &s, a, step);
                    let (hm, sm) = fd_state(&h, &s, a, -step);
                    let fd = (m.evaluate(&hp, &sp) - m.evaluate(&hm, &sm)) / (2.0 * step);
                    let an = if a >= 9 { gh.0[a - 9] } else { gs.0[a / 3][a % 3] };
                    assert!(rel(fd, an) < 1e-6, "{} var {a}: {fd} vs {an}", m.name());
                }
            }
        }
    }

    #[test]
    fn second_derivatives_match_finite_differences() {
        let mut seed = 7;
        for m in models() {
            for _ in 0..30 {
                let h = Vec3([lcg(&mut seed), lcg(&mut seed), lcg(&mut seed)]);
                let s = Mat3::from_fn(|_, _| lcg(&mut seed));
                let g = m.lambda() + m.theta(&h, &s);
                let mixed = m.d2f_dsdh(&h, &s);
                let step = 1e-5;
                for a in 0..12 {
                    let (hp, sp) = fd_state(&h, &s, a, step);
                    let (hm, sm) = fd_state(&h, &s, a, -step);
                    let d = (m.df_ds(&hp, &sp) - m.df_ds(&hm, &sm)).scale(0.5 / step);
                    for i in 0..3 {
                        for j in 0..3 {
                            let an = if a >= 9 {
                                mixed.0[i][j][a - 9]
                            } else {
                                g.0[i][j][a / 3][a % 3]
                            };
                            assert!(rel(d.0[i][j], an) < 1e-5, "{} {i}{j} var {a}", m.name());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn lambdas_are_pair_symmetric() {
        for m in models() {
            assert!(m.lambda().pair_asymmetry() < 1e-15, "{}", m.name());
        }
    }

    #[test]
    fn simplified_oseen_frank_symbol_independent_of_alpha() {
        let k = Vec3::new(1.0, -2.0, 3.0);
        let base = SimplifiedOseenFrank::new(2.0, 1.0, 0.0).unwrap().lambda().symbol(&k);
        for alpha in [-1.0, 1.0, 5.0] {
            let m = SimplifiedOseenFrank::new(2.0, 1.0, alpha).unwrap();
            assert_eq!(m.lambda().symbol(&k), base);
        }
        let m = SimplifiedOseenFrank::new(2.0, 1.0, 0.0).unwrap();
        assert_eq!(
            m.lambda().symbol(&Vec3::unit(0)),
            Mat3::diag([4.0, 2.0, 2.0])
        );
    }

    #[test]
    fn scaled_oseen_frank_lambda_eigenvalues() {
        let m = ScaledOseenFrank::new(1.5, 1.0, 0.0, 0.0, 0.2)
            .unwrap()
            .with_alpha(0.4)
            .unwrap();
        let lm = crate::energy::lambda_min_eigenvalue(&m.lambda());
        assert!((lm - m.lambda_min()).abs() < 1e-12);
        let of = SimplifiedOseenFrank::new(1.5, 1.0, 0.4).unwrap();
        assert!((crate::energy::lambda_min_eigenvalue(&of.lambda()) - of.lambda_min()).abs() < 1e-12);
    }
}
