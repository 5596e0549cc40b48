//! Leslie viscosities, the dissipativity conditions and the stress tensors.
//!
//! Derived constants: `λ₁ = μ₂ − μ₃`, `λ₂ = μ₅ − μ₆`, `γ = 1/(μ₃ − μ₂)`,
//! `λ = γ(μ₆ − μ₅)`, `A = μ₅ + μ₆ − λ(μ₂ + μ₃)` and the cross coefficient
//! `κ = γ(μ₂ + μ₃) − λ`.

use core::fmt;

use crate::energy::FreeEnergy;
use crate::tensor::{outer, Mat3, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeslieError {
    /// `μ₂ = μ₃`, so `γ = 1/(μ₃ − μ₂)` does not exist.
    GammaUndefined,
    NonFinite,
}

impl fmt::Display for LeslieError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LeslieError::GammaUndefined => write!(f, "gamma undefined: mu2 equals mu3"),
            LeslieError::NonFinite => write!(f, "Leslie coefficients must be finite"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeslieCoefficients {
    mu: [f64; 6],
    pub gamma: f64,
    pub lambda: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl LeslieCoefficients {
    /// Takes `[μ₁, …, μ₆]`.
    pub fn new(mu: [f64; 6]) -> Result<Self, LeslieError> {
        if mu.iter().any(|m| !m.is_finite()) {
            return Err(LeslieError::NonFinite);
        }
        let [_, mu2, mu3, _, mu5, mu6] = mu;
        if mu3 == mu2 {
            return Err(LeslieError::GammaUndefined);
        }
        let gamma = 1.0 / (mu3 - mu2);
        Ok(LeslieCoefficients {
            mu,
            gamma,
            lambda: gamma * (mu6 - mu5),
            lambda1: mu2 - mu3,
            lambda2: mu5 - mu6,
        })
    }

    /// `μ_i` for `i ∈ 1..=6`.
    pub fn mu(&self, i: usize) -> f64 {
        self.mu[i - 1]
    }

    pub fn mus(&self) -> [f64; 6] {
        self.mu
    }

    /// `A = μ₅ + μ₆ − λ(μ₂ + μ₃)`.
    pub fn a(&self) -> f64 {
        self.mu(5) + self.mu(6) - self.lambda * (self.mu(2) + self.mu(3))
    }

    /// `κ = γ(μ₂ + μ₃) − λ`, evaluated as `γ((μ₂ + μ₃) − (μ₆ − μ₅))` so that it
    /// vanishes whenever Parodi's relation holds in floating point.
    pub fn kappa(&self) -> f64 {
        self.gamma * ((self.mu(2) + self.mu(3)) - (self.mu(6) - self.mu(5)))
    }
}

/// The five conditions of dissipativity in the order
/// `μ₁ > 0`, `μ₄ > 0`, `γ > 0`, `A > 0`, `4γA > κ²`.
pub const CONDITION_NAMES: [&str; 5] = ["mu1 > 0", "mu4 > 0", "gamma > 0", "A > 0", "4 gamma A > kappa^2"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationMargins {
    /// Left-minus-right side of each condition, see [`CONDITION_NAMES`].
    pub margins: [f64; 5],
    pub kappa: f64,
    /// `δ = |κ| / (2√(γA))`; only meaningful when the first four conditions hold.
    pub delta: f64,
    /// `α = (1 − δ)A`.
    pub alpha: f64,
    /// `β = (1 − δ)γ`.
    pub beta: f64,
    /// Set when `μ₁ = 0`, which is accepted.
    pub mu1_zero: bool,
}

impl DissipationMargins {
    fn holds(&self, i: usize) -> bool {
        if i == 0 {
            self.margins[0] >= 0.0
        } else {
            self.margins[i] > 0.0
        }
    }

    pub fn accepted(&self) -> bool {
        (0..5).all(|i| self.holds(i))
    }

    /// Index (0-based) of the first violated condition.
    pub fn first_violation(&self) -> Option<usize> {
        (0..5).find(|&i| !self.holds(i))
    }

    pub fn min_margin(&self) -> f64 {
        f64::min(self.alpha, self.beta)
    }
}

pub fn check_dissipativity(c: &LeslieCoefficients) -> DissipationMargins {
    let a = c.a();
    let kappa = c.kappa();
    let margins = [
        c.mu(1),
        c.mu(4),
        c.gamma,
        a,
        4.0 * c.gamma * a - kappa * kappa,
    ];
    let (delta, alpha, beta) = if c.gamma > 0.0 && a > 0.0 {
        let delta = kappa.abs() / (2.0 * libm::sqrt(c.gamma * a));
        (delta, (1.0 - delta) * a, (1.0 - delta) * c.gamma)
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    DissipationMargins {
        margins,
        kappa,
        delta,
        alpha,
        beta,
        mu1_zero: c.mu(1) == 0.0,
    }
}

/// Parodi's relation `λ₂ + μ₂ + μ₃ = 0` within `1e-14`.
pub fn check_parodi(c: &LeslieCoefficients) -> bool {
    (c.lambda2 + c.mu(2) + c.mu(3)).abs() <= 1e-14
}

/// Sorted Leslie stress
/// `μ₁(d·S d)d⊗d + μ₄S + (μ₅+μ₆)(d⊗Sd)_sym + (μ₂+μ₃)(d⊗e)_sym + (λ/γ)(d⊗Sd)_skw + (1/γ)(d⊗e)_skw`
/// with `S = (∇v)_sym`.
pub fn leslie_stress(c: &LeslieCoefficients, d: &Vec3, e: &Vec3, grad_v: &Mat3) -> Mat3 {
    let sv = grad_v.sym();
    let svd = sv.mul_vec(d);
    let dsd = outer(d, &svd);
    let de = outer(d, e);
    outer(d, d).scale(c.mu(1) * d.dot(&svd))
        + sv.scale(c.mu(4))
        + dsd.sym().scale(c.mu(5) + c.mu(6))
        + de.sym().scale(c.mu(2) + c.mu(3))
        + dsd.skw().scale(c.lambda / c.gamma)
        + de.skw().scale(1.0 / c.gamma)
}

/// Leslie stress with `e` eliminated through `e = −λ S d − γ q`:
/// `μ₁(d·Sd)d⊗d + μ₄S − γ(μ₂+μ₃)(d⊗q)_sym − (d⊗q)_skw + A(d⊗Sd)_sym`.
pub fn leslie_stress_discrete(c: &LeslieCoefficients, d: &Vec3, q: &Vec3, grad_v: &Mat3) -> Mat3 {
    let sv = grad_v.sym();
    let svd = sv.mul_vec(d);
    let dq = outer(d, q);
    outer(d, d).scale(c.mu(1) * d.dot(&svd)) + sv.scale(c.mu(4))
        - dq.sym().scale(c.gamma * (c.mu(2) + c.mu(3)))
        - dq.skw()
        + outer(d, &svd).sym().scale(c.a())
}

/// Unsorted form
/// `μ₁(d·Sd)d⊗d + μ₂ e⊗d + μ₃ d⊗e + μ₄S + μ₅ Sd⊗d + μ₆ d⊗Sd`.
pub fn leslie_stress_unsorted(c: &LeslieCoefficients, d: &Vec3, e: &Vec3, grad_v: &Mat3) -> Mat3 {
    let sv = grad_v.sym();
    let svd = sv.mul_vec(d);
    outer(d, d).scale(c.mu(1) * d.dot(&svd))
        + outer(e, d).scale(c.mu(2))
        + outer(d, e).scale(c.mu(3))
        + sv.scale(c.mu(4))
        + outer(&svd, d).scale(c.mu(5))
        + outer(d, &svd).scale(c.mu(6))
}

/// Pointwise dissipation `μ₁(d·Sd)² + μ₄|S|² + A|Sd|² + γ|q|² − κ q·Sd`.
pub fn dissipation_density(c: &LeslieCoefficients, d: &Vec3, q: &Vec3, grad_v: &Mat3) -> f64 {
    let sv = grad_v.sym();
    let svd = sv.mul_vec(d);
    let dsd = d.dot(&svd);
    c.mu(1) * dsd * dsd + c.mu(4) * sv.norm_sq() + c.a() * svd.norm_sq() + c.gamma * q.norm_sq()
        - c.kappa() * q.dot(&svd)
}

/// Ericksen stress `Tᴱ = ∇dᵀ ∂F/∂S(d, ∇d)`.
pub fn ericksen_stress<M: FreeEnergy + ?Sized>(model: &M, d: &Vec3, grad_d: &Mat3) -> Mat3 {
    grad_d.transpose().matmul(&model.df_ds(d, grad_d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::GinzburgLandau;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn rv(seed: &mut u64) -> Vec3 {
        Vec3([lcg(seed), lcg(seed), lcg(seed)])
    }

    #[test]
    fn derived_constants() {
        let c = LeslieCoefficients::new([1.0, -1.0, 1.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!((c.gamma, c.lambda), (0.5, 0.5));
        assert_eq!(c.gamma, -1.0 / c.lambda1);
        let c = LeslieCoefficients::new([1.0, -1.0, 1.0, 1.0, 0.3, 0.3]).unwrap();
        assert_eq!(c.lambda, 0.0);
        assert_eq!(
            LeslieCoefficients::new([1.0, 0.0, 0.0, 1.0, 0.0, 1.0]),
            Err(LeslieError::GammaUndefined)
        );
    }

    #[test]
    fn dissipativity_verdicts() {
        let ok = check_dissipativity(&LeslieCoefficients::new([1.0, -1.0, 1.0, 1.0, 0.0, 1.0]).unwrap());
        assert!(ok.accepted());
        assert_eq!(ok.margins[3], 1.0);
        assert_eq!(ok.kappa, -0.5);
        assert_eq!(ok.margins[4], 2.0 - 0.25);
        let no_mu4 = check_dissipativity(&LeslieCoefficients::new([1.0, -1.0, 1.0, 0.0, 0.0, 1.0]).unwrap());
        assert_eq!(no_mu4.first_violation(), Some(1));
        let c = LeslieCoefficients::new([1.0, 1.0, 2.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!((c.gamma, c.lambda), (1.0, 1.0));
        let bad = check_dissipativity(&c);
        assert_eq!(bad.first_violation(), Some(3));
        assert_eq!(bad.margins[3], -2.0);
    }

    #[test]
    fn mu1_zero_is_accepted_with_flag() {
        let m = check_dissipativity(&LeslieCoefficients::new([0.0, -1.0, 1.0, 1.0, 0.0, 1.0]).unwrap());
        assert!(m.accepted());
        assert!(m.mu1_zero);
    }

    #[test]
    fn parodi_cases() {
        let c = LeslieCoefficients::new([1.0, -0.5, 1.5, 1.0, 0.0, 1.0]).unwrap();
        assert!(check_parodi(&c));
        assert_eq!(c.kappa(), 0.0);
        let c = LeslieCoefficients::new([1.0, -1.0, 1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(!check_parodi(&c));
        let c = LeslieCoefficients::new([1.0, -0.7, 0.7, 1.0, 0.4, 0.4]).unwrap();
        assert!(check_parodi(&c));
    }

    #[test]
    fn continuous_stress_hand_case() {
        // μ₁ = μ₄ = 1, μ₅ + μ₆ = 1, λ = 0 needs μ₅ = μ₆ = ½; γ only scales e-terms.
        let c = LeslieCoefficients::new([1.0, -1.0, 1.0, 1.0, 0.5, 0.5]).unwrap();
        let s = leslie_stress(&c, &Vec3::unit(0), &Vec3::ZERO, &Mat3::diag([1.0, -1.0, 0.0]));
        assert!((s - Mat3::diag([3.0, -1.0, 0.0])).max_abs() < 1e-15);
        let z = leslie_stress(&c, &Vec3::unit(0), &Vec3::ZERO, &Mat3::ZERO);
        assert_eq!(z, Mat3::ZERO);
    }

    #[test]
    fn discrete_stress_skew_term() {
        // all μ = 0 except μ₃ − μ₂ = 1 keeps only −(d⊗q)_skw.
        let c = LeslieCoefficients::new([0.0, -0.5, 0.5, 0.0, 0.0, 0.0]).unwrap();
        let t = leslie_stress_discrete(&c, &Vec3::unit(0), &Vec3::unit(1), &Mat3::ZERO);
        let expect = (outer(&Vec3::unit(1), &Vec3::unit(0)) - outer(&Vec3::unit(0), &Vec3::unit(1)))
            .scale(0.5);
        assert_eq!(t, expect);
    }

    #[test]
    fn stress_forms_agree() {
        let mut seed = 99;
        for _ in 0..1000 {
            let mu = [lcg(&mut seed), lcg(&mut seed), lcg(&mut seed), lcg(&mut seed), lcg(&mut seed), lcg(&mut seed)];
            let c = LeslieCoefficients::new(mu).unwrap();
            let (d, q) = (rv(&mut seed), rv(&mut seed));
            let gv = Mat3::from_fn(|_, _| lcg(&mut seed));
            let e = gv.sym().mul_vec(&d).scale(-c.lambda) - q.scale(c.gamma);
            let a = leslie_stress(&c, &d, &e, &gv);
            let b = leslie_stress_discrete(&c, &d, &q, &gv);
            let scale = 1.0 + a.max_abs();
            assert!((a - b).max_abs() <= 1e-12 * scale);
            let u = leslie_stress_unsorted(&c, &d, &e, &gv);
            assert!((a - u).max_abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn stress_power_matches_dissipation() {
        let mut seed = 5;
        let c = LeslieCoefficients::new([1.0, -1.0, 1.0, 1.0, 0.0, 1.0]).unwrap();
        for _ in 0..200 {
            let (d, q) = (rv(&mut seed), rv(&mut seed));
            let gv = Mat3::from_fn(|_, _| lcg(&mut seed));
            let w = gv.skw();
            let power = leslie_stress_discrete(&c, &d, &q, &gv).frob(&gv);
            // the director equation contributes −(q, W d) + λ(q, S d) + γ|q|²
            let director = -q.dot(&w.mul_vec(&d)) + c.lambda * q.dot(&gv.sym().mul_vec(&d)) + c.gamma * q.norm_sq();
            let total = power + director;
            assert!((total - dissipation_density(&c, &d, &q, &gv)).abs() < 1e-12);
        }
    }

    #[test]
    fn dissipation_bounded_below_by_margins() {
        let mut seed = 17;
        let c = LeslieCoefficients::new([1.0, -1.0, 1.0, 1.0, 0.0, 1.0]).unwrap();
        let m = check_dissipativity(&c);
        for _ in 0..1000 {
            let (d, q) = (rv(&mut seed), rv(&mut seed));
            let gv = Mat3::from_fn(|_, _| lcg(&mut seed));
            let svd = gv.sym().mul_vec(&d);
            let lhs = dissipation_density(&c, &d, &q, &gv);
            assert!(lhs + 1e-12 >= m.min_margin() * (svd.norm_sq() + q.norm_sq()));
        }
    }

    #[test]
    fn ericksen_stress_dirichlet() {
        let m = GinzburgLandau::dirichlet();
        let d = Vec3::new(0.3, 0.1, 0.2);
        assert_eq!(ericksen_stress(&m, &d, &Mat3::ZERO), Mat3::ZERO);
        let x: f64 = 0.7;
        let g = Mat3::unit(0, 0).scale(x.cos());
        let t = ericksen_stress(&m, &d, &g);
        assert!((t - Mat3::unit(0, 0).scale(x.cos() * x.cos())).max_abs() < 1e-15);
    }
}
