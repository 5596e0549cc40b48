//! Sampling-based certification of the structural conditions on `F`.
//!
//! Each checker visits the coordinate axes first and then a deterministic Halton
//! sequence, and reports the worst sample. Comparisons allow a relative rounding
//! slack of `1e-12` times the magnitude of the compared quantities.

use alloc::string::String;
use core::fmt;

use super::sampling::{radius, sphere, unit_matrix, Halton};
use super::{Coercivity, FreeEnergy, Growth};
use crate::tensor::{Mat3, Tensor4, Vec3};

const ROUNDING: f64 = 1e-12;

/// Where a checker found its worst case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplePoint {
    None,
    Directions { a: Vec3, b: Vec3 },
    State { h: Vec3, s: Mat3 },
}

/// Outcome of one condition check.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub name: String,
    pub passed: bool,
    pub worst_point: SamplePoint,
    /// The checked quantity at the worst point (form value, ratio or norm).
    pub worst_value: f64,
    /// Signed distance to failure at the worst point; negative beyond the slack means failure.
    pub worst_margin: f64,
    pub samples: usize,
    pub tolerance: f64,
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<20} {}  worst value {:.6e}  margin {:.6e}  ({} samples)",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.worst_value,
            self.worst_margin,
            self.samples
        )
    }
}

struct Worst {
    point: SamplePoint,
    value: f64,
    margin: f64,
    tolerance: f64,
    samples: usize,
}

impl Worst {
    fn new() -> Self {
        Worst {
            point: SamplePoint::None,
            value: f64::NAN,
            margin: f64::INFINITY,
            tolerance: 0.0,
            samples: 0,
        }
    }

    /// Records a sample; the failure test is `margin < −tolerance`.
    fn push(&mut self, point: SamplePoint, value: f64, margin: f64, tolerance: f64) {
        self.samples += 1;
        if self.margin.is_nan() {
            return;
        }
        if margin.is_nan() || margin + tolerance < self.margin + self.tolerance {
            self.point = point;
            self.value = value;
            self.margin = margin;
            self.tolerance = tolerance;
        }
    }

    fn ok(&self) -> bool {
        !self.margin.is_nan() && self.margin >= -self.tolerance
    }

    fn report(self, name: &str, extra_ok: bool) -> ConditionReport {
        ConditionReport {
            name: String::from(name),
            passed: extra_ok && self.ok(),
            worst_point: self.point,
            worst_value: self.value,
            worst_margin: self.margin,
            samples: self.samples,
            tolerance: self.tolerance,
        }
    }
}

/// Axis samples followed by Halton samples of `(h, S)` with `|h|, |S| ≤ r`.
fn states(n: usize, r: f64) -> impl Iterator<Item = (Vec3, Mat3)> {
    let mut axes = alloc::vec::Vec::new();
    for sign in [1.0, -1.0] {
        for i in 0..3 {
            axes.push((Vec3::unit(i).scale(sign * r), Mat3::ZERO));
        }
        for i in 0..3 {
            for j in 0..3 {
                axes.push((Vec3::ZERO, Mat3::unit(i, j).scale(sign * r)));
                for k in 0..3 {
                    axes.push((Vec3::unit(k), Mat3::unit(i, j).scale(sign * r)));
                    axes.push((Vec3::unit(k).scale(r), Mat3::unit(i, j).scale(sign * r)));
                }
            }
        }
    }
    axes.push((Vec3::ZERO, Mat3::ZERO));
    let mut halton = Halton::new();
    let random = (0..n).map(move |i| {
        let u = halton.next_point::<14>();
        let log = i % 2 == 1;
        let h = sphere(&u[0..2]).scale(radius(u[2], r, log));
        let s = unit_matrix(&u[3..12]).scale(radius(u[12], r, log));
        // the 14th coordinate decorrelates the two radii between parities
        let s = if u[13] < 0.5 { s } else { s.transpose() };
        (h, s)
    });
    axes.into_iter().chain(random)
}

/// Minimum of `a⊗b:Λ:a⊗b` over unit `a, b` against the declared constant `η`.
pub fn check_legendre_hadamard<M: FreeEnergy + ?Sized>(model: &M, n_samples: usize) -> ConditionReport {
    check_legendre_hadamard_with(&model.lambda(), model.ellipticity(), n_samples)
}

pub fn check_legendre_hadamard_with(lambda: &Tensor4, eta: f64, n_samples: usize) -> ConditionReport {
    let mut worst = Worst::new();
    let scale = lambda.max_abs();
    let mut visit = |a: Vec3, b: Vec3| {
        let form = lambda.rank_one_form(&a, &b);
        worst.push(
            SamplePoint::Directions { a, b },
            form,
            form - eta,
            ROUNDING * (scale + eta.abs()),
        );
    };
    for i in 0..3 {
        for j in 0..3 {
            visit(Vec3::unit(i), Vec3::unit(j));
        }
    }
    let mut halton = Halton::new();
    for _ in 0..n_samples.max(1) {
        let u = halton.next_point::<4>();
        visit(sphere(&u[0..2]), sphere(&u[2..4]));
    }
    worst.report("legendre_hadamard", eta > 0.0)
}

/// `F(h,S) ≥ η₁|S|² − η₂|h|² − η₃` with the model's declared constants.
pub fn check_coercivity<M: FreeEnergy + ?Sized>(model: &M, n_samples: usize, r: f64) -> ConditionReport {
    check_coercivity_with(model, &model.coercivity(), n_samples, r)
}

pub fn check_coercivity_with<M: FreeEnergy + ?Sized>(
    model: &M,
    c: &Coercivity,
    n_samples: usize,
    r: f64,
) -> ConditionReport {
    let mut worst = Worst::new();
    for (h, s) in states(n_samples, r) {
        let f = model.evaluate(&h, &s);
        let lower = c.lower_bound(&h, &s);
        let tol = ROUNDING
            * (f.abs() + (c.eta1 * s.norm_sq()).abs() + (c.eta2 * h.norm_sq()).abs() + c.eta3.abs());
        worst.push(SamplePoint::State { h, s }, f - lower, f - lower, tol);
    }
    worst.report("coercivity", c.is_admissible())
}

/// Both growth bounds with the model's declared exponents and constants;
/// the reported value is the larger ratio `|lhs| / bound`.
pub fn check_growth<M: FreeEnergy + ?Sized>(model: &M, n_samples: usize, r: f64) -> ConditionReport {
    check_growth_with(model, &model.growth(), n_samples, r)
}

pub fn check_growth_with<M: FreeEnergy + ?Sized>(
    model: &M,
    g: &Growth,
    n_samples: usize,
    r: f64,
) -> ConditionReport {
    let mut worst = Worst::new();
    for (h, s) in states(n_samples, r) {
        let (hn, sn) = (h.norm(), s.norm());
        let mixed = model.d2f_dsdh(&h, &s).norm() / g.mixed_bound(hn, sn);
        let dh = model.df_dh(&h, &s).norm() / g.dh_bound(hn, sn);
        let ratio = f64::max(mixed, dh);
        worst.push(SamplePoint::State { h, s }, ratio, 1.0 - ratio, ROUNDING);
    }
    worst.report("growth", g.exponents_admissible())
}

/// `sup |Θ(h,S)| ≤ c_Λ / (16 c_{H²})` with the Frobenius norm over all 81 entries.
pub fn check_theta_bound<M: FreeEnergy + ?Sized>(
    model: &M,
    n_samples: usize,
    c_lambda: f64,
    c_h2: f64,
) -> ConditionReport {
    let bound = c_lambda / (16.0 * c_h2);
    let mut worst = Worst::new();
    if !model.has_theta() {
        worst.push(SamplePoint::None, 0.0, bound, 0.0);
    } else {
        for (h, s) in states(n_samples, 1e3) {
            let t = model.theta(&h, &s).norm();
            worst.push(SamplePoint::State { h, s }, t, bound - t, ROUNDING * bound);
        }
    }
    worst.report("theta_bound", c_lambda > 0.0 && c_h2 > 0.0)
}
