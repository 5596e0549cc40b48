//! Empirical constants of the Gagliardo–Nirenberg-type inequalities for
//! time-dependent director and velocity fields.
//!
//! Director: `‖∇d‖_{Lʳ(Lᵖ)}ʳ ≤ c ‖Δd‖_{L²(L²)}^{θ₁} ‖∇d‖_{L∞(L²)}^{r−θ₁}` with
//! `1/p = 1/2 − θ₁/(3r)`. Velocity: `‖v‖_{Lʳ(Lᵖ)}ʳ ≤ c ‖∇v‖²_{L²(L²)} ‖v‖_{L∞(L²)}^{r−2}`
//! with `1/p = 1/2 − 2/(3r)`. Time integrals are trapezoidal over the samples.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::grid::SpectralGrid;
use crate::spectral::{director_fields, velocity_fields, ModeTable};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exponent {
    Finite(Rational),
    Infinite,
}

impl Exponent {
    pub fn int(n: i64) -> Self {
        Exponent::Finite(Rational::from_integer(n))
    }

    fn as_f64(&self) -> f64 {
        match self {
            Exponent::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            Exponent::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(r) => write!(f, "{r}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ExponentError {
    #[error("p = {0} outside [2, 6]")]
    P(Exponent),
    #[error("theta1 = {0} outside [0, 2]")]
    Theta(Rational),
    #[error("r = inf requires p = 2")]
    InfiniteR,
    #[error("r = {0} below 2")]
    R(Exponent),
    #[error("1/p = 1/2 - 2/(3r) fails for p = {p}, r = {r}")]
    Relation { p: Exponent, r: Exponent },
    #[error("empty sample set")]
    Empty,
}

fn p_range(p: Exponent) -> Result<Rational, ExponentError> {
    match p {
        Exponent::Finite(v) if v >= Rational::from_integer(2) && v <= Rational::from_integer(6) => Ok(v),
        _ => Err(ExponentError::P(p)),
    }
}

/// `θ₁ = 3r(1/2 − 1/p)`, exact.
pub fn director_theta(p: Exponent, r: Exponent) -> Result<Rational, ExponentError> {
    let pv = p_range(p)?;
    let half = Rational::new(1, 2);
    match r {
        Exponent::Infinite => {
            if pv == Rational::from_integer(2) {
                Ok(Rational::from_integer(0))
            } else {
                Err(ExponentError::InfiniteR)
            }
        }
        Exponent::Finite(rv) => {
            if rv < Rational::from_integer(2) {
                return Err(ExponentError::R(r));
            }
            let theta = Rational::from_integer(3) * rv * (half - pv.recip());
            if theta < Rational::from_integer(0) || theta > Rational::from_integer(2) {
                return Err(ExponentError::Theta(theta));
            }
            Ok(theta)
        }
    }
}

/// Checks `1/p = 1/2 − 2/(3r)` exactly, `r ∈ [2, ∞]`.
pub fn velocity_relation(p: Exponent, r: Exponent) -> Result<(), ExponentError> {
    let pv = p_range(p)?;
    let rhs = match r {
        Exponent::Infinite => Rational::new(1, 2),
        Exponent::Finite(rv) => {
            if rv < Rational::from_integer(2) {
                return Err(ExponentError::R(r));
            }
            Rational::new(1, 2) - Rational::from_integer(2) / (Rational::from_integer(3) * rv)
        }
    };
    if pv.recip() == rhs {
        Ok(())
    } else {
        Err(ExponentError::Relation { p, r })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub p: Exponent,
    pub r: Exponent,
    pub theta: Rational,
    /// Largest observed ratio of left to right side.
    pub constant: f64,
    pub samples: usize,
    /// Constant finite and every ratio finite.
    pub passed: bool,
}

impl fmt::Display for InequalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} r={} theta={} constant={:.6e} samples={} {}",
            self.p,
            self.r,
            self.theta,
            self.constant,
            self.samples,
            if self.passed { "finite" } else { "FAILED" }
        )
    }
}

/// A trajectory sampled at increasing times: `(t, coefficients)`.
pub type SampledTrajectory = [(f64, Vec<f64>)];

fn lp_norm(values: impl Iterator<Item = f64>, p: f64, w: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        (values.map(|x| x.powf(p)).sum::<f64>() * w).powf(1.0 / p)
    }
}

fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    if t.len() == 1 {
        return 0.0;
    }
    t.windows(2).zip(f.windows(2)).map(|(t, f)| 0.5 * (t[1] - t[0]) * (f[0] + f[1])).sum()
}

/// `(‖·‖_{Lʳ(Lᵖ)}ʳ or the sup for r = ∞, ∫ high², sup low)` for per-sample norms.
fn time_norms(t: &[f64], lp: &[f64], high_sq: &[f64], low: &[f64], r: f64) -> (f64, f64, f64) {
    let lhs = if r.is_infinite() {
        lp.iter().cloned().fold(0.0, f64::max)
    } else {
        let pw: Vec<f64> = lp.iter().map(|x| x.powf(r)).collect();
        trapezoid(t, &pw)
    };
    (lhs, trapezoid(t, high_sq), low.iter().cloned().fold(0.0, f64::max))
}

fn report(p: Exponent, r: Exponent, theta: Rational, ratios: Vec<f64>) -> Result<InequalityReport, ExponentError> {
    if ratios.is_empty() {
        return Err(ExponentError::Empty);
    }
    let constant = ratios.iter().cloned().fold(0.0, f64::max);
    let passed = ratios.iter().all(|x| x.is_finite());
    Ok(InequalityReport {
        p,
        r,
        theta,
        constant,
        samples: ratios.len(),
        passed,
    })
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

/// Empirical constant of the director inequality over trajectories in the basis of `table`.
pub fn test_interpolation_inequality(
    grid: &SpectralGrid,
    table: &ModeTable,
    trajectories: &[&SampledTrajectory],
    p: Exponent,
    r: Exponent,
) -> Result<InequalityReport, ExponentError> {
    let theta = director_theta(p, r)?;
    let (pf, rf) = (p.as_f64(), r.as_f64());
    let th = *theta.numer() as f64 / *theta.denom() as f64;
    let w = grid.cell_volume();
    let mut ratios = Vec::new();
    for traj in trajectories {
        let (mut ts, mut lp, mut lap, mut l2) = (vec![], vec![], vec![], vec![]);
        for (t, c) in traj.iter() {
            let f = director_fields(grid, table, c, true);
            ts.push(*t);
            let pointwise = (0..grid.len()).map(|i| f.grad_at(i).norm());
            lp.push(lp_norm(pointwise.clone(), pf, w));
            l2.push(lp_norm(pointwise, 2.0, w));
            lap.push((0..grid.len()).map(|i| f.laplacian_at(i).norm_sq()).sum::<f64>() * w);
        }
        let (lhs, lap_int, sup) = time_norms(&ts, &lp, &lap, &l2, rf);
        let rhs = if rf.is_infinite() {
            sup
        } else {
            lap_int.sqrt().powf(th) * sup.powf(rf - th)
        };
        ratios.push(ratio(lhs, rhs));
    }
    report(p, r, theta, ratios)
}

/// Empirical constant of the velocity inequality.
pub fn test_velocity_interpolation(
    grid: &SpectralGrid,
    table: &ModeTable,
    trajectories: &[&SampledTrajectory],
    p: Exponent,
    r: Exponent,
) -> Result<InequalityReport, ExponentError> {
    velocity_relation(p, r)?;
    let (pf, rf) = (p.as_f64(), r.as_f64());
    let w = grid.cell_volume();
    let mut ratios = Vec::new();
    for traj in trajectories {
        let (mut ts, mut lp, mut grad, mut l2) = (vec![], vec![], vec![], vec![]);
        for (t, c) in traj.iter() {
            let f = velocity_fields(grid, table, c);
            ts.push(*t);
            let pointwise = (0..grid.len()).map(|i| f.v_at(i).norm());
            lp.push(lp_norm(pointwise.clone(), pf, w));
            l2.push(lp_norm(pointwise, 2.0, w));
            grad.push((0..grid.len()).map(|i| f.grad_at(i).norm_sq()).sum::<f64>() * w);
        }
        let (lhs, grad_int, sup) = time_norms(&ts, &lp, &grad, &l2, rf);
        let rhs = if rf.is_infinite() {
            sup
        } else {
            grad_int * sup.powf(rf - 2.0)
        };
        ratios.push(ratio(lhs, rhs));
    }
    report(p, r, Rational::from_integer(2), ratios)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn director_exponents() {
        assert_eq!(director_theta(Exponent::int(6), Exponent::int(2)), Ok(Rational::from_integer(2)));
        assert_eq!(director_theta(Exponent::int(2), Exponent::Infinite), Ok(Rational::from_integer(0)));
        assert_eq!(
            director_theta(Exponent::int(3), Exponent::int(4)),
            Ok(Rational::from_integer(2))
        );
        assert_eq!(director_theta(Exponent::int(7), Exponent::int(2)), Err(ExponentError::P(Exponent::int(7))));
        assert_eq!(director_theta(Exponent::int(6), Exponent::Infinite), Err(ExponentError::InfiniteR));
        assert!(matches!(
            director_theta(Exponent::int(6), Exponent::int(3)),
            Err(ExponentError::Theta(_))
        ));
    }

    #[test]
    fn velocity_exponents() {
        assert_eq!(velocity_relation(Exponent::int(6), Exponent::int(2)), Ok(()));
        assert_eq!(velocity_relation(Exponent::int(2), Exponent::Infinite), Ok(()));
        assert_eq!(
            velocity_relation(Exponent::int(3), Exponent::int(4)),
            Ok(())
        );
        assert!(matches!(
            velocity_relation(Exponent::int(4), Exponent::int(2)),
            Err(ExponentError::Relation { .. })
        ));
    }
}
