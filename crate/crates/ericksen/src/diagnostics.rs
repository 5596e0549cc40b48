//! Energy ledger, residual series, a priori monitors and the Ericksen-stress
//! identity.

use ericksen_core::leslie::ericksen_stress;
use ericksen_core::{DissipationMargins, FreeEnergy, Vec3};
use thiserror::Error;

use crate::grid::SpectralGrid;
use crate::spectral::{director_fields, velocity_fields, ModeTable};
use crate::variational::variational_derivative_divergence;

#[derive(Debug, Error, PartialEq)]
pub enum DiagError {
    #[error("need at least 3 records, got {0}")]
    TooFewRecords(usize),
    #[error("records are not strictly increasing in time at index {0}")]
    TimeOrder(usize),
}

/// All terms of the energy equality at one instant.
///
/// `residual = d/dt(kinetic + free) + dissipation − g_power − cross`, with the time
/// derivative from finite differences of neighbouring records; `residual_inst` uses
/// the assembled right-hand side instead and vanishes up to roundoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub t: f64,
    pub kinetic: f64,
    pub free: f64,
    pub total: f64,
    pub diss_mu1: f64,
    pub diss_mu4: f64,
    pub diss_a: f64,
    pub diss_gamma_q: f64,
    pub cross: f64,
    pub g_power: f64,
    pub residual: f64,
    pub residual_inst: f64,
    /// `‖d‖² + ‖∇d‖²`
    pub d_h1_sq: f64,
    pub lap_d_sq: f64,
    pub v_l2_sq: f64,
    pub grad_v_sq: f64,
    pub sv_sq: f64,
    pub svd_sq: f64,
    /// `‖d·Sv d‖²`
    pub d_svd_sq: f64,
    pub q_sq: f64,
}

impl EnergyRecord {
    pub fn dissipation(&self) -> f64 {
        self.diss_mu1 + self.diss_mu4 + self.diss_a + self.diss_gamma_q
    }

    pub fn residual_with(&self, de_dt: f64) -> f64 {
        de_dt + self.dissipation() - self.g_power - self.cross
    }

    /// Ledger CSV header, see [`EnergyRecord::csv_row`].
    pub const CSV_HEADER: &'static str =
        "t,kinetic,free,total,diss_mu1,diss_mu4,diss_A,diss_gamma_q,cross,g_power,residual";

    pub fn csv_row(&self) -> String {
        [
            self.t,
            self.kinetic,
            self.free,
            self.total,
            self.diss_mu1,
            self.diss_mu4,
            self.diss_a,
            self.diss_gamma_q,
            self.cross,
            self.g_power,
            self.residual,
        ]
        .iter()
        .map(|x| format_g17(*x))
        .collect::<Vec<_>>()
        .join(",")
    }

    /// `dissipation − cross − (α‖Sv d‖² + β‖q‖²)`; nonnegative for accepted coefficients.
    pub fn dissipation_margin(&self, m: &DissipationMargins) -> f64 {
        self.dissipation() - self.cross - (m.alpha * self.svd_sq + m.beta * self.q_sq)
    }
}

/// Shortest round-trip representation with at most 17 significant digits.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    format!("{:.16e}", x)
}

/// Derivative at `t[at]` of the quadratic through three points.
fn quad_derivative(t: [f64; 3], f: [f64; 3], at: usize) -> f64 {
    let x = t[at];
    let mut acc = 0.0;
    for j in 0..3 {
        let (a, b) = match j {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let denom = (t[j] - t[a]) * (t[j] - t[b]);
        acc += f[j] * ((x - t[a]) + (x - t[b])) / denom;
    }
    acc
}

/// Finite-difference residual of the energy equality at every record: centered
/// three-point differences inside, one-sided three-point at the ends.
pub fn energy_residual_series(records: &[EnergyRecord]) -> Result<Vec<f64>, DiagError> {
    let n = records.len();
    if n < 3 {
        return Err(DiagError::TooFewRecords(n));
    }
    if let Some(i) = (1..n).find(|&i| !(records[i].t > records[i - 1].t)) {
        return Err(DiagError::TimeOrder(i));
    }
    Ok((0..n)
        .map(|i| {
            let (lo, at) = match i {
                0 => (0, 0),
                _ if i == n - 1 => (n - 3, 2),
                _ => (i - 1, 1),
            };
            let t = [records[lo].t, records[lo + 1].t, records[lo + 2].t];
            let e = [records[lo].total, records[lo + 1].total, records[lo + 2].total];
            records[i].residual_with(quad_derivative(t, e, at))
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monotonicity {
    pub monotone: bool,
    /// Largest increase of `kinetic + free` between consecutive records.
    pub worst_increase: f64,
    pub worst_t: f64,
}

pub fn monotonicity(records: &[EnergyRecord], slack: f64) -> Monotonicity {
    let mut worst = f64::NEG_INFINITY;
    let mut worst_t = f64::NAN;
    for w in records.windows(2) {
        let inc = w[1].total - w[0].total;
        if inc > worst || inc.is_nan() {
            worst = inc;
            worst_t = w[1].t;
        }
    }
    if records.len() < 2 {
        worst = 0.0;
    }
    Monotonicity {
        monotone: worst <= slack,
        worst_increase: worst,
        worst_t,
    }
}

pub fn max_abs_residual(records: &[EnergyRecord]) -> f64 {
    records.iter().fold(0.0, |m, r| m.max(r.residual.abs()))
}

/// Running suprema and time integrals (trapezoidal) of the a priori quantities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AprioriBounds {
    pub sup_v_l2: f64,
    pub sup_d_h1: f64,
    pub int_mu4_sv: f64,
    pub int_svd: f64,
    pub int_d_svd: f64,
    pub int_lap_d: f64,
    pub int_gamma_q: f64,
}

impl AprioriBounds {
    pub fn as_array(&self) -> [(&'static str, f64); 7] {
        [
            ("sup |v|_L2", self.sup_v_l2),
            ("sup |d|_H1", self.sup_d_h1),
            ("int mu4 |Sv|^2", self.int_mu4_sv),
            ("int |Sv d|^2", self.int_svd),
            ("int |d.Sv d|^2", self.int_d_svd),
            ("int |lap d|^2", self.int_lap_d),
            ("int gamma |q|^2", self.int_gamma_q),
        ]
    }

    /// Names of the quantities exceeding `cap`.
    pub fn exceeding(&self, cap: f64) -> Vec<&'static str> {
        self.as_array()
            .iter()
            .filter(|(_, v)| !(*v <= cap))
            .map(|(n, _)| *n)
            .collect()
    }
}

pub fn apriori_monitor(records: &[EnergyRecord]) -> AprioriBounds {
    let mut b = AprioriBounds::default();
    for r in records {
        b.sup_v_l2 = b.sup_v_l2.max(r.v_l2_sq.sqrt());
        b.sup_d_h1 = b.sup_d_h1.max(r.d_h1_sq.sqrt());
    }
    for w in records.windows(2) {
        let h = 0.5 * (w[1].t - w[0].t);
        b.int_mu4_sv += h * (w[0].diss_mu4 + w[1].diss_mu4);
        b.int_svd += h * (w[0].svd_sq + w[1].svd_sq);
        b.int_d_svd += h * (w[0].d_svd_sq + w[1].d_svd_sq);
        b.int_lap_d += h * (w[0].lap_d_sq + w[1].lap_d_sq);
        b.int_gamma_q += h * (w[0].diss_gamma_q + w[1].diss_gamma_q);
    }
    b
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResidual {
    /// `(Tᴱ : ∇v) − (∇dᵀ q, v)`
    pub value: f64,
    /// `∫|Tᴱ : ∇v| + ∫|∇dᵀq · v|`
    pub scale: f64,
}

impl IdentityResidual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.value.abs()
        } else {
            self.value.abs() / self.scale
        }
    }
}

/// Ericksen-stress identity on the grid with the unprojected `q`; for solenoidal
/// `v` on the periodic box the two pairings agree.
pub fn test_ericksen_identity<M: FreeEnergy + ?Sized>(
    model: &M,
    grid: &SpectralGrid,
    dtable: &ModeTable,
    d: &[f64],
    vtable: &ModeTable,
    v: &[f64],
) -> IdentityResidual {
    let df = director_fields(grid, dtable, d, false);
    let vf = velocity_fields(grid, vtable, v);
    let q = variational_derivative_divergence(model, grid, &df);
    let (mut value, mut scale) = (0.0, 0.0);
    for p in 0..grid.len() {
        let dp = df.d_at(p);
        let gd = df.grad_at(p);
        let gv = vf.grad_at(p);
        let te = ericksen_stress(model, &dp, &gd);
        let a = te.frob(&gv);
        let b = gd.tr_mul_vec(&Vec3::new(q[0][p], q[1][p], q[2][p])).dot(&vf.v_at(p));
        value += a - b;
        scale += a.abs() + b.abs();
    }
    let w = grid.cell_volume();
    IdentityResidual {
        value: value * w,
        scale: scale * w,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(t: f64, total: f64) -> EnergyRecord {
        EnergyRecord {
            t,
            kinetic: 0.0,
            free: total,
            total,
            diss_mu1: 0.0,
            diss_mu4: 0.0,
            diss_a: 0.0,
            diss_gamma_q: 0.0,
            cross: 0.0,
            g_power: 0.0,
            residual: f64::NAN,
            residual_inst: 0.0,
            d_h1_sq: 0.0,
            lap_d_sq: 0.0,
            v_l2_sq: 0.0,
            grad_v_sq: 0.0,
            sv_sq: 0.0,
            svd_sq: 0.0,
            d_svd_sq: 0.0,
            q_sq: 0.0,
        }
    }

    #[test]
    fn quadratic_derivatives_are_exact() {
        let t = [0.0, 0.3, 1.0];
        let f = t.map(|x| 2.0 * x * x - x + 5.0);
        for at in 0..3 {
            let want = 4.0 * t[at] - 1.0;
            assert!((quad_derivative(t, f, at) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn residual_series_needs_three_records() {
        assert_eq!(
            energy_residual_series(&[rec(0.0, 1.0), rec(1.0, 1.0)]),
            Err(DiagError::TooFewRecords(2))
        );
        let r = energy_residual_series(&[rec(0.0, 1.0), rec(1.0, 1.0), rec(2.0, 1.0)]).unwrap();
        assert_eq!(r, vec![0.0; 3]);
    }

    #[test]
    fn monotonicity_verdict() {
        let recs = [rec(0.0, 3.0), rec(1.0, 2.0), rec(2.0, 2.0 + 1e-9)];
        assert!(monotonicity(&recs, 1e-8).monotone);
        assert!(!monotonicity(&recs, 1e-10).monotone);
        assert_eq!(monotonicity(&recs, 0.0).worst_t, 2.0);
    }

    #[test]
    fn csv_uses_17_digits() {
        assert_eq!(format_g17(0.1), "1.0000000000000001e-1");
        assert_eq!("0.1".parse::<f64>().unwrap(), format_g17(0.1).parse::<f64>().unwrap());
        assert_eq!(format_g17(0.0), "0");
    }
}
