//! The Galerkin ODE system for `(v̂, d̂)` and its fixed-step integrating-factor
//! RK4 integrator.

use ericksen_core::leslie::leslie_stress_discrete;
use ericksen_core::{FreeEnergy, LeslieCoefficients, Mat3, Vec3};
use rustfft::num_complex::Complex64;
use thiserror::Error;

use crate::basis::{director_basis_for, build_velocity_basis, BasisError, DirectorBasis, Mode, VelocityBasis};
use crate::diagnostics::EnergyRecord;
use crate::grid::{GridError, SpectralGrid};
use crate::spectral::{
    director_fields, project, synthesize_field, velocity_fields, Field, ModeTable, VectorField,
};
use crate::variational::{total_energy, variational_derivative_spectra};

/// Coefficients above this magnitude count as blow-up.
pub const BLOW_UP: f64 = 1e12;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("forcing has {got} coefficients, velocity basis has {want}")]
    Forcing { got: usize, want: usize },
    #[error("numerical blow-up after t = {t}")]
    BlowUp { t: f64 },
    #[error("invalid time step {0}")]
    TimeStep(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    pub t: f64,
    pub v: Vec<f64>,
    pub d: Vec<f64>,
}

impl SpectralState {
    pub fn zeros(t: f64, nv: usize, nd: usize) -> Self {
        SpectralState {
            t,
            v: vec![0.0; nv],
            d: vec![0.0; nd],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.v.iter().chain(&self.d).all(|c| c.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.v.iter().chain(&self.d).fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Time derivative of a state together with `q̂ = Rₙ q`.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub dv: Vec<f64>,
    pub dd: Vec<f64>,
    pub q: Vec<f64>,
    pub record: Option<EnergyRecord>,
}

pub struct Simulator<M> {
    model: M,
    coeffs: LeslieCoefficients,
    grid: SpectralGrid,
    velocity: VelocityBasis,
    director: DirectorBasis,
    vtable: ModeTable,
    dtable: ModeTable,
    forcing: Vec<f64>,
    /// Diagonal linear part, velocity modes first.
    linear: Vec<f64>,
    k_sq_d: Vec<f64>,
    k_sq_v: Vec<f64>,
}

impl<M: FreeEnergy> Simulator<M> {
    pub fn new(
        model: M,
        coeffs: LeslieCoefficients,
        grid: SpectralGrid,
        n_v: Option<usize>,
        n_d: Option<usize>,
    ) -> Result<Self, SimError> {
        let velocity = build_velocity_basis(grid.cutoff(), n_v);
        let director = director_basis_for(&model, grid.cutoff(), n_d)?;
        Ok(Self::with_bases(model, coeffs, grid, velocity, director))
    }

    pub fn with_bases(
        model: M,
        coeffs: LeslieCoefficients,
        grid: SpectralGrid,
        velocity: VelocityBasis,
        director: DirectorBasis,
    ) -> Self {
        let vtable = ModeTable::new(&grid, &velocity);
        let dtable = ModeTable::new(&grid, &director);
        let k_sq_v: Vec<f64> = velocity.modes().iter().map(|m| m.k_sq()).collect();
        let k_sq_d: Vec<f64> = director.modes().iter().map(|m| m.k_sq()).collect();
        let linear = k_sq_v
            .iter()
            .map(|k| -0.5 * coeffs.mu(4) * k)
            .chain(director.modes().iter().map(|m| -coeffs.gamma * m.sigma))
            .collect();
        Simulator {
            model,
            coeffs,
            forcing: vec![0.0; velocity.len()],
            grid,
            velocity,
            director,
            vtable,
            dtable,
            linear,
            k_sq_d,
            k_sq_v,
        }
    }

    /// Sets `g` by its velocity-basis coefficients `⟨g, wᵢ⟩`.
    pub fn set_forcing(&mut self, g: Vec<f64>) -> Result<(), SimError> {
        if g.len() != self.velocity.len() {
            return Err(SimError::Forcing {
                got: g.len(),
                want: self.velocity.len(),
            });
        }
        self.forcing = g;
        Ok(())
    }

    /// Sets `g` from grid values; only `Pₙ g` enters the scheme.
    pub fn set_forcing_field(&mut self, g: &VectorField) -> Result<(), SimError> {
        let c = project(&self.grid, &self.vtable, g)?;
        self.set_forcing(c)
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn coeffs(&self) -> &LeslieCoefficients {
        &self.coeffs
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn velocity_basis(&self) -> &VelocityBasis {
        &self.velocity
    }

    pub fn director_basis(&self) -> &DirectorBasis {
        &self.director
    }

    pub fn velocity_table(&self) -> &ModeTable {
        &self.vtable
    }

    pub fn director_table(&self) -> &ModeTable {
        &self.dtable
    }

    pub fn forcing(&self) -> &[f64] {
        &self.forcing
    }

    /// Diagonal of the stiff linear part: `−(μ₄/2)|k|²` then `−γσᵢ`.
    pub fn linear_part(&self) -> &[f64] {
        &self.linear
    }

    /// `vₙ(0) = Pₙ v₀`, `dₙ(0) = Rₙ d₀`.
    pub fn initial_projection(&self, v0: &VectorField, d0: &VectorField) -> Result<SpectralState, SimError> {
        Ok(SpectralState {
            t: 0.0,
            v: project(&self.grid, &self.vtable, v0)?,
            d: project(&self.grid, &self.dtable, d0)?,
        })
    }

    /// Unprojected grid values of `q` and the coefficients of `qₙ = Rₙ q`.
    pub fn compute_q(&self, state: &SpectralState) -> (VectorField, Vec<f64>) {
        let df = director_fields(&self.grid, &self.dtable, &state.d, false);
        let s = variational_derivative_spectra(&self.model, &self.grid, &df);
        let coeffs = self.dtable.analyze([&s[0], &s[1], &s[2]]);
        let mut f = self.grid.grid_fields(&[&s[0], &s[1], &s[2]]).expect("grid shape");
        let c = f.pop().unwrap();
        let b = f.pop().unwrap();
        let a = f.pop().unwrap();
        ([a, b, c], coeffs)
    }

    /// Right-hand side of the Galerkin system; with `ledger` also the energy terms.
    pub fn evaluate(&self, state: &SpectralState, ledger: bool) -> Evaluation {
        let g = &self.grid;
        let n = g.len();
        let c = &self.coeffs;
        let df = director_fields(g, &self.dtable, &state.d, false);
        let vf = if state.v.iter().all(|&x| x == 0.0) {
            None
        } else {
            Some(velocity_fields(g, &self.vtable, &state.v))
        };
        let qs = variational_derivative_spectra(&self.model, g, &df);
        let q = self.dtable.analyze([&qs[0], &qs[1], &qs[2]]);
        let qn = synthesize_field(g, &self.dtable, &q);

        // 0..3 ∇dᵀq − (v·∇)v, 3..12 Tᴸ row-major, 12..15 director transport
        let mut out: Vec<Field> = vec![vec![0.0; n]; 15];
        let mut sums = [0.0f64; 5];
        for p in 0..n {
            let d = df.d_at(p);
            let gd = df.grad_at(p);
            let qv = Vec3::new(qn[0][p], qn[1][p], qn[2][p]);
            let (v, gv) = match &vf {
                Some(f) => (f.v_at(p), f.grad_at(p)),
                None => (Vec3::default(), Mat3::ZERO),
            };
            let fv = gd.tr_mul_vec(&qv) - gv.mul_vec(&v);
            let tl = leslie_stress_discrete(c, &d, &qv, &gv);
            let sv = gv.sym();
            let svd = sv.mul_vec(&d);
            let rd = gv.skw().mul_vec(&d) - gd.mul_vec(&v) - svd.scale(c.lambda);
            for i in 0..3 {
                out[i][p] = fv.0[i];
                out[12 + i][p] = rd.0[i];
                for j in 0..3 {
                    out[3 + 3 * i + j][p] = tl.0[i][j];
                }
            }
            if ledger {
                let dsd = d.dot(&svd);
                sums[0] += dsd * dsd;
                sums[1] += sv.norm_sq();
                sums[2] += svd.norm_sq();
                sums[3] += qv.dot(&svd);
            }
        }
        let refs: Vec<&[f64]> = out.iter().map(|f| f.as_slice()).collect();
        let s = g.spectra(&refs).expect("grid shape");
        let vel: [Vec<Complex64>; 3] = std::array::from_fn(|i| {
            (0..n)
                .map(|idx| {
                    let k = g.derivative_wavevector(idx);
                    let mut acc = s[i][idx];
                    for j in 0..3 {
                        acc += s[3 + 3 * i + j][idx] * Complex64::new(0.0, k[j]);
                    }
                    acc
                })
                .collect()
        });
        let mut dv = self.vtable.analyze([&vel[0], &vel[1], &vel[2]]);
        for (a, b) in dv.iter_mut().zip(&self.forcing) {
            *a += b;
        }
        let mut dd = self.dtable.analyze([&s[12], &s[13], &s[14]]);
        for (a, b) in dd.iter_mut().zip(&q) {
            *a -= c.gamma * b;
        }

        let record = ledger.then(|| {
            let w = g.cell_volume();
            sums[4] = total_energy(&self.model, g, &df);
            let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
            let weighted = |a: &[f64], k: &[f64], pow: i32| -> f64 {
                a.iter().zip(k).map(|(x, kk)| x * x * kk.powi(pow)).sum()
            };
            let q_sq = dot(&q, &q);
            let d_sq = dot(&state.d, &state.d);
            let v_sq = dot(&state.v, &state.v);
            let mut r = EnergyRecord {
                t: state.t,
                kinetic: 0.5 * v_sq,
                free: sums[4],
                total: 0.0,
                diss_mu1: c.mu(1) * sums[0] * w,
                diss_mu4: c.mu(4) * sums[1] * w,
                diss_a: c.a() * sums[2] * w,
                diss_gamma_q: c.gamma * q_sq,
                cross: c.kappa() * sums[3] * w,
                g_power: dot(&self.forcing, &state.v),
                residual: f64::NAN,
                residual_inst: 0.0,
                d_h1_sq: d_sq + weighted(&state.d, &self.k_sq_d, 1),
                lap_d_sq: weighted(&state.d, &self.k_sq_d, 2),
                v_l2_sq: v_sq,
                grad_v_sq: weighted(&state.v, &self.k_sq_v, 1),
                sv_sq: sums[1] * w,
                svd_sq: sums[2] * w,
                d_svd_sq: sums[0] * w,
                q_sq,
            };
            r.total = r.kinetic + r.free;
            let de_dt = dot(&state.v, &dv) + dot(&q, &dd);
            r.residual_inst = r.residual_with(de_dt);
            r
        });
        Evaluation { dv, dd, q, record }
    }

    fn nonlinear(&self, u: &[f64], t: f64, nv: usize, ledger: bool) -> (Vec<f64>, Option<EnergyRecord>) {
        let st = SpectralState {
            t,
            v: u[..nv].to_vec(),
            d: u[nv..].to_vec(),
        };
        let e = self.evaluate(&st, ledger);
        let mut f = e.dv;
        f.extend(e.dd);
        for ((fi, li), ui) in f.iter_mut().zip(&self.linear).zip(u) {
            *fi -= li * ui;
        }
        (f, e.record)
    }

    /// One Lawson integrating-factor RK4 step; optionally also returns the energy
    /// record of the input state (computed from the first stage at no extra cost).
    pub fn step_with_record(
        &self,
        state: &SpectralState,
        dt: f64,
        ledger: bool,
    ) -> Result<(SpectralState, Option<EnergyRecord>), SimError> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(SimError::TimeStep(dt));
        }
        let nv = state.v.len();
        let mut u = state.v.clone();
        u.extend_from_slice(&state.d);
        if dt == 0.0 {
            let rec = ledger.then(|| self.evaluate(state, true).record.unwrap());
            return Ok((state.clone(), rec));
        }
        let e1: Vec<f64> = self.linear.iter().map(|l| (0.5 * l * dt).exp()).collect();
        let h = dt;
        let t = state.t;
        let (k1, rec) = self.nonlinear(&u, t, nv, ledger);
        let u2: Vec<f64> = (0..u.len()).map(|i| e1[i] * (u[i] + 0.5 * h * k1[i])).collect();
        let (k2, _) = self.nonlinear(&u2, t + 0.5 * h, nv, false);
        let u3: Vec<f64> = (0..u.len()).map(|i| e1[i] * u[i] + 0.5 * h * k2[i]).collect();
        let (k3, _) = self.nonlinear(&u3, t + 0.5 * h, nv, false);
        let u4: Vec<f64> = (0..u.len())
            .map(|i| e1[i] * e1[i] * u[i] + h * e1[i] * k3[i])
            .collect();
        let (k4, _) = self.nonlinear(&u4, t + h, nv, false);
        let next: Vec<f64> = (0..u.len())
            .map(|i| {
                let e2 = e1[i] * e1[i];
                e2 * u[i] + h / 6.0 * (e2 * k1[i] + 2.0 * e1[i] * (k2[i] + k3[i]) + k4[i])
            })
            .collect();
        let out = SpectralState {
            t: t + h,
            d: next[nv..].to_vec(),
            v: {
                let mut v = next;
                v.truncate(nv);
                v
            },
        };
        if !out.is_finite() || out.max_abs() > BLOW_UP {
            return Err(SimError::BlowUp { t: state.t });
        }
        Ok((out, rec))
    }

    pub fn step(&self, state: &SpectralState, dt: f64) -> Result<SpectralState, SimError> {
        self.step_with_record(state, dt, false).map(|(s, _)| s)
    }

    pub fn record(&self, state: &SpectralState) -> EnergyRecord {
        self.evaluate(state, true).record.expect("ledger requested")
    }

    /// Integrates to `settings.t_end`, recording every `record_every` steps and at
    /// the final time; the finite-difference residual column is filled at the end.
    pub fn run(&self, initial: SpectralState, settings: &RunSettings) -> Result<Trajectory, RunFailure> {
        let dt = settings.dt;
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(RunFailure {
                error: SimError::TimeStep(dt),
                partial: Trajectory::default(),
            });
        }
        let t0 = initial.t;
        let span = settings.t_end - t0;
        let steps = if span <= 0.0 {
            0
        } else {
            (span / dt - 1e-9).ceil() as usize
        };
        let every = settings.record_every.max(1);
        let mut traj = Trajectory::default();
        let mut state = initial;
        for i in 0..steps {
            let t_next = if i + 1 == steps { settings.t_end } else { t0 + (i + 1) as f64 * dt };
            let h = t_next - state.t;
            if settings.snapshot_every > 0 && i % settings.snapshot_every == 0 {
                traj.snapshots.push(state.clone());
            }
            let want = i % every == 0;
            match self.step_with_record(&state, h, want) {
                Ok((mut next, rec)) => {
                    next.t = t_next;
                    traj.records.extend(rec);
                    state = next;
                }
                Err(error) => {
                    if traj.records.last().map_or(true, |r| r.t != state.t) {
                        traj.records.push(self.record(&state));
                    }
                    traj.final_state = Some(state);
                    fill_residuals(&mut traj.records);
                    return Err(RunFailure { error, partial: traj });
                }
            }
        }
        traj.records.push(self.record(&state));
        if settings.snapshot_every > 0 {
            traj.snapshots.push(state.clone());
        }
        traj.final_state = Some(state);
        fill_residuals(&mut traj.records);
        Ok(traj)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
    /// `0` disables snapshots.
    pub snapshot_every: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub records: Vec<EnergyRecord>,
    pub snapshots: Vec<SpectralState>,
    pub final_state: Option<SpectralState>,
}

#[derive(Debug)]
pub struct RunFailure {
    pub error: SimError,
    pub partial: Trajectory,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for RunFailure {}

fn fill_residuals(records: &mut [EnergyRecord]) {
    if let Ok(r) = crate::diagnostics::energy_residual_series(records) {
        for (rec, res) in records.iter_mut().zip(r) {
            rec.residual = res;
        }
    }
}
