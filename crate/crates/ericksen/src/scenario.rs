//! Scenario execution, assertion checking and the reports behind the CLI
//! subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ericksen_core::energy::{check_coercivity, check_growth, check_legendre_hadamard, check_theta_bound};
use ericksen_core::leslie::CONDITION_NAMES;
use ericksen_core::{check_dissipativity, check_parodi, FreeEnergy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::basis::{build_velocity_basis, calibrate, director_basis_for, Mode};
use crate::config::{parse_config_str, ConfigError, Scenario, SimulationConfig};
use crate::diagnostics::{apriori_monitor, max_abs_residual, monotonicity, EnergyRecord};
use crate::grid::SpectralGrid;
use crate::interpolation::{
    test_interpolation_inequality, test_velocity_interpolation, Exponent, InequalityReport, Rational,
    SampledTrajectory,
};
use crate::io::{basis_manifest, write_checkpoint, write_ledger};
use crate::simulator::{RunSettings, SimError, Simulator, SpectralState, Trajectory};
use crate::spectral::ModeTable;

/// Environment variable naming the output root (default `ericksen-out`).
pub const OUT_DIR_VAR: &str = "ERICKSEN_OUT_DIR";

pub type Model = Box<dyn FreeEnergy>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    Pass = 0,
    AssertionFailed = 1,
    ConfigError = 2,
    BlowUp = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown built-in scenario `{0}`")]
    UnknownBuiltin(String),
}

impl ScenarioError {
    pub fn status(&self) -> ExitStatus {
        match self {
            ScenarioError::Sim(SimError::BlowUp { .. }) => ExitStatus::BlowUp,
            _ => ExitStatus::ConfigError,
        }
    }
}

const BUILTINS: [(&str, &str); 7] = [
    ("director-relaxation", include_str!("../scenarios/director-relaxation.toml")),
    ("stokes-decay", include_str!("../scenarios/stokes-decay.toml")),
    ("energy-decay", include_str!("../scenarios/energy-decay.toml")),
    ("parodi-cross", include_str!("../scenarios/parodi-cross.toml")),
    ("initial-only", include_str!("../scenarios/initial-only.toml")),
    ("gl-nonlinear", include_str!("../scenarios/gl-nonlinear.toml")),
    ("oseen-frank-flow", include_str!("../scenarios/oseen-frank-flow.toml")),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn builtin(name: &str) -> Result<Scenario, ScenarioError> {
    let src = builtin_source(name).ok_or_else(|| ScenarioError::UnknownBuiltin(name.into()))?;
    Ok(parse_config_str(src, name)?)
}

/// Simulator and projected initial state for a configuration.
pub fn prepare(cfg: &SimulationConfig) -> Result<(Simulator<Model>, SpectralState), ScenarioError> {
    let model = cfg.model.build()?;
    let coeffs = cfg.leslie.coefficients()?;
    let grid = cfg.spectral_grid();
    let mut sim = Simulator::new(model, coeffs, grid, cfg.grid.n_v, cfg.grid.n_d)?;
    let (g, vt, dt) = (sim.grid(), sim.velocity_table(), sim.director_table());
    let v = cfg.initial.velocity.coefficients(g, vt, sim.velocity_basis().modes());
    let d = cfg.initial.director.coefficients(g, dt, sim.director_basis().modes());
    let f = cfg.forcing.coefficients(g, vt, sim.velocity_basis().modes());
    sim.set_forcing(f)?;
    Ok((sim, SpectralState { t: 0.0, v, d }))
}

pub fn settings(cfg: &SimulationConfig) -> RunSettings {
    RunSettings {
        dt: cfg.time.dt,
        t_end: cfg.time.t_end,
        record_every: cfg.io.record_every,
        snapshot_every: cfg.io.snapshot_every,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn decay_check(name: &str, records: &[EnergyRecord], rate: f64, tol: f64, get: fn(&EnergyRecord) -> f64) -> Assertion {
    let e0 = records.first().map(get).unwrap_or(0.0);
    let mut worst = 0.0f64;
    for r in records {
        let want = e0 * (-rate * r.t).exp();
        let rel = if want == 0.0 { get(r).abs() } else { (get(r) - want).abs() / want.abs() };
        if rel > worst || rel.is_nan() {
            worst = rel;
        }
    }
    Assertion {
        name: format!("{name} decays at rate {rate}"),
        passed: worst <= tol,
        detail: format!("max relative deviation {worst:.3e} (tolerance {tol:.1e})"),
    }
}

pub fn check_expectations(cfg: &SimulationConfig, records: &[EnergyRecord]) -> Vec<Assertion> {
    let e = &cfg.expect;
    let tol = e.tolerance.unwrap_or(1e-6);
    let mut out = Vec::new();
    if let Some(rate) = e.kinetic_decay_rate {
        out.push(decay_check("kinetic energy", records, rate, tol, |r| r.kinetic));
    }
    if let Some(rate) = e.free_decay_rate {
        out.push(decay_check("free energy", records, rate, tol, |r| r.free));
    }
    if e.monotone {
        let slack = e.monotone_slack.unwrap_or(1e-8);
        let m = monotonicity(records, slack);
        out.push(Assertion {
            name: "total energy non-increasing".into(),
            passed: m.monotone,
            detail: format!("largest increase {:.3e} at t = {} (slack {slack:.1e})", m.worst_increase, m.worst_t),
        });
    }
    if let Some(cap) = e.residual_cap {
        let r = max_abs_residual(records);
        let ok = records.len() >= 3 && r <= cap;
        out.push(Assertion {
            name: "energy residual below cap".into(),
            passed: ok,
            detail: if records.len() < 3 {
                format!("only {} records", records.len())
            } else {
                format!("max |residual| {r:.3e} (cap {cap:.1e})")
            },
        });
    }
    if let Some(cap) = e.apriori_cap {
        let over = apriori_monitor(records).exceeding(cap);
        out.push(Assertion {
            name: "a priori quantities below cap".into(),
            passed: over.is_empty(),
            detail: if over.is_empty() { format!("all below {cap:.1e}") } else { over.join(", ") },
        });
    }
    if e.zero_cross {
        let nz = records.iter().filter(|r| r.cross != 0.0).count();
        out.push(Assertion {
            name: "cross term identically zero".into(),
            passed: nz == 0,
            detail: format!("{nz} nonzero entries"),
        });
    }
    out
}

#[derive(Debug)]
pub struct RunOutcome {
    pub name: String,
    pub status: ExitStatus,
    pub trajectory: Trajectory,
    pub assertions: Vec<Assertion>,
    pub report: String,
    pub error: Option<String>,
    pub out_dir: Option<PathBuf>,
}

pub fn output_root() -> PathBuf {
    std::env::var_os(OUT_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("ericksen-out"))
}

/// Runs a scenario; with `out_root`, writes `ledger.csv`, `report.txt`,
/// `basis.csv` and `checkpoint.bin` under `out_root/<name>/`.
pub fn run_scenario(scenario: &Scenario, out_root: Option<&Path>) -> Result<RunOutcome, ScenarioError> {
    let cfg = &scenario.config;
    let (sim, initial) = prepare(cfg)?;
    let (trajectory, error) = match sim.run(initial, &settings(cfg)) {
        Ok(t) => (t, None),
        Err(f) => (f.partial, Some(f.error)),
    };
    let assertions = if error.is_none() { check_expectations(cfg, &trajectory.records) } else { Vec::new() };
    let status = match (&error, assertions.iter().all(|a| a.passed)) {
        (Some(_), _) => ExitStatus::BlowUp,
        (None, true) => ExitStatus::Pass,
        (None, false) => ExitStatus::AssertionFailed,
    };

    let mut report = String::new();
    let _ = writeln!(report, "scenario {}", scenario.name);
    let _ = writeln!(report, "model {}", sim.model().name());
    let c = sim.coeffs();
    let _ = writeln!(
        report,
        "leslie mu = {:?}  gamma = {}  lambda = {}  A = {}  kappa = {}",
        c.mus(),
        c.gamma,
        c.lambda,
        c.a(),
        c.kappa()
    );
    let m = check_dissipativity(c);
    if m.mu1_zero {
        let _ = writeln!(report, "warning: mu1 = 0");
    }
    let _ = writeln!(
        report,
        "grid n = {}  cutoff = {}  velocity modes = {}  director modes = {}",
        sim.grid().n(),
        sim.grid().cutoff(),
        sim.velocity_basis().len(),
        sim.director_basis().len()
    );
    let _ = writeln!(report, "records {}", trajectory.records.len());
    if let (Some(first), Some(last)) = (trajectory.records.first(), trajectory.records.last()) {
        let _ = writeln!(report, "energy t={} {:.17e} -> t={} {:.17e}", first.t, first.total, last.t, last.total);
        let _ = writeln!(report, "max |residual| {:.3e}", max_abs_residual(&trajectory.records));
        for (n, v) in apriori_monitor(&trajectory.records).as_array() {
            let _ = writeln!(report, "{n:<18} {v:.6e}");
        }
    }
    if let Some(e) = &error {
        let _ = writeln!(report, "error: {e}");
    }
    for a in &assertions {
        let _ = writeln!(report, "{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    let _ = writeln!(report, "status {}", status.code());

    let out_dir = match out_root {
        Some(root) => {
            let dir = root.join(&scenario.name);
            fs::create_dir_all(&dir)?;
            write_ledger(std::io::BufWriter::new(fs::File::create(dir.join("ledger.csv"))?), &trajectory.records)?;
            fs::write(dir.join("report.txt"), &report)?;
            fs::write(dir.join("basis.csv"), basis_manifest(sim.velocity_basis(), sim.director_basis()))?;
            if let Some(s) = &trajectory.final_state {
                write_checkpoint(fs::File::create(dir.join("checkpoint.bin"))?, &scenario.hash, s)?;
            }
            Some(dir)
        }
        None => None,
    };
    Ok(RunOutcome {
        name: scenario.name.clone(),
        status,
        trajectory,
        assertions,
        report,
        error: error.map(|e| e.to_string()),
        out_dir,
    })
}

#[derive(Debug, Clone)]
pub struct ValidationOutcome {
    pub lines: Vec<String>,
    pub passed: bool,
}

/// Structural checks of the model and the Leslie coefficients; Parodi's relation
/// is informational.
pub fn validate(cfg: &SimulationConfig) -> Result<ValidationOutcome, ScenarioError> {
    let model = cfg.model.build()?;
    let c = cfg.leslie.coefficients()?;
    let mut lines = Vec::new();
    let mut passed = true;
    let m = check_dissipativity(&c);
    for (i, name) in CONDITION_NAMES.iter().enumerate() {
        let ok = if i == 0 { m.margins[0] >= 0.0 } else { m.margins[i] > 0.0 };
        passed &= ok;
        lines.push(format!("{:<20} {}  margin {:.6e}", name, if ok { "PASS" } else { "FAIL" }, m.margins[i]));
    }
    if m.mu1_zero {
        lines.push("warning: mu1 = 0 accepted".into());
    }
    if m.accepted() {
        lines.push(format!("kappa {:.6e}  delta {:.6e}  alpha {:.6e}  beta {:.6e}", m.kappa, m.delta, m.alpha, m.beta));
    }
    lines.push(format!("parodi               {}  (informational)", if check_parodi(&c) { "holds" } else { "does not hold" }));

    let lh = check_legendre_hadamard(&model, 4000);
    let co = check_coercivity(&model, 4000, 10.0);
    let gr = check_growth(&model, 4000, 1e8);
    passed &= lh.passed && co.passed && gr.passed;
    lines.extend([lh.to_string(), co.to_string(), gr.to_string()]);
    match director_basis_for(&model, cfg.spectral_grid().cutoff(), cfg.grid.n_d) {
        Ok(basis) => {
            let cal = calibrate(&basis);
            lines.push(format!("calibration c_lambda {:.6e}  c_h2 {:.6e}", cal.c_lambda, cal.c_h2));
            let th = check_theta_bound(&model, 4000, cal.c_lambda, cal.c_h2);
            passed &= th.passed;
            lines.push(th.to_string());
        }
        Err(e) => {
            passed = false;
            lines.push(format!("director basis refused: {e}"));
        }
    }
    Ok(ValidationOutcome { lines, passed })
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub dts: [f64; 3],
    pub state_errors: [f64; 3],
    pub residuals: [f64; 3],
    /// `None` when the errors are at the roundoff floor.
    pub state_orders: [Option<f64>; 2],
    pub residual_orders: [f64; 2],
    pub exact: bool,
}

impl ConvergenceReport {
    pub fn table(&self) -> String {
        let mut s = String::from("dt                      state error            residual\n");
        for i in 0..3 {
            let _ = writeln!(s, "{:<23.6e} {:<22.6e} {:.6e}", self.dts[i], self.state_errors[i], self.residuals[i]);
        }
        let orders = |o: &[Option<f64>; 2]| {
            o.iter().map(|x| x.map_or("exact".to_string(), |v| format!("{v:.3}"))).collect::<Vec<_>>().join(" ")
        };
        let _ = writeln!(s, "state order     {}", if self.exact { "exact".into() } else { orders(&self.state_orders) });
        let _ = writeln!(s, "residual order  {:.3} {:.3}", self.residual_orders[0], self.residual_orders[1]);
        s
    }
}

fn final_state(sim: &Simulator<Model>, init: &SpectralState, dt: f64, t_end: f64) -> Result<(SpectralState, f64), ScenarioError> {
    let t = sim
        .run(init.clone(), &RunSettings { dt, t_end, record_every: 1, snapshot_every: 0 })
        .map_err(|f| ScenarioError::Sim(f.error))?;
    let res = max_abs_residual(&t.records);
    Ok((t.final_state.expect("completed run"), res))
}

/// Runs at `Δt`, `Δt/2`, `Δt/4` against a `Δt/64` reference.
pub fn convergence_suite(cfg: &SimulationConfig) -> Result<ConvergenceReport, ScenarioError> {
    let (sim, init) = prepare(cfg)?;
    let dt = cfg.time.dt;
    let t_end = cfg.time.t_end;
    let (reference, _) = final_state(&sim, &init, dt / 64.0, t_end)?;
    let scale = reference.max_abs().max(1.0);
    let mut dts = [0.0; 3];
    let mut errs = [0.0; 3];
    let mut res = [0.0; 3];
    for i in 0..3 {
        dts[i] = dt / (1 << i) as f64;
        let (s, r) = final_state(&sim, &init, dts[i], t_end)?;
        errs[i] = s
            .v
            .iter()
            .chain(&s.d)
            .zip(reference.v.iter().chain(&reference.d))
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        res[i] = r;
    }
    let floor = 1e-13 * scale;
    let order = |a: f64, b: f64| (a / b).log2();
    let state_orders = [0, 1].map(|i| (errs[i + 1] > floor).then(|| order(errs[i], errs[i + 1])));
    Ok(ConvergenceReport {
        dts,
        state_errors: errs,
        residuals: res,
        state_orders,
        residual_orders: [order(res[0], res[1]), order(res[1], res[2])],
        exact: errs.iter().all(|e| *e <= floor),
    })
}

/// `count` trajectories `c_i(t) = a_i e^{−κ_i t}` sampled at `samples` times in
/// `[0, 1]`, with `a_i` uniform in `[−1, 1]·e^{−|k|²/4}` and `κ_i = |k|²`.
pub fn synthetic_trajectories<T: Mode>(modes: &[T], count: usize, samples: usize, seed: u64) -> Vec<Vec<(f64, Vec<f64>)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a: Vec<f64> = modes
                .iter()
                .map(|m| rng.gen_range(-1.0..=1.0) * (-0.25 * m.k_sq()).exp())
                .collect();
            (0..samples)
                .map(|j| {
                    let t = j as f64 / (samples - 1).max(1) as f64;
                    (t, a.iter().zip(modes).map(|(x, m)| x * (-m.k_sq() * t).exp()).collect())
                })
                .collect()
        })
        .collect()
}

/// Exponent pairs exercised by the `inequalities` subcommand.
pub fn director_pairs() -> Vec<(Exponent, Exponent)> {
    vec![
        (Exponent::int(6), Exponent::int(2)),
        (Exponent::int(3), Exponent::int(4)),
        (Exponent::int(4), Exponent::int(2)),
        (Exponent::int(4), Exponent::Finite(Rational::new(8, 3))),
        (Exponent::int(2), Exponent::Infinite),
    ]
}

pub fn velocity_pairs() -> Vec<(Exponent, Exponent)> {
    vec![
        (Exponent::int(6), Exponent::int(2)),
        (Exponent::int(3), Exponent::int(4)),
        (Exponent::int(2), Exponent::Infinite),
    ]
}

#[derive(Debug, Clone)]
pub struct InequalityPair {
    pub kind: &'static str,
    pub first: InequalityReport,
    pub second: InequalityReport,
}

impl InequalityPair {
    /// `max/min` of the constants from the two sample sets.
    pub fn spread(&self) -> f64 {
        let (a, b) = (self.first.constant, self.second.constant);
        a.max(b) / a.min(b)
    }

    pub fn stable(&self) -> bool {
        self.first.passed && self.second.passed && self.spread() < 10.0
    }
}

/// Empirical interpolation constants over two independent sets of `count`
/// synthetic trajectories in the bases of the configuration.
pub fn inequalities(cfg: &SimulationConfig, count: usize) -> Result<Vec<InequalityPair>, ScenarioError> {
    let model = cfg.model.build()?;
    let grid: SpectralGrid = cfg.spectral_grid();
    let db = director_basis_for(&model, grid.cutoff(), cfg.grid.n_d).map_err(SimError::from)?;
    let vb = build_velocity_basis(grid.cutoff(), cfg.grid.n_v);
    let (dt, vt) = (ModeTable::new(&grid, &db), ModeTable::new(&grid, &vb));
    let sets = |modes_seed: u64, dir: bool| -> Vec<Vec<(f64, Vec<f64>)>> {
        if dir {
            synthetic_trajectories(db.modes(), count, 5, modes_seed)
        } else {
            synthetic_trajectories(vb.modes(), count, 5, modes_seed)
        }
    };
    let (d1, d2, v1, v2) = (sets(1, true), sets(2, true), sets(3, false), sets(4, false));
    let mut out = Vec::new();
    for (p, r) in director_pairs() {
        out.push(InequalityPair {
            kind: "director",
            first: test_interpolation_inequality(&grid, &dt, &refs(&d1), p, r).map_err(|e| invalid_exp(&e))?,
            second: test_interpolation_inequality(&grid, &dt, &refs(&d2), p, r).map_err(|e| invalid_exp(&e))?,
        });
    }
    for (p, r) in velocity_pairs() {
        out.push(InequalityPair {
            kind: "velocity",
            first: test_velocity_interpolation(&grid, &vt, &refs(&v1), p, r).map_err(|e| invalid_exp(&e))?,
            second: test_velocity_interpolation(&grid, &vt, &refs(&v2), p, r).map_err(|e| invalid_exp(&e))?,
        });
    }
    Ok(out)
}

fn invalid_exp(e: &crate::interpolation::ExponentError) -> ScenarioError {
    ScenarioError::Config(ConfigError::Invalid {
        key: "exponents".into(),
        reason: e.to_string(),
    })
}

fn refs(v: &[Vec<(f64, Vec<f64>)>]) -> Vec<&SampledTrajectory> {
    v.iter().map(|t| t.as_slice()).collect()
}

/// Runs every built-in scenario on its own thread.
pub fn suite(out_root: Option<&Path>) -> Vec<(String, Result<RunOutcome, ScenarioError>)> {
    std::thread::scope(|s| {
        let handles: Vec<_> = builtin_names()
            .into_iter()
            .map(|name| {
                s.spawn(move || {
                    let r = builtin(name).and_then(|sc| run_scenario(&sc, out_root));
                    (name.to_string(), r)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread")).collect()
    })
}
