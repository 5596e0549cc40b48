//! Scenario configuration: TOML with `[model]`, `[leslie]`, `[grid]`, `[time]`,
//! `[io]` and optional `[initial]`, `[forcing]`, `[expect]` sections.
//!
//! Defaults: `mu1 = 1`, `mu5 = 0`, `mu6 = 1`; grid cutoff `(n − 1)/3`; all modes up
//! to the cutoff; `record_every = 1`, `snapshot_every = 0`; zero initial data and
//! zero forcing.

use std::path::Path;

use ericksen_core::{
    check_dissipativity, FreeEnergy, GinzburgLandau, LeslieCoefficients, ScaledOseenFrank,
    SimplifiedOseenFrank, Vec3, WithField, WithFreedom,
};
use ericksen_core::leslie::CONDITION_NAMES;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::basis::{Mode, Parity};
use crate::grid::{dealias_limit, SpectralGrid};
use crate::spectral::{project, sample_field, ModeTable};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    GinzburgLandau,
    Dirichlet,
    SimplifiedOseenFrank,
    ScaledOseenFrank,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FieldTerm {
    pub h: [f64; 3],
    pub chi_perp: f64,
    pub chi_par: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FreedomTerm {
    pub b: [f64; 3],
    pub bbar: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    /// Penalty width; required for `ginzburg_landau`, optional for the Oseen–Frank kinds.
    pub eps: Option<f64>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub k3: Option<f64>,
    pub k4: Option<f64>,
    pub s: Option<f64>,
    pub alpha: Option<f64>,
    pub field: Option<FieldTerm>,
    pub freedom: Option<FreedomTerm>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LeslieConfig {
    #[serde(default = "one")]
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub mu4: f64,
    #[serde(default)]
    pub mu5: f64,
    #[serde(default = "one")]
    pub mu6: f64,
    /// Run even if the dissipativity conditions fail.
    #[serde(default)]
    pub allow_nondissipative: bool,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    /// Mode cutoff `|k|_∞ ≤ kmax`, at most `(n − 1)/3`.
    pub kmax: Option<i32>,
    pub n_v: Option<usize>,
    pub n_d: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct IoConfig {
    #[serde(default = "one_usize")]
    pub record_every: usize,
    #[serde(default)]
    pub snapshot_every: usize,
}

impl Default for IoConfig {
    fn default() -> Self {
        IoConfig {
            record_every: 1,
            snapshot_every: 0,
        }
    }
}

fn one_usize() -> usize {
    1
}

/// Initial data or forcing.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    #[default]
    Zero,
    Constant { value: [f64; 3] },
    /// `amplitude · vector · cos(k·x)` or `sin(k·x)`, projected onto the basis.
    Mode {
        k: [i32; 3],
        vector: [f64; 3],
        parity: ParityName,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Independent uniform coefficients in `[−amplitude, amplitude]` on every
    /// nonconstant basis mode with `|k|_∞ ≤ kmax`, plus a projected constant `offset`.
    Random {
        amplitude: f64,
        kmax: i32,
        seed: u64,
        #[serde(default)]
        offset: [f64; 3],
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityName {
    Cos,
    Sin,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default)]
    pub velocity: FieldSpec,
    #[serde(default)]
    pub director: FieldSpec,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExpectConfig {
    /// `kinetic(t) = kinetic(0) e^{−rate·t}` at every record.
    pub kinetic_decay_rate: Option<f64>,
    /// `free(t) = free(0) e^{−rate·t}` at every record.
    pub free_decay_rate: Option<f64>,
    /// Relative tolerance of the decay checks.
    pub tolerance: Option<f64>,
    /// `kinetic + free` non-increasing within `monotone_slack` (default `1e-8`).
    #[serde(default)]
    pub monotone: bool,
    pub monotone_slack: Option<f64>,
    /// Bound on the finite-difference energy residual.
    pub residual_cap: Option<f64>,
    /// Bound on every a priori monitor quantity.
    pub apriori_cap: Option<f64>,
    /// Every cross-term entry exactly zero.
    #[serde(default)]
    pub zero_cross: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub name: Option<String>,
    pub model: ModelConfig,
    pub leslie: LeslieConfig,
    pub grid: GridConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub io: IoConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub forcing: FieldSpec,
    #[serde(default)]
    pub expect: ExpectConfig,
}

/// A validated configuration together with the hash of its source text.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub config: SimulationConfig,
    pub hash: [u8; 32],
}

pub fn parse_config_str(text: &str, fallback_name: &str) -> Result<Scenario, ConfigError> {
    let config: SimulationConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.message().to_string()))?;
    config.validate()?;
    let hash: [u8; 32] = Sha256::digest(text.as_bytes()).into();
    Ok(Scenario {
        name: config.name.clone().unwrap_or_else(|| fallback_name.to_string()),
        config,
        hash,
    })
}

pub fn parse_config(path: &Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    parse_config_str(&text, stem)
}

fn need(v: Option<f64>, key: &str) -> Result<f64, ConfigError> {
    v.ok_or_else(|| invalid(key, "required for this model kind"))
}

impl ModelConfig {
    pub fn build(&self) -> Result<Box<dyn FreeEnergy>, ConfigError> {
        let map = |e: ericksen_core::energy::ModelError| match e {
            ericksen_core::energy::ModelError::InvalidParameter { name, value } => {
                invalid(&format!("model.{name}"), format!("{value} not admissible"))
            }
        };
        let unused = |keys: &[(&str, bool)]| -> Result<(), ConfigError> {
            match keys.iter().find(|(_, set)| *set) {
                Some((k, _)) => Err(invalid(&format!("model.{k}"), "not used by this model kind")),
                None => Ok(()),
            }
        };
        let base: Box<dyn FreeEnergy> = match self.kind {
            ModelKind::GinzburgLandau => {
                unused(&[("k1", self.k1.is_some()), ("k2", self.k2.is_some()), ("k3", self.k3.is_some()),
                    ("k4", self.k4.is_some()), ("s", self.s.is_some()), ("alpha", self.alpha.is_some())])?;
                Box::new(GinzburgLandau::new(need(self.eps, "model.eps")?).map_err(map)?)
            }
            ModelKind::Dirichlet => {
                unused(&[("eps", self.eps.is_some()), ("k1", self.k1.is_some()), ("k2", self.k2.is_some()),
                    ("k3", self.k3.is_some()), ("k4", self.k4.is_some()), ("s", self.s.is_some()),
                    ("alpha", self.alpha.is_some())])?;
                Box::new(GinzburgLandau::dirichlet())
            }
            ModelKind::SimplifiedOseenFrank => {
                unused(&[("k3", self.k3.is_some()), ("k4", self.k4.is_some()), ("s", self.s.is_some())])?;
                let mut m = SimplifiedOseenFrank::new(
                    need(self.k1, "model.k1")?,
                    need(self.k2, "model.k2")?,
                    self.alpha.unwrap_or(0.0),
                )
                .map_err(map)?;
                if let Some(eps) = self.eps {
                    m = m.with_eps(eps).map_err(map)?;
                }
                Box::new(m)
            }
            ModelKind::ScaledOseenFrank => {
                let mut m = ScaledOseenFrank::new(
                    need(self.k1, "model.k1")?,
                    need(self.k2, "model.k2")?,
                    need(self.k3, "model.k3")?,
                    need(self.k4, "model.k4")?,
                    need(self.s, "model.s")?,
                )
                .map_err(map)?;
                if let Some(eps) = self.eps {
                    m = m.with_eps(eps).map_err(map)?;
                }
                if let Some(a) = self.alpha {
                    m = m.with_alpha(a).map_err(map)?;
                }
                Box::new(m)
            }
        };
        let with_field: Box<dyn FreeEnergy> = match &self.field {
            Some(f) => Box::new(WithField::new(base, Vec3(f.h), f.chi_perp, f.chi_par).map_err(map)?),
            None => base,
        };
        Ok(match &self.freedom {
            Some(f) => Box::new(WithFreedom::new(with_field, Vec3(f.b), f.bbar).map_err(map)?),
            None => with_field,
        })
    }
}

impl LeslieConfig {
    pub fn coefficients(&self) -> Result<LeslieCoefficients, ConfigError> {
        LeslieCoefficients::new([self.mu1, self.mu2, self.mu3, self.mu4, self.mu5, self.mu6])
            .map_err(|e| invalid("leslie.mu3", e.to_string()))
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model.build()?;
        let c = self.leslie.coefficients()?;
        let m = check_dissipativity(&c);
        if let Some(i) = m.first_violation() {
            if !self.leslie.allow_nondissipative {
                let key = ["leslie.mu1", "leslie.mu4", "leslie", "leslie", "leslie"][i];
                return Err(invalid(key, format!("dissipativity condition `{}` fails", CONDITION_NAMES[i])));
            }
        }
        let n = self.grid.n;
        if n < 8 || n % 2 != 0 {
            return Err(invalid("grid.n", format!("{n}: need an even resolution of at least 8")));
        }
        if let Some(k) = self.grid.kmax {
            if k < 1 || k > dealias_limit(n) {
                return Err(invalid("grid.kmax", format!("{k} outside 1..={}", dealias_limit(n))));
            }
        }
        let dt = self.time.dt;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("time.dt", format!("{dt} must be positive")));
        }
        if !(self.time.t_end >= 0.0 && self.time.t_end.is_finite()) {
            return Err(invalid("time.t_end", format!("{} must be nonnegative", self.time.t_end)));
        }
        if self.io.record_every == 0 {
            return Err(invalid("io.record_every", "must be at least 1"));
        }
        for (key, spec) in [
            ("initial.velocity", &self.initial.velocity),
            ("initial.director", &self.initial.director),
            ("forcing", &self.forcing),
        ] {
            spec.validate(key)?;
        }
        if let Some(t) = self.expect.tolerance {
            if !(t > 0.0) {
                return Err(invalid("expect.tolerance", "must be positive"));
            }
        }
        Ok(())
    }

    pub fn spectral_grid(&self) -> SpectralGrid {
        SpectralGrid::with_cutoff(self.grid.n, self.grid.kmax).expect("validated grid")
    }
}

impl FieldSpec {
    fn validate(&self, key: &str) -> Result<(), ConfigError> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            FieldSpec::Zero => Ok(()),
            FieldSpec::Constant { value } if finite(value) => Ok(()),
            FieldSpec::Mode { vector, amplitude, .. } if finite(vector) && amplitude.is_finite() => Ok(()),
            FieldSpec::Random { amplitude, kmax, offset, .. }
                if *amplitude >= 0.0 && *kmax >= 0 && finite(offset) =>
            {
                Ok(())
            }
            _ => Err(invalid(key, "non-finite or negative parameters")),
        }
    }

    /// Basis coefficients of this field for a basis with the given modes.
    pub fn coefficients<T: Mode>(&self, grid: &SpectralGrid, table: &ModeTable, modes: &[T]) -> Vec<f64> {
        let from_field = |f: &dyn Fn([f64; 3]) -> Vec3| project(grid, table, &sample_field(grid, f)).expect("grid shape");
        match self {
            FieldSpec::Zero => vec![0.0; modes.len()],
            FieldSpec::Constant { value } => from_field(&|_| Vec3(*value)),
            FieldSpec::Mode {
                k,
                vector,
                parity,
                amplitude,
            } => {
                let kv = [k[0] as f64, k[1] as f64, k[2] as f64];
                let trig = match parity {
                    ParityName::Cos => f64::cos,
                    ParityName::Sin => f64::sin,
                };
                from_field(&|x| Vec3(*vector).scale(amplitude * trig(kv[0] * x[0] + kv[1] * x[1] + kv[2] * x[2])))
            }
            FieldSpec::Random {
                amplitude,
                kmax,
                seed,
                offset,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut c = from_field(&|_| Vec3(*offset));
                for (ci, m) in c.iter_mut().zip(modes) {
                    let k = m.k();
                    let kinf = k.iter().map(|x| x.abs()).max().unwrap();
                    // draw for every mode so that the stream does not depend on kmax
                    let r: f64 = rng.gen_range(-1.0..=1.0);
                    if kinf > 0 && kinf <= *kmax {
                        *ci += amplitude * r;
                    }
                }
                c
            }
        }
    }
}

pub fn parity_of(p: ParityName) -> Parity {
    match p {
        ParityName::Cos => Parity::Cos,
        ParityName::Sin => Parity::Sin,
    }
}
