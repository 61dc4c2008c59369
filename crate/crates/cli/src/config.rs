//! Scenario configuration files.
//!
//! A config names a scenario and overrides any subset of that scenario's
//! defaults. The user table is merged key by key over the defaults and the
//! result is deserialized with unknown keys rejected, so a typo anywhere is
//! a schema error. `qsync defaults <scenario>` prints the full table.

use std::path::PathBuf;

use qsync::kuramoto::{KuramotoSpec, DEFAULT_KC_THRESHOLD};
use qsync::linear_osc::{Topology, TongueConfig};
use qsync::optomech::{OptomechSpec, DEFAULT_WINDOW};
use qsync::spins::{DiagramSettings, SpinModelSpec};
use qsync::sweep::linspace;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioId {
    FigTongue,
    FigOptomech,
    FigOptomechDetuned,
    FigSpinLocal,
    FigSpinCommon,
    FigSpinCorr,
    KuramotoKc,
    Custom,
}

pub const SCENARIOS: [(ScenarioId, &str); 8] = [
    (ScenarioId::FigTongue, "linear oscillators, common bath: Pearson and discord over detuning x coupling"),
    (ScenarioId::FigOptomech, "two optomechanical cells near resonance: mean field, fluctuations, all indicators"),
    (ScenarioId::FigOptomechDetuned, "as fig-optomech with the second cell detuned to 1.2"),
    (ScenarioId::FigSpinLocal, "Ising spin pair, bath on spin 2 only: C, Z_I, MI, E diagram"),
    (ScenarioId::FigSpinCommon, "Ising spin pair, common bath: C, Z_I, MI, E diagram"),
    (ScenarioId::FigSpinCorr, "Z_I and MI maps for local and common baths side by side"),
    (ScenarioId::KuramotoKc, "Kuramoto order parameter versus K and critical coupling estimate"),
    (ScenarioId::Custom, "any model with its plain defaults; set `model`"),
];

impl ScenarioId {
    pub fn name(self) -> String {
        serde_json::to_value(self).unwrap().as_str().unwrap().to_string()
    }

    pub fn parse(s: &str) -> Option<Self> {
        serde_json::from_value(serde_json::Value::String(s.into())).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Tongue,
    Optomech,
    Spins,
    Kuramoto,
}

impl ModelKind {
    fn section(self) -> &'static str {
        match self {
            ModelKind::Tongue => "tongue",
            ModelKind::Optomech => "optomech",
            ModelKind::Spins => "spins",
            ModelKind::Kuramoto => "kuramoto",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.n)
    }

    fn check(&self, name: &str) -> Result<(), CliError> {
        if self.n == 0 || !self.lo.is_finite() || !self.hi.is_finite() || self.hi < self.lo {
            return Err(CliError::Schema(format!("axis `{name}` needs finite lo <= hi and n >= 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid2 {
    pub omega2: Axis,
    pub lambda: Axis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TongueSection {
    pub model: TongueConfig,
    /// Point used when there is no sweep.
    pub omega2: f64,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Grid2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptomechSection {
    pub model: OptomechSpec,
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
    pub window: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinVariant {
    pub label: String,
    pub asym: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSection {
    pub model: SpinModelSpec,
    pub settings: DiagramSettings,
    /// Extra bath-asymmetry values, one diagram each; empty means just `model`.
    #[serde(default)]
    pub variants: Vec<SpinVariant>,
    /// Steps between state snapshots when there is no sweep.
    pub record_every: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Grid2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KuramotoSection {
    pub model: KuramotoSpec,
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks: Option<Axis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tongue: Option<TongueSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optomech: Option<OptomechSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spins: Option<SpinSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kuramoto: Option<KuramotoSection>,
}

fn spin_grid() -> Grid2 {
    Grid2 { omega2: Axis { lo: 0.7, hi: 1.3, n: 20 }, lambda: Axis { lo: 0.01, hi: 0.2, n: 20 } }
}

fn tongue_section(sweep: bool) -> TongueSection {
    TongueSection {
        model: TongueConfig::default(),
        omega2: 1.05,
        lambda: 0.1,
        sweep: sweep.then_some(Grid2 {
            omega2: Axis { lo: 0.5, hi: 1.5, n: 21 },
            lambda: Axis { lo: 0.0, hi: 0.3, n: 16 },
        }),
    }
}

fn optomech_section(spec: OptomechSpec) -> OptomechSection {
    OptomechSection { model: spec, dt: 0.005, t_end: 1500.0, record_every: 20, window: DEFAULT_WINDOW, r_min: None }
}

fn spin_section(asym: f64, variants: Vec<SpinVariant>, sweep: bool) -> SpinSection {
    SpinSection {
        model: SpinModelSpec { asym, ..SpinModelSpec::default() },
        settings: DiagramSettings::default(),
        variants,
        record_every: 10,
        sweep: sweep.then(spin_grid),
    }
}

fn kuramoto_section(sweep: bool) -> KuramotoSection {
    KuramotoSection {
        model: KuramotoSpec { dt: 0.05, ..KuramotoSpec::lorentzian(2000, 0.5, 1.0) },
        threshold: DEFAULT_KC_THRESHOLD,
        ks: sweep.then_some(Axis { lo: 0.5, hi: 2.0, n: 16 }),
    }
}

/// Full default config for a scenario (and, for `custom`, a model).
pub fn defaults(scenario: ScenarioId, model: Option<ModelKind>) -> Result<Config, CliError> {
    let mut c = Config {
        scenario,
        model: None,
        seed: None,
        out: None,
        tongue: None,
        optomech: None,
        spins: None,
        kuramoto: None,
    };
    let local = SpinVariant { label: "local".into(), asym: 0.0 };
    let common = SpinVariant { label: "common".into(), asym: 1.0 };
    match scenario {
        ScenarioId::FigTongue => c.tongue = Some(tongue_section(true)),
        ScenarioId::FigOptomech => c.optomech = Some(optomech_section(OptomechSpec::fig3())),
        ScenarioId::FigOptomechDetuned => c.optomech = Some(optomech_section(OptomechSpec::fig4())),
        ScenarioId::FigSpinLocal => c.spins = Some(spin_section(0.0, vec![], true)),
        ScenarioId::FigSpinCommon => c.spins = Some(spin_section(1.0, vec![], true)),
        ScenarioId::FigSpinCorr => c.spins = Some(spin_section(0.0, vec![local, common], true)),
        ScenarioId::KuramotoKc => c.kuramoto = Some(kuramoto_section(true)),
        ScenarioId::Custom => {
            let m = model.ok_or_else(|| {
                CliError::Schema("scenario `custom` needs `model = \"tongue\" | \"optomech\" | \"spins\" | \"kuramoto\"`".into())
            })?;
            c.model = Some(m);
            match m {
                ModelKind::Tongue => {
                    let mut t = tongue_section(false);
                    t.model.topology = Topology::Common;
                    c.tongue = Some(t);
                }
                ModelKind::Optomech => c.optomech = Some(optomech_section(OptomechSpec::fig3())),
                ModelKind::Spins => c.spins = Some(spin_section(0.0, vec![], false)),
                ModelKind::Kuramoto => c.kuramoto = Some(kuramoto_section(false)),
            }
        }
    }
    Ok(c)
}

impl Config {
    pub fn model_kind(&self) -> ModelKind {
        match self.scenario {
            ScenarioId::FigTongue => ModelKind::Tongue,
            ScenarioId::FigOptomech | ScenarioId::FigOptomechDetuned => ModelKind::Optomech,
            ScenarioId::FigSpinLocal | ScenarioId::FigSpinCommon | ScenarioId::FigSpinCorr => ModelKind::Spins,
            ScenarioId::KuramotoKc => ModelKind::Kuramoto,
            ScenarioId::Custom => self.model.expect("custom configs carry a model"),
        }
    }

    pub fn has_sweep(&self) -> bool {
        match self.model_kind() {
            ModelKind::Tongue => self.tongue.as_ref().is_some_and(|s| s.sweep.is_some()),
            ModelKind::Optomech => false,
            ModelKind::Spins => self.spins.as_ref().is_some_and(|s| s.sweep.is_some()),
            ModelKind::Kuramoto => self.kuramoto.as_ref().is_some_and(|s| s.ks.is_some()),
        }
    }

    /// Checks everything that can be checked without running a model.
    pub fn validate(&self) -> Result<(), CliError> {
        let kind = self.model_kind();
        let present = [
            ("tongue", self.tongue.is_some()),
            ("optomech", self.optomech.is_some()),
            ("spins", self.spins.is_some()),
            ("kuramoto", self.kuramoto.is_some()),
        ];
        for (name, here) in present {
            if here && name != kind.section() {
                return Err(CliError::Schema(format!(
                    "section [{name}] does not apply to scenario {}",
                    self.scenario.name()
                )));
            }
        }
        if self.model.is_some() && self.scenario != ScenarioId::Custom {
            return Err(CliError::Schema("`model` is only valid with scenario `custom`".into()));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Schema(format!("`{name}` must be positive, got {v}")))
            }
        };
        let grid = |g: &Option<Grid2>| {
            if let Some(g) = g {
                g.omega2.check("omega2")?;
                g.lambda.check("lambda")?;
            }
            Ok::<(), CliError>(())
        };
        match kind {
            ModelKind::Tongue => {
                let s = self.tongue.as_ref().unwrap();
                let m = &s.model;
                positive("omega1", m.omega1)?;
                positive("dt", m.dt)?;
                positive("t_eval", m.t_eval)?;
                positive("window", m.window)?;
                positive("omega2", s.omega2)?;
                if m.sample_every == 0 || !(m.bath.temperature >= 0.0) {
                    return Err(CliError::Schema("sample_every must be >= 1 and temperature >= 0".into()));
                }
                qsync::statecore::SpectralDensity::ohmic(m.bath.density.alpha, m.bath.density.cutoff)?;
                grid(&s.sweep)?;
            }
            ModelKind::Optomech => {
                let s = self.optomech.as_ref().unwrap();
                s.model.validate()?;
                positive("dt", s.dt)?;
                positive("t_end", s.t_end)?;
                positive("window", s.window)?;
                if s.record_every == 0 {
                    return Err(CliError::Schema("`record_every` must be >= 1".into()));
                }
                if s.window > s.t_end {
                    return Err(CliError::Schema(format!("Pearson window {} exceeds t_end {}", s.window, s.t_end)));
                }
                if let Some(r) = s.r_min {
                    positive("r_min", r)?;
                }
            }
            ModelKind::Spins => {
                let s = self.spins.as_ref().unwrap();
                s.model.validate()?;
                let st = &s.settings;
                positive("dt", st.dt)?;
                positive("window", st.window)?;
                for (n, v) in [("t_eval", st.t_eval), ("z_until", st.z_until), ("mi_at", st.mi_at)] {
                    positive(n, v)?;
                }
                if s.record_every == 0 {
                    return Err(CliError::Schema("`record_every` must be >= 1".into()));
                }
                if s.variants.iter().any(|v| !v.asym.is_finite() || v.label.is_empty() || !v.label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')) {
                    return Err(CliError::Schema("variant labels must be non-empty [A-Za-z0-9_-] and asym finite".into()));
                }
                grid(&s.sweep)?;
            }
            ModelKind::Kuramoto => {
                let s = self.kuramoto.as_ref().unwrap();
                s.model.validate()?;
                if !(s.threshold > 0.0 && s.threshold < 1.0) {
                    return Err(CliError::Schema("`threshold` must lie in (0, 1)".into()));
                }
                if let Some(ks) = &s.ks {
                    ks.check("ks")?;
                    if ks.n < 2 || !(ks.hi > ks.lo) {
                        return Err(CliError::Schema("`ks` needs n >= 2 and hi > lo".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Overlays `user` on `base`. Tables merge recursively except when both
/// carry different `kind` tags, in which case the user table replaces the
/// default one whole.
fn merge(base: &mut Table, user: Table) {
    for (k, v) in user {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(u)) if b.get("kind").is_none() || u.get("kind").is_none() || b.get("kind") == u.get("kind") => merge(b, u),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn schema(e: impl std::fmt::Display) -> CliError {
    CliError::Schema(e.to_string())
}

/// Parses and validates a config document.
pub fn parse(text: &str) -> Result<Config, CliError> {
    let user: Table = text.parse().map_err(schema)?;
    let scenario = match user.get("scenario") {
        Some(Value::String(s)) => ScenarioId::parse(s).ok_or_else(|| {
            CliError::Schema(format!(
                "unknown scenario `{s}`; expected one of {}",
                SCENARIOS.iter().map(|s| s.0.name()).collect::<Vec<_>>().join(", ")
            ))
        })?,
        Some(_) => return Err(CliError::Schema("`scenario` must be a string".into())),
        None => return Err(CliError::Schema("missing `scenario`".into())),
    };
    let model = match user.get("model") {
        Some(v) => Some(ModelKind::deserialize(v.clone()).map_err(schema)?),
        None => None,
    };
    let base = defaults(scenario, model)?;
    let mut table = match Value::try_from(&base).map_err(schema)? {
        Value::Table(t) => t,
        _ => unreachable!("config serializes to a table"),
    };
    merge(&mut table, user);
    let cfg = Config::deserialize(Value::Table(table)).map_err(schema)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn defaults_toml(scenario: ScenarioId, model: Option<ModelKind>) -> Result<String, CliError> {
    toml::to_string(&defaults(scenario, model)?).map_err(schema)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_names_round_trip() {
        for (id, _) in SCENARIOS {
            assert_eq!(ScenarioId::parse(&id.name()), Some(id));
        }
        assert_eq!(ScenarioId::FigSpinCorr.name(), "fig-spin-corr");
    }

    #[test]
    fn defaults_reparse() {
        for (id, _) in SCENARIOS {
            let model = (id == ScenarioId::Custom).then_some(ModelKind::Spins);
            let text = defaults_toml(id, model).unwrap();
            assert_eq!(parse(&text).unwrap(), defaults(id, model).unwrap(), "{text}");
        }
    }

    #[test]
    fn overrides_merge_into_defaults() {
        let c = parse("scenario = \"fig-optomech\"\n[optomech]\nt_end = 10.0\nwindow = 5.0\n[optomech.model]\ng = 0.01\n").unwrap();
        let o = c.optomech.unwrap();
        assert_eq!((o.t_end, o.model.g, o.model.kappa), (10.0, 0.01, 0.15));
    }

    #[test]
    fn tagged_tables_replace_on_kind_change() {
        let c = parse(
            "scenario = \"kuramoto-kc\"\n[kuramoto.model]\nsampling = \"random\"\ndist = { kind = \"gaussian\", center = 0.0, std = 1.0 }\n",
        )
        .unwrap();
        assert!(matches!(c.kuramoto.unwrap().model.dist, qsync::kuramoto::FrequencyDist::Gaussian { .. }));
    }

    #[test]
    fn unknown_keys_rejected() {
        for bad in [
            "scenario = \"fig-optomech\"\nfoo = 1\n",
            "scenario = \"fig-optomech\"\n[optomech.model]\nkapa = 0.1\n",
            "scenario = \"fig-spin-common\"\n[spins.settings]\nt_evl = 3.0\n",
            "scenario = \"fig-optomech\"\n[spins]\nrecord_every = 3\n",
            "scenario = \"nope\"\n",
            "scenario = \"custom\"\n",
        ] {
            assert!(matches!(parse(bad), Err(CliError::Schema(_))), "{bad}");
        }
    }

    #[test]
    fn model_validation_is_schema_error() {
        let r = parse("scenario = \"fig-optomech\"\n[optomech.model]\nkappa = -1.0\n");
        assert!(matches!(r, Err(CliError::Schema(_))));
        let r = parse("scenario = \"fig-optomech\"\n[optomech]\nt_end = 20.0\n");
        assert!(matches!(r, Err(CliError::Schema(_))));
    }
}
