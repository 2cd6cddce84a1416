//! Experiment configuration.
//!
//! Settings come from three layers, later ones winning: built-in defaults,
//! an optional figure preset, and [`ConfigOverrides`] (a key-value file merged
//! with command-line flags, flags first). The key-value format is one
//! `key = value` per line with `#` comments; run manifests use the same
//! format, so a manifest can be fed back in to reproduce a run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::EnsembleSpec;
use crate::observables::Observable;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnsembleKind {
    Gilbert,
    Thermal,
}

impl EnsembleKind {
    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::Gilbert => "gilbert",
            EnsembleKind::Thermal => "thermal",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "gilbert" => Ok(EnsembleKind::Gilbert),
            "thermal" => Ok(EnsembleKind::Thermal),
            other => Err(Error::Config(format!(
                "ensemble: unknown kind `{other}` (expected gilbert or thermal)"
            ))),
        }
    }
}

/// Parameter sets matching the published figures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

/// Representative weighting-parameter sweep used by the presets.
pub const PRESET_XI_SWEEP: [f64; 6] = [0.05, 0.1, 0.3, 0.6, 0.9, 1.0];
/// Network sizes swept by the fig2 preset.
pub const PRESET_NODE_SWEEP: [usize; 4] = [4, 8, 16, 32];

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            "fig5" => Ok(Preset::Fig5),
            other => Err(Error::Config(format!(
                "preset: unknown preset `{other}` (expected fig1..fig5)"
            ))),
        }
    }

    fn apply(self, cfg: &mut ExperimentConfig) {
        cfg.ensemble = EnsembleKind::Gilbert;
        cfg.nodes = vec![32];
        cfg.xi_list = PRESET_XI_SWEEP.to_vec();
        cfg.dt = 0.015;
        cfg.n_steps = 1000;
        cfg.n_realizations = 400;
        cfg.observables = match self {
            Preset::Fig1 => vec![Observable::Fidelity],
            Preset::Fig2 => {
                cfg.nodes = PRESET_NODE_SWEEP.to_vec();
                cfg.xi_list = vec![0.3];
                vec![Observable::Fidelity]
            }
            Preset::Fig3 => vec![Observable::Entropy1],
            Preset::Fig4 => vec![Observable::Conc12, Observable::Conc13, Observable::Conc34],
            Preset::Fig5 => vec![Observable::Entropy12],
        };
        cfg.preset = Some(self);
    }

    /// What the preset sweeps, recorded in the manifest.
    pub fn note(self) -> &'static str {
        match self {
            Preset::Fig2 => "network sizes 4,8,16,32 at xi=0.3 are a representative sweep",
            _ => "xi values 0.05,0.1,0.3,0.6,0.9,1.0 are a representative sweep",
        }
    }
}

/// A fully resolved experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// One run per network size.
    pub nodes: Vec<usize>,
    pub ensemble: EnsembleKind,
    pub xi_list: Vec<f64>,
    pub temperature_list: Vec<f64>,
    pub dt: f64,
    pub n_steps: usize,
    pub n_realizations: usize,
    pub master_seed: u64,
    pub coupling_scale: f64,
    pub observables: Vec<Observable>,
    /// Number of bootstrap resamples, if error bars are wanted.
    pub bootstrap: Option<usize>,
    pub out: PathBuf,
    pub preset: Option<Preset>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            nodes: vec![32],
            ensemble: EnsembleKind::Gilbert,
            xi_list: vec![0.3],
            temperature_list: Vec::new(),
            dt: 0.015,
            n_steps: 1000,
            n_realizations: 400,
            master_seed: 0,
            coupling_scale: 1.0,
            observables: Observable::ALL.to_vec(),
            bootstrap: None,
            out: PathBuf::from("out"),
            preset: None,
        }
    }
}

/// One ensemble to simulate: a network size and an ensemble parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct RunPoint {
    pub spec: EnsembleSpec,
    /// File stem, e.g. `N32_xi0.3`.
    pub label: String,
}

impl ExperimentConfig {
    /// Checks every invariant and reports the first violation.
    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::Config("nodes: at least one network size is required".into()));
        }
        let need = self
            .observables
            .iter()
            .map(|o| match o {
                Observable::Conc13 | Observable::Conc34 | Observable::Entropy12 => 4,
                _ => 2,
            })
            .max()
            .unwrap_or(2);
        if let Some(&n) = self.nodes.iter().find(|&&n| n < need) {
            return Err(Error::Config(format!(
                "nodes: {n} is too small; the requested observables need at least {need} nodes"
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt: {} must be positive", self.dt)));
        }
        if self.n_realizations < 1 {
            return Err(Error::Config("realizations: at least one realization is required".into()));
        }
        if !(self.coupling_scale > 0.0 && self.coupling_scale.is_finite()) {
            return Err(Error::Config(format!(
                "coupling-scale: {} must be positive",
                self.coupling_scale
            )));
        }
        if self.observables.is_empty() {
            return Err(Error::Config("observables: select at least one".into()));
        }
        if let Some(b) = self.bootstrap {
            if b < 2 {
                return Err(Error::Config(format!("bootstrap: {b} resamples is too few (need >= 2)")));
            }
            if self.n_realizations < 2 {
                return Err(Error::Config("bootstrap: needs at least 2 realizations".into()));
            }
        }
        match self.ensemble {
            EnsembleKind::Gilbert => {
                if self.xi_list.is_empty() {
                    return Err(Error::Config("xi: at least one value is required".into()));
                }
                if let Some(xi) = self.xi_list.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                    return Err(Error::Config(format!("xi: {xi} is not in [0, 1]")));
                }
            }
            EnsembleKind::Thermal => {
                if self.temperature_list.is_empty() {
                    return Err(Error::Config(
                        "temperature: required for the thermal ensemble".into(),
                    ));
                }
                if let Some(t) = self.temperature_list.iter().find(|t| !(**t > 0.0)) {
                    return Err(Error::Config(format!("temperature: {t} must be positive")));
                }
            }
        }
        Ok(())
    }

    /// Every (network size, ensemble parameter) combination, in output order.
    pub fn points(&self) -> Result<Vec<RunPoint>> {
        let mut points = Vec::new();
        for &n in &self.nodes {
            match self.ensemble {
                EnsembleKind::Gilbert => {
                    for &xi in &self.xi_list {
                        points.push(RunPoint {
                            spec: EnsembleSpec::gilbert(n, xi)?,
                            label: format!("N{n}_xi{xi}"),
                        });
                    }
                }
                EnsembleKind::Thermal => {
                    for &t in &self.temperature_list {
                        points.push(RunPoint {
                            spec: EnsembleSpec::thermal(n, t)?,
                            label: format!("N{n}_T{t}"),
                        });
                    }
                }
            }
        }
        Ok(points)
    }

    pub fn wants(&self, obs: Observable) -> bool {
        self.observables.contains(&obs)
    }

    /// Serializes the configuration in the key-value format read by
    /// [`ConfigOverrides::parse_kv`].
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "nodes = {}", join(&self.nodes));
        let _ = writeln!(s, "ensemble = {}", self.ensemble.name());
        let _ = writeln!(s, "xi = {}", join(&self.xi_list));
        let _ = writeln!(s, "temperature = {}", join(&self.temperature_list));
        let _ = writeln!(s, "dt = {}", self.dt);
        let _ = writeln!(s, "steps = {}", self.n_steps);
        let _ = writeln!(s, "realizations = {}", self.n_realizations);
        let _ = writeln!(s, "seed = {}", self.master_seed);
        let _ = writeln!(s, "coupling_scale = {}", self.coupling_scale);
        let names: Vec<&str> = self.observables.iter().map(|o| o.name()).collect();
        let _ = writeln!(s, "observables = {}", names.join(","));
        match self.bootstrap {
            Some(b) => {
                let _ = writeln!(s, "bootstrap = {b}");
            }
            None => {
                let _ = writeln!(s, "bootstrap = off");
            }
        }
        let _ = writeln!(s, "out = {}", self.out.display());
        if let Some(p) = self.preset {
            let _ = writeln!(s, "preset = {}", p.name());
        }
        s
    }
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Partially specified settings, from a file or from flags.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigOverrides {
    pub nodes: Option<Vec<usize>>,
    pub ensemble: Option<EnsembleKind>,
    pub xi_list: Option<Vec<f64>>,
    pub temperature_list: Option<Vec<f64>>,
    pub dt: Option<f64>,
    pub n_steps: Option<usize>,
    pub n_realizations: Option<usize>,
    pub master_seed: Option<u64>,
    pub coupling_scale: Option<f64>,
    pub observables: Option<Vec<Observable>>,
    /// `Some(None)` switches bootstrap off explicitly.
    pub bootstrap: Option<Option<usize>>,
    pub out: Option<PathBuf>,
    pub preset: Option<Preset>,
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::Config(format!("{key}: cannot parse `{s}`")))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::Config(format!("{key}: cannot parse `{}`", value.trim())))
}

/// Parses the `--observables` list.
pub fn parse_observables(value: &str) -> Result<Vec<Observable>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            Observable::from_name(s).ok_or_else(|| {
                Error::Config(format!(
                    "observables: unknown observable `{s}` \
                     (expected fidelity, entropy1, conc12, conc13, conc34, entropy12)"
                ))
            })
        })
        .collect()
}

/// Parses the `--bootstrap` value: a resample count or `off`.
pub fn parse_bootstrap(value: &str) -> Result<Option<usize>> {
    match value.trim() {
        "off" | "0" => Ok(None),
        v => parse_one("bootstrap", v).map(Some),
    }
}

impl ConfigOverrides {
    /// Parses `key = value` text. Keys starting with `run.` are run metadata
    /// written into manifests and are skipped.
    pub fn parse_kv(text: &str) -> Result<Self> {
        let mut o = ConfigOverrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`, got `{line}`", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "nodes" => o.nodes = Some(parse_list(key, value)?),
                "ensemble" => o.ensemble = Some(EnsembleKind::parse(value)?),
                "xi" => o.xi_list = Some(parse_list(key, value)?),
                "temperature" => o.temperature_list = Some(parse_list(key, value)?),
                "dt" => o.dt = Some(parse_one(key, value)?),
                "steps" => o.n_steps = Some(parse_one(key, value)?),
                "realizations" => o.n_realizations = Some(parse_one(key, value)?),
                "seed" => o.master_seed = Some(parse_one(key, value)?),
                "coupling_scale" | "coupling-scale" => o.coupling_scale = Some(parse_one(key, value)?),
                "observables" => o.observables = Some(parse_observables(value)?),
                "bootstrap" => o.bootstrap = Some(parse_bootstrap(value)?),
                "out" => o.out = Some(PathBuf::from(value)),
                "preset" => o.preset = Some(Preset::parse(value)?),
                k if k.starts_with("run.") => {}
                k => {
                    return Err(Error::Config(format!("line {}: unknown key `{k}`", lineno + 1)));
                }
            }
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_kv(&text)
    }

    /// Field-wise `self` if set, else `fallback`.
    pub fn or(self, fallback: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            nodes: self.nodes.or(fallback.nodes),
            ensemble: self.ensemble.or(fallback.ensemble),
            xi_list: self.xi_list.or(fallback.xi_list),
            temperature_list: self.temperature_list.or(fallback.temperature_list),
            dt: self.dt.or(fallback.dt),
            n_steps: self.n_steps.or(fallback.n_steps),
            n_realizations: self.n_realizations.or(fallback.n_realizations),
            master_seed: self.master_seed.or(fallback.master_seed),
            coupling_scale: self.coupling_scale.or(fallback.coupling_scale),
            observables: self.observables.or(fallback.observables),
            bootstrap: self.bootstrap.or(fallback.bootstrap),
            out: self.out.or(fallback.out),
            preset: self.preset.or(fallback.preset),
        }
    }

    /// Defaults, then the preset (if any), then the explicit settings; validated.
    pub fn resolve(self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(p) = self.preset {
            p.apply(&mut cfg);
        }
        if let Some(v) = self.nodes {
            cfg.nodes = v;
        }
        if let Some(v) = self.ensemble {
            cfg.ensemble = v;
        }
        if let Some(v) = self.xi_list {
            cfg.xi_list = v;
        }
        if let Some(v) = self.temperature_list {
            cfg.temperature_list = v;
        }
        if let Some(v) = self.dt {
            cfg.dt = v;
        }
        if let Some(v) = self.n_steps {
            cfg.n_steps = v;
        }
        if let Some(v) = self.n_realizations {
            cfg.n_realizations = v;
        }
        if let Some(v) = self.master_seed {
            cfg.master_seed = v;
        }
        if let Some(v) = self.coupling_scale {
            cfg.coupling_scale = v;
        }
        if let Some(v) = self.observables {
            cfg.observables = v;
        }
        if let Some(v) = self.bootstrap {
            cfg.bootstrap = v;
        }
        if let Some(v) = self.out {
            cfg.out = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
