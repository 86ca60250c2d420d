//! Experiment configuration: a flat JSON object, validated as a whole.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use adiabatica_core::models::CandidateDirection;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Criteria,
    Holonomy,
    MsProbe,
    CompositionCheck,
    Sweep,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Simulate => "simulate",
            Command::Criteria => "criteria",
            Command::Holonomy => "holonomy",
            Command::MsProbe => "ms-probe",
            Command::CompositionCheck => "composition-check",
            Command::Sweep => "sweep",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Rotating,
    MsSecond,
    MsBarred,
    MsCandidate,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Rotating => "rotating",
            ModelKind::MsSecond => "ms-second",
            ModelKind::MsBarred => "ms-barred",
            ModelKind::MsCandidate => "ms-candidate",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub steps: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub points: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub model: Option<ModelKind>,
    #[serde(rename = "mu_B")]
    pub mu_b: Option<f64>,
    pub theta: Option<f64>,
    pub omega: Option<f64>,
    pub omega0: Option<f64>,
    pub tau: Option<f64>,
    pub n: Option<u32>,
    pub direction: Option<CandidateDirection>,
    pub refine: Option<usize>,
    pub level: Option<usize>,
    pub grid: Option<GridConfig>,
    pub epsilon: Option<f64>,
    pub energy_offset: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub sweep: Option<SweepConfig>,
}

const KEYS: &[&str] = &[
    "command", "model", "mu_B", "theta", "omega", "omega0", "tau", "n", "direction", "refine", "level", "grid",
    "epsilon", "energy_offset", "output", "format", "seed", "sweep",
];

pub const DEFAULT_STEPS: usize = 4096;
pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_REFINE: usize = 16;

/// Parses `text`, reporting every unknown key and type error it can find.
pub fn parse(text: &str) -> Result<ExperimentConfig, Vec<String>> {
    let value: Value = serde_json::from_str(text).map_err(|e| vec![format!("config is not valid JSON: {e}")])?;
    let Some(object) = value.as_object() else {
        return Err(vec!["config must be a JSON object".into()]);
    };
    let mut violations: Vec<String> =
        object.keys().filter(|k| !KEYS.contains(&k.as_str())).map(|k| format!("unknown key \"{k}\"")).collect();
    for key in KEYS {
        if let Some(v) = object.get(*key) {
            let mut single = serde_json::Map::new();
            single.insert((*key).to_string(), v.clone());
            if let Err(e) = serde_json::from_value::<ExperimentConfig>(Value::Object(single)) {
                violations.push(format!("{key}: {e}"));
            }
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }
    serde_json::from_value(value).map_err(|e| vec![e.to_string()])
}

fn finite(x: f64) -> bool {
    x.is_finite()
}

impl ExperimentConfig {
    /// The command to run: the command line wins, the config may repeat it.
    pub fn resolve_command(&self, cli: Option<Command>) -> Option<Command> {
        cli.or(self.command)
    }

    pub fn level(&self) -> usize {
        self.level.unwrap_or(0)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(DEFAULT_EPSILON)
    }

    pub fn energy_offset(&self) -> f64 {
        self.energy_offset.unwrap_or(0.0)
    }

    pub fn refine(&self) -> usize {
        self.refine.unwrap_or(DEFAULT_REFINE)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Natural time span of the model: one drive period.
    pub fn natural_period(&self) -> Option<f64> {
        match self.model? {
            ModelKind::Rotating | ModelKind::MsBarred => self.omega.map(|w| 2.0 * PI / w.abs()),
            ModelKind::MsSecond | ModelKind::MsCandidate => self.tau,
        }
    }

    /// `(t_start, t_end, steps)` with defaults filled in.
    pub fn grid_bounds(&self) -> (f64, f64, usize) {
        let g = self.grid.unwrap_or(GridConfig { t_start: None, t_end: None, steps: None });
        let t_start = g.t_start.unwrap_or(0.0);
        let t_end = g.t_end.unwrap_or_else(|| t_start + self.natural_period().unwrap_or(1.0));
        (t_start, t_end, g.steps.unwrap_or(DEFAULT_STEPS))
    }

    /// Every violation of the config for `command`; empty when valid.
    pub fn validate(&self, command: Option<Command>) -> Vec<String> {
        let mut v = Vec::new();
        let command = match (command, self.command) {
            (Some(a), Some(b)) if a != b => {
                v.push(format!("command \"{b}\" in config differs from \"{a}\" on the command line"));
                Some(a)
            }
            (a, b) => a.or(b),
        };
        let Some(command) = command else {
            v.push("command required".into());
            return v;
        };

        let model = if command == Command::Sweep {
            match self.model {
                None | Some(ModelKind::Rotating) => Some(ModelKind::Rotating),
                Some(m) => {
                    v.push(format!("sweep runs on the rotating model, not \"{m}\""));
                    None
                }
            }
        } else {
            if self.model.is_none() {
                v.push("model required".into());
            }
            self.model
        };

        match model {
            Some(ModelKind::Rotating | ModelKind::MsBarred) => {
                self.check_theta(&mut v);
                if command != Command::Sweep {
                    match self.mu_b {
                        None => v.push("mu_B required".into()),
                        Some(x) if !(finite(x) && x > 0.0) => v.push("mu_B > 0".into()),
                        _ => {}
                    }
                    match self.omega {
                        None => v.push("omega required".into()),
                        Some(x) if !(finite(x) && x != 0.0) => v.push("omega ≠ 0".into()),
                        _ => {}
                    }
                }
            }
            Some(ModelKind::MsSecond | ModelKind::MsCandidate) => {
                match self.tau {
                    None => v.push("tau required".into()),
                    Some(x) if !(finite(x) && x > 0.0) => v.push("tau > 0".into()),
                    _ => {}
                }
                match (self.omega0, self.n) {
                    (None, None) => v.push("omega0 or n required".into()),
                    (Some(_), Some(_)) => v.push("give either omega0 or n, not both".into()),
                    (Some(x), None) if !(finite(x) && x > 0.0) => v.push("omega0 > 0".into()),
                    (None, Some(0)) => v.push("n ≥ 1".into()),
                    _ => {}
                }
            }
            None => {}
        }

        if self.direction.is_some() && model != Some(ModelKind::MsCandidate) {
            v.push("direction applies to the ms-candidate model only".into());
        }
        if self.refine.is_some() && model != Some(ModelKind::MsBarred) {
            v.push("refine applies to the ms-barred model only".into());
        }
        if self.refine == Some(0) {
            v.push("refine ≥ 1".into());
        }
        if model == Some(ModelKind::MsCandidate) && command != Command::CompositionCheck {
            v.push("ms-candidate is an evolution operator, usable with composition-check only".into());
        }

        if command == Command::Sweep {
            match &self.sweep {
                None => v.push("sweep block required".into()),
                Some(s) => {
                    if !(finite(s.ratio_min) && s.ratio_min > 0.0) {
                        v.push("sweep.ratio_min > 0".into());
                    }
                    if !(finite(s.ratio_max) && s.ratio_max > s.ratio_min) {
                        v.push("sweep.ratio_max > sweep.ratio_min".into());
                    }
                    if s.points < 2 {
                        v.push("sweep.points ≥ 2".into());
                    }
                }
            }
        } else if self.sweep.is_some() {
            v.push("sweep block applies to the sweep command only".into());
        }

        if let Some(g) = self.grid {
            if let Some(steps) = g.steps {
                if steps < 16 {
                    v.push("steps ≥ 16".into());
                }
            }
            for (name, x) in [("grid.t_start", g.t_start), ("grid.t_end", g.t_end)] {
                if x.is_some_and(|x| !finite(x)) {
                    v.push(format!("{name} finite"));
                }
            }
        }
        let (t0, t1, _) = self.grid_bounds();
        if finite(t0) && finite(t1) && t1 <= t0 {
            v.push("grid.t_end > grid.t_start".into());
        }
        if let Some(e) = self.epsilon {
            if !(finite(e) && e > 0.0) {
                v.push("epsilon > 0".into());
            }
        }
        if self.energy_offset.is_some_and(|x| !finite(x)) {
            v.push("energy_offset finite".into());
        }
        if let Some(level) = self.level {
            if level > 1 {
                v.push("level in {0, 1}".into());
            }
        }
        v
    }

    fn check_theta(&self, v: &mut Vec<String>) {
        match self.theta {
            None => v.push("theta required".into()),
            Some(x) if !(finite(x) && x > 0.0 && x < PI) => v.push("theta in (0, π)".into()),
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotating() -> ExperimentConfig {
        parse(r#"{"model": "rotating", "mu_B": 1.0, "theta": 1.0471975511965976, "omega": 0.001,
                  "grid": {"steps": 256}}"#)
        .unwrap()
    }

    #[test]
    fn valid_rotating_config_has_no_violations() {
        assert!(rotating().validate(Some(Command::Criteria)).is_empty());
    }

    #[test]
    fn too_few_steps() {
        let mut c = rotating();
        c.grid = Some(GridConfig { t_start: None, t_end: None, steps: Some(8) });
        assert_eq!(c.validate(Some(Command::Criteria)), vec!["steps ≥ 16".to_string()]);
    }

    #[test]
    fn theta_out_of_range() {
        let mut c = rotating();
        c.theta = Some(0.0);
        assert_eq!(c.validate(Some(Command::Simulate)), vec!["theta in (0, π)".to_string()]);
    }

    #[test]
    fn all_violations_are_reported() {
        let c = parse(r#"{"model": "rotating", "theta": 4.0, "omega": 0.0, "epsilon": -1, "grid": {"steps": 3}}"#)
            .unwrap();
        let v = c.validate(Some(Command::Criteria));
        for expected in ["theta in (0, π)", "mu_B required", "omega ≠ 0", "epsilon > 0", "steps ≥ 16"] {
            assert!(v.iter().any(|x| x == expected), "{expected} missing from {v:?}");
        }
    }

    #[test]
    fn unknown_and_mistyped_keys() {
        let err = parse(r#"{"model": "rotating", "colour": 1, "steps": 3, "theta": "wide"}"#).unwrap_err();
        assert!(err.iter().any(|e| e.contains("\"colour\"")));
        assert!(err.iter().any(|e| e.contains("\"steps\"")));
        assert!(err.iter().any(|e| e.starts_with("theta:")));
        assert!(parse("[1, 2]").is_err());
        assert!(parse("{").is_err());
        assert!(parse(r#"{"grid": {"steps": 32, "dt": 0.1}}"#).is_err());
    }

    #[test]
    fn grid_defaults_to_one_period() {
        let mut c = rotating();
        c.grid = None;
        let (t0, t1, steps) = c.grid_bounds();
        assert_eq!((t0, steps), (0.0, DEFAULT_STEPS));
        assert!((t1 - 2.0 * PI / 0.001).abs() < 1e-9);
    }

    #[test]
    fn model_specific_requirements() {
        let c = parse(r#"{"model": "ms-second", "tau": 1.0, "n": 10, "omega0": 3.0}"#).unwrap();
        assert!(c.validate(Some(Command::Criteria)).contains(&"give either omega0 or n, not both".to_string()));
        let c = parse(r#"{"model": "ms-candidate", "tau": 1.0, "omega0": 12.5}"#).unwrap();
        assert!(c.validate(Some(Command::CompositionCheck)).is_empty());
        assert!(!c.validate(Some(Command::Simulate)).is_empty());
        let c = parse(r#"{"theta": 1.0, "sweep": {"ratio_min": 1e-3, "ratio_max": 1e3, "points": 61}}"#).unwrap();
        assert!(c.validate(Some(Command::Sweep)).is_empty());
        assert_eq!(c.validate(None), vec!["command required".to_string()]);
    }
}
