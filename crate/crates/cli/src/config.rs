//! Flat `key = value` run configuration. Every key can also be given as a
//! command-line flag of the same name, which takes precedence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use coherent_machine::model::{DEFAULT_TAU, FIGURE_GAMMAS};
use coherent_machine::regimes::DEFAULT_EPS;
use coherent_machine::sweep::{Objective, ParamKey};
use coherent_machine::{Bath, MachineParams, Regime};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    Duplicate(String),
    #[error("bad value for `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error(transparent)]
    Model(#[from] coherent_machine::Error),
}

pub struct KeySpec {
    pub name: &'static str,
    pub help: &'static str,
}

const fn key(name: &'static str, help: &'static str) -> KeySpec {
    KeySpec { name, help }
}

pub const KEYS: &[KeySpec] = &[
    key("b1", "Lowest level spacing B1 [default 0.5]"),
    key("b2", "Upper level energy B2 [default 12]"),
    key("t1", "Cold reservoir temperature [default 1]"),
    key("t2", "Intermediate reservoir temperature [default 6]"),
    key("t3", "Hot reservoir temperature [default 10]"),
    key("gamma1", "Cold coupling rate [default 8.7e-3]"),
    key("gamma2", "Intermediate coupling rate [default 5.7e-3]"),
    key("gamma3", "Hot coupling rate [default 7.5e-3]"),
    key("lambda1", "Cold unit coherence amplitude [default 0]"),
    key(
        "lambda2",
        "Intermediate unit coherence amplitude [default 0]",
    ),
    key("lambda3", "Hot unit coherence amplitude [default 0]"),
    key("phi1", "Cold unit coherence phase in [0, 2pi) [default 0]"),
    key("phi2", "Intermediate unit coherence phase [default 0]"),
    key("phi3", "Hot unit coherence phase [default 0]"),
    key("tau", "Collision duration [default 1e-3]"),
    key(
        "eps",
        "Zero threshold for classification, reference units [default 1e-9]",
    ),
    key(
        "units",
        "Power units: reference (T1 gamma1 / 2) or natural [default reference]",
    ),
    key("output", "Output file [default stdout]"),
    key("axis", "Swept spacing: B1, B2 or B3 [default B1]"),
    key("axis_min", "Lower end of the swept spacing"),
    key("axis_max", "Upper end of the swept spacing"),
    key(
        "axis_count",
        "Grid points along the swept spacing [default 400]",
    ),
    key(
        "bath",
        "Coherent reservoir of a diagram: 1, 2 or 3 [default 1]",
    ),
    key(
        "lambda_min",
        "Lower end of the diagram amplitude axis [default 0]",
    ),
    key(
        "lambda_max",
        "Upper end of the diagram amplitude axis [default 1]",
    ),
    key(
        "lambda_count",
        "Grid points along the amplitude axis [default 400]",
    ),
    key(
        "overlay_output",
        "Diagram only: file for the transition curves",
    ),
    key("regime", "Curve only: regime filter, I to VIII"),
    key(
        "window",
        "Curve only: narrow the range to the regime window [default false]",
    ),
    key(
        "objective",
        "Curve only: report the maximum of qdot1, qdot3, wdot3, output or eta",
    ),
    key(
        "collisions",
        "Collide only: number of collisions [default 1000]",
    ),
    key(
        "stride",
        "Collide only: write every n-th collision [default 1]",
    ),
    key("initial", "Collide only: mixed or steady [default mixed]"),
];

pub fn normalize_key(raw: &str) -> String {
    raw.trim().to_ascii_lowercase().replace('-', "_")
}

fn check_known(key: &str) -> Result<(), ConfigError> {
    if KEYS.iter().any(|k| k.name == key) {
        Ok(())
    } else {
        Err(ConfigError::UnknownKey(key.to_string()))
    }
}

/// Parses a config file body. `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Malformed {
                line: n + 1,
                text: line.to_string(),
            });
        };
        let k = normalize_key(k);
        let v = v.trim();
        if k.is_empty() || v.is_empty() {
            return Err(ConfigError::Malformed {
                line: n + 1,
                text: line.to_string(),
            });
        }
        check_known(&k)?;
        if map.insert(k.clone(), v.to_string()).is_some() {
            return Err(ConfigError::Duplicate(k));
        }
    }
    Ok(map)
}

pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Reference,
    Natural,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: MachineParams,
    pub eps: f64,
    pub units: Units,
    pub output: Option<PathBuf>,
    values: BTreeMap<String, String>,
}

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        reason: reason.into(),
    }
}

impl RunConfig {
    /// File values overridden by `overrides`; the machine parameters are
    /// validated here, before anything is computed.
    pub fn build(
        file: BTreeMap<String, String>,
        overrides: BTreeMap<String, String>,
    ) -> Result<Self, ConfigError> {
        let mut values = file;
        for (k, v) in overrides {
            check_known(&k)?;
            values.insert(k, v);
        }
        let mut cfg = RunConfig {
            params: MachineParams::thermal(0.5, 12.0, [1.0, 6.0, 10.0], FIGURE_GAMMAS),
            eps: DEFAULT_EPS,
            units: Units::Reference,
            output: None,
            values,
        };
        let p = &mut cfg.params;
        p.b1 = cfg_f64(&cfg.values, "b1", p.b1)?;
        p.b2 = cfg_f64(&cfg.values, "b2", p.b2)?;
        for i in 0..3 {
            let n = i + 1;
            p.temperature[i] = cfg_f64(&cfg.values, &format!("t{n}"), p.temperature[i])?;
            p.gamma[i] = cfg_f64(&cfg.values, &format!("gamma{n}"), p.gamma[i])?;
            p.lambda[i] = cfg_f64(&cfg.values, &format!("lambda{n}"), 0.0)?;
            p.phi[i] = cfg_f64(&cfg.values, &format!("phi{n}"), 0.0)?;
        }
        p.tau = cfg_f64(&cfg.values, "tau", DEFAULT_TAU)?;
        p.validate()?;

        cfg.eps = cfg.f64_or("eps", DEFAULT_EPS)?;
        if !(cfg.eps >= 0.0 && cfg.eps.is_finite()) {
            return Err(bad("eps", "must be a non-negative number"));
        }
        cfg.units = match cfg.str("units").unwrap_or("reference") {
            "reference" => Units::Reference,
            "natural" => Units::Natural,
            other => {
                return Err(bad(
                    "units",
                    format!("expected reference or natural, got `{other}`"),
                ))
            }
        };
        cfg.output = cfg.str("output").map(PathBuf::from);
        Ok(cfg)
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.str(key)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| bad(key, format!("`{v}` is not a finite number")))
            })
            .transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.str(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| bad(key, format!("`{v}` is not a non-negative integer"))),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.str(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(bad(key, format!("`{v}` is not a boolean"))),
        }
    }

    pub fn spacing_axis(&self) -> Result<ParamKey, ConfigError> {
        let raw = self.str("axis").unwrap_or("B1");
        match raw.parse::<ParamKey>() {
            Ok(k) if k.is_spacing() => Ok(k),
            _ => Err(bad("axis", format!("expected B1, B2 or B3, got `{raw}`"))),
        }
    }

    pub fn bath(&self) -> Result<Bath, ConfigError> {
        let n = self.usize_or("bath", 1)?;
        Bath::from_number(n).ok_or_else(|| bad("bath", format!("expected 1, 2 or 3, got {n}")))
    }

    pub fn regime(&self) -> Result<Regime, ConfigError> {
        let raw = self.str("regime").ok_or(ConfigError::Missing("regime"))?;
        match Regime::parse(raw) {
            Some(r) if r.sign_pattern().is_some() => Ok(r),
            _ => Err(bad(
                "regime",
                format!("expected one of I to VIII, got `{raw}`"),
            )),
        }
    }

    pub fn objective(&self) -> Result<Option<Objective>, ConfigError> {
        self.str("objective")
            .map(|v| {
                v.parse::<Objective>()
                    .map_err(|e| bad("objective", e.to_string()))
            })
            .transpose()
    }

    /// Powers are multiplied by this factor on output.
    pub fn power_factor(&self) -> f64 {
        match self.units {
            Units::Reference => coherent_machine::thermo::reference_power_scale(&self.params),
            Units::Natural => 1.0,
        }
    }
}

fn cfg_f64(values: &BTreeMap<String, String>, key: &str, default: f64) -> Result<f64, ConfigError> {
    match values.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse::<f64>()
            .map_err(|_| bad(key, format!("`{v}` is not a number"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(file: &str, overrides: &[(&str, &str)]) -> Result<RunConfig, ConfigError> {
        let over = overrides
            .iter()
            .map(|(k, v)| (normalize_key(k), v.to_string()))
            .collect();
        RunConfig::build(parse_config(file)?, over)
    }

    #[test]
    fn comments_case_and_overrides() {
        let cfg = build(
            "# demo\nB1 = 1.5\nT3=60 # hot\n\nLambda3 = 0.2\naxis-min = 3\n",
            &[("b1", "2")],
        )
        .unwrap();
        assert_eq!(cfg.params.b1, 2.0);
        assert_eq!(cfg.params.temperature[2], 60.0);
        assert_eq!(cfg.params.lambda[2], 0.2);
        assert_eq!(cfg.f64_opt("axis_min").unwrap(), Some(3.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            build("foo = 1", &[]),
            Err(ConfigError::UnknownKey(_))
        ));
        assert!(matches!(
            build("b1 1", &[]),
            Err(ConfigError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            build("b1 = 1\nB1 = 2", &[]),
            Err(ConfigError::Duplicate(_))
        ));
        assert!(matches!(
            build("b1 = x", &[]),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            build("", &[("zeta", "1")]),
            Err(ConfigError::UnknownKey(_))
        ));
        assert!(matches!(
            build("units = si", &[]),
            Err(ConfigError::BadValue { .. })
        ));
    }

    #[test]
    fn model_validation_runs_first() {
        assert!(matches!(build("b2 = 0.1", &[]), Err(ConfigError::Model(_))));
        assert!(matches!(build("t2 = 20", &[]), Err(ConfigError::Model(_))));
        assert!(matches!(build("phi1 = 7", &[]), Err(ConfigError::Model(_))));
    }

    #[test]
    fn typed_getters() {
        let cfg = build("axis = B3\nbath = 3\nregime = iv\nwindow = yes", &[]).unwrap();
        assert_eq!(cfg.spacing_axis().unwrap(), ParamKey::B3);
        assert_eq!(cfg.bath().unwrap(), Bath::Hot);
        assert_eq!(cfg.regime().unwrap(), Regime::IV);
        assert!(cfg.bool_or("window", false).unwrap());
        assert!(build("axis = lambda1", &[])
            .unwrap()
            .spacing_axis()
            .is_err());
        assert!(build("bath = 4", &[]).unwrap().bath().is_err());
        assert!(matches!(
            build("", &[]).unwrap().regime(),
            Err(ConfigError::Missing("regime"))
        ));
    }
}
