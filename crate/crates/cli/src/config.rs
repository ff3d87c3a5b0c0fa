//! Flat `key = value` settings from a TOML file and `--set` overrides.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rcnn_core::dynamics::{InactivationMode, RcnnParams};
use serde_json::Value;

use crate::error::{CliError, Result};

/// Merge the config file (if any) with `--set` pairs; later pairs win.
pub fn collect_settings(
    config: Option<&Path>,
    sets: &[String],
) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    if let Some(path) = config {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let table: toml::Table = text
            .parse()
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for (key, value) in table {
            let text = match value {
                toml::Value::String(s) => s,
                toml::Value::Integer(i) => i.to_string(),
                toml::Value::Float(f) => f.to_string(),
                toml::Value::Boolean(b) => b.to_string(),
                other => {
                    return Err(CliError::Config(format!(
                        "{}: key {key:?} must be a scalar, got {}",
                        path.display(),
                        other.type_str()
                    )))
                }
            };
            out.insert(key, text);
        }
    }
    for pair in sets {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects key=value, got {pair:?}")))?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

/// Hands out typed settings and records every resolved value, so nothing
/// is defaulted silently. Keys nobody asked for are rejected by `finish`.
pub struct Resolver {
    pending: BTreeMap<String, String>,
    resolved: BTreeMap<String, Value>,
}

impl Resolver {
    pub fn new(settings: BTreeMap<String, String>) -> Self {
        Self {
            pending: settings,
            resolved: BTreeMap::new(),
        }
    }

    pub fn value<T>(&mut self, key: &str, default: T) -> Result<T>
    where
        T: FromStr + Clone + Into<Value>,
        T::Err: std::fmt::Display,
    {
        let v = match self.pending.remove(key) {
            Some(text) => text
                .parse::<T>()
                .map_err(|e| CliError::Config(format!("{key} = {text:?}: {e}")))?,
            None => default,
        };
        self.resolved.insert(key.to_string(), v.clone().into());
        Ok(v)
    }

    /// Record a value that is not overridable, such as the seed.
    pub fn record(&mut self, key: &str, value: impl Into<Value>) {
        self.resolved.insert(key.to_string(), value.into());
    }

    pub fn rcnn(&mut self, base: RcnnParams, seed: u64) -> Result<RcnnParams> {
        let mode: String = self.value(
            "inactivation_mode",
            base.inactivation_mode.as_str().to_string(),
        )?;
        let params = RcnnParams {
            beta: self.value("beta", base.beta)?,
            v_u: self.value("v_u", base.v_u)?,
            alpha_u: self.value("alpha_u", base.alpha_u)?,
            alpha_theta: self.value("alpha_theta", base.alpha_theta)?,
            v_theta: self.value("v_theta", base.v_theta)?,
            kernel_radius: self.value("kernel_radius", base.kernel_radius)?,
            sigma_g: self.value("sigma_g", base.sigma_g)?,
            sigma_d: self.value("sigma_d", base.sigma_d)?,
            inactivation_mode: InactivationMode::from_str(&mode)?,
            iterations: self.value("iterations", base.iterations)?,
            seed,
        };
        self.record("seed", seed);
        params.validate()?;
        Ok(params)
    }

    pub fn finish(self) -> Result<BTreeMap<String, Value>> {
        if !self.pending.is_empty() {
            let keys: Vec<&str> = self.pending.keys().map(String::as_str).collect();
            return Err(CliError::Config(format!(
                "unknown key(s): {}",
                keys.join(", ")
            )));
        }
        Ok(self.resolved)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(pairs: &[&str]) -> BTreeMap<String, String> {
        collect_settings(
            None,
            &pairs.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn set_pairs_override_in_order() {
        let s = settings(&["beta=1", "beta = 2.5"]);
        assert_eq!(s["beta"], "2.5");
    }

    #[test]
    fn malformed_pair_is_rejected() {
        assert!(collect_settings(None, &["beta".into()]).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut r = Resolver::new(settings(&["beta=1", "gamma=3"]));
        r.rcnn(RcnnParams::default(), 1).unwrap();
        let e = r.finish().unwrap_err().to_string();
        assert!(e.contains("gamma"), "{e}");
    }

    #[test]
    fn every_value_is_recorded() {
        let mut r = Resolver::new(settings(&["iterations=7"]));
        let p = r.rcnn(RcnnParams::default(), 9).unwrap();
        assert_eq!(p.iterations, 7);
        let resolved = r.finish().unwrap();
        assert_eq!(resolved["iterations"], Value::from(7usize));
        assert_eq!(resolved["seed"], Value::from(9u64));
        assert_eq!(resolved["beta"], Value::from(0.4));
        assert_eq!(
            resolved["inactivation_mode"],
            Value::from("distance-increasing")
        );
    }

    #[test]
    fn bad_value_names_the_key() {
        let mut r = Resolver::new(settings(&["iterations=lots"]));
        let e = r.rcnn(RcnnParams::default(), 1).unwrap_err().to_string();
        assert!(e.contains("iterations"), "{e}");
    }

    #[test]
    fn invalid_parameter_is_an_input_error() {
        let mut r = Resolver::new(settings(&["alpha_u=-1"]));
        assert_eq!(r.rcnn(RcnnParams::default(), 1).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn toml_file_is_flat() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "beta = 3\nmode = \"x\"\n").unwrap();
        let s = collect_settings(Some(&path), &["beta=4".into()]).unwrap();
        assert_eq!(s["beta"], "4");
        assert_eq!(s["mode"], "x");
        fs::write(&path, "[rcnn]\nbeta = 3\n").unwrap();
        assert!(collect_settings(Some(&path), &[]).is_err());
    }
}
