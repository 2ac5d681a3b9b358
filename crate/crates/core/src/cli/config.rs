//! Run configuration: INI file values overridden by command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use ini::Ini;

use crate::error::{Error, Result};

/// Every key the commands understand; each has a flag of the same name with
/// '-' for '_'.
pub const KEYS: &[&str] = &[
    "a",
    "alpha0",
    "b",
    "barrier",
    "barriers",
    "beta0",
    "direction",
    "grid_l",
    "grid_max",
    "grid_min",
    "horizon",
    "inner_j",
    "k_terms",
    "lambda",
    "method",
    "mu",
    "out",
    "paths",
    "points",
    "quantity",
    "replicates",
    "samples",
    "seed",
    "segments",
    "sets",
    "sigma",
    "steps",
    "t_max",
    "t_points",
    "threads",
    "times",
    "timing",
    "window",
    "x",
    "y0",
    "z0",
];

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Reads `path` if given (section names are only for readability; keys
    /// must be unique across sections) and applies `overrides` on top.
    pub fn load(path: Option<&Path>, overrides: Vec<(String, String)>) -> Result<Self> {
        let mut values = BTreeMap::new();
        if let Some(p) = path {
            let ini =
                Ini::load_from_file(p).map_err(|e| config_err(format!("{}: {e}", p.display())))?;
            for (_, props) in ini.iter() {
                for (k, v) in props.iter() {
                    let k = k.trim().to_string();
                    if values.insert(k.clone(), v.trim().to_string()).is_some() {
                        return Err(config_err(format!("key '{k}' given twice")));
                    }
                }
            }
        }
        for (k, v) in overrides {
            values.insert(k, v);
        }
        for k in values.keys() {
            if !KEYS.contains(&k.as_str()) {
                return Err(config_err(format!("unknown key '{k}'")));
            }
        }
        Ok(Self { values })
    }

    pub fn set_default(&mut self, key: &str, value: impl ToString) {
        self.values
            .entry(key.to_string())
            .or_insert_with(|| value.to_string());
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        self.str(key)
            .map(|v| match v {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => v
                    .parse::<f64>()
                    .map_err(|_| config_err(format!("{key} = '{v}' is not a number"))),
            })
            .transpose()
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        self.f64_opt(key)?
            .ok_or_else(|| config_err(format!("missing key '{key}'")))
    }

    pub fn usize_opt(&self, key: &str) -> Result<Option<usize>> {
        self.str(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| config_err(format!("{key} = '{v}' is not a count")))
            })
            .transpose()
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.usize_opt(key)?.unwrap_or(default))
    }

    pub fn u64(&self, key: &str, default: u64) -> Result<u64> {
        self.str(key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| config_err(format!("{key} = '{v}' is not an integer")))
            })
            .transpose()
            .map(|v| v.unwrap_or(default))
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.str(key) {
            None | Some("false") | Some("0") | Some("no") => Ok(false),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some(v) => Err(config_err(format!("{key} = '{v}' is not a boolean"))),
        }
    }

    /// Comma-separated numbers.
    pub fn list_f64(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.str(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|_| config_err(format!("{key}: '{s}' is not a number")))
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn list_usize(&self, key: &str) -> Result<Option<Vec<usize>>> {
        self.str(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|_| config_err(format!("{key}: '{s}' is not a count")))
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &String)> {
        self.values.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let dir = std::env::temp_dir().join(format!("oux-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("run.ini");
        std::fs::write(
            &p,
            "[problem]\nz0 = 0\nbarriers = 1, 2\n[numerics]\ngrid_l = 801\n",
        )
        .unwrap();
        let s = Settings::load(Some(&p), vec![("grid_l".into(), "401".into())]).unwrap();
        assert_eq!(s.usize("grid_l", 0).unwrap(), 401);
        assert_eq!(s.list_f64("barriers").unwrap(), Some(vec![1.0, 2.0]));
        assert!(Settings::load(None, vec![("bogus".into(), "1".into())]).is_err());
        std::fs::write(&p, "[a]\nx = 1\n[b]\nx = 2\n").unwrap();
        assert!(Settings::load(Some(&p), vec![]).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }
}
