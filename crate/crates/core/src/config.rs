//! Flat `key = value` configuration files.
//!
//! `#` starts a comment, blank lines are ignored, keys may appear once.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gate::{GateParams, Param};
use crate::metrics::fmt_sig12;

/// One `key = value` entry and the line it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

pub fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            message: format!("expected `key = value`, found {content:?}"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(Error::Config {
                line,
                message: "empty key or value".into(),
            });
        }
        if let Some(prev) = seen.insert(key.to_string(), line) {
            return Err(Error::Config {
                line,
                message: format!("key {key} already set on line {prev}"),
            });
        }
        out.push(Entry {
            line,
            key: key.to_string(),
            value: value.to_string(),
        });
    }
    Ok(out)
}

pub fn parse_f64(e: &Entry) -> Result<f64> {
    e.value.parse::<f64>().map_err(|_| Error::Config {
        line: e.line,
        message: format!("{}: not a number: {:?}", e.key, e.value),
    })
}

/// Applies a GateParams key if `e` names one. Returns whether it did.
pub(crate) fn apply_param(params: &mut GateParams, e: &Entry) -> Result<bool> {
    match Param::from_key(&e.key) {
        Some(p) => {
            params.set(p, parse_f64(e)?);
            Ok(true)
        }
        None => Ok(false),
    }
}

impl GateParams {
    /// Reads parameters on top of the ideal defaults; unknown keys are errors.
    pub fn from_config(text: &str) -> Result<Self> {
        let mut p = GateParams::ideal();
        for e in parse_entries(text)? {
            if !apply_param(&mut p, &e)? {
                return Err(Error::Config {
                    line: e.line,
                    message: format!("unknown key {:?}", e.key),
                });
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn to_config(&self) -> String {
        let mut s = String::new();
        for p in Param::ALL {
            let _ = writeln!(s, "{} = {}", p.key(), fmt_sig12(self.get(p)));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_partial_config() {
        let p = GateParams::from_config("# measured\noverlap = 0.97\n\neta_3a=0.98 # hwp\n").unwrap();
        assert_eq!(p.overlap, 0.97);
        assert_eq!(p.eta_3a, 0.98);
        assert_eq!(p.r_h_central, 1.0 / 3.0);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(
            GateParams::from_config("overlap = 0.9\nfoo = 1\n"),
            Err(Error::Config { line: 2, .. })
        ));
        assert!(matches!(
            GateParams::from_config("overlap = 0.9\noverlap = 0.8\n"),
            Err(Error::Config { line: 2, .. })
        ));
        assert!(matches!(
            GateParams::from_config("overlap 0.9\n"),
            Err(Error::Config { line: 1, .. })
        ));
        assert!(GateParams::from_config("overlap = abc\n").is_err());
        assert!(GateParams::from_config("overlap = 1.5\n").is_err());
    }

    #[test]
    fn config_round_trip() {
        let mut p = GateParams::ideal();
        p.overlap = 0.123456789;
        p.residual_phase_t = -0.25;
        let back = GateParams::from_config(&p.to_config()).unwrap();
        assert_eq!(back.overlap, 0.123456789);
        assert_eq!(back.residual_phase_t, -0.25);
        assert!((back.r_h_central - 1.0 / 3.0).abs() < 1e-12);
    }
}
