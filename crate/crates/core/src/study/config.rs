//! Plain-text `key = value` settings with `#` comments, layered so that later
//! sources win.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::{Conventions, StudyConfig, StudyKind};
use crate::error::{Error, Result};

const KEYS: [&str; 12] =
    ["study", "scheme", "alpha", "dim", "n", "nt", "T", "refine", "out", "conventions", "timing", "allow_large"];

fn canonical_key(key: &str) -> Option<&'static str> {
    let key = key.trim().replace('-', "_");
    KEYS.into_iter().find(|k| *k == key || (*k == "T" && key == "t"))
}

/// Splits `text` into `(line, key, value)` triples, skipping blanks and comments.
pub fn parse_key_values(text: &str, path: &Path) -> Result<Vec<(usize, String, String)>> {
    let err = |line: usize, msg: String| Error::ConfigFile { path: path.to_path_buf(), line, msg };
    text.lines()
        .enumerate()
        .map(|(i, raw)| (i + 1, raw.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(line, l)| {
            let (k, v) = l.split_once('=').ok_or_else(|| err(line, format!("expected key = value, got '{l}'")))?;
            let key = canonical_key(k).ok_or_else(|| err(line, format!("unknown key '{}'", k.trim())))?;
            Ok((line, key.to_string(), v.trim().to_string()))
        })
        .collect()
}

/// Parses `T/80`, `1/16` or a plain decimal.
pub fn parse_resolution(s: &str, final_time: f64) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::InvalidConfig(format!("cannot parse resolution '{s}'"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let v = match s.split_once('/') {
        Some((a, b)) if a.trim().eq_ignore_ascii_case("t") => final_time / num(b)?,
        Some((a, b)) => num(a)? / num(b)?,
        None => num(s)?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn default_refine(study: StudyKind, dim: usize) -> &'static str {
    match (study, dim) {
        (StudyKind::Temporal, _) => "T/80, T/120, T/160, T/240, T/320",
        (StudyKind::Spatial, _) => "1/16, 1/24, 1/32, 1/48, 1/64",
        (StudyKind::Coupled3D, _) => "1/10, 1/20, 1/24, 1/28, 1/32",
        (StudyKind::NormPreservation, 3) => "1/10, 1/20, 1/24, 1/28",
        (StudyKind::NormPreservation, _) => "2e-2, 1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4, 3.125e-4",
        (StudyKind::StabilityProbe, _) => "2e-2, 1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4",
    }
}

/// Raw settings; resolved into a [`StudyConfig`] only once every source has
/// been applied.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<&'static str, String>,
}

impl Settings {
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let k = canonical_key(key).ok_or_else(|| Error::InvalidConfig(format!("unknown key '{key}'")))?;
        self.values.insert(k, value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        canonical_key(key).and_then(|k| self.values.get(k)).map(String::as_str)
    }

    pub fn merge_text(&mut self, text: &str, path: &Path) -> Result<()> {
        for (_, k, v) in parse_key_values(text, path)? {
            self.set(&k, v)?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        self.merge_text(&text, path)
    }

    pub fn to_config(&self) -> Result<StudyConfig> {
        let invalid = |key: &str, v: &str| Error::InvalidConfig(format!("bad value for {key}: '{v}'"));
        let parse = |key: &str| -> Result<Option<f64>> {
            self.get(key).map(|v| v.trim().parse::<f64>().map_err(|_| invalid(key, v))).transpose()
        };
        let count = |key: &str| -> Result<Option<usize>> {
            self.get(key).map(|v| v.trim().parse::<usize>().map_err(|_| invalid(key, v))).transpose()
        };
        let flag = |key: &str| -> Result<Option<bool>> {
            self.get(key)
                .map(|v| match v.trim().to_ascii_lowercase().as_str() {
                    "true" | "yes" | "1" | "on" => Ok(true),
                    "false" | "no" | "0" | "off" => Ok(false),
                    _ => Err(invalid(key, v)),
                })
                .transpose()
        };

        let study: StudyKind = self
            .get("study")
            .ok_or_else(|| Error::InvalidConfig("no study selected".into()))?
            .trim()
            .parse()?;
        let dim = count("dim")?.unwrap_or(if study == StudyKind::Coupled3D { 3 } else { 1 });
        let mut cfg = StudyConfig::preset(study, dim);
        cfg.dim = dim;
        if let Some(s) = self.get("scheme") {
            cfg.scheme = s.trim().parse()?;
        }
        if let Some(a) = parse("alpha")? {
            cfg.alpha = a;
        }
        if let Some(t) = parse("T")? {
            cfg.final_time = t;
        }
        if let Some(n) = count("n")? {
            cfg.intervals = Some(n);
        }
        if let Some(nt) = count("nt")? {
            cfg.steps = Some(nt);
        }
        let refine = self.get("refine").unwrap_or(default_refine(study, dim));
        cfg.refine = refine
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_resolution(s, cfg.final_time))
            .collect::<Result<_>>()?;
        if let Some(o) = self.get("out") {
            cfg.out = Some(PathBuf::from(o.trim()));
        }
        if let Some(c) = self.get("conventions") {
            cfg.conventions = c.trim().parse::<Conventions>()?;
        }
        if let Some(t) = flag("timing")? {
            cfg.timing = t;
        }
        if let Some(a) = flag("allow_large")? {
            cfg.allow_large = a;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
