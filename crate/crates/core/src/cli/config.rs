//! Resolved run configuration: command-line flags layered over an optional
//! `key = value` file, with `BFT_SEED` as the last seed fallback.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadgets::GadgetKind;

pub const SEED_ENV: &str = "BFT_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Bounds,
    Threshold,
    Sweep,
    Simulate,
    Verify,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Everything a run depends on. Serializing this and feeding it back through
/// `--config` reproduces the run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub gadget: Option<GadgetKind>,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub r1: Option<usize>,
    pub r2: Option<usize>,
    pub t: Option<usize>,
    pub epsilon: Option<f64>,
    pub bias: Option<f64>,
    pub epsilon_prime: Option<f64>,
    pub target: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub preceding_r: Option<usize>,
    pub suite: Option<String>,
    pub points: Option<usize>,
    pub full_grid: Option<bool>,
    pub guide: Option<bool>,
}

/// Accepts integers written as floats (`1e6`).
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if f < 0.0 || f.fract() != 0.0 || f > u64::MAX as f64 {
        return Err(format!("not a non-negative integer: {s:?}"));
    }
    Ok(f as u64)
}

fn cfg_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| cfg_err(line, format!("{key}: {e}")))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(cfg_err(line, format!("{key}: expected a boolean, got {v:?}"))),
    }
}

impl RunConfig {
    /// Parses a flat `key = value` file. `#` starts a comment; keys may use
    /// `-` or `_`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut seen = BTreeMap::new();
        let mut c = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body.split_once('=').ok_or_else(|| cfg_err(line, "expected key = value"))?;
            let key = k.trim().replace('-', "_");
            let v = v.trim().trim_matches('"');
            if seen.insert(key.clone(), line).is_some() {
                return Err(cfg_err(line, format!("duplicate key {key}")));
            }
            match key.as_str() {
                "command" => {
                    c.command = Some(
                        <CommandKind as clap::ValueEnum>::from_str(v, true).map_err(|e| cfg_err(line, e))?,
                    )
                }
                "gadget" => c.gadget = Some(parse_value(line, &key, v)?),
                "n" => c.n = Some(parse_value(line, &key, v)?),
                "r" => c.r = Some(parse_value(line, &key, v)?),
                "r1" => c.r1 = Some(parse_value(line, &key, v)?),
                "r2" => c.r2 = Some(parse_value(line, &key, v)?),
                "t" => c.t = Some(parse_value(line, &key, v)?),
                "epsilon" => c.epsilon = Some(parse_value(line, &key, v)?),
                "bias" => c.bias = Some(parse_value(line, &key, v)?),
                "epsilon_prime" => c.epsilon_prime = Some(parse_value(line, &key, v)?),
                "target" => c.target = Some(parse_value(line, &key, v)?),
                "trials" => c.trials = Some(parse_count(v).map_err(|e| cfg_err(line, e))?),
                "seed" => c.seed = Some(parse_count(v).map_err(|e| cfg_err(line, e))?),
                "format" => {
                    c.format = Some(<Format as clap::ValueEnum>::from_str(v, true).map_err(|e| cfg_err(line, e))?)
                }
                "out" => c.out = Some(PathBuf::from(v)),
                "preceding_r" => c.preceding_r = Some(parse_value(line, &key, v)?),
                "suite" => c.suite = Some(v.to_string()),
                "points" => c.points = Some(parse_value(line, &key, v)?),
                "full_grid" => c.full_grid = Some(parse_bool(line, &key, v)?),
                "guide" => c.guide = Some(parse_bool(line, &key, v)?),
                other => return Err(cfg_err(line, format!("unknown key {other}"))),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fields set in `self` win; unset ones are taken from `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            command: self.command.or(base.command),
            gadget: self.gadget.or(base.gadget),
            n: self.n.or(base.n),
            r: self.r.or(base.r),
            r1: self.r1.or(base.r1),
            r2: self.r2.or(base.r2),
            t: self.t.or(base.t),
            epsilon: self.epsilon.or(base.epsilon),
            bias: self.bias.or(base.bias),
            epsilon_prime: self.epsilon_prime.or(base.epsilon_prime),
            target: self.target.or(base.target),
            trials: self.trials.or(base.trials),
            seed: self.seed.or(base.seed),
            format: self.format.or(base.format),
            out: self.out.or(base.out),
            preceding_r: self.preceding_r.or(base.preceding_r),
            suite: self.suite.or(base.suite),
            points: self.points.or(base.points),
            full_grid: self.full_grid.or(base.full_grid),
            guide: self.guide.or(base.guide),
        }
    }

    /// Fills the seed from `BFT_SEED` when neither flag nor file set it.
    pub fn with_env_seed(mut self, env: Option<String>) -> Result<Self> {
        if self.seed.is_none() {
            if let Some(v) = env {
                self.seed = Some(parse_count(v.trim()).map_err(|e| Error::Config(format!("{SEED_ENV}: {e}")))?);
            }
        }
        Ok(self)
    }

    /// Renders the configuration in the file format accepted by [`parse`].
    ///
    /// [`parse`]: RunConfig::parse
    pub fn to_file_text(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let mut out = String::new();
        if let serde_json::Value::Object(map) = value {
            for (k, v) in map {
                match v {
                    serde_json::Value::Null => {}
                    serde_json::Value::String(s) => out.push_str(&format!("{k} = {s}\n")),
                    other => out.push_str(&format!("{k} = {other}\n")),
                }
            }
        }
        out
    }
}
