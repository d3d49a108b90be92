//! Flat `key = value` configuration shared by every command.

use std::path::Path;

use paee::evaluation::{LosoConfig, ModelKind, R2Variant};
use paee::features::{Composition, WindowSpec};
use paee::models::TrainConfig;
use paee::synthgen::GeneratorConfig;

use crate::CliError;

/// Settings of the `run` command that can come from the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub compositions: Vec<Composition>,
    pub models: Vec<ModelKind>,
    pub window: usize,
    pub horizon: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub train_stride: usize,
    pub seed: u64,
    pub r2: R2Variant,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            compositions: Composition::ALL.to_vec(),
            models: ModelKind::ALL.to_vec(),
            window: 30,
            horizon: 1,
            epochs: 3,
            learning_rate: 1e-3,
            batch_size: 64,
            train_stride: 4,
            seed: 42,
            r2: R2Variant::Standard,
        }
    }
}

const RUN_KEYS: [&str; 10] = [
    "compositions",
    "models",
    "window",
    "horizon",
    "epochs",
    "learning_rate",
    "batch_size",
    "train_stride",
    "seed",
    "r2",
];

pub fn parse_list<T: std::str::FromStr<Err = String>>(s: &str) -> Result<Vec<T>, CliError> {
    let items = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(CliError::Config))
        .collect::<Result<Vec<T>, _>>()?;
    if items.is_empty() {
        return Err(CliError::Config(format!("empty list `{s}`")));
    }
    Ok(items)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    v.parse()
        .map_err(|e| CliError::Config(format!("{key} = {v}: {e}")))
}

impl RunSettings {
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key {
            "compositions" => self.compositions = parse_list(v)?,
            "models" => self.models = parse_list(v)?,
            "window" => self.window = num(key, v)?,
            "horizon" => self.horizon = num(key, v)?,
            "epochs" => self.epochs = num(key, v)?,
            "learning_rate" => self.learning_rate = num(key, v)?,
            "batch_size" => self.batch_size = num(key, v)?,
            "train_stride" => self.train_stride = num(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "r2" => {
                self.r2 = match v {
                    "standard" => R2Variant::Standard,
                    "literal" => R2Variant::Literal,
                    _ => return Err(CliError::Config(format!("r2 = {v}: expected standard or literal"))),
                }
            }
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("window", self.window),
            ("horizon", self.horizon),
            ("epochs", self.epochs),
            ("batch_size", self.batch_size),
            ("train_stride", self.train_stride),
        ];
        if let Some((k, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(CliError::Config(format!("{k} must be positive")));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(CliError::Config("learning_rate must be positive".into()));
        }
        Ok(())
    }

    pub fn loso(&self) -> LosoConfig {
        LosoConfig {
            window: WindowSpec {
                width: self.window,
                step: 1,
                horizon: self.horizon,
            },
            train: TrainConfig {
                learning_rate: self.learning_rate,
                epochs: self.epochs,
                batch_size: self.batch_size,
                seed: self.seed,
            },
            train_stride: self.train_stride,
            r2_variant: self.r2,
        }
    }
}

/// `key = value` pairs in file order. `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected `key = value`", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if !RUN_KEYS.contains(&k) && !GeneratorConfig::is_key(k) {
            return Err(CliError::Config(format!("config line {}: unknown key `{k}`", i + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

pub fn read_config(path: Option<&Path>) -> Result<Vec<(String, String)>, CliError> {
    match path {
        None => Ok(Vec::new()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            parse_config_text(&text)
        }
    }
}

/// Generator settings from the config entries that belong to it.
pub fn generator_config(entries: &[(String, String)]) -> Result<GeneratorConfig, CliError> {
    let mut cfg = GeneratorConfig::default();
    for (k, v) in entries.iter().filter(|(k, _)| GeneratorConfig::is_key(k)) {
        cfg.set(k, v).map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(cfg)
}

pub fn run_settings(entries: &[(String, String)]) -> Result<RunSettings, CliError> {
    let mut s = RunSettings::default();
    for (k, v) in entries.iter().filter(|(k, _)| RUN_KEYS.contains(&k.as_str())) {
        s.set(k, v)?;
    }
    Ok(s)
}
