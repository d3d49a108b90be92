//! Line-oriented text container for fitted models.
//!
//! ```text
//! paee-model v1
//! kind linear
//! weights <p>
//! <w_1> ... <w_p>
//! intercept <d>
//! end
//! ```
//!
//! ```text
//! paee-model v1
//! kind cnn-lstm
//! config in_channels=<C> conv1_channels=<F1> conv2_channels=<F2> kernel=<K> hidden=<H> seed=<init seed>
//! train learning_rate=<lr> epochs=<E> batch_size=<B> seed=<shuffle seed>
//! scaler.channel_mean <C>
//! <values>
//! scaler.channel_std <C>
//! <values>
//! scaler.target <mean> <std>
//! param <name> <d1,d2,...>
//! <values>
//! ... one `param` block per tensor, in layout order
//! end
//! ```
//!
//! Numbers use Rust's `{:e}` formatting, which parses back to the same bits.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::cnn_lstm::{CnnLstmConfig, CnnLstmWeights};
use super::linear::LinearModel;
use super::train::{CnnLstmModel, Standardizer, TrainConfig};

pub const ARTIFACT_MAGIC: &str = "paee-model v1";

#[derive(Debug, Error, PartialEq)]
pub enum ArtifactError {
    #[error("not a model artifact (missing `{ARTIFACT_MAGIC}` header)")]
    BadMagic,
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("unknown model kind `{0}`")]
    UnknownKind(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelArtifact {
    Linear(LinearModel),
    CnnLstm(CnnLstmModel),
}

fn push_values(out: &mut String, values: &[f64]) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{v:e}");
    }
    out.push('\n');
}

impl ModelArtifact {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelArtifact::Linear(_) => "linear",
            ModelArtifact::CnnLstm(_) => "cnn-lstm",
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{ARTIFACT_MAGIC}\nkind {}\n", self.kind());
        match self {
            ModelArtifact::Linear(m) => {
                let _ = writeln!(out, "weights {}", m.weights.len());
                push_values(&mut out, &m.weights);
                let _ = writeln!(out, "intercept {:e}", m.intercept);
            }
            ModelArtifact::CnnLstm(m) => {
                let c = m.weights.config();
                let _ = writeln!(
                    out,
                    "config in_channels={} conv1_channels={} conv2_channels={} kernel={} hidden={} seed={}",
                    c.in_channels, c.conv1_channels, c.conv2_channels, c.kernel, c.hidden, c.seed
                );
                let t = &m.train;
                let _ = writeln!(
                    out,
                    "train learning_rate={:e} epochs={} batch_size={} seed={}",
                    t.learning_rate, t.epochs, t.batch_size, t.seed
                );
                let _ = writeln!(out, "scaler.channel_mean {}", m.scaler.channel_mean.len());
                push_values(&mut out, &m.scaler.channel_mean);
                let _ = writeln!(out, "scaler.channel_std {}", m.scaler.channel_std.len());
                push_values(&mut out, &m.scaler.channel_std);
                let _ = writeln!(
                    out,
                    "scaler.target {:e} {:e}",
                    m.scaler.target_mean, m.scaler.target_std
                );
                for spec in CnnLstmWeights::layout(c) {
                    let dims: Vec<String> = spec.shape.iter().map(usize::to_string).collect();
                    let _ = writeln!(out, "param {} {}", spec.name, dims.join(","));
                    push_values(
                        &mut out,
                        &m.weights.params()[spec.offset..spec.offset + spec.len()],
                    );
                }
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ArtifactError> {
        let mut p = Lines::new(text);
        if p.next_line()? != ARTIFACT_MAGIC {
            return Err(ArtifactError::BadMagic);
        }
        let kind = p.keyword("kind")?;
        let artifact = match kind.as_str() {
            "linear" => {
                let n: usize = {
                    let s = p.keyword("weights")?;
                    p.parse(&s)
                }?;
                let weights = p.values(n)?;
                let intercept = {
                    let s = p.keyword("intercept")?;
                    p.parse(&s)
                }?;
                ModelArtifact::Linear(LinearModel { weights, intercept })
            }
            "cnn-lstm" => {
                let cfg_kv = {
                    let s = p.keyword("config")?;
                    p.key_values(&s)
                }?;
                let cfg = CnnLstmConfig {
                    in_channels: p.field(&cfg_kv, "in_channels")?,
                    conv1_channels: p.field(&cfg_kv, "conv1_channels")?,
                    conv2_channels: p.field(&cfg_kv, "conv2_channels")?,
                    kernel: p.field(&cfg_kv, "kernel")?,
                    hidden: p.field(&cfg_kv, "hidden")?,
                    seed: p.field(&cfg_kv, "seed")?,
                };
                let tr = {
                    let s = p.keyword("train")?;
                    p.key_values(&s)
                }?;
                let train = TrainConfig {
                    learning_rate: p.field(&tr, "learning_rate")?,
                    epochs: p.field(&tr, "epochs")?,
                    batch_size: p.field(&tr, "batch_size")?,
                    seed: p.field(&tr, "seed")?,
                };
                let n: usize = {
                    let s = p.keyword("scaler.channel_mean")?;
                    p.parse(&s)
                }?;
                let channel_mean = p.values(n)?;
                let n: usize = {
                    let s = p.keyword("scaler.channel_std")?;
                    p.parse(&s)
                }?;
                let channel_std = p.values(n)?;
                let target = p.keyword("scaler.target")?;
                let tv: Vec<&str> = target.split(' ').collect();
                if tv.len() != 2 {
                    return Err(p.error("expected target mean and std"));
                }
                let scaler = Standardizer {
                    channel_mean,
                    channel_std,
                    target_mean: p.parse(tv[0])?,
                    target_std: p.parse(tv[1])?,
                };
                let mut params = Vec::with_capacity(CnnLstmWeights::param_count(&cfg));
                for spec in CnnLstmWeights::layout(&cfg) {
                    let header = p.keyword("param")?;
                    let dims: Vec<String> = spec.shape.iter().map(usize::to_string).collect();
                    let expected = format!("{} {}", spec.name, dims.join(","));
                    if header != expected {
                        return Err(p.error(&format!(
                            "expected `param {expected}`, found `param {header}`"
                        )));
                    }
                    params.extend(p.values(spec.len())?);
                }
                let weights = CnnLstmWeights::from_params(cfg, params)
                    .map_err(|e| p.error(&e.to_string()))?;
                ModelArtifact::CnnLstm(CnnLstmModel {
                    weights,
                    scaler,
                    train,
                })
            }
            other => return Err(ArtifactError::UnknownKind(other.to_string())),
        };
        if p.next_line()? != "end" {
            return Err(p.error("expected `end`"));
        }
        Ok(artifact)
    }
}

struct Lines<'a> {
    iter: std::str::Lines<'a>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            iter: text.lines(),
            line: 0,
        }
    }

    fn error(&self, reason: &str) -> ArtifactError {
        ArtifactError::Malformed {
            line: self.line,
            reason: reason.to_string(),
        }
    }

    fn next_line(&mut self) -> Result<&'a str, ArtifactError> {
        self.line += 1;
        self.iter
            .next()
            .ok_or_else(|| self.error("unexpected end of file"))
    }

    /// Returns the remainder of a `<keyword> <rest>` line.
    fn keyword(&mut self, key: &str) -> Result<String, ArtifactError> {
        let l = self.next_line()?;
        match l.split_once(' ') {
            Some((k, rest)) if k == key => Ok(rest.to_string()),
            _ => Err(self.error(&format!("expected `{key}`"))),
        }
    }

    fn parse<T: std::str::FromStr>(&self, s: &str) -> Result<T, ArtifactError> {
        s.trim()
            .parse()
            .map_err(|_| self.error(&format!("cannot parse `{s}`")))
    }

    fn values(&mut self, n: usize) -> Result<Vec<f64>, ArtifactError> {
        let l = self.next_line()?;
        let v = l
            .split(' ')
            .filter(|s| !s.is_empty())
            .map(|s| self.parse::<f64>(s))
            .collect::<Result<Vec<_>, _>>()?;
        if v.len() != n {
            return Err(self.error(&format!("expected {n} values, found {}", v.len())));
        }
        Ok(v)
    }

    fn key_values(&self, rest: &str) -> Result<BTreeMap<String, String>, ArtifactError> {
        rest.split(' ')
            .map(|kv| {
                kv.split_once('=')
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .ok_or_else(|| self.error(&format!("expected key=value, found `{kv}`")))
            })
            .collect()
    }

    fn field<T: std::str::FromStr>(
        &self,
        kv: &BTreeMap<String, String>,
        key: &str,
    ) -> Result<T, ArtifactError> {
        let v = kv
            .get(key)
            .ok_or_else(|| self.error(&format!("missing `{key}`")))?;
        self.parse(v)
    }
}
