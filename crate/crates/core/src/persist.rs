//! Text format for trained models.
//!
//! ```text
//! format = wolfnet-model/1
//! kind = mrnn
//! inputs = 18
//! hidden = 10,10
//! outputs = 1
//! activation = sigmoid
//! threshold = 0.5
//! training_mse = 0.0123
//! feature = <min> <max> <name>     (optional, one line per input)
//! weights = 511
//! <one weight per line>
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so a saved model
//! reloads bit for bit. Lines starting with `#` are comments.

use std::fmt::Write as _;
use thiserror::Error;

use crate::data::Normalization;
use crate::network::{FlatWeights, HiddenActivation, NetworkKind, Topology};
use crate::optimizer::ConvergenceTrace;
use crate::training::TrainedModel;

pub const FORMAT_TAG: &str = "wolfnet-model/1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PersistError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error("unsupported format `{0}`")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, PersistError>;

/// A model plus the input scaling it was trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: TrainedModel,
    pub feature_names: Vec<String>,
    pub normalization: Option<Normalization>,
}

impl ModelFile {
    pub fn to_text(&self) -> String {
        let m = &self.model;
        let t = &m.topology;
        let mut out = String::new();
        let _ = writeln!(out, "format = {FORMAT_TAG}");
        let _ = writeln!(out, "kind = {}", t.kind);
        let _ = writeln!(out, "inputs = {}", t.inputs);
        let hidden: Vec<String> = t.hidden.iter().map(|h| h.to_string()).collect();
        let _ = writeln!(out, "hidden = {}", hidden.join(","));
        let _ = writeln!(out, "outputs = {}", t.outputs);
        let _ = writeln!(out, "activation = {}", t.activation);
        let _ = writeln!(out, "threshold = {:?}", m.threshold);
        let _ = writeln!(out, "training_mse = {:?}", m.training_mse);
        if let Some(norm) = &self.normalization {
            for (j, name) in self.feature_names.iter().enumerate() {
                let _ = writeln!(out, "feature = {:?} {:?} {name}", norm.min[j], norm.max[j]);
            }
        }
        let _ = writeln!(out, "weights = {}", m.weights.len());
        for w in m.weights.as_slice() {
            let _ = writeln!(out, "{w:?}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut format = None;
        let mut kind = None;
        let mut inputs = None;
        let mut hidden: Option<Vec<usize>> = None;
        let mut outputs = None;
        let mut activation = HiddenActivation::Sigmoid;
        let mut threshold = None;
        let mut training_mse = None;
        let mut names = Vec::new();
        let (mut mins, mut maxs) = (Vec::new(), Vec::new());
        let mut weights: Option<(usize, Vec<f64>)> = None;

        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| PersistError::Parse {
                line: line_no,
                message,
            };
            if let Some((expected, values)) = &mut weights {
                if values.len() < *expected {
                    values.push(parse_f64(line).map_err(err)?);
                    continue;
                }
                return Err(err("unexpected content after the weight list".into()));
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
            match key {
                "format" => format = Some(value.to_string()),
                "kind" => {
                    kind = Some(
                        value
                            .parse::<NetworkKind>()
                            .map_err(|e| err(e.to_string()))?,
                    )
                }
                "inputs" => inputs = Some(parse_usize(value).map_err(err)?),
                "hidden" => {
                    hidden = Some(
                        value
                            .split(',')
                            .map(|h| parse_usize(h.trim()))
                            .collect::<std::result::Result<_, _>>()
                            .map_err(err)?,
                    )
                }
                "outputs" => outputs = Some(parse_usize(value).map_err(err)?),
                "activation" => {
                    activation = value
                        .parse()
                        .map_err(|e: crate::network::NetworkError| err(e.to_string()))?
                }
                "threshold" => threshold = Some(parse_f64(value).map_err(err)?),
                "training_mse" => training_mse = Some(parse_f64(value).map_err(err)?),
                "feature" => {
                    let mut parts = value.splitn(3, ' ');
                    let (lo, hi, name) = match (parts.next(), parts.next(), parts.next()) {
                        (Some(lo), Some(hi), Some(name)) => (lo, hi, name),
                        _ => return Err(err("feature needs `<min> <max> <name>`".into())),
                    };
                    mins.push(parse_f64(lo).map_err(err)?);
                    maxs.push(parse_f64(hi).map_err(err)?);
                    names.push(name.to_string());
                }
                "weights" => weights = Some((parse_usize(value).map_err(err)?, Vec::new())),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }

        let format = format.ok_or(PersistError::Missing("format"))?;
        if format != FORMAT_TAG {
            return Err(PersistError::Format(format));
        }
        let topology = Topology {
            kind: kind.ok_or(PersistError::Missing("kind"))?,
            inputs: inputs.ok_or(PersistError::Missing("inputs"))?,
            hidden: hidden.ok_or(PersistError::Missing("hidden"))?,
            outputs: outputs.ok_or(PersistError::Missing("outputs"))?,
            activation,
        };
        let invalid = |message: String| PersistError::Parse { line: 0, message };
        topology.validate().map_err(|e| invalid(e.to_string()))?;
        let (expected, values) = weights.ok_or(PersistError::Missing("weights"))?;
        if values.len() != expected || expected != topology.dimension() {
            return Err(invalid(format!(
                "{} weights for a topology of dimension {} (declared {expected})",
                values.len(),
                topology.dimension()
            )));
        }
        if !names.is_empty() && names.len() != topology.inputs {
            return Err(invalid(format!(
                "{} feature lines for {} inputs",
                names.len(),
                topology.inputs
            )));
        }
        let normalization = (!names.is_empty()).then_some(Normalization {
            min: mins,
            max: maxs,
        });

        Ok(ModelFile {
            model: TrainedModel {
                topology,
                weights: FlatWeights::new(values).map_err(|e| invalid(e.to_string()))?,
                threshold: threshold.ok_or(PersistError::Missing("threshold"))?,
                training_mse: training_mse.ok_or(PersistError::Missing("training_mse"))?,
                trace: ConvergenceTrace::default(),
            },
            feature_names: names,
            normalization,
        })
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.parse().map_err(|_| format!("`{s}` is not a number"))
}

fn parse_usize(s: &str) -> std::result::Result<usize, String> {
    s.parse().map_err(|_| format!("`{s}` is not a count"))
}
