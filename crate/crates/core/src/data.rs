//! Dataset ingestion, min-max scaling, correlation ranking and stratified folds.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use std::fmt::{self, Write as _};
use std::io::Read;
use std::path::Path;
use thiserror::Error;

use crate::seed;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {cause}")]
    Io { path: String, cause: std::io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: expected {expected} columns, found {actual}")]
    Arity {
        line: u64,
        expected: usize,
        actual: usize,
    },
    #[error("line {line}: column `{column}` holds non-numeric value `{value}`")]
    Numeric {
        line: u64,
        column: String,
        value: String,
    },
    #[error("line {line}: unknown label `{value}`")]
    UnknownLabel { line: u64, value: String },
    #[error("label column {0} not found")]
    MissingColumn(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("statistics error: {0}")]
    Statistics(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("the dataset has no rows")]
    Empty,
}

pub type Result<T> = std::result::Result<T, DataError>;

/// Binary outcome. `Pass` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Pass,
    Fail,
}

impl Label {
    /// Network target: 1 for pass, 0 for fail.
    pub fn target(self) -> f64 {
        match self {
            Label::Pass => 1.0,
            Label::Fail => 0.0,
        }
    }

    pub fn is_pass(self) -> bool {
        self == Label::Pass
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Pass => "pass",
            Label::Fail => "fail",
        })
    }
}

/// How to find the label column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnRef {
    Name(String),
    /// Zero-based.
    Index(usize),
    Last,
}

impl std::str::FromStr for ColumnRef {
    type Err = std::convert::Infallible;

    /// Digits select by index, `last` the final column, anything else by name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        Ok(if s.eq_ignore_ascii_case("last") {
            ColumnRef::Last
        } else if let Ok(i) = s.parse() {
            ColumnRef::Index(i)
        } else {
            ColumnRef::Name(s.to_string())
        })
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnRef::Name(n) => f.write_str(n),
            ColumnRef::Index(i) => write!(f, "{i}"),
            ColumnRef::Last => f.write_str("last"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub has_header: bool,
    pub label_column: ColumnRef,
    /// Case-insensitive spellings of the positive class.
    pub positive_labels: Vec<String>,
    /// Case-insensitive spellings of the negative class.
    pub negative_labels: Vec<String>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            has_header: true,
            label_column: ColumnRef::Last,
            positive_labels: vec!["1".into(), "pass".into()],
            negative_labels: vec!["0".into(), "fail".into()],
        }
    }
}

impl CsvSchema {
    fn parse_label(&self, text: &str, line: u64) -> Result<Label> {
        let t = text.trim();
        if self
            .positive_labels
            .iter()
            .any(|p| p.eq_ignore_ascii_case(t))
        {
            Ok(Label::Pass)
        } else if self
            .negative_labels
            .iter()
            .any(|n| n.eq_ignore_ascii_case(t))
        {
            Ok(Label::Fail)
        } else {
            Err(DataError::UnknownLabel {
                line,
                value: t.to_string(),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub values: Vec<f64>,
    pub label: Label,
}

/// Rows as read from disk, label split off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawDataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<RawRow>,
}

pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<RawDataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|cause| DataError::Io {
        path: path.display().to_string(),
        cause,
    })?;
    read_csv(file, schema)
}

/// Parse CSV from any reader. Categorical columns must already be coded
/// as numbers.
pub fn read_csv<R: Read>(reader: R, schema: &CsvSchema) -> Result<RawDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();

    let mut header: Option<Vec<String>> = None;
    let mut first_row: Option<csv::StringRecord> = None;
    if let Some(first) = records.next() {
        let first = first?;
        if schema.has_header {
            header = Some(first.iter().map(str::to_string).collect());
        } else {
            first_row = Some(first);
        }
    }
    let width = match (&header, &first_row) {
        (Some(h), _) => h.len(),
        (None, Some(r)) => r.len(),
        (None, None) => return Err(DataError::Empty),
    };
    let names: Vec<String> =
        header.unwrap_or_else(|| (0..width).map(|i| format!("f{i}")).collect());

    let label_index = match &schema.label_column {
        ColumnRef::Last => width.checked_sub(1),
        ColumnRef::Index(i) => (*i < width).then_some(*i),
        ColumnRef::Name(n) => names.iter().position(|h| h == n),
    }
    .ok_or_else(|| DataError::MissingColumn(schema.label_column.to_string()))?;

    let feature_names: Vec<String> = names
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_index)
        .map(|(_, n)| n.clone())
        .collect();

    let mut rows = Vec::new();
    for record in first_row.into_iter().map(Ok).chain(records) {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != width {
            return Err(DataError::Arity {
                line,
                expected: width,
                actual: record.len(),
            });
        }
        let mut values = Vec::with_capacity(width - 1);
        let mut label = None;
        for (i, cell) in record.iter().enumerate() {
            if i == label_index {
                label = Some(schema.parse_label(cell, line)?);
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| DataError::Numeric {
                line,
                column: names[i].clone(),
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(DataError::Numeric {
                    line,
                    column: names[i].clone(),
                    value: cell.to_string(),
                });
            }
            values.push(v);
        }
        rows.push(RawRow {
            values,
            label: label.expect("label column visited"),
        });
    }
    if rows.is_empty() {
        return Err(DataError::Empty);
    }
    Ok(RawDataset {
        feature_names,
        rows,
    })
}

/// Numeric columns without a label, as fed to a trained model.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn load_features(
    path: impl AsRef<Path>,
    has_header: bool,
    select: Option<&[String]>,
) -> Result<FeatureTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|cause| DataError::Io {
        path: path.display().to_string(),
        cause,
    })?;
    read_features(file, has_header, select)
}

/// Read numeric columns. With `select`, only the named header columns are
/// kept (in that order) and the others may hold anything, e.g. a label.
pub fn read_features<R: Read>(
    reader: R,
    has_header: bool,
    select: Option<&[String]>,
) -> Result<FeatureTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut header: Option<Vec<String>> = None;
    let mut picked: Option<(Vec<String>, Vec<usize>, usize)> = None;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if has_header && header.is_none() {
            header = Some(record.iter().map(str::to_string).collect());
            continue;
        }
        let (names, idx, width) = match &mut picked {
            Some(p) => p,
            None => {
                let width = header.as_ref().map_or(record.len(), Vec::len);
                let all: Vec<String> = header
                    .clone()
                    .unwrap_or_else(|| (0..width).map(|i| format!("f{i}")).collect());
                let idx = match select {
                    Some(wanted) => wanted
                        .iter()
                        .map(|w| {
                            all.iter()
                                .position(|n| n == w)
                                .ok_or_else(|| DataError::MissingColumn(w.clone()))
                        })
                        .collect::<Result<Vec<_>>>()?,
                    None => (0..width).collect(),
                };
                let names = idx.iter().map(|&i| all[i].clone()).collect();
                picked.insert((names, idx, width))
            }
        };
        if record.len() != *width {
            return Err(DataError::Arity {
                line,
                expected: *width,
                actual: record.len(),
            });
        }
        let values = idx
            .iter()
            .zip(names.iter())
            .map(|(&i, name)| match record[i].parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(DataError::Numeric {
                    line,
                    column: name.clone(),
                    value: record[i].to_string(),
                }),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(values);
    }
    match picked {
        Some((names, _, _)) if !rows.is_empty() => Ok(FeatureTable { names, rows }),
        _ => Err(DataError::Empty),
    }
}

fn drop_indices(names: &[String], drop: &[String]) -> Result<Vec<usize>> {
    drop.iter()
        .map(|d| {
            names
                .iter()
                .position(|n| n == d)
                .ok_or_else(|| DataError::UnknownFeature(d.clone()))
        })
        .collect()
}

fn keep<T: Clone>(values: &[T], dropped: &[usize]) -> Vec<T> {
    values
        .iter()
        .enumerate()
        .filter(|(i, _)| !dropped.contains(i))
        .map(|(_, v)| v.clone())
        .collect()
}

impl RawDataset {
    pub fn select_features(&self, drop: &[String]) -> Result<RawDataset> {
        let idx = drop_indices(&self.feature_names, drop)?;
        Ok(RawDataset {
            feature_names: keep(&self.feature_names, &idx),
            rows: self
                .rows
                .iter()
                .map(|r| RawRow {
                    values: keep(&r.values, &idx),
                    label: r.label,
                })
                .collect(),
        })
    }

    pub fn labels(&self) -> Vec<Label> {
        self.rows.iter().map(|r| r.label).collect()
    }
}

/// Per-feature min-max parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Normalization {
    pub fn fit(raw: &RawDataset) -> Self {
        let n = raw.feature_names.len();
        let mut min = vec![f64::INFINITY; n];
        let mut max = vec![f64::NEG_INFINITY; n];
        for row in &raw.rows {
            for (j, &v) in row.values.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Self { min, max }
    }

    /// `(x - min) / (max - min)`; constant features map to 0.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                let span = self.max[j] - self.min[j];
                if span > 0.0 {
                    (x - self.min[j]) / span
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn invert(&self, scaled: &[f64]) -> Vec<f64> {
        scaled
            .iter()
            .enumerate()
            .map(|(j, &x)| self.min[j] + x * (self.max[j] - self.min[j]))
            .collect()
    }

    fn select(&self, dropped: &[usize]) -> Self {
        Self {
            min: keep(&self.min, dropped),
            max: keep(&self.max, dropped),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Scaled to `[0, 1]`.
    pub features: Vec<f64>,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub samples: Vec<Sample>,
    pub normalization: Normalization,
}

/// Min-max scale every feature over the whole dataset.
pub fn normalize(raw: &RawDataset) -> Dataset {
    let normalization = Normalization::fit(raw);
    let samples = raw
        .rows
        .iter()
        .map(|r| Sample {
            features: normalization.apply(&r.values),
            label: r.label,
        })
        .collect();
    Dataset {
        feature_names: raw.feature_names.clone(),
        samples,
        normalization,
    }
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.feature_names.len()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// Drop the named columns.
    pub fn select_features(&self, drop: &[String]) -> Result<Dataset> {
        select_features(self, drop)
    }

    pub fn subset(&self, indices: &[usize]) -> Vec<Sample> {
        indices.iter().map(|&i| self.samples[i].clone()).collect()
    }
}

pub fn select_features(dataset: &Dataset, drop: &[String]) -> Result<Dataset> {
    let idx = drop_indices(&dataset.feature_names, drop)?;
    Ok(Dataset {
        feature_names: keep(&dataset.feature_names, &idx),
        samples: dataset
            .samples
            .iter()
            .map(|s| Sample {
                features: keep(&s.features, &idx),
                label: s.label,
            })
            .collect(),
        normalization: dataset.normalization.select(&idx),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCorrelation {
    pub name: String,
    /// Column position in the dataset.
    pub index: usize,
    /// Pearson correlation with the 0/1 label; 0 for constant features.
    pub pearson_r: f64,
    pub constant: bool,
    pub dropped: bool,
}

/// Features ranked by `|r|` descending, ties broken by column index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureReport {
    pub entries: Vec<FeatureCorrelation>,
}

impl FeatureReport {
    pub const CSV_HEADER: &'static str = "feature,pearson_r,abs_rank,dropped";

    pub fn mark_dropped(&mut self, names: &[String]) -> Result<()> {
        for name in names {
            let entry = self
                .entries
                .iter_mut()
                .find(|e| &e.name == name)
                .ok_or_else(|| DataError::UnknownFeature(name.clone()))?;
            entry.dropped = true;
        }
        Ok(())
    }

    /// Rank is 1-based.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for (rank, e) in self.entries.iter().enumerate() {
            let name = if e.name.contains([',', '"', '\n']) {
                format!("\"{}\"", e.name.replace('"', "\"\""))
            } else {
                e.name.clone()
            };
            let _ = writeln!(out, "{name},{:.12},{},{}", e.pearson_r, rank + 1, e.dropped);
        }
        out
    }
}

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn correlation_rank(dataset: &Dataset) -> Result<FeatureReport> {
    if dataset.len() < 2 {
        return Err(DataError::Statistics(
            "correlation needs at least two samples".into(),
        ));
    }
    let y: Vec<f64> = dataset.samples.iter().map(|s| s.label.target()).collect();
    if y.iter().all(|&v| v == y[0]) {
        return Err(DataError::Statistics("the label has only one class".into()));
    }
    let mut entries: Vec<FeatureCorrelation> = dataset
        .feature_names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let x: Vec<f64> = dataset.samples.iter().map(|s| s.features[j]).collect();
            let r = pearson(&x, &y);
            FeatureCorrelation {
                name: name.clone(),
                index: j,
                pearson_r: r.unwrap_or(0.0),
                constant: r.is_none(),
                dropped: false,
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        b.pearson_r
            .abs()
            .total_cmp(&a.pearson_r.abs())
            .then(a.index.cmp(&b.index))
    });
    Ok(FeatureReport { entries })
}

/// Assignment of every sample to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignment: Vec<usize>,
}

impl FoldPlan {
    pub const CSV_HEADER: &'static str = "sample_index,fold";

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }

    /// Per fold, `(pass, fail)` counts.
    pub fn class_counts(&self, labels: &[Label]) -> Vec<(usize, usize)> {
        let mut counts = vec![(0, 0); self.k];
        for (&f, &l) in self.assignment.iter().zip(labels) {
            match l {
                Label::Pass => counts[f].0 += 1,
                Label::Fail => counts[f].1 += 1,
            }
        }
        counts
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for (i, f) in self.assignment.iter().enumerate() {
            let _ = writeln!(out, "{i},{f}");
        }
        out
    }
}

pub fn stratified_folds(dataset: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    stratified_folds_for_labels(&dataset.labels(), k, seed)
}

/// Shuffle each class with the seed, then deal pass samples followed by
/// fail samples round-robin into the folds. The deal continues across the
/// class boundary, so fold sizes differ by at most one.
pub fn stratified_folds_for_labels(labels: &[Label], k: usize, seed: u64) -> Result<FoldPlan> {
    let mut pass: Vec<usize> = (0..labels.len()).filter(|&i| labels[i].is_pass()).collect();
    let mut fail: Vec<usize> = (0..labels.len())
        .filter(|&i| !labels[i].is_pass())
        .collect();
    let smallest = pass.len().min(fail.len());
    if k < 2 || k > smallest {
        return Err(DataError::Config(format!(
            "k = {k} folds needs 2 <= k <= smallest class size ({smallest})"
        )));
    }
    let mut rng = seed::stream(seed::derive_seed(seed, "folds", 0));
    pass.shuffle(&mut rng);
    fail.shuffle(&mut rng);

    let mut assignment = vec![0; labels.len()];
    for (turn, &index) in pass.iter().chain(&fail).enumerate() {
        assignment[index] = turn % k;
    }
    Ok(FoldPlan { k, assignment })
}
