//! Confusion-matrix statistics and non-parametric ROC/AUC.
//!
//! Pass is the positive class and a sample is predicted pass when its
//! score is `>= threshold`.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

use crate::data::Label;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("{scores} scores but {labels} labels")]
    Length { scores: usize, labels: usize },
    #[error("no samples to evaluate")]
    Empty,
    #[error("ROC is undefined without both classes")]
    SingleClass,
    #[error("score {0} is not finite")]
    NonFinite(f64),
}

pub type Result<T> = std::result::Result<T, MetricsError>;

fn check_inputs(scores: &[f64], labels: &[Label]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(MetricsError::Length {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    if scores.is_empty() {
        return Err(MetricsError::Empty);
    }
    if let Some(&s) = scores.iter().find(|s| !s.is_finite()) {
        return Err(MetricsError::NonFinite(s));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    #[serde(rename = "tp")]
    pub true_positives: usize,
    #[serde(rename = "fn")]
    pub false_negatives: usize,
    #[serde(rename = "fp")]
    pub false_positives: usize,
    #[serde(rename = "tn")]
    pub true_negatives: usize,
}

impl ConfusionMatrix {
    pub fn new(tp: usize, fn_: usize, fp: usize, tn: usize) -> Self {
        Self {
            true_positives: tp,
            false_negatives: fn_,
            false_positives: fp,
            true_negatives: tn,
        }
    }

    pub fn total(&self) -> usize {
        self.true_positives + self.false_negatives + self.false_positives + self.true_negatives
    }

    pub fn correct(&self) -> usize {
        self.true_positives + self.true_negatives
    }

    pub fn record(&mut self, predicted: Label, actual: Label) {
        match (predicted, actual) {
            (Label::Pass, Label::Pass) => self.true_positives += 1,
            (Label::Fail, Label::Pass) => self.false_negatives += 1,
            (Label::Pass, Label::Fail) => self.false_positives += 1,
            (Label::Fail, Label::Fail) => self.true_negatives += 1,
        }
    }
}

impl std::ops::Add for ConfusionMatrix {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(
            self.true_positives + o.true_positives,
            self.false_negatives + o.false_negatives,
            self.false_positives + o.false_positives,
            self.true_negatives + o.true_negatives,
        )
    }
}

pub fn confusion(scores: &[f64], labels: &[Label], threshold: f64) -> Result<ConfusionMatrix> {
    check_inputs(scores, labels)?;
    let mut cm = ConfusionMatrix::default();
    for (&s, &l) in scores.iter().zip(labels) {
        let predicted = if s >= threshold {
            Label::Pass
        } else {
            Label::Fail
        };
        cm.record(predicted, l);
    }
    Ok(cm)
}

/// The five ratios; `None` marks a zero denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub ppv: Option<f64>,
    pub npv: Option<f64>,
    pub accuracy: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn derived_metrics(cm: &ConfusionMatrix) -> MetricSet {
    let (tp, fn_, fp, tn) = (
        cm.true_positives,
        cm.false_negatives,
        cm.false_positives,
        cm.true_negatives,
    );
    MetricSet {
        sensitivity: ratio(tp, tp + fn_),
        specificity: ratio(tn, tn + fp),
        ppv: ratio(tp, tp + fp),
        npv: ratio(tn, tn + fn_),
        accuracy: ratio(tp + tn, cm.total()),
    }
}

impl MetricSet {
    /// Field-wise mean over the sets where the field is defined.
    pub fn mean(sets: &[MetricSet]) -> MetricSet {
        fn avg(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
            let defined: Vec<f64> = values.flatten().collect();
            (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
        }
        MetricSet {
            sensitivity: avg(sets.iter().map(|m| m.sensitivity)),
            specificity: avg(sets.iter().map(|m| m.specificity)),
            ppv: avg(sets.iter().map(|m| m.ppv)),
            npv: avg(sets.iter().map(|m| m.npv)),
            accuracy: avg(sets.iter().map(|m| m.accuracy)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// `+inf` for the leading (0, 0) sentinel.
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// From (0, 0) to (1, 1), sorted by threshold descending.
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

impl RocCurve {
    pub const CSV_HEADER: &'static str = "threshold,fpr,tpr";

    /// Points, then a closing `auc,<value>` line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            let threshold = if p.threshold.is_infinite() {
                "inf".to_string()
            } else {
                format!("{:.12e}", p.threshold)
            };
            let _ = writeln!(out, "{threshold},{:.12},{:.12}", p.fpr, p.tpr);
        }
        let _ = writeln!(out, "auc,{:.12}", self.auc);
        out
    }
}

/// Sum of trapezoids under a polyline of `(fpr, tpr)` points.
pub fn trapezoid_area(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum()
}

/// Sweep every distinct score as a threshold, highest first.
///
/// Samples sharing a score enter together, so ties become one diagonal
/// step and contribute half credit to the area.
pub fn roc(scores: &[f64], labels: &[Label]) -> Result<RocCurve> {
    check_inputs(scores, labels)?;
    let positives = labels.iter().filter(|l| l.is_pass()).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(MetricsError::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if labels[order[i]].is_pass() {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold,
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
        });
    }
    let auc = trapezoid_area(&points);
    Ok(RocCurve { points, auc })
}

/// Probability that a random positive outscores a random negative, by
/// exhaustive pair count (ties count one half).
pub fn auc_pairwise_oracle(scores: &[f64], labels: &[Label]) -> Result<f64> {
    check_inputs(scores, labels)?;
    let pos: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, l)| l.is_pass())
        .map(|(s, _)| *s)
        .collect();
    let neg: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, l)| !l.is_pass())
        .map(|(s, _)| *s)
        .collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(MetricsError::SingleClass);
    }
    let mut wins = 0.0;
    for p in &pos {
        for n in &neg {
            if p > n {
                wins += 1.0;
            } else if p == n {
                wins += 0.5;
            }
        }
    }
    Ok(wins / (pos.len() * neg.len()) as f64)
}
