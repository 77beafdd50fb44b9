//! Gradient-free training: wolf positions are flat weight vectors and the
//! fitness of a position is the network's Total MSE over the training set.
//!
//! Context lifecycle for recurrent networks:
//!
//! * at prediction time every sample is scored from a freshly reset state;
//! * during a fitness evaluation the default [`ContextPolicy::Reset`] does
//!   the same, so training and prediction see identical inputs.
//!   [`ContextPolicy::Carry`] instead starts at zero and carries contexts from
//!   one training sample to the next in a fixed order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::data::{Dataset, FoldPlan, Label, Sample};
use crate::metrics::{self, ConfusionMatrix, MetricSet, MetricsError};
use crate::network::{self, FlatWeights, Network, NetworkError, Topology};
use crate::optimizer::{self, ConvergenceTrace, GwoConfig, OptimizerError, SearchBox, Variant};
use crate::seed;

#[derive(Debug, Error)]
pub enum TrainingError {
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, TrainingError>;

/// Order in which training samples are fed during a fitness evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleOrder {
    #[default]
    DatasetOrder,
    /// Shuffle once with the training seed, then keep that order.
    SeededShuffleOnce,
}

impl fmt::Display for SampleOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SampleOrder::DatasetOrder => "dataset-order",
            SampleOrder::SeededShuffleOnce => "seeded-shuffle-once",
        })
    }
}

impl FromStr for SampleOrder {
    type Err = TrainingError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "dataset-order" => Ok(SampleOrder::DatasetOrder),
            "seeded-shuffle-once" => Ok(SampleOrder::SeededShuffleOnce),
            other => Err(TrainingError::Config(format!(
                "unknown sample order `{other}`"
            ))),
        }
    }
}

/// How recurrent contexts behave across the samples of one fitness pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContextPolicy {
    /// Every sample starts from a zero state, as in [`predict`].
    #[default]
    Reset,
    /// State carries from sample to sample; see [`fitness_of`].
    Carry,
}

impl fmt::Display for ContextPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContextPolicy::Reset => "reset",
            ContextPolicy::Carry => "carry",
        })
    }
}

impl FromStr for ContextPolicy {
    type Err = TrainingError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "reset" => Ok(ContextPolicy::Reset),
            "carry" => Ok(ContextPolicy::Carry),
            other => Err(TrainingError::Config(format!(
                "unknown context policy `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub topology: Topology,
    pub variant: Variant,
    pub agents: usize,
    pub iterations: usize,
    /// Search box for every weight.
    pub weight_bounds: SearchBox,
    pub order: SampleOrder,
    pub context: ContextPolicy,
    pub threshold: f64,
    pub seed: u64,
}

impl TrainConfig {
    /// 50 agents, 75 iterations, weights in `[-10, 10]`, threshold 0.5.
    pub fn new(topology: Topology, variant: Variant) -> Self {
        Self {
            topology,
            variant,
            agents: 50,
            iterations: 75,
            weight_bounds: SearchBox {
                lower: -10.0,
                upper: 10.0,
            },
            order: SampleOrder::DatasetOrder,
            context: ContextPolicy::Reset,
            threshold: 0.5,
            seed: 0,
        }
    }

    /// Optimizer settings; the dimension always matches the topology.
    pub fn gwo_config(&self) -> GwoConfig {
        GwoConfig {
            agents: self.agents,
            max_iterations: self.iterations,
            dimension: self.topology.dimension(),
            lower_bound: self.weight_bounds.lower,
            upper_bound: self.weight_bounds.upper,
            variant: self.variant,
            seed: seed::derive_seed(self.seed, "gwo", 0),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Total MSE over `samples`, contexts reset once and then carried from each
/// sample to the next.
pub fn fitness_of(network: &Network, weights: &[f64], samples: &[Sample]) -> Result<f64> {
    fitness_with(ContextPolicy::Carry, network, weights, samples)
}

pub fn fitness_with(
    policy: ContextPolicy,
    network: &Network,
    weights: &[f64],
    samples: &[Sample],
) -> Result<f64> {
    if weights.len() != network.dimension() {
        return Err(NetworkError::Layout {
            expected: network.dimension(),
            actual: weights.len(),
        }
        .into());
    }
    let mut state = network.reset_state();
    let mut per_sample = Vec::with_capacity(samples.len());
    for sample in samples {
        let (output, next) = network.forward(weights, &sample.features, &state)?;
        let targets = vec![sample.label.target(); output.len()];
        per_sample.push(network::mse(&output, &targets)?);
        if policy == ContextPolicy::Carry {
            state = next;
        }
    }
    Ok(network::total_mse(&per_sample)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub topology: Topology,
    pub weights: FlatWeights,
    pub threshold: f64,
    /// Total MSE of `weights` on the training set, in training order.
    pub training_mse: f64,
    #[serde(skip)]
    pub trace: ConvergenceTrace,
}

impl TrainedModel {
    pub fn network(&self) -> Result<Network> {
        Ok(Network::new(self.topology.clone())?)
    }
}

/// Training samples in the order fitness evaluation will see them.
pub fn training_order(config: &TrainConfig, samples: &[Sample]) -> Vec<Sample> {
    let mut ordered = samples.to_vec();
    if config.order == SampleOrder::SeededShuffleOnce {
        use rand::seq::SliceRandom;
        ordered.shuffle(&mut seed::stream(seed::derive_seed(
            config.seed,
            "order",
            0,
        )));
    }
    ordered
}

pub fn train(config: &TrainConfig, samples: &[Sample]) -> Result<TrainedModel> {
    if samples.is_empty() {
        return Err(TrainingError::Config("empty training set".into()));
    }
    if !samples.iter().any(|s| s.label.is_pass()) || samples.iter().all(|s| s.label.is_pass()) {
        return Err(TrainingError::Config(
            "the training set must contain both classes".into(),
        ));
    }
    let width = config.topology.inputs;
    if let Some(s) = samples.iter().find(|s| s.features.len() != width) {
        return Err(NetworkError::Shape {
            what: "sample features",
            expected: width,
            actual: s.features.len(),
        }
        .into());
    }

    let network = Network::new(config.topology.clone())?;
    let ordered = training_order(config, samples);
    // shapes are checked above; anything left is a non-finite fitness
    let objective =
        |w: &[f64]| fitness_with(config.context, &network, w, &ordered).unwrap_or(f64::NAN);
    let optimum = optimizer::optimize(&config.gwo_config(), objective)?;

    Ok(TrainedModel {
        topology: config.topology.clone(),
        weights: FlatWeights::new(optimum.position)?,
        threshold: config.threshold,
        training_mse: optimum.fitness,
        trace: optimum.trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub score: f64,
    pub class: Label,
}

/// Score a single sample from a reset state. `score >= threshold` is pass.
pub fn predict(model: &TrainedModel, features: &[f64]) -> Result<Prediction> {
    let network = model.network()?;
    predict_with(&network, model, features)
}

fn predict_with(network: &Network, model: &TrainedModel, features: &[f64]) -> Result<Prediction> {
    let (output, _) =
        network.forward(model.weights.as_slice(), features, &network.reset_state())?;
    let score = output[0];
    Ok(Prediction {
        score,
        class: if score >= model.threshold {
            Label::Pass
        } else {
            Label::Fail
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// Mean per-sample MSE, each sample scored from a reset state.
    pub mse: f64,
    /// Fraction classified correctly.
    pub rate: f64,
    pub confusion: ConfusionMatrix,
    pub scores: Vec<f64>,
    pub labels: Vec<Label>,
}

pub fn evaluate(model: &TrainedModel, samples: &[Sample]) -> Result<Evaluation> {
    if samples.is_empty() {
        return Err(TrainingError::Config("empty evaluation set".into()));
    }
    let network = model.network()?;
    let mut scores = Vec::with_capacity(samples.len());
    let mut errors = Vec::with_capacity(samples.len());
    for s in samples {
        let p = predict_with(&network, model, &s.features)?;
        errors.push((p.score - s.label.target()).powi(2));
        scores.push(p.score);
    }
    let labels: Vec<Label> = samples.iter().map(|s| s.label).collect();
    let confusion = metrics::confusion(&scores, &labels, model.threshold)?;
    Ok(Evaluation {
        mse: network::total_mse(&errors)?,
        rate: confusion.correct() as f64 / confusion.total() as f64,
        confusion,
        scores,
        labels,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSample {
    pub sample_index: usize,
    pub label: Label,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    /// 1-based.
    pub fold_no: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub train_mse: f64,
    pub train_rate: f64,
    pub test_mse: f64,
    pub test_rate: f64,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricSet,
    /// `None` when the test fold holds a single class.
    pub auc: Option<f64>,
    pub scores: Vec<ScoredSample>,
    #[serde(skip)]
    pub trace: ConvergenceTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldAverages {
    pub train_mse: f64,
    pub train_rate: f64,
    pub test_mse: f64,
    pub test_rate: f64,
    pub metrics: MetricSet,
    pub auc: Option<f64>,
    /// Confusion counts summed over folds.
    pub confusion: ConfusionMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub folds: Vec<FoldResult>,
    pub averages: FoldAverages,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn run_fold(
    config: &TrainConfig,
    dataset: &Dataset,
    plan: &FoldPlan,
    fold: usize,
) -> Result<FoldResult> {
    let train_idx = plan.train_indices(fold);
    let test_idx = plan.test_indices(fold);
    let train_set = dataset.subset(&train_idx);
    let test_set = dataset.subset(&test_idx);

    let fold_config = config
        .clone()
        .with_seed(seed::derive_seed(config.seed, "fold", fold as u64));
    let model = train(&fold_config, &train_set)?;
    let train_eval = evaluate(&model, &train_set)?;
    let test_eval = evaluate(&model, &test_set)?;
    let auc = match metrics::roc(&test_eval.scores, &test_eval.labels) {
        Ok(curve) => Some(curve.auc),
        Err(MetricsError::SingleClass) => None,
        Err(e) => return Err(e.into()),
    };

    Ok(FoldResult {
        fold_no: fold + 1,
        train_size: train_idx.len(),
        test_size: test_idx.len(),
        train_mse: model.training_mse,
        train_rate: train_eval.rate,
        test_mse: test_eval.mse,
        test_rate: test_eval.rate,
        confusion: test_eval.confusion,
        metrics: metrics::derived_metrics(&test_eval.confusion),
        auc,
        scores: test_idx
            .iter()
            .zip(&test_eval.scores)
            .map(|(&i, &score)| ScoredSample {
                sample_index: i,
                label: dataset.samples[i].label,
                score,
            })
            .collect(),
        trace: model.trace,
    })
}

/// Train on all folds but one, test on the held-out fold, for every fold.
///
/// Folds run concurrently, each from a seed derived from the master seed
/// and its index, so results do not depend on scheduling.
pub fn cross_validate(
    config: &TrainConfig,
    dataset: &Dataset,
    plan: &FoldPlan,
) -> Result<CrossValidation> {
    if plan.len() != dataset.len() {
        return Err(TrainingError::Config(format!(
            "fold plan covers {} samples, dataset has {}",
            plan.len(),
            dataset.len()
        )));
    }
    if dataset.feature_count() != config.topology.inputs {
        return Err(TrainingError::Config(format!(
            "dataset has {} features, topology expects {}",
            dataset.feature_count(),
            config.topology.inputs
        )));
    }
    let folds: Vec<FoldResult> = (0..plan.k)
        .into_par_iter()
        .map(|f| run_fold(config, dataset, plan, f))
        .collect::<Result<_>>()?;

    let aucs: Vec<f64> = folds.iter().filter_map(|f| f.auc).collect();
    let averages = FoldAverages {
        train_mse: mean(folds.iter().map(|f| f.train_mse)),
        train_rate: mean(folds.iter().map(|f| f.train_rate)),
        test_mse: mean(folds.iter().map(|f| f.test_mse)),
        test_rate: mean(folds.iter().map(|f| f.test_rate)),
        metrics: MetricSet::mean(&folds.iter().map(|f| f.metrics).collect::<Vec<_>>()),
        auc: (!aucs.is_empty()).then(|| mean(aucs.iter().copied())),
        confusion: folds
            .iter()
            .fold(ConfusionMatrix::default(), |acc, f| acc + f.confusion),
    };
    Ok(CrossValidation { folds, averages })
}

impl CrossValidation {
    /// ROC over the held-out scores of every fold.
    pub fn pooled_roc(&self) -> Result<metrics::RocCurve> {
        let (scores, labels): (Vec<f64>, Vec<Label>) = self
            .folds
            .iter()
            .flat_map(|f| f.scores.iter().map(|s| (s.score, s.label)))
            .unzip();
        Ok(metrics::roc(&scores, &labels)?)
    }
}

/// The six GWO-trained models compared against each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelPreset {
    MRnnGwo,
    RnnGwo,
    MMlpGwo,
    MlpGwo,
    MCmlpGwo,
    CmlpGwo,
}

impl ModelPreset {
    pub const ALL: [ModelPreset; 6] = [
        ModelPreset::MRnnGwo,
        ModelPreset::RnnGwo,
        ModelPreset::MMlpGwo,
        ModelPreset::MlpGwo,
        ModelPreset::MCmlpGwo,
        ModelPreset::CmlpGwo,
    ];

    /// Hidden units for the single-layer baselines.
    pub const BASELINE_HIDDEN: usize = 26;

    pub fn name(self) -> &'static str {
        match self {
            ModelPreset::MRnnGwo => "mrnngwo",
            ModelPreset::RnnGwo => "rnngwo",
            ModelPreset::MMlpGwo => "mmlpgwo",
            ModelPreset::MlpGwo => "mlpgwo",
            ModelPreset::MCmlpGwo => "mcmlpgwo",
            ModelPreset::CmlpGwo => "cmlpgwo",
        }
    }

    pub fn variant(self) -> Variant {
        match self {
            ModelPreset::MRnnGwo | ModelPreset::MMlpGwo | ModelPreset::MCmlpGwo => {
                Variant::Modified
            }
            ModelPreset::RnnGwo | ModelPreset::MlpGwo | ModelPreset::CmlpGwo => Variant::Standard,
        }
    }

    /// `inputs,10-10,10-10,1` for the recurrent models, `inputs,26,1` otherwise.
    pub fn topology(self, inputs: usize) -> Result<Topology> {
        Ok(match self {
            ModelPreset::MRnnGwo | ModelPreset::RnnGwo => Topology::mrnn(inputs, 10, 10, 1)?,
            ModelPreset::MMlpGwo | ModelPreset::MlpGwo => {
                Topology::mlp(inputs, Self::BASELINE_HIDDEN, 1)?
            }
            ModelPreset::MCmlpGwo | ModelPreset::CmlpGwo => {
                Topology::cmlp(inputs, Self::BASELINE_HIDDEN, 1)?
            }
        })
    }

    pub fn train_config(self, inputs: usize) -> Result<TrainConfig> {
        Ok(TrainConfig::new(self.topology(inputs)?, self.variant()))
    }
}

impl fmt::Display for ModelPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelPreset {
    type Err = TrainingError;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        ModelPreset::ALL
            .into_iter()
            .find(|m| m.name() == wanted)
            .ok_or_else(|| TrainingError::Config(format!("unknown model `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model_name: String,
    pub connections: usize,
    pub mean_test_accuracy: f64,
    pub mean_auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// Sorted by accuracy, best first; ties keep suite order.
    pub rows: Vec<ComparisonRow>,
    #[serde(skip)]
    pub runs: Vec<(String, CrossValidation)>,
}

impl Comparison {
    /// Fixed-width text table.
    pub fn render(&self) -> String {
        let mut out = format!(
            "{:<10} {:>11} {:>10} {:>8}\n",
            "model", "connections", "accuracy", "auc"
        );
        for r in &self.rows {
            let auc = r
                .mean_auc
                .map_or_else(|| "-".to_string(), |a| format!("{a:.4}"));
            out.push_str(&format!(
                "{:<10} {:>11} {:>9.2}% {:>8}\n",
                r.model_name,
                r.connections,
                r.mean_test_accuracy * 100.0,
                auc
            ));
        }
        out
    }
}

/// Cross-validate every configuration on the same folds and tabulate.
pub fn compare_models(
    dataset: &Dataset,
    plan: &FoldPlan,
    suite: &[(String, TrainConfig)],
) -> Result<Comparison> {
    let mut runs = Vec::with_capacity(suite.len());
    for (name, config) in suite {
        runs.push((name.clone(), cross_validate(config, dataset, plan)?));
    }
    let mut rows: Vec<ComparisonRow> = suite
        .iter()
        .zip(&runs)
        .map(|((name, config), (_, cv))| ComparisonRow {
            model_name: name.clone(),
            connections: config.topology.dimension(),
            mean_test_accuracy: cv.averages.test_rate,
            mean_auc: cv.averages.auc,
        })
        .collect();
    rows.sort_by(|a, b| b.mean_test_accuracy.total_cmp(&a.mean_test_accuracy));
    Ok(Comparison { rows, runs })
}
