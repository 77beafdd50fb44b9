//! Gradient-free training of small neural networks with the Grey Wolf
//! Optimizer.
//!
//! The crate is organized bottom-up:
//!
//! * [`optimizer`]: standard and four-leader grey wolf optimizers over any
//!   box-constrained minimization objective;
//! * [`network`]: dual-context recurrent network, MLP and cascade MLP,
//!   all evaluated from a flat weight vector;
//! * [`training`]: Total-MSE fitness, cross-validation and model comparison;
//! * [`data`]: CSV loading, min-max scaling, correlation ranking and
//!   stratified folds;
//! * [`metrics`]: confusion matrices, derived rates and ROC/AUC;
//! * [`persist`]: the text model format.
//!
//! The guide in `book/` walks through each layer with runnable snippets.
//!
//! ```
//! use wolfnet::optimizer::{optimize, GwoConfig, Variant};
//!
//! let mut config = GwoConfig::new(3, Variant::Modified);
//! config.lower_bound = -5.0;
//! config.upper_bound = 5.0;
//! config.agents = 20;
//! config.max_iterations = 200;
//! let best = optimize(&config, |x| x.iter().map(|v| v * v).sum()).unwrap();
//! assert!(best.fitness < 1e-6);
//! ```

pub mod benchmarks;
pub mod data;
pub mod metrics;
pub mod network;
pub mod optimizer;
pub mod persist;
pub mod seed;
pub mod training;

pub use data::{Dataset, FoldPlan, Label, Sample};
pub use metrics::{ConfusionMatrix, MetricSet, RocCurve};
pub use network::{Network, Topology};
pub use optimizer::{GwoConfig, Variant};
pub use training::{ContextPolicy, ModelPreset, TrainConfig, TrainedModel};

// Compile and run the guide's code blocks as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/optimizer.md")]
    struct Optimizer;
    #[doc = include_str!("../../../book/src/network.md")]
    struct Network;
    #[doc = include_str!("../../../book/src/training.md")]
    struct Training;
    #[doc = include_str!("../../../book/src/data.md")]
    struct Data;
    #[doc = include_str!("../../../book/src/metrics.md")]
    struct Metrics;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
