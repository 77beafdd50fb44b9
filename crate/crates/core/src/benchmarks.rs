//! Classic test functions for validating the optimizer. All have their
//! global minimum value 0.

use std::fmt;
use std::str::FromStr;

use crate::optimizer::{OptimizerError, SearchBox};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestFunction {
    Sphere,
    Rastrigin,
    Rosenbrock,
}

impl TestFunction {
    pub const ALL: [TestFunction; 3] = [
        TestFunction::Sphere,
        TestFunction::Rastrigin,
        TestFunction::Rosenbrock,
    ];

    pub fn evaluate(self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Sphere => sphere(x),
            TestFunction::Rastrigin => rastrigin(x),
            TestFunction::Rosenbrock => rosenbrock(x),
        }
    }

    /// Conventional search box.
    pub fn default_box(self) -> SearchBox {
        let (lower, upper) = match self {
            TestFunction::Sphere => (-5.0, 5.0),
            TestFunction::Rastrigin => (-5.12, 5.12),
            TestFunction::Rosenbrock => (-5.0, 10.0),
        };
        SearchBox { lower, upper }
    }

    pub fn minimizer(self, d: usize) -> Vec<f64> {
        match self {
            TestFunction::Sphere | TestFunction::Rastrigin => vec![0.0; d],
            TestFunction::Rosenbrock => vec![1.0; d],
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestFunction::Sphere => "sphere",
            TestFunction::Rastrigin => "rastrigin",
            TestFunction::Rosenbrock => "rosenbrock",
        })
    }
}

impl FromStr for TestFunction {
    type Err = OptimizerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TestFunction::ALL
            .into_iter()
            .find(|f| f.to_string() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| OptimizerError::Config(format!("unknown test function `{s}`")))
    }
}

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn rastrigin(x: &[f64]) -> f64 {
    use std::f64::consts::TAU;
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (TAU * v).cos())
            .sum::<f64>()
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}
