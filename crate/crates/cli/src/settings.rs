//! Run settings: command-line flags over a `key = value` config file over
//! built-in defaults. The resolved settings are written back out as a run
//! manifest that replays the run when passed to `--config`.

use anyhow::{anyhow, bail, Context, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use wolfnet::benchmarks::TestFunction;
use wolfnet::data::ColumnRef;
use wolfnet::training::{ContextPolicy, SampleOrder};

use crate::cli::{Command, Overrides};

pub const SEED_ENV: &str = "WOLFNET_SEED";

const KEYS: &[&str] = &[
    "command",
    "data",
    "model",
    "model_file",
    "folds",
    "agents",
    "iterations",
    "seed",
    "out",
    "jobs",
    "threshold",
    "drop",
    "context",
    "order",
    "label",
    "header",
    "function",
    "dimension",
    "seeds",
    "variant",
];

/// Parsed config file, keys normalized to snake case.
#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", n + 1))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown key `{key}`", n + 1);
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: std::str::FromStr,
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| anyhow!("config key `{key}`: {e}"))
            })
            .transpose()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub command: Command,
    pub data: Option<PathBuf>,
    pub model: Option<String>,
    pub model_file: Option<PathBuf>,
    pub folds: usize,
    pub agents: usize,
    pub iterations: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub jobs: usize,
    /// `None` keeps the threshold stored in a model file.
    pub threshold: Option<f64>,
    pub drop: Vec<String>,
    pub context: ContextPolicy,
    pub order: SampleOrder,
    pub label: ColumnRef,
    pub header: bool,
    pub function: TestFunction,
    pub dimension: usize,
    pub seeds: usize,
    pub variant: BenchVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchVariant {
    Standard,
    Modified,
    Both,
}

impl std::str::FromStr for BenchVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "standard" => Ok(BenchVariant::Standard),
            "modified" => Ok(BenchVariant::Modified),
            "both" => Ok(BenchVariant::Both),
            other => Err(format!(
                "unknown variant `{other}` (standard, modified, both)"
            )),
        }
    }
}

impl std::fmt::Display for BenchVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BenchVariant::Standard => "standard",
            BenchVariant::Modified => "modified",
            BenchVariant::Both => "both",
        })
    }
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect()
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => bail!("`{other}` is not a boolean"),
    }
}

impl Settings {
    pub fn resolve(command: Command, flags: &Overrides, env_seed: Option<String>) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        if let Some(recorded) = file.get("command") {
            if recorded != command.name() {
                bail!(
                    "config was recorded for `{recorded}`, not `{}`",
                    command.name()
                );
            }
        }

        let bench = command == Command::BenchOptimizer;
        let env_seed = env_seed
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| anyhow!("{SEED_ENV} must be an unsigned integer, got `{s}`"))
            })
            .transpose()?;

        Ok(Settings {
            command,
            data: flags.data.clone().or(file.get("data").map(PathBuf::from)),
            model: flags
                .model
                .clone()
                .or(file.get("model").map(str::to_string)),
            model_file: flags
                .model_file
                .clone()
                .or(file.get("model_file").map(PathBuf::from)),
            folds: flags.folds.or(file.parsed("folds")?).unwrap_or(5),
            agents: flags
                .agents
                .or(file.parsed("agents")?)
                .unwrap_or(if bench { 30 } else { 50 }),
            iterations: flags
                .iterations
                .or(file.parsed("iterations")?)
                .unwrap_or(if bench { 500 } else { 75 }),
            seed: flags
                .seed
                .or(file.parsed("seed")?)
                .or(env_seed)
                .unwrap_or(0),
            out: flags
                .out
                .clone()
                .or(file.get("out").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("wolfnet-out")),
            jobs: flags.jobs.or(file.parsed("jobs")?).unwrap_or(0),
            threshold: match flags.threshold.or(file.parsed("threshold")?) {
                Some(t) => Some(t),
                None if command == Command::Predict => None,
                None => Some(0.5),
            },
            drop: match (&flags.drop, file.get("drop")) {
                (Some(d), _) => split_list(d),
                (None, Some(d)) => split_list(d),
                (None, None) => Vec::new(),
            },
            context: flags
                .context
                .or(file.parsed("context")?)
                .unwrap_or_default(),
            order: flags.order.or(file.parsed("order")?).unwrap_or_default(),
            label: flags
                .label
                .clone()
                .or(file.parsed("label")?)
                .unwrap_or(ColumnRef::Last),
            header: match (flags.no_header, file.get("header")) {
                (true, _) => false,
                (false, Some(h)) => parse_bool(h).context("config key `header`")?,
                (false, None) => true,
            },
            function: flags
                .function
                .or(file.parsed("function")?)
                .unwrap_or(TestFunction::Sphere),
            dimension: flags.dimension.or(file.parsed("dimension")?).unwrap_or(10),
            seeds: flags.seeds.or(file.parsed("seeds")?).unwrap_or(10),
            variant: flags
                .variant
                .or(file.parsed("variant")?)
                .unwrap_or(BenchVariant::Both),
        })
    }

    pub fn require_data(&self) -> Result<&Path> {
        self.data
            .as_deref()
            .ok_or_else(|| anyhow!("no dataset given; pass --data <path>"))
    }

    /// Settings that affect this command's output, as a replayable config.
    pub fn manifest(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("command", &self.command.name());
        let data = self.data.as_ref().map(|p| p.display().to_string());
        match self.command {
            Command::BenchOptimizer => {
                put("function", &self.function);
                put("dimension", &self.dimension);
                put("variant", &self.variant);
                put("agents", &self.agents);
                put("iterations", &self.iterations);
                put("seeds", &self.seeds);
                put("seed", &self.seed);
            }
            Command::RankFeatures => {
                put("data", &data.unwrap_or_default());
                put("label", &self.label);
                put("header", &self.header);
                put("drop", &self.drop.join(","));
            }
            Command::Predict => {
                put("data", &data.unwrap_or_default());
                put("header", &self.header);
                let file = self.model_file.as_ref().map(|p| p.display().to_string());
                put("model_file", &file.unwrap_or_default());
                if let Some(t) = self.threshold {
                    put("threshold", &format!("{t:?}"));
                }
            }
            Command::Crossval | Command::Compare | Command::Train => {
                put("data", &data.unwrap_or_default());
                put("label", &self.label);
                put("header", &self.header);
                put("drop", &self.drop.join(","));
                if let Some(m) = &self.model {
                    put("model", m);
                }
                if self.command != Command::Train {
                    put("folds", &self.folds);
                }
                put("agents", &self.agents);
                put("iterations", &self.iterations);
                put("seed", &self.seed);
                put("threshold", &format!("{:?}", self.threshold.unwrap_or(0.5)));
                put("context", &self.context);
                put("order", &self.order);
            }
        }
        put("out", &self.out.display());
        put("jobs", &self.jobs);
        out
    }
}
