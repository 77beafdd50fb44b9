use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use std::fmt::Write as _;

use wolfnet::data::{
    correlation_rank, load_csv, load_features, normalize, stratified_folds, CsvSchema, DataError,
    Dataset, Label,
};
use wolfnet::metrics::derived_metrics;
use wolfnet::optimizer::{optimize, GwoConfig, Variant};
use wolfnet::persist::ModelFile;
use wolfnet::seed::derive_seed;
use wolfnet::training::{
    compare_models, cross_validate, evaluate, predict, train, CrossValidation, ModelPreset,
    TrainConfig,
};

use crate::output::OutDir;
use crate::settings::{BenchVariant, Settings};

fn load_raw(s: &Settings) -> Result<wolfnet::data::RawDataset> {
    let path = s.require_data()?;
    let schema = CsvSchema {
        has_header: s.header,
        label_column: s.label.clone(),
        ..CsvSchema::default()
    };
    load_csv(path, &schema).map_err(|e| with_path(e, path))
}

/// Prefix the file name unless the error already names it.
fn with_path(e: DataError, path: &std::path::Path) -> anyhow::Error {
    match e {
        DataError::Io { .. } => e.into(),
        other => anyhow!("{}: {other}", path.display()),
    }
}

fn load_dataset(s: &Settings) -> Result<Dataset> {
    let raw = load_raw(s)?.select_features(&s.drop)?;
    Ok(normalize(&raw))
}

fn presets(s: &Settings, default_all: bool) -> Result<Vec<ModelPreset>> {
    match &s.model {
        Some(list) => list
            .split(',')
            .filter(|m| !m.trim().is_empty())
            .map(|m| m.parse::<ModelPreset>().map_err(Into::into))
            .collect(),
        None if default_all => Ok(ModelPreset::ALL.to_vec()),
        None => Ok(vec![ModelPreset::MRnnGwo]),
    }
}

fn train_config(s: &Settings, preset: ModelPreset, inputs: usize) -> Result<TrainConfig> {
    let mut cfg = preset.train_config(inputs)?.with_seed(s.seed);
    cfg.agents = s.agents;
    cfg.iterations = s.iterations;
    cfg.threshold = s.threshold.unwrap_or(0.5);
    cfg.context = s.context;
    cfg.order = s.order;
    cfg.gwo_config().validate()?;
    Ok(cfg)
}

fn pct(v: f64) -> String {
    format!("{:.2}%", v * 100.0)
}

pub fn rank_features(s: &Settings, out: &OutDir) -> Result<String> {
    let ds = normalize(&load_raw(s)?);
    let mut report = correlation_rank(&ds)?;
    report.mark_dropped(&s.drop)?;
    out.write("feature_ranking.csv", report.to_csv())?;

    let mut text = format!("{:>4}  {:>9}  feature\n", "rank", "r");
    for (i, e) in report.entries.iter().enumerate() {
        let mark = if e.dropped { "  (dropped)" } else { "" };
        let _ = writeln!(text, "{:>4}  {:>9.4}  {}{mark}", i + 1, e.pearson_r, e.name);
    }
    Ok(text)
}

fn write_crossval(out: &OutDir, prefix: &str, cv: &CrossValidation) -> Result<()> {
    out.write_json(&format!("{prefix}crossval.json"), cv)?;
    for f in &cv.folds {
        out.write(
            &format!("{prefix}trace_fold{}.csv", f.fold_no),
            f.trace.to_csv(),
        )?;
        let (scores, labels): (Vec<f64>, Vec<Label>) =
            f.scores.iter().map(|x| (x.score, x.label)).unzip();
        if let Ok(curve) = wolfnet::metrics::roc(&scores, &labels) {
            out.write(
                &format!("{prefix}roc_fold{}.csv", f.fold_no),
                curve.to_csv(),
            )?;
        }
    }
    if let Ok(curve) = cv.pooled_roc() {
        out.write(&format!("{prefix}roc_pooled.csv"), curve.to_csv())?;
    }
    Ok(())
}

fn fold_table(cv: &CrossValidation) -> String {
    let mut text = format!(
        "{:>4} {:>10} {:>9} {:>10} {:>9} {:>16}\n",
        "fold", "train_mse", "train", "test_mse", "test", "tp/fn/fp/tn"
    );
    for f in &cv.folds {
        let c = f.confusion;
        let _ = writeln!(
            text,
            "{:>4} {:>10.6} {:>9} {:>10.6} {:>9} {:>16}",
            f.fold_no,
            f.train_mse,
            pct(f.train_rate),
            f.test_mse,
            pct(f.test_rate),
            format!(
                "{}/{}/{}/{}",
                c.true_positives, c.false_negatives, c.false_positives, c.true_negatives
            )
        );
    }
    let a = &cv.averages;
    let _ = writeln!(
        text,
        "{:>4} {:>10.6} {:>9} {:>10.6} {:>9}",
        "mean",
        a.train_mse,
        pct(a.train_rate),
        a.test_mse,
        pct(a.test_rate)
    );
    if let Some(auc) = a.auc {
        let _ = writeln!(text, "mean auc {auc:.4}");
    }
    text
}

pub fn crossval(s: &Settings, out: &OutDir) -> Result<String> {
    let preset = match presets(s, false)?.as_slice() {
        [one] => *one,
        _ => bail!("crossval takes a single --model"),
    };
    let ds = load_dataset(s)?;
    let plan = stratified_folds(&ds, s.folds, derive_seed(s.seed, "folds", 0))?;
    let cfg = train_config(s, preset, ds.feature_count())?;
    let cv = cross_validate(&cfg, &ds, &plan)?;
    out.write("fold_plan.csv", plan.to_csv())?;
    write_crossval(out, "", &cv)?;
    Ok(format!(
        "{} ({})\n{}",
        preset,
        cfg.topology,
        fold_table(&cv)
    ))
}

pub fn compare(s: &Settings, out: &OutDir) -> Result<String> {
    let ds = load_dataset(s)?;
    let plan = stratified_folds(&ds, s.folds, derive_seed(s.seed, "folds", 0))?;
    let suite = presets(s, true)?
        .into_iter()
        .map(|p| {
            Ok((
                p.name().to_string(),
                train_config(s, p, ds.feature_count())?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let table = compare_models(&ds, &plan, &suite)?;
    out.write("fold_plan.csv", plan.to_csv())?;
    out.write_json("comparison.json", &table)?;
    let text = table.render();
    out.write("comparison.txt", &text)?;
    for (name, cv) in &table.runs {
        write_crossval(out, &format!("{name}_"), cv)?;
    }
    Ok(text)
}

#[derive(Debug, Serialize)]
struct BenchRun {
    run: usize,
    seed: u64,
    final_fitness: f64,
}

#[derive(Debug, Serialize)]
struct BenchSummary {
    function: String,
    variant: String,
    dimension: usize,
    agents: usize,
    iterations: usize,
    runs: Vec<BenchRun>,
    median_final_fitness: f64,
    best_final_fitness: f64,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

pub fn bench_optimizer(s: &Settings, out: &OutDir) -> Result<String> {
    if s.seeds == 0 {
        bail!("--seeds must be at least 1");
    }
    let variants: &[Variant] = match s.variant {
        BenchVariant::Standard => &[Variant::Standard],
        BenchVariant::Modified => &[Variant::Modified],
        BenchVariant::Both => &[Variant::Standard, Variant::Modified],
    };
    let bounds = s.function.default_box();
    let mut summaries = Vec::new();
    for &variant in variants {
        let mut runs = Vec::new();
        for run in 0..s.seeds {
            let seed = derive_seed(s.seed, "bench", run as u64);
            let cfg = GwoConfig {
                agents: s.agents,
                max_iterations: s.iterations,
                dimension: s.dimension,
                lower_bound: bounds.lower,
                upper_bound: bounds.upper,
                variant,
                seed,
            };
            let f = s.function;
            let opt = optimize(&cfg, |x| f.evaluate(x))?;
            out.write(&format!("trace_{variant}_{run}.csv"), opt.trace.to_csv())?;
            runs.push(BenchRun {
                run,
                seed,
                final_fitness: opt.fitness,
            });
        }
        let finals: Vec<f64> = runs.iter().map(|r| r.final_fitness).collect();
        summaries.push(BenchSummary {
            function: s.function.to_string(),
            variant: variant.to_string(),
            dimension: s.dimension,
            agents: s.agents,
            iterations: s.iterations,
            median_final_fitness: median(&finals),
            best_final_fitness: finals.iter().copied().fold(f64::INFINITY, f64::min),
            runs,
        });
    }
    out.write_json("bench_summary.json", &summaries)?;

    let mut text = format!(
        "{} d={} agents={} iterations={} runs={}\n{:<9} {:>14} {:>14}\n",
        s.function, s.dimension, s.agents, s.iterations, s.seeds, "variant", "median", "best"
    );
    for b in &summaries {
        let _ = writeln!(
            text,
            "{:<9} {:>14.6e} {:>14.6e}",
            b.variant, b.median_final_fitness, b.best_final_fitness
        );
    }
    Ok(text)
}

#[derive(Debug, Serialize)]
struct TrainReport {
    model_name: String,
    topology: String,
    connections: usize,
    training_mse: f64,
    train_rate: f64,
    confusion: wolfnet::ConfusionMatrix,
    metrics: wolfnet::MetricSet,
}

pub fn train_model(s: &Settings, out: &OutDir) -> Result<String> {
    let preset = match presets(s, false)?.as_slice() {
        [one] => *one,
        _ => bail!("train takes a single --model"),
    };
    let ds = load_dataset(s)?;
    let cfg = train_config(s, preset, ds.feature_count())?;
    let model = train(&cfg, &ds.samples)?;
    let eval = evaluate(&model, &ds.samples)?;
    let file = ModelFile {
        model: model.clone(),
        feature_names: ds.feature_names.clone(),
        normalization: Some(ds.normalization.clone()),
    };
    out.write("model.txt", file.to_text())?;
    out.write("trace.csv", model.trace.to_csv())?;
    let report = TrainReport {
        model_name: preset.name().into(),
        topology: cfg.topology.to_string(),
        connections: cfg.topology.dimension(),
        training_mse: model.training_mse,
        train_rate: eval.rate,
        confusion: eval.confusion,
        metrics: derived_metrics(&eval.confusion),
    };
    out.write_json("train_report.json", &report)?;
    Ok(format!(
        "{} ({}, {} weights)\ntraining mse {:.6}, training rate {}\n",
        preset,
        cfg.topology,
        cfg.topology.dimension(),
        model.training_mse,
        pct(eval.rate)
    ))
}

pub fn predict_csv(s: &Settings, out: &OutDir) -> Result<String> {
    let model_path = s
        .model_file
        .as_deref()
        .ok_or_else(|| anyhow!("no model given; pass --model-file <path>"))?;
    let text = std::fs::read_to_string(model_path)
        .with_context(|| format!("cannot read model {}", model_path.display()))?;
    let mut file =
        ModelFile::from_text(&text).with_context(|| format!("{}", model_path.display()))?;
    if let Some(t) = s.threshold {
        file.model.threshold = t;
    }

    let data = s.require_data()?;
    let select = (s.header && !file.feature_names.is_empty()).then_some(&file.feature_names[..]);
    let table = load_features(data, s.header, select).map_err(|e| with_path(e, data))?;
    let inputs = file.model.topology.inputs;
    if table.names.len() != inputs {
        bail!(
            "{} has {} columns, the model expects {inputs}",
            data.display(),
            table.names.len()
        );
    }

    let mut csv = String::from("sample_index,score,class\n");
    let (mut pass, mut fail) = (0, 0);
    for (i, row) in table.rows.iter().enumerate() {
        let x = match &file.normalization {
            Some(n) => n.apply(row),
            None => row.clone(),
        };
        let p = predict(&file.model, &x)?;
        let class = if p.class.is_pass() {
            pass += 1;
            "pass"
        } else {
            fail += 1;
            "fail"
        };
        let _ = writeln!(csv, "{i},{:?},{class}", p.score);
    }
    out.write("predictions.csv", csv)?;
    Ok(format!(
        "{} samples scored: {pass} pass, {fail} fail\n",
        pass + fail
    ))
}
