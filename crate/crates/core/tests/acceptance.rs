//! Acceptance checks. Each test writes one `criterion N: PASS|FAIL` line
//! straight to stderr, so the lines show up even when output is captured.
//!
//! Criteria 8 and 9 need the published student dataset. They are ignored by
//! default; point `WOLFNET_STUDENT_CSV` at the file and run with
//! `-- --ignored`. `WOLFNET_STUDENT_DROP` overrides the dropped columns
//! (comma separated, default `College,High School (Village)`).

mod common;

use rand::Rng;
use wolfnet::benchmarks::sphere;
use wolfnet::data::{
    load_csv, normalize, stratified_folds, stratified_folds_for_labels, CsvSchema, Dataset, Label,
};
use wolfnet::metrics::{auc_pairwise_oracle, derived_metrics, roc, ConfusionMatrix};
use wolfnet::network::{Network, Topology};
use wolfnet::optimizer::{
    modified_step, modified_update, optimize, standard_step, Coefficients, GwoConfig, LeaderSet,
    SearchBox, Variant,
};
use wolfnet::seed::stream;
use wolfnet::training::{cross_validate, ModelPreset};

fn report(n: u32, ok: bool, detail: impl std::fmt::Display) {
    use std::io::Write;
    let verdict = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n}: {verdict} ({detail})");
    assert!(ok, "criterion {n} failed: {detail}");
}

#[test]
fn criterion_01_dimension() {
    let d = Topology::mrnn(18, 10, 10, 1).unwrap().dimension();
    report(1, d == 511, format!("dimension {d}"));
}

/// Direct transcription of the four-leader update for one agent, drawing
/// r1 then r2 per leader in alpha, beta, delta, gamma order.
fn four_leader_oracle(
    leaders: &[Vec<f64>],
    x: &[f64],
    a: f64,
    lo: f64,
    hi: f64,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let d = x.len();
    let mut big_a = Vec::with_capacity(4);
    let mut big_c = Vec::with_capacity(4);
    for _ in 0..4 {
        let r1: Vec<f64> = (0..d).map(|_| rng.random()).collect();
        let r2: Vec<f64> = (0..d).map(|_| rng.random()).collect();
        big_a.push(r1.iter().map(|r| 2.0 * a * r - a).collect::<Vec<f64>>());
        big_c.push(r2.iter().map(|r| 2.0 * r).collect::<Vec<f64>>());
    }
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let dist: Vec<f64> = (0..4)
            .map(|k| (big_c[k][i] * leaders[k][i] - x[i]).abs())
            .collect();
        let d_avg = (dist[0] + dist[1] + dist[2] + dist[3]) / 4.0;
        let xs: Vec<f64> = (0..4)
            .map(|k| leaders[k][i] - d_avg * big_a[k][i])
            .collect();
        let v = (xs[0] + xs[1] + xs[2] + xs[3]) / 4.0;
        out.push(v.clamp(lo, hi));
    }
    out
}

#[test]
fn criterion_02_modified_update_oracle() {
    let mut gen = stream(2);
    let mut worst = 0.0f64;
    for case in 0..1000u64 {
        let d = gen.random_range(1..=5);
        let leaders: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..d).map(|_| gen.random_range(-5.0..5.0)).collect())
            .collect();
        let x: Vec<f64> = (0..d).map(|_| gen.random_range(-5.0..5.0)).collect();
        let a = gen.random_range(0.0..=2.0);
        // a narrow box on some cases so clamping is exercised too
        let (lo, hi) = if case % 4 == 0 {
            (-1.0, 1.0)
        } else {
            (-100.0, 100.0)
        };
        let set = LeaderSet::from_positions(leaders.clone()).unwrap();
        let bounds = SearchBox::new(lo, hi).unwrap();
        let got = modified_update(&set, &x, a, &bounds, &mut stream(case)).unwrap();
        let want = four_leader_oracle(&leaders, &x, a, lo, hi, &mut stream(case));
        for (g, w) in got.iter().zip(&want) {
            worst = worst.max((g - w).abs());
        }
    }

    let hand = LeaderSet::from_positions(vec![vec![4.0], vec![2.0], vec![0.0], vec![2.0]]).unwrap();
    let ones = vec![Coefficients::constant(1.0, 1.0, 1.0, 1); 4];
    let bounds = SearchBox::new(-10.0, 10.0).unwrap();
    let hand_result = modified_step(&hand, &[1.0], &ones, &bounds).unwrap()[0];

    report(
        2,
        worst <= 1e-12 && hand_result == 0.5,
        format!("max deviation {worst:e} over 1000 cases, hand case {hand_result}"),
    );
}

#[test]
fn criterion_03_centroid_with_zero_step() {
    let mut gen = stream(3);
    let bounds = SearchBox::new(-1e9, 1e9).unwrap();
    let mut mismatches = 0;
    for _ in 0..1000 {
        let d = gen.random_range(1..=8);
        let leaders: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..d).map(|_| gen.random_range(-50.0..50.0)).collect())
            .collect();
        let x: Vec<f64> = (0..d).map(|_| gen.random_range(-50.0..50.0)).collect();
        let a = gen.random_range(0.0..=2.0);
        // r1 = 1/2 gives A = 0 exactly; C stays random
        let coeffs: Vec<Coefficients> = (0..4)
            .map(|_| {
                let r2: Vec<f64> = (0..d).map(|_| gen.random()).collect();
                Coefficients::from_uniforms(a, &vec![0.5; d], &r2).unwrap()
            })
            .collect();

        let four = LeaderSet::from_positions(leaders.clone()).unwrap();
        let three = LeaderSet::from_positions(leaders[..3].to_vec()).unwrap();
        let m = modified_step(&four, &x, &coeffs, &bounds).unwrap();
        let s = standard_step(&three, &x, &coeffs[..3], &bounds).unwrap();
        for i in 0..d {
            let c4 = (leaders[0][i] + leaders[1][i] + leaders[2][i] + leaders[3][i]) / 4.0;
            let c3 = (leaders[0][i] + leaders[1][i] + leaders[2][i]) / 3.0;
            if m[i] != c4 || s[i] != c3 {
                mismatches += 1;
            }
        }
    }
    report(
        3,
        mismatches == 0,
        format!("{mismatches} inexact coordinates"),
    );
}

#[test]
fn criterion_04_sphere_convergence() {
    let mut finals = Vec::new();
    let mut all_monotone = true;
    for seed in 0..10 {
        let mut cfg = GwoConfig::new(10, Variant::Modified);
        cfg.agents = 30;
        cfg.max_iterations = 500;
        cfg.lower_bound = -5.0;
        cfg.upper_bound = 5.0;
        cfg.seed = seed;
        let opt = optimize(&cfg, sphere).unwrap();
        all_monotone &= opt.trace.is_monotone();
        finals.push(opt.fitness);
    }
    finals.sort_by(f64::total_cmp);
    let median = (finals[4] + finals[5]) / 2.0;
    report(
        4,
        median < 1e-2 && all_monotone,
        format!("median final fitness {median:e}, traces monotone: {all_monotone}"),
    );
}

#[test]
fn criterion_05_metric_reproduction() {
    let cm = ConfusionMatrix::new(36, 1, 1, 19);
    let m = derived_metrics(&cm);
    let exact = m.sensitivity == Some(36.0 / 37.0)
        && m.specificity == Some(19.0 / 20.0)
        && m.ppv == Some(36.0 / 37.0)
        && m.npv == Some(19.0 / 20.0)
        && m.accuracy == Some(55.0 / 57.0);
    let round = |v: Option<f64>, places: i32| {
        let p = 10f64.powi(places);
        (v.unwrap() * p).round() / p
    };
    let printed = round(m.sensitivity, 2) == 0.97
        && round(m.specificity, 2) == 0.95
        && round(m.ppv, 2) == 0.97
        && round(m.npv, 2) == 0.95
        && round(m.accuracy, 4) == 0.9649;
    report(
        5,
        exact && printed,
        format!("exact fractions {exact}, rounded values {printed}"),
    );
}

#[test]
fn criterion_06_auc_oracle() {
    let mut gen = stream(6);
    let mut worst = 0.0f64;
    let mut sets = 0;
    while sets < 200 {
        let n = gen.random_range(2..=50);
        let tie_heavy = sets % 2 == 0;
        let scores: Vec<f64> = (0..n)
            .map(|_| {
                if tie_heavy {
                    f64::from(gen.random_range(0..4u8)) / 4.0
                } else {
                    gen.random()
                }
            })
            .collect();
        let labels: Vec<Label> = (0..n)
            .map(|_| {
                if gen.random_bool(0.5) {
                    Label::Pass
                } else {
                    Label::Fail
                }
            })
            .collect();
        if labels.iter().all(|l| l.is_pass()) || labels.iter().all(|l| !l.is_pass()) {
            continue;
        }
        let curve = roc(&scores, &labels).unwrap();
        let oracle = auc_pairwise_oracle(&scores, &labels).unwrap();
        worst = worst.max((curve.auc - oracle).abs());
        sets += 1;
    }
    report(
        6,
        worst <= 1e-12,
        format!("max deviation {worst:e} over 200 sets"),
    );
}

fn student_csv() -> Option<String> {
    std::env::var("WOLFNET_STUDENT_CSV")
        .ok()
        .filter(|p| !p.is_empty())
}

fn student_dataset(path: &str) -> Dataset {
    let drop: Vec<String> = std::env::var("WOLFNET_STUDENT_DROP")
        .unwrap_or_else(|_| "College,High School (Village)".into())
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    let raw = load_csv(path, &CsvSchema::default()).expect("load student csv");
    normalize(&raw.select_features(&drop).expect("drop columns"))
}

#[test]
fn criterion_07_fold_arithmetic() {
    let labels: Vec<Label> = match student_csv() {
        Some(path) => student_dataset(&path).labels(),
        None => {
            let mut l = vec![Label::Pass; 183];
            l.extend(vec![Label::Fail; 104]);
            l
        }
    };
    let plan = stratified_folds_for_labels(&labels, 5, 0).unwrap();
    let mut sizes = plan.fold_sizes();
    let mut train: Vec<usize> = sizes.iter().map(|s| labels.len() - s).collect();
    sizes.sort();
    train.sort();
    let per_class = plan.class_counts(&labels);
    let stratified = per_class
        .iter()
        .all(|&(p, f)| (36..=37).contains(&p) && (20..=21).contains(&f));
    let ok = sizes == [57, 57, 57, 58, 58] && train == [229, 229, 230, 230, 230] && stratified;
    report(
        7,
        ok,
        format!("{} samples, fold sizes {sizes:?}, training sizes {train:?}, per-fold (pass, fail) {per_class:?}", labels.len()),
    );
}

fn mean_test_accuracy(ds: &Dataset, preset: ModelPreset, seed: u64) -> f64 {
    let plan = stratified_folds(ds, 5, seed).unwrap();
    let cfg = preset
        .train_config(ds.feature_count())
        .unwrap()
        .with_seed(seed);
    cross_validate(&cfg, ds, &plan).unwrap().averages.test_rate
}

#[test]
#[ignore = "needs the published student dataset in WOLFNET_STUDENT_CSV"]
fn criterion_08_end_to_end_accuracy() {
    let path = student_csv().expect("set WOLFNET_STUDENT_CSV");
    let ds = student_dataset(&path);
    let started = std::time::Instant::now();
    let acc = mean_test_accuracy(&ds, ModelPreset::MRnnGwo, 0);
    let secs = started.elapsed().as_secs_f64();
    report(
        8,
        acc >= 0.90 && secs < 600.0,
        format!("mean test accuracy {acc:.4} in {secs:.0}s"),
    );
}

#[test]
#[ignore = "needs the published student dataset in WOLFNET_STUDENT_CSV"]
fn criterion_09_model_ordering() {
    let path = student_csv().expect("set WOLFNET_STUDENT_CSV");
    let ds = student_dataset(&path);
    let median = |preset| {
        let mut v: Vec<f64> = (0..5).map(|s| mean_test_accuracy(&ds, preset, s)).collect();
        v.sort_by(f64::total_cmp);
        v[2]
    };
    let rnn = median(ModelPreset::MRnnGwo);
    let mlp = median(ModelPreset::MlpGwo);
    report(
        9,
        rnn >= mlp,
        format!("median accuracy M-RNNGWO {rnn:.4}, MLPGWO {mlp:.4}"),
    );
}

fn report_bytes(ds: &Dataset) -> Vec<u8> {
    let plan = stratified_folds(ds, 5, 11).unwrap();
    let mut cfg = ModelPreset::MRnnGwo
        .train_config(ds.feature_count())
        .unwrap()
        .with_seed(11);
    cfg.agents = 8;
    cfg.iterations = 6;
    let cv = cross_validate(&cfg, ds, &plan).unwrap();
    let mut out = serde_json::to_vec_pretty(&cv).unwrap();
    out.extend(plan.to_csv().into_bytes());
    out.extend(cv.pooled_roc().unwrap().to_csv().into_bytes());
    for f in &cv.folds {
        out.extend(f.trace.to_csv().into_bytes());
    }
    out
}

#[test]
fn criterion_10_determinism() {
    let ds = common::synthetic_dataset(10);
    let first = report_bytes(&ds);
    let second = report_bytes(&ds);
    // a different rayon pool size must not change anything either
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let third = pool.install(|| report_bytes(&ds));
    report(
        10,
        first == second && first == third,
        format!("{} report bytes compared across three runs", first.len()),
    );
}

#[test]
fn criterion_11_zero_weight_forward() {
    let net = Network::new(Topology::mrnn(18, 10, 10, 1).unwrap()).unwrap();
    let w = vec![0.0; net.dimension()];
    let input: Vec<f64> = (0..18).map(|i| i as f64 / 17.0).collect();
    let (out, state) = net.forward_mrnn(&w, &input, &net.reset_state()).unwrap();
    let hidden_ok = state
        .context1
        .iter()
        .chain(&state.context2)
        .all(|&h| h == 1.0);
    report(
        11,
        out == [0.5] && hidden_ok,
        format!("output {:?}, all hidden activations 1.0: {hidden_ok}", out),
    );
}
