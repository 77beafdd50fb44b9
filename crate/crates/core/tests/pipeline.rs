mod common;

use wolfnet::data::stratified_folds;
use wolfnet::network::{Network, Topology};
use wolfnet::optimizer::Variant;
use wolfnet::training::{
    compare_models, cross_validate, evaluate, fitness_of, fitness_with, train, ContextPolicy,
    ModelPreset, SampleOrder, TrainConfig,
};

fn toy_config() -> TrainConfig {
    let mut cfg = TrainConfig::new(Topology::mrnn(2, 3, 3, 1).unwrap(), Variant::Modified);
    cfg.agents = 20;
    cfg.iterations = 100;
    cfg
}

#[test]
fn separable_toy_is_learned() {
    for seed in 0..4 {
        let set = common::separable_toy(3 + seed);
        let model = train(&toy_config().with_seed(seed), &set).unwrap();
        let eval = evaluate(&model, &set).unwrap();
        assert_eq!(eval.rate, 1.0, "seed {seed}: training rate {}", eval.rate);
    }
}

#[test]
fn training_is_reproducible_and_self_consistent() {
    let set = common::separable_toy(5);
    let cfg = toy_config().with_seed(77);
    let a = train(&cfg, &set).unwrap();
    let b = train(&cfg, &set).unwrap();
    assert_eq!(a.weights, b.weights);
    assert_eq!(a.trace, b.trace);

    let net = Network::new(cfg.topology.clone()).unwrap();
    assert_eq!(
        fitness_with(cfg.context, &net, a.weights.as_slice(), &set).unwrap(),
        a.training_mse
    );
    let trace_min = a.trace.best_fitness().fold(f64::INFINITY, f64::min);
    assert_eq!(trace_min, a.training_mse);
    assert!(a.trace.is_monotone());
}

#[test]
fn shuffled_order_is_reproducible() {
    let set = common::separable_toy(6);
    let mut cfg = toy_config();
    cfg.order = SampleOrder::SeededShuffleOnce;
    cfg.iterations = 10;
    let a = train(&cfg, &set).unwrap();
    assert_eq!(a, train(&cfg, &set).unwrap());
}

#[test]
fn cross_validation_shapes_and_averages() {
    let ds = common::synthetic_dataset(1);
    assert_eq!(ds.feature_count(), 18);
    let plan = stratified_folds(&ds, 5, 0).unwrap();
    let mut cfg = ModelPreset::MRnnGwo.train_config(18).unwrap();
    cfg.agents = 10;
    cfg.iterations = 5;
    let cv = cross_validate(&cfg, &ds, &plan).unwrap();
    assert_eq!(cv.folds.len(), 5);
    let mut train_sizes: Vec<usize> = cv.folds.iter().map(|f| f.train_size).collect();
    train_sizes.sort();
    assert_eq!(train_sizes, vec![229, 229, 230, 230, 230]);
    for f in &cv.folds {
        assert_eq!(f.train_size + f.test_size, 287);
        assert_eq!(f.confusion.total(), f.test_size);
        assert!((0.0..=1.0).contains(&f.test_rate) && (0.0..=1.0).contains(&f.train_rate));
    }
    let mean_test = cv.folds.iter().map(|f| f.test_rate).sum::<f64>() / 5.0;
    assert!((cv.averages.test_rate - mean_test).abs() < 1e-15);

    let again = cross_validate(&cfg, &ds, &plan).unwrap();
    assert_eq!(cv, again);
}

#[test]
fn comparison_of_one_equals_its_cross_validation() {
    let ds = common::synthetic_dataset(2);
    let plan = stratified_folds(&ds, 5, 1).unwrap();
    let mut cfg = ModelPreset::MlpGwo.train_config(18).unwrap();
    cfg.agents = 8;
    cfg.iterations = 4;
    let table = compare_models(&ds, &plan, &[("mlpgwo".into(), cfg.clone())]).unwrap();
    let cv = cross_validate(&cfg, &ds, &plan).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert_eq!(table.rows[0].mean_test_accuracy, cv.averages.test_rate);
    assert_eq!(table.rows[0].connections, 521);
}

#[test]
fn all_six_presets_run() {
    let ds = common::synthetic_dataset(3);
    let plan = stratified_folds(&ds, 5, 2).unwrap();
    let suite: Vec<(String, TrainConfig)> = ModelPreset::ALL
        .iter()
        .map(|m| {
            let mut cfg = m.train_config(18).unwrap();
            cfg.agents = 6;
            cfg.iterations = 3;
            (m.name().to_string(), cfg)
        })
        .collect();
    let table = compare_models(&ds, &plan, &suite).unwrap();
    assert_eq!(table.rows.len(), 6);
    assert!(table
        .rows
        .windows(2)
        .all(|w| w[0].mean_test_accuracy >= w[1].mean_test_accuracy));
    let rnn = table
        .rows
        .iter()
        .find(|r| r.model_name == "mrnngwo")
        .unwrap();
    assert_eq!(rnn.connections, 511);
}

#[test]
fn carried_context_trains_on_the_carried_fitness() {
    let set = common::separable_toy(7);
    let mut cfg = toy_config();
    cfg.context = ContextPolicy::Carry;
    cfg.iterations = 20;
    let model = train(&cfg, &set).unwrap();
    let net = Network::new(cfg.topology.clone()).unwrap();
    assert_eq!(
        fitness_of(&net, model.weights.as_slice(), &set).unwrap(),
        model.training_mse
    );
    assert_eq!(model, train(&cfg, &set).unwrap());
}
