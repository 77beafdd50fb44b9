#![allow(dead_code)]

use rand::Rng;
use wolfnet::data::{normalize, Dataset, Label, RawDataset, RawRow, Sample};
use wolfnet::seed::stream;

/// 20 points in the unit square, pass iff x + y > 1, kept at least 0.15
/// away from the boundary.
pub fn separable_toy(seed: u64) -> Vec<Sample> {
    let mut rng = stream(seed);
    let mut out = Vec::new();
    let (mut pass, mut fail) = (0, 0);
    while out.len() < 20 {
        let x: f64 = rng.random();
        let y: f64 = rng.random();
        let margin = x + y - 1.0;
        if margin.abs() < 0.15 {
            continue;
        }
        let label = if margin > 0.0 {
            Label::Pass
        } else {
            Label::Fail
        };
        let slot = if label == Label::Pass {
            &mut pass
        } else {
            &mut fail
        };
        if *slot == 10 {
            continue;
        }
        *slot += 1;
        out.push(Sample {
            features: vec![x, y],
            label,
        });
    }
    out
}

/// Student-like table: `pass` + `fail` rows, 20 integer-coded columns of
/// which the last two carry no signal. Columns 0..6 shift with the label.
pub fn synthetic_students(pass: usize, fail: usize, seed: u64) -> RawDataset {
    let mut rng = stream(seed);
    let mut feature_names: Vec<String> = (0..18).map(|j| format!("q{j:02}")).collect();
    feature_names.push("College".into());
    feature_names.push("High School (Village)".into());
    let mut rows = Vec::new();
    let mut labels: Vec<Label> = vec![Label::Pass; pass];
    labels.extend(vec![Label::Fail; fail]);
    // interleave deterministically so dataset order is mixed
    use rand::seq::SliceRandom;
    labels.shuffle(&mut rng);
    for label in labels {
        let shift = if label == Label::Pass { 1.0 } else { 0.0 };
        let mut values = Vec::with_capacity(20);
        for j in 0..18 {
            let base: f64 = rng.random_range(0.0..3.0);
            let v = if j < 6 {
                base + 2.0 * shift
            } else {
                rng.random_range(0.0..5.0)
            };
            values.push(v.round());
        }
        values.push(1.0);
        values.push(f64::from(rng.random_range(0..2u8)));
        rows.push(RawRow { values, label });
    }
    RawDataset {
        feature_names,
        rows,
    }
}

pub fn synthetic_dataset(seed: u64) -> Dataset {
    let raw = synthetic_students(183, 104, seed);
    let raw = raw
        .select_features(&["College".to_string(), "High School (Village)".to_string()])
        .unwrap();
    normalize(&raw)
}
