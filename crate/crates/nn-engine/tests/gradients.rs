//! Finite-difference gradient verification for every layer type in
//! isolation and for composed models.

use nn_engine::{check_model_gradients, Batch, LayerSpec, Model, ModelSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-3;
const TOL: f64 = 1e-4;

fn random_batch(n: usize, len: usize, width: usize, seed: u64) -> Batch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Batch::from_raw(
        (0..n * len * width)
            .map(|_| rng.random_range(-1.2..1.2))
            .collect(),
        (0..n).map(|_| rng.random_range(0.3..1.3)).collect(),
        len,
        width,
    )
    .unwrap()
}

fn check_with_kink_budget(spec: ModelSpec, seed: u64, label: &str, max_kink_fraction: f64) {
    let model = Model::init(spec.clone(), seed).unwrap();
    let batch = random_batch(4, spec.input_len, spec.input_width, seed + 100);
    let report = check_model_gradients(&model, &batch, 0, EPS).unwrap();
    assert!(
        report.max_rel_err < TOL,
        "{label}: max rel err {} at {} ({} components)",
        report.max_rel_err,
        report.worst_tensor,
        report.checked_components
    );
    // Kink-crossed stencils are unusable probes, not evidence; they must
    // still leave enough smooth ones to make the check meaningful.
    let total = report.checked_components + report.kink_components;
    assert!(
        (report.kink_components as f64) < max_kink_fraction * total as f64,
        "{label}: {} of {} stencils crossed kinks",
        report.kink_components,
        total
    );
}

fn check(spec: ModelSpec, seed: u64, label: &str) {
    check_with_kink_budget(spec, seed, label, 0.10);
}

fn head(inputs: usize) -> Vec<LayerSpec> {
    vec![
        LayerSpec::Flatten,
        LayerSpec::Dense { inputs, outputs: 1 },
    ]
}

#[test]
fn dense_layer_gradients() {
    let mut layers = head(10 * 4);
    layers.push(LayerSpec::Softplus);
    check(
        ModelSpec {
            input_len: 10,
            input_width: 4,
            layers,
        },
        1,
        "dense+softplus",
    );
}

#[test]
fn conv_layer_gradients() {
    let mut layers = vec![LayerSpec::Conv {
        in_planes: 1,
        out_planes: 3,
        kernel_h: 4,
    }];
    layers.extend(head(3 * 9 * 4));
    check(
        ModelSpec {
            input_len: 12,
            input_width: 4,
            layers,
        },
        2,
        "conv",
    );
}

#[test]
fn batchnorm_layer_gradients() {
    let mut layers = vec![
        LayerSpec::Conv {
            in_planes: 1,
            out_planes: 3,
            kernel_h: 3,
        },
        LayerSpec::BatchNorm { planes: 3 },
    ];
    layers.extend(head(3 * 10 * 4));
    check(
        ModelSpec {
            input_len: 12,
            input_width: 4,
            layers,
        },
        3,
        "batchnorm (train-mode stats)",
    );
}

#[test]
fn leaky_relu_layer_gradients() {
    let mut layers = vec![
        LayerSpec::Conv {
            in_planes: 1,
            out_planes: 3,
            kernel_h: 3,
        },
        LayerSpec::LeakyRelu { slope: 0.01 },
    ];
    layers.extend(head(3 * 10 * 4));
    check(
        ModelSpec {
            input_len: 12,
            input_width: 4,
            layers,
        },
        4,
        "leaky relu",
    );
}

#[test]
fn maxpool_layer_gradients() {
    let mut layers = vec![
        LayerSpec::Conv {
            in_planes: 1,
            out_planes: 3,
            kernel_h: 3,
        },
        LayerSpec::MaxPool { kernel_h: 2 },
    ];
    layers.extend(head(3 * 5 * 4));
    check(
        ModelSpec {
            input_len: 12,
            input_width: 4,
            layers,
        },
        5,
        "maxpool",
    );
}

#[test]
fn softplus_layer_gradients() {
    let mut layers = head(8 * 3);
    layers.push(LayerSpec::Softplus);
    check(
        ModelSpec {
            input_len: 8,
            input_width: 3,
            layers,
        },
        6,
        "softplus",
    );
}

/// Full composed regressor at reduced size: every parameter checked.
/// BatchNorm couples each weight to every pool decision in its plane, so a
/// larger share of stencils land on argmax kinks than in isolated layers.
#[test]
fn reduced_full_model_gradients() {
    check_with_kink_budget(
        ModelSpec::regressor(40, 6, [4, 6, 8]),
        7,
        "reduced regressor",
        0.50,
    );
}

/// Full-size 800x6 regressor: a spread subset of each tensor.
#[test]
fn full_size_model_gradients_sampled() {
    let spec = ModelSpec::default_regressor();
    let model = Model::init(spec.clone(), 8).unwrap();
    let batch = random_batch(4, spec.input_len, spec.input_width, 88);
    let report = check_model_gradients(&model, &batch, 3, EPS).unwrap();
    assert!(
        report.max_rel_err < TOL,
        "full regressor: max rel err {} at {}",
        report.max_rel_err,
        report.worst_tensor
    );
}
