use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pair_count, Graph, LabeledDataset};

use super::{sigmoid, BlackBox};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// L2 penalty on the edge weights (not the bias).
    pub l2: f64,
    /// Fraction of graphs held out for validation, chosen by a seeded shuffle.
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            epochs: 300,
            l2: 1e-3,
            validation_fraction: 0.0,
            seed: 0,
        }
    }
}

/// Logistic regression over node-pair presence (or weight) features.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSurrogate {
    n: usize,
    weights: Vec<f64>,
    bias: f64,
    config: TrainConfig,
    training_accuracy: f64,
    validation_accuracy: Option<f64>,
}

impl LinearSurrogate {
    /// Builds a surrogate from explicit per-pair weights.
    pub fn from_weights(n: usize, weights: Vec<f64>, bias: f64) -> Result<Self> {
        if weights.len() != pair_count(n) {
            return Err(Error::Parameter(format!(
                "{} weights for {} node pairs",
                weights.len(),
                pair_count(n)
            )));
        }
        Ok(LinearSurrogate {
            n,
            weights,
            bias,
            config: TrainConfig {
                epochs: 0,
                ..TrainConfig::default()
            },
            training_accuracy: f64::NAN,
            validation_accuracy: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn training_accuracy(&self) -> f64 {
        self.training_accuracy
    }

    pub fn validation_accuracy(&self) -> Option<f64> {
        self.validation_accuracy
    }

    fn logit(&self, g: &Graph) -> f64 {
        let mut z = self.bias;
        for i in g.edge_set().iter() {
            z += self.weights[i] * g.weight_at(i);
        }
        z
    }

    /// Fraction of graphs whose thresholded prediction matches the label.
    pub fn accuracy(&self, d: &LabeledDataset) -> f64 {
        accuracy(self, d.graphs(), d.labels())
    }
}

fn accuracy(model: &LinearSurrogate, graphs: &[Graph], labels: &[u8]) -> f64 {
    if graphs.is_empty() {
        return f64::NAN;
    }
    let hits = graphs
        .iter()
        .zip(labels)
        .filter(|(g, &y)| (model.logit(g) > 0.0) == (y == 1))
        .count();
    hits as f64 / graphs.len() as f64
}

impl BlackBox for LinearSurrogate {
    fn evaluate(&self, g: &Graph) -> Result<f64> {
        if g.n() != self.n {
            return Err(Error::UniverseMismatch {
                expected: self.n,
                found: g.n(),
            });
        }
        Ok(sigmoid(self.logit(g)))
    }

    fn concurrent(&self) -> bool {
        true
    }
}

/// Full-batch gradient descent on the logistic cross-entropy.
///
/// Weights start at zero, and the update order is fixed, so the result is
/// bit-identical for a given dataset and configuration.
pub fn train_linear_surrogate(d: &LabeledDataset, cfg: TrainConfig) -> Result<LinearSurrogate> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if d.class_count(0) == 0 || d.class_count(1) == 0 {
        return Err(Error::DegenerateTraining(
            "training data must contain both labels".into(),
        ));
    }
    if !(0.0..1.0).contains(&cfg.validation_fraction) {
        return Err(Error::Parameter(format!(
            "validation fraction {} not in [0, 1)",
            cfg.validation_fraction
        )));
    }

    let mut order: Vec<usize> = (0..d.len()).collect();
    let held_out = (cfg.validation_fraction * d.len() as f64).round() as usize;
    if held_out > 0 {
        order.shuffle(&mut ChaCha20Rng::seed_from_u64(cfg.seed));
    }
    let (valid_idx, train_idx) = order.split_at(held_out);
    let train = d.select(train_idx);
    let valid = d.select(valid_idx);
    if train.class_count(0) == 0 || train.class_count(1) == 0 {
        return Err(Error::DegenerateTraining(
            "training split must contain both labels".into(),
        ));
    }

    let mut model = LinearSurrogate {
        n: d.n(),
        weights: vec![0.0; pair_count(d.n())],
        bias: 0.0,
        config: cfg,
        training_accuracy: f64::NAN,
        validation_accuracy: None,
    };
    let features: Vec<Vec<(usize, f64)>> = train
        .graphs()
        .iter()
        .map(|g| g.edge_set().iter().map(|i| (i, g.weight_at(i))).collect())
        .collect();
    let count = train.len() as f64;
    let mut grad = vec![0.0; model.weights.len()];

    for _ in 0..cfg.epochs {
        grad.iter_mut().for_each(|x| *x = 0.0);
        let mut grad_bias = 0.0;
        for (x, &y) in features.iter().zip(train.labels()) {
            let z = model.bias + x.iter().map(|&(i, v)| model.weights[i] * v).sum::<f64>();
            let err = sigmoid(z) - f64::from(y);
            grad_bias += err;
            for &(i, v) in x {
                grad[i] += err * v;
            }
        }
        for (w, g) in model.weights.iter_mut().zip(&grad) {
            *w -= cfg.learning_rate * (g / count + cfg.l2 * *w);
        }
        model.bias -= cfg.learning_rate * grad_bias / count;
    }

    model.training_accuracy = accuracy(&model, train.graphs(), train.labels());
    if !valid.is_empty() {
        model.validation_accuracy = Some(accuracy(&model, valid.graphs(), valid.labels()));
    }
    Ok(model)
}
