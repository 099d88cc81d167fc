//! Construction of the black-box selected on the command line.

use std::time::Duration;

use motif_shap::blackbox::train_linear_surrogate;
use motif_shap::io::{motifs_from_str, MotifSet};
use motif_shap::{
    BlackBox, Error, ExternalBlackBox, Graph, GroundTruthScorer, LabeledDataset, LinearSurrogate,
    Result, TrainConfig,
};

use crate::args::{BlackBoxArgs, BlackBoxKind, Importances};
use crate::context::Context;

pub enum Model {
    GroundTruth(GroundTruthScorer),
    Linear(LinearSurrogate),
    External(ExternalBlackBox),
}

impl BlackBox for Model {
    fn evaluate(&self, g: &Graph) -> Result<f64> {
        match self {
            Model::GroundTruth(b) => b.evaluate(g),
            Model::Linear(b) => b.evaluate(g),
            Model::External(b) => b.evaluate(g),
        }
    }

    fn concurrent(&self) -> bool {
        match self {
            Model::GroundTruth(b) => b.concurrent(),
            Model::Linear(b) => b.concurrent(),
            Model::External(b) => b.concurrent(),
        }
    }
}

/// Importances for the ground-truth scorer over `set`.
pub fn importances(set: &MotifSet, kind: Importances) -> Result<Vec<f64>> {
    let m = set.motifs.len();
    match kind {
        Importances::Uniform => Ok(vec![1.0 / m.max(1) as f64; m]),
        Importances::Rho => {
            let rho = set
                .meta
                .iter()
                .map(|meta| meta.rho)
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| {
                    Error::Config("motif set lacks rho values; use --importances uniform".into())
                })?;
            Ok(GroundTruthScorer::normalized_importances(&rho))
        }
    }
}

pub fn ground_truth(set: &MotifSet, args: &BlackBoxArgs) -> Result<GroundTruthScorer> {
    GroundTruthScorer::new(set.n, &set.motifs, importances(set, args.importances)?, args.beta)
}

pub fn train_config(args: &BlackBoxArgs) -> TrainConfig {
    TrainConfig {
        learning_rate: args.learning_rate,
        epochs: args.epochs,
        l2: args.l2,
        validation_fraction: args.validation_fraction,
        seed: args.train_seed,
    }
}

/// Builds the model over an `n`-node universe. `motifs` is the explained
/// motif set, used by the ground-truth scorer unless `--truth` is given;
/// `dataset` trains the linear surrogate.
pub fn build(
    ctx: &mut Context,
    args: &BlackBoxArgs,
    n: usize,
    motifs: Option<&MotifSet>,
    dataset: Option<&LabeledDataset>,
) -> Result<Model> {
    match args.blackbox {
        BlackBoxKind::GroundTruth => {
            let truth = match &args.truth {
                Some(path) => motifs_from_str(&ctx.read(path)?)?,
                None => motifs
                    .cloned()
                    .ok_or_else(|| Error::Config("ground-truth scorer needs --truth or --motifs".into()))?,
            };
            if truth.n != n {
                return Err(Error::UniverseMismatch {
                    expected: n,
                    found: truth.n,
                });
            }
            Ok(Model::GroundTruth(ground_truth(&truth, args)?))
        }
        BlackBoxKind::Linear => {
            let d = dataset.ok_or_else(|| Error::Config("linear surrogate needs --dataset to train on".into()))?;
            if d.n() != n {
                return Err(Error::UniverseMismatch {
                    expected: n,
                    found: d.n(),
                });
            }
            Ok(Model::Linear(train_linear_surrogate(d, train_config(args))?))
        }
        BlackBoxKind::External => {
            let cmd = args
                .external_cmd
                .as_deref()
                .ok_or_else(|| Error::Config("external black-box needs --external-cmd".into()))?;
            Ok(Model::External(ExternalBlackBox::from_command_line(
                cmd,
                Duration::from_secs(args.timeout_secs),
            )?))
        }
    }
}
