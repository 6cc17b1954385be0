//! Training loop, evaluation, and the learning-rate schedule.
//!
//! Runs are reproducible to the bit from `(spec, dataset, config)`: the seed
//! derives one stream for weight initialization and one per epoch for the
//! shuffle, batches keep the last short remainder, and every reduction
//! happens in a fixed order. Wall-clock fields are the only nondeterministic
//! outputs and never feed back into the math.

use std::time::Instant;

use rayon::prelude::*;

use crate::datagen::{Dataset, Split};
use crate::error::{Error, Result};
use crate::geometry::{PointCloud, TerrainClass, NUM_CLASSES};
use crate::numcore::{adam_step, softmax_cross_entropy, AdamState};
use crate::rng::{derive_seed, DetRng};

use super::forward::{backward, forward_one, CHUNK};
use super::weights::build_model;
use super::{EpochStats, ModelSpec, ModelWeights, TrainHistory};

/// Optimization hyperparameters.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub initial_lr: f64,
    /// Adam first-moment decay; the second moment stays at its default.
    pub beta1: f64,
    /// Steps between learning-rate decays.
    pub decay_step: u64,
    /// Multiplicative decay applied every `decay_step` steps.
    pub decay_rate: f64,
    pub seed: u64,
    /// Stop after the first epoch whose test accuracy reaches this value.
    pub early_stop_acc: Option<f64>,
}

impl TrainConfig {
    pub fn new(epochs: usize, seed: u64) -> Self {
        TrainConfig {
            epochs,
            batch_size: 32,
            initial_lr: 0.001,
            beta1: 0.9,
            decay_step: 200_000,
            decay_rate: 0.7,
            seed,
            early_stop_acc: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidParam("batch_size must be positive".into()));
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return Err(Error::InvalidParam("initial_lr must be finite and positive".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) {
            return Err(Error::InvalidParam("beta1 must lie in [0, 1)".into()));
        }
        if self.decay_step == 0 {
            return Err(Error::InvalidParam("decay_step must be positive".into()));
        }
        if !(self.decay_rate > 0.0 && self.decay_rate <= 1.0) {
            return Err(Error::InvalidParam("decay_rate must lie in (0, 1]".into()));
        }
        if let Some(th) = self.early_stop_acc {
            if !(th > 0.0 && th <= 1.0) {
                return Err(Error::InvalidParam("early_stop_acc must lie in (0, 1]".into()));
            }
        }
        Ok(())
    }
}

/// Staircase decay: the rate drops by `decay_rate` every `decay_step`
/// optimizer steps.
pub fn lr_schedule(step: u64, cfg: &TrainConfig) -> f64 {
    cfg.initial_lr * cfg.decay_rate.powi((step / cfg.decay_step) as i32)
}

/// Trained weights plus the full per-epoch trace.
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub weights: ModelWeights,
    pub history: TrainHistory,
}

/// Evaluation summary. The confusion matrix is indexed
/// `[true class][predicted class]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub mean_loss: f64,
    pub confusion: [[usize; NUM_CLASSES]; NUM_CLASSES],
}

/// Runs the model over a labeled set. Clouds may differ in size; each sample
/// stands alone.
pub fn evaluate(
    w: &ModelWeights,
    clouds: &[&PointCloud<f64>],
    labels: &[TerrainClass],
) -> Result<EvalReport> {
    if clouds.is_empty() {
        return Err(Error::Empty("evaluation set"));
    }
    if labels.len() != clouds.len() {
        return Err(Error::LengthMismatch {
            context: "evaluation labels",
            expected: clouds.len(),
            found: labels.len(),
        });
    }
    if w.spec.num_classes() != NUM_CLASSES {
        return Err(Error::InvalidParam(format!(
            "evaluation needs a {NUM_CLASSES}-class head, spec has {}",
            w.spec.num_classes()
        )));
    }

    let pairs: Vec<(&PointCloud<f64>, usize)> = clouds
        .iter()
        .zip(labels)
        .map(|(c, l)| (*c, l.index()))
        .collect();
    let partials: Result<Vec<(f64, usize, [[usize; NUM_CLASSES]; NUM_CLASSES])>> = pairs
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut loss_sum = 0.0;
            let mut correct = 0;
            let mut confusion = [[0usize; NUM_CLASSES]; NUM_CLASSES];
            for (cloud, label) in chunk {
                let cache = forward_one(w, cloud)?;
                let (loss, _) = softmax_cross_entropy(&cache.logits, &[*label])?;
                loss_sum += loss;
                let row = cache.logits.row(0);
                let mut pred = 0;
                for (i, &v) in row.iter().enumerate() {
                    if v > row[pred] {
                        pred = i;
                    }
                }
                confusion[*label][pred] += 1;
                if pred == *label {
                    correct += 1;
                }
            }
            Ok((loss_sum, correct, confusion))
        })
        .collect();

    let mut loss_sum = 0.0;
    let mut correct = 0;
    let mut confusion = [[0usize; NUM_CLASSES]; NUM_CLASSES];
    for (ls, c, conf) in partials? {
        loss_sum += ls;
        correct += c;
        for (dst, src) in confusion.iter_mut().zip(&conf) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s;
            }
        }
    }
    Ok(EvalReport {
        accuracy: correct as f64 / clouds.len() as f64,
        mean_loss: loss_sum / clouds.len() as f64,
        confusion,
    })
}

fn shuffle(order: &mut [usize], rng: &mut DetRng) {
    for i in (1..order.len()).rev() {
        let j = rng.index(i + 1);
        order.swap(i, j);
    }
}

/// Trains a fresh model on the dataset's train split, evaluating on the test
/// split after every epoch.
///
/// A non-finite batch loss or gradient aborts with [`Error::Diverged`]
/// carrying the history up to that point. `epochs == 0` returns the
/// initialized weights and an empty history.
pub fn train(spec: &ModelSpec, data: &Dataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    let train_idx = data.split_indices(Split::Train);
    let (test_clouds, test_labels) = data.split_view(Split::Test);
    if train_idx.is_empty() {
        return Err(Error::Empty("train split"));
    }
    if test_clouds.is_empty() {
        return Err(Error::Empty("test split"));
    }

    let mut weights = build_model(spec, derive_seed(cfg.seed, 0))?;
    let mut flat = weights.flatten();
    let mut adam = AdamState::new(flat.len());
    adam.beta1 = cfg.beta1;

    let mut history = TrainHistory::default();
    let run_start = Instant::now();
    let mut step: u64 = 0;

    for epoch in 1..=cfg.epochs {
        let epoch_start = Instant::now();
        let mut order = train_idx.clone();
        shuffle(&mut order, &mut DetRng::seed(derive_seed(cfg.seed, epoch as u64)));

        let mut weighted_loss = 0.0;
        let mut last_lr = lr_schedule(step, cfg);
        for batch_ids in order.chunks(cfg.batch_size) {
            let clouds: Vec<&PointCloud<f64>> = batch_ids.iter().map(|&i| data.cloud(i)).collect();
            let labels: Vec<TerrainClass> = batch_ids.iter().map(|&i| data.class(i)).collect();
            let lr = lr_schedule(step, cfg);
            let (loss, grads) = backward(&weights, &clouds, &labels)?;
            if !loss.is_finite() {
                history.wall_seconds = run_start.elapsed().as_secs_f64();
                return Err(Error::Diverged {
                    epoch,
                    history: Box::new(history),
                });
            }
            let gflat = grads.flatten();
            let (new_flat, new_adam) = match adam_step(&flat, &gflat, &adam, lr) {
                Ok(next) => next,
                Err(Error::NonFinite(_)) => {
                    history.wall_seconds = run_start.elapsed().as_secs_f64();
                    return Err(Error::Diverged {
                        epoch,
                        history: Box::new(history),
                    });
                }
                Err(e) => return Err(e),
            };
            flat = new_flat;
            adam = new_adam;
            weights.assign_flat(&flat)?;
            history.lr_by_step.push(lr);
            last_lr = lr;
            step += 1;
            weighted_loss += loss * batch_ids.len() as f64;
        }

        let report = evaluate(&weights, &test_clouds, &test_labels)?;
        history.epochs.push(EpochStats {
            epoch,
            step,
            lr: last_lr,
            train_loss: weighted_loss / train_idx.len() as f64,
            test_loss: report.mean_loss,
            test_acc: report.accuracy,
            wall_seconds: epoch_start.elapsed().as_secs_f64(),
        });
        if cfg.early_stop_acc.is_some_and(|th| report.accuracy >= th) {
            break;
        }
    }

    history.wall_seconds = run_start.elapsed().as_secs_f64();
    Ok(TrainOutcome { weights, history })
}
