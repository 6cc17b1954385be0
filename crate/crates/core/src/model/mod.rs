//! The terrain classifier: architecture, training, and efficiency accounting.
//!
//! Two variants share one code path:
//!
//! - `Directional`: shared per-point MLP `3 -> 64 -> 64 -> N` (ReLU after
//!   every layer), elementwise max pool over points into a global feature of
//!   length `N` (default 256), classifier `N -> 128 -> 64 -> 3`. No spatial
//!   transformer: the input keeps its absolute, gravity-aligned orientation,
//!   which is exactly the cue that separates up stairs from down stairs.
//! - `BaselineTNet`: the same pipeline widened to the classic PointNet
//!   configuration with learned input (3×3) and feature (64×64) transforms,
//!   used as the efficiency and convergence reference.
//!
//! Backpropagation is written by hand against the finite-difference oracle in
//! [`crate::numcore`]; the max pool routes gradient to the lowest-index
//! arg-max point of each feature dimension.

mod checkpoint;
mod efficiency;
mod forward;
mod train;
mod weights;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use efficiency::{count_flops, count_params, FlopConvention};
pub use forward::{backward, forward, predict};
pub(crate) use forward::forward_one;
pub use train::{evaluate, lr_schedule, train, EvalReport, TrainConfig, TrainOutcome};
pub use weights::{build_model, ModelWeights, TNetWeights};

use serde::{Deserialize, Serialize};

/// Architecture description. Everything needed to size, build, and count the
/// network; checkpoints embed it verbatim.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    /// Output widths of the shared per-point MLP; the last entry is the
    /// global feature length `N`.
    pub per_point_widths: Vec<usize>,
    /// Output widths of the classifier head; the last entry is the class
    /// count.
    pub classifier_widths: Vec<usize>,
    pub variant: Variant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Variant {
    Directional,
    BaselineTNet(TNetConfig),
}

/// Which learned transforms the baseline applies, and how their predictor
/// networks are sized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TNetConfig {
    /// 3×3 transform of the raw points.
    pub input_transform: bool,
    /// Transform of the per-point features, applied after the second
    /// per-point layer (64×64 at the default widths).
    pub feature_transform: bool,
    /// Per-point widths of each transform predictor.
    pub point_widths: Vec<usize>,
    /// Fully-connected widths of each transform predictor; the output layer
    /// mapping to the flattened matrix is implied and initialized to the
    /// identity transform.
    pub fc_widths: Vec<usize>,
}

impl Default for TNetConfig {
    fn default() -> Self {
        TNetConfig {
            input_transform: true,
            feature_transform: true,
            point_widths: vec![64, 128, 1024],
            fc_widths: vec![512, 256],
        }
    }
}

/// Default global feature length.
pub const DEFAULT_FEATURE_LENGTH: usize = 256;

impl ModelSpec {
    /// Directional classifier with global feature length `n`:
    /// per-point `[64, 64, n]`, classifier `[128, 64, 3]`.
    pub fn directional(feature_length: usize) -> Self {
        ModelSpec {
            per_point_widths: vec![64, 64, feature_length],
            classifier_widths: vec![128, 64, crate::geometry::NUM_CLASSES],
            variant: Variant::Directional,
        }
    }

    /// Classic PointNet baseline: per-point `[64, 64, 64, 128, 1024]`,
    /// classifier `[512, 256, 3]`, input and feature transforms on.
    pub fn baseline_tnet() -> Self {
        ModelSpec {
            per_point_widths: vec![64, 64, 64, 128, 1024],
            classifier_widths: vec![512, 256, crate::geometry::NUM_CLASSES],
            variant: Variant::BaselineTNet(TNetConfig::default()),
        }
    }

    /// Global feature length (max-pool width).
    pub fn feature_length(&self) -> usize {
        *self.per_point_widths.last().expect("nonempty per-point stack")
    }

    /// Class count (width of the last classifier layer).
    pub fn num_classes(&self) -> usize {
        *self.classifier_widths.last().expect("nonempty classifier")
    }
}

/// Per-epoch training record.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochStats {
    /// 1-based epoch number.
    pub epoch: usize,
    /// Cumulative optimizer steps taken by the end of this epoch.
    pub step: u64,
    /// Learning rate in effect at the last step of this epoch.
    pub lr: f64,
    /// Mean training loss over this epoch's batches.
    pub train_loss: f64,
    pub test_loss: f64,
    pub test_acc: f64,
    /// Wall-clock duration of this epoch. Informational; never serialized
    /// into reproducible artifacts.
    pub wall_seconds: f64,
}

/// Full training trace: one entry per completed epoch plus the per-step
/// learning-rate trace.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainHistory {
    pub epochs: Vec<EpochStats>,
    pub lr_by_step: Vec<f64>,
    /// Total wall-clock training time. Informational; never serialized into
    /// reproducible artifacts.
    pub wall_seconds: f64,
}

impl TrainHistory {
    /// First 1-based epoch whose test accuracy reaches `threshold`.
    pub fn first_epoch_reaching(&self, threshold: f64) -> Option<usize> {
        self.epochs.iter().find(|e| e.test_acc >= threshold).map(|e| e.epoch)
    }

    /// Test accuracy after the last completed epoch.
    pub fn final_test_acc(&self) -> Option<f64> {
        self.epochs.last().map(|e| e.test_acc)
    }

    /// Serializes the per-epoch rows as CSV with a fixed header. The byte
    /// output is deterministic: floats print in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,step,lr,train_loss,test_loss,test_acc\n");
        for e in &self.epochs {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.epoch, e.step, e.lr, e.train_loss, e.test_loss, e.test_acc
            ));
        }
        out
    }
}
