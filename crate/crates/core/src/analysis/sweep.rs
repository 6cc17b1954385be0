//! Global-feature capacity sweep.
//!
//! Retrains the directional model over a range of global feature lengths
//! with everything else held fixed. Accuracy as a function of length shows
//! where capacity stops paying for itself.

use crate::datagen::Dataset;
use crate::error::{Error, Result};
use crate::model::{train, ModelSpec, TrainConfig, TrainOutcome};

/// Feature lengths covering the useful range, smallest first.
pub const DEFAULT_SWEEP_LENGTHS: [usize; 6] = [32, 64, 128, 256, 512, 1024];

/// One sweep cell. A failed cell (bad width, divergence) keeps its error
/// here without aborting the other lengths.
#[derive(Debug)]
pub struct SweepEntry {
    pub feature_length: usize,
    pub outcome: Result<TrainOutcome>,
}

/// Trains one model per length, in the given order, all from the same
/// dataset and config.
pub fn sweep_feature_length(
    lengths: &[usize],
    data: &Dataset,
    base: &TrainConfig,
) -> Result<Vec<SweepEntry>> {
    if lengths.is_empty() {
        return Err(Error::Empty("sweep lengths"));
    }
    base.validate()?;
    Ok(lengths
        .iter()
        .map(|&n| SweepEntry {
            feature_length: n,
            outcome: train(&ModelSpec::directional(n), data, base),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{build_dataset, DatasetSpec, NoiseParams};

    fn tiny_dataset() -> Dataset {
        let spec = DatasetSpec {
            num_samples: 6,
            points_per_sample: 24,
            seed: 11,
            ranges: Default::default(),
            clean_noise: NoiseParams::clean(),
            noisy_noise: NoiseParams::noisy(),
        };
        build_dataset(&spec).unwrap()
    }

    fn tiny_config() -> TrainConfig {
        TrainConfig {
            batch_size: 3,
            ..TrainConfig::new(1, 5)
        }
    }

    #[test]
    fn sweep_tags_each_length_with_its_outcome() {
        let data = tiny_dataset();
        let entries = sweep_feature_length(&[4, 8], &data, &tiny_config()).unwrap();
        assert_eq!(entries.len(), 2);
        for (entry, &n) in entries.iter().zip(&[4usize, 8]) {
            assert_eq!(entry.feature_length, n);
            let outcome = entry.outcome.as_ref().unwrap();
            assert_eq!(outcome.weights.spec.feature_length(), n);
            assert_eq!(outcome.history.epochs.len(), 1);
        }
    }

    #[test]
    fn a_bad_length_fails_alone() {
        let data = tiny_dataset();
        let entries = sweep_feature_length(&[4, 0], &data, &tiny_config()).unwrap();
        assert!(entries[0].outcome.is_ok());
        assert!(entries[1].outcome.is_err());
    }

    #[test]
    fn empty_length_list_is_rejected() {
        let data = tiny_dataset();
        assert!(sweep_feature_length(&[], &data, &tiny_config()).is_err());
    }

    #[test]
    fn sweep_is_deterministic_bitwise() {
        let data = tiny_dataset();
        let a = sweep_feature_length(&[4], &data, &tiny_config()).unwrap();
        let b = sweep_feature_length(&[4], &data, &tiny_config()).unwrap();
        let wa = a[0].outcome.as_ref().unwrap().weights.flatten();
        let wb = b[0].outcome.as_ref().unwrap().weights.flatten();
        assert_eq!(wa, wb);
    }
}
