//! Cross-checks the generator's intended labels against the geometry-only
//! oracle over a mixed corpus of both corruption regimes.

use std::sync::OnceLock;

use terrain_pointnet::datagen::{build_dataset, label_oracle, Dataset, DatasetSpec, Regime};

fn corpus() -> &'static Dataset {
    static DATA: OnceLock<Dataset> = OnceLock::new();
    DATA.get_or_init(|| build_dataset(&DatasetSpec::desk(21)).expect("desk corpus"))
}

#[test]
fn oracle_agrees_with_generator_on_every_clean_sample() {
    let data = corpus();
    let mut checked = 0;
    for i in 0..data.len() {
        if data.regime(i) != Regime::CleanSim {
            continue;
        }
        let label = label_oracle(data.cloud(i)).expect("oracle label");
        assert_eq!(label, data.class(i), "sample {i}");
        checked += 1;
    }
    assert_eq!(checked, data.len() / 2);
}

#[test]
fn oracle_agrees_with_generator_on_nearly_all_noisy_samples() {
    let data = corpus();
    let mut total = 0;
    let mut agree = 0;
    for i in 0..data.len() {
        if data.regime(i) != Regime::NoisySim {
            continue;
        }
        total += 1;
        if label_oracle(data.cloud(i)).expect("oracle label") == data.class(i) {
            agree += 1;
        }
    }
    let rate = agree as f64 / total as f64;
    assert!(rate >= 0.99, "noisy agreement {rate:.4} ({agree}/{total})");
}
