//! Analytic parameter and FLOP accounting.
//!
//! Counts are derived from the spec alone, never from instantiated weights,
//! so they stay meaningful for sizes too large to build. The unit tests pin
//! them against actual built models.
//!
//! Accounting convention: a per-point layer contributes `n · in · out`
//! multiply-accumulates, a single-vector layer `in · out`, and a learned
//! transform `n · d · d` for its application. Bias additions, ReLU, and the
//! max pool are excluded. [`FlopConvention::Mac`] counts each
//! multiply-accumulate once; [`FlopConvention::Flop2`] counts the multiply
//! and the add separately, giving exactly twice the MAC count.

use super::{ModelSpec, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlopConvention {
    Mac,
    Flop2,
}

fn chain_params(mut in_dim: usize, widths: &[usize]) -> usize {
    let mut total = 0;
    for &w in widths {
        total += in_dim * w + w;
        in_dim = w;
    }
    total
}

fn chain_macs(mut in_dim: u64, widths: &[usize], rows: u64) -> u64 {
    let mut total = 0;
    for &w in widths {
        total += rows * in_dim * w as u64;
        in_dim = w as u64;
    }
    total
}

/// Learnable parameter count implied by the spec.
pub fn count_params(spec: &ModelSpec) -> usize {
    let mut total = chain_params(3, &spec.per_point_widths)
        + chain_params(spec.feature_length(), &spec.classifier_widths);
    if let Variant::BaselineTNet(cfg) = &spec.variant {
        let tnet = |d: usize| {
            let last_point = *cfg.point_widths.last().expect("nonempty");
            let last_fc = *cfg.fc_widths.last().expect("nonempty");
            chain_params(d, &cfg.point_widths)
                + chain_params(last_point, &cfg.fc_widths)
                + (last_fc * d * d + d * d)
        };
        if cfg.input_transform {
            total += tnet(3);
        }
        if cfg.feature_transform {
            total += tnet(spec.per_point_widths[1]);
        }
    }
    total
}

/// Cost of one forward pass over a cloud of `num_points` points.
pub fn count_flops(spec: &ModelSpec, num_points: usize, convention: FlopConvention) -> u64 {
    let n = num_points as u64;
    let mut macs = chain_macs(3, &spec.per_point_widths, n)
        + chain_macs(spec.feature_length() as u64, &spec.classifier_widths, 1);
    if let Variant::BaselineTNet(cfg) = &spec.variant {
        let tnet = |d: usize| {
            let d = d as u64;
            let last_point = *cfg.point_widths.last().expect("nonempty") as u64;
            let last_fc = *cfg.fc_widths.last().expect("nonempty") as u64;
            chain_macs(d, &cfg.point_widths, n)
                + chain_macs(last_point, &cfg.fc_widths, 1)
                + last_fc * d * d
                + n * d * d
        };
        if cfg.input_transform {
            macs += tnet(3);
        }
        if cfg.feature_transform {
            macs += tnet(spec.per_point_widths[1]);
        }
    }
    match convention {
        FlopConvention::Mac => macs,
        FlopConvention::Flop2 => 2 * macs,
    }
}
