//! What the trained classifier actually looks at.
//!
//! The max pool makes the global feature depend on a handful of points: the
//! per-dimension arg-max winners. [`critical_points`] extracts that set; a
//! forward pass over it alone reproduces the global feature bit for bit.
//! [`upper_bound_points`] goes the other way, scanning a cube of candidate
//! positions for points whose features are dominated elementwise by the
//! global feature; such points can be added to the cloud without changing
//! the classification at all, which is why pool-style classifiers shrug off
//! clutter between the shapes they key on.
//!
//! Both analyses are defined for the directional variant only. With learned
//! transforms the per-point map is conditioned on the whole cloud, so
//! subset and addition invariances no longer hold.
//!
//! [`sweep_feature_length`] retrains the directional model across global
//! feature lengths to expose the capacity knee.

mod bound;
mod critical;
mod sweep;

pub use bound::{upper_bound_points, CubeSpec};
pub use critical::{critical_points, CriticalSet};
pub use sweep::{sweep_feature_length, SweepEntry, DEFAULT_SWEEP_LENGTHS};

use crate::error::{Error, Result};
use crate::model::{ModelWeights, Variant};

/// Rejects weights whose per-point map is cloud-conditioned.
fn require_directional(w: &ModelWeights) -> Result<()> {
    match w.spec.variant {
        Variant::Directional => Ok(()),
        Variant::BaselineTNet(_) => Err(Error::InvalidParam(
            "point-set analysis is defined for the directional variant only".into(),
        )),
    }
}
