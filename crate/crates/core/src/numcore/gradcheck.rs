//! Finite-difference gradient oracle.
//!
//! Central differences on `f64` with the default step resolve gradients to
//! roughly 1e-10 relative error, far below the 1e-4 tolerance used to accept
//! analytic gradients, so disagreement always points at the analytic side.

use crate::scalar::Scalar;

/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Estimates `∇f` at `params` by central differences:
/// `g_i = (f(θ + h·e_i) − f(θ − h·e_i)) / 2h`.
pub fn finite_difference_grad<T, F>(mut f: F, params: &[T], h: T) -> Vec<T>
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
{
    let two_h = h + h;
    let mut scratch = params.to_vec();
    let mut grad = Vec::with_capacity(params.len());
    for i in 0..params.len() {
        let saved = scratch[i];
        scratch[i] = saved + h;
        let plus = f(&scratch);
        scratch[i] = saved - h;
        let minus = f(&scratch);
        scratch[i] = saved;
        grad.push((plus - minus) / two_h);
    }
    grad
}

/// Largest relative disagreement between paired values, ignoring pairs where
/// both magnitudes sit below `floor` (those are zero-vs-roundoff noise).
pub fn max_relative_error<T: Scalar>(a: &[T], b: &[T], floor: T) -> T {
    assert_eq!(a.len(), b.len(), "mismatched slice lengths");
    let mut worst = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let scale = x.abs().max(y.abs());
        if scale <= floor {
            continue;
        }
        let rel = (x - y).abs() / scale;
        if rel > worst {
            worst = rel;
        }
    }
    worst
}
