//! Adam optimizer over flat parameter vectors.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Optimizer state: step counter plus first/second moment estimates, one entry
/// per parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T> {
    pub t: u64,
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
}

impl<T: Scalar> AdamState<T> {
    /// Fresh state with the standard hyperparameters
    /// (β1 = 0.9, β2 = 0.999, ε = 1e-8).
    pub fn new(param_count: usize) -> Self {
        AdamState {
            t: 0,
            m: vec![T::zero(); param_count],
            v: vec![T::zero(); param_count],
            beta1: T::from(0.9).unwrap(),
            beta2: T::from(0.999).unwrap(),
            epsilon: T::from(1e-8).unwrap(),
        }
    }
}

/// One Adam update. Pure: returns the new parameters and state, leaving the
/// inputs untouched. The step counter is incremented before bias correction:
///
/// ```text
/// t ← t + 1
/// m ← β1·m + (1−β1)·g        v ← β2·v + (1−β2)·g²
/// m̂ = m / (1−β1ᵗ)            v̂ = v / (1−β2ᵗ)
/// θ ← θ − lr · m̂ / (√v̂ + ε)
/// ```
///
/// A non-finite gradient rejects the whole step.
pub fn adam_step<T: Scalar>(
    params: &[T],
    grads: &[T],
    state: &AdamState<T>,
    lr: T,
) -> Result<(Vec<T>, AdamState<T>)> {
    if grads.len() != params.len() {
        return Err(Error::LengthMismatch {
            context: "adam_step grads",
            expected: params.len(),
            found: grads.len(),
        });
    }
    if state.m.len() != params.len() || state.v.len() != params.len() {
        return Err(Error::LengthMismatch {
            context: "adam_step state",
            expected: params.len(),
            found: state.m.len(),
        });
    }
    if grads.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("adam_step gradient"));
    }

    let t = state.t + 1;
    let one = T::one();
    let b1 = state.beta1;
    let b2 = state.beta2;
    let m_corr = one / (one - b1.powi(t as i32));
    let v_corr = one / (one - b2.powi(t as i32));

    let mut next = AdamState {
        t,
        m: Vec::with_capacity(params.len()),
        v: Vec::with_capacity(params.len()),
        beta1: b1,
        beta2: b2,
        epsilon: state.epsilon,
    };
    let mut out = Vec::with_capacity(params.len());
    for i in 0..params.len() {
        let g = grads[i];
        let m = b1 * state.m[i] + (one - b1) * g;
        let v = b2 * state.v[i] + (one - b2) * g * g;
        let m_hat = m * m_corr;
        let v_hat = v * v_corr;
        out.push(params[i] - lr * m_hat / (v_hat.sqrt() + state.epsilon));
        next.m.push(m);
        next.v.push(v);
    }
    Ok((out, next))
}
