//! Fully connected layer and ReLU.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::tensor::Tensor2D;

/// Affine map `y = x · W + b` with `W` stored input-major (`in_dim × out_dim`).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearLayer<T> {
    pub weights: Tensor2D<T>,
    pub bias: Vec<T>,
}

impl<T: Scalar> LinearLayer<T> {
    pub fn new(weights: Tensor2D<T>, bias: Vec<T>) -> Result<Self> {
        if bias.len() != weights.cols() {
            return Err(Error::LengthMismatch {
                context: "LinearLayer::new bias",
                expected: weights.cols(),
                found: bias.len(),
            });
        }
        Ok(LinearLayer { weights, bias })
    }

    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        LinearLayer {
            weights: Tensor2D::zeros(in_dim, out_dim),
            bias: vec![T::zero(); out_dim],
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.cols()
    }

    /// Weights plus biases.
    pub fn param_count(&self) -> usize {
        self.in_dim() * self.out_dim() + self.out_dim()
    }

    /// Applies the layer to a batch of row vectors (`x: batch × in_dim`).
    pub fn forward(&self, x: &Tensor2D<T>) -> Result<Tensor2D<T>> {
        if x.cols() != self.in_dim() {
            return Err(Error::ShapeMismatch {
                context: "linear forward",
                expected: (x.rows(), self.in_dim()),
                found: x.shape(),
            });
        }
        let mut out = x.matmul(&self.weights)?;
        for row in out.row_iter_mut() {
            for (o, &b) in row.iter_mut().zip(&self.bias) {
                *o += b;
            }
        }
        Ok(out)
    }
}

/// Elementwise `max(0, x)`.
pub fn relu<T: Scalar>(x: &Tensor2D<T>) -> Tensor2D<T> {
    let mut out = x.clone();
    for v in out.data_mut() {
        if *v < T::zero() {
            *v = T::zero();
        }
    }
    out
}

/// Routes `grad` through ReLU given the post-activation values: passes where
/// the activation is strictly positive, zero elsewhere (subgradient 0 at 0).
pub fn relu_backward<T: Scalar>(grad: &Tensor2D<T>, activated: &Tensor2D<T>) -> Result<Tensor2D<T>> {
    if grad.shape() != activated.shape() {
        return Err(Error::ShapeMismatch {
            context: "relu_backward",
            expected: activated.shape(),
            found: grad.shape(),
        });
    }
    let mut out = grad.clone();
    for (g, &a) in out.data_mut().iter_mut().zip(activated.data()) {
        if a <= T::zero() {
            *g = T::zero();
        }
    }
    Ok(out)
}
