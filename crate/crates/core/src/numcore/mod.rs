//! Numeric core: tensors, layers, loss, optimizer, and a gradient oracle.
//!
//! All operations are pure functions of their inputs ([`adam_step`] returns a
//! fresh state instead of mutating), hold no shared state, and fix their
//! floating-point accumulation orders explicitly, so identical inputs give
//! bit-identical outputs on any worker.

mod adam;
mod gradcheck;
mod linear;
mod loss;
mod tensor;

pub use adam::{adam_step, AdamState};
pub use gradcheck::{finite_difference_grad, max_relative_error, DEFAULT_FD_STEP};
pub use linear::{relu, relu_backward, LinearLayer};
pub use loss::softmax_cross_entropy;
pub use tensor::Tensor2D;
