//! Softmax cross-entropy.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::tensor::Tensor2D;

/// Mean softmax cross-entropy over a batch.
///
/// `logits` is `batch × classes`, `labels[b]` the true class of row `b`.
/// Returns the mean loss and `dL/dlogits`, which is `(softmax(z_b) −
/// onehot(y_b)) / batch` row by row. Rows are shifted by their maximum before
/// exponentiation, so finite logits always produce finite outputs.
pub fn softmax_cross_entropy<T: Scalar>(
    logits: &Tensor2D<T>,
    labels: &[usize],
) -> Result<(T, Tensor2D<T>)> {
    let (batch, classes) = logits.shape();
    if batch == 0 || classes == 0 {
        return Err(Error::Empty("softmax_cross_entropy"));
    }
    if labels.len() != batch {
        return Err(Error::LengthMismatch {
            context: "softmax_cross_entropy labels",
            expected: batch,
            found: labels.len(),
        });
    }
    if let Some(&bad) = labels.iter().find(|&&y| y >= classes) {
        return Err(Error::LabelOutOfRange {
            label: bad,
            num_classes: classes,
        });
    }

    let inv_b = T::one() / T::from(batch).unwrap();
    let mut grad = Tensor2D::zeros(batch, classes);
    let mut loss = T::zero();
    for (b, (row, grad_row)) in logits.row_iter().zip(grad.row_iter_mut()).enumerate() {
        let m = row.iter().fold(T::neg_infinity(), |acc, &v| acc.max(v));
        let mut denom = T::zero();
        for (g, &z) in grad_row.iter_mut().zip(row) {
            let e = (z - m).exp();
            *g = e;
            denom += e;
        }
        let y = labels[b];
        loss += denom.ln() - (row[y] - m);
        for g in grad_row.iter_mut() {
            *g /= denom;
        }
        grad_row[y] -= T::one();
        for g in grad_row.iter_mut() {
            *g *= inv_b;
        }
    }
    Ok((loss * inv_b, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::gradcheck::{finite_difference_grad, max_relative_error, DEFAULT_FD_STEP};
    use crate::rng::DetRng;

    #[test]
    fn uniform_logits_cost_ln_k() {
        let logits: Tensor2D<f64> = Tensor2D::zeros(4, 3);
        let (loss, _) = softmax_cross_entropy(&logits, &[0, 1, 2, 0]).unwrap();
        assert!((loss - 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn confident_correct_prediction_has_small_loss() {
        let logits = Tensor2D::from_vec(1, 3, vec![20.0, 0.0, 0.0]).unwrap();
        let (loss, _) = softmax_cross_entropy(&logits, &[0]).unwrap();
        assert!(loss < 1e-8, "{loss}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = DetRng::seed(42);
        let batch = 5;
        let classes = 3;
        let flat: Vec<f64> = (0..batch * classes).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
        let labels = [0usize, 2, 1, 1, 0];

        let logits = Tensor2D::from_vec(batch, classes, flat.clone()).unwrap();
        let (_, grad) = softmax_cross_entropy(&logits, &labels).unwrap();

        let f = |p: &[f64]| {
            let t = Tensor2D::from_vec(batch, classes, p.to_vec()).unwrap();
            softmax_cross_entropy(&t, &labels).unwrap().0
        };
        let fd = finite_difference_grad(f, &flat, DEFAULT_FD_STEP);
        let err = max_relative_error(grad.data(), &fd, 1e-10);
        assert!(err < 1e-6, "relative error {err}");
    }

    #[test]
    fn grad_rows_sum_to_zero() {
        let logits = Tensor2D::from_vec(2, 3, vec![1.0, -0.5, 0.25, 3.0, 3.0, -1.0]).unwrap();
        let (_, grad) = softmax_cross_entropy(&logits, &[2, 0]).unwrap();
        for row in grad.row_iter() {
            let s: f64 = row.iter().sum();
            assert!(s.abs() < 1e-15, "{s}");
        }
    }

    #[test]
    fn huge_logits_stay_finite() {
        let logits = Tensor2D::from_vec(1, 3, vec![1e4f64, -1e4, 0.0]).unwrap();
        let (loss, grad) = softmax_cross_entropy(&logits, &[1]).unwrap();
        assert!(loss.is_finite());
        assert!(grad.is_finite());
    }

    #[test]
    fn label_out_of_range_is_rejected() {
        let logits: Tensor2D<f64> = Tensor2D::zeros(1, 3);
        assert!(matches!(
            softmax_cross_entropy(&logits, &[3]),
            Err(Error::LabelOutOfRange { label: 3, num_classes: 3 })
        ));
    }

    #[test]
    fn empty_batch_is_rejected() {
        let logits: Tensor2D<f64> = Tensor2D::zeros(0, 3);
        assert!(matches!(
            softmax_cross_entropy(&logits, &[]),
            Err(Error::Empty(_))
        ));
    }
}
