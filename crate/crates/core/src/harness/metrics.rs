use crate::error::{Error, Result};
use crate::fire_model::FireFront;

/// Root of the mean squared error over all `2N` vertex coordinates.
pub fn rmse(estimate: &FireFront, truth: &FireFront) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::VertexCountMismatch(estimate.len(), truth.len()));
    }
    let sq: f64 = estimate
        .vertices()
        .iter()
        .zip(truth.vertices())
        .map(|(&e, &t)| e.distance_sq(t))
        .sum();
    Ok((sq / (2 * truth.len()) as f64).sqrt())
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
