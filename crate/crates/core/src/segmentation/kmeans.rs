use crate::error::{Error, Result};

/// Converged (or iteration-capped) 1D K-means.
#[derive(Clone, Debug, PartialEq)]
pub struct KMeans {
    /// Cluster centers in ascending order.
    pub centers: Vec<f64>,
    pub labels: Vec<usize>,
    pub iterations: usize,
    /// Within-cluster sum of squares after each assignment step.
    pub objective_history: Vec<f64>,
}

fn nearest(centers: &[f64], v: f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, &c) in centers.iter().enumerate() {
        let d = (v - c).abs();
        if d < best_d {
            best_d = d;
            best = k;
        }
    }
    best
}

fn objective(values: &[f64], centers: &[f64], labels: &[usize]) -> f64 {
    values
        .iter()
        .zip(labels)
        .map(|(&v, &l)| (v - centers[l]).powi(2))
        .sum()
}

/// Lloyd iterations on scalar values.
///
/// Centers start at evenly spaced quantiles of the distinct values, so the
/// result is deterministic. Iteration stops when no label changes or after
/// `max_iter` assignment steps. An emptied cluster keeps its old center.
pub fn kmeans_1d(values: &[f64], k: usize, max_iter: usize) -> Result<KMeans> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be >= 2, got {k}")));
    }
    if max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("values must be finite".into()));
    }
    let mut distinct = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < k {
        return Err(Error::DegenerateInput(format!(
            "{} distinct values for {k} clusters",
            distinct.len()
        )));
    }
    let m = distinct.len();
    let mut centers: Vec<f64> = (0..k)
        .map(|i| distinct[((2 * i + 1) * m / (2 * k)).min(m - 1)])
        .collect();

    let mut labels: Vec<usize> = values.iter().map(|&v| nearest(&centers, v)).collect();
    let mut objective_history = vec![objective(values, &centers, &labels)];
    let mut iterations = 1;
    while iterations < max_iter {
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (&v, &l) in values.iter().zip(&labels) {
            sums[l] += v;
            counts[l] += 1;
        }
        for j in 0..k {
            if counts[j] > 0 {
                centers[j] = sums[j] / counts[j] as f64;
            }
        }
        let next: Vec<usize> = values.iter().map(|&v| nearest(&centers, v)).collect();
        iterations += 1;
        let changed = next != labels;
        labels = next;
        objective_history.push(objective(values, &centers, &labels));
        if !changed {
            break;
        }
    }
    // Final center update so centers are the means of the final clusters.
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (&v, &l) in values.iter().zip(&labels) {
        sums[l] += v;
        counts[l] += 1;
    }
    for j in 0..k {
        if counts[j] > 0 {
            centers[j] = sums[j] / counts[j] as f64;
        }
    }
    Ok(KMeans {
        centers,
        labels,
        iterations,
        objective_history,
    })
}
