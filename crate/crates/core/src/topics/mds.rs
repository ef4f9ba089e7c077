//! Intertopic distance map: Jensen-Shannon divergence between topic-word
//! distributions, embedded in 2D by classical multidimensional scaling.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{TopicError, TopicModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicPoint {
    pub topic: usize,
    pub x: f64,
    pub y: f64,
    /// The topic's prevalence p(t).
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntertopicMap {
    pub points: Vec<TopicPoint>,
    /// Pairwise divergences, `k x k`.
    pub divergence: Vec<Vec<f64>>,
}

fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(a, _)| **a > 0.0).map(|(a, b)| a * (a / b).ln()).sum()
}

/// Jensen-Shannon divergence in nats, bounded by ln 2.
pub fn jensen_shannon(p: &[f64], q: &[f64]) -> f64 {
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    (0.5 * kl(p, &m) + 0.5 * kl(q, &m)).max(0.0)
}

pub fn intertopic_coordinates(model: &TopicModel) -> Result<IntertopicMap, TopicError> {
    let k = model.k;
    if k < 2 {
        return Err(TopicError::NeedTwoTopics);
    }
    let mut divergence = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let d = jensen_shannon(&model.phi[i], &model.phi[j]);
            divergence[i][j] = d;
            divergence[j][i] = d;
        }
    }

    // B = -1/2 H D^2 H with the centering matrix H = I - 11'/k.
    let d2 = DMatrix::from_fn(k, k, |i, j| divergence[i][j] * divergence[i][j]);
    let h = DMatrix::<f64>::identity(k, k) - DMatrix::from_element(k, k, 1.0 / k as f64);
    let b = (&h * d2 * &h) * -0.5;
    let b = (&b + b.transpose()) * 0.5;
    let eig = SymmetricEigen::new(b);

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &c| eig.eigenvalues[c].partial_cmp(&eig.eigenvalues[a]).unwrap().then(a.cmp(&c)));
    let axis = |n: usize| -> Vec<f64> {
        let Some(&col) = order.get(n) else { return vec![0.0; k] };
        let scale = eig.eigenvalues[col].max(0.0).sqrt();
        let v = eig.eigenvectors.column(col);
        // Orient so the largest-magnitude component is positive.
        let pivot = (0..k).fold(0, |best, i| if v[i].abs() > v[best].abs() + 1e-12 { i } else { best });
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        (0..k).map(|i| sign * scale * v[i]).collect()
    };
    let (xs, ys) = (axis(0), axis(1));
    let points = (0..k)
        .map(|t| TopicPoint { topic: t, x: xs[t], y: ys[t], size: model.topic_prevalence[t] })
        .collect();
    Ok(IntertopicMap { points, divergence })
}
