//! A small multinomial linear classifier standing in for the heavyweight
//! in-vehicle predictor: softmax regression trained by full-batch gradient
//! descent from a zero initialization, so training is deterministic without
//! any RNG.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub epochs: u32,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            epochs: 200,
            learning_rate: 0.5,
            l2: 1e-4,
        }
    }
}

/// Softmax weights, `classes x (feature_dim + 1)` row-major; the last column
/// is the bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub classes: u32,
    pub feature_dim: usize,
    weights: Vec<f64>,
}

impl LinearModel {
    fn scores(&self, x: &[f64]) -> Vec<f64> {
        let stride = self.feature_dim + 1;
        (0..self.classes as usize)
            .map(|c| {
                let w = &self.weights[c * stride..(c + 1) * stride];
                w[self.feature_dim] + x.iter().zip(w).map(|(xi, wi)| xi * wi).sum::<f64>()
            })
            .collect()
    }

    /// Argmax class; ties resolve to the lowest class index.
    pub fn predict(&self, x: &[f64]) -> u32 {
        let scores = self.scores(x);
        let mut best = 0usize;
        for (c, s) in scores.iter().enumerate().skip(1) {
            if *s > scores[best] {
                best = c;
            }
        }
        best as u32
    }

    /// Fraction of correctly predicted labels.
    pub fn accuracy(&self, features: &[Vec<f64>], labels: &[u32]) -> f64 {
        if features.is_empty() {
            return 0.0;
        }
        let correct = features
            .iter()
            .zip(labels)
            .filter(|(x, &y)| self.predict(x) == y)
            .count();
        correct as f64 / features.len() as f64
    }
}

/// Full-batch gradient descent on the softmax cross-entropy with L2 decay.
/// Deterministic: zero-initialized weights, fixed epoch count.
pub fn train_predictor(
    features: &[Vec<f64>],
    labels: &[u32],
    classes: u32,
    hp: &Hyperparams,
) -> Result<LinearModel> {
    if features.is_empty() {
        return Err(Error::InvalidParameter("empty training set".into()));
    }
    if features.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} feature rows vs {} labels",
            features.len(),
            labels.len()
        )));
    }
    if classes == 0 {
        return Err(Error::InvalidParameter("need at least one class".into()));
    }
    let p = features[0].len();
    if features.iter().any(|x| x.len() != p) {
        return Err(Error::DimensionMismatch("ragged feature rows".into()));
    }
    if let Some(&bad) = labels.iter().find(|&&y| y >= classes) {
        return Err(Error::InvalidParameter(format!(
            "label {bad} out of range 0..{classes}"
        )));
    }

    let k = classes as usize;
    let stride = p + 1;
    let n = features.len() as f64;
    let mut weights = vec![0.0f64; k * stride];
    let mut grad = vec![0.0f64; k * stride];
    let mut probs = vec![0.0f64; k];

    for _ in 0..hp.epochs {
        for (g, w) in grad.iter_mut().zip(&weights) {
            *g = hp.l2 * w;
        }
        for (x, &y) in features.iter().zip(labels) {
            // stable softmax
            let mut max = f64::NEG_INFINITY;
            for c in 0..k {
                let w = &weights[c * stride..(c + 1) * stride];
                let s = w[p] + x.iter().zip(w).map(|(xi, wi)| xi * wi).sum::<f64>();
                probs[c] = s;
                max = max.max(s);
            }
            let mut z = 0.0;
            for pr in probs.iter_mut() {
                *pr = (*pr - max).exp();
                z += *pr;
            }
            for c in 0..k {
                let delta = (probs[c] / z - f64::from(u32::from(c as u32 == y))) / n;
                let row = &mut grad[c * stride..(c + 1) * stride];
                for (gj, xj) in row.iter_mut().zip(x) {
                    *gj += delta * xj;
                }
                row[p] += delta;
            }
        }
        for (w, g) in weights.iter_mut().zip(&grad) {
            *w -= hp.learning_rate * g;
        }
    }

    Ok(LinearModel {
        classes,
        feature_dim: p,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linearly_separable_data_trains_to_high_accuracy() {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        let mut rng = crate::rng::RngSeed(12).rng();
        for i in 0..200 {
            let class = i % 2;
            let center = if class == 0 { 0.25 } else { 0.75 };
            features.push(vec![
                (center + 0.05 * rng.normal()).clamp(0.0, 1.0),
                (center + 0.05 * rng.normal()).clamp(0.0, 1.0),
            ]);
            labels.push(class as u32);
        }
        let model = train_predictor(&features, &labels, 2, &Hyperparams::default()).unwrap();
        assert!(model.accuracy(&features, &labels) >= 0.95);
    }

    #[test]
    fn single_class_data_predicts_that_class_everywhere() {
        let features = vec![vec![0.2, 0.8], vec![0.5, 0.5], vec![0.9, 0.1]];
        let labels = vec![2u32, 2, 2];
        let model = train_predictor(&features, &labels, 4, &Hyperparams::default()).unwrap();
        for x in &[vec![0.0, 0.0], vec![1.0, 1.0], vec![0.3, 0.7]] {
            assert_eq!(model.predict(x), 2);
        }
    }

    #[test]
    fn training_is_deterministic() {
        let features = vec![vec![0.1, 0.9], vec![0.8, 0.2], vec![0.4, 0.6]];
        let labels = vec![0u32, 1, 0];
        let a = train_predictor(&features, &labels, 2, &Hyperparams::default()).unwrap();
        let b = train_predictor(&features, &labels, 2, &Hyperparams::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(train_predictor(&[], &[], 2, &Hyperparams::default()).is_err());
        let features = vec![vec![0.1, 0.9]];
        assert!(train_predictor(&features, &[5], 2, &Hyperparams::default()).is_err());
        assert!(train_predictor(&features, &[0, 1], 2, &Hyperparams::default()).is_err());
    }
}
