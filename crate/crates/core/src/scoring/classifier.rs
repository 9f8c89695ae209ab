//! Logistic-regression pair classifier trained by SGD.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainHyper {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// L2 penalty on the standardized weights.
    pub l2: f64,
    /// Fraction of each class held out for evaluation.
    pub holdout_fraction: f64,
}

impl Default for TrainHyper {
    fn default() -> Self {
        Self { learning_rate: 0.1, epochs: 20, seed: 13, l2: 1e-4, holdout_fraction: 0.1 }
    }
}

impl TrainHyper {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config("learning_rate must be > 0".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(Error::Config("l2 must be >= 0".into()));
        }
        if !(0.0..1.0).contains(&self.holdout_fraction) {
            return Err(Error::Config("holdout_fraction must be in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerModel {
    pub feature_names: Vec<String>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub hyper: TrainHyper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub train_size: usize,
    pub heldout_size: usize,
    /// `None` when nothing was held out.
    pub heldout_accuracy: Option<f64>,
    /// `None` unless both classes are present in the held-out split.
    pub heldout_auc: Option<f64>,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl ScorerModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let z: f64 = self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        sigmoid(z)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("model serializes");
        std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: Self = serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
        if model.weights.len() != model.feature_names.len() {
            return Err(Error::parse(path, 0, "weight count differs from feature count"));
        }
        Ok(model)
    }
}

/// Train on labelled feature vectors. Standardization statistics come from
/// the training split and are folded back into the returned weights.
pub fn train_scorer(
    feature_names: &[&str],
    positives: &[Vec<f64>],
    negatives: &[Vec<f64>],
    hyper: &TrainHyper,
) -> Result<(ScorerModel, TrainReport)> {
    hyper.validate()?;
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::InvalidInput("classifier training needs both positive and negative examples".into()));
    }
    let dim = feature_names.len();
    if positives.iter().chain(negatives).any(|x| x.len() != dim) {
        return Err(Error::InvalidInput(format!("every feature vector must have {dim} values")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut train: Vec<(&[f64], f64)> = Vec::new();
    let mut held: Vec<(&[f64], f64)> = Vec::new();
    for (set, label) in [(positives, 1.0), (negatives, 0.0)] {
        let mut idx: Vec<usize> = (0..set.len()).collect();
        idx.shuffle(&mut rng);
        let k = if set.len() >= 2 { ((set.len() as f64 * hyper.holdout_fraction) as usize).max(1) } else { 0 };
        let k = if hyper.holdout_fraction == 0.0 { 0 } else { k };
        for (r, &i) in idx.iter().enumerate() {
            let item = (set[i].as_slice(), label);
            if r < k {
                held.push(item);
            } else {
                train.push(item);
            }
        }
    }

    let mut mean = vec![0.0; dim];
    let mut std = vec![0.0; dim];
    for (x, _) in &train {
        for d in 0..dim {
            mean[d] += x[d];
        }
    }
    mean.iter_mut().for_each(|m| *m /= train.len() as f64);
    for (x, _) in &train {
        for d in 0..dim {
            std[d] += (x[d] - mean[d]).powi(2);
        }
    }
    for s in &mut std {
        *s = (*s / train.len() as f64).sqrt();
        if *s < 1e-12 {
            *s = 1.0;
        }
    }

    // Class-balanced weights so a skewed negative ratio does not shift the bias.
    let n_pos = train.iter().filter(|(_, y)| *y == 1.0).count().max(1) as f64;
    let n_neg = train.iter().filter(|(_, y)| *y == 0.0).count().max(1) as f64;
    let total = n_pos + n_neg;
    let class_weight = |y: f64| if y == 1.0 { total / (2.0 * n_pos) } else { total / (2.0 * n_neg) };

    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut z = vec![0.0; dim];
    let mut order: Vec<usize> = (0..train.len()).collect();
    for epoch in 0..hyper.epochs {
        order.shuffle(&mut rng);
        let lr = hyper.learning_rate / (1.0 + 0.1 * epoch as f64);
        for &k in &order {
            let (x, y) = train[k];
            for d in 0..dim {
                z[d] = (x[d] - mean[d]) / std[d];
            }
            let p = sigmoid(b + w.iter().zip(&z).map(|(a, c)| a * c).sum::<f64>());
            let g = (p - y) * class_weight(y);
            for d in 0..dim {
                w[d] -= lr * (g * z[d] + hyper.l2 * w[d]);
            }
            b -= lr * g;
        }
    }

    let weights: Vec<f64> = (0..dim).map(|d| w[d] / std[d]).collect();
    let bias = b - (0..dim).map(|d| w[d] * mean[d] / std[d]).sum::<f64>();
    let model = ScorerModel { feature_names: feature_names.iter().map(|s| s.to_string()).collect(), weights, bias, hyper: *hyper };

    let scores: Vec<f64> = held.iter().map(|(x, _)| model.predict(x)).collect();
    let labels: Vec<bool> = held.iter().map(|(_, y)| *y == 1.0).collect();
    let heldout_accuracy = (!held.is_empty()).then(|| {
        scores.iter().zip(&labels).filter(|(s, l)| (**s >= 0.5) == **l).count() as f64 / held.len() as f64
    });
    let report = TrainReport { train_size: train.len(), heldout_size: held.len(), heldout_accuracy, heldout_auc: auc(&scores, &labels) };
    Ok((model, report))
}

/// Area under the ROC curve (Mann-Whitney, ties count one half). `None`
/// unless both classes occur.
pub fn auc(scores: &[f64], labels: &[bool]) -> Option<f64> {
    assert_eq!(scores.len(), labels.len());
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let (mut neg_below, mut greater2) = (0u128, 0u128);
    let (mut n_pos, mut n_neg) = (0u128, 0u128);
    let mut k = 0;
    while k < idx.len() {
        let mut end = k;
        while end < idx.len() && scores[idx[end]] == scores[idx[k]] {
            end += 1;
        }
        let pos = idx[k..end].iter().filter(|&&i| labels[i]).count() as u128;
        let neg = (end - k) as u128 - pos;
        greater2 += 2 * pos * neg_below + pos * neg;
        neg_below += neg;
        n_pos += pos;
        n_neg += neg;
        k = end;
    }
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    Some(greater2 as f64 / (2 * n_pos * n_neg) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_toy_set() {
        let pos: Vec<Vec<f64>> = (0..50).map(|_| vec![0.9]).collect();
        let neg: Vec<Vec<f64>> = (0..50).map(|_| vec![0.1]).collect();
        let (model, report) = train_scorer(&["yisi2"], &pos, &neg, &TrainHyper::default()).unwrap();
        assert_eq!(report.heldout_accuracy, Some(1.0));
        assert!(model.predict(&[0.9]) > 0.5 && model.predict(&[0.1]) < 0.5);
        assert_eq!(model.weights.len(), 1);
    }

    #[test]
    fn single_class_rejected() {
        let pos = vec![vec![1.0]];
        assert!(train_scorer(&["x"], &pos, &[], &TrainHyper::default()).is_err());
        assert!(train_scorer(&["x"], &[], &pos, &TrainHyper::default()).is_err());
    }

    #[test]
    fn auc_values() {
        assert_eq!(auc(&[0.1, 0.9], &[false, true]), Some(1.0));
        assert_eq!(auc(&[0.5, 0.5], &[false, true]), Some(0.5));
        assert_eq!(auc(&[0.3, 0.2], &[true, true]), None);
        let s = [0.1, 0.4, 0.35, 0.8, 0.4];
        let l = [false, false, true, true, true];
        let flipped: Vec<bool> = l.iter().map(|b| !b).collect();
        let a = auc(&s, &l).unwrap();
        assert!((auc(&s, &flipped).unwrap() - (1.0 - a)).abs() < 1e-12);
        // Pairs: (0.35 vs 0.1, 0.4) 1+0, (0.8) 2, (0.4 vs 0.1, 0.4) 1+0.5 -> 4.5 / 6
        assert!((a - 0.75).abs() < 1e-12);
    }

    #[test]
    fn deterministic_and_roundtrips() {
        let pos: Vec<Vec<f64>> = (0..40).map(|i| vec![0.5 + i as f64 / 100.0, 1.0]).collect();
        let neg: Vec<Vec<f64>> = (0..40).map(|i| vec![0.2 + i as f64 / 100.0, 0.0]).collect();
        let a = train_scorer(&["a", "b"], &pos, &neg, &TrainHyper::default()).unwrap();
        let b = train_scorer(&["a", "b"], &pos, &neg, &TrainHyper::default()).unwrap();
        assert_eq!(a, b);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        a.0.save(&p).unwrap();
        assert_eq!(ScorerModel::load(&p).unwrap(), a.0);
    }
}
