//! Linear UCB over an explicit candidate action list.

use super::confidence::EllipsoidConfidence;
use super::Agent;
use crate::error::{Error, Result};
use crate::geometry::norm;
use nalgebra::{DMatrix, DVector};

/// Optimistic ridge-regression policy: maintains the regularized least
/// squares estimate over observed (feature, reward) pairs and plays the
/// candidate maximizing `center . x + beta_t ||x||_{V_t^{-1}}`, with
/// `beta_t = sigma_r sqrt(dim ln((1 + t/lambda)/delta)) + sqrt(lambda)`,
/// ties toward the lower index.
pub struct LinUcb {
    candidates: Vec<Vec<f64>>,
    features: Vec<DVector<f64>>,
    lambda: f64,
    sigma_r: f64,
    confidence_delta: f64,
    reward_offset: f64,
    v: DMatrix<f64>,
    v_inv: DMatrix<f64>,
    xty: DVector<f64>,
    /// Cached `x_i^T V^{-1} x_i` per candidate, maintained through the same
    /// rank-1 updates as `v_inv` so `act` is linear in the candidate count.
    quad: Vec<f64>,
    pending: Option<usize>,
}

impl LinUcb {
    /// `feature` maps a candidate action to its regression feature; feature
    /// norms must be <= 1. `reward_offset` is subtracted from every observed
    /// reward before the regression (a known constant reward shift).
    pub fn new<F: Fn(&[f64]) -> Vec<f64>>(
        candidates: Vec<Vec<f64>>,
        feature: F,
        lambda: f64,
        sigma_r: f64,
        confidence_delta: f64,
        reward_offset: f64,
    ) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::Config("lin_ucb needs at least one candidate".into()));
        }
        if !(lambda > 0.0) {
            return Err(Error::Config(format!("lin_ucb lambda must be > 0, got {lambda}")));
        }
        if !(confidence_delta > 0.0 && confidence_delta < 1.0) {
            return Err(Error::Config("lin_ucb delta must be in (0,1)".into()));
        }
        let features: Vec<DVector<f64>> = candidates
            .iter()
            .map(|a| DVector::from_vec(feature(a)))
            .collect();
        let dim = features[0].len();
        for f in &features {
            if f.len() != dim {
                return Err(Error::Config("inconsistent feature dimensions".into()));
            }
            if norm(f.as_slice()) > 1.0 + 1e-9 {
                return Err(Error::Config("lin_ucb feature norms must be <= 1".into()));
            }
        }
        let quad = features.iter().map(|x| x.dot(x) / lambda).collect();
        Ok(LinUcb {
            candidates,
            features,
            lambda,
            sigma_r,
            confidence_delta,
            reward_offset,
            v: DMatrix::identity(dim, dim) * lambda,
            v_inv: DMatrix::identity(dim, dim) / lambda,
            xty: DVector::zeros(dim),
            quad,
            pending: None,
        })
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    fn dim(&self) -> usize {
        self.xty.len()
    }

    /// `beta_t`; nondecreasing in `t`.
    pub fn beta(&self, t: usize) -> f64 {
        let log_term = ((1.0 + t as f64 / self.lambda) / self.confidence_delta).ln();
        self.sigma_r * (self.dim() as f64 * log_term).sqrt() + self.lambda.sqrt()
    }

    /// Current parameter confidence ellipsoid at round `t`.
    pub fn ellipsoid(&self, t: usize) -> Result<EllipsoidConfidence> {
        let center = &self.v_inv * &self.xty;
        EllipsoidConfidence::new(
            center.as_slice().to_vec(),
            self.v.clone(),
            self.v_inv.clone(),
            self.beta(t),
        )
    }

}

impl Agent for LinUcb {
    fn act(&mut self, t: usize) -> Result<Vec<f64>> {
        let center = &self.v_inv * &self.xty;
        let beta = self.beta(t);
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (i, x) in self.features.iter().enumerate() {
            let v = center.dot(x) + beta * self.quad[i].max(0.0).sqrt();
            if v > best_val {
                best_val = v;
                best = i;
            }
        }
        self.pending = Some(best);
        Ok(self.candidates[best].clone())
    }

    fn observe(&mut self, _t: usize, _a: &[f64], _b_obs: &[f64], reward: f64) -> Result<()> {
        let i = self
            .pending
            .take()
            .ok_or_else(|| Error::Runtime("lin_ucb observe without a preceding act".into()))?;
        let x = self.features[i].clone();
        // Sherman-Morrison rank-1 update of V^{-1} and the cached forms.
        let vx = &self.v_inv * &x;
        let denom = 1.0 + x.dot(&vx);
        for (q, f) in self.quad.iter_mut().zip(&self.features) {
            let c = vx.dot(f);
            *q -= c * c / denom;
        }
        self.v_inv -= (&vx * vx.transpose()) / denom;
        self.v += &x * x.transpose();
        self.xty += &x * (reward - self.reward_offset);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_to_better_candidate_noiselessly() {
        // 1-d features 1.0 vs 0.5, true parameter 1: rewards are the
        // feature values; the optimistic index settles on candidate 0
        // within 10 rounds.
        let mut agent = LinUcb::new(
            vec![vec![1.0], vec![0.5]],
            |a| a.to_vec(),
            1.0,
            0.0,
            1e-4,
            0.0,
        )
        .unwrap();
        let mut last = Vec::new();
        for t in 1..=10usize {
            let a = agent.act(t).unwrap();
            agent.observe(t, &a, &[], a[0]).unwrap();
            last = a;
        }
        assert_eq!(last, vec![1.0]);
    }

    #[test]
    fn beta_nondecreasing() {
        let agent = LinUcb::new(vec![vec![1.0, 0.0]], |a| a.to_vec(), 1.0, 0.3, 1e-3, 0.0).unwrap();
        let mut prev = 0.0;
        for t in 1..100 {
            let b = agent.beta(t);
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn rejects_large_features_and_bad_params() {
        assert!(LinUcb::new(vec![vec![2.0]], |a| a.to_vec(), 1.0, 0.1, 0.01, 0.0).is_err());
        assert!(LinUcb::new(vec![], |a: &[f64]| a.to_vec(), 1.0, 0.1, 0.01, 0.0).is_err());
        assert!(LinUcb::new(vec![vec![1.0]], |a| a.to_vec(), 0.0, 0.1, 0.01, 0.0).is_err());
    }

    #[test]
    fn sherman_morrison_matches_direct_inverse() {
        let mut agent = LinUcb::new(
            vec![vec![0.6, 0.8], vec![1.0, 0.0], vec![0.0, 1.0]],
            |a| a.to_vec(),
            1.0,
            0.1,
            0.01,
            0.0,
        )
        .unwrap();
        for t in 1..=25usize {
            let a = agent.act(t).unwrap();
            agent.observe(t, &a, &[], 0.3 * a[0] - 0.1 * a[1]).unwrap();
        }
        let direct = agent.v.clone().try_inverse().unwrap();
        assert!((&direct - &agent.v_inv).abs().max() < 1e-9);
        for (i, x) in agent.features.iter().enumerate() {
            let q = (x.transpose() * &direct * x)[(0, 0)];
            assert!((q - agent.quad[i]).abs() < 1e-9);
        }
    }
}
