//! Finite-armed upper-confidence-bound policy over an explicit action list.

use super::Agent;
use crate::error::{Error, Result};

/// Classic index policy: play each arm once, then the arm maximizing
/// `mean_i + c * sqrt(ln t / n_i)`, ties broken toward the lower index.
pub struct Ucb1 {
    arms: Vec<Vec<f64>>,
    exploration: f64,
    sums: Vec<f64>,
    counts: Vec<u64>,
    pending: Option<usize>,
}

impl Ucb1 {
    pub fn new(arms: Vec<Vec<f64>>, exploration: f64) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::Config("ucb1 needs at least one arm".into()));
        }
        if !(exploration >= 0.0) {
            return Err(Error::Config("ucb1 exploration constant must be >= 0".into()));
        }
        let n = arms.len();
        Ok(Ucb1 {
            arms,
            exploration,
            sums: vec![0.0; n],
            counts: vec![0; n],
            pending: None,
        })
    }

    pub fn arm_count(&self) -> usize {
        self.arms.len()
    }

    pub fn pulls(&self, i: usize) -> u64 {
        self.counts[i]
    }

    fn pick(&self, t: usize) -> usize {
        // Initial sweep in arm order.
        if let Some(i) = self.counts.iter().position(|&c| c == 0) {
            return i;
        }
        let log_t = (t.max(2) as f64).ln();
        let mut best = 0;
        let mut best_index = f64::NEG_INFINITY;
        for i in 0..self.arms.len() {
            let n = self.counts[i] as f64;
            let idx = self.sums[i] / n + self.exploration * (log_t / n).sqrt();
            if idx > best_index {
                best_index = idx;
                best = i;
            }
        }
        best
    }
}

impl Agent for Ucb1 {
    fn act(&mut self, t: usize) -> Result<Vec<f64>> {
        let i = self.pick(t);
        self.pending = Some(i);
        Ok(self.arms[i].clone())
    }

    fn observe(&mut self, _t: usize, _a: &[f64], _b_obs: &[f64], reward: f64) -> Result<()> {
        let i = self
            .pending
            .take()
            .ok_or_else(|| Error::Runtime("ucb1 observe without a preceding act".into()))?;
        self.sums[i] += reward;
        self.counts[i] += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_arm_always_played() {
        let mut a = Ucb1::new(vec![vec![1.0]], 1.0).unwrap();
        for t in 1..=100 {
            assert_eq!(a.act(t).unwrap(), vec![1.0]);
            a.observe(t, &[1.0], &[], 0.0).unwrap();
        }
    }

    #[test]
    fn suboptimal_arm_pulls_logarithmic() {
        // Noiseless rewards 1.0 vs 0.0: after the sweep, arm 2 is played
        // only while its exploration bonus exceeds the gap, so its pull
        // count grows like c^2 log T.
        let mut a = Ucb1::new(vec![vec![0.0], vec![1.0]], std::f64::consts::SQRT_2).unwrap();
        for t in 1..=10_000usize {
            let action = a.act(t).unwrap();
            let r = if action[0] == 0.0 { 1.0 } else { 0.0 };
            a.observe(t, &action, &[], r).unwrap();
        }
        assert!(a.pulls(1) <= 50, "suboptimal arm pulled {} times", a.pulls(1));
        assert!(a.pulls(0) >= 9_950);
    }

    #[test]
    fn deterministic_given_reward_sequence() {
        let run = || {
            let mut a = Ucb1::new(vec![vec![0.0], vec![1.0], vec![2.0]], 1.0).unwrap();
            let mut actions = Vec::new();
            for t in 1..=200usize {
                let action = a.act(t).unwrap();
                let r = (t as f64 * 0.37).sin() + action[0];
                a.observe(t, &action, &[], r).unwrap();
                actions.push(action);
            }
            actions
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn rejects_empty_arm_list() {
        assert!(Ucb1::new(vec![], 1.0).is_err());
    }
}
