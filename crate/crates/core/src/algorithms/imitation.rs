//! Imitation policy: play the sphere-projected running mean of observed
//! responses.

use super::confidence::BallConfidence;
use super::Agent;
use crate::error::{Error, Result};
use crate::geometry::{basis_vector, project_to_sphere, scale};

/// For the environment whose follower always responds with the parameter
/// itself: the round-t action is the unit-normalized empirical mean of the
/// first t-1 observed responses, and a ball confidence set of radius
/// `alpha / sqrt(t-1)` around it tracks the parameter,
/// `alpha = c_alpha * sigma_b * sqrt(d + ln(T / delta))`.
pub struct ImitationAgent {
    d: usize,
    alpha: f64,
    sum_b: Vec<f64>,
    n: u64,
}

impl ImitationAgent {
    pub fn new(
        d: usize,
        sigma_b: f64,
        horizon: usize,
        confidence_delta: f64,
        c_alpha: f64,
    ) -> Result<Self> {
        if d < 1 {
            return Err(Error::Config("imitation agent needs d >= 1".into()));
        }
        if !(confidence_delta > 0.0 && confidence_delta < 1.0) {
            return Err(Error::Config("confidence delta must be in (0,1)".into()));
        }
        if sigma_b < 0.0 || c_alpha < 0.0 {
            return Err(Error::Config("sigma_b and c_alpha must be >= 0".into()));
        }
        let alpha = c_alpha * sigma_b * (d as f64 + (horizon as f64 / confidence_delta).ln()).sqrt();
        Ok(ImitationAgent {
            d,
            alpha,
            sum_b: vec![0.0; d],
            n: 0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Confidence set used at round `t >= 2`; its radius is exactly
    /// `alpha / sqrt(t-1)`.
    pub fn confidence(&self, t: usize) -> Result<BallConfidence> {
        if t < 2 || self.n == 0 {
            return Err(Error::Runtime("confidence set undefined before round 2".into()));
        }
        let center = project_to_sphere(&scale(&self.sum_b, 1.0 / self.n as f64))?;
        BallConfidence::new(center, self.alpha / ((t - 1) as f64).sqrt())
    }
}

impl Agent for ImitationAgent {
    fn act(&mut self, _t: usize) -> Result<Vec<f64>> {
        if self.n == 0 {
            return Ok(basis_vector(self.d, 0));
        }
        project_to_sphere(&scale(&self.sum_b, 1.0 / self.n as f64))
    }

    fn observe(&mut self, _t: usize, _a: &[f64], b_obs: &[f64], _reward: f64) -> Result<()> {
        if b_obs.len() != self.d {
            return Err(Error::Runtime("response dimension mismatch".into()));
        }
        for (s, b) in self.sum_b.iter_mut().zip(b_obs) {
            *s += b;
        }
        self.n += 1;
        Ok(())
    }
}
