//! The probe/optimism pair for the trap environment: a one-round interior
//! probe learns the parameter exactly, while a sphere-restricted optimistic
//! policy never plays the revealing interior actions.

use super::Agent;
use crate::envs::GameSpec;
use crate::error::{Error, Result};
use crate::geometry::{build_net_sphere, dot, norm, project_to_sphere};
use crate::rng::RandomSource;

/// Plays the zero vector once; the (noiseless) interior response reveals the
/// parameter direction, which is played from round 2 on.
pub struct ProbeAgent {
    dim: usize,
    target: Option<Vec<f64>>,
}

impl ProbeAgent {
    pub fn new(spec: &GameSpec) -> Result<Self> {
        let GameSpec::OptimismTrap { d, .. } = *spec else {
            return Err(Error::Config("probe agent requires the optimism-trap game".into()));
        };
        Ok(ProbeAgent { dim: d - 1, target: None })
    }
}

impl Agent for ProbeAgent {
    fn act(&mut self, _t: usize) -> Result<Vec<f64>> {
        match &self.target {
            None => Ok(vec![0.0; self.dim]),
            Some(v) => Ok(v.clone()),
        }
    }

    fn observe(&mut self, _t: usize, _a: &[f64], b_obs: &[f64], _reward: f64) -> Result<()> {
        if self.target.is_some() {
            return Ok(());
        }
        let head = &b_obs[..self.dim];
        if norm(head) <= 1e-9 {
            return Err(Error::Runtime(
                "probe observed a zero response head; inconsistent with a unit parameter".into(),
            ));
        }
        self.target = Some(project_to_sphere(head)?);
        Ok(())
    }
}

/// Largest best-response value any unit parameter can give an action of norm
/// `s`: `s * max(1 - delta, s) + max(0, (1 - s)/2 - s(1 - delta))`.
/// Strictly below 1 for `s < 1`, which is why optimism never probes the
/// interior.
pub fn optimistic_interior_value(s: f64, delta: f64) -> f64 {
    s * (1.0 - delta).max(s) + (0.5 * (1.0 - s) - s * (1.0 - delta)).max(0.0)
}

/// Optimistic play over a fixed net of unit actions. Each net point doubles
/// as a candidate parameter (witness); a witness dies when it contradicts an
/// observed response flag, and an arm is optimistic (value 1) while some
/// alive witness puts it above the response threshold. The lowest-index
/// optimistic arm is played; interior actions are never taken.
pub struct OptimisticSphereAgent {
    delta: f64,
    arms: Vec<Vec<f64>>,
    alive: Vec<bool>,
    /// Current supporting witness per arm; `usize::MAX` once unsupported.
    support: Vec<usize>,
}

impl OptimisticSphereAgent {
    pub fn new(spec: &GameSpec, eps: f64, rng: &mut RandomSource) -> Result<Self> {
        let GameSpec::OptimismTrap { d, delta } = *spec else {
            return Err(Error::Config(
                "optimistic sphere agent requires the optimism-trap game".into(),
            ));
        };
        let net = build_net_sphere(d - 1, eps, rng)?;
        let n = net.points.len();
        Ok(OptimisticSphereAgent {
            delta,
            arms: net.points,
            alive: vec![true; n],
            support: (0..n).collect(),
        })
    }

    pub fn from_arms(spec: &GameSpec, arms: Vec<Vec<f64>>) -> Result<Self> {
        let GameSpec::OptimismTrap { delta, .. } = *spec else {
            return Err(Error::Config(
                "optimistic sphere agent requires the optimism-trap game".into(),
            ));
        };
        let n = arms.len();
        if n == 0 {
            return Err(Error::Config("empty arm set".into()));
        }
        Ok(OptimisticSphereAgent {
            delta,
            arms,
            alive: vec![true; n],
            support: (0..n).collect(),
        })
    }

    pub fn arm_count(&self) -> usize {
        self.arms.len()
    }

    /// True iff some alive witness gives arm `j` the optimistic value 1,
    /// refreshing the cached supporting witness if the old one died.
    fn supported(&mut self, j: usize) -> bool {
        let threshold = 1.0 - self.delta;
        let s = self.support[j];
        if s != usize::MAX && self.alive[s] && dot(&self.arms[s], &self.arms[j]) >= threshold {
            return true;
        }
        for w in 0..self.arms.len() {
            if self.alive[w] && dot(&self.arms[w], &self.arms[j]) >= threshold {
                self.support[j] = w;
                return true;
            }
        }
        self.support[j] = usize::MAX;
        false
    }
}

impl Agent for OptimisticSphereAgent {
    fn act(&mut self, _t: usize) -> Result<Vec<f64>> {
        // Lowest-index arm with optimistic value 1; if none remains, all
        // arms tie at value 1 - delta and the tie goes to arm 0. Either way
        // the action is a unit vector.
        for j in 0..self.arms.len() {
            if self.supported(j) {
                return Ok(self.arms[j].clone());
            }
        }
        Ok(self.arms[0].clone())
    }

    fn observe(&mut self, _t: usize, a: &[f64], b_obs: &[f64], _reward: f64) -> Result<()> {
        let threshold = 1.0 - self.delta;
        // The response flag is exact (noiseless use): flag 1 means the true
        // parameter satisfies theta . a < threshold, flag 0 the reverse.
        let flag_one = *b_obs.last().ok_or_else(|| Error::Runtime("empty response".into()))? >= 0.5;
        for w in 0..self.arms.len() {
            if !self.alive[w] {
                continue;
            }
            let v = dot(&self.arms[w], a);
            let contradicted = if flag_one { v >= threshold } else { v < threshold };
            if contradicted {
                self.alive[w] = false;
            }
        }
        Ok(())
    }
}
