//! Covering-based play: an epsilon-net over the parameter space mapped to
//! candidate optimal actions, explored by a finite-armed UCB on rewards.

use super::ucb1::Ucb1;
use super::Agent;
use crate::envs::GameSpec;
use crate::error::Result;
use crate::geometry::{build_net_sphere, dist};
use crate::rng::RandomSource;

/// Default net resolution `T^{-1/(d+2)}` for horizon `T` and parameter
/// dimension `d`.
pub fn default_covering_eps(d: usize, horizon: usize) -> f64 {
    (horizon as f64).powf(-1.0 / (d as f64 + 2.0))
}

/// Builds the candidate arm set: a net over the unit-norm parameter slice,
/// each net point mapped to the leader action that is optimal for it. For
/// every variant that action equals the netted direction itself, so the net
/// points double as arms; the mapping is kept explicit via deduplication at
/// tolerance 1e-9.
pub fn covering_arms(spec: &GameSpec, eps: f64, rng: &mut RandomSource) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    // Dimension of the parameter direction that determines the optimal
    // action (equals the leader action dimension in all variants).
    let dir_dim = spec.leader_dim();
    let net = build_net_sphere(dir_dim, eps, rng)?;
    let mut arms: Vec<Vec<f64>> = Vec::with_capacity(net.len());
    for p in net.points {
        if arms.iter().all(|a| dist(a, &p) > 1e-9) {
            arms.push(p);
        }
    }
    Ok(arms)
}

/// UCB over the covering arm set, driven by the observed reward only.
pub struct CoveringAgent {
    inner: Ucb1,
    eps: f64,
}

impl CoveringAgent {
    /// `eps = None` selects the horizon-calibrated default.
    pub fn new(
        spec: &GameSpec,
        eps: Option<f64>,
        horizon: usize,
        exploration: f64,
        rng: &mut RandomSource,
    ) -> Result<Self> {
        let eps = eps.unwrap_or_else(|| default_covering_eps(spec.d(), horizon));
        let arms = covering_arms(spec, eps, rng)?;
        Ok(CoveringAgent {
            inner: Ucb1::new(arms, exploration)?,
            eps,
        })
    }

    /// Reuse an already-built arm set (shared across episodes of a batch).
    pub fn from_arms(arms: Vec<Vec<f64>>, eps: f64, exploration: f64) -> Result<Self> {
        Ok(CoveringAgent {
            inner: Ucb1::new(arms, exploration)?,
            eps,
        })
    }

    pub fn arm_count(&self) -> usize {
        self.inner.arm_count()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

impl Agent for CoveringAgent {
    fn act(&mut self, t: usize) -> Result<Vec<f64>> {
        self.inner.act(t)
    }

    fn observe(&mut self, t: usize, a: &[f64], b_obs: &[f64], reward: f64) -> Result<()> {
        self.inner.observe(t, a, b_obs, reward)
    }
}

impl std::fmt::Debug for CoveringAgent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoveringAgent")
            .field("arms", &self.arm_count())
            .field("eps", &self.eps)
            .finish()
    }
}
