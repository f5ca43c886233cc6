//! Explore-then-commit on response observations for the polynomial game.

use super::Agent;
use crate::envs::GameSpec;
use crate::error::{Error, Result};
use crate::geometry::{project_to_sphere, sample_uniform_sphere};
use crate::rng::RandomSource;
use nalgebra::{DMatrix, DVector};

/// Plays `ceil(rho * T)` uniform random unit directions, regresses the
/// signed-root-transformed responses `sign(b) |b|^{1/(2k-1)}` on the actions
/// (which linearizes the degree-(2k-1) response), then commits to the
/// normalized least-squares estimate. Uses the response observations
/// exclusively; rewards are ignored.
pub struct PolyProxyAgent {
    dim: usize,
    k: u32,
    explore_rounds: usize,
    rng: RandomSource,
    xs: Vec<Vec<f64>>,
    ys: Vec<f64>,
    commit: Option<Vec<f64>>,
}

impl PolyProxyAgent {
    pub fn new(spec: &GameSpec, horizon: usize, rho: f64, rng: RandomSource) -> Result<Self> {
        let GameSpec::Polynomial { d, k } = *spec else {
            return Err(Error::Config("proxy agent requires the polynomial game".into()));
        };
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Config(format!("explore fraction must be in (0,1), got {rho}")));
        }
        let explore_rounds = (rho * horizon as f64).ceil() as usize;
        if explore_rounds < d - 1 {
            return Err(Error::Config(
                "explore phase shorter than the action dimension".into(),
            ));
        }
        Ok(PolyProxyAgent {
            dim: d - 1,
            k,
            explore_rounds,
            rng,
            xs: Vec::new(),
            ys: Vec::new(),
            commit: None,
        })
    }

    pub fn explore_rounds(&self) -> usize {
        self.explore_rounds
    }

    /// Committed direction estimate (unit norm), once exploration is over.
    pub fn estimate(&self) -> Option<&[f64]> {
        self.commit.as_deref()
    }

    fn fit(&mut self) -> Result<()> {
        let n = self.xs.len();
        let a = DMatrix::from_fn(n, self.dim, |i, j| self.xs[i][j]);
        let y = DVector::from_column_slice(&self.ys);
        let normal = a.transpose() * &a;
        let rhs = a.transpose() * y;
        let theta = normal
            .cholesky()
            .map(|c| c.solve(&rhs))
            .ok_or_else(|| Error::Runtime("degenerate exploration design matrix".into()))?;
        self.commit = Some(project_to_sphere(theta.as_slice())?);
        Ok(())
    }
}

impl Agent for PolyProxyAgent {
    fn act(&mut self, t: usize) -> Result<Vec<f64>> {
        if t <= self.explore_rounds {
            return Ok(sample_uniform_sphere(&mut self.rng, self.dim));
        }
        if self.commit.is_none() {
            self.fit()?;
        }
        Ok(self.commit.clone().unwrap())
    }

    fn observe(&mut self, t: usize, a: &[f64], b_obs: &[f64], _reward: f64) -> Result<()> {
        if t <= self.explore_rounds {
            let b = b_obs[0];
            let y = b.signum() * b.abs().powf(1.0 / (2.0 * f64::from(self.k) - 1.0));
            self.xs.push(a.to_vec());
            self.ys.push(y);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{best_response, Theta};
    use crate::geometry::{dist, norm};
    use crate::rng::stream_rng;

    #[test]
    fn noiseless_linear_responses_recover_parameter_exactly() {
        // k = 1: responses are exactly linear, so least squares on 2d
        // exploration rounds returns theta to machine precision.
        let spec = GameSpec::Polynomial { d: 4, k: 1 };
        let theta_dir = sample_uniform_sphere(&mut stream_rng(1, "t"), 3);
        let theta = Theta::Polynomial { dir: theta_dir.clone() };
        let horizon = 40;
        let mut agent = PolyProxyAgent::new(&spec, horizon, 0.2, stream_rng(2, "a")).unwrap();
        assert_eq!(agent.explore_rounds(), 8);
        for t in 1..=horizon {
            let a = agent.act(t).unwrap();
            let b = best_response(&spec, &theta, &a).unwrap();
            agent.observe(t, &a, &b, 0.0).unwrap();
            if t > agent.explore_rounds() {
                assert!(dist(&a, &theta_dir) < 1e-9);
            }
        }
    }

    #[test]
    fn commit_action_is_unit_norm() {
        let spec = GameSpec::Polynomial { d: 4, k: 2 };
        let theta = Theta::Polynomial {
            dir: sample_uniform_sphere(&mut stream_rng(3, "t"), 3),
        };
        let mut agent = PolyProxyAgent::new(&spec, 100, 0.3, stream_rng(4, "a")).unwrap();
        for t in 1..=100usize {
            let a = agent.act(t).unwrap();
            let b = best_response(&spec, &theta, &a).unwrap();
            agent.observe(t, &a, &b, 0.0).unwrap();
        }
        assert!((norm(agent.estimate().unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_explore_fraction() {
        let spec = GameSpec::Polynomial { d: 4, k: 2 };
        assert!(PolyProxyAgent::new(&spec, 100, 0.0, stream_rng(0, "a")).is_err());
        assert!(PolyProxyAgent::new(&spec, 100, 1.0, stream_rng(0, "a")).is_err());
        // Explore phase must be at least the action dimension.
        assert!(PolyProxyAgent::new(&spec, 10, 0.1, stream_rng(0, "a")).is_err());
    }
}
