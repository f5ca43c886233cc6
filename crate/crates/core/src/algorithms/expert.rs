//! Expert-guided exploration: the first (noiseless) response pins the
//! parameter to a spherical cap, and play restricts to that cap.

use super::linucb::LinUcb;
use super::ucb1::Ucb1;
use super::Agent;
use crate::envs::GameSpec;
use crate::error::{Error, Result};
use crate::geometry::{basis_vector, build_net_cap, project_to_sphere};
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpertMode {
    /// Strong when `1 - zeta <= (1 - delta)/4`, else weak.
    Auto,
    /// Linear-bandit reduction: inside the cap the reward is linear in the
    /// action plus the known constant `1 - delta`.
    Strong,
    /// Finite-armed UCB over a cap net at the horizon-calibrated resolution.
    Weak,
}

/// Net resolution for the weak reduction:
/// `(K * C_zeta)^{d/(d+2)} * T^{-1/(d+2)}` with `C_zeta = sqrt(1 - zeta^2)`.
pub fn weak_mode_eps(d: usize, zeta: f64, horizon: usize, k_const: f64) -> f64 {
    let c_zeta = (1.0 - zeta * zeta).sqrt();
    let dd = d as f64;
    (k_const * c_zeta).powf(dd / (dd + 2.0)) * (horizon as f64).powf(-1.0 / (dd + 2.0))
}

enum Inner {
    Pending,
    Strong(LinUcb),
    Weak(Ucb1),
}

pub struct ExpertGuidedAgent {
    d: usize,
    delta: f64,
    zeta: f64,
    horizon: usize,
    strong: bool,
    /// Cap-net resolution override; defaults to 0.05 (strong) or the
    /// horizon-calibrated formula with K = 1 (weak).
    eps: Option<f64>,
    sigma_r: f64,
    ucb_exploration: f64,
    rng: RandomSource,
    b1: Option<Vec<f64>>,
    inner: Inner,
}

impl ExpertGuidedAgent {
    pub fn new(
        spec: &GameSpec,
        horizon: usize,
        mode: ExpertMode,
        eps: Option<f64>,
        sigma_r: f64,
        ucb_exploration: f64,
        rng: RandomSource,
    ) -> Result<Self> {
        let GameSpec::ExpertGuided { d, delta, zeta } = *spec else {
            return Err(Error::Config("expert-guided agent requires the expert-guided game".into()));
        };
        spec.validate()?;
        let condition = 1.0 - zeta <= (1.0 - delta) / 4.0;
        let strong = match mode {
            ExpertMode::Auto => condition,
            ExpertMode::Strong => {
                if !condition {
                    return Err(Error::Config(format!(
                        "strong mode requires 1 - zeta <= (1 - delta)/4, got zeta={zeta}, delta={delta}"
                    )));
                }
                true
            }
            ExpertMode::Weak => false,
        };
        Ok(ExpertGuidedAgent {
            d,
            delta,
            zeta,
            horizon,
            strong,
            eps,
            sigma_r,
            ucb_exploration,
            rng,
            b1: None,
            inner: Inner::Pending,
        })
    }

    pub fn is_strong(&self) -> bool {
        self.strong
    }

    /// Cap-net arm count; defined after round 1.
    pub fn arm_count(&self) -> Option<usize> {
        match &self.inner {
            Inner::Pending => None,
            Inner::Strong(l) => Some(l.candidate_count()),
            Inner::Weak(u) => Some(u.arm_count()),
        }
    }

    fn build_inner(&mut self) -> Result<()> {
        let b1 = self.b1.as_ref().expect("inner built before round 1");
        if self.strong {
            let eps = self.eps.unwrap_or(0.05);
            let net = build_net_cap(b1, self.zeta, eps, &mut self.rng)?;
            // Inside the cap the reward is theta_a . a + (1 - delta) + noise:
            // subtracting the known constant leaves a clean linear model.
            let lin = LinUcb::new(
                net.points,
                |a| a.to_vec(),
                1.0,
                self.sigma_r,
                1.0 / self.horizon as f64,
                1.0 - self.delta,
            )?;
            self.inner = Inner::Strong(lin);
        } else {
            let eps = self
                .eps
                .unwrap_or_else(|| weak_mode_eps(self.d, self.zeta, self.horizon, 1.0));
            let net = build_net_cap(b1, self.zeta, eps, &mut self.rng)?;
            self.inner = Inner::Weak(Ucb1::new(net.points, self.ucb_exploration)?);
        }
        Ok(())
    }
}

impl Agent for ExpertGuidedAgent {
    fn act(&mut self, t: usize) -> Result<Vec<f64>> {
        match &mut self.inner {
            Inner::Pending => {
                if t > 1 {
                    return Err(Error::Runtime("round-1 observation missing".into()));
                }
                Ok(basis_vector(self.d, 0))
            }
            Inner::Strong(l) => l.act(t),
            Inner::Weak(u) => u.act(t),
        }
    }

    fn observe(&mut self, t: usize, a: &[f64], b_obs: &[f64], reward: f64) -> Result<()> {
        match &mut self.inner {
            Inner::Pending => {
                // Noiseless response observation reveals the cap center.
                self.b1 = Some(project_to_sphere(b_obs)?);
                self.build_inner()
            }
            Inner::Strong(l) => l.observe(t, a, b_obs, reward),
            Inner::Weak(u) => u.observe(t, a, b_obs, reward),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{step, NoiseSpec, Theta};
    use crate::geometry::dot;
    use crate::rng::stream_rng;

    fn spec(zeta: f64, delta: f64, d: usize) -> GameSpec {
        GameSpec::ExpertGuided { d, delta, zeta }
    }

    #[test]
    fn auto_mode_selects_strong_iff_condition_holds() {
        let s = spec(0.95, 0.5, 5);
        let agent = ExpertGuidedAgent::new(&s, 100, ExpertMode::Auto, None, 0.1, 1.0, stream_rng(0, "a"))
            .unwrap();
        assert!(agent.is_strong());
        let w = spec(0.3, 0.9, 6);
        let agent =
            ExpertGuidedAgent::new(&w, 100, ExpertMode::Auto, None, 0.1, 1.0, stream_rng(0, "a")).unwrap();
        assert!(!agent.is_strong());
    }

    #[test]
    fn strong_mode_rejected_when_condition_fails() {
        let w = spec(0.3, 0.9, 6);
        assert!(ExpertGuidedAgent::new(&w, 100, ExpertMode::Strong, None, 0.1, 1.0, stream_rng(0, "a"))
            .is_err());
    }

    #[test]
    fn post_round_one_actions_stay_in_cap() {
        let s = spec(0.9, 0.5, 4);
        let mut rng = stream_rng(12, "theta");
        let theta = s.sample_theta(&mut rng);
        let Theta::ExpertGuided { theta_b, .. } = &theta else { unreachable!() };
        let mut agent =
            ExpertGuidedAgent::new(&s, 200, ExpertMode::Auto, Some(0.2), 0.1, 1.0, stream_rng(1, "a"))
                .unwrap();
        let noise = NoiseSpec::gaussian(0.1, 0.0);
        let mut noise_rng = stream_rng(2, "n");
        for t in 1..=50usize {
            let a = agent.act(t).unwrap();
            if t > 1 {
                assert!(dot(&a, theta_b) >= 0.9 - 1e-9, "action left the cap");
            }
            let out = step(&s, &theta, &noise, &a, &mut noise_rng).unwrap();
            agent.observe(t, &a, &out.b_obs, out.reward).unwrap();
        }
        assert!(agent.arm_count().unwrap() >= 1);
    }

    #[test]
    fn weak_eps_formula() {
        // d=6, zeta=0.3, T=2e4, K=1: C = sqrt(0.91), eps = C^{0.75} T^{-1/8}.
        let e = weak_mode_eps(6, 0.3, 20_000, 1.0);
        let c = (1.0_f64 - 0.09).sqrt();
        let expect = c.powf(0.75) * (20_000.0_f64).powf(-0.125);
        assert!((e - expect).abs() < 1e-12);
    }
}
