//! The five Stackelberg game environments with an omniscient follower.
//!
//! Each environment exposes the mean reward `h_theta(a, b)`, the follower's
//! closed-form best response `b*(a)`, the best-response value
//! `hbar(a) = max_b h(a, b)`, the leader-optimal action `a*`, and a noisy
//! interaction step. A brute-force grid maximizer over the follower set is
//! provided as a verification oracle for the closed forms.

use crate::error::{Error, Result};
use crate::geometry::{check_finite, dot, norm, sample_cap, sample_uniform_sphere};
use crate::rng::RandomSource;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

const DOMAIN_TOL: f64 = 1e-9;

/// Environment selector plus shape parameters.
///
/// `d` is the ambient parameter dimension of the variant; the leader/follower
/// action dimensions derive from it (see `leader_dim` / `follower_dim`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum GameSpec {
    /// Leader in the ball B^{d-1}, follower in [0,1]; reward hides the
    /// parameter whenever the leader is far from it.
    ReluCurse { d: usize, delta: f64 },
    /// Leader and follower both on S^{d-1}; the best response reveals the
    /// parameter directly.
    Imitation { d: usize },
    /// Both on S^{d-1}; the follower's response pins the parameter to a
    /// spherical cap.
    ExpertGuided { d: usize, delta: f64, zeta: f64 },
    /// Leader in B^{d-1}, follower in [-1,1]; degree-2k polynomial reward
    /// with a degree-(2k-1) response.
    Polynomial { d: usize, k: u32 },
    /// Leader in B^{d-1}, follower in B^{d-1} x [0,1]; interior actions
    /// reveal the parameter but optimism never plays them.
    OptimismTrap { d: usize, delta: f64 },
}

impl GameSpec {
    pub fn validate(&self) -> Result<()> {
        let check_unit_interval = |name: &str, x: f64| -> Result<()> {
            if 0.0 < x && x < 1.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be in (0,1), got {x}")))
            }
        };
        match *self {
            GameSpec::ReluCurse { d, delta } => {
                if d < 3 {
                    return Err(Error::Config(format!("relu-curse requires d >= 3, got {d}")));
                }
                check_unit_interval("delta", delta)
            }
            GameSpec::Imitation { d } => {
                if d < 2 {
                    return Err(Error::Config(format!("imitation requires d >= 2, got {d}")));
                }
                Ok(())
            }
            GameSpec::ExpertGuided { d, delta, zeta } => {
                if d < 2 {
                    return Err(Error::Config(format!("expert-guided requires d >= 2, got {d}")));
                }
                check_unit_interval("delta", delta)?;
                check_unit_interval("zeta", zeta)
            }
            GameSpec::Polynomial { d, k } => {
                if d < 2 {
                    return Err(Error::Config(format!("polynomial requires d >= 2, got {d}")));
                }
                if k < 1 {
                    return Err(Error::Config("polynomial requires k >= 1".into()));
                }
                Ok(())
            }
            GameSpec::OptimismTrap { d, delta } => {
                if d < 2 {
                    return Err(Error::Config(format!("optimism-trap requires d >= 2, got {d}")));
                }
                check_unit_interval("delta", delta)
            }
        }
    }

    pub fn d(&self) -> usize {
        match *self {
            GameSpec::ReluCurse { d, .. }
            | GameSpec::Imitation { d }
            | GameSpec::ExpertGuided { d, .. }
            | GameSpec::Polynomial { d, .. }
            | GameSpec::OptimismTrap { d, .. } => d,
        }
    }

    /// Dimension of the leader's action vector.
    pub fn leader_dim(&self) -> usize {
        match *self {
            GameSpec::ReluCurse { d, .. }
            | GameSpec::Polynomial { d, .. }
            | GameSpec::OptimismTrap { d, .. } => d - 1,
            GameSpec::Imitation { d } | GameSpec::ExpertGuided { d, .. } => d,
        }
    }

    /// Dimension of the follower's action vector.
    pub fn follower_dim(&self) -> usize {
        match *self {
            GameSpec::ReluCurse { .. } | GameSpec::Polynomial { .. } => 1,
            GameSpec::Imitation { d } | GameSpec::ExpertGuided { d, .. } => d,
            GameSpec::OptimismTrap { d, .. } => d,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GameSpec::ReluCurse { .. } => "relu_curse",
            GameSpec::Imitation { .. } => "imitation",
            GameSpec::ExpertGuided { .. } => "expert_guided",
            GameSpec::Polynomial { .. } => "polynomial",
            GameSpec::OptimismTrap { .. } => "optimism_trap",
        }
    }

    /// Checks that `a` lies in the leader action set.
    pub fn check_action(&self, a: &[f64]) -> Result<()> {
        check_finite(a)?;
        if a.len() != self.leader_dim() {
            return Err(Error::Domain(format!(
                "action dimension {} != expected {}",
                a.len(),
                self.leader_dim()
            )));
        }
        let n = norm(a);
        match self {
            GameSpec::ReluCurse { .. } | GameSpec::Polynomial { .. } | GameSpec::OptimismTrap { .. } => {
                if n > 1.0 + DOMAIN_TOL {
                    return Err(Error::Domain(format!("action norm {n} exceeds the unit ball")));
                }
            }
            GameSpec::Imitation { .. } | GameSpec::ExpertGuided { .. } => {
                if (n - 1.0).abs() > DOMAIN_TOL {
                    return Err(Error::Domain(format!("action norm {n} not on the unit sphere")));
                }
            }
        }
        Ok(())
    }

    /// Checks that `b` lies in the follower action set.
    pub fn check_response(&self, b: &[f64]) -> Result<()> {
        check_finite(b)?;
        if b.len() != self.follower_dim() {
            return Err(Error::Domain(format!(
                "response dimension {} != expected {}",
                b.len(),
                self.follower_dim()
            )));
        }
        match self {
            GameSpec::ReluCurse { .. } => {
                if b[0] < -DOMAIN_TOL || b[0] > 1.0 + DOMAIN_TOL {
                    return Err(Error::Domain(format!("response {} outside [0,1]", b[0])));
                }
            }
            GameSpec::Polynomial { .. } => {
                if b[0].abs() > 1.0 + DOMAIN_TOL {
                    return Err(Error::Domain(format!("response {} outside [-1,1]", b[0])));
                }
            }
            GameSpec::Imitation { .. } | GameSpec::ExpertGuided { .. } => {
                let n = norm(b);
                if (n - 1.0).abs() > DOMAIN_TOL {
                    return Err(Error::Domain(format!("response norm {n} not on the unit sphere")));
                }
            }
            GameSpec::OptimismTrap { .. } => {
                let (head, last) = b.split_at(b.len() - 1);
                if norm(head) > 1.0 + DOMAIN_TOL {
                    return Err(Error::Domain("response head outside the unit ball".into()));
                }
                if last[0] < -DOMAIN_TOL || last[0] > 1.0 + DOMAIN_TOL {
                    return Err(Error::Domain(format!("response tail {} outside [0,1]", last[0])));
                }
            }
        }
        Ok(())
    }

    /// Draws a parameter uniformly from the unit-norm slice of the variant's
    /// parameter space.
    pub fn sample_theta(&self, rng: &mut RandomSource) -> Theta {
        match *self {
            GameSpec::ReluCurse { d, .. } => Theta::ReluCurse {
                dir: sample_uniform_sphere(rng, d - 1),
            },
            GameSpec::Imitation { d } => Theta::Imitation {
                theta: sample_uniform_sphere(rng, d),
            },
            GameSpec::ExpertGuided { d, zeta, .. } => {
                let theta_b = sample_uniform_sphere(rng, d);
                let theta_a = sample_cap(&theta_b, zeta, rng);
                Theta::ExpertGuided { theta_a, theta_b }
            }
            GameSpec::Polynomial { d, .. } => Theta::Polynomial {
                dir: sample_uniform_sphere(rng, d - 1),
            },
            GameSpec::OptimismTrap { d, .. } => Theta::OptimismTrap {
                dir: sample_uniform_sphere(rng, d - 1),
            },
        }
    }
}

/// Variant-specific reward parameter. Only the free part is stored; the
/// implied coordinate (theta_d) is fixed by the variant's parameter space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Theta {
    /// `dir` on S^{d-2}; implied theta_d = 1 - delta.
    ReluCurse { dir: Vec<f64> },
    /// theta on S^{d-1}.
    Imitation { theta: Vec<f64> },
    /// Pair on S^{d-1} x S^{d-1} with theta_a . theta_b >= zeta.
    ExpertGuided { theta_a: Vec<f64>, theta_b: Vec<f64> },
    /// `dir` in B^{d-1}; implied theta_d = 1.
    Polynomial { dir: Vec<f64> },
    /// `dir` in B^{d-1}; implied theta_d = 1 - delta.
    OptimismTrap { dir: Vec<f64> },
}

impl Theta {
    pub fn validate(&self, spec: &GameSpec) -> Result<()> {
        let unit = |v: &[f64], what: &str| -> Result<()> {
            check_finite(v)?;
            if (norm(v) - 1.0).abs() > DOMAIN_TOL {
                return Err(Error::Domain(format!("{what} must be a unit vector")));
            }
            Ok(())
        };
        match (self, spec) {
            (Theta::ReluCurse { dir }, GameSpec::ReluCurse { d, .. }) => {
                if dir.len() != d - 1 {
                    return Err(Error::Domain("theta dimension mismatch".into()));
                }
                unit(dir, "relu-curse theta")
            }
            (Theta::Imitation { theta }, GameSpec::Imitation { d }) => {
                if theta.len() != *d {
                    return Err(Error::Domain("theta dimension mismatch".into()));
                }
                unit(theta, "imitation theta")
            }
            (Theta::ExpertGuided { theta_a, theta_b }, GameSpec::ExpertGuided { d, zeta, .. }) => {
                if theta_a.len() != *d || theta_b.len() != *d {
                    return Err(Error::Domain("theta dimension mismatch".into()));
                }
                unit(theta_a, "theta_a")?;
                unit(theta_b, "theta_b")?;
                if dot(theta_a, theta_b) < zeta - DOMAIN_TOL {
                    return Err(Error::Domain("theta_a . theta_b below zeta".into()));
                }
                Ok(())
            }
            (Theta::Polynomial { dir }, GameSpec::Polynomial { d, .. })
            | (Theta::OptimismTrap { dir }, GameSpec::OptimismTrap { d, .. }) => {
                check_finite(dir)?;
                if dir.len() != d - 1 {
                    return Err(Error::Domain("theta dimension mismatch".into()));
                }
                if norm(dir) > 1.0 + DOMAIN_TOL {
                    return Err(Error::Domain("theta outside the unit ball".into()));
                }
                Ok(())
            }
            _ => Err(Error::Domain("theta variant does not match game variant".into())),
        }
    }
}

/// Noise distribution for rewards and response observations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian,
    /// Each coordinate uniform on [-sigma*sqrt(3), sigma*sqrt(3)], matching
    /// variance sigma^2.
    BoundedUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma_r: f64,
    pub sigma_b: f64,
    pub kind: NoiseKind,
}

impl NoiseSpec {
    pub fn gaussian(sigma_r: f64, sigma_b: f64) -> Self {
        NoiseSpec {
            sigma_r,
            sigma_b,
            kind: NoiseKind::Gaussian,
        }
    }

    pub fn noiseless() -> Self {
        NoiseSpec::gaussian(0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma_r < 0.0 || self.sigma_b < 0.0 || !self.sigma_r.is_finite() || !self.sigma_b.is_finite() {
            return Err(Error::Config("noise scales must be finite and nonnegative".into()));
        }
        Ok(())
    }

    fn draw(&self, sigma: f64, rng: &mut RandomSource) -> f64 {
        if sigma == 0.0 {
            return 0.0;
        }
        match self.kind {
            NoiseKind::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                sigma * z
            }
            NoiseKind::BoundedUniform => {
                let half = sigma * 3.0_f64.sqrt();
                rng.gen_range(-half..=half)
            }
        }
    }
}

/// One interaction round.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// Exact follower best response.
    pub b_true: Vec<f64>,
    /// Noisy observation `b_true + w` (not clipped to the follower set).
    pub b_obs: Vec<f64>,
    /// Noisy reward `h(a, b_true) + z`.
    pub reward: f64,
}

/// Convex conjugate of `f(x) = x^{2k}` evaluated at `y`:
/// `f*(y) = (2k-1) * (|y| / 2k)^{2k/(2k-1)}`.
pub fn poly_conjugate(k: u32, y: f64) -> f64 {
    let two_k = 2.0 * f64::from(k);
    (two_k - 1.0) * (y.abs() / two_k).powf(two_k / (two_k - 1.0))
}

fn relu(x: f64) -> f64 {
    x.max(0.0)
}

/// Mean reward `h_theta(a, b) = theta . phi(a, b)` for the variant.
pub fn mean_reward(spec: &GameSpec, theta: &Theta, a: &[f64], b: &[f64]) -> Result<f64> {
    spec.check_action(a)?;
    spec.check_response(b)?;
    Ok(mean_reward_unchecked(spec, theta, a, b))
}

/// `mean_reward` without domain checks; used by hot loops (grid search,
/// per-round regret) after inputs have been validated once.
pub fn mean_reward_unchecked(spec: &GameSpec, theta: &Theta, a: &[f64], b: &[f64]) -> f64 {
    match (spec, theta) {
        (GameSpec::ReluCurse { delta, .. }, Theta::ReluCurse { dir }) => {
            (1.0 - b[0]) * dot(dir, a) + b[0] * (1.0 - delta)
        }
        (GameSpec::Imitation { .. }, Theta::Imitation { theta }) => {
            dot(theta, a) + dot(theta, b)
        }
        (GameSpec::ExpertGuided { delta, .. }, Theta::ExpertGuided { theta_a, theta_b }) => {
            relu(dot(theta_a, a) - delta) + dot(theta_b, b)
        }
        (GameSpec::Polynomial { k, .. }, Theta::Polynomial { dir }) => {
            let two_k = 2.0 * f64::from(*k);
            two_k * b[0] * dot(dir, a) - poly_conjugate(*k, two_k * b[0])
        }
        (GameSpec::OptimismTrap { delta, .. }, Theta::OptimismTrap { dir }) => {
            let (b_head, b_last) = b.split_at(b.len() - 1);
            let b_d = b_last[0];
            let a_norm = norm(a);
            a_norm * ((1.0 - b_d) * dot(dir, a) + (1.0 - delta) * (b_d - norm(b_head)))
                + 0.5 * (1.0 - a_norm) * dot(dir, b_head)
        }
        _ => panic!("theta variant does not match game variant"),
    }
}

/// Closed-form follower best response, ties broken toward the zero/smaller
/// response.
pub fn best_response(spec: &GameSpec, theta: &Theta, a: &[f64]) -> Result<Vec<f64>> {
    spec.check_action(a)?;
    Ok(best_response_unchecked(spec, theta, a))
}

pub fn best_response_unchecked(spec: &GameSpec, theta: &Theta, a: &[f64]) -> Vec<f64> {
    match (spec, theta) {
        (GameSpec::ReluCurse { delta, .. }, Theta::ReluCurse { dir }) => {
            vec![if dot(dir, a) < 1.0 - delta { 1.0 } else { 0.0 }]
        }
        (GameSpec::Imitation { .. }, Theta::Imitation { theta }) => theta.clone(),
        (GameSpec::ExpertGuided { .. }, Theta::ExpertGuided { theta_b, .. }) => theta_b.clone(),
        (GameSpec::Polynomial { k, .. }, Theta::Polynomial { dir }) => {
            vec![dot(dir, a).powi(2 * *k as i32 - 1)]
        }
        (GameSpec::OptimismTrap { delta, .. }, Theta::OptimismTrap { dir }) => {
            // Separable maximization: the b_d term has coefficient
            // ||a|| ((1-delta) - dir.a); the b_head part is maximized along
            // dir with magnitude 0 or 1 depending on the sign of
            // (1-||a||)/2 * ||dir|| - ||a|| (1-delta).
            let a_norm = norm(a);
            let dir_norm = norm(dir);
            let b_d = if dot(dir, a) < 1.0 - delta && a_norm > 0.0 {
                1.0
            } else {
                0.0
            };
            let gain = 0.5 * (1.0 - a_norm) * dir_norm - a_norm * (1.0 - delta);
            let mut b = if dir_norm > 0.0 && gain > 0.0 {
                dir.iter().map(|x| x / dir_norm).collect::<Vec<f64>>()
            } else {
                vec![0.0; dir.len()]
            };
            b.push(b_d);
            b
        }
        _ => panic!("theta variant does not match game variant"),
    }
}

/// Best-response value `hbar(a) = max_b h_theta(a, b)`.
pub fn hbar(spec: &GameSpec, theta: &Theta, a: &[f64]) -> Result<f64> {
    spec.check_action(a)?;
    Ok(hbar_unchecked(spec, theta, a))
}

pub fn hbar_unchecked(spec: &GameSpec, theta: &Theta, a: &[f64]) -> f64 {
    match (spec, theta) {
        (GameSpec::ReluCurse { delta, .. }, Theta::ReluCurse { dir }) => {
            (1.0 - delta).max(dot(dir, a))
        }
        (GameSpec::Imitation { .. }, Theta::Imitation { theta }) => dot(theta, a) + 1.0,
        (GameSpec::ExpertGuided { delta, .. }, Theta::ExpertGuided { theta_a, .. }) => {
            relu(dot(theta_a, a) - delta) + 1.0
        }
        (GameSpec::Polynomial { k, .. }, Theta::Polynomial { dir }) => {
            dot(dir, a).powi(2 * *k as i32)
        }
        (GameSpec::OptimismTrap { delta, .. }, Theta::OptimismTrap { dir }) => {
            let a_norm = norm(a);
            a_norm * (1.0 - delta).max(dot(dir, a))
                + relu(0.5 * (1.0 - a_norm) * norm(dir) - a_norm * (1.0 - delta))
        }
        _ => panic!("theta variant does not match game variant"),
    }
}

/// Leader-optimal action `a* = argmax_a hbar(a)`.
///
/// Polynomial and OptimismTrap require a unit-norm parameter direction; for
/// interior directions the maximizer is not the stored direction and the
/// call is rejected.
pub fn optimal_action(spec: &GameSpec, theta: &Theta) -> Result<Vec<f64>> {
    match (spec, theta) {
        (GameSpec::ReluCurse { .. }, Theta::ReluCurse { dir }) => Ok(dir.clone()),
        (GameSpec::Imitation { .. }, Theta::Imitation { theta }) => Ok(theta.clone()),
        (GameSpec::ExpertGuided { .. }, Theta::ExpertGuided { theta_a, .. }) => Ok(theta_a.clone()),
        (GameSpec::Polynomial { .. }, Theta::Polynomial { dir })
        | (GameSpec::OptimismTrap { .. }, Theta::OptimismTrap { dir }) => {
            if (norm(dir) - 1.0).abs() > DOMAIN_TOL {
                Err(Error::Domain(
                    "optimal_action requires a unit-norm parameter direction".into(),
                ))
            } else {
                Ok(dir.clone())
            }
        }
        _ => Err(Error::Domain("theta variant does not match game variant".into())),
    }
}

/// Enumerates a grid over the follower action set at the given resolution.
///
/// Interval sets use a regular 1-d grid. Sphere sets use cube-grid points
/// near the unit shell, normalized; ball-times-interval sets use in-ball
/// cube points plus boundary projections crossed with a 1-d grid. Effective
/// covering resolution is at most `resolution * sqrt(dim)`.
fn for_each_follower_grid_point<F: FnMut(&[f64])>(
    spec: &GameSpec,
    resolution: f64,
    mut visit: F,
) {
    let steps = |lo: f64, hi: f64| -> Vec<f64> {
        let n = ((hi - lo) / resolution).ceil() as usize;
        (0..=n)
            .map(|i| (lo + i as f64 * resolution).min(hi))
            .collect()
    };
    match spec {
        GameSpec::ReluCurse { .. } => {
            for b in steps(0.0, 1.0) {
                visit(&[b]);
            }
        }
        GameSpec::Polynomial { .. } => {
            for b in steps(-1.0, 1.0) {
                visit(&[b]);
            }
        }
        GameSpec::Imitation { d } | GameSpec::ExpertGuided { d, .. } => {
            let shell = resolution * (*d as f64).sqrt();
            for_each_cube_point(*d, resolution, &mut |p| {
                let n = norm(p);
                if (n - 1.0).abs() <= shell && n > 1e-12 {
                    let u: Vec<f64> = p.iter().map(|x| x / n).collect();
                    visit(&u);
                }
            });
        }
        GameSpec::OptimismTrap { d, .. } => {
            let head_dim = d - 1;
            let slack = resolution * (head_dim as f64).sqrt();
            let tail = steps(0.0, 1.0);
            for_each_cube_point(head_dim, resolution, &mut |p| {
                let n = norm(p);
                let head: Option<Vec<f64>> = if n <= 1.0 {
                    Some(p.to_vec())
                } else if n <= 1.0 + slack {
                    Some(p.iter().map(|x| x / n).collect())
                } else {
                    None
                };
                if let Some(head) = head {
                    let mut b = head;
                    b.push(0.0);
                    let last = b.len() - 1;
                    for &t in &tail {
                        b[last] = t;
                        visit(&b);
                    }
                }
            });
        }
    }
}

/// Visits all points of the cube grid `{-1, -1+res, ...}^dim` in [-1, 1]^dim.
fn for_each_cube_point(dim: usize, resolution: f64, visit: &mut dyn FnMut(&[f64])) {
    let axis: Vec<f64> = {
        let n = (2.0 / resolution).ceil() as usize;
        (0..=n)
            .map(|i| (-1.0 + i as f64 * resolution).min(1.0))
            .collect()
    };
    let mut point = vec![0.0; dim];
    fn recurse(
        axis: &[f64],
        point: &mut Vec<f64>,
        level: usize,
        visit: &mut dyn FnMut(&[f64]),
    ) {
        if level == point.len() {
            visit(point);
            return;
        }
        for &x in axis {
            point[level] = x;
            recurse(axis, point, level + 1, visit);
        }
    }
    recurse(&axis, &mut point, 0, visit);
}

/// Exhaustive grid maximizer of `mean_reward(a, .)` over the follower set.
///
/// Verification oracle only: rejects follower dimensions above 4. The first
/// maximizer in deterministic enumeration order is returned.
pub fn best_response_grid(
    spec: &GameSpec,
    theta: &Theta,
    a: &[f64],
    resolution: f64,
) -> Result<Vec<f64>> {
    spec.check_action(a)?;
    if !(resolution > 0.0 && resolution <= 0.5) {
        return Err(Error::Config(format!(
            "grid resolution must be in (0, 0.5], got {resolution}"
        )));
    }
    if spec.follower_dim() > 4 {
        return Err(Error::Config(format!(
            "grid oracle limited to follower dimension <= 4, got {}",
            spec.follower_dim()
        )));
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for_each_follower_grid_point(spec, resolution, |b| {
        let v = mean_reward_unchecked(spec, theta, a, b);
        match &best {
            Some((bv, _)) if *bv >= v => {}
            _ => best = Some((v, b.to_vec())),
        }
    });
    best.map(|(_, b)| b)
        .ok_or_else(|| Error::Numeric("empty follower grid".into()))
}

/// One noisy interaction round: the follower best-responds, the leader
/// observes `b + w` and `h(a, b) + z`.
pub fn step(
    spec: &GameSpec,
    theta: &Theta,
    noise: &NoiseSpec,
    a: &[f64],
    rng: &mut RandomSource,
) -> Result<StepOutcome> {
    spec.check_action(a)?;
    let b_true = best_response_unchecked(spec, theta, a);
    let reward = mean_reward_unchecked(spec, theta, a, &b_true) + noise.draw(noise.sigma_r, rng);
    let b_obs: Vec<f64> = b_true
        .iter()
        .map(|x| x + noise.draw(noise.sigma_b, rng))
        .collect();
    Ok(StepOutcome {
        b_true,
        b_obs,
        reward,
    })
}

/// A convenience for the expert-guided environment: the noiseless first
/// response reveals theta_b exactly.
pub fn expert_cap_center(theta: &Theta) -> Option<&[f64]> {
    match theta {
        Theta::ExpertGuided { theta_b, .. } => Some(theta_b),
        _ => None,
    }
}
