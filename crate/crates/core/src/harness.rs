//! Seeded episode runner, regret accounting, multi-seed aggregation,
//! scaling-exponent fits and confidence-set coverage measurement.

use crate::algorithms::{
    covering_arms, default_covering_eps, Agent, CoveringAgent, ExpertGuidedAgent, ExpertMode,
    ImitationAgent, LinUcb, OptimisticSphereAgent, PolyProxyAgent, ProbeAgent,
};
use crate::envs::{hbar, optimal_action, step, GameSpec, NoiseSpec, Theta};
use crate::error::{Error, Result};
use crate::geometry::build_net_sphere;
use crate::rng::{stream_rng, RandomSource};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Where the true parameter comes from: fixed, or drawn per episode from the
/// seed's dedicated stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum ThetaSource {
    Explicit { theta: Theta },
    SeededRandom,
}

/// Leader policy selector plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "agent", rename_all = "snake_case")]
pub enum AgentSpec {
    /// Plays the optimal action every round (test baseline; knows theta).
    Oracle,
    /// Covering net over the parameter directions + finite UCB on rewards.
    Covering {
        eps: Option<f64>,
        exploration: f64,
    },
    /// Linear UCB over a sphere net of actions, feature `(a, 1)/sqrt(2)`.
    LinUcbNet { eps: f64 },
    /// Sphere-projected running mean of responses.
    Imitation {
        c_alpha: f64,
        confidence_delta: f64,
    },
    /// Cap-restricted play after the revealing first response.
    ExpertGuided {
        mode: String,
        eps: Option<f64>,
        exploration: f64,
    },
    /// Explore-then-commit on signed-root-transformed responses.
    PolyProxy { rho: f64 },
    /// One interior probe, then the revealed optimum.
    Probe,
    /// Sphere-net optimism with witness elimination.
    OptimisticSphere { eps: f64 },
}

/// Full specification of a batch of episodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub spec: GameSpec,
    pub theta: ThetaSource,
    pub noise: NoiseSpec,
    pub agent: AgentSpec,
    pub horizon: usize,
    pub seeds: Vec<u64>,
    /// Strictly increasing round indices, last equal to the horizon;
    /// `None` selects the geometric default.
    pub checkpoints: Option<Vec<usize>>,
    /// Seed of the stream used for nets shared across episodes.
    #[serde(default)]
    pub net_seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.noise.validate()?;
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be >= 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if let ThetaSource::Explicit { theta } = &self.theta {
            theta.validate(&self.spec)?;
        }
        if let Some(cs) = &self.checkpoints {
            if cs.is_empty() || cs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config("checkpoints must be strictly increasing".into()));
            }
            if *cs.last().unwrap() != self.horizon || cs[0] == 0 {
                return Err(Error::Config(
                    "checkpoints must lie in [1, T] and end at the horizon".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn resolved_checkpoints(&self) -> Vec<usize> {
        match &self.checkpoints {
            Some(cs) => cs.clone(),
            None => default_checkpoints(self.horizon),
        }
    }
}

/// Geometric grid `{ceil(T * 2^-j)} union {1}`, ascending.
pub fn default_checkpoints(horizon: usize) -> Vec<usize> {
    let mut cs = vec![1usize];
    let mut j = 0u32;
    loop {
        let c = (horizon as f64 / 2f64.powi(j as i32)).ceil() as usize;
        if c <= 1 {
            break;
        }
        cs.push(c);
        j += 1;
    }
    cs.sort_unstable();
    cs.dedup();
    cs
}

/// One episode's regret curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTrace {
    pub seed: u64,
    pub checkpoints: Vec<usize>,
    /// Cumulative expected regret at each checkpoint.
    pub cum_regret: Vec<f64>,
    /// Cumulative empty-intersection fallbacks at each checkpoint.
    pub empty_intersections: Vec<u64>,
    pub wall_time_s: f64,
}

/// Seed-aggregated regret statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub checkpoints: Vec<usize>,
    pub mean_regret: Vec<f64>,
    pub stderr_regret: Vec<f64>,
    pub seeds: Vec<u64>,
}

/// Arm sets that are identical across episodes of a batch, built once from
/// the dedicated net stream.
enum SharedArms {
    None,
    Arms(Vec<Vec<f64>>),
}

fn build_shared_arms(config: &RunConfig) -> Result<SharedArms> {
    let mut rng = stream_rng(config.net_seed, "net");
    match &config.agent {
        AgentSpec::Covering { eps, .. } => {
            let eps = eps.unwrap_or_else(|| default_covering_eps(config.spec.d(), config.horizon));
            Ok(SharedArms::Arms(covering_arms(&config.spec, eps, &mut rng)?))
        }
        AgentSpec::LinUcbNet { eps } | AgentSpec::OptimisticSphere { eps } => {
            let net = build_net_sphere(config.spec.leader_dim(), *eps, &mut rng)?;
            Ok(SharedArms::Arms(net.points))
        }
        _ => Ok(SharedArms::None),
    }
}

fn build_agent(
    config: &RunConfig,
    shared: &SharedArms,
    theta: &Theta,
    agent_rng: RandomSource,
) -> Result<Box<dyn Agent + Send>> {
    let spec = &config.spec;
    let arms = |shared: &SharedArms| -> Result<Vec<Vec<f64>>> {
        match shared {
            SharedArms::Arms(a) => Ok(a.clone()),
            SharedArms::None => Err(Error::Runtime("missing shared arm set".into())),
        }
    };
    match &config.agent {
        AgentSpec::Oracle => Ok(Box::new(OracleAgent {
            action: optimal_action(spec, theta)?,
        })),
        AgentSpec::Covering { eps, exploration } => {
            let eps = eps.unwrap_or_else(|| default_covering_eps(spec.d(), config.horizon));
            Ok(Box::new(CoveringAgent::from_arms(arms(shared)?, eps, *exploration)?))
        }
        AgentSpec::LinUcbNet { .. } => {
            // Intercept feature absorbs constant reward components; the
            // 1/sqrt(2) keeps feature norms at 1.
            let s = std::f64::consts::FRAC_1_SQRT_2;
            Ok(Box::new(LinUcb::new(
                arms(shared)?,
                |a| {
                    let mut x: Vec<f64> = a.iter().map(|v| v * s).collect();
                    x.push(s);
                    x
                },
                1.0,
                config.noise.sigma_r,
                1.0 / config.horizon as f64,
                0.0,
            )?))
        }
        AgentSpec::Imitation {
            c_alpha,
            confidence_delta,
        } => Ok(Box::new(ImitationAgent::new(
            spec.d(),
            config.noise.sigma_b,
            config.horizon,
            *confidence_delta,
            *c_alpha,
        )?)),
        AgentSpec::ExpertGuided {
            mode,
            eps,
            exploration,
        } => {
            let mode = match mode.as_str() {
                "auto" => ExpertMode::Auto,
                "strong" => ExpertMode::Strong,
                "weak" => ExpertMode::Weak,
                other => {
                    return Err(Error::Config(format!("unknown expert mode '{other}'")));
                }
            };
            Ok(Box::new(ExpertGuidedAgent::new(
                spec,
                config.horizon,
                mode,
                *eps,
                config.noise.sigma_r,
                *exploration,
                agent_rng,
            )?))
        }
        AgentSpec::PolyProxy { rho } => Ok(Box::new(PolyProxyAgent::new(
            spec,
            config.horizon,
            *rho,
            agent_rng,
        )?)),
        AgentSpec::Probe => Ok(Box::new(ProbeAgent::new(spec)?)),
        AgentSpec::OptimisticSphere { .. } => {
            Ok(Box::new(OptimisticSphereAgent::from_arms(spec, arms(shared)?)?))
        }
    }
}

/// Test baseline that plays the known optimal action every round.
struct OracleAgent {
    action: Vec<f64>,
}

impl Agent for OracleAgent {
    fn act(&mut self, _t: usize) -> Result<Vec<f64>> {
        Ok(self.action.clone())
    }

    fn observe(&mut self, _t: usize, _a: &[f64], _b: &[f64], _r: f64) -> Result<()> {
        Ok(())
    }
}

fn episode_theta(config: &RunConfig, seed: u64) -> Result<Theta> {
    match &config.theta {
        ThetaSource::Explicit { theta } => Ok(theta.clone()),
        ThetaSource::SeededRandom => {
            let mut rng = stream_rng(seed, "theta");
            Ok(config.spec.sample_theta(&mut rng))
        }
    }
}

/// Per-round record passed to [`run_episode_observed`] observers.
#[derive(Debug, Clone)]
pub struct RoundRecord<'a> {
    pub t: usize,
    pub action: &'a [f64],
    /// The follower's true (noiseless) best response this round.
    pub b_true: &'a [f64],
    /// Expected regret incurred this round.
    pub regret: f64,
}

fn run_episode_inner(
    config: &RunConfig,
    shared: &SharedArms,
    seed: u64,
    observer: &mut dyn FnMut(&RoundRecord),
) -> Result<RegretTrace> {
    let start = Instant::now();
    let theta = episode_theta(config, seed)?;
    theta.validate(&config.spec)?;
    let mut noise_rng = stream_rng(seed, "noise");
    let agent_rng = stream_rng(seed, "agent");
    let mut agent = build_agent(config, shared, &theta, agent_rng)?;

    let a_star = optimal_action(&config.spec, &theta)?;
    let best = hbar(&config.spec, &theta, &a_star)?;
    let checkpoints = config.resolved_checkpoints();
    let mut cum_regret = Vec::with_capacity(checkpoints.len());
    let mut empties = Vec::with_capacity(checkpoints.len());
    let mut regret = 0.0;
    let mut next = 0usize;
    for t in 1..=config.horizon {
        let a = agent.act(t)?;
        // hbar validates the action's domain membership each round.
        let value = hbar(&config.spec, &theta, &a)?;
        let out = step(&config.spec, &theta, &config.noise, &a, &mut noise_rng)?;
        agent.observe(t, &a, &out.b_obs, out.reward)?;
        regret += best - value;
        observer(&RoundRecord {
            t,
            action: &a,
            b_true: &out.b_true,
            regret: best - value,
        });
        while next < checkpoints.len() && checkpoints[next] == t {
            cum_regret.push(regret);
            empties.push(agent.empty_intersection_count());
            next += 1;
        }
    }
    Ok(RegretTrace {
        seed,
        checkpoints,
        cum_regret,
        empty_intersections: empties,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Runs one seeded episode. Deterministic given `(config, seed)`: the seed
/// is split into independent streams for the parameter draw, the noise and
/// the agent's own randomness.
pub fn run_episode(config: &RunConfig, seed: u64) -> Result<RegretTrace> {
    config.validate()?;
    let shared = build_shared_arms(config)?;
    run_episode_inner(config, &shared, seed, &mut |_| {})
}

/// [`run_episode`] with a per-round observer, for inspection of the actions,
/// true responses and per-round regret that checkpoint traces aggregate away.
pub fn run_episode_observed(
    config: &RunConfig,
    seed: u64,
    observer: &mut dyn FnMut(&RoundRecord),
) -> Result<RegretTrace> {
    config.validate()?;
    let shared = build_shared_arms(config)?;
    run_episode_inner(config, &shared, seed, observer)
}

/// Runs all seeds (possibly in parallel; results are ordered by the seed
/// list and identical to sequential execution) and aggregates.
pub fn run_batch(config: &RunConfig) -> Result<(BatchSummary, Vec<RegretTrace>)> {
    config.validate()?;
    let shared = build_shared_arms(config)?;
    let traces: Result<Vec<RegretTrace>> = config
        .seeds
        .par_iter()
        .map(|&seed| run_episode_inner(config, &shared, seed, &mut |_| {}))
        .collect();
    let traces = traces?;
    let summary = summarize(&config.seeds, &traces)?;
    Ok((summary, traces))
}

fn summarize(seeds: &[u64], traces: &[RegretTrace]) -> Result<BatchSummary> {
    let n = traces.len();
    let checkpoints = traces[0].checkpoints.clone();
    let k = checkpoints.len();
    let mut mean = vec![0.0; k];
    let mut stderr = vec![0.0; k];
    for i in 0..k {
        let vals: Vec<f64> = traces.iter().map(|t| t.cum_regret[i]).collect();
        let m = vals.iter().sum::<f64>() / n as f64;
        mean[i] = m;
        if n > 1 {
            let var = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n as f64 - 1.0);
            stderr[i] = (var / n as f64).sqrt();
        }
    }
    Ok(BatchSummary {
        checkpoints,
        mean_regret: mean,
        stderr_regret: stderr,
        seeds: seeds.to_vec(),
    })
}

/// OLS slope (with standard error) of `log(mean regret)` against `log t`
/// over the checkpoints falling in `[window.0, window.1]`.
pub fn scaling_exponent(summary: &BatchSummary, window: (usize, usize)) -> Result<(f64, f64)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, &c) in summary.checkpoints.iter().enumerate() {
        if c >= window.0 && c <= window.1 {
            let r = summary.mean_regret[i];
            if r <= 0.0 {
                return Err(Error::Numeric(format!(
                    "nonpositive mean regret {r} at checkpoint {c}; exponent undefined"
                )));
            }
            xs.push((c as f64).ln());
            ys.push(r.ln());
        }
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::Config(format!(
            "need >= 3 checkpoints in the window, found {n}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let residual_var: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let fit = my + slope * (x - mx);
            (y - fit) * (y - fit)
        })
        .sum::<f64>()
        / (nf - 2.0).max(1.0);
    let se = (residual_var / sxx).sqrt();
    Ok((slope, se))
}

/// Fraction of seeds whose ball confidence set contains the true parameter
/// at every round `t in [2, T]`. Imitation agent only.
pub fn coverage_rate(config: &RunConfig) -> Result<f64> {
    config.validate()?;
    let AgentSpec::Imitation {
        c_alpha,
        confidence_delta,
    } = config.agent
    else {
        return Err(Error::Config("coverage_rate requires the imitation agent".into()));
    };
    let covered: Result<Vec<bool>> = config
        .seeds
        .par_iter()
        .map(|&seed| -> Result<bool> {
            let theta = episode_theta(config, seed)?;
            theta.validate(&config.spec)?;
            let Theta::Imitation { theta: theta_vec } = &theta else {
                return Err(Error::Config("coverage_rate requires the imitation game".into()));
            };
            let mut noise_rng = stream_rng(seed, "noise");
            let mut agent = ImitationAgent::new(
                config.spec.d(),
                config.noise.sigma_b,
                config.horizon,
                confidence_delta,
                c_alpha,
            )?;
            let mut ok = true;
            for t in 1..=config.horizon {
                let a = agent.act(t)?;
                let out = step(&config.spec, &theta, &config.noise, &a, &mut noise_rng)?;
                agent.observe(t, &a, &out.b_obs, out.reward)?;
                if t + 1 <= config.horizon && !agent.confidence(t + 1)?.contains(theta_vec) {
                    ok = false;
                    break;
                }
            }
            Ok(ok)
        })
        .collect();
    let covered = covered?;
    Ok(covered.iter().filter(|&&c| c).count() as f64 / covered.len() as f64)
}
