//! Leader policies.
//!
//! Every policy implements [`Agent`]: a stateful act/observe loop that sees
//! only its own past actions, noisy responses and noisy rewards — never the
//! true parameter.

pub mod confidence;
pub mod covering;
pub mod expert;
pub mod imitation;
pub mod linucb;
pub mod optimism;
pub mod poly;
pub mod ucb1;

pub use confidence::{confidence_intersection, BallConfidence, EllipsoidConfidence};
pub use covering::{covering_arms, default_covering_eps, CoveringAgent};
pub use expert::{ExpertGuidedAgent, ExpertMode};
pub use imitation::ImitationAgent;
pub use linucb::LinUcb;
pub use optimism::{optimistic_interior_value, OptimisticSphereAgent, ProbeAgent};
pub use poly::PolyProxyAgent;
pub use ucb1::Ucb1;

use crate::error::Result;

/// Stateful leader policy. Rounds are 1-based; the harness calls `act(t)`
/// then `observe(t, ...)` with the outcome of that round.
pub trait Agent {
    /// Action for round `t`.
    fn act(&mut self, t: usize) -> Result<Vec<f64>>;

    /// Feed back round `t`'s played action, observed (noisy) response and
    /// observed (noisy) reward.
    fn observe(&mut self, t: usize, a: &[f64], b_obs: &[f64], reward: f64) -> Result<()>;

    /// Rounds on which a confidence-set intersection came up empty and the
    /// policy fell back to the reward-only set. Zero for policies without
    /// intersections.
    fn empty_intersection_count(&self) -> u64 {
        0
    }
}
