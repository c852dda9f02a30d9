//! Optimistic policy optimization over a linear mixture MDP.
//!
//! Each episode the agent plays the softmax policy
//! `pi_h^k(a|s) ∝ exp(alpha * sum_{i<k} Q_{i,h}(s,a))`, receives the full reward
//! table afterwards, and runs a backward pass that builds optimistic `Q_k, V_k`
//! from the per-stage regressions and then feeds the visited transitions back
//! into them.
//!
//! The agent only ever sees the [`FeatureMap`]; true parameters stay on the
//! simulator side.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{sigma_bar, EstimatorConfig, StageEstimator};
use crate::instances::Adversary;
use crate::mdp::{FeatureMap, MixtureMdp, Policy, RewardSchedule, RewardTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Variance-weighted regression with Bernstein-style bonuses.
    PowerBernstein,
    /// Same loop with every regression weight fixed at 1 and no second-moment regression.
    HoeffdingUnitWeight,
    /// Uniformly random actions, no learning.
    UniformPolicy,
}

impl Variant {
    pub const ALL: [Variant; 3] = [
        Variant::PowerBernstein,
        Variant::HoeffdingUnitWeight,
        Variant::UniformPolicy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::PowerBernstein => "power-bernstein",
            Variant::HoeffdingUnitWeight => "hoeffding-unit-weight",
            Variant::UniformPolicy => "uniform-policy",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::UnknownVariant(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    /// Mirror-descent step size `alpha`.
    pub learning_rate: f64,
    pub estimator: EstimatorConfig,
    pub variant: Variant,
}

impl AgentConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidParams(format!(
                "learning rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        self.estimator.check()
    }
}

/// `sqrt(log|A| / (H^2 K))`. With a single action every step size gives the
/// same policy, so 1 is returned there.
pub fn auto_learning_rate(num_actions: usize, horizon: usize, episodes: usize) -> f64 {
    if num_actions <= 1 {
        return 1.0;
    }
    let h = horizon as f64;
    ((num_actions as f64).ln() / (h * h * episodes as f64)).sqrt()
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= total);
    out
}

/// One exponential-weights step `pi ∝ prev * exp(alpha * q)`.
pub fn exp_weights_update(prev: &[f64], q: &[f64], alpha: f64) -> Vec<f64> {
    assert_eq!(prev.len(), q.len());
    let logits: Vec<f64> = prev
        .iter()
        .zip(q)
        .map(|(&p, &qa)| if p > 0.0 { p.ln() + alpha * qa } else { f64::NEG_INFINITY })
        .collect();
    softmax(&logits)
}

/// Optimistic tables of one episode: `Q[h][s][a]` for `h < H`, `V[h][s]` for `h <= H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimisticValues {
    horizon: usize,
    num_states: usize,
    num_actions: usize,
    q: Vec<f64>,
    v: Vec<f64>,
}

impl OptimisticValues {
    pub fn q(&self, h: usize, s: usize, a: usize) -> f64 {
        self.q[(h * self.num_states + s) * self.num_actions + a]
    }

    pub fn q_row(&self, h: usize, s: usize) -> &[f64] {
        let o = (h * self.num_states + s) * self.num_actions;
        &self.q[o..o + self.num_actions]
    }

    pub fn v(&self, h: usize, s: usize) -> f64 {
        self.v[h * self.num_states + s]
    }

    /// `V_{k,h}` over all states; `h = H` is the zero terminal row.
    pub fn v_row(&self, h: usize) -> &[f64] {
        &self.v[h * self.num_states..(h + 1) * self.num_states]
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }
}

/// Regression bookkeeping for the visited pair of one stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageStats {
    /// Regression weight actually used (1 for the unit-weight variant).
    pub sigma_bar: f64,
    pub estimated_variance: Option<f64>,
    pub bonus: Option<f64>,
}

/// Visited states (`H + 1` entries) and actions (`H` entries).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<usize>,
    pub actions: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Agent {
    cfg: AgentConfig,
    features: Arc<FeatureMap>,
    horizon: usize,
    cum_q: Vec<f64>,
    estimators: Vec<StageEstimator>,
    episodes: usize,
}

/// Builds an agent of the given variant; `variant` overrides `cfg.variant`.
pub fn make_agent(variant: &str, cfg: AgentConfig, features: Arc<FeatureMap>) -> Result<Agent> {
    let variant = variant.parse()?;
    Agent::new(AgentConfig { variant, ..cfg }, features)
}

impl Agent {
    pub fn new(cfg: AgentConfig, features: Arc<FeatureMap>) -> Result<Self> {
        cfg.check()?;
        if cfg.estimator.dim != features.dim() {
            return Err(Error::Shape(format!(
                "estimator dimension {} does not match feature dimension {}",
                cfg.estimator.dim,
                features.dim()
            )));
        }
        let horizon = cfg.estimator.horizon;
        let cells = horizon * features.num_states() * features.num_actions();
        Ok(Self {
            estimators: (0..horizon).map(|_| StageEstimator::new(&cfg.estimator)).collect(),
            cum_q: vec![0.0; cells],
            horizon,
            features,
            cfg,
            episodes: 0,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.cfg
    }

    pub fn variant(&self) -> Variant {
        self.cfg.variant
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_states(&self) -> usize {
        self.features.num_states()
    }

    pub fn num_actions(&self) -> usize {
        self.features.num_actions()
    }

    /// Episodes learned from so far.
    pub fn episodes(&self) -> usize {
        self.episodes
    }

    pub fn estimator(&self, h: usize) -> &StageEstimator {
        &self.estimators[h]
    }

    /// `sum_{i<k} Q_{i,h}(s, .)`.
    pub fn cum_q(&self, h: usize, s: usize) -> &[f64] {
        let na = self.num_actions();
        let o = (h * self.num_states() + s) * na;
        &self.cum_q[o..o + na]
    }

    /// `pi_h^k(. | s)` for the upcoming episode.
    pub fn policy_at(&self, h: usize, s: usize) -> Vec<f64> {
        let alpha = self.cfg.learning_rate;
        let logits: Vec<f64> = self.cum_q(h, s).iter().map(|&q| alpha * q).collect();
        softmax(&logits)
    }

    /// The full tabular policy for the upcoming episode.
    pub fn policy(&self) -> Policy {
        let (ns, na) = (self.num_states(), self.num_actions());
        let mut probs = Vec::with_capacity(self.horizon * ns * na);
        for h in 0..self.horizon {
            for s in 0..ns {
                probs.extend(self.policy_at(h, s));
            }
        }
        Policy::from_probs(self.horizon, ns, na, probs).expect("softmax rows are distributions")
    }

    pub fn sample_action<R: Rng + ?Sized>(&self, h: usize, s: usize, rng: &mut R) -> usize {
        sample_index(&self.policy_at(h, s), rng)
    }

    /// Optimistic backward recursion for episode `k` using data from episodes `< k`.
    pub fn backup_optimistic_values(&self, k: usize, rewards: &RewardTable) -> OptimisticValues {
        let (ns, na, horizon) = (self.num_states(), self.num_actions(), self.horizon);
        assert_eq!(rewards.dims(), (horizon, ns, na), "reward table dims");
        let mut q = vec![0.0; horizon * ns * na];
        let mut v = vec![0.0; (horizon + 1) * ns];
        for h in (0..horizon).rev() {
            let cap = (horizon - h) as f64;
            let est = &self.estimators[h];
            let phis = self.features.phi_v(&v[(h + 1) * ns..(h + 2) * ns]);
            for s in 0..ns {
                let pi = self.policy_at(h, s);
                let mut vs = 0.0;
                for a in 0..na {
                    let phi = phis.get(s, a);
                    let raw = rewards.get(h, s, a) + est.predict(phi) + est.confidence_width(&self.cfg.estimator, k, phi);
                    let qa = raw.clamp(0.0, cap);
                    q[(h * ns + s) * na + a] = qa;
                    vs += pi[a] * qa;
                }
                v[h * ns + s] = vs;
            }
        }
        OptimisticValues {
            horizon,
            num_states: ns,
            num_actions: na,
            q,
            v,
        }
    }

    /// Backward pass of episode `k`: optimistic values, regression updates on
    /// the visited pairs, then `Q_k` folded into the cumulative logits.
    pub fn learn(
        &mut self,
        k: usize,
        trajectory: &Trajectory,
        rewards: &RewardTable,
    ) -> Result<(Option<OptimisticValues>, Vec<StageStats>)> {
        if k != self.episodes + 1 {
            return Err(Error::Invariant(format!(
                "agent expected episode {}, got {k}",
                self.episodes + 1
            )));
        }
        if self.cfg.variant == Variant::UniformPolicy {
            self.episodes += 1;
            return Ok((None, Vec::new()));
        }
        let values = self.backup_optimistic_values(k, rewards);
        if values.q.iter().chain(&values.v).any(|x| !x.is_finite()) {
            return Err(Error::Invariant(format!("non-finite optimistic value in episode {k}")));
        }

        let horizon = self.horizon;
        let cfg = self.cfg.estimator;
        let mut stats = Vec::with_capacity(horizon);
        for h in (0..horizon).rev() {
            let (s, a, next) = (
                trajectory.states[h],
                trajectory.actions[h],
                trajectory.states[h + 1],
            );
            let v_next = values.v_row(h + 1);
            let v_next_sq: Vec<f64> = v_next.iter().map(|x| x * x).collect();
            let phi_v = self.features.phi_v_at(s, a, v_next);
            let target = v_next[next];
            let est = &mut self.estimators[h];
            let stage = match self.cfg.variant {
                Variant::PowerBernstein => {
                    let phi_v2 = self.features.phi_v_at(s, a, &v_next_sq);
                    let var = est.estimated_variance(&phi_v, &phi_v2, horizon);
                    let bonus = est.bonus(&cfg, k, &phi_v, &phi_v2);
                    let weight = sigma_bar(&cfg, var, bonus);
                    est.rank1_update(&cfg, &phi_v, target, &phi_v2, target * target, weight)?;
                    StageStats {
                        sigma_bar: weight,
                        estimated_variance: Some(var),
                        bonus: Some(bonus),
                    }
                }
                Variant::HoeffdingUnitWeight => {
                    est.unit_weight_update(&phi_v, target)?;
                    StageStats {
                        sigma_bar: 1.0,
                        estimated_variance: None,
                        bonus: None,
                    }
                }
                Variant::UniformPolicy => unreachable!(),
            };
            stats.push(stage);
        }
        stats.reverse();

        for (c, q) in self.cum_q.iter_mut().zip(&values.q) {
            *c += q;
        }
        self.episodes += 1;
        Ok((Some(values), stats))
    }
}

pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        last = i;
        acc += p;
        if u < acc {
            return i;
        }
    }
    last
}

/// Independent random streams of one run, split from a single seed.
#[derive(Debug, Clone)]
pub struct RunRngs {
    pub agent: ChaCha8Rng,
    pub env: ChaCha8Rng,
    pub adversary: ChaCha8Rng,
}

impl RunRngs {
    pub fn new(seed: u64) -> Self {
        let stream = |n: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(n);
            rng
        };
        Self {
            agent: stream(0),
            env: stream(1),
            adversary: stream(2),
        }
    }
}

/// Everything that happened in one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub trajectory: Trajectory,
    pub rewards: RewardTable,
    /// `pi^k`, the policy played.
    pub policy: Policy,
    /// `Q_k, V_k`; absent for the uniform variant.
    pub values: Option<OptimisticValues>,
    /// Per stage `h = 0..H`; empty for the uniform variant.
    pub stages: Vec<StageStats>,
}

impl EpisodeRecord {
    /// `V_k[1][s_1]`.
    pub fn optimistic_value(&self) -> Option<f64> {
        self.values.as_ref().map(|v| v.v(0, self.trajectory.states[0]))
    }

    /// One line of the newline-delimited run log.
    pub fn to_log_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            episode: usize,
            states: &'a [usize],
            actions: &'a [usize],
            sigma_bar: Vec<f64>,
            optimistic_value: Option<f64>,
        }
        serde_json::to_string(&Line {
            episode: self.episode,
            states: &self.trajectory.states,
            actions: &self.trajectory.actions,
            sigma_bar: self.stages.iter().map(|s| s.sigma_bar).collect(),
            optimistic_value: self.optimistic_value(),
        })
        .expect("log line serializes")
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunLog {
    pub records: Vec<EpisodeRecord>,
}

impl RunLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// The reward tables revealed so far.
    pub fn schedule(&self) -> RewardSchedule {
        RewardSchedule::new(self.records.iter().map(|r| r.rewards.clone()).collect())
            .expect("recorded rewards were range-checked")
    }

    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_log_line());
            out.push('\n');
        }
        out
    }
}

/// Plays episode `k`: the adversary commits to `r^k`, the agent rolls out
/// `pi^k` in `env`, then sees `r^k` and learns.
pub fn run_episode(
    agent: &mut Agent,
    env: &MixtureMdp,
    adversary: &mut Adversary,
    k: usize,
    rngs: &mut RunRngs,
) -> Result<EpisodeRecord> {
    let rewards = adversary.next_reward(k, &mut rngs.adversary);
    rewards.check_range()?;
    let policy = agent.policy();

    let horizon = env.horizon();
    let mut states = Vec::with_capacity(horizon + 1);
    let mut actions = Vec::with_capacity(horizon);
    let mut s = env.initial_state();
    states.push(s);
    for h in 0..horizon {
        let a = sample_index(policy.row(h, s), &mut rngs.agent);
        s = env.sample_transition(h, s, a, &mut rngs.env)?;
        actions.push(a);
        states.push(s);
    }
    let trajectory = Trajectory { states, actions };

    let (values, stages) = agent.learn(k, &trajectory, &rewards)?;
    adversary.observe(&trajectory.states, &trajectory.actions);
    Ok(EpisodeRecord {
        episode: k,
        trajectory,
        rewards,
        policy,
        values,
        stages,
    })
}

/// Runs episodes `1..=num_episodes` and collects the log.
pub fn run_episodes(
    agent: &mut Agent,
    env: &MixtureMdp,
    adversary: &mut Adversary,
    num_episodes: usize,
    rngs: &mut RunRngs,
) -> Result<RunLog> {
    let mut log = RunLog::default();
    for k in 1..=num_episodes {
        log.records.push(run_episode(agent, env, adversary, k, rngs)?);
    }
    Ok(log)
}
