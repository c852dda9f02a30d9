//! Benchmark instances and reward adversaries.
//!
//! The hard family has states `s_1..s_{H+2}` (indices `0..=H+1`), where
//! `s_{H+1}` is an absorbing sink and `s_{H+2}` is the absorbing rewarding
//! state. Actions are the hypercube `{-1,+1}^{d-1}`; action index `i` maps to
//! the vector whose `j`-th entry is `+1` iff bit `j` of `i` is set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mdp::{FeatureMap, MixtureMdp, RewardSchedule, RewardTable};

/// Largest dimension accepted by the hard-instance builder (`A = 2^{d-1}`).
pub const MAX_HARD_DIM: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct HardInstanceParams {
    pub dim: usize,
    pub horizon: usize,
    /// `Delta`, the per-coordinate magnitude of `mu_h`.
    pub gap: f64,
    /// Sign of each coordinate of `mu_h`, `H` rows of length `d - 1`.
    pub signs: Vec<Vec<bool>>,
}

impl HardInstanceParams {
    /// Gap defaults to `delta / (2 (d - 1))`.
    pub fn new(dim: usize, horizon: usize, signs: Vec<Vec<bool>>) -> Self {
        let gap = default_gap(dim, horizon);
        Self {
            dim,
            horizon,
            gap,
            signs,
        }
    }

    /// Signs drawn uniformly from a seeded stream.
    pub fn seeded(dim: usize, horizon: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let signs = (0..horizon)
            .map(|_| (0..dim.saturating_sub(1)).map(|_| rng.gen::<bool>()).collect())
            .collect();
        Self::new(dim, horizon, signs)
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.gap = gap;
        self
    }

    pub fn delta(&self) -> f64 {
        1.0 / self.horizon as f64
    }

    pub fn alpha(&self) -> f64 {
        (1.0 / (1.0 + (self.dim - 1) as f64 * self.gap)).sqrt()
    }

    pub fn beta(&self) -> f64 {
        (self.gap / (1.0 + (self.dim - 1) as f64 * self.gap)).sqrt()
    }

    /// `mu_h` in `{-Delta, +Delta}^{d-1}`.
    pub fn mu(&self, h: usize) -> Vec<f64> {
        self.signs[h]
            .iter()
            .map(|&up| if up { self.gap } else { -self.gap })
            .collect()
    }

    pub fn num_actions(&self) -> usize {
        1 << (self.dim - 1)
    }

    /// Index of the action `sign(mu_h)`, which maximizes the chance of reaching the reward.
    pub fn best_action(&self, h: usize) -> usize {
        self.signs[h]
            .iter()
            .enumerate()
            .filter(|(_, &up)| up)
            .map(|(j, _)| 1usize << j)
            .sum()
    }

    pub fn check(&self) -> Result<()> {
        if self.dim < 4 {
            return Err(Error::InvalidParams(format!("hard instance needs d >= 4, got {}", self.dim)));
        }
        if self.dim > MAX_HARD_DIM {
            return Err(Error::InvalidParams(format!(
                "hard instance capped at d <= {MAX_HARD_DIM} (2^(d-1) actions), got {}",
                self.dim
            )));
        }
        if self.horizon < 3 {
            return Err(Error::InvalidParams(format!(
                "hard instance needs H >= 3, got {}",
                self.horizon
            )));
        }
        if !(self.gap > 0.0) || !self.gap.is_finite() {
            return Err(Error::InvalidParams(format!("gap must be positive, got {}", self.gap)));
        }
        if (self.dim - 1) as f64 * self.gap > self.delta() {
            return Err(Error::InvalidParams(format!(
                "(d-1) * gap = {} exceeds delta = 1/H = {}",
                (self.dim - 1) as f64 * self.gap,
                self.delta()
            )));
        }
        if self.signs.len() != self.horizon || self.signs.iter().any(|r| r.len() != self.dim - 1) {
            return Err(Error::InvalidParams("sign pattern must be H rows of length d-1".into()));
        }
        Ok(())
    }
}

pub fn default_gap(dim: usize, horizon: usize) -> f64 {
    1.0 / horizon as f64 / (2.0 * dim.saturating_sub(1).max(1) as f64)
}

/// The hypercube vector of action index `a` in dimension `n`.
pub fn action_vector(a: usize, n: usize) -> Vec<f64> {
    (0..n).map(|j| if a >> j & 1 == 1 { 1.0 } else { -1.0 }).collect()
}

/// Reward 1 in the rewarding sink `s_{H+2}`, 0 elsewhere.
pub fn hard_reward_table(horizon: usize, num_actions: usize) -> RewardTable {
    let goal = horizon + 1;
    RewardTable::from_fn(horizon, horizon + 2, num_actions, |_, s, _| {
        if s == goal {
            1.0
        } else {
            0.0
        }
    })
}

/// Builds the hard family together with its (episode-invariant) reward schedule.
pub fn build_hard_instance(params: &HardInstanceParams, num_episodes: usize) -> Result<(MixtureMdp, RewardSchedule)> {
    params.check()?;
    let (d, horizon) = (params.dim, params.horizon);
    let num_states = horizon + 2;
    let num_actions = params.num_actions();
    let (alpha, beta, delta) = (params.alpha(), params.beta(), params.delta());
    let sink = horizon;
    let goal = horizon + 1;

    let mut fm = FeatureMap::new(num_states, num_actions, d, vec![0.0; num_states * num_actions * num_states * d])?;
    for a in 0..num_actions {
        let av = action_vector(a, d - 1);
        for j in 0..horizon {
            let cont = fm.feature_mut(j, a, j + 1);
            cont[0] = alpha * (1.0 - delta);
            for (c, x) in cont[1..].iter_mut().zip(&av) {
                *c = -beta * x;
            }
            let win = fm.feature_mut(j, a, goal);
            win[0] = alpha * delta;
            for (c, x) in win[1..].iter_mut().zip(&av) {
                *c = beta * x;
            }
        }
        fm.feature_mut(sink, a, sink)[0] = alpha;
        fm.feature_mut(goal, a, goal)[0] = alpha;
    }

    let theta = (0..horizon)
        .map(|h| {
            let mut t = Vec::with_capacity(d);
            t.push(1.0 / alpha);
            t.extend(params.mu(h).into_iter().map(|m| m / beta));
            t
        })
        .collect();
    let mdp = MixtureMdp::new(fm, theta, 2.0, 0)?;
    let schedule = RewardSchedule::repeated(hard_reward_table(horizon, num_actions), num_episodes);
    Ok((mdp, schedule))
}

/// A random valid mixture of `d` base kernels with features scaled by `1/sqrt(d)`.
pub fn build_random_instance(
    seed: u64,
    num_states: usize,
    num_actions: usize,
    dim: usize,
    horizon: usize,
) -> Result<MixtureMdp> {
    if num_states == 0 || num_actions == 0 || dim == 0 || horizon == 0 {
        return Err(Error::InvalidParams("all counts must be at least 1".into()));
    }
    if dim > num_states {
        return Err(Error::InvalidParams(format!(
            "random instances need d <= S, got d = {dim}, S = {num_states}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (dim as f64).sqrt();
    let mut fm = FeatureMap::new(
        num_states,
        num_actions,
        dim,
        vec![0.0; num_states * num_actions * num_states * dim],
    )?;
    for j in 0..dim {
        for s in 0..num_states {
            for a in 0..num_actions {
                let row = simplex_point(&mut rng, num_states);
                for (s2, p) in row.into_iter().enumerate() {
                    fm.feature_mut(s, a, s2)[j] = p * scale;
                }
            }
        }
    }
    let theta: Vec<Vec<f64>> = (0..horizon)
        .map(|_| simplex_point(&mut rng, dim).into_iter().map(|w| w / scale).collect())
        .collect();
    let largest = theta
        .iter()
        .map(|t| t.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let bound = largest.ceil().max(1.0);
    MixtureMdp::new(fm, theta, bound, 0)
}

/// Uniform draw from the probability simplex (normalized exponentials).
fn simplex_point<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = x.iter().sum();
    if total > 0.0 {
        x.iter_mut().for_each(|v| *v /= total);
    } else {
        x.iter_mut().for_each(|v| *v = 1.0 / n as f64);
    }
    x
}

/// Uniform `[0, 1]` table.
pub fn uniform_reward_table<R: Rng>(rng: &mut R, horizon: usize, num_states: usize, num_actions: usize) -> RewardTable {
    RewardTable::from_fn(horizon, num_states, num_actions, |_, _, _| rng.gen::<f64>())
}

#[derive(Debug, Clone, PartialEq)]
pub enum AdversaryKind {
    /// The same table every episode.
    Fixed(RewardTable),
    /// A fresh uniform table each episode.
    SeededUniform,
    /// Cycles through the tables, one episode each: `k` uses `tables[(k-1) % len]`.
    Periodic(Vec<RewardTable>),
    /// Rewards `1 - (fraction of past episodes that visited (h, s, a))`.
    AdaptiveAntagonist,
}

/// Reward generator for one run. Decides `r^k` from past episodes only.
#[derive(Debug, Clone)]
pub struct Adversary {
    kind: AdversaryKind,
    horizon: usize,
    num_states: usize,
    num_actions: usize,
    visits: Vec<u64>,
    episodes_seen: u64,
}

impl Adversary {
    pub fn new(kind: AdversaryKind, horizon: usize, num_states: usize, num_actions: usize) -> Result<Self> {
        let dims = (horizon, num_states, num_actions);
        let tables: &[RewardTable] = match &kind {
            AdversaryKind::Fixed(t) => std::slice::from_ref(t),
            AdversaryKind::Periodic(ts) => {
                if ts.is_empty() {
                    return Err(Error::InvalidParams("periodic adversary needs at least one table".into()));
                }
                ts
            }
            _ => &[],
        };
        for t in tables {
            if t.dims() != dims {
                return Err(Error::Shape(format!(
                    "adversary table dims {:?} do not match instance {:?}",
                    t.dims(),
                    dims
                )));
            }
            t.check_range()?;
        }
        Ok(Self {
            kind,
            horizon,
            num_states,
            num_actions,
            visits: vec![0; horizon * num_states * num_actions],
            episodes_seen: 0,
        })
    }

    pub fn kind(&self) -> &AdversaryKind {
        &self.kind
    }

    /// Reward table for episode `k` (1-based), fixed before the episode is played.
    pub fn next_reward<R: Rng + ?Sized>(&mut self, k: usize, rng: &mut R) -> RewardTable {
        assert!(k >= 1, "episodes are 1-based");
        let (h, s, a) = (self.horizon, self.num_states, self.num_actions);
        match &self.kind {
            AdversaryKind::Fixed(t) => t.clone(),
            AdversaryKind::SeededUniform => RewardTable::from_fn(h, s, a, |_, _, _| rng.gen::<f64>()),
            AdversaryKind::Periodic(ts) => ts[(k - 1) % ts.len()].clone(),
            AdversaryKind::AdaptiveAntagonist => {
                let n = self.episodes_seen;
                let visits = &self.visits;
                RewardTable::from_fn(h, s, a, |hh, ss, aa| {
                    if n == 0 {
                        1.0
                    } else {
                        let c = visits[(hh * s + ss) * a + aa];
                        (1.0 - c as f64 / n as f64).clamp(0.0, 1.0)
                    }
                })
            }
        }
    }

    /// Records a finished trajectory; `states` has `H + 1` entries, `actions` has `H`.
    pub fn observe(&mut self, states: &[usize], actions: &[usize]) {
        for (h, (&s, &a)) in states.iter().zip(actions).enumerate() {
            self.visits[(h * self.num_states + s) * self.num_actions + a] += 1;
        }
        self.episodes_seen += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: usize, h: usize) -> HardInstanceParams {
        HardInstanceParams::seeded(d, h, 7)
    }

    #[test]
    fn hard_instance_constants() {
        let p = params(4, 3);
        assert!((p.delta() - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.gap - 1.0 / 18.0).abs() < 1e-15);
        let (mdp, sched) = build_hard_instance(&p, 5).unwrap();
        assert_eq!(mdp.num_states(), 5);
        assert_eq!(mdp.num_actions(), 8);
        assert_eq!(sched.num_episodes(), 5);
        for h in 0..3 {
            let n: f64 = mdp.theta(h).iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(n <= 2.0);
        }
        assert!(mdp.validate().is_valid(), "{}", mdp.validate());
    }

    #[test]
    fn hard_instance_rejects_bad_params() {
        assert!(build_hard_instance(&params(3, 3), 1).is_err());
        assert!(build_hard_instance(&params(4, 2), 1).is_err());
        assert!(build_hard_instance(&params(13, 3), 1).is_err());
        let p = params(4, 3).with_gap(0.2);
        assert!(matches!(build_hard_instance(&p, 1), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn best_action_matches_signs() {
        let p = HardInstanceParams::new(4, 3, vec![vec![true, false, true]; 3]);
        assert_eq!(p.best_action(0), 0b101);
        assert_eq!(action_vector(0b101, 3), vec![1.0, -1.0, 1.0]);
    }

    #[test]
    fn random_instance_is_deterministic_and_valid() {
        let a = build_random_instance(3, 4, 3, 3, 3).unwrap();
        let b = build_random_instance(3, 4, 3, 3, 3).unwrap();
        assert_eq!(a.features(), b.features());
        assert_eq!(a.thetas(), b.thetas());
        assert!(a.validate().is_valid());
        assert!(build_random_instance(0, 2, 2, 3, 2).is_err());
    }

    #[test]
    fn single_component_is_stage_invariant() {
        let m = build_random_instance(11, 4, 2, 1, 3).unwrap();
        assert!(m.validate().is_valid());
        for s in 0..4 {
            for a in 0..2 {
                let r0 = m.transition_row(0, s, a);
                for h in 1..3 {
                    assert_eq!(r0, m.transition_row(h, s, a));
                }
                assert!((r0.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn fixed_and_periodic_adversaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t0 = RewardTable::constant(2, 2, 2, 0.1);
        let t1 = RewardTable::constant(2, 2, 2, 0.9);
        let mut fixed = Adversary::new(AdversaryKind::Fixed(t0.clone()), 2, 2, 2).unwrap();
        for k in 1..5 {
            assert_eq!(fixed.next_reward(k, &mut rng), t0);
        }
        let mut per = Adversary::new(AdversaryKind::Periodic(vec![t0.clone(), t1.clone()]), 2, 2, 2).unwrap();
        for k in 1..7 {
            let expected = if k % 2 == 1 { &t0 } else { &t1 };
            assert_eq!(&per.next_reward(k, &mut rng), expected);
        }
    }

    #[test]
    fn adaptive_adversary_penalizes_visits() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut adv = Adversary::new(AdversaryKind::AdaptiveAntagonist, 2, 2, 2).unwrap();
        let first = adv.next_reward(1, &mut rng);
        assert!(first.as_slice().iter().all(|&r| r == 1.0));
        adv.observe(&[0, 1, 1], &[1, 0]);
        adv.observe(&[0, 0, 1], &[1, 1]);
        let r = adv.next_reward(3, &mut rng);
        assert_eq!(r.get(0, 0, 1), 0.0);
        assert_eq!(r.get(1, 1, 0), 0.5);
        assert_eq!(r.get(1, 0, 1), 0.5);
        assert_eq!(r.get(0, 1, 0), 1.0);
    }

    #[test]
    fn uniform_adversary_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut adv = Adversary::new(AdversaryKind::SeededUniform, 3, 4, 2).unwrap();
        for k in 1..20 {
            adv.next_reward(k, &mut rng).check_range().unwrap();
        }
    }
}
