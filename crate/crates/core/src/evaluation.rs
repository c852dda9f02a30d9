//! Exact dynamic-programming oracles on the simulator side: policy values,
//! the best fixed policy in hindsight, and cumulative regret.

use serde::{Deserialize, Serialize};

use crate::agent::RunLog;
use crate::error::{Error, Result};
use crate::mdp::{MixtureMdp, Policy, RewardSchedule, RewardTable};

/// Dense `P_h(s'|s,a)` cache for repeated backward passes.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    mdp: &'a MixtureMdp,
    probs: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(mdp: &'a MixtureMdp) -> Self {
        let (ns, na, horizon) = (mdp.num_states(), mdp.num_actions(), mdp.horizon());
        let mut probs = Vec::with_capacity(horizon * ns * na * ns);
        for h in 0..horizon {
            for s in 0..ns {
                for a in 0..na {
                    probs.extend(mdp.transition_row(h, s, a));
                }
            }
        }
        Self { mdp, probs }
    }

    fn row(&self, h: usize, s: usize, a: usize) -> &[f64] {
        let ns = self.mdp.num_states();
        let o = ((h * ns + s) * self.mdp.num_actions() + a) * ns;
        &self.probs[o..o + ns]
    }

    fn expect(&self, h: usize, s: usize, a: usize, v: &[f64]) -> f64 {
        self.row(h, s, a).iter().zip(v).map(|(p, x)| p * x).sum()
    }

    fn check_policy(&self, policy: &Policy) -> Result<()> {
        let dims = (policy.horizon(), policy.num_states(), policy.num_actions());
        let want = (self.mdp.horizon(), self.mdp.num_states(), self.mdp.num_actions());
        if dims != want {
            return Err(Error::Shape(format!("policy dims {dims:?} do not match instance {want:?}")));
        }
        Ok(())
    }

    fn check_rewards(&self, r: &RewardTable) -> Result<()> {
        let want = (self.mdp.horizon(), self.mdp.num_states(), self.mdp.num_actions());
        if r.dims() != want {
            return Err(Error::Shape(format!(
                "reward dims {:?} do not match instance {want:?}",
                r.dims()
            )));
        }
        Ok(())
    }

    /// `V^pi_h(s)` for `h = 0..=H` (row `H` is zero), flattened `(H+1) x S`.
    pub fn value_table(&self, rewards: &RewardTable, policy: &Policy) -> Result<Vec<f64>> {
        self.check_rewards(rewards)?;
        self.check_policy(policy)?;
        let (ns, na, horizon) = (self.mdp.num_states(), self.mdp.num_actions(), self.mdp.horizon());
        let mut v = vec![0.0; (horizon + 1) * ns];
        for h in (0..horizon).rev() {
            let (head, tail) = v.split_at_mut((h + 1) * ns);
            let next = &tail[..ns];
            for s in 0..ns {
                let pi = policy.row(h, s);
                head[h * ns + s] = (0..na)
                    .map(|a| pi[a] * (rewards.get(h, s, a) + self.expect(h, s, a, next)))
                    .sum();
            }
        }
        Ok(v)
    }

    /// `V^pi_1(s_1)`.
    pub fn policy_value(&self, rewards: &RewardTable, policy: &Policy) -> Result<f64> {
        Ok(self.value_table(rewards, policy)?[self.mdp.initial_state()])
    }

    /// Greedy backward DP on a flat `H x S x A` reward array; ties go to the lowest action.
    pub fn greedy(&self, rewards: &[f64]) -> (f64, Policy) {
        let (ns, na, horizon) = (self.mdp.num_states(), self.mdp.num_actions(), self.mdp.horizon());
        assert_eq!(rewards.len(), horizon * ns * na);
        let mut v = vec![0.0; (horizon + 1) * ns];
        let mut choice = vec![0usize; horizon * ns];
        for h in (0..horizon).rev() {
            let (head, tail) = v.split_at_mut((h + 1) * ns);
            let next = &tail[..ns];
            for s in 0..ns {
                let mut best = f64::NEG_INFINITY;
                let mut arg = 0;
                for a in 0..na {
                    let q = rewards[(h * ns + s) * na + a] + self.expect(h, s, a, next);
                    if q > best {
                        best = q;
                        arg = a;
                    }
                }
                head[h * ns + s] = best;
                choice[h * ns + s] = arg;
            }
        }
        (
            v[self.mdp.initial_state()],
            Policy::deterministic(horizon, ns, na, &choice),
        )
    }

    /// `sup_pi sum_k V^pi_{k,1}(s_1)` and a maximizing deterministic policy.
    pub fn hindsight_optimal_value(&self, schedule: &RewardSchedule) -> Result<(f64, Policy)> {
        let Some(first) = schedule.tables().first() else {
            return Err(Error::InvalidParams("empty reward schedule".into()));
        };
        self.check_rewards(first)?;
        let total = schedule.aggregate().expect("non-empty schedule");
        Ok(self.greedy(&total))
    }
}

pub fn policy_value(mdp: &MixtureMdp, rewards: &RewardTable, policy: &Policy) -> Result<f64> {
    Evaluator::new(mdp).policy_value(rewards, policy)
}

pub fn hindsight_optimal_value(mdp: &MixtureMdp, schedule: &RewardSchedule) -> Result<(f64, Policy)> {
    Evaluator::new(mdp).hindsight_optimal_value(schedule)
}

/// Per-episode values and cumulative regret against the fixed hindsight-optimal policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretSeries {
    /// `V^{pi^k}_{k,1}(s_1)`.
    pub v_pi: Vec<f64>,
    /// `V^{pi*}_{k,1}(s_1)`.
    pub v_opt: Vec<f64>,
    pub cum_alg_value: Vec<f64>,
    pub cum_regret: Vec<f64>,
    pub hindsight_opt_total: f64,
}

impl RegretSeries {
    pub fn num_episodes(&self) -> usize {
        self.v_pi.len()
    }

    pub fn final_regret(&self) -> f64 {
        self.cum_regret.last().copied().unwrap_or(0.0)
    }

    /// `cum_regret(K) / cum_regret(floor(K/2))`, `None` when undefined.
    pub fn growth_ratio(&self) -> Option<f64> {
        growth_ratio(&self.cum_regret)
    }
}

pub fn growth_ratio(cum: &[f64]) -> Option<f64> {
    let k = cum.len();
    if k < 2 {
        return None;
    }
    let half = cum[k / 2 - 1];
    let full = cum[k - 1];
    (half != 0.0).then(|| full / half)
}

/// Regret of the policies recorded in `log` on `schedule`.
pub fn accumulate_regret(mdp: &MixtureMdp, schedule: &RewardSchedule, log: &RunLog) -> Result<RegretSeries> {
    let policies: Vec<&Policy> = log.records.iter().map(|r| &r.policy).collect();
    regret_of_policies(mdp, schedule, &policies)
}

pub fn regret_of_policies(mdp: &MixtureMdp, schedule: &RewardSchedule, policies: &[&Policy]) -> Result<RegretSeries> {
    if policies.len() != schedule.num_episodes() {
        return Err(Error::Shape(format!(
            "run log has {} episodes but the schedule has {}",
            policies.len(),
            schedule.num_episodes()
        )));
    }
    let eval = Evaluator::new(mdp);
    let v_pi = schedule
        .tables()
        .iter()
        .zip(policies)
        .map(|(r, pi)| eval.policy_value(r, pi))
        .collect::<Result<Vec<_>>>()?;
    regret_from_values(&eval, schedule, v_pi)
}

/// Builds the series from already-evaluated `V^{pi^k}_{k,1}(s_1)` values.
pub fn regret_from_values(eval: &Evaluator<'_>, schedule: &RewardSchedule, v_pi: Vec<f64>) -> Result<RegretSeries> {
    if v_pi.len() != schedule.num_episodes() {
        return Err(Error::Shape(format!(
            "{} policy values for a schedule of {} episodes",
            v_pi.len(),
            schedule.num_episodes()
        )));
    }
    let (hindsight_opt_total, best) = eval.hindsight_optimal_value(schedule)?;
    let k_total = v_pi.len();
    let mut series = RegretSeries {
        v_pi: Vec::with_capacity(k_total),
        v_opt: Vec::with_capacity(k_total),
        cum_alg_value: Vec::with_capacity(k_total),
        cum_regret: Vec::with_capacity(k_total),
        hindsight_opt_total,
    };
    let (mut alg, mut regret) = (0.0, 0.0);
    for (r, v) in schedule.tables().iter().zip(v_pi) {
        let v_opt = eval.policy_value(r, &best)?;
        alg += v;
        regret += v_opt - v;
        series.v_pi.push(v);
        series.v_opt.push(v_opt);
        series.cum_alg_value.push(alg);
        series.cum_regret.push(regret);
    }
    Ok(series)
}
