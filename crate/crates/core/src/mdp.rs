//! Finite linear-mixture MDPs.
//!
//! Transitions factor as `P_h(s'|s,a) = <phi(s'|s,a), theta_h>` with a
//! stage-independent feature tensor `phi` and one parameter vector per stage.
//! The feature tensor lives in its own [`FeatureMap`] so that learners can be
//! handed the features without any path to `theta_h`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for the simplex and normalization checks.
pub const PROB_TOL: f64 = 1e-9;

/// Number of random probe functions used when spot-checking `||phi_V|| <= 1`.
pub const NORM_PROBES: usize = 100;

const PROBE_SEED: u64 = 0x5eed_0ff1;

/// Dense `S x A x S x d` feature tensor, row-major in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    num_states: usize,
    num_actions: usize,
    dim: usize,
    data: Vec<f64>,
}

impl FeatureMap {
    pub fn new(num_states: usize, num_actions: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if num_states == 0 || num_actions == 0 || dim == 0 {
            return Err(Error::InvalidParams(
                "feature map needs at least one state, action and dimension".into(),
            ));
        }
        let expected = num_states * num_actions * num_states * dim;
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "feature tensor has {} entries, expected S*A*S*d = {expected}",
                data.len()
            )));
        }
        Ok(Self {
            num_states,
            num_actions,
            dim,
            data,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Flat row-major storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, s: usize, a: usize, s2: usize) -> usize {
        assert!(
            s < self.num_states && a < self.num_actions && s2 < self.num_states,
            "feature index ({s}, {a}, {s2}) out of range"
        );
        ((s * self.num_actions + a) * self.num_states + s2) * self.dim
    }

    /// `phi(s2 | s, a)`.
    pub fn feature(&self, s: usize, a: usize, s2: usize) -> &[f64] {
        let o = self.offset(s, a, s2);
        &self.data[o..o + self.dim]
    }

    pub fn feature_mut(&mut self, s: usize, a: usize, s2: usize) -> &mut [f64] {
        let o = self.offset(s, a, s2);
        &mut self.data[o..o + self.dim]
    }

    /// `phi_V(s, a) = sum_{s'} phi(s'|s,a) V(s')`.
    pub fn phi_v_at(&self, s: usize, a: usize, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.phi_v_into(s, a, v, &mut out);
        out
    }

    pub(crate) fn phi_v_into(&self, s: usize, a: usize, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.num_states, "value vector length must equal S");
        out.iter_mut().for_each(|x| *x = 0.0);
        let base = self.offset(s, a, 0);
        for (s2, &vs) in v.iter().enumerate() {
            if vs == 0.0 {
                continue;
            }
            let f = &self.data[base + s2 * self.dim..base + (s2 + 1) * self.dim];
            for (o, &fj) in out.iter_mut().zip(f) {
                *o += fj * vs;
            }
        }
    }

    /// `phi_V` for every `(s, a)`.
    pub fn phi_v(&self, v: &[f64]) -> PhiTable {
        let mut data = vec![0.0; self.num_states * self.num_actions * self.dim];
        for s in 0..self.num_states {
            for a in 0..self.num_actions {
                let o = (s * self.num_actions + a) * self.dim;
                self.phi_v_into(s, a, v, &mut data[o..o + self.dim]);
            }
        }
        PhiTable {
            num_actions: self.num_actions,
            dim: self.dim,
            data,
        }
    }
}

/// `phi_V(s, a)` for all state-action pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiTable {
    num_actions: usize,
    dim: usize,
    data: Vec<f64>,
}

impl PhiTable {
    pub fn get(&self, s: usize, a: usize) -> &[f64] {
        let o = (s * self.num_actions + a) * self.dim;
        &self.data[o..o + self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// An episodic, `B`-bounded linear mixture MDP over a finite state space.
#[derive(Debug, Clone)]
pub struct MixtureMdp {
    features: Arc<FeatureMap>,
    theta: Vec<Vec<f64>>,
    bound: f64,
    initial_state: usize,
}

impl MixtureMdp {
    /// Builds an instance after checking shapes. Probabilistic invariants are
    /// reported by [`MixtureMdp::validate`], not enforced here.
    pub fn new(
        features: FeatureMap,
        theta: Vec<Vec<f64>>,
        bound: f64,
        initial_state: usize,
    ) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidParams("horizon must be at least 1".into()));
        }
        if let Some((h, t)) = theta.iter().enumerate().find(|(_, t)| t.len() != features.dim()) {
            return Err(Error::Shape(format!(
                "theta[{h}] has length {}, expected d = {}",
                t.len(),
                features.dim()
            )));
        }
        if initial_state >= features.num_states() {
            return Err(Error::InvalidParams(format!(
                "initial state {initial_state} out of range for S = {}",
                features.num_states()
            )));
        }
        if !bound.is_finite() {
            return Err(Error::InvalidParams("norm bound B must be finite".into()));
        }
        Ok(Self {
            features: Arc::new(features),
            theta,
            bound,
            initial_state,
        })
    }

    pub fn num_states(&self) -> usize {
        self.features.num_states()
    }

    pub fn num_actions(&self) -> usize {
        self.features.num_actions()
    }

    pub fn horizon(&self) -> usize {
        self.theta.len()
    }

    pub fn dim(&self) -> usize {
        self.features.dim()
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn theta(&self, h: usize) -> &[f64] {
        &self.theta[h]
    }

    pub fn thetas(&self) -> &[Vec<f64>] {
        &self.theta
    }

    pub fn features(&self) -> &FeatureMap {
        &self.features
    }

    /// Shared handle to the feature tensor; this is all a learner gets to see.
    pub fn feature_map(&self) -> Arc<FeatureMap> {
        Arc::clone(&self.features)
    }

    /// Same features, new parameters. Shapes are not re-checked; see [`MixtureMdp::validate`].
    pub fn with_theta(&self, theta: Vec<Vec<f64>>) -> Self {
        Self {
            features: Arc::clone(&self.features),
            theta,
            bound: self.bound,
            initial_state: self.initial_state,
        }
    }

    /// Same parameters, new features. Shapes are not re-checked; see [`MixtureMdp::validate`].
    pub fn with_features(&self, features: FeatureMap) -> Self {
        Self {
            features: Arc::new(features),
            theta: self.theta.clone(),
            bound: self.bound,
            initial_state: self.initial_state,
        }
    }

    /// `P_h(s2 | s, a)`.
    pub fn transition_prob(&self, h: usize, s: usize, a: usize, s2: usize) -> f64 {
        dot(self.features.feature(s, a, s2), &self.theta[h])
    }

    /// The full successor distribution of `(h, s, a)`.
    pub fn transition_row(&self, h: usize, s: usize, a: usize) -> Vec<f64> {
        (0..self.num_states())
            .map(|s2| self.transition_prob(h, s, a, s2))
            .collect()
    }

    pub fn phi_v(&self, v: &[f64]) -> PhiTable {
        self.features.phi_v(v)
    }

    /// `[P_h V](s, a) = <phi_V(s, a), theta_h>`.
    pub fn expected_next_value(&self, h: usize, v: &[f64], s: usize, a: usize) -> f64 {
        dot(&self.features.phi_v_at(s, a, v), &self.theta[h])
    }

    /// `[P_h V^2](s, a) - ([P_h V](s, a))^2`, with tiny negative round-off clipped to 0.
    pub fn exact_variance(&self, h: usize, v: &[f64], s: usize, a: usize) -> f64 {
        let v2: Vec<f64> = v.iter().map(|x| x * x).collect();
        let mean = self.expected_next_value(h, v, s, a);
        let second = self.expected_next_value(h, &v2, s, a);
        let var = second - mean * mean;
        if var < 0.0 && var > -1e-12 {
            0.0
        } else {
            var
        }
    }

    /// Draws `s' ~ P_h(.|s, a)`.
    pub fn sample_transition<R: Rng + ?Sized>(
        &self,
        h: usize,
        s: usize,
        a: usize,
        rng: &mut R,
    ) -> Result<usize> {
        let row = self.transition_row(h, s, a);
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL || row.iter().any(|p| !p.is_finite()) {
            return Err(Error::DegenerateRow {
                stage: h,
                state: s,
                action: a,
                sum,
            });
        }
        let u: f64 = rng.gen::<f64>() * sum;
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (s2, &p) in row.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            last_positive = s2;
            acc += p;
            if u < acc {
                return Ok(s2);
            }
        }
        Ok(last_positive)
    }

    /// Checks every structural invariant and lists each violation with its location.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let (ns, na) = (self.num_states(), self.num_actions());

        if self.bound < 1.0 {
            violations.push(Violation::BoundBelowOne { bound: self.bound });
        }
        for (h, t) in self.theta.iter().enumerate() {
            let norm = norm2(t);
            if norm > self.bound + 1e-12 {
                violations.push(Violation::ThetaNorm {
                    stage: h,
                    norm,
                    bound: self.bound,
                });
            }
        }
        for h in 0..self.horizon() {
            for s in 0..ns {
                for a in 0..na {
                    let mut sum = 0.0;
                    for s2 in 0..ns {
                        let p = self.transition_prob(h, s, a, s2);
                        sum += p;
                        if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&p) {
                            violations.push(Violation::ProbabilityOutOfRange {
                                stage: h,
                                state: s,
                                action: a,
                                next_state: s2,
                                value: p,
                            });
                        }
                    }
                    if !((sum - 1.0).abs() <= PROB_TOL) {
                        violations.push(Violation::RowSum {
                            stage: h,
                            state: s,
                            action: a,
                            sum,
                        });
                    }
                }
            }
        }

        let mut worst = vec![0.0f64; ns * na];
        for v in probe_functions(ns) {
            let table = self.features.phi_v(&v);
            for s in 0..ns {
                for a in 0..na {
                    let n = norm2(table.get(s, a));
                    let w = &mut worst[s * na + a];
                    if !(n <= *w) {
                        *w = n;
                    }
                }
            }
        }
        for s in 0..ns {
            for a in 0..na {
                let norm = worst[s * na + a];
                if !(norm <= 1.0 + PROB_TOL) {
                    violations.push(Violation::FeatureNorm {
                        state: s,
                        action: a,
                        norm,
                    });
                }
            }
        }
        ValidationReport { violations }
    }
}

/// Indicator vectors, the all-ones vector, then seeded uniform draws in `[0, 1]^S`.
pub fn probe_functions(num_states: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(num_states + 1 + NORM_PROBES);
    for i in 0..num_states {
        let mut e = vec![0.0; num_states];
        e[i] = 1.0;
        out.push(e);
    }
    out.push(vec![1.0; num_states]);
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    for _ in 0..NORM_PROBES {
        out.push((0..num_states).map(|_| rng.gen::<f64>()).collect());
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ProbabilityOutOfRange {
        stage: usize,
        state: usize,
        action: usize,
        next_state: usize,
        value: f64,
    },
    RowSum {
        stage: usize,
        state: usize,
        action: usize,
        sum: f64,
    },
    ThetaNorm {
        stage: usize,
        norm: f64,
        bound: f64,
    },
    BoundBelowOne {
        bound: f64,
    },
    /// Largest `||phi_V(s,a)||_2` over the probe battery exceeded 1.
    FeatureNorm {
        state: usize,
        action: usize,
        norm: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ProbabilityOutOfRange {
                stage,
                state,
                action,
                next_state,
                value,
            } => write!(
                f,
                "P_{stage}({next_state} | {state}, {action}) = {value} is outside [0, 1]"
            ),
            Violation::RowSum {
                stage,
                state,
                action,
                sum,
            } => write!(f, "row (h={stage}, s={state}, a={action}) sums to {sum}"),
            Violation::ThetaNorm { stage, norm, bound } => {
                write!(f, "||theta_{stage}|| = {norm} exceeds B = {bound}")
            }
            Violation::BoundBelowOne { bound } => write!(f, "B = {bound} is below 1"),
            Violation::FeatureNorm {
                state,
                action,
                norm,
            } => write!(f, "||phi_V({state}, {action})|| reaches {norm} > 1"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// Reward table `r_h(s, a)` for a single episode, `H x S x A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardTable {
    horizon: usize,
    num_states: usize,
    num_actions: usize,
    values: Vec<f64>,
}

impl RewardTable {
    pub fn new(horizon: usize, num_states: usize, num_actions: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != horizon * num_states * num_actions {
            return Err(Error::Shape(format!(
                "reward table has {} entries, expected H*S*A = {}",
                values.len(),
                horizon * num_states * num_actions
            )));
        }
        let table = Self {
            horizon,
            num_states,
            num_actions,
            values,
        };
        table.check_range()?;
        Ok(table)
    }

    pub fn constant(horizon: usize, num_states: usize, num_actions: usize, value: f64) -> Self {
        Self {
            horizon,
            num_states,
            num_actions,
            values: vec![value; horizon * num_states * num_actions],
        }
    }

    pub fn from_fn(
        horizon: usize,
        num_states: usize,
        num_actions: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut values = Vec::with_capacity(horizon * num_states * num_actions);
        for h in 0..horizon {
            for s in 0..num_states {
                for a in 0..num_actions {
                    values.push(f(h, s, a));
                }
            }
        }
        Self {
            horizon,
            num_states,
            num_actions,
            values,
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn get(&self, h: usize, s: usize, a: usize) -> f64 {
        self.values[(h * self.num_states + s) * self.num_actions + a]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.horizon, self.num_states, self.num_actions)
    }

    /// Errors on the first entry outside `[0, 1]`.
    pub fn check_range(&self) -> Result<()> {
        for h in 0..self.horizon {
            for s in 0..self.num_states {
                for a in 0..self.num_actions {
                    let value = self.get(h, s, a);
                    if !(0.0..=1.0).contains(&value) {
                        return Err(Error::RewardOutOfRange {
                            stage: h,
                            state: s,
                            action: a,
                            value,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// One reward table per episode, `k = 1..K` stored at index `k - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardSchedule {
    tables: Vec<RewardTable>,
}

impl RewardSchedule {
    pub fn new(tables: Vec<RewardTable>) -> Result<Self> {
        if let Some(first) = tables.first() {
            let dims = first.dims();
            if let Some(k) = tables.iter().position(|t| t.dims() != dims) {
                return Err(Error::Shape(format!(
                    "reward table for episode {} has dims {:?}, expected {:?}",
                    k + 1,
                    tables[k].dims(),
                    dims
                )));
            }
        }
        for t in &tables {
            t.check_range()?;
        }
        Ok(Self { tables })
    }

    pub fn repeated(table: RewardTable, num_episodes: usize) -> Self {
        Self {
            tables: vec![table; num_episodes],
        }
    }

    pub fn num_episodes(&self) -> usize {
        self.tables.len()
    }

    /// Table of episode `k` (1-based).
    pub fn episode(&self, k: usize) -> &RewardTable {
        &self.tables[k - 1]
    }

    pub fn tables(&self) -> &[RewardTable] {
        &self.tables
    }

    /// `sum_k r^k`, the aggregated table used by the hindsight oracle.
    pub fn aggregate(&self) -> Option<Vec<f64>> {
        let first = self.tables.first()?;
        let mut acc = vec![0.0; first.values.len()];
        for t in &self.tables {
            for (x, y) in acc.iter_mut().zip(&t.values) {
                *x += y;
            }
        }
        Some(acc)
    }
}

/// A tabular, stage-dependent stochastic policy `pi_h(a | s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    horizon: usize,
    num_states: usize,
    num_actions: usize,
    probs: Vec<f64>,
}

impl Policy {
    pub fn uniform(horizon: usize, num_states: usize, num_actions: usize) -> Self {
        Self {
            horizon,
            num_states,
            num_actions,
            probs: vec![1.0 / num_actions as f64; horizon * num_states * num_actions],
        }
    }

    /// `choice[h * S + s]` is the action taken at `(h, s)`.
    pub fn deterministic(horizon: usize, num_states: usize, num_actions: usize, choice: &[usize]) -> Self {
        assert_eq!(choice.len(), horizon * num_states);
        let mut probs = vec![0.0; horizon * num_states * num_actions];
        for (i, &a) in choice.iter().enumerate() {
            assert!(a < num_actions, "action {a} out of range");
            probs[i * num_actions + a] = 1.0;
        }
        Self {
            horizon,
            num_states,
            num_actions,
            probs,
        }
    }

    /// Rows must be distributions (entries >= 0, sums within `1e-9` of 1).
    pub fn from_probs(horizon: usize, num_states: usize, num_actions: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != horizon * num_states * num_actions {
            return Err(Error::Shape(format!(
                "policy has {} entries, expected H*S*A = {}",
                probs.len(),
                horizon * num_states * num_actions
            )));
        }
        for (i, row) in probs.chunks(num_actions).enumerate() {
            let sum: f64 = row.iter().sum();
            if row.iter().any(|p| !(*p >= 0.0)) || (sum - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidParams(format!(
                    "policy row (h={}, s={}) is not a distribution",
                    i / num_states,
                    i % num_states
                )));
            }
        }
        Ok(Self {
            horizon,
            num_states,
            num_actions,
            probs,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn row(&self, h: usize, s: usize) -> &[f64] {
        let o = (h * self.num_states + s) * self.num_actions;
        &self.probs[o..o + self.num_actions]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// One state, two actions, one stage: a two-armed bandit with a trivial kernel.
    fn single_state() -> MixtureMdp {
        let fm = FeatureMap::new(1, 2, 1, vec![1.0, 1.0]).unwrap();
        MixtureMdp::new(fm, vec![vec![1.0]], 1.0, 0).unwrap()
    }

    /// Two states, one action; the single row is `(0.5, 0.5)`.
    fn coin() -> MixtureMdp {
        let fm = FeatureMap::new(2, 1, 2, vec![0.5, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 1.0]).unwrap();
        MixtureMdp::new(fm, vec![vec![1.0, 1.0]], 2.0, 0).unwrap()
    }

    #[test]
    fn shape_errors_are_reported() {
        assert!(FeatureMap::new(2, 2, 1, vec![0.0; 7]).is_err());
        let fm = FeatureMap::new(1, 1, 2, vec![0.5, 0.5]).unwrap();
        assert!(MixtureMdp::new(fm.clone(), vec![vec![1.0]], 1.0, 0).is_err());
        assert!(MixtureMdp::new(fm, vec![vec![1.0, 1.0]], 1.0, 3).is_err());
    }

    #[test]
    fn bernoulli_half_variance() {
        let m = coin();
        assert!(m.validate().is_valid(), "{}", m.validate());
        assert!((m.exact_variance(0, &[0.0, 1.0], 0, 0) - 0.25).abs() < 1e-15);
        assert_eq!(m.exact_variance(0, &[0.7, 0.7], 0, 0), 0.0);
        assert!((m.expected_next_value(0, &[3.0, 3.0], 0, 0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn point_mass_rows_sample_deterministically() {
        let m = coin();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(m.sample_transition(0, 1, 0, &mut rng).unwrap(), 1);
        }
    }

    #[test]
    fn degenerate_row_is_rejected() {
        let m = single_state().with_theta(vec![vec![2.0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            m.sample_transition(0, 0, 0, &mut rng),
            Err(Error::DegenerateRow { .. })
        ));
    }

    #[test]
    fn zero_value_gives_zero_features() {
        let m = coin();
        let t = m.phi_v(&[0.0, 0.0]);
        assert!(t.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn reward_range_is_checked() {
        assert!(RewardTable::new(1, 1, 2, vec![0.2, 1.5]).is_err());
        assert!(RewardTable::new(1, 1, 2, vec![0.2, 0.7]).is_ok());
        assert!(RewardTable::new(1, 1, 2, vec![0.2]).is_err());
    }

    #[test]
    fn policy_rows_must_be_distributions() {
        assert!(Policy::from_probs(1, 1, 2, vec![0.5, 0.6]).is_err());
        assert!(Policy::from_probs(1, 1, 2, vec![-0.1, 1.1]).is_err());
        let p = Policy::from_probs(1, 1, 2, vec![0.25, 0.75]).unwrap();
        assert_eq!(p.row(0, 0), &[0.25, 0.75]);
    }

    #[test]
    fn bound_below_one_is_flagged() {
        let fm = FeatureMap::new(1, 1, 1, vec![1.0]).unwrap();
        let m = MixtureMdp::new(fm, vec![vec![1.0]], 0.5, 0).unwrap();
        let report = m.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::BoundBelowOne { .. })));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::ThetaNorm { .. })));
    }
}
