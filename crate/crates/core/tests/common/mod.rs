//! Reference computations written directly from the definitions, sharing no
//! code paths with the library beyond raw feature and parameter access.
#![allow(dead_code)]

use power_mixture::{MixtureMdp, Policy, RewardTable};
use rand::Rng;

pub fn prob(mdp: &MixtureMdp, h: usize, s: usize, a: usize, s2: usize) -> f64 {
    let phi = mdp.features().feature(s, a, s2);
    let theta = mdp.theta(h);
    let mut acc = 0.0;
    for i in 0..phi.len() {
        acc += phi[i] * theta[i];
    }
    acc
}

pub fn row(mdp: &MixtureMdp, h: usize, s: usize, a: usize) -> Vec<f64> {
    (0..mdp.num_states()).map(|s2| prob(mdp, h, s, a, s2)).collect()
}

pub fn expectation(mdp: &MixtureMdp, h: usize, s: usize, a: usize, v: &[f64]) -> f64 {
    let p = row(mdp, h, s, a);
    let mut acc = 0.0;
    for i in 0..p.len() {
        acc += p[i] * v[i];
    }
    acc
}

pub fn variance(mdp: &MixtureMdp, h: usize, s: usize, a: usize, v: &[f64]) -> f64 {
    let p = row(mdp, h, s, a);
    let mean = expectation(mdp, h, s, a, v);
    let mut acc = 0.0;
    for i in 0..p.len() {
        acc += p[i] * (v[i] - mean) * (v[i] - mean);
    }
    acc
}

/// `V^pi_1(s_1)` by a plain backward recursion over explicit rows.
pub fn value(mdp: &MixtureMdp, r: &RewardTable, pi: &Policy) -> f64 {
    let (ns, na, hz) = (mdp.num_states(), mdp.num_actions(), mdp.horizon());
    let mut next = vec![0.0; ns];
    for h in (0..hz).rev() {
        let mut cur = vec![0.0; ns];
        for s in 0..ns {
            for a in 0..na {
                let w = pi.row(h, s)[a];
                if w != 0.0 {
                    cur[s] += w * (r.get(h, s, a) + expectation(mdp, h, s, a, &next));
                }
            }
        }
        next = cur;
    }
    next[mdp.initial_state()]
}

/// Every deterministic policy, as flat `H x S` action choices.
pub fn all_deterministic(hz: usize, ns: usize, na: usize) -> Vec<Vec<usize>> {
    let n = hz * ns;
    let total = na.pow(n as u32);
    (0..total)
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let a = code % na;
                    code /= na;
                    a
                })
                .collect()
        })
        .collect()
}

/// Inverse-CDF draw from a probability vector.
pub fn sample<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

pub fn random_policy<R: Rng>(rng: &mut R, hz: usize, ns: usize, na: usize) -> Policy {
    let mut probs = Vec::with_capacity(hz * ns * na);
    for _ in 0..hz * ns {
        let w: Vec<f64> = (0..na).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let z: f64 = w.iter().sum();
        probs.extend(w.iter().map(|x| x / z));
    }
    Policy::from_probs(hz, ns, na, probs).unwrap()
}

pub fn random_rewards<R: Rng>(rng: &mut R, hz: usize, ns: usize, na: usize) -> RewardTable {
    RewardTable::new(hz, ns, na, (0..hz * ns * na).map(|_| rng.gen()).collect()).unwrap()
}

/// Maximizer of `<q, pi> - KL(pi || prev) / alpha` over the simplex by
/// pairwise mass transfers, each solved by bisection on the directional derivative.
pub fn kl_regularized_argmax(prev: &[f64], q: &[f64], alpha: f64) -> Vec<f64> {
    let n = prev.len();
    let mut pi = vec![1.0 / n as f64; n];
    for _sweep in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let total = pi[i] + pi[j];
                // Move mass so that pi[i] = x, pi[j] = total - x.
                let grad = |x: f64| {
                    q[i] - q[j] - ((x / prev[i]).ln() - ((total - x) / prev[j]).ln()) / alpha
                };
                let (mut lo, mut hi) = (0.0, total);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if grad(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let x = 0.5 * (lo + hi);
                moved = moved.max((x - pi[i]).abs());
                pi[i] = x;
                pi[j] = total - x;
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    pi
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
