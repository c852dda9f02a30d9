//! Per-stage weighted ridge regression with variance-aware confidence radii.
//!
//! Two regressions run side by side for every stage `h`:
//!
//! * the *hat* regression of `V_{k,h+1}(s_{h+1})` on `phi_V(s_h, a_h)`,
//!   weighted by `1 / sigma_bar^2`;
//! * the *tilde* regression of `V_{k,h+1}(s_{h+1})^2` on `phi_{V^2}(s_h, a_h)`,
//!   unweighted.
//!
//! The hat regression gives the optimistic mean; together they give a
//! variance estimate whose error is bounded by [`StageEstimator::bonus`].
//! Gram matrices are re-factorized (Cholesky) after every rank-1 update.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Ridge parameter `lambda`.
    pub lambda: f64,
    /// Failure probability `delta`.
    pub delta: f64,
    /// Norm bound `B` on the true parameters.
    pub bound: f64,
    pub horizon: usize,
    pub dim: usize,
}

impl EstimatorConfig {
    pub fn new(lambda: f64, delta: f64, bound: f64, horizon: usize, dim: usize) -> Result<Self> {
        let cfg = Self {
            lambda,
            delta,
            bound,
            horizon,
            dim,
        };
        cfg.check()?;
        Ok(cfg)
    }

    /// `lambda = 1 / B^2`.
    pub fn with_default_lambda(delta: f64, bound: f64, horizon: usize, dim: usize) -> Result<Self> {
        Self::new(1.0 / (bound * bound), delta, bound, horizon, dim)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParams(format!("lambda must be > 0, got {}", self.lambda)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParams(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.bound >= 1.0) || !self.bound.is_finite() {
            return Err(Error::InvalidParams(format!("B must be >= 1, got {}", self.bound)));
        }
        if self.horizon == 0 || self.dim == 0 {
            return Err(Error::InvalidParams("horizon and dimension must be >= 1".into()));
        }
        Ok(())
    }

    fn log_delta(&self, k: usize) -> f64 {
        assert!(k >= 1, "confidence radii are defined for k >= 1");
        let k = k as f64;
        (4.0 * k * k * self.horizon as f64 / self.delta).ln()
    }

    /// Radius of the confidence ellipsoid around `theta_hat`.
    pub fn beta_hat(&self, k: usize) -> f64 {
        let d = self.dim as f64;
        let l = self.log_delta(k);
        8.0 * (d * (1.0 + k as f64 / self.lambda).ln() * l).sqrt()
            + 4.0 * d.sqrt() * l
            + self.lambda.sqrt() * self.bound
    }

    /// Radius used for the first-moment part of the variance bonus.
    pub fn beta_bar(&self, k: usize) -> f64 {
        let d = self.dim as f64;
        let l = self.log_delta(k);
        8.0 * d * ((1.0 + k as f64 / self.lambda).ln() * l).sqrt()
            + 4.0 * d.sqrt() * l
            + self.lambda.sqrt() * self.bound
    }

    /// Radius used for the second-moment part of the variance bonus.
    pub fn beta_tilde(&self, k: usize) -> f64 {
        let d = self.dim as f64;
        let h2 = (self.horizon * self.horizon) as f64;
        let l = self.log_delta(k);
        let growth = (1.0 + k as f64 * h2 * h2 / (d * self.lambda)).ln();
        8.0 * h2 * (d * growth * l).sqrt() + 4.0 * h2 * l + self.lambda.sqrt() * self.bound
    }

    /// `H / sqrt(d)`, the smallest admissible `sigma_bar`.
    pub fn sigma_floor(&self) -> f64 {
        self.horizon as f64 / (self.dim as f64).sqrt()
    }
}

/// `sqrt(max(H^2 / d, estimated_var + bonus))`.
pub fn sigma_bar(cfg: &EstimatorConfig, estimated_var: f64, bonus: f64) -> f64 {
    let floor = (cfg.horizon * cfg.horizon) as f64 / cfg.dim as f64;
    let v = estimated_var + bonus;
    if v > floor {
        v.sqrt()
    } else {
        floor.sqrt()
    }
}

/// A ridge regression `Sigma theta = b` with `Sigma = lambda I + sum w x x^T`.
#[derive(Debug, Clone)]
struct Ridge {
    gram: DMatrix<f64>,
    resp: DVector<f64>,
    theta: DVector<f64>,
    lower: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl Ridge {
    fn new(dim: usize, lambda: f64) -> Self {
        let gram = DMatrix::identity(dim, dim) * lambda;
        let chol = Cholesky::new(gram.clone()).expect("lambda I is positive definite");
        Self {
            lower: chol.l(),
            chol,
            gram,
            resp: DVector::zeros(dim),
            theta: DVector::zeros(dim),
        }
    }

    fn push(&mut self, x: &[f64], y: f64, weight: f64) -> Result<()> {
        let d = x.len();
        for i in 0..d {
            let wi = weight * x[i];
            for j in 0..=i {
                let v = wi * x[j];
                self.gram[(i, j)] += v;
                if i != j {
                    self.gram[(j, i)] += v;
                }
            }
            self.resp[i] += wi * y;
        }
        self.refactor()
    }

    fn refactor(&mut self) -> Result<()> {
        let chol = Cholesky::new(self.gram.clone()).ok_or(Error::NotPositiveDefinite)?;
        let mut theta = chol.solve(&self.resp);
        // one step of iterative refinement
        let r = &self.resp - &self.gram * &theta;
        theta += chol.solve(&r);
        self.lower = chol.l();
        self.chol = chol;
        self.theta = theta;
        Ok(())
    }

    /// `sqrt(x^T Sigma^{-1} x) = || L^{-1} x ||`.
    fn inv_norm(&self, x: &[f64]) -> f64 {
        let d = x.len();
        let mut z = vec![0.0; d];
        for i in 0..d {
            let mut acc = x[i];
            for (j, zj) in z.iter().enumerate().take(i) {
                acc -= self.lower[(i, j)] * zj;
            }
            z[i] = acc / self.lower[(i, i)];
        }
        z.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn predict(&self, x: &[f64]) -> f64 {
        self.theta.iter().zip(x).map(|(t, v)| t * v).sum()
    }

    fn residual(&self) -> f64 {
        (&self.gram * &self.theta - &self.resp).norm()
    }
}

/// Regression state of a single stage `h`.
#[derive(Debug, Clone)]
pub struct StageEstimator {
    hat: Ridge,
    tilde: Ridge,
    samples: usize,
}

impl StageEstimator {
    pub fn new(cfg: &EstimatorConfig) -> Self {
        Self {
            hat: Ridge::new(cfg.dim, cfg.lambda),
            tilde: Ridge::new(cfg.dim, cfg.lambda),
            samples: 0,
        }
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn theta_hat(&self) -> &[f64] {
        self.hat.theta.as_slice()
    }

    pub fn theta_tilde(&self) -> &[f64] {
        self.tilde.theta.as_slice()
    }

    pub fn gram_hat(&self) -> &DMatrix<f64> {
        &self.hat.gram
    }

    pub fn gram_tilde(&self) -> &DMatrix<f64> {
        &self.tilde.gram
    }

    pub fn resp_hat(&self) -> &[f64] {
        self.hat.resp.as_slice()
    }

    pub fn resp_tilde(&self) -> &[f64] {
        self.tilde.resp.as_slice()
    }

    /// `||Sigma_hat theta_hat - b_hat||_2` and the same for the tilde triple.
    pub fn residuals(&self) -> (f64, f64) {
        (self.hat.residual(), self.tilde.residual())
    }

    /// `sqrt(phi^T Sigma_hat^{-1} phi)`.
    pub fn hat_norm(&self, phi: &[f64]) -> f64 {
        self.hat.inv_norm(phi)
    }

    /// `sqrt(phi^T Sigma_tilde^{-1} phi)`.
    pub fn tilde_norm(&self, phi: &[f64]) -> f64 {
        self.tilde.inv_norm(phi)
    }

    /// `<theta_hat, phi>`.
    pub fn predict(&self, phi: &[f64]) -> f64 {
        self.hat.predict(phi)
    }

    /// `|| Sigma_hat^{1/2} (theta - theta_hat) ||_2`; `theta` lies in the
    /// confidence set iff this is at most `beta_hat(k)`.
    pub fn ellipsoid_distance(&self, theta: &[f64]) -> f64 {
        let diff = DVector::from_iterator(
            theta.len(),
            theta.iter().zip(self.hat.theta.iter()).map(|(a, b)| a - b),
        );
        diff.dot(&(&self.hat.gram * &diff)).max(0.0).sqrt()
    }

    /// `beta_hat(k) * ||Sigma_hat^{-1/2} phi||`.
    pub fn confidence_width(&self, cfg: &EstimatorConfig, k: usize, phi: &[f64]) -> f64 {
        cfg.beta_hat(k) * self.hat_norm(phi)
    }

    /// `clip(<phi_{V^2}, theta_tilde>, 0, H^2) - clip(<phi_V, theta_hat>, 0, H)^2`. May be negative.
    pub fn estimated_variance(&self, phi_v: &[f64], phi_v2: &[f64], horizon: usize) -> f64 {
        let h = horizon as f64;
        let second = self.tilde.predict(phi_v2).clamp(0.0, h * h);
        let first = self.hat.predict(phi_v).clamp(0.0, h);
        second - first * first
    }

    /// Bound on the error of [`estimated_variance`](Self::estimated_variance), in `[0, 2 H^2]`.
    pub fn bonus(&self, cfg: &EstimatorConfig, k: usize, phi_v: &[f64], phi_v2: &[f64]) -> f64 {
        let h2 = (cfg.horizon * cfg.horizon) as f64;
        let second = (cfg.beta_tilde(k) * self.tilde_norm(phi_v2)).min(h2);
        let first = (2.0 * cfg.horizon as f64 * cfg.beta_bar(k) * self.hat_norm(phi_v)).min(h2);
        second + first
    }

    /// Adds one sample to both regressions: the hat one weighted by `sigma_bar^-2`,
    /// the tilde one unweighted.
    pub fn rank1_update(
        &mut self,
        cfg: &EstimatorConfig,
        phi_v: &[f64],
        target_v: f64,
        phi_v2: &[f64],
        target_v2: f64,
        sigma_bar: f64,
    ) -> Result<()> {
        let floor = cfg.sigma_floor();
        if !(sigma_bar >= floor * (1.0 - 1e-12)) {
            return Err(Error::SigmaBelowFloor {
                value: sigma_bar,
                floor,
            });
        }
        self.hat.push(phi_v, target_v, 1.0 / (sigma_bar * sigma_bar))?;
        self.tilde.push(phi_v2, target_v2, 1.0)?;
        self.samples += 1;
        Ok(())
    }

    /// Unit-weight update of the hat regression only; the tilde regression is left untouched.
    pub fn unit_weight_update(&mut self, phi_v: &[f64], target_v: f64) -> Result<()> {
        self.hat.push(phi_v, target_v, 1.0)?;
        self.samples += 1;
        Ok(())
    }

    pub fn snapshot(&self) -> EstimatorSnapshot {
        let rows = |m: &DMatrix<f64>| (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
        EstimatorSnapshot {
            samples: self.samples,
            gram_hat: rows(&self.hat.gram),
            resp_hat: self.hat.resp.iter().copied().collect(),
            theta_hat: self.hat.theta.iter().copied().collect(),
            gram_tilde: rows(&self.tilde.gram),
            resp_tilde: self.tilde.resp.iter().copied().collect(),
            theta_tilde: self.tilde.theta.iter().copied().collect(),
        }
    }
}

/// Serializable dump of a [`StageEstimator`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSnapshot {
    pub samples: usize,
    pub gram_hat: Vec<Vec<f64>>,
    pub resp_hat: Vec<f64>,
    pub theta_hat: Vec<f64>,
    pub gram_tilde: Vec<Vec<f64>>,
    pub resp_tilde: Vec<f64>,
    pub theta_tilde: Vec<f64>,
}
