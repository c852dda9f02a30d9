//! Multi-seed experiment orchestration: config parsing, parallel runs, CSV
//! output, manifest and summaries.
//!
//! Output layout of an experiment directory:
//!
//! * `run_<variant>_seed<seed>.csv`, one per successful run;
//! * `aggregate.csv`, per-episode mean and sample standard deviation of
//!   `cum_regret` across seeds for each variant;
//! * `manifest.json`, the resolved config, run statuses and SHA-256 checksums;
//! * `run_<variant>_seed<seed>.ndjson` episode logs when `write_logs` is set.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agent::{auto_learning_rate, run_episode, Agent, AgentConfig, RunRngs, Variant};
use crate::error::{Error, Result};
use crate::estimator::EstimatorConfig;
use crate::evaluation::{growth_ratio, regret_from_values, Evaluator, RegretSeries};
use crate::format::load_instance;
use crate::instances::{
    build_hard_instance, build_random_instance, uniform_reward_table, Adversary, AdversaryKind,
    HardInstanceParams,
};
use crate::mdp::{MixtureMdp, RewardSchedule, RewardTable};

/// Exact CSV header of per-run files.
pub const RUN_CSV_HEADER: &str = "episode,variant,seed,value_alg,value_opt_share,cum_regret";
/// Exact CSV header of the aggregate file.
pub const AGGREGATE_CSV_HEADER: &str = "episode,variant,num_seeds,mean_cum_regret,sd_cum_regret";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    Hard {
        dim: usize,
        horizon: usize,
        /// Defaults to `1 / (2 H (d - 1))`.
        #[serde(default)]
        gap: Option<f64>,
        /// Explicit `H x (d-1)` sign pattern of `mu_h`; drawn from `sign_seed` otherwise.
        #[serde(default)]
        signs: Option<Vec<Vec<bool>>>,
        #[serde(default)]
        sign_seed: u64,
    },
    Random {
        #[serde(default)]
        seed: u64,
        num_states: usize,
        num_actions: usize,
        dim: usize,
        horizon: usize,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AdversarySpec {
    /// The instance's own reward table if it has one, else one uniform table per run.
    #[default]
    Fixed,
    SeededIidUniform,
    PeriodicSwitching {
        period: usize,
    },
    AdaptiveAntagonist,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LearningRate {
    Auto(AutoKeyword),
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoKeyword {
    Auto,
}

impl Default for LearningRate {
    fn default() -> Self {
        LearningRate::Auto(AutoKeyword::Auto)
    }
}

fn default_variants() -> Vec<Variant> {
    Variant::ALL.to_vec()
}

fn default_delta() -> f64 {
    0.1
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    /// `K`.
    pub episodes: usize,
    #[serde(default)]
    pub adversary: AdversarySpec,
    #[serde(default = "default_variants")]
    pub variants: Vec<Variant>,
    /// Ridge parameter; `1 / B^2` when absent.
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub alpha: LearningRate,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Norm bound; the instance's own `B` when absent.
    #[serde(default)]
    pub bound: Option<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub write_logs: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().to_string())
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Command-line overrides: output directory, `--seed-count N` (seeds `0..N`)
    /// and an explicit variant list.
    pub fn apply_overrides(&mut self, out: Option<PathBuf>, seed_count: Option<usize>, variants: &[String]) -> Result<()> {
        if let Some(out) = out {
            self.output_dir = out;
        }
        if let Some(n) = seed_count {
            self.seeds = (0..n as u64).collect();
        }
        if !variants.is_empty() {
            self.variants = variants
                .iter()
                .map(|v| v.parse().map_err(|e: Error| Error::config("variants", e.to_string())))
                .collect::<Result<_>>()?;
        }
        Ok(())
    }

    fn check_scalars(&self) -> Result<()> {
        if self.episodes < 1 {
            return Err(Error::config("episodes", "must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "must not be empty"));
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = self.seeds.iter().find(|s| !seen.insert(**s)) {
            return Err(Error::config("seeds", format!("seed {dup} appears more than once")));
        }
        if self.variants.is_empty() {
            return Err(Error::config("variants", "must not be empty"));
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = self.variants.iter().find(|v| !seen.insert(**v)) {
            return Err(Error::config("variants", format!("variant {dup} appears more than once")));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::config("delta", format!("must lie in (0, 1), got {}", self.delta)));
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::config("lambda", format!("must be > 0, got {l}")));
            }
        }
        if let Some(b) = self.bound {
            if !(b >= 1.0) || !b.is_finite() {
                return Err(Error::config("bound", format!("must be >= 1, got {b}")));
            }
        }
        if let LearningRate::Value(a) = self.alpha {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::config("alpha", format!("must be > 0 or \"auto\", got {a}")));
            }
        }
        if let AdversarySpec::PeriodicSwitching { period } = self.adversary {
            if period == 0 {
                return Err(Error::config("adversary.period", "must be at least 1"));
            }
        }
        Ok(())
    }

    /// Validates everything and builds the instance.
    pub fn resolve(&self) -> Result<Experiment> {
        self.check_scalars()?;
        let (mdp, base_rewards) = self.build_instance()?;
        let report = mdp.validate();
        if !report.is_valid() {
            return Err(Error::config("instance", format!("instance is not a valid mixture MDP: {report}")));
        }
        let bound = self.bound.unwrap_or(mdp.bound());
        let lambda = self.lambda.unwrap_or(1.0 / (bound * bound));
        let alpha = match self.alpha {
            LearningRate::Value(a) => a,
            LearningRate::Auto(_) => auto_learning_rate(mdp.num_actions(), mdp.horizon(), self.episodes),
        };
        let resolved = ResolvedConfig {
            instance: self.instance.clone(),
            num_states: mdp.num_states(),
            num_actions: mdp.num_actions(),
            horizon: mdp.horizon(),
            dim: mdp.dim(),
            episodes: self.episodes,
            adversary: self.adversary,
            variants: self.variants.clone(),
            lambda,
            alpha,
            delta: self.delta,
            bound,
            seeds: self.seeds.clone(),
            write_logs: self.write_logs,
        };
        Ok(Experiment {
            resolved,
            mdp,
            base_rewards,
            output_dir: self.output_dir.clone(),
        })
    }

    fn build_instance(&self) -> Result<(MixtureMdp, Option<RewardTable>)> {
        match &self.instance {
            InstanceSpec::Hard {
                dim,
                horizon,
                gap,
                signs,
                sign_seed,
            } => {
                let mut params = match signs {
                    Some(s) => HardInstanceParams::new(*dim, *horizon, s.clone()),
                    None if *dim >= 1 => HardInstanceParams::seeded(*dim, *horizon, *sign_seed),
                    None => return Err(Error::config("instance.dim", "must be at least 4")),
                };
                if let Some(g) = gap {
                    params = params.with_gap(*g);
                }
                let (mdp, schedule) =
                    build_hard_instance(&params, 1).map_err(|e| Error::config("instance", e.to_string()))?;
                Ok((mdp, Some(schedule.episode(1).clone())))
            }
            InstanceSpec::Random {
                seed,
                num_states,
                num_actions,
                dim,
                horizon,
            } => {
                let mdp = build_random_instance(*seed, *num_states, *num_actions, *dim, *horizon)
                    .map_err(|e| Error::config("instance", e.to_string()))?;
                Ok((mdp, None))
            }
            InstanceSpec::File { path } => {
                load_instance(path).map_err(|e| Error::config("instance.path", e.to_string()))
            }
        }
    }
}

/// The fully resolved configuration recorded in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub instance: InstanceSpec,
    pub num_states: usize,
    pub num_actions: usize,
    pub horizon: usize,
    pub dim: usize,
    pub episodes: usize,
    pub adversary: AdversarySpec,
    pub variants: Vec<Variant>,
    pub lambda: f64,
    pub alpha: f64,
    pub delta: f64,
    pub bound: f64,
    pub seeds: Vec<u64>,
    pub write_logs: bool,
}

/// A validated experiment ready to run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub resolved: ResolvedConfig,
    pub mdp: MixtureMdp,
    pub base_rewards: Option<RewardTable>,
    pub output_dir: PathBuf,
}

impl Experiment {
    pub fn agent_config(&self, variant: Variant) -> AgentConfig {
        let r = &self.resolved;
        AgentConfig {
            learning_rate: r.alpha,
            estimator: EstimatorConfig {
                lambda: r.lambda,
                delta: r.delta,
                bound: r.bound,
                horizon: r.horizon,
                dim: r.dim,
            },
            variant,
        }
    }

    fn adversary<R: Rng>(&self, rng: &mut R) -> Result<Adversary> {
        let (h, s, a) = (self.mdp.horizon(), self.mdp.num_states(), self.mdp.num_actions());
        let kind = match self.resolved.adversary {
            AdversarySpec::Fixed => AdversaryKind::Fixed(match &self.base_rewards {
                Some(t) => t.clone(),
                None => uniform_reward_table(rng, h, s, a),
            }),
            AdversarySpec::SeededIidUniform => AdversaryKind::SeededUniform,
            AdversarySpec::PeriodicSwitching { period } => {
                AdversaryKind::Periodic((0..period).map(|_| uniform_reward_table(rng, h, s, a)).collect())
            }
            AdversarySpec::AdaptiveAntagonist => AdversaryKind::AdaptiveAntagonist,
        };
        Adversary::new(kind, h, s, a)
    }

    /// Plays one `(seed, variant)` run to completion.
    pub fn run_single(&self, seed: u64, variant: Variant) -> Result<RunOutput> {
        let mut rngs = RunRngs::new(seed);
        let mut adversary = self.adversary(&mut rngs.adversary)?;
        let mut agent = Agent::new(self.agent_config(variant), self.mdp.feature_map())?;
        let eval = Evaluator::new(&self.mdp);
        let k_total = self.resolved.episodes;
        let mut tables = Vec::with_capacity(k_total);
        let mut v_pi = Vec::with_capacity(k_total);
        let mut log = self.resolved.write_logs.then(String::new);
        for k in 1..=k_total {
            let record = run_episode(&mut agent, &self.mdp, &mut adversary, k, &mut rngs)?;
            v_pi.push(eval.policy_value(&record.rewards, &record.policy)?);
            if let Some(log) = log.as_mut() {
                log.push_str(&record.to_log_line());
                log.push('\n');
            }
            tables.push(record.rewards);
        }
        let schedule = RewardSchedule::new(tables)?;
        let series = regret_from_values(&eval, &schedule, v_pi)?;
        Ok(RunOutput {
            seed,
            variant,
            series,
            log,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub seed: u64,
    pub variant: Variant,
    pub series: RegretSeries,
    pub log: Option<String>,
}

impl RunOutput {
    pub fn to_csv(&self) -> String {
        run_csv(self.variant, self.seed, &self.series)
    }
}

pub fn run_file_name(variant: Variant, seed: u64) -> String {
    format!("run_{variant}_seed{seed}.csv")
}

/// Per-run CSV in the fixed schema.
pub fn run_csv(variant: Variant, seed: u64, series: &RegretSeries) -> String {
    let k_total = series.num_episodes();
    let mut out = String::with_capacity(64 * (k_total + 1));
    out.push_str(RUN_CSV_HEADER);
    out.push('\n');
    for k in 0..k_total {
        let share = series.hindsight_opt_total * (k + 1) as f64 / k_total as f64;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            k + 1,
            variant,
            seed,
            fmt_sig(series.cum_alg_value[k], 12),
            fmt_sig(share, 12),
            fmt_sig(series.cum_regret[k], 12)
        );
    }
    out
}

/// `%.12g`-style formatting with `sig` significant digits.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", sig.saturating_sub(1), x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= sig as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStatus {
    pub variant: Variant,
    pub seed: u64,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: ResolvedConfig,
    pub runs: Vec<RunStatus>,
    /// File name to SHA-256 hex digest.
    pub checksums: BTreeMap<String, String>,
}

/// Result of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub failed_runs: usize,
    pub manifest: Manifest,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs every `(seed, variant)` pair and writes run CSVs, the aggregate and the manifest.
/// A run that fails is recorded in the manifest without affecting the others.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let exp = cfg.resolve()?;
    let out_dir = exp.output_dir.clone();
    fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;

    let jobs: Vec<(Variant, u64)> = exp
        .resolved
        .variants
        .iter()
        .flat_map(|&v| exp.resolved.seeds.iter().map(move |&s| (v, s)))
        .collect();
    let results: Vec<Result<RunOutput>> = jobs.par_iter().map(|&(v, s)| exp.run_single(s, v)).collect();

    let mut files = Vec::new();
    let mut checksums = BTreeMap::new();
    let mut runs = Vec::with_capacity(jobs.len());
    let mut write = |name: String, contents: &str, files: &mut Vec<PathBuf>| -> Result<()> {
        let path = out_dir.join(&name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        checksums.insert(name, sha256_hex(contents.as_bytes()));
        files.push(path);
        Ok(())
    };

    let mut by_variant: BTreeMap<Variant, Vec<&RegretSeries>> = BTreeMap::new();
    for (&(variant, seed), result) in jobs.iter().zip(&results) {
        match result {
            Ok(run) => {
                let name = run_file_name(variant, seed);
                write(name.clone(), &run.to_csv(), &mut files)?;
                if let Some(log) = &run.log {
                    write(name.replace(".csv", ".ndjson"), log, &mut files)?;
                }
                by_variant.entry(variant).or_default().push(&run.series);
                runs.push(RunStatus {
                    variant,
                    seed,
                    ok: true,
                    file: Some(name),
                    error: None,
                });
            }
            Err(e) => runs.push(RunStatus {
                variant,
                seed,
                ok: false,
                file: None,
                error: Some(e.to_string()),
            }),
        }
    }

    let mut aggregate = String::new();
    aggregate.push_str(AGGREGATE_CSV_HEADER);
    aggregate.push('\n');
    for variant in &exp.resolved.variants {
        let Some(series) = by_variant.get(variant) else {
            continue;
        };
        for k in 0..exp.resolved.episodes {
            let vals: Vec<f64> = series.iter().map(|s| s.cum_regret[k]).collect();
            let (mean, sd) = mean_sd(&vals);
            let _ = writeln!(
                aggregate,
                "{},{},{},{},{}",
                k + 1,
                variant,
                vals.len(),
                fmt_sig(mean, 12),
                fmt_sig(sd, 12)
            );
        }
    }
    write(AGGREGATE_FILE.into(), &aggregate, &mut files)?;

    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: exp.resolved.clone(),
        runs,
        checksums: checksums.clone(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    let path = out_dir.join(MANIFEST_FILE);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    files.push(path);

    Ok(ExperimentOutcome {
        failed_runs: manifest.runs.iter().filter(|r| !r.ok).count(),
        output_dir: out_dir,
        files,
        manifest,
    })
}

/// Arithmetic mean and sample standard deviation (0 for a single value).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// One row of [`summarize`].
#[derive(Debug, Clone, PartialEq)]
pub struct VariantSummary {
    pub variant: String,
    pub num_seeds: usize,
    pub episodes: usize,
    pub final_mean: f64,
    pub final_sd: f64,
    /// `mean cum_regret(K) / mean cum_regret(floor(K/2))`.
    pub growth_ratio: Option<f64>,
}

/// Reads `aggregate.csv` from a finished experiment directory.
pub fn summarize(out_dir: impl AsRef<Path>) -> Result<Vec<VariantSummary>> {
    let path = out_dir.as_ref().join(AGGREGATE_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::parse(&path, e))?.clone();
    if header.iter().collect::<Vec<_>>().join(",") != AGGREGATE_CSV_HEADER {
        return Err(Error::parse(&path, "unexpected header"));
    }
    let mut order: Vec<String> = Vec::new();
    let mut rows: BTreeMap<String, Vec<(usize, usize, f64, f64)>> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::parse(&path, e))?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::parse(&path, "short row"));
        let float = |i: usize| -> Result<f64> { field(i)?.parse().map_err(|e| Error::parse(&path, e)) };
        let count = |i: usize| -> Result<usize> { field(i)?.parse().map_err(|e| Error::parse(&path, e)) };
        let variant = field(1)?.to_string();
        if !rows.contains_key(&variant) {
            order.push(variant.clone());
        }
        let row = (count(0)?, count(2)?, float(3)?, float(4)?);
        rows.entry(variant).or_default().push(row);
    }
    order
        .into_iter()
        .map(|variant| {
            let series = &rows[&variant];
            if series.iter().enumerate().any(|(i, r)| r.0 != i + 1) {
                return Err(Error::parse(&path, format!("episodes of `{variant}` are not 1..K")));
            }
            let means: Vec<f64> = series.iter().map(|r| r.2).collect();
            let last = series.last().expect("at least one row");
            Ok(VariantSummary {
                num_seeds: last.1,
                episodes: series.len(),
                final_mean: last.2,
                final_sd: last.3,
                growth_ratio: growth_ratio(&means),
                variant,
            })
        })
        .collect()
}

/// Text table of the final regret per variant.
pub fn print_summary(out_dir: impl AsRef<Path>) -> Result<String> {
    let rows = summarize(out_dir)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<24} {:>6} {:>8} {:>16} {:>14} {:>8}",
        "variant", "seeds", "K", "final regret", "sd", "growth"
    );
    for r in rows {
        let growth = r.growth_ratio.map_or_else(|| "n/a".to_string(), |g| format!("{g:.3}"));
        let _ = writeln!(
            out,
            "{:<24} {:>6} {:>8} {:>16} {:>14} {:>8}",
            r.variant,
            r.num_seeds,
            r.episodes,
            fmt_sig(r.final_mean, 8),
            fmt_sig(r.final_sd, 6),
            growth
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0, 12), "0");
        assert_eq!(fmt_sig(0.25, 12), "0.25");
        assert_eq!(fmt_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(fmt_sig(2.0 / 3.0 * 1000.0, 12), "666.666666667");
        assert_eq!(fmt_sig(1234.5, 12), "1234.5");
        assert_eq!(fmt_sig(-7.0, 12), "-7");
        assert_eq!(fmt_sig(1e-7, 12), "1e-7");
        assert_eq!(fmt_sig(123456789012345.0, 12), "1.23456789012e14");
        assert_eq!(fmt_sig(99999.99999999999, 12), "100000");
    }

    #[test]
    fn mean_and_sd() {
        assert_eq!(mean_sd(&[3.0]), (3.0, 0.0));
        let (m, s) = mean_sd(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn config_defaults_and_errors() {
        let cfg = ExperimentConfig::from_json(
            r#"{"instance": {"kind": "random", "num_states": 3, "num_actions": 2, "dim": 2, "horizon": 2}, "episodes": 5}"#,
        )
        .unwrap();
        assert_eq!(cfg.variants, Variant::ALL.to_vec());
        assert_eq!(cfg.alpha, LearningRate::Auto(AutoKeyword::Auto));
        assert_eq!(cfg.seeds, vec![0]);

        let err = ExperimentConfig::from_json(
            r#"{"instance": {"kind": "hard", "dim": "four", "horizon": 3}, "episodes": 5}"#,
        )
        .unwrap_err();
        match err {
            // internally tagged enums are buffered, so the path stops at the tagged field
            Error::Config { path, message } => {
                assert_eq!(path, "instance");
                assert!(message.contains("string"), "{message}");
            }
            other => panic!("unexpected {other}"),
        }
        let err = ExperimentConfig::from_json(
            r#"{"instance": {"kind": "hard", "dim": 4, "horizon": 3}, "episodes": 5, "alpha": "fast"}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "alpha"), "{err}");
    }

    #[test]
    fn scalar_checks_name_the_field() {
        let base = r#"{"instance": {"kind": "random", "num_states": 3, "num_actions": 2, "dim": 2, "horizon": 2}, "episodes": 5}"#;
        let cfg = ExperimentConfig::from_json(base).unwrap();
        let field = |c: ExperimentConfig| match c.resolve() {
            Err(Error::Config { path, .. }) => path,
            other => panic!("expected config error, got {other:?}"),
        };
        assert_eq!(field(ExperimentConfig { episodes: 0, ..cfg.clone() }), "episodes");
        assert_eq!(field(ExperimentConfig { seeds: vec![1, 1], ..cfg.clone() }), "seeds");
        assert_eq!(field(ExperimentConfig { seeds: vec![], ..cfg.clone() }), "seeds");
        assert_eq!(field(ExperimentConfig { delta: 1.5, ..cfg.clone() }), "delta");
        assert_eq!(field(ExperimentConfig { lambda: Some(-1.0), ..cfg.clone() }), "lambda");
        assert_eq!(field(ExperimentConfig { bound: Some(0.5), ..cfg.clone() }), "bound");
        assert_eq!(field(ExperimentConfig { alpha: LearningRate::Value(0.0), ..cfg.clone() }), "alpha");
        assert_eq!(
            field(ExperimentConfig {
                adversary: AdversarySpec::PeriodicSwitching { period: 0 },
                ..cfg.clone()
            }),
            "adversary.period"
        );
        let hard = ExperimentConfig {
            instance: InstanceSpec::Hard {
                dim: 4,
                horizon: 3,
                gap: Some(1.0),
                signs: None,
                sign_seed: 0,
            },
            ..cfg
        };
        assert_eq!(field(hard), "instance");
    }

    #[test]
    fn overrides() {
        let mut cfg = ExperimentConfig::from_json(
            r#"{"instance": {"kind": "random", "num_states": 3, "num_actions": 2, "dim": 2, "horizon": 2}, "episodes": 5}"#,
        )
        .unwrap();
        cfg.apply_overrides(Some("x".into()), Some(3), &["uniform-policy".into()]).unwrap();
        assert_eq!(cfg.seeds, vec![0, 1, 2]);
        assert_eq!(cfg.variants, vec![Variant::UniformPolicy]);
        assert_eq!(cfg.output_dir, PathBuf::from("x"));
        assert!(cfg.apply_overrides(None, None, &["nope".into()]).is_err());
    }
}
