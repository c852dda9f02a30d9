//! Episodic adversarial linear-mixture MDPs.
//!
//! * [`mdp`]: the model, exact transition queries and sampling;
//! * [`instances`]: the hard hypercube family, random instances and reward adversaries;
//! * [`estimator`]: per-stage weighted ridge regression and confidence radii;
//! * [`agent`]: the optimistic mirror-descent learner and its baselines;
//! * [`evaluation`]: exact policy values, hindsight optimum and regret;
//! * [`harness`]: multi-seed experiments with CSV output;
//! * [`format`]: instance and schedule files.

pub mod agent;
pub mod error;
pub mod estimator;
pub mod evaluation;
pub mod format;
pub mod harness;
pub mod instances;
pub mod mdp;

pub use agent::{make_agent, run_episode, run_episodes, Agent, AgentConfig, EpisodeRecord, RunLog, RunRngs, Variant};
pub use error::{Error, Result};
pub use estimator::{EstimatorConfig, StageEstimator};
pub use evaluation::{accumulate_regret, hindsight_optimal_value, policy_value, RegretSeries};
pub use harness::{print_summary, run_experiment, ExperimentConfig};
pub use instances::{build_hard_instance, build_random_instance, Adversary, AdversaryKind, HardInstanceParams};
pub use mdp::{FeatureMap, MixtureMdp, Policy, RewardSchedule, RewardTable};
