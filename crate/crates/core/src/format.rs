//! JSON files for instances and reward schedules.
//!
//! Floats are written with the shortest representation that parses back to
//! the same `f64`, so save/load round-trips are exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{FeatureMap, MixtureMdp, RewardSchedule, RewardTable};

/// On-disk form of a [`MixtureMdp`], optionally carrying a base reward table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub num_states: usize,
    pub num_actions: usize,
    pub horizon: usize,
    pub dim: usize,
    pub bound: f64,
    pub initial_state: usize,
    /// Row-major `S x A x S x d`.
    pub features: Vec<f64>,
    /// `H` vectors of length `d`.
    pub theta: Vec<Vec<f64>>,
    /// Row-major `H x S x A`; used by the fixed adversary when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewards: Option<Vec<f64>>,
}

impl InstanceFile {
    pub fn from_mdp(mdp: &MixtureMdp, rewards: Option<&RewardTable>) -> Self {
        Self {
            num_states: mdp.num_states(),
            num_actions: mdp.num_actions(),
            horizon: mdp.horizon(),
            dim: mdp.dim(),
            bound: mdp.bound(),
            initial_state: mdp.initial_state(),
            features: mdp.features().as_slice().to_vec(),
            theta: mdp.thetas().to_vec(),
            rewards: rewards.map(|r| r.as_slice().to_vec()),
        }
    }

    pub fn into_parts(self) -> Result<(MixtureMdp, Option<RewardTable>)> {
        if self.theta.len() != self.horizon {
            return Err(Error::Shape(format!(
                "theta has {} stages, expected H = {}",
                self.theta.len(),
                self.horizon
            )));
        }
        let rewards = self
            .rewards
            .map(|r| RewardTable::new(self.horizon, self.num_states, self.num_actions, r))
            .transpose()?;
        let fm = FeatureMap::new(self.num_states, self.num_actions, self.dim, self.features)?;
        let mdp = MixtureMdp::new(fm, self.theta, self.bound, self.initial_state)?;
        Ok((mdp, rewards))
    }
}

pub fn instance_to_string(mdp: &MixtureMdp, rewards: Option<&RewardTable>) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_mdp(mdp, rewards)).expect("instance serializes")
}

pub fn instance_from_str(text: &str) -> Result<(MixtureMdp, Option<RewardTable>)> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::parse("<instance>", e))?;
    file.into_parts()
}

pub fn save_instance(path: impl AsRef<Path>, mdp: &MixtureMdp, rewards: Option<&RewardTable>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, instance_to_string(mdp, rewards)).map_err(|e| Error::io(path, e))
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<(MixtureMdp, Option<RewardTable>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: InstanceFile = serde_json::from_str(&text).map_err(|e| Error::parse(path, e))?;
    file.into_parts()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleFile {
    horizon: usize,
    num_states: usize,
    num_actions: usize,
    /// One row-major `H x S x A` table per episode.
    tables: Vec<Vec<f64>>,
}

pub fn save_schedule(path: impl AsRef<Path>, schedule: &RewardSchedule) -> Result<()> {
    let path = path.as_ref();
    let (horizon, num_states, num_actions) = schedule.tables().first().map(|t| t.dims()).unwrap_or_default();
    let file = ScheduleFile {
        horizon,
        num_states,
        num_actions,
        tables: schedule.tables().iter().map(|t| t.as_slice().to_vec()).collect(),
    };
    let text = serde_json::to_string(&file).expect("schedule serializes");
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_schedule(path: impl AsRef<Path>) -> Result<RewardSchedule> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ScheduleFile = serde_json::from_str(&text).map_err(|e| Error::parse(path, e))?;
    let tables = file
        .tables
        .into_iter()
        .map(|t| RewardTable::new(file.horizon, file.num_states, file.num_actions, t))
        .collect::<Result<Vec<_>>>()?;
    RewardSchedule::new(tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{build_hard_instance, build_random_instance, HardInstanceParams};

    #[test]
    fn hard_instance_round_trip_is_exact() {
        let (mdp, sched) = build_hard_instance(&HardInstanceParams::seeded(5, 4, 2), 2).unwrap();
        let text = instance_to_string(&mdp, Some(sched.episode(1)));
        let (back, rewards) = instance_from_str(&text).unwrap();
        assert_eq!(back.features(), mdp.features());
        assert_eq!(back.thetas(), mdp.thetas());
        assert_eq!(back.bound(), mdp.bound());
        assert_eq!(rewards.as_ref(), Some(sched.episode(1)));
        assert_eq!(instance_to_string(&back, rewards.as_ref()), text);
    }

    #[test]
    fn schedule_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sched.json");
        let sched = RewardSchedule::new(vec![
            RewardTable::constant(2, 3, 2, 0.1),
            RewardTable::constant(2, 3, 2, 1.0 / 3.0),
        ])
        .unwrap();
        save_schedule(&path, &sched).unwrap();
        assert_eq!(load_schedule(&path).unwrap(), sched);
    }

    #[test]
    fn malformed_files_are_rejected() {
        let mdp = build_random_instance(0, 3, 2, 2, 2).unwrap();
        let mut file = InstanceFile::from_mdp(&mdp, None);
        file.features.pop();
        assert!(file.into_parts().is_err());
        let mut file = InstanceFile::from_mdp(&mdp, None);
        file.rewards = Some(vec![2.0; 12]);
        assert!(matches!(file.into_parts(), Err(Error::RewardOutOfRange { .. })));
        assert!(instance_from_str("{\"num_states\": 1}").is_err());
        assert!(matches!(load_instance("/nonexistent/instance.json"), Err(Error::Io { .. })));
    }
}
