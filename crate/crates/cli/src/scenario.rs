//! Scenario files: plant, pipeline, timeline and optional wall.
//!
//! ```toml
//! name = "jrg_pdgc_planar"
//! frequency = 1000.0          # Hz
//! duration = 6.0              # s
//! log = "jrg_pdgc_planar.csv" # optional, relative to the scenario file
//! summary = "jrg/position/*:q/*"  # optional pair spec for the report
//!
//! [plant]
//! type = "planar"             # or "kinematic"
//! initial_positions = [0.0, 0.0, 0.0]
//! lengths = [0.5, 0.4, 0.3]
//! masses = [2.0, 1.5, 1.0]
//! friction = [0.5, 0.4, 0.3]  # optional, default zero
//! gravity = 9.81              # optional; 0 disables gravity
//! disturbance = [1.0, 1.0, 1.0]   # optional constant joint torque
//!
//! # kinematic plants instead take
//! # chain = "chains/anthropomorphic6.toml"
//! # rate_limit = [...]        # optional, rad/s
//!
//! [wall]                      # optional
//! point = [0.6, 0.0, 0.0]
//! normal = [-1.0, 0.0, 0.0]   # points out of the wall
//! stiffness = 10000.0
//! damping = 0.0
//!
//! [[pipeline]]
//! name = "jrg"
//! type = "jrg"
//!
//! [[pipeline]]
//! name = "pdgc"
//! type = "pdgc"
//! params = { kp = 100.0, kd = 20.0 }
//!
//! [[events]]
//! time = 0.5
//! publish_reference = { positions = [0.3, 0.3, 0.3] }
//!
//! [[events]]
//! time = 1.0
//! submit_trajectory = { id = 1, file = "trajectories/wave.toml" }
//! ```
//!
//! A reference payload is either `positions` (+ optional `velocities`) or
//! `pose` (x y z qw qx qy qz, + optional `twist` and `wrench`). Trajectories
//! come from a file or inline with `variant`, `dimension` and `waypoints`
//! keys as in [`crate::trajectory`].

use std::path::{Path, PathBuf};

use nalgebra::{DVector, Vector3};
use refchain_core::chain::ComponentDescriptor;
use refchain_core::plant::{ChainConfig, DynamicPlant, KinematicPlant, PlanarArm, Plant, SerialChain, WallModel};
use refchain_core::refgen::{JointReference, Reference, Trajectory, TrajectoryId};
use serde::Deserialize;

use crate::error::CliError;
use crate::trajectory::{task_reference, TrajectoryFile, Variant};

/// Slack when mapping event times onto cycles, so that e.g. 0.3 s at 1 kHz
/// lands on cycle 300 despite rounding in `0.3 * 1000`.
const EVENT_TIME_SLACK: f64 = 1e-9;

/// Column prefixes the cycle log reserves for plant signals.
pub const RESERVED_NAMES: [&str; 5] = ["time", "q", "qdot", "ee", "wrench"];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: Option<String>,
    pub frequency: f64,
    pub duration: f64,
    #[serde(default)]
    pub log: Option<PathBuf>,
    #[serde(default)]
    pub summary: Option<String>,
    pub plant: PlantConfig,
    #[serde(default)]
    pub wall: Option<WallConfig>,
    pub pipeline: Vec<ComponentDescriptor>,
    #[serde(default)]
    pub events: Vec<EventConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PlantConfig {
    Planar {
        initial_positions: Vec<f64>,
        lengths: Vec<f64>,
        masses: Vec<f64>,
        #[serde(default)]
        friction: Option<Vec<f64>>,
        #[serde(default = "default_gravity")]
        gravity: f64,
        #[serde(default)]
        disturbance: Option<Vec<f64>>,
    },
    Kinematic {
        initial_positions: Vec<f64>,
        chain: PathBuf,
        #[serde(default)]
        rate_limit: Option<Vec<f64>>,
    },
}

fn default_gravity() -> f64 {
    9.81
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallConfig {
    pub point: [f64; 3],
    pub normal: [f64; 3],
    pub stiffness: f64,
    #[serde(default)]
    pub damping: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventConfig {
    pub time: f64,
    #[serde(default)]
    pub publish_reference: Option<ReferencePayload>,
    #[serde(default)]
    pub submit_trajectory: Option<TrajectoryPayload>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferencePayload {
    #[serde(default)]
    pub positions: Option<Vec<f64>>,
    #[serde(default)]
    pub velocities: Option<Vec<f64>>,
    #[serde(default)]
    pub pose: Option<Vec<f64>>,
    #[serde(default)]
    pub twist: Option<Vec<f64>>,
    #[serde(default)]
    pub wrench: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryPayload {
    pub id: TrajectoryId,
    #[serde(default)]
    pub file: Option<PathBuf>,
    #[serde(default)]
    pub variant: Option<Variant>,
    #[serde(default)]
    pub dimension: Option<usize>,
    #[serde(default)]
    pub waypoints: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    PublishReference(Reference),
    SubmitTrajectory(Trajectory),
}

/// An event with its payload loaded and its firing cycle fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedEvent {
    pub time: f64,
    pub cycle: u64,
    pub action: Action,
}

/// A parsed scenario with every referenced file loaded.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub path: PathBuf,
    pub name: String,
    pub file: ScenarioFile,
    pub events: Vec<TimedEvent>,
    chain: Option<ChainConfig>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parse_toml<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    toml::from_str(text).map_err(|e| CliError::scenario(path, e.to_string().trim_end().to_string()))
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, CliError> {
        let path = path.as_ref();
        Self::parse(path, &read(path)?)
    }

    /// Parses scenario text; relative paths inside resolve against the
    /// directory of `path`.
    pub fn parse(path: &Path, text: &str) -> Result<Self, CliError> {
        let file: ScenarioFile = parse_toml(path, text)?;
        Self::from_file(path, file)
    }

    pub fn from_file(path: &Path, file: ScenarioFile) -> Result<Self, CliError> {
        let bad = |message: String| CliError::scenario(path, message);
        if !(file.frequency.is_finite() && file.frequency > 0.0) {
            return Err(bad(format!("frequency must be > 0, got {}", file.frequency)));
        }
        if !(file.duration.is_finite() && file.duration >= 0.0) {
            return Err(bad(format!("duration must be >= 0, got {}", file.duration)));
        }
        for d in &file.pipeline {
            if RESERVED_NAMES.contains(&d.name.as_str()) {
                return Err(bad(format!("component name `{}` is reserved for log columns", d.name)));
            }
        }
        let base = path.parent().unwrap_or(Path::new("."));
        let chain = match &file.plant {
            PlantConfig::Kinematic { chain, .. } => {
                let chain_path = base.join(chain);
                Some(parse_toml::<ChainConfig>(&chain_path, &read(&chain_path)?)?)
            }
            PlantConfig::Planar { .. } => None,
        };
        let mut events = Vec::with_capacity(file.events.len());
        for (i, e) in file.events.iter().enumerate() {
            if !(e.time.is_finite() && (0.0..=file.duration).contains(&e.time)) {
                return Err(bad(format!("event {i}: time {} is outside [0, {}]", e.time, file.duration)));
            }
            let action = match (&e.publish_reference, &e.submit_trajectory) {
                (Some(r), None) => Action::PublishReference(reference_payload(r).map_err(|m| bad(format!("event {i}: {m}")))?),
                (None, Some(t)) => Action::SubmitTrajectory(trajectory_payload(base, t).map_err(|err| match err {
                    CliError::Scenario { path: p, message } if p == path => bad(format!("event {i}: {message}")),
                    other => other,
                })?),
                _ => return Err(bad(format!("event {i} needs exactly one of publish_reference and submit_trajectory"))),
            };
            let cycle = (e.time * file.frequency - EVENT_TIME_SLACK).ceil().max(0.0) as u64;
            events.push(TimedEvent {
                time: e.time,
                cycle,
                action,
            });
        }
        events.sort_by_key(|e| e.cycle);
        let name = file.name.clone().unwrap_or_else(|| {
            path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into())
        });
        Ok(Self {
            path: path.to_path_buf(),
            name,
            file,
            events,
            chain,
        })
    }

    pub fn period(&self) -> f64 {
        1.0 / self.file.frequency
    }

    /// Number of cycles simulated: `duration * frequency`, rounded.
    pub fn cycles(&self) -> u64 {
        (self.file.duration * self.file.frequency).round() as u64
    }

    /// Log path from the scenario, relative to the scenario file.
    pub fn log_path(&self) -> Option<PathBuf> {
        let base = self.path.parent().unwrap_or(Path::new("."));
        self.file.log.as_ref().map(|p| base.join(p))
    }

    pub fn build_plant(&self) -> Result<Box<dyn Plant>, CliError> {
        let bad = |message: String| CliError::scenario(&self.path, format!("plant: {message}"));
        match &self.file.plant {
            PlantConfig::Planar {
                initial_positions,
                lengths,
                masses,
                friction,
                gravity,
                disturbance,
            } => {
                let friction = friction.clone().unwrap_or_else(|| vec![0.0; lengths.len()]);
                let arm = PlanarArm::new(lengths.clone(), masses.clone(), friction, *gravity, *gravity != 0.0)
                    .map_err(|e| bad(e.to_string()))?;
                if initial_positions.len() != arm.dof() {
                    return Err(bad(format!("{} initial positions for {} joints", initial_positions.len(), arm.dof())));
                }
                let mut plant =
                    DynamicPlant::new(arm, DVector::from_column_slice(initial_positions)).map_err(|e| bad(e.to_string()))?;
                if let Some(d) = disturbance {
                    plant = plant
                        .with_disturbance(DVector::from_column_slice(d))
                        .map_err(|e| bad(e.to_string()))?;
                }
                Ok(Box::new(plant))
            }
            PlantConfig::Kinematic {
                initial_positions,
                rate_limit,
                ..
            } => {
                let config = self.chain.as_ref().expect("chain loaded with the scenario");
                let chain = SerialChain::from_config(config).map_err(|e| bad(e.to_string()))?;
                if initial_positions.len() != chain.dof() {
                    return Err(bad(format!("{} initial positions for {} joints", initial_positions.len(), chain.dof())));
                }
                let mut plant = KinematicPlant::new(chain, DVector::from_column_slice(initial_positions))
                    .map_err(|e| bad(e.to_string()))?;
                if let Some(limit) = rate_limit {
                    plant = plant
                        .with_rate_limit(DVector::from_column_slice(limit))
                        .map_err(|e| bad(e.to_string()))?;
                }
                Ok(Box::new(plant))
            }
        }
    }

    pub fn build_wall(&self) -> Result<Option<WallModel>, CliError> {
        self.file
            .wall
            .as_ref()
            .map(|w| {
                WallModel::new(Vector3::from(w.point), Vector3::from(w.normal), w.stiffness, w.damping)
                    .map_err(|e| CliError::scenario(&self.path, format!("wall: {e}")))
            })
            .transpose()
    }
}

fn reference_payload(p: &ReferencePayload) -> Result<Reference, String> {
    match (&p.positions, &p.pose) {
        (Some(q), None) => {
            if p.twist.is_some() || p.wrench.is_some() {
                return Err("joint references take `positions` and `velocities` only".into());
            }
            let positions = DVector::from_column_slice(q);
            Ok(match &p.velocities {
                Some(v) => JointReference::with_velocities(positions, DVector::from_column_slice(v)),
                None => JointReference::new(positions),
            }
            .into())
        }
        (None, Some(pose)) => {
            if p.velocities.is_some() {
                return Err("task references take `pose`, `twist` and `wrench` only".into());
            }
            if pose.len() != 7 {
                return Err(format!("pose needs 7 values (x y z qw qx qy qz), got {}", pose.len()));
            }
            let mut values = pose.clone();
            for (key, extra) in [("twist", &p.twist), ("wrench", &p.wrench)] {
                if let Some(extra) = extra {
                    if extra.len() != 6 {
                        return Err(format!("{key} needs 6 values, got {}", extra.len()));
                    }
                }
            }
            match (&p.twist, &p.wrench) {
                (twist, Some(wrench)) => {
                    values.extend(twist.clone().unwrap_or_else(|| vec![0.0; 6]));
                    values.extend(wrench);
                }
                (Some(twist), None) => values.extend(twist),
                (None, None) => {}
            }
            Ok(task_reference(&values))
        }
        _ => Err("a reference needs exactly one of `positions` and `pose`".into()),
    }
}

fn trajectory_payload(base: &Path, p: &TrajectoryPayload) -> Result<Trajectory, CliError> {
    let (file, source) = match (&p.file, &p.variant, &p.dimension, &p.waypoints) {
        (Some(file), None, None, None) => {
            let path = base.join(file);
            (parse_toml::<TrajectoryFile>(&path, &read(&path)?)?, path)
        }
        (None, Some(variant), Some(dimension), Some(waypoints)) => (
            TrajectoryFile {
                variant: *variant,
                dimension: *dimension,
                waypoints: waypoints.clone(),
            },
            base.to_path_buf(),
        ),
        _ => {
            return Err(CliError::scenario(
                base,
                "a trajectory needs either `file` or all of `variant`, `dimension` and `waypoints`",
            ))
        }
    };
    file.to_trajectory(p.id).map_err(|m| CliError::scenario(source, m))
}
