use std::fmt;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::thread;

use nalgebra::DVector;
use refchain_core::chain::layout::{POSE_AXES, WRENCH_AXES};
use refchain_core::chain::Pipeline;
use refchain_core::plant::{wall_wrench, Plant, WallModel};
use refchain_core::refgen::{ResultCode, TrajectoryId};
use refchain_core::transport::{GoalHandle, GoalStatus, ReferenceInbox};
use refchain_core::Twist;

use crate::error::CliError;
use crate::log::{CsvLogWriter, LogTable};
use crate::scenario::{Action, Scenario, TimedEvent};
use crate::summary::{parse_pairs, summarize, PairReport};

/// An event the inbox refused.
#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub time: f64,
    pub trajectory: Option<TrajectoryId>,
    pub code: ResultCode,
}

#[derive(Debug, Default)]
struct Injected {
    goals: Vec<GoalHandle>,
    rejections: Vec<Rejection>,
}

impl Injected {
    fn apply(&mut self, inbox: &ReferenceInbox, event: TimedEvent) {
        match event.action {
            Action::PublishReference(r) => {
                if let Err(code) = inbox.publish_reference(r) {
                    self.rejections.push(Rejection {
                        time: event.time,
                        trajectory: None,
                        code,
                    });
                }
            }
            Action::SubmitTrajectory(t) => {
                let id = t.id;
                match inbox.submit_trajectory(t) {
                    Ok(handle) => self.goals.push(handle),
                    Err(code) => self.rejections.push(Rejection {
                        time: event.time,
                        trajectory: Some(id),
                        code,
                    }),
                }
            }
        }
    }
}

/// Log column names for a pipeline driving a plant with `dof` joints.
pub fn log_columns(pipeline: &Pipeline, dof: usize) -> Vec<String> {
    let mut columns = vec!["time".to_string()];
    for port in pipeline.ports() {
        columns.extend(port.names().iter().cloned());
    }
    columns.extend((0..dof).map(|i| format!("q/{i}")));
    columns.extend((0..dof).map(|i| format!("qdot/{i}")));
    columns.extend(POSE_AXES.iter().map(|a| format!("ee/{a}")));
    columns.extend(WRENCH_AXES.iter().map(|a| format!("wrench/{a}")));
    columns
}

/// A scenario being stepped one cycle at a time.
pub struct Simulation {
    pipeline: Pipeline,
    plant: Box<dyn Plant>,
    wall: Option<WallModel>,
    events: Vec<TimedEvent>,
    injected: Injected,
    columns: Vec<String>,
}

impl Simulation {
    /// Builds plant and pipeline and activates the pipeline from the plant's
    /// initial state.
    pub fn new(scenario: &Scenario) -> Result<Self, CliError> {
        let mut plant = scenario.build_plant()?;
        let wall = scenario.build_wall()?;
        let mut pipeline = Pipeline::build(&scenario.file.pipeline, plant.as_ref(), scenario.period())?;
        if let Some(w) = &wall {
            let q = plant.state().joints.positions.clone();
            plant.set_contact_wrench(wall_wrench(w, &plant.forward_kinematics(&q), &Twist::zero()));
        }
        pipeline.activate(plant.as_ref())?;
        let columns = log_columns(&pipeline, plant.dof());
        let mut events = scenario.events.clone();
        // popped from the back
        events.reverse();
        Ok(Self {
            pipeline,
            plant,
            wall,
            events,
            injected: Injected::default(),
            columns,
        })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn pipeline(&self) -> &Pipeline {
        &self.pipeline
    }

    pub fn plant(&self) -> &dyn Plant {
        self.plant.as_ref()
    }

    pub fn cycle(&self) -> u64 {
        self.pipeline.cycle()
    }

    pub fn goals(&self) -> &[GoalHandle] {
        &self.injected.goals
    }

    pub fn rejections(&self) -> &[Rejection] {
        &self.injected.rejections
    }

    /// Hands pending timeline events to the caller, who then injects them.
    fn take_events(&mut self) -> Vec<TimedEvent> {
        let mut events = std::mem::take(&mut self.events);
        events.reverse();
        events
    }

    fn fire_due_events(&mut self) {
        let cycle = self.pipeline.cycle();
        while self.events.last().is_some_and(|e| e.cycle <= cycle) {
            let event = self.events.pop().expect("checked above");
            let inbox = self.pipeline.inbox();
            self.injected.apply(&inbox, event);
        }
    }

    /// Fires due events, runs one pipeline cycle, advances the plant and
    /// returns the log row for this cycle.
    pub fn step(&mut self) -> Result<Vec<f64>, CliError> {
        self.fire_due_events();
        self.step_control()
    }

    fn step_control(&mut self) -> Result<Vec<f64>, CliError> {
        let t = self.pipeline.next_time();
        let dt = self.pipeline.period();
        let state = self.plant.state().clone();
        let command = self.pipeline.step(t, self.plant.as_ref())?.to_vec();

        let mut row = Vec::with_capacity(self.columns.len());
        row.push(t);
        for port in self.pipeline.ports() {
            row.extend_from_slice(port.values());
        }
        row.extend(state.joints.positions.iter());
        row.extend(state.joints.velocities.iter());
        row.extend(self.plant.forward_kinematics(&state.joints.positions).to_array());
        row.extend(state.wrench.to_vector().iter());

        self.plant.step(&command, dt)?;
        if let Some(w) = &self.wall {
            let q = &self.plant.state().joints.positions;
            let pose = self.plant.forward_kinematics(q);
            let v: DVector<f64> = self.plant.jacobian(q) * &self.plant.state().joints.velocities;
            self.plant.set_contact_wrench(wall_wrench(w, &pose, &Twist::from_slice(v.as_slice())));
        }
        Ok(row)
    }

    /// Cycles some port skipped: every port is committed exactly once per
    /// completed cycle, so its generation must equal the cycle count.
    pub fn missed_cycles(&self) -> u64 {
        let cycle = self.pipeline.cycle();
        self.pipeline
            .ports()
            .iter()
            .map(|p| cycle.saturating_sub(p.generation()))
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the scenario's log path.
    pub log: Option<PathBuf>,
    /// Inject timeline events from a second thread.
    pub stress: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoalOutcome {
    pub id: TrajectoryId,
    pub status: GoalStatus,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub name: String,
    pub frequency: f64,
    pub cycles: u64,
    pub missed_cycles: u64,
    pub goals: Vec<GoalOutcome>,
    pub rejections: Vec<Rejection>,
    /// Events still pending when the run ended (stress mode only).
    pub skipped_events: usize,
    pub errors: Vec<PairReport>,
    pub log: LogTable,
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {}: {} cycles at {} Hz", self.name, self.cycles, self.frequency)?;
        writeln!(f, "missed cycles: {}", self.missed_cycles)?;
        if self.skipped_events > 0 {
            writeln!(f, "events not injected: {}", self.skipped_events)?;
        }
        for g in &self.goals {
            match g.status {
                GoalStatus::Finished(code) => writeln!(f, "trajectory {}: {code}", g.id)?,
                GoalStatus::Pending => writeln!(f, "trajectory {}: still pending", g.id)?,
                GoalStatus::Executing => writeln!(f, "trajectory {}: still executing", g.id)?,
            }
        }
        for r in &self.rejections {
            match r.trajectory {
                Some(id) => writeln!(f, "trajectory {id} at t = {} s rejected: {}", r.time, r.code)?,
                None => writeln!(f, "reference at t = {} s rejected: {}", r.time, r.code)?,
            }
        }
        for e in &self.errors {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Default report pairs: generator output against the measured joints or
/// end-effector pose.
pub fn default_pairs(scenario: &Scenario) -> String {
    let generator = &scenario.file.pipeline[0];
    match generator.kind.as_str() {
        "trg" => format!("{}/pose:ee", generator.name),
        _ => format!("{}/position/*:q/*", generator.name),
    }
}

fn drive(sim: &mut Simulation, cycles: u64, stress: bool, log: &mut LogTable) -> Result<usize, CliError> {
    if !stress {
        for _ in 0..cycles {
            log.rows.push(sim.step()?);
        }
        return Ok(0);
    }
    let events = sim.take_events();
    let inbox = sim.pipeline.inbox();
    let now = Arc::new(AtomicU64::new(0));
    let done = Arc::new(AtomicBool::new(false));
    let injector = {
        let (now, done) = (now.clone(), done.clone());
        thread::spawn(move || {
            let mut injected = Injected::default();
            let total = events.len();
            for (fired, event) in events.into_iter().enumerate() {
                while now.load(Ordering::Acquire) < event.cycle {
                    if done.load(Ordering::Acquire) {
                        return (injected, total - fired);
                    }
                    thread::yield_now();
                }
                injected.apply(&inbox, event);
            }
            (injected, 0)
        })
    };
    let mut result = Ok(());
    for _ in 0..cycles {
        now.store(sim.cycle(), Ordering::Release);
        match sim.step_control() {
            Ok(row) => log.rows.push(row),
            Err(e) => {
                result = Err(e);
                break;
            }
        }
    }
    done.store(true, Ordering::Release);
    let (injected, skipped) = injector.join().expect("injector thread panicked");
    sim.injected.goals.extend(injected.goals);
    sim.injected.rejections.extend(injected.rejections);
    result.map(|_| skipped)
}

/// Runs a scenario to completion, writing the cycle log if a path is given
/// in the options or the scenario.
pub fn run_scenario(scenario: &Scenario, options: &RunOptions) -> Result<RunReport, CliError> {
    let mut sim = Simulation::new(scenario)?;
    let mut log = LogTable::new(sim.columns().to_vec());
    let pairs_spec = scenario.file.summary.clone().unwrap_or_else(|| default_pairs(scenario));
    let pairs = parse_pairs(&pairs_spec, &log)?;

    let outcome = drive(&mut sim, scenario.cycles(), options.stress, &mut log);
    if let Some(path) = options.log.clone().or_else(|| scenario.log_path()) {
        let mut writer = CsvLogWriter::create(&path, &log.headers)?;
        for row in &log.rows {
            writer.write_row(row)?;
        }
        writer.finish()?;
    }
    let skipped_events = outcome?;

    let errors = if log.rows.is_empty() { Vec::new() } else { summarize(&log, &pairs)? };
    Ok(RunReport {
        name: scenario.name.clone(),
        frequency: scenario.file.frequency,
        cycles: sim.cycle(),
        missed_cycles: sim.missed_cycles(),
        goals: sim
            .goals()
            .iter()
            .map(|g| GoalOutcome {
                id: g.id(),
                status: g.status(),
            })
            .collect(),
        rejections: sim.rejections().to_vec(),
        skipped_events,
        errors,
        log,
    })
}
