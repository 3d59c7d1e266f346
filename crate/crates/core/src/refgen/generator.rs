use nalgebra::{DVector, Vector3};

use crate::chain::{layout, ChainableComponent, ComponentDescriptor, CycleContext, Params, PlantInfo, RobotSnapshot};
use crate::error::{Error, Result};
use crate::transport::{mailbox, ControlEndpoint, GoalLink, InboxEvent, ReferenceInbox};

use super::fsm::{fsm_transition, FsmEvent, GeneratorState, Mode};
use super::interpolate::interpolate;
use super::reference::{
    JointLimits, JointReference, Limits, Reference, ResultCode, TaskLimits, TaskReference,
};

/// Which kind of reference a generator emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Joint { dof: usize },
    Task,
}

impl Space {
    /// Dimension references are validated against.
    pub fn dimension(&self) -> usize {
        match self {
            Space::Joint { dof } => *dof,
            Space::Task => 6,
        }
    }

    /// Output channels: position+velocity per joint, or pose, twist and wrench.
    pub fn layout(&self, name: &str) -> Vec<String> {
        match self {
            Space::Joint { dof } => {
                let mut names = layout::joint_channels(name, "position", *dof);
                names.extend(layout::joint_channels(name, "velocity", *dof));
                names
            }
            Space::Task => {
                let mut names = layout::pose_channels(name);
                names.extend(layout::twist_channels(name));
                names.extend(layout::wrench_channels(name));
                names
            }
        }
    }
}

/// Writes `reference` in the layout of [`Space::layout`].
pub fn encode_reference(reference: &Reference, out: &mut [f64]) {
    match reference {
        Reference::Joint(j) => {
            let n = j.positions.len();
            out[..n].copy_from_slice(j.positions.as_slice());
            match &j.velocities {
                Some(v) => out[n..2 * n].copy_from_slice(v.as_slice()),
                None => out[n..2 * n].fill(0.0),
            }
        }
        Reference::Task(t) => {
            out[..7].copy_from_slice(&t.pose.to_array());
            out[7..13].copy_from_slice(t.twist_or_zero().to_vector().as_slice());
            out[13..19].copy_from_slice(t.wrench_or_zero().to_vector().as_slice());
        }
    }
}

/// Front of every pipeline: drains the mailbox, runs the FSM and emits one
/// reference sample per cycle.
pub struct ReferenceGenerator {
    space: Space,
    dt: f64,
    layout: Vec<String>,
    endpoint: ControlEndpoint,
    state: GeneratorState,
    active_goal: Option<GoalLink>,
    last_arrival: u64,
}

impl std::fmt::Debug for ReferenceGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReferenceGenerator")
            .field("space", &self.space)
            .field("mode", &self.mode())
            .finish()
    }
}

fn placeholder() -> GeneratorState {
    GeneratorState::holding(Reference::Joint(JointReference::new(DVector::zeros(0))))
}

fn joint_limits(p: &Params<'_>, dof: usize) -> Result<Limits> {
    let position_min = p.vector_or("position_min", dof, -2.0 * std::f64::consts::PI)?;
    let position_max = p.vector_or("position_max", dof, 2.0 * std::f64::consts::PI)?;
    let velocity_max = p.vector_or("velocity_max", dof, 10.0)?;
    p.check("velocity_max", &velocity_max, "> 0", |v| v > 0.0)?;
    if let Some(i) = (0..dof).find(|&i| position_min[i] > position_max[i]) {
        return Err(p.error("position_min", format!("position_min exceeds position_max at joint {i}")));
    }
    Ok(Limits::Joint(JointLimits {
        position_min,
        position_max,
        velocity_max,
    }))
}

fn task_limits(p: &Params<'_>) -> Result<Limits> {
    let lo = p.vector_or("workspace_min", 3, -2.0)?;
    let hi = p.vector_or("workspace_max", 3, 2.0)?;
    let speed = p.scalar_or("linear_speed_max", 1.0)?;
    if !(speed > 0.0) {
        return Err(p.error("linear_speed_max", "linear_speed_max must be > 0"));
    }
    if let Some(i) = (0..3).find(|&i| lo[i] > hi[i]) {
        return Err(p.error("workspace_min", format!("workspace_min exceeds workspace_max on axis {i}")));
    }
    Ok(Limits::Task(TaskLimits {
        workspace_min: Vector3::new(lo[0], lo[1], lo[2]),
        workspace_max: Vector3::new(hi[0], hi[1], hi[2]),
        linear_speed_max: speed,
    }))
}

impl ReferenceGenerator {
    /// Builds a `jrg` or `trg` generator and the inbox publishers use to reach it.
    pub fn from_descriptor(
        descriptor: &ComponentDescriptor,
        plant: PlantInfo,
        dt: f64,
    ) -> Result<(Self, ReferenceInbox)> {
        let p = Params::new(descriptor);
        let (space, limits) = match descriptor.kind.as_str() {
            "jrg" => (Space::Joint { dof: plant.dof }, joint_limits(&p, plant.dof)?),
            "trg" => (Space::Task, task_limits(&p)?),
            other => {
                return Err(Error::config(&descriptor.name, "type", format!("`{other}` is not a reference generator")))
            }
        };
        p.finish()?;
        let (inbox, endpoint) = mailbox(limits, space.dimension());
        let generator = Self {
            space,
            dt,
            layout: space.layout(&descriptor.name),
            endpoint,
            state: placeholder(),
            active_goal: None,
            last_arrival: 0,
        };
        Ok((generator, inbox))
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn mode(&self) -> Mode {
        self.state.mode()
    }

    pub fn state(&self) -> &GeneratorState {
        &self.state
    }

    fn transition(&mut self, event: FsmEvent, incoming: Option<GoalLink>) {
        let state = std::mem::replace(&mut self.state, placeholder());
        let (next, resolution) = fsm_transition(state, event);
        self.state = next;
        if let Some((id, code)) = resolution {
            if let Some(link) = self.active_goal.take() {
                debug_assert_eq!(link.id(), id);
                let _ = link.resolve(code);
            }
        }
        if let Some(link) = incoming {
            link.start();
            self.active_goal = Some(link);
        }
    }

    fn apply_pending(&mut self, cycle: u64) {
        for event in self.endpoint.drain().into_ordered() {
            let arrival = event.arrival();
            // events are applied in arrival order; one that lost a race with
            // an already-applied newer event is superseded by it
            let stale = arrival < self.last_arrival;
            self.last_arrival = self.last_arrival.max(arrival);
            match event {
                InboxEvent::Topic(envelope) => {
                    if !stale {
                        self.transition(FsmEvent::TopicReference(envelope.reference), None);
                    }
                }
                InboxEvent::Goal(goal) => {
                    let goal = *goal;
                    if stale {
                        let _ = goal.link.resolve(ResultCode::AbortedByOnlineReference);
                    } else {
                        self.transition(
                            FsmEvent::NewTrajectory {
                                trajectory: goal.trajectory,
                                start_cycle: cycle,
                            },
                            Some(goal.link),
                        );
                    }
                }
            }
        }
    }
}

impl ChainableComponent for ReferenceGenerator {
    fn input_layout(&self) -> &[String] {
        &[]
    }

    fn output_layout(&self) -> &[String] {
        &self.layout
    }

    fn on_activate(&mut self, robot: &RobotSnapshot) {
        let hold = match self.space {
            Space::Joint { .. } => Reference::Joint(JointReference::new(robot.joints.positions.clone())),
            Space::Task => Reference::Task(TaskReference::new(robot.pose)),
        };
        self.state = GeneratorState::holding(hold);
    }

    fn on_deactivate(&mut self) {
        self.transition(FsmEvent::Deactivate, None);
        let pending = self.endpoint.drain();
        if let Some(goal) = pending.goal {
            let _ = goal.link.resolve(ResultCode::AbortedByDeactivation);
        }
    }

    fn update(&mut self, cx: &CycleContext<'_>, _input: &[f64], output: &mut [f64]) -> Result<()> {
        self.apply_pending(cx.cycle);
        let finished = match &self.state.active {
            None => {
                encode_reference(&self.state.held, output);
                false
            }
            Some(active) => {
                let elapsed = cx.cycle.saturating_sub(active.start_cycle) as f64 * self.dt;
                let sample = interpolate(&active.trajectory, elapsed)?;
                encode_reference(&sample.reference, output);
                let duration = active.trajectory.duration();
                let fraction = if duration > 0.0 { elapsed / duration } else { 1.0 };
                if let Some(link) = &self.active_goal {
                    link.update_feedback(fraction.min(1.0), output);
                }
                sample.finished
            }
        };
        if finished {
            self.transition(FsmEvent::TrajectoryFinished, None);
        }
        Ok(())
    }
}
