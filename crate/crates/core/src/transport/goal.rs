use std::sync::atomic::{AtomicU32, AtomicU8, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::refgen::{ResultCode, TrajectoryId};

use super::slot::HandoffSlot;

const PENDING: u8 = 0;
const EXECUTING: u8 = 1;
const TERMINAL_BASE: u8 = 2;

fn encode(code: ResultCode) -> u8 {
    let index = ResultCode::ALL.iter().position(|c| *c == code).unwrap_or(0);
    TERMINAL_BASE + index as u8
}

fn decode(raw: u8) -> GoalStatus {
    match raw {
        PENDING => GoalStatus::Pending,
        EXECUTING => GoalStatus::Executing,
        n => GoalStatus::Finished(ResultCode::ALL[(n - TERMINAL_BASE) as usize]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoalStatus {
    Pending,
    Executing,
    Finished(ResultCode),
}

impl GoalStatus {
    pub fn is_terminal(&self) -> bool {
        matches!(self, GoalStatus::Finished(_))
    }
}

/// Progress report for an executing trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Feedback {
    /// Fraction of trajectory time elapsed, in [0, 1].
    pub fraction: f64,
    /// Last sample written to the generator's port.
    pub sample: Vec<f64>,
}

#[derive(Debug)]
struct GoalShared {
    id: TrajectoryId,
    status: AtomicU8,
    resolve_calls: AtomicU32,
    feedback: HandoffSlot<Feedback>,
}

impl GoalShared {
    fn status(&self) -> GoalStatus {
        decode(self.status.load(Ordering::Acquire))
    }

    fn resolve(&self, code: ResultCode) -> Result<()> {
        self.resolve_calls.fetch_add(1, Ordering::Relaxed);
        let target = encode(code);
        let mut current = self.status.load(Ordering::Acquire);
        // the status can only move forward, so this loops at most three times
        loop {
            if current >= TERMINAL_BASE {
                return Err(Error::Protocol(format!(
                    "goal {} already resolved as {}, cannot resolve as {}",
                    self.id,
                    ResultCode::ALL[(current - TERMINAL_BASE) as usize],
                    code
                )));
            }
            match self
                .status
                .compare_exchange(current, target, Ordering::AcqRel, Ordering::Acquire)
            {
                Ok(_) => return Ok(()),
                Err(actual) => current = actual,
            }
        }
    }
}

/// Submitter-side view of an accepted trajectory.
#[derive(Debug)]
pub struct GoalHandle {
    shared: Arc<GoalShared>,
    latest: Option<Box<Feedback>>,
}

impl GoalHandle {
    pub fn id(&self) -> TrajectoryId {
        self.shared.id
    }

    pub fn status(&self) -> GoalStatus {
        self.shared.status()
    }

    pub fn result(&self) -> Option<ResultCode> {
        match self.status() {
            GoalStatus::Finished(code) => Some(code),
            _ => None,
        }
    }

    /// How many times anything tried to resolve this goal, successful or not.
    pub fn resolve_calls(&self) -> u32 {
        self.shared.resolve_calls.load(Ordering::Relaxed)
    }

    /// Newest feedback published by the control thread, if any so far.
    pub fn feedback(&mut self) -> Option<&Feedback> {
        if let Some(fresh) = self.shared.feedback.take() {
            self.latest = Some(fresh);
        }
        self.latest.as_deref()
    }
}

/// Control-side link to a goal: marks it executing, publishes feedback and
/// resolves it.
#[derive(Debug)]
pub struct GoalLink {
    shared: Arc<GoalShared>,
}

impl GoalLink {
    pub fn id(&self) -> TrajectoryId {
        self.shared.id
    }

    pub fn status(&self) -> GoalStatus {
        self.shared.status()
    }

    /// PENDING -> EXECUTING. Returns false if the goal was not pending.
    pub fn start(&self) -> bool {
        self.shared
            .status
            .compare_exchange(PENDING, EXECUTING, Ordering::AcqRel, Ordering::Acquire)
            .is_ok()
    }

    pub fn update_feedback(&self, fraction: f64, sample: &[f64]) {
        self.shared.feedback.put(Box::new(Feedback {
            fraction: fraction.clamp(0.0, 1.0),
            sample: sample.to_vec(),
        }));
    }

    /// Moves the goal to a terminal code. Fails if it is already terminal.
    pub fn resolve(&self, code: ResultCode) -> Result<()> {
        self.shared.resolve(code)
    }
}

pub fn new_goal(id: TrajectoryId) -> (GoalHandle, GoalLink) {
    let shared = Arc::new(GoalShared {
        id,
        status: AtomicU8::new(PENDING),
        resolve_calls: AtomicU32::new(0),
        feedback: HandoffSlot::new(),
    });
    (
        GoalHandle {
            shared: shared.clone(),
            latest: None,
        },
        GoalLink { shared },
    )
}
