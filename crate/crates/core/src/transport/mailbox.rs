use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use crate::refgen::{validate_reference, validate_trajectory, Limits, Reference, ResultCode, Trajectory};

use super::goal::{new_goal, GoalHandle, GoalLink};
use super::slot::HandoffSlot;

/// A validated topic reference as seen by the control thread.
#[derive(Debug)]
pub struct Envelope {
    /// Position in the arrival order shared by topics and trajectories.
    pub arrival: u64,
    pub sequence: u64,
    pub reference: Reference,
}

/// A validated trajectory waiting for the control thread.
#[derive(Debug)]
pub struct PendingGoal {
    pub arrival: u64,
    pub trajectory: Trajectory,
    pub link: GoalLink,
}

#[derive(Debug)]
pub enum InboxEvent {
    Topic(Box<Envelope>),
    Goal(Box<PendingGoal>),
}

impl InboxEvent {
    pub fn arrival(&self) -> u64 {
        match self {
            InboxEvent::Topic(e) => e.arrival,
            InboxEvent::Goal(g) => g.arrival,
        }
    }
}

/// Everything that was pending at one drain: at most one topic value and at
/// most one goal.
#[derive(Debug, Default)]
pub struct Drained {
    pub topic: Option<Box<Envelope>>,
    pub goal: Option<Box<PendingGoal>>,
}

impl Drained {
    pub fn is_empty(&self) -> bool {
        self.topic.is_none() && self.goal.is_none()
    }

    /// The pending events, oldest arrival first.
    pub fn into_ordered(self) -> impl Iterator<Item = InboxEvent> {
        let mut events = [self.topic.map(InboxEvent::Topic), self.goal.map(InboxEvent::Goal)];
        if let [Some(a), Some(b)] = &events {
            if b.arrival() < a.arrival() {
                events.swap(0, 1);
            }
        }
        events.into_iter().flatten()
    }
}

#[derive(Debug, Default)]
struct Counters {
    arrival: u64,
    topic_sequence: u64,
}

#[derive(Debug)]
struct Shared {
    limits: Limits,
    dim: usize,
    topic: HandoffSlot<Envelope>,
    goal: HandoffSlot<PendingGoal>,
    writers: Mutex<Counters>,
    published: AtomicU64,
}

/// Publisher/submitter side. Cheap to clone; validation runs on the calling
/// thread and writers are serialized among themselves by a mutex that the
/// control thread never touches.
#[derive(Debug, Clone)]
pub struct ReferenceInbox {
    shared: Arc<Shared>,
}

/// Control-thread side. Draining is two atomic swaps.
#[derive(Debug)]
pub struct ControlEndpoint {
    shared: Arc<Shared>,
}

pub fn mailbox(limits: Limits, expected_dim: usize) -> (ReferenceInbox, ControlEndpoint) {
    let shared = Arc::new(Shared {
        limits,
        dim: expected_dim,
        topic: HandoffSlot::new(),
        goal: HandoffSlot::new(),
        writers: Mutex::new(Counters::default()),
        published: AtomicU64::new(0),
    });
    (ReferenceInbox { shared: shared.clone() }, ControlEndpoint { shared })
}

impl ReferenceInbox {
    pub fn limits(&self) -> &Limits {
        &self.shared.limits
    }

    pub fn expected_dim(&self) -> usize {
        self.shared.dim
    }

    /// Number of accepted topic publications so far.
    pub fn topic_sequence(&self) -> u64 {
        self.shared.published.load(Ordering::Acquire)
    }

    /// Validates and stores a reference, replacing any value not yet picked
    /// up. Returns the new topic sequence number.
    pub fn publish_reference(&self, reference: Reference) -> Result<u64, ResultCode> {
        validate_reference(&reference, &self.shared.limits, self.shared.dim)?;
        let mut counters = self.lock();
        counters.arrival += 1;
        counters.topic_sequence += 1;
        let sequence = counters.topic_sequence;
        self.shared.topic.put(Box::new(Envelope {
            arrival: counters.arrival,
            sequence,
            reference,
        }));
        self.shared.published.store(sequence, Ordering::Release);
        Ok(sequence)
    }

    /// Validates and enqueues a trajectory. A goal that was still waiting
    /// for pickup is resolved as preempted by this one.
    pub fn submit_trajectory(&self, trajectory: Trajectory) -> Result<GoalHandle, ResultCode> {
        validate_trajectory(&trajectory, &self.shared.limits, self.shared.dim)?;
        let (handle, link) = new_goal(trajectory.id);
        let mut counters = self.lock();
        counters.arrival += 1;
        let displaced = self.shared.goal.put(Box::new(PendingGoal {
            arrival: counters.arrival,
            trajectory,
            link,
        }));
        drop(counters);
        if let Some(old) = displaced {
            // never seen by the control thread, so this cannot be its second resolution
            let _ = old.link.resolve(ResultCode::AbortedByNewTrajectory);
        }
        Ok(handle)
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Counters> {
        self.shared.writers.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
    }
}

impl ControlEndpoint {
    pub fn drain(&self) -> Drained {
        Drained {
            topic: self.shared.topic.take(),
            goal: self.shared.goal.take(),
        }
    }
}
