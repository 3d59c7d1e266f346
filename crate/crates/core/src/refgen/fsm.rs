use super::reference::{Reference, ResultCode, Trajectory, TrajectoryId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    OnlineReference,
    TrajectoryExecution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActiveTrajectory {
    pub trajectory: Trajectory,
    pub start_cycle: u64,
}

/// The mode is derived from whether a trajectory is active, so the two can
/// never disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorState {
    pub held: Reference,
    pub active: Option<ActiveTrajectory>,
}

impl GeneratorState {
    pub fn holding(held: Reference) -> Self {
        Self { held, active: None }
    }

    pub fn mode(&self) -> Mode {
        if self.active.is_some() {
            Mode::TrajectoryExecution
        } else {
            Mode::OnlineReference
        }
    }
}

/// Pre-validated input to the generator state machine.
#[derive(Debug, Clone, PartialEq)]
pub enum FsmEvent {
    TopicReference(Reference),
    NewTrajectory { trajectory: Trajectory, start_cycle: u64 },
    TrajectoryFinished,
    Deactivate,
}

pub type Resolution = (TrajectoryId, ResultCode);

/// Total transition function. Emits at most one resolution.
pub fn fsm_transition(state: GeneratorState, event: FsmEvent) -> (GeneratorState, Option<Resolution>) {
    let GeneratorState { held, active } = state;
    let active_id = active.as_ref().map(|a| a.trajectory.id);
    match event {
        FsmEvent::TopicReference(reference) => (
            GeneratorState::holding(reference),
            active_id.map(|id| (id, ResultCode::AbortedByOnlineReference)),
        ),
        FsmEvent::NewTrajectory { trajectory, start_cycle } => (
            GeneratorState {
                held,
                active: Some(ActiveTrajectory { trajectory, start_cycle }),
            },
            active_id.map(|id| (id, ResultCode::AbortedByNewTrajectory)),
        ),
        FsmEvent::TrajectoryFinished => match active {
            Some(a) => {
                let id = a.trajectory.id;
                let held = a
                    .trajectory
                    .waypoints
                    .last()
                    .map_or(held, |w| w.reference.at_rest());
                (GeneratorState::holding(held), Some((id, ResultCode::Succeeded)))
            }
            None => (GeneratorState::holding(held), None),
        },
        FsmEvent::Deactivate => (
            GeneratorState::holding(held),
            active_id.map(|id| (id, ResultCode::AbortedByDeactivation)),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refgen::reference::{JointReference, Waypoint};
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn joint(v: f64) -> Reference {
        Reference::Joint(JointReference::new(DVector::from_element(2, v)))
    }

    fn traj(id: TrajectoryId, last: f64) -> Trajectory {
        Trajectory::new(id, vec![Waypoint::new(0.0, JointReference::new(DVector::zeros(2))), Waypoint::new(1.0, JointReference::new(DVector::from_element(2, last)))])
    }

    fn executing(id: TrajectoryId) -> GeneratorState {
        GeneratorState {
            held: joint(0.0),
            active: Some(ActiveTrajectory { trajectory: traj(id, 1.0), start_cycle: 0 }),
        }
    }

    #[test]
    fn new_trajectory_preempts() {
        let (s, r) = fsm_transition(executing(7), FsmEvent::NewTrajectory { trajectory: traj(8, 2.0), start_cycle: 5 });
        assert_eq!(s.mode(), Mode::TrajectoryExecution);
        assert_eq!(s.active.unwrap().trajectory.id, 8);
        assert_eq!(r, Some((7, ResultCode::AbortedByNewTrajectory)));
    }

    #[test]
    fn topic_preempts() {
        let (s, r) = fsm_transition(executing(7), FsmEvent::TopicReference(joint(0.4)));
        assert_eq!(s.mode(), Mode::OnlineReference);
        assert_eq!(s.held, joint(0.4));
        assert_eq!(r, Some((7, ResultCode::AbortedByOnlineReference)));
    }

    #[test]
    fn topic_while_online_emits_nothing() {
        let (s, r) = fsm_transition(GeneratorState::holding(joint(0.0)), FsmEvent::TopicReference(joint(0.2)));
        assert_eq!(s.held, joint(0.2));
        assert_eq!(r, None);
    }

    #[test]
    fn finish_holds_final_waypoint() {
        let (s, r) = fsm_transition(executing(3), FsmEvent::TrajectoryFinished);
        assert_eq!(s.mode(), Mode::OnlineReference);
        assert_eq!(s.held, joint(1.0));
        assert_eq!(r, Some((3, ResultCode::Succeeded)));
    }

    #[test]
    fn deactivate() {
        let (s, r) = fsm_transition(executing(3), FsmEvent::Deactivate);
        assert_eq!(s.mode(), Mode::OnlineReference);
        assert_eq!(r, Some((3, ResultCode::AbortedByDeactivation)));
        let (_, r) = fsm_transition(s, FsmEvent::Deactivate);
        assert_eq!(r, None);
    }

    fn event() -> impl Strategy<Value = FsmEvent> {
        prop_oneof![
            (-1.0..1.0f64).prop_map(|v| FsmEvent::TopicReference(joint(v))),
            (0u64..1000).prop_map(|c| FsmEvent::NewTrajectory { trajectory: traj(0, 0.5), start_cycle: c }),
            Just(FsmEvent::TrajectoryFinished),
            Just(FsmEvent::Deactivate),
        ]
    }

    proptest! {
        // Every accepted trajectory id is resolved exactly once, apart from
        // the one still active at the end of the sequence.
        #[test]
        fn each_id_resolved_once(events in prop::collection::vec(event(), 0..60)) {
            let mut state = GeneratorState::holding(joint(0.0));
            let mut resolved = std::collections::BTreeMap::<TrajectoryId, u32>::new();
            let mut next_id = 0;
            let mut accepted = Vec::new();
            for e in events {
                let e = match e {
                    FsmEvent::NewTrajectory { mut trajectory, start_cycle } => {
                        next_id += 1;
                        trajectory.id = next_id;
                        accepted.push(next_id);
                        FsmEvent::NewTrajectory { trajectory, start_cycle }
                    }
                    other => other,
                };
                let (s, r) = fsm_transition(state, e);
                if let Some((id, _)) = r {
                    *resolved.entry(id).or_default() += 1;
                }
                state = s;
            }
            let still_active = state.active.as_ref().map(|a| a.trajectory.id);
            for id in accepted {
                let count = resolved.get(&id).copied().unwrap_or(0);
                if Some(id) == still_active {
                    prop_assert_eq!(count, 0);
                } else {
                    prop_assert_eq!(count, 1);
                }
            }
        }
    }
}
