//! Handoff between non-real-time publishers and the control thread.
//!
//! Publishers validate on their own thread and hand boxed, already-valid
//! payloads to the control thread through single-slot cells. Each cell is an
//! atomic pointer: writers swap a new box in, the control thread swaps it out
//! (replacing it with null). Neither side ever waits on the other, and a
//! reader always receives a whole value.

mod goal;
mod mailbox;
mod slot;

pub use goal::{new_goal, Feedback, GoalHandle, GoalLink, GoalStatus};
pub use mailbox::{mailbox, ControlEndpoint, Drained, Envelope, InboxEvent, PendingGoal, ReferenceInbox};
pub use slot::HandoffSlot;
