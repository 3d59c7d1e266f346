//! Named reference ports, component lifecycle and the pipeline executor.

mod component;
mod descriptor;
pub mod layout;
mod pipeline;
mod port;

pub use component::{ChainableComponent, Component, CycleContext, LifecycleState, PlantInfo, RobotSnapshot};
pub use descriptor::{ComponentDescriptor, ComponentKind, ParamValue, Params, CONTROLLER_TYPES, GENERATOR_TYPES};
pub use pipeline::Pipeline;
pub use port::ReferencePort;
