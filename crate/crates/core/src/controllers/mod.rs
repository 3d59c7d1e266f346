//! Chainable control laws. Each reads a single-point reference from its
//! upstream port and writes either a downstream reference or a plant command.

mod admittance;
mod cpc;
mod pdgc;
mod pid;

pub use admittance::{admittance_update, Admittance, AdmittanceParams, AdmittanceState};
pub use cpc::{cpc_update, Cpc, CpcParams};
pub use pdgc::{pdgc_update, Pdgc, PdgcParams};
pub use pid::{pid_update, Pid, PidParams, PidState};

use crate::chain::{ChainableComponent, ComponentDescriptor, PlantInfo};
use crate::error::{Error, Result};

/// Builds the controller named by `descriptor.kind`, reading from the
/// component called `upstream`.
pub fn build_controller(
    descriptor: &ComponentDescriptor,
    upstream: &str,
    plant: PlantInfo,
) -> Result<Box<dyn ChainableComponent>> {
    let dof = plant.dof;
    Ok(match descriptor.kind.as_str() {
        "pdgc" => Box::new(Pdgc::from_descriptor(descriptor, upstream, dof)?),
        "pid" => Box::new(Pid::from_descriptor(descriptor, upstream, dof)?),
        "admittance" => Box::new(Admittance::from_descriptor(descriptor, upstream)?),
        "cpc" => Box::new(Cpc::from_descriptor(descriptor, upstream, dof)?),
        other => {
            return Err(Error::config(&descriptor.name, "type", format!("unknown controller type `{other}`")))
        }
    })
}
