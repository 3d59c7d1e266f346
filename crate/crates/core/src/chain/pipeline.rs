use std::collections::HashSet;

use crate::controllers::build_controller;
use crate::error::{Error, Result};
use crate::plant::{CommandInterface, Plant};
use crate::refgen::ReferenceGenerator;
use crate::transport::ReferenceInbox;

use super::component::{Component, CycleContext, LifecycleState, PlantInfo, RobotSnapshot};
use super::descriptor::{ComponentDescriptor, ComponentKind};
use super::layout;
use super::port::ReferencePort;

/// Relative tolerance when matching a step time against `cycle * period`.
const TIME_TOLERANCE: f64 = 1e-9;

/// One reference generator followed by one or more controllers, stepped at a
/// fixed period. Each component reads the previous component's port.
#[derive(Debug)]
pub struct Pipeline {
    period: f64,
    cycle: u64,
    plant: PlantInfo,
    components: Vec<Component>,
    ports: Vec<ReferencePort>,
    /// For component `i > 0`: indices into `ports[i - 1]`, in input order.
    wiring: Vec<Vec<usize>>,
    command_wiring: Vec<usize>,
    command_names: Vec<String>,
    input: Vec<f64>,
    command: Vec<f64>,
    inbox: ReferenceInbox,
    halted: Option<Error>,
}

fn pipeline_error(message: impl Into<String>) -> Error {
    Error::config("pipeline", "components", message)
}

fn wire(upstream: &str, downstream: &str, from: &[String], wanted: &[String]) -> Result<Vec<usize>> {
    wanted
        .iter()
        .map(|name| {
            from.iter().position(|n| n == name).ok_or_else(|| Error::Wiring {
                upstream: upstream.to_string(),
                downstream: downstream.to_string(),
                channel: name.clone(),
            })
        })
        .collect()
}

impl Pipeline {
    /// Configures every component and wires ports by channel name, ending
    /// at the plant's command channels.
    pub fn build(descriptors: &[ComponentDescriptor], plant: &dyn Plant, period: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::config("pipeline", "period", format!("period {period} must be > 0")));
        }
        let Some((first, rest)) = descriptors.split_first() else {
            return Err(pipeline_error("a pipeline needs a reference generator and at least one controller"));
        };
        if first.component_kind()? != ComponentKind::ReferenceGenerator {
            return Err(pipeline_error(format!("first component `{}` must be a reference generator", first.name)));
        }
        if rest.is_empty() {
            return Err(pipeline_error("a pipeline needs at least one controller"));
        }
        let mut names = HashSet::new();
        for d in descriptors {
            if d.name.is_empty() || d.name.contains('/') {
                return Err(Error::config(&d.name, "name", "component names must be non-empty and free of `/`"));
            }
            if !names.insert(d.name.as_str()) {
                return Err(pipeline_error(format!("duplicate component name `{}`", d.name)));
            }
        }

        let info = PlantInfo::of(plant);
        let (generator, inbox) = ReferenceGenerator::from_descriptor(first, info, period)?;
        let mut head = Component::new(&first.name);
        head.configure(Box::new(generator))?;
        let mut components = vec![head];
        for d in rest {
            if d.component_kind()? != ComponentKind::Controller {
                return Err(pipeline_error(format!("`{}` must be a controller; only the first component generates references", d.name)));
            }
            let upstream = components.last().map(|c| c.name().to_string()).unwrap_or_default();
            let mut c = Component::new(&d.name);
            c.configure(build_controller(d, &upstream, info)?)?;
            components.push(c);
        }

        let mut wiring = vec![Vec::new()];
        for pair in components.windows(2) {
            let (up, down) = (&pair[0], &pair[1]);
            wiring.push(wire(up.name(), down.name(), up.output_layout(), down.input_layout())?);
        }
        let last = components.last().expect("at least two components");
        let command_names = layout::joint_channels(last.name(), info.interface.quantity(), info.dof);
        let command_wiring = wire(last.name(), "plant", last.output_layout(), &command_names)?;

        let ports = components
            .iter()
            .map(|c| ReferencePort::new(c.output_layout().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            period,
            cycle: 0,
            plant: info,
            components,
            ports,
            wiring,
            command_wiring,
            command_names,
            input: Vec::new(),
            command: vec![0.0; info.dof],
            inbox,
            halted: None,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    /// Time the next step must be called with.
    pub fn next_time(&self) -> f64 {
        self.cycle as f64 * self.period
    }

    pub fn command_interface(&self) -> CommandInterface {
        self.plant.interface
    }

    /// Handle for publishing references and submitting trajectories.
    pub fn inbox(&self) -> ReferenceInbox {
        self.inbox.clone()
    }

    pub fn component_names(&self) -> Vec<&str> {
        self.components.iter().map(|c| c.name()).collect()
    }

    pub fn component_state(&self, index: usize) -> Option<LifecycleState> {
        self.components.get(index).map(|c| c.state())
    }

    /// Output ports in pipeline order; `ports()[0]` belongs to the generator.
    pub fn ports(&self) -> &[ReferencePort] {
        &self.ports
    }

    pub fn port(&self, component: &str) -> Option<&ReferencePort> {
        self.components.iter().position(|c| c.name() == component).map(|i| &self.ports[i])
    }

    pub fn command_names(&self) -> &[String] {
        &self.command_names
    }

    /// Last command produced.
    pub fn command(&self) -> &[f64] {
        &self.command
    }

    pub fn halted(&self) -> Option<&Error> {
        self.halted.as_ref()
    }

    /// Activates all components from the plant's current state.
    pub fn activate(&mut self, plant: &dyn Plant) -> Result<()> {
        let robot = RobotSnapshot::capture(plant);
        for c in &mut self.components {
            c.activate(&robot)?;
        }
        Ok(())
    }

    pub fn deactivate(&mut self) -> Result<()> {
        for c in &mut self.components {
            c.deactivate()?;
        }
        Ok(())
    }

    fn fault(&mut self, component: &str, reason: String) -> Error {
        let err = Error::FaultStop {
            cycle: self.cycle,
            component: component.to_string(),
            reason,
        };
        self.halted = Some(err.clone());
        err
    }

    /// Runs one cycle at time `t` and returns the plant command.
    pub fn step(&mut self, t: f64, plant: &dyn Plant) -> Result<&[f64]> {
        if let Some(err) = &self.halted {
            return Err(err.clone());
        }
        if let Some(c) = self.components.iter().find(|c| c.state() != LifecycleState::Active) {
            return Err(Error::Lifecycle {
                component: c.name().to_string(),
                action: "step",
                state: c.state().as_str(),
            });
        }
        let expected = self.next_time();
        if !((t - expected).abs() <= TIME_TOLERANCE * expected.abs().max(1.0)) {
            return Err(Error::CycleOrder { expected, got: t });
        }
        let robot = RobotSnapshot::capture(plant);
        let cx = CycleContext {
            cycle: self.cycle,
            time: t,
            dt: self.period,
            robot: &robot,
        };
        for i in 0..self.components.len() {
            self.input.clear();
            if i > 0 {
                let upstream = self.ports[i - 1].values();
                self.input.extend(self.wiring[i].iter().map(|&k| upstream[k]));
            }
            let component = &mut self.components[i];
            let staged = self.ports[i].stage();
            if let Err(err) = component.update(&cx, &self.input, staged) {
                let name = component.name().to_string();
                return Err(match err {
                    Error::FaultStop { .. } => {
                        self.halted = Some(err.clone());
                        err
                    }
                    other => self.fault(&name, other.to_string()),
                });
            }
            if let Err(channel) = self.ports[i].commit() {
                let reason = format!("non-finite value on `{channel}`");
                let name = self.components[i].name().to_string();
                return Err(self.fault(&name, reason));
            }
        }
        let last = self.ports.last().expect("pipeline has ports").values();
        for (slot, &k) in self.command.iter_mut().zip(&self.command_wiring) {
            *slot = last[k];
        }
        self.cycle += 1;
        Ok(&self.command)
    }
}
