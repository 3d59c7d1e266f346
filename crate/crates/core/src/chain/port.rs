use std::collections::HashSet;

use crate::error::{Error, Result};

/// Named scalar channels written by exactly one component per cycle.
///
/// Writers fill a staging buffer; `commit` publishes it only if every value
/// is finite, so the visible values are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePort {
    names: Vec<String>,
    values: Vec<f64>,
    staging: Vec<f64>,
    generation: u64,
}

impl ReferencePort {
    pub fn new(names: Vec<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::InvalidInput(format!("duplicate channel `{dup}`")));
        }
        let n = names.len();
        Ok(Self {
            names,
            values: vec![0.0; n],
            staging: vec![0.0; n],
            generation: 0,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|i| self.values[i])
    }

    /// Buffer for the next write, pre-filled with the current values.
    pub fn stage(&mut self) -> &mut [f64] {
        self.staging.copy_from_slice(&self.values);
        &mut self.staging
    }

    /// Publishes the staged values. On a non-finite entry nothing changes
    /// and the offending channel name is returned.
    pub fn commit(&mut self) -> std::result::Result<(), &str> {
        if let Some(i) = self.staging.iter().position(|v| !v.is_finite()) {
            return Err(&self.names[i]);
        }
        std::mem::swap(&mut self.values, &mut self.staging);
        self.generation += 1;
        Ok(())
    }
}
