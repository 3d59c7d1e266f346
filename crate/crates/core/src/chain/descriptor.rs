use std::cell::RefCell;
use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    ReferenceGenerator,
    Controller,
}

/// Component types known to the pipeline builder.
pub const GENERATOR_TYPES: [&str; 2] = ["jrg", "trg"];
pub const CONTROLLER_TYPES: [&str; 4] = ["pdgc", "pid", "admittance", "cpc"];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDescriptor {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
}

impl ComponentDescriptor {
    pub fn new(name: &str, kind: &str) -> Self {
        Self {
            name: name.to_string(),
            kind: kind.to_string(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: ParamValue) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_scalar(self, key: &str, value: f64) -> Self {
        self.with(key, ParamValue::Scalar(value))
    }

    pub fn with_vector(self, key: &str, value: &[f64]) -> Self {
        self.with(key, ParamValue::Vector(value.to_vec()))
    }

    pub fn component_kind(&self) -> Result<ComponentKind> {
        if GENERATOR_TYPES.contains(&self.kind.as_str()) {
            Ok(ComponentKind::ReferenceGenerator)
        } else if CONTROLLER_TYPES.contains(&self.kind.as_str()) {
            Ok(ComponentKind::Controller)
        } else {
            Err(Error::config(&self.name, "type", format!("unknown component type `{}`", self.kind)))
        }
    }
}

/// Typed access to a descriptor's parameters. Every key must be read before
/// [`Params::finish`], which rejects anything left over.
pub struct Params<'a> {
    component: &'a str,
    map: &'a BTreeMap<String, ParamValue>,
    read: RefCell<Vec<&'a str>>,
}

impl<'a> Params<'a> {
    pub fn new(descriptor: &'a ComponentDescriptor) -> Self {
        Self {
            component: &descriptor.name,
            map: &descriptor.params,
            read: RefCell::new(Vec::new()),
        }
    }

    pub fn error(&self, key: &str, message: impl Into<String>) -> Error {
        Error::config(self.component, key, message)
    }

    fn lookup(&self, key: &'a str) -> Option<&'a ParamValue> {
        self.read.borrow_mut().push(key);
        self.map.get(key)
    }

    /// A vector of length `dim`; a scalar is broadcast.
    pub fn vector(&self, key: &'a str, dim: usize) -> Result<Option<DVector<f64>>> {
        let v = match self.lookup(key) {
            None => return Ok(None),
            Some(ParamValue::Scalar(s)) => DVector::from_element(dim, *s),
            Some(ParamValue::Vector(v)) => {
                if v.len() != dim {
                    return Err(self.error(key, format!("{key} length {} does not match dimension {dim}", v.len())));
                }
                DVector::from_column_slice(v)
            }
        };
        if v.iter().any(|x| !x.is_finite()) {
            return Err(self.error(key, format!("{key} must be finite")));
        }
        Ok(Some(v))
    }

    pub fn required_vector(&self, key: &'a str, dim: usize) -> Result<DVector<f64>> {
        self.vector(key, dim)?.ok_or_else(|| self.missing(key))
    }

    fn missing(&self, key: &str) -> Error {
        let read = self.read.borrow();
        let near = self
            .map
            .keys()
            .find(|k| !read.contains(&k.as_str()) && strsim::levenshtein(k, key) <= 2);
        match near {
            Some(k) => self.error(k, format!("missing parameter `{key}`; found unknown `{k}` instead")),
            None => self.error(key, format!("missing parameter `{key}`")),
        }
    }

    pub fn vector_or(&self, key: &'a str, dim: usize, default: f64) -> Result<DVector<f64>> {
        Ok(self.vector(key, dim)?.unwrap_or_else(|| DVector::from_element(dim, default)))
    }

    pub fn scalar(&self, key: &'a str) -> Result<Option<f64>> {
        match self.lookup(key) {
            None => Ok(None),
            Some(ParamValue::Scalar(s)) if s.is_finite() => Ok(Some(*s)),
            Some(ParamValue::Scalar(_)) => Err(self.error(key, format!("{key} must be finite"))),
            Some(ParamValue::Vector(_)) => Err(self.error(key, format!("{key} must be a scalar"))),
        }
    }

    pub fn scalar_or(&self, key: &'a str, default: f64) -> Result<f64> {
        Ok(self.scalar(key)?.unwrap_or(default))
    }

    /// Checks every entry of `v` against `ok`, reporting `"{key} must be {rule}"`.
    pub fn check(&self, key: &str, v: &DVector<f64>, rule: &str, ok: impl Fn(f64) -> bool) -> Result<()> {
        match v.iter().position(|x| !ok(*x)) {
            None => Ok(()),
            Some(i) => Err(self.error(key, format!("{key} must be {rule} (entry {i} is {})", v[i]))),
        }
    }

    pub fn finish(self) -> Result<()> {
        let read = self.read.borrow();
        match self.map.keys().find(|k| !read.contains(&k.as_str())) {
            None => Ok(()),
            Some(k) => Err(self.error(k, format!("unknown parameter `{k}`"))),
        }
    }
}
