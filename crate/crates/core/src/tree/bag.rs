use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::numeric::{expand_numeric, minwidth};
use crate::policy::{is_atom_name, is_identifier};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BagError {
    #[error("`{0}` is not a valid attribute")]
    InvalidAttribute(String),
    #[error("numeric attribute `{0}` is already assigned a different value")]
    Conflict(String),
}

/// Set of canonical attribute strings held by a key (CP) or attached to a
/// ciphertext (KP).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AttributeBag {
    attrs: BTreeSet<String>,
    numeric: BTreeMap<String, (u64, u32)>,
}

impl AttributeBag {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses a comma separated list such as `Doctor, Age=42, Dev_role=Role_1`.
    /// `name=<digits>` is a numeric assignment, anything else an atom.
    pub fn parse(list: &str) -> Result<Self, BagError> {
        let mut bag = Self::new();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.split_once('=') {
                Some((name, value)) if !value.is_empty() && value.trim().bytes().all(|b| b.is_ascii_digit()) => {
                    let v = value
                        .trim()
                        .parse::<u64>()
                        .map_err(|_| BagError::InvalidAttribute(item.to_string()))?;
                    bag.insert_numeric(name.trim(), v)?;
                }
                Some((name, value)) => bag.insert(format!("{}={}", name.trim(), value.trim()))?,
                None => bag.insert(item)?,
            }
        }
        Ok(bag)
    }

    /// Wraps already-canonical strings (as found in a KP ciphertext) without
    /// re-validating them.
    pub fn from_canonical<I, S>(attrs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self { attrs: attrs.into_iter().map(Into::into).collect(), numeric: BTreeMap::new() }
    }

    pub fn insert(&mut self, attr: impl Into<String>) -> Result<(), BagError> {
        let attr = attr.into();
        if !is_atom_name(&attr) {
            return Err(BagError::InvalidAttribute(attr));
        }
        self.attrs.insert(attr);
        Ok(())
    }

    pub fn insert_numeric(&mut self, name: &str, value: u64) -> Result<(), BagError> {
        if !is_identifier(name) {
            return Err(BagError::InvalidAttribute(name.to_string()));
        }
        match self.numeric.get(name) {
            Some(&(v, _)) if v == value => return Ok(()),
            Some(_) => return Err(BagError::Conflict(name.to_string())),
            None => {}
        }
        self.numeric.insert(name.to_string(), (value, minwidth(value)));
        self.attrs.extend(expand_numeric(name, value));
        Ok(())
    }

    pub fn contains(&self, attr: &str) -> bool {
        self.attrs.contains(attr)
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.attrs.iter().map(String::as_str)
    }

    pub fn attrs(&self) -> &BTreeSet<String> {
        &self.attrs
    }

    /// Numeric assignments as `name -> (value, width)`.
    pub fn numeric(&self) -> &BTreeMap<String, (u64, u32)> {
        &self.numeric
    }
}
