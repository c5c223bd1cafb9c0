use std::fmt;

use abekit_core::abe::AbeError;
use abekit_core::container::ContainerError;

/// Error class printed as `error[Class]: message`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Usage,
    Io,
    Policy,
    Key,
    PolicyNotSatisfied,
    AuthenticationFailure,
    UnknownAttribute,
    Network,
}

impl Class {
    fn name(self) -> &'static str {
        match self {
            Class::Usage => "Usage",
            Class::Io => "Io",
            Class::Policy => "Policy",
            Class::Key => "Key",
            Class::PolicyNotSatisfied => "PolicyNotSatisfied",
            Class::AuthenticationFailure => "AuthenticationFailure",
            Class::UnknownAttribute => "UnknownAttribute",
            Class::Network => "Network",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub class: Class,
    pub msg: String,
}

impl CliError {
    pub fn new(class: Class, msg: impl Into<String>) -> Self {
        CliError { class, msg: msg.into() }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Self::new(Class::Usage, msg)
    }

    pub fn exit_code(&self) -> u8 {
        if self.class == Class::Usage {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // keep it on one line whatever the source error looked like
        let msg = self.msg.replace('\n', " ");
        write!(f, "error[{}]: {}", self.class.name(), msg.trim())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn io_err(what: impl fmt::Display, e: std::io::Error) -> CliError {
    CliError::new(Class::Io, format!("{what}: {e}"))
}

impl From<AbeError> for CliError {
    fn from(e: AbeError) -> Self {
        let class = match e {
            AbeError::PolicyNotSatisfied => Class::PolicyNotSatisfied,
            AbeError::UnsatisfiablePolicy => Class::Policy,
            AbeError::UnknownAttribute(_) => Class::UnknownAttribute,
            _ => Class::Key,
        };
        CliError::new(class, e.to_string())
    }
}

impl From<ContainerError> for CliError {
    fn from(e: ContainerError) -> Self {
        match e {
            ContainerError::PolicyNotSatisfied => CliError::new(Class::PolicyNotSatisfied, e.to_string()),
            ContainerError::AuthenticationFailure => CliError::new(Class::AuthenticationFailure, e.to_string()),
            ContainerError::UnsatisfiablePolicy | ContainerError::Policy(_) => {
                CliError::new(Class::Policy, e.to_string())
            }
            ContainerError::Abe(a) => a.into(),
        }
    }
}
