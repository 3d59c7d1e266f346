use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular matrix")]
    SingularMatrix,

    /// A component descriptor carried a missing, unknown or out-of-range parameter.
    #[error("config error in `{component}`: {message}")]
    Config {
        component: String,
        param: String,
        message: String,
    },

    /// A consumer's input channel is not provided by its producer.
    #[error("wiring error: `{downstream}` expects channel `{channel}` which `{upstream}` does not provide")]
    Wiring {
        upstream: String,
        downstream: String,
        channel: String,
    },

    /// The pipeline halted; no further cycles run.
    #[error("fault stop at cycle {cycle} in `{component}`: {reason}")]
    FaultStop {
        cycle: u64,
        component: String,
        reason: String,
    },

    #[error("cycle order violated: expected t = {expected}, got t = {got}")]
    CycleOrder { expected: f64, got: f64 },

    #[error("lifecycle error in `{component}`: cannot {action} while {state}")]
    Lifecycle {
        component: String,
        action: &'static str,
        state: &'static str,
    },

    #[error("protocol error: {0}")]
    Protocol(String),
}

impl Error {
    pub(crate) fn config(component: &str, param: &str, message: impl Into<String>) -> Self {
        Error::Config {
            component: component.to_string(),
            param: param.to_string(),
            message: message.into(),
        }
    }
}
