use thiserror::Error;

/// Failure taxonomy shared by every layer of the crate.
///
/// `Config` covers bad user input (schemas, parameter ranges, grid/stiffness
/// constraints), `Model` covers mathematically invalid model objects, and
/// `Blowup` carries the step index at which a trajectory left the finite
/// range guard.
#[derive(Error, Debug)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("simulation blowup at step {step}: state left the finite range guard")]
    Blowup { step: usize },

    #[error("statistics error: {0}")]
    Stats(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }

    pub fn stats(msg: impl Into<String>) -> Self {
        Error::Stats(msg.into())
    }

    /// Process exit code for the CLI: 2 for anything the user can fix in the
    /// config or model, 3 for a runtime blowup.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Blowup { .. } => 3,
            _ => 2,
        }
    }
}
