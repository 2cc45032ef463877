use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no resource-block table entry for {bandwidth_mhz} MHz at {scs_khz} kHz")]
    UnknownBandwidth { bandwidth_mhz: u32, scs_khz: u32 },

    #[error("unsupported subcarrier spacing {0} kHz (expected 15, 30, 60 or 120)")]
    UnsupportedScs(u32),

    #[error("{used} resource blocks requested but the cell has {available}")]
    RbOverflow { used: u32, available: u32 },

    #[error("{used} layers requested but the cell has {available} antenna ports")]
    LayerOverflow { used: u32, available: u32 },

    #[error("horizon of {horizon} slots is not a positive multiple of the {period}-slot TDD period")]
    BadHorizon { horizon: u32, period: usize },

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("invalid capacity profile: {0}")]
    BadProfile(String),

    #[error("unknown cell configuration `{0}`")]
    UnknownCell(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for [{section}] {key} at line {line}: {message}")]
    Validation {
        section: String,
        key: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            _ => 1,
        }
    }
}
