use std::path::PathBuf;

use thiserror::Error;

/// Which line of a two-line element set an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TleLine {
    One,
    Two,
}

impl std::fmt::Display for TleLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TleLine::One => f.write_str("line 1"),
            TleLine::Two => f.write_str("line 2"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("observability error: {0}")]
    Observability(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("kinematics error: {0}")]
    Kinematics(String),

    #[error("infeasible: constraint `{constraint}` violated ({detail})")]
    Infeasible { constraint: String, detail: String },

    #[error("{line}: expected {expected} characters, found {found}")]
    TleFormat {
        line: TleLine,
        expected: usize,
        found: usize,
    },

    #[error("{line}: {detail}")]
    TleStructure { line: TleLine, detail: String },

    #[error("{line}: checksum mismatch (column 69 says {stated}, computed {computed})")]
    TleChecksum {
        line: TleLine,
        stated: u8,
        computed: u8,
    },

    #[error("{line}: cannot parse {field} in columns {start}-{end}: {text:?}")]
    TleParse {
        line: TleLine,
        field: &'static str,
        start: usize,
        end: usize,
        text: String,
    },

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("missing required field `{0}`")]
    MissingField(String),

    #[error("unit mismatch for `{key}`: {detail}")]
    UnitMismatch { key: String, detail: String },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Machine-parseable code printed ahead of the message by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DOMAIN",
            Error::Geometry(_) => "GEOMETRY",
            Error::Observability(_) => "OBSERVABILITY",
            Error::Configuration(_) => "CONFIG",
            Error::Numerical(_) => "NUMERICAL",
            Error::Kinematics(_) => "KINEMATICS",
            Error::Infeasible { .. } => "INFEASIBLE",
            Error::TleFormat { .. } | Error::TleStructure { .. } => "TLE_FORMAT",
            Error::TleChecksum { .. } => "TLE_CHECKSUM",
            Error::TleParse { .. } => "TLE_PARSE",
            Error::UnknownKey(_) => "SCENARIO_UNKNOWN_KEY",
            Error::MissingField(_) => "SCENARIO_MISSING_FIELD",
            Error::UnitMismatch { .. } => "SCENARIO_UNIT",
            Error::InvalidScenario(_) => "SCENARIO_INVALID",
            Error::Io { .. } => "IO",
        }
    }

    /// Process exit code: 2 validation, 3 runtime/geometry, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 4,
            Error::Geometry(_)
            | Error::Observability(_)
            | Error::Numerical(_)
            | Error::Kinematics(_)
            | Error::Infeasible { .. } => 3,
            _ => 2,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Configuration(msg.into())
    }
}
