use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate segment {index}: length {length:e} below threshold")]
    DegenerateSegment { index: usize, length: f64 },

    #[error("Frenet frame undefined at node {index}: curvature {kappa:e}")]
    UndefinedFrame { index: usize, kappa: f64 },

    #[error(
        "singular Biot-Savart evaluation: node {node} of curve {target} lies {distance:e} from curve {source_curve}"
    )]
    SingularEvaluation {
        target: usize,
        node: usize,
        source_curve: usize,
        distance: f64,
    },

    #[error("right-hand side is not finite")]
    NonFiniteRhs,

    #[error("step size {h:e} fell below the minimum at t = {t}")]
    StepUnderflow { t: f64, h: f64 },

    #[error("step budget of {steps} steps exhausted at t = {t}")]
    StepLimit { t: f64, steps: usize },

    /// A failure during time stepping, with the last accepted time and state.
    #[error("integration failed after last good time t = {t}: {cause}")]
    Integration {
        t: f64,
        state: Vec<f64>,
        cause: Box<Error>,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid scenario: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Errors originating in the numerics rather than in user input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::DegenerateSegment { .. }
            | Error::UndefinedFrame { .. }
            | Error::SingularEvaluation { .. }
            | Error::NonFiniteRhs
            | Error::StepUnderflow { .. }
            | Error::StepLimit { .. } => true,
            Error::Integration { cause, .. } => cause.is_numerical(),
            _ => false,
        }
    }

    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Parse { .. } | Error::Validation(_) | Error::UnknownPreset(_)
        )
    }

    /// The innermost cause, looking through integration context.
    pub fn root(&self) -> &Error {
        match self {
            Error::Integration { cause, .. } => cause.root(),
            e => e,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
