use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(Violation),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("infeasible edge used: ({0}, {1})")]
    InfeasibleEdge(usize, usize),
    #[error("no feasible transportation")]
    NoFeasibleTransportation,
    #[error("requires {0}")]
    WrongVariant(&'static str),
    #[error("instance too large for {0}")]
    TooLarge(&'static str),
    #[error("π shift exceeds Δ at breakpoint {breakpoint}")]
    PiShiftExceedsDelta { breakpoint: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),
    #[error("support is not a forest")]
    NotAForest,
    #[error("infeasible DST: terminal {0} unreachable from root")]
    InfeasibleDst(usize),
    #[error("need more triples or larger instance")]
    DegenerateDummySink,
    #[error("independence not achieved after {0} draws")]
    IndependenceNotAchieved(u32),
    #[error("element {0} has no covering set")]
    UncoveredElement(usize),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
