//! Crate-wide error type.
//!
//! Validation-class errors describe inputs that no admissible configuration
//! can produce; solver-class errors describe data that is syntactically fine
//! but numerically or geometrically irreconcilable. The CLI maps the two
//! classes to distinct exit codes.

/// Identifier of one spectrum entry: a curve family plus a twist index.
///
/// Plain pants curves use index 0 in their own singleton family.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveId {
    pub family: String,
    pub index: i64,
}

impl CurveId {
    pub fn new(family: impl Into<String>, index: i64) -> Self {
        CurveId {
            family: family.into(),
            index,
        }
    }
}

impl std::fmt::Display for CurveId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}[{}]", self.family, self.index)
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain: {0}")]
    Domain(String),

    /// The inputs describe a degenerate polygon or pants configuration.
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    /// A solver received input on which its defining equation degenerates
    /// (e.g. equal leading family lengths, which pin the twist at -1/2).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Length data is inconsistent with every admissible configuration.
    #[error("inconsistent spectrum: {0}")]
    InconsistentSpectrum(String),

    /// A linear system is singular or too ill-conditioned to trust.
    #[error("singular system: {0}")]
    SingularSystem(String),

    /// Two distinct boundary pairs reproduce the observations equally well.
    #[error("ambiguous recovery: candidate pairs {0:?}")]
    AmbiguousRecovery(Vec<(f64, f64)>),

    /// The spectrum lacks entries the recovery plan requires.
    #[error("missing curves: {}", format_ids(.0))]
    MissingCurves(Vec<CurveId>),

    /// Two surfaces that should share topology and boundary data do not.
    #[error("topology mismatch: {0}")]
    TopologyMismatch(String),

    /// (genus, boundary count) outside the supported range.
    #[error("exceptional surface type (g, n) = ({0}, {1})")]
    ExceptionalSurface(usize, usize),

    /// A pants graph the recovery orchestrator cannot serve.
    #[error("unsupported decomposition: {0}")]
    UnsupportedTopology(String),

    /// Input text is not well-formed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Well-formed input violating the document schema; one message per field.
    #[error("schema violations: {}", .0.join("; "))]
    Schema(Vec<String>),
}

fn format_ids(ids: &[CurveId]) -> String {
    ids.iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl Error {
    /// True for errors caused by invalid input rather than irreconcilable data.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::DegenerateInput(_)
                | Error::InconsistentSpectrum(_)
                | Error::SingularSystem(_)
                | Error::AmbiguousRecovery(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
