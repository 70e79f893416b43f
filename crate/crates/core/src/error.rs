use num_complex::Complex64;
use thiserror::Error;

/// Errors raised across the toolkit. Variants map one-to-one onto the
/// failure kinds reported by the CLI and the line protocol.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("root iteration did not converge after {iterations} iterations")]
    NumericFailure {
        iterations: usize,
        best: Vec<Complex64>,
    },

    #[error("critical points are not distinct (degenerate locus)")]
    DegenerateLocus,

    #[error("second derivative vanishes at critical point {index}")]
    DegenerateMetric { index: usize },

    #[error("trace failure: {0}")]
    TraceFailure(String),

    #[error("step collapse near unregistered singularity at {at}")]
    ConditioningFailure { at: Complex64 },

    #[error("graph extraction failed: {0}")]
    ExtractionFailure(String),

    #[error("malformed graph structure: {0}")]
    Structural(String),

    #[error("face coloring contradiction: {0}")]
    ColoringContradiction(String),

    #[error("move refused: {0}")]
    RefusedMove(String),

    #[error("size cap exceeded: n = {n} > cap {cap} (estimated {estimate} generic strata)")]
    CapExceeded { n: usize, cap: usize, estimate: u64 },

    #[error("direction undefined for coincident points")]
    UndefinedDirection,

    #[error("relative distance undefined: reference points coincide")]
    DivisionDegenerate,

    #[error("scale too large: at most {max_admissible} is admissible")]
    ScaleTooLarge { max_admissible: f64 },

    #[error("advection singular at {at} (t = {t}): |P'| below threshold")]
    AdvectionSingular { at: Complex64, t: f64 },

    #[error("unresolved cluster of wall events near t = {t}")]
    UnresolvedCluster { t: f64 },

    #[error("path exhausted")]
    PathExhausted,
}

impl Error {
    /// Short machine-readable kind, used by the line protocol.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Parse(_) => "parse",
            Error::NumericFailure { .. } => "numeric-failure",
            Error::DegenerateLocus => "degenerate-locus",
            Error::DegenerateMetric { .. } => "degenerate-metric",
            Error::TraceFailure(_) => "trace-failure",
            Error::ConditioningFailure { .. } => "conditioning-failure",
            Error::ExtractionFailure(_) => "extraction-failure",
            Error::Structural(_) => "structural-error",
            Error::ColoringContradiction(_) => "coloring-contradiction",
            Error::RefusedMove(_) => "refused-move",
            Error::CapExceeded { .. } => "cap-exceeded",
            Error::UndefinedDirection => "undefined-direction",
            Error::DivisionDegenerate => "division-degenerate",
            Error::ScaleTooLarge { .. } => "scale-too-large",
            Error::AdvectionSingular { .. } => "advection-singular",
            Error::UnresolvedCluster { .. } => "unresolved-cluster",
            Error::PathExhausted => "path-exhausted",
        }
    }

    /// True for failures of the numerical machinery, as opposed to bad input or refusals.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NumericFailure { .. }
                | Error::DegenerateLocus
                | Error::DegenerateMetric { .. }
                | Error::TraceFailure(_)
                | Error::ConditioningFailure { .. }
                | Error::ExtractionFailure(_)
                | Error::ColoringContradiction(_)
                | Error::AdvectionSingular { .. }
                | Error::UnresolvedCluster { .. }
        )
    }

    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::RefusedMove(_) | Error::CapExceeded { .. } | Error::ScaleTooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
