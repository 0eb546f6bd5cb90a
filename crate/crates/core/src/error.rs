use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular system: pivot {pivot:e} at row {row}")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("NotHyperbolic: monodromy trace {trace} is within the elliptic/parabolic band")]
    NotHyperbolic { trace: f64 },

    #[error("degenerate abscissae: span {span:e}")]
    DegenerateAbscissae { span: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid domain spec: {0}")]
    InvalidSpec(String),

    #[error("domain is not strictly convex: curvature {min_curvature:e} at theta = {theta}")]
    NotStrictlyConvex { theta: f64, min_curvature: f64 },

    #[error("degenerate chord between s = {s} and s' = {s_prime}")]
    DegenerateChord { s: f64, s_prime: f64 },

    #[error("grazing orbit: phi = {phi:e} outside the guard band")]
    GrazingOrbit { phi: f64 },

    #[error("twist condition degenerate: d12 = {d12:e}")]
    TwistDegenerate { d12: f64 },

    #[error("{stage}: no convergence ({detail})")]
    NoConvergence { stage: String, detail: String },

    #[error("cyclic order violated at index {index}")]
    OrderingViolated { index: usize },

    #[error("invalid rotation number: {0}")]
    InvalidRotation(String),

    #[error("difference quotients not monotone at N = {n}: {detail}")]
    MonotonicityViolated { n: usize, detail: String },

    #[error("sequence not convergent: {0}")]
    NonConvergent(String),

    #[error("insufficient fit window: {even} even and {odd} odd points above the precision floor")]
    InsufficientWindow { even: usize, odd: usize },

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
}

impl Error {
    pub(crate) fn no_convergence(stage: &str, detail: impl Into<String>) -> Error {
        Error::NoConvergence {
            stage: stage.to_string(),
            detail: detail.into(),
        }
    }
}
