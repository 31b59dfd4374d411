//! Crate-wide error type.

/// Errors produced by system maps, kernel evaluation and the solvers.
#[derive(thiserror::Error, Debug, Clone)]
pub enum Error {
    /// A physical state lies outside the admissible domain of its system.
    #[error("{system}: inadmissible state (u = {u}, v = {v}): {constraint}")]
    InadmissibleState {
        system: &'static str,
        constraint: &'static str,
        u: f64,
        v: f64,
    },

    /// An invariant point lies outside the image of the invariant map.
    #[error("{system}: invariant point (r1 = {r1}, r2 = {r2}) outside domain: {constraint}")]
    InadmissibleInvariants {
        system: &'static str,
        constraint: &'static str,
        r1: f64,
        r2: f64,
    },

    /// The two characteristic speeds coincide (within tolerance).
    #[error("characteristic degeneracy at (r1 = {r1}, r2 = {r2}): |lambda1 - lambda2| = {gap:e}")]
    Degeneracy { r1: f64, r2: f64, gap: f64 },

    /// A kernel denominator is too close to zero; the offending factor is named.
    #[error("kernel singularity: factor {factor} = {value:e} within guard band")]
    Singularity { factor: &'static str, value: f64 },

    /// An argument is outside the supported range of a special-function kernel.
    #[error("{what}: argument {value:e} outside supported range {range}")]
    Range {
        what: &'static str,
        range: &'static str,
        value: f64,
    },

    /// A domain precondition of an operation is violated.
    #[error("{what}: {why}")]
    Domain { what: &'static str, why: String },

    /// Quadrature failed to reach the requested tolerance within its budget.
    #[error("quadrature budget exhausted: estimated error {est_error:e} after {panels} panels")]
    Accuracy {
        est_error: f64,
        value: f64,
        panels: usize,
    },

    /// The boundary curve violates a solver precondition.
    #[error("boundary curve: {0}")]
    Curve(String),

    /// An inverse parameter lookup target is not attained on the profile.
    #[error("target not attained: {0}")]
    NotAttained(String),

    /// An inverse parameter lookup found several isolated roots.
    #[error("ambiguous parameter lookup for {what}: roots at {roots:?}")]
    Ambiguous { what: &'static str, roots: Vec<f64> },

    /// Field/grid comparison found no common nodes.
    #[error("comparison: no overlapping nodes between field and grid")]
    EmptyOverlap,

    /// Unknown scenario name.
    #[error("unknown scenario {name:?}; registered: {registered:?}")]
    UnknownScenario {
        name: String,
        registered: Vec<&'static str>,
    },

    /// Invalid run configuration.
    #[error("configuration: {0}")]
    Config(String),

    /// I/O failure (message only, to keep the error type cloneable).
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
