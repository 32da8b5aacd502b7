use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("{op}: shape mismatch ({detail})")]
    Shape { op: &'static str, detail: String },

    #[error("{op}: argument norm {value:.6e} exceeds the evaluation cap {cap:.1}")]
    Range {
        op: &'static str,
        value: f64,
        cap: f64,
    },

    #[error("{op}: result is not finite")]
    NonFinite { op: &'static str },

    #[error("{op}: did not converge ({detail})")]
    NoConvergence { op: &'static str, detail: String },

    #[error(
        "principal square root undefined: eigenvalue {eigenvalue} lies on the closed negative \
         real axis; build Q from a Jordan specification with an explicit branch, or shift the \
         seed parameters"
    )]
    BranchCut { eigenvalue: Complex64 },

    #[error("degenerate spectrum at eigenvalue {eigenvalue}: {detail}")]
    DegenerateSpectrum {
        eigenvalue: Complex64,
        detail: String,
    },

    #[error(
        "Sylvester equation is singular: eigenvalue {left} of the left matrix collides with \
         eigenvalue {right} of the right matrix"
    )]
    SylvesterSingular { left: Complex64, right: Complex64 },

    #[error(
        "S(0) is not determined by the matrix identity: A and A* share eigenvalue {eigenvalue}; \
         supply S0 explicitly"
    )]
    SupplyS0 { eigenvalue: Complex64 },

    #[error("{what}: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Residual {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error(
        "S(x) is not safely invertible at x = {x}: min |eigenvalue| {min_abs_eig:.3e}, \
         condition {condition:.3e} (is S(0) positive definite?)"
    )]
    SingularS {
        x: f64,
        min_abs_eig: f64,
        condition: f64,
    },

    #[error("z = {z} is a pole ({what})")]
    Pole { z: Complex64, what: &'static str },

    #[error("zeta(z) vanishes at the branch point z = {z}")]
    BranchPoint { z: Complex64 },

    #[error("{what} is singular")]
    Singular { what: &'static str },

    #[error(
        "Y1(z) is not invertible at z = {z} (condition {condition:.3e}); retry at a different z"
    )]
    SingularY { z: Complex64, condition: f64 },

    #[error("quadrature on [{a}, {b}] did not converge after {depth} bisections")]
    Quadrature { a: f64, b: f64, depth: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error(
        "internal consistency failure in {what}: discrepancy {discrepancy:.3e} > {tolerance:.3e}"
    )]
    Consistency {
        what: &'static str,
        discrepancy: f64,
        tolerance: f64,
    },

    #[error("S(0) is not positive definite (min eigenvalue {min_eig:.6e})")]
    NotPositive { min_eig: f64 },

    #[error("invalid step: {0}")]
    Step(String),

    #[error("scenario field `{field}`: {msg}")]
    Scenario { field: String, msg: String },

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Tags an engine error with the scenario field that produced it.
    pub fn in_field(self, field: &str) -> Error {
        match self {
            e @ Error::Scenario { .. } => e,
            other => Error::Scenario {
                field: field.to_string(),
                msg: other.to_string(),
            },
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
