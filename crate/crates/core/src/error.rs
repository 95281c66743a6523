use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `|1 + 2xy|` fell below the singular-locus threshold.
    #[error("point ({x}, {y}) is on the singular locus 1 + 2xy = 0")]
    SingularLocus { x: f64, y: f64 },

    #[error("level h = {h} is outside the period annulus (0, 1)")]
    LevelOutOfRange { h: f64 },

    #[error("level curve h = {h} reaches radius {radius:.3}, beyond the accuracy limit")]
    CurveTooLarge { h: f64, radius: f64 },

    #[error("quadrature did not converge: change {estimate:e} at {grid_size} points (tolerance {tolerance:e})")]
    QuadratureNonConvergence {
        estimate: f64,
        grid_size: usize,
        tolerance: f64,
    },

    #[error("finite-difference derivative did not converge: consistency {estimate:e}")]
    DerivativeNonConvergence { estimate: f64 },

    #[error("least-squares design is rank deficient (condition estimate {condition:e})")]
    RankDeficient { condition: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("monomial degree {degree} exceeds the perturbation degree {n}")]
    DegreeExceeded { degree: usize, n: usize },

    #[error("i + j = {0} is odd; the reduction is defined only for even total degree")]
    OddTotalDegree(usize),

    #[error("reduction identity for ({i}, {j}) misses the witness check by {residual:e}")]
    ReductionWitness { i: usize, j: usize, residual: f64 },

    #[error("mu-form and curve-form of the Abelian integral disagree by {difference:e}")]
    FormMismatch { difference: f64 },

    #[error("integrator exceeded {0} steps")]
    StepLimit(usize),

    #[error("trajectory left the period annulus (H = {h})")]
    AnnulusExit { h: f64 },

    #[error("no return to the section within the step budget")]
    NoReturn,
}

impl Error {
    /// True for failures that come from the numerics rather than the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergence { .. }
                | Error::DerivativeNonConvergence { .. }
                | Error::RankDeficient { .. }
                | Error::ReductionWitness { .. }
                | Error::FormMismatch { .. }
                | Error::StepLimit(_)
                | Error::AnnulusExit { .. }
                | Error::NoReturn
                | Error::CurveTooLarge { .. }
        )
    }
}
