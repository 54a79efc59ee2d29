use core::fmt;

/// Failure modes shared by every solver in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A forcing piece or partition is malformed.
    InvalidForcing(&'static str),
    /// An evaluation point lies outside the domain.
    OutOfDomain { x: f64 },
    /// A power singularity is integrated (or weighted) across its pole with a divergent exponent.
    NonIntegrableSingularity { pole: f64, beta: f64 },
    /// The requested weight has no closed form against this piece kind.
    UnsupportedWeight,
    /// The forcing is not symmetric about the centre of its domain.
    NotSymmetric,
    /// The forcing does not have the positive-inside / negative-outside structure.
    SignStructureViolation { location: f64 },
    /// A prerequisite condition of the operation failed.
    PrerequisiteFailed(&'static str),
    /// The forcing has nonzero total mass, so the solution is not flat.
    NotFlat { integral: f64 },
    /// Bisection bracket does not straddle the target.
    NoSignChange { lo_value: f64, hi_value: f64 },
    /// Sampled functional is not monotone over the bracket.
    NotMonotone,
    InvalidMesh(&'static str),
    InvalidParameter(&'static str),
    /// An iterative linear solve failed to reach its residual target.
    SolverDiverged { iterations: usize, residual: f64 },
    /// Eigen iteration exhausted its budget.
    NoConvergence { iterations: usize, residual: f64 },
    BallNotInterior,
    DegenerateRatio { value: f64 },
    SubsolutionCheckFailed { node: usize, defect: f64 },
    CertificateFailed { node: usize, gap: f64 },
    MeshMisaligned,
    PositivityPrerequisiteFailed { node: usize, value: f64 },
    ResolventNotPositive { lambda: f64, lambda1: f64 },
    IterationStalled { iterations: usize, update: f64 },
    BracketViolated { node: usize, excursion: f64 },
    OrthogonalityViolated { projection: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidForcing(msg) => write!(f, "invalid forcing: {msg}"),
            Error::OutOfDomain { x } => write!(f, "point {x} lies outside the domain"),
            Error::NonIntegrableSingularity { pole, beta } => {
                write!(f, "singularity at {pole} with exponent {beta} is not integrable here")
            }
            Error::UnsupportedWeight => write!(f, "weight has no closed form against this piece"),
            Error::NotSymmetric => write!(f, "forcing is not symmetric about the domain centre"),
            Error::SignStructureViolation { location } => {
                write!(f, "sign structure violated near {location}")
            }
            Error::PrerequisiteFailed(msg) => write!(f, "prerequisite failed: {msg}"),
            Error::NotFlat { integral } => {
                write!(f, "forcing has total mass {integral:e}; solution is not flat")
            }
            Error::NoSignChange { lo_value, hi_value } => write!(
                f,
                "bracket does not straddle the target (values {lo_value:e}, {hi_value:e})"
            ),
            Error::NotMonotone => write!(f, "functional is not monotone over the bracket"),
            Error::InvalidMesh(msg) => write!(f, "invalid mesh: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::SolverDiverged { iterations, residual } => write!(
                f,
                "linear solver stalled after {iterations} iterations (residual {residual:e})"
            ),
            Error::NoConvergence { iterations, residual } => write!(
                f,
                "eigen iteration did not converge in {iterations} iterations (residual {residual:e})"
            ),
            Error::BallNotInterior => write!(f, "averaging ball is not strictly interior"),
            Error::DegenerateRatio { value } => {
                write!(f, "auxiliary ratio {value:e} is not strictly positive")
            }
            Error::SubsolutionCheckFailed { node, defect } => {
                write!(f, "subsolution inequality fails at node {node} (defect {defect:e})")
            }
            Error::CertificateFailed { node, gap } => {
                write!(f, "positivity certificate fails at node {node} (gap {gap:e})")
            }
            Error::MeshMisaligned => write!(f, "meshes do not share aligned nodes"),
            Error::PositivityPrerequisiteFailed { node, value } => write!(
                f,
                "linear solution is not positive at node {node} (value {value:e})"
            ),
            Error::ResolventNotPositive { lambda, lambda1 } => write!(
                f,
                "lambda = {lambda} is not below the first discrete eigenvalue {lambda1}"
            ),
            Error::IterationStalled { iterations, update } => write!(
                f,
                "iteration stalled after {iterations} steps (last update {update:e})"
            ),
            Error::BracketViolated { node, excursion } => {
                write!(f, "iterate leaves the bracket at node {node} by {excursion:e}")
            }
            Error::OrthogonalityViolated { projection } => write!(
                f,
                "initial datum is not orthogonal to the first eigenfunction (projection {projection:e})"
            ),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
