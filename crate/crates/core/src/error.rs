use thiserror::Error;

/// Errors raised while constructing or verifying similarity solutions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FpeError {
    #[error("quadrature failure: best estimate {estimate} with error estimate {error_estimate}")]
    QuadratureFailure { estimate: f64, error_estimate: f64 },

    #[error("singular integrand at z = {at}")]
    SingularIntegrand { at: f64 },

    #[error("non-finite integrand value at x = {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("degenerate diffusion: rho2 vanishes or changes sign near z = {at}")]
    DegenerateDiffusion { at: f64 },

    #[error("negative diffusion coefficient: rho2({at}) < 0, the forward process is ill-posed")]
    NegativeDiffusion { at: f64 },

    #[error("density is not normalizable: {0}")]
    NotNormalizable(String),

    #[error("interior singularity of f at z = {at}")]
    InteriorSingularity { at: f64 },

    #[error("time t = {t} is not after the t = 0 singularity")]
    PreSingularityTime { t: f64 },

    #[error("finite-difference stencil leaves the domain")]
    StencilOutOfDomain,

    #[error("non-normalizable parameter set: {0}")]
    NonNormalizableParameters(String),

    #[error("deformation not normalizable: {0}")]
    DeformationNotNormalizable(String),

    #[error("asymmetric density: y(-z) != y(z) near z = {at}")]
    AsymmetricDensity { at: f64 },

    #[error("ground state has a node near z = {at}")]
    NodeInGroundState { at: f64 },

    #[error("deforming function changes sign near eta = {eta}")]
    DeformingFunctionNode { eta: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("solver diverged at step {step}")]
    SolverDiverged { step: usize },

    #[error("simulation diverged on path {path}")]
    SimulationDiverged { path: usize },

    #[error("errors are not in the asymptotic regime: {0:?}")]
    NotAsymptotic(Vec<f64>),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, FpeError>;
