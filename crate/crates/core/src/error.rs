use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("result not representable in double precision ({context})")]
    Overflow { context: String },
    #[error("found {found} eigenvalues below alpha_max = {alpha_max}, {requested} requested")]
    NotEnoughRoots {
        found: usize,
        requested: usize,
        alpha_max: f64,
    },
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("transform ODE residual {residual:.3e} at t = {t:.4} exceeds 1e-6; reduce the step")]
    ResidualTooLarge { residual: f64, t: f64 },
    #[error("time change is not increasing at t = {t:.4} (gamma' = {slope:.3e})")]
    NonMonotoneGamma { t: f64, slope: f64 },
    #[error("state grid too narrow: stationary mass {mass:.3e} outside [{z_min}, {z_max}]")]
    GridTooNarrow { mass: f64, z_min: f64, z_max: f64 },
    #[error("importance weights degenerate: one sample carries {share:.1}% of the total")]
    DegenerateWeights { share: f64 },
    #[error("series or quadrature failed to converge: {0}")]
    NoConvergence(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
