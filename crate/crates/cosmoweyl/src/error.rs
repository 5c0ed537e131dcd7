use thiserror::Error;

/// Failure modes of the geometric and analytic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point outside chart domain: {0}")]
    Domain(String),
    #[error("no three distinct horizons: m = {m}, lambda = {lambda}")]
    NoHorizon { m: f64, lambda: f64 },
    #[error("iteration did not converge: {0}")]
    Convergence(String),
    #[error("too close to a horizon: Omega^2 = {0}")]
    HorizonProximity(f64),
    #[error("positivity requirement violated: {0}")]
    Positivity(String),
    #[error("tensor symmetry residual {0} exceeds tolerance")]
    Symmetry(f64),
    #[error("frame not null-normalized: {0}")]
    Frame(String),
    #[error("missing derivative evaluator: {0}")]
    MissingDerivative(&'static str),
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("expansion has wrong sign: {0}")]
    ExpansionSign(String),
    #[error("weight integral diverges: {0}")]
    DivergentWeight(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
