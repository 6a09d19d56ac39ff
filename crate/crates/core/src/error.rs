use thiserror::Error;

use crate::expr::{EvalError, ParseError, PointError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Point(#[from] PointError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A theorem's hypotheses do not hold; the message names the violated condition.
    #[error("infeasible configuration: requires {0}")]
    Infeasible(String),
    #[error("integrand could not be evaluated at {point:?}: {source}")]
    IntegrandSample { point: Vec<f64>, source: EvalError },
    #[error("evaluation failed at {point:?}: {source}")]
    Singular { point: Vec<f64>, source: EvalError },
    #[error("subsolution inequality fails on axis {axis}: slack {slack:e} at {point:?}")]
    SubsolutionViolated {
        axis: usize,
        slack: f64,
        point: Vec<f64>,
    },
    #[error("every optimizer restart was infeasible")]
    AllRestartsInfeasible,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
