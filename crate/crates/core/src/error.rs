use thiserror::Error;

use crate::qring::QExp;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series is not a unit: its lowest term is not a signed monomial")]
    NotAUnit,
    #[error("geometric expansion of a term with zero q-weight; re-weight the variables")]
    ZeroWeight,
    #[error("coefficient of q^{exponent} requested beyond the validity order {order}")]
    BeyondOrder { exponent: QExp, order: QExp },
    #[error("infinite product needs a positive q-weight, got {0}")]
    NonPositiveWeight(QExp),
    #[error("theta function vanishes identically: {0}")]
    DegenerateTheta(String),
    #[error("summation window does not close: {0}")]
    DivergentWindow(String),
    #[error("pole: {0}")]
    PoleHit(String),
    #[error("weight outside the convergence strip: {0}")]
    WeightOutOfStrip(String),
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
