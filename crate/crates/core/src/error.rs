use crate::lattice::DivClass;
use crate::lp::LpError;
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("class is not ample: pairing {pairing} with (-1)-curve #{curve}")]
    NotAmple { curve: usize, pairing: Q },
    #[error("class is not pseudo-effective")]
    NotPseff { separation: Box<DivClass> },
    #[error("malformed extremal face: {0}")]
    MalformedFace(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

pub type Result<T> = std::result::Result<T, Error>;
