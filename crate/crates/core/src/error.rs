use thiserror::Error;

use crate::exact::ExactError;
use crate::weyl::WeylError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error("coordinate vector has length {found}, algebra has dimension {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("matrix has nonzero trace {0}")]
    NotTraceless(String),
    #[error("element is not ad-nilpotent")]
    NotNilpotent,
    #[error("element does not lie in {0}")]
    NotInSubspace(&'static str),
    #[error("invariant index {index} out of range 1..={max}")]
    InvariantIndex { index: usize, max: usize },
    #[error("cannot sample a nonzero vector from the zero subspace")]
    EmptySampleSpace,
    #[error("no acceptable draw after {attempts} attempts ({what})")]
    DegenerateSampling { what: &'static str, attempts: usize },
    #[error("generator term degrees do not match declared degree {0}")]
    InhomogeneousGenerator(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
