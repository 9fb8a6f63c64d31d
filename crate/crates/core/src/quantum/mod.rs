//! Dense complex linear algebra over composite qudit–cavity spaces.

mod evolution;
mod fidelity;
mod operators;
mod space;

pub use evolution::{evolve, propagator, Spectrum, MAX_DENSE_DIM};
pub use fidelity::{column_fidelity, exact_match, max_column_deviation, process_fidelity};
pub use operators::{
    tensor_embed, CMatrix, CVector, HermitianOperator, LocalOperator, StateVector, UnitaryMatrix,
    C64, HERMITICITY_TOL, NORM_TOL, UNITARITY_TOL,
};
pub use space::{HilbertSpace, QUDIT_DIM};

pub(crate) use operators::{ONE, ZERO};
