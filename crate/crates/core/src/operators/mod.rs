//! Dense complex-matrix algebra and the spectral primitives the rest of the
//! toolkit consumes: Hermitian/density operator types, a deterministic Jacobi
//! eigensolver, trace and operator norms, positive/negative parts, fidelity,
//! and seeded sampling.

pub mod hermitian;
pub mod matrix;
pub mod random;
pub mod spectral;

pub use hermitian::{DensityOperator, HermitianOperator, TOL_ASYMMETRY, TOL_HERM, TOL_PSD};
pub use matrix::ComplexMatrix;
pub use random::{sample_density, sample_ginibre, sample_hermitian, sample_pure, sample_unitary};
pub use spectral::{
    clip_to_unit_ball, fidelity, positive_negative_parts, project_to_density, project_to_simplex,
    sqrt_psd, SpectralDecomposition,
};
