//! Optimal time-frequency subspace approximation on cyclic groups.
//!
//! Given a finite set of complex signals on Z_d and a budget of n
//! generators, this crate computes the time-frequency invariant subspace
//! that minimizes the total least-squares approximation error, along with
//! the per-fiber eigenvalue spectra and the exact error.
//!
//! The pipeline: a signal is fiberized through the unitary Zak transform
//! into vectors in C^r indexed by a (omega, tau) grid; per fiber, the
//! Gramian of the data fibers is eigendecomposed and the top-n normalized
//! eigencombinations form the optimal local subspace; inverting the
//! fiberization turns those local frames into generator signals.

pub mod approx;
pub mod error;
pub mod group;
pub mod io;
pub mod spectral;
pub mod transforms;
pub mod validate;

pub use approx::{
    approximation_error, error_from_spectrum, fiber_projection, optimal_generators, project,
    ApproxResult, DataSet, EigenField, TFSubspace,
};
pub use error::{Result, TfError};
pub use group::{character, lattice_elements, make_config, FiberIndex, GroupConfig};
pub use spectral::{eigh, gramian, EigenDecomposition, HermitianMatrix};
pub use transforms::{
    dft, helson, helson_inverse, idft, modulate, translate, zak, zak_time_domain, FiberTensor,
    Signal, ZakGrid,
};
pub use validate::{
    fiber_best_rank_error, power_iteration_eigs, random_subspace_sweep, OracleReport,
};
