pub mod cyclic;
pub mod field;
pub mod lattice;
pub mod matrix;

pub use cyclic::{
    block_multiplicities, ceil_alpha, cor56_check, cyclicity_finite, jet_to_quotient, krylov_span, mu_finite,
    projected_rank, quotient_operator,
};
pub use field::{Field, Fp, GaussRat};
pub use lattice::{all_subspaces, lat_bruteforce, lat_enumerate, lat_intervals, quotient_nilpotent, LatInterval, LatWithIntervals};
pub use matrix::{preimage, rref, ExactMatrix, Subspace};
