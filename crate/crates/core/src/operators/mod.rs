pub mod algebra;
pub mod conv;
pub mod factor;
pub mod probe;
pub mod spec;

pub use algebra::{alg_membership, bicommutant_membership, quotient_dimension, regime, Regime};
pub use conv::{
    apply_conv_operator, commutant_candidate, polynomial_in_a, verify_commutation, BlockEntry, BlockOperatorMatrix,
    ConvOperator, ResidualReport,
};
pub use factor::{build_m_n, Factorization};
pub use probe::{extended_eigen_probe, ProbeReport};
pub use spec::{admissible, apply_block, apply_block_n, check_vector, monomial_testset, Block, BlockSpec, Flavor, VectorFn};
