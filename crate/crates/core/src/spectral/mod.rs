//! Hamilton maps, their spectra, and the effective-hyperbolicity test.

pub mod classify;
pub mod eigen;
pub mod hamilton;

pub use crate::symbolic::jet::{Partition, QuadraticJet};
pub use classify::{
    block_char_factorization, chain_model_jet, classify_effective_hyperbolicity, classify_jet,
    psi_zero, psi_zero_sign_equivalence, BlockFactorization, Classification, PsiSignCheck,
};
pub use eigen::{spectrum, Eigenvalue, Spectrum, SpectrumClass};
pub use hamilton::{hamilton_map, HamiltonMap};
