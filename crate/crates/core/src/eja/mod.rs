//! Euclidean Jordan algebras: the orthant, spin, real-symmetric and product
//! algebras, their spectral calculus and Löwner-extended functions.

mod descriptor;
mod element;
mod jacobi;
mod spectral;

pub use descriptor::ConeDescriptor;
pub use element::{flat_gram_weights, BlockRef, EjaElement};
pub use jacobi::symmetric_eigen;
pub use spectral::{
    check_frame, diagonal_map, diagonal_map_with, NumericPolicy, ScalarFn, SpectralDecomposition,
};
pub(crate) use spectral::Spectrum;
