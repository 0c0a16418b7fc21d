//! Exact computations on Carnot groups: the de Rham multicomplex of
//! polynomial-coefficient forms, the Rumin complex `(E₀, d_c)` and the
//! spectral sequence of the weight filtration.
//!
//! A group is described by the structure constants of its stratified Lie
//! algebra (see [`lie`]). Forms with polynomial coefficients in exponential
//! coordinates split into finite-dimensional slices of fixed total homogeneous
//! weight; every operator in the crate preserves these slices, so all the
//! identities checked here are exact statements about rational matrices.

pub mod bch;
pub mod derham;
pub mod exterior;
pub mod lie;
pub mod linalg;
pub mod poly;
pub mod rumin;
pub mod spectral;

pub use bch::CarnotGroup;
pub use lie::{LieError, StratifiedAlgebra};
