//! Exact rational linear algebra.
//!
//! Everything in the engine is carried out over `BigRational`. Vectors and
//! matrices are sparse: the operators assembled on homogeneous slices have a
//! handful of nonzeros per column, and the only dense work is on the small
//! covector blocks.

mod echelon;
mod pinv;
mod sparse;

pub use echelon::{kernel, solve, Echelon, Subspace};
pub use pinv::{dense_inverse, pseudo_inverse};
pub use sparse::{SparseMatrix, SparseVec};

use num_bigint::BigInt;
use num_rational::BigRational;

/// The scalar field of the engine.
pub type Q = BigRational;

/// Builds the rational `num/den`.
pub fn q(num: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds the integer `n` as a rational.
pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// Formats a rational as `p/q`, or `p` when integral.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
