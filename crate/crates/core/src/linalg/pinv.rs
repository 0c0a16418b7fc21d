use num_traits::{One, Zero};

use super::{Echelon, Q, SparseMatrix, SparseVec};

/// Inverse of a square nonsingular matrix by Gauss-Jordan elimination.
/// Returns `None` if the matrix is singular.
pub fn dense_inverse(m: &SparseMatrix) -> Option<SparseMatrix> {
    assert!(m.is_square(), "inverse of a non-square matrix");
    let n = m.nrows();
    let mut a = m.to_dense_rows();
    let mut inv: Vec<Vec<Q>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = Q::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x *= &p;
        }
        for x in inv[col].iter_mut() {
            *x *= &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                let (ac, ic) = (&a[col][c] * &f, &inv[col][c] * &f);
                a[r][c] -= ac;
                inv[r][c] -= ic;
            }
        }
    }
    Some(SparseMatrix::from_dense_rows(&inv))
}

/// Moore-Penrose pseudo-inverse for the standard inner product.
///
/// Uses a full-rank factorisation `A = C F`, where the columns of `C` are the
/// pivot columns of `A`; then `A⁺ = Fᵀ (F Fᵀ)⁻¹ (Cᵀ C)⁻¹ Cᵀ`. On `Im A` this
/// returns the unique preimage orthogonal to `Ker A`, and it vanishes on
/// `(Im A)^⊥`.
pub fn pseudo_inverse(a: &SparseMatrix) -> SparseMatrix {
    let (m, n) = (a.nrows(), a.ncols());
    let mut ech = Echelon::with_tracking(m);
    let mut pivots = Vec::new();
    for (j, c) in a.columns().iter().enumerate() {
        if ech.insert(c).is_ok() {
            pivots.push(j);
        }
    }
    let r = pivots.len();
    if r == 0 {
        return SparseMatrix::zeros(n, m);
    }
    let c = SparseMatrix::from_columns(m, pivots.iter().map(|&j| a.col(j).clone()).collect());
    // Coordinates of every column of A on the pivot columns.
    let mut cech = Echelon::with_tracking(m);
    for col in c.columns() {
        cech.insert(col).expect("pivot columns are independent");
    }
    let f_cols: Vec<SparseVec> =
        a.columns().iter().map(|col| cech.express(col).expect("column lies in the pivot span")).collect();
    let f = SparseMatrix::from_columns(r, f_cols);
    let ct = c.transpose();
    let ft = f.transpose();
    let ctc_inv = dense_inverse(&(&ct * &c)).expect("Gram matrix of independent columns");
    let fft_inv = dense_inverse(&(&f * &ft)).expect("Gram matrix of independent rows");
    &(&ft * &fft_inv) * &(&ctc_inv * &ct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, qi};

    fn m(rows: &[&[i64]]) -> SparseMatrix {
        SparseMatrix::from_dense_rows(&rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect::<Vec<_>>())
    }

    #[test]
    fn inverse_of_2x2() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = dense_inverse(&a).unwrap();
        assert_eq!(&a * &inv, SparseMatrix::identity(2));
        assert!(dense_inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn pseudo_inverse_satisfies_penrose_conditions() {
        let a = m(&[&[1, 2, 0], &[2, 4, 0], &[0, 0, 3], &[1, 2, 3]]);
        let p = pseudo_inverse(&a);
        assert_eq!(&(&a * &p) * &a, a);
        assert_eq!(&(&p * &a) * &p, p);
        let ap = &a * &p;
        let pa = &p * &a;
        assert_eq!(ap.transpose(), ap);
        assert_eq!(pa.transpose(), pa);
    }

    #[test]
    fn pseudo_inverse_of_rank_one_row() {
        // [1 1]⁺ = [1/2; 1/2]
        let p = pseudo_inverse(&m(&[&[1, 1]]));
        assert_eq!(p.to_dense_rows(), vec![vec![q(1, 2)], vec![q(1, 2)]]);
    }
}
