use num_traits::One;

use super::{Q, SparseMatrix, SparseVec};

/// Incrementally built row-echelon basis of a span.
///
/// Every stored row has leading coefficient 1 at a distinct pivot index, so a
/// vector is reduced by scanning its entries left to right. With tracking
/// enabled each row also remembers which combination of the inserted inputs
/// produced it, which turns dependent inputs into kernel vectors.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    rows: Vec<SparseVec>,
    combos: Option<Vec<SparseVec>>,
    pivot_row: Vec<Option<usize>>,
    inserted: usize,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Self { dim, rows: Vec::new(), combos: None, pivot_row: vec![None; dim], inserted: 0 }
    }

    pub fn with_tracking(dim: usize) -> Self {
        Self { combos: Some(Vec::new()), ..Self::new(dim) }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    /// Reduces `v` against the stored rows. Returns the residual and, when
    /// tracking, the input combination that was subtracted.
    fn reduce_inner(&self, v: &SparseVec, want_combo: bool) -> (SparseVec, SparseVec) {
        let mut v = v.clone();
        let mut used = SparseVec::new();
        let mut cursor = 0usize;
        loop {
            let hit = v
                .iter()
                .filter(|(i, _)| *i >= cursor)
                .find_map(|(i, x)| self.pivot_row[i].map(|r| (i, r, x.clone())));
            let Some((i, r, x)) = hit else { break };
            v = v.add_scaled(&-&x, &self.rows[r]);
            if want_combo {
                if let Some(combos) = &self.combos {
                    used = used.add_scaled(&x, &combos[r]);
                }
            }
            cursor = i + 1;
        }
        (v, used)
    }

    /// Residual of `v` modulo the span.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.reduce_inner(v, false).0
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Expresses `v` as a combination of the inserted inputs, if it lies in
    /// their span. Requires tracking.
    pub fn express(&self, v: &SparseVec) -> Option<SparseVec> {
        assert!(self.combos.is_some(), "express requires a tracking echelon");
        let (res, used) = self.reduce_inner(v, true);
        res.is_zero().then_some(used)
    }

    /// Inserts the next input. Returns `Ok(())` if it enlarged the span, or
    /// `Err(relation)` with a nonzero relation among inputs when tracking
    /// (`Err` with an empty vector when not tracking).
    pub fn insert(&mut self, v: &SparseVec) -> Result<(), SparseVec> {
        let idx = self.inserted;
        self.inserted += 1;
        let tracking = self.combos.is_some();
        let (res, used) = self.reduce_inner(v, tracking);
        if res.is_zero() {
            let relation = if tracking { SparseVec::unit(idx).add_scaled(&-Q::one(), &used) } else { used };
            return Err(relation);
        }
        let (p, lead) = res.leading().map(|(p, x)| (p, x.clone())).expect("nonzero residual");
        let inv = Q::one() / lead;
        let row = res.scale(&inv);
        if let Some(combos) = &mut self.combos {
            let combo = SparseVec::unit(idx).add_scaled(&-Q::one(), &used).scale(&inv);
            combos.push(combo);
        }
        self.pivot_row[p] = Some(self.rows.len());
        self.rows.push(row);
        Ok(())
    }
}

/// Basis of the kernel of `a`, one vector per dependent column.
pub fn kernel(a: &SparseMatrix) -> Vec<SparseVec> {
    let mut ech = Echelon::with_tracking(a.nrows());
    let mut out = Vec::new();
    for c in a.columns() {
        if let Err(rel) = ech.insert(c) {
            out.push(rel);
        }
    }
    out
}

/// Some solution of `a x = b`, or `None` when `b` is outside the image.
pub fn solve(a: &SparseMatrix, b: &SparseVec) -> Option<SparseVec> {
    let mut ech = Echelon::with_tracking(a.nrows());
    for c in a.columns() {
        let _ = ech.insert(c);
    }
    ech.express(b)
}

/// A linear subspace of `Q^dim`, stored as an echelon basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    ech: Echelon,
}

impl Subspace {
    pub fn zero(dim: usize) -> Self {
        Self { ech: Echelon::new(dim) }
    }

    pub fn span<'a, I: IntoIterator<Item = &'a SparseVec>>(dim: usize, gens: I) -> Self {
        let mut ech = Echelon::new(dim);
        for g in gens {
            let _ = ech.insert(g);
        }
        Self { ech }
    }

    /// Span of the columns of `m`.
    pub fn image(m: &SparseMatrix) -> Self {
        Self::span(m.nrows(), m.columns())
    }

    pub fn kernel_of(m: &SparseMatrix) -> Self {
        let k = kernel(m);
        Self::span(m.ncols(), &k)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ech.dim()
    }

    pub fn dim(&self) -> usize {
        self.ech.rank()
    }

    pub fn basis(&self) -> &[SparseVec] {
        self.ech.rows()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.ech.contains(v)
    }

    pub fn contains_all(&self, other: &Subspace) -> bool {
        other.basis().iter().all(|v| self.contains(v))
    }

    pub fn add_vector(&mut self, v: &SparseVec) -> bool {
        self.ech.insert(v).is_ok()
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut out = self.clone();
        for v in other.basis() {
            out.add_vector(v);
        }
        out
    }

    pub fn map(&self, m: &SparseMatrix) -> Subspace {
        let imgs: Vec<SparseVec> = self.basis().iter().map(|v| m.apply(v)).collect();
        Subspace::span(m.nrows(), &imgs)
    }

    /// Vectors of `self` orthogonal to every vector of `other` under the
    /// standard inner product.
    pub fn orthogonal_complement_within(&self, other: &Subspace) -> Subspace {
        let basis = self.basis();
        if other.dim() == 0 {
            return self.clone();
        }
        // Gram-type constraint matrix: rows indexed by `other`, columns by `self`.
        let cols: Vec<SparseVec> = basis
            .iter()
            .map(|u| SparseVec::from_entries(other.basis().iter().enumerate().map(|(i, w)| (i, u.dot(w)))))
            .collect();
        let constraint = SparseMatrix::from_columns(other.dim(), cols);
        let vecs: Vec<SparseVec> = kernel(&constraint)
            .iter()
            .map(|a| a.iter().fold(SparseVec::new(), |acc, (k, x)| acc.add_scaled(x, &basis[k])))
            .collect();
        Subspace::span(self.ambient_dim(), &vecs)
    }

    pub fn is_equal(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.contains_all(other)
    }
}

/// Rank of a matrix.
pub fn rank(m: &SparseMatrix) -> usize {
    Subspace::image(m).dim()
}

impl SparseMatrix {
    pub fn rank(&self) -> usize {
        rank(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qi;

    fn m(rows: &[&[i64]]) -> SparseMatrix {
        SparseMatrix::from_dense_rows(&rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect::<Vec<_>>())
    }

    #[test]
    fn kernel_of_rank_one_matrix() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = kernel(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.apply(v).is_zero());
        }
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn solve_finds_preimage_or_none() {
        let a = m(&[&[1, 1], &[0, 1], &[1, 2]]);
        let b = SparseVec::from_dense(&[qi(3), qi(1), qi(4)]);
        let x = solve(&a, &b).unwrap();
        assert_eq!(a.apply(&x), b);
        let bad = SparseVec::from_dense(&[qi(1), qi(0), qi(0)]);
        assert!(solve(&a, &bad).is_none());
    }

    #[test]
    fn orthogonal_complement_inside_subspace() {
        let whole = Subspace::span(3, &[SparseVec::unit(0), SparseVec::unit(1)]);
        let line = Subspace::span(3, &[SparseVec::from_dense(&[qi(1), qi(1), qi(0)])]);
        let comp = whole.orthogonal_complement_within(&line);
        assert_eq!(comp.dim(), 1);
        assert!(comp.contains(&SparseVec::from_dense(&[qi(1), qi(-1), qi(0)])));
    }
}
