use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{fmt_q, Q};

/// Sparse vector with strictly increasing indices and no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Q)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(i: usize) -> Self {
        Self { entries: vec![(i, Q::one())] }
    }

    /// Builds a vector from unordered entries, summing duplicates.
    pub fn from_entries<I: IntoIterator<Item = (usize, Q)>>(entries: I) -> Self {
        let mut v: Vec<(usize, Q)> = entries.into_iter().collect();
        v.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, Q)> = Vec::with_capacity(v.len());
        for (i, x) in v {
            match out.last_mut() {
                Some((j, y)) if *j == i => *y += x,
                _ => out.push((i, x)),
            }
        }
        out.retain(|(_, x)| !x.is_zero());
        Self { entries: out }
    }

    /// Builds a vector from entries already sorted, distinct and nonzero.
    pub(crate) fn from_sorted_unchecked(entries: Vec<(usize, Q)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|(_, x)| !x.is_zero()));
        Self { entries }
    }

    pub fn from_dense(values: &[Q]) -> Self {
        Self {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); len];
        for (i, x) in &self.entries {
            out[*i] = x.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Q)> + '_ {
        self.entries.iter().map(|(i, x)| (*i, x))
    }

    pub fn entries(&self) -> &[(usize, Q)] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> Q {
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn leading(&self) -> Option<(usize, &Q)> {
        self.entries.first().map(|(i, x)| (*i, x))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Q, other: &SparseVec) -> SparseVec {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, c * y));
                        b.next();
                    } else {
                        let s = x + c * y;
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, c * y));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { entries: out }
    }

    pub fn scale(&self, c: &Q) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec { entries: self.entries.iter().map(|(i, x)| (*i, x * c)).collect() }
    }

    pub fn dot(&self, other: &SparseVec) -> Q {
        let mut acc = Q::zero();
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() && b < other.entries.len() {
            let (i, x) = &self.entries[a];
            let (j, y) = &other.entries[b];
            if i < j {
                a += 1;
            } else if j < i {
                b += 1;
            } else {
                acc += x * y;
                a += 1;
                b += 1;
            }
        }
        acc
    }

    /// Keeps only the entries whose index satisfies `keep`.
    pub fn filter<F: Fn(usize) -> bool>(&self, keep: F) -> SparseVec {
        SparseVec { entries: self.entries.iter().filter(|(i, _)| keep(*i)).cloned().collect() }
    }

    /// Re-indexes entries through `map`; entries mapped to `None` are dropped.
    pub fn reindex<F: Fn(usize) -> Option<usize>>(&self, map: F) -> SparseVec {
        SparseVec::from_entries(self.entries.iter().filter_map(|(i, x)| map(*i).map(|j| (j, x.clone()))))
    }
}

impl Add for &SparseVec {
    type Output = SparseVec;
    fn add(self, rhs: &SparseVec) -> SparseVec {
        self.add_scaled(&Q::one(), rhs)
    }
}

impl Sub for &SparseVec {
    type Output = SparseVec;
    fn sub(self, rhs: &SparseVec) -> SparseVec {
        self.add_scaled(&-Q::one(), rhs)
    }
}

impl Neg for &SparseVec {
    type Output = SparseVec;
    fn neg(self) -> SparseVec {
        self.scale(&-Q::one())
    }
}

/// Products with at least this many columns are computed in parallel.
const PARALLEL_COLUMNS: usize = 64;

/// Scatter/gather accumulator reused across the columns of a product.
struct Accumulator {
    values: Vec<Q>,
    touched: Vec<usize>,
    live: Vec<bool>,
}

impl Accumulator {
    fn new(len: usize) -> Self {
        Self { values: vec![Q::zero(); len], touched: Vec::new(), live: vec![false; len] }
    }

    fn add(&mut self, i: usize, x: Q) {
        if !self.live[i] {
            self.live[i] = true;
            self.touched.push(i);
        }
        self.values[i] += x;
    }

    fn drain(&mut self) -> SparseVec {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            self.live[i] = false;
            let x = std::mem::take(&mut self.values[i]);
            if !x.is_zero() {
                out.push((i, x));
            }
        }
        self.touched.clear();
        SparseVec::from_sorted_unchecked(out)
    }
}

/// Column-major sparse matrix. Column `j` is the image of the `j`-th basis
/// vector of the source, so `A * B` means "apply `B`, then `A`".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, cols: vec![SparseVec::new(); ncols] }
    }

    pub fn identity(n: usize) -> Self {
        Self { nrows: n, cols: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_columns(nrows: usize, cols: Vec<SparseVec>) -> Self {
        debug_assert!(cols.iter().all(|c| c.max_index().is_none_or(|m| m < nrows)));
        Self { nrows, cols }
    }

    pub fn from_triplets<I: IntoIterator<Item = (usize, usize, Q)>>(
        nrows: usize,
        ncols: usize,
        triplets: I,
    ) -> Self {
        let mut buckets: Vec<Vec<(usize, Q)>> = vec![Vec::new(); ncols];
        for (i, j, x) in triplets {
            assert!(i < nrows && j < ncols, "triplet ({i}, {j}) outside {nrows}x{ncols}");
            buckets[j].push((i, x));
        }
        Self { nrows, cols: buckets.into_iter().map(SparseVec::from_entries).collect() }
    }

    pub fn from_dense_rows(rows: &[Vec<Q>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        Self::from_triplets(
            nrows,
            ncols,
            rows.iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, x)| (i, j, x.clone()))),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &SparseVec {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        self.cols[j].get(i)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(SparseVec::nnz).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(SparseVec::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.cols.len()
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new(self.nrows);
        for (j, x) in v.iter() {
            for (i, y) in self.cols[j].iter() {
                acc.add(i, x * y);
            }
        }
        acc.drain()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut buckets: Vec<Vec<(usize, Q)>> = vec![Vec::new(); self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c.iter() {
                buckets[i].push((j, x.clone()));
            }
        }
        SparseMatrix {
            nrows: self.cols.len(),
            cols: buckets.into_iter().map(SparseVec::from_sorted_unchecked).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> SparseMatrix {
        SparseMatrix { nrows: self.nrows, cols: self.cols.iter().map(|v| v.scale(c)).collect() }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Q, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols()), (other.nrows, other.ncols()), "shape mismatch");
        SparseMatrix {
            nrows: self.nrows,
            cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a.add_scaled(c, b)).collect(),
        }
    }

    /// Rows `rows` and columns `cols` of `self`, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut row_map = vec![usize::MAX; self.nrows];
        for (k, &i) in rows.iter().enumerate() {
            row_map[i] = k;
        }
        let cols = cols
            .iter()
            .map(|&j| {
                self.cols[j].reindex(|i| {
                    let k = row_map[i];
                    (k != usize::MAX).then_some(k)
                })
            })
            .collect();
        SparseMatrix { nrows: rows.len(), cols }
    }

    /// Embeds a block matrix into a larger zero matrix at the given indices.
    pub fn embed(&self, nrows: usize, ncols: usize, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut out = SparseMatrix::zeros(nrows, ncols);
        for (k, &j) in cols.iter().enumerate() {
            out.cols[j] = self.cols[k].reindex(|i| Some(rows[i]));
        }
        out
    }

    pub fn pow(&self, k: u32) -> SparseMatrix {
        assert!(self.is_square());
        let mut out = SparseMatrix::identity(self.nrows);
        for _ in 0..k {
            out = self * &out;
        }
        out
    }

    pub fn to_dense_rows(&self) -> Vec<Vec<Q>> {
        let mut rows = vec![vec![Q::zero(); self.ncols()]; self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c.iter() {
                rows[i][j] = x.clone();
            }
        }
        rows
    }

    /// Matrix entries as `p/q` strings, row by row.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        self.to_dense_rows().iter().map(|r| r.iter().map(fmt_q).collect()).collect()
    }
}

impl Mul for &SparseMatrix {
    type Output = SparseMatrix;
    fn mul(self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols(), rhs.nrows, "inner dimension mismatch");
        let column = |acc: &mut Accumulator, bc: &SparseVec| {
            for (k, x) in bc.iter() {
                for (i, y) in self.cols[k].iter() {
                    acc.add(i, x * y);
                }
            }
            acc.drain()
        };
        let cols = if rhs.cols.len() >= PARALLEL_COLUMNS {
            rhs.cols.par_iter().map_init(|| Accumulator::new(self.nrows), column).collect()
        } else {
            let mut acc = Accumulator::new(self.nrows);
            rhs.cols.iter().map(|bc| column(&mut acc, bc)).collect()
        };
        SparseMatrix { nrows: self.nrows, cols }
    }
}

impl Add for &SparseMatrix {
    type Output = SparseMatrix;
    fn add(self, rhs: &SparseMatrix) -> SparseMatrix {
        self.add_scaled(&Q::one(), rhs)
    }
}

impl Sub for &SparseMatrix {
    type Output = SparseMatrix;
    fn sub(self, rhs: &SparseMatrix) -> SparseMatrix {
        self.add_scaled(&-Q::one(), rhs)
    }
}

impl Neg for &SparseMatrix {
    type Output = SparseMatrix;
    fn neg(self) -> SparseMatrix {
        self.scale(&-Q::one())
    }
}

impl fmt::Display for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self.to_string_rows();
        let width = rows.iter().flatten().map(String::len).max().unwrap_or(1);
        for r in &rows {
            let line: Vec<String> = r.iter().map(|s| format!("{s:>width$}")).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}
