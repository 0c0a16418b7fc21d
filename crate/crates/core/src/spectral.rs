//! The spectral sequence of the weight filtration on one slice.
//!
//! Pages are computed twice: blockwise from the `d_i` (cycles `Z_r` with
//! witnesses `z_{p+j}`, boundaries `B_r` from constrained tuples `c_{p−k}`),
//! and from the filtered total complex (`𝒵_r = F_p ∩ d⁻¹F_{p+r}`,
//! `ℬ_r = 𝒵_{r−1}^{p+1} + d𝒵_{r−1}^{p−r+1}`). Their dimensions must agree.
//!
//! All vectors use the coordinates of the ambient [`Slice`]; blocks of
//! different `(p, h)` occupy disjoint index ranges, so a tuple
//! `(z_{p+1}, …, z_{p+r−1})` is stored as the single vector `∑ z_{p+j}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::One;
use rayon::prelude::*;
use thiserror::Error;

use crate::derham::Slice;
use crate::linalg::{kernel, Echelon, SparseMatrix, SparseVec, Subspace, Q};
use crate::rumin::{CovectorOperators, RuminSlice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectralError {
    #[error("filtration weight {p} outside 0..={max}")]
    WeightOutOfRange { p: usize, max: usize },
    #[error("page index must be at least 1")]
    PageIndex,
    #[error("image of a representative of page {r} at weight {p}, degree {h} is not an {r}-cycle")]
    NotACycle { r: usize, p: usize, h: usize },
}

/// `Z_r^{p,h}` with a witness for every element.
#[derive(Clone, Debug)]
pub struct CycleSpace {
    pub r: usize,
    pub p: usize,
    pub h: usize,
    space: Subspace,
    /// Independent cycles, their witnesses `∑_j z_{p+j}`, and an echelon
    /// expressing any cycle in terms of them.
    generators: Vec<(SparseVec, SparseVec)>,
    ech: Echelon,
}

impl CycleSpace {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn contains(&self, x: &SparseVec) -> bool {
        self.space.contains(x)
    }

    /// Witness `∑_j z_{p+j}` for a cycle, `None` for non-members.
    pub fn witness(&self, x: &SparseVec) -> Option<SparseVec> {
        let combo = self.ech.express(x)?;
        Some(combo.iter().fold(SparseVec::new(), |acc, (k, c)| acc.add_scaled(c, &self.generators[k].1)))
    }
}

/// `B_r^{p,h}` together with a basis of the admissible tuples `∑_k c_{p−k}`.
#[derive(Clone, Debug)]
pub struct BoundarySpace {
    pub r: usize,
    pub p: usize,
    pub h: usize,
    pub space: Subspace,
    pub tuples: Vec<SparseVec>,
}

/// One page entry `E_r^{p,h}` with quotient representatives.
#[derive(Clone, Debug)]
pub struct SpectralPage {
    pub r: usize,
    pub p: usize,
    pub h: usize,
    pub tau: usize,
    pub z: CycleSpace,
    pub b: BoundarySpace,
    /// Orthogonal complement of `B_r` inside `Z_r`.
    pub reps: Vec<SparseVec>,
}

impl SpectralPage {
    pub fn dims(&self) -> PageDims {
        PageDims { z: self.z.dim(), b: self.b.space.dim(), e: self.reps.len() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct PageDims {
    pub z: usize,
    pub b: usize,
    pub e: usize,
}

/// Witness choice for `∂_r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessChoice {
    /// The closed form `z_{p+j} = W_j x` when it satisfies the cycle
    /// conditions, a solved witness otherwise.
    ClosedForm,
    /// Always the witness produced by the linear solve.
    Solved,
}

/// Spectral data of one slice.
#[derive(Debug)]
pub struct SpectralSlice {
    slice: Arc<Slice>,
    d: Vec<SparseMatrix>,
    d_total: SparseMatrix,
    d0_pinv: SparseMatrix,
    hausdorff: usize,
    /// `W_j` with `z_{p+j} = W_j x`; index 0 is unused.
    witness_maps: Vec<SparseMatrix>,
    filtered: Mutex<HashMap<(usize, i64, usize), Arc<Subspace>>>,
}

impl SpectralSlice {
    pub fn new(ops: &CovectorOperators, slice: Arc<Slice>) -> Self {
        let d0_pinv = slice.lift_covector_operator(|w| ops.d0_pinv_wedge(w));
        Self::with_pinv(slice, d0_pinv)
    }

    /// Reuses the `d₀⁻¹` of an assembled [`RuminSlice`].
    pub fn from_rumin(rumin: &RuminSlice, slice: Arc<Slice>) -> Self {
        Self::with_pinv(slice, rumin.d0_pinv().clone())
    }

    fn with_pinv(slice: Arc<Slice>, d0_pinv: SparseMatrix) -> Self {
        let n = slice.dim();
        let d: Vec<SparseMatrix> = (0..=slice.step()).map(|i| slice.d(i)).collect();
        let d_total = slice.d_total();
        let hausdorff = slice.hausdorff_dimension();
        let mut witness_maps = vec![SparseMatrix::zeros(n, n)];
        for j in 1..=hausdorff {
            let mut acc = d.get(j).cloned().unwrap_or_else(|| SparseMatrix::zeros(n, n));
            for i in 1..j {
                if let Some(di) = d.get(i) {
                    acc = &acc - &(di * &witness_maps[j - i]);
                }
            }
            witness_maps.push(&d0_pinv * &acc);
        }
        Self { slice, d, d_total, d0_pinv, hausdorff, witness_maps, filtered: Mutex::new(HashMap::new()) }
    }

    pub fn slice(&self) -> &Slice {
        &self.slice
    }

    pub fn hausdorff_dimension(&self) -> usize {
        self.hausdorff
    }

    pub fn d0_pinv(&self) -> &SparseMatrix {
        &self.d0_pinv
    }

    fn zero(&self) -> SparseMatrix {
        SparseMatrix::zeros(self.slice.dim(), self.slice.dim())
    }

    /// `d_i` on the slice (zero beyond the step).
    pub fn d(&self, i: usize) -> SparseMatrix {
        self.d.get(i).cloned().unwrap_or_else(|| self.zero())
    }

    fn apply_d(&self, i: usize, v: &SparseVec) -> SparseVec {
        self.d.get(i).map_or_else(SparseVec::new, |m| m.apply(v))
    }

    /// `W_j = d₀⁻¹(d_j − ∑_{i=1}^{j−1} d_i W_{j−i})`.
    pub fn witness_map(&self, j: usize) -> SparseMatrix {
        self.witness_maps.get(j).cloned().unwrap_or_else(|| self.zero())
    }

    /// `∑_{m=1}^{j} (−1)^{m−1} ∑_{|I|=j} (d₀⁻¹d)_I`, summed over compositions.
    pub fn witness_map_expanded(&self, j: usize) -> SparseMatrix {
        let mut memo: HashMap<Vec<usize>, SparseMatrix> = HashMap::new();
        let mut out = self.zero();
        for comp in compositions(j) {
            let sign = if comp.len() % 2 == 1 { Q::one() } else { -Q::one() };
            let m = self.chain(&comp, &mut memo);
            out = out.add_scaled(&sign, &m);
        }
        out
    }

    /// `(d₀⁻¹d_{i₁})(d₀⁻¹d_{i₂})⋯(d₀⁻¹d_{i_m})`.
    fn chain(&self, comp: &[usize], memo: &mut HashMap<Vec<usize>, SparseMatrix>) -> SparseMatrix {
        if let Some(m) = memo.get(comp) {
            return m.clone();
        }
        let head = match self.d.get(comp[0]) {
            Some(di) => &self.d0_pinv * di,
            None => self.zero(),
        };
        let m = if comp.len() == 1 { head } else { &head * &self.chain(&comp[1..], memo) };
        memo.insert(comp.to_vec(), m.clone());
        m
    }

    /// `d_r − ∑_{i=1}^{r−1} d_i W_{r−i}`, raising weight by exactly `r`.
    pub fn differential_operator(&self, r: usize) -> SparseMatrix {
        let mut out = self.d(r);
        for i in 1..r {
            if let Some(di) = self.d.get(i) {
                out = &out - &(di * &self.witness_map(r - i));
            }
        }
        out
    }

    /// The same operator with every `W_j` expanded over multi-indices.
    pub fn differential_operator_expanded(&self, r: usize) -> SparseMatrix {
        let mut out = self.d(r);
        for i in 1..r {
            if let Some(di) = self.d.get(i) {
                out = &out - &(di * &self.witness_map_expanded(r - i));
            }
        }
        out
    }

    fn check_weight(&self, p: usize) -> Result<(), SpectralError> {
        if p > self.hausdorff {
            Err(SpectralError::WeightOutOfRange { p, max: self.hausdorff })
        } else {
            Ok(())
        }
    }

    fn weight(&self, k: usize) -> usize {
        self.slice.elem(k).weight
    }

    /// `Z_r^{p,h}`: all `x` admitting witnesses `z_{p+j}` with
    /// `d₀x = 0` and `d_n x = ∑_{i=0}^{n−1} d_i z_{p+n−i}` for `1 ≤ n ≤ r−1`.
    pub fn z_space(&self, r: usize, p: usize, h: usize) -> Result<CycleSpace, SpectralError> {
        if r == 0 {
            return Err(SpectralError::PageIndex);
        }
        self.check_weight(p)?;
        let dim = self.slice.dim();
        // unknowns: x in block p, then z_{p+j} in block p+j
        let mut unknowns: Vec<usize> = Vec::new();
        let mut cols: Vec<SparseVec> = Vec::new();
        for j in 0..r {
            for k in self.slice.block(p + j, h) {
                let e = SparseVec::unit(k);
                let mut col = SparseVec::new();
                if j == 0 {
                    for n in 0..r {
                        col = &col + &self.apply_d(n, &e);
                    }
                } else {
                    for i in 0..r - j {
                        col = col.add_scaled(&-Q::one(), &self.apply_d(i, &e));
                    }
                }
                unknowns.push(k);
                cols.push(col);
            }
        }
        let nx = self.slice.block(p, h).len();
        let system = SparseMatrix::from_columns(dim, cols);
        let mut ech = Echelon::with_tracking(dim);
        let mut generators = Vec::new();
        for kv in kernel(&system) {
            let x = SparseVec::from_entries(kv.iter().filter(|(i, _)| *i < nx).map(|(i, c)| (unknowns[i], c.clone())));
            let z = SparseVec::from_entries(kv.iter().filter(|(i, _)| *i >= nx).map(|(i, c)| (unknowns[i], c.clone())));
            if !x.is_zero() && ech.insert(&x).is_ok() {
                generators.push((x, z));
            }
        }
        let space = Subspace::span(dim, generators.iter().map(|(x, _)| x));
        Ok(CycleSpace { r, p, h, space, generators, ech })
    }

    /// `Z_r^{p,h}` with the witnesses pinned to the closed form: `x ∈ Ker d₀`
    /// and every residual `(1 − d₀d₀⁻¹)(d_n − ∑ d_i W_{n−i}) x` vanishes.
    pub fn z_space_closed_form(&self, r: usize, p: usize, h: usize) -> Result<Subspace, SpectralError> {
        if r == 0 {
            return Err(SpectralError::PageIndex);
        }
        self.check_weight(p)?;
        let dim = self.slice.dim();
        let idx: Vec<usize> = self.slice.block(p, h).collect();
        let residual_maps: Vec<SparseMatrix> = (1..r)
            .map(|n| {
                let dn = self.differential_operator(n);
                let proj = &dn - &(&self.d(0) * &(&self.d0_pinv * &dn));
                proj.submatrix(&(0..dim).collect::<Vec<_>>(), &idx)
            })
            .collect();
        let cols = idx
            .iter()
            .enumerate()
            .map(|(c, &k)| {
                residual_maps.iter().fold(self.apply_d(0, &SparseVec::unit(k)), |acc, m| &acc + m.col(c))
            })
            .collect();
        let ker = kernel(&SparseMatrix::from_columns(dim, cols));
        let vecs: Vec<SparseVec> = ker.iter().map(|v| v.reindex(|i| Some(idx[i]))).collect();
        Ok(Subspace::span(dim, &vecs))
    }

    /// `B_r^{p,h}`: all `x = ∑_{k=0}^{r−1} d_k c_{p−k}` with
    /// `∑_{k=l}^{r−1} d_{k−l} c_{p−k} = 0` for `1 ≤ l ≤ r−1`.
    pub fn b_space(&self, r: usize, p: usize, h: usize) -> Result<BoundarySpace, SpectralError> {
        if r == 0 {
            return Err(SpectralError::PageIndex);
        }
        self.check_weight(p)?;
        let dim = self.slice.dim();
        if h == 0 {
            return Ok(BoundarySpace { r, p, h, space: Subspace::zero(dim), tuples: Vec::new() });
        }
        let mut unknowns = Vec::new();
        let mut constraint_cols = Vec::new();
        for k in 0..r.min(p + 1) {
            for idx in self.slice.block(p - k, h - 1) {
                let e = SparseVec::unit(idx);
                // constraint rows: weights p−l for 1 ≤ l ≤ k receive d_{k−l} c_{p−k}
                let mut col = SparseVec::new();
                for l in 1..=k {
                    col = &col + &self.apply_d(k - l, &e);
                }
                unknowns.push(idx);
                constraint_cols.push(col);
            }
        }
        let constraints = SparseMatrix::from_columns(dim, constraint_cols);
        let tuples: Vec<SparseVec> =
            kernel(&constraints).iter().map(|v| v.reindex(|i| Some(unknowns[i]))).collect();
        let images: Vec<SparseVec> = tuples.iter().map(|c| self.boundary_of_tuple(r, p, c)).collect();
        Ok(BoundarySpace { r, p, h, space: Subspace::span(dim, &images), tuples })
    }

    /// `x = ∑_{k=0}^{r−1} d_k c_{p−k}` for a tuple stored as `∑_k c_{p−k}`.
    pub fn boundary_of_tuple(&self, r: usize, p: usize, c: &SparseVec) -> SparseVec {
        let mut x = SparseVec::new();
        for k in 0..r.min(p + 1) {
            let part = c.filter(|i| self.weight(i) == p - k);
            x = &x + &self.apply_d(k, &part);
        }
        x
    }

    /// Residuals of the tuple constraints `∑_{k=l}^{r−1} d_{k−l} c_{p−k}`, for `1 ≤ l ≤ r−1`.
    pub fn tuple_constraints_hold(&self, r: usize, p: usize, c: &SparseVec) -> bool {
        (1..r).filter(|&l| l <= p).all(|l| {
            let mut acc = SparseVec::new();
            for k in l..r.min(p + 1) {
                acc = &acc + &self.apply_d(k - l, &c.filter(|i| self.weight(i) == p - k));
            }
            acc.is_zero()
        })
    }

    /// The witness `z_{p+j} = −∑_{i=0}^{r−1} d_{j+i} c_{p−i}` attached to a
    /// constrained tuple, returned as `∑_j z_{p+j}`.
    pub fn boundary_witness(&self, r: usize, p: usize, c: &SparseVec) -> SparseVec {
        let mut z = SparseVec::new();
        for j in 1..r {
            for i in 0..r.min(p + 1) {
                let part = c.filter(|k| self.weight(k) == p - i);
                z = z.add_scaled(&-Q::one(), &self.apply_d(j + i, &part));
            }
        }
        z
    }

    /// Direct test of the cycle conditions for `x` with witness `∑_j z_{p+j}`.
    pub fn cycle_conditions_hold(&self, r: usize, p: usize, x: &SparseVec, z: &SparseVec) -> bool {
        if !self.apply_d(0, x).is_zero() {
            return false;
        }
        let zj = |j: usize| z.filter(|k| self.weight(k) == p + j);
        (1..r).all(|n| {
            let mut res = self.apply_d(n, x);
            for i in 0..n {
                res = res.add_scaled(&-Q::one(), &self.apply_d(i, &zj(n - i)));
            }
            res.is_zero()
        })
    }

    /// Closed-form witness `∑_{j=1}^{r−1} W_j x`.
    pub fn closed_form_witness(&self, r: usize, x: &SparseVec) -> SparseVec {
        (1..r).fold(SparseVec::new(), |acc, j| &acc + &self.witness_maps[j.min(self.hausdorff)].apply(x))
    }

    pub fn page(&self, r: usize, p: usize, h: usize) -> Result<SpectralPage, SpectralError> {
        let z = self.z_space(r, p, h)?;
        let b = self.b_space(r, p, h)?;
        let reps = z.space().orthogonal_complement_within(&b.space).basis().to_vec();
        Ok(SpectralPage { r, p, h, tau: self.slice.tau(), z, b, reps })
    }

    /// All pages `E_r^{p,h}` with nonzero ambient block.
    pub fn pages(&self, r: usize) -> Result<BTreeMap<(usize, usize), SpectralPage>, SpectralError> {
        let keys: Vec<(usize, usize)> = self.slice.blocks().keys().copied().filter(|&(p, _)| p <= self.hausdorff).collect();
        keys.par_iter().map(|&(p, h)| Ok(((p, h), self.page(r, p, h)?))).collect()
    }

    /// `∂_r x = d_r x − ∑_{i=1}^{r−1} d_i z_{p+r−i}` for a cycle `x`.
    pub fn partial_of(&self, page: &SpectralPage, x: &SparseVec, choice: WitnessChoice) -> Option<SparseVec> {
        let (r, p) = (page.r, page.p);
        let z = match choice {
            WitnessChoice::ClosedForm => {
                let w = self.closed_form_witness(r, x);
                if self.cycle_conditions_hold(r, p, x, &w) {
                    w
                } else {
                    page.z.witness(x)?
                }
            }
            WitnessChoice::Solved => page.z.witness(x)?,
        };
        let mut y = self.apply_d(r, x);
        for i in 1..r {
            let zi = z.filter(|k| self.weight(k) == p + r - i);
            y = y.add_scaled(&-Q::one(), &self.apply_d(i, &zi));
        }
        Some(y)
    }

    /// Matrix of `∂_r : E_r^{p,h} → E_r^{p+r,h+1}` in the representative bases.
    pub fn partial_matrix(
        &self,
        src: &SpectralPage,
        dst: &SpectralPage,
        choice: WitnessChoice,
    ) -> Result<SparseMatrix, SpectralError> {
        self.partial_matrix_on(src, &src.reps, dst, choice)
    }

    /// Matrix of `∂_r` on arbitrary cycles `xs` of `src`, with coordinates on
    /// the representatives of `dst`.
    pub fn partial_matrix_on(
        &self,
        src: &SpectralPage,
        xs: &[SparseVec],
        dst: &SpectralPage,
        choice: WitnessChoice,
    ) -> Result<SparseMatrix, SpectralError> {
        let not_cycle = SpectralError::NotACycle { r: src.r, p: src.p, h: src.h };
        let decomposer = QuotientCoordinates::new(self.slice.dim(), dst);
        let cols = xs
            .iter()
            .map(|x| {
                let y = self.partial_of(src, x, choice).ok_or(not_cycle.clone())?;
                decomposer.coordinates(&y).ok_or(not_cycle.clone())
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SparseMatrix::from_columns(dst.reps.len(), cols))
    }

    /// `𝒵_r^{p,h} = F_p ∩ d⁻¹(F_{p+r})` in degree `h`; `p < 0` means `F_0`.
    pub fn filtered_cycles(&self, r: usize, p: i64, h: usize) -> Arc<Subspace> {
        let key = (r, p, h);
        if let Some(s) = self.filtered.lock().expect("cache poisoned").get(&key) {
            return Arc::clone(s);
        }
        let dim = self.slice.dim();
        let cols_idx = self.slice.filtration_indices(p.max(0) as usize, h);
        let bound = p + r as i64;
        let cols = cols_idx
            .iter()
            .map(|&k| self.d_total.col(k).filter(|i| (self.weight(i) as i64) < bound))
            .collect();
        let ker = kernel(&SparseMatrix::from_columns(dim, cols));
        let vecs: Vec<SparseVec> = ker.iter().map(|v| v.reindex(|i| Some(cols_idx[i]))).collect();
        let s = Arc::new(Subspace::span(dim, &vecs));
        self.filtered.lock().expect("cache poisoned").insert(key, Arc::clone(&s));
        s
    }

    /// `ℬ_r^{p,h} = 𝒵_{r−1}^{p+1,h} + d𝒵_{r−1}^{p−r+1,h−1}`.
    pub fn filtered_boundaries(&self, r: usize, p: i64, h: usize) -> Subspace {
        let upper = self.filtered_cycles(r - 1, p + 1, h);
        if h == 0 {
            return (*upper).clone();
        }
        let lower = self.filtered_cycles(r - 1, p - r as i64 + 1, h - 1);
        upper.sum(&lower.map(&self.d_total))
    }

    /// `dim 𝒵_r^{p,h} − dim ℬ_r^{p,h}`.
    pub fn filtered_page_dim(&self, r: usize, p: usize, h: usize) -> usize {
        let z = self.filtered_cycles(r, p as i64, h);
        let b = self.filtered_boundaries(r, p as i64, h);
        debug_assert!(z.contains_all(&b));
        z.dim() - b.dim()
    }

    /// Cohomology of `(Ω_τ, d)` per degree, by rank–nullity.
    pub fn brute_cohomology(&self) -> Vec<usize> {
        let top = self.slice.weights().len();
        let rank_from = |h: usize| {
            let idx = self.slice.degree_indices(h);
            SparseMatrix::from_columns(self.slice.dim(), idx.iter().map(|&k| self.d_total.col(k).clone()).collect()).rank()
        };
        let ranks: Vec<usize> = (0..=top).map(rank_from).collect();
        (0..=top)
            .map(|h| {
                let n = self.slice.degree_indices(h).len();
                n - ranks[h] - if h > 0 { ranks[h - 1] } else { 0 }
            })
            .collect()
    }

    /// `∑_p dim E_r^{p,h}` per degree, for the stable page `r = Q + 1`.
    pub fn e_infinity_dims(&self) -> Result<Vec<usize>, SpectralError> {
        let top = self.slice.weights().len();
        let mut out = vec![0; top + 1];
        for ((_, h), page) in self.pages(self.hausdorff + 1)? {
            out[h] += page.reps.len();
        }
        Ok(out)
    }
}

/// Coordinates of cycles modulo boundaries in the representative basis.
struct QuotientCoordinates {
    ech: Echelon,
    nreps: usize,
}

impl QuotientCoordinates {
    fn new(dim: usize, page: &SpectralPage) -> Self {
        let mut ech = Echelon::with_tracking(dim);
        for v in page.reps.iter().chain(page.b.space.basis()) {
            ech.insert(v).expect("representatives complement the boundaries");
        }
        Self { ech, nreps: page.reps.len() }
    }

    fn coordinates(&self, y: &SparseVec) -> Option<SparseVec> {
        Some(self.ech.express(y)?.filter(|i| i < self.nreps))
    }
}

/// All compositions of `j` into positive parts, in lexicographic order.
pub fn compositions(j: usize) -> Vec<Vec<usize>> {
    if j == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=j {
        for mut rest in compositions(j - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Agreement of one `(p, h)` block of the operator identity.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TheoremBlock {
    pub p: usize,
    pub h: usize,
    pub dim: usize,
    pub holds: bool,
}

/// Weight-`r` component of `Π_E₀ d Π_E Π_E₀` against `Π_E₀ ∂_r-operator Π_E₀`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct WeightComponent {
    pub r: usize,
    pub nonzero_entries: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TheoremReport {
    pub tau: usize,
    pub blocks: Vec<TheoremBlock>,
    pub components: Vec<WeightComponent>,
    /// `Π_E₀ d Π_E Π_E₀` has no weight-preserving part.
    pub no_weight_zero_part: bool,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.no_weight_zero_part
            && self.blocks.iter().all(|b| b.holds)
            && self.components.iter().all(|c| c.holds)
    }
}

/// Keeps the entries of `m` that raise the weight by exactly `shift`.
pub fn weight_component(slice: &Slice, m: &SparseMatrix, shift: usize) -> SparseMatrix {
    let cols = m
        .columns()
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let target = slice.elem(j).weight + shift;
            c.filter(|i| slice.elem(i).weight == target)
        })
        .collect();
    SparseMatrix::from_columns(m.nrows(), cols)
}

/// Compares `Π_E₀ d Π_E Π_E₀` with `Π_E₀ (∑_{r=1}^{Q+1} D_r) Π_E₀`, where
/// `D_r = d_r − ∑_{i=1}^{r−1} d_i ∑_{m} (−1)^{m−1} ∑_{|I|=r−i} (d₀⁻¹d)_I`.
pub fn verify_theorem_4_7(rumin: &RuminSlice, spectral: &SpectralSlice) -> TheoremReport {
    let slice = spectral.slice();
    let pi = rumin.proj_e0();
    let lhs = rumin.dc_on_e0();
    let q = spectral.hausdorff_dimension();
    let parts: Vec<SparseMatrix> = (1..=q + 1)
        .into_par_iter()
        .map(|r| &(pi * &spectral.differential_operator_expanded(r)) * pi)
        .collect();
    let rhs = parts.iter().fold(SparseMatrix::zeros(slice.dim(), slice.dim()), |acc, m| &acc + m);
    let blocks = slice
        .blocks()
        .iter()
        .map(|(&(p, h), range)| TheoremBlock {
            p,
            h,
            dim: range.len(),
            holds: range.clone().all(|k| lhs.col(k) == rhs.col(k)),
        })
        .collect();
    let components = parts
        .iter()
        .enumerate()
        .map(|(k, part)| {
            let r = k + 1;
            WeightComponent {
                r,
                nonzero_entries: part.nnz(),
                holds: weight_component(slice, &lhs, r) == *part,
            }
        })
        .collect();
    TheoremReport { tau: slice.tau(), blocks, components, no_weight_zero_part: weight_component(slice, &lhs, 0).is_zero() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bch::CarnotGroup;
    use crate::lie::parse_group_spec;

    fn group(text: &str) -> CarnotGroup {
        CarnotGroup::new(parse_group_spec(text).unwrap()).unwrap()
    }

    fn heis() -> CarnotGroup {
        group("name = h\nlayers = [2, 1]\nbracket X1 X2 = X3\n")
    }

    fn spectral(g: &CarnotGroup, tau: usize) -> SpectralSlice {
        SpectralSlice::new(&CovectorOperators::new(g.algebra()), Arc::new(Slice::new(g, tau)))
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(3), vec![vec![1, 1, 1], vec![1, 2], vec![2, 1], vec![3]]);
        assert_eq!(compositions(5).len(), 16);
    }

    #[test]
    fn first_page_is_kernel_mod_image_of_d0() {
        let g = heis();
        let s = spectral(&g, 3);
        for &(p, h) in s.slice().blocks().keys() {
            let z = s.z_space(1, p, h).unwrap();
            let idx: Vec<usize> = s.slice().block_indices(p, h);
            let d0 = s.d(0).submatrix(&(0..s.slice().dim()).collect::<Vec<_>>(), &idx);
            assert_eq!(z.dim(), idx.len() - d0.rank());
        }
    }

    #[test]
    fn x3_is_not_a_two_cycle() {
        let g = heis();
        let s = spectral(&g, 2);
        let k = s.slice().index_of(&crate::exterior::Wedge::empty(), &vec![0, 0, 1]).unwrap();
        let x = SparseVec::unit(k);
        assert!(s.z_space(1, 0, 0).unwrap().contains(&x));
        assert!(!s.z_space(2, 0, 0).unwrap().contains(&x));
    }

    #[test]
    fn recursion_matches_multi_index_sum() {
        let g = group("name = e\nlayers = [2,1,1]\nbracket X1 X2 = X3\nbracket X1 X3 = X4\n");
        let s = spectral(&g, 4);
        for j in 1..=5 {
            assert_eq!(s.witness_map(j), s.witness_map_expanded(j), "j = {j}");
        }
    }

    #[test]
    fn weight_out_of_range() {
        let s = spectral(&heis(), 2);
        assert!(matches!(s.z_space(1, 5, 0), Err(SpectralError::WeightOutOfRange { .. })));
        assert!(matches!(s.b_space(0, 0, 0), Err(SpectralError::PageIndex)));
    }

    #[test]
    fn heisenberg_pages_agree_with_filtered_complex() {
        let g = heis();
        for tau in 0..4 {
            let s = spectral(&g, tau);
            for r in 1..=5 {
                for &(p, h) in s.slice().blocks().keys() {
                    let page = s.page(r, p, h).unwrap();
                    assert_eq!(page.reps.len(), s.filtered_page_dim(r, p, h), "tau {tau} r {r} p {p} h {h}");
                }
            }
            assert_eq!(s.e_infinity_dims().unwrap(), s.brute_cohomology());
        }
    }

    #[test]
    fn heisenberg_theorem_small() {
        let g = heis();
        let ops = CovectorOperators::new(g.algebra());
        for tau in 0..4 {
            let slice = Arc::new(Slice::new(&g, tau));
            let rumin = RuminSlice::new(&ops, slice.clone());
            let s = SpectralSlice::from_rumin(&rumin, slice);
            assert!(verify_theorem_4_7(&rumin, &s).holds(), "tau {tau}");
        }
    }
}
