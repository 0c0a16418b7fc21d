//! `d₀⁻¹`, the projections `Π_E₀` and `Π_E`, the operator `P`, the spaces
//! `E₀^h` and the differential `d_c`, as exact matrices.
//!
//! `d₀`, `d₀⁻¹` and `Π_E₀` act on the covector part only, so they are built
//! once per covector block `Λ^{a,b}𝔤*` and lifted to slices monomial by
//! monomial. `P`, `Π_E` and `d_c` are products of slice matrices.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::Zero;

use crate::derham::{PolyForm, Slice};
use crate::exterior::{ce_differential_monomial, weight_blocks, Covector, Wedge};
use crate::lie::StratifiedAlgebra;
use crate::linalg::{pseudo_inverse, Echelon, SparseMatrix, SparseVec, Subspace, Q};
use crate::poly::monomials_of_weighted_degree;

/// Operators on one covector block `Λ^{a, h−a}𝔤*`.
#[derive(Clone, Debug)]
pub struct CovectorBlock {
    pub weight: usize,
    pub degree: usize,
    pub basis: Vec<Wedge>,
    /// `d₀` into the block of the same weight in degree `h + 1`.
    pub d0: SparseMatrix,
    /// `d₀⁻¹` from this block into the block of the same weight in degree `h − 1`.
    pub d0_pinv: SparseMatrix,
    pub proj_e0: SparseMatrix,
}

/// Result of the per-block algebraic checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovectorBlockCheck {
    pub weight: usize,
    pub degree: usize,
    pub dim: usize,
    pub pinv_identities: bool,
    pub idempotent: bool,
    pub self_adjoint: bool,
    pub kills_d0: bool,
}

impl CovectorBlockCheck {
    pub fn holds(&self) -> bool {
        self.pinv_identities && self.idempotent && self.self_adjoint && self.kills_d0
    }
}

/// `d₀`, `d₀⁻¹` and `Π_E₀` on every covector block of an algebra.
#[derive(Clone, Debug)]
pub struct CovectorOperators {
    dim: usize,
    blocks: BTreeMap<(usize, usize), CovectorBlock>,
    /// Weight and position within its block of every wedge monomial.
    position: HashMap<Wedge, (usize, usize)>,
}

fn block_vector(position: &HashMap<Wedge, (usize, usize)>, c: &Covector) -> SparseVec {
    SparseVec::from_entries(c.terms().map(|(w, x)| (position[w].1, x.clone())))
}

impl CovectorOperators {
    pub fn new(alg: &StratifiedAlgebra) -> Self {
        let n = alg.dim();
        let mut bases: BTreeMap<(usize, usize), Vec<Wedge>> = BTreeMap::new();
        let mut position = HashMap::new();
        for h in 0..=n {
            for b in weight_blocks(alg, h) {
                for (k, w) in b.basis.iter().enumerate() {
                    position.insert(w.clone(), (b.weight, k));
                }
                bases.insert((b.weight, h), b.basis);
            }
        }
        let size = |a: usize, h: usize| bases.get(&(a, h)).map_or(0, Vec::len);
        let d0: BTreeMap<(usize, usize), SparseMatrix> = bases
            .iter()
            .map(|(&(a, h), basis)| {
                let cols = basis
                    .iter()
                    .map(|w| {
                        let img = ce_differential_monomial(alg, w);
                        debug_assert!(img.terms().all(|(v, _)| v.weight(alg) == a));
                        block_vector(&position, &img)
                    })
                    .collect();
                ((a, h), SparseMatrix::from_columns(size(a, h + 1), cols))
            })
            .collect();
        let pinv: BTreeMap<(usize, usize), SparseMatrix> = bases
            .keys()
            .map(|&(a, h)| {
                let m = match h.checked_sub(1).and_then(|g| d0.get(&(a, g))) {
                    Some(prev) => pseudo_inverse(prev),
                    None => SparseMatrix::zeros(0, size(a, h)),
                };
                ((a, h), m)
            })
            .collect();
        let blocks = bases
            .into_iter()
            .map(|((a, h), basis)| {
                let m = basis.len();
                let mut proj = SparseMatrix::identity(m);
                if let Some(prev) = h.checked_sub(1).and_then(|g| d0.get(&(a, g))) {
                    proj = &proj - &(prev * &pinv[&(a, h)]);
                }
                if let Some(next) = pinv.get(&(a, h + 1)) {
                    proj = &proj - &(next * &d0[&(a, h)]);
                }
                let block = CovectorBlock {
                    weight: a,
                    degree: h,
                    basis,
                    d0: d0[&(a, h)].clone(),
                    d0_pinv: pinv[&(a, h)].clone(),
                    proj_e0: proj,
                };
                ((a, h), block)
            })
            .collect();
        Self { dim: n, blocks, position }
    }

    pub fn blocks(&self) -> impl Iterator<Item = &CovectorBlock> {
        self.blocks.values()
    }

    pub fn block(&self, weight: usize, degree: usize) -> Option<&CovectorBlock> {
        self.blocks.get(&(weight, degree))
    }

    fn locate(&self, w: &Wedge) -> (&CovectorBlock, usize) {
        let (a, k) = self.position[w];
        (&self.blocks[&(a, w.degree())], k)
    }

    fn column_to_covector(basis: Option<&CovectorBlock>, col: &SparseVec) -> Covector {
        let mut out = Covector::zero();
        if let Some(b) = basis {
            for (i, x) in col.iter() {
                out.add_term(b.basis[i].clone(), x.clone());
            }
        }
        out
    }

    pub fn d0_pinv_wedge(&self, w: &Wedge) -> Covector {
        if w.degree() == 0 {
            return Covector::zero();
        }
        let (b, k) = self.locate(w);
        Self::column_to_covector(self.block(b.weight, w.degree() - 1), b.d0_pinv.col(k))
    }

    pub fn proj_e0_wedge(&self, w: &Wedge) -> Covector {
        let (b, k) = self.locate(w);
        Self::column_to_covector(Some(b), b.proj_e0.col(k))
    }

    fn linear<F: Fn(&Wedge) -> Covector>(c: &Covector, op: F) -> Covector {
        c.terms().fold(Covector::zero(), |acc, (w, x)| acc.add(&op(w).scale(x)))
    }

    pub fn d0_pinv(&self, c: &Covector) -> Covector {
        Self::linear(c, |w| self.d0_pinv_wedge(w))
    }

    pub fn proj_e0(&self, c: &Covector) -> Covector {
        Self::linear(c, |w| self.proj_e0_wedge(w))
    }

    /// `d₀⁻¹` on forms, acting on the covector part.
    pub fn d0_pinv_form(&self, form: &PolyForm) -> PolyForm {
        form.map_covectors(|w| self.d0_pinv_wedge(w))
    }

    /// `Π_E₀` on forms, acting on the covector part.
    pub fn proj_e0_form(&self, form: &PolyForm) -> PolyForm {
        form.map_covectors(|w| self.proj_e0_wedge(w))
    }

    /// An orthogonal basis of `E₀^h` split by weight.
    pub fn e0_basis(&self, h: usize) -> BTreeMap<usize, Vec<Covector>> {
        self.blocks
            .values()
            .filter(|b| b.degree == h)
            .filter_map(|b| {
                let vecs = gram_schmidt(Subspace::image(&b.proj_e0).basis());
                let covs: Vec<Covector> = vecs.iter().map(|v| Self::column_to_covector(Some(b), v)).collect();
                (!covs.is_empty()).then_some((b.weight, covs))
            })
            .collect()
    }

    /// `dim E₀^h` for `h = 0..=n`.
    pub fn e0_dims(&self) -> Vec<usize> {
        let mut out = vec![0; self.dim + 1];
        for b in self.blocks.values() {
            out[b.degree] += b.proj_e0.rank();
        }
        out
    }

    pub fn block_checks(&self) -> Vec<CovectorBlockCheck> {
        self.blocks
            .values()
            .map(|b| {
                let pinv_identities = match b.degree.checked_sub(1).and_then(|g| self.block(b.weight, g)) {
                    Some(prev) => {
                        let d = &prev.d0;
                        let dp = &b.d0_pinv;
                        &(d * dp) * d == *d && &(dp * d) * dp == *dp
                    }
                    None => b.d0_pinv.is_zero(),
                };
                let pi = &b.proj_e0;
                let into_block_ok = match b.degree.checked_sub(1).and_then(|g| self.block(b.weight, g)) {
                    Some(prev) => (pi * &prev.d0).is_zero(),
                    None => true,
                };
                CovectorBlockCheck {
                    weight: b.weight,
                    degree: b.degree,
                    dim: b.basis.len(),
                    pinv_identities,
                    idempotent: &(pi * pi) == pi,
                    self_adjoint: pi.transpose() == *pi,
                    kills_d0: into_block_ok && (&b.d0 * pi).is_zero(),
                }
            })
            .collect()
    }
}

/// Orthogonalises a list of independent vectors (no normalisation).
pub fn gram_schmidt(vecs: &[SparseVec]) -> Vec<SparseVec> {
    let mut out: Vec<(SparseVec, Q)> = Vec::new();
    for v in vecs {
        let mut u = v.clone();
        for (w, ww) in &out {
            let c = u.dot(w) / ww;
            if !c.is_zero() {
                u = u.add_scaled(&-c, w);
            }
        }
        if !u.is_zero() {
            let n = u.dot(&u);
            out.push((u, n));
        }
    }
    out.into_iter().map(|(u, _)| u).collect()
}

/// Slice-level Rumin operators.
#[derive(Debug)]
pub struct RuminSlice {
    slice: Arc<Slice>,
    d: SparseMatrix,
    d0_pinv: SparseMatrix,
    proj_e0: SparseMatrix,
    p: SparseMatrix,
    nilpotency: usize,
    proj_e: SparseMatrix,
    dc: SparseMatrix,
}

impl RuminSlice {
    pub fn new(ops: &CovectorOperators, slice: Arc<Slice>) -> Self {
        let n = slice.dim();
        let d = slice.d_total();
        let d0_pinv = slice.lift_covector_operator(|w| ops.d0_pinv_wedge(w));
        let proj_e0 = slice.lift_covector_operator(|w| ops.proj_e0_wedge(w));
        let t = &d0_pinv * &(&d - &slice.d(0));
        // P = ∑ (−T)^k until the power vanishes
        let mut p = SparseMatrix::identity(n);
        let mut power = SparseMatrix::identity(n);
        let mut nilpotency = 0;
        loop {
            nilpotency += 1;
            power = -&(&t * &power);
            if power.is_zero() {
                break;
            }
            p = &p + &power;
        }
        let p_d0inv = &p * &d0_pinv;
        let proj_e = &(&SparseMatrix::identity(n) - &(&d * &p_d0inv)) - &(&p_d0inv * &d);
        let dc = &(&proj_e0 * &d) * &proj_e;
        Self { slice, d, d0_pinv, proj_e0, p, nilpotency, proj_e, dc }
    }

    pub fn slice(&self) -> &Slice {
        &self.slice
    }

    pub fn d(&self) -> &SparseMatrix {
        &self.d
    }

    pub fn d0_pinv(&self) -> &SparseMatrix {
        &self.d0_pinv
    }

    pub fn proj_e0(&self) -> &SparseMatrix {
        &self.proj_e0
    }

    pub fn op_p(&self) -> &SparseMatrix {
        &self.p
    }

    /// Smallest `N` with `[d₀⁻¹(d − d₀)]^N = 0` on the slice.
    pub fn nilpotency(&self) -> usize {
        self.nilpotency
    }

    pub fn proj_e(&self) -> &SparseMatrix {
        &self.proj_e
    }

    /// `Π_E₀ d Π_E` on the whole slice.
    pub fn dc(&self) -> &SparseMatrix {
        &self.dc
    }

    /// `Π_E₀ d Π_E Π_E₀`, i.e. `d_c` precomposed with the projection onto `E₀`.
    pub fn dc_on_e0(&self) -> SparseMatrix {
        &self.dc * &self.proj_e0
    }

    /// A basis of `E₀` in degree `h` inside the slice: products of
    /// coefficient monomials with the orthogonal `E₀` covectors, ordered by
    /// weight, covector, monomial.
    pub fn e0_slice_basis(&self, ops: &CovectorOperators, h: usize) -> Vec<SparseVec> {
        let slice = &self.slice;
        let mut out = Vec::new();
        for (a, covs) in ops.e0_basis(h) {
            if a > slice.tau() {
                continue;
            }
            let monos = monomials_of_weighted_degree(slice.weights(), slice.tau() - a);
            for c in &covs {
                for m in &monos {
                    out.push(SparseVec::from_entries(
                        c.terms().map(|(w, x)| (slice.index_of(w, m).expect("element of the slice"), x.clone())),
                    ));
                }
            }
        }
        out
    }

    /// Matrix of `d_c : E₀^h → E₀^{h+1}` in the bases of
    /// [`RuminSlice::e0_slice_basis`].
    pub fn dc_matrix(&self, ops: &CovectorOperators, h: usize) -> SparseMatrix {
        let src = self.e0_slice_basis(ops, h);
        let dst = self.e0_slice_basis(ops, h + 1);
        let mut ech = Echelon::with_tracking(self.slice.dim());
        for v in &dst {
            ech.insert(v).expect("independent basis");
        }
        let cols = src
            .iter()
            .map(|v| ech.express(&self.dc.apply(v)).expect("d_c lands in E0"))
            .collect();
        SparseMatrix::from_columns(dst.len(), cols)
    }
}
