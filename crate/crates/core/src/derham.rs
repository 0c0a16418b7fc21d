//! Differential forms with polynomial coefficients, the splitting
//! `d = d₀ + d₁ + … + d_s` by weight increase, and the finite-dimensional
//! slices of fixed total homogeneous weight `τ`.
//!
//! A term `f θ_J` has covector weight `a = w(J)` and total weight
//! `τ = a + deg_w f`. Each `d_i` raises `a` by `i` and lowers the weighted
//! degree of the coefficient by `i`, so every slice is a subcomplex and no
//! truncation error occurs.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::One;
use thiserror::Error;

use crate::bch::CarnotGroup;
use crate::exterior::{ce_differential_monomial, wedges_of_degree, Covector, Wedge};
use crate::linalg::{SparseMatrix, SparseVec, Q};
use crate::poly::{fmt_monomial, monomials_of_weighted_degree, weighted_degree, Exponents, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerhamError {
    #[error("filtration index {p} outside 0..={max}")]
    FiltrationOutOfRange { p: usize, max: usize },
    #[error("slice tau={tau} has a block of dimension {dim}, above the cap {cap}")]
    BlockTooLarge { tau: usize, dim: usize, cap: usize },
}

/// A form `∑_J f_J θ_J` with polynomial coefficients in exponential
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyForm {
    nvars: usize,
    terms: BTreeMap<Wedge, Poly>,
}

impl PolyForm {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn scalar(f: Poly) -> Self {
        Self::term(f, Wedge::empty())
    }

    pub fn term(f: Poly, w: Wedge) -> Self {
        let mut out = Self::zero(f.nvars());
        out.add_term(w, f);
        out
    }

    /// A left-invariant form, constant coefficients.
    pub fn from_covector(nvars: usize, c: &Covector) -> Self {
        let mut out = Self::zero(nvars);
        for (w, q) in c.terms() {
            out.add_term(w.clone(), Poly::constant(nvars, q.clone()));
        }
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, w: Wedge, f: Poly) {
        if f.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(f);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &f;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Wedge, &Poly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Wedge) -> Poly {
        self.terms.get(w).cloned().unwrap_or_else(|| Poly::zero(self.nvars))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &PolyForm) -> PolyForm {
        let mut out = self.clone();
        for (w, f) in &other.terms {
            out.add_term(w.clone(), f.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolyForm) -> PolyForm {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> PolyForm {
        let mut out = PolyForm::zero(self.nvars);
        for (w, f) in &self.terms {
            out.add_term(w.clone(), f.scale(c));
        }
        out
    }

    /// Multiplies every coefficient by the scalar polynomial `g`.
    pub fn mul_scalar(&self, g: &Poly) -> PolyForm {
        let mut out = PolyForm::zero(self.nvars);
        for (w, f) in &self.terms {
            out.add_term(w.clone(), f * g);
        }
        out
    }

    /// The projection `(α)_a` onto covector weight `a`.
    pub fn weight_component(&self, g: &CarnotGroup, a: usize) -> PolyForm {
        self.filter_terms(|w| w.weight(g.algebra()) == a)
    }

    pub fn degree_component(&self, h: usize) -> PolyForm {
        self.filter_terms(|w| w.degree() == h)
    }

    fn filter_terms<F: Fn(&Wedge) -> bool>(&self, keep: F) -> PolyForm {
        PolyForm {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(w, _)| keep(w)).map(|(w, f)| (w.clone(), f.clone())).collect(),
        }
    }

    /// The part of total homogeneous weight `τ`.
    pub fn tau_component(&self, g: &CarnotGroup, tau: usize) -> PolyForm {
        let weights = g.algebra().weights();
        let mut out = PolyForm::zero(self.nvars);
        for (w, f) in &self.terms {
            let a = w.weight(g.algebra());
            let mut part = Poly::zero(self.nvars);
            for (e, c) in f.terms() {
                if a + weighted_degree(e, weights) == tau {
                    part.add_term(e.clone(), c.clone());
                }
            }
            out.add_term(w.clone(), part);
        }
        out
    }

    /// Total weights present among the terms.
    pub fn taus(&self, g: &CarnotGroup) -> Vec<usize> {
        let weights = g.algebra().weights();
        let mut out: Vec<usize> = self
            .terms
            .iter()
            .flat_map(|(w, f)| {
                let a = w.weight(g.algebra());
                f.terms().map(move |(e, _)| a + weighted_degree(e, weights)).collect::<Vec<_>>()
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Applies a coefficient-linear operator given on wedge monomials.
    pub fn map_covectors<F: FnMut(&Wedge) -> Covector>(&self, mut op: F) -> PolyForm {
        let mut out = PolyForm::zero(self.nvars);
        for (w, f) in &self.terms {
            for (w2, c) in op(w).terms() {
                out.add_term(w2.clone(), f.scale(c));
            }
        }
        out
    }
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, p)| if w.degree() == 0 { format!("({p})") } else { format!("({p}) {w}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `∑_l (X_l f) θ_l ∧ θ_J` restricted to `X_l ∈ V_i`.
fn horizontal_part(g: &CarnotGroup, i: usize, form: &PolyForm) -> PolyForm {
    let mut out = PolyForm::zero(form.nvars());
    for l in g.algebra().layer(i) {
        let field = g.field(l);
        for (w, f) in form.terms() {
            let Some((neg, w2)) = w.prepend(l) else { continue };
            let xf = field.apply(f);
            out.add_term(w2, if neg { -&xf } else { xf });
        }
    }
    out
}

/// The exterior differential, computed as `d(f θ_J) = df ∧ θ_J + f dθ_J`
/// with `df = ∑_l (X_l f) θ_l`.
pub fn d_full(g: &CarnotGroup, form: &PolyForm) -> PolyForm {
    let mut out = PolyForm::zero(form.nvars());
    for (w, f) in form.terms() {
        for l in 0..g.dim() {
            let xf = g.field(l).apply(f);
            if xf.is_zero() {
                continue;
            }
            if let Some((neg, w2)) = w.prepend(l) {
                out.add_term(w2, if neg { -&xf } else { xf });
            }
        }
        for (w2, c) in ce_differential_monomial(g.algebra(), w).terms() {
            out.add_term(w2.clone(), f.scale(c));
        }
    }
    out
}

/// The part of `d` that raises the covector weight by exactly `i`.
/// `d₀` acts on the covector part only; `d_i = 0` for `i > s`.
pub fn d_component(g: &CarnotGroup, i: usize, form: &PolyForm) -> PolyForm {
    if i == 0 {
        form.map_covectors(|w| ce_differential_monomial(g.algebra(), w))
    } else if i <= g.step() {
        horizontal_part(g, i, form)
    } else {
        PolyForm::zero(form.nvars())
    }
}

/// A basis element `x^e θ_J` of a slice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SliceElem {
    pub degree: usize,
    pub weight: usize,
    pub wedge: Wedge,
    pub mono: Exponents,
}

impl fmt::Display for SliceElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = fmt_monomial(&self.mono, &Q::one());
        match (m.as_str(), self.wedge.degree()) {
            (_, 0) => write!(f, "{m}"),
            ("1", _) => write!(f, "{}", self.wedge),
            _ => write!(f, "{m} {}", self.wedge),
        }
    }
}

/// Dimensions of the `(p, h)` blocks of the slice `τ` without assembling it.
pub fn slice_block_dims(g: &CarnotGroup, tau: usize) -> BTreeMap<(usize, usize), usize> {
    let alg = g.algebra();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut out = BTreeMap::new();
    for h in 0..=alg.dim() {
        for w in wedges_of_degree(alg.dim(), h) {
            let a = w.weight(alg);
            if a > tau {
                continue;
            }
            let m = *counts.entry(tau - a).or_insert_with(|| monomials_of_weighted_degree(alg.weights(), tau - a).len());
            if m > 0 {
                *out.entry((a, h)).or_insert(0) += m;
            }
        }
    }
    out
}

/// The subcomplex of forms of total weight `τ`, with an enumerated basis and
/// the matrices of `d₀ … d_s`.
///
/// Basis order: degree `h`, then weight `p`, then wedge (lexicographic), then
/// coefficient monomial (decreasing lexicographic), so every `(p, h)` block is
/// a contiguous index range.
#[derive(Debug)]
pub struct Slice {
    tau: usize,
    nvars: usize,
    hausdorff: usize,
    weights: Vec<usize>,
    elems: Vec<SliceElem>,
    index: HashMap<(Wedge, Exponents), usize>,
    blocks: BTreeMap<(usize, usize), std::ops::Range<usize>>,
    d: Vec<SparseMatrix>,
}

impl Slice {
    pub fn new(g: &CarnotGroup, tau: usize) -> Slice {
        let alg = g.algebra();
        let n = alg.dim();
        let mut elems = Vec::new();
        let mut blocks = BTreeMap::new();
        let mut monos: BTreeMap<usize, Vec<Exponents>> = BTreeMap::new();
        for h in 0..=n {
            let mut by_weight: BTreeMap<usize, Vec<Wedge>> = BTreeMap::new();
            for w in wedges_of_degree(n, h) {
                let a = w.weight(alg);
                if a <= tau {
                    by_weight.entry(a).or_default().push(w);
                }
            }
            for (p, wedges) in by_weight {
                let ms = monos.entry(tau - p).or_insert_with(|| monomials_of_weighted_degree(alg.weights(), tau - p));
                if ms.is_empty() {
                    continue;
                }
                let start = elems.len();
                for w in wedges {
                    for m in ms.iter() {
                        elems.push(SliceElem { degree: h, weight: p, wedge: w.clone(), mono: m.clone() });
                    }
                }
                blocks.insert((p, h), start..elems.len());
            }
        }
        let index = elems.iter().enumerate().map(|(k, e)| ((e.wedge.clone(), e.mono.clone()), k)).collect();
        let mut slice = Slice {
            tau,
            nvars: n,
            hausdorff: alg.hausdorff_dimension(),
            weights: alg.weights().to_vec(),
            elems,
            index,
            blocks,
            d: Vec::new(),
        };
        let d = (0..=g.step())
            .map(|i| {
                let cols = (0..slice.dim())
                    .map(|k| {
                        let img = d_component(g, i, &slice.basis_form(k));
                        slice.coordinates(&img).expect("d_i preserves the total weight")
                    })
                    .collect();
                SparseMatrix::from_columns(slice.dim(), cols)
            })
            .collect();
        slice.d = d;
        slice
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.elems.len()
    }

    pub fn hausdorff_dimension(&self) -> usize {
        self.hausdorff
    }

    /// Weights of the coordinates, equal to the weights of the `θ_l`.
    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    pub fn step(&self) -> usize {
        self.d.len() - 1
    }

    pub fn elem(&self, k: usize) -> &SliceElem {
        &self.elems[k]
    }

    pub fn elems(&self) -> &[SliceElem] {
        &self.elems
    }

    pub fn index_of(&self, w: &Wedge, mono: &Exponents) -> Option<usize> {
        self.index.get(&(w.clone(), mono.clone())).copied()
    }

    /// Index range of the block `Ω_τ^{p, h−p}` (empty if absent).
    pub fn block(&self, p: usize, h: usize) -> std::ops::Range<usize> {
        self.blocks.get(&(p, h)).cloned().unwrap_or(0..0)
    }

    pub fn block_indices(&self, p: usize, h: usize) -> Vec<usize> {
        self.block(p, h).collect()
    }

    /// Nonempty blocks keyed by `(p, h)`.
    pub fn blocks(&self) -> &BTreeMap<(usize, usize), std::ops::Range<usize>> {
        &self.blocks
    }

    pub fn degree_indices(&self, h: usize) -> Vec<usize> {
        self.blocks.iter().filter(|((_, hh), _)| *hh == h).flat_map(|(_, r)| r.clone()).collect()
    }

    /// Indices of `(F_p Ω)_τ` in degree `h`: blocks of weight `≥ p`.
    pub fn filtration_indices(&self, p: usize, h: usize) -> Vec<usize> {
        self.blocks.iter().filter(|((pp, hh), _)| *hh == h && *pp >= p).flat_map(|(_, r)| r.clone()).collect()
    }

    /// Matrix of `d_i` on the whole slice (zero for `i > s`).
    pub fn d(&self, i: usize) -> SparseMatrix {
        self.d.get(i).cloned().unwrap_or_else(|| SparseMatrix::zeros(self.dim(), self.dim()))
    }

    pub fn d_ref(&self, i: usize) -> Option<&SparseMatrix> {
        self.d.get(i)
    }

    /// Matrix of `d = ∑ d_i`.
    pub fn d_total(&self) -> SparseMatrix {
        self.d.iter().skip(1).fold(self.d[0].clone(), |acc, m| &acc + m)
    }

    pub fn basis_form(&self, k: usize) -> PolyForm {
        let e = &self.elems[k];
        PolyForm::term(Poly::monomial(e.mono.clone(), Q::one()), e.wedge.clone())
    }

    pub fn to_form(&self, v: &SparseVec) -> PolyForm {
        let mut out = PolyForm::zero(self.nvars);
        for (k, c) in v.iter() {
            let e = &self.elems[k];
            out.add_term(e.wedge.clone(), Poly::monomial(e.mono.clone(), c.clone()));
        }
        out
    }

    /// Coordinates of a form lying in the slice, `None` otherwise.
    pub fn coordinates(&self, form: &PolyForm) -> Option<SparseVec> {
        let mut entries = Vec::new();
        for (w, f) in form.terms() {
            for (e, c) in f.terms() {
                entries.push((*self.index.get(&(w.clone(), e.clone()))?, c.clone()));
            }
        }
        Some(SparseVec::from_entries(entries))
    }

    /// Lifts a coefficient-linear operator, given per wedge monomial, to a
    /// matrix on the slice.
    pub fn lift_covector_operator<F: FnMut(&Wedge) -> Covector>(&self, mut op: F) -> SparseMatrix {
        let mut cache: HashMap<Wedge, Covector> = HashMap::new();
        let cols = self
            .elems
            .iter()
            .map(|e| {
                let img = cache.entry(e.wedge.clone()).or_insert_with(|| op(&e.wedge));
                SparseVec::from_entries(img.terms().map(|(w, c)| {
                    let k = self.index[&(w.clone(), e.mono.clone())];
                    (k, c.clone())
                }))
            })
            .collect();
        SparseMatrix::from_columns(self.dim(), cols)
    }
}

/// Populate-once cache of assembled slices.
#[derive(Debug)]
pub struct SliceCache {
    group: Arc<CarnotGroup>,
    slices: RwLock<BTreeMap<usize, Arc<Slice>>>,
}

impl SliceCache {
    pub fn new(group: Arc<CarnotGroup>) -> Self {
        Self { group, slices: RwLock::new(BTreeMap::new()) }
    }

    pub fn group(&self) -> &CarnotGroup {
        &self.group
    }

    pub fn get(&self, tau: usize) -> Arc<Slice> {
        if let Some(s) = self.slices.read().expect("slice cache poisoned").get(&tau) {
            return Arc::clone(s);
        }
        let built = Arc::new(Slice::new(&self.group, tau));
        let mut w = self.slices.write().expect("slice cache poisoned");
        Arc::clone(w.entry(tau).or_insert(built))
    }
}

/// Basis of `(F_p Ω)_τ`: all slice elements of weight `≥ p`, every degree.
pub fn filtration_basis(g: &CarnotGroup, tau: usize, p: usize) -> Result<Vec<SliceElem>, DerhamError> {
    let max = g.hausdorff_dimension() + 1;
    if p > max {
        return Err(DerhamError::FiltrationOutOfRange { p, max });
    }
    Ok(Slice::new(g, tau).elems.into_iter().filter(|e| e.weight >= p).collect())
}

/// Outcome of one multicomplex identity `∑_{i+j=n} d_i d_j = 0` on a slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub tau: usize,
    pub n: usize,
    pub slice_dim: usize,
    pub holds: bool,
    /// A basis element on which the identity fails.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MulticomplexReport {
    pub checks: Vec<IdentityCheck>,
}

impl MulticomplexReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Checks `∑_{i+j=n} d_i d_j = 0` for `n = 0..=2s` on one slice.
pub fn multicomplex_identities(slice: &Slice) -> Vec<IdentityCheck> {
    let s = slice.step();
    (0..=2 * s)
        .map(|n| {
            let mut sum = SparseMatrix::zeros(slice.dim(), slice.dim());
            for i in n.saturating_sub(s)..=n.min(s) {
                sum = &sum + &(slice.d_ref(i).unwrap() * slice.d_ref(n - i).unwrap());
            }
            let witness = sum.columns().iter().position(|c| !c.is_zero()).map(|k| slice.elem(k).to_string());
            IdentityCheck { tau: slice.tau(), n, slice_dim: slice.dim(), holds: witness.is_none(), witness }
        })
        .collect()
}

/// Multicomplex identities on every slice `τ ≤ τ_max`.
pub fn multicomplex_check(g: &CarnotGroup, tau_max: usize) -> MulticomplexReport {
    let checks = (0..=tau_max).flat_map(|tau| multicomplex_identities(&Slice::new(g, tau))).collect();
    MulticomplexReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::parse_group_spec;
    use crate::linalg::{q, qi};

    fn heis() -> CarnotGroup {
        CarnotGroup::new(parse_group_spec("name = h\nlayers = [2, 1]\nbracket X1 X2 = X3\n").unwrap()).unwrap()
    }

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    fn w(idx: &[usize]) -> Wedge {
        Wedge::from_sorted(idx.to_vec())
    }

    #[test]
    fn d_of_x3_in_heisenberg() {
        let g = heis();
        let f = PolyForm::scalar(x(2));
        let expected = PolyForm::term(x(1).scale(&q(-1, 2)), w(&[0]))
            .add(&PolyForm::term(x(0).scale(&q(1, 2)), w(&[1])))
            .add(&PolyForm::term(Poly::one(3), w(&[2])));
        assert_eq!(d_full(&g, &f), expected);
        assert_eq!(
            d_component(&g, 1, &f),
            PolyForm::term(x(1).scale(&q(-1, 2)), w(&[0])).add(&PolyForm::term(x(0).scale(&q(1, 2)), w(&[1])))
        );
        assert_eq!(d_component(&g, 2, &f), PolyForm::term(Poly::one(3), w(&[2])));
        assert!(d_component(&g, 3, &f).is_zero());
    }

    #[test]
    fn d_of_theta3_and_constants() {
        let g = heis();
        let t3 = PolyForm::term(Poly::one(3), w(&[2]));
        assert_eq!(d_full(&g, &t3), PolyForm::term(Poly::constant(3, qi(-1)), w(&[0, 1])));
        assert!(d_full(&g, &PolyForm::scalar(Poly::one(3))).is_zero());
        let x1t3 = PolyForm::term(x(0), w(&[2]));
        assert_eq!(d_component(&g, 0, &x1t3), PolyForm::term(x(0).scale(&qi(-1)), w(&[0, 1])));
    }

    #[test]
    fn heisenberg_filtration_example() {
        let g = heis();
        let f: Vec<SliceElem> =
            filtration_basis(&g, 2, 2).unwrap().into_iter().filter(|e| e.degree == 1).collect();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].wedge, w(&[2]));
        assert_eq!(filtration_basis(&g, 3, 0).unwrap().len(), Slice::new(&g, 3).dim());
        assert!(filtration_basis(&g, 3, 5).unwrap().is_empty());
        assert!(matches!(filtration_basis(&g, 3, 6), Err(DerhamError::FiltrationOutOfRange { .. })));
    }

    #[test]
    fn block_dims_match_assembled_slice() {
        let g = heis();
        for tau in 0..5 {
            let s = Slice::new(&g, tau);
            let dims = slice_block_dims(&g, tau);
            for (&(p, h), r) in s.blocks() {
                assert_eq!(dims[&(p, h)], r.len());
            }
            assert_eq!(dims.values().sum::<usize>(), s.dim());
        }
    }

    #[test]
    fn heisenberg_multicomplex_small() {
        assert!(multicomplex_check(&heis(), 4).all_hold());
    }
}
