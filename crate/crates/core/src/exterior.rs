//! The exterior algebra `Λ*𝔤*` over the dual basis `θ₁ … θ_n`, with the
//! weight bigrading, the inner product making monomials orthonormal, and the
//! Chevalley–Eilenberg differential on left-invariant forms.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::linalg::{fmt_q, Q};
use crate::lie::StratifiedAlgebra;

/// A wedge monomial `θ_{j₁} ∧ … ∧ θ_{j_h}` with `j₁ < … < j_h` (0-based).
///
/// Ordered by degree first, then lexicographically on the index tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Wedge(Vec<usize>);

impl Wedge {
    pub fn empty() -> Self {
        Wedge(Vec::new())
    }

    pub fn single(j: usize) -> Self {
        Wedge(vec![j])
    }

    /// Sorts `indices`; returns the permutation sign, or `None` on a repeat.
    pub fn from_unsorted(mut indices: Vec<usize>) -> Option<(bool, Wedge)> {
        let mut negative = false;
        // insertion sort, counting transpositions
        for i in 1..indices.len() {
            let mut k = i;
            while k > 0 && indices[k - 1] > indices[k] {
                indices.swap(k - 1, k);
                negative = !negative;
                k -= 1;
            }
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((negative, Wedge(indices)))
    }

    pub fn from_sorted(indices: Vec<usize>) -> Self {
        assert!(indices.windows(2).all(|w| w[0] < w[1]), "indices must be strictly increasing");
        Wedge(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self, alg: &StratifiedAlgebra) -> usize {
        self.0.iter().map(|&j| alg.weight_of(j)).sum()
    }

    /// `self ∧ other`: `None` if they share an index, else the sign
    /// (`true` = negative) and the merged monomial.
    pub fn wedge(&self, other: &Wedge) -> Option<(bool, Wedge)> {
        let mut merged = Vec::with_capacity(self.0.len() + other.0.len());
        let mut negative = false;
        let (mut a, mut b) = (0, 0);
        while a < self.0.len() || b < other.0.len() {
            if b == other.0.len() || (a < self.0.len() && self.0[a] < other.0[b]) {
                merged.push(self.0[a]);
                a += 1;
            } else if a < self.0.len() && self.0[a] == other.0[b] {
                return None;
            } else {
                // other[b] jumps over the remaining entries of self
                if (self.0.len() - a) % 2 == 1 {
                    negative = !negative;
                }
                merged.push(other.0[b]);
                b += 1;
            }
        }
        Some((negative, Wedge(merged)))
    }

    /// `θ_j ∧ self`.
    pub fn prepend(&self, j: usize) -> Option<(bool, Wedge)> {
        Wedge::single(j).wedge(self)
    }
}

impl Ord for Wedge {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Wedge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Wedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|j| format!("t{}", j + 1)).collect();
        write!(f, "{}", parts.join("^"))
    }
}

/// All `h`-element subsets of `{0..n}` in lexicographic order.
pub fn wedges_of_degree(n: usize, h: usize) -> Vec<Wedge> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Wedge>) {
        if left == 0 {
            out.push(Wedge(cur.clone()));
            return;
        }
        for j in start..=(n - left) {
            cur.push(j);
            rec(j + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if h <= n {
        rec(0, n, h, &mut Vec::new(), &mut out);
    }
    out
}

/// The block `Λ^{a,b}𝔤*` of `h = a + b` covectors of weight `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightBlock {
    pub weight: usize,
    pub degree: usize,
    pub basis: Vec<Wedge>,
}

impl WeightBlock {
    /// Complement degree `b = h − a` (may be negative).
    pub fn complement_degree(&self) -> i64 {
        self.degree as i64 - self.weight as i64
    }
}

/// Nonempty weight blocks of `Λ^h𝔤*`, by increasing weight.
pub fn weight_blocks(alg: &StratifiedAlgebra, h: usize) -> Vec<WeightBlock> {
    let mut by_weight: BTreeMap<usize, Vec<Wedge>> = BTreeMap::new();
    for w in wedges_of_degree(alg.dim(), h) {
        by_weight.entry(w.weight(alg)).or_default().push(w);
    }
    by_weight.into_iter().map(|(weight, basis)| WeightBlock { weight, degree: h, basis }).collect()
}

/// The block of weight `a` in degree `h` (possibly empty).
pub fn weight_block(alg: &StratifiedAlgebra, a: usize, h: usize) -> WeightBlock {
    let basis = wedges_of_degree(alg.dim(), h).into_iter().filter(|w| w.weight(alg) == a).collect();
    WeightBlock { weight: a, degree: h, basis }
}

/// Weight of a covector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Weight {
    /// Every term has this weight (the zero covector has weight 0).
    Pure(usize),
    /// Decomposition into pure-weight parts.
    Mixed(BTreeMap<usize, Covector>),
}

/// A left-invariant form: finite sum of wedge monomials with rational
/// coefficients, no zero coefficients stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Covector {
    terms: BTreeMap<Wedge, Q>,
}

impl Covector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Wedge::empty(), Q::one())
    }

    pub fn theta(j: usize) -> Self {
        Self::monomial(Wedge::single(j), Q::one())
    }

    pub fn monomial(w: Wedge, c: Q) -> Self {
        let mut out = Self::zero();
        out.add_term(w, c);
        out
    }

    pub fn add_term(&mut self, w: Wedge, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Wedge, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Wedge) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common degree of all terms, if any.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Wedge::degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, other: &Covector) -> Covector {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Covector {
        if c.is_zero() {
            return Covector::zero();
        }
        Covector { terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect() }
    }

    pub fn wedge(&self, other: &Covector) -> Covector {
        let mut out = Covector::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if let Some((neg, w)) = a.wedge(b) {
                    let c = x * y;
                    out.add_term(w, if neg { -c } else { c });
                }
            }
        }
        out
    }

    pub fn weight(&self, alg: &StratifiedAlgebra) -> Weight {
        let mut parts: BTreeMap<usize, Covector> = BTreeMap::new();
        for (w, c) in &self.terms {
            parts.entry(w.weight(alg)).or_default().add_term(w.clone(), c.clone());
        }
        match parts.len() {
            0 => Weight::Pure(0),
            1 => Weight::Pure(*parts.keys().next().unwrap()),
            _ => Weight::Mixed(parts),
        }
    }

    /// Inner product making the monomial basis orthonormal.
    pub fn inner_product(&self, other: &Covector) -> Q {
        self.terms.iter().filter_map(|(w, x)| other.terms.get(w).map(|y| x * y)).sum()
    }
}

impl fmt::Display for Covector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("{} * {}", fmt_q(c), w)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `dθ_k = −∑_{i<j} c_{ij}^k θ_i ∧ θ_j`.
pub fn ce_differential_theta(alg: &StratifiedAlgebra, k: usize) -> Covector {
    let mut out = Covector::zero();
    for i in 0..alg.dim() {
        for j in (i + 1)..alg.dim() {
            let c = alg.structure_constant(i, j, k);
            if !c.is_zero() {
                out.add_term(Wedge(vec![i, j]), -c);
            }
        }
    }
    out
}

/// Chevalley–Eilenberg differential of a wedge monomial, by the Leibniz rule
/// `d(θ_{j₁}∧…∧θ_{j_h}) = ∑_m (−1)^{m} θ_{j₁}∧…∧dθ_{j_m}∧…∧θ_{j_h}` (m from 0).
pub fn ce_differential_monomial(alg: &StratifiedAlgebra, w: &Wedge) -> Covector {
    let idx = w.indices();
    let mut out = Covector::zero();
    for m in 0..idx.len() {
        let left = Covector::monomial(Wedge(idx[..m].to_vec()), Q::one());
        let right = Covector::monomial(Wedge(idx[m + 1..].to_vec()), Q::one());
        let term = left.wedge(&ce_differential_theta(alg, idx[m])).wedge(&right);
        out = if m % 2 == 0 { out.add(&term) } else { out.add(&term.scale(&-Q::one())) };
    }
    out
}

/// Chevalley–Eilenberg differential on left-invariant forms.
pub fn ce_differential(alg: &StratifiedAlgebra, x: &Covector) -> Covector {
    let mut out = Covector::zero();
    for (w, c) in x.terms() {
        out = out.add(&ce_differential_monomial(alg, w).scale(c));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::parse_group_spec;
    use crate::linalg::qi;

    fn heis() -> StratifiedAlgebra {
        parse_group_spec("name = h\nlayers = [2, 1]\nbracket X1 X2 = X3\n").unwrap()
    }

    #[test]
    fn wedge_signs() {
        let t1 = Covector::theta(0);
        let t2 = Covector::theta(1);
        assert_eq!(t1.wedge(&t2), Covector::monomial(Wedge(vec![0, 1]), qi(1)));
        assert_eq!(t2.wedge(&t1), Covector::monomial(Wedge(vec![0, 1]), qi(-1)));
        assert!(t1.wedge(&t1).is_zero());
        let t13 = Covector::monomial(Wedge(vec![0, 2]), qi(1));
        // t2 ∧ (t1∧t3) = −t1∧t2∧t3
        assert_eq!(t2.wedge(&t13), Covector::monomial(Wedge(vec![0, 1, 2]), qi(-1)));
    }

    #[test]
    fn weights() {
        let a = heis();
        assert_eq!(Covector::theta(2).weight(&a), Weight::Pure(2));
        assert_eq!(Covector::theta(0).wedge(&Covector::theta(2)).weight(&a), Weight::Pure(3));
        assert_eq!(Covector::one().weight(&a), Weight::Pure(0));
        match Covector::theta(0).add(&Covector::theta(2)).weight(&a) {
            Weight::Mixed(parts) => {
                assert_eq!(parts.keys().copied().collect::<Vec<_>>(), vec![1, 2]);
                assert_eq!(parts[&1], Covector::theta(0));
            }
            other => panic!("expected mixed, got {other:?}"),
        }
    }

    #[test]
    fn inner_products() {
        let t12 = Covector::monomial(Wedge(vec![0, 1]), qi(1));
        assert_eq!(t12.inner_product(&t12), qi(1));
        assert_eq!(Covector::theta(0).inner_product(&Covector::theta(2)), qi(0));
        let x = Covector::theta(0).scale(&qi(2)).add(&Covector::theta(1));
        assert_eq!(x.inner_product(&Covector::theta(1)), qi(1));
    }

    #[test]
    fn ce_differential_heisenberg() {
        let a = heis();
        assert_eq!(ce_differential(&a, &Covector::theta(2)), Covector::monomial(Wedge(vec![0, 1]), qi(-1)));
        assert!(ce_differential(&a, &Covector::theta(0)).is_zero());
        let abelian = parse_group_spec("name = r3\nlayers = [3]\n").unwrap();
        for h in 0..=3 {
            for w in wedges_of_degree(3, h) {
                assert!(ce_differential_monomial(&abelian, &w).is_zero());
            }
        }
    }

    #[test]
    fn pretty_printer() {
        let x = Covector::monomial(Wedge(vec![0, 1]), qi(-1)).add(&Covector::theta(2));
        assert_eq!(x.to_string(), "1 * t3 + -1 * t1^t2");
    }

    #[test]
    fn lex_enumeration() {
        let w: Vec<String> = wedges_of_degree(4, 2).iter().map(Wedge::to_string).collect();
        assert_eq!(w, ["t1^t2", "t1^t3", "t1^t4", "t2^t3", "t2^t4", "t3^t4"]);
    }
}
