//! Multivariate polynomials with exact rational coefficients, graded by the
//! weighted degree `∑ e_l · w_l` that realises homogeneity under dilations.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::linalg::{fmt_q, Q};

/// Exponent vector of a monomial.
pub type Exponents = Vec<u16>;

/// Sparse polynomial in a fixed number of variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Q::one())
    }

    pub fn monomial(exps: Exponents, c: Q) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, exps: Exponents, c: Q) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
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

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u16]) -> Q {
        self.terms.get(exps).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * Q::from_integer(e[i].into()));
            }
        }
        out
    }

    /// Sets the variables in `vars` to zero.
    pub fn vanish_on(&self, vars: std::ops::Range<usize>) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[vars.clone()].iter().all(|&k| k == 0))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Keeps variables `vars` (which must be the only ones occurring) and
    /// renumbers them from 0.
    pub fn restrict_to(&self, vars: std::ops::Range<usize>) -> Poly {
        let mut out = Poly::zero(vars.len());
        for (e, c) in &self.terms {
            debug_assert!(e.iter().enumerate().all(|(i, &k)| k == 0 || vars.contains(&i)));
            out.add_term(e[vars.clone()].to_vec(), c.clone());
        }
        out
    }

    /// Embeds into `nvars` variables, shifting variable `i` to `i + offset`.
    pub fn embed(&self, nvars: usize, offset: usize) -> Poly {
        let mut out = Poly::zero(nvars);
        for (e, c) in &self.terms {
            let mut f = vec![0; nvars];
            f[offset..offset + self.nvars].copy_from_slice(e);
            out.add_term(f, c.clone());
        }
        out
    }

    /// Composition `p(q₁, …, q_k)`.
    pub fn substitute(&self, subs: &[Poly]) -> Poly {
        assert_eq!(subs.len(), self.nvars, "one substitution per variable");
        let target = subs.first().map_or(0, Poly::nvars);
        let mut powers: Vec<Vec<Poly>> = subs.iter().map(|s| vec![Poly::one(target), s.clone()]).collect();
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = &powers[i][powers[i].len() - 1] * &subs[i];
                    powers[i].push(next);
                }
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                }
            }
            out = &out + &term;
        }
        out
    }

    pub fn evaluate(&self, point: &[Q]) -> Q {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(point).fold(c.clone(), |acc, (&k, x)| acc * num_traits::pow(x.clone(), k as usize))
            })
            .sum()
    }

    /// Weighted degree if every term has the same one (`Some(0)` for zero).
    pub fn homogeneous_degree(&self, weights: &[usize]) -> Option<usize> {
        let mut it = self.terms.keys().map(|e| weighted_degree(e, weights));
        let Some(first) = it.next() else { return Some(0) };
        it.all(|d| d == first).then_some(first)
    }
}

pub fn weighted_degree(exps: &[u16], weights: &[usize]) -> usize {
    exps.iter().zip(weights).map(|(&e, &w)| e as usize * w).sum()
}

/// All exponent vectors of weighted degree `k`, in decreasing lexicographic
/// order (`x₁^k` first).
pub fn monomials_of_weighted_degree(weights: &[usize], k: usize) -> Vec<Exponents> {
    fn rec(i: usize, left: usize, weights: &[usize], cur: &mut Exponents, out: &mut Vec<Exponents>) {
        if i == weights.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let w = weights[i];
        for e in (0..=left / w).rev() {
            cur[i] = e as u16;
            rec(i + 1, left - e * w, weights, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, k, weights, &mut vec![0; weights.len()], &mut out);
    out
}

/// `3/2*x1^2*x3` style rendering of one monomial with coefficient.
pub fn fmt_monomial(exps: &[u16], c: &Q) -> String {
    let vars: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
        .collect();
    if vars.is_empty() {
        fmt_q(c)
    } else if c.is_one() {
        vars.join("*")
    } else if *c == -Q::one() {
        format!("-{}", vars.join("*"))
    } else {
        format!("{}*{}", fmt_q(c), vars.join("*"))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest monomials first
        let parts: Vec<String> = self.terms.iter().rev().map(|(e, c)| fmt_monomial(e, c)).collect();
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Poly::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let e: Exponents = a.iter().zip(b).map(|(i, j)| i + j).collect();
                out.add_term(e, x * y);
            }
        }
        out
    }
}
