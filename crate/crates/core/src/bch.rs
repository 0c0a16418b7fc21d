//! Group law in exponential coordinates of the first kind and the frame of
//! left-invariant vector fields.
//!
//! The product `x·y = log(exp X · exp Y)` is the Baker–Campbell–Hausdorff
//! series in Dynkin's form, truncated at the step of the algebra (all longer
//! brackets vanish by nilpotency). The left-invariant field `X_l` is the
//! derivative of `x·y` in `y_l` at `y = 0`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::lie::{LieError, StratifiedAlgebra};
use crate::linalg::Q;
use crate::poly::{weighted_degree, Poly};

/// Longest bracket the Dynkin expansion is generated for.
pub const MAX_BCH_ORDER: usize = 8;

/// An element of `𝔤 ⊗ Q[vars]`: one polynomial coefficient per basis vector.
type LieElem = Vec<Poly>;

fn bracket(alg: &StratifiedAlgebra, a: &LieElem, b: &LieElem) -> LieElem {
    let nvars = a[0].nvars();
    let mut out = vec![Poly::zero(nvars); alg.dim()];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() || alg.bracket(i, j).is_empty() {
                continue;
            }
            let prod = ai * bj;
            for (k, c) in alg.bracket(i, j) {
                out[*k] = &out[*k] + &prod.scale(c);
            }
        }
    }
    out
}

fn factorial(n: usize) -> Q {
    (1..=n).fold(Q::one(), |acc, k| acc * Q::from_integer((k as i64).into()))
}

/// Dynkin coefficients of `log(e^X e^Y)` per word in `{X, Y}` (`false` = X),
/// for words up to length `order`. The word `w₁…w_L` stands for the
/// right-nested bracket `[w₁, [w₂, …, [w_{L−1}, w_L]…]]`.
pub fn dynkin_coefficients(order: usize) -> BTreeMap<Vec<bool>, Q> {
    fn rec(
        budget: usize,
        blocks: usize,
        word: &mut Vec<bool>,
        denom: Q,
        out: &mut BTreeMap<Vec<bool>, Q>,
    ) {
        if blocks > 0 {
            let len = word.len();
            // (−1)^{k−1} / (k · L · ∏ r_i! s_i!)
            let sign = if blocks % 2 == 1 { Q::one() } else { -Q::one() };
            let c = sign / (denom.clone() * Q::from_integer(((blocks * len) as i64).into()));
            *out.entry(word.clone()).or_insert_with(Q::zero) += c;
        }
        for m in 1..=budget {
            for r in 0..=m {
                let s = m - r;
                word.extend(std::iter::repeat_n(false, r));
                word.extend(std::iter::repeat_n(true, s));
                let d = denom.clone() * factorial(r) * factorial(s);
                rec(budget - m, blocks + 1, word, d, out);
                word.truncate(word.len() - m);
            }
        }
    }
    let mut out = BTreeMap::new();
    rec(order, 0, &mut Vec::new(), Q::one(), &mut out);
    out.retain(|w, c| !c.is_zero() && !trivially_zero(w));
    out
}

/// A right-nested bracket whose last two letters agree vanishes.
fn trivially_zero(word: &[bool]) -> bool {
    word.len() >= 2 && word[word.len() - 1] == word[word.len() - 2]
}

/// A left-invariant vector field `X_l = ∑_m P_{lm}(x) ∂/∂x_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LIVectorField {
    pub index: usize,
    pub components: Vec<Poly>,
}

impl LIVectorField {
    /// Applies the field as a derivation.
    pub fn apply(&self, g: &Poly) -> Poly {
        let mut out = Poly::zero(g.nvars());
        for (m, pm) in self.components.iter().enumerate() {
            if pm.is_zero() {
                continue;
            }
            let dg = g.derivative(m);
            if !dg.is_zero() {
                out = &out + &(pm * &dg);
            }
        }
        out
    }

    /// Human-readable form, e.g. `d1 - 1/2*x2*d3`.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (m, pm) in self.components.iter().enumerate() {
            if pm.is_zero() {
                continue;
            }
            let coef = pm.to_string();
            if coef == "1" {
                parts.push(format!("d{}", m + 1));
            } else if pm.len() == 1 {
                parts.push(format!("{}*d{}", coef, m + 1));
            } else {
                parts.push(format!("({})*d{}", coef, m + 1));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }
}

/// Commutator `[X, Y]` of two vector fields with polynomial components.
pub fn vector_field_bracket(x: &LIVectorField, y: &LIVectorField) -> Vec<Poly> {
    x.components.iter().zip(&y.components).map(|(xm, ym)| &x.apply(ym) - &y.apply(xm)).collect()
}

/// A stratified algebra together with its group law and left-invariant frame.
#[derive(Clone, Debug)]
pub struct CarnotGroup {
    algebra: StratifiedAlgebra,
    group_law: Vec<Poly>,
    fields: Vec<LIVectorField>,
}

impl CarnotGroup {
    pub fn new(algebra: StratifiedAlgebra) -> Result<Self, LieError> {
        let group_law = group_law(&algebra)?;
        let fields = fields_from_law(&algebra, &group_law);
        Ok(Self { algebra, group_law, fields })
    }

    pub fn algebra(&self) -> &StratifiedAlgebra {
        &self.algebra
    }

    /// `(x·y)_m` as polynomials in `(x₁…x_n, y₁…y_n)`.
    pub fn group_law(&self) -> &[Poly] {
        &self.group_law
    }

    pub fn fields(&self) -> &[LIVectorField] {
        &self.fields
    }

    pub fn field(&self, l: usize) -> &LIVectorField {
        &self.fields[l]
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn step(&self) -> usize {
        self.algebra.step()
    }

    pub fn hausdorff_dimension(&self) -> usize {
        self.algebra.hausdorff_dimension()
    }

    /// Weighted degree of a coefficient monomial.
    pub fn coefficient_degree(&self, exps: &[u16]) -> usize {
        weighted_degree(exps, self.algebra.weights())
    }
}

/// BCH product truncated at the step, as `n` polynomials in `2n` variables.
pub fn group_law(alg: &StratifiedAlgebra) -> Result<Vec<Poly>, LieError> {
    let s = alg.step();
    if s > MAX_BCH_ORDER {
        return Err(LieError::StepTooLarge { step: s, max: MAX_BCH_ORDER });
    }
    let n = alg.dim();
    let x: LieElem = (0..n).map(|i| Poly::var(2 * n, i)).collect();
    let y: LieElem = (0..n).map(|i| Poly::var(2 * n, n + i)).collect();
    let mut law: LieElem = vec![Poly::zero(2 * n); n];
    for (word, c) in dynkin_coefficients(s) {
        let letter = |b: bool| if b { &y } else { &x };
        let mut acc = letter(word[word.len() - 1]).clone();
        for &b in word[..word.len() - 1].iter().rev() {
            acc = bracket(alg, letter(b), &acc);
            if acc.iter().all(Poly::is_zero) {
                break;
            }
        }
        for (k, p) in acc.iter().enumerate() {
            law[k] = &law[k] + &p.scale(&c);
        }
    }
    Ok(law)
}

fn fields_from_law(alg: &StratifiedAlgebra, law: &[Poly]) -> Vec<LIVectorField> {
    let n = alg.dim();
    (0..n)
        .map(|l| LIVectorField {
            index: l,
            components: law.iter().map(|pm| pm.derivative(n + l).vanish_on(n..2 * n).restrict_to(0..n)).collect(),
        })
        .collect()
}

/// Left-invariant frame `X_l(x) = ∂(x·y)/∂y_l |_{y=0}`.
pub fn left_invariant_fields(alg: &StratifiedAlgebra) -> Result<Vec<LIVectorField>, LieError> {
    Ok(fields_from_law(alg, &group_law(alg)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::parse_group_spec;
    use crate::linalg::{q, qi};

    fn group(text: &str) -> CarnotGroup {
        CarnotGroup::new(parse_group_spec(text).unwrap()).unwrap()
    }

    #[test]
    fn dynkin_order_two_and_three() {
        let c = dynkin_coefficients(3);
        assert_eq!(c[&vec![false]], qi(1));
        assert_eq!(c[&vec![true]], qi(1));
        // ½[X,Y] collected on the word XY, since [Y,X] = −[X,Y] is stored as YX.
        let xy = c.get(&vec![false, true]).cloned().unwrap_or_default();
        let yx = c.get(&vec![true, false]).cloned().unwrap_or_default();
        assert_eq!(xy - yx, q(1, 2));
    }

    #[test]
    fn abelian_law_is_addition() {
        let g = group("name = r3\nlayers = [3]\n");
        for m in 0..3 {
            assert_eq!(g.group_law()[m], &Poly::var(6, m) + &Poly::var(6, 3 + m));
            assert_eq!(g.field(m).components, (0..3).map(|k| if k == m { Poly::one(3) } else { Poly::zero(3) }).collect::<Vec<_>>());
        }
    }

    #[test]
    fn heisenberg_law_and_frame() {
        let g = group("name = h\nlayers = [2, 1]\nbracket X1 X2 = X3\n");
        let v = |i| Poly::var(6, i);
        let expected = &(&v(2) + &v(5)) + &(&(&v(0) * &v(4)) - &(&v(1) * &v(3))).scale(&q(1, 2));
        assert_eq!(g.group_law()[2], expected);
        assert_eq!(g.field(0).render(), "d1 - 1/2*x2*d3");
        assert_eq!(g.field(1).render(), "d2 + 1/2*x1*d3");
        assert_eq!(g.field(2).render(), "d3");
        let x1 = Poly::var(3, 0);
        let x3 = Poly::var(3, 2);
        assert_eq!(g.field(0).apply(&x1), Poly::one(3));
        assert_eq!(g.field(0).apply(&x3), Poly::var(3, 1).scale(&q(-1, 2)));
        assert!(g.field(2).apply(&(&x1 * &x1)).is_zero());
    }

    #[test]
    fn engel_law_has_twelfth_terms() {
        let g = group("name = e\nlayers = [2,1,1]\nbracket X1 X2 = X3\nbracket X1 X3 = X4\n");
        // 1/12 [X,[X,Y]] contributes 1/12 x1² y2 to the X4 coordinate
        assert_eq!(g.group_law()[3].coefficient(&[2, 0, 0, 0, 0, 1, 0, 0]), q(1, 12));
    }

    #[test]
    fn step_guard() {
        let layers: Vec<String> = std::iter::repeat_n("1".to_string(), MAX_BCH_ORDER + 1).collect();
        let mut text = format!("name = long\nlayers = [2, {}]\n", layers[1..].join(", "));
        text.push_str("bracket X1 X2 = X3\n");
        for k in 3..=MAX_BCH_ORDER + 1 {
            text.push_str(&format!("bracket X1 X{} = X{}\n", k, k + 1));
        }
        let alg = parse_group_spec(&text).unwrap();
        assert!(matches!(CarnotGroup::new(alg), Err(LieError::StepTooLarge { .. })));
    }
}
