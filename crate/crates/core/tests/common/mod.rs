//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use carnot_core::lie::{parse_group_spec, StratifiedAlgebra};
use carnot_core::linalg::Q;
use carnot_core::CarnotGroup;
use num_traits::Zero;

pub const CORPUS: [&str; 5] = ["abelian", "heisenberg1", "heisenberg2", "engel", "free23"];

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(format!("{name}.grp"))
}

pub fn algebra(name: &str) -> StratifiedAlgebra {
    let text = std::fs::read_to_string(corpus_path(name)).expect("corpus file");
    parse_group_spec(&text).expect("corpus spec parses")
}

pub fn group(name: &str) -> CarnotGroup {
    CarnotGroup::new(algebra(name)).expect("corpus group")
}

pub fn corpus() -> Vec<(&'static str, CarnotGroup)> {
    CORPUS.iter().map(|&n| (n, group(n))).collect()
}

/// Rank of a dense rational matrix by plain Gaussian elimination.
pub fn dense_rank(mut rows: Vec<Vec<Q>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(rank, piv);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = &row[col] / &pivot[col];
                for (x, y) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x -= y * &f;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn subsets(n: usize, h: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, h: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == h {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, h, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, h, &mut Vec::new(), &mut out);
    out
}

/// `θ_S(X_{k₁}, …, X_{k_h})` for the dual basis: the sign of the permutation
/// sorting `k` onto `S`, or zero.
fn eval_dual(s: &[usize], args: &[usize]) -> i32 {
    let mut sorted = args.to_vec();
    sorted.sort_unstable();
    if sorted != s {
        return 0;
    }
    let inversions = (0..args.len()).flat_map(|i| (i + 1..args.len()).map(move |j| (i, j))).filter(|&(i, j)| args[i] > args[j]).count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Matrix of the Chevalley–Eilenberg differential `Λ^h𝔤* → Λ^{h+1}𝔤*` from
/// the Koszul formula `dω(X₀,…,X_h) = ∑_{a<b} (−1)^{a+b} ω([X_a, X_b], X₀, …, X̂_a, …, X̂_b, …, X_h)`.
fn koszul_matrix(alg: &StratifiedAlgebra, h: usize) -> Vec<Vec<Q>> {
    let n = alg.dim();
    let src = subsets(n, h);
    let dst = subsets(n, h + 1);
    dst.iter()
        .map(|t| {
            src.iter()
                .map(|s| {
                    let mut acc = Q::zero();
                    for a in 0..t.len() {
                        for b in a + 1..t.len() {
                            let rest: Vec<usize> =
                                t.iter().enumerate().filter(|&(i, _)| i != a && i != b).map(|(_, &x)| x).collect();
                            for k in 0..n {
                                let c = alg.structure_constant(t[a], t[b], k);
                                if c.is_zero() {
                                    continue;
                                }
                                let mut args = vec![k];
                                args.extend(&rest);
                                let v = eval_dual(s, &args);
                                if v != 0 {
                                    let sign = if (a + b) % 2 == 0 { 1 } else { -1 };
                                    acc += c * Q::from_integer((sign * v).into());
                                }
                            }
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Betti numbers `dim H^h(𝔤)` of the Lie algebra cohomology, `h = 0..=n`.
pub fn ce_betti(alg: &StratifiedAlgebra) -> Vec<usize> {
    let n = alg.dim();
    let ranks: Vec<usize> = (0..=n).map(|h| if h < n { dense_rank(koszul_matrix(alg, h)) } else { 0 }).collect();
    (0..=n)
        .map(|h| {
            let dim = subsets(n, h).len();
            dim - ranks[h] - if h > 0 { ranks[h - 1] } else { 0 }
        })
        .collect()
}
