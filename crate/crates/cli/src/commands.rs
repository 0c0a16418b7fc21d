use std::fmt::Write;
use std::path::Path;
use std::sync::Arc;

use carnot_core::derham::{multicomplex_identities, slice_block_dims, DerhamError, Slice};
use carnot_core::lie::parse_group_spec;
use carnot_core::linalg::SparseVec;
use carnot_core::rumin::{CovectorOperators, RuminSlice};
use carnot_core::spectral::{verify_theorem_4_7, SpectralPage, SpectralSlice, TheoremReport, WitnessChoice};
use carnot_core::{CarnotGroup, StratifiedAlgebra};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{grid_text, matrix_json, matrix_text, Report};
use crate::{CliError, CommandKind, Opts};

const BUNDLED: [(&str, &str); 6] = [
    ("abelian", include_str!("../../core/corpus/abelian.grp")),
    ("heisenberg1", include_str!("../../core/corpus/heisenberg1.grp")),
    ("heisenberg2", include_str!("../../core/corpus/heisenberg2.grp")),
    ("engel", include_str!("../../core/corpus/engel.grp")),
    ("free23", include_str!("../../core/corpus/free23.grp")),
    ("bad", include_str!("../../core/corpus/bad.grp")),
];

/// Reads the spec file; a missing path that names a bundled example
/// (`engel` or `engel.grp`) falls back to it.
fn read_spec(path: &Path) -> Result<String, CliError> {
    match std::fs::read_to_string(path) {
        Ok(text) => Ok(text),
        Err(source) => {
            let stem = path.to_str().map(|s| s.trim_end_matches(".grp"));
            BUNDLED
                .iter()
                .find(|(name, _)| Some(*name) == stem)
                .map(|(_, text)| text.to_string())
                .ok_or(CliError::Read { path: path.to_path_buf(), source })
        }
    }
}

fn load(opts: &Opts) -> Result<StratifiedAlgebra, CliError> {
    let text = read_spec(&opts.spec)?;
    parse_group_spec(&text).map_err(|source| CliError::Spec { path: opts.spec.clone(), source })
}

fn guard(g: &CarnotGroup, opts: &Opts) -> Result<(), CliError> {
    for tau in 0..=opts.tau {
        let dim = slice_block_dims(g, tau).into_values().max().unwrap_or(0);
        if dim > opts.max_block_dim {
            return Err(DerhamError::BlockTooLarge { tau, dim, cap: opts.max_block_dim }.into());
        }
    }
    Ok(())
}

fn header(kind: CommandKind, alg: &StratifiedAlgebra, opts: &Opts) -> Value {
    json!({
        "schema": 1,
        "command": kind.name(),
        "group": alg.name(),
        "layers": alg.layer_dims(),
        "tau": opts.tau,
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

pub fn run(kind: CommandKind, opts: &Opts) -> Result<Report, CliError> {
    let alg = load(opts)?;
    let validation = alg.validate();
    if !validation.is_valid() {
        let issues: Vec<String> = validation.issues.iter().map(ToString::to_string).collect();
        let mut text = String::from("stratification invalid\n");
        for i in &issues {
            let _ = writeln!(text, "  {i}");
        }
        let json = merge(header(kind, &alg, opts), json!({ "stratification": { "valid": false, "issues": issues }, "ok": false }));
        return Ok(Report { ok: false, text, json });
    }
    let group = CarnotGroup::new(alg.clone()).map_err(|source| CliError::Spec { path: opts.spec.clone(), source })?;
    let q = group.hausdorff_dimension();
    if let Some(p) = opts.weight {
        if p > q {
            return Err(CliError::Weight { p, max: q });
        }
    }
    if kind != CommandKind::Frame {
        guard(&group, opts)?;
    }
    let head = header(kind, &alg, opts);
    Ok(match kind {
        CommandKind::Check => check(&group, opts, head),
        CommandKind::Frame => frame(&group, head),
        CommandKind::E0 => e0(&group, opts, head),
        CommandKind::Dc => dc(&group, opts, head),
        CommandKind::Pages => pages(&group, opts, head),
        CommandKind::Verify => verify(&group, opts, head),
        CommandKind::Cohomology => cohomology(&group, opts, head),
    })
}

fn slices(g: &CarnotGroup, tau: usize) -> Vec<Arc<Slice>> {
    (0..=tau).into_par_iter().map(|t| Arc::new(Slice::new(g, t))).collect()
}

fn check(g: &CarnotGroup, opts: &Opts, head: Value) -> Report {
    let checks: Vec<_> = slices(g, opts.tau).par_iter().flat_map(|s| multicomplex_identities(s)).collect();
    let ok = checks.iter().all(|c| c.holds);
    let mut text = format!(
        "stratification valid; multicomplex identities {} (τ ≤ {})\n",
        if ok { "hold" } else { "fail" },
        opts.tau
    );
    for c in checks.iter().filter(|c| !c.holds) {
        let _ = writeln!(text, "  tau={} n={}: nonzero on {}", c.tau, c.n, c.witness.as_deref().unwrap_or("?"));
    }
    let rows: Vec<Value> = checks
        .iter()
        .map(|c| json!({ "tau": c.tau, "n": c.n, "slice_dim": c.slice_dim, "holds": c.holds, "witness": c.witness }))
        .collect();
    let json = merge(head, json!({ "stratification": { "valid": true, "issues": [] }, "multicomplex": rows, "ok": ok }));
    Report { ok, text, json }
}

fn frame(g: &CarnotGroup, head: Value) -> Report {
    let alg = g.algebra();
    let mut text = format!("left-invariant frame of {} in exponential coordinates x1..x{}\n", alg.name(), alg.dim());
    let mut fields = Vec::new();
    for f in g.fields() {
        let expr = f.render();
        let _ = writeln!(text, "  X{} = {expr}", f.index + 1);
        fields.push(json!({ "field": format!("X{}", f.index + 1), "weight": alg.weight_of(f.index), "expression": expr }));
    }
    Report { ok: true, text, json: merge(head, json!({ "fields": fields, "ok": true })) }
}

fn e0(g: &CarnotGroup, opts: &Opts, head: Value) -> Report {
    let ops = CovectorOperators::new(g.algebra());
    let checks = ops.block_checks();
    let ok = checks.iter().all(|c| c.holds());
    let dims = ops.e0_dims();
    let mut text = format!("E0 of {}: dimensions by degree {:?}\n", g.algebra().name(), dims);
    let mut blocks = Vec::new();
    for h in 0..dims.len() {
        for (a, basis) in ops.e0_basis(h) {
            if opts.weight.is_some_and(|p| p != a) {
                continue;
            }
            let _ = writeln!(text, "  h={h} weight={a} dim={}", basis.len());
            for c in &basis {
                let _ = writeln!(text, "    {c}");
            }
            let basis: Vec<String> = basis.iter().map(ToString::to_string).collect();
            blocks.push(json!({ "h": h, "weight": a, "dim": basis.len(), "basis": basis }));
        }
    }
    for c in checks.iter().filter(|c| !c.holds()) {
        let _ = writeln!(text, "  covector block weight={} h={} fails: {c:?}", c.weight, c.degree);
    }
    let json = merge(head, json!({ "dims": dims, "blocks": blocks, "ok": ok }));
    Report { ok, text, json }
}

fn legend(slice: &Slice, vs: &[SparseVec]) -> Vec<String> {
    vs.iter().map(|v| slice.to_form(v).to_string()).collect()
}

fn dc(g: &CarnotGroup, opts: &Opts, head: Value) -> Report {
    let ops = CovectorOperators::new(g.algebra());
    let rumin: Vec<RuminSlice> = slices(g, opts.tau).into_par_iter().map(|s| RuminSlice::new(&ops, s)).collect();
    let mut ok = true;
    let mut text = String::new();
    let mut out = Vec::new();
    for r in &rumin {
        let s = r.slice();
        let m = r.dc_on_e0();
        let squares_to_zero = (&m * &m).is_zero();
        ok &= squares_to_zero;
        let _ = writeln!(text, "tau={}: d_c squares to {}", s.tau(), if squares_to_zero { "zero" } else { "a NONZERO map" });
        for h in 0..g.dim() {
            let src = r.e0_slice_basis(&ops, h);
            let dst = r.e0_slice_basis(&ops, h + 1);
            if src.is_empty() || dst.is_empty() {
                continue;
            }
            let mat = r.dc_matrix(&ops, h);
            let (rows, cols) = (legend(s, &dst), legend(s, &src));
            let _ = writeln!(text, "  d_c: E0^{h} -> E0^{} ({} x {})", h + 1, dst.len(), src.len());
            matrix_text(&mut text, "  ", &mat, &rows, &cols);
            out.push(json!({
                "tau": s.tau(), "h": h, "dims": [dst.len(), src.len()],
                "rows": rows, "cols": cols, "matrix": matrix_json(&mat),
            }));
        }
    }
    Report { ok, text, json: merge(head, json!({ "blocks": out, "ok": ok })) }
}

fn spectral_slices(g: &CarnotGroup, tau: usize) -> Vec<(RuminSlice, SpectralSlice)> {
    let ops = CovectorOperators::new(g.algebra());
    slices(g, tau)
        .into_par_iter()
        .map(|s| {
            let r = RuminSlice::new(&ops, s.clone());
            let sp = SpectralSlice::from_rumin(&r, s);
            (r, sp)
        })
        .collect()
}

fn page_range(g: &CarnotGroup, opts: &Opts) -> Vec<usize> {
    match opts.page {
        Some(r) => vec![r as usize],
        None => (1..=g.hausdorff_dimension() + 1).collect(),
    }
}

fn dims_json(page: &SpectralPage) -> Value {
    let d = page.dims();
    json!({ "Z": d.z, "B": d.b, "E": d.e })
}

fn pages(g: &CarnotGroup, opts: &Opts, head: Value) -> Report {
    let data = spectral_slices(g, opts.tau);
    let rs = page_range(g, opts);
    let mut text = String::new();
    let mut entries = Vec::new();
    let pmax = g.hausdorff_dimension();
    for (_, sp) in &data {
        let s = sp.slice();
        let tau = s.tau();
        for &r in &rs {
            let all = sp.pages(r).expect("every block is in range");
            let shown = |p: usize| opts.weight.is_none_or(|w| w == p);
            let cells: Vec<(usize, usize, usize)> =
                all.iter().filter(|(&(p, _), _)| shown(p)).map(|(&(p, h), pg)| (p, h, pg.reps.len())).collect();
            let _ = writeln!(text, "tau={tau} r={r}: dim E_r by (p, h)");
            grid_text(&mut text, "", &cells, pmax, g.dim());
            for (&(p, h), page) in all.iter().filter(|(&(p, _), _)| shown(p)) {
                let partial = all.get(&(p + r, h + 1)).map(|dst| {
                    let m = sp.partial_matrix(page, dst, WitnessChoice::ClosedForm).expect("representatives are cycles");
                    (dst, m)
                });
                if let Some((dst, m)) = &partial {
                    if !m.is_zero() {
                        let _ = writeln!(text, "  d_{r}: E_{r}^({p},{h}) -> E_{r}^({},{})", p + r, h + 1);
                        matrix_text(&mut text, "  ", m, &legend(s, &dst.reps), &legend(s, &page.reps));
                    }
                }
                entries.push(json!({
                    "group": g.algebra().name(), "tau": tau, "r": r, "p": p, "h": h,
                    "dims": dims_json(page),
                    "representatives": legend(s, &page.reps),
                    "partial": partial.map(|(dst, m)| json!({ "target": [dst.p, dst.h], "matrix": matrix_json(&m) })),
                }));
            }
        }
    }
    Report { ok: true, text, json: merge(head, json!({ "pages": entries, "ok": true })) }
}

#[derive(Serialize)]
struct PageAgreement {
    r: usize,
    p: usize,
    h: usize,
    blockwise: usize,
    filtered: usize,
    boundaries_in_cycles: bool,
    holds: bool,
}

#[derive(Serialize)]
struct SliceVerification {
    tau: usize,
    rumin: TheoremReport,
    pages: Vec<PageAgreement>,
}

fn verify(g: &CarnotGroup, opts: &Opts, head: Value) -> Report {
    let rs = page_range(g, opts);
    let results: Vec<SliceVerification> = spectral_slices(g, opts.tau)
        .par_iter()
        .map(|(rumin, sp)| {
            let mut pages = Vec::new();
            for &r in &rs {
                for &(p, h) in sp.slice().blocks().keys() {
                    if opts.weight.is_some_and(|w| w != p) {
                        continue;
                    }
                    let page = sp.page(r, p, h).expect("block in range");
                    let filtered = sp.filtered_page_dim(r, p, h);
                    let boundaries_in_cycles = page.z.space().contains_all(&page.b.space);
                    let blockwise = page.reps.len();
                    pages.push(PageAgreement {
                        r,
                        p,
                        h,
                        blockwise,
                        filtered,
                        boundaries_in_cycles,
                        holds: boundaries_in_cycles && blockwise == filtered,
                    });
                }
            }
            SliceVerification { tau: sp.slice().tau(), rumin: verify_theorem_4_7(rumin, sp), pages }
        })
        .collect();
    let mut ok = true;
    let mut text = String::new();
    for v in &results {
        let rumin_ok = v.rumin.holds();
        let pages_ok = v.pages.iter().all(|p| p.holds);
        ok &= rumin_ok && pages_ok;
        let orders: Vec<String> =
            v.rumin.components.iter().filter(|c| c.nonzero_entries > 0).map(|c| c.r.to_string()).collect();
        let _ = writeln!(
            text,
            "tau={}: d_c {} the page differentials on {} blocks (contributions from r = {}); \
             page dimensions {} on {} entries",
            v.tau,
            if rumin_ok { "matches" } else { "DIFFERS FROM" },
            v.rumin.blocks.len(),
            if orders.is_empty() { "none".to_string() } else { orders.join(", ") },
            if pages_ok { "agree" } else { "DISAGREE" },
            v.pages.len(),
        );
        for b in v.rumin.blocks.iter().filter(|b| !b.holds) {
            let _ = writeln!(text, "  d_c differs on block p={} h={}", b.p, b.h);
        }
        for c in v.rumin.components.iter().filter(|c| !c.holds) {
            let _ = writeln!(text, "  weight-{} component differs", c.r);
        }
        if !v.rumin.no_weight_zero_part {
            let _ = writeln!(text, "  d_c has a weight-preserving part");
        }
        for p in v.pages.iter().filter(|p| !p.holds) {
            let _ = writeln!(
                text,
                "  r={} p={} h={}: blockwise {} filtered {} boundaries in cycles {}",
                p.r, p.p, p.h, p.blockwise, p.filtered, p.boundaries_in_cycles
            );
        }
    }
    let _ = writeln!(text, "{}", if ok { "all checks hold" } else { "some checks FAILED" });
    let json = merge(head, json!({ "slices": results, "ok": ok }));
    Report { ok, text, json }
}

fn cohomology(g: &CarnotGroup, opts: &Opts, head: Value) -> Report {
    let rows: Vec<(usize, Vec<usize>, Vec<usize>)> = spectral_slices(g, opts.tau)
        .par_iter()
        .map(|(_, sp)| (sp.slice().tau(), sp.brute_cohomology(), sp.e_infinity_dims().expect("pages in range")))
        .collect();
    let mut ok = true;
    let mut text = String::new();
    let mut out = Vec::new();
    for (tau, brute, einf) in rows {
        let agree = brute == einf;
        ok &= agree;
        let _ = writeln!(text, "tau={tau}: slice cohomology {brute:?}, E_infinity {einf:?}{}", if agree { "" } else { "  MISMATCH" });
        out.push(json!({ "tau": tau, "cohomology": brute, "e_infinity": einf, "agree": agree }));
    }
    Report { ok, text, json: merge(head, json!({ "slices": out, "ok": ok })) }
}
