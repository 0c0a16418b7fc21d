use std::fmt::Write;

use carnot_core::linalg::SparseMatrix;
use serde_json::{json, Value};

/// A finished report: the text rendering, the JSON document and whether
/// every check in it passed.
pub struct Report {
    pub ok: bool,
    pub text: String,
    pub json: Value,
}

pub fn matrix_json(m: &SparseMatrix) -> Value {
    json!(m.to_string_rows())
}

/// Dense rendering with a numbered column legend and labelled rows.
pub fn matrix_text(out: &mut String, indent: &str, m: &SparseMatrix, rows: &[String], cols: &[String]) {
    if m.nrows() == 0 || m.ncols() == 0 {
        let _ = writeln!(out, "{indent}({} x {} matrix)", m.nrows(), m.ncols());
        return;
    }
    let entries = m.to_string_rows();
    let width = entries.iter().flatten().map(String::len).max().unwrap_or(1).max(m.ncols().to_string().len());
    let label = rows.iter().map(|r| r.chars().count()).max().unwrap_or(0);
    for (j, c) in cols.iter().enumerate() {
        let _ = writeln!(out, "{indent}  col {}: {c}", j + 1);
    }
    let header: Vec<String> = (1..=m.ncols()).map(|j| format!("{j:>width$}")).collect();
    let _ = writeln!(out, "{indent}  {:label$}   {}", "", header.join(" "));
    for (row, r) in entries.iter().zip(rows) {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>width$}")).collect();
        let pad = label - r.chars().count();
        let _ = writeln!(out, "{indent}  {r}{:pad$} [ {} ]", "", cells.join(" "));
    }
}

/// A grid with rows `h` and columns `p`, as used for page dimensions.
pub fn grid_text(out: &mut String, indent: &str, cells: &[(usize, usize, usize)], pmax: usize, hmax: usize) {
    let _ = write!(out, "{indent}  h\\p");
    for p in 0..=pmax {
        let _ = write!(out, " {p:>3}");
    }
    out.push('\n');
    for h in 0..=hmax {
        let _ = write!(out, "{indent}  {h:>3}");
        for p in 0..=pmax {
            match cells.iter().find(|&&(cp, ch, _)| cp == p && ch == h) {
                Some(&(_, _, e)) => {
                    let _ = write!(out, " {e:>3}");
                }
                None => out.push_str("   ."),
            }
        }
        out.push('\n');
    }
}
