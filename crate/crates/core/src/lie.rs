//! Stratified Lie algebras given by rational structure constants on a basis
//! adapted to the stratification `𝔤 = V₁ ⊕ … ⊕ V_s`.
//!
//! Basis indices are 0-based in this API and 1-based (`X1 … Xn`) in the
//! group-spec text format and in every printed report.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::linalg::{fmt_q, Q, SparseVec, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: duplicate bracket entry [X{i}, X{j}]")]
    DuplicateBracket { line: usize, i: usize, j: usize },
    #[error("line {line}: basis index X{index} out of range 1..={n}")]
    IndexOutOfRange { line: usize, index: usize, n: usize },
    #[error("line {line}: bracket entry [X{i}, X{j}] must have i < j")]
    UnorderedBracket { line: usize, i: usize, j: usize },
    #[error("layer {layer} has dimension zero")]
    EmptyLayer { layer: usize },
    #[error("step {step} exceeds the implemented BCH order {max}")]
    StepTooLarge { step: usize, max: usize },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
}

/// A stratified Lie algebra with exact structure constants
/// `[X_i, X_j] = ∑_k c_{ij}^k X_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratifiedAlgebra {
    name: String,
    layer_dims: Vec<usize>,
    weight_of: Vec<usize>,
    /// `table[i][j]`: sparse, sorted `(k, c_{ij}^k)`; antisymmetric.
    table: Vec<Vec<Vec<(usize, Q)>>>,
}

/// One bracket entry `[X_i, X_j] = ∑ q_k X_k` with `i < j` (0-based).
#[derive(Clone, Debug)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<(usize, Q)>,
}

impl StratifiedAlgebra {
    /// Builds an algebra from the `i < j` half of the bracket table and
    /// completes it by antisymmetry.
    pub fn new(name: &str, layer_dims: &[usize], entries: &[BracketEntry]) -> Result<Self, LieError> {
        if let Some(pos) = layer_dims.iter().position(|&d| d == 0) {
            return Err(LieError::EmptyLayer { layer: pos + 1 });
        }
        if layer_dims.is_empty() {
            return Err(LieError::MissingKey("layers"));
        }
        let weight_of: Vec<usize> =
            layer_dims.iter().enumerate().flat_map(|(l, &d)| std::iter::repeat_n(l + 1, d)).collect();
        let n = weight_of.len();
        let mut table = vec![vec![Vec::new(); n]; n];
        let mut seen = BTreeMap::new();
        for e in entries {
            for &idx in [e.i, e.j].iter().chain(e.terms.iter().map(|(k, _)| k)) {
                if idx >= n {
                    return Err(LieError::IndexOutOfRange { line: 0, index: idx + 1, n });
                }
            }
            if e.i >= e.j {
                return Err(LieError::UnorderedBracket { line: 0, i: e.i + 1, j: e.j + 1 });
            }
            if seen.insert((e.i, e.j), ()).is_some() {
                return Err(LieError::DuplicateBracket { line: 0, i: e.i + 1, j: e.j + 1 });
            }
            let v = SparseVec::from_entries(e.terms.iter().cloned());
            table[e.i][e.j] = v.entries().to_vec();
            table[e.j][e.i] = v.scale(&-Q::from_integer(1.into())).entries().to_vec();
        }
        Ok(Self { name: name.to_string(), layer_dims: layer_dims.to_vec(), weight_of, table })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.weight_of.len()
    }

    pub fn step(&self) -> usize {
        self.layer_dims.len()
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    /// Layer index (1-based) of the basis vector `X_l`.
    pub fn weight_of(&self, l: usize) -> usize {
        self.weight_of[l]
    }

    pub fn weights(&self) -> &[usize] {
        &self.weight_of
    }

    /// Basis indices of the layer `V_i` (1-based layer).
    pub fn layer(&self, i: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&l| self.weight_of[l] == i).collect()
    }

    /// `[X_i, X_j]` as sparse `(k, c_{ij}^k)`.
    pub fn bracket(&self, i: usize, j: usize) -> &[(usize, Q)] {
        &self.table[i][j]
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Q {
        self.table[i][j].iter().find(|(l, _)| *l == k).map(|(_, c)| c.clone()).unwrap_or_else(Q::zero)
    }

    /// Bracket of two algebra elements given in coordinates.
    pub fn bracket_vectors(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut terms = Vec::new();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                for (k, c) in &self.table[i][j] {
                    terms.push((*k, x * y * c));
                }
            }
        }
        SparseVec::from_entries(terms)
    }

    /// Homogeneous dimension `Q = ∑ i · dim V_i`.
    pub fn hausdorff_dimension(&self) -> usize {
        self.weight_of.iter().sum()
    }

    /// Checks Jacobi, grading and generation. Failures are report content.
    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let mut issues = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for (k, _) in &self.table[i][j] {
                    if self.weight_of[*k] != self.weight_of[i] + self.weight_of[j] {
                        issues.push(StratificationIssue::Grading { i, j, k: *k });
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let (xi, xj, xk) = (SparseVec::unit(i), SparseVec::unit(j), SparseVec::unit(k));
                    let t1 = self.bracket_vectors(&xi, &self.bracket_vectors(&xj, &xk));
                    let t2 = self.bracket_vectors(&xj, &self.bracket_vectors(&xk, &xi));
                    let t3 = self.bracket_vectors(&xk, &self.bracket_vectors(&xi, &xj));
                    if !(&(&t1 + &t2) + &t3).is_zero() {
                        issues.push(StratificationIssue::Jacobi { i, j, k });
                    }
                }
            }
        }
        let first = self.layer(1);
        for layer in 1..self.step() {
            let next = self.layer(layer + 1);
            let gens: Vec<SparseVec> = first
                .iter()
                .flat_map(|&a| self.layer(layer).into_iter().map(move |b| (a, b)))
                .map(|(a, b)| SparseVec::from_entries(self.table[a][b].iter().cloned()))
                .collect();
            let span = Subspace::span(n, &gens);
            let target = Subspace::span(n, &next.iter().map(|&l| SparseVec::unit(l)).collect::<Vec<_>>());
            if !span.is_equal(&target) {
                issues.push(StratificationIssue::Generation {
                    layer,
                    expected: next.len(),
                    spanned: span.dim(),
                });
            }
        }
        ValidationReport { issues }
    }

    /// Serialises to the group-spec text format.
    pub fn to_spec_string(&self) -> String {
        let mut out = String::new();
        if self.name.chars().any(|c| c.is_whitespace() || c == '#') {
            out.push_str(&format!("name = \"{}\"\n", self.name));
        } else {
            out.push_str(&format!("name = {}\n", self.name));
        }
        let layers: Vec<String> = self.layer_dims.iter().map(usize::to_string).collect();
        out.push_str(&format!("layers = [{}]\n", layers.join(", ")));
        let mut entries = Vec::new();
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                if !self.table[i][j].is_empty() {
                    let terms: Vec<String> =
                        self.table[i][j].iter().map(|(k, c)| format!("{}*X{}", fmt_q(c), k + 1)).collect();
                    entries.push(format!("X{} X{} = {}\n", i + 1, j + 1, terms.join(" + ")));
                }
            }
        }
        if !entries.is_empty() {
            out.push_str("\n[brackets]\n");
            for e in entries {
                out.push_str(&e);
            }
        }
        out
    }

    /// The `i < j` half of the bracket table.
    pub fn entries(&self) -> Vec<BracketEntry> {
        let mut out = Vec::new();
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                if !self.table[i][j].is_empty() {
                    out.push(BracketEntry { i, j, terms: self.table[i][j].clone() });
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StratificationIssue {
    /// Jacobi identity fails on `(X_i, X_j, X_k)`.
    Jacobi { i: usize, j: usize, k: usize },
    /// `c_{ij}^k ≠ 0` although `w(k) ≠ w(i) + w(j)`.
    Grading { i: usize, j: usize, k: usize },
    /// `[V₁, V_layer]` does not span `V_{layer+1}`.
    Generation { layer: usize, expected: usize, spanned: usize },
}

impl fmt::Display for StratificationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Jacobi { i, j, k } => write!(f, "Jacobi identity fails on (X{}, X{}, X{})", i + 1, j + 1, k + 1),
            Self::Grading { i, j, k } => write!(
                f,
                "grading violation: [X{}, X{}] has a component on X{} of the wrong weight",
                i + 1,
                j + 1,
                k + 1
            ),
            Self::Generation { layer, expected, spanned } => write!(
                f,
                "generation failure: [V1, V{}] spans dimension {} inside V{} of dimension {}",
                layer,
                spanned,
                layer + 1,
                expected
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<StratificationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "stratification valid");
        }
        for (n, issue) in self.issues.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

/// Parses a group-spec document.
///
/// ```text
/// # Heisenberg group
/// name = heisenberg1
/// layers = [2, 1]
///
/// [brackets]
/// X1 X2 = 1*X3
/// ```
///
/// Bracket lines may also appear as `bracket X1 X2 = ...` outside the
/// `[brackets]` section.
pub fn parse_group_spec(text: &str) -> Result<StratifiedAlgebra, LieError> {
    let mut name: Option<String> = None;
    let mut layers: Option<Vec<usize>> = None;
    let mut raw: Vec<(usize, Line)> = Vec::new();
    let mut in_brackets = false;

    for (lineno, full) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let content = full.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let offset = content.len() - content.trim_start().len();
        if trimmed.starts_with('[') && !trimmed.contains('=') {
            if trimmed == "[brackets]" {
                in_brackets = true;
                continue;
            }
            return Err(syntax(line_no, offset + 1, format!("unknown section `{trimmed}`")));
        }
        let mut cur = Cursor { line: line_no, src: content, pos: offset };
        if in_brackets {
            raw.push((line_no, cur.bracket_line()?));
            continue;
        }
        let key = cur.ident()?;
        match key.as_str() {
            "bracket" => raw.push((line_no, cur.bracket_line()?)),
            "name" => {
                cur.expect('=')?;
                if name.is_some() {
                    return Err(syntax(line_no, offset + 1, "duplicate key `name`".into()));
                }
                name = Some(cur.string_value()?);
            }
            "layers" => {
                cur.expect('=')?;
                if layers.is_some() {
                    return Err(syntax(line_no, offset + 1, "duplicate key `layers`".into()));
                }
                layers = Some(cur.int_list()?);
            }
            other => return Err(syntax(line_no, offset + 1, format!("unknown key `{other}`"))),
        }
        cur.end()?;
    }

    let name = name.ok_or(LieError::MissingKey("name"))?;
    let layers = layers.ok_or(LieError::MissingKey("layers"))?;
    if let Some(pos) = layers.iter().position(|&d| d == 0) {
        return Err(LieError::EmptyLayer { layer: pos + 1 });
    }
    let n: usize = layers.iter().sum();
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut entries = Vec::new();
    for (line, l) in raw {
        for &idx in [l.i, l.j].iter().chain(l.terms.iter().map(|(k, _)| k)) {
            if idx == 0 || idx > n {
                return Err(LieError::IndexOutOfRange { line, index: idx, n });
            }
        }
        let key = (l.i.min(l.j), l.i.max(l.j));
        if seen.contains_key(&key) {
            return Err(LieError::DuplicateBracket { line, i: l.i, j: l.j });
        }
        if l.i >= l.j {
            return Err(LieError::UnorderedBracket { line, i: l.i, j: l.j });
        }
        seen.insert(key, line);
        entries.push(BracketEntry { i: l.i - 1, j: l.j - 1, terms: l.terms.iter().map(|(k, c)| (k - 1, c.clone())).collect() });
    }
    StratifiedAlgebra::new(&name, &layers, &entries)
}

fn syntax(line: usize, col: usize, msg: String) -> LieError {
    LieError::Syntax { line, col, msg }
}

struct Line {
    i: usize,
    j: usize,
    terms: Vec<(usize, Q)>,
}

struct Cursor<'a> {
    line: usize,
    src: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LieError> {
        Err(syntax(self.line, self.pos + 1, msg.into()))
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn expect(&mut self, c: char) -> Result<(), LieError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn end(&mut self) -> Result<(), LieError> {
        self.skip_ws();
        match self.peek() {
            None => Ok(()),
            Some(c) => self.err(format!("unexpected `{c}`")),
        }
    }

    fn ident(&mut self) -> Result<String, LieError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a key");
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn digits(&mut self) -> Result<u64, LieError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        match self.src[start..self.pos].parse() {
            Ok(v) => Ok(v),
            Err(_) => Err(syntax(self.line, start + 1, "integer too large".into())),
        }
    }

    fn string_value(&mut self) -> Result<String, LieError> {
        self.skip_ws();
        if self.peek() == Some('"') {
            self.pos += 1;
            let start = self.pos;
            while let Some(c) = self.bump() {
                if c == '"' {
                    return Ok(self.src[start..self.pos - 1].to_string());
                }
            }
            return self.err("unterminated string");
        }
        let start = self.pos;
        while self.peek().is_some_and(|c| !c.is_whitespace()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a name");
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn int_list(&mut self) -> Result<Vec<usize>, LieError> {
        self.expect('[')?;
        let mut out = Vec::new();
        self.skip_ws();
        if self.peek() == Some(']') {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            self.skip_ws();
            out.push(self.digits()? as usize);
            self.skip_ws();
            match self.bump() {
                Some(',') => continue,
                Some(']') => return Ok(out),
                _ => {
                    self.pos = self.pos.saturating_sub(1);
                    return self.err("expected `,` or `]`");
                }
            }
        }
    }

    fn basis_index(&mut self) -> Result<usize, LieError> {
        self.skip_ws();
        if self.peek() != Some('X') {
            return self.err("expected a basis vector `X<k>`");
        }
        self.pos += 1;
        Ok(self.digits()? as usize)
    }

    /// Rational literal `p` or `p/q`; float literals are rejected.
    fn rational(&mut self) -> Result<Q, LieError> {
        let num = self.digits()?;
        if self.peek() == Some('.') {
            return self.err("float literals are not accepted; use p/q");
        }
        let den = if self.peek() == Some('/') {
            self.pos += 1;
            let d = self.digits()?;
            if d == 0 {
                return self.err("zero denominator");
            }
            d
        } else {
            1
        };
        Ok(Q::new(num.into(), den.into()))
    }

    fn bracket_line(&mut self) -> Result<Line, LieError> {
        let i = self.basis_index()?;
        let j = self.basis_index()?;
        self.expect('=')?;
        let mut terms = Vec::new();
        let mut first = true;
        loop {
            self.skip_ws();
            let mut sign = Q::from_integer(1.into());
            match self.peek() {
                Some('+') if !first => self.pos += 1,
                Some('-') => {
                    self.pos += 1;
                    sign = -sign;
                }
                None if !first => break,
                _ if first => {}
                _ => return self.err("expected `+` or `-`"),
            }
            first = false;
            self.skip_ws();
            let coef = if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                let c = self.rational()?;
                self.expect('*')?;
                c
            } else {
                Q::from_integer(1.into())
            };
            let k = self.basis_index()?;
            let c = sign * coef;
            if !c.is_zero() {
                terms.push((k, c));
            }
            self.skip_ws();
            if self.peek().is_none() {
                break;
            }
        }
        Ok(Line { i, j, terms })
    }
}
