//! Monotone access policies and their linear secret-sharing form.
//!
//! A policy is a binary AND/OR tree over attribute names. Encryption works on
//! the compiled form `(M, rho)`: an `l x m` matrix whose rows share the
//! secret, plus an injective map from rows to attributes. A set of attributes
//! satisfies the policy exactly when its rows span `(1, 0, ..., 0)`; the
//! solver below returns the reconstruction coefficients for that combination.
//!
//! Attribute reuse inside one policy is rejected: every row must be labelled
//! with a distinct attribute.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use ff::Field;

use crate::algebra::Scalar;
use crate::error::{Error, Result};

/// Binary monotone policy over attribute names (`[a-z0-9:_-]+`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Policy {
    Leaf(String),
    And(Box<Policy>, Box<Policy>),
    Or(Box<Policy>, Box<Policy>),
}

impl Policy {
    /// Leaf attributes in left-to-right order.
    pub fn attributes(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_attributes(&mut out);
        out
    }

    fn collect_attributes(&self, out: &mut Vec<String>) {
        match self {
            Policy::Leaf(a) => out.push(a.clone()),
            Policy::And(l, r) | Policy::Or(l, r) => {
                l.collect_attributes(out);
                r.collect_attributes(out);
            }
        }
    }

    /// Boolean satisfaction of the formula by an attribute set.
    pub fn evaluate(&self, attrs: &BTreeSet<String>) -> bool {
        match self {
            Policy::Leaf(a) => attrs.contains(a),
            Policy::And(l, r) => l.evaluate(attrs) && r.evaluate(attrs),
            Policy::Or(l, r) => l.evaluate(attrs) || r.evaluate(attrs),
        }
    }
}

/// The compiled LSSS pair `(M, rho)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessMatrix {
    /// `l x m` share-generating matrix, row-major.
    pub matrix: Vec<Vec<Scalar>>,
    /// Row labels: `rho[k]` is the attribute of row `k`. Injective.
    pub rho: Vec<String>,
}

impl AccessMatrix {
    pub fn row_count(&self) -> usize {
        self.matrix.len()
    }

    pub fn width(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }
}

fn is_attribute_char(c: u8) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit() || c == b':' || c == b'_' || c == b'-'
}

fn syntax_error<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::PolicySyntax {
        offset,
        message: message.into(),
    })
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn expr(&mut self) -> Result<Policy> {
        if self.starts_with(b"AND(") {
            self.pos += 4;
            let (l, r) = self.pair_args()?;
            Ok(Policy::And(Box::new(l), Box::new(r)))
        } else if self.starts_with(b"OR(") {
            self.pos += 3;
            let (l, r) = self.pair_args()?;
            Ok(Policy::Or(Box::new(l), Box::new(r)))
        } else {
            self.atom()
        }
    }

    fn pair_args(&mut self) -> Result<(Policy, Policy)> {
        let l = self.expr()?;
        self.expect(b',')?;
        let r = self.expr()?;
        self.expect(b')')?;
        Ok((l, r))
    }

    fn atom(&mut self) -> Result<Policy> {
        let start = self.pos;
        while self.pos < self.text.len() && is_attribute_char(self.text[self.pos]) {
            self.pos += 1;
        }
        if self.pos == start {
            return syntax_error(start, "expected an attribute name, `AND(` or `OR(`");
        }
        let name =
            std::str::from_utf8(&self.text[start..self.pos]).expect("attribute chars are ASCII");
        Ok(Policy::Leaf(name.to_owned()))
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.pos < self.text.len() && self.text[self.pos] == c {
            self.pos += 1;
            Ok(())
        } else {
            syntax_error(self.pos, format!("expected `{}`", c as char))
        }
    }

    fn starts_with(&self, prefix: &[u8]) -> bool {
        self.text[self.pos..].starts_with(prefix)
    }
}

/// Parses the canonical policy grammar
/// `expr := atom | "AND(" expr "," expr ")" | "OR(" expr "," expr ")"`.
///
/// The grammar admits no whitespace; the input is its own canonical form.
pub fn parse_policy(text: &str) -> Result<Policy> {
    let mut parser = Parser {
        text: text.as_bytes(),
        pos: 0,
    };
    let policy = parser.expr()?;
    if parser.pos != parser.text.len() {
        return syntax_error(parser.pos, "trailing input after policy");
    }
    Ok(policy)
}

/// Canonical byte form of a policy: the grammar text, no whitespace.
pub fn canonical_bytes(p: &Policy) -> Vec<u8> {
    let mut out = String::new();
    render(p, &mut out);
    out.into_bytes()
}

fn render(p: &Policy, out: &mut String) {
    match p {
        Policy::Leaf(a) => out.push_str(a),
        Policy::And(l, r) => {
            out.push_str("AND(");
            render(l, out);
            out.push(',');
            render(r, out);
            out.push(')');
        }
        Policy::Or(l, r) => {
            out.push_str("OR(");
            render(l, out);
            out.push(',');
            render(r, out);
            out.push(')');
        }
    }
}

fn int_scalar(v: i64) -> Scalar {
    if v >= 0 {
        Scalar::from(v as u64)
    } else {
        -Scalar::from(v.unsigned_abs())
    }
}

/// Compiles a policy into its LSSS matrix.
///
/// Standard monotone-formula construction: the root is labelled `(1)`; an OR
/// node hands its vector to both children; an AND node with vector `v`
/// (zero-padded to the current counter length `c`) labels one child `v || 1`
/// and the other `(0, ..., 0, -1)` of length `c + 1`, incrementing `c`.
/// Leaf labels, padded to the final width, become the rows.
pub fn compile(p: &Policy) -> Result<AccessMatrix> {
    let attrs = p.attributes();
    let mut seen = BTreeSet::new();
    for a in &attrs {
        if a.is_empty() || !a.bytes().all(is_attribute_char) {
            return syntax_error(0, format!("invalid attribute name `{a}`"));
        }
        if !seen.insert(a.clone()) {
            return Err(Error::DuplicateAttribute(a.clone()));
        }
    }

    let mut rows: Vec<(String, Vec<i64>)> = Vec::new();
    let mut counter = 1usize;
    assign(p, vec![1], &mut counter, &mut rows);

    let width = counter;
    let matrix = rows
        .iter()
        .map(|(_, v)| {
            let mut row: Vec<Scalar> = v.iter().map(|&x| int_scalar(x)).collect();
            row.resize(width, Scalar::ZERO);
            row
        })
        .collect();
    let rho = rows.into_iter().map(|(a, _)| a).collect();
    Ok(AccessMatrix { matrix, rho })
}

fn assign(
    node: &Policy,
    vector: Vec<i64>,
    counter: &mut usize,
    rows: &mut Vec<(String, Vec<i64>)>,
) {
    match node {
        Policy::Leaf(a) => rows.push((a.clone(), vector)),
        Policy::Or(l, r) => {
            assign(l, vector.clone(), counter, rows);
            assign(r, vector, counter, rows);
        }
        Policy::And(l, r) => {
            let mut left = vector;
            left.resize(*counter, 0);
            left.push(1);
            let mut right = vec![0i64; *counter];
            right.push(-1);
            *counter += 1;
            assign(l, left, counter, rows);
            assign(r, right, counter, rows);
        }
    }
}

/// Reconstruction coefficients for an attribute set, if it satisfies the
/// matrix.
///
/// Returns `omega` with `sum_k omega_k * M_k = (1, 0, ..., 0)`, supported
/// only on rows labelled by held attributes; zero coefficients are dropped.
/// The solution is pinned by Gaussian elimination in ascending row order with
/// free variables set to zero, so repeated runs produce identical
/// coefficients.
pub fn reconstruction_coefficients(
    am: &AccessMatrix,
    attrs: &BTreeSet<String>,
) -> Option<BTreeMap<usize, Scalar>> {
    let selected: Vec<usize> = (0..am.row_count())
        .filter(|&k| attrs.contains(&am.rho[k]))
        .collect();
    let width = am.width();
    let mut rhs = vec![Scalar::ZERO; width];
    rhs[0] = Scalar::ONE;
    let columns: Vec<&Vec<Scalar>> = selected.iter().map(|&k| &am.matrix[k]).collect();
    let omega = solve(&columns, &rhs)?;
    let mut out = BTreeMap::new();
    for (t, &k) in selected.iter().enumerate() {
        if omega[t] != Scalar::ZERO {
            out.insert(k, omega[t]);
        }
    }
    Some(out)
}

/// Solves `sum_t x_t * columns[t] = rhs` by reduced row elimination.
///
/// Unknowns are eliminated in order; the pivot for each unknown is the first
/// remaining equation with a nonzero coefficient; unknowns without a pivot
/// stay zero. Returns `None` when the system is inconsistent.
#[allow(clippy::needless_range_loop)]
fn solve(columns: &[&Vec<Scalar>], rhs: &[Scalar]) -> Option<Vec<Scalar>> {
    let equations = rhs.len();
    let unknowns = columns.len();
    let mut a = vec![vec![Scalar::ZERO; unknowns + 1]; equations];
    for (j, row) in a.iter_mut().enumerate() {
        for (t, col) in columns.iter().enumerate() {
            row[t] = col[j];
        }
        row[unknowns] = rhs[j];
    }

    let mut pivot_of = vec![None; unknowns];
    let mut rank = 0;
    for col in 0..unknowns {
        let Some(found) = (rank..equations).find(|&r| a[r][col] != Scalar::ZERO) else {
            continue;
        };
        a.swap(rank, found);
        let inv = a[rank][col].invert().expect("pivot is nonzero");
        for x in col..=unknowns {
            a[rank][x] *= inv;
        }
        for r in 0..equations {
            if r != rank && a[r][col] != Scalar::ZERO {
                let factor = a[r][col];
                for x in col..=unknowns {
                    let sub = factor * a[rank][x];
                    a[r][x] -= sub;
                }
            }
        }
        pivot_of[col] = Some(rank);
        rank += 1;
    }

    // Rows past the rank have all-zero coefficients; a nonzero right-hand
    // side there means the target vector is outside the span.
    if (rank..equations).any(|r| a[r][unknowns] != Scalar::ZERO) {
        return None;
    }

    let mut solution = vec![Scalar::ZERO; unknowns];
    for (col, pivot) in pivot_of.iter().enumerate() {
        if let Some(r) = pivot {
            solution[col] = a[*r][unknowns];
        }
    }
    Some(solution)
}
