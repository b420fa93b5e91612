//! Matrix linear operators in total derivatives.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::jetcalc::{
    frechet, frechet_adjoint, reduce_on_solutions, total_derivative_multi, JetError,
    PDESystem,
};
use crate::symexpr::{rat, Expr, MultiIndex, Symbol, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinopError {
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// A scalar operator `sum_I a_I D_I`.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct ScalarOp {
    terms: BTreeMap<MultiIndex, Expr>,
}

impl ScalarOp {
    pub fn zero() -> Self {
        ScalarOp::default()
    }

    pub fn identity() -> Self {
        ScalarOp::mul_by(Expr::one())
    }

    /// Multiplication by an expression.
    pub fn mul_by(e: Expr) -> Self {
        ScalarOp::term(e, MultiIndex::empty())
    }

    pub fn derivative(idx: MultiIndex) -> Self {
        ScalarOp::term(Expr::one(), idx)
    }

    pub fn term(coeff: Expr, idx: MultiIndex) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(idx, coeff);
        }
        ScalarOp { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Expr)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient when the operator is plain multiplication.
    pub fn as_multiplier(&self) -> Option<Expr> {
        match self.terms.len() {
            0 => Some(Expr::zero()),
            1 => self.terms.get(&MultiIndex::empty()).cloned(),
            _ => None,
        }
    }

    fn insert(&mut self, idx: MultiIndex, c: Expr) {
        if c.is_zero() {
            return;
        }
        let cur = self.terms.remove(&idx).unwrap_or_default();
        let sum = cur + c;
        if !sum.is_zero() {
            self.terms.insert(idx, sum);
        }
    }

    pub fn apply(&self, v: &Expr) -> Expr {
        self.terms.iter().map(|(idx, c)| c * &total_derivative_multi(v, idx)).sum()
    }

    pub fn add(&self, other: &ScalarOp) -> ScalarOp {
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.insert(i.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> ScalarOp {
        ScalarOp { terms: self.terms.iter().map(|(i, c)| (i.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &ScalarOp) -> ScalarOp {
        self.add(&other.neg())
    }

    /// Left multiplication of every coefficient.
    pub fn scale(&self, e: &Expr) -> ScalarOp {
        let mut out = ScalarOp::zero();
        for (i, c) in &self.terms {
            out.insert(i.clone(), c * e);
        }
        out
    }

    /// `self o other`.
    pub fn compose(&self, other: &ScalarOp) -> ScalarOp {
        let mut out = ScalarOp::zero();
        for (i, a) in &self.terms {
            for (k, w) in i.sub_indices() {
                let rest = i.minus(&k).expect("sub-multiset");
                for (j, b) in &other.terms {
                    let c = a * &total_derivative_multi(b, &rest);
                    out.insert(k.join(j), c.scale(&rat(w as i64)));
                }
            }
        }
        out
    }

    /// The formal adjoint `V -> sum_I (-D)_I (a_I V)`.
    pub fn adjoint(&self) -> ScalarOp {
        let mut out = ScalarOp::zero();
        for (i, a) in &self.terms {
            let sign = if i.order() % 2 == 1 { -1 } else { 1 };
            for (k, w) in i.sub_indices() {
                let rest = i.minus(&k).expect("sub-multiset");
                let c = total_derivative_multi(a, &rest).scale(&rat(sign * w as i64));
                out.insert(k, c);
            }
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: &mut dyn FnMut(&Expr) -> Result<Expr, LinopError>) -> Result<ScalarOp, LinopError> {
        let mut out = ScalarOp::zero();
        for (i, c) in &self.terms {
            out.insert(i.clone(), f(c)?);
        }
        Ok(out)
    }
}

fn needs_parens(e: &Expr) -> bool {
    e.len() > 1
}

impl fmt::Display for ScalarOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest order first, so `t*D[t] + 2` reads as written by hand.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.order().cmp(&a.0.order()).then_with(|| a.0.cmp(b.0)));
        let mut first = true;
        for (idx, c) in terms {
            let d = if idx.is_empty() {
                String::new()
            } else {
                let v: Vec<&str> = idx.vars().iter().map(|s| s.as_str()).collect();
                format!("D[{}]", v.join(","))
            };
            let (neg, mag) = match c.as_monomial() {
                Some((k, _)) if k < rat(0) => (true, -c),
                _ => (false, c.clone()),
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let cs = mag.to_string();
            if d.is_empty() {
                if needs_parens(&mag) {
                    write!(f, "({cs})")?;
                } else {
                    f.write_str(&cs)?;
                }
            } else if mag == Expr::one() {
                f.write_str(&d)?;
            } else if needs_parens(&mag) {
                write!(f, "({cs})*{d}")?;
            } else {
                write!(f, "{cs}*{d}")?;
            }
        }
        Ok(())
    }
}

/// A `rows x cols` matrix of scalar operators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TotalDiffOp {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<ScalarOp>>,
}

impl TotalDiffOp {
    pub fn zero(rows: usize, cols: usize) -> Self {
        TotalDiffOp { rows, cols, entries: vec![vec![ScalarOp::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = TotalDiffOp::zero(n, n);
        for i in 0..n {
            out.entries[i][i] = ScalarOp::identity();
        }
        out
    }

    pub fn diag(d: Vec<ScalarOp>) -> Self {
        let n = d.len();
        let mut out = TotalDiffOp::zero(n, n);
        for (i, e) in d.into_iter().enumerate() {
            out.entries[i][i] = e;
        }
        out
    }

    /// Builds from rows; every row must have the same length.
    pub fn from_rows(entries: Vec<Vec<ScalarOp>>) -> Result<Self, LinopError> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        if let Some(bad) = entries.iter().find(|r| r.len() != cols) {
            return Err(LinopError::ShapeMismatch { expected: format!("{cols} columns"), got: format!("{}", bad.len()) });
        }
        Ok(TotalDiffOp { rows, cols, entries })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entry(&self, r: usize, c: usize) -> &ScalarOp {
        &self.entries[r][c]
    }

    pub fn rows(&self) -> &[Vec<ScalarOp>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_zero())
    }

    pub fn apply(&self, v: &[Expr]) -> Result<Vec<Expr>, LinopError> {
        if v.len() != self.cols {
            return Err(LinopError::ShapeMismatch { expected: format!("{} components", self.cols), got: v.len().to_string() });
        }
        Ok(self.entries.iter().map(|row| row.iter().zip(v).map(|(op, x)| op.apply(x)).sum()).collect())
    }

    pub fn adjoint(&self) -> TotalDiffOp {
        let mut out = TotalDiffOp::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c][r] = self.entries[r][c].adjoint();
            }
        }
        out
    }

    /// `self o other`.
    pub fn compose(&self, other: &TotalDiffOp) -> Result<TotalDiffOp, LinopError> {
        if self.cols != other.rows {
            return Err(LinopError::ShapeMismatch {
                expected: format!("{} rows", self.cols),
                got: other.rows.to_string(),
            });
        }
        let mut out = TotalDiffOp::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = ScalarOp::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.entries[r][k].compose(&other.entries[k][c]));
                }
                out.entries[r][c] = acc;
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &TotalDiffOp, f: impl Fn(&ScalarOp, &ScalarOp) -> ScalarOp) -> Result<TotalDiffOp, LinopError> {
        if self.shape() != other.shape() {
            return Err(LinopError::ShapeMismatch {
                expected: format!("{:?}", self.shape()),
                got: format!("{:?}", other.shape()),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
            .collect();
        Ok(TotalDiffOp { rows: self.rows, cols: self.cols, entries })
    }

    pub fn add(&self, other: &TotalDiffOp) -> Result<TotalDiffOp, LinopError> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &TotalDiffOp) -> Result<TotalDiffOp, LinopError> {
        self.zip_with(other, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> TotalDiffOp {
        self.map(&mut |e| e.neg())
    }

    pub fn scale(&self, e: &Expr) -> TotalDiffOp {
        self.map(&mut |op| op.scale(e))
    }

    fn map(&self, f: &mut dyn FnMut(&ScalarOp) -> ScalarOp) -> TotalDiffOp {
        let entries = self.entries.iter().map(|row| row.iter().map(|e| f(e)).collect()).collect();
        TotalDiffOp { rows: self.rows, cols: self.cols, entries }
    }

    pub fn map_coeffs(&self, f: &mut dyn FnMut(&Expr) -> Result<Expr, LinopError>) -> Result<TotalDiffOp, LinopError> {
        let mut entries = Vec::with_capacity(self.rows);
        for row in &self.entries {
            let mut r = Vec::with_capacity(self.cols);
            for e in row {
                r.push(e.map_coeffs(f)?);
            }
            entries.push(r);
        }
        Ok(TotalDiffOp { rows: self.rows, cols: self.cols, entries })
    }
}

impl fmt::Display for TotalDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|row| format!("[{}]", row.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// The Frechet derivative `F'` as an operator, `F.len() x deps.len()`.
pub fn frechet_op(f: &[Expr], deps: &[Symbol]) -> Result<TotalDiffOp, LinopError> {
    let mut out = TotalDiffOp::zero(f.len(), deps.len());
    for (a, fa) in f.iter().enumerate() {
        for j in fa.jets() {
            let c = deps
                .iter()
                .position(|d| *d == j.dep)
                .ok_or_else(|| JetError::UnknownDependent(j.dep.to_string()))?;
            let coeff = fa.partial(&Var::Jet(j.clone()));
            out.entries[a][c].insert(j.derivs.clone(), coeff);
        }
    }
    Ok(out)
}

/// Which determining equation an object belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Symmetry,
    Adjoint,
}

/// `R_P = P'` or `R_Q = -Q'` for an evolution system, from the reduced object.
pub fn extract_r_evolution(sys: &PDESystem, object: &[Expr], side: Side) -> Result<TotalDiffOp, LinopError> {
    if sys.evolution_var().is_none() {
        return Err(JetError::NoEvolutionForm.into());
    }
    let reduced: Vec<Expr> = object.iter().map(|e| reduce_on_solutions(e, sys)).collect::<Result<_, _>>()?;
    let op = frechet_op(&reduced, &sys.dependents)?;
    Ok(match side {
        Side::Symmetry => op,
        Side::Adjoint => op.neg(),
    })
}

/// Checks `G'(P) = R(G)` or `G'^*(Q) = R(G)` identically in jet space.
pub fn verify_r(sys: &PDESystem, object: &[Expr], r: &TotalDiffOp, side: Side) -> Result<bool, LinopError> {
    let (want_len, rows) = match side {
        Side::Symmetry => (sys.dependents.len(), sys.equations.len()),
        Side::Adjoint => (sys.equations.len(), sys.dependents.len()),
    };
    if object.len() != want_len {
        return Err(LinopError::ShapeMismatch { expected: format!("{want_len} components"), got: object.len().to_string() });
    }
    if r.shape() != (rows, sys.equations.len()) {
        return Err(LinopError::ShapeMismatch {
            expected: format!("({rows}, {})", sys.equations.len()),
            got: format!("{:?}", r.shape()),
        });
    }
    let lhs = match side {
        Side::Symmetry => frechet(&sys.equations, object, &sys.dependents)?,
        Side::Adjoint => frechet_adjoint(&sys.equations, object, &sys.dependents)?,
    };
    let rhs = r.apply(&sys.equations)?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests;
