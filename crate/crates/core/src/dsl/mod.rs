//! The `.sys` system-description format.
//!
//! A file is a sequence of sections. A section starts on a line whose first
//! word is a keyword; indented lines that follow form its body. A statement
//! continues across lines while brackets are open. `#` starts a comment.

pub mod eval;
mod lexer;
mod parser;
mod system;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::jetcalc::{PDESystem, SolvedForm};
use crate::linop::{LinopError, TotalDiffOp};
use crate::params::ParamScalar;
use crate::symexpr::{Expr, ExprError, Rat, Symbol};

pub use eval::Scope;
pub use system::{
    parse_system, ActionEntry, BracketEntry, CommutatorEntry, Constraint, IntegrandSpec, InverseEntry, IsoMap,
    IsomorphismSpec, LiftSpec, NoetherSpec, Object, RelationSpec, SystemFile, Table, TableType, Variant,
    VariationalKind, VariationalSpec,
};

/// A linear combination of basis labels with parameter-dependent coefficients.
pub type LinComb = BTreeMap<String, ParamScalar>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DslError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: undeclared name `{name}`")]
    Undeclared { pos: Pos, name: String },
    #[error("{pos}: {msg}")]
    Arity { pos: Pos, msg: String },
    #[error("{pos}: {source}")]
    Expr { pos: Pos, source: ExprError },
    #[error("{pos}: expected {expected} components, found {got}")]
    LengthMismatch { pos: Pos, expected: usize, got: usize },
    #[error("line {line}: {msg}")]
    Section { line: usize, msg: String },
    #[error("line {line}: duplicate definition of `{name}`")]
    Duplicate { line: usize, name: String },
    #[error("unknown variant `{0}`")]
    UnknownVariant(String),
    #[error("substituting a variant failed: {0}")]
    Specialize(String),
}

/// Parses a single expression against a scope.
pub fn parse_expr(text: &str, scope: &Scope) -> Result<Expr, DslError> {
    let toks = lexer::tokenize(text, 1, 1)?;
    let end = Pos { line: 1, col: text.chars().count() + 1 };
    if toks.is_empty() {
        return Err(DslError::Syntax { pos: end, msg: "empty expression".into() });
    }
    let node = parser::parse_node(&toks, end)?;
    eval::to_expr(&node, scope)
}

/// Parses a matrix total differential operator such as `[[0, D[x]], [D[x], 0]]`.
pub fn parse_operator(text: &str, scope: &Scope) -> Result<TotalDiffOp, DslError> {
    let toks = lexer::tokenize(text, 1, 1)?;
    let end = Pos { line: 1, col: text.chars().count() + 1 };
    let node = parser::parse_node(&toks, end)?;
    eval::to_matrix_op(&node, scope)
}

/// Parses a combination of labels such as `Q3 + c1*Q1`.
pub fn parse_lincomb(text: &str, labels: &[String], scope: &Scope) -> Result<LinComb, DslError> {
    let toks = lexer::tokenize(text, 1, 1)?;
    let end = Pos { line: 1, col: text.chars().count() + 1 };
    if toks.is_empty() {
        return Err(DslError::Syntax { pos: end, msg: "empty combination".into() });
    }
    let node = parser::parse_node(&toks, end)?;
    eval::to_lincomb(&node, labels, scope)
}

/// Parses a parameter assignment `name=value`.
pub fn parse_assignment(text: &str, scope: &Scope) -> Result<(Symbol, Rat), DslError> {
    let end = Pos { line: 1, col: text.chars().count() + 1 };
    let Some((lhs, rhs)) = text.split_once('=') else {
        return Err(DslError::Syntax { pos: end, msg: "expected name=value".into() });
    };
    let node = |t: &str, col: usize| -> Result<parser::Node, DslError> {
        let toks = lexer::tokenize(t, 1, col)?;
        if toks.is_empty() {
            return Err(DslError::Syntax { pos: Pos { line: 1, col }, msg: "missing operand".into() });
        }
        parser::parse_node(&toks, end)
    };
    let l = node(lhs, 1)?;
    let r = node(rhs, lhs.chars().count() + 2)?;
    eval::to_assignment(&l, &r, scope)
}

fn spec_err(e: impl fmt::Display) -> DslError {
    DslError::Specialize(e.to_string())
}

fn inst(e: &Expr, sets: &BTreeMap<Symbol, Rat>) -> Result<Expr, DslError> {
    e.instantiate_params(sets).map_err(spec_err)
}

fn inst_scalar(s: &ParamScalar, sets: &BTreeMap<Symbol, Rat>) -> Result<ParamScalar, DslError> {
    s.partial_eval(sets).ok_or_else(|| DslError::Specialize(format!("`{s}` has a pole at the variant values")))
}

fn inst_lc(lc: &LinComb, sets: &BTreeMap<Symbol, Rat>) -> Result<LinComb, DslError> {
    let mut out = LinComb::new();
    for (k, v) in lc {
        let v = inst_scalar(v, sets)?;
        if !v.is_zero() {
            out.insert(k.clone(), v);
        }
    }
    Ok(out)
}

fn inst_op(op: &TotalDiffOp, sets: &BTreeMap<Symbol, Rat>) -> Result<TotalDiffOp, DslError> {
    op.map_coeffs(&mut |e| e.instantiate_params(sets).map_err(|x| LinopError::Jet(x.into())))
        .map_err(spec_err)
}

fn inst_exprs(v: &[Expr], sets: &BTreeMap<Symbol, Rat>) -> Result<Vec<Expr>, DslError> {
    v.iter().map(|e| inst(e, sets)).collect()
}

impl Table {
    /// The table with parameters fixed to the given values.
    pub fn instantiate(&self, sets: &BTreeMap<Symbol, Rat>) -> Result<Table, DslError> {
        let mut t = self.clone();
        t.q = self.q.as_ref().map(|q| inst_lc(q, sets)).transpose()?;
        for a in &mut t.actions {
            a.value = inst_lc(&a.value, sets)?;
        }
        for b in &mut t.brackets {
            b.left = inst_lc(&b.left, sets)?;
            b.right = inst_lc(&b.right, sets)?;
            b.value = inst_lc(&b.value, sets)?;
        }
        for (_, def) in &mut t.basis {
            *def = inst_lc(def, sets)?;
        }
        for i in &mut t.inverses {
            i.q = inst_lc(&i.q, sets)?;
            i.p = inst_lc(&i.p, sets)?;
        }
        if let Some(k) = &self.kernel {
            t.kernel = Some(k.iter().map(|c| inst_lc(c, sets)).collect::<Result<_, _>>()?);
        }
        Ok(t)
    }
}

impl SystemFile {
    pub fn variant(&self, name: &str) -> Option<&Variant> {
        self.variants.iter().find(|v| v.name == name)
    }

    pub fn default_variant(&self) -> Option<&Variant> {
        self.variants.first()
    }

    /// Substitutes the variant's parameter values everywhere and drops
    /// objects and tables tagged for other variants. `None` selects the
    /// default (first listed) variant, if any.
    pub fn specialize(&self, variant: Option<&str>) -> Result<SystemFile, DslError> {
        let v = match variant {
            Some(n) => Some(self.variant(n).ok_or_else(|| DslError::UnknownVariant(n.to_string()))?),
            None => self.default_variant(),
        };
        let Some(v) = v else { return Ok(self.clone()) };
        let sets = &v.sets;
        let keep = |tags: &[String]| tags.is_empty() || tags.iter().any(|t| *t == v.name);
        let mut out = self.clone();
        out.parameters.retain(|p| !sets.contains_key(p));
        out.constraints = Vec::new();
        for c in &self.constraints {
            let c2 = Constraint { text: c.text.clone(), lhs: inst_scalar(&c.lhs, sets)?, rhs: inst_scalar(&c.rhs, sets)? };
            if let Some(d) = c2.difference().as_rat() {
                if d == Rat::from_integer(0.into()) {
                    return Err(DslError::Specialize(format!("variant `{}` violates `{}`", v.name, c.text)));
                }
                continue;
            }
            out.constraints.push(c2);
        }
        out.equations = self.equations.iter().map(|(n, e)| Ok((n.clone(), inst(e, sets)?))).collect::<Result<_, DslError>>()?;
        out.evolution = self.evolution.iter().map(|(j, e)| Ok((j.clone(), inst(e, sets)?))).collect::<Result<_, DslError>>()?;
        let obj = |o: &Object| -> Result<Object, DslError> {
            Ok(Object { scale: inst_scalar(&o.scale, sets)?, components: inst_exprs(&o.components, sets)?, ..o.clone() })
        };
        out.symmetries = self.symmetries.iter().filter(|o| keep(&o.tags)).map(obj).collect::<Result<_, _>>()?;
        out.adjoint_symmetries = self.adjoint_symmetries.iter().filter(|o| keep(&o.tags)).map(obj).collect::<Result<_, _>>()?;
        let labels: Vec<String> = out.sym_labels().into_iter().chain(out.adj_labels()).collect();
        out.r_ops = self
            .r_ops
            .iter()
            .filter(|(l, _)| labels.contains(l))
            .map(|(l, r)| Ok((l.clone(), inst_op(r, sets)?)))
            .collect::<Result<_, DslError>>()?;
        out.commutators = self
            .commutators
            .iter()
            .filter(|c| labels.contains(&c.left) && labels.contains(&c.right))
            .map(|c| Ok(CommutatorEntry { value: inst_lc(&c.value, sets)?, ..c.clone() }))
            .collect::<Result<_, DslError>>()?;
        out.multipliers.retain(|l| labels.contains(l));
        out.nonmultipliers.retain(|l| labels.contains(l));
        out.tables = Vec::new();
        for t in self.tables.iter().filter(|t| keep(&t.tags)) {
            out.tables.push(t.instantiate(sets)?);
        }
        out.noether = self
            .noether
            .iter()
            .filter(|n| keep(&n.tags))
            .map(|n| Ok(NoetherSpec { q: inst_lc(&n.q, sets)?, op: inst_op(&n.op, sets)?, ..n.clone() }))
            .collect::<Result<_, DslError>>()?;
        out.variational = self
            .variational
            .iter()
            .filter(|x| keep(&x.tags))
            .map(|x| {
                Ok(VariationalSpec {
                    op: inst_op(&x.op, sets)?,
                    density: inst(&x.density, sets)?,
                    lhs: x.lhs.as_ref().map(|l| inst_exprs(l, sets)).transpose()?,
                    ..x.clone()
                })
            })
            .collect::<Result<_, DslError>>()?;
        out.integrands = self
            .integrands
            .iter()
            .filter(|x| keep(&x.tags))
            .map(|x| Ok(IntegrandSpec { q: inst_lc(&x.q, sets)?, expect: inst(&x.expect, sets)?, ..x.clone() }))
            .collect::<Result<_, DslError>>()?;
        out.isomorphisms = Vec::new();
        for iso in self.isomorphisms.iter().filter(|x| keep(&x.tags)) {
            let map = match &iso.map {
                IsoMap::Inverse => IsoMap::Inverse,
                IsoMap::Explicit(es) => {
                    IsoMap::Explicit(es.iter().map(|(k, v)| Ok((k.clone(), inst_lc(v, sets)?))).collect::<Result<_, DslError>>()?)
                }
            };
            out.isomorphisms.push(IsomorphismSpec { map, scale: inst_scalar(&iso.scale, sets)?, ..iso.clone() });
        }
        out.relations = self
            .relations
            .iter()
            .map(|r| Ok(RelationSpec { combine: inst_op(&r.combine, sets)?, parent_op: inst_op(&r.parent_op, sets)?, ..r.clone() }))
            .collect::<Result<_, DslError>>()?;
        out.variants = vec![v.clone()];
        Ok(out)
    }

    /// The underlying PDE system, with the solved form if one was given.
    pub fn pde_system(&self) -> PDESystem {
        PDESystem {
            name: self.name.clone(),
            independents: self.independents.clone(),
            dependents: self.dependents.clone(),
            parameters: self.parameters.clone(),
            equations: self.equations.iter().map(|(_, e)| e.clone()).collect(),
            solved: if self.evolution.is_empty() { None } else { Some(SolvedForm { rules: self.evolution.clone() }) },
        }
    }
}

#[cfg(test)]
mod tests;
