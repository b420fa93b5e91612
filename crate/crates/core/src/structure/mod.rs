//! Determining equations, multipliers, symmetry actions and the objects
//! built from a single adjoint-symmetry.
//!
//! Evolution systems work with objects reduced on solutions and R-operators
//! extracted from them. Other systems need R-operators supplied alongside
//! the objects; those are verified off solutions before use.

use serde::Serialize;
use thiserror::Error;

use crate::jetcalc::{euler, frechet, frechet_adjoint, is_total_divergence, reduce_on_solutions, JetError, PDESystem};
use crate::linop::{extract_r_evolution, frechet_op, verify_r, LinopError, TotalDiffOp};
use crate::symexpr::{Expr, Symbol};

pub use crate::linop::Side;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("`{0}` cannot be checked: the system has no solved form and no R-operator was given")]
    UnverifiableWithoutR(String),
    #[error("supplied R-operator for `{0}` does not satisfy the determining identity")]
    BadR(String),
    #[error("coefficient `{0}` cannot be used inside an operator")]
    Coefficient(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Linop(#[from] LinopError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Residual reduced with the solved form.
    OnSolution,
    /// `G'(P) = R(G)` checked identically.
    OffSolutionR,
    /// Both of the above.
    OnSolutionAndR,
    /// Euler operators applied to `Q.G`.
    Euler,
    /// Exact identity in jet space.
    Identity,
    /// Equality modulo total divergences.
    Divergence,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub subject: String,
    pub pass: bool,
    pub method: Method,
    /// Nonzero residual components, rendered.
    pub residual: Vec<String>,
}

impl CheckReport {
    fn from_residual(subject: &str, method: Method, residual: &[Expr]) -> Self {
        let residual: Vec<String> = residual.iter().filter(|e| !e.is_zero()).map(|e| e.to_string()).collect();
        CheckReport { subject: subject.to_string(), pass: residual.is_empty(), method, residual }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ActionKind {
    Action1,
    Action2,
    Action3,
}

impl ActionKind {
    pub fn from_index(k: u8) -> Option<Self> {
        match k {
            1 => Some(ActionKind::Action1),
            2 => Some(ActionKind::Action2),
            3 => Some(ActionKind::Action3),
            _ => None,
        }
    }
}

fn reduce_all(sys: &PDESystem, v: &[Expr]) -> Result<Vec<Expr>, JetError> {
    v.iter().map(|e| reduce_on_solutions(e, sys)).collect()
}

fn dot(a: &[Expr], b: &[Expr]) -> Expr {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checks the symmetry (`G'(P) = 0`) or adjoint-symmetry (`G'^*(Q) = 0`)
/// determining equation. With a solved form the residual is reduced on
/// solutions; a supplied R-operator is verified off solutions as well.
pub fn check_determining(
    sys: &PDESystem,
    subject: &str,
    object: &[Expr],
    side: Side,
    r: Option<&TotalDiffOp>,
) -> Result<CheckReport, StructureError> {
    let r_ok = match r {
        Some(r) => Some(verify_r(sys, object, r, side)?),
        None => None,
    };
    if sys.solved.is_none() {
        let Some(ok) = r_ok else { return Err(StructureError::UnverifiableWithoutR(subject.to_string())) };
        let lhs = match side {
            Side::Symmetry => frechet(&sys.equations, object, &sys.dependents)?,
            Side::Adjoint => frechet_adjoint(&sys.equations, object, &sys.dependents)?,
        };
        let rhs = r.expect("checked above").apply(&sys.equations)?;
        let diff: Vec<Expr> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        let mut rep = CheckReport::from_residual(subject, Method::OffSolutionR, &diff);
        rep.pass = ok;
        return Ok(rep);
    }
    let raw = match side {
        Side::Symmetry => frechet(&sys.equations, object, &sys.dependents)?,
        Side::Adjoint => frechet_adjoint(&sys.equations, object, &sys.dependents)?,
    };
    let residual = reduce_all(sys, &raw)?;
    let mut rep = CheckReport::from_residual(subject, Method::OnSolution, &residual);
    if let Some(ok) = r_ok {
        rep.method = Method::OnSolutionAndR;
        if !ok {
            rep.pass = false;
            rep.residual.push(format!("R[{subject}] fails the off-solution identity"));
        }
    }
    Ok(rep)
}

/// An object in the form used by the actions: reduced on solutions for
/// evolution systems, together with its R-operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Prepared {
    pub body: Vec<Expr>,
    pub r: TotalDiffOp,
}

/// The R-operator of an object: extracted for evolution systems, otherwise
/// the supplied one after verification.
pub fn prepare(
    sys: &PDESystem,
    subject: &str,
    object: &[Expr],
    side: Side,
    supplied: Option<&TotalDiffOp>,
) -> Result<Prepared, StructureError> {
    if sys.evolution_var().is_some() {
        let body = reduce_all(sys, object)?;
        let r = extract_r_evolution(sys, &body, side)?;
        return Ok(Prepared { body, r });
    }
    let r = supplied.ok_or_else(|| StructureError::UnverifiableWithoutR(subject.to_string()))?;
    if !verify_r(sys, object, r, side)? {
        return Err(StructureError::BadR(subject.to_string()));
    }
    Ok(Prepared { body: object.to_vec(), r: r.clone() })
}

/// `S_P(Q)` for the requested action, reduced on solutions when possible.
///
/// * Action1: `R_P^*(Q) - R_Q^*(P)`
/// * Action2: `Q'(P) + R_P^*(Q)`
/// * Action3: `Q'(P) + R_Q^*(P)`
pub fn symmetry_action(kind: ActionKind, sys: &PDESystem, p: &Prepared, q: &Prepared) -> Result<Vec<Expr>, StructureError> {
    let rp_q = || p.r.adjoint().apply(&q.body);
    let rq_p = || q.r.adjoint().apply(&p.body);
    let qp = || frechet(&q.body, &p.body, &sys.dependents);
    let raw: Vec<Expr> = match kind {
        ActionKind::Action1 => rp_q()?.into_iter().zip(rq_p()?).map(|(a, b)| a - b).collect(),
        ActionKind::Action2 => qp()?.into_iter().zip(rp_q()?).map(|(a, b)| a + b).collect(),
        ActionKind::Action3 => qp()?.into_iter().zip(rq_p()?).map(|(a, b)| a + b).collect(),
    };
    Ok(if sys.solved.is_some() { reduce_all(sys, &raw)? } else { raw })
}

/// `Q' + R_Q^*`; for evolution systems this is `Q' - Q'^*`.
pub fn noether_operator(sys: &PDESystem, q: &Prepared) -> Result<TotalDiffOp, StructureError> {
    let qp = frechet_op(&q.body, &sys.dependents)?;
    Ok(qp.add(&q.r.adjoint())?)
}

/// A weighted sum `sum c_i X_i` of operators with numeric-or-monomial weights.
pub fn combine_ops(parts: &[(crate::params::ParamScalar, TotalDiffOp)]) -> Result<Option<TotalDiffOp>, StructureError> {
    let mut acc: Option<TotalDiffOp> = None;
    for (c, op) in parts {
        let e = c.to_expr().ok_or_else(|| StructureError::Coefficient(c.to_string()))?;
        let term = op.scale(&e);
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc)
}

/// The symplectic integrand on two characteristics.
///
/// Evolution systems use `P1.Q'(P2) - P2.Q'(P1)`. Otherwise the Noether
/// operator `J` gives `(P2.J(P1) - P1.J(P2))/2`.
pub fn symplectic_integrand(sys: &PDESystem, q: &Prepared, p1: &[Expr], p2: &[Expr]) -> Result<Expr, StructureError> {
    if sys.evolution_var().is_some() {
        let a = frechet(&q.body, p2, &sys.dependents)?;
        let b = frechet(&q.body, p1, &sys.dependents)?;
        return Ok(dot(p1, &a) - dot(p2, &b));
    }
    let j = noether_operator(sys, q)?;
    let half = crate::symexpr::ratio(1, 2);
    Ok((dot(p2, &j.apply(p1)?) - dot(p1, &j.apply(p2)?)).scale(&half))
}

/// Placeholder characteristics `(a1, a2, ...)` as expressions.
pub fn placeholders(names: &[Symbol]) -> Vec<Expr> {
    names.iter().map(|n| Expr::jet(n.as_str(), &[])).collect()
}

/// Compares an integrand with an expected value modulo total divergences.
pub fn check_integrand(subject: &str, integrand: &Expr, expect: &Expr) -> CheckReport {
    let diff = integrand - expect;
    let pass = is_total_divergence(&diff);
    CheckReport {
        subject: subject.to_string(),
        pass,
        method: Method::Divergence,
        residual: if pass { Vec::new() } else { vec![diff.to_string()] },
    }
}

/// Euler-operator test for a multiplier, plus the self-adjointness of `Q'`
/// for evolution systems, which must agree with it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierReport {
    pub subject: String,
    pub multiplier: bool,
    pub self_adjoint: Option<bool>,
}

pub fn classify_multiplier(sys: &PDESystem, subject: &str, q: &[Expr]) -> Result<MultiplierReport, StructureError> {
    let evolution = sys.evolution_var().is_some();
    let lambda = if evolution { reduce_all(sys, q)? } else { q.to_vec() };
    let density = dot(&lambda, &sys.equations);
    let multiplier = sys.dependents.iter().all(|d| euler(&density, d).is_zero());
    let self_adjoint = if evolution {
        let op = frechet_op(&lambda, &sys.dependents)?;
        Some(op == op.adjoint())
    } else {
        None
    };
    Ok(MultiplierReport { subject: subject.to_string(), multiplier, self_adjoint })
}

/// Lagrangian form: `op(G) = E(L)` identically.
pub fn lagrangian_check(sys: &PDESystem, subject: &str, op: &TotalDiffOp, density: &Expr) -> Result<CheckReport, StructureError> {
    let lhs = op.apply(&sys.equations)?;
    let residual: Vec<Expr> = lhs.iter().zip(&sys.dependents).map(|(a, d)| a - &euler(density, d)).collect();
    Ok(CheckReport::from_residual(subject, Method::Identity, &residual))
}

/// Hamiltonian form: `lhs - op(E(H)) = G` identically.
pub fn hamiltonian_check(
    sys: &PDESystem,
    subject: &str,
    op: &TotalDiffOp,
    density: &Expr,
    lhs: &[Expr],
) -> Result<CheckReport, StructureError> {
    let grad: Vec<Expr> = sys.dependents.iter().map(|d| euler(density, d)).collect();
    let flow = op.apply(&grad)?;
    let residual: Vec<Expr> =
        lhs.iter().zip(&flow).zip(&sys.equations).map(|((l, f), g)| l - f - g.clone()).collect();
    Ok(CheckReport::from_residual(subject, Method::Identity, &residual))
}

/// `combine(G) = parent_op(G_parent)` identically.
pub fn relation_check(
    sys: &PDESystem,
    parent: &PDESystem,
    subject: &str,
    combine: &TotalDiffOp,
    parent_op: &TotalDiffOp,
) -> Result<CheckReport, StructureError> {
    let a = combine.apply(&sys.equations)?;
    let b = parent_op.apply(&parent.equations)?;
    let residual: Vec<Expr> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    Ok(CheckReport::from_residual(subject, Method::Identity, &residual))
}

#[cfg(test)]
mod tests;
