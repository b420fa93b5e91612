//! Differential calculus on jet space.
//!
//! Total derivatives, the Frechet derivative and its formal adjoint, Euler
//! operators and reduction on the solution space of a solved-form system.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::symexpr::{Expr, ExprError, Jet, MultiIndex, Symbol, Var};

/// A symmetry characteristic, one component per dependent variable.
pub type VectorField = Vec<Expr>;
/// An adjoint-symmetry, one component per equation.
pub type AdjSymm = Vec<Expr>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("system has no solved form")]
    NoEvolutionForm,
    #[error("`{0}` is not a dependent variable of the system")]
    UnknownDependent(String),
    #[error("reduction did not terminate at `{0}`")]
    ReductionLoop(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Rules `u_I -> g` describing the solution space. A rule applies to every
/// jet `u_J` with `I` contained in `J`, replacing it by `D_{J-I} g`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolvedForm {
    pub rules: Vec<(Jet, Expr)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PDESystem {
    pub name: String,
    pub independents: Vec<Symbol>,
    pub dependents: Vec<Symbol>,
    pub parameters: Vec<Symbol>,
    pub equations: Vec<Expr>,
    pub solved: Option<SolvedForm>,
}

impl PDESystem {
    pub fn dep_index(&self, dep: &Symbol) -> Option<usize> {
        self.dependents.iter().position(|d| d == dep)
    }

    /// The evolution direction when the solved form is `u^a_t = g^a` for every
    /// dependent, with `g` free of `t`-derivatives and `G^a = u^a_t - g^a`.
    pub fn evolution_var(&self) -> Option<Symbol> {
        let solved = self.solved.as_ref()?;
        if solved.rules.len() != self.dependents.len() || self.equations.len() != self.dependents.len() {
            return None;
        }
        let t = solved.rules.first()?.0.derivs.vars().first()?.clone();
        for (i, (lhs, rhs)) in solved.rules.iter().enumerate() {
            if lhs.dep != self.dependents[i] || lhs.derivs != MultiIndex::single(&t) {
                return None;
            }
            if rhs.jets().iter().any(|j| j.derivs.count(&t) > 0) {
                return None;
            }
            if self.equations[i] != Expr::var(Var::Jet(lhs.clone())) - rhs.clone() {
                return None;
            }
        }
        Some(t)
    }
}

/// `D_x e`.
pub fn total_derivative(e: &Expr, x: &Symbol) -> Expr {
    e.derive_with(&|v: &Var| match v {
        Var::Indep(y) if y == x => Expr::one(),
        Var::Jet(j) => Expr::var(Var::Jet(j.differentiate(x))),
        _ => Expr::zero(),
    })
}

/// `D_I e` for a multi-index.
pub fn total_derivative_multi(e: &Expr, idx: &MultiIndex) -> Expr {
    idx.vars().iter().fold(e.clone(), |acc, x| total_derivative(&acc, x))
}

/// `(-D)_I e`.
pub fn signed_total_derivative(e: &Expr, idx: &MultiIndex) -> Expr {
    let d = total_derivative_multi(e, idx);
    if idx.order() % 2 == 1 {
        -d
    } else {
        d
    }
}

fn jets_by_dep(e: &Expr) -> BTreeMap<Symbol, Vec<Jet>> {
    let mut out: BTreeMap<Symbol, Vec<Jet>> = BTreeMap::new();
    for j in e.jets() {
        out.entry(j.dep.clone()).or_default().push(j);
    }
    out
}

/// `F'(P)`: the linearization of `F` along `P`.
pub fn frechet(f: &[Expr], p: &[Expr], deps: &[Symbol]) -> Result<Vec<Expr>, JetError> {
    f.iter()
        .map(|fa| {
            let mut acc = Expr::zero();
            for j in fa.jets() {
                let i = deps
                    .iter()
                    .position(|d| *d == j.dep)
                    .ok_or_else(|| JetError::UnknownDependent(j.dep.to_string()))?;
                let dp = total_derivative_multi(&p[i], &j.derivs);
                acc = acc + fa.partial(&Var::Jet(j.clone())) * dp;
            }
            Ok(acc)
        })
        .collect()
}

/// `F'^*(Q)`, one component per dependent variable.
pub fn frechet_adjoint(f: &[Expr], q: &[Expr], deps: &[Symbol]) -> Result<Vec<Expr>, JetError> {
    let mut out = vec![Expr::zero(); deps.len()];
    for (fa, qa) in f.iter().zip(q) {
        for j in fa.jets() {
            let i = deps
                .iter()
                .position(|d| *d == j.dep)
                .ok_or_else(|| JetError::UnknownDependent(j.dep.to_string()))?;
            let c = fa.partial(&Var::Jet(j.clone())) * qa.clone();
            out[i] = std::mem::take(&mut out[i]) + signed_total_derivative(&c, &j.derivs);
        }
    }
    Ok(out)
}

/// The Euler operator `E_u`.
pub fn euler(e: &Expr, dep: &Symbol) -> Expr {
    let mut acc = Expr::zero();
    if let Some(jets) = jets_by_dep(e).get(dep) {
        for j in jets {
            acc = acc + signed_total_derivative(&e.partial(&Var::Jet(j.clone())), &j.derivs);
        }
    }
    acc
}

/// True iff every Euler operator annihilates `e`.
pub fn is_total_divergence(e: &Expr) -> bool {
    e.dependents().iter().all(|d| euler(e, d).is_zero())
}

/// Replaces every jet by its value on the solution space.
pub fn reduce_on_solutions(e: &Expr, sys: &PDESystem) -> Result<Expr, JetError> {
    let solved = sys.solved.as_ref().ok_or(JetError::NoEvolutionForm)?;
    let mut reducer = Reducer { rules: &solved.rules, memo: BTreeMap::new() };
    reducer.reduce(e, 0)
}

struct Reducer<'a> {
    rules: &'a [(Jet, Expr)],
    memo: BTreeMap<Jet, Option<Expr>>,
}

const MAX_DEPTH: usize = 64;

impl Reducer<'_> {
    fn reduce(&mut self, e: &Expr, depth: usize) -> Result<Expr, JetError> {
        let mut map = BTreeMap::new();
        for j in e.jets() {
            if let Some(r) = self.reduce_jet(&j, depth)? {
                map.insert(Var::Jet(j), r);
            }
        }
        if map.is_empty() {
            return Ok(e.clone());
        }
        Ok(e.substitute_many(&map)?)
    }

    fn reduce_jet(&mut self, j: &Jet, depth: usize) -> Result<Option<Expr>, JetError> {
        if let Some(r) = self.memo.get(j) {
            return Ok(r.clone());
        }
        if depth > MAX_DEPTH {
            return Err(JetError::ReductionLoop(j.to_string()));
        }
        let rule = self
            .rules
            .iter()
            .find_map(|(lhs, rhs)| (lhs.dep == j.dep).then(|| j.derivs.minus(&lhs.derivs).map(|rest| (rest, rhs))).flatten());
        let out = match rule {
            None => None,
            Some((rest, rhs)) => {
                let raw = total_derivative_multi(rhs, &rest);
                Some(self.reduce(&raw, depth + 1)?)
            }
        };
        self.memo.insert(j.clone(), out.clone());
        Ok(out)
    }
}

/// Dependents appearing in any of the expressions, in sorted order.
pub fn dependents_of(es: &[Expr]) -> BTreeSet<Symbol> {
    es.iter().flat_map(|e| e.dependents()).collect()
}

#[cfg(test)]
mod tests;
