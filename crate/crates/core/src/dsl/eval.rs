use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};

use super::parser::{Ast, BinOp, Node};
use super::{DslError, LinComb};
use crate::linop::{ScalarOp, TotalDiffOp};
use crate::params::ParamScalar;
use crate::symexpr::{normalize, Exponent, Expr, Jet, MultiIndex, RawExpr, Rat, Symbol, Var};

/// The symbols visible to an expression.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub independents: Vec<Symbol>,
    pub dependents: Vec<Symbol>,
    pub parameters: Vec<Symbol>,
}

impl Scope {
    pub fn resolve(&self, name: &str) -> Option<Var> {
        let s = Symbol::new(name);
        if self.independents.contains(&s) {
            Some(Var::Indep(s))
        } else if self.dependents.contains(&s) {
            Some(Var::Jet(Jet::base(&s)))
        } else if self.parameters.contains(&s) {
            Some(Var::Param(s))
        } else {
            None
        }
    }

    pub fn with_dependents(&self, extra: &[Symbol]) -> Scope {
        let mut s = self.clone();
        s.dependents.extend(extra.iter().cloned());
        s
    }

    fn jet(&self, name: &str, idx: &[String], node: &Node) -> Result<Var, DslError> {
        let dep = Symbol::new(name);
        if !self.dependents.contains(&dep) {
            return Err(if self.resolve(name).is_some() || name == "D" {
                DslError::Arity { pos: node.pos, msg: format!("`{name}` cannot carry a derivative index here") }
            } else {
                DslError::Undeclared { pos: node.pos, name: name.to_string() }
            });
        }
        Ok(Var::Jet(Jet::new(&dep, self.multi_index(idx, node)?)))
    }

    fn multi_index(&self, idx: &[String], node: &Node) -> Result<MultiIndex, DslError> {
        if idx.is_empty() {
            return Err(DslError::Arity { pos: node.pos, msg: "empty derivative index".into() });
        }
        let mut vars = Vec::new();
        for i in idx {
            let s = Symbol::new(i);
            if !self.independents.contains(&s) {
                return Err(DslError::Arity { pos: node.pos, msg: format!("`{i}` is not an independent variable") });
            }
            vars.push(s);
        }
        Ok(MultiIndex::new(vars))
    }
}

fn expr_err(node: &Node, e: crate::symexpr::ExprError) -> DslError {
    DslError::Expr { pos: node.pos, source: e }
}

fn raw(node: &Node, scope: &Scope) -> Result<RawExpr, DslError> {
    Ok(match &node.ast {
        Ast::Num(n) => RawExpr::Num(n.clone()),
        Ast::Ident(name) => RawExpr::Var(
            scope.resolve(name).ok_or_else(|| DslError::Undeclared { pos: node.pos, name: name.clone() })?,
        ),
        Ast::Index(name, idx) => RawExpr::Var(scope.jet(name, idx, node)?),
        Ast::Neg(a) => RawExpr::Neg(Box::new(raw(a, scope)?)),
        Ast::Bin(op, a, b) => {
            let (a, b) = (raw(a, scope)?, raw(b, scope)?);
            match op {
                BinOp::Add => RawExpr::add(a, b),
                BinOp::Sub => RawExpr::sub(a, b),
                BinOp::Mul => RawExpr::mul(a, b),
                BinOp::Div => RawExpr::div(a, b),
            }
        }
        Ast::Pow(a, e) => RawExpr::pow(raw(a, scope)?, exponent(e, scope)?),
        Ast::Tuple(_) | Ast::List(_) => {
            return Err(DslError::Syntax { pos: node.pos, msg: "a tuple is not allowed here".into() })
        }
    })
}

/// Evaluates a node to a normalized expression.
pub fn to_expr(node: &Node, scope: &Scope) -> Result<Expr, DslError> {
    let r = raw(node, scope)?;
    normalize(&r).map_err(|e| expr_err(node, e))
}

/// Evaluates an affine exponent over the parameters.
pub fn exponent(node: &Node, scope: &Scope) -> Result<Exponent, DslError> {
    let bad = |msg: &str| DslError::Syntax { pos: node.pos, msg: msg.to_string() };
    Ok(match &node.ast {
        Ast::Num(n) => Exponent::constant(n.clone()),
        Ast::Ident(name) => match scope.resolve(name) {
            Some(Var::Param(p)) => Exponent::param(&p),
            Some(_) => return Err(bad("exponents may only involve parameters")),
            None => return Err(DslError::Undeclared { pos: node.pos, name: name.clone() }),
        },
        Ast::Neg(a) => -&exponent(a, scope)?,
        Ast::Bin(op, a, b) => {
            let (a, b) = (exponent(a, scope)?, exponent(b, scope)?);
            match op {
                BinOp::Add => &a + &b,
                BinOp::Sub => &a - &b,
                BinOp::Mul => a.mul(&b).map_err(|e| expr_err(node, e))?,
                BinOp::Div => {
                    if !b.is_constant() || b.constant_part().is_zero() {
                        return Err(bad("exponent division needs a nonzero constant"));
                    }
                    a.scale(&b.constant_part().recip())
                }
            }
        }
        _ => return Err(bad("invalid exponent")),
    })
}

/// Evaluates a node to an element of the parameter field.
pub fn to_scalar(node: &Node, scope: &Scope) -> Result<ParamScalar, DslError> {
    let bad = |msg: &str| DslError::Syntax { pos: node.pos, msg: msg.to_string() };
    Ok(match &node.ast {
        Ast::Num(n) => ParamScalar::from_rat(n.clone()),
        Ast::Ident(name) => match scope.resolve(name) {
            Some(Var::Param(p)) => ParamScalar::param(&p),
            Some(_) => return Err(bad(&format!("`{name}` is not a parameter"))),
            None => return Err(DslError::Undeclared { pos: node.pos, name: name.clone() }),
        },
        Ast::Neg(a) => -to_scalar(a, scope)?,
        Ast::Bin(op, a, b) => {
            let (a, b) = (to_scalar(a, scope)?, to_scalar(b, scope)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b.is_zero() {
                        return Err(DslError::Expr { pos: node.pos, source: crate::symexpr::ExprError::DivisionByZero });
                    }
                    a / b
                }
            }
        }
        Ast::Pow(a, e) => {
            let base = to_scalar(a, scope)?;
            let n = exponent(e, scope)?
                .as_integer()
                .and_then(|n| n.to_i32())
                .ok_or_else(|| bad("scalar powers must be integers"))?;
            base.pow_i32(n).ok_or_else(|| DslError::Expr {
                pos: node.pos,
                source: crate::symexpr::ExprError::ZeroToNegativePower,
            })?
        }
        _ => return Err(bad("expected a scalar")),
    })
}

enum Val {
    S(ParamScalar),
    V(LinComb),
}

fn lin(node: &Node, labels: &[String], scope: &Scope) -> Result<Val, DslError> {
    let bad = |msg: &str| DslError::Syntax { pos: node.pos, msg: msg.to_string() };
    Ok(match &node.ast {
        Ast::Ident(name) if labels.contains(name) => {
            let mut m = LinComb::new();
            m.insert(name.clone(), ParamScalar::one());
            Val::V(m)
        }
        Ast::Neg(a) => match lin(a, labels, scope)? {
            Val::S(s) => Val::S(-s),
            Val::V(v) => Val::V(scale_lc(&v, &-ParamScalar::one())),
        },
        Ast::Bin(op, a, b) => {
            let (a, b) = (lin(a, labels, scope)?, lin(b, labels, scope)?);
            match (op, a, b) {
                (BinOp::Add, Val::S(x), Val::S(y)) => Val::S(x + y),
                (BinOp::Sub, Val::S(x), Val::S(y)) => Val::S(x - y),
                (BinOp::Mul, Val::S(x), Val::S(y)) => Val::S(x * y),
                (BinOp::Div, Val::S(x), Val::S(y)) if !y.is_zero() => Val::S(x / y),
                (BinOp::Add, Val::V(x), Val::V(y)) => Val::V(add_lc(&x, &y)),
                (BinOp::Sub, Val::V(x), Val::V(y)) => Val::V(add_lc(&x, &scale_lc(&y, &-ParamScalar::one()))),
                (BinOp::Add | BinOp::Sub, Val::V(x), Val::S(s)) | (BinOp::Add, Val::S(s), Val::V(x)) if s.is_zero() => {
                    Val::V(x)
                }
                (BinOp::Sub, Val::S(s), Val::V(x)) if s.is_zero() => Val::V(scale_lc(&x, &-ParamScalar::one())),
                (BinOp::Mul, Val::S(s), Val::V(x)) | (BinOp::Mul, Val::V(x), Val::S(s)) => Val::V(scale_lc(&x, &s)),
                (BinOp::Div, Val::V(x), Val::S(s)) if !s.is_zero() => Val::V(scale_lc(&x, &s.recip().unwrap())),
                _ => return Err(bad("not a linear combination of basis labels")),
            }
        }
        _ => Val::S(to_scalar(node, scope)?),
    })
}

/// Evaluates a linear combination of basis labels with parameter coefficients.
pub fn to_lincomb(node: &Node, labels: &[String], scope: &Scope) -> Result<LinComb, DslError> {
    match lin(node, labels, scope)? {
        Val::V(v) => Ok(v),
        Val::S(s) if s.is_zero() => Ok(LinComb::new()),
        Val::S(_) => Err(DslError::Syntax { pos: node.pos, msg: "expected a combination of basis labels".into() }),
    }
}

pub fn add_lc(a: &LinComb, b: &LinComb) -> LinComb {
    let mut out = a.clone();
    for (k, v) in b {
        let s = out.remove(k).unwrap_or_default() + v.clone();
        if !s.is_zero() {
            out.insert(k.clone(), s);
        }
    }
    out
}

pub fn scale_lc(a: &LinComb, s: &ParamScalar) -> LinComb {
    a.iter().map(|(k, v)| (k.clone(), v * s)).filter(|(_, v)| !v.is_zero()).collect()
}

fn contains_d(node: &Node) -> bool {
    match &node.ast {
        Ast::Index(name, _) => name == "D",
        Ast::Ident(name) => name == "D",
        Ast::Neg(a) | Ast::Pow(a, _) => contains_d(a),
        Ast::Bin(_, a, b) => contains_d(a) || contains_d(b),
        Ast::Tuple(v) | Ast::List(v) => v.iter().any(contains_d),
        Ast::Num(_) => false,
    }
}

/// Evaluates an operator entry such as `t*D[t] + 2`; `*` is composition.
pub fn to_scalar_op(node: &Node, scope: &Scope) -> Result<ScalarOp, DslError> {
    if !contains_d(node) {
        return Ok(ScalarOp::mul_by(to_expr(node, scope)?));
    }
    let bad = |msg: &str| DslError::Syntax { pos: node.pos, msg: msg.to_string() };
    Ok(match &node.ast {
        Ast::Index(name, idx) if name == "D" => ScalarOp::derivative(scope.multi_index(idx, node)?),
        Ast::Neg(a) => to_scalar_op(a, scope)?.neg(),
        Ast::Bin(op, a, b) => {
            let (x, y) = (to_scalar_op(a, scope)?, to_scalar_op(b, scope)?);
            match op {
                BinOp::Add => x.add(&y),
                BinOp::Sub => x.sub(&y),
                BinOp::Mul => x.compose(&y),
                BinOp::Div => return Err(bad("an operator cannot be divided")),
            }
        }
        Ast::Pow(a, e) => {
            let base = to_scalar_op(a, scope)?;
            let n = exponent(e, scope)?
                .as_integer()
                .and_then(|n| n.to_u32())
                .ok_or_else(|| bad("operator powers must be nonnegative integers"))?;
            (0..n).fold(ScalarOp::identity(), |acc, _| acc.compose(&base))
        }
        _ => return Err(bad("invalid operator")),
    })
}

/// Evaluates `[[a, b], [c, d]]`. A bare entry is a `1 x 1` operator.
pub fn to_matrix_op(node: &Node, scope: &Scope) -> Result<TotalDiffOp, DslError> {
    let rows = match &node.ast {
        Ast::List(rows) => rows,
        _ => return TotalDiffOp::from_rows(vec![vec![to_scalar_op(node, scope)?]]).map_err(|e| linop_err(node, e)),
    };
    let mut out = Vec::new();
    for r in rows {
        match &r.ast {
            Ast::List(entries) => out.push(entries.iter().map(|e| to_scalar_op(e, scope)).collect::<Result<Vec<_>, _>>()?),
            _ => return Err(DslError::Syntax { pos: r.pos, msg: "expected a bracketed matrix row".into() }),
        }
    }
    TotalDiffOp::from_rows(out).map_err(|e| linop_err(node, e))
}

fn linop_err(node: &Node, e: crate::linop::LinopError) -> DslError {
    DslError::Syntax { pos: node.pos, msg: e.to_string() }
}

/// Evaluates `(e1, ..., en)`, `s * (e1, ..., en)` or, for `n = 1`, a bare expression.
pub fn to_tuple(node: &Node, scope: &Scope, n: usize) -> Result<(ParamScalar, Vec<Expr>), DslError> {
    let (scale, body) = match &node.ast {
        Ast::Bin(BinOp::Mul, s, t) if matches!(t.ast, Ast::Tuple(_)) => (to_scalar(s, scope)?, t.as_ref()),
        _ => (ParamScalar::one(), node),
    };
    let comps = match &body.ast {
        Ast::Tuple(items) => items.iter().map(|i| to_expr(i, scope)).collect::<Result<Vec<_>, _>>()?,
        _ => vec![to_expr(body, scope)?],
    };
    if comps.len() != n {
        return Err(DslError::LengthMismatch { pos: node.pos, expected: n, got: comps.len() });
    }
    Ok((scale, comps))
}

/// Parameter assignments written as `name = value`.
pub fn to_assignment(lhs: &Node, rhs: &Node, scope: &Scope) -> Result<(Symbol, Rat), DslError> {
    let name = match &lhs.ast {
        Ast::Ident(n) if scope.parameters.contains(&Symbol::new(n)) => Symbol::new(n),
        Ast::Ident(n) => return Err(DslError::Undeclared { pos: lhs.pos, name: n.clone() }),
        _ => return Err(DslError::Syntax { pos: lhs.pos, msg: "expected a parameter name".into() }),
    };
    let v = to_scalar(rhs, &Scope::default())?
        .as_rat()
        .ok_or_else(|| DslError::Syntax { pos: rhs.pos, msg: "expected a rational value".into() })?;
    Ok((name, v))
}

pub type Assignments = BTreeMap<Symbol, Rat>;
