use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};

use super::expr::rational_pow;
use super::{Exponent, Expr, ExprError, Rat, Var};

/// A value produced by numeric evaluation. Stays exact while every exponent
/// evaluates to an integer.
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(Rat),
    Float(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Number::Float(f) => *f,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Number::Exact(_))
    }

    fn mul(self, other: Number) -> Number {
        match (self, other) {
            (Number::Exact(a), Number::Exact(b)) => Number::Exact(a * b),
            (a, b) => Number::Float(a.to_f64() * b.to_f64()),
        }
    }

    fn add(self, other: Number) -> Number {
        match (self, other) {
            (Number::Exact(a), Number::Exact(b)) => Number::Exact(a + b),
            (a, b) => Number::Float(a.to_f64() + b.to_f64()),
        }
    }
}

/// Rational values for jet coordinates, independents and parameters.
#[derive(Clone, Debug, Default)]
pub struct NumericPoint {
    values: BTreeMap<Var, Rat>,
}

impl NumericPoint {
    pub fn new() -> Self {
        NumericPoint::default()
    }

    pub fn set(&mut self, var: Var, value: Rat) -> &mut Self {
        self.values.insert(var, value);
        self
    }

    pub fn get(&self, var: &Var) -> Option<&Rat> {
        self.values.get(var)
    }

    fn exponent_value(&self, e: &Exponent) -> Result<Rat, ExprError> {
        e.evaluate(|p| self.values.get(&Var::Param(p.clone())).cloned())
    }

    pub fn evaluate(&self, expr: &Expr) -> Result<Number, ExprError> {
        let mut total = Number::Exact(Rat::zero());
        for (m, c) in expr.terms() {
            let mut acc = Number::Exact(c.clone());
            for (v, e) in m.factors() {
                let base = self.values.get(v).ok_or_else(|| ExprError::MissingAssignment(v.name()))?;
                let ev = self.exponent_value(e)?;
                let f = if ev.is_integer() {
                    Number::Exact(rational_pow(base, &Exponent::constant(ev))?)
                } else {
                    if !base.is_positive() {
                        return Err(ExprError::NonIntegerExponentNeedsPositiveBase);
                    }
                    let b = base.to_f64().unwrap_or(f64::NAN);
                    Number::Float(b.powf(ev.to_f64().unwrap_or(f64::NAN)))
                };
                acc = acc.mul(f);
            }
            total = total.add(acc);
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{rat, ratio, Jet, Symbol};

    #[test]
    fn integer_exponents_stay_exact() {
        let u = Var::Jet(Jet::base(&Symbol::new("u")));
        let p = Var::Param(Symbol::new("p"));
        let e = Expr::var(u.clone()).pow(&Exponent::param(&Symbol::new("p"))).unwrap();
        let mut pt = NumericPoint::new();
        pt.set(u, ratio(1, 2)).set(p, rat(3));
        assert_eq!(pt.evaluate(&e).unwrap(), Number::Exact(ratio(1, 8)));
    }

    #[test]
    fn fractional_exponent_of_negative_base_fails() {
        let u = Var::Jet(Jet::base(&Symbol::new("u")));
        let e = Expr::var(u.clone()).pow(&Exponent::constant(ratio(1, 2))).unwrap();
        let mut pt = NumericPoint::new();
        pt.set(u, rat(-4));
        assert_eq!(pt.evaluate(&e), Err(ExprError::NonIntegerExponentNeedsPositiveBase));
    }
}
