use super::{Exponent, Expr, ExprError, NumericPoint, Number, Rat, Var};

/// An unnormalized expression tree, as produced by a parser or a generator.
#[derive(Clone, Debug, PartialEq)]
pub enum RawExpr {
    Num(Rat),
    Var(Var),
    Neg(Box<RawExpr>),
    Add(Box<RawExpr>, Box<RawExpr>),
    Sub(Box<RawExpr>, Box<RawExpr>),
    Mul(Box<RawExpr>, Box<RawExpr>),
    Div(Box<RawExpr>, Box<RawExpr>),
    Pow(Box<RawExpr>, Exponent),
}

impl RawExpr {
    pub fn add(a: RawExpr, b: RawExpr) -> RawExpr {
        RawExpr::Add(Box::new(a), Box::new(b))
    }
    pub fn sub(a: RawExpr, b: RawExpr) -> RawExpr {
        RawExpr::Sub(Box::new(a), Box::new(b))
    }
    pub fn mul(a: RawExpr, b: RawExpr) -> RawExpr {
        RawExpr::Mul(Box::new(a), Box::new(b))
    }
    pub fn div(a: RawExpr, b: RawExpr) -> RawExpr {
        RawExpr::Div(Box::new(a), Box::new(b))
    }
    pub fn pow(a: RawExpr, e: Exponent) -> RawExpr {
        RawExpr::Pow(Box::new(a), e)
    }

    /// Direct numeric evaluation of the tree, without normalizing first.
    pub fn eval(&self, pt: &NumericPoint) -> Result<f64, ExprError> {
        Ok(match self {
            RawExpr::Num(r) => Number::Exact(r.clone()).to_f64(),
            RawExpr::Var(v) => pt.evaluate(&Expr::var(v.clone()))?.to_f64(),
            RawExpr::Neg(a) => -a.eval(pt)?,
            RawExpr::Add(a, b) => a.eval(pt)? + b.eval(pt)?,
            RawExpr::Sub(a, b) => a.eval(pt)? - b.eval(pt)?,
            RawExpr::Mul(a, b) => a.eval(pt)? * b.eval(pt)?,
            RawExpr::Div(a, b) => {
                let d = b.eval(pt)?;
                if d == 0.0 {
                    return Err(ExprError::DivisionByZero);
                }
                a.eval(pt)? / d
            }
            RawExpr::Pow(a, e) => {
                let base = a.eval(pt)?;
                let ev = e.evaluate_f64(|p| {
                    pt.get(&Var::Param(p.clone())).map(|r| Number::Exact(r.clone()).to_f64())
                })?;
                if ev.fract() == 0.0 {
                    if base == 0.0 && ev < 0.0 {
                        return Err(ExprError::ZeroToNegativePower);
                    }
                    base.powi(ev as i32)
                } else {
                    if base <= 0.0 {
                        return Err(ExprError::NonIntegerExponentNeedsPositiveBase);
                    }
                    base.powf(ev)
                }
            }
        })
    }
}

/// Brings a raw tree into canonical normal form.
pub fn normalize(raw: &RawExpr) -> Result<Expr, ExprError> {
    Ok(match raw {
        RawExpr::Num(r) => Expr::constant(r.clone()),
        RawExpr::Var(v) => Expr::var(v.clone()),
        RawExpr::Neg(a) => -normalize(a)?,
        RawExpr::Add(a, b) => normalize(a)? + normalize(b)?,
        RawExpr::Sub(a, b) => normalize(a)? - normalize(b)?,
        RawExpr::Mul(a, b) => normalize(a)? * normalize(b)?,
        RawExpr::Div(a, b) => normalize(a)?.div(&normalize(b)?)?,
        RawExpr::Pow(a, e) => normalize(a)?.pow(e)?,
    })
}

/// The tree form of a normalized expression, used to test idempotence.
pub fn to_raw(e: &Expr) -> RawExpr {
    let mut acc: Option<RawExpr> = None;
    for (m, c) in e.terms() {
        let mut t = RawExpr::Num(c.clone());
        for (v, x) in m.factors() {
            t = RawExpr::mul(t, RawExpr::pow(RawExpr::Var(v.clone()), x.clone()));
        }
        acc = Some(match acc {
            None => t,
            Some(a) => RawExpr::add(a, t),
        });
    }
    acc.unwrap_or(RawExpr::Num(Rat::from_integer(0.into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{rat, Jet, Symbol};
    use proptest::prelude::*;

    fn vars() -> Vec<Var> {
        vec![
            Var::Jet(Jet::base(&Symbol::new("u"))),
            Var::Jet(Jet::base(&Symbol::new("v")).differentiate(&Symbol::new("x"))),
            Var::Indep(Symbol::new("x")),
            Var::Param(Symbol::new("p")),
        ]
    }

    fn arb_raw() -> impl Strategy<Value = RawExpr> {
        let leaf = prop_oneof![
            (-4i64..5).prop_map(|n| RawExpr::Num(rat(n))),
            (0usize..4).prop_map(|i| RawExpr::Var(vars()[i].clone())),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| RawExpr::add(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| RawExpr::sub(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| RawExpr::mul(a, b)),
                inner.clone().prop_map(|a| RawExpr::Neg(Box::new(a))),
                (inner.clone(), 0i64..3).prop_map(|(a, n)| RawExpr::pow(a, Exponent::int(n))),
                (inner, 0usize..3).prop_map(|(a, i)| RawExpr::div(a, RawExpr::Var(vars()[i].clone()))),
            ]
        })
    }

    fn arb_point() -> impl Strategy<Value = NumericPoint> {
        proptest::collection::vec(1i64..7, 4).prop_map(|vals| {
            let mut pt = NumericPoint::new();
            for (v, n) in vars().into_iter().zip(vals) {
                pt.set(v, crate::symexpr::ratio(n, 3));
            }
            pt
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 1000, rng_seed: prop::test_runner::RngSeed::Fixed(0x6a62), ..ProptestConfig::default() })]
        #[test]
        fn normalize_is_idempotent_and_consistent(raw in arb_raw(), pt in arb_point()) {
            let e = normalize(&raw).unwrap();
            prop_assert_eq!(normalize(&to_raw(&e)).unwrap(), e.clone());
            let direct = raw.eval(&pt).unwrap();
            let via = pt.evaluate(&e).unwrap().to_f64();
            prop_assert!((direct - via).abs() <= 1e-9 * (1.0 + direct.abs()));
        }

        #[test]
        fn distributivity(a in arb_raw(), b in arb_raw(), c in arb_raw()) {
            let lhs = normalize(&RawExpr::mul(a.clone(), RawExpr::add(b.clone(), c.clone()))).unwrap();
            let rhs = normalize(&RawExpr::add(RawExpr::mul(a.clone(), b), RawExpr::mul(a, c))).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
