use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ExprError, Rat, Symbol};

/// An exponent affine in the parameters: `constant + sum_k linear[k] * k`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Exponent {
    constant: Rat,
    linear: BTreeMap<Symbol, Rat>,
}

impl Exponent {
    pub fn zero() -> Self {
        Exponent { constant: Rat::zero(), linear: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Exponent::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Exponent { constant: c, linear: BTreeMap::new() }
    }

    pub fn int(n: i64) -> Self {
        Exponent::constant(Rat::from_integer(BigInt::from(n)))
    }

    pub fn param(p: &Symbol) -> Self {
        let mut linear = BTreeMap::new();
        linear.insert(p.clone(), Rat::one());
        Exponent { constant: Rat::zero(), linear }
    }

    pub fn from_parts(constant: Rat, linear: BTreeMap<Symbol, Rat>) -> Self {
        let linear = linear.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Exponent { constant, linear }
    }

    pub fn constant_part(&self) -> &Rat {
        &self.constant
    }

    pub fn linear_part(&self) -> &BTreeMap<Symbol, Rat> {
        &self.linear
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.linear.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.linear.is_empty()
    }

    /// The exponent as an integer, when it is a constant integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.is_constant() && self.constant.is_integer() {
            Some(self.constant.to_integer())
        } else {
            None
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_integer().and_then(|n| n.to_i64())
    }

    pub fn is_nonneg_integer(&self) -> bool {
        self.as_integer().map_or(false, |n| !n.is_negative())
    }

    pub fn scale(&self, c: &Rat) -> Exponent {
        Exponent::from_parts(
            &self.constant * c,
            self.linear.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        )
    }

    /// Product of two exponents; stays affine only if one side is constant.
    pub fn mul(&self, other: &Exponent) -> Result<Exponent, ExprError> {
        if other.is_constant() {
            Ok(self.scale(&other.constant))
        } else if self.is_constant() {
            Ok(other.scale(&self.constant))
        } else {
            Err(ExprError::NonAffineExponent(format!("({self:?})*({other:?})")))
        }
    }

    /// Evaluates the exponent given parameter values.
    pub fn evaluate(&self, value: impl Fn(&Symbol) -> Option<Rat>) -> Result<Rat, ExprError> {
        let mut acc = self.constant.clone();
        for (p, c) in &self.linear {
            let v = value(p).ok_or_else(|| ExprError::MissingAssignment(p.to_string()))?;
            acc += c * v;
        }
        Ok(acc)
    }

    pub fn evaluate_f64(&self, value: impl Fn(&Symbol) -> Option<f64>) -> Result<f64, ExprError> {
        let mut acc = self.constant.to_f64().unwrap_or(f64::NAN);
        for (p, c) in &self.linear {
            let v = value(p).ok_or_else(|| ExprError::MissingAssignment(p.to_string()))?;
            acc += c.to_f64().unwrap_or(f64::NAN) * v;
        }
        Ok(acc)
    }
}

impl Add for &Exponent {
    type Output = Exponent;
    fn add(self, rhs: &Exponent) -> Exponent {
        let mut linear = self.linear.clone();
        for (k, v) in &rhs.linear {
            let e = linear.entry(k.clone()).or_insert_with(Rat::zero);
            *e += v;
        }
        Exponent::from_parts(&self.constant + &rhs.constant, linear)
    }
}

impl Neg for &Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        self.scale(&-Rat::one())
    }
}

impl Sub for &Exponent {
    type Output = Exponent;
    fn sub(self, rhs: &Exponent) -> Exponent {
        self + &(-rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::rat;
    use proptest::prelude::*;

    fn arb_exponent() -> impl Strategy<Value = Exponent> {
        (-5i64..5, -3i64..3, -3i64..3).prop_map(|(c, a, b)| {
            let mut lin = BTreeMap::new();
            lin.insert(Symbol::new("p"), rat(a));
            lin.insert(Symbol::new("q"), rat(b));
            Exponent::from_parts(rat(c), lin)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig { rng_seed: prop::test_runner::RngSeed::Fixed(0x6a62), ..ProptestConfig::default() })]
        #[test]
        fn exponent_group_laws(a in arb_exponent(), b in arb_exponent()) {
            prop_assert!((&a + &(-&a)).is_zero());
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a + &b) - &b, a);
        }
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let p = Exponent::param(&Symbol::new("p"));
        let e = &p - &p;
        assert!(e.is_zero());
        assert_eq!(e, Exponent::zero());
    }
}
