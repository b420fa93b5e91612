use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Exponent, ExprError, Jet, MultiIndex, Rat, Symbol, Var};

/// A product of powers of distinct bases. The coefficient lives in [`Expr`].
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial {
    factors: BTreeMap<Var, Exponent>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn power(var: Var, exp: Exponent) -> Self {
        let mut factors = BTreeMap::new();
        if !exp.is_zero() {
            factors.insert(var, exp);
        }
        Monomial { factors }
    }

    pub fn factors(&self) -> &BTreeMap<Var, Exponent> {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent_of(&self, var: &Var) -> Option<&Exponent> {
        self.factors.get(var)
    }

    pub fn without(&self, var: &Var) -> Monomial {
        let mut factors = self.factors.clone();
        factors.remove(var);
        Monomial { factors }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut factors = self.factors.clone();
        for (v, e) in &other.factors {
            match factors.get_mut(v) {
                Some(cur) => {
                    let sum = &*cur + e;
                    if sum.is_zero() {
                        factors.remove(v);
                    } else {
                        *cur = sum;
                    }
                }
                None => {
                    factors.insert(v.clone(), e.clone());
                }
            }
        }
        Monomial { factors }
    }

    pub fn pow(&self, exp: &Exponent) -> Result<Monomial, ExprError> {
        let mut factors = BTreeMap::new();
        for (v, e) in &self.factors {
            let ne = e.mul(exp)?;
            if !ne.is_zero() {
                factors.insert(v.clone(), ne);
            }
        }
        Ok(Monomial { factors })
    }

    pub fn inverse(&self) -> Monomial {
        Monomial { factors: self.factors.iter().map(|(v, e)| (v.clone(), -e)).collect() }
    }

    /// Splits into (parameter factors with integer exponents, everything else).
    pub fn split_params(&self) -> (Monomial, Monomial) {
        let mut params = BTreeMap::new();
        let mut rest = BTreeMap::new();
        for (v, e) in &self.factors {
            match v {
                Var::Param(_) if e.as_integer().is_some() => {
                    params.insert(v.clone(), e.clone());
                }
                _ => {
                    rest.insert(v.clone(), e.clone());
                }
            }
        }
        (Monomial { factors: params }, Monomial { factors: rest })
    }
}

/// A differential polynomial in canonical normal form.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Expr {
    terms: BTreeMap<Monomial, Rat>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Expr::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(Rat::from_integer(BigInt::from(n)))
    }

    pub fn term(c: Rat, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Expr { terms }
    }

    pub fn var(v: Var) -> Self {
        Expr::term(Rat::one(), Monomial::power(v, Exponent::one()))
    }

    pub fn indep(name: &str) -> Self {
        Expr::var(Var::Indep(Symbol::new(name)))
    }

    pub fn param(name: &str) -> Self {
        Expr::var(Var::Param(Symbol::new(name)))
    }

    pub fn jet(dep: &str, derivs: &[&str]) -> Self {
        let idx = MultiIndex::new(derivs.iter().map(|s| Symbol::new(s)).collect());
        Expr::var(Var::Jet(Jet::new(&Symbol::new(dep), idx)))
    }

    /// The exponent, read as an expression in the parameters.
    pub fn from_exponent(e: &Exponent) -> Self {
        let mut out = Expr::constant(e.constant_part().clone());
        for (p, c) in e.linear_part() {
            out = out + Expr::param(p.as_str()).scale(c);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_monomial(&self) -> Option<(Rat, Monomial)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, c)| (c.clone(), m.clone()))
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        match self.as_monomial() {
            Some((c, m)) if m.is_one() => Some(c),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for v in m.factors.keys() {
                out.insert(v.clone());
            }
        }
        out
    }

    pub fn jets(&self) -> BTreeSet<Jet> {
        self.vars().into_iter().filter_map(|v| v.as_jet().cloned()).collect()
    }

    pub fn dependents(&self) -> BTreeSet<Symbol> {
        self.jets().into_iter().map(|j| j.dep).collect()
    }

    pub fn contains_var(&self, var: &Var) -> bool {
        self.terms.keys().any(|m| m.factors.contains_key(var))
    }

    fn insert(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(cur) => {
                *cur += c;
                if cur.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul_monomial(&self, c: &Rat, m: &Monomial) -> Expr {
        let mut out = Expr::zero();
        for (tm, tc) in &self.terms {
            out.insert(tm.mul(m), tc * c);
        }
        out
    }

    /// Raises to an exponent. Sums only admit nonnegative integer powers.
    pub fn pow(&self, exp: &Exponent) -> Result<Expr, ExprError> {
        if exp.is_zero() {
            return Ok(Expr::one());
        }
        if let Some((c, m)) = self.as_monomial() {
            let coeff = rational_pow(&c, exp)?;
            return Ok(Expr::term(coeff, m.pow(exp)?));
        }
        if self.is_zero() {
            return match exp.as_integer() {
                Some(n) if n.is_positive() => Ok(Expr::zero()),
                Some(_) => Err(ExprError::ZeroToNegativePower),
                None => Err(ExprError::NonIntegerPowerOfSum),
            };
        }
        let n = exp
            .as_integer()
            .filter(|n| !n.is_negative())
            .and_then(|n| n.to_u32())
            .ok_or(ExprError::NonIntegerPowerOfSum)?;
        Ok(self.pow_u32(n))
    }

    pub fn pow_u32(&self, mut n: u32) -> Expr {
        let mut base = self.clone();
        let mut acc = Expr::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Division by a single nonzero monomial.
    pub fn div(&self, divisor: &Expr) -> Result<Expr, ExprError> {
        if divisor.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        let (c, m) = divisor.as_monomial().ok_or(ExprError::NonMonomialDivisor)?;
        Ok(self.mul_monomial(&c.recip(), &m.inverse()))
    }

    /// Applies a derivation given by its action on every base.
    pub fn derive_with(&self, d: &dyn Fn(&Var) -> Expr) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            for (v, e) in &m.factors {
                let dv = d(v);
                if dv.is_zero() {
                    continue;
                }
                let lowered = m.mul(&Monomial::power(v.clone(), Exponent::int(-1)));
                let factor = Expr::from_exponent(e).mul_monomial(c, &lowered);
                out = out + &factor * &dv;
            }
        }
        out
    }

    /// Partial derivative with respect to one base.
    pub fn partial(&self, var: &Var) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            if let Some(e) = m.factors.get(var) {
                let lowered = m.mul(&Monomial::power(var.clone(), Exponent::int(-1)));
                out = out + Expr::from_exponent(e).mul_monomial(c, &lowered);
            }
        }
        out
    }

    pub fn substitute(&self, target: &Var, replacement: &Expr) -> Result<Expr, ExprError> {
        let mut map = BTreeMap::new();
        map.insert(target.clone(), replacement.clone());
        self.substitute_many(&map)
    }

    /// Simultaneous substitution of several bases.
    pub fn substitute_many(&self, map: &BTreeMap<Var, Expr>) -> Result<Expr, ExprError> {
        let mut out = Expr::zero();
        let mut cache: BTreeMap<(Var, Exponent), Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut acc = Expr::constant(c.clone());
            for (v, e) in &m.factors {
                match map.get(v) {
                    None => kept = kept.mul(&Monomial::power(v.clone(), e.clone())),
                    Some(rep) => {
                        let key = (v.clone(), e.clone());
                        let powered = match cache.get(&key) {
                            Some(p) => p.clone(),
                            None => {
                                let p = rep.pow(e)?;
                                cache.insert(key, p.clone());
                                p
                            }
                        };
                        acc = &acc * &powered;
                    }
                }
            }
            out = out + acc.mul_monomial(&Rat::one(), &kept);
        }
        Ok(out)
    }

    /// Evaluates parameters at the given rational values, leaving the rest.
    pub fn instantiate_params(&self, values: &BTreeMap<Symbol, Rat>) -> Result<Expr, ExprError> {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut coeff = c.clone();
            for (v, e) in &m.factors {
                let e = substitute_exponent(e, values);
                if let Var::Param(p) = v {
                    if let Some(val) = values.get(p) {
                        coeff *= rational_pow(val, &e)?;
                        continue;
                    }
                }
                kept = kept.mul(&Monomial::power(v.clone(), e));
            }
            out.insert(kept, coeff);
        }
        Ok(out)
    }
}

fn substitute_exponent(e: &Exponent, values: &BTreeMap<Symbol, Rat>) -> Exponent {
    let mut constant = e.constant_part().clone();
    let mut linear = BTreeMap::new();
    for (p, c) in e.linear_part() {
        match values.get(p) {
            Some(v) => constant += c * v,
            None => {
                linear.insert(p.clone(), c.clone());
            }
        }
    }
    Exponent::from_parts(constant, linear)
}

/// `c^exp` for a rational `c`; exact only for integer exponents or `c = 1`.
pub(crate) fn rational_pow(c: &Rat, exp: &Exponent) -> Result<Rat, ExprError> {
    if c.is_one() || exp.is_zero() {
        return Ok(Rat::one());
    }
    let n = exp
        .as_integer()
        .and_then(|n| n.to_i32())
        .ok_or_else(|| ExprError::NonAffineExponent(format!("{c}^{exp:?}")))?;
    if c.is_zero() {
        return if n > 0 { Ok(Rat::zero()) } else { Err(ExprError::ZeroToNegativePower) };
    }
    Ok(num_traits::pow::Pow::pow(c, n))
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(mut self, rhs: Expr) -> Expr {
        if self.len() < rhs.len() {
            return rhs + self;
        }
        for (m, c) in rhs.terms {
            self.insert(m, c);
        }
        self
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.insert(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        &self * &rhs
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a + b)
    }
}

fn fmt_rat(c: &Rat) -> String {
    if c.is_integer() {
        c.to_integer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub(crate) fn fmt_exponent(e: &Exponent) -> String {
    if let Some(n) = e.as_integer() {
        if n.is_negative() {
            return format!("({n})");
        }
        return n.to_string();
    }
    if e.constant_part().is_zero() && e.linear_part().len() == 1 {
        let (p, c) = e.linear_part().iter().next().unwrap();
        if c.is_one() {
            return p.to_string();
        }
    }
    let mut s = String::new();
    for (p, c) in e.linear_part() {
        push_term(&mut s, c, p.as_str());
    }
    let k = e.constant_part();
    if !k.is_zero() {
        push_term(&mut s, k, "");
    }
    format!("({s})")
}

fn push_term(s: &mut String, c: &Rat, body: &str) {
    let neg = c.is_negative();
    let a = c.abs();
    if s.is_empty() {
        if neg {
            s.push('-');
        }
    } else {
        s.push_str(if neg { " - " } else { " + " });
    }
    if body.is_empty() {
        s.push_str(&fmt_rat(&a));
    } else if a.is_one() {
        s.push_str(body);
    } else if a.is_integer() {
        s.push_str(&format!("{}*{}", fmt_rat(&a), body));
    } else {
        s.push_str(&format!("({})*{}", fmt_rat(&a), body));
    }
}

fn fmt_var(v: &Var) -> String {
    match v {
        Var::Indep(s) | Var::Param(s) => s.to_string(),
        Var::Jet(j) => {
            if j.derivs.is_empty() {
                j.dep.to_string()
            } else {
                let idx: Vec<&str> = j.derivs.vars().iter().map(|s| s.as_str()).collect();
                format!("{}[{}]", j.dep, idx.join(","))
            }
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(v, e)| {
                if *e == Exponent::one() {
                    fmt_var(v)
                } else {
                    format!("{}^{}", fmt_var(v), fmt_exponent(e))
                }
            })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut s = String::new();
        for (m, c) in &self.terms {
            let body = if m.is_one() { String::new() } else { m.to_string() };
            push_term(&mut s, c, &body);
        }
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{rat, ratio};

    fn u() -> Expr {
        Expr::jet("u", &[])
    }

    #[test]
    fn like_terms_merge() {
        assert_eq!(u() + u(), u().scale(&rat(2)));
    }

    #[test]
    fn symbolic_exponents_add() {
        let p = Exponent::param(&Symbol::new("p"));
        let up = u().pow(&p).unwrap();
        let inv = u().pow(&Exponent::int(-1)).unwrap();
        let expected = u().pow(&(&p - &Exponent::one())).unwrap();
        assert_eq!(&up * &inv, expected);
    }

    #[test]
    fn cancellation_gives_zero() {
        let a = Expr::param("alpha") * u().pow(&Exponent::param(&Symbol::new("p"))).unwrap() * Expr::jet("v", &[]);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn division_requires_monomial() {
        let s = u() + Expr::jet("v", &[]);
        assert_eq!(u().div(&s), Err(ExprError::NonMonomialDivisor));
        let half = u().div(&Expr::int(2)).unwrap();
        assert_eq!(half, u().scale(&ratio(1, 2)));
    }

    #[test]
    fn sum_to_symbolic_power_is_rejected() {
        let s = u() + Expr::jet("v", &[]);
        assert_eq!(s.pow(&Exponent::param(&Symbol::new("p"))), Err(ExprError::NonIntegerPowerOfSum));
        assert_eq!(s.pow(&Exponent::int(-1)), Err(ExprError::NonIntegerPowerOfSum));
    }

    #[test]
    fn partial_of_symbolic_power() {
        let p = Symbol::new("p");
        let up = u().pow(&Exponent::param(&p)).unwrap();
        let d = up.partial(&Var::Jet(Jet::base(&Symbol::new("u"))));
        let expected = Expr::param("p") * u().pow(&(&Exponent::param(&p) - &Exponent::one())).unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(u().scale(&rat(2)).to_string(), "2*u");
        assert_eq!(Expr::zero().to_string(), "0");
        let e = u().pow(&Exponent::int(-2)).unwrap().scale(&ratio(-1, 2));
        assert_eq!(e.to_string(), "-(1/2)*u^(-2)");
    }
}
