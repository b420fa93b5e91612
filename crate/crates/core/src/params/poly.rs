use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::symexpr::{Rat, Symbol};

/// Exponent map of a parameter monomial; absent symbols have exponent zero.
pub type PMono = BTreeMap<Symbol, u32>;

/// A multivariate polynomial in the parameters with rational coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    terms: BTreeMap<PMono, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(PMono::new(), c);
        }
        Poly { terms }
    }

    pub fn var(s: &Symbol) -> Self {
        Poly::monomial(Rat::one(), [(s.clone(), 1)].into_iter().collect())
    }

    pub fn monomial(c: Rat, m: PMono) -> Self {
        let m: PMono = m.into_iter().filter(|(_, e)| *e > 0).collect();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PMono, &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&PMono::new()).cloned(),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        self.terms.keys().flat_map(|m| m.keys().cloned()).collect()
    }

    /// The coefficient of the greatest monomial in the fixed term order.
    pub fn leading_coefficient(&self) -> Rat {
        self.terms.iter().next_back().map(|(_, c)| c.clone()).unwrap_or_else(Rat::zero)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    /// Scales so the leading coefficient is 1.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading_coefficient().recip())
    }

    fn insert(&mut self, m: PMono, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| &acc * self)
    }

    pub fn evaluate(&self, values: &BTreeMap<Symbol, Rat>) -> Option<Rat> {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (s, e) in m {
                let v = values.get(s)?;
                t *= num_traits::pow::Pow::pow(v, *e);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Substitutes some parameters by rational values.
    pub fn partial_eval(&self, values: &BTreeMap<Symbol, Rat>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut k = c.clone();
            let mut rest = PMono::new();
            for (s, e) in m {
                match values.get(s) {
                    Some(v) => k *= num_traits::pow::Pow::pow(v, *e),
                    None => {
                        rest.insert(s.clone(), *e);
                    }
                }
            }
            out.insert(rest, k);
        }
        out
    }

    fn degree_in(&self, x: &Symbol) -> u32 {
        self.terms.keys().map(|m| m.get(x).copied().unwrap_or(0)).max().unwrap_or(0)
    }

    /// Coefficients with respect to `x`, indexed by degree.
    fn coeffs_in(&self, x: &Symbol) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(x) as usize + 1];
        for (m, c) in &self.terms {
            let d = m.get(x).copied().unwrap_or(0);
            let mut rest = m.clone();
            rest.remove(x);
            out[d as usize].insert(rest, c.clone());
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let x = d.vars().into_iter().next()?;
        let m = d.degree_in(&x);
        let lc_d = d.coeffs_in(&x).pop()?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while !rem.is_zero() {
            let n = rem.degree_in(&x);
            if n < m {
                return None;
            }
            let lc_r = rem.coeffs_in(&x).pop()?;
            let q = lc_r.exact_div(&lc_d)?;
            let shift = Poly::monomial(Rat::one(), [(x.clone(), n - m)].into_iter().collect());
            let t = &q * &shift;
            rem = rem - &t * d;
            quot = quot + t;
        }
        Some(quot)
    }

    /// Greatest common divisor, normalized to be monic.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.as_constant().is_some() || other.as_constant().is_some() {
            return Poly::one();
        }
        let vars: BTreeSet<Symbol> = self.vars().union(&other.vars()).cloned().collect();
        let x = vars.into_iter().next().expect("nonconstant");
        let ca = content(&self.coeffs_in(&x));
        let cb = content(&other.coeffs_in(&x));
        let mut a = self.exact_div(&ca).expect("content divides");
        let mut b = other.exact_div(&cb).expect("content divides");
        let g = ca.gcd(&cb);
        if a.degree_in(&x) < b.degree_in(&x) {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() && b.degree_in(&x) > 0 {
            let r = prem(&a, &b, &x);
            a = b;
            b = if r.is_zero() { r } else { primitive_part(&r, &x) };
        }
        let h = if b.is_zero() { primitive_part(&a, &x) } else { Poly::one() };
        (&g * &h).monic()
    }
}

fn content(coeffs: &[Poly]) -> Poly {
    coeffs.iter().fold(Poly::zero(), |acc, c| acc.gcd(c))
}

fn primitive_part(p: &Poly, x: &Symbol) -> Poly {
    let c = content(&p.coeffs_in(x));
    p.exact_div(&c).expect("content divides")
}

fn prem(a: &Poly, b: &Poly, x: &Symbol) -> Poly {
    let m = b.degree_in(x);
    let lc_b = b.coeffs_in(x).pop().unwrap_or_else(Poly::zero);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(x) >= m {
        let n = r.degree_in(x);
        let lc_r = r.coeffs_in(x).pop().unwrap_or_else(Poly::zero);
        let shift = Poly::monomial(Rat::one(), [(x.clone(), n - m)].into_iter().collect());
        r = &(&lc_b * &r) - &(&(&lc_r * &shift) * b);
    }
    r
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rat::one())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let mut m = m1.clone();
                for (s, e) in m2 {
                    *m.entry(s.clone()).or_insert(0) += e;
                }
                out.insert(m, c1 * c2);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

pub(crate) fn fmt_rat(c: &Rat) -> String {
    if c.is_integer() {
        c.to_integer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl Poly {
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut s = String::new();
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let body: Vec<String> = m
                .iter()
                .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
                .collect();
            let body = body.join("*");
            if body.is_empty() {
                s.push_str(&fmt_rat(&a));
            } else if a.is_one() {
                s.push_str(&body);
            } else if a.is_integer() {
                s.push_str(&format!("{}*{}", fmt_rat(&a), body));
            } else {
                s.push_str(&format!("({})*{}", fmt_rat(&a), body));
            }
        }
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::rat;

    fn p() -> Poly {
        Poly::var(&Symbol::new("p"))
    }
    fn q() -> Poly {
        Poly::var(&Symbol::new("q"))
    }

    #[test]
    fn gcd_finds_common_factor() {
        let a = &(&p() - &Poly::one()) * &(&p() + &q());
        let b = &(&p() - &Poly::one()) * &(&q() + &Poly::constant(rat(2)));
        assert_eq!(a.gcd(&b), (&p() - &Poly::one()).monic());
    }

    #[test]
    fn exact_division_detects_nondivisibility() {
        let a = &p() * &p() - Poly::one();
        assert_eq!(a.exact_div(&(&p() + &Poly::one())), Some(&p() - &Poly::one()));
        assert_eq!(a.exact_div(&q()), None);
    }
}
