use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// An interned identifier. Cheap to clone and totally ordered by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// A multiset of independent variables, stored sorted so that mixed
/// partials in any order compare equal.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<Symbol>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn new(mut vars: Vec<Symbol>) -> Self {
        vars.sort();
        MultiIndex(vars)
    }

    pub fn single(var: &Symbol) -> Self {
        MultiIndex(vec![var.clone()])
    }

    pub fn vars(&self) -> &[Symbol] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn with(&self, var: &Symbol) -> Self {
        let mut v = self.0.clone();
        let pos = v.binary_search(var).unwrap_or_else(|p| p);
        v.insert(pos, var.clone());
        MultiIndex(v)
    }

    pub fn join(&self, other: &MultiIndex) -> Self {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        MultiIndex::new(v)
    }

    pub fn count(&self, var: &Symbol) -> usize {
        self.0.iter().filter(|v| *v == var).count()
    }

    pub fn counts(&self) -> BTreeMap<Symbol, usize> {
        let mut m = BTreeMap::new();
        for v in &self.0 {
            *m.entry(v.clone()).or_insert(0) += 1;
        }
        m
    }

    /// `self - other` as multisets, or `None` when `other` is not contained.
    pub fn minus(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut rest = self.0.clone();
        for v in &other.0 {
            let pos = rest.iter().position(|r| r == v)?;
            rest.remove(pos);
        }
        Some(MultiIndex(rest))
    }

    /// All sub-multisets `J` of `self` together with the multinomial weight
    /// `prod_k C(i_k, j_k)` used by the Leibniz rule.
    pub fn sub_indices(&self) -> Vec<(MultiIndex, u64)> {
        let counts: Vec<(Symbol, usize)> = self.counts().into_iter().collect();
        let mut out = vec![(Vec::new(), 1u64)];
        for (var, n) in counts {
            let mut next = Vec::new();
            for (prefix, w) in &out {
                for j in 0..=n {
                    let mut p = prefix.clone();
                    p.extend(std::iter::repeat(var.clone()).take(j));
                    next.push((p, w * binomial(n as u64, j as u64)));
                }
            }
            out = next;
        }
        out.into_iter().map(|(v, w)| (MultiIndex::new(v), w)).collect()
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// A jet coordinate `u^alpha_I`; the empty multi-index is `u^alpha` itself.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Jet {
    pub dep: Symbol,
    pub derivs: MultiIndex,
}

impl Jet {
    pub fn new(dep: &Symbol, derivs: MultiIndex) -> Self {
        Jet { dep: dep.clone(), derivs }
    }

    pub fn base(dep: &Symbol) -> Self {
        Jet { dep: dep.clone(), derivs: MultiIndex::empty() }
    }

    pub fn differentiate(&self, var: &Symbol) -> Jet {
        Jet { dep: self.dep.clone(), derivs: self.derivs.with(var) }
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.derivs.is_empty() {
            write!(f, "{}", self.dep)
        } else {
            write!(f, "{}{:?}", self.dep, self.derivs)
        }
    }
}

/// A base of a monomial factor.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    Indep(Symbol),
    Param(Symbol),
    Jet(Jet),
}

impl Var {
    pub fn as_jet(&self) -> Option<&Jet> {
        match self {
            Var::Jet(j) => Some(j),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Var::Indep(s) | Var::Param(s) => s.to_string(),
            Var::Jet(j) => j.to_string(),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiindex_is_order_insensitive() {
        let x = Symbol::new("x");
        let t = Symbol::new("t");
        let a = MultiIndex::new(vec![x.clone(), t.clone()]);
        let b = MultiIndex::single(&t).with(&x);
        assert_eq!(a, b);
    }

    #[test]
    fn sub_indices_carry_multinomial_weights() {
        let x = Symbol::new("x");
        let idx = MultiIndex::new(vec![x.clone(), x.clone()]);
        let subs = idx.sub_indices();
        let weights: Vec<u64> = subs.iter().map(|(_, w)| *w).collect();
        assert_eq!(weights, vec![1, 2, 1]);
    }

    #[test]
    fn minus_requires_containment() {
        let x = Symbol::new("x");
        let t = Symbol::new("t");
        let a = MultiIndex::new(vec![x.clone(), t.clone(), t.clone()]);
        assert_eq!(a.minus(&MultiIndex::single(&t)), Some(MultiIndex::new(vec![x.clone(), t])));
        assert_eq!(MultiIndex::single(&x).minus(&a), None);
    }
}
