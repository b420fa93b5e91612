use std::collections::{BTreeMap, BTreeSet};

use super::eval::{self, Scope};
use super::lexer::{tokenize, Tok, Token};
use super::parser::{parse_node, Ast, Node};
use super::{DslError, LinComb, Pos};
use crate::linop::TotalDiffOp;
use crate::params::ParamScalar;
use crate::symexpr::{Expr, Jet, Rat, Symbol, Var};

const KEYWORDS: [&str; 24] = [
    "system",
    "independents",
    "dependents",
    "parameters",
    "constraints",
    "equations",
    "evolution",
    "symmetries",
    "adjoint_symmetries",
    "r_ops",
    "tables",
    "table",
    "commutators",
    "multipliers",
    "nonmultipliers",
    "noether",
    "lagrangian",
    "hamiltonian",
    "integrand",
    "isomorphism",
    "relation",
    "lift",
    "variants",
    "notes",
];

/// A symmetry or adjoint-symmetry: `scale * (components)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Object {
    pub label: String,
    pub tags: Vec<String>,
    pub scale: ParamScalar,
    pub components: Vec<Expr>,
    pub line: usize,
}

/// A parameter constraint `lhs != rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub text: String,
    pub lhs: ParamScalar,
    pub rhs: ParamScalar,
}

impl Constraint {
    /// The quantity that must not vanish.
    pub fn difference(&self) -> ParamScalar {
        &self.lhs - &self.rhs
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableType {
    Action,
    Bracket,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionEntry {
    pub p: String,
    pub q: String,
    pub value: LinComb,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BracketEntry {
    pub left: LinComb,
    pub right: LinComb,
    pub value: LinComb,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InverseEntry {
    pub q: LinComb,
    pub p: LinComb,
    pub line: usize,
}

/// Golden data for one action or bracket table.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub tags: Vec<String>,
    pub ty: TableType,
    pub kind: u8,
    pub q: Option<LinComb>,
    pub policy: Option<String>,
    pub scaling: Option<String>,
    pub sets: BTreeMap<Symbol, Rat>,
    pub rows: Option<Vec<String>>,
    pub actions: Vec<ActionEntry>,
    pub brackets: Vec<BracketEntry>,
    pub kernel: Option<Vec<LinComb>>,
    pub ideal: Option<bool>,
    pub inverses: Vec<InverseEntry>,
    /// Named combinations (`let A' = ...`) usable in bracket entries.
    pub basis: Vec<(String, LinComb)>,
    /// Explicit bracket domain over table-local names and labels.
    pub domain: Option<Vec<String>>,
    pub line: usize,
}

impl Table {
    /// Rewrites a combination over table-local names into adjoint-symmetry labels.
    pub fn expand(&self, lc: &LinComb) -> LinComb {
        lc.iter().fold(LinComb::new(), |acc, (k, c)| {
            let term = match self.basis.iter().find(|(n, _)| n == k) {
                Some((_, def)) => eval::scale_lc(def, c),
                None => LinComb::from([(k.clone(), c.clone())]),
            };
            eval::add_lc(&acc, &term)
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorEntry {
    pub left: String,
    pub right: String,
    pub value: LinComb,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoetherSpec {
    pub name: String,
    pub tags: Vec<String>,
    pub q: LinComb,
    pub op: TotalDiffOp,
    pub line: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariationalKind {
    Lagrangian,
    Hamiltonian,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariationalSpec {
    pub name: String,
    pub tags: Vec<String>,
    pub kind: VariationalKind,
    pub op: TotalDiffOp,
    pub density: Expr,
    pub lhs: Option<Vec<Expr>>,
    pub line: usize,
}

/// Expected value, modulo total divergences, of the symplectic integrand
/// evaluated on placeholder characteristics.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrandSpec {
    pub name: String,
    pub tags: Vec<String>,
    pub q: LinComb,
    pub first: Vec<Symbol>,
    pub second: Vec<Symbol>,
    pub expect: Expr,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum IsoMap {
    Explicit(Vec<(String, LinComb)>),
    /// The map induced by the inverse dual action.
    Inverse,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsomorphismSpec {
    pub name: String,
    pub tags: Vec<String>,
    pub bracket: String,
    pub target: Vec<String>,
    pub map: IsoMap,
    pub scale: ParamScalar,
    pub line: usize,
}

/// `combine(G) = parent_op(G_parent)` with the parent loaded by name.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationSpec {
    pub name: String,
    pub parent: String,
    pub combine: TotalDiffOp,
    pub parent_op: TotalDiffOp,
    pub line: usize,
}

/// Potential-variable correspondence with a parent system.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftSpec {
    pub parent: String,
    pub rules: Vec<(Symbol, Expr)>,
    pub symmetry_map: TotalDiffOp,
    pub adjoint_map: TotalDiffOp,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variant {
    pub name: String,
    pub sets: BTreeMap<Symbol, Rat>,
}

/// A parsed and validated `.sys` file.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SystemFile {
    pub name: String,
    pub independents: Vec<Symbol>,
    pub dependents: Vec<Symbol>,
    pub parameters: Vec<Symbol>,
    pub constraints: Vec<Constraint>,
    pub equations: Vec<(String, Expr)>,
    pub evolution: Vec<(Jet, Expr)>,
    pub symmetries: Vec<Object>,
    pub adjoint_symmetries: Vec<Object>,
    pub r_ops: Vec<(String, TotalDiffOp)>,
    pub tables: Vec<Table>,
    pub commutators: Vec<CommutatorEntry>,
    pub has_commutators: bool,
    pub multipliers: Vec<String>,
    pub nonmultipliers: Vec<String>,
    pub noether: Vec<NoetherSpec>,
    pub variational: Vec<VariationalSpec>,
    pub integrands: Vec<IntegrandSpec>,
    pub isomorphisms: Vec<IsomorphismSpec>,
    pub relations: Vec<RelationSpec>,
    pub lift: Option<LiftSpec>,
    pub variants: Vec<Variant>,
    pub notes: Vec<String>,
}

impl SystemFile {
    pub fn scope(&self) -> Scope {
        Scope {
            independents: self.independents.clone(),
            dependents: self.dependents.clone(),
            parameters: self.parameters.clone(),
        }
    }

    pub fn symmetry(&self, label: &str) -> Option<&Object> {
        self.symmetries.iter().find(|o| o.label == label)
    }

    pub fn adjoint_symmetry(&self, label: &str) -> Option<&Object> {
        self.adjoint_symmetries.iter().find(|o| o.label == label)
    }

    pub fn r_op(&self, label: &str) -> Option<&TotalDiffOp> {
        self.r_ops.iter().find(|(l, _)| l == label).map(|(_, r)| r)
    }

    pub fn sym_labels(&self) -> Vec<String> {
        self.symmetries.iter().map(|o| o.label.clone()).collect()
    }

    pub fn adj_labels(&self) -> Vec<String> {
        self.adjoint_symmetries.iter().map(|o| o.label.clone()).collect()
    }
}

#[derive(Clone, Debug)]
struct Stmt {
    toks: Vec<Token>,
    line: usize,
    end: Pos,
    raw: String,
}

#[derive(Clone, Debug)]
struct Section {
    keyword: String,
    header: Stmt,
    body: Vec<Stmt>,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn first_word(line: &str) -> &str {
    let t = line.trim_start();
    let end = t.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(t.len());
    &t[..end]
}

fn depth_change(toks: &[Token]) -> i64 {
    toks.iter()
        .map(|t| match t.tok {
            Tok::Sym("(") | Tok::Sym("[") | Tok::Sym("{") => 1,
            Tok::Sym(")") | Tok::Sym("]") | Tok::Sym("}") => -1,
            _ => 0,
        })
        .sum()
}

fn split_sections(text: &str) -> Result<Vec<Section>, DslError> {
    let mut sections: Vec<Section> = Vec::new();
    let mut pending: Option<Stmt> = None;
    let mut depth = 0i64;
    for (n, raw_line) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = strip_comment(raw_line);
        if line.trim().is_empty() {
            continue;
        }
        let in_notes = sections.last().map_or(false, |s| s.keyword == "notes");
        let word = first_word(line);
        if pending.is_none() && in_notes && !KEYWORDS.contains(&word) {
            let sec = sections.last_mut().unwrap();
            sec.body.push(Stmt { toks: Vec::new(), line: line_no, end: Pos { line: line_no, col: 1 }, raw: line.trim().to_string() });
            continue;
        }
        let toks = tokenize(line, line_no, 1)?;
        depth += depth_change(&toks);
        let end = Pos { line: line_no, col: line.len() + 1 };
        match pending.as_mut() {
            Some(st) => {
                st.toks.extend(toks);
                st.end = end;
                st.raw.push(' ');
                st.raw.push_str(line.trim());
            }
            None => pending = Some(Stmt { toks, line: line_no, end, raw: line.trim().to_string() }),
        }
        if depth < 0 {
            return Err(DslError::Syntax { pos: Pos { line: line_no, col: 1 }, msg: "unbalanced closing bracket".into() });
        }
        if depth == 0 {
            let st = pending.take().unwrap();
            let kw = match st.toks.first() {
                Some(Token { tok: Tok::Ident(w), .. }) if KEYWORDS.contains(&w.as_str()) => Some(w.clone()),
                _ => None,
            };
            match kw {
                Some(k) => {
                    let header = Stmt { toks: st.toks[1..].to_vec(), ..st };
                    sections.push(Section { keyword: k, header, body: Vec::new() });
                }
                None => match sections.last_mut() {
                    Some(sec) => sec.body.push(st),
                    None => {
                        return Err(DslError::Section { line: line_no, msg: "statement outside of any section".into() })
                    }
                },
            }
        }
    }
    if let Some(st) = pending {
        return Err(DslError::Syntax { pos: st.end, msg: "unclosed bracket at end of file".into() });
    }
    Ok(sections)
}

fn ident_list(st: &Stmt) -> Result<Vec<String>, DslError> {
    let mut out = Vec::new();
    let mut expect_ident = true;
    for t in &st.toks {
        match (&t.tok, expect_ident) {
            (Tok::Ident(s), true) => {
                out.push(s.clone());
                expect_ident = false;
            }
            (Tok::Sym(","), false) => expect_ident = true,
            _ => return Err(DslError::Syntax { pos: t.pos, msg: "expected a comma-separated list of names".into() }),
        }
    }
    if expect_ident && !out.is_empty() {
        return Err(DslError::Syntax { pos: st.end, msg: "trailing comma".into() });
    }
    Ok(out)
}

/// Splits `name @tag1 @tag2` at the start of a token list.
fn name_and_tags(toks: &[Token], line: usize) -> Result<(String, Vec<String>, usize), DslError> {
    let name = match toks.first() {
        Some(Token { tok: Tok::Ident(n), .. }) => n.clone(),
        Some(t) => return Err(DslError::Syntax { pos: t.pos, msg: "expected a name".into() }),
        None => return Err(DslError::Section { line, msg: "missing name".into() }),
    };
    let mut tags = Vec::new();
    let mut i = 1;
    while i + 1 < toks.len() + 1 && matches!(toks.get(i), Some(Token { tok: Tok::Sym("@"), .. })) {
        match toks.get(i + 1) {
            Some(Token { tok: Tok::Ident(t), .. }) => tags.push(t.clone()),
            _ => return Err(DslError::Syntax { pos: toks[i].pos, msg: "expected a tag name after `@`".into() }),
        }
        i += 2;
    }
    Ok((name, tags, i))
}

/// Splits a statement at the first top-level occurrence of `sym`.
fn split_at<'a>(toks: &'a [Token], sym: &str) -> Option<(&'a [Token], &'a [Token])> {
    let mut depth = 0i64;
    for (i, t) in toks.iter().enumerate() {
        match &t.tok {
            Tok::Sym("(") | Tok::Sym("[") | Tok::Sym("{") => depth += 1,
            Tok::Sym(")") | Tok::Sym("]") | Tok::Sym("}") => depth -= 1,
            Tok::Sym(s) if *s == sym && depth == 0 => return Some((&toks[..i], &toks[i + 1..])),
            _ => {}
        }
    }
    None
}

fn need_split<'a>(st: &'a Stmt, sym: &str) -> Result<(&'a [Token], &'a [Token]), DslError> {
    split_at(&st.toks, sym).ok_or_else(|| DslError::Syntax {
        pos: st.toks.first().map_or(st.end, |t| t.pos),
        msg: format!("expected `{sym}`"),
    })
}

fn node(toks: &[Token], st: &Stmt) -> Result<Node, DslError> {
    if toks.is_empty() {
        return Err(DslError::Syntax { pos: st.end, msg: "expected an expression".into() });
    }
    parse_node(toks, st.end)
}

fn key_of(toks: &[Token]) -> Option<&str> {
    match toks {
        [Token { tok: Tok::Ident(k), .. }] => Some(k.as_str()),
        _ => None,
    }
}

fn only_ident(n: &Node) -> Result<String, DslError> {
    match &n.ast {
        Ast::Ident(s) => Ok(s.clone()),
        _ => Err(DslError::Syntax { pos: n.pos, msg: "expected a name".into() }),
    }
}

fn check_labels(lc: &LinComb, known: &[String], line: usize) -> Result<(), DslError> {
    for k in lc.keys() {
        if !known.contains(k) {
            return Err(DslError::Section { line, msg: format!("unknown basis label `{k}`") });
        }
    }
    Ok(())
}

/// Parses and validates a complete `.sys` file.
pub fn parse_system(text: &str) -> Result<SystemFile, DslError> {
    let sections = split_sections(text)?;
    let mut sys = SystemFile::default();
    let find_all = |k: &'static str| sections.iter().filter(move |s| s.keyword == k);
    let single = |k: &str| -> Result<Option<&Section>, DslError> {
        let mut it = sections.iter().filter(|s| s.keyword == k);
        let first = it.next();
        if let Some(dup) = it.next() {
            return Err(DslError::Duplicate { line: dup.header.line, name: k.to_string() });
        }
        Ok(first)
    };

    let head = single("system")?.ok_or(DslError::Section { line: 1, msg: "missing `system` section".into() })?;
    sys.name = match head.header.toks.as_slice() {
        [Token { tok: Tok::Ident(n), .. }] => n.clone(),
        _ => return Err(DslError::Section { line: head.header.line, msg: "expected `system NAME`".into() }),
    };
    let mut seen = BTreeSet::new();
    for (kw, slot) in [("independents", 0), ("dependents", 1), ("parameters", 2)] {
        if let Some(sec) = single(kw)? {
            for name in ident_list(&sec.header)? {
                if name == "D" || !seen.insert(name.clone()) {
                    return Err(DslError::Duplicate { line: sec.header.line, name });
                }
                let s = Symbol::new(&name);
                match slot {
                    0 => sys.independents.push(s),
                    1 => sys.dependents.push(s),
                    _ => sys.parameters.push(s),
                }
            }
        }
    }
    if sys.independents.is_empty() || sys.dependents.is_empty() {
        return Err(DslError::Section { line: head.header.line, msg: "independents and dependents must be declared".into() });
    }
    let scope = sys.scope();

    if let Some(sec) = single("constraints")? {
        for st in &sec.body {
            let (l, r) = need_split(st, "!=")?;
            sys.constraints.push(Constraint {
                text: st.raw.clone(),
                lhs: eval::to_scalar(&node(l, st)?, &scope)?,
                rhs: eval::to_scalar(&node(r, st)?, &scope)?,
            });
        }
    }

    if let Some(sec) = single("variants")? {
        for st in &sec.body {
            let (l, r) = need_split(st, ":")?;
            let name = only_ident(&node(l, st)?)?;
            let mut sets = BTreeMap::new();
            if !r.is_empty() {
                for chunk in r.split(|t| t.tok == Tok::Sym(",")) {
                    let (a, b) = split_at(chunk, "=").ok_or_else(|| DslError::Syntax {
                        pos: chunk.first().map_or(st.end, |t| t.pos),
                        msg: "expected `param = value`".into(),
                    })?;
                    let (p, v) = eval::to_assignment(&node(a, st)?, &node(b, st)?, &scope)?;
                    sets.insert(p, v);
                }
            }
            sys.variants.push(Variant { name, sets });
        }
    }

    let sec = single("equations")?.ok_or(DslError::Section { line: head.header.line, msg: "missing `equations` section".into() })?;
    for st in &sec.body {
        let (l, r) = need_split(st, ":")?;
        let name = only_ident(&node(l, st)?)?;
        if sys.equations.iter().any(|(n, _)| *n == name) {
            return Err(DslError::Duplicate { line: st.line, name });
        }
        sys.equations.push((name, eval::to_expr(&node(r, st)?, &scope)?));
    }
    if sys.equations.is_empty() {
        return Err(DslError::Section { line: sec.header.line, msg: "no equations".into() });
    }

    if let Some(sec) = single("evolution")? {
        for st in &sec.body {
            let (l, r) = need_split(st, "=")?;
            let ln = node(l, st)?;
            let jet = match eval::to_expr(&ln, &scope)?.as_monomial() {
                Some((c, m)) if c == Rat::from_integer(1.into()) && m.factors().len() == 1 => {
                    match m.factors().iter().next() {
                        Some((Var::Jet(j), e)) if *e == crate::symexpr::Exponent::one() && !j.derivs.is_empty() => j.clone(),
                        _ => return Err(DslError::Syntax { pos: ln.pos, msg: "left side must be a derivative".into() }),
                    }
                }
                _ => return Err(DslError::Syntax { pos: ln.pos, msg: "left side must be a derivative".into() }),
            };
            sys.evolution.push((jet, eval::to_expr(&node(r, st)?, &scope)?));
        }
    }

    let m = sys.dependents.len();
    let big_m = sys.equations.len();
    for (kw, n, is_sym) in [("symmetries", m, true), ("adjoint_symmetries", big_m, false)] {
        if let Some(sec) = single(kw)? {
            for st in &sec.body {
                let (l, r) = need_split(st, "=")?;
                let (label, tags, used) = name_and_tags(l, st.line)?;
                if used != l.len() {
                    return Err(DslError::Syntax { pos: l[used].pos, msg: "unexpected token after label".into() });
                }
                if sys.symmetry(&label).is_some() || sys.adjoint_symmetry(&label).is_some() {
                    return Err(DslError::Duplicate { line: st.line, name: label });
                }
                let rn = node(r, st)?;
                let (scale, components) = eval::to_tuple(&rn, &scope, n).map_err(|e| match e {
                    DslError::LengthMismatch { pos, expected, got } => DslError::LengthMismatch { pos, expected, got },
                    other => other,
                })?;
                let obj = Object { label, tags, scale, components, line: st.line };
                if is_sym {
                    sys.symmetries.push(obj);
                } else {
                    sys.adjoint_symmetries.push(obj);
                }
            }
        }
    }
    let syms = sys.sym_labels();
    let adjs = sys.adj_labels();

    if let Some(sec) = single("r_ops")? {
        for st in &sec.body {
            let (l, r) = need_split(st, "=")?;
            let label = match l {
                [Token { tok: Tok::Ident(rr), .. }, Token { tok: Tok::Sym("["), .. }, Token { tok: Tok::Ident(lab), .. }, Token { tok: Tok::Sym("]"), .. }]
                    if rr == "R" =>
                {
                    lab.clone()
                }
                _ => return Err(DslError::Syntax { pos: l.first().map_or(st.end, |t| t.pos), msg: "expected `R[label]`".into() }),
            };
            let op = eval::to_matrix_op(&node(r, st)?, &scope)?;
            let expected = if sys.symmetry(&label).is_some() {
                (big_m, big_m)
            } else if sys.adjoint_symmetry(&label).is_some() {
                (m, big_m)
            } else {
                return Err(DslError::Section { line: st.line, msg: format!("R-operator for unknown object `{label}`") });
            };
            if op.shape() != expected {
                return Err(DslError::LengthMismatch {
                    pos: Pos { line: st.line, col: 1 },
                    expected: expected.0 * expected.1,
                    got: op.shape().0 * op.shape().1,
                });
            }
            if sys.r_op(&label).is_some() {
                return Err(DslError::Duplicate { line: st.line, name: format!("R[{label}]") });
            }
            sys.r_ops.push((label, op));
        }
    }

    if let Some(sec) = single("commutators")? {
        sys.has_commutators = true;
        for st in &sec.body {
            let (l, r) = need_split(st, "=")?;
            let ln = node(l, st)?;
            let (a, b) = match &ln.ast {
                Ast::List(items) if items.len() == 2 => (only_ident(&items[0])?, only_ident(&items[1])?),
                _ => return Err(DslError::Syntax { pos: ln.pos, msg: "expected `[A, B]`".into() }),
            };
            for x in [&a, &b] {
                if !syms.contains(x) {
                    return Err(DslError::Section { line: st.line, msg: format!("unknown symmetry `{x}`") });
                }
            }
            let value = eval::to_lincomb(&node(r, st)?, &syms, &scope)?;
            check_labels(&value, &syms, st.line)?;
            sys.commutators.push(CommutatorEntry { left: a, right: b, value, line: st.line });
        }
    }

    for (kw, slot) in [("multipliers", true), ("nonmultipliers", false)] {
        if let Some(sec) = single(kw)? {
            let list = ident_list(&sec.header)?;
            for l in &list {
                if !adjs.contains(l) {
                    return Err(DslError::Section { line: sec.header.line, msg: format!("unknown adjoint-symmetry `{l}`") });
                }
            }
            if slot {
                sys.multipliers = list;
            } else {
                sys.nonmultipliers = list;
            }
        }
    }

    for sec in find_all("table") {
        sys.tables.push(parse_table(sec, &scope, &syms, &adjs)?);
    }

    for sec in find_all("noether") {
        let (name, tags, _) = name_and_tags(&sec.header.toks, sec.header.line)?;
        let kv = key_values(sec)?;
        let q = eval::to_lincomb(&req(&kv, "q", sec)?, &adjs, &scope)?;
        let op = eval::to_matrix_op(&req(&kv, "op", sec)?, &scope)?;
        sys.noether.push(NoetherSpec { name, tags, q, op, line: sec.header.line });
    }

    for (kw, kind) in [("lagrangian", VariationalKind::Lagrangian), ("hamiltonian", VariationalKind::Hamiltonian)] {
        for sec in find_all(kw) {
            let (name, tags, _) = name_and_tags(&sec.header.toks, sec.header.line)?;
            let kv = key_values(sec)?;
            let op = eval::to_matrix_op(&req(&kv, "op", sec)?, &scope)?;
            let density = eval::to_expr(&req(&kv, "density", sec)?, &scope)?;
            let lhs = match kv.get("lhs") {
                Some(n) => Some(eval::to_tuple(n, &scope, m)?.1),
                None => None,
            };
            if kind == VariationalKind::Hamiltonian && lhs.is_none() {
                return Err(DslError::Section { line: sec.header.line, msg: "hamiltonian needs `lhs`".into() });
            }
            sys.variational.push(VariationalSpec { name, tags, kind, op, density, lhs, line: sec.header.line });
        }
    }

    for sec in find_all("integrand") {
        let (name, tags, _) = name_and_tags(&sec.header.toks, sec.header.line)?;
        let kv = key_values(sec)?;
        let q = eval::to_lincomb(&req(&kv, "q", sec)?, &adjs, &scope)?;
        let names = |key: &str| -> Result<Vec<Symbol>, DslError> {
            let n = req(&kv, key, sec)?;
            let items = match n.ast {
                Ast::Tuple(items) => items,
                _ => vec![n],
            };
            items.iter().map(|i| only_ident(i).map(|s| Symbol::new(&s))).collect()
        };
        let first = names("first")?;
        let second = names("second")?;
        if first.len() != m || second.len() != m {
            return Err(DslError::LengthMismatch { pos: Pos { line: sec.header.line, col: 1 }, expected: m, got: first.len() });
        }
        let extra: Vec<Symbol> = first.iter().chain(&second).cloned().collect();
        let expect = eval::to_expr(&req(&kv, "expect", sec)?, &scope.with_dependents(&extra))?;
        sys.integrands.push(IntegrandSpec { name, tags, q, first, second, expect, line: sec.header.line });
    }

    for sec in find_all("isomorphism") {
        let (name, tags, _) = name_and_tags(&sec.header.toks, sec.header.line)?;
        let mut bracket = None;
        let mut target = Vec::new();
        let mut scale = ParamScalar::one();
        let mut entries = Vec::new();
        let mut inverse = false;
        for st in &sec.body {
            if let Some((l, r)) = split_at(&st.toks, "->") {
                let from = only_ident(&node(l, st)?)?;
                if !adjs.contains(&from) {
                    return Err(DslError::Section { line: st.line, msg: format!("unknown adjoint-symmetry `{from}`") });
                }
                entries.push((from, eval::to_lincomb(&node(r, st)?, &syms, &scope)?));
                continue;
            }
            let (l, r) = need_split(st, "=")?;
            let rn = node(r, st)?;
            match key_of(l) {
                Some("bracket") => bracket = Some(only_ident(&rn)?),
                Some("target") => {
                    target = match &rn.ast {
                        Ast::List(items) => items.iter().map(only_ident).collect::<Result<_, _>>()?,
                        _ => vec![only_ident(&rn)?],
                    }
                }
                Some("scale") => scale = eval::to_scalar(&rn, &scope)?,
                Some("map") if only_ident(&rn)? == "inverse" => inverse = true,
                _ => return Err(DslError::Section { line: st.line, msg: "unknown isomorphism key".into() }),
            }
        }
        let bracket = bracket.ok_or(DslError::Section { line: sec.header.line, msg: "isomorphism needs `bracket`".into() })?;
        let map = if inverse { IsoMap::Inverse } else { IsoMap::Explicit(entries) };
        sys.isomorphisms.push(IsomorphismSpec { name, tags, bracket, target, map, scale, line: sec.header.line });
    }

    for sec in find_all("relation") {
        let (name, _, _) = name_and_tags(&sec.header.toks, sec.header.line)?;
        let kv = key_values(sec)?;
        let parent = only_ident(&req(&kv, "parent", sec)?)?;
        let combine = eval::to_matrix_op(&req(&kv, "combine", sec)?, &scope)?;
        let parent_op = eval::to_matrix_op(&req(&kv, "parent_op", sec)?, &scope)?;
        sys.relations.push(RelationSpec { name, parent, combine, parent_op, line: sec.header.line });
    }

    if let Some(sec) = single("lift")? {
        let mut parent = None;
        let mut rules = Vec::new();
        let mut symmetry_map = None;
        let mut adjoint_map = None;
        for st in &sec.body {
            let (l, r) = need_split(st, "=")?;
            let rn = node(r, st)?;
            match key_of(l) {
                Some("parent") => parent = Some(only_ident(&rn)?),
                Some("symmetry_map") => symmetry_map = Some(eval::to_matrix_op(&rn, &scope)?),
                Some("adjoint_map") => adjoint_map = Some(eval::to_matrix_op(&rn, &scope)?),
                Some(v) => rules.push((Symbol::new(v), eval::to_expr(&rn, &scope)?)),
                None => return Err(DslError::Section { line: st.line, msg: "expected `name = value`".into() }),
            }
        }
        let need = |o: Option<TotalDiffOp>, k: &str| o.ok_or(DslError::Section { line: sec.header.line, msg: format!("lift needs `{k}`") });
        sys.lift = Some(LiftSpec {
            parent: parent.ok_or(DslError::Section { line: sec.header.line, msg: "lift needs `parent`".into() })?,
            rules,
            symmetry_map: need(symmetry_map, "symmetry_map")?,
            adjoint_map: need(adjoint_map, "adjoint_map")?,
            line: sec.header.line,
        });
    }

    if let Some(sec) = single("notes")? {
        sys.notes = sec.body.iter().map(|s| s.raw.clone()).collect();
    }

    validate_tags(&sys)?;
    Ok(sys)
}

fn validate_tags(sys: &SystemFile) -> Result<(), DslError> {
    let known: Vec<&str> = sys.variants.iter().map(|v| v.name.as_str()).collect();
    let objs = sys.symmetries.iter().chain(&sys.adjoint_symmetries).map(|o| (&o.tags, o.line));
    let tables = sys.tables.iter().map(|t| (&t.tags, t.line));
    for (tags, line) in objs.chain(tables) {
        for t in tags {
            if !known.contains(&t.as_str()) {
                return Err(DslError::Section { line, msg: format!("unknown variant tag `{t}`") });
            }
        }
    }
    Ok(())
}

fn key_values(sec: &Section) -> Result<BTreeMap<String, Node>, DslError> {
    let mut out = BTreeMap::new();
    for st in &sec.body {
        let (l, r) = need_split(st, "=")?;
        let key = key_of(l).ok_or(DslError::Syntax {
            pos: l.first().map_or(st.end, |t| t.pos),
            msg: "expected `key = value`".into(),
        })?;
        if out.insert(key.to_string(), node(r, st)?).is_some() {
            return Err(DslError::Duplicate { line: st.line, name: key.to_string() });
        }
    }
    Ok(out)
}

fn req(kv: &BTreeMap<String, Node>, key: &str, sec: &Section) -> Result<Node, DslError> {
    kv.get(key)
        .cloned()
        .ok_or(DslError::Section { line: sec.header.line, msg: format!("`{}` needs `{key}`", sec.keyword) })
}

fn parse_table(sec: &Section, scope: &Scope, syms: &[String], adjs: &[String]) -> Result<Table, DslError> {
    let (name, tags, _) = name_and_tags(&sec.header.toks, sec.header.line)?;
    let mut t = Table {
        name,
        tags,
        ty: TableType::Action,
        kind: 0,
        q: None,
        policy: None,
        scaling: None,
        sets: BTreeMap::new(),
        rows: None,
        actions: Vec::new(),
        brackets: Vec::new(),
        kernel: None,
        ideal: None,
        inverses: Vec::new(),
        basis: Vec::new(),
        domain: None,
        line: sec.header.line,
    };
    let mut ty = None;
    let mut names: Vec<String> = adjs.to_vec();
    for st in &sec.body {
        let toks = &st.toks;
        if let [Token { tok: Tok::Ident(set), .. }, rest @ ..] = toks.as_slice() {
            if set == "set" {
                let (a, b) = split_at(rest, "=").ok_or(DslError::Syntax { pos: st.end, msg: "expected `set p = v`".into() })?;
                let (p, v) = eval::to_assignment(&node(a, st)?, &node(b, st)?, scope)?;
                t.sets.insert(p, v);
                continue;
            }
            if set == "let" {
                let (a, b) = split_at(rest, "=").ok_or(DslError::Syntax { pos: st.end, msg: "expected `let A = combination`".into() })?;
                let name = only_ident(&node(a, st)?)?;
                if names.contains(&name) || syms.contains(&name) {
                    return Err(DslError::Duplicate { line: st.line, name });
                }
                let def = eval::to_lincomb(&node(b, st)?, adjs, scope)?;
                t.basis.push((name.clone(), def));
                names.push(name);
                continue;
            }
            if set == "inverse" {
                let (a, b) = split_at(rest, "=").ok_or(DslError::Syntax { pos: st.end, msg: "expected `inverse Q = P`".into() })?;
                let q = eval::to_lincomb(&node(a, st)?, &names, scope)?;
                let p = eval::to_lincomb(&node(b, st)?, syms, scope)?;
                t.inverses.push(InverseEntry { q, p, line: st.line });
                continue;
            }
        }
        let (l, r) = need_split(st, "=")?;
        // S[P](Q) = value
        if let [Token { tok: Tok::Ident(s), .. }, Token { tok: Tok::Sym("["), .. }, Token { tok: Tok::Ident(p), .. }, Token { tok: Tok::Sym("]"), .. }, Token { tok: Tok::Sym("("), .. }, Token { tok: Tok::Ident(q), .. }, Token { tok: Tok::Sym(")"), .. }] =
            l
        {
            if s == "S" {
                if !syms.contains(p) || !adjs.contains(q) {
                    return Err(DslError::Section { line: st.line, msg: format!("unknown label in S[{p}]({q})") });
                }
                let value = eval::to_lincomb(&node(r, st)?, adjs, scope)?;
                check_labels(&value, adjs, st.line)?;
                t.actions.push(ActionEntry { p: p.clone(), q: q.clone(), value, line: st.line });
                continue;
            }
        }
        let ln = node(l, st)?;
        if let Ast::List(items) = &ln.ast {
            if items.len() != 2 {
                return Err(DslError::Syntax { pos: ln.pos, msg: "expected `[A, B]`".into() });
            }
            let left = eval::to_lincomb(&items[0], &names, scope)?;
            let right = eval::to_lincomb(&items[1], &names, scope)?;
            let value = eval::to_lincomb(&node(r, st)?, &names, scope)?;
            t.brackets.push(BracketEntry { left, right, value, line: st.line });
            continue;
        }
        let key = only_ident(&ln)?;
        let rn = node(r, st)?;
        match key.as_str() {
            "type" => {
                ty = Some(match only_ident(&rn)?.as_str() {
                    "action" => TableType::Action,
                    "bracket" => TableType::Bracket,
                    other => return Err(DslError::Section { line: st.line, msg: format!("unknown table type `{other}`") }),
                })
            }
            "kind" => {
                t.kind = match &rn.ast {
                    Ast::Num(n) if *n >= Rat::from_integer(1.into()) && *n <= Rat::from_integer(3.into()) && n.is_integer() => {
                        n.to_integer().try_into().unwrap_or(0)
                    }
                    _ => return Err(DslError::Syntax { pos: rn.pos, msg: "kind must be 1, 2 or 3".into() }),
                }
            }
            "q" => t.q = Some(eval::to_lincomb(&rn, adjs, scope)?),
            "policy" => t.policy = Some(only_ident(&rn)?),
            "scaling" => {
                let s = only_ident(&rn)?;
                if !syms.contains(&s) {
                    return Err(DslError::Section { line: st.line, msg: format!("unknown symmetry `{s}`") });
                }
                t.scaling = Some(s)
            }
            "rows" => {
                t.rows = Some(match &rn.ast {
                    Ast::List(items) => items.iter().map(only_ident).collect::<Result<_, _>>()?,
                    _ => vec![only_ident(&rn)?],
                })
            }
            "kernel" => {
                let items = match &rn.ast {
                    Ast::List(items) => items.clone(),
                    _ => vec![rn.clone()],
                };
                t.kernel = Some(items.iter().map(|i| eval::to_lincomb(i, syms, scope)).collect::<Result<_, _>>()?);
            }
            "domain" => {
                let items = match &rn.ast {
                    Ast::List(items) => items.iter().map(only_ident).collect::<Result<Vec<_>, _>>()?,
                    _ => vec![only_ident(&rn)?],
                };
                for i in &items {
                    if !names.contains(i) {
                        return Err(DslError::Section { line: st.line, msg: format!("unknown domain element `{i}`") });
                    }
                }
                t.domain = Some(items)
            }
            "ideal" => {
                t.ideal = Some(match only_ident(&rn)?.as_str() {
                    "true" => true,
                    "false" => false,
                    _ => return Err(DslError::Syntax { pos: rn.pos, msg: "expected true or false".into() }),
                })
            }
            other => return Err(DslError::Section { line: st.line, msg: format!("unknown table key `{other}`") }),
        }
    }
    t.ty = ty.ok_or(DslError::Section { line: sec.header.line, msg: "table needs `type`".into() })?;
    if t.kind == 0 {
        return Err(DslError::Section { line: sec.header.line, msg: "table needs `kind`".into() });
    }
    if t.ty == TableType::Bracket && t.q.is_none() {
        return Err(DslError::Section { line: sec.header.line, msg: "bracket table needs `q`".into() });
    }
    Ok(t)
}
