//! The bundled example systems and the reports that check their golden data.
//!
//! Fixtures are `.sys` files compiled into the library. Setting
//! `JETBRACKETS_FIXTURE_DIR` makes [`fixture_source`] prefer `<dir>/<name>.sys`
//! when that file exists. Loading validates the file: every object must pass
//! its determining equation, every supplied R-operator must verify and the
//! computed commutators must match the listed ones.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::bracket::{
    self, add, coords_in, coords_to_lincomb, decompose, dual_action_analysis, is_zero, kernel_analysis,
    lie_algebra_checks, lincomb_to_coords, render_lincomb, scale, unit, verify_isomorphism, zeros, BasisElement,
    BracketError, Coords, DualAnalysis, Instantiated, IsoReport, LieModel, Policy,
};
use crate::dsl::{self, DslError, IsoMap, LinComb, SystemFile, Table, TableType, VariationalKind};
use crate::jetcalc::{reduce_on_solutions, PDESystem};
use crate::linop::{Side, TotalDiffOp};
use crate::params::linalg::rank;
use crate::params::ParamScalar;
use crate::structure::{
    self, check_determining, classify_multiplier, combine_ops, hamiltonian_check, lagrangian_check, noether_operator,
    placeholders, prepare, relation_check, symmetry_action, symplectic_integrand, ActionKind, CheckReport,
    MultiplierReport, Prepared, StructureError,
};
use crate::symexpr::{Expr, Jet, Rat, Symbol, Var};

pub const FIXTURE_DIR_ENV: &str = "JETBRACKETS_FIXTURE_DIR";

pub const FIXTURE_NAMES: [&str; 8] = [
    "reaction_diffusion",
    "navier_stokes",
    "boussinesq",
    "coupled_kdv",
    "coupled_kdv_potential",
    "acoustic_wave",
    "acoustic_potential",
    "acoustic_first_layer",
];

fn builtin(name: &str) -> Option<&'static str> {
    Some(match name {
        "reaction_diffusion" => include_str!("../../fixtures/reaction_diffusion.sys"),
        "navier_stokes" => include_str!("../../fixtures/navier_stokes.sys"),
        "boussinesq" => include_str!("../../fixtures/boussinesq.sys"),
        "coupled_kdv" => include_str!("../../fixtures/coupled_kdv.sys"),
        "coupled_kdv_potential" => include_str!("../../fixtures/coupled_kdv_potential.sys"),
        "acoustic_wave" => include_str!("../../fixtures/acoustic_wave.sys"),
        "acoustic_potential" => include_str!("../../fixtures/acoustic_potential.sys"),
        "acoustic_first_layer" => include_str!("../../fixtures/acoustic_first_layer.sys"),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("cannot read `{path}`: {msg}")]
    Io { path: String, msg: String },
    #[error("{name}: {source}")]
    Parse { name: String, source: DslError },
    #[error("{name}: validation failed: {}", details.join("; "))]
    ValidationFailure { name: String, details: Vec<String> },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Bracket(#[from] BracketError),
}

/// Text of a named fixture, from the override directory when it has one.
pub fn fixture_source(name: &str) -> Result<String, FixtureError> {
    let Some(text) = builtin(name) else { return Err(FixtureError::UnknownFixture(name.to_string())) };
    if let Some(dir) = std::env::var_os(FIXTURE_DIR_ENV) {
        let path = std::path::Path::new(&dir).join(format!("{name}.sys"));
        if path.is_file() {
            return std::fs::read_to_string(&path)
                .map_err(|e| FixtureError::Io { path: path.display().to_string(), msg: e.to_string() });
        }
    }
    Ok(text.to_string())
}

type CacheKey = (String, Option<String>);

fn cache() -> &'static Mutex<BTreeMap<CacheKey, Arc<Fixture>>> {
    static CACHE: OnceLock<Mutex<BTreeMap<CacheKey, Arc<Fixture>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// Loads and validates a named fixture in its default variant.
pub fn load_fixture(name: &str) -> Result<Arc<Fixture>, FixtureError> {
    load_fixture_variant(name, None)
}

/// Loads and validates a named fixture in the given variant. Results are
/// cached per source text and variant.
pub fn load_fixture_variant(name: &str, variant: Option<&str>) -> Result<Arc<Fixture>, FixtureError> {
    let text = fixture_source(name)?;
    let key = (text.clone(), variant.map(str::to_string));
    if let Some(f) = cache().lock().expect("fixture cache").get(&key) {
        return Ok(f.clone());
    }
    let f = Arc::new(load_from_text(&text, variant)?);
    cache().lock().expect("fixture cache").insert(key, f.clone());
    Ok(f)
}

/// Parses, specializes and validates a `.sys` text.
pub fn load_from_text(text: &str, variant: Option<&str>) -> Result<Fixture, FixtureError> {
    let f = Fixture::build(text, variant)?;
    let details = f.validation_failures();
    if !details.is_empty() {
        return Err(FixtureError::ValidationFailure { name: f.file.name.clone(), details });
    }
    Ok(f)
}

/// Parses and specializes without validating.
pub fn parse_unvalidated(text: &str, variant: Option<&str>) -> Result<Fixture, FixtureError> {
    Fixture::build(text, variant)
}

fn parse_err(name: &str, e: DslError) -> FixtureError {
    FixtureError::Parse { name: name.to_string(), source: e }
}

/// Correspondence with the parent of a potential system.
struct Lift {
    parent: Arc<Fixture>,
    /// Parent dependent and the potential jet it equals.
    rules: Vec<(Symbol, Jet)>,
    symmetry_map: TotalDiffOp,
    adjoint_map: TotalDiffOp,
}

/// A specialized system file with cached computations.
pub struct Fixture {
    pub file: SystemFile,
    pub sys: PDESystem,
    lift: Option<Lift>,
    prepared: Mutex<BTreeMap<String, Prepared>>,
    commutators: Mutex<BTreeMap<(usize, usize), Coords>>,
    actions: Mutex<BTreeMap<(u8, usize, usize), Coords>>,
}

impl std::fmt::Debug for Fixture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fixture").field("name", &self.file.name).field("variant", &self.variant()).finish()
    }
}

fn kind_index(k: ActionKind) -> u8 {
    match k {
        ActionKind::Action1 => 1,
        ActionKind::Action2 => 2,
        ActionKind::Action3 => 3,
    }
}

fn scalar_expr(s: &ParamScalar) -> Result<Expr, StructureError> {
    s.to_expr().ok_or_else(|| StructureError::Coefficient(s.to_string()))
}

fn scale_exprs(v: &[Expr], s: &Expr) -> Vec<Expr> {
    v.iter().map(|e| e * s).collect()
}

impl Fixture {
    fn build(text: &str, variant: Option<&str>) -> Result<Fixture, FixtureError> {
        let raw = dsl::parse_system(text).map_err(|e| parse_err("input", e))?;
        let name = raw.name.clone();
        let file = raw.specialize(variant).map_err(|e| parse_err(&name, e))?;
        let sys = file.pde_system();
        let lift = match &file.lift {
            None => None,
            Some(spec) => {
                let vname = file.variants.first().map(|v| v.name.clone());
                let parent = load_parent(&spec.parent, vname.as_deref())?;
                let mut rules = Vec::new();
                for (dep, e) in &spec.rules {
                    let jet = match e.as_monomial() {
                        Some((c, m)) if c == Rat::from_integer(1.into()) && m.factors().len() == 1 => {
                            match m.factors().iter().next() {
                                Some((Var::Jet(j), _)) => j.clone(),
                                _ => return Err(lift_err(&name, "lift rules must name a single jet")),
                            }
                        }
                        _ => return Err(lift_err(&name, "lift rules must name a single jet")),
                    };
                    rules.push((dep.clone(), jet));
                }
                Some(Lift { parent, rules, symmetry_map: spec.symmetry_map.clone(), adjoint_map: spec.adjoint_map.clone() })
            }
        };
        Ok(Fixture {
            file,
            sys,
            lift,
            prepared: Mutex::new(BTreeMap::new()),
            commutators: Mutex::new(BTreeMap::new()),
            actions: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn name(&self) -> &str {
        &self.file.name
    }

    /// The active variant, if the file declares any.
    pub fn variant(&self) -> Option<&str> {
        self.file.variants.first().map(|v| v.name.as_str())
    }

    fn reduce(&self, v: Vec<Expr>) -> Result<Vec<Expr>, StructureError> {
        if self.sys.solved.is_none() {
            return Ok(v);
        }
        v.iter().map(|e| reduce_on_solutions(e, &self.sys).map_err(StructureError::from)).collect()
    }

    fn sym_index(&self, label: &str) -> Result<usize, BracketError> {
        self.file.symmetries.iter().position(|o| o.label == label).ok_or_else(|| BracketError::UnknownLabel(label.into()))
    }

    fn adj_index(&self, label: &str) -> Result<usize, BracketError> {
        self.file
            .adjoint_symmetries
            .iter()
            .position(|o| o.label == label)
            .ok_or_else(|| BracketError::UnknownLabel(label.into()))
    }

    /// Adjoint-symmetry components as they act on this system: through the
    /// adjoint map for a potential system, as written otherwise.
    pub fn adjoint_body(&self, i: usize) -> Result<Vec<Expr>, StructureError> {
        let comps = &self.file.adjoint_symmetries[i].components;
        match &self.lift {
            Some(l) => Ok(l.adjoint_map.apply(comps)?),
            None => Ok(comps.clone()),
        }
    }

    fn prepared(&self, key: &str, body: &[Expr], side: Side, label: &str) -> Result<Prepared, StructureError> {
        if let Some(p) = self.prepared.lock().expect("prepared cache").get(key) {
            return Ok(p.clone());
        }
        let p = prepare(&self.sys, label, body, side, self.file.r_op(label))?;
        self.prepared.lock().expect("prepared cache").insert(key.to_string(), p.clone());
        Ok(p)
    }

    pub fn prepared_symmetry(&self, i: usize) -> Result<Prepared, StructureError> {
        let o = &self.file.symmetries[i];
        self.prepared(&o.label, &o.components, Side::Symmetry, &o.label)
    }

    pub fn prepared_adjoint(&self, i: usize) -> Result<Prepared, StructureError> {
        let body = self.adjoint_body(i)?;
        let label = &self.file.adjoint_symmetries[i].label;
        self.prepared(label, &body, Side::Adjoint, label)
    }

    fn sym_basis(&self) -> Result<Vec<BasisElement>, StructureError> {
        self.file
            .symmetries
            .iter()
            .map(|o| Ok(BasisElement { label: o.label.clone(), scale: o.scale.clone(), body: self.reduce(o.components.clone())? }))
            .collect()
    }

    /// Nonzero adjoint-symmetry bodies with their indices.
    fn adj_basis(&self) -> Result<Vec<(usize, BasisElement)>, StructureError> {
        let mut out = Vec::new();
        for (i, o) in self.file.adjoint_symmetries.iter().enumerate() {
            let body = self.reduce(self.adjoint_body(i)?)?;
            if body.iter().all(|e| e.is_zero()) {
                continue;
            }
            out.push((i, BasisElement { label: o.label.clone(), scale: o.scale.clone(), body }));
        }
        Ok(out)
    }

    fn decompose_adj(&self, target: &[Expr], basis: &[(usize, BasisElement)]) -> Result<Coords, BracketError> {
        let els: Vec<BasisElement> = basis.iter().map(|(_, b)| b.clone()).collect();
        let c = decompose(target, &els)?;
        let mut out = zeros(self.file.adjoint_symmetries.len());
        for ((i, _), x) in basis.iter().zip(c) {
            out[*i] = x;
        }
        Ok(out)
    }

    /// `S_P(Q)` for basis elements, as raw expressions over the bodies.
    pub fn action_expr(&self, kind: ActionKind, p: usize, q: usize) -> Result<Vec<Expr>, StructureError> {
        let pp = self.prepared_symmetry(p)?;
        let qq = self.prepared_adjoint(q)?;
        symmetry_action(kind, &self.sys, &pp, &qq)
    }

    fn compute_action(&self, kind: ActionKind, p: usize, q: usize) -> Result<Coords, BracketError> {
        let po = &self.file.symmetries[p];
        let qo = &self.file.adjoint_symmetries[q];
        let s = &po.scale * &qo.scale;
        if let Some(l) = &self.lift {
            if let Some(coords) = self.lifted_action(l, kind, p, q)? {
                return Ok(scale(&coords, &s));
            }
        }
        let raw = self.action_expr(kind, p, q)?;
        let basis = self.adj_basis()?;
        Ok(scale(&self.decompose_adj(&raw, &basis)?, &s))
    }

    /// Rewrites potential jets into parent jets; `None` if some potential
    /// appears undifferentiated in the lifted direction.
    fn to_parent(l: &Lift, v: &[Expr]) -> Result<Option<Vec<Expr>>, StructureError> {
        let mut out = Vec::new();
        for e in v {
            let mut map = BTreeMap::new();
            for j in e.jets() {
                let hit = l.rules.iter().find_map(|(dep, pj)| {
                    (pj.dep == j.dep).then(|| j.derivs.minus(&pj.derivs).map(|rest| Jet::new(dep, rest))).flatten()
                });
                match hit {
                    Some(nj) => {
                        map.insert(Var::Jet(j.clone()), Expr::var(Var::Jet(nj)));
                    }
                    None => return Ok(None),
                }
            }
            out.push(e.substitute_many(&map).map_err(|x| StructureError::Jet(x.into()))?);
        }
        Ok(Some(out))
    }

    /// Actions on adjoint-symmetries that are local in the parent system are
    /// computed there and decomposed over the parent-local basis.
    fn lifted_action(&self, l: &Lift, kind: ActionKind, p: usize, q: usize) -> Result<Option<Coords>, BracketError> {
        let Some(qpar) = Self::to_parent(l, &self.file.adjoint_symmetries[q].components)? else { return Ok(None) };
        let psym = l.symmetry_map.apply(&self.file.symmetries[p].components).map_err(StructureError::from)?;
        let ppar = Self::to_parent(l, &psym)?
            .ok_or_else(|| BracketError::NotInSpan(format!("{} has no parent form", self.file.symmetries[p].label)))?;
        let par = &l.parent;
        let pl = format!("{}:{}", self.file.symmetries[p].label, "parent");
        let ql = format!("{}:{}", self.file.adjoint_symmetries[q].label, "parent");
        let pp = par.prepared(&pl, &ppar, Side::Symmetry, &pl)?;
        let qq = par.prepared(&ql, &qpar, Side::Adjoint, &ql)?;
        let raw = symmetry_action(kind, &par.sys, &pp, &qq)?;
        let mut basis = Vec::new();
        for (i, o) in self.file.adjoint_symmetries.iter().enumerate() {
            if let Some(b) = Self::to_parent(l, &o.components)? {
                basis.push((i, BasisElement { label: o.label.clone(), scale: ParamScalar::one(), body: par.reduce(b)? }));
            }
        }
        // scales are applied by the caller
        Ok(Some(self.decompose_adj(&raw, &basis)?))
    }

    fn compute_commutator(&self, i: usize, j: usize) -> Result<Coords, BracketError> {
        let a = &self.file.symmetries[i];
        let b = &self.file.symmetries[j];
        let raw = bracket::commutator(&a.components, &b.components, &self.sys.dependents)?;
        let raw = self.reduce(raw)?;
        let c = decompose(&raw, &self.sym_basis()?)?;
        Ok(scale(&c, &(&a.scale * &b.scale)))
    }

    // ---- validation ----

    /// Determining checks for every object.
    pub fn determining_report(&self) -> Vec<CheckReport> {
        let mut out = Vec::new();
        for o in &self.file.symmetries {
            out.push(self.check_one(&o.label, Ok(o.components.clone()), Side::Symmetry));
        }
        for (i, o) in self.file.adjoint_symmetries.iter().enumerate() {
            out.push(self.check_one(&o.label, self.adjoint_body(i), Side::Adjoint));
        }
        out
    }

    fn check_one(&self, label: &str, body: Result<Vec<Expr>, StructureError>, side: Side) -> CheckReport {
        let res = body.and_then(|b| check_determining(&self.sys, label, &b, side, self.file.r_op(label)));
        res.unwrap_or_else(|e| CheckReport {
            subject: label.to_string(),
            pass: false,
            method: structure::Method::Identity,
            residual: vec![e.to_string()],
        })
    }

    /// Computed commutators against the listed ones; unlisted pairs must vanish.
    pub fn commutator_report(&self) -> CommutatorReport {
        let labels = self.file.sym_labels();
        let n = labels.len();
        let mut cells = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut expected = LinComb::new();
                for c in &self.file.commutators {
                    if c.left == labels[i] && c.right == labels[j] {
                        expected = dsl::eval::add_lc(&expected, &c.value);
                    } else if c.left == labels[j] && c.right == labels[i] {
                        expected = dsl::eval::add_lc(&expected, &dsl::eval::scale_lc(&c.value, &ParamScalar::int(-1)));
                    }
                }
                let row = labels[i].clone();
                let col = labels[j].clone();
                cells.push(match self.commutator_coords(i, j) {
                    Ok(c) => {
                        let exp = lincomb_to_coords(&expected, &labels).unwrap_or_else(|_| zeros(n));
                        Cell::new(row, col, Some(render_lincomb(&expected)), render_coords(&c, &labels), c == exp)
                    }
                    Err(e) => Cell::new(row, col, Some(render_lincomb(&expected)), format!("error: {e}"), false),
                });
            }
        }
        let basis: Vec<Coords> = (0..n).map(|i| unit(n, i)).collect();
        let checks = lie_algebra_checks(&basis, |a, b| self.structure_bracket(a, b)).ok();
        let pass = cells.iter().all(|c| c.pass) && checks.as_ref().map_or(false, |c| c.antisymmetric && c.jacobi);
        CommutatorReport {
            cells,
            antisymmetric: checks.as_ref().map_or(false, |c| c.antisymmetric),
            jacobi: checks.as_ref().map_or(false, |c| c.jacobi),
            pass,
        }
    }

    fn structure_bracket(&self, a: &[ParamScalar], b: &[ParamScalar]) -> Result<Coords, BracketError> {
        let n = a.len();
        let mut out = zeros(n);
        for i in (0..n).filter(|&i| !a[i].is_zero()) {
            for j in (0..n).filter(|&j| !b[j].is_zero()) {
                out = add(&out, &scale(&self.commutator_coords(i, j)?, &(&a[i] * &b[j])));
            }
        }
        Ok(out)
    }

    fn validation_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in self.determining_report() {
            if !r.pass {
                out.push(format!("{} fails its determining equation: {}", r.subject, r.residual.join(", ")));
            }
        }
        if out.is_empty() && self.file.has_commutators {
            let rep = self.commutator_report();
            for c in rep.cells.iter().filter(|c| !c.pass) {
                out.push(format!(
                    "[{}, {}] = {} but {} is listed",
                    c.row,
                    c.col,
                    c.computed,
                    c.expected.clone().unwrap_or_default()
                ));
            }
        }
        out
    }

    // ---- tables ----

    /// The full action table of one kind.
    pub fn action_table(&self, kind: ActionKind) -> Result<Vec<Vec<Coords>>, BracketError> {
        let ns = self.file.symmetries.len();
        (0..self.file.adjoint_symmetries.len())
            .map(|q| (0..ns).map(|p| self.action_coords(kind, p, q)).collect())
            .collect()
    }

    pub fn action_table_report(&self, t: &Table) -> ActionTableReport {
        let mut rep = action_report(self, t);
        if !t.sets.is_empty() {
            rep = self.action_table_report_at(t, &t.sets);
        }
        rep
    }

    /// The action table with parameters fixed; checks both the symbolic and
    /// the instantiated values.
    pub fn action_table_report_at(&self, t: &Table, sets: &BTreeMap<Symbol, Rat>) -> ActionTableReport {
        let mut rep = action_report(self, t);
        let inst = Instantiated { inner: self, sets };
        let sub = match t.instantiate(sets) {
            Ok(t2) => action_report(&inst, &t2),
            Err(e) => ActionTableReport { name: t.name.clone(), kind: t.kind, cells: Vec::new(), pass: false, error: Some(e.to_string()), instantiated: None },
        };
        rep.pass = rep.pass && sub.pass;
        rep.instantiated = Some(Box::new(sub));
        rep
    }

    /// An action table of one kind with no golden values, for reporting.
    pub fn computed_action_table(&self, kind: u8) -> ActionTableReport {
        let mut t = self.query_table(format!("action{kind}"), TableType::Action, kind);
        t.q = None;
        let mut rep = action_report(self, &t);
        for c in &mut rep.cells {
            c.expected = None;
            c.pass = !c.computed.starts_with("error");
        }
        rep.pass = rep.cells.iter().all(|c| c.pass);
        rep
    }

    fn query_table(&self, name: String, ty: TableType, kind: u8) -> Table {
        Table {
            name,
            tags: Vec::new(),
            ty,
            kind,
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
            line: 0,
        }
    }

    /// The bracket induced by an arbitrary `q`, with no golden values. A
    /// scaling policy without a named symmetry uses [`Fixture::find_scaling`].
    pub fn bracket_query(
        &self,
        kind: u8,
        q: LinComb,
        policy: Option<&str>,
        scaling: Option<&str>,
        sets: &BTreeMap<Symbol, Rat>,
    ) -> BracketTableReport {
        let mut t = self.query_table("query".into(), TableType::Bracket, kind);
        t.q = Some(q);
        t.policy = policy.map(str::to_string);
        t.scaling = match (policy, scaling) {
            (Some("scaling"), None) => self.find_scaling().map(|i| self.file.sym_labels()[i].clone()),
            (_, s) => s.map(str::to_string),
        };
        t.sets = sets.clone();
        self.bracket_table_report(&t)
    }

    pub fn bracket_table_report(&self, t: &Table) -> BracketTableReport {
        let mut rep = bracket_report(self, t, &self.file);
        if !t.sets.is_empty() {
            let inst = Instantiated { inner: self, sets: &t.sets };
            let sub = match t.instantiate(&t.sets) {
                Ok(t2) => bracket_report(&inst, &t2, &self.file),
                Err(e) => BracketTableReport::failed(t, e.to_string()),
            };
            rep.pass = rep.pass && sub.pass;
            rep.refused |= sub.refused;
            rep.instantiated = Some(Box::new(sub));
        }
        rep
    }

    /// Dual-action analysis for an arbitrary `q` and policy.
    pub fn analyze(&self, kind: ActionKind, q: &LinComb, policy: &Policy) -> Result<DualAnalysis, BracketError> {
        let qc = lincomb_to_coords(q, &self.file.adj_labels())?;
        dual_action_analysis(self, kind, &qc, policy)
    }

    /// The dual-action analysis a bracket table asks for.
    pub fn table_analysis(&self, t: &Table) -> Result<DualAnalysis, FixtureError> {
        analysis_for_table(self, t)
    }

    /// The first symmetry whose adjoint action is diagonal and nonzero.
    pub fn find_scaling(&self) -> Option<usize> {
        let n = self.file.symmetries.len();
        (0..n).find(|&s| {
            let mut nonzero = false;
            for i in 0..n {
                let Ok(c) = self.commutator_coords(i, s) else { return false };
                if c.iter().enumerate().any(|(k, x)| k != i && !x.is_zero()) {
                    return false;
                }
                nonzero |= !c[i].is_zero();
            }
            nonzero
        })
    }

    // ---- multipliers, Noether operators, variational forms ----

    pub fn multiplier_report(&self) -> Vec<MultiplierCheck> {
        let mut out = Vec::new();
        for (i, o) in self.file.adjoint_symmetries.iter().enumerate() {
            let expected = if self.file.multipliers.contains(&o.label) {
                Some(true)
            } else if self.file.nonmultipliers.contains(&o.label) {
                Some(false)
            } else {
                None
            };
            let res = self.adjoint_body(i).and_then(|b| classify_multiplier(&self.sys, &o.label, &b));
            out.push(match res {
                Ok(r) => {
                    let consistent = r.self_adjoint.map_or(true, |s| s == r.multiplier);
                    let pass = consistent && expected.map_or(true, |e| e == r.multiplier);
                    MultiplierCheck { report: r, expected, pass, error: None }
                }
                Err(e) => MultiplierCheck {
                    report: MultiplierReport { subject: o.label.clone(), multiplier: false, self_adjoint: None },
                    expected,
                    pass: false,
                    error: Some(e.to_string()),
                },
            });
        }
        out
    }

    /// `sum c_i s_i Q_i` as one prepared object.
    pub fn combined_adjoint(&self, q: &LinComb) -> Result<Prepared, FixtureError> {
        let mut body: Option<Vec<Expr>> = None;
        let mut parts = Vec::new();
        for (label, c) in q {
            let i = self.adj_index(label)?;
            let p = self.prepared_adjoint(i)?;
            let w = c * &self.file.adjoint_symmetries[i].scale;
            let we = scalar_expr(&w)?;
            let term = scale_exprs(&p.body, &we);
            body = Some(match body {
                None => term,
                Some(b) => b.iter().zip(&term).map(|(x, y)| x + y).collect(),
            });
            parts.push((w, p.r));
        }
        let m = self.sys.dependents.len();
        let big_m = self.sys.equations.len();
        let r = combine_ops(&parts)?.unwrap_or_else(|| TotalDiffOp::zero(m, big_m));
        Ok(Prepared { body: body.unwrap_or_else(|| vec![Expr::zero(); big_m]), r })
    }

    pub fn noether_report(&self) -> Vec<NoetherCheck> {
        self.file
            .noether
            .iter()
            .map(|spec| {
                let res = (|| -> Result<NoetherCheck, FixtureError> {
                    let q = self.combined_adjoint(&spec.q)?;
                    let j = noether_operator(&self.sys, &q)?;
                    let matches = j == spec.op;
                    let skew = self.sys.evolution_var().map(|_| j.adjoint() == j.neg());
                    // J(P) must reproduce Action3 on every symmetry
                    let mut action3 = true;
                    for i in 0..self.file.symmetries.len() {
                        let p = self.prepared_symmetry(i)?;
                        let lhs = self.reduce(j.apply(&p.body).map_err(StructureError::from)?)?;
                        let rhs = symmetry_action(ActionKind::Action3, &self.sys, &p, &q)?;
                        if lhs != self.reduce(rhs)? {
                            action3 = false;
                        }
                    }
                    Ok(NoetherCheck {
                        name: spec.name.clone(),
                        computed: format!("{j}"),
                        expected: format!("{}", spec.op),
                        matches,
                        skew_adjoint: skew,
                        reproduces_action3: action3,
                        pass: matches && action3 && skew.unwrap_or(true),
                        error: None,
                    })
                })();
                res.unwrap_or_else(|e| NoetherCheck {
                    name: spec.name.clone(),
                    computed: String::new(),
                    expected: format!("{}", spec.op),
                    matches: false,
                    skew_adjoint: None,
                    reproduces_action3: false,
                    pass: false,
                    error: Some(e.to_string()),
                })
            })
            .collect()
    }

    pub fn integrand_report(&self) -> Vec<CheckReport> {
        self.file
            .integrands
            .iter()
            .map(|spec| {
                let res = (|| -> Result<CheckReport, FixtureError> {
                    let q = self.combined_adjoint(&spec.q)?;
                    let p1 = placeholders(&spec.first);
                    let p2 = placeholders(&spec.second);
                    let w = symplectic_integrand(&self.sys, &q, &p1, &p2)?;
                    let w_swapped = symplectic_integrand(&self.sys, &q, &p2, &p1)?;
                    let mut rep = structure::check_integrand(&spec.name, &w, &spec.expect);
                    if !(&w + &w_swapped).is_zero() {
                        rep.pass = false;
                        rep.residual.push("integrand is not skew in its arguments".into());
                    }
                    Ok(rep)
                })();
                res.unwrap_or_else(|e| failed_check(&spec.name, e))
            })
            .collect()
    }

    pub fn variational_report(&self) -> Vec<CheckReport> {
        self.file
            .variational
            .iter()
            .map(|spec| {
                let res = match (spec.kind, &spec.lhs) {
                    (VariationalKind::Hamiltonian, Some(lhs)) => {
                        hamiltonian_check(&self.sys, &spec.name, &spec.op, &spec.density, lhs)
                    }
                    _ => lagrangian_check(&self.sys, &spec.name, &spec.op, &spec.density),
                };
                res.unwrap_or_else(|e| failed_check(&spec.name, e.into()))
            })
            .collect()
    }

    pub fn relation_report(&self) -> Vec<CheckReport> {
        self.file
            .relations
            .iter()
            .map(|spec| {
                let res = (|| -> Result<CheckReport, FixtureError> {
                    let parent = load_parent(&spec.parent, self.variant())?;
                    Ok(relation_check(&self.sys, &parent.sys, &spec.name, &spec.combine, &spec.parent_op)?)
                })();
                res.unwrap_or_else(|e| failed_check(&spec.name, e))
            })
            .collect()
    }

    pub fn isomorphism_report(&self) -> Vec<IsomorphismCheck> {
        self.file
            .isomorphisms
            .iter()
            .map(|spec| {
                let res = (|| -> Result<IsoReport, FixtureError> {
                    let t = self
                        .file
                        .tables
                        .iter()
                        .find(|t| t.name == spec.bracket && t.ty == TableType::Bracket)
                        .ok_or_else(|| BracketError::UnknownLabel(spec.bracket.clone()))?;
                    let analysis = analysis_for_table(self, t)?;
                    let syms = self.file.sym_labels();
                    let domain = table_domain(t, &analysis, &self.file)?;
                    let images: Vec<Coords> = match &spec.map {
                        IsoMap::Inverse => domain
                            .iter()
                            .map(|(l, v)| analysis.inverse(v, l))
                            .collect::<Result<_, _>>()?,
                        IsoMap::Explicit(es) => domain
                            .iter()
                            .map(|(l, _)| {
                                let lc = es.iter().find(|(k, _)| k == l).map(|(_, v)| v.clone()).unwrap_or_default();
                                lincomb_to_coords(&lc, &syms)
                            })
                            .collect::<Result<_, _>>()?,
                    };
                    let target: Vec<Coords> =
                        spec.target.iter().map(|l| Ok(unit(syms.len(), self.sym_index(l)?))).collect::<Result<_, BracketError>>()?;
                    Ok(verify_isomorphism(&analysis, &domain, &images, &target, &spec.scale)?)
                })();
                match res {
                    Ok(r) => IsomorphismCheck { name: spec.name.clone(), pass: r.pass(), report: Some(r), error: None },
                    Err(e) => IsomorphismCheck { name: spec.name.clone(), pass: false, report: None, error: Some(e.to_string()) },
                }
            })
            .collect()
    }

    /// Every check the file supports.
    pub fn full_report(&self) -> FullReport {
        let determining = self.determining_report();
        let commutators = self.commutator_report();
        let mut action_tables = Vec::new();
        let mut bracket_tables = Vec::new();
        for t in &self.file.tables {
            match t.ty {
                TableType::Action => action_tables.push(self.action_table_report(t)),
                TableType::Bracket => bracket_tables.push(self.bracket_table_report(t)),
            }
        }
        let multipliers = self.multiplier_report();
        let noether = self.noether_report();
        let integrands = self.integrand_report();
        let variational = self.variational_report();
        let relations = self.relation_report();
        let isomorphisms = self.isomorphism_report();
        let pass = determining.iter().all(|r| r.pass)
            && commutators.pass
            && action_tables.iter().all(|r| r.pass)
            && bracket_tables.iter().all(|r| r.pass)
            && multipliers.iter().all(|r| r.pass)
            && noether.iter().all(|r| r.pass)
            && integrands.iter().all(|r| r.pass)
            && variational.iter().all(|r| r.pass)
            && relations.iter().all(|r| r.pass)
            && isomorphisms.iter().all(|r| r.pass);
        FullReport {
            system: self.file.name.clone(),
            variant: self.variant().map(str::to_string),
            determining,
            commutators,
            action_tables,
            bracket_tables,
            multipliers,
            noether,
            integrands,
            variational,
            relations,
            isomorphisms,
            pass,
        }
    }
}

impl LieModel for Fixture {
    fn sym_labels(&self) -> Vec<String> {
        self.file.sym_labels()
    }

    fn adj_labels(&self) -> Vec<String> {
        self.file.adj_labels()
    }

    fn commutator_coords(&self, i: usize, j: usize) -> Result<Coords, BracketError> {
        if let Some(c) = self.commutators.lock().expect("commutator cache").get(&(i, j)) {
            return Ok(c.clone());
        }
        let c = self.compute_commutator(i, j)?;
        self.commutators.lock().expect("commutator cache").insert((i, j), c.clone());
        Ok(c)
    }

    fn action_coords(&self, kind: ActionKind, p: usize, q: usize) -> Result<Coords, BracketError> {
        let key = (kind_index(kind), p, q);
        if let Some(c) = self.actions.lock().expect("action cache").get(&key) {
            return Ok(c.clone());
        }
        let c = self.compute_action(kind, p, q)?;
        self.actions.lock().expect("action cache").insert(key, c.clone());
        Ok(c)
    }
}

fn lift_err(name: &str, msg: &str) -> FixtureError {
    FixtureError::ValidationFailure { name: name.to_string(), details: vec![msg.to_string()] }
}

/// A parent system in the same variant when it has one.
fn load_parent(name: &str, variant: Option<&str>) -> Result<Arc<Fixture>, FixtureError> {
    let text = fixture_source(name)?;
    let raw = dsl::parse_system(&text).map_err(|e| parse_err(name, e))?;
    let v = variant.filter(|v| raw.variant(v).is_some());
    load_fixture_variant(name, v)
}

fn failed_check(subject: &str, e: FixtureError) -> CheckReport {
    CheckReport { subject: subject.to_string(), pass: false, method: structure::Method::Identity, residual: vec![e.to_string()] }
}

fn action_report(model: &dyn LieModel, t: &Table) -> ActionTableReport {
    let syms = model.sym_labels();
    let adjs = model.adj_labels();
    let kind = ActionKind::from_index(t.kind).expect("kind checked by the parser");
    let rows: Vec<String> = t.rows.clone().unwrap_or_else(|| adjs.clone());
    let index = |labels: &[String], l: &str| {
        labels.iter().position(|x| x == l).ok_or_else(|| BracketError::UnknownLabel(l.to_string()))
    };
    let mut cells = Vec::new();
    for q in &rows {
        for p in &syms {
            let expected: LinComb = t
                .actions
                .iter()
                .filter(|a| a.p == *p && a.q == *q)
                .fold(LinComb::new(), |acc, a| dsl::eval::add_lc(&acc, &a.value));
            let cell = index(&syms, p).and_then(|pi| model.action_coords(kind, pi, index(&adjs, q)?));
            cells.push(match cell {
                Ok(c) => {
                    let exp = lincomb_to_coords(&expected, &adjs).ok();
                    Cell::new(q.clone(), p.clone(), Some(render_lincomb(&expected)), render_coords(&c, &adjs), exp == Some(c))
                }
                Err(e) => Cell::new(q.clone(), p.clone(), Some(render_lincomb(&expected)), format!("error: {e}"), false),
            });
        }
    }
    let pass = cells.iter().all(|c| c.pass);
    ActionTableReport { name: t.name.clone(), kind: t.kind, cells, pass, error: None, instantiated: None }
}

pub fn render_coords(c: &[ParamScalar], labels: &[String]) -> String {
    render_lincomb(&coords_to_lincomb(c, labels))
}

// ---- bracket tables ----

fn table_policy(t: &Table, file: &SystemFile) -> Result<Option<Policy>, BracketError> {
    match t.policy.as_deref() {
        None | Some("ideal") => Ok(Some(Policy::Ideal)),
        Some("none") => Ok(None),
        Some("scaling") => {
            let s = t.scaling.as_ref().ok_or_else(|| BracketError::NoScalingSymmetry("(none designated)".into()))?;
            let i = file.sym_labels().iter().position(|l| l == s).ok_or_else(|| BracketError::UnknownLabel(s.clone()))?;
            Ok(Some(Policy::Scaling(i)))
        }
        Some(other) => Err(BracketError::UnknownLabel(format!("policy {other}"))),
    }
}

fn analysis_for_table(model: &dyn LieModel, t: &Table) -> Result<DualAnalysis, FixtureError> {
    let file_policy = match t.policy.as_deref() {
        Some("scaling") => {
            let s = t.scaling.clone().unwrap_or_default();
            let i = model.sym_labels().iter().position(|l| *l == s).ok_or(BracketError::NoScalingSymmetry(s))?;
            Policy::Scaling(i)
        }
        _ => Policy::Ideal,
    };
    let kind = ActionKind::from_index(t.kind).expect("kind checked by the parser");
    let q = lincomb_to_coords(t.q.as_ref().expect("bracket tables carry q"), &model.adj_labels())?;
    Ok(dual_action_analysis(model, kind, &q, &file_policy)?)
}

/// The domain of a bracket table: the `domain` key, else the table's named
/// combinations, else the adjoint-symmetries in the range.
fn table_domain(t: &Table, analysis: &DualAnalysis, file: &SystemFile) -> Result<Vec<(String, Coords)>, BracketError> {
    let adjs = file.adj_labels();
    let named = |n: &String| -> Result<(String, Coords), BracketError> {
        let lc = t.expand(&LinComb::from([(n.clone(), ParamScalar::one())]));
        Ok((n.clone(), lincomb_to_coords(&lc, &adjs)?))
    };
    if let Some(d) = &t.domain {
        return d.iter().map(named).collect();
    }
    if !t.basis.is_empty() {
        return t.basis.iter().map(|(n, _)| named(n)).collect();
    }
    let mut out = Vec::new();
    for (i, l) in adjs.iter().enumerate() {
        let v = unit(adjs.len(), i);
        if analysis.inverse(&v, l).is_ok() {
            out.push((l.clone(), v));
        }
    }
    Ok(out)
}

fn is_refusal(e: &BracketError) -> bool {
    matches!(e, BracketError::IllDefinedBracket(_) | BracketError::NoScalingSymmetry(_))
}

fn same_span(a: &[Coords], b: &[Coords]) -> bool {
    let ra = if a.is_empty() { 0 } else { rank(&a.to_vec()) };
    let rb = if b.is_empty() { 0 } else { rank(&b.to_vec()) };
    let both: Vec<Coords> = a.iter().chain(b).cloned().collect();
    let rab = if both.is_empty() { 0 } else { rank(&both) };
    ra == rb && rab == ra
}

fn in_span(vs: &[Coords], v: &[ParamScalar]) -> bool {
    if vs.is_empty() {
        return is_zero(v);
    }
    coords_in(vs, v).is_some()
}

fn bracket_report(model: &dyn LieModel, t: &Table, file: &SystemFile) -> BracketTableReport {
    let mut rep = BracketTableReport::failed(t, String::new());
    rep.error = None;
    let syms = model.sym_labels();
    let adjs = model.adj_labels();
    let kind = ActionKind::from_index(t.kind).expect("kind checked by the parser");
    let q = match lincomb_to_coords(t.q.as_ref().expect("bracket tables carry q"), &adjs) {
        Ok(q) => q,
        Err(e) => return BracketTableReport::failed(t, e.to_string()),
    };
    let ka = match kernel_analysis(model, kind, &q) {
        Ok(k) => k,
        Err(e) => return BracketTableReport::failed(t, e.to_string()),
    };
    rep.kernel_computed = ka.kernel.iter().map(|k| render_coords(k, &syms)).collect();
    rep.ideal_computed = ka.kernel_is_ideal;
    let mut pass = true;
    if let Some(k) = &t.kernel {
        rep.kernel_expected = Some(k.iter().map(render_lincomb).collect());
        let expected: Result<Vec<Coords>, _> = k.iter().map(|c| lincomb_to_coords(c, &syms)).collect();
        rep.kernel_pass = expected.map(|e| same_span(&e, &ka.kernel)).unwrap_or(false);
        pass &= rep.kernel_pass;
    }
    if let Some(i) = t.ideal {
        pass &= i == ka.kernel_is_ideal;
    }
    let policy = match table_policy(t, file) {
        Ok(p) => p,
        Err(e) => {
            rep.refused = is_refusal(&e);
            rep.error = Some(e.to_string());
            rep.pass = false;
            return rep;
        }
    };
    let Some(policy) = policy else {
        rep.pass = pass && t.brackets.is_empty() && t.inverses.is_empty();
        return rep;
    };
    rep.policy = match policy {
        Policy::Ideal => "ideal".into(),
        Policy::Scaling(s) => format!("scaling({})", syms[s]),
    };
    let analysis = match dual_action_analysis(model, kind, &q, &policy) {
        Ok(a) => a,
        Err(e) => {
            rep.refused = is_refusal(&e);
            rep.error = Some(e.to_string());
            rep.pass = false;
            return rep;
        }
    };
    let names_lc = |lc: &LinComb| lincomb_to_coords(&t.expand(lc), &adjs);
    for inv in &t.inverses {
        let label = render_lincomb(&inv.q);
        let cell = (|| -> Result<(Coords, bool), BracketError> {
            let target = names_lc(&inv.q)?;
            let got = analysis.inverse(&target, &label)?;
            let want = lincomb_to_coords(&inv.p, &syms)?;
            let diff = add(&got, &scale(&want, &ParamScalar::int(-1)));
            let roundtrip = analysis.apply(&want) == target;
            Ok((got, in_span(&analysis.kernel, &diff) && roundtrip))
        })();
        rep.inverses.push(match cell {
            Ok((got, ok)) => Cell::new(label, "inverse".into(), Some(render_lincomb(&inv.p)), render_coords(&got, &syms), ok),
            Err(e) => Cell::new(label, "inverse".into(), Some(render_lincomb(&inv.p)), format!("error: {e}"), false),
        });
    }
    pass &= rep.inverses.iter().all(|c| c.pass);
    let domain = match table_domain(t, &analysis, file) {
        Ok(d) => d,
        Err(e) => {
            rep.error = Some(e.to_string());
            rep.pass = false;
            return rep;
        }
    };
    rep.domain = domain.iter().map(|(l, _)| l.clone()).collect();
    rep.asserted = !t.brackets.is_empty();
    let mut listed: Vec<(Coords, Coords, LinComb, bool)> = Vec::new();
    for b in &t.brackets {
        match (names_lc(&b.left), names_lc(&b.right)) {
            (Ok(l), Ok(r)) => listed.push((l, r, b.value.clone(), false)),
            _ => pass = false,
        }
    }
    let dom: Vec<Coords> = domain.iter().map(|(_, v)| v.clone()).collect();
    let dom_names: Vec<String> = domain.iter().map(|(n, _)| n.clone()).collect();
    // values inside the domain are shown in the domain's own names
    let show = |v: &Coords| match coords_in(&dom, v) {
        Some(x) if !dom.is_empty() => render_coords(&x, &dom_names),
        _ => render_coords(v, &adjs),
    };
    let refused = std::cell::Cell::new(false);
    let cell_for = |ln: String, rn: String, l: &Coords, r: &Coords, expected: Option<LinComb>| {
        let exp_coords = expected.as_ref().map(names_lc);
        match analysis.bracket(l, r) {
            Ok(v) => {
                let ok = match &exp_coords {
                    Some(Ok(e)) => *e == v,
                    Some(Err(_)) => false,
                    None => true,
                };
                Cell::new(ln, rn, expected.as_ref().map(render_lincomb), show(&v), ok)
            }
            Err(e) => {
                refused.set(refused.get() || is_refusal(&e));
                Cell::new(ln, rn, expected.as_ref().map(render_lincomb), format!("error: {e}"), false)
            }
        }
    };
    for i in 0..domain.len() {
        for j in i + 1..domain.len() {
            let (ln, l) = &domain[i];
            let (rn, r) = &domain[j];
            let mut expected = if rep.asserted { Some(LinComb::new()) } else { None };
            for entry in listed.iter_mut() {
                if entry.0 == *l && entry.1 == *r {
                    expected = Some(entry.2.clone());
                    entry.3 = true;
                } else if entry.0 == *r && entry.1 == *l {
                    expected = Some(dsl::eval::scale_lc(&entry.2, &ParamScalar::int(-1)));
                    entry.3 = true;
                }
            }
            rep.entries.push(cell_for(ln.clone(), rn.clone(), l, r, expected));
        }
    }
    for (l, r, v, used) in &listed {
        if !used {
            rep.entries.push(cell_for(render_coords(l, &adjs), render_coords(r, &adjs), l, r, Some(v.clone())));
        }
    }
    pass &= rep.entries.iter().all(|c| c.pass);
    rep.refused |= refused.get();
    match lie_algebra_checks(&dom, |a, b| analysis.bracket(a, b)) {
        Ok(c) => {
            rep.antisymmetric = Some(c.antisymmetric);
            rep.jacobi = Some(c.jacobi);
            pass &= c.antisymmetric && c.jacobi;
        }
        Err(e) => {
            rep.error = Some(e.to_string());
            pass = false;
        }
    }
    rep.pass = pass;
    rep
}

// ---- report types ----

/// One compared cell; `expected` is absent for report-only values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub row: String,
    pub col: String,
    pub expected: Option<String>,
    pub computed: String,
    pub pass: bool,
}

impl Cell {
    fn new(row: String, col: String, expected: Option<String>, computed: String, pass: bool) -> Self {
        Cell { row, col, expected, computed, pass }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutatorReport {
    pub cells: Vec<Cell>,
    pub antisymmetric: bool,
    pub jacobi: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionTableReport {
    pub name: String,
    pub kind: u8,
    pub cells: Vec<Cell>,
    pub instantiated: Option<Box<ActionTableReport>>,
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BracketTableReport {
    pub name: String,
    pub kind: u8,
    pub q: String,
    pub policy: String,
    pub kernel_expected: Option<Vec<String>>,
    pub kernel_computed: Vec<String>,
    pub kernel_pass: bool,
    pub ideal_expected: Option<bool>,
    pub ideal_computed: bool,
    pub inverses: Vec<Cell>,
    pub domain: Vec<String>,
    /// False when the table lists no values; entries are then only reported.
    pub asserted: bool,
    pub entries: Vec<Cell>,
    pub antisymmetric: Option<bool>,
    pub jacobi: Option<bool>,
    pub instantiated: Option<Box<BracketTableReport>>,
    pub error: Option<String>,
    /// The bracket could not be formed for this `q` and policy.
    pub refused: bool,
    pub pass: bool,
}

impl BracketTableReport {
    fn failed(t: &Table, error: String) -> Self {
        BracketTableReport {
            name: t.name.clone(),
            kind: t.kind,
            q: t.q.as_ref().map(render_lincomb).unwrap_or_default(),
            policy: t.policy.clone().unwrap_or_else(|| "ideal".into()),
            kernel_expected: None,
            kernel_computed: Vec::new(),
            kernel_pass: true,
            ideal_expected: t.ideal,
            ideal_computed: false,
            inverses: Vec::new(),
            domain: Vec::new(),
            asserted: false,
            entries: Vec::new(),
            antisymmetric: None,
            jacobi: None,
            instantiated: None,
            error: Some(error),
            refused: false,
            pass: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierCheck {
    #[serde(flatten)]
    pub report: MultiplierReport,
    pub expected: Option<bool>,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoetherCheck {
    pub name: String,
    pub computed: String,
    pub expected: String,
    pub matches: bool,
    pub skew_adjoint: Option<bool>,
    pub reproduces_action3: bool,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsomorphismCheck {
    pub name: String,
    pub report: Option<IsoReport>,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FullReport {
    pub system: String,
    pub variant: Option<String>,
    pub determining: Vec<CheckReport>,
    pub commutators: CommutatorReport,
    pub action_tables: Vec<ActionTableReport>,
    pub bracket_tables: Vec<BracketTableReport>,
    pub multipliers: Vec<MultiplierCheck>,
    pub noether: Vec<NoetherCheck>,
    pub integrands: Vec<CheckReport>,
    pub variational: Vec<CheckReport>,
    pub relations: Vec<CheckReport>,
    pub isomorphisms: Vec<IsomorphismCheck>,
    pub pass: bool,
}
