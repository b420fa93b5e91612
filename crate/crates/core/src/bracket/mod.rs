//! Commutators, coordinates over a basis, the dual action of an
//! adjoint-symmetry and the bracket it induces.
//!
//! Everything past [`decompose`] works on coordinate vectors over
//! [`ParamScalar`]. A [`LieModel`] supplies the two kinds of structure
//! constants; the analysis here is independent of how they were computed.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::dsl::LinComb;
use crate::jetcalc::{frechet, JetError};
use crate::params::linalg::{mat_vec, nullspace, rank, rref, solve, Matrix};
use crate::params::ParamScalar;
use crate::structure::{ActionKind, StructureError};
use crate::symexpr::{Expr, Monomial, Rat, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BracketError {
    #[error("`{0}` is not in the span of the basis")]
    NotInSpan(String),
    #[error("basis elements are linearly dependent")]
    DependentBasis,
    #[error("`{0}` is not in the range of the dual action")]
    NotInRange(String),
    #[error("bracket is not well defined: {0}")]
    IllDefinedBracket(String),
    #[error("`{0}` does not act diagonally on the symmetry basis")]
    NoScalingSymmetry(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("parameter values hit a pole in `{0}`")]
    Pole(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

pub type Coords = Vec<ParamScalar>;

/// `[P1, P2] = P2'(P1) - P1'(P2)`.
pub fn commutator(p1: &[Expr], p2: &[Expr], deps: &[Symbol]) -> Result<Vec<Expr>, JetError> {
    let a = frechet(p2, p1, deps)?;
    let b = frechet(p1, p2, deps)?;
    Ok(a.into_iter().zip(b).map(|(x, y)| x - y).collect())
}

/// `scale * body`, the scale kept outside the expression.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisElement {
    pub label: String,
    pub scale: ParamScalar,
    pub body: Vec<Expr>,
}

type Key = (usize, Monomial);

fn split(v: &[Expr]) -> BTreeMap<Key, ParamScalar> {
    let mut out: BTreeMap<Key, ParamScalar> = BTreeMap::new();
    for (i, e) in v.iter().enumerate() {
        for (m, c) in e.terms() {
            let (pm, rest) = m.split_params();
            let coeff = ParamScalar::from_expr(&Expr::term(c.clone(), pm)).expect("integer parameter powers");
            let slot = out.entry((i, rest)).or_insert_with(ParamScalar::zero);
            *slot = &*slot + &coeff;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Coordinates of `target` over `basis`, treating parameters as scalars.
pub fn decompose(target: &[Expr], basis: &[BasisElement]) -> Result<Coords, BracketError> {
    let cols: Vec<BTreeMap<Key, ParamScalar>> = basis.iter().map(|b| split(&b.body)).collect();
    let tgt = split(target);
    let mut keys: Vec<&Key> = cols.iter().flat_map(|c| c.keys()).chain(tgt.keys()).collect();
    keys.sort();
    keys.dedup();
    let n = basis.len();
    let m: Matrix = keys
        .iter()
        .map(|k| (0..n).map(|j| cols[j].get(*k).map_or_else(ParamScalar::zero, |c| c * &basis[j].scale)).collect())
        .collect();
    if rank(&m) < n {
        return Err(BracketError::DependentBasis);
    }
    let b: Vec<ParamScalar> = keys.iter().map(|k| tgt.get(*k).cloned().unwrap_or_else(ParamScalar::zero)).collect();
    solve(&m, &b, n).ok_or_else(|| BracketError::NotInSpan(render_vec(target)))
}

fn render_vec(v: &[Expr]) -> String {
    format!("({})", v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "))
}

/// Structure constants for a symmetry algebra acting on adjoint-symmetries.
pub trait LieModel {
    fn sym_labels(&self) -> Vec<String>;
    fn adj_labels(&self) -> Vec<String>;
    /// Coordinates of `[P_i, P_j]` over the symmetry basis.
    fn commutator_coords(&self, i: usize, j: usize) -> Result<Coords, BracketError>;
    /// Coordinates of `S_{P_p}(Q_q)` over the adjoint-symmetry basis.
    fn action_coords(&self, kind: ActionKind, p: usize, q: usize) -> Result<Coords, BracketError>;
}

pub fn zeros(n: usize) -> Coords {
    vec![ParamScalar::zero(); n]
}

pub fn unit(n: usize, i: usize) -> Coords {
    let mut v = zeros(n);
    v[i] = ParamScalar::one();
    v
}

pub fn add(a: &[ParamScalar], b: &[ParamScalar]) -> Coords {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[ParamScalar], s: &ParamScalar) -> Coords {
    a.iter().map(|x| x * s).collect()
}

pub fn is_zero(a: &[ParamScalar]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn lincomb_to_coords(lc: &LinComb, labels: &[String]) -> Result<Coords, BracketError> {
    let mut v = zeros(labels.len());
    for (k, c) in lc {
        let i = labels.iter().position(|l| l == k).ok_or_else(|| BracketError::UnknownLabel(k.clone()))?;
        v[i] = &v[i] + c;
    }
    Ok(v)
}

pub fn coords_to_lincomb(v: &[ParamScalar], labels: &[String]) -> LinComb {
    labels.iter().zip(v).filter(|(_, c)| !c.is_zero()).map(|(l, c)| (l.clone(), c.clone())).collect()
}

/// Renders `c1*A + c2*B`, or `0`.
pub fn render_lincomb(lc: &LinComb) -> String {
    if lc.is_empty() {
        return "0".into();
    }
    lc.iter()
        .map(|(k, c)| if *c == ParamScalar::one() { k.clone() } else { format!("({c})*{k}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Solves `sum_k x_k vs[k] = target`; `None` when not in the span.
pub fn coords_in(vs: &[Coords], target: &[ParamScalar]) -> Option<Coords> {
    let rows = target.len();
    let m: Matrix = (0..rows).map(|r| vs.iter().map(|v| v[r].clone()).collect()).collect();
    solve(&m, target, vs.len())
}

/// Symmetry-algebra structure constants `c[i][j] = [P_i, P_j]`.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    pub c: Vec<Vec<Coords>>,
}

impl StructureConstants {
    pub fn from_model(model: &dyn LieModel) -> Result<Self, BracketError> {
        let n = model.sym_labels().len();
        let mut c = vec![vec![zeros(n); n]; n];
        for i in 0..n {
            for j in 0..n {
                c[i][j] = model.commutator_coords(i, j)?;
            }
        }
        Ok(StructureConstants { c })
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn bracket(&self, a: &[ParamScalar], b: &[ParamScalar]) -> Coords {
        let n = self.dim();
        let mut out = zeros(n);
        for i in (0..n).filter(|&i| !a[i].is_zero()) {
            for j in (0..n).filter(|&j| !b[j].is_zero()) {
                out = add(&out, &scale(&self.c[i][j], &(&a[i] * &b[j])));
            }
        }
        out
    }
}

/// Antisymmetry and the Jacobi identity for a bilinear bracket on `basis`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LieCheck {
    pub antisymmetric: bool,
    pub jacobi: bool,
}

pub fn lie_algebra_checks<F>(basis: &[Coords], br: F) -> Result<LieCheck, BracketError>
where
    F: Fn(&[ParamScalar], &[ParamScalar]) -> Result<Coords, BracketError>,
{
    let n = basis.len();
    let mut antisymmetric = true;
    for i in 0..n {
        for j in i..n {
            if !is_zero(&add(&br(&basis[i], &basis[j])?, &br(&basis[j], &basis[i])?)) {
                antisymmetric = false;
            }
        }
    }
    let mut jacobi = true;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (&basis[i], &basis[j], &basis[k]);
                let s1 = br(&br(a, b)?, c)?;
                let s2 = br(&br(b, c)?, a)?;
                let s3 = br(&br(c, a)?, b)?;
                if !is_zero(&add(&add(&s1, &s2), &s3)) {
                    jacobi = false;
                }
            }
        }
    }
    Ok(LieCheck { antisymmetric, jacobi })
}

/// The matrix of `P -> S_P(Q)` with `Q = sum q_i Q_i`: column `j` holds
/// the adjoint-basis coordinates of `S_{P_j}(Q)`.
pub fn action_matrix(model: &dyn LieModel, kind: ActionKind, q: &[ParamScalar]) -> Result<Matrix, BracketError> {
    let na = model.adj_labels().len();
    let ns = model.sym_labels().len();
    let mut m = vec![vec![ParamScalar::zero(); ns]; na];
    for (i, qi) in q.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        for j in 0..ns {
            let cell = model.action_coords(kind, j, i)?;
            for k in 0..na {
                m[k][j] = &m[k][j] + &(qi * &cell[k]);
            }
        }
    }
    Ok(m)
}

/// How a complement of the kernel is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Policy {
    /// The kernel must be an ideal; any complement works.
    Ideal,
    /// Use eigenspaces of `ad(P_s)`, `[P_i, P_s] = w_i P_i`.
    Scaling(usize),
}

/// The dual action `S_Q` with its kernel and a chosen complement.
#[derive(Clone, Debug)]
pub struct DualAnalysis {
    pub kind: ActionKind,
    pub q: Coords,
    pub matrix: Matrix,
    pub kernel: Vec<Coords>,
    pub kernel_is_ideal: bool,
    pub complement: Vec<Coords>,
    pub weights: Option<Vec<ParamScalar>>,
    pub consts: StructureConstants,
}

fn spans(vs: &[Coords], v: &[ParamScalar]) -> bool {
    if vs.is_empty() {
        return is_zero(v);
    }
    coords_in(vs, v).is_some()
}

/// Columns left free by the row echelon form of `vs`.
fn coordinate_complement(vs: &[Coords], n: usize) -> Vec<Coords> {
    let (_, pivots) = rref(&vs.to_vec());
    (0..n).filter(|c| !pivots.contains(c)).map(|c| unit(n, c)).collect()
}

/// The kernel of `S_Q` and whether it is an ideal, without choosing a
/// complement.
#[derive(Clone, Debug)]
pub struct KernelAnalysis {
    pub matrix: Matrix,
    pub kernel: Vec<Coords>,
    pub kernel_is_ideal: bool,
    pub consts: StructureConstants,
}

pub fn kernel_analysis(model: &dyn LieModel, kind: ActionKind, q: &[ParamScalar]) -> Result<KernelAnalysis, BracketError> {
    let consts = StructureConstants::from_model(model)?;
    let n = consts.dim();
    let matrix = action_matrix(model, kind, q)?;
    let kernel = nullspace(&matrix, n);
    let kernel_is_ideal = kernel.iter().all(|k| (0..n).all(|j| spans(&kernel, &consts.bracket(k, &unit(n, j)))));
    Ok(KernelAnalysis { matrix, kernel, kernel_is_ideal, consts })
}

pub fn dual_action_analysis(
    model: &dyn LieModel,
    kind: ActionKind,
    q: &[ParamScalar],
    policy: &Policy,
) -> Result<DualAnalysis, BracketError> {
    let KernelAnalysis { matrix, kernel, kernel_is_ideal, consts } = kernel_analysis(model, kind, q)?;
    let n = consts.dim();
    let labels = model.sym_labels();
    let (complement, weights) = match policy {
        Policy::Ideal => {
            if !kernel_is_ideal {
                return Err(BracketError::IllDefinedBracket("the kernel of the dual action is not an ideal".into()));
            }
            (coordinate_complement(&kernel, n), None)
        }
        Policy::Scaling(s) => {
            let mut w = Vec::with_capacity(n);
            for i in 0..n {
                let c = &consts.c[i][*s];
                if c.iter().enumerate().any(|(k, x)| k != i && !x.is_zero()) {
                    return Err(BracketError::NoScalingSymmetry(labels[*s].clone()));
                }
                w.push(c[i].clone());
            }
            let mut kernel_weights: Vec<ParamScalar> = Vec::new();
            for k in &kernel {
                let mut by_weight: Vec<(ParamScalar, Coords)> = Vec::new();
                for (i, x) in k.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                    match by_weight.iter_mut().find(|(wt, _)| *wt == w[i]) {
                        Some((_, v)) => v[i] = x.clone(),
                        None => {
                            let mut v = zeros(n);
                            v[i] = x.clone();
                            by_weight.push((w[i].clone(), v));
                        }
                    }
                }
                for (wt, piece) in by_weight {
                    if !is_zero(&mat_vec(&matrix, &piece)) {
                        return Err(BracketError::IllDefinedBracket(
                            "kernel is not a sum of weight spaces of the scaling symmetry".into(),
                        ));
                    }
                    if !kernel_weights.contains(&wt) {
                        kernel_weights.push(wt);
                    }
                }
            }
            let comp: Vec<Coords> = (0..n).filter(|&i| !kernel_weights.contains(&w[i])).map(|i| unit(n, i)).collect();
            if comp.len() + kernel.len() != n {
                return Err(BracketError::IllDefinedBracket(
                    "weight spaces meeting the kernel are larger than the kernel".into(),
                ));
            }
            (comp, Some(w))
        }
    };
    Ok(DualAnalysis { kind, q: q.to_vec(), matrix, kernel, kernel_is_ideal, complement, weights, consts })
}

impl DualAnalysis {
    /// `S_Q` applied to symmetry coordinates.
    pub fn apply(&self, p: &[ParamScalar]) -> Coords {
        mat_vec(&self.matrix, p)
    }

    fn inverse_with(&self, comp: &[Coords], target: &[ParamScalar], label: &str) -> Result<Coords, BracketError> {
        let images: Vec<Coords> = comp.iter().map(|c| self.apply(c)).collect();
        let x = if images.is_empty() {
            if is_zero(target) {
                Vec::new()
            } else {
                return Err(BracketError::NotInRange(label.to_string()));
            }
        } else {
            coords_in(&images, target).ok_or_else(|| BracketError::NotInRange(label.to_string()))?
        };
        let n = self.consts.dim();
        Ok(comp.iter().zip(&x).fold(zeros(n), |acc, (c, xi)| add(&acc, &scale(c, xi))))
    }

    /// The preimage of `target` inside the complement.
    pub fn inverse(&self, target: &[ParamScalar], label: &str) -> Result<Coords, BracketError> {
        self.inverse_with(&self.complement, target, label)
    }

    fn bracket_with(&self, comp: &[Coords], a: &[ParamScalar], b: &[ParamScalar]) -> Result<Coords, BracketError> {
        let pa = self.inverse_with(comp, a, "left argument")?;
        let pb = self.inverse_with(comp, b, "right argument")?;
        Ok(self.apply(&self.consts.bracket(&pa, &pb)))
    }

    /// `S_Q([S_Q^{-1} a, S_Q^{-1} b])`. Under the ideal policy the value is
    /// recomputed with a shifted complement and must not change.
    pub fn bracket(&self, a: &[ParamScalar], b: &[ParamScalar]) -> Result<Coords, BracketError> {
        let v = self.bracket_with(&self.complement, a, b)?;
        if self.weights.is_none() {
            if let Some(k0) = self.kernel.first() {
                let shifted: Vec<Coords> = self.complement.iter().map(|c| add(c, k0)).collect();
                if self.bracket_with(&shifted, a, b)? != v {
                    return Err(BracketError::IllDefinedBracket("value depends on the choice of complement".into()));
                }
            }
        }
        Ok(v)
    }

    /// A basis of the range of `S_Q`, as adjoint coordinates.
    pub fn range_basis(&self) -> Vec<Coords> {
        self.complement.iter().map(|c| self.apply(c)).collect()
    }
}

/// Outcome of comparing a bracket algebra with a symmetry subalgebra.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoReport {
    pub homomorphism: bool,
    pub injective: bool,
    pub onto: bool,
    pub failures: Vec<String>,
}

impl IsoReport {
    pub fn pass(&self) -> bool {
        self.homomorphism && self.injective && self.onto
    }
}

/// Checks `phi([d_i, d_j]) = scale * [phi d_i, phi d_j]` on a domain basis,
/// with `phi` injective and onto `span(target)`.
pub fn verify_isomorphism(
    analysis: &DualAnalysis,
    domain: &[(String, Coords)],
    images: &[Coords],
    target: &[Coords],
    scale_factor: &ParamScalar,
) -> Result<IsoReport, BracketError> {
    let mut failures = Vec::new();
    let dom: Vec<Coords> = domain.iter().map(|(_, v)| v.clone()).collect();
    let n = analysis.consts.dim();
    for i in 0..domain.len() {
        for j in i + 1..domain.len() {
            let br = analysis.bracket(&dom[i], &dom[j])?;
            let lhs = match coords_in(&dom, &br) {
                Some(x) => x.iter().zip(images).fold(zeros(n), |acc, (c, im)| add(&acc, &scale(im, c))),
                None => {
                    failures.push(format!("[{}, {}] leaves the domain", domain[i].0, domain[j].0));
                    continue;
                }
            };
            let rhs = scale(&analysis.consts.bracket(&images[i], &images[j]), scale_factor);
            if lhs != rhs {
                failures.push(format!("[{}, {}]", domain[i].0, domain[j].0));
            }
        }
    }
    let r_img = rank(&images.to_vec());
    let injective = r_img == domain.len();
    let r_tgt = rank(&target.to_vec());
    let both: Vec<Coords> = images.iter().chain(target).cloned().collect();
    let onto = r_img == r_tgt && rank(&both) == r_tgt;
    Ok(IsoReport { homomorphism: failures.is_empty(), injective, onto, failures })
}

/// A model with some parameters fixed to rational values.
pub struct Instantiated<'a> {
    pub inner: &'a dyn LieModel,
    pub sets: &'a BTreeMap<Symbol, Rat>,
}

impl Instantiated<'_> {
    fn inst(&self, v: Coords) -> Result<Coords, BracketError> {
        v.iter().map(|c| c.partial_eval(self.sets).ok_or_else(|| BracketError::Pole(c.to_string()))).collect()
    }
}

impl LieModel for Instantiated<'_> {
    fn sym_labels(&self) -> Vec<String> {
        self.inner.sym_labels()
    }
    fn adj_labels(&self) -> Vec<String> {
        self.inner.adj_labels()
    }
    fn commutator_coords(&self, i: usize, j: usize) -> Result<Coords, BracketError> {
        self.inst(self.inner.commutator_coords(i, j)?)
    }
    fn action_coords(&self, kind: ActionKind, p: usize, q: usize) -> Result<Coords, BracketError> {
        self.inst(self.inner.action_coords(kind, p, q)?)
    }
}
