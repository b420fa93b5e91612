use super::*;
use crate::jetcalc::{is_total_divergence, SolvedForm};
use crate::symexpr::{Exponent, Jet};
use proptest::prelude::*;

fn s(n: &str) -> Symbol {
    Symbol::new(n)
}

fn j(dep: &str, d: &[&str]) -> Expr {
    Expr::jet(dep, d)
}

fn d(vars: &[&str]) -> ScalarOp {
    ScalarOp::derivative(MultiIndex::new(vars.iter().map(|v| s(v)).collect()))
}

fn heat_pair() -> PDESystem {
    // u_t = u_xx + v, v_t = v_xx
    let ru = j("u", &["x", "x"]) + j("v", &[]);
    let rv = j("v", &["x", "x"]);
    PDESystem {
        name: "pair".into(),
        independents: vec![s("t"), s("x")],
        dependents: vec![s("u"), s("v")],
        parameters: vec![],
        equations: vec![j("u", &["t"]) - ru.clone(), j("v", &["t"]) - rv.clone()],
        solved: Some(SolvedForm {
            rules: vec![
                (Jet::new(&s("u"), MultiIndex::single(&s("t"))), ru),
                (Jet::new(&s("v"), MultiIndex::single(&s("t"))), rv),
            ],
        }),
    }
}

#[test]
fn identity_and_matrix_application() {
    let v = vec![j("u", &[]), j("v", &[])];
    assert_eq!(TotalDiffOp::identity(2).apply(&v).unwrap(), v);
    let jop = TotalDiffOp::from_rows(vec![
        vec![ScalarOp::zero(), ScalarOp::mul_by(Expr::int(-1))],
        vec![ScalarOp::identity(), ScalarOp::zero()],
    ])
    .unwrap();
    assert_eq!(jop.apply(&[j("a", &[]), j("b", &[])]).unwrap(), vec![-j("b", &[]), j("a", &[])]);
    assert_eq!(jop.to_string(), "[[0, -1], [1, 0]]");
    let dt = TotalDiffOp::diag(vec![d(&["t"]), d(&["t"])]);
    assert_eq!(dt.apply(&[j("u", &[]), x2()]).unwrap(), vec![j("u", &["t"]), Expr::zero()]);
    assert!(matches!(dt.apply(&[j("u", &[])]), Err(LinopError::ShapeMismatch { .. })));
}

fn x2() -> Expr {
    Expr::indep("x").pow_u32(2)
}

#[test]
fn adjoint_of_coefficient_times_derivative() {
    let a = j("u", &[]);
    let op = ScalarOp::term(a.clone(), MultiIndex::single(&s("x")));
    let w = j("w", &[]);
    let adj = op.adjoint().apply(&w);
    assert_eq!(adj, -crate::jetcalc::total_derivative(&(a * w), &s("x")));
}

#[test]
fn adjoint_of_scaling_operator() {
    // [[0, t D_t + 3], [-t D_t - 2, 0]]^* = [[0, t D_t - 1], [-t D_t + 2, 0]]
    let t = Expr::indep("t");
    let tdt = ScalarOp::term(t.clone(), MultiIndex::single(&s("t")));
    let r = TotalDiffOp::from_rows(vec![
        vec![ScalarOp::zero(), tdt.add(&ScalarOp::mul_by(Expr::int(3)))],
        vec![tdt.neg().sub(&ScalarOp::mul_by(Expr::int(2))), ScalarOp::zero()],
    ])
    .unwrap();
    let adj = r.adjoint();
    assert_eq!(*adj.entry(1, 0), tdt.neg().add(&ScalarOp::mul_by(Expr::int(2))));
    assert_eq!(*adj.entry(0, 1), tdt.sub(&ScalarOp::identity()));
    assert!(adj.entry(0, 0).is_zero() && adj.entry(1, 1).is_zero());
    assert_eq!(adj.adjoint(), r);
}

#[test]
fn compose_uses_leibniz() {
    let x = Expr::indep("x");
    let a = d(&["x"]);
    let b = ScalarOp::mul_by(x.clone());
    // D_x o x = x D_x + 1
    assert_eq!(a.compose(&b), ScalarOp::term(x, MultiIndex::single(&s("x"))).add(&ScalarOp::identity()));
}

#[test]
fn display_round_shapes() {
    let t = Expr::indep("t");
    let op = ScalarOp::term(t, MultiIndex::single(&s("t"))).add(&ScalarOp::mul_by(Expr::int(2)));
    assert_eq!(op.to_string(), "t*D[t] + 2");
}

#[test]
fn extract_and_verify_on_evolution_system() {
    let sys = heat_pair();
    let p2 = vec![j("u", &["x"]), j("v", &["x"])];
    let r = extract_r_evolution(&sys, &p2, Side::Symmetry).unwrap();
    assert_eq!(r, TotalDiffOp::diag(vec![d(&["x"]), d(&["x"])]));
    assert!(verify_r(&sys, &p2, &r, Side::Symmetry).unwrap());

    let p1 = vec![j("u", &["t"]), j("v", &["t"])];
    assert!(verify_r(&sys, &p1, &TotalDiffOp::diag(vec![d(&["t"]), d(&["t"])]), Side::Symmetry).unwrap());
    assert!(!verify_r(&sys, &p1, &TotalDiffOp::zero(2, 2), Side::Symmetry).unwrap());

    let q = vec![Expr::one(), Expr::zero()];
    assert!(extract_r_evolution(&sys, &q, Side::Adjoint).unwrap().is_zero());
    // Q' = identity, so R_Q = -identity.
    let q3 = vec![j("u", &[]), j("v", &[])];
    assert_eq!(extract_r_evolution(&sys, &q3, Side::Adjoint).unwrap(), TotalDiffOp::identity(2).neg());
}

#[test]
fn extraction_requires_evolution_form() {
    let mut sys = heat_pair();
    sys.solved = None;
    let err = extract_r_evolution(&sys, &[Expr::one(), Expr::one()], Side::Adjoint).unwrap_err();
    assert_eq!(err, LinopError::Jet(JetError::NoEvolutionForm));
}

#[test]
fn frechet_op_agrees_with_frechet() {
    let sys = heat_pair();
    let f = vec![j("u", &[]).pow_u32(2) * j("v", &["x"]), j("u", &["x", "t"])];
    let op = frechet_op(&f, &sys.dependents).unwrap();
    let p = vec![Expr::indep("x") * j("u", &["x"]), j("v", &[]).pow(&Exponent::int(3)).unwrap()];
    assert_eq!(op.apply(&p).unwrap(), frechet(&f, &p, &sys.dependents).unwrap());
}

fn arb_coeff() -> impl Strategy<Value = Expr> {
    let atoms = vec![
        Expr::int(1),
        Expr::int(-2),
        Expr::indep("x"),
        Expr::indep("t"),
        Expr::jet("u", &[]),
        Expr::jet("u", &["x"]),
        Expr::jet("v", &["t"]),
    ];
    prop::collection::vec(prop::sample::select(atoms), 1..3).prop_map(|v| v.into_iter().fold(Expr::one(), |a, b| a * b))
}

fn arb_index() -> impl Strategy<Value = MultiIndex> {
    let idx: Vec<Vec<&'static str>> = vec![vec![], vec!["x"], vec!["t"], vec!["x", "x"], vec!["t", "x"]];
    prop::sample::select(idx).prop_map(|v| MultiIndex::new(v.into_iter().map(s).collect()))
}

fn arb_scalar_op() -> impl Strategy<Value = ScalarOp> {
    prop::collection::vec((arb_coeff(), arb_index()), 0..3)
        .prop_map(|ts| ts.into_iter().fold(ScalarOp::zero(), |acc, (c, i)| acc.add(&ScalarOp::term(c, i))))
}

fn arb_op() -> impl Strategy<Value = TotalDiffOp> {
    prop::collection::vec(arb_scalar_op(), 4)
        .prop_map(|v| TotalDiffOp::from_rows(vec![v[..2].to_vec(), v[2..].to_vec()]).unwrap())
}

fn arb_field() -> impl Strategy<Value = Vec<Expr>> {
    prop::collection::vec(arb_coeff(), 2)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, rng_algorithm: prop::test_runner::RngAlgorithm::ChaCha, rng_seed: prop::test_runner::RngSeed::Fixed(0x6a62), ..ProptestConfig::default() })]

    #[test]
    fn adjoint_is_an_involution(l in arb_op()) {
        prop_assert_eq!(l.adjoint().adjoint(), l);
    }

    #[test]
    fn compose_agrees_with_application(a in arb_op(), b in arb_op(), v in arb_field()) {
        let lhs = a.compose(&b).unwrap().apply(&v).unwrap();
        let rhs = a.apply(&b.apply(&v).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bilinear_adjoint_identity(l in arb_op(), p in arb_field(), q in arb_field()) {
        let lp = l.apply(&p).unwrap();
        let lq = l.adjoint().apply(&q).unwrap();
        let pairing: Expr = q.iter().zip(&lp).map(|(a, b)| a.clone() * b.clone()).sum::<Expr>()
            - lq.iter().zip(&p).map(|(a, b)| a.clone() * b.clone()).sum::<Expr>();
        prop_assert!(is_total_divergence(&pairing));
    }
}
