use super::*;
use crate::jetcalc::SolvedForm;
use crate::linop::ScalarOp;
use crate::symexpr::{rat, Jet, MultiIndex};

fn s(n: &str) -> Symbol {
    Symbol::new(n)
}

fn j(dep: &str, d: &[&str]) -> Expr {
    Expr::jet(dep, d)
}

fn x() -> Expr {
    Expr::indep("x")
}

fn evolution(name: &str, rhs: Expr) -> PDESystem {
    PDESystem {
        name: name.into(),
        independents: vec![s("t"), s("x")],
        dependents: vec![s("u")],
        parameters: vec![],
        equations: vec![j("u", &["t"]) - rhs.clone()],
        solved: Some(SolvedForm { rules: vec![(Jet::new(&s("u"), MultiIndex::single(&s("t"))), rhs)] }),
    }
}

fn heat() -> PDESystem {
    evolution("heat", j("u", &["x", "x"]))
}

// u_t = u_xxx + u u_x
fn kdv() -> PDESystem {
    evolution("kdv", j("u", &["x", "x", "x"]) + j("u", &[]) * j("u", &["x"]))
}

fn op1(o: ScalarOp) -> TotalDiffOp {
    TotalDiffOp::from_rows(vec![vec![o]]).unwrap()
}

fn dx() -> ScalarOp {
    ScalarOp::derivative(MultiIndex::single(&s("x")))
}

#[test]
fn heat_symmetries_and_adjoint_symmetries() {
    let sys = heat();
    let scaling = x() * j("u", &["x"]) + Expr::int(2) * Expr::indep("t") * j("u", &["t"]);
    for p in [j("u", &["x"]), j("u", &["t"]), j("u", &[]), scaling] {
        let rep = check_determining(&sys, "P", &[p], Side::Symmetry, None).unwrap();
        assert!(rep.pass, "{:?}", rep);
        assert_eq!(rep.method, Method::OnSolution);
    }
    let bad = check_determining(&sys, "P", &[j("u", &[]).pow_u32(2)], Side::Symmetry, None).unwrap();
    assert!(!bad.pass);
    assert!(!bad.residual.is_empty());

    // the adjoint equation is -Q_t - Q_xx = 0
    for q in [Expr::one(), x(), x() * x() - Expr::int(2) * Expr::indep("t")] {
        assert!(check_determining(&sys, "Q", &[q], Side::Adjoint, None).unwrap().pass);
    }
    assert!(!check_determining(&sys, "Q", &[x() * x()], Side::Adjoint, None).unwrap().pass);
}

#[test]
fn supplied_r_is_checked_off_solution() {
    let sys = heat();
    // G'(u_x) = D_x G
    let good = op1(dx());
    let rep = check_determining(&sys, "P1", &[j("u", &["x"])], Side::Symmetry, Some(&good)).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.method, Method::OnSolutionAndR);
    let bad = op1(ScalarOp::identity());
    let rep = check_determining(&sys, "P1", &[j("u", &["x"])], Side::Symmetry, Some(&bad)).unwrap();
    assert!(!rep.pass);

    let mut unsolved = heat();
    unsolved.solved = None;
    assert_eq!(
        check_determining(&unsolved, "P1", &[j("u", &["x"])], Side::Symmetry, None),
        Err(StructureError::UnverifiableWithoutR("P1".into()))
    );
    let rep = check_determining(&unsolved, "P1", &[j("u", &["x"])], Side::Symmetry, Some(&good)).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.method, Method::OffSolutionR);
    assert_eq!(prepare(&unsolved, "P1", &[j("u", &["x"])], Side::Symmetry, Some(&bad)), Err(StructureError::BadR("P1".into())));
}

#[test]
fn heat_actions_by_hand() {
    // P = u_x has R_P = D_x, so R_P^* = -D_x; Q = x has Q' = 0 and R_Q = 0.
    let sys = heat();
    let p = prepare(&sys, "P", &[j("u", &["x"])], Side::Symmetry, None).unwrap();
    let q = prepare(&sys, "Q", &[x()], Side::Adjoint, None).unwrap();
    assert_eq!(p.r, op1(dx()));
    assert!(q.r.apply(&[j("u", &[])]).unwrap()[0].is_zero());
    let a1 = symmetry_action(ActionKind::Action1, &sys, &p, &q).unwrap();
    let a2 = symmetry_action(ActionKind::Action2, &sys, &p, &q).unwrap();
    let a3 = symmetry_action(ActionKind::Action3, &sys, &p, &q).unwrap();
    assert_eq!(a1, vec![Expr::int(-1)]);
    assert_eq!(a2, vec![Expr::int(-1)]);
    assert_eq!(a3, vec![Expr::zero()]);
}

#[test]
fn action_difference_on_kdv() {
    let sys = kdv();
    let u = j("u", &[]);
    let t = Expr::indep("t");
    // Galilean boost and scaling
    let boost = Expr::one() + t.clone() * j("u", &["x"]);
    let scaling = x() * j("u", &["x"]) + Expr::int(3) * t.clone() * j("u", &["t"]) + Expr::int(2) * u.clone();
    let qs = [Expr::one(), u.clone(), x() + t * u.clone()];
    for p in [j("u", &["x"]), boost, scaling] {
        let p = prepare(&sys, "P", &[p], Side::Symmetry, None).unwrap();
        for q in &qs {
            let q = prepare(&sys, "Q", &[q.clone()], Side::Adjoint, None).unwrap();
            let a1 = symmetry_action(ActionKind::Action1, &sys, &p, &q).unwrap();
            let a2 = symmetry_action(ActionKind::Action2, &sys, &p, &q).unwrap();
            let a3 = symmetry_action(ActionKind::Action3, &sys, &p, &q).unwrap();
            assert_eq!(&a2[0] - &a1[0], a3[0].clone());
            let img = check_determining(&sys, "S", &a2, Side::Adjoint, None).unwrap();
            assert!(img.pass, "{:?}", img);
        }
    }
}

#[test]
fn multipliers_on_heat_and_kdv() {
    let rep = classify_multiplier(&heat(), "Q", &[x()]).unwrap();
    assert!(rep.multiplier);
    assert_eq!(rep.self_adjoint, Some(true));
    // u(u_t - u_xx) has Euler derivative -2u_xx
    assert!(!classify_multiplier(&heat(), "u", &[j("u", &[])]).unwrap().multiplier);
    // u is a conservation-law multiplier of KdV
    let rep = classify_multiplier(&kdv(), "Q", &[j("u", &[])]).unwrap();
    assert!(rep.multiplier);
    assert_eq!(rep.self_adjoint, Some(true));
}

#[test]
fn noether_operator_is_skew_for_evolution() {
    let sys = kdv();
    // Q = x + t u gives Q' = t, which is self-adjoint, so J = 0
    let q = prepare(&sys, "Q", &[x() + Expr::indep("t") * j("u", &[])], Side::Adjoint, None).unwrap();
    let jop = noether_operator(&sys, &q).unwrap();
    assert_eq!(jop.apply(&[j("a", &[])]).unwrap(), vec![Expr::zero()]);
    // Q = u_x is not an adjoint-symmetry but Q' - Q'^* = 2 D_x regardless
    let q = Prepared { body: vec![j("u", &["x"])], r: op1(dx()).neg() };
    let jop = noether_operator(&sys, &q).unwrap();
    assert_eq!(jop, op1(dx().scale(&Expr::int(2))));
    assert_eq!(jop.adjoint(), jop.neg());
}

#[test]
fn integrand_is_skew() {
    let sys = kdv();
    let q = Prepared { body: vec![j("u", &["x"])], r: op1(dx()).neg() };
    let a = placeholders(&[s("a")]);
    let b = placeholders(&[s("b")]);
    let w = symplectic_integrand(&sys, &q, &a, &b).unwrap();
    let w2 = symplectic_integrand(&sys, &q, &b, &a).unwrap();
    assert!((&w + &w2).is_zero());
    // a b_x - b a_x = 2 a b_x - D_x(a b)
    let expect = Expr::int(2) * j("a", &[]) * j("b", &["x"]);
    assert!(check_integrand("w", &w, &expect).pass);
    assert!(!check_integrand("w", &w, &(Expr::int(3) * j("a", &[]) * j("b", &["x"]))).pass);
}

#[test]
fn hamiltonian_and_lagrangian_forms() {
    let sys = kdv();
    let u = j("u", &[]);
    // H = -u_x^2/2 + u^3/6, so D_x(E(H)) = u_xxx + u u_x
    let h = j("u", &["x"]).pow_u32(2).scale(&crate::symexpr::ratio(-1, 2)) + u.pow_u32(3).scale(&crate::symexpr::ratio(1, 6));
    let rep = hamiltonian_check(&sys, "H", &op1(dx()), &h, &[j("u", &["t"])]).unwrap();
    assert!(rep.pass, "{:?}", rep);
    assert!(!hamiltonian_check(&sys, "H", &op1(dx()), &u.pow_u32(2), &[j("u", &["t"])]).unwrap().pass);

    // u_tt - u_xx = 0 with L = (u_t^2 - u_x^2)/2 gives E(L) = -G
    let wave = PDESystem {
        name: "wave".into(),
        independents: vec![s("t"), s("x")],
        dependents: vec![s("u")],
        parameters: vec![],
        equations: vec![j("u", &["t", "t"]) - j("u", &["x", "x"])],
        solved: None,
    };
    let l = (j("u", &["t"]).pow_u32(2) - j("u", &["x"]).pow_u32(2)).scale(&crate::symexpr::ratio(1, 2));
    let minus = op1(ScalarOp::mul_by(Expr::int(-1)));
    assert!(lagrangian_check(&wave, "L", &minus, &l).unwrap().pass);
    assert!(!lagrangian_check(&wave, "L", &TotalDiffOp::identity(1), &l).unwrap().pass);

    let twice = op1(ScalarOp::mul_by(Expr::int(2)));
    let mut doubled = wave.clone();
    doubled.equations[0] = doubled.equations[0].scale(&rat(2));
    assert!(relation_check(&wave, &doubled, "rel", &twice, &TotalDiffOp::identity(1)).unwrap().pass);
    assert!(!relation_check(&wave, &doubled, "rel", &TotalDiffOp::identity(1), &TotalDiffOp::identity(1)).unwrap().pass);
}

#[test]
fn combine_ops_weights_and_sums() {
    use crate::params::ParamScalar;
    let parts = vec![(ParamScalar::int(2), op1(dx())), (ParamScalar::int(-1), op1(dx()))];
    assert_eq!(combine_ops(&parts).unwrap(), Some(op1(dx())));
    assert_eq!(combine_ops(&[]).unwrap(), None);
}
