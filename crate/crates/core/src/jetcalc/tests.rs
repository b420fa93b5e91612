use super::*;
use crate::symexpr::{rat, Exponent, NumericPoint, Number};
use proptest::prelude::*;

fn s(n: &str) -> Symbol {
    Symbol::new(n)
}

fn j(dep: &str, d: &[&str]) -> Expr {
    Expr::jet(dep, d)
}

fn x() -> Expr {
    Expr::indep("x")
}

fn rd_system() -> PDESystem {
    let (k1, k2, a, p) = (Expr::param("kappa1"), Expr::param("kappa2"), Expr::param("alpha"), Exponent::param(&s("p")));
    let up = j("u", &[]).pow(&p).unwrap();
    let gu = j("u", &["t"]) - k1.clone() * j("u", &["x", "x"]) - a.clone() * up.clone() * j("v", &[]);
    let gv = j("v", &["t"]) - k2.clone() * j("v", &["x", "x"]) + a.clone() * up.clone() * j("v", &[]);
    let rules = vec![
        (Jet::new(&s("u"), MultiIndex::single(&s("t"))), k1 * j("u", &["x", "x"]) + a.clone() * up.clone() * j("v", &[])),
        (Jet::new(&s("v"), MultiIndex::single(&s("t"))), k2 * j("v", &["x", "x"]) - a * up * j("v", &[])),
    ];
    PDESystem {
        name: "rd".into(),
        independents: vec![s("t"), s("x")],
        dependents: vec![s("u"), s("v")],
        parameters: vec![s("kappa1"), s("kappa2"), s("alpha"), s("p")],
        equations: vec![gu, gv],
        solved: Some(SolvedForm { rules }),
    }
}

#[test]
fn total_derivative_examples() {
    assert_eq!(total_derivative(&(x() * j("u", &[])), &s("x")), j("u", &[]) + x() * j("u", &["x"]));
    let p = Exponent::param(&s("p"));
    let lhs = total_derivative(&j("u", &[]).pow(&p).unwrap(), &s("t"));
    let rhs = Expr::param("p") * j("u", &[]).pow(&(&p - &Exponent::one())).unwrap() * j("u", &["t"]);
    assert_eq!(lhs, rhs);
}

#[test]
fn total_derivative_negative_power_matches_numeric_difference() {
    // D_r(r^-2 v_t) = -2 r^-3 v_t + r^-2 v_{tr}
    let r = Expr::indep("r");
    let e = r.pow(&Exponent::int(-2)).unwrap() * j("v", &["t"]);
    let d = total_derivative(&e, &s("r"));
    let expect = Expr::int(-2) * r.pow(&Exponent::int(-3)).unwrap() * j("v", &["t"])
        + r.pow(&Exponent::int(-2)).unwrap() * j("v", &["r", "t"]);
    assert_eq!(d, expect);
    // Oracle: along v(t,r) = t^2 r^3, v_t = 2t r^3, v_tr = 6 t r^2.
    let mut pt = NumericPoint::new();
    let (tv, rv) = (rat(2), rat(3));
    pt.set(Var::Indep(s("r")), rv.clone());
    pt.set(Var::Jet(Jet::new(&s("v"), MultiIndex::single(&s("t")))), rat(2) * &tv * &rv * &rv * &rv);
    pt.set(Var::Jet(Jet::new(&s("v"), MultiIndex::new(vec![s("r"), s("t")]))), rat(6) * &tv * &rv * &rv);
    // d/dr of r^-2 * 2 t r^3 = d/dr (2 t r) = 2t
    assert_eq!(pt.evaluate(&d).unwrap(), Number::Exact(rat(2) * tv));
}

#[test]
fn frechet_of_reaction_diffusion() {
    let sys = rd_system();
    // Placeholder dependents w, z stand for the components of P.
    let p = vec![j("w", &[]), j("z", &[])];
    let got = frechet(&sys.equations, &p, &sys.dependents).unwrap();
    let pe = Exponent::param(&s("p"));
    let expect_u = j("w", &["t"]) - Expr::param("kappa1") * j("w", &["x", "x"])
        - Expr::param("alpha")
            * (Expr::param("p") * j("u", &[]).pow(&(&pe - &Exponent::one())).unwrap() * j("v", &[]) * j("w", &[])
                + j("u", &[]).pow(&pe).unwrap() * j("z", &[]));
    assert_eq!(got[0], expect_u);
}

#[test]
fn frechet_of_linear_heat() {
    let f = vec![j("u", &["t"]) - j("u", &["x", "x"])];
    let got = frechet(&f, &[j("w", &[])], &[s("u")]).unwrap();
    assert_eq!(got[0], j("w", &["t"]) - j("w", &["x", "x"]));
}

#[test]
fn frechet_matches_finite_difference() {
    // F = u_t + u u_x + u^3, P = x u_x + t^2 u. Oracle: (F(u + eP) - F(u))/e is an exact
    // polynomial in e; its value at e -> 0 is the linear coefficient.
    let f = j("u", &["t"]) + j("u", &[]) * j("u", &["x"]) + j("u", &[]).pow_u32(3);
    let t = Expr::indep("t");
    let p = x() * j("u", &["x"]) + t.pow_u32(2) * j("u", &[]);
    let lin = frechet(&[f.clone()], &[p.clone()], &[s("u")]).unwrap().remove(0);
    let eps = Expr::param("eps");
    let mut map = BTreeMap::new();
    for jt in f.jets() {
        let shifted = Expr::var(Var::Jet(jt.clone())) + eps.clone() * total_derivative_multi(&p, &jt.derivs);
        map.insert(Var::Jet(jt), shifted);
    }
    let shifted = f.substitute_many(&map).unwrap() - f;
    let linear: Expr = shifted
        .terms()
        .filter(|(m, _)| m.exponent_of(&Var::Param(s("eps"))) == Some(&Exponent::one()))
        .map(|(m, c)| Expr::term(c.clone(), m.without(&Var::Param(s("eps")))))
        .sum();
    assert_eq!(lin, linear);
}

#[test]
fn adjoint_examples() {
    let f = vec![j("u", &["t"]) - j("u", &[]) * j("u", &["x"])];
    let got = frechet_adjoint(&f, &[j("q", &[])], &[s("u")]).unwrap();
    // -D_t q + D_x(u q) - u_x q = -q_t + u q_x
    assert_eq!(got[0], -j("q", &["t"]) + j("u", &[]) * j("q", &["x"]));
}

#[test]
fn navier_stokes_adjoint_first_component() {
    let (k, q, mu) = (Expr::param("k"), Exponent::param(&s("q")), Expr::param("mu"));
    let rho = j("rho", &[]);
    let gu = j("u", &["t"]) + j("u", &[]) * j("u", &["x"])
        + k.clone() * Expr::param("q") * rho.pow(&(&q - &Exponent::int(2))).unwrap() * j("rho", &["x"])
        - mu.clone() * rho.pow(&Exponent::int(-1)).unwrap() * j("u", &["x", "x"]);
    let grho = j("rho", &["t"]) + j("rho", &[]) * j("u", &["x"]) + j("u", &[]) * j("rho", &["x"]);
    let deps = [s("u"), s("rho")];
    let adj = frechet_adjoint(&[gu, grho], &[j("a", &[]), j("b", &[])], &deps).unwrap();
    let qu = j("a", &[]);
    let expect = -j("a", &["t"]) - j("u", &[]) * j("a", &["x"]) - rho.clone() * j("b", &["x"])
        - mu * total_derivative_multi(&(rho.pow(&Exponent::int(-1)).unwrap() * qu), &MultiIndex::new(vec![s("x"), s("x")]));
    assert_eq!(adj[0], expect);
}

#[test]
fn euler_examples() {
    let e = j("u", &["x"]).pow_u32(2).scale(&crate::symexpr::ratio(1, 2));
    assert_eq!(euler(&e, &s("u")), -j("u", &["x", "x"]));
    assert!(is_total_divergence(&total_derivative(&(j("u", &[]) * j("u", &["x"])), &s("x"))));
    assert!(!is_total_divergence(&j("u", &["x"]).pow_u32(2)));
    assert_eq!(euler(&j("u", &["x"]).pow_u32(2), &s("u")), Expr::int(-2) * j("u", &["x", "x"]));
}

#[test]
fn reaction_diffusion_reduction_and_multiplier() {
    let sys = rd_system();
    for g in &sys.equations {
        assert!(reduce_on_solutions(g, &sys).unwrap().is_zero());
    }
    let t = Expr::indep("t");
    let got = reduce_on_solutions(&(t.clone() * j("u", &["t"])), &sys).unwrap();
    let up = j("u", &[]).pow(&Exponent::param(&s("p"))).unwrap();
    assert_eq!(got, Expr::param("kappa1") * t.clone() * j("u", &["x", "x"]) + Expr::param("alpha") * t * up * j("v", &[]));
    assert!(is_total_divergence(&(sys.equations[0].clone() + sys.equations[1].clone())));
    assert_eq!(sys.evolution_var(), Some(s("t")));
}

#[test]
fn euler_of_action_pairing_gives_minus_q1() {
    // E_u(P2 . Q2) with P2 = (u_x, v_x), Q2 = (x, x) is -1.
    let e = x() * j("u", &["x"]) + x() * j("v", &["x"]);
    assert_eq!(euler(&e, &s("u")), Expr::int(-1));
    assert_eq!(euler(&e, &s("v")), Expr::int(-1));
}

#[test]
fn reduction_without_solved_form_fails() {
    let mut sys = rd_system();
    sys.solved = None;
    assert_eq!(reduce_on_solutions(&j("u", &[]), &sys), Err(JetError::NoEvolutionForm));
}

#[test]
fn reduction_handles_generalized_rules() {
    // v_rr = v_tt + 2 v_r / r: every jet with two r's reduces.
    let r = Expr::indep("r");
    let rule = j("v", &["t", "t"]) + Expr::int(2) * r.pow(&Exponent::int(-1)).unwrap() * j("v", &["r"]);
    let sys = PDESystem {
        name: "w".into(),
        independents: vec![s("t"), s("r")],
        dependents: vec![s("v")],
        parameters: vec![],
        equations: vec![j("v", &["r", "r"]) - rule.clone()],
        solved: Some(SolvedForm { rules: vec![(Jet::new(&s("v"), MultiIndex::new(vec![s("r"), s("r")])), rule)] }),
    };
    let red = reduce_on_solutions(&j("v", &["r", "r", "r", "t"]), &sys).unwrap();
    assert!(red.jets().iter().all(|jt| jt.derivs.count(&s("r")) <= 1));
    assert!(sys.evolution_var().is_none());
}

// Random differential polynomials in u, v over (t, x) of order <= 2.

fn arb_jet() -> impl Strategy<Value = Expr> {
    let derivs: Vec<Vec<&'static str>> = vec![vec![], vec!["t"], vec!["x"], vec!["x", "x"], vec!["t", "x"]];
    (prop::sample::select(vec!["u", "v"]), prop::sample::select(derivs)).prop_map(|(d, ix)| Expr::jet(d, &ix))
}

fn arb_factor() -> impl Strategy<Value = Expr> {
    prop_oneof![arb_jet(), arb_jet(), Just(Expr::indep("x")), Just(Expr::indep("t"))]
}

fn arb_term() -> impl Strategy<Value = Expr> {
    (-4i64..=4, prop::collection::vec(arb_factor(), 0..3))
        .prop_map(|(c, fs)| fs.into_iter().fold(Expr::int(c), |acc, f| acc * f))
}

fn arb_poly() -> impl Strategy<Value = Expr> {
    prop::collection::vec(arb_term(), 1..4).prop_map(|ts| ts.into_iter().sum())
}

fn deps() -> Vec<Symbol> {
    vec![s("u"), s("v")]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, rng_algorithm: prop::test_runner::RngAlgorithm::ChaCha, rng_seed: prop::test_runner::RngSeed::Fixed(0x6a62), ..ProptestConfig::default() })]

    #[test]
    fn adjoint_identity_is_a_divergence(f in arb_poly(), p in (arb_poly(), arb_poly()), q in arb_poly()) {
        let pv = vec![p.0, p.1];
        let fp = frechet(&[f.clone()], &pv, &deps()).unwrap();
        let fq = frechet_adjoint(&[f], &[q.clone()], &deps()).unwrap();
        let pairing = q * fp[0].clone() - pv[0].clone() * fq[0].clone() - pv[1].clone() * fq[1].clone();
        prop_assert!(is_total_divergence(&pairing));
    }

    #[test]
    fn euler_annihilates_total_derivatives(e in arb_poly(), dx in prop::bool::ANY) {
        let var = if dx { s("x") } else { s("t") };
        let d = total_derivative(&e, &var);
        prop_assert!(euler(&d, &s("u")).is_zero());
        prop_assert!(euler(&d, &s("v")).is_zero());
    }

    #[test]
    fn total_derivatives_commute(e in arb_poly()) {
        let a = total_derivative(&total_derivative(&e, &s("x")), &s("t"));
        let b = total_derivative(&total_derivative(&e, &s("t")), &s("x"));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn reduction_is_idempotent(e in arb_poly()) {
        let sys = rd_system();
        let once = reduce_on_solutions(&e, &sys).unwrap();
        prop_assert!(once.jets().iter().all(|jt| jt.derivs.count(&s("t")) == 0));
        prop_assert_eq!(reduce_on_solutions(&once, &sys).unwrap(), once);
    }
}
