use super::*;
use crate::symexpr::{ratio, Exponent};
use proptest::prelude::*;

fn rd_scope() -> Scope {
    Scope {
        independents: vec![Symbol::new("t"), Symbol::new("x")],
        dependents: vec![Symbol::new("u"), Symbol::new("v")],
        parameters: vec![Symbol::new("kappa1"), Symbol::new("alpha"), Symbol::new("p")],
    }
}

#[test]
fn parses_reaction_diffusion_equation() {
    let sc = rd_scope();
    let e = parse_expr("u[t] - kappa1*u[x,x] - alpha*u^p*v", &sc).unwrap();
    let up = Expr::jet("u", &[]).pow(&Exponent::param(&Symbol::new("p"))).unwrap();
    let expect = Expr::jet("u", &["t"])
        - Expr::param("kappa1") * Expr::jet("u", &["x", "x"])
        - Expr::param("alpha") * up * Expr::jet("v", &[]);
    assert_eq!(e, expect);
    assert!(parse_expr("0", &sc).unwrap().is_zero());
    assert_eq!(parse_expr("u[x,t]", &sc).unwrap(), parse_expr("u[t,x]", &sc).unwrap());
}

#[test]
fn numbers_are_exact() {
    let sc = rd_scope();
    assert_eq!(parse_expr("0.25*u", &sc).unwrap(), Expr::jet("u", &[]).scale(&ratio(1, 4)));
    assert_eq!(parse_expr("3/6", &sc).unwrap(), Expr::constant(ratio(1, 2)));
    assert_eq!(parse_expr("u^(p - 1)*u", &sc).unwrap(), parse_expr("u^p", &sc).unwrap());
    assert_eq!(parse_expr("2/u", &sc).unwrap().to_string(), "2*u^(-1)");
}

#[test]
fn diagnostics_carry_positions() {
    let sc = rd_scope();
    match parse_expr("u + * v", &sc) {
        Err(DslError::Syntax { pos, .. }) => assert_eq!(pos, Pos { line: 1, col: 5 }),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(parse_expr("w + u", &sc), Err(DslError::Undeclared { name, .. }) if name == "w"));
    assert!(matches!(parse_expr("u[y]", &sc), Err(DslError::Arity { .. })));
    assert!(matches!(parse_expr("x[t]", &sc), Err(DslError::Arity { .. })));
    assert!(matches!(parse_expr("u/(u + v)", &sc), Err(DslError::Expr { .. })));
    assert!(matches!(parse_expr("(u + v)^p", &sc), Err(DslError::Expr { .. })));
    assert!(matches!(parse_expr("u $ v", &sc), Err(DslError::Syntax { .. })));
}

#[test]
fn operators_parse_and_render() {
    let sc = rd_scope();
    let op = parse_operator("[[t*D[t]+2, 0],[0, t*D[t]+3]]", &sc).unwrap();
    assert_eq!(op.to_string(), "[[t*D[t] + 2, 0], [0, t*D[t] + 3]]");
    assert_eq!(parse_operator(&op.to_string(), &sc).unwrap(), op);
    let j = parse_operator("[[0, -1], [1, 0]]", &sc).unwrap();
    assert_eq!(j.to_string(), "[[0, -1], [1, 0]]");
    let comp = parse_operator("[[D[x]*x]]", &sc).unwrap();
    assert_eq!(comp.to_string(), "[[x*D[x] + 1]]");
    assert!(parse_operator("[[D[x]/x]]", &sc).is_err());
}

const SMALL: &str = r#"
# a test system
system demo
independents t, x
dependents u, v
parameters p, a
constraints
  p != 1
equations
  Gu: u[t] - u[x,x] - a*u^p*v
  Gv: v[t] - v[x,x] + a*u^p*v
evolution
  u[t] = u[x,x] + a*u^p*v
  v[t] = v[x,x] - a*u^p*v
variants
  plain: a = 0
  coupled:
symmetries
  P1 = (u[t], v[t])
  P2 = (u[x],
        v[x])
adjoint_symmetries
  Q1 = (1, 1)
  Q2 @coupled = (x, x)
commutators
  [P1, P2] = 0
multipliers Q1, Q2
table t1
  type = action
  kind = 1
  S[P2](Q2) = -Q1
table b1
  type = bracket
  kind = 1
  q = Q2
  [Q1, Q2] = p/(2*(p - 1))*Q1
"#;

#[test]
fn parses_sectioned_file() {
    let f = parse_system(SMALL).unwrap();
    assert_eq!(f.name, "demo");
    assert_eq!(f.equations.len(), 2);
    assert_eq!(f.symmetries.len(), 2);
    assert_eq!(f.adjoint_symmetries.len(), 2);
    assert_eq!(f.tables.len(), 2);
    assert_eq!(f.multipliers, vec!["Q1", "Q2"]);
    assert_eq!(f.constraints[0].difference().to_string(), "p - 1");
    let b = &f.tables[1];
    assert_eq!(b.brackets[0].value["Q1"].to_string(), "((1/2)*p)/(p - 1)");
    assert_eq!(f.pde_system().evolution_var(), Some(Symbol::new("t")));
}

#[test]
fn variants_specialize() {
    let f = parse_system(SMALL).unwrap();
    let plain = f.specialize(None).unwrap();
    assert_eq!(plain.adjoint_symmetries.len(), 1);
    assert!(!plain.parameters.contains(&Symbol::new("a")));
    assert_eq!(plain.equations[0].1, parse_expr("u[t] - u[x,x]", &rd_scope()).unwrap());
    let coupled = f.specialize(Some("coupled")).unwrap();
    assert_eq!(coupled.adjoint_symmetries.len(), 2);
    assert!(matches!(f.specialize(Some("nope")), Err(DslError::UnknownVariant(_))));
}

#[test]
fn file_level_errors() {
    let bad_len = SMALL.replace("Q1 = (1, 1)", "Q1 = (1, 1, 1)");
    assert!(matches!(parse_system(&bad_len), Err(DslError::LengthMismatch { expected: 2, got: 3, .. })));
    let dup = SMALL.replace("Q2 @coupled", "Q1 @coupled");
    assert!(matches!(parse_system(&dup), Err(DslError::Duplicate { .. })));
    let undeclared = SMALL.replace("P1 = (u[t], v[t])", "P1 = (w[t], v[t])");
    assert!(matches!(parse_system(&undeclared), Err(DslError::Undeclared { .. })));
    let open = SMALL.replace("P2 = (u[x],", "P2 = ((u[x],");
    assert!(parse_system(&open).is_err());
    let no_eq = SMALL.replace("equations", "notes");
    assert!(parse_system(&no_eq).is_err());
    let bad_tag = SMALL.replace("@coupled", "@nowhere");
    assert!(matches!(parse_system(&bad_tag), Err(DslError::Section { .. })));
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let atoms = vec![
        "u", "v", "x", "t", "u[x]", "v[t,x]", "u[x,x]", "u^p", "u^(p - 1)", "v^(-2)", "x^(-1)", "kappa1", "alpha^2",
    ];
    let term = (-5i64..=5, 1i64..=3, prop::collection::vec(prop::sample::select(atoms), 0..3));
    prop::collection::vec(term, 1..4).prop_map(|ts| {
        let sc = rd_scope();
        ts.into_iter()
            .map(|(n, d, fs)| {
                let text = std::iter::once(format!("({n}/{d})")).chain(fs.iter().map(|s| s.to_string())).collect::<Vec<_>>().join("*");
                parse_expr(&text, &sc).unwrap()
            })
            .sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, rng_algorithm: prop::test_runner::RngAlgorithm::ChaCha, rng_seed: prop::test_runner::RngSeed::Fixed(0x6a62), ..ProptestConfig::default() })]

    #[test]
    fn render_round_trips(e in arb_expr()) {
        let sc = rd_scope();
        let text = e.to_string();
        let back = parse_expr(&text, &sc).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(back.to_string(), text);
    }
}
