//! Total derivatives, linearization, its adjoint and the Euler operator on a
//! small KdV-type expression.

use jetbrackets::dsl::{parse_expr, Scope};
use jetbrackets::jetcalc::{euler, frechet, frechet_adjoint, is_total_divergence, total_derivative};
use jetbrackets::symexpr::Symbol;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scope = Scope {
        independents: vec![Symbol::new("t"), Symbol::new("x")],
        dependents: vec![Symbol::new("u")],
        parameters: vec![],
    };
    let u = [Symbol::new("u")];
    let g = parse_expr("u[t] - u[x,x,x] - u*u[x]", &scope)?;
    println!("G          = {g}");
    println!("D_x G      = {}", total_derivative(&g, &Symbol::new("x")));

    // placeholders for the direction of linearization and for the adjoint argument
    let wider = scope.with_dependents(&[Symbol::new("w"), Symbol::new("q")]);
    let w = parse_expr("w", &wider)?;
    let q = parse_expr("q", &wider)?;
    println!("G'(w)      = {}", frechet(std::slice::from_ref(&g), &[w], &u)?[0]);
    println!("G'*(q)     = {}", frechet_adjoint(std::slice::from_ref(&g), &[q], &u)?[0]);

    let density = parse_expr("u*u[x]", &scope)?;
    println!("E_u(u u_x) = {}  divergence: {}", euler(&density, &u[0]), is_total_divergence(&density));
    Ok(())
}
