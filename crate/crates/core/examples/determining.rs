//! Determining equations for candidate symmetries and adjoint-symmetries of
//! a system given as `.sys` text.

use jetbrackets::fixtures::{load_from_text, parse_unvalidated};

const HEAT: &str = "
system heat
independents t, x
dependents u
equations
  G: u[t] - u[x,x]
evolution
  u[t] = u[x,x]
symmetries
  P1 = (u[x])
  P2 = (x*u[x] + 2*t*u[t])
  P3 = (u^2)
adjoint_symmetries
  Q1 = (x)
  Q2 = (x^2 - 2*t)
  Q3 = (x^2)
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // unvalidated, so the failing candidates are reported instead of rejected
    let f = parse_unvalidated(HEAT, None)?;
    for r in f.determining_report() {
        let verdict = if r.pass { "holds".to_string() } else { format!("fails, residual {}", r.residual.join(", ")) };
        println!("{:<3} {:?}: {verdict}", r.subject, r.method);
    }
    // validated loading refuses the file outright
    if let Err(e) = load_from_text(HEAT, None) {
        println!("validated load: {e}");
    }
    Ok(())
}
