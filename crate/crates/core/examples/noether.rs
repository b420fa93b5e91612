//! Noether operators, symplectic integrands and Hamiltonian and Lagrangian
//! forms of the Boussinesq fixture.

use jetbrackets::fixtures::load_fixture;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = load_fixture("boussinesq")?;
    for n in f.noether_report() {
        println!("{}: J = {}  skew: {:?}  matches: {}", n.name, n.computed, n.skew_adjoint, n.matches);
    }
    for r in f.integrand_report().iter().chain(&f.variational_report()) {
        println!("{}: {}", r.subject, if r.pass { "exact" } else { "fails" });
    }
    Ok(())
}
