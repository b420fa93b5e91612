//! Bracket algebras compared with symmetry subalgebras through the inverse
//! of the dual action.

use jetbrackets::fixtures::load_fixture;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["reaction_diffusion", "navier_stokes", "boussinesq", "acoustic_potential"] {
        let f = load_fixture(name)?;
        for iso in f.isomorphism_report() {
            match (&iso.report, &iso.error) {
                (Some(r), _) => println!("{name} {}: {:?}", iso.name, r),
                (None, Some(e)) => println!("{name} {}: {e}", iso.name),
                (None, None) => {}
            }
        }
    }
    Ok(())
}
