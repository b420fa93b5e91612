//! Which adjoint-symmetries are conservation-law multipliers, by the Euler
//! test and, for evolution systems, by self-adjointness of the linearization.

use jetbrackets::fixtures::{load_fixture, FIXTURE_NAMES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in FIXTURE_NAMES {
        let f = load_fixture(name)?;
        let mut yes = Vec::new();
        let mut no = Vec::new();
        for m in f.multiplier_report() {
            if m.report.multiplier {
                yes.push(m.report.subject);
            } else {
                no.push(m.report.subject);
            }
        }
        println!("{name:<22} multipliers [{}]  others [{}]", yes.join(", "), no.join(", "));
    }
    Ok(())
}
