//! The three symmetry actions on adjoint-symmetries of the reaction-diffusion
//! fixture, symbolically and at a fixed exponent.

use std::collections::BTreeMap;

use jetbrackets::fixtures::{load_fixture, ActionTableReport};
use jetbrackets::symexpr::{rat, Symbol};

fn show(rep: &ActionTableReport) {
    println!("{} (kind {})", rep.name, rep.kind);
    for c in &rep.cells {
        println!("  S[{}]({}) = {}", c.col, c.row, c.computed);
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = load_fixture("reaction_diffusion")?;
    for kind in 1..=3 {
        show(&f.computed_action_table(kind));
    }
    let t = f.file.tables.iter().find(|t| t.name == "action1").expect("bundled table");
    let rep = f.action_table_report_at(t, &BTreeMap::from([(Symbol::new("p"), rat(3))]));
    if let Some(at3) = &rep.instantiated {
        println!("at p = 3:");
        show(at3);
    }
    println!("golden values match: {}", rep.pass);
    Ok(())
}
