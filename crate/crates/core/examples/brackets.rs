//! Adjoint-symmetry brackets: a bundled table, an ad hoc query under the
//! scaling policy, and a refused one.

use std::collections::BTreeMap;

use jetbrackets::dsl::{parse_lincomb, TableType};
use jetbrackets::fixtures::{load_fixture, BracketTableReport};

fn show(rep: &BracketTableReport) {
    println!("{}: q = {}, policy {}, kernel {:?}", rep.name, rep.q, rep.policy, rep.kernel_computed);
    for c in &rep.entries {
        println!("  [{}, {}] = {}", c.row, c.col, c.computed);
    }
    if let Some(e) = &rep.error {
        println!("  {e}");
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rd = load_fixture("reaction_diffusion")?;
    for t in rd.file.tables.iter().filter(|t| t.ty == TableType::Bracket) {
        show(&rd.bracket_table_report(t));
    }

    let ns = load_fixture("navier_stokes")?;
    let q = parse_lincomb("Q3", &ns.file.adj_labels(), &ns.file.scope())?;
    let none = BTreeMap::new();
    show(&ns.bracket_query(1, q.clone(), Some("scaling"), None, &none));
    let refused = ns.bracket_query(1, q, Some("ideal"), None, &none);
    println!("ideal policy refused: {}", refused.refused);
    Ok(())
}
