//! Every check for one fixture, as the JSON the CLI prints.
//!
//! `cargo run --example full_report -- navier_stokes`

use jetbrackets::fixtures::load_fixture;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "reaction_diffusion".into());
    let rep = load_fixture(&name)?.full_report();
    println!("{}", serde_json::to_string_pretty(&rep)?);
    eprintln!("{name}: {}", if rep.pass { "pass" } else { "fail" });
    Ok(())
}
