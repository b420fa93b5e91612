use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetbrackets"))
        .args(args)
        .env_remove("JETBRACKETS_FIXTURE_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("jetbrackets-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn action_table_for_reaction_diffusion() {
    let o = run(&["actions", "--fixture", "reaction_diffusion", "--kind", "1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("(-(1/2)*p + 1)*Q1"), "{text}");
    assert!(text.trim_end().ends_with("PASS"));
}

#[test]
fn malformed_file_is_a_parse_error() {
    let dir = scratch("bad");
    let path = dir.join("bad.sys");
    std::fs::write(&path, "system bad\nindependents t, x\ndependents u\nequations\n  G: u[t] - (u[x,x]\n").unwrap();
    let o = run(&["check", "--file", path.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(code(&o), 2);
    assert!(!o.stderr.is_empty());
}

#[test]
fn missing_file_is_exit_2() {
    assert_eq!(code(&run(&["check", "--file", "/nonexistent/x.sys"])), 2);
    assert_eq!(code(&run(&["check", "--fixture", "heat"])), 2);
}

#[test]
fn bad_flags_are_rejected() {
    assert_eq!(code(&run(&["actions", "--fixture", "reaction_diffusion", "--kind", "4"])), 2);
    assert_eq!(code(&run(&["actions", "--fixture", "reaction_diffusion", "--colour"])), 2);
    assert_eq!(code(&run(&["actions", "--fixture", "reaction_diffusion", "--file", "x.sys"])), 2);
}

#[test]
fn navier_stokes_bracket_under_scaling() {
    let o = run(&["brackets", "--fixture", "navier_stokes", "--q", "Q3", "--policy", "scaling"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("bracket_q3"));
}

#[test]
fn ill_defined_bracket_is_refused() {
    let o = run(&["brackets", "--fixture", "navier_stokes", "--q", "Q3", "--kind", "1", "--policy", "ideal"]);
    assert_eq!(code(&o), 4, "{}", stdout(&o));
    assert!(stdout(&o).trim_end().ends_with("REFUSED"));
}

#[test]
fn validation_failure_is_exit_3() {
    let dir = scratch("invalid");
    let src = run(&["fixtures", "reaction_diffusion"]);
    assert_eq!(code(&src), 0);
    let text = stdout(&src).replacen("[P1, P3] = -p*P1", "[P1, P3] = p*P1", 1);
    let path = dir.join("rd.sys");
    std::fs::write(&path, text).unwrap();
    let o = run(&["classify", "--file", path.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn output_is_deterministic() {
    let args = ["report", "--fixture", "reaction_diffusion", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_carries_a_schema_version() {
    let o = run(&["classify", "--fixture", "boussinesq", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "classify");
    assert_eq!(v["system"], "boussinesq");
    assert_eq!(v["pass"], true);
}

#[test]
fn csv_has_a_fixed_header() {
    let o = run(&["actions", "--fixture", "navier_stokes", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("section,table,row,col,expected,computed,pass"));
    assert!(lines.all(|l| l.ends_with(",true")));
}

#[test]
fn set_instantiates_parameters() {
    let o = run(&["actions", "--fixture", "reaction_diffusion", "--kind", "1", "--set", "p=3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("(-2)*Q2"));
    assert_eq!(code(&run(&["actions", "--fixture", "reaction_diffusion", "--set", "p"])), 2);
}

#[test]
fn fixtures_lists_and_prints() {
    let o = run(&["fixtures"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for name in ["reaction_diffusion", "navier_stokes", "boussinesq", "acoustic_first_layer"] {
        assert!(text.contains(name), "{name}");
    }
    let o = run(&["fixtures", "coupled_kdv"]);
    assert!(stdout(&o).contains("system coupled_kdv"));
}

#[test]
fn fixture_dir_override() {
    let dir = scratch("override");
    let src = stdout(&run(&["fixtures", "reaction_diffusion"]));
    let broken = src.replacen("Q2 = (x, x)", "Q2 = (x, t)", 1);
    std::fs::write(dir.join("reaction_diffusion.sys"), broken).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_jetbrackets"))
        .args(["check", "--fixture", "reaction_diffusion"])
        .env("JETBRACKETS_FIXTURE_DIR", &dir)
        .output()
        .unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(code(&o), 3, "{}", stdout(&o));
    assert!(stdout(&o).contains("Q2"));
}

#[test]
fn noether_and_variational_commands() {
    let o = run(&["noether", "--fixture", "boussinesq"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = run(&["variational", "--fixture", "coupled_kdv"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = run(&["variational", "--fixture", "acoustic_first_layer", "--variant", "undamped"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}
