use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use jetbrackets::dsl::{self, LinComb, TableType};
use jetbrackets::fixtures::{
    self, ActionTableReport, BracketTableReport, Cell, CommutatorReport, Fixture, FixtureError, IsomorphismCheck,
    MultiplierCheck, NoetherCheck, FIXTURE_NAMES,
};
use jetbrackets::structure::CheckReport;
use jetbrackets::symexpr::{Rat, Symbol};

/// Bumped whenever the JSON layout changes.
const SCHEMA_VERSION: u32 = 1;

const EXIT_FAIL: u8 = 3;
const EXIT_PARSE: u8 = 2;
const EXIT_REFUSED: u8 = 4;

#[derive(Parser)]
#[command(name = "jetbrackets", version, about = "Symmetries, adjoint-symmetries, symmetry actions and brackets of PDE systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Determining equations of every object and the commutator table.
    Check(Input),
    /// Multiplier classification of the adjoint-symmetries.
    Classify(Input),
    /// Symmetry action tables.
    Actions {
        #[command(flatten)]
        input: Input,
        /// Only tables of this action kind; computed without golden values if the file has none.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        kind: Option<u8>,
    },
    /// Adjoint-symmetry bracket tables and isomorphism claims.
    Brackets {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        kind: Option<u8>,
        /// Bracket induced by this adjoint-symmetry combination, e.g. `Q3 + c1*Q1`.
        #[arg(long)]
        q: Option<String>,
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        /// Scaling symmetry for `--policy scaling`; found automatically when omitted.
        #[arg(long)]
        scaling: Option<String>,
    },
    /// Noether operators and symplectic integrands.
    Noether(Input),
    /// Lagrangian and Hamiltonian forms and relations to parent systems.
    Variational(Input),
    /// Every check the file supports.
    Report(Input),
    /// Lists the bundled fixtures, or prints the source of one.
    Fixtures {
        name: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct Input {
    /// A bundled fixture name.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    fixture: Option<String>,
    /// A `.sys` file.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long)]
    variant: Option<String>,
    /// Fixes a parameter, e.g. `--set p=3`; repeatable.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    sets: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Elapsed time on stderr.
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Ideal,
    Scaling,
    None,
}

impl PolicyArg {
    fn as_str(self) -> &'static str {
        match self {
            PolicyArg::Ideal => "ideal",
            PolicyArg::Scaling => "scaling",
            PolicyArg::None => "none",
        }
    }
}

/// A failure that stops the command before any report is produced.
struct Abort {
    code: u8,
    msg: String,
}

impl Abort {
    fn parse(msg: impl Into<String>) -> Self {
        Abort { code: EXIT_PARSE, msg: msg.into() }
    }
}

impl From<FixtureError> for Abort {
    fn from(e: FixtureError) -> Self {
        let code = match e {
            FixtureError::ValidationFailure { .. } | FixtureError::Structure(_) | FixtureError::Bracket(_) => EXIT_FAIL,
            _ => EXIT_PARSE,
        };
        Abort { code, msg: e.to_string() }
    }
}

/// One line of a flattened report.
#[derive(Serialize)]
struct Row {
    row: String,
    col: String,
    expected: String,
    computed: String,
    pass: bool,
}

/// A titled block of rows, rendered as one aligned table.
struct Group {
    section: &'static str,
    title: String,
    rows: Vec<Row>,
}

struct Output {
    command: &'static str,
    system: String,
    variant: Option<String>,
    groups: Vec<Group>,
    data: Value,
    pass: bool,
    refused: bool,
    /// Printed verbatim by the text format in place of the groups.
    verbatim: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (format, timing) = match &cli.command {
        Command::Fixtures { format, .. } => (*format, false),
        Command::Check(i) | Command::Classify(i) | Command::Noether(i) | Command::Variational(i) | Command::Report(i) => {
            (i.format, i.timing)
        }
        Command::Actions { input, .. } | Command::Brackets { input, .. } => (input.format, input.timing),
    };
    let result = run(cli.command);
    if timing {
        eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    }
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let written = match format {
                Format::Text => write_text(&mut stdout, &out),
                Format::Json => write_json(&mut stdout, &out),
                Format::Csv => write_csv(&mut stdout, &out),
            };
            if let Err(e) = written {
                eprintln!("jetbrackets: {e}");
                return ExitCode::from(1);
            }
            if out.refused {
                ExitCode::from(EXIT_REFUSED)
            } else if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Err(a) => {
            eprintln!("jetbrackets: {}", a.msg);
            ExitCode::from(a.code)
        }
    }
}

fn run(cmd: Command) -> Result<Output, Abort> {
    match cmd {
        Command::Fixtures { name, .. } => list_fixtures(name),
        Command::Check(input) => {
            // validation is the point here, so load without it and report
            let f = load(&input, false)?;
            let determining = f.determining_report();
            let commutators = f.commutator_report();
            let mut out = Output::new("check", &f);
            out.push_checks("determining", "determining equations", &determining);
            out.push_commutators(&commutators);
            out.data = json!({ "determining": determining, "commutators": commutators });
            Ok(out)
        }
        Command::Classify(input) => {
            let f = load(&input, true)?;
            let m = f.multiplier_report();
            let mut out = Output::new("classify", &f);
            out.push_multipliers(&m);
            out.data = json!({ "multipliers": m });
            Ok(out)
        }
        Command::Actions { input, kind } => {
            let f = load(&input, true)?;
            let sets = parse_sets(&input.sets, &f)?;
            let mut reports = Vec::new();
            for t in f.file.tables.iter().filter(|t| t.ty == TableType::Action && kind.is_none_or(|k| t.kind == k)) {
                let mut all = t.sets.clone();
                all.extend(sets.clone());
                reports.push(if all.is_empty() { f.action_table_report(t) } else { f.action_table_report_at(t, &all) });
            }
            if let (Some(k), true) = (kind, reports.is_empty()) {
                reports.push(f.computed_action_table(k));
            }
            let mut out = Output::new("actions", &f);
            for r in &reports {
                out.push_action_table(r);
            }
            out.data = json!({ "action_tables": reports });
            Ok(out)
        }
        Command::Brackets { input, kind, q, policy, scaling } => {
            let f = load(&input, true)?;
            let sets = parse_sets(&input.sets, &f)?;
            let mut reports = Vec::new();
            let mut isos: Vec<IsomorphismCheck> = Vec::new();
            match q {
                Some(text) => {
                    let q = parse_q(&text, &f)?;
                    let policy = policy.map(PolicyArg::as_str);
                    // a listed table for the same q supplies golden values
                    let listed = f.file.tables.iter().find(|t| {
                        t.ty == TableType::Bracket
                            && t.q.as_ref() == Some(&q)
                            && kind.is_none_or(|k| t.kind == k)
                            && policy.is_none_or(|p| t.policy.as_deref().unwrap_or("ideal") == p)
                            && scaling.as_ref().is_none_or(|s| t.scaling.as_ref() == Some(s))
                    });
                    match listed {
                        Some(t) => reports.push(bracket_with_sets(&f, t, &sets)),
                        None => {
                            let k = kind.ok_or_else(|| Abort::parse("--kind is required for a q with no listed table"))?;
                            reports.push(f.bracket_query(k, q, policy, scaling.as_deref(), &sets));
                        }
                    }
                }
                None => {
                    for t in f.file.tables.iter().filter(|t| t.ty == TableType::Bracket && kind.is_none_or(|k| t.kind == k)) {
                        reports.push(bracket_with_sets(&f, t, &sets));
                    }
                    isos = f.isomorphism_report();
                }
            }
            let mut out = Output::new("brackets", &f);
            for r in &reports {
                out.push_bracket_table(r);
            }
            out.push_isomorphisms(&isos);
            out.data = json!({ "bracket_tables": reports, "isomorphisms": isos });
            Ok(out)
        }
        Command::Noether(input) => {
            let f = load(&input, true)?;
            let n = f.noether_report();
            let w = f.integrand_report();
            let mut out = Output::new("noether", &f);
            out.push_noether(&n);
            out.push_checks("integrands", "symplectic integrands", &w);
            out.data = json!({ "noether": n, "integrands": w });
            Ok(out)
        }
        Command::Variational(input) => {
            let f = load(&input, true)?;
            let v = f.variational_report();
            let r = f.relation_report();
            let mut out = Output::new("variational", &f);
            out.push_checks("variational", "variational forms", &v);
            out.push_checks("relations", "relations", &r);
            out.data = json!({ "variational": v, "relations": r });
            Ok(out)
        }
        Command::Report(input) => {
            let f = load(&input, true)?;
            let r = f.full_report();
            let mut out = Output::new("report", &f);
            out.push_checks("determining", "determining equations", &r.determining);
            out.push_commutators(&r.commutators);
            for t in &r.action_tables {
                out.push_action_table(t);
            }
            for t in &r.bracket_tables {
                out.push_bracket_table(t);
            }
            out.push_isomorphisms(&r.isomorphisms);
            out.push_multipliers(&r.multipliers);
            out.push_noether(&r.noether);
            out.push_checks("integrands", "symplectic integrands", &r.integrands);
            out.push_checks("variational", "variational forms", &r.variational);
            out.push_checks("relations", "relations", &r.relations);
            out.data = serde_json::to_value(&r).expect("reports serialize");
            Ok(out)
        }
    }
}

fn load(input: &Input, validate: bool) -> Result<std::sync::Arc<Fixture>, Abort> {
    let variant = input.variant.as_deref();
    match (&input.fixture, &input.file) {
        (Some(name), _) if validate => Ok(fixtures::load_fixture_variant(name, variant)?),
        (Some(name), _) => Ok(std::sync::Arc::new(fixtures::parse_unvalidated(&fixtures::fixture_source(name)?, variant)?)),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Abort::parse(format!("cannot read {}: {e}", path.display())))?;
            let f = if validate {
                fixtures::load_from_text(&text, variant)?
            } else {
                fixtures::parse_unvalidated(&text, variant)?
            };
            Ok(std::sync::Arc::new(f))
        }
        (None, None) => Err(Abort::parse("one of --fixture or --file is required")),
    }
}

fn parse_sets(sets: &[String], f: &Fixture) -> Result<BTreeMap<Symbol, Rat>, Abort> {
    let scope = f.file.scope();
    sets.iter()
        .map(|s| dsl::parse_assignment(s, &scope).map_err(|e| Abort::parse(format!("--set {s}: {e}"))))
        .collect()
}

fn parse_q(text: &str, f: &Fixture) -> Result<LinComb, Abort> {
    dsl::parse_lincomb(text, &f.file.adj_labels(), &f.file.scope()).map_err(|e| Abort::parse(format!("--q {text}: {e}")))
}

fn bracket_with_sets(f: &Fixture, t: &dsl::Table, sets: &BTreeMap<Symbol, Rat>) -> BracketTableReport {
    if sets.is_empty() {
        return f.bracket_table_report(t);
    }
    let mut t = t.clone();
    t.sets.extend(sets.clone());
    f.bracket_table_report(&t)
}

fn list_fixtures(name: Option<String>) -> Result<Output, Abort> {
    let mut out = Output {
        command: "fixtures",
        system: String::new(),
        variant: None,
        groups: Vec::new(),
        data: Value::Null,
        pass: true,
        refused: false,
        verbatim: None,
    };
    if let Some(name) = name {
        let text = fixtures::fixture_source(&name)?;
        out.system = name;
        out.groups.push(Group {
            section: "source",
            title: out.system.clone(),
            rows: text.lines().enumerate().map(|(i, l)| row((i + 1).to_string(), "", "", l.to_string(), true)).collect(),
        });
        out.data = json!({ "source": text });
        out.verbatim = Some(text);
        return Ok(out);
    }
    let mut rows = Vec::new();
    let mut data = Vec::new();
    for name in FIXTURE_NAMES {
        let text = fixtures::fixture_source(name)?;
        let file = dsl::parse_system(&text).map_err(|e| Abort::parse(format!("{name}: {e}")))?;
        let variants: Vec<String> = file.variants.iter().map(|v| v.name.clone()).collect();
        let params: Vec<String> = file.parameters.iter().map(|p| p.to_string()).collect();
        rows.push(row(name.to_string(), variants.join(" "), "", params.join(" "), true));
        data.push(json!({ "name": name, "variants": variants, "parameters": params }));
    }
    out.groups.push(Group { section: "fixtures", title: "bundled fixtures".into(), rows });
    out.data = json!({ "fixtures": data });
    Ok(out)
}

fn row(r: impl Into<String>, c: impl Into<String>, e: impl Into<String>, v: impl Into<String>, pass: bool) -> Row {
    Row { row: r.into(), col: c.into(), expected: e.into(), computed: v.into(), pass }
}

fn cell_row(c: &Cell) -> Row {
    row(c.row.clone(), c.col.clone(), c.expected.clone().unwrap_or_default(), c.computed.clone(), c.pass)
}

fn flag(b: Option<bool>) -> String {
    b.map_or("-".into(), |b| b.to_string())
}

impl Output {
    fn new(command: &'static str, f: &Fixture) -> Self {
        Output {
            command,
            system: f.name().to_string(),
            variant: f.variant().map(str::to_string),
            groups: Vec::new(),
            data: Value::Null,
            pass: true,
            refused: false,
            verbatim: None,
        }
    }

    fn push(&mut self, section: &'static str, title: String, rows: Vec<Row>) {
        self.pass &= rows.iter().all(|r| r.pass);
        self.groups.push(Group { section, title, rows });
    }

    fn push_checks(&mut self, section: &'static str, title: &str, checks: &[CheckReport]) {
        if checks.is_empty() {
            return;
        }
        let rows = checks
            .iter()
            .map(|c| {
                let method = serde_json::to_value(c.method).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
                let residual = if c.residual.is_empty() { "0".to_string() } else { c.residual.join("; ") };
                row(c.subject.clone(), method, "0", residual, c.pass)
            })
            .collect();
        self.push(section, title.to_string(), rows);
    }

    fn push_commutators(&mut self, r: &CommutatorReport) {
        let mut rows: Vec<Row> = r.cells.iter().map(cell_row).collect();
        rows.push(row("antisymmetry", "", "true", r.antisymmetric.to_string(), r.antisymmetric));
        rows.push(row("jacobi", "", "true", r.jacobi.to_string(), r.jacobi));
        self.push("commutators", "commutators".into(), rows);
    }

    fn push_action_table(&mut self, r: &ActionTableReport) {
        let mut rows: Vec<Row> = r.cells.iter().map(cell_row).collect();
        if let Some(e) = &r.error {
            rows.push(row("error", "", "", e.clone(), false));
        }
        self.push("actions", format!("{} (action {})", r.name, r.kind), rows);
        if let Some(sub) = &r.instantiated {
            self.push_action_table_titled(sub, format!("{} (action {}, instantiated)", r.name, r.kind));
        }
    }

    fn push_action_table_titled(&mut self, r: &ActionTableReport, title: String) {
        let mut rows: Vec<Row> = r.cells.iter().map(cell_row).collect();
        if let Some(e) = &r.error {
            rows.push(row("error", "", "", e.clone(), false));
        }
        self.push("actions", title, rows);
    }

    fn push_bracket_table(&mut self, r: &BracketTableReport) {
        self.push_bracket_titled(r, format!("{} (action {}, q = {}, {})", r.name, r.kind, r.q, r.policy));
        if let Some(sub) = &r.instantiated {
            self.push_bracket_titled(sub, format!("{} (instantiated, q = {})", r.name, sub.q));
        }
        // also covers checks that have no row of their own
        self.pass &= r.pass;
    }

    fn push_bracket_titled(&mut self, r: &BracketTableReport, title: String) {
        let mut rows = Vec::new();
        let kernel = format!("[{}]", r.kernel_computed.join(", "));
        match &r.kernel_expected {
            Some(k) => rows.push(row("kernel", "", format!("[{}]", k.join(", ")), kernel, r.kernel_pass)),
            None => rows.push(row("kernel", "", "", kernel, true)),
        }
        let ideal_ok = r.ideal_expected.is_none_or(|e| e == r.ideal_computed);
        rows.push(row("ideal", "", flag(r.ideal_expected), r.ideal_computed.to_string(), ideal_ok));
        rows.extend(r.inverses.iter().map(cell_row));
        rows.extend(r.entries.iter().map(cell_row));
        if r.antisymmetric.is_some() {
            rows.push(row("antisymmetry", "", "true", flag(r.antisymmetric), r.antisymmetric == Some(true)));
            rows.push(row("jacobi", "", "true", flag(r.jacobi), r.jacobi == Some(true)));
        }
        if let Some(e) = &r.error {
            rows.push(row(if r.refused { "refused" } else { "error" }, "", "", e.clone(), false));
        }
        self.refused |= r.refused;
        self.push("brackets", title, rows);
    }

    fn push_isomorphisms(&mut self, isos: &[IsomorphismCheck]) {
        if isos.is_empty() {
            return;
        }
        let rows = isos
            .iter()
            .map(|i| {
                let detail = match (&i.report, &i.error) {
                    (Some(r), _) if r.failures.is_empty() => {
                        format!("homomorphism={} injective={} onto={}", r.homomorphism, r.injective, r.onto)
                    }
                    (Some(r), _) => r.failures.join("; "),
                    (None, Some(e)) => e.clone(),
                    (None, None) => String::new(),
                };
                row(i.name.clone(), "isomorphism", "", detail, i.pass)
            })
            .collect();
        self.push("isomorphisms", "isomorphisms".into(), rows);
    }

    fn push_multipliers(&mut self, ms: &[MultiplierCheck]) {
        let label = |m: bool| if m { "multiplier" } else { "non-multiplier" };
        let rows = ms
            .iter()
            .map(|m| {
                let mut computed = label(m.report.multiplier).to_string();
                if let Some(s) = m.report.self_adjoint {
                    computed.push_str(if s { ", self-adjoint" } else { ", not self-adjoint" });
                }
                if let Some(e) = &m.error {
                    computed = format!("error: {e}");
                }
                row(m.report.subject.clone(), "euler", m.expected.map(label).unwrap_or("-"), computed, m.pass)
            })
            .collect();
        self.push("multipliers", "multipliers".into(), rows);
    }

    fn push_noether(&mut self, ns: &[NoetherCheck]) {
        if ns.is_empty() {
            return;
        }
        let mut rows = Vec::new();
        for n in ns {
            rows.push(row(n.name.clone(), "operator", n.expected.clone(), n.computed.clone(), n.matches));
            rows.push(row(n.name.clone(), "action3", "true", n.reproduces_action3.to_string(), n.reproduces_action3));
            if let Some(s) = n.skew_adjoint {
                rows.push(row(n.name.clone(), "skew", "true", s.to_string(), s));
            }
            if let Some(e) = &n.error {
                rows.push(row(n.name.clone(), "error", "", e.clone(), false));
            }
        }
        self.push("noether", "noether operators".into(), rows);
    }
}

fn write_text(w: &mut impl Write, out: &Output) -> std::io::Result<()> {
    if let Some(text) = &out.verbatim {
        return w.write_all(text.as_bytes());
    }
    let variant = out.variant.as_deref().map(|v| format!(" [{v}]")).unwrap_or_default();
    if !out.system.is_empty() {
        writeln!(w, "{}{} :: {}", out.system, variant, out.command)?;
    }
    for g in &out.groups {
        writeln!(w)?;
        let ok = g.rows.iter().all(|r| r.pass);
        writeln!(w, "== {}{}", g.title, if ok { "" } else { " (FAIL)" })?;
        let wr = g.rows.iter().map(|r| r.row.chars().count()).max().unwrap_or(0);
        let wc = g.rows.iter().map(|r| r.col.chars().count()).max().unwrap_or(0);
        let wv = g.rows.iter().map(|r| r.computed.chars().count()).max().unwrap_or(0);
        let show_expected = g.rows.iter().any(|r| !r.expected.is_empty());
        for r in &g.rows {
            let mark = if r.pass { "ok  " } else { "FAIL" };
            let mut line = format!("{mark}  {:wr$}  {:wc$}  {:wv$}", r.row, r.col, r.computed);
            if show_expected && !r.pass && !r.expected.is_empty() {
                line.push_str(&format!("  expected {}", r.expected));
            }
            writeln!(w, "{}", line.trim_end())?;
        }
    }
    writeln!(w)?;
    let verdict = if out.refused {
        "REFUSED"
    } else if out.pass {
        "PASS"
    } else {
        "FAIL"
    };
    writeln!(w, "{verdict}")
}

fn write_json(w: &mut impl Write, out: &Output) -> std::io::Result<()> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": out.command,
        "system": out.system,
        "variant": out.variant,
        "pass": out.pass && !out.refused,
        "refused": out.refused,
        "result": out.data,
    });
    serde_json::to_writer_pretty(&mut *w, &doc)?;
    writeln!(w)
}

fn write_csv(w: &mut impl Write, out: &Output) -> std::io::Result<()> {
    let mut cw = csv::Writer::from_writer(w);
    cw.write_record(["section", "table", "row", "col", "expected", "computed", "pass"])?;
    for g in &out.groups {
        for r in &g.rows {
            let pass = r.pass.to_string();
            cw.write_record([g.section, g.title.as_str(), &r.row, &r.col, &r.expected, &r.computed, &pass])?;
        }
    }
    cw.flush()
}
