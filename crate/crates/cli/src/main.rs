use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use tate::group::GroupSpec;
use tate::massey::{GradedMatrix, Massey, MasseyResult};
use tate::ring::{NamedElement, NamedMonomial, TateRing};
use tate::scalars::Field;
use tate::secondary::{q8_fundamental_domain, triples_by_total_degree, triples_in_window, MTable, Secondary, Q8_NONZERO_ENTRIES};
use tate::suite::{run_criterion, CriterionReport, CRITERIA};
use tate::verdict::{gamma_verdict, GammaVerdict, VerdictOptions, Witness};

#[derive(Parser)]
#[command(name = "tate", version, about = "Tate cohomology, secondary multiplication and Massey products for finite p-groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Target {
    /// Q8, C4, C2xC2xC2, Z/4xZ/2, ...
    #[arg(long)]
    group: String,
    /// 2, 3, 5, 4 (= 2^2), ...; defaults to the prime of the group.
    #[arg(long)]
    field: Option<String>,
    /// Degree window lo..hi.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<(i64, i64)>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Ranks of the complete resolution, with optional exactness and minimality checks.
    Resolve {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        check_exact: bool,
    },
    /// Multiplication table of named monomials with |degree| ≤ max-degree.
    Ring {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 3)]
        max_degree: i64,
    },
    /// The secondary multiplication m on the fundamental domain (Q8) or on a range of triples.
    MTable {
        #[command(flatten)]
        target: Target,
        /// Bound on |a| + |b| + |c| for abelian groups of rank ≥ 2.
        #[arg(long, default_value_t = 4)]
        bound: i64,
        #[arg(long, conflicts_with = "json")]
        text: bool,
    },
    /// Whether γ_G vanishes, with a witness.
    Gamma {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 4)]
        bound: i64,
    },
    /// An ordinary or matric Massey triple product.
    Massey {
        #[command(flatten)]
        target: Target,
        /// a,b,c as named ring elements.
        #[arg(long, required_unless_present = "matric")]
        triple: Option<String>,
        /// JSON file with matrices "W", "X", "Y", each given by "entries" and optional "target"/"source" shifts.
        #[arg(long)]
        matric: Option<PathBuf>,
    },
    /// Runs the reproduction suite.
    Verify {
        #[arg(long, default_value = "paper")]
        suite: String,
        /// Run only these criteria (1 to 9).
        #[arg(long)]
        criterion: Vec<u32>,
        #[arg(long)]
        json: bool,
    },
}

/// An error in the user's input, reported with exit code 2.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<E: fmt::Display>(e: E) -> anyhow::Error {
    Usage(format!("{e:#}")).into()
}

fn out(s: &str) {
    // a closed pipe is not an error for a report
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or("expected lo..hi")?;
    let lo: i64 = a.trim().parse().map_err(|_| format!("bad bound `{a}`"))?;
    let hi: i64 = b.trim().parse().map_err(|_| format!("bad bound `{b}`"))?;
    if lo > hi {
        return Err("empty window".into());
    }
    Ok((lo, hi))
}

fn seed() -> u64 {
    std::env::var("TATE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0)
}

struct Setup {
    group: GroupSpec,
    field: Arc<Field>,
    ring: Arc<TateRing>,
    window: (i64, i64),
}

fn setup(t: &Target, default_window: (i64, i64)) -> Result<Setup> {
    let group = GroupSpec::parse(&t.group).map_err(usage)?;
    let field = match &t.field {
        Some(f) => Field::parse(f).map_err(usage)?,
        None => group.default_field().map_err(usage)?,
    };
    let ring = group.ring(&field).map_err(usage)?;
    Ok(Setup { group, field, ring, window: t.window.unwrap_or(default_window) })
}

fn emit(json: bool, value: Value, text: String) {
    if json {
        out(&(serde_json::to_string_pretty(&value).expect("serializable") + "\n"));
    } else {
        out(&text);
    }
}

fn cmd_resolve(t: &Target, check: bool) -> Result<bool> {
    let s = setup(t, (-6, 6))?;
    let res = s.ring.resolution();
    let ranks: Vec<Value> = (s.window.0..=s.window.1).map(|n| json!({ "degree": n, "rank": res.rank(n) })).collect();
    let mut text = format!("{} over F_{}\n", s.group, s.field);
    for n in s.window.0..=s.window.1 {
        text.push_str(&format!("rank P_{n} = {}\n", res.rank(n)));
    }
    let mut passed = true;
    let mut checks = Vec::new();
    if check {
        for r in [res.verify_exact(s.window), res.verify_minimal(s.window)] {
            text.push_str(&format!("{}: {}\n", r.name, if r.passed { "pass" } else { "FAIL" }));
            for f in &r.failures {
                text.push_str(&format!("  {f}\n"));
            }
            passed &= r.passed;
            checks.push(serde_json::to_value(&r)?);
        }
    }
    let v = json!({ "schema": 1, "group": s.group.to_string(), "field": s.field.to_string(), "window": s.window, "ranks": ranks, "checks": checks });
    emit(t.json, v, text);
    Ok(passed)
}

fn monomials(ring: &TateRing, bound: i64) -> Result<Vec<NamedMonomial>> {
    let mut out = Vec::new();
    for d in -bound..=bound {
        out.extend(ring.basis(d)?);
    }
    Ok(out)
}

fn cmd_ring(t: &Target, max: i64) -> Result<bool> {
    let s = setup(t, (-8, 8))?;
    let monos = monomials(&s.ring, max)?;
    let mut rows = Vec::new();
    let mut text = format!("{} over F_{}: products of monomials with |degree| <= {max}\n", s.group, s.field);
    for a in &monos {
        for b in &monos {
            let p = s.ring.render(&s.ring.multiply_monomials(a, b)?);
            text.push_str(&format!("{a} * {b} = {p}\n"));
            rows.push(json!({ "a": a.to_string(), "b": b.to_string(), "product": p }));
        }
    }
    emit(t.json, json!({ "schema": 1, "group": s.group.to_string(), "field": s.field.to_string(), "max_degree": max, "products": rows }), text);
    Ok(true)
}

fn render_triple(k: &(NamedMonomial, NamedMonomial, NamedMonomial)) -> String {
    format!("m({}, {}, {})", k.0, k.1, k.2)
}

fn cmd_mtable(t: &Target, bound: i64, json_out: bool) -> Result<bool> {
    let s = setup(t, (-8, 8))?;
    let sec = Secondary::new(s.ring.clone(), s.window)?;
    let (table, domain): (MTable, String) = match s.group {
        GroupSpec::Q8 => (sec.q8_table()?, "fundamental domain (B ∪ Bs) × B × B, extended by m(as^2h, bs^i, cs^j) = m(a, b, c)s^(2h+i+j)".into()),
        GroupSpec::Abelian(ref ms) if ms.len() == 1 => (sec.table(&triples_in_window(&s.ring, s.window)?, true)?, format!("all triples with degrees in {:?}", s.window)),
        GroupSpec::Abelian(_) => (sec.table(&triples_by_total_degree(&s.ring, bound)?, true)?, format!("all triples with |a| + |b| + |c| <= {bound}")),
    };
    let ring = &s.ring;
    let mut text = String::new();
    if s.group == GroupSpec::Q8 && s.field.order() == 2 {
        // the known nonzero entries in their listing order, three columns
        let mut lines = Vec::new();
        for (a, b, c, _) in Q8_NONZERO_ENTRIES {
            let key = (single(ring, a)?, single(ring, b)?, single(ring, c)?);
            let v = table.entries.get(&key).map(|v| ring.render(v)).unwrap_or_else(|| "0".into());
            lines.push(format!("{} = {v}", render_triple(&key)));
        }
        let width = lines.iter().map(|l| l.chars().count()).max().unwrap_or(0);
        for row in 0..10 {
            let cells: Vec<String> = [row, row + 10, row + 20]
                .iter()
                .filter_map(|&i| lines.get(i))
                .map(|l| format!("{l}{}", " ".repeat(width - l.chars().count())))
                .collect();
            text.push_str(cells.join(" | ").trim_end());
            text.push('\n');
        }
        let listed: std::collections::BTreeSet<_> =
            Q8_NONZERO_ENTRIES.iter().map(|(a, b, c, _)| (single(ring, a).ok(), single(ring, b).ok(), single(ring, c).ok())).collect();
        for (k, v) in table.nonzero() {
            if !listed.contains(&(Some(k.0.clone()), Some(k.1.clone()), Some(k.2.clone()))) {
                text.push_str(&format!("{} = {}\n", render_triple(k), ring.render(v)));
            }
        }
    } else {
        for (k, v) in table.nonzero() {
            text.push_str(&format!("{} = {}\n", render_triple(k), ring.render(v)));
        }
    }
    let nonzero = table.nonzero().count();
    text.push_str(&format!("{nonzero} nonzero of {} triples; zero on all others ({domain})\n", table.entries.len()));
    let entries: Vec<Value> = table
        .entries
        .iter()
        .map(|(k, v)| json!({ "a": k.0.to_string(), "b": k.1.to_string(), "c": k.2.to_string(), "value": ring.render(v) }))
        .collect();
    let v = json!({
        "schema": 1,
        "group": s.group.to_string(),
        "field": s.field.to_string(),
        "window": s.window,
        "domain": domain,
        "nonzero": nonzero,
        "entries": entries,
    });
    emit(json_out, v, text);
    if s.group == GroupSpec::Q8 && s.field.order() == 2 {
        return Ok(q8_matches(ring, &table)?);
    }
    Ok(true)
}

fn single(ring: &TateRing, s: &str) -> Result<NamedMonomial> {
    let t = ring.terms(&ring.parse(s)?)?;
    t.first().map(|x| x.0.clone()).ok_or_else(|| anyhow!("`{s}` is zero"))
}

fn q8_matches(ring: &TateRing, table: &MTable) -> Result<bool> {
    let mut ok = table.entries.len() == q8_fundamental_domain().len();
    for (a, b, c, v) in Q8_NONZERO_ENTRIES {
        let key = (single(ring, a)?, single(ring, b)?, single(ring, c)?);
        ok &= table.entries.get(&key) == Some(&ring.parse(v)?);
    }
    ok &= table.nonzero().count() == Q8_NONZERO_ENTRIES.len();
    Ok(ok)
}

fn witness_text(v: &GammaVerdict) -> String {
    match &v.witness {
        Witness::Trivial { pairs, d_condition, normalized, ideal_maps, triples, nonzero_entries } => {
            let mut s = format!("{pairs} f2 pairs, d-condition {}, normalized {}", yes(*d_condition), yes(*normalized));
            if let Some(i) = ideal_maps {
                s.push_str(&format!(", I-maps {}", yes(*i)));
            }
            s + &format!("; m vanishes on {} of {triples} triples", triples - nonzero_entries)
        }
        Witness::Massey { triple, representative, indeterminacy_dim, contains_zero } => format!(
            "<{}> = {representative} + indeterminacy of dimension {indeterminacy_dim}; contains 0: {}",
            triple.join(", "),
            yes(*contains_zero)
        ),
        Witness::Coboundary { certificate, rows } => {
            let mut s = format!("m = dg has no solution: {} of {rows} equations are inconsistent", certificate.len());
            for (row, value) in certificate {
                s.push_str(&format!("\n  m({}, {}, {}) at {}: {value}", row.triple.0, row.triple.1, row.triple.2, row.coordinate));
            }
            s
        }
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_gamma(t: &Target, bound: i64) -> Result<bool> {
    let s = setup(t, (-8, 8))?;
    let opts = VerdictOptions { window: s.window, bound };
    let v = gamma_verdict(&s.group, Some(s.field.clone()), &opts)?;
    let text = format!(
        "{} over F_{}: {}\nwitness: {}\nreplay seed: {}\n",
        v.group,
        v.field,
        if v.trivial { "trivial" } else { "nontrivial" },
        witness_text(&v),
        seed()
    );
    let mut value = serde_json::to_value(&v)?;
    value["schema"] = json!(1);
    value["certified"] = json!(v.certified());
    value["seed"] = json!(seed());
    emit(t.json, value, text);
    Ok(v.certified())
}

fn matrix_from_json(ring: &TateRing, v: &Value, name: &str) -> Result<GradedMatrix> {
    let m = v.get(name).ok_or_else(|| usage(format!("matrix `{name}` missing")))?;
    let rows: Vec<Vec<String>> = serde_json::from_value(m.get("entries").cloned().unwrap_or(Value::Null))
        .map_err(|e| usage(format!("{name}.entries: {e}")))?;
    let parsed: Vec<Vec<NamedElement>> = rows
        .iter()
        .map(|r| r.iter().map(|s| ring.parse(s).map_err(usage)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    match (m.get("target"), m.get("source")) {
        (Some(tg), Some(sc)) => {
            let tg: Vec<i64> = serde_json::from_value(tg.clone()).map_err(usage)?;
            let sc: Vec<i64> = serde_json::from_value(sc.clone()).map_err(usage)?;
            GradedMatrix::new(ring, tg, sc, parsed).map_err(usage)
        }
        _ => {
            let refs: Vec<Vec<&str>> = rows.iter().map(|r| r.iter().map(|s| s.as_str()).collect()).collect();
            GradedMatrix::parse(ring, &refs).map_err(usage)
        }
    }
}

/// Splits on commas outside parentheses, so `phi(0,1)` stays whole.
fn split_top_level(s: &str) -> Vec<&str> {
    let (mut depth, mut start, mut parts) = (0i32, 0, Vec::new());
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts
}

fn massey_value(ring: &TateRing, r: &MasseyResult) -> Value {
    json!({
        "representative": r.representative.render(ring),
        "indeterminacy_dim": r.indeterminacy_dim,
        "indeterminacy": r.indeterminacy.iter().map(|m| m.render(ring)).collect::<Vec<_>>(),
        "contains_zero": r.contains_zero,
    })
}

fn cmd_massey(t: &Target, triple: &Option<String>, matric: &Option<PathBuf>) -> Result<bool> {
    let s = setup(t, (-8, 8))?;
    let m = Massey::new(s.ring.clone(), s.window);
    let ring = &s.ring;
    let (label, result) = if let Some(path) = matric {
        let raw = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
        let v: Value = serde_json::from_str(&raw).map_err(usage)?;
        let (w, x, y) = (matrix_from_json(ring, &v, "W")?, matrix_from_json(ring, &v, "X")?, matrix_from_json(ring, &v, "Y")?);
        ("<W, X, Y>".to_string(), m.matric(&w, &x, &y).map_err(usage)?)
    } else {
        let spec = triple.as_deref().unwrap_or_default();
        let parts = split_top_level(spec);
        let [a, b, c] = parts.as_slice() else { return Err(usage("--triple expects a,b,c")) };
        let (ea, eb, ec) = (ring.parse(a).map_err(usage)?, ring.parse(b).map_err(usage)?, ring.parse(c).map_err(usage)?);
        (format!("<{a}, {b}, {c}>"), m.triple(&ea, &eb, &ec).map_err(usage)?)
    };
    let rep = result.representative.render(ring);
    let rep_text = if rep.len() == 1 && rep[0].len() == 1 { rep[0][0].clone() } else { format!("{rep:?}") };
    let text = format!(
        "{label} = {rep_text} + indeterminacy of dimension {}\ncontains 0: {}\n",
        result.indeterminacy_dim,
        yes(result.contains_zero)
    );
    let mut v = massey_value(ring, &result);
    v["schema"] = json!(1);
    v["group"] = json!(s.group.to_string());
    v["field"] = json!(s.field.to_string());
    emit(t.json, v, text);
    Ok(true)
}

fn cmd_verify(suite: &str, only: &[u32], json_out: bool) -> Result<bool> {
    if suite != "paper" {
        return Err(usage(format!("unknown suite `{suite}`")));
    }
    let ids: Vec<u32> = if only.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { only.to_vec() };
    let seed = seed();
    let mut reports: Vec<CriterionReport> = Vec::new();
    for id in ids {
        let r = run_criterion(id, seed).ok_or_else(|| usage(format!("no criterion {id}")))?;
        if !json_out {
            out(&format!("{}\n", r.line()));
        }
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.passed);
    if json_out {
        let v = json!({ "schema": 1, "suite": suite, "seed": seed, "passed": passed, "criteria": reports });
        out(&(serde_json::to_string_pretty(&v)? + "\n"));
    } else {
        out(if passed { "all criteria passed\n" } else { "some criteria FAILED\n" });
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.command {
        Command::Resolve { target, check_exact } => cmd_resolve(target, *check_exact),
        Command::Ring { target, max_degree } => cmd_ring(target, *max_degree),
        Command::MTable { target, bound, text } => cmd_mtable(target, *bound, target.json && !text),
        Command::Gamma { target, bound } => cmd_gamma(target, *bound),
        Command::Massey { target, triple, matric } => cmd_massey(target, triple, matric),
        Command::Verify { suite, criterion, json } => cmd_verify(suite, criterion, *json),
    };
    match out {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.downcast_ref::<Usage>().is_some() => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
