//! Command-line driver. Exit codes: 0 pass, 1 check failure, 2 usage, 3 bound refusal.

use std::fmt::Display;
use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use serde_json::json;

use crate::field::{FieldCtx, FieldError};
use crate::hilbzip::{self, HilbertZip, PermSpec, ZipError, ZipReport};
use crate::schubert::{hasse_section, torus_weight_space, vanishing_order_on_stratum, Order};
use crate::weylchar::{hodge_character, weyl_act, Character, CocharDatum, Perm, WeylElem};
use crate::zipgroup::{self, StrataRow, ZipGroupError};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    VerifyEquivalence,
    StrataTable,
    WeightSpace,
    Census,
    Orbits,
    ZipCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Tsv,
    Json,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "hasse-zip", version, about = "Exact checks for Hasse invariants of Hilbert F-zips over small finite fields")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long)]
    pub n: Option<usize>,
    /// `split`, `inert`, or comma-separated images such as `1,2,0`.
    #[arg(long, default_value = "split", value_parser = PermSpec::parse)]
    pub perm: PermSpec,
    /// Largest enumeration the run may perform.
    #[arg(long, default_value_t = zipgroup::DEFAULT_BOUND)]
    pub bound: u128,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// weight-space target: `eta`, `w0eta`, or `a1,...,an;c`.
    #[arg(long)]
    pub target: Option<String>,
    /// zip-check input file.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> RunConfig {
        RunConfig {
            command,
            p: 2,
            k: 1,
            n: None,
            perm: PermSpec::Split,
            bound: zipgroup::DEFAULT_BOUND,
            output: None,
            format: Format::Tsv,
            target: None,
            input: None,
        }
    }
}

enum Failure {
    Usage(String),
    Refused(String),
}

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<ZipError> for Failure {
    fn from(e: ZipError) -> Self {
        match e {
            ZipError::BoundExceeded { .. } => Failure::Refused(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn usage(msg: impl Display) -> Failure {
    Failure::Usage(msg.to_string())
}

/// Runs `config`, writing the report to `out` and diagnostics to `err`; returns the exit code.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut report = Vec::new();
    let result = dispatch(config, &mut report);
    let write_result = out.write_all(&report).and_then(|_| out.flush());
    match (result, write_result) {
        (_, Err(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAIL
        }
        (Ok(code), Ok(())) => code,
        (Err(Failure::Usage(m)), Ok(())) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        (Err(Failure::Refused(m)), Ok(())) => {
            let _ = writeln!(err, "refused: {m}");
            EXIT_REFUSED
        }
    }
}

/// Runs `config` against the configured output file, or stdout.
pub fn execute(config: &RunConfig) -> i32 {
    let mut stderr = io::stderr();
    match &config.output {
        Some(path) => match std::fs::File::create(path) {
            Ok(mut f) => run(config, &mut f, &mut stderr),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", path.display());
                EXIT_USAGE
            }
        },
        None => run(config, &mut io::stdout().lock(), &mut stderr),
    }
}

fn dispatch(config: &RunConfig, out: &mut Vec<u8>) -> Result<i32, Failure> {
    match config.command {
        Command::VerifyEquivalence => verify_equivalence(config, out),
        Command::StrataTable => strata_table(config, out),
        Command::WeightSpace => weight_space(config, out),
        Command::Census => strata(config, out, false),
        Command::Orbits => strata(config, out, true),
        Command::ZipCheck => zip_check(config, out),
    }
}

fn require_n(config: &RunConfig) -> Result<usize, Failure> {
    match config.n {
        Some(0) => Err(usage("--n must be at least 1")),
        Some(n) => Ok(n),
        None => Err(usage("--n is required for this command")),
    }
}

fn field(config: &RunConfig) -> Result<Arc<FieldCtx>, Failure> {
    Ok(FieldCtx::new(config.p, config.k)?)
}

fn emit_json(out: &mut Vec<u8>, value: &serde_json::Value) {
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    out.extend_from_slice(text.as_bytes());
    out.push(b'\n');
}

fn line(out: &mut Vec<u8>, s: impl Display) {
    out.extend_from_slice(format!("{s}\n").as_bytes());
}

fn verify_equivalence(config: &RunConfig, out: &mut Vec<u8>) -> Result<i32, Failure> {
    let n = require_n(config)?;
    let ctx = field(config)?;
    let perm = config.perm.build(n)?;
    let summary = hilbzip::verify_equivalence(&ctx, &perm, config.bound)?;
    match config.format {
        Format::Tsv => {
            for (z, r) in &summary.counterexamples {
                line(out, format_args!("counterexample\t{}\t{}", z.to_json(), r.tsv_row()));
            }
            line(out, format_args!("{}/{} consistent", summary.consistent, summary.total));
        }
        Format::Json => {
            let counterexamples: Vec<serde_json::Value> =
                summary.counterexamples.iter().map(|(z, r)| json!({ "zip": z.to_json(), "report": r })).collect();
            emit_json(
                out,
                &json!({
                    "p": ctx.p(),
                    "k": ctx.k(),
                    "n": n,
                    "perm": perm.images(),
                    "total": summary.total,
                    "consistent": summary.consistent,
                    "counterexamples": counterexamples,
                }),
            );
        }
    }
    Ok(if summary.all_consistent() { EXIT_PASS } else { EXIT_FAIL })
}

fn order_text(o: Order) -> String {
    o.to_string()
}

fn strata_table(config: &RunConfig, out: &mut Vec<u8>) -> Result<i32, Failure> {
    let n = require_n(config)?;
    if n > 20 {
        return Err(Failure::Refused(format!("2^{n} strata exceed the table limit")));
    }
    let ctx = field(config)?;
    let h = hasse_section(n, &ctx);
    let mut rows = Vec::new();
    let mut ok = true;
    for w in WeylElem::all(n) {
        let ord = vanishing_order_on_stratum(&h, &w).map_err(usage)?;
        let codim = n - w.length();
        ok &= ord == Order::Finite(codim);
        rows.push((w, codim, ord));
    }
    match config.format {
        Format::Tsv => {
            line(out, "w\tl(w)\tcodim\tord");
            for (w, codim, ord) in &rows {
                line(out, format_args!("{w}\t{}\t{codim}\t{}", w.length(), order_text(*ord)));
            }
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = rows
                .iter()
                .map(|(w, codim, ord)| json!({ "w": w.to_string(), "length": w.length(), "codim": codim, "ord": order_text(*ord) }))
                .collect();
            emit_json(out, &json!(rows));
        }
    }
    Ok(if ok { EXIT_PASS } else { EXIT_FAIL })
}

fn parse_target(spec: &str, n: usize) -> Result<Character, Failure> {
    let datum = CocharDatum::split(n, 2);
    match spec.trim() {
        "eta" => Ok(hodge_character(&datum)),
        "w0eta" => weyl_act(&WeylElem::longest(n), &hodge_character(&datum)).map_err(usage),
        other => {
            let (a, c) = other.split_once(';').ok_or_else(|| usage(format!("target {other:?} is not of the form a1,...,an;c")))?;
            let a = a
                .split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| usage(format!("bad target {other:?}: {e}")))?;
            let c = c.trim().parse::<i64>().map_err(|e| usage(format!("bad target {other:?}: {e}")))?;
            if a.len() != n {
                return Err(usage(format!("target has {} entries, expected {n}", a.len())));
            }
            Character::new(a, c).map_err(usage)
        }
    }
}

fn weight_space(config: &RunConfig, out: &mut Vec<u8>) -> Result<i32, Failure> {
    let n = require_n(config)?;
    if n > 16 {
        return Err(Failure::Refused(format!("2^{n} monomials exceed the weight-space limit")));
    }
    let ctx = field(config)?;
    let target = parse_target(config.target.as_deref().unwrap_or("eta"), n)?;
    let basis = torus_weight_space(n, &ctx, &target);
    match config.format {
        Format::Tsv => {
            line(out, "basis");
            for f in &basis {
                line(out, f);
            }
        }
        Format::Json => {
            let basis: Vec<serde_json::Value> = basis.iter().map(|f| f.to_json()).collect();
            emit_json(out, &json!({ "target": target, "dim": basis.len(), "basis": basis }));
        }
    }
    Ok(EXIT_PASS)
}

fn strata(config: &RunConfig, out: &mut Vec<u8>, with_orbits: bool) -> Result<i32, Failure> {
    let n = require_n(config)?;
    if config.perm.build(n)? != Perm::identity(n) {
        return Err(usage("group enumeration covers the split datum only; use --perm split"));
    }
    let ctx = field(config)?;
    let rows = match zipgroup::strata_rows(&ctx, n, config.bound) {
        Ok(rows) => rows,
        Err(e @ ZipGroupError::BoundExceeded { .. }) => return Err(Failure::Refused(e.to_string())),
        Err(e) => {
            line(out, format_args!("failure\t{e}"));
            return Ok(EXIT_FAIL);
        }
    };
    let borel = zipgroup::borel_lower(&ctx, n).len();
    let q = ctx.order() as usize;
    let ok = rows.iter().all(|r| {
        let census = r.cell_size == q.pow(r.length as u32) * borel;
        let orbits = r.orbit_sizes.iter().sum::<usize>() == r.cell_size;
        census && (!with_orbits || orbits)
    });
    match config.format {
        Format::Tsv => {
            line(out, StrataRow::TSV_HEADER);
            for r in &rows {
                line(out, r.tsv_row());
            }
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "w": r.w.to_string(),
                        "length": r.length,
                        "cell_size": r.cell_size,
                        "orbit_count": r.orbit_sizes.len(),
                        "orbit_sizes": r.orbit_sizes,
                    })
                })
                .collect();
            emit_json(out, &json!(rows));
        }
    }
    Ok(if ok { EXIT_PASS } else { EXIT_FAIL })
}

fn zip_check(config: &RunConfig, out: &mut Vec<u8>) -> Result<i32, Failure> {
    let path = config.input.as_ref().ok_or_else(|| usage("--input is required for zip-check"))?;
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let zip = HilbertZip::from_json_str(&text)?;
    let report = hilbzip::check_equivalence(&zip);
    match config.format {
        Format::Tsv => {
            line(out, ZipReport::TSV_HEADER);
            line(out, report.tsv_row());
        }
        Format::Json => emit_json(out, &json!({ "zip": zip.to_json(), "report": report })),
    }
    Ok(if report.consistent { EXIT_PASS } else { EXIT_FAIL })
}
