//! Argument parsing and command dispatch. [`run`] is the whole program;
//! `main` only wires it to the process streams.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{error::ErrorKind, Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;
use thiserror::Error;

use imagclass::classgroup::{class_number_with, ClassGroupError, Method};
use imagclass::diophantine::{solve_bs, BSInstance, DioError, DEFAULT_Y_BOUND};
use imagclass::fieldparams::ParamsError;
use imagclass::theorem::{
    check_condition_ii, cohn_preset, search_primes, verified_fraction, verify, verify_prime_power_family,
    verify_residue_family, SignMode, TheoremError, Verdict,
};

use crate::cache::{self, Cache};
use crate::jsonnum::to_number;
use crate::output::write_atomic;
use crate::reference::{parse_notes, parse_reference_table, Reference};
use crate::render;
use crate::table::{self, Bounds, Origin};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTE: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) => EXIT_COMPUTE,
        }
    }
}

impl From<ParamsError> for CliError {
    fn from(e: ParamsError) -> Self {
        match e {
            ParamsError::Arith(_) => CliError::Compute(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<ClassGroupError> for CliError {
    fn from(e: ClassGroupError) -> Self {
        match e {
            ClassGroupError::Form(_) | ClassGroupError::NotPrime(_) => CliError::Usage(e.to_string()),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<TheoremError> for CliError {
    fn from(e: TheoremError) -> Self {
        match e {
            TheoremError::Params(p) => p.into(),
            TheoremError::ClassGroup(c) => c.into(),
            TheoremError::BadInput(_) | TheoremError::QNotAdmissible { .. } | TheoremError::MDoesNotDivideD { .. } => {
                CliError::Usage(e.to_string())
            }
            TheoremError::Arith(_) | TheoremError::Invariant(_) => CliError::Compute(e.to_string()),
        }
    }
}

impl From<DioError> for CliError {
    fn from(e: DioError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Compute(format!("I/O error: {e}"))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "imagclass",
    version,
    about = "Class groups of the imaginary quadratic fields Q(sqrt(a^2 - 4p^n))"
)]
struct Cli {
    /// Worker threads for parallel commands (default: available processors).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify one triple: order of the class above p, conditions, class number.
    Verify(VerifyArgs),
    /// Compute a table of triples, optionally compared with a reference table.
    Table(TableArgs),
    /// Verify (a, p, n) for every usable prime p up to a bound.
    Search(SearchArgs),
    /// Solve D1 x^2 + D2 = lambda^2 p^y for y up to a bound.
    SolveBs(SolveArgs),
    /// Class number of a negative discriminant.
    Classnum(ClassnumArgs),
    /// Fixed specializations with unconditional divisibility claims.
    Preset {
        #[command(subcommand)]
        which: Preset,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(allow_negative_numbers = true)]
    a: BigInt,
    #[arg(allow_negative_numbers = true)]
    p: BigInt,
    n: u32,
    /// Also compute the class number.
    #[arg(long, short = 'c')]
    class_number: bool,
    /// Judge condition (ii) with the plus sign only.
    #[arg(long)]
    plus_only: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(1..))]
    a_max: u64,
    #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(1..))]
    p_max: u64,
    #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u32).range(1..))]
    n_max: u32,
    /// Skip triples whose d exceeds this.
    #[arg(long)]
    d_max: Option<u64>,
    /// Reference table (n,a,p,a2_minus_4pn,d,h,mark) to compare against.
    #[arg(long)]
    paper_csv: Option<PathBuf>,
    /// Known misprints in the reference table. Defaults to
    /// `<stem>.notes.csv` beside the reference table when present.
    #[arg(long)]
    paper_notes: Option<PathBuf>,
    /// Output file, written atomically (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Row cache (JSON lines). Overrides the IMAGCLASS_CACHE variable.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long, conflicts_with = "cache")]
    no_cache: bool,
}

#[derive(Args, Debug)]
struct SearchArgs {
    a: u64,
    n: u32,
    p_max: u64,
    #[arg(long, short = 'c')]
    class_number: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(allow_negative_numbers = true)]
    d1: BigInt,
    #[arg(allow_negative_numbers = true)]
    d2: BigInt,
    /// lambda^2: 1, 2 or 4.
    #[arg(allow_negative_numbers = true)]
    lambda_sq: BigInt,
    #[arg(allow_negative_numbers = true)]
    p: BigInt,
    #[arg(long, default_value_t = DEFAULT_Y_BOUND, value_parser = clap::value_parser!(u32).range(1..))]
    y_bound: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    ByA,
    ByB,
}

#[derive(Args, Debug)]
struct ClassnumArgs {
    #[arg(allow_negative_numbers = true)]
    delta: BigInt,
    #[arg(long, value_enum, default_value_t = MethodArg::ByA)]
    method: MethodArg,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Preset {
    /// a = 1, p = 2: d is the square-free part of 2^(n+2) - 1.
    Cohn {
        n: u32,
        #[arg(long)]
        json: bool,
    },
    /// a = q, n = q^m for a prime q >= 3: q^m divides h.
    PrimePower {
        q: u64,
        p: u64,
        m: u32,
        #[arg(long)]
        json: bool,
    },
    /// a = q, n = m^t with q mod m in [2, m-2] and m | d: m^t divides h.
    Residue {
        m: u64,
        t: u32,
        p: u64,
        q: u64,
        #[arg(long)]
        json: bool,
    },
}

/// Runs the program on `args` (including the program name) and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0) as usize)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return EXIT_COMPUTE;
        }
    };
    // The pool needs a Send closure, so output is buffered and copied out.
    let (res, obuf, ebuf) = pool.install(|| {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let res = dispatch(cli.command, &mut o, &mut e);
        (res, o, e)
    });
    let _ = out.write_all(&obuf);
    let _ = err.write_all(&ebuf);
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Verify(a) => cmd_verify(a, out),
        Command::Table(a) => cmd_table(a, out, err),
        Command::Search(a) => cmd_search(a, out),
        Command::SolveBs(a) => cmd_solve_bs(a, out),
        Command::Classnum(a) => cmd_classnum(a, out),
        Command::Preset { which } => cmd_preset(which, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn emit_json(out: &mut dyn Write, v: &serde_json::Value) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    emit(out, &s)
}

fn verdict_exit(v: &Verdict) -> i32 {
    if v.violates_theorem() {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    }
}

fn cmd_verify(args: VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut v = verify(&args.a, &args.p, args.n, args.class_number)?;
    if args.plus_only {
        v.cond_ii = check_condition_ii(&v.params.a, v.params.n, &v.params.d, SignMode::PlusOnly)
            .map_err(|e| CliError::Compute(e.to_string()))?;
    }
    if args.json {
        emit_json(out, &render::verdict_json(&v))?;
    } else {
        emit(out, &render::verdict_text(&v))?;
    }
    Ok(verdict_exit(&v))
}

fn notes_path_for(csv: &Path) -> PathBuf {
    let stem = csv
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    csv.with_file_name(format!("{stem}.notes.csv"))
}

fn load_reference(args: &TableArgs) -> Result<Option<Reference>, CliError> {
    let Some(csv) = &args.paper_csv else {
        if args.paper_notes.is_some() {
            return Err(CliError::Usage("--paper-notes requires --paper-csv".into()));
        }
        return Ok(None);
    };
    let read =
        |p: &Path| std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())));
    let rows = parse_reference_table(&read(csv)?).map_err(|e| CliError::Usage(format!("{}: {e}", csv.display())))?;
    let notes_path = match &args.paper_notes {
        Some(p) => Some(p.clone()),
        None => Some(notes_path_for(csv)).filter(|p| p.exists()),
    };
    let notes = match notes_path {
        Some(p) => parse_notes(&read(&p)?).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
        None => Vec::new(),
    };
    Ok(Some(Reference::new(rows, notes)))
}

fn cmd_table(args: TableArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let reference = load_reference(&args)?;
    let cache_path = if args.no_cache {
        None
    } else {
        cache::resolve_path(args.cache.as_deref())
    };
    let cached = match &cache_path {
        Some(p) => Cache::load(p)?,
        None => Cache::default(),
    };
    let bounds = Bounds {
        a_max: args.a_max,
        p_max: args.p_max,
        n_max: args.n_max,
        d_max: args.d_max,
    };
    let mut computed = table::compute_rows(&bounds, &cached.rows)?;
    computed.sort_by_key(|(r, _)| r.key());

    let mut rows: Vec<_> = computed.iter().map(|(r, _)| r.clone()).collect();
    let comparison = reference.as_ref().map(|r| table::join_reference(&mut rows, r));
    let body = match args.format {
        Format::Csv => table::render_csv(&rows),
        Format::Json => table::render_json(&rows),
    };
    match &args.out {
        Some(path) => write_atomic(path, body.as_bytes())?,
        None => emit(out, &body)?,
    }

    if let Some(p) = &cache_path {
        let fresh: Vec<_> = computed
            .iter()
            .filter(|(_, o)| *o == Origin::Computed)
            .map(|(r, _)| r)
            .collect();
        cache::append(p, &fresh)?;
    }

    let summary = table::summary(&computed, comparison.as_ref());
    let _ = err.write_all(summary.as_bytes());
    if cached.skipped > 0 {
        let _ = writeln!(err, "cache lines ignored: {}", cached.skipped);
    }
    if computed.iter().any(|(r, _)| r.violates()) {
        return Ok(EXIT_VIOLATION);
    }
    if comparison.is_some_and(|c| !c.regressions.is_empty()) {
        let _ = writeln!(err, "error: unexplained differences from the reference table");
        return Ok(EXIT_COMPUTE);
    }
    Ok(EXIT_OK)
}

fn cmd_search(args: SearchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let verdicts = search_primes(args.a, args.n, args.p_max, args.class_number)?;
    let (ok, total) = verified_fraction(&verdicts);
    if args.json {
        emit_json(
            out,
            &json!({
                "a": args.a,
                "n": args.n,
                "p_max": args.p_max,
                "verified": ok,
                "total": total,
                "verdicts": verdicts.iter().map(render::verdict_json).collect::<Vec<_>>(),
            }),
        )?;
    } else {
        let mut s = String::new();
        for v in &verdicts {
            let mut line = format!("p = {}: d = {}, order {}", v.params.p, v.params.d, v.order_of_class);
            if let Some(h) = v.class_number {
                line.push_str(&format!(", h = {h}"));
            }
            let status = if v.subgroup_verified {
                "verified"
            } else if v.violates_theorem() {
                "VIOLATION"
            } else if v.exceptional {
                "exceptional"
            } else {
                "not verified (hypotheses fail)"
            };
            s.push_str(&format!("{line} [{status}]\n"));
        }
        s.push_str(&format!("verified {ok} of {total} primes\n"));
        emit(out, &s)?;
    }
    Ok(if verdicts.iter().any(Verdict::violates_theorem) {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    })
}

fn cmd_solve_bs(args: SolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let inst = BSInstance::new(args.d1, args.d2, &args.lambda_sq, args.p)?;
    let sol = solve_bs(&inst, args.y_bound);
    if args.json {
        emit_json(out, &render::solution_json(&sol))?;
    } else {
        emit(out, &render::solution_text(&sol))?;
    }
    Ok(EXIT_OK)
}

fn cmd_classnum(args: ClassnumArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let method = match args.method {
        MethodArg::ByA => Method::EnumByA,
        MethodArg::ByB => Method::EnumByB,
    };
    let r = class_number_with(&args.delta, method)?;
    if args.json {
        emit_json(out, &json!({"discriminant": to_number(&r.delta), "h": r.h}))?;
    } else {
        emit(out, &format!("{}\n", r.h))?;
    }
    Ok(EXIT_OK)
}

fn cmd_preset(which: Preset, out: &mut dyn Write) -> Result<i32, CliError> {
    let (v, json_out, extra) = match which {
        Preset::Cohn { n, json } => (cohn_preset(n)?, json, None),
        Preset::PrimePower { q, p, m, json } => (verify_prime_power_family(q, p, m)?, json, None),
        Preset::Residue { m, t, p, q, json } => {
            let r = verify_residue_family(m, t, p, q)?;
            let extra = (r.residue, r.cofactor);
            (r.verdict, json, Some(extra))
        }
    };
    if json_out {
        let mut j = render::verdict_json(&v);
        if let Some((residue, cofactor)) = &extra {
            j["residue"] = json!(residue);
            j["cofactor"] = serde_json::Value::Number(to_number(cofactor));
        }
        emit_json(out, &j)?;
    } else {
        let mut s = String::new();
        if let Some((residue, cofactor)) = &extra {
            s.push_str(&format!("q mod m = {residue}, d = m * {cofactor}\n"));
        }
        s.push_str(&render::verdict_text(&v));
        emit(out, &s)?;
    }
    Ok(if v.n_divides_h == Some(false) || v.violates_theorem() {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    })
}
