//! Command-line front end: type-check, evaluate, compile, count, and
//! export expression files, and compute model partition functions.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use diracwmc::{
    compile, eval_value, export_matrix_rep, export_scalar_rep, format_field, format_matrix,
    format_real, ising_direct, parse, parse_model, parse_wcnf, potts_expr, potts_generalized_expr,
    rel_dist, rep_matrix_value, rep_scalar_value, tfim_expr, typecheck, wmc_count_with_cap, Beta,
    CompileOptions, EncodingKind, ExprType, IsingModel, ModelFile, PottsModel, Rep, Value,
    VarSource, WcnfDialect, DEFAULT_COMPONENT_CAP,
};

#[derive(Parser)]
#[command(name = "diracwmc", version, about = "Dirac-notation expressions via weighted model counting")]
struct Cli {
    /// Random seed; accepted on every command for interface stability,
    /// currently no command draws randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Log,
    Order,
    Onehot,
}

impl EncodingArg {
    fn kind(self) -> EncodingKind {
        match self {
            EncodingArg::Log => EncodingKind::Logarithmic,
            EncodingArg::Order => EncodingKind::Order,
            EncodingArg::Onehot => EncodingKind::OneHot,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DialectArg {
    Native,
    Dpmc,
}

impl DialectArg {
    fn dialect(self) -> WcnfDialect {
        match self {
            DialectArg::Native => WcnfDialect::Native,
            DialectArg::Dpmc => WcnfDialect::DpmcStyle,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse an expression file and print its type.
    Typecheck { file: PathBuf },

    /// Evaluate an expression file densely and print the scalar or matrix.
    Value {
        file: PathBuf,
        /// Print 17 significant digits instead of 6.
        #[arg(long)]
        full_precision: bool,
    },

    /// Compile an expression file and print the weighted CNF.
    Compile {
        file: PathBuf,
        /// How q-state digits are realized over Boolean variables.
        #[arg(long, value_enum, default_value = "log")]
        encoding: EncodingArg,
        /// Output format for weight lines.
        #[arg(long, value_enum, default_value = "native")]
        dialect: DialectArg,
    },

    /// Count a scalar expression file, or a weighted CNF file (.wcnf/.cnf).
    Count {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "log")]
        encoding: EncodingArg,
        /// Largest number of connected components to count; an integer or
        /// `none` for unlimited. Falls back to DIRACWMC_COMPONENT_CAP.
        #[arg(long)]
        component_cap: Option<String>,
        #[arg(long)]
        full_precision: bool,
    },

    /// Partition function Z and free energy -log(Z)/beta of a model file.
    Partition {
        file: PathBuf,
        /// Inverse temperature.
        #[arg(long)]
        beta: f64,
        /// Trotter steps for transverse-field models.
        #[arg(long, default_value_t = 64)]
        trotter_k: u32,
        #[arg(long, value_enum, default_value = "log")]
        encoding: EncodingArg,
        #[arg(long)]
        component_cap: Option<String>,
        #[arg(long)]
        full_precision: bool,
    },

    /// Compile an expression file and check the counted entries against
    /// dense evaluation.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "log")]
        encoding: EncodingArg,
        #[arg(long)]
        component_cap: Option<String>,
        #[arg(long)]
        full_precision: bool,
    },
}

/// Failures mapped to process exit codes.
enum Failure {
    /// Exit 1: bad invocation or unreadable input.
    Usage(String),
    /// Exit 2: input that does not parse or type-check.
    Input(String),
    /// Exit 3: counting or evaluation failure.
    Count(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Count(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Count(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Typecheck { file } => cmd_typecheck(&file),
        Cmd::Value { file, full_precision } => cmd_value(&file, sig(full_precision)),
        Cmd::Compile { file, encoding, dialect } => {
            cmd_compile(&file, encoding.kind(), dialect.dialect())
        }
        Cmd::Count { file, encoding, component_cap, full_precision } => {
            let cap = resolve_cap(component_cap.as_deref(), Some(DEFAULT_COMPONENT_CAP))?;
            cmd_count(&file, encoding.kind(), cap, sig(full_precision))
        }
        Cmd::Partition { file, beta, trotter_k, encoding, component_cap, full_precision } => {
            let cap = resolve_cap(component_cap.as_deref(), None)?;
            cmd_partition(&file, beta, trotter_k, encoding.kind(), cap, sig(full_precision))
        }
        Cmd::Verify { file, encoding, component_cap, full_precision } => {
            let cap = resolve_cap(component_cap.as_deref(), Some(DEFAULT_COMPONENT_CAP))?;
            cmd_verify(&file, encoding.kind(), cap, sig(full_precision))
        }
    }
}

fn sig(full_precision: bool) -> usize {
    if full_precision {
        17
    } else {
        6
    }
}

/// Cap precedence: flag, then DIRACWMC_COMPONENT_CAP, then the command's
/// default. `none` means unlimited.
fn resolve_cap(flag: Option<&str>, default: Option<usize>) -> Result<Option<usize>, Failure> {
    let chosen = match flag {
        Some(s) => Some(s.to_string()),
        None => std::env::var("DIRACWMC_COMPONENT_CAP").ok(),
    };
    match chosen.as_deref() {
        None => Ok(default),
        Some("none") => Ok(None),
        Some(s) => s
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("bad component cap {s:?}: expected an integer or `none`"))),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Reads an expression file: `let NAME = expr;` bindings followed by the
/// final expression, with `#` comments. Bindings are spliced textually
/// (parenthesized) before parsing.
fn read_expr(path: &Path) -> Result<diracwmc::Expr<Complex64>, Failure> {
    let raw = read_file(path)?;
    let text = expand_lets(&raw)?;
    parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

const RESERVED: &[&str] = &["let", "bra", "ket", "tr", "entry", "trans", "conj", "kron", "i"];

fn expand_lets(raw: &str) -> Result<String, Failure> {
    let stripped: String = raw
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");
    let mut bindings: HashMap<String, String> = HashMap::new();
    let mut rest = stripped.trim();
    while let Some(tail) = rest.strip_prefix("let") {
        let tail = tail
            .strip_prefix(|c: char| c.is_whitespace())
            .ok_or_else(|| Failure::Input("`let` must be followed by a name".into()))?;
        let (name, tail) = split_ident(tail.trim_start())
            .ok_or_else(|| Failure::Input("`let` must be followed by a name".into()))?;
        if RESERVED.contains(&name) {
            return Err(Failure::Input(format!("`{name}` is reserved and cannot be bound")));
        }
        let tail = tail
            .trim_start()
            .strip_prefix('=')
            .ok_or_else(|| Failure::Input(format!("expected `=` after `let {name}`")))?;
        let (body, after) = tail
            .split_once(';')
            .ok_or_else(|| Failure::Input(format!("missing `;` after `let {name} = ...`")))?;
        let body = substitute(body.trim(), &bindings);
        if bindings.insert(name.to_string(), body).is_some() {
            return Err(Failure::Input(format!("`{name}` is bound twice")));
        }
        rest = after.trim_start();
    }
    if rest.is_empty() {
        return Err(Failure::Input("no expression after the `let` bindings".into()));
    }
    Ok(substitute(rest, &bindings))
}

fn split_ident(s: &str) -> Option<(&str, &str)> {
    let mut end = 0;
    for (i, c) in s.char_indices() {
        let ok = c == '_' || c.is_ascii_alphabetic() || (i > 0 && c.is_ascii_digit());
        if !ok {
            break;
        }
        end = i + c.len_utf8();
    }
    if end == 0 {
        None
    } else {
        Some((&s[..end], &s[end..]))
    }
}

/// Replaces bound names by their parenthesized bodies; other identifiers
/// and all non-identifier text pass through unchanged.
fn substitute(text: &str, bindings: &HashMap<String, String>) -> String {
    let mut out = String::new();
    let mut rest = text;
    while !rest.is_empty() {
        let c = rest.chars().next().unwrap();
        if c == '_' || c.is_ascii_alphabetic() {
            let (word, tail) = split_ident(rest).unwrap();
            match bindings.get(word) {
                Some(body) => {
                    out.push('(');
                    out.push_str(body);
                    out.push(')');
                }
                None => out.push_str(word),
            }
            rest = tail;
        } else {
            out.push(c);
            rest = &rest[c.len_utf8()..];
        }
    }
    out
}

fn cmd_typecheck(file: &Path) -> Result<(), Failure> {
    let e = read_expr(file)?;
    let ty = typecheck(&e).map_err(|e| Failure::Input(format!("{}: {e}", file.display())))?;
    println!("{ty}");
    Ok(())
}

fn cmd_value(file: &Path, sig: usize) -> Result<(), Failure> {
    let e = read_expr(file)?;
    typecheck(&e).map_err(|e| Failure::Input(format!("{}: {e}", file.display())))?;
    match eval_value(&e).map_err(|e| Failure::Count(e.to_string()))? {
        Value::Scalar(x) => println!("{}", format_field(&x, sig)),
        Value::Matrix(m) => print!("{}", format_matrix(&m, sig)),
    }
    Ok(())
}

fn cmd_compile(file: &Path, kind: EncodingKind, dialect: WcnfDialect) -> Result<(), Failure> {
    let e = read_expr(file)?;
    let opts = CompileOptions { kind, ..CompileOptions::default() };
    let mut fresh = VarSource::new();
    let rep = compile(&e, &opts, &mut fresh).map_err(|e| Failure::Input(e.to_string()))?;
    let text = match rep {
        Rep::Scalar(r) => export_scalar_rep(&r, dialect),
        Rep::Matrix(r) => export_matrix_rep(&r, dialect),
    }
    .map_err(|e| Failure::Count(e.to_string()))?;
    print!("{text}");
    Ok(())
}

fn cmd_count(
    file: &Path,
    kind: EncodingKind,
    cap: Option<usize>,
    sig: usize,
) -> Result<(), Failure> {
    let ext = file.extension().and_then(|e| e.to_str()).unwrap_or("");
    let count = if matches!(ext, "wcnf" | "cnf") {
        let text = read_file(file)?;
        let inst = parse_wcnf::<Complex64>(&text)
            .map_err(|e| Failure::Input(format!("{}: {e}", file.display())))?;
        wmc_count_with_cap(&inst.cnf.to_formula(), &inst.weights, cap)
            .map_err(|e| Failure::Count(e.to_string()))?
    } else {
        let e = read_expr(file)?;
        let ty = typecheck(&e).map_err(|e| Failure::Input(format!("{}: {e}", file.display())))?;
        if ty != ExprType::Scalar {
            return Err(Failure::Input(format!(
                "count needs a scalar expression, this one has type {ty}"
            )));
        }
        let opts = CompileOptions { kind, ..CompileOptions::default() };
        let mut fresh = VarSource::new();
        let rep = compile(&e, &opts, &mut fresh)
            .map_err(|e| Failure::Input(e.to_string()))?
            .into_scalar();
        rep_scalar_value(&rep, cap).map_err(|e| Failure::Count(e.to_string()))?
    };
    println!("{}", format_field(&count, sig));
    Ok(())
}

fn cmd_partition(
    file: &Path,
    beta: f64,
    trotter_k: u32,
    kind: EncodingKind,
    cap: Option<usize>,
    sig: usize,
) -> Result<(), Failure> {
    let beta = Beta::new(beta).map_err(|e| Failure::Usage(e.to_string()))?;
    if trotter_k == 0 {
        return Err(Failure::Usage("--trotter-k must be at least 1".into()));
    }
    let text = read_file(file)?;
    let model = parse_model(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", file.display())))?;
    let start = Instant::now();
    let z = match &model {
        ModelFile::Ising(m) => count_ising(m, beta, cap)?,
        ModelFile::Potts(m) => count_potts(m, beta, kind, cap)?,
        ModelFile::Tfim(m) => {
            // Trotterized expressions stay small densely but compile to
            // instances far beyond the exact counter, so evaluate directly.
            let e = tfim_expr(m, beta, trotter_k);
            real_part(eval_value(&e).map_err(|e| Failure::Count(e.to_string()))?.into_scalar())?
        }
    };
    let elapsed = start.elapsed();
    if z <= 0.0 {
        return Err(Failure::Count(format!("non-positive partition function {z}")));
    }
    println!("Z = {}", format_real(z, sig));
    println!("F = {}", format_real(-z.ln() / beta.value(), sig));
    eprintln!("computed in {:.3} s", elapsed.as_secs_f64());
    Ok(())
}

fn count_ising(m: &IsingModel, beta: Beta, cap: Option<usize>) -> Result<f64, Failure> {
    let mut fresh = VarSource::new();
    let (phi, weights) = ising_direct(m, beta, &mut fresh);
    let z = wmc_count_with_cap(&phi, &weights, cap).map_err(|e| Failure::Count(e.to_string()))?;
    real_part(z)
}

fn count_potts(
    m: &PottsModel,
    beta: Beta,
    kind: EncodingKind,
    cap: Option<usize>,
) -> Result<f64, Failure> {
    let e = match m {
        PottsModel::Standard { .. } => potts_expr(m, beta),
        PottsModel::Generalized { .. } => potts_generalized_expr(m, beta),
    };
    let opts = CompileOptions { kind, ..CompileOptions::default() };
    let mut fresh = VarSource::new();
    let rep = compile(&e, &opts, &mut fresh)
        .map_err(|e| Failure::Input(e.to_string()))?
        .into_scalar();
    let z = rep_scalar_value(&rep, cap).map_err(|e| Failure::Count(e.to_string()))?;
    real_part(z)
}

fn real_part(z: Complex64) -> Result<f64, Failure> {
    if z.im.abs() > 1e-9 * z.re.abs().max(1.0) {
        return Err(Failure::Count(format!("partition function came out complex: {z}")));
    }
    Ok(z.re)
}

fn cmd_verify(
    file: &Path,
    kind: EncodingKind,
    cap: Option<usize>,
    sig: usize,
) -> Result<(), Failure> {
    let e = read_expr(file)?;
    typecheck(&e).map_err(|e| Failure::Input(format!("{}: {e}", file.display())))?;
    let opts = CompileOptions { kind, ..CompileOptions::default() };
    let mut fresh = VarSource::new();
    let rep = compile(&e, &opts, &mut fresh).map_err(|e| Failure::Input(e.to_string()))?;
    let dense = eval_value(&e).map_err(|e| Failure::Count(e.to_string()))?;
    let dev = match (rep, dense) {
        (Rep::Scalar(r), Value::Scalar(x)) => {
            let counted = rep_scalar_value(&r, cap).map_err(|e| Failure::Count(e.to_string()))?;
            rel_dist(&counted, &x)
        }
        (Rep::Matrix(r), Value::Matrix(m)) => {
            let counted = rep_matrix_value(&r, cap).map_err(|e| Failure::Count(e.to_string()))?;
            let mut worst = 0.0f64;
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    worst = worst.max(rel_dist(counted.get(i, j), m.get(i, j)));
                }
            }
            worst
        }
        _ => return Err(Failure::Count("compile and evaluation disagree on shape".into())),
    };
    println!("max relative deviation = {}", format_real(dev, sig));
    if dev <= 1e-9 {
        println!("PASS");
        Ok(())
    } else {
        println!("FAIL");
        Err(Failure::Count("compiled counts deviate from dense evaluation".into()))
    }
}
