//! Command-line front end: parse, validate, evaluate, generate, compile and
//! differentially test programs and circuits.
//!
//! Exit codes: 0 success, 1 validation/domain/comparison failure, 2 usage
//! error (including unreadable or malformed inputs).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use odewb::circuit::{self, make_conn_table, parse_circuit, validate_nf, write_circuit, Circuit};
use odewb::engine::{validate, Evaluator, Program};
use odewb::oracle::{diff, popcount_mod, Domain};
use odewb::program_text::{parse_program, write_program, PROGRAM_HEADER};
use odewb::stdlib;
use odewb::xlate::{algebra_to_circuit, circuit_to_algebra, roundtrip_check};

#[derive(Parser)]
#[command(
    name = "odewb",
    version,
    about = "Workbench for length-driven recurrence algebras and leveled circuits with MOD gates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a program on integer arguments.
    Eval(EvalArgs),
    /// Validate a program or circuit file; list diagnostics.
    Check {
        /// Program (`;; odewb-program v1`) or circuit (`# odewb-circuit v1`) file.
        file: PathBuf,
    },
    /// Generate a library program.
    Gen(GenArgs),
    /// Compile between a program and a circuit.
    Compile(CompileArgs),
    /// Compare two programs (or a program and a builtin reference) pointwise.
    Diff(DiffArgs),
    /// Compile a circuit to a program, lower it back, compare all three.
    Roundtrip {
        /// Circuit file.
        file: PathBuf,
    },
}

#[derive(Args)]
struct EvalArgs {
    /// Program file.
    file: PathBuf,
    /// Integer arguments.
    args: Vec<BigInt>,
    /// Function to evaluate (defaults to the program's entry point).
    #[arg(long, short = 'e')]
    entry: Option<String>,
    /// Print the recurrence trace points before the result.
    #[arg(long)]
    trace: bool,
    /// Circuit file whose connection table backs `conn` symbols.
    #[arg(long)]
    circuit: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Program family.
    #[arg(value_enum)]
    family: Family,
    /// Modulus for the counting families.
    #[arg(long, short = 'n', default_value_t = 2)]
    n: u32,
    /// Output file (stdout if omitted).
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// Popcount modulo n via the mod-n counting schema.
    Cmodn,
    /// Popcount via plain accumulation.
    Bcount,
    /// Popcount modulo n derived from bcount with × and ÷.
    ModnViaBcount,
}

#[derive(Args)]
struct CompileArgs {
    /// Compilation direction.
    #[arg(value_enum)]
    direction: Direction,
    /// Input file (circuit for to-program, program for to-circuit).
    input: PathBuf,
    /// Input bit width per entry argument (to-circuit).
    #[arg(long, default_value_t = 4)]
    width: usize,
    /// Exponent of the nominal ℓ(x)^k scan bound (to-program).
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Output file (stdout if omitted).
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
    /// Also write per-gate provenance / compilation notes to this file.
    #[arg(long)]
    notes: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    /// Lower a program to a circuit at a fixed width.
    ToCircuit,
    /// Compile a circuit into a program over its connection language.
    ToProgram,
}

#[derive(Args)]
struct DiffArgs {
    /// Left side: program file.
    left: PathBuf,
    /// Right side: program file, or a builtin `popcount-mod:<n>`.
    right: String,
    /// Compare exhaustively on 0..max (unary entries only).
    #[arg(long, conflicts_with_all = ["seed", "count"])]
    max: Option<u64>,
    /// Seed for sampled comparison (recorded in the report).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of sampled points.
    #[arg(long, default_value_t = 200)]
    count: usize,
    /// Exclusive upper bound for sampled arguments.
    #[arg(long, default_value_t = 1 << 12)]
    limit: u64,
}

#[derive(Debug)]
enum CliError {
    /// Validation, domain or comparison failure → exit 1.
    Failure(String),
    /// Usage or input error → exit 2.
    Usage(String),
}

type CliResult = Result<(), CliError>;

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn failure<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Failure(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_program(path: &Path) -> Result<Program, CliError> {
    parse_program(&read(path)?).map_err(usage)
}

fn load_circuit(path: &Path) -> Result<Circuit, CliError> {
    parse_circuit(&read(path)?).map_err(usage)
}

fn validated(prog: Program) -> Result<Program, CliError> {
    let diags = validate(&prog);
    if diags.is_empty() {
        Ok(prog)
    } else {
        Err(failure(
            diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"),
        ))
    }
}

fn cmd_eval(a: EvalArgs) -> CliResult {
    let mut prog = load_program(&a.file)?;
    if let Some(cpath) = &a.circuit {
        let c = load_circuit(cpath)?;
        let table = make_conn_table(&c).map_err(failure)?;
        prog.conn = Some(Arc::new(table));
    }
    let prog = validated(prog)?;
    let entry = match &a.entry {
        Some(e) => e.clone(),
        None => prog
            .entry
            .clone()
            .ok_or_else(|| usage("program has no entry point; name a function explicitly"))?,
    };
    if prog.get(&entry).is_none() {
        return Err(usage(format!("no function named `{entry}`")));
    }
    let mut ev = Evaluator::new(&prog);
    if a.trace {
        let is_schema = matches!(
            prog.get(&entry).expect("checked above").body,
            odewb::engine::FunctionBody::Schema { .. }
        );
        if is_schema {
            let trace = ev.run_recurrence(&entry, &a.args).map_err(failure)?;
            for p in &trace.points {
                println!("u={}\tpoint={}\tvalue={}", p.u, p.x_point, p.value);
            }
            println!("{}", trace.final_value());
        } else {
            eprintln!("note: `{entry}` is not a schema definition; no trace to print");
            let v = ev.eval(&entry, &a.args).map_err(failure)?;
            println!("{v}");
        }
    } else {
        let v = ev.eval(&entry, &a.args).map_err(failure)?;
        println!("{v}");
    }
    Ok(())
}

fn cmd_check(file: &Path) -> CliResult {
    let text = read(file)?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .unwrap_or("");
    if first.starts_with(circuit::CIRCUIT_HEADER) {
        let c = parse_circuit(&text).map_err(usage)?;
        let errs = validate_nf(&c);
        if errs.is_empty() {
            println!("ok: normal-form circuit, width {}, depth {}", c.width, c.depth());
            Ok(())
        } else {
            Err(failure(
                errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"),
            ))
        }
    } else if first.starts_with(PROGRAM_HEADER) {
        let prog = parse_program(&text).map_err(usage)?;
        let prog = validated(prog)?;
        println!("ok: {} definitions", prog.defs.len());
        Ok(())
    } else {
        Err(usage(format!(
            "{}: unrecognized header; expected `{}` or `{}`",
            file.display(),
            PROGRAM_HEADER,
            circuit::CIRCUIT_HEADER
        )))
    }
}

fn cmd_gen(a: GenArgs) -> CliResult {
    if matches!(a.family, Family::Cmodn | Family::ModnViaBcount) && a.n < 2 {
        return Err(usage("--n must be at least 2"));
    }
    let prog = match a.family {
        Family::Cmodn => stdlib::build_cmodn(a.n),
        Family::Bcount => stdlib::build_bcount(),
        Family::ModnViaBcount => stdlib::build_modn_via_bcount(a.n),
    };
    let prog = validated(prog)?;
    emit(&a.out, &write_program(&prog))
}

fn cmd_compile(a: CompileArgs) -> CliResult {
    match a.direction {
        Direction::ToCircuit => {
            let prog = load_program(&a.input)?;
            let low = algebra_to_circuit(&prog, a.width).map_err(failure)?;
            emit(&a.out, &write_circuit(&low.circuit))?;
            if let Some(np) = &a.notes {
                let mut s = format!(
                    "width {} args {} depth {}\n",
                    low.width, low.args, low.depth
                );
                for (id, note) in low.provenance.iter().enumerate() {
                    s.push_str(&format!("gate {id}\t{note}\n"));
                }
                emit(&Some(np.clone()), &s)?;
            }
            Ok(())
        }
        Direction::ToProgram => {
            let c = load_circuit(&a.input)?;
            let compiled = circuit_to_algebra(&c, a.k).map_err(failure)?;
            emit(&a.out, &write_program(&compiled.program))?;
            if let Some(np) = &a.notes {
                let mut s = format!("width {} driver {}\n", compiled.width, compiled.driver);
                for note in &compiled.notes {
                    s.push_str(note);
                    s.push('\n');
                }
                emit(&Some(np.clone()), &s)?;
            }
            Ok(())
        }
    }
}

fn cmd_diff(a: DiffArgs) -> CliResult {
    let left = validated(load_program(&a.left)?)?;
    let lentry = left
        .entry
        .clone()
        .ok_or_else(|| usage("left program has no entry point"))?;
    let arity = left.get(&lentry).expect("validated").arity;

    // the right side is either a builtin reference or a second program
    let right_prog;
    let mut right: Box<dyn FnMut(&[BigInt]) -> Result<BigInt, String>> =
        if let Some(n) = a.right.strip_prefix("popcount-mod:") {
            let n: u32 = n.parse().map_err(usage)?;
            if n < 2 {
                return Err(usage("popcount-mod modulus must be at least 2"));
            }
            if arity != 1 {
                return Err(usage("popcount-mod compares unary entries only"));
            }
            Box::new(move |args: &[BigInt]| {
                let x = args[0]
                    .to_u64()
                    .ok_or_else(|| "argument out of u64 range".to_string())?;
                Ok(BigInt::from(popcount_mod(x, n)))
            })
        } else {
            right_prog = validated(load_program(Path::new(&a.right))?)?;
            let rentry = right_prog
                .entry
                .clone()
                .ok_or_else(|| usage("right program has no entry point"))?;
            if right_prog.get(&rentry).expect("validated").arity != arity {
                return Err(usage("entry arities differ"));
            }
            Box::new(move |args: &[BigInt]| {
                right_prog.eval(&rentry, args).map_err(|e| e.to_string())
            })
        };

    let domain = match a.max {
        Some(max) => Domain::Range { lo: 0, hi: max.saturating_sub(1), arity },
        None => Domain::Samples { seed: a.seed, count: a.count, arity, limit: a.limit },
    };
    if let Domain::Samples { seed, count, limit, .. } = &domain {
        println!("sampling: seed={seed} count={count} limit={limit}");
    }
    let mut ev = Evaluator::new(&left);
    let report = diff(
        &domain,
        |args| ev.eval(&lentry, args).map_err(|e| e.to_string()),
        |args| right(args),
    );
    print!("{}", report.render());
    if report.passed() {
        println!("no counterexample");
        Ok(())
    } else {
        Err(CliError::Failure(String::new()))
    }
}

fn cmd_roundtrip(file: &Path) -> CliResult {
    let c = load_circuit(file)?;
    let report = roundtrip_check(&c).map_err(failure)?;
    print!("{}", report.render());
    if report.agree() {
        Ok(())
    } else {
        Err(CliError::Failure(String::new()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Check { file } => cmd_check(&file),
        Command::Gen(a) => cmd_gen(a),
        Command::Compile(a) => cmd_compile(a),
        Command::Diff(a) => cmd_diff(a),
        Command::Roundtrip { file } => cmd_roundtrip(&file),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failure(msg)) => {
            if !msg.is_empty() {
                eprintln!("{msg}");
            }
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
