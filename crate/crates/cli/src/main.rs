use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;
use thiserror::Error;

use q2sat::families::{self, BenchRow};
use q2sat::model::{
    embed_cnf, gen_lowerbound_chain, gen_lowerbound_full, random_instance, Assignment, Cnf,
    Instance, ModelError, RandomSpec,
};
use q2sat::oracle::{verify_assignment, VerifyError};
use q2sat::solver::{Outcome, SolveError, SolveOptions, Solver};

#[derive(Parser)]
#[command(name = "q2sat", version, about = "Exact quantum 2-SAT solver")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance; exit 0 on SAT, 1 on UNSAT, 2 on bad input.
    Solve {
        instance: PathBuf,
        /// Write the assignment here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit a JSON run report on stderr.
        #[arg(long, value_enum, default_value_t = MetricsFormat::None)]
        metrics: MetricsFormat,
        #[arg(long)]
        no_fastpath: bool,
    },
    /// Check an assignment file against an instance.
    Verify {
        instance: PathBuf,
        assignment: PathBuf,
    },
    /// Write a generated instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Solve members of a family at several sizes and print CSV rows.
    Bench {
        family: String,
        #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_fastpath: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricsFormat {
    Json,
    None,
}

#[derive(Subcommand)]
enum GenKind {
    /// Embed a DIMACS 2-CNF file, one constraint per clause.
    CnfImport { cnf: PathBuf },
    /// Doubling instance on 2n+2 qubits for odd n-bit M and N.
    LowerboundFull {
        #[arg(long)]
        bits: usize,
        #[arg(long = "m")]
        m: BigInt,
        #[arg(long = "n")]
        big_n: BigInt,
    },
    /// Doubling chain on n+1 qubits for odd n-bit M.
    LowerboundChain {
        #[arg(long)]
        bits: usize,
        #[arg(long = "m")]
        m: BigInt,
    },
    /// Random instance with small integer coefficients.
    Random(RandomArgs),
    /// A member of a named benchmark family.
    Family {
        name: String,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long, default_value_t = 8)]
    qubits: usize,
    #[arg(long, default_value_t = 12)]
    constraints: usize,
    #[arg(long, default_value_t = 0.3)]
    product_fraction: f64,
    #[arg(long, default_value_t = 3)]
    coeff_bound: i64,
    /// Coefficients in Q[i].
    #[arg(long)]
    gaussian: bool,
    /// Make every constraint vanish on a hidden product state.
    #[arg(long)]
    planted: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ModelError },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("assignment covers {found} qubits, instance has {expected}")]
    QubitCount { expected: usize, found: usize },
    #[error("unknown family `{0}`; known: {1}")]
    UnknownFamily(String, String),
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_owned(),
            source,
        }),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    Instance::parse(&read(path)?).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn cmd_solve(
    path: &Path,
    out: Option<&Path>,
    metrics: MetricsFormat,
    fastpath: bool,
) -> Result<u8, CliError> {
    let inst = load_instance(path)?;
    let opts = SolveOptions {
        fastpath,
        ..SolveOptions::default()
    };
    let t0 = Instant::now();
    let report = Solver::new(&inst, opts).run()?;
    let wall = t0.elapsed();
    let (text, code, phase) = match &report.outcome {
        Outcome::Sat(a) => (a.to_text(), 0, None),
        Outcome::Unsat(u) => ("UNSAT\n".to_string(), 1, Some(u.phase)),
    };
    write_out(out, &text)?;
    if metrics == MetricsFormat::Json {
        let run = json!({
            "decision": if code == 0 { "SAT" } else { "UNSAT" },
            "assignment": out.map(|p| p.display().to_string()),
            "phase": phase,
            "metrics": report.metrics,
            "wall_ms": wall.as_secs_f64() * 1e3,
        });
        eprintln!("{run}");
    }
    Ok(code)
}

/// Number of qubits an assignment file talks about: one past its largest
/// index.
fn mentioned_qubits(text: &str) -> usize {
    let mut top = 0;
    for line in text.lines() {
        let mut toks = line.split_whitespace();
        let arity = match toks.next() {
            Some("qubit") => 1,
            Some("pair") => 2,
            _ => continue,
        };
        for t in toks.take(arity) {
            if let Ok(q) = t.parse::<usize>() {
                top = top.max(q + 1);
            }
        }
    }
    top
}

fn cmd_verify(inst_path: &Path, asg_path: &Path) -> Result<u8, CliError> {
    let inst = load_instance(inst_path)?;
    let text = read(asg_path)?;
    let found = mentioned_qubits(&text);
    if found > 0 && found != inst.n() {
        return Err(CliError::QubitCount {
            expected: inst.n(),
            found,
        });
    }
    let parsed =
        Assignment::parse(&text, inst.field(), inst.n()).map_err(|source| CliError::Parse {
            path: asg_path.to_owned(),
            source,
        })?;
    let Some(a) = parsed else {
        eprintln!("assignment file records UNSAT; nothing to verify");
        return Ok(1);
    };
    match verify_assignment(&inst, &a) {
        Ok(()) => {
            println!("OK");
            Ok(0)
        }
        Err(VerifyError::QubitCount { expected, found }) => {
            Err(CliError::QubitCount { expected, found })
        }
        Err(e) => {
            eprintln!("{e}");
            Ok(1)
        }
    }
}

fn cmd_gen(kind: GenKind) -> Result<Instance, CliError> {
    Ok(match kind {
        GenKind::CnfImport { cnf } => {
            let f = Cnf::parse_dimacs(&read(&cnf)?)
                .map_err(|source| CliError::Parse { path: cnf, source })?;
            embed_cnf(&f)?
        }
        GenKind::LowerboundFull { bits, m, big_n } => gen_lowerbound_full(bits, &m, &big_n)?,
        GenKind::LowerboundChain { bits, m } => gen_lowerbound_chain(bits, &m)?,
        GenKind::Random(r) => random_instance(&RandomSpec {
            n: r.qubits,
            m: r.constraints,
            product_fraction: r.product_fraction,
            coeff_bound: r.coeff_bound,
            gaussian: r.gaussian,
            planted: r.planted,
            seed: r.seed,
        })?,
        GenKind::Family { name, size, seed } => lookup(&name)?.generate(size, seed),
    })
}

fn lookup(name: &str) -> Result<&'static dyn families::InstanceFamily, CliError> {
    families::family(name).ok_or_else(|| {
        let known: Vec<&str> = families::registry().iter().map(|f| f.name()).collect();
        CliError::UnknownFamily(name.to_string(), known.join(", "))
    })
}

fn cmd_bench(
    name: &str,
    sizes: &[usize],
    seed: u64,
    fastpath: bool,
    out: Option<&Path>,
) -> Result<u8, CliError> {
    let fam = lookup(name)?;
    let opts = SolveOptions {
        fastpath,
        ..SolveOptions::default()
    };
    let mut csv = String::from(BenchRow::CSV_HEADER);
    csv.push('\n');
    for &size in sizes {
        let row = families::bench_one(fam, size, seed, opts)?;
        csv.push_str(&row.to_csv());
        csv.push('\n');
    }
    write_out(out, &csv)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.cmd {
        Command::Solve {
            instance,
            out,
            metrics,
            no_fastpath,
        } => cmd_solve(&instance, out.as_deref(), metrics, !no_fastpath),
        Command::Verify {
            instance,
            assignment,
        } => cmd_verify(&instance, &assignment),
        Command::Gen { kind, out } => {
            let inst = cmd_gen(kind)?;
            write_out(out.as_deref(), &inst.to_text())?;
            Ok(0)
        }
        Command::Bench {
            family,
            sizes,
            seed,
            no_fastpath,
            out,
        } => cmd_bench(&family, &sizes, seed, !no_fastpath, out.as_deref()),
    }
}

fn main() -> ExitCode {
    // clap reports usage errors with exit code 2
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
