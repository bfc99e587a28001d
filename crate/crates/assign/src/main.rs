use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use walsh_assign::format::{load_matrix, write_matrix};
use walsh_assign::sim::{monitor_load, run_simulation, PoolConfig};
use walsh_assign::{verify, VerifyMethod};
use walsh_core::banded_assign::{assign_with_fallback, Route};
use walsh_core::bounds::{analyze, OptimalityReport};
use walsh_core::{build_augmented_l_banded, build_l_banded, Matching, VerificationReport};

/// Build, verify and use Walsh-code assignment matrices.
#[derive(Debug, Parser)]
#[command(name = "walsh-assign", version)]
struct Cli {
    /// Output style.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    /// l-banded matrix, odd k, k <= n <= 2k.
    Banded,
    /// Augmented l-banded matrix, even k, k <= n <= 2(k-1).
    Augmented,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Construct a matrix and write it in .wam format.
    Generate {
        kind: Kind,
        k: usize,
        n: usize,
        /// Destination file; the matrix goes to stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Decide the assignment property. Exit 0 if it holds, 1 if not.
    Verify {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = VerifyMethod::Auto)]
        method: VerifyMethod,
    },
    /// Give distinct codes to a comma-separated list of 1-based users.
    Assign {
        input: PathBuf,
        users: String,
        /// Print the row moves of the banded shift algorithm.
        #[arg(long)]
        trace: bool,
    },
    /// Ones count against the lower bound k(n-k+1).
    Bounds { input: PathBuf },
    /// Run a multi-pool frame simulation from a TOML config.
    Simulate {
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Include per-request wall times in structured records.
        #[arg(long)]
        timing: bool,
    },
}

/// Usage, parse and I/O failures: exit code 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let structured = cli.format == Format::Structured;
    match cli.command {
        Command::Generate { kind, k, n, out } => generate(kind, k, n, out.as_deref(), structured),
        Command::Verify { input, method } => {
            let m = load_matrix(&input)?;
            let report = verify(&m, method)?;
            if structured {
                println!("{}", report_json(&report));
            } else {
                println!("{report}");
            }
            Ok(exit_for(report.holds()))
        }
        Command::Assign {
            input,
            users,
            trace,
        } => assign(&input, &users, trace, structured),
        Command::Bounds { input } => {
            let report = analyze(&load_matrix(&input)?)?;
            if structured {
                println!("{}", bounds_json(&report));
            } else {
                print!("{report}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            config,
            seed,
            timing,
        } => simulate(&config, seed, timing, structured),
    }
}

fn exit_for(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn generate(
    kind: Kind,
    k: usize,
    n: usize,
    out: Option<&Path>,
    structured: bool,
) -> Result<ExitCode, Failure> {
    let m = match kind {
        Kind::Banded => build_l_banded(k, n),
        Kind::Augmented => build_augmented_l_banded(k, n),
    }?;
    let report = analyze(&m)?;
    let stats = if structured {
        format!("{}\n", bounds_json(&report))
    } else {
        format!(
            "N: {}\nl_max: {}\nlower_bound: {}\n",
            report.ones, report.max_row_weight, report.lower_bound
        )
    };
    let text = write_matrix(&m);
    match out {
        Some(path) => {
            let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
            let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))?;
            tmp.write_all(text.as_bytes())?;
            tmp.persist(path)?;
            print!("{stats}");
        }
        None => {
            print!("{text}");
            eprint!("{stats}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_users(list: &str) -> Result<Vec<usize>, Failure> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s.parse::<usize>() {
            Ok(u) if u >= 1 => Ok(u - 1),
            _ => Err(Failure(format!("bad user number {s:?}"))),
        })
        .collect()
}

fn assign(input: &Path, users: &str, trace: bool, structured: bool) -> Result<ExitCode, Failure> {
    let m = load_matrix(input)?;
    let users = parse_users(users)?;
    let dispatch = assign_with_fallback(&m, &users)?;
    let moves = match &dispatch.route {
        Route::Banded(t) => t.as_slice(),
        Route::Matching => &[],
    };
    let route = match dispatch.route {
        Route::Banded(_) => "banded",
        Route::Matching => "matching",
    };
    match &dispatch.outcome {
        Matching::Assigned(a) => {
            if structured {
                let pairs: Vec<_> = a
                    .pairs
                    .iter()
                    .map(|&(u, t)| json!({"user": u + 1, "code": t + 1}))
                    .collect();
                let mut rec = json!({"route": route, "assignment": pairs});
                if trace {
                    rec["trace"] = json!(moves
                        .iter()
                        .map(|r| json!({"row": r.row + 1, "from": r.from + 1, "to": r.to + 1}))
                        .collect::<Vec<_>>());
                }
                println!("{rec}");
            } else {
                print!("{a}");
                if trace {
                    for r in moves {
                        println!("{r}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Matching::Blocked(w) => {
            if structured {
                println!(
                    "{}",
                    json!({"route": route, "assignment": null, "witness": witness_json(&w.rows, &w.cols)})
                );
            } else {
                println!("FAILS {w}");
            }
            Ok(ExitCode::from(1))
        }
    }
}

fn simulate(
    config: &Path,
    seed: Option<u64>,
    timing: bool,
    structured: bool,
) -> Result<ExitCode, Failure> {
    let mut cfg = PoolConfig::load(config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let sim = run_simulation(&cfg)?;
    let load = monitor_load(&sim);
    if structured {
        for rec in sim.records(timing) {
            println!("{rec}");
        }
        println!("{}", json!({"summary": sim.summary, "load": load}));
    } else {
        let s = &sim.summary;
        println!("seed: {}", cfg.seed);
        println!("frames: {}", s.frames);
        println!("requests: {}", s.requests);
        println!("failures: {}", s.failures);
        println!("banded_requests: {}", s.banded_requests);
        println!("max_relocations: {}", s.max_relocations);
        println!("mean_relocations: {:.3}", s.mean_relocations);
        println!("pool  users  l_max  per_row_bound  codes");
        for (p, l) in sim.pools.iter().zip(&load) {
            println!(
                "{:<5} {:<6} {:<6} {:<14} {}..{}",
                l.pool,
                l.per_user.len(),
                l.l_max,
                l.per_row_bound,
                p.code_offset + 1,
                p.code_offset + p.matrix.k()
            );
        }
    }
    Ok(exit_for(sim.summary.failures == 0))
}

fn witness_json(rows: &[usize], cols: &[usize]) -> serde_json::Value {
    json!({
        "rows": rows.iter().map(|r| r + 1).collect::<Vec<_>>(),
        "cols": cols.iter().map(|c| c + 1).collect::<Vec<_>>(),
    })
}

fn report_json(r: &VerificationReport) -> serde_json::Value {
    json!({
        "holds": r.holds(),
        "method": r.method.to_string(),
        "witness": r.witness.as_ref().map(|w| witness_json(&w.rows, &w.cols)),
    })
}

fn bounds_json(r: &OptimalityReport) -> serde_json::Value {
    json!({
        "n": r.n,
        "k": r.k,
        "ones": r.ones,
        "lower_bound": r.lower_bound,
        "l_max": r.max_row_weight,
        "per_row_bound": r.per_row_bound,
        "optimal": r.is_optimal,
        "ratio": r.ratio.to_string(),
    })
}
