use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vir_cli::{classify_lines, parse_session, parse_table, run_session};
use vir_core::suites::{run_suite, SUITES};

#[derive(Parser)]
#[command(name = "vir", version, about = "Exact computations in generalized Virasoro algebras")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a session file.
    Run { file: PathBuf },
    /// Classify an action table file.
    Classify { file: PathBuf },
    /// Run a seeded verification suite (`all` runs every suite).
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        samples: usize,
    },
}

fn read(path: &Path) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(2)
    })
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Cmd::Run { file } => {
            let text = match read(&file) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let base = file.parent().unwrap_or(Path::new("."));
            match parse_session(&text, base) {
                Ok(session) => {
                    let out = run_session(&session);
                    print!("{}", out.text);
                    status(out.ok)
                }
                Err(e) => {
                    println!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Cmd::Classify { file } => {
            let text = match read(&file) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let table = match parse_table(&text) {
                Ok(t) => t,
                Err(e) => {
                    println!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            match classify_lines(&table) {
                Ok((lines, matched)) => {
                    for l in lines {
                        println!("{l}");
                    }
                    status(matched)
                }
                Err(e) => {
                    println!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Cmd::Check { suite, seed, samples } => {
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut ok = true;
            for name in names {
                match run_suite(name, seed, samples) {
                    Ok(r) => {
                        println!("{r}");
                        ok &= r.passed();
                    }
                    Err(e) => {
                        println!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
            }
            status(ok)
        }
    }
}
