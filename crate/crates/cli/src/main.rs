use std::path::{Path, PathBuf};
use std::process::ExitCode;

use apm::report::{verify, VerificationReport};
use apm::search::{search, Family, SearchConfig};
use apm::{display_name, load_manifold, CliError, EXIT_FAIL, EXIT_IO, EXIT_OK};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "apm",
    version,
    about = "Riemannian almost product manifolds on invariant frames"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check a manifold spec against all structural invariants.
    Validate { file: PathBuf },
    /// Run every identity check on one manifold.
    Verify {
        file: PathBuf,
        /// Classification tolerance.
        #[arg(long, env = "APM_DEFAULT_TOL", default_value_t = apm_core::DEFAULT_CLASS_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Include per-phase timings in JSON output.
        #[arg(long)]
        timing: bool,
    },
    /// Search for strict W3 manifolds and write them as fixtures.
    #[command(name = "search-w3")]
    SearchW3 {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "nilpotent2")]
        family: Family,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        max_candidates: usize,
        /// Number of fixtures to emit.
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, env = "APM_DEFAULT_TOL", default_value_t = apm_core::DEFAULT_CLASS_TOL)]
        tol: f64,
        /// Fixture name (and file stem); defaults to one derived from family, dim and seed.
        #[arg(long)]
        name: Option<String>,
    },
    /// Verify every `*.json` spec in a directory.
    Report {
        dir: PathBuf,
        #[arg(long, env = "APM_DEFAULT_TOL", default_value_t = apm_core::DEFAULT_CLASS_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        timing: bool,
    },
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "tolerance must be positive and finite, got {tol}"
        )))
    }
}

fn verify_file(path: &Path, tol: f64) -> Result<VerificationReport, CliError> {
    let (spec, m) = load_manifold(path)?;
    Ok(verify(&m, &display_name(&spec, path), tol)?)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Validate { file } => {
            let (spec, m) = load_manifold(&file)?;
            println!(
                "valid: {} (dimension {}, {} bracket entries)",
                display_name(&spec, &file),
                m.dim(),
                m.brackets().entries().len()
            );
            Ok(EXIT_OK)
        }
        Command::Verify {
            file,
            tol,
            format,
            timing,
        } => {
            check_tol(tol)?;
            let report = verify_file(&file, tol)?;
            match format {
                Format::Json => print!("{}", pretty(&report.to_json(timing))),
                Format::Text => print!("{}", report.to_text()),
            }
            Ok(if report.failed() { EXIT_FAIL } else { EXIT_OK })
        }
        Command::SearchW3 {
            dim,
            seed,
            family,
            out,
            max_candidates,
            count,
            tol,
            name,
        } => {
            let config = SearchConfig {
                dim,
                family,
                seed,
                max_candidates,
                tolerance: tol,
                count,
            };
            match search(&config, name.as_deref())? {
                Ok(found) => {
                    std::fs::create_dir_all(&out)
                        .map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
                    for (file, spec) in found {
                        let path = out.join(&file);
                        std::fs::write(&path, spec.to_fixture_json())
                            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                        println!("{}", path.display());
                    }
                }
                Err(none) => eprintln!("{none}"),
            }
            Ok(EXIT_OK)
        }
        Command::Report {
            dir,
            tol,
            format,
            timing,
        } => {
            check_tol(tol)?;
            let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
                .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            if files.is_empty() {
                eprintln!("warning: no *.json specs in {}", dir.display());
            }
            let results: Vec<(String, Result<VerificationReport, CliError>)> = files
                .par_iter()
                .map(|p| {
                    let file = p.file_name().unwrap().to_string_lossy().into_owned();
                    (file, verify_file(p, tol))
                })
                .collect();
            let passed = results
                .iter()
                .filter(|(_, r)| r.as_ref().is_ok_and(|r| !r.failed()))
                .count();
            let failed = results.len() - passed;
            match format {
                Format::Json => {
                    let reports: Vec<Value> = results
                        .iter()
                        .map(|(file, r)| match r {
                            Ok(r) => {
                                let mut v = r.to_json(timing);
                                v["file"] = json!(file);
                                v
                            }
                            Err(e) => {
                                json!({"file": file, "error": e.to_string(), "overall": "FAIL"})
                            }
                        })
                        .collect();
                    let summary = json!({"files": results.len(), "pass": passed, "fail": failed});
                    print!(
                        "{}",
                        pretty(&json!({"reports": reports, "summary": summary}))
                    );
                }
                Format::Text => {
                    for (file, r) in &results {
                        println!("== {file}");
                        match r {
                            Ok(r) => print!("{}", r.to_text()),
                            Err(e) => println!("FAIL     {e}"),
                        }
                    }
                    println!("files {}, pass {passed}, fail {failed}", results.len());
                }
            }
            Ok(if failed > 0 { EXIT_FAIL } else { EXIT_OK })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                apm::EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    };
    debug_assert!(code <= EXIT_IO);
    ExitCode::from(code as u8)
}
