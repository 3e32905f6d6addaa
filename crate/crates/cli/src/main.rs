use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use gerth_core::harness::{self, ScanConfig, ScanStatus, VerifyKind};
use gerth_core::heuristics;
use gerth_core::linkage::{self, EnumerationMethod};

#[derive(Parser)]
#[command(name = "gerth", version, about = "3-ranks of cyclic cubic fields and their predicted distribution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute s for every field up to a conductor bound and aggregate.
    Scan {
        #[arg(long)]
        max_conductor: u64,
        #[arg(long, default_value_t = 3)]
        kmax: u32,
        #[arg(long, default_value_t = 1)]
        shards: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Also write `<out>.fields.csv` with one row per field.
        #[arg(long)]
        per_field: bool,
    },
    /// Run an exact verification suite.
    Verify {
        #[command(subcommand)]
        kind: VerifyCommand,
        /// Print every case, not only failures.
        #[arg(long, global = true)]
        verbose: bool,
    },
    /// Count maximal unlinked sets in (Z/p²)^k.
    Combinatorics {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u32,
        /// Also enumerate the sets (both methods when small enough).
        #[arg(long)]
        enumerate: bool,
    },
    /// Predicted densities and moments as JSON.
    Predict {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        kmax: u32,
        #[arg(long, default_value_t = 12)]
        smax: u32,
    },
    /// Compare against a table of class group 3-ranks.
    Crosscheck {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        max_conductor: u64,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    Identity {
        #[arg(long, default_value_t = 200)]
        max_d: u64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        max_omega: Option<usize>,
    },
    Combinatorics {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    Reciprocity {
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_norm: u64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Scan { max_conductor, kmax, shards, out, checkpoint, per_field } => {
            let cfg = ScanConfig {
                max_conductor,
                k_max: kmax,
                shard_count: shards,
                checkpoint_path: checkpoint,
                output_path: Some(out.clone()),
                emit_per_field: per_field,
            };
            let outcome = harness::scan(&cfg)?;
            match outcome.status {
                ScanStatus::Completed => {
                    let report = outcome.report.expect("completed scan has a report");
                    eprintln!(
                        "{} fields up to {} in {:.1?}; report written to {}",
                        report.field_count,
                        max_conductor,
                        outcome.wall_time,
                        out.display()
                    );
                    Ok(ExitCode::SUCCESS)
                }
                ScanStatus::Interrupted => bail!("scan interrupted; rerun with the same checkpoint to resume"),
            }
        }
        Command::Verify { kind, verbose } => {
            let kind = match kind {
                VerifyCommand::Identity { max_d, k, max_omega } => VerifyKind::Identity { max_d, k, max_omega },
                VerifyCommand::Combinatorics { p, k } => VerifyKind::Combinatorics { p, k },
                VerifyCommand::Reciprocity { pairs, seed, max_norm } => {
                    VerifyKind::Reciprocity { pairs, seed, max_norm }
                }
            };
            let summary = harness::verify(kind)?;
            for case in &summary.cases {
                if verbose || !case.passed {
                    println!("{} {}: {}", if case.passed { "ok  " } else { "FAIL" }, case.name, case.detail);
                }
            }
            let failed = summary.failures().count();
            println!("{} cases, {} failed", summary.cases.len(), failed);
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Combinatorics { p, k, enumerate } => {
            if p < 2 || !gerth_core::arith::is_prime(p) {
                bail!("p must be prime, got {p}");
            }
            let formula = linkage::count_maximal_unlinked(p, k);
            let n_k = linkage::count_subspaces(k, p);
            let n_k1 = linkage::count_subspaces(k + 1, p);
            let mut out = serde_json::json!({
                "p": p,
                "k": k,
                "N_k": n_k.to_string(),
                "N_k_plus_1": n_k1.to_string(),
                "maximal_unlinked_sets": formula.to_string(),
            });
            if enumerate {
                let sub = linkage::enumerate_maximal_unlinked_sets(p, k as usize, EnumerationMethod::Subspace)
                    .context("subspace enumeration")?;
                out["subspace_enumeration"] = sub.len().into();
                match linkage::enumerate_maximal_unlinked_sets(p, k as usize, EnumerationMethod::Brute) {
                    Ok(brute) => {
                        out["brute_enumeration"] = brute.len().into();
                        out["methods_agree"] = (brute == sub).into();
                    }
                    Err(e) => out["brute_enumeration"] = format!("skipped: {e}").into(),
                }
            }
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Predict { p, kmax, smax } => {
            if p < 2 || !gerth_core::arith::is_prime(p) {
                bail!("p must be prime, got {p}");
            }
            println!("{}", serde_json::to_string_pretty(&heuristics::prediction(p, kmax, smax))?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Crosscheck { table, max_conductor } => {
            let report = harness::crosscheck(&table, max_conductor)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.is_clean() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
