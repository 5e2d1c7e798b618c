//! `berezin`: verification runs, symbol and Wigner exports, and injectivity
//! reports for the truncated Schrödinger model.
//!
//! Exit codes: 0 when everything ran and passed, 1 when a numerical check
//! failed, 2 for unreadable or invalid input.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use berezin_core::berezin::{
    covariant_symbol, injectivity_report, injectivity_sweep, InjectivityReport, VERDICT_INJECTIVE,
};
use berezin_core::io::{read_operator_csv, read_state_csv, write_grid_csv};
use berezin_core::transforms::{coefficient_map, inverse_fourier_orbit};
use berezin_core::verify::run_verification;
use berezin_core::{Error, ModelConfig, RepresentationContext};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "berezin", version, about = "Berezin symbols on truncated Hermite spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every residual check and write a manifest.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Seed for the random test operators.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Covariant symbol of an operator read from CSV.
    Symbol {
        #[command(flatten)]
        common: Common,
        /// `M^n × M^n` complex entries as `re,im` pairs, row-major.
        #[arg(long)]
        operator: PathBuf,
    },
    /// Wigner distribution and coefficient map of a state against the
    /// Gaussian window.
    Wigner {
        #[command(flatten)]
        common: Common,
        /// `M^n` complex coefficients as `re,im` pairs.
        #[arg(long)]
        state: PathBuf,
    },
    /// Singular-value report for the symbol map.
    Report {
        #[command(flatten)]
        common: Common,
        /// Inclusive truncation range such as `1..4`, each on its default
        /// geometry.
        #[arg(long, value_parser = parse_sweep)]
        sweep: Option<RangeInclusive<usize>>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Print the manifest as JSON instead of the table.
    #[arg(long)]
    json: bool,
}

#[derive(Serialize)]
struct RunManifest {
    config: ModelConfig,
    command: String,
    outputs: Vec<PathBuf>,
    residual_summary: BTreeMap<String, f64>,
    timestamp: String,
}

enum Failure {
    Input(Error),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.into())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn parse_sweep(s: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected M1..M2, got {s:?}"))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: usize = lo.trim().parse().map_err(|_| format!("bad lower bound in {s:?}"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("bad upper bound in {s:?}"))?;
    if lo == 0 || hi < lo {
        return Err(format!("sweep must satisfy 1 <= M1 <= M2, got {s:?}"));
    }
    Ok(lo..=hi)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify { common, seed } => verify(common, *seed),
        Command::Symbol { common, operator } => symbol(common, operator),
        Command::Wigner { common, state } => wigner(common, state),
        Command::Report { common, sweep } => report(common, sweep.clone()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Numerical(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load(common: &Common) -> std::result::Result<ModelConfig, Failure> {
    let cfg = ModelConfig::from_json_file(&common.config)?;
    std::fs::create_dir_all(&common.out)?;
    Ok(cfg)
}

fn finish(common: &Common, manifest: RunManifest, table: &str) -> Outcome {
    let path = common.out.join(format!("{}_manifest.json", manifest.command));
    let text = serde_json::to_string_pretty(&manifest).map_err(Error::from)?;
    std::fs::write(&path, &text)?;
    if common.json {
        println!("{text}");
    } else {
        print!("{table}");
        println!("manifest: {}", path.display());
    }
    Ok(())
}

fn manifest(
    cfg: &ModelConfig,
    command: &str,
    outputs: Vec<PathBuf>,
    residual_summary: BTreeMap<String, f64>,
) -> RunManifest {
    RunManifest {
        config: cfg.clone(),
        command: command.to_string(),
        outputs,
        residual_summary,
        timestamp: chrono::Utc::now().to_rfc3339(),
    }
}

fn verify(common: &Common, seed: u64) -> Outcome {
    let cfg = load(common)?;
    let report = run_verification(&cfg, seed)?;
    let mut table = report.table();
    for b in &report.injectivity {
        table.push_str(&format!("sigma_min(M={}) = {:.10}  {}\n", b.m, b.sigma_min, b.verdict));
    }
    let report_path = common.out.join("verify_report.json");
    std::fs::write(
        &report_path,
        serde_json::to_string_pretty(&report).map_err(Error::from)?,
    )?;
    let table_path = common.out.join("verify_table.txt");
    std::fs::write(&table_path, &table)?;
    finish(
        common,
        manifest(&cfg, "verify", vec![report_path, table_path], report.residual_summary()),
        &table,
    )?;
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Numerical(failed.join(", ")))
    }
}

fn symbol(common: &Common, operator: &Path) -> Outcome {
    let cfg = load(common)?;
    let ctx = RepresentationContext::new(cfg.clone())?;
    let a = read_operator_csv(operator, ctx.dim())?;
    let s = covariant_symbol(&ctx, &a)?;
    let csv = common.out.join("symbol.csv");
    let side = write_grid_csv(&csv, ctx.grid(), s.values(), &cfg, "berezin_symbol")?;
    let table = format!(
        "berezin_symbol: {} grid points -> {}\n",
        s.values().len(),
        csv.display()
    );
    finish(
        common,
        manifest(&cfg, "symbol", vec![csv, side], BTreeMap::new()),
        &table,
    )
}

fn wigner(common: &Common, state: &Path) -> Outcome {
    let cfg = load(common)?;
    let ctx = RepresentationContext::new(cfg.clone())?;
    let f = read_state_csv(state, cfg.n, cfg.m)?;
    let amb = coefficient_map(&ctx, &f, &ctx.gaussian_vector())?;
    let w = inverse_fourier_orbit(&amb)?;
    let amb_csv = common.out.join("ambiguity.csv");
    let amb_side = write_grid_csv(&amb_csv, ctx.grid(), amb.values(), &cfg, "ambiguity")?;
    let w_csv = common.out.join("wigner.csv");
    let w_side = write_grid_csv(&w_csv, w.grid(), w.values(), &cfg, "wigner")?;
    let table = format!(
        "ambiguity: L2 norm {:.12} -> {}\nwigner:    L2 norm {:.12} -> {}\n",
        amb.norm(),
        amb_csv.display(),
        w.norm(),
        w_csv.display()
    );
    finish(
        common,
        manifest(&cfg, "wigner", vec![amb_csv, amb_side, w_csv, w_side], BTreeMap::new()),
        &table,
    )
}

fn report(common: &Common, sweep: Option<RangeInclusive<usize>>) -> Outcome {
    let cfg = load(common)?;
    let reports: Vec<InjectivityReport> = match sweep {
        Some(range) => injectivity_sweep(&cfg, range)?,
        None => vec![injectivity_report(&RepresentationContext::new(cfg.clone())?)?],
    };
    let path = common.out.join("injectivity_report.json");
    let json = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(&reports)
    };
    std::fs::write(&path, json.map_err(Error::from)?)?;

    let mut table = format!(
        "{:>4} {:>16} {:>16} {:>14}  verdict\n",
        "M", "sigma_min", "sigma_max", "cond"
    );
    let mut summary = BTreeMap::new();
    for r in &reports {
        table.push_str(&format!(
            "{:>4} {:>16.10} {:>16.10} {:>14.6e}  {}\n",
            r.m, r.sigma_min, r.sigma_max, r.cond, r.verdict
        ));
        summary.insert(format!("sigma_min_M{}", r.m), r.sigma_min);
    }
    finish(common, manifest(&cfg, "report", vec![path], summary), &table)?;
    let uncertified: Vec<String> = reports
        .iter()
        .filter(|r| r.verdict != VERDICT_INJECTIVE)
        .map(|r| format!("M={} sigma_min={:.3e} <= {:.1e}", r.m, r.sigma_min, r.threshold))
        .collect();
    if uncertified.is_empty() {
        Ok(())
    } else {
        Err(Failure::Numerical(format!(
            "injectivity not certified: {}",
            uncertified.join("; ")
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_syntax() {
        assert_eq!(parse_sweep("1..4").unwrap(), 1..=4);
        assert_eq!(parse_sweep("2..=3").unwrap(), 2..=3);
        assert!(parse_sweep("0..2").is_err());
        assert!(parse_sweep("4..1").is_err());
        assert!(parse_sweep("3").is_err());
    }
}
