//! Command-line front end for the free Jacobi toolkit.
//!
//! Subcommands write plot-ready CSV (17 significant digits) and JSON into
//! an output directory together with a `manifest.json` that lists every
//! file with its SHA-256 and the fully resolved parameters. `replay` feeds
//! such a manifest back in and checks that the outputs are reproduced.
//!
//! Parameters come from flags, optionally backed by a TOML file with one
//! table per subcommand (`[stationary]`, `[moments]`, `[pde]`,
//! `[simulate]`); flags win.
//!
//! Exit codes: 0 success, 1 acceptance failure, 2 usage or domain error.

#![forbid(unsafe_code)]

pub mod commands;
pub mod error;
pub mod manifest;
pub mod output;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::Value;

use commands::moments::{MomentsFlags, MomentsRun};
use commands::pde::{PdeFlags, PdeRun};
use commands::simulate::{SimulateFlags, SimulateRun};
use commands::stationary::{StationaryFlags, StationaryRun};
use commands::Report;
use error::{CliError, Result};
use manifest::{RunManifest, MANIFEST_FILE};
use output::OutputDir;
use verify::Suite;

#[derive(Debug, Parser)]
#[command(name = "free-jacobi", version, about = "Numerics for the free Jacobi process")]
pub struct Cli {
    /// TOML file with per-subcommand tables; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "free-jacobi-out")]
    pub out: PathBuf,
    /// Worker threads for Monte Carlo trials.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stationary law: density, atoms, moments, log-potentials.
    Stationary(StationaryFlags),
    /// Moment hierarchy with Chebyshev and log-identity diagnostics.
    Moments(MomentsFlags),
    /// Cauchy-transform evolution on a contour.
    Pde(PdeFlags),
    /// Monte Carlo of the matrix Jacobi process.
    Simulate(SimulateFlags),
    /// Run acceptance suites and print a JSON verdict.
    Verify(VerifyArgs),
    /// Re-run a manifest and compare output hashes.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Coarser Monte Carlo steps and a smaller parameter sweep.
    #[arg(long)]
    pub quick: bool,
    /// Also write the verdict to this file.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// A `manifest.json` from an earlier run.
    pub manifest: PathBuf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    stationary: Option<StationaryFlags>,
    moments: Option<MomentsFlags>,
    pde: Option<PdeFlags>,
    simulate: Option<SimulateFlags>,
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// A subcommand with every parameter fixed.
#[derive(Clone, Debug, PartialEq)]
pub enum Resolved {
    Stationary(StationaryRun),
    Moments(MomentsRun),
    Pde(PdeRun),
    Simulate(SimulateRun),
}

impl Resolved {
    pub fn name(&self) -> &'static str {
        match self {
            Resolved::Stationary(_) => "stationary",
            Resolved::Moments(_) => "moments",
            Resolved::Pde(_) => "pde",
            Resolved::Simulate(_) => "simulate",
        }
    }

    fn parameters(&self) -> Result<Value> {
        Ok(match self {
            Resolved::Stationary(r) => serde_json::to_value(r)?,
            Resolved::Moments(r) => serde_json::to_value(r)?,
            Resolved::Pde(r) => serde_json::to_value(r)?,
            Resolved::Simulate(r) => serde_json::to_value(r)?,
        })
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Resolved::Simulate(r) => Some(r.config.seed),
            _ => None,
        }
    }

    /// Rebuilds a run from a manifest's subcommand and parameters.
    pub fn from_manifest(m: &RunManifest) -> Result<Self> {
        let bad = |e: serde_json::Error| CliError::Usage(format!("manifest parameters: {e}"));
        let p = m.parameters.clone();
        Ok(match m.subcommand.as_str() {
            "stationary" => Resolved::Stationary(serde_json::from_value(p).map_err(bad)?),
            "moments" => Resolved::Moments(serde_json::from_value(p).map_err(bad)?),
            "pde" => Resolved::Pde(serde_json::from_value(p).map_err(bad)?),
            "simulate" => Resolved::Simulate(serde_json::from_value(p).map_err(bad)?),
            other => return Err(CliError::Usage(format!("manifest names unknown subcommand '{other}'"))),
        })
    }
}

/// Runs a resolved subcommand into `out` and writes its manifest.
///
/// The manifest is written even when the command reports a domain error
/// after producing outputs; the error is then returned.
pub fn execute(run: &Resolved, out: &Path, jobs: usize) -> Result<(RunManifest, Report)> {
    let started = SystemTime::now();
    let mut dir = OutputDir::create(out)?;
    let result = match run {
        Resolved::Stationary(r) => commands::stationary::run(r, &mut dir),
        Resolved::Moments(r) => commands::moments::run(r, &mut dir),
        Resolved::Pde(r) => commands::pde::run(r, &mut dir),
        Resolved::Simulate(r) => commands::simulate::run(r, jobs, &mut dir),
    };
    let mut manifest = RunManifest::new(run.name(), run.parameters()?, run.seed(), started);
    manifest.outputs = dir.files().to_vec();
    match result {
        Ok(report) => {
            manifest.health = report.health.clone();
            write_manifest(out, &manifest)?;
            Ok((manifest, report))
        }
        Err(e) => {
            if !manifest.outputs.is_empty() {
                manifest.health = serde_json::json!({ "error": e.to_string() });
                write_manifest(out, &manifest)?;
            }
            Err(e)
        }
    }
}

fn write_manifest(out: &Path, m: &RunManifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(m)?;
    text.push('\n');
    fs::write(out.join(MANIFEST_FILE), text)?;
    Ok(())
}

fn finish(report: Report, out: &Path) -> Result<()> {
    println!("{}", report.summary);
    println!("outputs in {}", out.display());
    match report.domain_error {
        Some(msg) => Err(CliError::Domain(msg)),
        None => Ok(()),
    }
}

/// Re-runs `manifest` into `out` and lists outputs whose hash differs.
pub fn replay(manifest: &Path, out: &Path, jobs: usize) -> Result<Vec<String>> {
    let text = fs::read_to_string(manifest)?;
    let recorded: RunManifest = serde_json::from_str(&text)?;
    if recorded.schema != manifest::SCHEMA {
        return Err(CliError::Usage(format!("unsupported manifest schema '{}'", recorded.schema)));
    }
    let run = Resolved::from_manifest(&recorded)?;
    let (fresh, _) = match execute(&run, out, jobs) {
        Ok(v) => v,
        Err(CliError::Domain(_)) => {
            let m: RunManifest = serde_json::from_str(&fs::read_to_string(out.join(MANIFEST_FILE))?)?;
            (m, Report { health: Value::Null, summary: String::new(), domain_error: None })
        }
        Err(e) => return Err(e),
    };
    let mut mismatched = Vec::new();
    for f in &recorded.outputs {
        match fresh.outputs.iter().find(|g| g.path == f.path) {
            Some(g) if g.sha256 == f.sha256 => {}
            _ => mismatched.push(f.path.clone()),
        }
    }
    Ok(mismatched)
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    let config = load_config(cli.config.as_deref())?;
    let resolved = match cli.command {
        Command::Stationary(f) => Resolved::Stationary(f.resolve(config.stationary)?),
        Command::Moments(f) => Resolved::Moments(f.resolve(config.moments)?),
        Command::Pde(f) => Resolved::Pde(f.resolve(config.pde)?),
        Command::Simulate(f) => Resolved::Simulate(f.resolve(config.simulate)?),
        Command::Verify(v) => {
            let verdict = verify::run_suite(v.suite, v.quick, |r| eprintln!("{}", r.line()));
            let text = serde_json::to_string_pretty(&verdict)?;
            println!("{text}");
            if let Some(path) = v.json {
                fs::write(path, format!("{text}\n"))?;
            }
            return if verdict.passed {
                Ok(())
            } else {
                let failed: Vec<String> = verdict.criteria.iter().filter(|c| !c.passed).map(|c| c.id.to_string()).collect();
                Err(CliError::Acceptance(format!("criteria {} failed", failed.join(", "))))
            };
        }
        Command::Replay(r) => {
            let mismatched = replay(&r.manifest, &cli.out, cli.jobs)?;
            return if mismatched.is_empty() {
                println!("all outputs reproduced in {}", cli.out.display());
                Ok(())
            } else {
                Err(CliError::Acceptance(format!("outputs differ: {}", mismatched.join(", "))))
            };
        }
    };
    let (_, report) = execute(&resolved, &cli.out, cli.jobs)?;
    finish(report, &cli.out)
}
