//! `simulate`: Monte Carlo of the matrix Jacobi process.

use clap::Args;
use free_jacobi_core::stationary::stationary_moments;
use free_jacobi_core::JacobiParams;
use free_jacobi_matsim::{simulate, MatrixJacobiConfig, MatrixStart, Scheme, TrajectoryRecord};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{pick, require, Report};
use crate::error::{CliError, Result};
use crate::output::{num, Csv, OutputDir};

fn parse_start(s: &str) -> std::result::Result<MatrixStart, String> {
    match s {
        "haar" => Ok(MatrixStart::Haar),
        "identity-corner" | "identity" => Ok(MatrixStart::IdentityCorner),
        _ => Err(format!("unknown start '{s}' (haar, identity-corner; a given unitary goes in the config file)")),
    }
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    match s {
        "unitary-corner" => Ok(Scheme::UnitaryCorner),
        "direct-sde" => Ok(Scheme::DirectSde),
        _ => Err(format!("unknown scheme '{s}' (unitary-corner, direct-sde)")),
    }
}

#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SimulateFlags {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, visible_alias = "h")]
    pub step: Option<f64>,
    #[arg(long, visible_alias = "T")]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// haar or identity-corner.
    #[arg(long, value_parser = parse_start)]
    pub start: Option<MatrixStart>,
    /// unitary-corner or direct-sde.
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<Scheme>,
    #[arg(long)]
    pub record_every: Option<usize>,
    #[arg(long)]
    pub moment_order: Option<usize>,
    /// Comma-separated times at which eigenvalues are kept.
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Option<Vec<f64>>,
    /// Also run the other scheme and write `cross_check.csv`.
    #[arg(long)]
    #[serde(default)]
    pub cross_check: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateRun {
    pub config: MatrixJacobiConfig,
    pub cross_check: bool,
}

impl SimulateFlags {
    pub fn resolve(self, file: Option<Self>) -> Result<SimulateRun> {
        let file = file.unwrap_or_default();
        let mut cfg = MatrixJacobiConfig::new(
            require(self.m, file.m, "m")?,
            require(self.p, file.p, "p")?,
            require(self.d, file.d, "d")?,
            pick(self.step, file.step, 0.01),
            pick(self.horizon, file.horizon, 1.0),
            pick(self.trials, file.trials, 50),
            pick(self.seed, file.seed, 0),
        );
        cfg.start = pick(self.start, file.start, MatrixStart::Haar);
        cfg.scheme = pick(self.scheme, file.scheme, Scheme::UnitaryCorner);
        cfg.record_every = pick(self.record_every, file.record_every, 10);
        cfg.moment_order = pick(self.moment_order, file.moment_order, 4);
        cfg.snapshot_times = pick(self.snapshots, file.snapshots, vec![cfg.horizon]);
        cfg.validate().map_err(CliError::from)?;
        Ok(SimulateRun {
            config: cfg,
            cross_check: self.cross_check || file.cross_check,
        })
    }
}

fn trajectory_csv(rec: &TrajectoryRecord) -> Csv {
    let mut csv = Csv::new(&["t", "n", "mean_mn", "stderr_mn"]);
    for (i, &t) in rec.times.iter().enumerate() {
        for n in 1..rec.mean_moments[i].len() {
            csv.row(&[num(t), n.to_string(), num(rec.mean_moments[i][n]), num(rec.stderr_moments[i][n])]);
        }
    }
    csv
}

pub fn run(cfg: &SimulateRun, jobs: usize, out: &mut OutputDir) -> Result<Report> {
    let c = &cfg.config;
    let rec = simulate(c, jobs)?;
    out.write_csv("trajectory.csv", &trajectory_csv(&rec))?;

    let mut csv = Csv::new(&["t", "eig"]);
    for s in &rec.snapshots {
        for &e in &s.eigenvalues {
            csv.row(&[num(s.t), num(e)]);
        }
    }
    out.write_csv("snapshots.csv", &csv)?;

    if c.scheme == Scheme::UnitaryCorner {
        let mut csv = Csv::new(&["t", "re_tr_y", "im_tr_y", "re_tr_y2", "im_tr_y2"]);
        for (i, &t) in rec.times.iter().enumerate() {
            let [a, b] = rec.trace_y[i];
            let [x, y] = rec.trace_y2[i];
            csv.row(&[num(t), num(a), num(b), num(x), num(y)]);
        }
        out.write_csv("traces.csv", &csv)?;
    }

    if cfg.cross_check {
        let mut other = c.clone();
        other.scheme = match c.scheme {
            Scheme::UnitaryCorner => Scheme::DirectSde,
            Scheme::DirectSde => Scheme::UnitaryCorner,
        };
        let orec = simulate(&other, jobs)?;
        let (corner, direct) = match c.scheme {
            Scheme::UnitaryCorner => (&rec, &orec),
            Scheme::DirectSde => (&orec, &rec),
        };
        let mut csv = Csv::new(&["t", "n", "unitary_corner", "direct_sde", "difference"]);
        for (i, &t) in rec.times.iter().enumerate() {
            for n in 1..rec.mean_moments[i].len() {
                let (a, b) = (corner.mean_moments[i][n], direct.mean_moments[i][n]);
                csv.row(&[num(t), n.to_string(), num(a), num(b), num(a - b)]);
            }
        }
        out.write_csv("cross_check.csv", &csv)?;
    }

    let last = rec.times.len() - 1;
    let free = JacobiParams::new(rec.lambda, rec.theta)
        .ok()
        .and_then(|p| stationary_moments(&p, 2).ok())
        .map(|m| [m[1].value, m[2].value]);
    out.write_json(
        "summary.json",
        &json!({
            "lambda": rec.lambda,
            "theta": rec.theta,
            "lambda_ratio": rec.lambda_ratio,
            "theta_ratio": rec.theta_ratio,
            "final_time": rec.times[last],
            "final_m1": [rec.mean_moments[last][1], rec.stderr_moments[last][1]],
            "final_m2": [rec.mean_moments[last][2.min(c.moment_order)], rec.stderr_moments[last][2.min(c.moment_order)]],
            "free_stationary_m1_m2": free,
            "seeds": rec.seeds,
        }),
    )?;
    let mut summary = format!(
        "lambda = {}/{}, theta = {}/{}: mean m1(T) = {:.5} +- {:.5} over {} trials",
        rec.lambda_ratio.0,
        rec.lambda_ratio.1,
        rec.theta_ratio.0,
        rec.theta_ratio.1,
        rec.mean_moments[last][1],
        rec.stderr_moments[last][1],
        rec.trial_moments.len()
    );
    if rec.health.clamp_flagged {
        summary.push_str("; FLAGGED: more than 5% of steps needed an eigenvalue clamp");
    }
    Ok(Report {
        health: serde_json::to_value(&rec.health)?,
        summary,
        domain_error: None,
    })
}
