//! `pde`: the Cauchy-transform evolution on a contour.

use std::fmt;
use std::str::FromStr;

use clap::Args;
use free_jacobi_core::cauchy::{laurent_g, pde_rhs, solve_pde, Contour, ContourSample};
use free_jacobi_core::moments::integrate_moments_every;
use free_jacobi_core::stationary::stationary_cauchy;
use free_jacobi_core::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::json;

use super::{params, pick, require, Report, StartSpec};
use crate::error::{CliError, Result};
use crate::output::{num, Csv, OutputDir};

/// Moment truncation of the Laurent oracle.
pub const ORACLE_ORDER: usize = 60;

/// `default`, `circle:CENTER,RADIUS,N` or `segment:X_LO,X_HI,Y0,DX`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    pub contour: Contour,
    text_dx: Option<f64>,
}

impl FromStr for ContourSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "default" {
            return Ok(ContourSpec {
                contour: Contour::default_circle(),
                text_dx: None,
            });
        }
        let (kind, rest) = s.split_once(':').ok_or_else(|| format!("unknown contour '{s}'"))?;
        let nums: Vec<f64> = rest
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad number '{v}' in contour '{s}'")))
            .collect::<std::result::Result<_, _>>()?;
        match (kind, nums.as_slice()) {
            ("circle", &[c, r, n]) if n.fract() == 0.0 && n > 0.0 => Contour::circle(c, r, n as usize)
                .map(|contour| ContourSpec { contour, text_dx: None })
                .map_err(|e| e.to_string()),
            ("segment", &[lo, hi, y0, dx]) => Contour::segment_with_spacing(lo, hi, y0, dx)
                .map(|contour| ContourSpec { contour, text_dx: Some(dx) })
                .map_err(|e| e.to_string()),
            _ => Err(format!("unknown contour '{s}' (default, circle:C,R,N, segment:X0,X1,Y0,DX)")),
        }
    }
}

impl fmt::Display for ContourSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.contour {
            Contour::Circle { center, radius, n } => write!(f, "circle:{center:?},{radius:?},{n}"),
            Contour::Segment { x_lo, x_hi, y0, n } => {
                let dx = self.text_dx.unwrap_or((x_hi - x_lo) / (n - 1) as f64);
                write!(f, "segment:{x_lo:?},{x_hi:?},{y0:?},{dx:?}")
            }
        }
    }
}

impl Serialize for ContourSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ContourSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PdeFlags {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// stationary, identity or scalar:C.
    #[arg(long)]
    pub start: Option<StartSpec>,
    /// default, circle:C,R,N or segment:X0,X1,Y0,DX.
    #[arg(long)]
    pub contour: Option<ContourSpec>,
    #[arg(long, visible_alias = "T")]
    pub horizon: Option<f64>,
    #[arg(long, visible_alias = "h")]
    pub step: Option<f64>,
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Real part of the oracle probe point.
    #[arg(long, allow_negative_numbers = true)]
    pub probe_re: Option<f64>,
    /// Imaginary part of the oracle probe point.
    #[arg(long, allow_negative_numbers = true)]
    pub probe_im: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdeRun {
    pub lambda: f64,
    pub theta: f64,
    pub start: StartSpec,
    pub contour: ContourSpec,
    pub horizon: f64,
    pub step: f64,
    pub record_every: usize,
    pub probe: [f64; 2],
}

impl PdeFlags {
    pub fn resolve(self, file: Option<Self>) -> Result<PdeRun> {
        let file = file.unwrap_or_default();
        let run = PdeRun {
            lambda: require(self.lambda, file.lambda, "lambda")?,
            theta: require(self.theta, file.theta, "theta")?,
            start: pick(self.start, file.start, StartSpec::Stationary),
            contour: pick(self.contour, file.contour, "default".parse().expect("default contour")),
            horizon: pick(self.horizon, file.horizon, 2.0),
            step: pick(self.step, file.step, 2.5e-3),
            record_every: pick(self.record_every, file.record_every, 20),
            probe: [pick(self.probe_re, file.probe_re, 2.0), pick(self.probe_im, file.probe_im, 1.0)],
        };
        if run.record_every == 0 {
            return Err(CliError::Usage("--record-every must be at least 1".into()));
        }
        if Complex64::new(run.probe[0], run.probe[1]).norm() <= 1.0 {
            return Err(CliError::Usage("the probe point must satisfy |z| > 1 for the Laurent oracle".into()));
        }
        Ok(run)
    }
}

fn write_samples(out: &mut OutputDir, samples: &[ContourSample]) -> Result<()> {
    let mut csv = Csv::new(&["t", "j", "re_z", "im_z", "re_g", "im_g"]);
    for s in samples {
        for (j, (z, g)) in s.points.iter().zip(&s.values).enumerate() {
            csv.row(&[num(s.t), j.to_string(), num(z.re), num(z.im), num(g.re), num(g.im)]);
        }
    }
    out.write_csv("contour.csv", &csv)
}

pub fn run(cfg: &PdeRun, out: &mut OutputDir) -> Result<Report> {
    let p = params(cfg.lambda, cfg.theta)?;
    let contour = cfg.contour.contour;
    let initial = ContourSample::from_fn(contour, 0.0, |z| match cfg.start {
        StartSpec::Stationary => stationary_cauchy(&p, z),
        StartSpec::Scalar(c) => Ok(1.0 / (z - c)),
        StartSpec::Identity => Ok(1.0 / (z - 1.0)),
    })?;

    // Residual of the initial state: zero for the stationary law.
    let rhs = pde_rhs(&initial, &p)?;
    let trust = contour.trust_region();
    let residual = trust.clone().map(|i| rhs[i].norm()).fold(0.0, f64::max);
    let mut csv = Csv::new(&["j", "re_z", "im_z", "abs_dg_dt"]);
    for i in trust {
        csv.row(&[i.to_string(), num(initial.points[i].re), num(initial.points[i].im), num(rhs[i].norm())]);
    }
    out.write_csv("initial_residual.csv", &csv)?;

    let is_segment = matches!(contour, Contour::Segment { .. });
    if is_segment && cfg.horizon > 0.0 {
        write_samples(out, std::slice::from_ref(&initial))?;
        return Err(CliError::Domain(
            "time stepping on a segment is ill posed; use a circle enclosing [0, 1] for T > 0".into(),
        ));
    }
    let traj = if is_segment {
        vec![initial.clone()]
    } else {
        solve_pde(&initial, &p, cfg.horizon, cfg.step, cfg.record_every)?
    };
    write_samples(out, &traj)?;

    let mut oracle_dev = None;
    if !is_segment {
        let z0 = Complex64::new(cfg.probe[0], cfg.probe[1]);
        let m0 = cfg.start.moments(&p, ORACLE_ORDER)?;
        let moments = integrate_moments_every(&p, m0, cfg.horizon, cfg.step, cfg.record_every)?;
        let mut csv = Csv::new(&["t", "re_pde", "im_pde", "re_oracle", "im_oracle", "abs_difference"]);
        let mut worst = 0.0f64;
        for (s, m) in traj.iter().zip(&moments) {
            let g = s.evaluate(z0)?;
            let o = laurent_g(&m.m, z0);
            worst = worst.max((g - o).norm());
            csv.row(&[num(s.t), num(g.re), num(g.im), num(o.re), num(o.im), num((g - o).norm())]);
        }
        out.write_csv("oracle.csv", &csv)?;
        oracle_dev = Some(worst);
    }
    let drift_from_initial = traj
        .last()
        .map(|s| s.values.iter().zip(&initial.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
        .unwrap_or(0.0);
    let herglotz = traj.iter().all(ContourSample::herglotz_ok);
    out.write_json(
        "summary.json",
        &json!({
            "initial_residual_sup": residual,
            "max_oracle_deviation": oracle_dev,
            "final_change_from_initial": drift_from_initial,
            "herglotz": herglotz,
            "records": traj.len(),
        }),
    )?;
    let mut summary = format!("initial residual sup {residual:.3e} on the trusted region");
    if let Some(w) = oracle_dev {
        summary.push_str(&format!(
            "; max deviation vs Laurent oracle at {}{:+}i: {w:.3e}",
            cfg.probe[0], cfg.probe[1]
        ));
    }
    Ok(Report {
        health: json!({ "herglotz": herglotz }),
        summary,
        domain_error: None,
    })
}
