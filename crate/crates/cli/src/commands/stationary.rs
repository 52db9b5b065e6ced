//! `stationary`: the stationary law, its moments, log-potentials and a
//! transform self-test.

use clap::Args;
use free_jacobi_core::measures::DEFAULT_GRID;
use free_jacobi_core::stationary::{
    edge_polynomial_residuals, integrate_against_density, k_transform, log_potential_integral, stationary_atoms,
    stationary_cauchy, stationary_log_potentials, stationary_measure, stationary_moments,
    stationary_moments_quadrature, MomentMethod,
};
use free_jacobi_core::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{params, pick, require, Report};
use crate::error::Result;
use crate::output::{num, Csv, OutputDir};

/// Moments are tabulated up to this order.
pub const MOMENT_ORDER: usize = 20;

#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct StationaryFlags {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Points of the graded density grid.
    #[arg(long)]
    pub grid_size: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryRun {
    pub lambda: f64,
    pub theta: f64,
    pub grid_size: usize,
}

impl StationaryFlags {
    pub fn resolve(self, file: Option<Self>) -> Result<StationaryRun> {
        let file = file.unwrap_or_default();
        Ok(StationaryRun {
            lambda: require(self.lambda, file.lambda, "lambda")?,
            theta: require(self.theta, file.theta, "theta")?,
            grid_size: pick(self.grid_size, file.grid_size, DEFAULT_GRID),
        })
    }
}

fn method_name(m: MomentMethod) -> &'static str {
    match m {
        MomentMethod::Ladder => "hypergeometric",
        MomentMethod::Quadrature => "quadrature",
        MomentMethod::QuadratureFallback => "quadrature-fallback",
    }
}

/// Points `1/2 + 2e^{iφ}` of the transform self-test.
fn test_contour(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| {
            let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
            Complex64::new(0.5 + 2.0 * phi.cos(), 2.0 * phi.sin())
        })
        .collect()
}

pub fn run(cfg: &StationaryRun, out: &mut OutputDir) -> Result<Report> {
    let p = params(cfg.lambda, cfg.theta)?;
    let (a0, a1) = stationary_atoms(&p);
    let (lo, hi) = p.support_edges();
    let mu = stationary_measure(&p, cfg.grid_size)?;

    let mut csv = Csv::new(&["x", "density"]);
    for (&x, &g) in mu.grid().iter().zip(mu.density()) {
        csv.row(&[num(x), num(g)]);
    }
    out.write_csv("density.csv", &csv)?;

    let regime_violation = p.theta() * (p.lambda() + 1.0) > 1.0 + 1e-12;
    let (r0, r1) = edge_polynomial_residuals(&p);
    let continuous = integrate_against_density(&p, |_| 1.0)?;
    out.write_json(
        "measure.json",
        &json!({
            "lambda": cfg.lambda,
            "theta": cfg.theta,
            "atom0": a0,
            "atom1": a1,
            "support": [lo, hi],
            "continuous_mass": continuous,
            "mass_balance_error": a0 + a1 + continuous - 1.0,
            "edge_root_residuals": [r0, r1],
            "sde_regime": p.sde_valid(),
            "strict_interior": p.strict_interior(),
            "grid_points": mu.grid().len(),
        }),
    )?;

    let ladder = stationary_moments(&p, MOMENT_ORDER)?;
    let quad = stationary_moments_quadrature(&p, MOMENT_ORDER)?;
    let mut csv = Csv::new(&["n", "hypergeometric", "quadrature", "method"]);
    let mut fallbacks = 0;
    for (n, (l, q)) in ladder.iter().zip(&quad).enumerate() {
        if l.method == MomentMethod::QuadratureFallback {
            fallbacks += 1;
        }
        let hyp = if l.method == MomentMethod::Ladder { num(l.value) } else { String::new() };
        csv.row(&[n.to_string(), hyp, num(*q), method_name(l.method).to_string()]);
    }
    out.write_csv("moments.csv", &csv)?;

    let logpot = match (stationary_log_potentials(&p), log_potential_integral(&p)) {
        (Ok((l1m, lj)), Ok(integral)) => {
            let quad_l1m = integrate_against_density(&p, |a| ((1.0 - hi) + a.from_hi).ln())?;
            json!({
                "log_one_minus_j": l1m,
                "log_j": lj,
                "integral_representation": integral,
                "integral_minus_twice_closed_form": integral - 2.0 * l1m,
                "quadrature_log_one_minus_j": quad_l1m,
            })
        }
        (Err(e), _) | (_, Err(e)) => json!({ "unavailable": e.to_string() }),
    };
    out.write_json("log_potential.json", &logpot)?;

    let mut kg_worst = 0.0f64;
    let mut herglotz = true;
    for z in test_contour(64) {
        let g = stationary_cauchy(&p, z)?;
        herglotz &= z.im == 0.0 || g.im * z.im < 0.0;
        kg_worst = kg_worst.max((k_transform(&p, g)? - z).norm());
    }
    let far = Complex64::new(1e6, 0.0);
    let far_err = (far * stationary_cauchy(&p, far)? - 1.0).norm();
    out.write_json(
        "self_test.json",
        &json!({
            "k_of_g_max_error": kg_worst,
            "herglotz": herglotz,
            "far_field_error": far_err,
            "mass_balance_error": a0 + a1 + continuous - 1.0,
            "moment_ladder_vs_quadrature_max": ladder.iter().zip(&quad).map(|(l, q)| (l.value - q).abs()).fold(0.0, f64::max),
        }),
    )?;

    let summary = format!(
        "support [{lo:.6}, {hi:.6}], atoms ({a0:.6}, {a1:.6}), m1 = {:.6}, K(G(z)) error {kg_worst:.1e}",
        ladder[1].value
    );
    let domain_error = regime_violation.then(|| {
        format!(
            "regime violation: 1/theta = {:.6} < lambda + 1 = {:.6}; density and atoms were still written",
            1.0 / p.theta(),
            p.lambda() + 1.0
        )
    });
    Ok(Report {
        health: json!({ "moment_fallbacks": fallbacks, "sde_regime": p.sde_valid() }),
        summary,
        domain_error,
    })
}
