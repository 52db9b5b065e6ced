use faer::{c64, Mat, Side};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brownian::{hermitian_increment, normalized_traces, polar_projection, unitarity_defect, unitary_bm_step, UNITARITY_TOL};
use crate::config::{MatrixJacobiConfig, MatrixStart, Scheme};
use crate::corner::{corner_eigenvalues, corner_jacobi, hermitian_eigenvalues, spectral_moments, spectrum_excess};
use crate::error::{MatsimError, Result};
use crate::haar::{complex_gaussian_matrix, sample_haar_unitary};
use crate::trial_rng;

/// Eigenvalues of the direct-SDE state are clamped into `[ε, 1 − ε]` before
/// taking square roots.
pub const CLAMP_EPS: f64 = 1e-9;

/// A run is flagged when more than this fraction of steps needed a clamp.
pub const CLAMP_FLAG_FRACTION: f64 = 0.05;

/// Where a trial's random numbers come from: a ChaCha8 stream keyed by the
/// run seed, with the trial index as stream number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSeed {
    pub trial: usize,
    pub seed: u64,
    pub stream: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    /// Eigenvalues of every completed trial, concatenated in trial order.
    pub eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbortedTrial {
    pub trial: usize,
    pub reason: String,
}

/// Counters describing numerical health of a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub steps: u64,
    /// Steps in which at least one eigenvalue was clamped (direct SDE).
    pub clamp_steps: u64,
    pub clamped_eigenvalues: u64,
    /// Polar re-projections after unitarity drift (corner scheme).
    pub reorthonormalizations: u64,
    pub max_unitarity_defect: f64,
    /// Largest distance of a recorded spectrum outside `[0, 1]` before
    /// clamping.
    pub max_spectrum_excursion: f64,
    pub aborted: Vec<AbortedTrial>,
    pub clamp_flagged: bool,
}

/// Aggregated output of a Monte Carlo run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub config: MatrixJacobiConfig,
    pub lambda: f64,
    pub theta: f64,
    pub lambda_ratio: (usize, usize),
    pub theta_ratio: (usize, usize),
    pub times: Vec<f64>,
    /// `mean_moments[i][n]`: trial mean of `tr_m(Jⁿ)` at `times[i]`,
    /// `n = 0 … moment_order`.
    pub mean_moments: Vec<Vec<f64>>,
    pub stderr_moments: Vec<Vec<f64>>,
    /// `trial_moments[trial][i][n]` for completed trials, in trial order.
    pub trial_moments: Vec<Vec<Vec<f64>>>,
    /// Trial mean of `tr_d Y` as `[re, im]` (corner scheme only).
    pub trace_y: Vec<[f64; 2]>,
    /// Trial mean of `tr_d Y²` as `[re, im]` (corner scheme only).
    pub trace_y2: Vec<[f64; 2]>,
    pub snapshots: Vec<Snapshot>,
    pub seeds: Vec<TrialSeed>,
    pub health: Health,
}

impl TrajectoryRecord {
    /// Mean and standard error of `tr_m(Jⁿ)` over time.
    pub fn moment_series(&self, n: usize) -> Vec<(f64, f64, f64)> {
        self.times
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, self.mean_moments[i][n], self.stderr_moments[i][n]))
            .collect()
    }
}

struct Plan {
    steps: usize,
    every: usize,
    snapshot_steps: Vec<usize>,
}

impl Plan {
    fn new(cfg: &MatrixJacobiConfig) -> Self {
        Self {
            steps: cfg.steps(),
            every: cfg.record_every,
            snapshot_steps: cfg.snapshot_times.iter().map(|t| (t / cfg.step).round() as usize).collect(),
        }
    }

    fn is_record(&self, step: usize) -> bool {
        step % self.every == 0 || step == self.steps
    }

    fn record_steps(&self) -> Vec<usize> {
        (0..=self.steps).filter(|&s| self.is_record(s)).collect()
    }
}

#[derive(Default)]
struct TrialOutput {
    moments: Vec<Vec<f64>>,
    traces: Vec<(c64, c64)>,
    snapshots: Vec<Vec<f64>>,
    steps: u64,
    clamp_steps: u64,
    clamped: u64,
    reorth: u64,
    max_defect: f64,
    max_excursion: f64,
}

impl TrialOutput {
    fn observe(&mut self, plan: &Plan, step: usize, eig: &[f64], order: usize) {
        if plan.is_record(step) {
            self.moments.push(spectral_moments(eig, order));
        }
        for (k, &s) in plan.snapshot_steps.iter().enumerate() {
            if s == step {
                self.snapshots[k] = eig.to_vec();
            }
        }
    }

    fn wants(&self, plan: &Plan, step: usize) -> bool {
        plan.is_record(step) || plan.snapshot_steps.contains(&step)
    }
}

fn given_unitary(cfg: &MatrixJacobiConfig) -> Result<Mat<c64>> {
    let MatrixStart::Given { entries } = &cfg.start else {
        unreachable!("caller matched the Given start");
    };
    let d = cfg.d;
    let y = Mat::from_fn(d, d, |i, j| {
        let [re, im] = entries[i * d + j];
        c64::new(re, im)
    });
    let defect = unitarity_defect(&y);
    if defect > UNITARITY_TOL {
        return Err(MatsimError::InvalidConfig(format!(
            "given start is not unitary (defect {defect:e})"
        )));
    }
    Ok(y)
}

fn corner_trial(cfg: &MatrixJacobiConfig, plan: &Plan, trial: usize) -> Result<TrialOutput> {
    let mut rng = trial_rng(cfg.seed, trial);
    let d = cfg.d;
    let mut y = match cfg.start {
        MatrixStart::Haar => sample_haar_unitary(d, &mut rng)?,
        MatrixStart::IdentityCorner => Mat::identity(d, d),
        MatrixStart::Given { .. } => given_unitary(cfg)?,
    };
    let mut out = TrialOutput {
        snapshots: vec![Vec::new(); plan.snapshot_steps.len()],
        ..Default::default()
    };
    for step in 0..=plan.steps {
        if step > 0 {
            let dx = hermitian_increment(d, cfg.step, &mut rng);
            y = unitary_bm_step(&y, &dx)?;
            out.steps += 1;
        }
        if !out.wants(plan, step) {
            continue;
        }
        let defect = unitarity_defect(&y);
        out.max_defect = out.max_defect.max(defect);
        if defect > UNITARITY_TOL {
            y = polar_projection(&y)?;
            out.reorth += 1;
        }
        let eig = corner_eigenvalues(&y, cfg.m, cfg.p)?;
        if plan.is_record(step) {
            out.traces.push(normalized_traces(&y));
        }
        out.observe(plan, step, &eig, cfg.moment_order);
    }
    Ok(out)
}

/// One Euler–Maruyama step of the direct SDE,
/// `J + noise·(√(I−J) G √J + h.c.) + (θI − J)h`, followed by Hermitian
/// symmetrization. `G` holds standard complex Gaussians and `noise` is the
/// entry scale of the Brownian increment.
///
/// Eigenvalues are clamped into `[CLAMP_EPS, 1 − CLAMP_EPS]` before the
/// square roots are formed; the number clamped is returned alongside.
pub fn direct_sde_step(j: &Mat<c64>, theta: f64, h: f64, g: &Mat<c64>, noise: f64) -> Result<(Mat<c64>, u64)> {
    let m = j.nrows();
    if j.ncols() != m || g.nrows() != m || g.ncols() != m {
        return Err(MatsimError::InvalidConfig("direct SDE step needs square matrices of one size".into()));
    }
    let e = j
        .self_adjoint_eigen(Side::Lower)
        .map_err(|err| MatsimError::Eigen(format!("{err:?}")))?;
    let u = e.U();
    let s = e.S();
    let mut clamped = 0u64;
    let lam: Vec<f64> = (0..m)
        .map(|i| {
            let v = s[i].re;
            let c = v.clamp(CLAMP_EPS, 1.0 - CLAMP_EPS);
            if c != v {
                clamped += 1;
            }
            c
        })
        .collect();
    let root = |f: &dyn Fn(f64) -> f64| {
        let scaled = Mat::from_fn(m, m, |i, k| u[(i, k)] * f(lam[k]));
        scaled.as_ref() * u.adjoint()
    };
    let sq = root(&|v| v.sqrt());
    let sqc = root(&|v| (1.0 - v).sqrt());
    let a = &sqc * (g * &sq);
    let next = Mat::from_fn(m, m, |i, k| {
        let drift = if i == k { theta } else { 0.0 } - j[(i, k)];
        j[(i, k)] + (a[(i, k)] + a[(k, i)].conj()) * noise + drift * h
    });
    let sym = Mat::from_fn(m, m, |i, k| (next[(i, k)] + next[(k, i)].conj()) * 0.5);
    Ok((sym, clamped))
}

fn sde_trial(cfg: &MatrixJacobiConfig, plan: &Plan, trial: usize) -> Result<TrialOutput> {
    let mut rng = trial_rng(cfg.seed, trial);
    let (m, h) = (cfg.m, cfg.step);
    let theta = cfg.theta();
    let noise = (h / cfg.d as f64).sqrt();
    let mut j = match cfg.start {
        MatrixStart::Haar => corner_jacobi(&sample_haar_unitary(cfg.d, &mut rng)?, m, cfg.p)?,
        MatrixStart::IdentityCorner => Mat::identity(m, m),
        MatrixStart::Given { .. } => corner_jacobi(&given_unitary(cfg)?, m, cfg.p)?,
    };
    let mut out = TrialOutput {
        snapshots: vec![Vec::new(); plan.snapshot_steps.len()],
        ..Default::default()
    };
    for step in 0..=plan.steps {
        if step > 0 {
            let db = complex_gaussian_matrix(m, m, &mut rng);
            let (next, clamped) = direct_sde_step(&j, theta, h, &db, noise)?;
            if clamped > 0 {
                out.clamp_steps += 1;
                out.clamped += clamped;
            }
            j = next;
            out.steps += 1;
        }
        if !out.wants(plan, step) {
            continue;
        }
        let mut eig = hermitian_eigenvalues(j.as_ref())?;
        out.max_excursion = out.max_excursion.max(spectrum_excess(&eig));
        for v in &mut eig {
            *v = v.clamp(0.0, 1.0);
        }
        out.observe(plan, step, &eig, cfg.moment_order);
    }
    Ok(out)
}

fn run_trials<F>(trials: usize, jobs: usize, f: F) -> Result<Vec<Result<TrialOutput>>>
where
    F: Fn(usize) -> Result<TrialOutput> + Sync,
{
    faer::set_global_parallelism(faer::Par::Seq);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| MatsimError::Pool(e.to_string()))?;
    Ok(pool.install(|| (0..trials).into_par_iter().map(&f).collect()))
}

fn aggregate(cfg: &MatrixJacobiConfig, plan: &Plan, results: Vec<Result<TrialOutput>>) -> Result<TrajectoryRecord> {
    let mut health = Health::default();
    let mut done = Vec::with_capacity(results.len());
    for (trial, r) in results.into_iter().enumerate() {
        match r {
            Ok(o) => done.push(o),
            Err(e) => health.aborted.push(AbortedTrial {
                trial,
                reason: e.to_string(),
            }),
        }
    }
    if health.aborted.len() * 100 > cfg.trials {
        return Err(MatsimError::TooManyAborts {
            aborted: health.aborted.len(),
            trials: cfg.trials,
            first: health.aborted[0].reason.clone(),
        });
    }
    let times: Vec<f64> = plan.record_steps().iter().map(|&s| s as f64 * cfg.step).collect();
    let n_ok = done.len() as f64;
    let order = cfg.moment_order;
    let mut mean = vec![vec![0.0; order + 1]; times.len()];
    let mut stderr = vec![vec![0.0; order + 1]; times.len()];
    for (i, (mrow, srow)) in mean.iter_mut().zip(stderr.iter_mut()).enumerate() {
        for n in 0..=order {
            let vals = done.iter().map(|o| o.moments[i][n]);
            let mu = vals.clone().sum::<f64>() / n_ok;
            mrow[n] = mu;
            if done.len() > 1 {
                let var = vals.map(|v| (v - mu) * (v - mu)).sum::<f64>() / (n_ok - 1.0);
                srow[n] = (var / n_ok).sqrt();
            }
        }
    }
    let trace_mean = |pick: fn(&(c64, c64)) -> c64| -> Vec<[f64; 2]> {
        if cfg.scheme != Scheme::UnitaryCorner {
            return Vec::new();
        }
        (0..times.len())
            .map(|i| {
                let s: c64 = done.iter().map(|o| pick(&o.traces[i])).sum::<c64>() / n_ok;
                [s.re, s.im]
            })
            .collect()
    };
    let trace_y = trace_mean(|t| t.0);
    let trace_y2 = trace_mean(|t| t.1);
    let snapshots = cfg
        .snapshot_times
        .iter()
        .enumerate()
        .map(|(k, _)| Snapshot {
            t: plan.snapshot_steps[k] as f64 * cfg.step,
            eigenvalues: done.iter().flat_map(|o| o.snapshots[k].iter().copied()).collect(),
        })
        .collect();
    for o in &done {
        health.steps += o.steps;
        health.clamp_steps += o.clamp_steps;
        health.clamped_eigenvalues += o.clamped;
        health.reorthonormalizations += o.reorth;
        health.max_unitarity_defect = health.max_unitarity_defect.max(o.max_defect);
        health.max_spectrum_excursion = health.max_spectrum_excursion.max(o.max_excursion);
    }
    health.clamp_flagged = health.steps > 0 && health.clamp_steps as f64 > CLAMP_FLAG_FRACTION * health.steps as f64;
    Ok(TrajectoryRecord {
        config: cfg.clone(),
        lambda: cfg.lambda(),
        theta: cfg.theta(),
        lambda_ratio: cfg.lambda_ratio(),
        theta_ratio: cfg.theta_ratio(),
        times,
        mean_moments: mean,
        stderr_moments: stderr,
        trial_moments: done.into_iter().map(|o| o.moments).collect(),
        trace_y,
        trace_y2,
        snapshots,
        seeds: (0..cfg.trials)
            .map(|trial| TrialSeed {
                trial,
                seed: cfg.seed,
                stream: trial as u64,
            })
            .collect(),
        health,
    })
}

/// Corner-compressed unitary Brownian motion, `J_t = P Y_t Q Y_t* P`.
///
/// Trials run on a pool of `jobs` threads. Each trial draws from its own
/// stream and results are reduced in trial order, so the record does not
/// depend on `jobs`.
pub fn simulate_trajectory(cfg: &MatrixJacobiConfig, jobs: usize) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    if cfg.scheme != Scheme::UnitaryCorner {
        return Err(MatsimError::InvalidConfig("simulate_trajectory runs the unitary-corner scheme".into()));
    }
    let plan = Plan::new(cfg);
    let results = run_trials(cfg.trials, jobs, |t| corner_trial(cfg, &plan, t))?;
    aggregate(cfg, &plan, results)
}

/// Euler–Maruyama for
/// `dJ = √(I−J) dB √J + √J dB* √(I−J) + (θI − J) dt`
/// in the free clock, with `E|dB_jk|² = dt/d`.
pub fn simulate_direct_sde(cfg: &MatrixJacobiConfig, jobs: usize) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    if cfg.scheme != Scheme::DirectSde {
        return Err(MatsimError::InvalidConfig("simulate_direct_sde runs the direct-sde scheme".into()));
    }
    let plan = Plan::new(cfg);
    let results = run_trials(cfg.trials, jobs, |t| sde_trial(cfg, &plan, t))?;
    aggregate(cfg, &plan, results)
}

/// Runs whichever scheme the configuration names.
pub fn simulate(cfg: &MatrixJacobiConfig, jobs: usize) -> Result<TrajectoryRecord> {
    match cfg.scheme {
        Scheme::UnitaryCorner => simulate_trajectory(cfg, jobs),
        Scheme::DirectSde => simulate_direct_sde(cfg, jobs),
    }
}
