//! Monte Carlo first-passage estimates by Euler–Maruyama simulation.
//!
//! Every path draws from its own ChaCha8 stream (master seed, stream =
//! path index), paths run in parallel with an order-preserving collect and
//! are aggregated sequentially, so results do not depend on the worker
//! count.

mod needle;
mod stats;
mod surface;
mod walk;

pub use needle::simulate_needle;
pub use stats::{tail_diagnostic, TailDiagnostic};
pub use surface::simulate_surface_1d;
pub use walk::{simulate_exit_probs, simulate_mfpt_2d, simulate_mfpt_3d, simulate_mfpt_domain, ExitProbEstimate, Start};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require, NetError, Result};

/// Environment variable holding the worker count; 1 means single-threaded.
pub const WORKERS_ENV: &str = "NETKIT_WORKERS";

/// Fraction of censored paths above which an estimate is flagged.
pub const CENSOR_FLAG: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub max_time: f64,
    /// Divide dt by refine_factor near absorbing windows.
    pub adaptive: bool,
    pub refine_factor: u32,
    /// Overrides the environment worker count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams { dt: 1e-4, n_paths: 10_000, seed: 1, max_time: 1e4, adaptive: true, refine_factor: 16, workers: None }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        require(self.dt > 0.0 && self.dt.is_finite(), || format!("dt must be positive, got {}", self.dt))?;
        require(self.n_paths >= 1, || "n_paths must be at least 1".into())?;
        require(self.max_time > 0.0, || "max_time must be positive".into())?;
        require(self.refine_factor >= 1, || "refine_factor must be at least 1".into())?;
        require(self.workers != Some(0), || "workers must be at least 1".into())?;
        Ok(())
    }

    /// Explicit setting, else the environment, else available parallelism.
    pub fn worker_count(&self) -> usize {
        self.workers
            .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()))
            .filter(|&n| n > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    /// Step to use at distance `dist` from the nearest window, given the
    /// local diffusion coefficient.
    pub(crate) fn local_dt(&self, dist: f64, diff: f64) -> f64 {
        if self.adaptive && dist < 4.0 * (2.0 * diff * self.dt).sqrt() {
            self.dt / self.refine_factor as f64
        } else {
            self.dt
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FptEstimate {
    /// Mean over absorbed paths.
    pub mean: f64,
    pub stderr: f64,
    pub n_paths: usize,
    pub n_absorbed: usize,
    pub n_censored: usize,
    pub dt: f64,
    pub seed: u64,
    /// Censored fraction at or above the flag level.
    pub flagged: bool,
    pub tail: Option<TailDiagnostic>,
}

/// Result of one path: absorption time and window, or censoring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PathOutcome {
    pub time: f64,
    pub window: Option<usize>,
}

impl PathOutcome {
    pub fn absorbed(time: f64, window: usize) -> Self {
        PathOutcome { time, window: Some(window) }
    }

    pub fn censored(time: f64) -> Self {
        PathOutcome { time, window: None }
    }
}

pub(crate) fn path_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Runs `path` for every index and returns outcomes in index order.
pub(crate) fn run_paths<F>(params: &SimParams, path: F) -> Result<Vec<PathOutcome>>
where
    F: Fn(&mut ChaCha8Rng, usize) -> PathOutcome + Sync,
{
    params.validate()?;
    let workers = params.worker_count();
    let one = |i: usize| {
        let mut rng = path_rng(params.seed, i);
        path(&mut rng, i)
    };
    if workers == 1 {
        return Ok((0..params.n_paths).map(one).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| NetError::Estimation(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..params.n_paths).into_par_iter().map(one).collect()))
}

pub(crate) fn summarize(outcomes: &[PathOutcome], params: &SimParams) -> Result<FptEstimate> {
    let times: Vec<f64> = outcomes.iter().filter(|o| o.window.is_some()).map(|o| o.time).collect();
    let n_absorbed = times.len();
    let n_censored = outcomes.len() - n_absorbed;
    if n_absorbed == 0 {
        return Err(NetError::Estimation(format!(
            "all {} paths censored at max_time {}",
            outcomes.len(),
            params.max_time
        )));
    }
    let n = n_absorbed as f64;
    let mean = times.iter().sum::<f64>() / n;
    let var = if n_absorbed > 1 { times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Ok(FptEstimate {
        mean,
        stderr: (var / n).sqrt(),
        n_paths: outcomes.len(),
        n_absorbed,
        n_censored,
        dt: params.dt,
        seed: params.seed,
        flagged: n_censored as f64 >= CENSOR_FLAG * outcomes.len() as f64,
        tail: tail_diagnostic(&times),
    })
}
