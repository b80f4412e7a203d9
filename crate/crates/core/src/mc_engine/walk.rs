use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{run_paths, summarize, FptEstimate, PathOutcome, SimParams};
use crate::error::{require, NetError, Result};
use crate::geometry::{Domain, StepOutcome};

/// Starting-point distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Start<const N: usize> {
    Point([f64; N]),
    /// Uniform over the part of the ball that lies in the domain.
    Ball { center: [f64; N], radius: f64 },
}

const START_TRIES: usize = 100_000;
const MAX_REJECTIONS: usize = 10_000;
/// A rejected step is split at a bridge midpoint at most this many times.
const MAX_SPLITS: u32 = 12;

/// Distance below which a start outside the domain counts as on a window.
const ON_WINDOW: f64 = 1e-12;

impl<const N: usize> Start<N> {
    fn draw<D: Domain<N> + ?Sized>(&self, domain: &D, rng: &mut ChaCha8Rng) -> Option<[f64; N]> {
        match *self {
            Start::Point(p) => Some(p),
            Start::Ball { center, radius } => {
                for _ in 0..START_TRIES {
                    let mut p = center;
                    let mut inside = 0.0;
                    for x in p.iter_mut() {
                        let u: f64 = rng.random_range(-1.0..1.0);
                        inside += u * u;
                        *x += radius * u;
                    }
                    if inside < 1.0 && domain.contains(&p) {
                        return Some(p);
                    }
                }
                None
            }
        }
    }

    fn check<D: Domain<N> + ?Sized>(&self, domain: &D) -> Result<()> {
        match *self {
            Start::Point(p) => {
                if domain.contains(&p) || domain.window_distance(&p) <= ON_WINDOW {
                    Ok(())
                } else {
                    Err(NetError::Domain(format!("start {p:?} lies outside the domain")))
                }
            }
            Start::Ball { radius, .. } => {
                require(radius > 0.0, || "start ball radius must be positive".into())?;
                let mut rng = super::path_rng(0, usize::MAX);
                self.draw(domain, &mut rng)
                    .map(|_| ())
                    .ok_or_else(|| NetError::Domain("start ball does not meet the domain".into()))
            }
        }
    }
}

/// One Euler–Maruyama path with reflection, chord absorption and a
/// Brownian-bridge test for crossings between two in-domain points.
fn walk<const N: usize, D: Domain<N> + ?Sized>(
    domain: &D,
    start: [f64; N],
    diff: f64,
    params: &SimParams,
    rng: &mut ChaCha8Rng,
) -> PathOutcome {
    if !domain.contains(&start) {
        let w = domain.window_gap(&start).map_or(0, |(w, _)| w);
        return PathOutcome::absorbed(0.0, w);
    }
    let mut pos = start;
    let mut gap = domain.window_gap(&pos);
    let mut t = 0.0;
    let mut rejected = 0;
    let mut pending: Vec<([f64; N], f64, u32)> = Vec::new();
    while t < params.max_time {
        let (step, h, splits) = match pending.pop() {
            Some(piece) => piece,
            None => {
                let h = if params.adaptive { params.local_dt(domain.window_distance(&pos), diff) } else { params.dt };
                let sigma = (2.0 * diff * h).sqrt();
                let mut step = [0.0; N];
                for s in step.iter_mut() {
                    *s = sigma * rng.sample::<f64, _>(StandardNormal);
                }
                (step, h, 0)
            }
        };
        match domain.advance(&pos, &step) {
            StepOutcome::Moved(q) => {
                t += h;
                let next = domain.window_gap(&q);
                if let (Some((w0, d0)), Some((w1, d1))) = (gap, next) {
                    let x = d0 * d1 / (diff * h);
                    if w0 == w1 && x < 40.0 && rng.random::<f64>() < (-x).exp() {
                        return PathOutcome::absorbed(t, w1);
                    }
                }
                pos = q;
                gap = next;
            }
            StepOutcome::Absorbed { window, .. } => return PathOutcome::absorbed(t + h, window),
            StepOutcome::Rejected if splits < MAX_SPLITS => {
                // Brownian-bridge midpoint: the two halves keep the law of the increment
                let sigma = (0.5 * diff * h).sqrt();
                let mut mid = [0.0; N];
                let mut rest = [0.0; N];
                for i in 0..N {
                    mid[i] = 0.5 * step[i] + sigma * rng.sample::<f64, _>(StandardNormal);
                    rest[i] = step[i] - mid[i];
                }
                pending.push((rest, 0.5 * h, splits + 1));
                pending.push((mid, 0.5 * h, splits + 1));
            }
            StepOutcome::Rejected => {
                // give up on the rest of this increment and draw afresh
                pending.clear();
                rejected += 1;
                if rejected > MAX_REJECTIONS {
                    return PathOutcome::censored(t);
                }
            }
        }
    }
    PathOutcome::censored(t)
}

fn run_domain<const N: usize, D: Domain<N> + ?Sized>(
    domain: &D,
    start: &Start<N>,
    diff: f64,
    params: &SimParams,
) -> Result<Vec<PathOutcome>> {
    require(diff > 0.0, || "D must be positive".into())?;
    params.validate()?;
    start.check(domain)?;
    let step = (2.0 * diff * params.dt).sqrt();
    if step > domain.diameter() {
        return Err(NetError::StepTooLarge(format!(
            "typical step {step} exceeds domain diameter {}",
            domain.diameter()
        )));
    }
    run_paths(params, |rng, _| match start.draw(domain, rng) {
        Some(p) => walk(domain, p, diff, params, rng),
        None => PathOutcome::censored(0.0),
    })
}

/// Mean first-passage time to any window of `domain`.
pub fn simulate_mfpt_domain<const N: usize, D: Domain<N> + ?Sized>(
    domain: &D,
    start: &Start<N>,
    diff: f64,
    params: &SimParams,
) -> Result<FptEstimate> {
    summarize(&run_domain(domain, start, diff, params)?, params)
}

pub fn simulate_mfpt_2d<D: Domain<2> + ?Sized>(domain: &D, start: &Start<2>, diff: f64, params: &SimParams) -> Result<FptEstimate> {
    simulate_mfpt_domain(domain, start, diff, params)
}

/// Solids are simulated in Cartesian coordinates; see `SolidOfRevolution`.
pub fn simulate_mfpt_3d<D: Domain<3> + ?Sized>(domain: &D, start: &Start<3>, diff: f64, params: &SimParams) -> Result<FptEstimate> {
    simulate_mfpt_domain(domain, start, diff, params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitProbEstimate {
    /// Fraction of absorbed paths leaving through each window; sums to 1.
    pub probs: Vec<f64>,
    /// Binomial standard errors.
    pub stderr: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Tally of the first window reached, with the passage time estimate.
pub fn simulate_exit_probs<const N: usize, D: Domain<N> + ?Sized>(
    domain: &D,
    start: &Start<N>,
    diff: f64,
    params: &SimParams,
) -> Result<(ExitProbEstimate, FptEstimate)> {
    let n = domain.n_windows();
    if n < 2 {
        return Err(NetError::InvalidParameter(format!("need at least two windows, domain has {n}")));
    }
    let outcomes = run_domain(domain, start, diff, params)?;
    let fpt = summarize(&outcomes, params)?;
    let mut counts = vec![0usize; n];
    for o in &outcomes {
        if let Some(w) = o.window {
            counts[w] += 1;
        }
    }
    let total = fpt.n_absorbed as f64;
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let stderr = probs.iter().map(|p| (p * (1.0 - p) / total).sqrt()).collect();
    Ok((ExitProbEstimate { probs, stderr, counts }, fpt))
}
