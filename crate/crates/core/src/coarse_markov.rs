//! Coarse-grained jump processes between compartments joined by narrow
//! necks: generators, their spectra, and a telegraph simulator.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::asymptotics::DumbbellRates;
use crate::error::{require, NetError, Result};

/// Generator of a continuous-time Markov chain: q[i][j] is the rate i -> j.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    q: DMatrix<f64>,
}

const ROW_TOL: f64 = 1e-14;

impl RateMatrix {
    /// Generator from off-diagonal rates; the diagonal is filled in.
    pub fn from_rates(n: usize, rates: &[(usize, usize, f64)]) -> Result<RateMatrix> {
        require(n >= 1, || "need at least one state".into())?;
        let mut q = DMatrix::zeros(n, n);
        for &(i, j, r) in rates {
            require(i < n && j < n, || format!("index ({i}, {j}) out of range for {n} states"))?;
            require(i != j, || format!("diagonal entry ({i}, {i}) given as a rate"))?;
            require(r >= 0.0 && r.is_finite(), || format!("rate {i} -> {j} must be non-negative, got {r}"))?;
            q[(i, j)] += r;
        }
        for i in 0..n {
            let s: f64 = (0..n).filter(|&j| j != i).map(|j| q[(i, j)]).sum();
            q[(i, i)] = -s;
        }
        Ok(RateMatrix { q })
    }

    /// Checks a full matrix for the generator properties.
    pub fn from_matrix(q: DMatrix<f64>) -> Result<RateMatrix> {
        if !q.is_square() || q.nrows() == 0 {
            return Err(NetError::InvalidParameter("generator must be square and non-empty".into()));
        }
        let n = q.nrows();
        for i in 0..n {
            let mut sum = 0.0;
            let mut scale: f64 = 0.0;
            for j in 0..n {
                let v = q[(i, j)];
                if i != j && !(v >= 0.0) {
                    return Err(NetError::InvalidParameter(format!("negative rate {v} at ({i}, {j})")));
                }
                sum += v;
                scale = scale.max(v.abs());
            }
            if sum.abs() > ROW_TOL * scale.max(1.0) * n as f64 {
                return Err(NetError::InvalidParameter(format!("row {i} sums to {sum}")));
            }
        }
        Ok(RateMatrix { q })
    }

    /// Two states with the given switching rates.
    pub fn two_state(rate_ab: f64, rate_ba: f64) -> Result<RateMatrix> {
        RateMatrix::from_rates(2, &[(0, 1, rate_ab), (1, 0, rate_ba)])
    }

    /// Nearest-neighbour chain; `links[k]` = (rate k -> k+1, rate k+1 -> k).
    pub fn chain(links: &[(f64, f64)]) -> Result<RateMatrix> {
        let rates: Vec<_> = links
            .iter()
            .enumerate()
            .flat_map(|(k, &(f, b))| [(k, k + 1, f), (k + 1, k, b)])
            .collect();
        RateMatrix::from_rates(links.len() + 1, &rates)
    }

    /// Two compartments exchanging through a neck.
    pub fn dumbbell(r: &DumbbellRates) -> Result<RateMatrix> {
        RateMatrix::two_state(r.rate_12, r.rate_21)
    }

    pub fn n(&self) -> usize {
        self.q.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn rate(&self, i: usize, j: usize) -> f64 {
        self.q[(i, j)]
    }

    /// Same chain with states renumbered: new state k is old state perm[k].
    pub fn permuted(&self, perm: &[usize]) -> Result<RateMatrix> {
        let n = self.n();
        let mut seen = vec![false; n];
        require(perm.len() == n, || "permutation length mismatch".into())?;
        for &p in perm {
            require(p < n && !seen[p], || "not a permutation".into())?;
            seen[p] = true;
        }
        Ok(RateMatrix { q: DMatrix::from_fn(n, n, |i, j| self.q[(perm[i], perm[j])]) })
    }

    /// "i j rate" lines for the non-zero off-diagonal entries, after a
    /// "# n N" header.
    pub fn to_triplets(&self) -> String {
        let mut s = format!("# n {}\n", self.n());
        for i in 0..self.n() {
            for j in 0..self.n() {
                if i != j && self.q[(i, j)] != 0.0 {
                    let _ = writeln!(s, "{i} {j} {:e}", self.q[(i, j)]);
                }
            }
        }
        s
    }

    /// Inverse of [`to_triplets`](Self::to_triplets). Without the header the
    /// state count is the largest index plus one.
    pub fn from_triplets(text: &str) -> Result<RateMatrix> {
        let mut n_decl: Option<usize> = None;
        let mut rates = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut it = rest.split_whitespace();
                if it.next() == Some("n") {
                    n_decl = Some(
                        it.next()
                            .and_then(|v| v.parse().ok())
                            .ok_or_else(|| NetError::Config(format!("line {}: bad state count", k + 1)))?,
                    );
                }
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || NetError::Config(format!("line {}: expected 'i j rate', got '{line}'", k + 1));
            if f.len() != 3 {
                return Err(bad());
            }
            let i: usize = f[0].parse().map_err(|_| bad())?;
            let j: usize = f[1].parse().map_err(|_| bad())?;
            let r: f64 = f[2].parse().map_err(|_| bad())?;
            rates.push((i, j, r));
        }
        let n = n_decl.unwrap_or_else(|| rates.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0));
        RateMatrix::from_rates(n, &rates)
    }

    /// Stationary distribution pi Q = 0, sum pi = 1. Requires a single
    /// closed class.
    pub fn stationary(&self) -> Result<Vec<f64>> {
        let n = self.n();
        if n == 1 {
            return Ok(vec![1.0]);
        }
        let mut a = self.q.transpose();
        for j in 0..n {
            a[(n - 1, j)] = 1.0;
        }
        let mut b = DVector::zeros(n);
        b[n - 1] = 1.0;
        let x = a
            .lu()
            .solve(&b)
            .ok_or_else(|| NetError::Domain("stationary distribution is not unique".into()))?;
        if x.iter().any(|v| *v < -1e-12) {
            return Err(NetError::Domain("stationary distribution is not unique".into()));
        }
        Ok(x.iter().map(|v| v.max(0.0)).collect())
    }

    /// Detailed balance pi_i q_ij = pi_j q_ji.
    pub fn is_reversible(&self, pi: &[f64]) -> bool {
        let n = self.n();
        let scale = self.q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            for j in i + 1..n {
                let f = pi[i] * self.q[(i, j)];
                let b = pi[j] * self.q[(j, i)];
                if (f - b).abs() > 1e-12 * scale {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TelegraphEigen {
    /// Non-zero eigenvalue of the negated generator.
    pub eigenvalue: f64,
    /// Long-run occupation of (a, b).
    pub stationary: [f64; 2],
}

pub fn telegraph_eigen(rate_ab: f64, rate_ba: f64) -> Result<TelegraphEigen> {
    require(rate_ab > 0.0 && rate_ba > 0.0, || "switching rates must be positive".into())?;
    let s = rate_ab + rate_ba;
    Ok(TelegraphEigen { eigenvalue: s, stationary: [rate_ba / s, rate_ab / s] })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Real parts of the generator eigenvalues, descending (0 first).
    pub eigenvalues: Vec<f64>,
    /// Minus the largest non-zero eigenvalue.
    pub relaxation_rate: f64,
    pub stationary: Vec<f64>,
    pub reversible: bool,
}

/// Spectrum of a generator. Reversible chains are symmetrized with the
/// stationary weights so the spectrum comes out real; other chains report
/// the real parts of a general eigensolve.
pub fn network_eigen(rates: &RateMatrix) -> Result<Spectrum> {
    let n = rates.n();
    let stationary = rates.stationary()?;
    let reversible = stationary.iter().all(|p| *p > 0.0) && rates.is_reversible(&stationary);
    let mut eigenvalues: Vec<f64> = if reversible {
        let s = DMatrix::from_fn(n, n, |i, j| {
            let v = rates.q[(i, j)] * (stationary[i] / stationary[j]).sqrt();
            if i == j {
                v
            } else {
                // average the two equal halves to keep the matrix exactly symmetric
                0.5 * (v + rates.q[(j, i)] * (stationary[j] / stationary[i]).sqrt())
            }
        });
        SymmetricEigen::new(s).eigenvalues.iter().copied().collect()
    } else {
        rates.q.complex_eigenvalues().iter().map(|z| z.re).collect()
    };
    eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // the conservation eigenvalue is zero exactly
    let scale = rates.q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if eigenvalues[0].abs() < 1e-10 * scale.max(1e-300) {
        eigenvalues[0] = 0.0;
    }
    let relaxation_rate = if n > 1 { -eigenvalues[1] } else { 0.0 };
    Ok(Spectrum { eigenvalues, relaxation_rate, stationary, reversible })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TelegraphSim {
    /// Decay rate of the empirical autocorrelation.
    pub relaxation_rate: f64,
    pub n_events: usize,
    /// Fraction of time in state a, with a batch-means standard error.
    pub occupation_a: f64,
    pub occupation_stderr: f64,
}

const MIN_EVENTS: usize = 100;
const BATCHES: usize = 20;

/// Jump simulation of the two-state process up to `horizon`; the
/// relaxation rate is the slope of a log-linear fit to the state
/// autocorrelation.
pub fn simulate_telegraph(rate_ab: f64, rate_ba: f64, horizon: f64, seed: u64) -> Result<TelegraphSim> {
    require(rate_ab > 0.0 && rate_ba > 0.0, || "switching rates must be positive".into())?;
    require(horizon > 0.0 && horizon.is_finite(), || "horizon must be positive".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leave = [Exp::new(rate_ab).unwrap(), Exp::new(rate_ba).unwrap()];
    let mut state: usize = if rng.random::<f64>() < rate_ba / (rate_ab + rate_ba) { 0 } else { 1 };
    let mut t = 0.0;
    let mut jumps: Vec<(f64, usize)> = vec![(0.0, state)];
    loop {
        t += leave[state].sample(&mut rng);
        if t >= horizon {
            break;
        }
        state ^= 1;
        jumps.push((t, state));
    }
    let n_events = jumps.len() - 1;
    if n_events < MIN_EVENTS {
        return Err(NetError::Estimation(format!(
            "only {n_events} switching events before the horizon; need {MIN_EVENTS}"
        )));
    }
    // sampling grid and lag range from the observed dwell times
    let rate_hat = n_events as f64 / horizon * 2.0;
    let step = 0.02 / rate_hat;
    let n = (horizon / step) as usize;
    let mut x = vec![0.0; n];
    let mut k = 0;
    for (i, xi) in x.iter_mut().enumerate() {
        let ti = i as f64 * step;
        while k + 1 < jumps.len() && jumps[k + 1].0 <= ti {
            k += 1;
        }
        *xi = if jumps[k].1 == 0 { 1.0 } else { 0.0 };
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let per = n / BATCHES;
    let batch: Vec<f64> = (0..BATCHES).map(|b| x[b * per..(b + 1) * per].iter().sum::<f64>() / per as f64).collect();
    let bm = batch.iter().sum::<f64>() / BATCHES as f64;
    let bvar = batch.iter().map(|v| (v - bm).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
    let dev: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let acf = |lag: usize| dev[..n - lag].iter().zip(&dev[lag..]).map(|(a, b)| a * b).sum::<f64>() / (n - lag) as f64;
    let c0 = acf(0);
    let max_lag = ((1.5 / rate_hat) / step) as usize;
    let (mut sx, mut sy, mut sxx, mut sxy, mut m) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for lag in (1..=max_lag).step_by(2) {
        let c = acf(lag) / c0;
        if c <= 0.0 {
            break;
        }
        let tl = lag as f64 * step;
        let y = c.ln();
        sx += tl;
        sy += y;
        sxx += tl * tl;
        sxy += tl * y;
        m += 1.0;
    }
    if m < 3.0 {
        return Err(NetError::Estimation("autocorrelation decays too fast to fit".into()));
    }
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    Ok(TelegraphSim {
        relaxation_rate: -slope,
        n_events,
        occupation_a: mean,
        occupation_stderr: (bvar / BATCHES as f64).sqrt(),
    })
}
