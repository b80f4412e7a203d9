use serde::{Deserialize, Serialize};

/// Kolmogorov–Smirnov check that first-passage times beyond their median
/// are exponential, with the rate estimated from the same sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDiagnostic {
    pub n_tail: usize,
    pub rate: f64,
    pub ks_statistic: f64,
    /// Lilliefors 5% critical value for an estimated exponential rate.
    pub critical_value: f64,
    pub exponential: bool,
}

const MIN_TAIL: usize = 20;

pub fn tail_diagnostic(times: &[f64]) -> Option<TailDiagnostic> {
    if times.len() < 2 * MIN_TAIL {
        return None;
    }
    let mut t = times.to_vec();
    t.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = t[t.len() / 2];
    let excess: Vec<f64> = t.iter().filter(|&&x| x > median).map(|x| x - median).collect();
    let n = excess.len();
    if n < MIN_TAIL {
        return None;
    }
    let mean = excess.iter().sum::<f64>() / n as f64;
    if !(mean > 0.0) {
        return None;
    }
    let rate = 1.0 / mean;
    let mut d = 0.0f64;
    for (i, x) in excess.iter().enumerate() {
        let f = 1.0 - (-rate * x).exp();
        d = d.max((i + 1) as f64 / n as f64 - f).max(f - i as f64 / n as f64);
    }
    let critical_value = 1.094 / (n as f64).sqrt();
    Some(TailDiagnostic { n_tail: n, rate, ks_statistic: d, critical_value, exponential: d < critical_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp, Uniform};

    #[test]
    fn exponential_sample_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = Exp::new(2.0).unwrap();
        let xs: Vec<f64> = (0..4000).map(|_| e.sample(&mut rng)).collect();
        let d = tail_diagnostic(&xs).unwrap();
        assert!(d.exponential, "{d:?}");
        assert!((d.rate - 2.0).abs() < 0.2);
    }

    #[test]
    fn uniform_sample_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = Uniform::new(0.0, 1.0).unwrap();
        let xs: Vec<f64> = (0..4000).map(|_| u.sample(&mut rng)).collect();
        assert!(!tail_diagnostic(&xs).unwrap().exponential);
    }

    #[test]
    fn small_samples_have_no_diagnostic() {
        assert!(tail_diagnostic(&[1.0; 10]).is_none());
    }
}
