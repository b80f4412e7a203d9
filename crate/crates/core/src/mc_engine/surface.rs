use rand::Rng;
use rand_distr::StandardNormal;

use super::{run_paths, summarize, FptEstimate, PathOutcome, SimParams};
use crate::boundary_layer::DriftField;
use crate::error::{NetError, Result};

/// dz = a(z) dt + b(z) dW on [lower, upper], absorbing at the lower end and
/// reflecting at the upper end. Coefficients are interpolated, never
/// extrapolated.
pub fn simulate_surface_1d(field: &DriftField, start: f64, params: &SimParams) -> Result<FptEstimate> {
    params.validate()?;
    let (lo, hi) = (field.lower(), field.upper());
    if !(start >= lo && start <= hi) {
        return Err(NetError::Domain(format!("start {start} outside [{lo}, {hi}]")));
    }
    let b_max = field.b_of_z.iter().fold(0.0f64, |m, b| m.max(*b));
    let outcomes = run_paths(params, |rng, _| {
        let mut z = start;
        let mut t = 0.0;
        if z <= lo {
            return PathOutcome::absorbed(0.0, 0);
        }
        while t < params.max_time {
            let (a, b) = field.at(z).expect("position kept inside the sampled range");
            let h = params.local_dt(z - lo, 0.5 * b_max * b_max);
            let mut next = z + a * h + b * h.sqrt() * rng.sample::<f64, _>(StandardNormal);
            if next > hi {
                next = (2.0 * hi - next).max(lo);
            }
            t += h;
            if next <= lo {
                return PathOutcome::absorbed(t, 0);
            }
            // crossing of the absorbing end between two interior points
            let x = 2.0 * (z - lo) * (next - lo) / (b * b * h);
            if x < 40.0 && rng.random::<f64>() < (-x).exp() {
                return PathOutcome::absorbed(t, 0);
            }
            z = next;
        }
        PathOutcome::censored(t)
    })?;
    summarize(&outcomes, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn driftless_interval_from_reflecting_end() {
        // D_eff = b^2/2 = 0.5; mean exit from x = L at distance L is L^2 / (2 D_eff)
        let f = DriftField::uniform(-1.0, 0.0, 0.0, 1.0, 11).unwrap();
        let p = SimParams { dt: 1e-4, n_paths: 4000, seed: 5, ..Default::default() };
        let e = simulate_surface_1d(&f, 0.0, &p).unwrap();
        assert!((e.mean - 1.0).abs() < 4.0 * e.stderr + 0.01, "{e:?}");
    }

    #[test]
    fn interior_start_matches_interval_formula() {
        // x (2L - x) / (2 D_eff) with x the distance from the absorbing end
        let f = DriftField::uniform(0.0, 2.0, 0.0, 2f64.sqrt(), 3).unwrap();
        let p = SimParams { dt: 1e-4, n_paths: 4000, seed: 9, ..Default::default() };
        let e = simulate_surface_1d(&f, 0.5, &p).unwrap();
        let exact = 0.5 * (4.0 - 0.5) / 2.0;
        assert!((e.mean - exact).abs() < 4.0 * e.stderr + 0.01 * exact, "{} vs {exact}", e.mean);
    }

    #[test]
    fn start_at_absorbing_end() {
        let f = DriftField::uniform(-1.0, 0.0, 0.0, 1.0, 11).unwrap();
        let e = simulate_surface_1d(&f, -1.0, &SimParams { n_paths: 5, ..Default::default() }).unwrap();
        assert_eq!(e.mean, 0.0);
        assert!(simulate_surface_1d(&f, 0.5, &SimParams::default()).is_err());
    }
}
