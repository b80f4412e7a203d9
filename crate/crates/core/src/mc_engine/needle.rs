use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{run_paths, summarize, FptEstimate, PathOutcome, SimParams};
use crate::error::{NetError, Result};
use crate::geometry::{NeedleStripSpec, MAX_BOUNCES};

const CHORD_SAMPLES: usize = 8;

/// Needle angle and centre offset, (theta, y), on [0, pi/2) x (-h, h) with
/// h = (l0 - l sin theta)/2. The axis theta = 0 reflects by symmetry, the
/// walls |y| = h reflect along the co-normal of the diffusion tensor
/// diag(Dr, DX sin^2 + DY cos^2), and theta = pi/2 absorbs.
struct NeedleWalk<'a> {
    spec: &'a NeedleStripSpec,
}

enum Step {
    Moved([f64; 2]),
    Absorbed,
    Rejected,
}

impl NeedleWalk<'_> {
    fn half_width(&self, theta: f64) -> f64 {
        self.spec.half_width(theta)
    }

    fn inside(&self, p: &[f64; 2]) -> bool {
        p[0] >= 0.0 && p[0] < FRAC_PI_2 && p[1].abs() < self.half_width(p[0])
    }

    fn wall_exit(&self, p: &[f64; 2], d: &[f64; 2]) -> Option<f64> {
        let g = |t: f64| (p[1] + t * d[1]).abs() - self.half_width(p[0] + t * d[0]);
        let mut ta = 0.0;
        for k in 1..=CHORD_SAMPLES {
            let tb = k as f64 / CHORD_SAMPLES as f64;
            if g(tb) >= 0.0 {
                let (mut lo, mut hi) = (ta, tb);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if g(mid) >= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return (hi > 1e-12).then_some(hi);
            }
            ta = tb;
        }
        None
    }

    fn advance(&self, p: &[f64; 2], d: &[f64; 2]) -> Step {
        let mut pos = *p;
        let mut rem = *d;
        for _ in 0..=MAX_BOUNCES {
            // 0: absorbing line, 1: axis, 2: wall
            let mut best: Option<(f64, u8)> = None;
            if rem[0] > 0.0 {
                let t = (FRAC_PI_2 - pos[0]) / rem[0];
                if t <= 1.0 {
                    best = Some((t, 0));
                }
            } else if rem[0] < 0.0 {
                let t = -pos[0] / rem[0];
                if t > 1e-12 && t <= 1.0 {
                    best = Some((t, 1));
                }
            }
            if let Some(t) = self.wall_exit(&pos, &rem) {
                if best.map_or(true, |(bt, _)| t < bt) {
                    best = Some((t, 2));
                }
            }
            let Some((t, kind)) = best else {
                let q = [pos[0] + rem[0], pos[1] + rem[1]];
                return if self.inside(&q) { Step::Moved(q) } else { Step::Rejected };
            };
            let hit = [pos[0] + t * rem[0], pos[1] + t * rem[1]];
            let rest = [(1.0 - t) * rem[0], (1.0 - t) * rem[1]];
            rem = match kind {
                0 => return Step::Absorbed,
                1 => [-rest[0], rest[1]],
                _ => {
                    let (s, c) = hit[0].sin_cos();
                    let m = [self.spec.dr, self.spec.dx * s * s + self.spec.dy * c * c];
                    // outward gradient of sign(y) y - h(theta)
                    let n = [0.5 * self.spec.l * c, hit[1].signum()];
                    let k = 2.0 * (n[0] * rest[0] + n[1] * rest[1]) / (n[0] * n[0] * m[0] + n[1] * n[1] * m[1]);
                    [rest[0] - k * m[0] * n[0], rest[1] - k * m[1] * n[1]]
                }
            };
            pos = hit;
        }
        Step::Rejected
    }
}

/// Turnaround time of a needle in a strip: simulates the passage from
/// `start` = (theta, y) to theta = pi/2 and reports the full turn, twice
/// that passage, in `mean` and `stderr`.
pub fn simulate_needle(spec: &NeedleStripSpec, start: [f64; 2], params: &SimParams) -> Result<FptEstimate> {
    spec.validate()?;
    params.validate()?;
    let w = NeedleWalk { spec };
    let on_line = start[0] == FRAC_PI_2 && start[1].abs() <= w.half_width(start[0]);
    if !(w.inside(&start) || on_line) {
        return Err(NetError::Domain(format!("needle start {start:?} outside the strip")));
    }
    let outcomes = run_paths(params, |rng, _| {
        if on_line {
            return PathOutcome::absorbed(0.0, 0);
        }
        let mut pos = start;
        let mut t = 0.0;
        let mut rejected = 0;
        while t < params.max_time {
            let h = params.local_dt(FRAC_PI_2 - pos[0], spec.dr);
            let (s, c) = pos[0].sin_cos();
            let z1: f64 = rng.sample(StandardNormal);
            let z2: f64 = rng.sample(StandardNormal);
            let z3: f64 = rng.sample(StandardNormal);
            let d = [
                (2.0 * spec.dr * h).sqrt() * z3,
                s * (2.0 * spec.dx * h).sqrt() * z1 + c * (2.0 * spec.dy * h).sqrt() * z2,
            ];
            match w.advance(&pos, &d) {
                Step::Moved(q) => {
                    t += h;
                    pos = q;
                }
                Step::Absorbed => return PathOutcome::absorbed(t + h, 0),
                Step::Rejected => {
                    rejected += 1;
                    if rejected > 10_000 {
                        return PathOutcome::censored(t);
                    }
                }
            }
        }
        PathOutcome::censored(t)
    })?;
    let mut e = summarize(&outcomes, params)?;
    e.mean *= 2.0;
    e.stderr *= 2.0;
    if let Some(tail) = e.tail.as_mut() {
        tail.rate *= 0.5;
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(gap: f64) -> NeedleStripSpec {
        NeedleStripSpec { l0: 1.0, l: 1.0 - gap, dx: 1.0, dy: 1.0, dr: 1.0 }
    }

    #[test]
    fn start_on_the_absorbing_line() {
        let e = simulate_needle(&spec(0.1), [FRAC_PI_2, 0.0], &SimParams { n_paths: 3, ..Default::default() }).unwrap();
        assert_eq!(e.mean, 0.0);
        assert!(simulate_needle(&spec(0.1), [FRAC_PI_2 - 0.01, 0.3], &SimParams::default()).is_err());
    }

    #[test]
    fn co_normal_reflection_keeps_paths_inside() {
        let s = spec(0.05);
        let w = NeedleWalk { spec: &s };
        let mut rng = super::super::path_rng(1, 0);
        let mut pos = [1.2, 0.0];
        for _ in 0..20000 {
            let d = [0.05 * rng.sample::<f64, _>(StandardNormal), 0.05 * rng.sample::<f64, _>(StandardNormal)];
            match w.advance(&pos, &d) {
                Step::Moved(q) => {
                    assert!(w.inside(&q));
                    pos = q;
                }
                Step::Absorbed => pos = [1.2, 0.0],
                Step::Rejected => {}
            }
        }
    }

    #[test]
    fn wide_gap_is_close_to_the_one_dimensional_limit() {
        // l -> 0 leaves free rotation: passage from 0 to pi/2 with a
        // reflecting axis takes (pi/2)^2 / (2 Dr), the full turn twice that
        let s = NeedleStripSpec { l0: 1.0, l: 1e-6, dx: 1.0, dy: 1.0, dr: 1.0 };
        let p = SimParams { dt: 1e-4, n_paths: 3000, seed: 2, ..Default::default() };
        let e = simulate_needle(&s, [0.0, 0.0], &p).unwrap();
        let exact = FRAC_PI_2 * FRAC_PI_2;
        assert!((e.mean - exact).abs() < 4.0 * e.stderr + 0.01 * exact, "{} vs {exact}", e.mean);
    }
}
