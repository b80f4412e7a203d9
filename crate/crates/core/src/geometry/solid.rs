//! Three-dimensional domains: absorbing balls and solids of revolution.

use crate::geometry::revolution::RevolutionProfile;
use crate::geometry::{axpy, dot, mirror, norm, Domain, StepOutcome, MAX_BOUNCES};

/// Ball (disk for N = 2) whose whole boundary absorbs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorbingBall<const N: usize> {
    pub center: [f64; N],
    pub radius: f64,
}

impl<const N: usize> AbsorbingBall<N> {
    fn rel(&self, p: &[f64; N]) -> [f64; N] {
        let mut w = *p;
        for i in 0..N {
            w[i] -= self.center[i];
        }
        w
    }
}

impl<const N: usize> Domain<N> for AbsorbingBall<N> {
    fn contains(&self, p: &[f64; N]) -> bool {
        norm(&self.rel(p)) < self.radius
    }

    fn advance(&self, p: &[f64; N], d: &[f64; N]) -> StepOutcome<N> {
        let w = self.rel(p);
        let q = axpy(&w, 1.0, d);
        if dot(&q, &q) < self.radius * self.radius {
            return StepOutcome::Moved(axpy(p, 1.0, d));
        }
        let a = dot(d, d);
        let b = dot(&w, d);
        let c = dot(&w, &w) - self.radius * self.radius;
        let s = (b * b - a * c).max(0.0).sqrt();
        let t = if b <= 0.0 { (s - b) / a } else { -c / (b + s) };
        StepOutcome::Absorbed { at: axpy(p, t.clamp(0.0, 1.0), d), window: 0 }
    }

    fn window_distance(&self, p: &[f64; N]) -> f64 {
        (self.radius - norm(&self.rel(p))).abs()
    }

    fn window_gap(&self, p: &[f64; N]) -> Option<(usize, f64)> {
        Some((0, self.window_distance(p)))
    }

    fn n_windows(&self) -> usize {
        1
    }

    fn diameter(&self) -> f64 {
        2.0 * self.radius
    }
}

/// Solid bounded by the surface of revolution of a profile about the x axis.
/// The disk at the absorbing end is window 0; the lateral surface and a flat
/// top (when r(0) > 0) reflect.
#[derive(Debug, Clone, PartialEq)]
pub struct SolidOfRevolution {
    pub profile: RevolutionProfile,
    x_abs: f64,
    r_abs: f64,
    flat_top: bool,
    diameter: f64,
}

const CHORD_SAMPLES: usize = 8;

impl SolidOfRevolution {
    pub fn new(profile: RevolutionProfile) -> SolidOfRevolution {
        let x_abs = profile.x_abs();
        let r_abs = profile.r(x_abs);
        let flat_top = !profile.has_pole();
        let mut r_max: f64 = 0.0;
        for k in 0..=512 {
            r_max = r_max.max(profile.r(x_abs * (1.0 - k as f64 / 512.0)));
        }
        let diameter = (2.0 * r_max).hypot(-x_abs);
        SolidOfRevolution { profile, x_abs, r_abs, flat_top, diameter }
    }

    /// Point on the axis at the given x.
    pub fn axis_point(&self, x: f64) -> [f64; 3] {
        [x, 0.0, 0.0]
    }

    /// rho - r(x), negative inside the lateral surface.
    fn lateral(&self, p: &[f64; 3]) -> f64 {
        let x = p[0].clamp(self.x_abs, 0.0);
        let r = if p[0] > 0.0 && !self.flat_top { 0.0 } else { self.profile.r(x) };
        p[1].hypot(p[2]) - r
    }

    fn lateral_normal(&self, h: &[f64; 3]) -> [f64; 3] {
        let j = self.profile.jet(h[0].clamp(self.x_abs, 0.0));
        // gradient of y^2 + z^2 - q(x), pointing outward
        let n = [-0.5 * j.dq, h[1], h[2]];
        let l = norm(&n);
        [-n[0] / l, -n[1] / l, -n[2] / l]
    }

    /// First parameter in (0, 1] where the chord leaves through the lateral surface.
    fn lateral_exit(&self, p: &[f64; 3], d: &[f64; 3]) -> Option<f64> {
        let g = |t: f64| self.lateral(&axpy(p, t, d));
        let mut ta = 0.0;
        for k in 1..=CHORD_SAMPLES {
            let tb = k as f64 / CHORD_SAMPLES as f64;
            if g(tb) >= 0.0 {
                let (mut lo, mut hi) = (ta, tb);
                for _ in 0..64 {
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
}

impl Domain<3> for SolidOfRevolution {
    fn contains(&self, p: &[f64; 3]) -> bool {
        p[0] > self.x_abs && p[0] < 0.0 && self.lateral(p) < 0.0
    }

    fn advance(&self, p: &[f64; 3], d: &[f64; 3]) -> StepOutcome<3> {
        let mut pos = *p;
        let mut rem = *d;
        for _ in 0..=MAX_BOUNCES {
            // candidates: absorbing end plane, flat top, lateral surface
            let mut best: Option<(f64, u8)> = None;
            if rem[0] < 0.0 {
                let t = (self.x_abs - pos[0]) / rem[0];
                if t > 1e-12 && t <= 1.0 {
                    best = Some((t, 0));
                }
            }
            if self.flat_top && rem[0] > 0.0 {
                let t = -pos[0] / rem[0];
                if t > 1e-12 && t <= 1.0 && best.map_or(true, |(bt, _)| t < bt) {
                    best = Some((t, 1));
                }
            }
            if let Some(t) = self.lateral_exit(&pos, &rem) {
                if best.map_or(true, |(bt, _)| t < bt) {
                    best = Some((t, 2));
                }
            }
            let Some((t, kind)) = best else {
                let q = axpy(&pos, 1.0, &rem);
                return if self.contains(&q) { StepOutcome::Moved(q) } else { StepOutcome::Rejected };
            };
            let hit = axpy(&pos, t, &rem);
            let n = match kind {
                0 => {
                    if hit[1].hypot(hit[2]) <= self.r_abs {
                        return StepOutcome::Absorbed { at: hit, window: 0 };
                    }
                    [1.0, 0.0, 0.0]
                }
                1 => [-1.0, 0.0, 0.0],
                _ => self.lateral_normal(&hit),
            };
            let rest = [(1.0 - t) * rem[0], (1.0 - t) * rem[1], (1.0 - t) * rem[2]];
            rem = mirror(&rest, &n);
            pos = hit;
        }
        StepOutcome::Rejected
    }

    fn window_distance(&self, p: &[f64; 3]) -> f64 {
        let over = (p[1].hypot(p[2]) - self.r_abs).max(0.0);
        (p[0] - self.x_abs).hypot(over)
    }

    fn window_gap(&self, p: &[f64; 3]) -> Option<(usize, f64)> {
        (p[1].hypot(p[2]) <= self.r_abs).then(|| (0, p[0] - self.x_abs))
    }

    fn n_windows(&self) -> usize {
        1
    }

    fn diameter(&self) -> f64 {
        self.diameter
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_absorbs_on_crossing() {
        let b = AbsorbingBall::<3> { center: [0.0; 3], radius: 1.0 };
        assert_eq!(b.advance(&[0.0; 3], &[0.5, 0.0, 0.0]), StepOutcome::Moved([0.5, 0.0, 0.0]));
        match b.advance(&[0.9, 0.0, 0.0], &[0.2, 0.0, 0.0]) {
            StepOutcome::Absorbed { at, .. } => assert!((at[0] - 1.0).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cylinder_reflects_radially() {
        let s = SolidOfRevolution::new(RevolutionProfile::cylinder(1.0, 4.0).unwrap());
        match s.advance(&[-2.0, 0.0, 0.8], &[0.0, 0.0, 0.4]) {
            StepOutcome::Moved(q) => {
                assert!((q[2] - 0.8).abs() < 1e-12 && q[0] == -2.0);
            }
            other => panic!("{other:?}"),
        }
        // flat top reflects as well
        match s.advance(&[-0.1, 0.0, 0.0], &[0.3, 0.0, 0.0]) {
            StepOutcome::Moved(q) => assert!((q[0] + 0.2).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        match s.advance(&[-3.9, 0.1, 0.0], &[-0.2, 0.0, 0.0]) {
            StepOutcome::Absorbed { at, window } => {
                assert_eq!(window, 0);
                assert!((at[0] + 4.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn funnel_solid_membership() {
        let p = RevolutionProfile::funnel(0.05, 1.0, 1.0, 1.0).unwrap();
        let lam = p.lambda;
        let s = SolidOfRevolution::new(p);
        assert!(s.contains(&[lam + 1e-3, 0.0, 0.0]));
        assert!(!s.contains(&[lam + 1e-3, 0.06, 0.0]));
        assert!(s.contains(&[-1.0, 0.0, 0.9]));
        assert!(!s.contains(&[0.01, 0.0, 0.0]));
    }

    #[test]
    fn sphere_solid_reflection_stays_inside() {
        let s = SolidOfRevolution::new(RevolutionProfile::sphere_cap(1.0, 0.3).unwrap());
        let start = [-1.0, 0.0, 0.9];
        match s.advance(&start, &[0.0, 0.0, 0.3]) {
            StepOutcome::Moved(q) => {
                assert!(s.contains(&q));
                assert!((q[2] - 0.8).abs() < 1e-9, "{q:?}");
            }
            other => panic!("{other:?}"),
        }
    }
}
