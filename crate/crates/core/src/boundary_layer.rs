//! Numerical companions to the closed forms: the boundary-layer ODE near a
//! funnel cusp, the projected drift of diffusion on a surface of revolution,
//! and an exact-quadrature escape time for such surfaces.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{require, NetError, Result};
use crate::geometry::RevolutionProfile;
use crate::numerics::{self, OdePoint};

/// Coefficient of the cusp boundary-layer equation Y'' + c/(1+xi^2)^2 Y = 0.
pub const BLEQ_COEFF: f64 = 0.25;

/// Default local error target of the ODE integration.
pub const BLEQ_TOL: f64 = 1e-12;

/// A solution is treated as growing when its final slope exceeds this
/// fraction of |Y(0)| + |Y'(0)|.
pub const GROWTH_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct BleqSolution {
    pub grid: Vec<f64>,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
    /// Y1 Y' - Y1' Y against the companion solution Y1(0) = 0, Y1'(0) = 2.
    pub wronskian: f64,
    /// Largest relative departure of the Wronskian from its initial value.
    pub wronskian_drift: f64,
    /// Limit Y - xi Y' for bounded solutions, the slope for growing ones.
    pub asymptote: f64,
    pub growing: bool,
    /// Final slope Y'(xi_max).
    pub slope: f64,
    /// Intercept Y - xi Y', Richardson-extrapolated from xi_max/2 and xi_max.
    pub intercept: f64,
    /// Limit of the exactly bounded solution with the same Y(0), obtained by
    /// removing the companion component.
    pub bounded_limit: f64,
    /// bounded_limit / Y(0): the limit for Y(0) = 1. NaN when Y(0) = 0.
    pub bounded_ratio: f64,
}

impl BleqSolution {
    /// Two-column "xi Y" text.
    pub fn to_two_column(&self) -> String {
        let mut s = String::with_capacity(self.grid.len() * 48);
        s.push_str("# xi Y\n");
        for (x, y) in self.grid.iter().zip(&self.y) {
            let _ = writeln!(s, "{x:.17e} {y:.17e}");
        }
        s
    }
}

pub fn solve_bleq(y0: f64, dy0: f64, xi_max: f64, coeff_scale: f64) -> Result<BleqSolution> {
    solve_bleq_tol(y0, dy0, xi_max, coeff_scale, BLEQ_TOL)
}

/// Integrates the solution together with the companion Y1 so that the
/// Wronskian is monitored along the whole grid.
pub fn solve_bleq_tol(y0: f64, dy0: f64, xi_max: f64, coeff_scale: f64, tol: f64) -> Result<BleqSolution> {
    require(xi_max >= 100.0, || format!("xi_max must be at least 100, got {xi_max}"))?;
    require(coeff_scale > 0.0 && coeff_scale.is_finite(), || "coeff_scale must be positive".into())?;
    require(y0.is_finite() && dy0.is_finite(), || "initial values must be finite".into())?;
    require(tol > 0.0 && tol <= 1e-10, || "tolerance must lie in (0, 1e-10]".into())?;
    let rhs = |xi: f64, s: &[f64; 4]| {
        let k = coeff_scale / (1.0 + xi * xi).powi(2);
        [s[1], -k * s[0], s[3], -k * s[2]]
    };
    let half = 0.5 * xi_max;
    let first = numerics::dopri5(rhs, 0.0, [y0, dy0, 0.0, 2.0], half, tol)?;
    let mid = first.last().unwrap().y;
    let second = numerics::dopri5(rhs, half, mid, xi_max, tol)?;
    let pts: Vec<OdePoint<4>> = first.into_iter().chain(second.into_iter().skip(1)).collect();

    let w = |s: &[f64; 4]| s[2] * s[1] - s[3] * s[0];
    let w0 = w(&pts[0].y);
    let scale = if w0 != 0.0 { w0.abs() } else { 1.0 };
    let drift = pts.iter().map(|p| (w(&p.y) - w0).abs() / scale).fold(0.0, f64::max);

    let end = pts.last().unwrap().y;
    let icpt = |xi: f64, s: &[f64; 4]| (s[0] - xi * s[1], s[2] - xi * s[3]);
    let (i_end, i1_end) = icpt(xi_max, &end);
    let (i_mid, i1_mid) = icpt(half, &mid);
    // I(xi) - I(inf) decays like 1/xi when the slope is non-zero
    let intercept = 2.0 * i_end - i_mid;
    let intercept1 = 2.0 * i1_end - i1_mid;
    let slope = end[1];
    let slope1 = end[3];
    let growing = slope.abs() > GROWTH_FRACTION * (y0.abs() + dy0.abs());
    let bounded_limit = intercept - slope / slope1 * intercept1;
    Ok(BleqSolution {
        grid: pts.iter().map(|p| p.t).collect(),
        y: pts.iter().map(|p| p.y[0]).collect(),
        dy: pts.iter().map(|p| p.y[1]).collect(),
        wronskian: w0,
        wronskian_drift: drift,
        asymptote: if growing { slope } else { intercept },
        growing,
        slope,
        intercept,
        bounded_limit,
        bounded_ratio: if y0 != 0.0 { bounded_limit / y0 } else { f64::NAN },
    })
}

/// Drift and noise of the projected motion along the axis of a surface of
/// revolution, sampled on a uniform grid from the absorbing end to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftField {
    pub z: Vec<f64>,
    pub a_of_z: Vec<f64>,
    pub b_of_z: Vec<f64>,
    /// A(z) = -integral of a from the absorbing end.
    pub potential: Vec<f64>,
    step: f64,
}

impl DriftField {
    pub fn lower(&self) -> f64 {
        self.z[0]
    }

    pub fn upper(&self) -> f64 {
        *self.z.last().unwrap()
    }

    /// Linearly interpolated (a, b) at z; None outside the sampled range.
    pub fn at(&self, z: f64) -> Option<(f64, f64)> {
        let (lo, hi) = (self.lower(), self.upper());
        if !(z >= lo && z <= hi) {
            return None;
        }
        let n = self.z.len();
        let i = (((z - lo) / self.step) as usize).min(n - 2);
        let t = ((z - self.z[i]) / self.step).clamp(0.0, 1.0);
        let a = self.a_of_z[i] + t * (self.a_of_z[i + 1] - self.a_of_z[i]);
        let b = self.b_of_z[i] + t * (self.b_of_z[i + 1] - self.b_of_z[i]);
        Some((a, b))
    }

    /// Constant drift and noise on [lower, upper]; a test fixture for the
    /// simulator.
    pub fn uniform(lower: f64, upper: f64, a: f64, b: f64, n_samples: usize) -> Result<DriftField> {
        require(upper > lower, || "empty interval".into())?;
        require(b > 0.0, || "noise must be positive".into())?;
        require(n_samples >= 2, || "need at least two samples".into())?;
        let step = (upper - lower) / (n_samples - 1) as f64;
        let z: Vec<f64> = (0..n_samples).map(|i| lower + step * i as f64).collect();
        let potential = z.iter().map(|&x| -a * (x - lower)).collect();
        Ok(DriftField { a_of_z: vec![a; n_samples], b_of_z: vec![b; n_samples], z, potential, step })
    }
}

pub fn drift_field(p: &RevolutionProfile, d: f64, n_samples: usize) -> Result<DriftField> {
    require(d > 0.0, || "D must be positive".into())?;
    require(n_samples >= 2, || "need at least two samples".into())?;
    let lo = p.x_abs();
    let step = -lo / (n_samples - 1) as f64;
    let z: Vec<f64> = (0..n_samples)
        .map(|i| if i + 1 == n_samples { 0.0 } else { lo + step * i as f64 })
        .collect();
    let drift = |x: f64| d * p.jet(x).drift_shape();
    let mut a_of_z = Vec::with_capacity(n_samples);
    let mut b_of_z = Vec::with_capacity(n_samples);
    for (i, &x) in z.iter().enumerate() {
        let j = p.jet(x);
        if !(j.r > 0.0) && i + 1 < n_samples {
            return Err(NetError::Domain(format!("profile radius vanishes at interior point {x}")));
        }
        let a = drift(x);
        let b = (2.0 * d * j.inv_stretch()).sqrt();
        if !a.is_finite() || !b.is_finite() {
            return Err(NetError::Domain(format!("drift undefined at {x}")));
        }
        if !(b > 0.0) && i + 1 < n_samples {
            return Err(NetError::Domain(format!("noise vanishes at interior point {x}")));
        }
        a_of_z.push(a);
        b_of_z.push(b);
    }
    let breaks = p.breakpoints();
    let mut potential = Vec::with_capacity(n_samples);
    let mut acc = 0.0;
    potential.push(0.0);
    for w in z.windows(2) {
        let mut pts = vec![w[0]];
        pts.extend(breaks.iter().copied().filter(|&b| b > w[0] && b < w[1]));
        pts.push(w[1]);
        let scale = drift(w[0]).abs().max(drift(w[1]).abs()).max(d);
        acc -= numerics::integrate_pieces(drift, &pts, 1e-13 * scale * (w[1] - w[0]))?;
        potential.push(acc);
    }
    Ok(DriftField { z, a_of_z, b_of_z, potential, step })
}

/// Fraction of the axis next to a pole handled by the local expansion.
const POLE_CUTOFF: f64 = 1e-7;

/// Exact mean escape time from the top (x = 0) of a surface of revolution:
/// u(0) = (1/2 pi D) * integral over [x_abs, 0] of sqrt(1+r'^2)/r * S(t) dt,
/// S(t) the area above t.
pub fn surface_mfpt_quadrature(p: &RevolutionProfile, d: f64) -> Result<f64> {
    surface_mfpt_between(p, d, p.x_abs(), 0.0)
}

/// Mean escape time from the cross-section at `x`.
pub fn surface_mfpt_from(p: &RevolutionProfile, d: f64, x: f64) -> Result<f64> {
    require(x >= p.x_abs() && x <= 0.0, || format!("start {x} outside the profile"))?;
    surface_mfpt_between(p, d, p.x_abs(), x)
}

fn surface_mfpt_between(p: &RevolutionProfile, d: f64, lo: f64, hi: f64) -> Result<f64> {
    require(d > 0.0, || "D must be positive".into())?;
    require(p.a > 0.0, || "absorbing radius must be positive".into())?;
    if hi <= lo {
        return Ok(0.0);
    }
    let integrand = |t: f64| -> f64 {
        let j = p.jet(t);
        j.metric() * p.area_above(t).unwrap_or(f64::NAN)
    };
    // near a pole r ~ k sqrt(-x) and the integrand tends to pi k^2 / 2
    let (upper, tail) = if hi == 0.0 && p.has_pole() {
        let eta = POLE_CUTOFF * -lo;
        let k2 = -p.jet(0.0).dq;
        (-eta, eta * PI * k2 / 2.0)
    } else {
        (hi, 0.0)
    };
    let mut pts = vec![lo];
    pts.extend(p.breakpoints().into_iter().filter(|&b| b > lo && b < upper));
    pts.push(upper);
    let n = 256;
    let rough: f64 = (0..n)
        .map(|i| integrand(lo + (upper - lo) * (i as f64 + 0.5) / n as f64))
        .sum::<f64>()
        * (upper - lo)
        / n as f64;
    if !rough.is_finite() {
        return Err(NetError::Quadrature("integrand is not finite".into()));
    }
    let body = numerics::integrate_pieces(integrand, &pts, 1e-11 * rough.abs().max(1e-300))?;
    Ok((body + tail) / (2.0 * PI * d))
}

/// Value of (1/(r sqrt(1+r'^2))) d/dx[(r/sqrt(1+r'^2)) u'] at `x`, with u'
/// taken from the quadrature; equals -1/D wherever the profile is smooth.
pub fn mfpt_residual(p: &RevolutionProfile, d: f64, x: f64, h: f64) -> Result<f64> {
    require(x - 2.0 * h >= p.x_abs() && x + 2.0 * h <= 0.0, || "stencil leaves the profile".into())?;
    // (r/sqrt(1+r'^2)) u' = S(x) / (2 pi D)
    let flux = |t: f64| p.area_above(t).map(|s| s / (2.0 * PI * d));
    let deriv = (-flux(x + 2.0 * h)? + 8.0 * flux(x + h)? - 8.0 * flux(x - h)? + flux(x - 2.0 * h)?) / (12.0 * h);
    let j = p.jet(x);
    Ok(deriv / j.arc())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics;

    #[test]
    fn wronskian_of_the_two_figure_solutions() {
        let s = solve_bleq(-4.7, -1.0, 1e4, BLEQ_COEFF).unwrap();
        assert!((s.wronskian - 9.4).abs() < 1e-14);
        assert!(s.wronskian_drift < 1e-8, "{}", s.wronskian_drift);
        assert_eq!(s.grid[0], 0.0);
        assert!(s.grid.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*s.grid.last().unwrap(), 1e4);
    }

    #[test]
    fn companion_solution_grows() {
        let s = solve_bleq(0.0, 2.0, 1e4, BLEQ_COEFF).unwrap();
        assert!(s.growing);
        assert!(s.slope > 1.0 && s.slope < 2.0);
        assert_eq!(s.asymptote, s.slope);
    }

    #[test]
    fn zero_coefficient_limit_is_a_line() {
        // a tiny coefficient leaves Y = y0 + dy0 xi almost untouched
        let s = solve_bleq(1.0, 0.5, 200.0, 1e-12).unwrap();
        assert!((s.slope - 0.5).abs() < 1e-9);
        assert!((s.intercept - 1.0).abs() < 1e-7);
    }

    #[test]
    fn bounded_limit_is_independent_of_companion_content() {
        let a = solve_bleq(1.0, 0.0, 1e4, BLEQ_COEFF).unwrap();
        let b = solve_bleq(1.0, 0.3, 1e4, BLEQ_COEFF).unwrap();
        assert!((a.bounded_limit - b.bounded_limit).abs() < 1e-8);
        assert!((a.bounded_ratio - a.bounded_limit).abs() < 1e-15);
    }

    #[test]
    fn tolerance_refinement_is_stable() {
        let a = solve_bleq_tol(-4.7, -1.0, 1e4, BLEQ_COEFF, 1e-11).unwrap();
        let b = solve_bleq_tol(-4.7, -1.0, 1e4, BLEQ_COEFF, 5e-12).unwrap();
        assert!((a.asymptote - b.asymptote).abs() < 1e-6);
    }

    #[test]
    fn bleq_rejects_bad_inputs() {
        assert!(solve_bleq(1.0, 0.0, 50.0, BLEQ_COEFF).is_err());
        assert!(solve_bleq(1.0, 0.0, 1e3, 0.0).is_err());
    }

    #[test]
    fn two_column_export() {
        let s = solve_bleq(1.0, 0.0, 100.0, BLEQ_COEFF).unwrap();
        let txt = s.to_two_column();
        let rows: Vec<&str> = txt.lines().skip(1).collect();
        assert_eq!(rows.len(), s.grid.len());
        let cols: Vec<f64> = rows[0].split_whitespace().map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols, vec![0.0, 1.0]);
    }

    #[test]
    fn cylinder_has_no_drift() {
        let p = RevolutionProfile::cylinder(0.3, 2.0).unwrap();
        let f = drift_field(&p, 1.5, 101).unwrap();
        assert!(f.a_of_z.iter().all(|a| a.abs() < 1e-15));
        assert!(f.b_of_z.iter().all(|b| (b - 3f64.sqrt()).abs() < 1e-15));
        assert!(f.potential.iter().all(|a| a.abs() < 1e-15));
    }

    #[test]
    fn cone_drift_matches_symbolic_form() {
        let base = RevolutionProfile::cylinder(0.5, 1.0).unwrap();
        let (c, len) = (0.2, 1.0);
        let p = base.with_cone(c, len).unwrap();
        let f = drift_field(&p, 2.0, 401).unwrap();
        for (i, &z) in f.z.iter().enumerate() {
            if z < p.x_abs() + len - 1e-12 {
                let r = p.a + c * (z - p.x_abs());
                let expect = 2.0 * c / (r * (1.0 + c * c));
                assert!((f.a_of_z[i] - expect).abs() < 1e-12 * expect, "{z}");
            }
        }
    }

    #[test]
    fn potential_differentiates_back_to_drift() {
        let p = RevolutionProfile::sphere_cap(1.0, 0.3).unwrap();
        let f = drift_field(&p, 1.0, 4001).unwrap();
        let h = f.z[1] - f.z[0];
        let amax = f.a_of_z.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        for i in 2..f.z.len() - 2 {
            let d = (-f.potential[i + 2] + 8.0 * f.potential[i + 1] - 8.0 * f.potential[i - 1] + f.potential[i - 2])
                / (12.0 * h);
            assert!((d + f.a_of_z[i]).abs() < 1e-8 * amax, "at {}: {} vs {}", f.z[i], d, -f.a_of_z[i]);
        }
        assert_eq!(f.potential[0], 0.0);
    }

    #[test]
    fn neck_barrier_exceeds_head_variation() {
        let p = RevolutionProfile::funnel(0.02, 1.0, 1.0, 1.0).unwrap();
        let f = drift_field(&p, 1.0, 20001).unwrap();
        let neck_end = p.segments()[0].range().1;
        let (mut neck, mut head) = (0.0f64, 0.0f64);
        for (z, a) in f.z.iter().zip(&f.potential) {
            if *z <= neck_end {
                neck = neck.max(a.abs());
            } else {
                head = head.max((a - f.potential[f.z.iter().position(|&x| x > neck_end).unwrap()]).abs());
            }
        }
        assert!(neck > head, "neck {neck} head {head}");
    }

    #[test]
    fn sphere_quadrature_matches_closed_form() {
        for delta in [0.05, 0.1, 0.4] {
            let p = RevolutionProfile::sphere_cap(1.0, delta).unwrap();
            let u = surface_mfpt_quadrature(&p, 1.0).unwrap();
            let exact = asymptotics::net_sphere_cap(1.0, PI, delta, 1.0).unwrap().tau;
            assert!((u - exact).abs() < 1e-6 * exact, "delta {delta}: {u} vs {exact}");
        }
        let p = RevolutionProfile::sphere_cap(2.0, 0.1).unwrap();
        let u = surface_mfpt_quadrature(&p, 0.5).unwrap();
        let exact = asymptotics::net_sphere_cap(2.0, PI, 0.1, 0.5).unwrap().tau;
        assert!((u - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn sphere_escape_from_interior_latitude() {
        let p = RevolutionProfile::sphere_cap(1.0, 0.1).unwrap();
        let theta: f64 = 1.2;
        // polar angle theta from the cap centre sits at x = -1 - cos(theta)
        let u = surface_mfpt_from(&p, 1.0, -1.0 - theta.cos()).unwrap();
        let exact = asymptotics::net_sphere_cap(1.0, theta, 0.1, 1.0).unwrap().tau;
        assert!((u - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn residual_is_minus_one_over_d() {
        let p = RevolutionProfile::funnel(0.02, 1.0, 1.0, 1.0).unwrap();
        for x in [-2.5, -1.7, -1.0, -0.3] {
            let r = mfpt_residual(&p, 2.0, p.lambda + (x - p.lambda) * 0.999 + 0.0, 1e-4).unwrap();
            assert!((r + 0.5).abs() < 1e-6, "{x}: {r}");
        }
    }

    #[test]
    fn quadrature_decreases_with_hole_size() {
        let mut prev = f64::INFINITY;
        for a in [0.01, 0.02, 0.04, 0.08] {
            let p = RevolutionProfile::funnel(a, 1.0, 1.0, 1.0).unwrap();
            let u = surface_mfpt_quadrature(&p, 1.0).unwrap();
            assert!(u < prev);
            prev = u;
        }
    }

    #[test]
    fn quadrature_approaches_funnel_formula() {
        let mut ratios = Vec::new();
        for a in [0.04, 0.02, 0.01] {
            let p = RevolutionProfile::funnel(a, 1.0, 1.0, 1.0).unwrap();
            let u = surface_mfpt_quadrature(&p, 1.0).unwrap();
            let pred = asymptotics::net_surface(p.total_area(), a, 1.0, 1.0, 1.0).unwrap().tau;
            ratios.push(u / pred);
        }
        assert!(ratios.windows(2).all(|w| (1.0 - w[1]).abs() < (1.0 - w[0]).abs()), "{ratios:?}");
        assert!((1.0 - ratios[2]).abs() < 0.1);
    }
}
