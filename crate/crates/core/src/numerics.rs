//! Small numerical kernels shared by the solvers: adaptive Simpson
//! quadrature, bracketing root search and a Dormand–Prince 5(4) stepper.

use crate::error::{NetError, Result};

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut total = 0.0;
    let mut unconverged = false;
    // explicit stack: (a, b, fa, fm, fb, whole, tol, depth)
    let mut stack = vec![(a, b, fa, fm, fb, whole, tol, 0u32)];
    while let Some((a, b, fa, fm, fb, whole, tol, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        let floor = 1e-15 * (left.abs() + right.abs());
        if !delta.is_finite() {
            return Err(NetError::Quadrature(format!("non-finite integrand near x = {m}")));
        }
        if delta.abs() <= 15.0 * tol.max(floor) || depth >= MAX_DEPTH {
            if depth >= MAX_DEPTH && delta.abs() > 15.0 * tol.max(floor) {
                unconverged = true;
            }
            total += left + right + delta / 15.0;
        } else {
            stack.push((a, m, fa, flm, fm, left, 0.5 * tol, depth + 1));
            stack.push((m, b, fm, frm, fb, right, 0.5 * tol, depth + 1));
        }
    }
    if unconverged {
        return Err(NetError::Quadrature(format!(
            "subdivision limit reached on [{a}, {b}]"
        )));
    }
    Ok(total)
}

/// Integrate over consecutive breakpoints, summing the pieces.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: f64) -> Result<f64> {
    let n = points.len().saturating_sub(1).max(1) as f64;
    let mut sum = 0.0;
    for w in points.windows(2) {
        sum += integrate(&f, w[0], w[1], tol / n)?;
    }
    Ok(sum)
}

/// Like [`integrate_pieces`] but with y = c - h cos(t) on each piece, which
/// removes square-root behaviour at the breakpoints.
pub fn integrate_pieces_cos<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: f64) -> Result<f64> {
    let n = points.len().saturating_sub(1).max(1) as f64;
    let mut sum = 0.0;
    for w in points.windows(2) {
        let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        sum += integrate(|t: f64| f(c - h * t.cos()) * h * t.sin(), 0.0, std::f64::consts::PI, tol / n)?;
    }
    Ok(sum)
}

/// Root of `f` on `[lo, hi]` by bisection; `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(NetError::Domain(format!(
            "root not bracketed on [{lo}, {hi}]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// One accepted point of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct OdePoint<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Dormand–Prince 5(4) integration of `y' = f(t, y)` from `t0` to `t1`.
///
/// The mixed error norm uses `tol` as both absolute and relative tolerance.
/// Returns every accepted step, starting with the initial point.
pub fn dopri5<const N: usize, F>(f: F, t0: f64, y0: [f64; N], t1: f64, tol: f64) -> Result<Vec<OdePoint<N>>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let span = t1 - t0;
    if !(span > 0.0) {
        return Err(NetError::InvalidParameter("integration span must be positive".into()));
    }
    let mut out = vec![OdePoint { t: t0, y: y0 }];
    let mut t = t0;
    let mut y = y0;
    let mut h = (span * 1e-3).min(1e-2);
    let h_min = span * 1e-14;
    let mut k1 = f(t, &y);
    let mut steps = 0usize;
    while t < t1 {
        steps += 1;
        if steps > 10_000_000 {
            return Err(NetError::StepSize("too many steps".into()));
        }
        if t + h > t1 {
            h = t1 - t;
        }
        let k2 = f(t + h / 5.0, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + 0.3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + 0.8 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + 8.0 / 9.0 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + h, &y_new);
        let mut err = 0.0f64;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = tol * (1.0 + y[i].abs().max(y_new[i].abs()));
            err = err.max((e / scale).abs());
        }
        if !err.is_finite() {
            return Err(NetError::StepSize(format!("non-finite state at t = {t}")));
        }
        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k7;
            out.push(OdePoint { t, y });
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < h_min && t < t1 {
            return Err(NetError::StepSize(format!(
                "step size fell below {h_min:e} at t = {t}"
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomials_and_transcendentals() {
        let v = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 0.0).abs() < 1e-12);
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
        let v = integrate(|x: f64| 1.0 / x.sqrt(), 1e-8, 1.0, 1e-10).unwrap();
        assert!((v - (2.0 - 2e-4)).abs() < 1e-8);
    }

    #[test]
    fn simpson_reversed_limits() {
        let v = integrate(|x| x, 1.0, 0.0, 1e-12).unwrap();
        assert!((v + 0.5).abs() < 1e-14);
    }

    #[test]
    fn bisection_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-10).is_err());
    }

    #[test]
    fn dopri_harmonic_oscillator() {
        let sol = dopri5(|_, y| [y[1], -y[0]], 0.0, [0.0, 1.0], 10.0, 1e-12).unwrap();
        let last = sol.last().unwrap();
        assert!((last.t - 10.0).abs() < 1e-12);
        assert!((last.y[0] - 10f64.sin()).abs() < 1e-9);
        assert!((last.y[1] - 10f64.cos()).abs() < 1e-9);
    }

    #[test]
    fn dopri_exponential() {
        let sol = dopri5(|_, y| [y[0]], 0.0, [1.0], 1.0, 1e-12).unwrap();
        assert!((sol.last().unwrap().y[0] - std::f64::consts::E).abs() < 1e-10);
    }
}
