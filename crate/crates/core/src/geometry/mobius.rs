//! Disk automorphism that straightens the tangent-circle funnel.

use num_complex::Complex64;

use crate::error::{require, NetError, Result};

/// w = (z - alpha) / (1 - alpha z).
pub fn mobius_map(z: Complex64, alpha: Complex64) -> Result<Complex64> {
    let den = Complex64::new(1.0, 0.0) - alpha * z;
    if den.norm() < 1e-14 {
        return Err(NetError::Domain(format!("pole of the map at z = {z}")));
    }
    Ok((z - alpha) / den)
}

/// z = (w + alpha) / (1 + alpha w), the inverse of [`mobius_map`].
pub fn mobius_inverse(w: Complex64, alpha: Complex64) -> Result<Complex64> {
    let den = Complex64::new(1.0, 0.0) + alpha * w;
    if den.norm() < 1e-14 {
        return Err(NetError::Domain(format!("pole of the inverse map at w = {w}")));
    }
    Ok((w + alpha) / den)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunnelAlpha {
    /// Root of the full radical with |alpha| < 1.
    pub alpha: f64,
    /// The other root, outside the unit disk.
    pub conjugate_root: f64,
    /// -1 + sqrt(2 rc eps / (Rc + rc)).
    pub leading: f64,
}

/// Real parameter of the map sending the two funnel circles into concentric
/// circles. Lengths are in units of `rc_upper`: one circle has unit radius
/// and centre 0, the other radius rc_lower/rc_upper, with a gap `eps`.
pub fn funnel_alpha(rc_upper: f64, rc_lower: f64, eps: f64) -> Result<FunnelAlpha> {
    require(rc_upper > 0.0 && rc_lower > 0.0, || "radii must be positive".into())?;
    require((0.0..1.0).contains(&eps), || "gap must lie in [0, 1)".into())?;
    let (big, small, e) = (rc_upper, rc_lower, eps);
    let den = 2.0 * (e * big + small + big);
    let centre = -(2.0 * e * big + 2.0 * big + e * e * big + 2.0 * small * e + 2.0 * small) / den;
    let disc = e
        * (8.0 * big * small
            + 4.0 * e * big * big
            + 12.0 * e * big * small
            + 4.0 * e * e * big * big
            + 8.0 * small * small
            + 4.0 * e * e * big * small
            + e * e * e * big * big
            + 4.0 * e * small * small);
    if disc < 0.0 {
        return Err(NetError::Domain(format!("negative discriminant {disc}")));
    }
    let half = disc.sqrt() / den;
    let (plus, minus) = (centre + half, centre - half);
    let (alpha, other) = if plus.abs() <= minus.abs() { (plus, minus) } else { (minus, plus) };
    Ok(FunnelAlpha {
        alpha,
        conjugate_root: other,
        leading: -1.0 + (2.0 * small * e / (big + small)).sqrt(),
    })
}
