//! Closed-form narrow escape time predictions.
//!
//! Every function returns a [`NetPrediction`] tagged with a stable
//! [`FormulaId`]. Inputs outside the small-parameter regime still produce a
//! value, flagged `extrapolated`; only mathematically meaningless inputs are
//! errors.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{require, NetError, Result};
use crate::geometry::{CompositeSpec, DumbbellSpec, NeedleStripSpec, PlanarFunnelSpec};

/// Default bound on the ratio of neck scale to domain scale.
pub const REGIME_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum FormulaId {
    Net2dWindow,
    Net3dWindow,
    PlanarFunnelGeneral,
    PlanarFunnelSymmetric,
    PlanarFunnelPower,
    PlanarMultiNeck,
    SolidFunnel,
    SolidMultiNeck,
    SurfaceFunnel,
    SurfaceFunnelCircular,
    SphereCap,
    SurfaceWithCylinder,
    SurfaceCone,
    SurfaceConeFull,
    CompositeNeck,
    Dumbbell,
    NeedleTurnaround,
}

impl FormulaId {
    pub const ALL: [FormulaId; 17] = [
        FormulaId::Net2dWindow,
        FormulaId::Net3dWindow,
        FormulaId::PlanarFunnelGeneral,
        FormulaId::PlanarFunnelSymmetric,
        FormulaId::PlanarFunnelPower,
        FormulaId::PlanarMultiNeck,
        FormulaId::SolidFunnel,
        FormulaId::SolidMultiNeck,
        FormulaId::SurfaceFunnel,
        FormulaId::SurfaceFunnelCircular,
        FormulaId::SphereCap,
        FormulaId::SurfaceWithCylinder,
        FormulaId::SurfaceCone,
        FormulaId::SurfaceConeFull,
        FormulaId::CompositeNeck,
        FormulaId::Dumbbell,
        FormulaId::NeedleTurnaround,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FormulaId::Net2dWindow => "NET_2D_WINDOW",
            FormulaId::Net3dWindow => "NET_3D_WINDOW",
            FormulaId::PlanarFunnelGeneral => "PLANAR_FUNNEL_GENERAL",
            FormulaId::PlanarFunnelSymmetric => "PLANAR_FUNNEL_SYMMETRIC",
            FormulaId::PlanarFunnelPower => "PLANAR_FUNNEL_POWER",
            FormulaId::PlanarMultiNeck => "PLANAR_MULTI_NECK",
            FormulaId::SolidFunnel => "SOLID_FUNNEL",
            FormulaId::SolidMultiNeck => "SOLID_MULTI_NECK",
            FormulaId::SurfaceFunnel => "SURFACE_FUNNEL",
            FormulaId::SurfaceFunnelCircular => "SURFACE_FUNNEL_CIRCULAR",
            FormulaId::SphereCap => "SPHERE_CAP",
            FormulaId::SurfaceWithCylinder => "SURFACE_WITH_CYLINDER",
            FormulaId::SurfaceCone => "SURFACE_CONE",
            FormulaId::SurfaceConeFull => "SURFACE_CONE_FULL",
            FormulaId::CompositeNeck => "COMPOSITE_NECK",
            FormulaId::Dumbbell => "DUMBBELL",
            FormulaId::NeedleTurnaround => "NEEDLE_TURNAROUND",
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<FormulaId> for String {
    fn from(f: FormulaId) -> String {
        f.as_str().to_string()
    }
}

impl TryFrom<String> for FormulaId {
    type Error = NetError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for FormulaId {
    type Err = NetError;
    fn from_str(s: &str) -> Result<Self> {
        FormulaId::ALL
            .iter()
            .copied()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| NetError::Config(format!("unknown formula id {s}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetPrediction {
    pub formula_id: FormulaId,
    pub tau: f64,
    pub regime_note: String,
    /// Small parameter at or above the regime threshold.
    pub extrapolated: bool,
    pub inputs_echo: BTreeMap<String, f64>,
}

impl NetPrediction {
    fn new(formula_id: FormulaId, tau: f64, small: f64, note: &str, inputs: &[(&str, f64)]) -> NetPrediction {
        NetPrediction {
            formula_id,
            tau,
            regime_note: format!("{note}; small parameter {small:.4e}"),
            extrapolated: !(small < REGIME_THRESHOLD),
            inputs_echo: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    /// Small parameter the regime check used, recovered from the echo.
    pub fn small_parameter(&self) -> Option<f64> {
        self.inputs_echo.get("small_parameter").copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitProbabilities {
    pub probs: Vec<f64>,
}

impl ExitProbabilities {
    fn from_weights(w: &[f64]) -> ExitProbabilities {
        let total: f64 = w.iter().sum();
        ExitProbabilities { probs: w.iter().map(|x| x / total).collect() }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    require(v > 0.0 && v.is_finite(), || format!("{name} must be positive and finite, got {v}"))
}

/// Small absorbing arc on the boundary of a planar domain.
pub fn net_2d_window(area: f64, boundary_len: f64, window_len: f64, d: f64) -> Result<NetPrediction> {
    positive("area", area)?;
    positive("boundary_len", boundary_len)?;
    positive("window_len", window_len)?;
    positive("D", d)?;
    let eps = PI * window_len / boundary_len;
    if eps > 1.0 {
        return Err(NetError::Regime(format!(
            "window {window_len} longer than boundary/pi = {}",
            boundary_len / PI
        )));
    }
    let tau = area / (PI * d) * (1.0 / eps).ln();
    Ok(NetPrediction::new(
        FormulaId::Net2dWindow,
        tau,
        eps,
        "drops an O(1) constant next to ln(1/eps), eps = pi|window|/|boundary|",
        &[("area", area), ("boundary_len", boundary_len), ("window_len", window_len), ("D", d), ("small_parameter", eps)],
    ))
}

/// Small circular window of radius `a` on a smooth boundary in space;
/// `l_curv`, `n_curv` are the principal curvatures at the window.
pub fn net_3d_window(volume: f64, a: f64, d: f64, l_curv: f64, n_curv: f64) -> Result<NetPrediction> {
    positive("volume", volume)?;
    positive("a", a)?;
    positive("D", d)?;
    let bracket = 1.0 + (l_curv + n_curv) / (2.0 * PI) * a * a.ln();
    if !(bracket > 0.0) {
        return Err(NetError::Regime(format!("curvature correction bracket {bracket} is not positive")));
    }
    let small = a / volume.cbrt();
    Ok(NetPrediction::new(
        FormulaId::Net3dWindow,
        volume / (4.0 * a * d * bracket),
        small,
        "drops o(a ln a) in the bracket",
        &[("volume", volume), ("a", a), ("D", d), ("L", l_curv), ("N", n_curv), ("small_parameter", small)],
    ))
}

/// Planar funnel; the formula is chosen from the wall exponents and radii.
pub fn net_2d_funnel(spec: &PlanarFunnelSpec, d: f64) -> Result<NetPrediction> {
    spec.validate()?;
    positive("D", d)?;
    let s = spec;
    let small = s.regime_ratio();
    let echo = [
        ("eps", s.eps),
        ("Rc", s.rc_upper),
        ("rc", s.rc_lower),
        ("nu_plus", s.nu_plus),
        ("nu_minus", s.nu_minus),
        ("ell_plus", s.ell_plus),
        ("area", s.area),
        ("D", d),
        ("small_parameter", small),
    ];
    let note = "leading order, relative correction o(1) as eps -> 0";
    if s.nu_plus == 1.0 && s.nu_minus == 1.0 {
        if s.rc_upper == s.rc_lower {
            let tau = PI * s.area / (2.0 * d * (s.eps / s.rc_upper).sqrt());
            Ok(NetPrediction::new(FormulaId::PlanarFunnelSymmetric, tau, small, note, &echo))
        } else {
            Ok(NetPrediction::new(FormulaId::PlanarFunnelGeneral, planar_general(s, d), small, note, &echo))
        }
    } else if s.nu_plus == s.nu_minus && s.nu_plus > 1.0 {
        let tau = PI * s.area / (2.0 * d * (s.eps / s.ell_plus).sqrt());
        Ok(NetPrediction::new(FormulaId::PlanarFunnelPower, tau, small, note, &echo))
    } else {
        Err(NetError::Unsupported(format!(
            "no formula for wall exponents ({}, {})",
            s.nu_plus, s.nu_minus
        )))
    }
}

/// sqrt(Rc (Rc + rc) / (2 rc eps)) * pi |Omega| / (2 D), valid for any radii.
pub fn planar_general(s: &PlanarFunnelSpec, d: f64) -> f64 {
    let (big, small) = (s.rc_upper, s.rc_lower);
    (big * (big + small) / (2.0 * small * s.eps)).sqrt() * PI * s.area / (2.0 * d)
}

/// Several well separated planar necks given as (eps_j, ell_j).
pub fn net_2d_multi_neck(necks: &[(f64, f64)], area: f64, d: f64) -> Result<(NetPrediction, ExitProbabilities)> {
    if necks.is_empty() {
        return Err(NetError::InvalidParameter("empty neck list".into()));
    }
    positive("area", area)?;
    positive("D", d)?;
    let mut w = Vec::with_capacity(necks.len());
    let mut small: f64 = 0.0;
    for &(eps, ell) in necks {
        positive("eps", eps)?;
        positive("ell", ell)?;
        w.push((eps / ell).sqrt());
        small = small.max(eps / ell);
    }
    let sum: f64 = w.iter().sum();
    let tau = PI * area / (2.0 * d * sum);
    let pred = NetPrediction::new(
        FormulaId::PlanarMultiNeck,
        tau,
        small,
        "leading order; necks assumed well separated",
        &[("area", area), ("D", d), ("n_necks", necks.len() as f64), ("small_parameter", small)],
    );
    Ok((pred, ExitProbabilities::from_weights(&w)))
}

/// Solid funnel of neck radius `a` and curvature length `ell`.
pub fn net_3d_funnel(volume: f64, ell: f64, a: f64, d: f64) -> Result<NetPrediction> {
    positive("volume", volume)?;
    positive("ell", ell)?;
    positive("a", a)?;
    positive("D", d)?;
    let tau = FRAC_1_SQRT_2 * (ell / a).powf(1.5) * volume / (ell * d);
    Ok(NetPrediction::new(
        FormulaId::SolidFunnel,
        tau,
        a / ell,
        "leading order in a/ell",
        &[("volume", volume), ("ell", ell), ("a", a), ("D", d), ("small_parameter", a / ell)],
    ))
}

/// Several solid necks given as (a_j, ell_j).
pub fn net_3d_multi_neck(necks: &[(f64, f64)], volume: f64, d: f64) -> Result<(NetPrediction, ExitProbabilities)> {
    if necks.is_empty() {
        return Err(NetError::InvalidParameter("empty neck list".into()));
    }
    positive("volume", volume)?;
    positive("D", d)?;
    let mut w = Vec::with_capacity(necks.len());
    let mut small: f64 = 0.0;
    for &(a, ell) in necks {
        positive("a", a)?;
        positive("ell", ell)?;
        w.push(ell * (a / ell).powf(1.5));
        small = small.max(a / ell);
    }
    let sum: f64 = w.iter().sum();
    let pred = NetPrediction::new(
        FormulaId::SolidMultiNeck,
        FRAC_1_SQRT_2 * volume / (d * sum),
        small,
        "leading order; necks assumed well separated",
        &[("volume", volume), ("D", d), ("n_necks", necks.len() as f64), ("small_parameter", small)],
    );
    Ok((pred, ExitProbabilities::from_weights(&w)))
}

/// Funnel of exponent `nu` on a surface of total area `s`.
pub fn net_surface(s: f64, a: f64, ell: f64, nu: f64, d: f64) -> Result<NetPrediction> {
    positive("S", s)?;
    positive("a", a)?;
    positive("ell", ell)?;
    positive("D", d)?;
    if !(nu > 0.0) {
        return Err(NetError::Unsupported(
            "nu = 0 has no funnel limit; use net_sphere_cap or net_cone".into(),
        ));
    }
    let p = nu / (1.0 + nu);
    let tau = s / (2.0 * d) * (ell / ((1.0 + nu) * a)).powf(p) * nu.powf(1.0 / (1.0 + nu)) / (PI * p).sin();
    Ok(NetPrediction::new(
        FormulaId::SurfaceFunnel,
        tau,
        a / ell,
        "leading order in a/ell",
        &[("S", s), ("a", a), ("ell", ell), ("nu", nu), ("D", d), ("small_parameter", a / ell)],
    ))
}

/// S / (4 D sqrt(a / 2 ell)), the circular-wall case written directly.
pub fn net_surface_circular(s: f64, a: f64, ell: f64, d: f64) -> Result<NetPrediction> {
    positive("S", s)?;
    positive("a", a)?;
    positive("ell", ell)?;
    positive("D", d)?;
    Ok(NetPrediction::new(
        FormulaId::SurfaceFunnelCircular,
        s / (4.0 * d * (a / (2.0 * ell)).sqrt()),
        a / ell,
        "leading order in a/ell",
        &[("S", s), ("a", a), ("ell", ell), ("D", d), ("small_parameter", a / ell)],
    ))
}

/// Sphere of radius `r`, start at polar angle `theta` from the centre of an
/// absorbing cap of half-angle `delta`.
pub fn net_sphere_cap(r: f64, theta: f64, delta: f64, d: f64) -> Result<NetPrediction> {
    positive("R", r)?;
    positive("delta", delta)?;
    positive("D", d)?;
    require(theta <= PI, || "theta must not exceed pi".into())?;
    if theta < delta {
        return Err(NetError::Domain(format!("start angle {theta} lies inside the cap {delta}")));
    }
    let tau = 2.0 * r * r / d * ((0.5 * theta).sin() / (0.5 * delta).sin()).ln();
    let small = (0.5 * delta).sin();
    Ok(NetPrediction::new(
        FormulaId::SphereCap,
        tau,
        small,
        "exact for the sphere",
        &[("R", r), ("theta", theta), ("delta", delta), ("D", d), ("a", r * small), ("small_parameter", small)],
    ))
}

/// Funnel surface with a cylinder of length `cyl_len` attached at the neck.
pub fn net_surface_with_cylinder(s: f64, a: f64, ell: f64, nu: f64, cyl_len: f64, d: f64) -> Result<NetPrediction> {
    let base = net_surface(s, a, ell, nu, d)?;
    require(cyl_len >= 0.0, || "cylinder length must be non-negative".into())?;
    let tau = base.tau + s * cyl_len / (2.0 * PI * d * a) + cyl_len * cyl_len / (2.0 * d);
    let mut p = NetPrediction::new(
        FormulaId::SurfaceWithCylinder,
        tau,
        a / ell,
        "leading order in a/ell",
        &[("S", s), ("a", a), ("ell", ell), ("nu", nu), ("L", cyl_len), ("D", d), ("small_parameter", a / ell)],
    );
    p.extrapolated = base.extrapolated;
    Ok(p)
}

/// Conical neck of slope `c` and length `cone_len` ending in a window of
/// radius `a`, below a head whose own contribution is `head_integral`.
/// Uses the logarithmic simplification when c L' > a, the full expression
/// otherwise.
pub fn net_cone(s: f64, a: f64, c: f64, cone_len: f64, d: f64, head_integral: f64) -> Result<NetPrediction> {
    positive("S", s)?;
    positive("a", a)?;
    positive("C", c)?;
    positive("L", cone_len)?;
    positive("D", d)?;
    if c * cone_len <= a {
        return net_cone_full(s, a, c, cone_len, d, head_integral);
    }
    let log = (c * cone_len / a).ln();
    let k = 1.0 + c * c;
    let tau = head_integral + s * k.sqrt() / (2.0 * PI * d * c) * log + k * cone_len * cone_len / (2.0 * d) * log;
    let small = a / (c * cone_len);
    Ok(NetPrediction::new(
        FormulaId::SurfaceCone,
        tau,
        small,
        "drops O(1) next to the logarithms",
        &[("S", s), ("a", a), ("C", c), ("L", cone_len), ("D", d), ("head", head_integral), ("small_parameter", small)],
    ))
}

/// Cone contribution integrated exactly: with B = a + C L',
/// S sqrt(1+C^2)/(2 pi D C) ln(B/a) + (1+C^2)/(2 D C^2) [B^2 ln(B/a) - (B^2 - a^2)/2].
pub fn net_cone_full(s: f64, a: f64, c: f64, cone_len: f64, d: f64, head_integral: f64) -> Result<NetPrediction> {
    positive("S", s)?;
    positive("a", a)?;
    positive("C", c)?;
    positive("L", cone_len)?;
    positive("D", d)?;
    let b = a + c * cone_len;
    let x = c * cone_len / a;
    let log = x.ln_1p();
    let k = 1.0 + c * c;
    // B^2 ln(1+x) - (B^2 - a^2)/2 loses everything to cancellation for small x
    let bracket = if x < 1e-3 {
        a * a * (x * x + x.powi(3) / 3.0 - x.powi(4) / 12.0 + x.powi(5) / 30.0)
    } else {
        b * b * log - 0.5 * (b * b - a * a)
    };
    let tau = head_integral + s * k.sqrt() / (2.0 * PI * d * c) * log + k / (2.0 * d * c * c) * bracket;
    Ok(NetPrediction::new(
        FormulaId::SurfaceConeFull,
        tau,
        a / s.sqrt(),
        "cone part exact; head part as supplied",
        &[("S", s), ("a", a), ("C", c), ("L", cone_len), ("D", d), ("head", head_integral), ("small_parameter", a / s.sqrt())],
    ))
}

/// Head time plus the passage through a straight neck of length L.
pub fn net_composite(head_tau: f64, spec: &CompositeSpec, d: f64) -> Result<NetPrediction> {
    spec.validate()?;
    positive("D", d)?;
    require(head_tau >= 0.0, || "head time must be non-negative".into())?;
    let l = spec.neck_len;
    let window = spec.window_measure();
    let tau = head_tau + l * l / (2.0 * d) + spec.head_volume * l / (window * d);
    let small = spec.neck_radius / spec.head_volume.powf(1.0 / spec.dim as f64);
    Ok(NetPrediction::new(
        FormulaId::CompositeNeck,
        tau,
        small,
        "additive in head and neck; head term as supplied",
        &[
            ("head_tau", head_tau),
            ("head_volume", spec.head_volume),
            ("neck_radius", spec.neck_radius),
            ("neck_len", l),
            ("window", window),
            ("D", d),
            ("small_parameter", small),
        ],
    ))
}

/// Principal eigenvalue of a domain with one bottleneck.
pub fn eigen_bottleneck(composite_tau: f64) -> Result<f64> {
    positive("tau", composite_tau)?;
    Ok(1.0 / composite_tau)
}

/// Sum of independent effluxes through several bottlenecks.
pub fn eigen_multi(taus: &[f64]) -> Result<f64> {
    if taus.is_empty() {
        return Err(NetError::InvalidParameter("empty list".into()));
    }
    taus.iter().map(|&t| eigen_bottleneck(t)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DumbbellRates {
    pub rate_12: f64,
    pub rate_21: f64,
    /// rate_12 + rate_21.
    pub eigenvalue: f64,
    pub extrapolated: bool,
}

/// 1/rate = sqrt(2) (Rc/a)^(3/2) |Omega|/(Rc D) + L^2/(4D) + |Omega| L/(pi a^2 D) per side.
pub fn dumbbell_rates(spec: &DumbbellSpec) -> Result<DumbbellRates> {
    spec.validate()?;
    let inv = |vol: f64, rc: f64| {
        std::f64::consts::SQRT_2 * (rc / spec.a).powf(1.5) * vol / (rc * spec.d)
            + spec.len * spec.len / (4.0 * spec.d)
            + vol * spec.len / (PI * spec.a * spec.a * spec.d)
    };
    let rate_12 = 1.0 / inv(spec.omega1_vol, spec.rc1);
    let rate_21 = 1.0 / inv(spec.omega3_vol, spec.rc3);
    Ok(DumbbellRates {
        rate_12,
        rate_21,
        eigenvalue: rate_12 + rate_21,
        extrapolated: !spec.is_asymptotic_regime(REGIME_THRESHOLD),
    })
}

/// Mean time for a needle to turn around in a strip slightly wider than it.
/// The echo carries `half_turn`, the one-way time, half of `tau`.
pub fn needle_turnaround(spec: &NeedleStripSpec) -> Result<NetPrediction> {
    spec.validate()?;
    let tau = PI * (0.5 * PI - 1.0) / (spec.dr * (spec.l0 * (spec.l0 - spec.l)).sqrt()) * (spec.dx / spec.dr).sqrt();
    Ok(NetPrediction::new(
        FormulaId::NeedleTurnaround,
        tau,
        spec.eps(),
        "leading order in (l0 - l)/l0; full turn is twice the one-way time",
        &[
            ("l0", spec.l0),
            ("l", spec.l),
            ("DX", spec.dx),
            ("DY", spec.dy),
            ("Dr", spec.dr),
            ("half_turn", 0.5 * tau),
            ("small_parameter", spec.eps()),
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn window_formulas() {
        let p = net_2d_window(PI, 2.0 * PI, 2.0 / std::f64::consts::E, 1.0).unwrap();
        assert!(close(p.tau, 1.0, 1e-14));
        assert_eq!(net_2d_window(PI, 2.0 * PI, 2.0, 1.0).unwrap().tau, 0.0);
        assert!(net_2d_window(PI, 2.0 * PI, 2.5, 1.0).is_err());
        let half = net_2d_window(PI, 2.0 * PI, 0.01, 2.0).unwrap().tau;
        assert!(close(2.0 * half, net_2d_window(PI, 2.0 * PI, 0.01, 1.0).unwrap().tau, 1e-14));
        assert!(close(net_3d_window(1.0, 0.01, 1.0, 0.0, 0.0).unwrap().tau, 25.0, 1e-14));
        let t = net_3d_window(1.0, 0.01, 1.0, 1.0, 1.0).unwrap().tau;
        assert!(close(t, 25.0 / (1.0 + 0.01 * 0.01f64.ln() / PI), 1e-14));
        assert!((t - 25.37).abs() < 5e-3);
    }

    #[test]
    fn planar_examples() {
        let s = PlanarFunnelSpec::symmetric(0.01, 1.0, 1.0);
        let p = net_2d_funnel(&s, 1.0).unwrap();
        assert_eq!(p.formula_id, FormulaId::PlanarFunnelSymmetric);
        assert!(close(p.tau, PI / 0.2, 1e-14));
        let mut g = s;
        g.rc_lower = 3.0;
        let p = net_2d_funnel(&g, 1.0).unwrap();
        assert_eq!(p.formula_id, FormulaId::PlanarFunnelGeneral);
        assert!(close(p.tau, (4.0f64 / 0.06).sqrt() * PI / 2.0, 1e-14));
        let mut m = s;
        m.nu_plus = 2.0;
        assert!(matches!(net_2d_funnel(&m, 1.0), Err(NetError::Unsupported(_))));
    }

    #[test]
    fn multi_neck_examples() {
        let (p, e) = net_2d_multi_neck(&[(0.01, 1.0), (0.04, 1.0)], 1.0, 1.0).unwrap();
        assert!(close(e.probs[0], 1.0 / 3.0, 1e-14) && close(e.probs[1], 2.0 / 3.0, 1e-14));
        assert!(close(p.tau, PI / (2.0 * 0.3), 1e-14));
        let (_, e) = net_3d_multi_neck(&[(0.01, 1.0), (0.04, 1.0)], 1.0, 1.0).unwrap();
        assert!(close(e.probs[0], 1.0 / 9.0, 1e-14) && close(e.probs[1], 8.0 / 9.0, 1e-14));
        assert!(net_2d_multi_neck(&[], 1.0, 1.0).is_err());
    }

    #[test]
    fn solid_and_surface_examples() {
        assert!(close(net_3d_funnel(1.0, 1.0, 0.01, 1.0).unwrap().tau, 1000.0 / 2f64.sqrt(), 1e-14));
        assert!(close(net_surface(1.0, 0.02, 1.0, 1.0, 1.0).unwrap().tau, 2.5, 1e-14));
        let sc = net_sphere_cap(1.0, 0.5 * PI, 0.02, 1.0).unwrap();
        assert!(close(sc.tau, 2.0 * ((0.25 * PI).sin() / 0.01f64.sin()).ln(), 1e-14));
        assert!((sc.tau - 8.518).abs() < 1e-3);
        assert_eq!(net_sphere_cap(1.0, 0.3, 0.3, 1.0).unwrap().tau, 0.0);
        assert!(net_sphere_cap(1.0, 0.2, 0.3, 1.0).is_err());
        let cyl = net_surface_with_cylinder(1.0, 0.02, 1.0, 1.0, 1.0, 1.0).unwrap().tau;
        assert!(close(cyl, 2.5 + 1.0 / (0.04 * PI) + 0.5, 1e-14));
        assert!((cyl - 10.958).abs() < 1e-3);
        assert!(matches!(net_surface(1.0, 0.02, 1.0, 0.0, 1.0), Err(NetError::Unsupported(_))));
    }

    #[test]
    fn cone_examples() {
        let t = net_cone(1.0, 0.01, 1.0, 1.0, 1.0, 0.0).unwrap().tau;
        let expect = 2f64.sqrt() / (2.0 * PI) * 100f64.ln() + 100f64.ln();
        assert!(close(t, expect, 1e-14));
        assert!((t - 5.642).abs() < 1e-3);
        let t10 = net_cone(1.0, 0.001, 1.0, 1.0, 1.0, 0.0).unwrap().tau;
        assert!(close(t10 - t, (2f64.sqrt() / (2.0 * PI) + 1.0) * 10f64.ln(), 1e-12));
    }

    #[test]
    fn full_cone_matches_cylinder_for_shallow_slope() {
        // C L'/a = 0.01
        let (s, a, l) = (1.0, 0.02, 1.0);
        let c = 0.01 * a / l;
        let head = net_surface(s, a, 1.0, 1.0, 1.0).unwrap().tau;
        let cone = net_cone(s, a, c, l, 1.0, head).unwrap();
        assert_eq!(cone.formula_id, FormulaId::SurfaceConeFull);
        let cyl = net_surface_with_cylinder(s, a, 1.0, 1.0, l, 1.0).unwrap().tau;
        assert!(close(cone.tau, cyl, 1e-2), "{} vs {cyl}", cone.tau);
    }

    #[test]
    fn composite_and_eigen() {
        let spec = CompositeSpec { head_volume: 1.0, neck_radius: 0.005, neck_len: 1.0, head_funnel: None, dim: 2 };
        let p = net_composite(10.0, &spec, 1.0).unwrap();
        assert!(close(p.tau, 110.5, 1e-14));
        assert!(close(eigen_bottleneck(110.5).unwrap(), 0.009050, 1e-4));
        assert!(close(eigen_multi(&[5.0, 5.0]).unwrap(), 0.4, 1e-15));
        let zero = CompositeSpec { neck_len: 0.0, ..spec };
        assert_eq!(net_composite(10.0, &zero, 1.0).unwrap().tau, 10.0);
    }

    #[test]
    fn dumbbell_example() {
        let s = DumbbellSpec { omega1_vol: 1.0, omega3_vol: 1.0, rc1: 1.0, rc3: 1.0, a: 0.01, len: 1.0, d: 1.0 };
        let r = dumbbell_rates(&s).unwrap();
        let inv = 2f64.sqrt() * 1000.0 + 0.25 + 1.0 / (PI * 1e-4);
        assert!(close(1.0 / r.rate_12, inv, 1e-14));
        assert_eq!(r.rate_12, r.rate_21);
        assert_eq!(r.eigenvalue, r.rate_12 + r.rate_21);
    }

    #[test]
    fn needle_example() {
        let n = NeedleStripSpec { l0: 1.0, l: 0.99, dx: 1.0, dy: 1.0, dr: 1.0 };
        let p = needle_turnaround(&n).unwrap();
        assert!(close(p.tau, PI * (0.5 * PI - 1.0) / 0.1, 1e-12));
        assert!((p.tau - 17.933).abs() < 1e-3);
        assert_eq!(p.inputs_echo["half_turn"], 0.5 * p.tau);
    }

    #[test]
    fn formula_ids_round_trip() {
        for f in FormulaId::ALL {
            assert_eq!(f.as_str().parse::<FormulaId>().unwrap(), f);
            let json = serde_json::to_string(&f).unwrap();
            assert_eq!(json, format!("\"{}\"", f.as_str()));
        }
    }
}
