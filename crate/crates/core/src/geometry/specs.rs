//! Parameter sets describing the domain families.

use serde::{Deserialize, Serialize};

use crate::error::{require, Result};
use crate::geometry::revolution::ProfileConfig;

/// Planar funnel: two walls approaching to a gap of width `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarFunnelSpec {
    pub eps: f64,
    #[serde(rename = "Rc")]
    pub rc_upper: f64,
    #[serde(rename = "rc")]
    pub rc_lower: f64,
    #[serde(default = "one")]
    pub nu_plus: f64,
    #[serde(default = "one")]
    pub nu_minus: f64,
    pub ell_plus: f64,
    pub ell_minus: f64,
    pub area: f64,
    pub boundary_len: f64,
}

fn one() -> f64 {
    1.0
}

impl PlanarFunnelSpec {
    /// Symmetric circular funnel: both walls of radius `rc`, ell = rc.
    pub fn symmetric(eps: f64, rc: f64, area: f64) -> Self {
        let boundary_len = 2.0 * (std::f64::consts::PI * area).sqrt();
        PlanarFunnelSpec {
            eps,
            rc_upper: rc,
            rc_lower: rc,
            nu_plus: 1.0,
            nu_minus: 1.0,
            ell_plus: rc,
            ell_minus: rc,
            area,
            boundary_len,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require(self.eps > 0.0, || "eps must be positive".into())?;
        require(self.rc_upper > 0.0 && self.rc_lower > 0.0, || "Rc and rc must be positive".into())?;
        require(self.ell_plus > 0.0 && self.ell_minus > 0.0, || "ell must be positive".into())?;
        require(self.nu_plus > 0.0 && self.nu_minus > 0.0, || "nu must be positive".into())?;
        require(self.area > 0.0, || "area must be positive".into())?;
        require(self.boundary_len > 0.0, || "boundary_len must be positive".into())?;
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.nu_plus == self.nu_minus && self.rc_upper == self.rc_lower && self.ell_plus == self.ell_minus
    }

    /// eps small compared with every other length of the funnel.
    pub fn is_asymptotic_regime(&self, ratio_threshold: f64) -> bool {
        self.regime_ratio() < ratio_threshold
    }

    pub fn regime_ratio(&self) -> f64 {
        self.eps / self.boundary_len.min(self.rc_upper).min(self.rc_lower)
    }

    /// Lengths in units of ell_plus, area in units of ell_plus^2.
    pub fn nondimensionalize(&self) -> (PlanarFunnelSpec, f64) {
        let s = self.ell_plus;
        (self.scaled(1.0 / s), s)
    }

    pub fn redimensionalize(&self, scale: f64) -> PlanarFunnelSpec {
        self.scaled(scale)
    }

    fn scaled(&self, k: f64) -> PlanarFunnelSpec {
        PlanarFunnelSpec {
            eps: self.eps * k,
            rc_upper: self.rc_upper * k,
            rc_lower: self.rc_lower * k,
            nu_plus: self.nu_plus,
            nu_minus: self.nu_minus,
            ell_plus: self.ell_plus * k,
            ell_minus: self.ell_minus * k,
            area: self.area * k * k,
            boundary_len: self.boundary_len * k,
        }
    }
}

/// Head attached to its absorbing window through a straight neck.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeSpec {
    pub head_volume: f64,
    pub neck_radius: f64,
    pub neck_len: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head_funnel: Option<HeadFunnel>,
    pub dim: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HeadFunnel {
    Planar(PlanarFunnelSpec),
    Revolution(ProfileConfig),
}

impl CompositeSpec {
    pub fn validate(&self) -> Result<()> {
        require(self.neck_len >= 0.0, || "neck_len must be non-negative".into())?;
        require(self.neck_radius > 0.0, || "neck_radius must be positive".into())?;
        require(self.head_volume > 0.0, || "head_volume must be positive".into())?;
        require(self.dim == 2 || self.dim == 3, || "dim must be 2 or 3".into())?;
        Ok(())
    }

    /// 2a in the plane, pi a^2 in space.
    pub fn window_measure(&self) -> f64 {
        if self.dim == 2 {
            2.0 * self.neck_radius
        } else {
            std::f64::consts::PI * self.neck_radius * self.neck_radius
        }
    }
}

/// Two compartments joined by a neck of radius `a` and length `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DumbbellSpec {
    pub omega1_vol: f64,
    pub omega3_vol: f64,
    #[serde(rename = "Rc1")]
    pub rc1: f64,
    #[serde(rename = "Rc3")]
    pub rc3: f64,
    pub a: f64,
    #[serde(rename = "L")]
    pub len: f64,
    #[serde(rename = "D")]
    pub d: f64,
}

impl DumbbellSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega1_vol", self.omega1_vol),
            ("omega3_vol", self.omega3_vol),
            ("Rc1", self.rc1),
            ("Rc3", self.rc3),
            ("a", self.a),
            ("L", self.len),
            ("D", self.d),
        ] {
            require(v > 0.0, || format!("{name} must be positive"))?;
        }
        Ok(())
    }

    pub fn is_asymptotic_regime(&self, ratio_threshold: f64) -> bool {
        self.a / self.rc1.min(self.rc3) < ratio_threshold
    }
}

/// Needle of length `l` in a strip of width `l0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeedleStripSpec {
    pub l0: f64,
    pub l: f64,
    #[serde(rename = "DX")]
    pub dx: f64,
    #[serde(rename = "DY")]
    pub dy: f64,
    #[serde(rename = "Dr")]
    pub dr: f64,
}

impl NeedleStripSpec {
    pub fn validate(&self) -> Result<()> {
        require(self.l > 0.0 && self.l < self.l0, || "need 0 < l < l0".into())?;
        require(self.dx >= self.dy && self.dy > 0.0, || "need DX >= DY > 0".into())?;
        require(self.dr > 0.0, || "Dr must be positive".into())?;
        Ok(())
    }

    /// (l0 - l) / l0.
    pub fn eps(&self) -> f64 {
        (self.l0 - self.l) / self.l0
    }

    /// Half-width in y of the admissible strip at angle theta.
    pub fn half_width(&self, theta: f64) -> f64 {
        0.5 * (self.l0 - self.l * theta.sin().abs())
    }
}

/// |y| < (l0 - l sin(theta)) / 2.
pub fn needle_contains(theta: f64, y: f64, spec: &NeedleStripSpec) -> bool {
    y.abs() < 0.5 * (spec.l0 - spec.l * theta.sin())
}
