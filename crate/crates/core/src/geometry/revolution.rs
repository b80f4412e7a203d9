//! Generating curves r(x) of surfaces and solids of revolution.
//!
//! The axis runs along x. The absorbing end sits at the most negative
//! coordinate, the reflecting top at x = 0 (a pole when r(0) = 0).
//! Profiles are built from analytic pieces so that r, r', r'' and the
//! squared radius q = r^2 are available in closed form; near a pole the
//! q-form stays finite where r' does not.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require, NetError, Result};
use crate::numerics;

const QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// q = R^2 - (x - c)^2: a sphere centred on the axis.
    AxisArc { x0: f64, x1: f64, center: f64, radius: f64 },
    /// r = cr + sign * sqrt(R^2 - (x - cx)^2): a torus section.
    OffsetArc { x0: f64, x1: f64, cx: f64, cr: f64, radius: f64, sign: f64 },
    /// r = base + coef * (x - origin)^power.
    Power { x0: f64, x1: f64, origin: f64, base: f64, coef: f64, power: f64 },
    /// r = base + slope * (x - origin).
    Line { x0: f64, x1: f64, origin: f64, base: f64, slope: f64 },
}

/// Radius, its first two derivatives and the same for q = r^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub r: f64,
    pub dr: f64,
    pub d2r: f64,
    pub q: f64,
    pub dq: f64,
    pub d2q: f64,
}

impl Jet {
    fn from_r(r: f64, dr: f64, d2r: f64) -> Jet {
        Jet { r, dr, d2r, q: r * r, dq: 2.0 * r * dr, d2q: 2.0 * (dr * dr + r * d2r) }
    }

    fn from_q(q: f64, dq: f64, d2q: f64) -> Jet {
        let q = q.max(0.0);
        let r = q.sqrt();
        let dr = dq / (2.0 * r);
        let d2r = (2.0 * q * d2q - dq * dq) / (4.0 * q * r);
        Jet { r, dr, d2r, q, dq, d2q }
    }

    /// Line element of the generating curve times r: r * sqrt(1 + r'^2).
    pub fn arc(&self) -> f64 {
        (self.q + 0.25 * self.dq * self.dq).sqrt()
    }

    /// sqrt(1 + r'^2) / r.
    pub fn metric(&self) -> f64 {
        self.arc() / self.q
    }

    /// 1 / (1 + r'^2), finite at poles.
    pub fn inv_stretch(&self) -> f64 {
        self.q / (self.q + 0.25 * self.dq * self.dq)
    }

    /// r'/(r(1+r'^2)) - r'r''/(1+r'^2)^2 written through q.
    pub fn drift_shape(&self) -> f64 {
        let h = self.q + 0.25 * self.dq * self.dq;
        let first = 0.5 * self.dq / h;
        let second = 0.5 * self.dq * (0.5 * self.q * self.d2q - 0.25 * self.dq * self.dq) / (h * h);
        first - second
    }
}

impl Segment {
    pub fn range(&self) -> (f64, f64) {
        match *self {
            Segment::AxisArc { x0, x1, .. }
            | Segment::OffsetArc { x0, x1, .. }
            | Segment::Power { x0, x1, .. }
            | Segment::Line { x0, x1, .. } => (x0, x1),
        }
    }

    pub fn jet(&self, x: f64) -> Jet {
        match *self {
            Segment::AxisArc { center, radius, .. } => {
                let u = x - center;
                Jet::from_q(radius * radius - u * u, -2.0 * u, -2.0)
            }
            Segment::OffsetArc { cx, cr, radius, sign, .. } => {
                let u = x - cx;
                let w = (radius * radius - u * u).max(0.0).sqrt();
                let r = cr + sign * w;
                let dr = -sign * u / w;
                let d2r = -sign * radius * radius / (w * w * w);
                Jet::from_r(r, dr, d2r)
            }
            Segment::Power { origin, base, coef, power, .. } => {
                let s = (x - origin).max(0.0);
                let r = base + coef * s.powf(power);
                let dr = coef * power * s.powf(power - 1.0);
                let d2r = coef * power * (power - 1.0) * s.powf(power - 2.0);
                Jet::from_r(r, dr, d2r)
            }
            Segment::Line { origin, base, slope, .. } => Jet::from_r(base + slope * (x - origin), slope, 0.0),
        }
    }

    /// Integral of r sqrt(1+r'^2) over [lo, hi], closed form where one exists.
    fn arc_integral(&self, lo: f64, hi: f64) -> Result<f64> {
        match *self {
            Segment::AxisArc { radius, .. } => Ok(radius * (hi - lo)),
            Segment::OffsetArc { cx, cr, radius, sign, .. } => {
                let prim = |x: f64| {
                    let u = ((x - cx) / radius).clamp(-1.0, 1.0);
                    cr * radius * u.asin() + sign * radius * radius * u
                };
                Ok(prim(hi) - prim(lo))
            }
            Segment::Line { origin, base, slope, .. } => {
                let r = |x: f64| base + slope * (x - origin);
                Ok(0.5 * (r(lo) + r(hi)) * (hi - lo) * (1.0 + slope * slope).sqrt())
            }
            Segment::Power { .. } => numerics::integrate(|x| self.jet(x).arc(), lo, hi, QUAD_TOL),
        }
    }
}

/// How a profile was built; this is what configuration files store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileRecipe {
    /// Sphere of radius `R` with an absorbing cap of polar half-angle `delta`.
    SphereCap {
        #[serde(rename = "R")]
        radius: f64,
        delta: f64,
    },
    /// Funnel r = a + y^(1+nu)/(nu(1+nu) ell^nu) (nu = 1: circle of radius ell)
    /// closed by a sphere of radius `head_radius` tangent to it.
    Funnel { a: f64, ell: f64, nu: f64, head_radius: f64 },
    /// Straight cylinder of radius `a` and length `len`, flat reflecting top.
    Cylinder { a: f64, len: f64 },
}

/// Serializable description: recipe plus optional attachments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    #[serde(flatten)]
    pub recipe: ProfileRecipe,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cyl_len: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone_slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone_len: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevolutionProfile {
    segments: Vec<Segment>,
    /// Funnel end coordinate, where the head part begins.
    pub lambda: f64,
    /// Radius of the absorbing end.
    pub a: f64,
    pub ell: f64,
    pub nu: f64,
    pub cyl_len: Option<f64>,
    pub cone_slope: Option<f64>,
    config: ProfileConfig,
    cum_area: Vec<f64>,
}

impl RevolutionProfile {
    fn assemble(segments: Vec<Segment>, lambda: f64, a: f64, ell: f64, nu: f64, config: ProfileConfig) -> Result<Self> {
        let mut p = RevolutionProfile {
            segments,
            lambda,
            a,
            ell,
            nu,
            cyl_len: None,
            cone_slope: None,
            config,
            cum_area: Vec::new(),
        };
        p.refresh()?;
        Ok(p)
    }

    fn refresh(&mut self) -> Result<()> {
        // cum_area[i] = integral of the arc element from the start of segment i to x = 0
        let n = self.segments.len();
        let mut cum = vec![0.0; n + 1];
        for i in (0..n).rev() {
            let (x0, x1) = self.segments[i].range();
            cum[i] = cum[i + 1] + self.segments[i].arc_integral(x0, x1)?;
        }
        self.cum_area = cum;
        for s in &self.segments {
            let (x0, x1) = s.range();
            for k in 1..16 {
                let x = x0 + (x1 - x0) * k as f64 / 16.0;
                if !(s.jet(x).r > 0.0) {
                    return Err(NetError::Domain(format!("non-positive radius at x = {x}")));
                }
            }
        }
        Ok(())
    }

    pub fn from_config(c: &ProfileConfig) -> Result<Self> {
        let mut p = match c.recipe {
            ProfileRecipe::SphereCap { radius, delta } => Self::sphere_cap(radius, delta)?,
            ProfileRecipe::Funnel { a, ell, nu, head_radius } => Self::funnel(a, ell, nu, head_radius)?,
            ProfileRecipe::Cylinder { a, len } => Self::cylinder(a, len)?,
        };
        if let Some(l) = c.cyl_len {
            p = p.with_cylinder(l)?;
        }
        match (c.cone_slope, c.cone_len) {
            (Some(s), Some(l)) => p = p.with_cone(s, l)?,
            (None, None) => {}
            _ => return Err(NetError::Config("cone_slope and cone_len go together".into())),
        }
        Ok(p)
    }

    pub fn config(&self) -> &ProfileConfig {
        &self.config
    }

    /// Sphere of radius `radius`; the absorbing cap around the far pole has
    /// polar half-angle `delta`, so its rim has radius R sin(delta).
    pub fn sphere_cap(radius: f64, delta: f64) -> Result<Self> {
        require(radius > 0.0, || "sphere radius must be positive".into())?;
        require(delta > 0.0 && delta < PI, || "cap angle must lie in (0, pi)".into())?;
        let x0 = -radius * (1.0 + delta.cos());
        let seg = Segment::AxisArc { x0, x1: 0.0, center: -radius, radius };
        let config = ProfileConfig {
            recipe: ProfileRecipe::SphereCap { radius, delta },
            cyl_len: None,
            cone_slope: None,
            cone_len: None,
        };
        Self::assemble(vec![seg], x0, radius * delta.sin(), radius, 0.0, config)
    }

    /// Funnel of neck radius `a` closed by a tangent head sphere.
    ///
    /// With y the height above the neck, the funnel wall is
    /// r = a + ell - sqrt(ell^2 - y^2) for nu = 1 and
    /// r = a + y^(1+nu)/(nu(1+nu) ell^nu) otherwise.
    pub fn funnel(a: f64, ell: f64, nu: f64, head_radius: f64) -> Result<Self> {
        require(a > 0.0 && ell > 0.0, || "funnel needs a > 0 and ell > 0".into())?;
        require(nu > 0.0, || "funnel exponent must be positive".into())?;
        require(head_radius > a, || "head radius must exceed the neck radius".into())?;
        let w = if nu == 1.0 {
                Segment::OffsetArc { x0: 0.0, x1: 0.0, cx: 0.0, cr: a + ell, radius: ell, sign: -1.0 }
            } else {
                Segment::Power {
                    x0: 0.0,
                    x1: 0.0,
                    origin: 0.0,
                    base: a,
                    coef: 1.0 / (nu * (1.0 + nu) * ell.powf(nu)),
                    power: 1.0 + nu,
                }
        };
        // an axis-centred sphere through (y, r) with slope r' there has radius r sqrt(1 + r'^2)
        let mut hi = if nu == 1.0 { ell * (1.0 - 1e-12) } else { ell };
        while w.jet(hi).arc() < head_radius {
            if nu == 1.0 {
                return Err(NetError::Domain("head sphere cannot touch the funnel wall".into()));
            }
            hi *= 2.0;
            if hi > 1e12 {
                return Err(NetError::Domain("tangent point not found".into()));
            }
        }
        let yj = numerics::bisect(|y| w.jet(y).arc() - head_radius, 0.0, hi, 1e-15 * hi.max(1.0))?;
        let jj = w.jet(yj);
        let yc = yj + jj.r * jj.dr;
        let top = yc + head_radius;
        let lambda = -top;
        let shift = |s: Segment, x0: f64, x1: f64| match s {
            Segment::OffsetArc { cx, cr, radius, sign, .. } => {
                Segment::OffsetArc { x0, x1, cx: cx + lambda, cr, radius, sign }
            }
            Segment::Power { origin, base, coef, power, .. } => {
                Segment::Power { x0, x1, origin: origin + lambda, base, coef, power }
            }
            other => other,
        };
        let funnel = shift(w, lambda, lambda + yj);
        // centre placed at -R exactly so that the top is a true pole
        let head = Segment::AxisArc { x0: lambda + yj, x1: 0.0, center: -head_radius, radius: head_radius };
        let config = ProfileConfig {
            recipe: ProfileRecipe::Funnel { a, ell, nu, head_radius },
            cyl_len: None,
            cone_slope: None,
            cone_len: None,
        };
        Self::assemble(vec![funnel, head], lambda, a, ell, nu, config)
    }

    pub fn cylinder(a: f64, len: f64) -> Result<Self> {
        require(a > 0.0 && len > 0.0, || "cylinder needs positive radius and length".into())?;
        let seg = Segment::Line { x0: -len, x1: 0.0, origin: 0.0, base: a, slope: 0.0 };
        let config = ProfileConfig {
            recipe: ProfileRecipe::Cylinder { a, len },
            cyl_len: None,
            cone_slope: None,
            cone_len: None,
        };
        Self::assemble(vec![seg], -len, a, a, 0.0, config)
    }

    /// Attach a cylinder of radius `a` and length `len` below the absorbing end.
    pub fn with_cylinder(&self, len: f64) -> Result<Self> {
        require(len >= 0.0, || "cylinder length must be non-negative".into())?;
        if len == 0.0 {
            return Ok(self.clone());
        }
        let xa = self.x_abs();
        let mut p = self.clone();
        p.segments.insert(0, Segment::Line { x0: xa - len, x1: xa, origin: xa, base: self.a, slope: 0.0 });
        p.cyl_len = Some(self.cyl_len.unwrap_or(0.0) + len);
        p.config.cyl_len = Some(self.config.cyl_len.unwrap_or(0.0) + len);
        p.refresh()?;
        Ok(p)
    }

    /// Attach a cone of slope `slope` and length `len` below the absorbing end;
    /// the new absorbing radius is a - slope * len.
    pub fn with_cone(&self, slope: f64, len: f64) -> Result<Self> {
        require(slope > 0.0 && len > 0.0, || "cone needs positive slope and length".into())?;
        let a_new = self.a - slope * len;
        if !(a_new > 0.0) {
            return Err(NetError::Domain(format!(
                "cone closes before reaching its length: a - C L' = {a_new}"
            )));
        }
        let xa = self.x_abs();
        let mut p = self.clone();
        p.segments.insert(0, Segment::Line { x0: xa - len, x1: xa, origin: xa - len, base: a_new, slope });
        p.a = a_new;
        p.cone_slope = Some(slope);
        p.config.cone_slope = Some(slope);
        p.config.cone_len = Some(len);
        p.refresh()?;
        Ok(p)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Coordinate of the absorbing end (Lambda minus attachments).
    pub fn x_abs(&self) -> f64 {
        self.segments[0].range().0
    }

    /// True when the profile closes on the axis at x = 0.
    pub fn has_pole(&self) -> bool {
        let j = self.jet(0.0);
        j.q.abs() <= 1e-14 * j.dq * j.dq
    }

    fn index(&self, x: f64) -> usize {
        self.segments
            .iter()
            .position(|s| x <= s.range().1)
            .unwrap_or(self.segments.len() - 1)
    }

    pub fn jet(&self, x: f64) -> Jet {
        self.segments[self.index(x)].jet(x)
    }

    pub fn r(&self, x: f64) -> f64 {
        self.jet(x).r
    }

    /// Segment boundaries from the absorbing end up to 0.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.segments.iter().map(|s| s.range().0).collect();
        v.push(0.0);
        v
    }

    /// Surface area above the cross-section at `t`.
    pub fn area_above(&self, t: f64) -> Result<f64> {
        let xa = self.x_abs();
        if t < xa - 1e-12 * xa.abs().max(1.0) || t > 0.0 {
            return Err(NetError::Domain(format!("t = {t} outside [{xa}, 0]")));
        }
        let i = self.index(t);
        let (_, x1) = self.segments[i].range();
        Ok(2.0 * PI * (self.cum_area[i + 1] + self.segments[i].arc_integral(t.max(xa), x1)?))
    }

    pub fn total_area(&self) -> f64 {
        2.0 * PI * self.cum_area[0]
    }

    /// Volume of the solid bounded by the surface and the end planes.
    pub fn volume(&self) -> Result<f64> {
        let mut v = 0.0;
        for s in &self.segments {
            let (x0, x1) = s.range();
            v += numerics::integrate(|x| s.jet(x).q, x0, x1, QUAD_TOL)?;
        }
        Ok(PI * v)
    }

    /// Largest relative deviation of r(Lambda + s) - a from
    /// s^(1+nu)/(nu(1+nu) ell^nu) over small heights s; zero for nu = 0.
    pub fn neck_expansion_error(&self) -> f64 {
        if self.nu <= 0.0 {
            return 0.0;
        }
        let a_neck = self.r(self.lambda);
        let mut worst = 0.0f64;
        for k in 1..=8 {
            let s = self.ell * 1e-3 * k as f64;
            let model = s.powf(1.0 + self.nu) / (self.nu * (1.0 + self.nu) * self.ell.powf(self.nu));
            let got = self.r(self.lambda + s) - a_neck;
            worst = worst.max(((got - model) / model).abs());
        }
        worst
    }
}

/// S(t) = 2 pi * integral_t^0 r sqrt(1 + r'^2) ds.
pub fn profile_area(p: &RevolutionProfile, t: f64) -> Result<f64> {
    p.area_above(t)
}
