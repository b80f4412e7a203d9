use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::config::ParamValue;
use crate::asymptotics::{self as asy, FormulaId, NetPrediction};
use crate::boundary_layer::drift_field;
use crate::error::{NetError, Result};
use crate::geometry::planar::MultiNeckRegion;
use crate::geometry::{
    AbsorbingBall, CompositeSpec, DumbbellSpec, NeedleStripSpec, PlanarFunnel, PlanarFunnelSpec, RevolutionProfile,
    SolidOfRevolution,
};
use crate::mc_engine::{self, FptEstimate, SimParams, Start};

/// Experiment families the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Disk,
    Ball,
    Window2d,
    Window3d,
    PlanarFunnel,
    PlanarMultiNeck,
    SolidFunnel,
    SolidMultiNeck,
    SurfaceFunnel,
    SurfaceFunnelCircular,
    SphereCap,
    SurfaceWithCylinder,
    SurfaceCone,
    Composite,
    Dumbbell,
    Needle,
}

const NAMES: [(Case, &str); 16] = [
    (Case::Disk, "disk"),
    (Case::Ball, "ball"),
    (Case::Window2d, "window_2d"),
    (Case::Window3d, "window_3d"),
    (Case::PlanarFunnel, "planar_funnel"),
    (Case::PlanarMultiNeck, "planar_multi_neck"),
    (Case::SolidFunnel, "solid_funnel"),
    (Case::SolidMultiNeck, "solid_multi_neck"),
    (Case::SurfaceFunnel, "surface_funnel"),
    (Case::SurfaceFunnelCircular, "surface_funnel_circular"),
    (Case::SphereCap, "sphere_cap"),
    (Case::SurfaceWithCylinder, "surface_with_cylinder"),
    (Case::SurfaceCone, "surface_cone"),
    (Case::Composite, "composite"),
    (Case::Dumbbell, "dumbbell"),
    (Case::Needle, "needle"),
];

impl Case {
    pub fn all() -> impl Iterator<Item = Case> {
        NAMES.iter().map(|(c, _)| *c)
    }

    pub fn name(&self) -> &'static str {
        NAMES.iter().find(|(c, _)| c == self).unwrap().1
    }

    /// Case a formula id belongs to.
    pub fn for_formula(f: FormulaId) -> Case {
        match f {
            FormulaId::Net2dWindow => Case::Window2d,
            FormulaId::Net3dWindow => Case::Window3d,
            FormulaId::PlanarFunnelGeneral | FormulaId::PlanarFunnelSymmetric | FormulaId::PlanarFunnelPower => {
                Case::PlanarFunnel
            }
            FormulaId::PlanarMultiNeck => Case::PlanarMultiNeck,
            FormulaId::SolidFunnel => Case::SolidFunnel,
            FormulaId::SolidMultiNeck => Case::SolidMultiNeck,
            FormulaId::SurfaceFunnel => Case::SurfaceFunnel,
            FormulaId::SurfaceFunnelCircular => Case::SurfaceFunnelCircular,
            FormulaId::SphereCap => Case::SphereCap,
            FormulaId::SurfaceWithCylinder => Case::SurfaceWithCylinder,
            FormulaId::SurfaceCone | FormulaId::SurfaceConeFull => Case::SurfaceCone,
            FormulaId::CompositeNeck => Case::Composite,
            FormulaId::Dumbbell => Case::Dumbbell,
            FormulaId::NeedleTurnaround => Case::Needle,
        }
    }

    pub fn has_simulator(&self) -> bool {
        !matches!(
            self,
            Case::Window2d | Case::Window3d | Case::SolidMultiNeck | Case::SurfaceCone | Case::Composite | Case::Dumbbell
        )
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Case {
    type Err = NetError;
    fn from_str(s: &str) -> Result<Case> {
        if let Some((c, _)) = NAMES.iter().find(|(_, n)| n.eq_ignore_ascii_case(s)) {
            return Ok(*c);
        }
        s.parse::<FormulaId>()
            .map(Case::for_formula)
            .map_err(|_| NetError::Config(format!("unknown case '{s}'")))
    }
}

/// Typed access to the parameter table.
pub struct Params<'a>(pub &'a BTreeMap<String, ParamValue>);

impl Params<'_> {
    pub fn opt(&self, key: &str) -> Result<Option<f64>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(ParamValue::Num(v)) => Ok(Some(*v)),
            Some(ParamValue::List(_)) => Err(NetError::Config(format!("parameter '{key}' must be a number"))),
        }
    }

    pub fn num(&self, key: &str) -> Result<f64> {
        self.opt(key)?.ok_or_else(|| NetError::Config(format!("missing parameter '{key}'")))
    }

    pub fn or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.opt(key)?.unwrap_or(default))
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        match self.0.get(key) {
            Some(ParamValue::List(v)) => Ok(v.clone()),
            Some(ParamValue::Num(v)) => Ok(vec![*v]),
            None => Err(NetError::Config(format!("missing parameter '{key}'"))),
        }
    }

    fn pairs(&self, a: &str, b: &str) -> Result<Vec<(f64, f64)>> {
        let (x, y) = (self.list(a)?, self.list(b)?);
        if x.len() != y.len() {
            return Err(NetError::Config(format!("'{a}' and '{b}' differ in length")));
        }
        Ok(x.into_iter().zip(y).collect())
    }

    fn planar_spec(&self) -> Result<PlanarFunnelSpec> {
        let rc_upper = self.num("Rc")?;
        let ell_plus = self.or("ell_plus", 1.0)?;
        let area = self.num("area")?;
        // default: perimeter of the disk with the same area
        let boundary_len = self.or("boundary_len", 2.0 * (std::f64::consts::PI * area.max(0.0)).sqrt())?;
        Ok(PlanarFunnelSpec {
            eps: self.num("eps")?,
            rc_upper,
            rc_lower: self.or("rc", rc_upper)?,
            nu_plus: self.or("nu_plus", 1.0)?,
            nu_minus: self.or("nu_minus", 1.0)?,
            ell_plus,
            ell_minus: self.or("ell_minus", ell_plus)?,
            area,
            boundary_len,
        })
    }

    fn funnel_profile(&self) -> Result<RevolutionProfile> {
        RevolutionProfile::funnel(
            self.num("a")?,
            self.or("ell", 1.0)?,
            self.or("nu", 1.0)?,
            self.or("head_radius", 1.0)?,
        )
    }

    fn needle(&self) -> Result<NeedleStripSpec> {
        let dx = self.or("DX", 1.0)?;
        Ok(NeedleStripSpec { l0: self.num("l0")?, l: self.num("l")?, dx, dy: self.or("DY", dx)?, dr: self.or("Dr", 1.0)? })
    }
}

/// Prediction for one parameter set: formula label, value, small parameter,
/// and the full record when a library formula produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CasePrediction {
    pub formula_id: String,
    pub tau: f64,
    pub epsilon_like: Option<f64>,
    pub prediction: Option<NetPrediction>,
}

impl From<NetPrediction> for CasePrediction {
    fn from(p: NetPrediction) -> Self {
        CasePrediction {
            formula_id: p.formula_id.to_string(),
            tau: p.tau,
            epsilon_like: p.small_parameter(),
            prediction: Some(p),
        }
    }
}

fn exact(label: &str, tau: f64) -> CasePrediction {
    CasePrediction { formula_id: label.to_string(), tau, epsilon_like: None, prediction: None }
}

pub fn predict_case(case: Case, params: &BTreeMap<String, ParamValue>) -> Result<CasePrediction> {
    let p = Params(params);
    let d = p.or("D", 1.0)?;
    Ok(match case {
        Case::Disk => {
            let (r, r0) = (p.or("R", 1.0)?, p.or("r0", 0.0)?);
            exact("EXACT_DISK", (r * r - r0 * r0) / (4.0 * d))
        }
        Case::Ball => {
            let (r, r0) = (p.or("R", 1.0)?, p.or("r0", 0.0)?);
            exact("EXACT_BALL", (r * r - r0 * r0) / (6.0 * d))
        }
        Case::Window2d => asy::net_2d_window(p.num("area")?, p.num("boundary_len")?, p.num("window_len")?, d)?.into(),
        Case::Window3d => {
            asy::net_3d_window(p.num("volume")?, p.num("a")?, d, p.or("L", 0.0)?, p.or("N", 0.0)?)?.into()
        }
        Case::PlanarFunnel => asy::net_2d_funnel(&p.planar_spec()?, d)?.into(),
        Case::PlanarMultiNeck => {
            let region = multi_neck(&p)?;
            let area = match p.opt("area")? {
                Some(a) => a,
                None => region.region.area()?,
            };
            asy::net_2d_multi_neck(&p.pairs("eps", "ell")?, area, d)?.0.into()
        }
        Case::SolidFunnel => {
            let prof = p.funnel_profile()?;
            let volume = match p.opt("volume")? {
                Some(v) => v,
                None => prof.volume()?,
            };
            asy::net_3d_funnel(volume, prof.ell, prof.a, d)?.into()
        }
        Case::SolidMultiNeck => asy::net_3d_multi_neck(&p.pairs("a", "ell")?, p.num("volume")?, d)?.0.into(),
        Case::SurfaceFunnel | Case::SurfaceFunnelCircular => {
            let (s, a, ell, nu) = match p.opt("S")? {
                Some(s) => (s, p.num("a")?, p.or("ell", 1.0)?, p.or("nu", 1.0)?),
                None => {
                    let prof = p.funnel_profile()?;
                    (prof.total_area(), prof.a, prof.ell, prof.nu)
                }
            };
            if case == Case::SurfaceFunnel {
                asy::net_surface(s, a, ell, nu, d)?.into()
            } else {
                asy::net_surface_circular(s, a, ell, d)?.into()
            }
        }
        Case::SphereCap => asy::net_sphere_cap(p.or("R", 1.0)?, p.or("theta", PI)?, p.num("delta")?, d)?.into(),
        Case::SurfaceWithCylinder => {
            let s = match p.opt("S")? {
                Some(s) => s,
                None => p.funnel_profile()?.total_area(),
            };
            asy::net_surface_with_cylinder(s, p.num("a")?, p.or("ell", 1.0)?, p.or("nu", 1.0)?, p.num("L")?, d)?.into()
        }
        Case::SurfaceCone => {
            let args = (p.num("S")?, p.num("a")?, p.num("C")?, p.num("L")?, d, p.or("head", 0.0)?);
            if p.or("full", 0.0)? != 0.0 {
                asy::net_cone_full(args.0, args.1, args.2, args.3, args.4, args.5)?.into()
            } else {
                asy::net_cone(args.0, args.1, args.2, args.3, args.4, args.5)?.into()
            }
        }
        Case::Composite => {
            let spec = CompositeSpec {
                head_volume: p.num("head_volume")?,
                neck_radius: p.num("neck_radius")?,
                neck_len: p.num("neck_len")?,
                head_funnel: None,
                dim: p.or("dim", 2.0)? as u8,
            };
            asy::net_composite(p.num("head_tau")?, &spec, d)?.into()
        }
        Case::Dumbbell => {
            let spec = DumbbellSpec {
                omega1_vol: p.num("omega1_vol")?,
                omega3_vol: p.num("omega3_vol")?,
                rc1: p.num("Rc1")?,
                rc3: p.num("Rc3")?,
                a: p.num("a")?,
                len: p.num("L")?,
                d,
            };
            let r = asy::dumbbell_rates(&spec)?;
            CasePrediction {
                formula_id: FormulaId::Dumbbell.to_string(),
                tau: 1.0 / r.eigenvalue,
                epsilon_like: Some(spec.a / spec.rc1.min(spec.rc3)),
                prediction: None,
            }
        }
        Case::Needle => asy::needle_turnaround(&p.needle()?)?.into(),
    })
}

fn multi_neck(p: &Params) -> Result<MultiNeckRegion> {
    MultiNeckRegion::new(&p.pairs("eps", "ell")?, p.or("head_radius", 1.5)?, p.or("chord", 1.0)?)
}

/// Monte Carlo estimate, plus exit probabilities for multi-window cases.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSimulation {
    pub estimate: FptEstimate,
    pub exit_probs: Option<mc_engine::ExitProbEstimate>,
}

pub fn simulate_case(case: Case, params: &BTreeMap<String, ParamValue>, sim: &SimParams) -> Result<CaseSimulation> {
    let p = Params(params);
    let d = p.or("D", 1.0)?;
    let plain = |estimate| CaseSimulation { estimate, exit_probs: None };
    let surface = |prof: RevolutionProfile, start: f64| -> Result<CaseSimulation> {
        let field = drift_field(&prof, d, p.or("n_samples", 4001.0)? as usize)?;
        mc_engine::simulate_surface_1d(&field, start, sim).map(plain)
    };
    match case {
        Case::Disk => {
            let disk = AbsorbingBall::<2> { center: [0.0; 2], radius: p.or("R", 1.0)? };
            mc_engine::simulate_mfpt_2d(&disk, &Start::Point([p.or("r0", 0.0)?, 0.0]), d, sim).map(plain)
        }
        Case::Ball => {
            let ball = AbsorbingBall::<3> { center: [0.0; 3], radius: p.or("R", 1.0)? };
            mc_engine::simulate_mfpt_3d(&ball, &Start::Point([p.or("r0", 0.0)?, 0.0, 0.0]), d, sim).map(plain)
        }
        Case::PlanarFunnel => {
            let f = PlanarFunnel::realize(&p.planar_spec()?)?;
            let start = Start::Ball { center: f.head_center, radius: p.or("start_frac", 0.5)? * f.head_radius };
            mc_engine::simulate_mfpt_2d(&f.region, &start, d, sim).map(plain)
        }
        Case::PlanarMultiNeck => {
            let r = multi_neck(&p)?;
            let (probs, estimate) = mc_engine::simulate_exit_probs(&r.region, &Start::Point(r.head_center), d, sim)?;
            Ok(CaseSimulation { estimate, exit_probs: Some(probs) })
        }
        Case::SolidFunnel => {
            let prof = p.funnel_profile()?;
            // the head sphere is centred one radius below the top
            let centre = -p.or("head_radius", 1.0)?;
            let solid = SolidOfRevolution::new(prof);
            mc_engine::simulate_mfpt_3d(&solid, &Start::Point([centre, 0.0, 0.0]), d, sim).map(plain)
        }
        Case::SurfaceFunnel | Case::SurfaceFunnelCircular => surface(p.funnel_profile()?, 0.0),
        Case::SphereCap => {
            let r = p.or("R", 1.0)?;
            let theta = p.or("theta", PI)?;
            let prof = RevolutionProfile::sphere_cap(r, p.num("delta")?)?;
            surface(prof, (-r * (1.0 + theta.cos())).min(0.0))
        }
        Case::SurfaceWithCylinder => surface(p.funnel_profile()?.with_cylinder(p.num("L")?)?, 0.0),
        Case::Needle => {
            let start = [p.or("theta", 0.0)?, p.or("y", 0.0)?];
            mc_engine::simulate_needle(&p.needle()?, start, sim).map(plain)
        }
        other => Err(NetError::Unsupported(format!("case '{other}' has no simulator"))),
    }
}
