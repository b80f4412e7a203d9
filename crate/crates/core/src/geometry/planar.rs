//! Planar regions as intersections of simple constraints.

use std::f64::consts::PI;

use crate::error::{NetError, Result};
use crate::geometry::specs::PlanarFunnelSpec;
use crate::geometry::{axpy, dot, mirror, Domain, StepOutcome, MAX_BOUNCES};
use crate::numerics;

pub type P2 = [f64; 2];

const T_TOL: f64 = 1e-12;
/// Sample count of walls given by a power law.
pub const WALL_SAMPLES: usize = 2048;

/// Wall x = x0 + side * g(y), g sampled on a uniform grid from y = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWall {
    pub x0: f64,
    /// +1: region left of the wall; -1: region right of it (wall at x0 - g).
    pub side: f64,
    pub dy: f64,
    pub g: Vec<f64>,
}

impl SampledWall {
    pub fn power_law(x0: f64, side: f64, nu: f64, ell: f64, y_max: f64) -> SampledWall {
        let dy = y_max / (WALL_SAMPLES - 1) as f64;
        let c = 1.0 / (nu * (1.0 + nu) * ell.powf(nu));
        let g = (0..WALL_SAMPLES).map(|k| c * (k as f64 * dy).powf(1.0 + nu)).collect();
        SampledWall { x0, side, dy, g }
    }

    fn offset(&self, y: f64) -> (f64, f64) {
        if y <= 0.0 {
            return (0.0, 0.0);
        }
        let k = (y / self.dy) as usize;
        if k + 1 >= self.g.len() {
            return (*self.g.last().unwrap(), 0.0);
        }
        let slope = (self.g[k + 1] - self.g[k]) / self.dy;
        (self.g[k] + slope * (y - k as f64 * self.dy), slope)
    }

    pub fn boundary_x(&self, y: f64) -> f64 {
        self.x0 + self.side * self.offset(y).0
    }

    fn phi(&self, p: &P2) -> f64 {
        self.side * (self.boundary_x(p[1]) - p[0])
    }

    fn exit_param(&self, p: &P2, d: &P2) -> Option<f64> {
        let y_top = self.dy * (self.g.len() - 1) as f64;
        let mut breaks = vec![0.0];
        if d[1] != 0.0 {
            let (ya, yb) = (p[1], p[1] + d[1]);
            let (lo, hi) = (ya.min(yb).max(0.0), ya.max(yb).min(y_top));
            if hi > lo {
                let k0 = (lo / self.dy).ceil() as usize;
                let k1 = (hi / self.dy).floor() as usize;
                for k in k0..=k1 {
                    let t = (k as f64 * self.dy - ya) / d[1];
                    if t > 0.0 && t < 1.0 {
                        breaks.push(t);
                    }
                }
                for y in [0.0, y_top] {
                    let t = (y - ya) / d[1];
                    if t > 0.0 && t < 1.0 {
                        breaks.push(t);
                    }
                }
            }
        }
        breaks.push(1.0);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let at = |t: f64| self.phi(&axpy(p, t, d));
        let mut ta = breaks[0];
        let mut fa = at(ta);
        for &tb in &breaks[1..] {
            if tb <= ta {
                continue;
            }
            let fb = at(tb);
            if fa > 0.0 && fb <= 0.0 {
                let t = ta + fa / (fa - fb) * (tb - ta);
                if t > T_TOL {
                    return Some(t);
                }
            }
            ta = tb;
            fa = fb;
        }
        None
    }

    fn normal(&self, h: &P2) -> P2 {
        let (_, slope) = self.offset(h[1]);
        let n = [-self.side, slope];
        let len = (1.0 + slope * slope).sqrt();
        [n[0] / len, n[1] / len]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    InsideCircle { center: P2, radius: f64 },
    OutsideCircle { center: P2, radius: f64 },
    /// {p : (p - origin) . normal > 0}, unit normal.
    HalfPlane { origin: P2, normal: P2 },
    Wall(SampledWall),
}

impl Shape {
    /// Positive inside, zero on the boundary.
    pub fn phi(&self, p: &P2) -> f64 {
        match self {
            Shape::InsideCircle { center, radius } => radius - dist(p, center),
            Shape::OutsideCircle { center, radius } => dist(p, center) - radius,
            Shape::HalfPlane { origin, normal } => (p[0] - origin[0]) * normal[0] + (p[1] - origin[1]) * normal[1],
            Shape::Wall(w) => w.phi(p),
        }
    }

    /// Approximate distance to the boundary curve.
    pub fn distance(&self, p: &P2) -> f64 {
        match self {
            Shape::Wall(w) => {
                let (_, s) = w.offset(p[1]);
                w.phi(p).abs() / (1.0 + s * s).sqrt()
            }
            other => other.phi(p).abs(),
        }
    }

    fn exit_param(&self, p: &P2, d: &P2) -> Option<f64> {
        let t = match self {
            Shape::InsideCircle { center, radius } => {
                let w = [p[0] - center[0], p[1] - center[1]];
                let a = dot(d, d);
                let b = dot(&w, d);
                let c = dot(&w, &w) - radius * radius;
                let disc = (b * b - a * c).max(0.0);
                let s = disc.sqrt();
                if b <= 0.0 {
                    (s - b) / a
                } else {
                    -c / (b + s)
                }
            }
            Shape::OutsideCircle { center, radius } => {
                let w = [p[0] - center[0], p[1] - center[1]];
                let a = dot(d, d);
                let b = dot(&w, d);
                let c = dot(&w, &w) - radius * radius;
                let disc = b * b - a * c;
                if b >= 0.0 || disc <= 0.0 {
                    return None;
                }
                c / (disc.sqrt() - b)
            }
            Shape::HalfPlane { normal, .. } => {
                let dn = dot(d, normal);
                if dn >= 0.0 {
                    return None;
                }
                self.phi(p) / -dn
            }
            Shape::Wall(w) => return w.exit_param(p, d),
        };
        (t > T_TOL && t <= 1.0).then_some(t)
    }

    /// Unit normal pointing into the region.
    fn normal(&self, h: &P2) -> P2 {
        match self {
            Shape::InsideCircle { center, .. } => unit([center[0] - h[0], center[1] - h[1]]),
            Shape::OutsideCircle { center, .. } => unit([h[0] - center[0], h[1] - center[1]]),
            Shape::HalfPlane { normal, .. } => *normal,
            Shape::Wall(w) => w.normal(h),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WindowShape {
    /// The whole boundary of the constraint.
    Whole,
    /// Straight piece of a half-plane boundary.
    Segment { a: P2, b: P2 },
    /// Arc of a circle between two polar angles, counter-clockwise.
    Arc { from: f64, span: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub id: usize,
    pub shape: WindowShape,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub shape: Shape,
    pub windows: Vec<Window>,
}

impl Constraint {
    pub fn reflecting(shape: Shape) -> Constraint {
        Constraint { shape, windows: Vec::new() }
    }

    fn circle_center(&self) -> Option<P2> {
        match self.shape {
            Shape::InsideCircle { center, .. } | Shape::OutsideCircle { center, .. } => Some(center),
            _ => None,
        }
    }

    /// Window containing boundary point `h`.
    fn window_at(&self, h: &P2) -> Option<usize> {
        self.windows.iter().find(|w| self.on_window(w, h)).map(|w| w.id)
    }

    fn on_window(&self, w: &Window, h: &P2) -> bool {
        match &w.shape {
            WindowShape::Whole => true,
            WindowShape::Segment { a, b } => {
                let u = segment_param(h, a, b);
                (0.0..=1.0).contains(&u)
            }
            WindowShape::Arc { from, span } => match self.circle_center() {
                Some(c) => angle_in(h, &c, *from, *span),
                None => false,
            },
        }
    }

    fn window_distance(&self, w: &Window, p: &P2) -> f64 {
        match &w.shape {
            WindowShape::Whole => self.shape.distance(p),
            WindowShape::Segment { a, b } => {
                let u = segment_param(p, a, b).clamp(0.0, 1.0);
                let q = [a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])];
                dist(p, &q)
            }
            WindowShape::Arc { from, span } => {
                let c = self.circle_center().unwrap_or([0.0, 0.0]);
                if angle_in(p, &c, *from, *span) {
                    self.shape.distance(p)
                } else {
                    let r = match self.shape {
                        Shape::InsideCircle { radius, .. } | Shape::OutsideCircle { radius, .. } => radius,
                        _ => 0.0,
                    };
                    let e0 = [c[0] + r * from.cos(), c[1] + r * from.sin()];
                    let e1 = [c[0] + r * (from + span).cos(), c[1] + r * (from + span).sin()];
                    dist(p, &e0).min(dist(p, &e1))
                }
            }
        }
    }

    fn window_gap(&self, w: &Window, p: &P2) -> Option<f64> {
        let inside = match &w.shape {
            WindowShape::Whole => true,
            WindowShape::Segment { a, b } => (0.0..=1.0).contains(&segment_param(p, a, b)),
            WindowShape::Arc { from, span } => {
                angle_in(p, &self.circle_center().unwrap_or([0.0, 0.0]), *from, *span)
            }
        };
        inside.then(|| self.shape.distance(p))
    }
}

fn segment_param(p: &P2, a: &P2, b: &P2) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    ((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / dot(&ab, &ab)
}

fn angle_in(p: &P2, c: &P2, from: f64, span: f64) -> bool {
    let ang = (p[1] - c[1]).atan2(p[0] - c[0]);
    (ang - from).rem_euclid(2.0 * PI) <= span
}

fn dist(a: &P2, b: &P2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn unit(v: P2) -> P2 {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

/// Intersection of constraints; at least one must be an inside-circle so the
/// region is bounded.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarRegion {
    constraints: Vec<Constraint>,
    n_windows: usize,
    diameter: f64,
    y_range: (f64, f64),
}

impl PlanarRegion {
    pub fn new(constraints: Vec<Constraint>) -> Result<PlanarRegion> {
        let mut y_range = (f64::NEG_INFINITY, f64::INFINITY);
        let mut x_range = (f64::NEG_INFINITY, f64::INFINITY);
        for c in &constraints {
            if let Shape::InsideCircle { center, radius } = c.shape {
                y_range = (y_range.0.max(center[1] - radius), y_range.1.min(center[1] + radius));
                x_range = (x_range.0.max(center[0] - radius), x_range.1.min(center[0] + radius));
            }
        }
        if !y_range.0.is_finite() || !y_range.1.is_finite() {
            return Err(NetError::Domain("planar region needs a bounding circle".into()));
        }
        let n_windows = constraints
            .iter()
            .flat_map(|c| c.windows.iter().map(|w| w.id + 1))
            .max()
            .unwrap_or(0);
        let diameter = (x_range.1 - x_range.0).hypot(y_range.1 - y_range.0);
        Ok(PlanarRegion { constraints, n_windows, diameter, y_range })
    }

    /// Disk whose whole boundary is one absorbing window.
    pub fn absorbing_disk(center: P2, radius: f64) -> Result<PlanarRegion> {
        PlanarRegion::new(vec![Constraint {
            shape: Shape::InsideCircle { center, radius },
            windows: vec![Window { id: 0, shape: WindowShape::Whole }],
        }])
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    fn first_exit(&self, p: &P2, d: &P2) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for (i, c) in self.constraints.iter().enumerate() {
            if let Some(t) = c.shape.exit_param(p, d) {
                if best.map_or(true, |(bt, _)| t < bt) {
                    best = Some((t, i));
                }
            }
        }
        best
    }

    /// Length of the horizontal cross-section at height y.
    pub fn slice_measure(&self, y: f64) -> f64 {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut holes: Vec<(f64, f64)> = Vec::new();
        for c in &self.constraints {
            match &c.shape {
                Shape::InsideCircle { center, radius } => {
                    let dy = y - center[1];
                    if dy.abs() >= *radius {
                        return 0.0;
                    }
                    let w = (radius * radius - dy * dy).sqrt();
                    lo = lo.max(center[0] - w);
                    hi = hi.min(center[0] + w);
                }
                Shape::OutsideCircle { center, radius } => {
                    let dy = y - center[1];
                    if dy.abs() < *radius {
                        let w = (radius * radius - dy * dy).sqrt();
                        holes.push((center[0] - w, center[0] + w));
                    }
                }
                Shape::HalfPlane { origin, normal } => {
                    let s = (y - origin[1]) * normal[1];
                    if normal[0].abs() < 1e-14 {
                        if s <= 0.0 {
                            return 0.0;
                        }
                    } else {
                        let xb = origin[0] - s / normal[0];
                        if normal[0] > 0.0 {
                            lo = lo.max(xb);
                        } else {
                            hi = hi.min(xb);
                        }
                    }
                }
                Shape::Wall(w) => {
                    let xb = w.boundary_x(y);
                    if w.side > 0.0 {
                        hi = hi.min(xb);
                    } else {
                        lo = lo.max(xb);
                    }
                }
            }
        }
        if hi <= lo {
            return 0.0;
        }
        let mut clipped: Vec<(f64, f64)> = holes
            .into_iter()
            .map(|(a, b)| (a.max(lo), b.min(hi)))
            .filter(|(a, b)| b > a)
            .collect();
        clipped.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut removed = 0.0;
        let mut cur: Option<(f64, f64)> = None;
        for (a, b) in clipped {
            match cur {
                Some((ca, cb)) if a <= cb => cur = Some((ca, cb.max(b))),
                Some((ca, cb)) => {
                    removed += cb - ca;
                    cur = Some((a, b));
                }
                None => cur = Some((a, b)),
            }
        }
        if let Some((ca, cb)) = cur {
            removed += cb - ca;
        }
        (hi - lo) - removed
    }

    /// Area by integrating horizontal cross-sections.
    pub fn area(&self) -> Result<f64> {
        let (y0, y1) = self.y_range;
        let mut pts = vec![y0, y1];
        for c in &self.constraints {
            match &c.shape {
                Shape::InsideCircle { center, radius } | Shape::OutsideCircle { center, radius } => {
                    pts.extend([center[1] - radius, center[1], center[1] + radius]);
                }
                Shape::HalfPlane { origin, .. } => pts.push(origin[1]),
                Shape::Wall(_) => pts.push(0.0),
            }
        }
        pts.retain(|&y| y >= y0 && y <= y1);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        numerics::integrate_pieces_cos(|y| self.slice_measure(y), &pts, 1e-10 * self.diameter.powi(2))
    }
}

impl Domain<2> for PlanarRegion {
    fn contains(&self, p: &P2) -> bool {
        self.constraints.iter().all(|c| c.shape.phi(p) > 0.0)
    }

    fn advance(&self, p: &P2, d: &P2) -> StepOutcome<2> {
        let mut pos = *p;
        let mut rem = *d;
        for _ in 0..=MAX_BOUNCES {
            match self.first_exit(&pos, &rem) {
                None => {
                    let q = axpy(&pos, 1.0, &rem);
                    return if self.contains(&q) { StepOutcome::Moved(q) } else { StepOutcome::Rejected };
                }
                Some((t, ci)) => {
                    let hit = axpy(&pos, t, &rem);
                    let c = &self.constraints[ci];
                    if let Some(window) = c.window_at(&hit) {
                        return StepOutcome::Absorbed { at: hit, window };
                    }
                    let n = c.shape.normal(&hit);
                    let rest = [(1.0 - t) * rem[0], (1.0 - t) * rem[1]];
                    rem = mirror(&rest, &n);
                    pos = hit;
                }
            }
        }
        StepOutcome::Rejected
    }

    fn window_distance(&self, p: &P2) -> f64 {
        let mut best = f64::INFINITY;
        for c in &self.constraints {
            for w in &c.windows {
                best = best.min(c.window_distance(w, p));
            }
        }
        best
    }

    fn window_gap(&self, p: &P2) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for c in &self.constraints {
            for w in &c.windows {
                if let Some(g) = c.window_gap(w, p) {
                    if best.map_or(true, |(_, bg)| g < bg) {
                        best = Some((w.id, g));
                    }
                }
            }
        }
        best
    }

    fn n_windows(&self) -> usize {
        self.n_windows
    }

    fn diameter(&self) -> f64 {
        self.diameter
    }
}

/// Shape of one funnel wall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WallShape {
    Circle { radius: f64 },
    Power { nu: f64, ell: f64 },
}

impl WallShape {
    fn scale(&self) -> f64 {
        match *self {
            WallShape::Circle { radius } => radius,
            WallShape::Power { ell, .. } => ell,
        }
    }
}

/// Constraints of one neck: the line through the gap (absorbing between the
/// walls) and the two walls. `inward` is the unit normal into the domain.
fn neck_constraints(
    gap_center: P2,
    inward: P2,
    eps: f64,
    left: WallShape,
    right: WallShape,
    window_id: usize,
    wall_height: f64,
) -> Result<Vec<Constraint>> {
    let t = [inward[1], -inward[0]];
    let half = 0.5 * eps;
    let a = [gap_center[0] - half * t[0], gap_center[1] - half * t[1]];
    let b = [gap_center[0] + half * t[0], gap_center[1] + half * t[1]];
    let mut out = vec![Constraint {
        shape: Shape::HalfPlane { origin: gap_center, normal: inward },
        windows: vec![Window { id: window_id, shape: WindowShape::Segment { a, b } }],
    }];
    for (wall, side) in [(left, -1.0), (right, 1.0)] {
        let shape = match wall {
            WallShape::Circle { radius } => Shape::OutsideCircle {
                center: [
                    gap_center[0] + side * (half + radius) * t[0],
                    gap_center[1] + side * (half + radius) * t[1],
                ],
                radius,
            },
            WallShape::Power { nu, ell } => {
                if inward != [0.0, 1.0] {
                    return Err(NetError::Unsupported("power-law walls need an upward neck".into()));
                }
                Shape::Wall(SampledWall::power_law(gap_center[0] + side * half, side, nu, ell, wall_height))
            }
        };
        out.push(Constraint::reflecting(shape));
    }
    Ok(out)
}

/// Realized funnel: the gap lies on y = 0 between x = -eps/2 and eps/2, the
/// domain is above it, the `Rc` wall on the left and the `rc` wall on the
/// right, closed by a circular head through (+-c0, 0) with c0 the smaller
/// wall scale.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarFunnel {
    pub region: PlanarRegion,
    pub head_center: P2,
    pub head_radius: f64,
}

impl PlanarFunnel {
    pub fn realize(spec: &PlanarFunnelSpec) -> Result<PlanarFunnel> {
        spec.validate()?;
        let (left, right) = wall_shapes(spec);
        let c0 = left.scale().min(right.scale());
        let build = |rh: f64, height: f64| Self::with_head(spec.eps, left, right, c0, rh, height);
        let measure = |rh: f64, height: f64| build(rh, height).and_then(|f| f.region.area());
        let mut height = 4.0 * spec.area.sqrt().max(c0);
        let mut hi = c0.max(spec.area.sqrt());
        while measure(hi, height)? < spec.area {
            hi *= 2.0;
            height = height.max(4.0 * hi);
            if hi > 1e9 {
                return Err(NetError::Domain("cannot size the head".into()));
            }
        }
        let rh = numerics::bisect(
            |rh| measure(rh, height).map(|m| m - spec.area).unwrap_or(f64::NAN),
            1e-9 * hi,
            hi,
            1e-13 * hi,
        )?;
        build(rh, height)
    }

    /// Funnel with a prescribed head radius.
    pub fn with_head(eps: f64, left: WallShape, right: WallShape, c0: f64, head_radius: f64, wall_height: f64) -> Result<PlanarFunnel> {
        let yh = (head_radius * head_radius - c0 * c0).max(0.0).sqrt();
        let head_center = [0.0, yh];
        let mut cs = vec![Constraint::reflecting(Shape::InsideCircle { center: head_center, radius: head_radius })];
        cs.extend(neck_constraints([0.0, 0.0], [0.0, 1.0], eps, left, right, 0, wall_height)?);
        Ok(PlanarFunnel { region: PlanarRegion::new(cs)?, head_center, head_radius })
    }

    /// Midpoint of the gap.
    pub fn gap_center(&self) -> P2 {
        [0.0, 0.0]
    }
}

fn wall_shapes(spec: &PlanarFunnelSpec) -> (WallShape, WallShape) {
    let side = |nu: f64, rc: f64, ell: f64| {
        if nu == 1.0 {
            WallShape::Circle { radius: rc }
        } else {
            WallShape::Power { nu, ell }
        }
    };
    (
        side(spec.nu_plus, spec.rc_upper, spec.ell_plus),
        side(spec.nu_minus, spec.rc_lower, spec.ell_minus),
    )
}

/// Circular head with `necks.len()` circular-wall funnels spaced evenly
/// around it; neck j has gap `necks[j].0` and wall radius `necks[j].1`.
/// The head passes through the wall circles at half-chord `chord`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiNeckRegion {
    pub region: PlanarRegion,
    pub head_center: P2,
    pub head_radius: f64,
}

impl MultiNeckRegion {
    pub fn new(necks: &[(f64, f64)], head_radius: f64, chord: f64) -> Result<MultiNeckRegion> {
        if necks.is_empty() {
            return Err(NetError::InvalidParameter("need at least one neck".into()));
        }
        if !(chord > 0.0 && chord < head_radius) {
            return Err(NetError::InvalidParameter("chord must lie in (0, head_radius)".into()));
        }
        let yh = (head_radius * head_radius - chord * chord).sqrt();
        let mut cs = vec![Constraint::reflecting(Shape::InsideCircle { center: [0.0, 0.0], radius: head_radius })];
        let n = necks.len() as f64;
        for (j, &(eps, radius)) in necks.iter().enumerate() {
            if !(eps > 0.0 && radius >= chord) {
                return Err(NetError::InvalidParameter(format!("neck {j}: need eps > 0 and radius >= chord")));
            }
            let phi = -0.5 * PI + 2.0 * PI * j as f64 / n;
            let out = [phi.cos(), phi.sin()];
            let gap = [yh * out[0], yh * out[1]];
            let wall = WallShape::Circle { radius };
            cs.extend(neck_constraints(gap, [-out[0], -out[1]], eps, wall, wall, j, 0.0)?);
        }
        Ok(MultiNeckRegion { region: PlanarRegion::new(cs)?, head_center: [0.0, 0.0], head_radius })
    }
}
