//! Domain families, their measures, and the containment and reflection
//! predicates used by the simulators.

pub mod mobius;
pub mod planar;
pub mod revolution;
pub mod solid;
pub mod specs;

pub use mobius::{funnel_alpha, mobius_inverse, mobius_map, FunnelAlpha};
pub use planar::{PlanarFunnel, PlanarRegion};
pub use revolution::{profile_area, ProfileConfig, ProfileRecipe, RevolutionProfile};
pub use solid::{AbsorbingBall, SolidOfRevolution};
pub use specs::{needle_contains, CompositeSpec, DumbbellSpec, NeedleStripSpec, PlanarFunnelSpec};

use crate::error::{NetError, Result};

/// Maximum number of specular bounces resolved within one step.
pub const MAX_BOUNCES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome<const N: usize> {
    Moved([f64; N]),
    Absorbed { at: [f64; N], window: usize },
    /// Too many bounces or a roundoff exit; the caller splits the increment.
    Rejected,
}

/// A bounded region with reflecting walls and numbered absorbing windows.
pub trait Domain<const N: usize>: Sync {
    /// Strict interior test; boundary points are outside.
    fn contains(&self, p: &[f64; N]) -> bool;
    /// Move from `p` by `d`, reflecting specularly off walls.
    fn advance(&self, p: &[f64; N], d: &[f64; N]) -> StepOutcome<N>;
    /// Euclidean distance to the nearest absorbing window.
    fn window_distance(&self, p: &[f64; N]) -> f64;
    /// Window whose supporting surface `p` projects onto, with the normal
    /// distance to it. Used for the Brownian-bridge crossing test.
    fn window_gap(&self, p: &[f64; N]) -> Option<(usize, f64)>;
    fn n_windows(&self) -> usize;
    fn diameter(&self) -> f64;
}

/// Checked single step: refuses displacements longer than the domain.
pub fn reflect<const N: usize, D: Domain<N> + ?Sized>(
    domain: &D,
    pos: &[f64; N],
    step: &[f64; N],
) -> Result<StepOutcome<N>> {
    let len = norm(step);
    if len > domain.diameter() {
        return Err(NetError::StepTooLarge(format!(
            "step {len} exceeds domain diameter {}",
            domain.diameter()
        )));
    }
    Ok(domain.advance(pos, step))
}

#[inline]
pub(crate) fn dot<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        s += a[i] * b[i];
    }
    s
}

#[inline]
pub(crate) fn norm<const N: usize>(a: &[f64; N]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub(crate) fn axpy<const N: usize>(p: &[f64; N], t: f64, d: &[f64; N]) -> [f64; N] {
    let mut out = *p;
    for i in 0..N {
        out[i] += t * d[i];
    }
    out
}

/// d - 2 (d . n) n for unit n.
#[inline]
pub(crate) fn mirror<const N: usize>(d: &[f64; N], n: &[f64; N]) -> [f64; N] {
    axpy(d, -2.0 * dot(d, n), n)
}
