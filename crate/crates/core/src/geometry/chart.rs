//! Two-parameter charts of surfaces in three-dimensional model space.

use core::fmt::Debug;

/// Position with first and second partial derivatives in `(t, θ)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SurfaceJet {
    pub x: [f64; 3],
    pub d1: [[f64; 3]; 2],
    pub d2: [[[f64; 3]; 2]; 2],
}

/// Finite-difference step used when a chart has no analytic derivatives.
pub const FD_STEP: f64 = 1e-5;

/// A user-supplied surface on the polar rectangle `t ∈ [0, 1]`,
/// `θ ∈ [0, 2π]`, with `t = 0` the center and `t = 1` the boundary curve
/// (or the second pole for closed surfaces).
///
/// The map must be defined slightly beyond `t = 1` when derivatives come
/// from the finite-difference fallback.
pub trait PolarChart: Debug + Send + Sync {
    fn position(&self, t: f64, theta: f64) -> [f64; 3];

    fn jet(&self, t: f64, theta: f64) -> SurfaceJet {
        finite_difference_jet(|a, b| self.position(a, b), t, theta, FD_STEP)
    }

    /// Whether [`PolarChart::jet`] is analytic rather than the fallback.
    fn has_exact_derivatives(&self) -> bool {
        false
    }

    fn is_closed(&self) -> bool {
        false
    }
}

/// Central differences for the first and second derivatives of `map`.
pub fn finite_difference_jet(map: impl Fn(f64, f64) -> [f64; 3], t: f64, theta: f64, step: f64) -> SurfaceJet {
    let p = [t, theta];
    let at = |dt: f64, dth: f64| map(p[0] + dt, p[1] + dth);
    let x = at(0.0, 0.0);
    let shift = |i: usize, s: f64| if i == 0 { (s, 0.0) } else { (0.0, s) };
    let mut jet = SurfaceJet {
        x,
        ..SurfaceJet::default()
    };
    for i in 0..2 {
        let (a, b) = shift(i, step);
        let (xp, xm) = (at(a, b), at(-a, -b));
        for c in 0..3 {
            jet.d1[i][c] = (xp[c] - xm[c]) / (2.0 * step);
            jet.d2[i][i][c] = (xp[c] - 2.0 * x[c] + xm[c]) / (step * step);
        }
    }
    let (pp, pm, mp, mm) = (
        at(step, step),
        at(step, -step),
        at(-step, step),
        at(-step, -step),
    );
    for c in 0..3 {
        let v = (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * step * step);
        jet.d2[0][1][c] = v;
        jet.d2[1][0][c] = v;
    }
    jet
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_differences_recover_a_quadratic_map() {
        let map = |t: f64, th: f64| [t * t + th, t * th, 3.0 * th * th];
        let j = finite_difference_jet(map, 0.3, 0.7, FD_STEP);
        assert!((j.d1[0][0] - 0.6).abs() < 1e-9);
        assert!((j.d1[1][1] - 0.3).abs() < 1e-9);
        assert!((j.d2[0][0][0] - 2.0).abs() < 1e-4);
        assert!((j.d2[0][1][1] - 1.0).abs() < 1e-4);
        assert!((j.d2[1][1][2] - 6.0).abs() < 1e-4);
    }
}
