//! Quermassintegrals of free-boundary hypersurfaces in the unit Euclidean
//! ball, the cap functions `f_k(r) = W_k(cap of radius r)`, and the
//! low-dimensional inequalities built from them.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{common_hypotheses, verdict, InequalityCheck, Tolerances};
use crate::error::{Error, Result};
use crate::geometry::{
    boundary_integrate, make_cap, make_flat_disk, sample, sum_samples, ChartPoint, Immersion, Layout,
};
use crate::math::{abs, acos, binomial, dot, exp, ln, powi, sin, sphere_area, PI};
use crate::quadrature::{composite, QuadratureSpec};
use crate::spaceform::{BallDomain, SpaceForm};

/// Cap radii over which the cap functions are evaluated and inverted.
pub const CAP_RANGE: (f64, f64) = (1e-3, 1e3);

/// Quermassintegrals `W_0 … W_m`, `m = min(n + 1, 3)`, with the pieces they
/// are assembled from.
#[derive(Clone, Debug, PartialEq)]
pub struct Quermass {
    pub n: usize,
    pub w: Vec<f64>,
    /// Volume of the region bounded by Σ and the lid on `∂B`.
    pub enclosed_volume: f64,
    pub area: f64,
    /// `|∂Σ|`.
    pub boundary_measure: f64,
    /// Area of the part of `∂B` enclosed by `∂Σ` on the side of the region.
    pub lid: f64,
    /// `∫ H_j` for `j = 0 … n`.
    pub mean_integrals: Vec<f64>,
}

impl Quermass {
    pub fn get(&self, k: usize) -> Result<f64> {
        self.w.get(k).copied().ok_or_else(|| {
            Error::Unsupported(format!(
                "W_{k} needs boundary quermassintegrals of order {} which are not implemented",
                k.saturating_sub(2)
            ))
        })
    }
}

/// Area of the polar cap of geodesic radius `angle` on the unit
/// `n`-sphere.
pub fn lid_area(n: usize, angle: f64) -> f64 {
    if angle <= 0.0 {
        return 0.0;
    }
    let rule = composite(16, 8, 0.0, angle);
    let s: f64 = rule.iter().map(|(t, w)| w * powi(sin(t), n as i32 - 1)).sum();
    sphere_area(n - 1) * s
}

fn check_unit_euclidean(imm: &Immersion) -> Result<()> {
    let ok = imm.space() == SpaceForm::Euclidean
        && imm.ball().is_some_and(|b| abs(b.model_radius - 1.0) <= 1e-12)
        && !imm.is_closed()
        && imm.profile().is_some();
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(
            "quermassintegrals need a rotationally symmetric free-boundary hypersurface of the unit Euclidean ball".into(),
        ))
    }
}

/// Quermassintegrals of the region enclosed by `imm` (assumed convex) in the
/// unit Euclidean ball.
pub fn quermassintegrals(imm: &Immersion, quad: &QuadratureSpec) -> Result<Quermass> {
    check_unit_euclidean(imm)?;
    let n = imm.dim();
    let nf = n as f64;
    let samples = sample(imm, quad)?;
    let mean_integrals: Vec<f64> = (0..=n).map(|j| sum_samples(&samples, |f| f.mean[j])).collect();
    let area = mean_integrals[0];
    let support = sum_samples(&samples, |f| dot(&f.position, &f.normal));
    let boundary_measure = boundary_integrate(imm, quad, |_| 1.0)?;

    // The region lies on the side ν points away from. At the axis point the
    // profile normal is `−orientation · a` (profiles leave the axis with
    // r' > 0), so the region contains the pole `orientation · a`.
    let axis = imm.axis();
    let s = imm.orientation();
    let edge = imm.position(ChartPoint::new(1.0, 0.0));
    let angle = acos((s * dot(&edge, &axis)).clamp(-1.0, 1.0));
    let lid = lid_area(n, angle);

    let enclosed_volume = (support + lid) / (nf + 1.0);
    let mut w = vec![enclosed_volume, area / (nf + 1.0)];
    if n + 1 >= 2 {
        w.push(mean_integrals[1] / (nf * (nf + 1.0)) + lid / ((nf + 1.0) * nf));
    }
    if n + 1 >= 3 {
        let c = 2.0 / ((nf + 1.0) * (nf - 1.0));
        w.push(mean_integrals[2] / (binomial(n, 2) * (nf + 1.0)) + c * boundary_measure / nf);
    }
    Ok(Quermass {
        n,
        w,
        enclosed_volume,
        area,
        boundary_measure,
        lid,
        mean_integrals,
    })
}

fn unit_ball() -> BallDomain {
    BallDomain {
        space: SpaceForm::Euclidean,
        radius: 1.0,
        model_radius: 1.0,
    }
}

/// `f_k(r)`: `W_k` of the `n`-dimensional cap of radius `r` in the unit ball.
pub fn cap_function(n: usize, k: usize, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    let cap = make_cap(SpaceForm::Euclidean, &unit_ball(), r, Layout::Reduced(n))?;
    quermassintegrals(&cap, quad)?.get(k)
}

/// Cap function of fixed `(n, k)` with bisection inverse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapFunction {
    pub n: usize,
    pub k: usize,
    pub quad: QuadratureSpec,
}

impl CapFunction {
    /// `f_k(r)`; radii beyond [`CAP_RANGE`] (up to `r = ∞`, the flat disk)
    /// are handled by quadratic interpolation in `1/r` through the disk.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if r <= CAP_RANGE.1 {
            return cap_function(self.n, self.k, r, &self.quad);
        }
        let (d, f1, f2) = self.tail()?;
        Ok(tail_interpolate(d, f1, f2, CAP_RANGE.1 / r))
    }

    /// Values at `r = ∞`, `CAP_RANGE.1` and `CAP_RANGE.1 / 2`.
    fn tail(&self) -> Result<(f64, f64, f64)> {
        let disk = make_flat_disk(SpaceForm::Euclidean, &unit_ball(), Layout::Reduced(self.n))?;
        Ok((
            quermassintegrals(&disk, &self.quad)?.get(self.k)?,
            cap_function(self.n, self.k, CAP_RANGE.1, &self.quad)?,
            cap_function(self.n, self.k, 0.5 * CAP_RANGE.1, &self.quad)?,
        ))
    }

    /// Attained values from `r = CAP_RANGE.0` up to the flat disk.
    pub fn range(&self) -> Result<(f64, f64)> {
        Ok((self.eval(CAP_RANGE.0)?, self.tail()?.0))
    }

    /// Radius `r` with `f_k(r) = value`, to `1e−10` (relative above `r = 1`);
    /// `∞` for the flat disk.
    pub fn inverse(&self, value: f64) -> Result<f64> {
        let lo_v = self.eval(CAP_RANGE.0)?;
        let (d, f1, f2) = self.tail()?;
        let slack = 1e-12 * abs(d);
        if !(lo_v < f1 && f1 < d) {
            return Err(Error::Degenerate(format!("cap function f_{} is not increasing", self.k)));
        }
        if !(value >= lo_v && value <= d + slack) {
            return Err(Error::Range { value, lo: lo_v, hi: d });
        }
        if value >= d {
            return Ok(f64::INFINITY);
        }
        if value > f1 {
            // monotone on s = CAP_RANGE.1 / r ∈ (0, 1)
            let (mut lo, mut hi) = (0.0, 1.0);
            while hi - lo > 1e-14 {
                let mid = 0.5 * (lo + hi);
                if tail_interpolate(d, f1, f2, mid) > value {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(CAP_RANGE.1 / (0.5 * (lo + hi)));
        }
        let (mut lo, mut hi) = (ln(CAP_RANGE.0), ln(CAP_RANGE.1));
        while exp(hi) - exp(lo) > 1e-10 * exp(lo).max(1.0) {
            let mid = 0.5 * (lo + hi);
            if self.eval(exp(mid))? < value {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(exp(0.5 * (lo + hi)))
    }
}

/// Quadratic through `(0, d)`, `(1, f1)`, `(2, f2)` evaluated at `s`.
fn tail_interpolate(d: f64, f1: f64, f2: f64, s: f64) -> f64 {
    let a = f1 - d;
    let b = 0.5 * (f2 - 2.0 * f1 + d);
    d + a * s + b * s * (s - 1.0)
}

pub fn cap_function_inverse(n: usize, k: usize, value: f64, quad: &QuadratureSpec) -> Result<f64> {
    CapFunction { n, k, quad: *quad }.inverse(value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corollary {
    /// Convex free-boundary surfaces in the unit 3-ball:
    /// `(∫H)²/(4|Σ|) + |∂Σ| ≥ 2π`.
    Surface,
    /// Convex free-boundary 3-folds in the unit 4-ball:
    /// `((∫H)²/(3|Σ|) + |∂Σ|)/12 ≥ f_3(f_1⁻¹(|Σ|/4))`.
    ThreeFold,
}

/// The low-dimensional consequences of the main inequality. Reported with
/// `lhs` the side that must be smaller.
pub fn check_corollary_low_dim(
    imm: &Immersion,
    which: Corollary,
    quad: &QuadratureSpec,
    tol: &Tolerances,
) -> Result<InequalityCheck> {
    check_unit_euclidean(imm)?;
    let n = imm.dim();
    let need = match which {
        Corollary::Surface => 2,
        Corollary::ThreeFold => 3,
    };
    if n != need {
        return Err(Error::Domain(format!("this corollary needs n = {need}, got {n}")));
    }
    let samples = sample(imm, quad)?;
    let hyp = common_hypotheses(imm, &samples);
    let area = sum_samples(&samples, |_| 1.0);
    let total_h = sum_samples(&samples, |f| f.mean[1]);
    let boundary = boundary_integrate(imm, quad, |_| 1.0)?;
    let (name, lhs, rhs) = match which {
        Corollary::Surface => ("low_dim_surface", 2.0 * PI, 0.25 * total_h * total_h / area + boundary),
        Corollary::ThreeFold => {
            let r = CapFunction { n: 3, k: 1, quad: *quad }.inverse(area / 4.0)?;
            let target = CapFunction { n: 3, k: 3, quad: *quad }.eval(r)?;
            ("low_dim_threefold", target, (total_h * total_h / (3.0 * area) + boundary) / 12.0)
        }
    };
    let applicable = hyp.convexity_min >= -tol.gate
        && hyp.free_boundary_pos <= tol.contact
        && hyp.free_boundary_angle <= tol.contact;
    let scale = crate::math::powf(area, 1.0 / n as f64);
    Ok(InequalityCheck {
        name: name.into(),
        k: 1,
        lhs,
        rhs,
        hypotheses: hyp,
        equality_expected: false,
        status: verdict(lhs, rhs, applicable, tol),
        scale,
        non_umbilicity: super::non_umbilicity(&samples, scale),
    })
}
