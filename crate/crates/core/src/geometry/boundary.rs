//! The boundary `∂Σ ⊂ ∂B`: conormal, normals of the ball and of `∂Σ` in
//! `∂B`, and the free-boundary diagnostics.

use alloc::vec;
use alloc::vec::Vec;

use super::{frame_at, ChartPoint, Immersion, Layout, PointFrame};
use crate::error::{Error, Result};
use crate::math::{abs, bilinear, cross3, dot, norm, pairwise_sum, powi, sphere_area, sqrt, tensor_norm_sq, PI};
use crate::quadrature::{composite, QuadratureSpec};
use crate::spaceform::BallDomain;

/// Angle residual beyond which a boundary frame is refused.
pub const BOUNDARY_ANGLE_LIMIT: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct BoundaryFrame {
    /// Frame of Σ at the boundary point.
    pub frame: PointFrame,
    /// Outward unit conormal `μ`, flat components.
    pub conormal: Vec<f64>,
    /// `μ` in the frame basis of `frame`.
    pub conormal_coords: Vec<f64>,
    /// Orthonormal tangent basis of `∂Σ` in the frame basis of `frame`.
    pub boundary_tangents: Vec<Vec<f64>>,
    /// Outward unit normal `N̄` of `∂B`, flat components.
    pub ball_normal: Vec<f64>,
    /// Unit normal `ν̄` of `∂Σ` inside `∂B`, on the side of `ν`.
    pub sphere_normal: Vec<f64>,
    /// Boundary measure density (per `dθ` in full layout; the full orbit
    /// volume in reduced layout).
    pub measure: f64,
}

impl BoundaryFrame {
    /// `1 − cos` of the angle between `μ` and `N̄`.
    pub fn conormal_misalignment(&self) -> f64 {
        1.0 - unit_cos(&self.conormal, &self.ball_normal)
    }

    /// `1 − cos` of the angle between `ν̄` and `ν`.
    pub fn normal_misalignment(&self) -> f64 {
        1.0 - unit_cos(&self.sphere_normal, &self.frame.normal)
    }
}

fn unit_cos(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b) / (norm(a) * norm(b))
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FreeBoundaryResidual {
    /// Max of `| |x| − R_model |`.
    pub position: f64,
    /// Max of `|⟨N^flat, x⟩| / |x|`.
    pub angle: f64,
}

#[derive(Clone, Debug)]
pub struct BoundarySample {
    pub frame: BoundaryFrame,
    pub weight: f64,
}

fn require_ball(imm: &Immersion) -> Result<BallDomain> {
    if imm.is_closed() {
        return Err(Error::Domain("closed hypersurface has no boundary".into()));
    }
    imm.ball()
        .copied()
        .ok_or_else(|| Error::Domain("hypersurface has no ambient ball".into()))
}

fn angle_residual(frame: &PointFrame) -> f64 {
    abs(dot(&frame.flat_normal, &frame.position)) / norm(&frame.position)
}

/// Boundary frame at angle `theta` (ignored in reduced layout).
pub fn boundary_frame_at(imm: &Immersion, theta: f64) -> Result<BoundaryFrame> {
    let ball = require_ball(imm)?;
    let frame = frame_at(imm, ChartPoint::new(1.0, theta))?;
    let angle = angle_residual(&frame);
    if angle > BOUNDARY_ANGLE_LIMIT {
        return Err(Error::FreeBoundaryViolation(angle));
    }
    let x = frame.position.clone();
    let phi = frame.conformal_factor;
    let ball_normal = ball.outward_normal(&x);
    let n = frame.dim();
    let (conormal_coords, boundary_tangents, measure, sphere_dir) = match imm.layout() {
        Layout::Full => {
            let gi = &frame.g_inv;
            let s = sqrt(gi[(0, 0)]);
            let mu = vec![gi[(0, 0)] / s, gi[(1, 0)] / s];
            let gth = frame.g[(1, 1)];
            let z = vec![0.0, 1.0 / sqrt(gth)];
            let w = cross3(&x, &frame.tangents[1]).to_vec();
            (mu, vec![z], sqrt(gth), w)
        }
        Layout::Reduced(_) => {
            let mut mu = vec![0.0; n];
            mu[0] = 1.0;
            let tangents = (1..n)
                .map(|i| {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    e
                })
                .collect();
            let orbit = phi * abs(x[0]);
            let measure = sphere_area(n - 1) * powi(orbit, (n - 1) as i32);
            let mut w = vec![0.0; n + 1];
            w[0] = -x[n];
            w[n] = x[0];
            (mu, tangents, measure, w)
        }
    };
    let mut conormal = vec![0.0; x.len()];
    for (c, tan) in conormal_coords.iter().zip(&frame.tangents) {
        for (m, v) in conormal.iter_mut().zip(tan) {
            *m += c * v;
        }
    }
    let sign = if dot(&sphere_dir, &frame.flat_normal) < 0.0 { -1.0 } else { 1.0 };
    let wn = norm(&sphere_dir);
    let sphere_normal = sphere_dir.iter().map(|c| sign * c / (wn * phi)).collect();
    Ok(BoundaryFrame {
        frame,
        conormal,
        conormal_coords,
        boundary_tangents,
        ball_normal,
        sphere_normal,
        measure,
    })
}

fn boundary_angles(imm: &Immersion, quad: &QuadratureSpec) -> Vec<(f64, f64)> {
    match imm.layout() {
        Layout::Full => composite(quad.order, quad.panels(), 0.0, 2.0 * PI).iter().collect(),
        Layout::Reduced(_) => vec![(0.0, 1.0)],
    }
}

/// Boundary frames and measure weights at the boundary quadrature nodes.
pub fn boundary_sample(imm: &Immersion, quad: &QuadratureSpec) -> Result<Vec<BoundarySample>> {
    boundary_angles(imm, quad)
        .into_iter()
        .map(|(th, w)| {
            let frame = boundary_frame_at(imm, th)?;
            let weight = w * frame.measure;
            Ok(BoundarySample { frame, weight })
        })
        .collect()
}

/// `∫_{∂Σ} f ds`.
pub fn boundary_integrate(
    imm: &Immersion,
    quad: &QuadratureSpec,
    mut f: impl FnMut(&BoundaryFrame) -> f64,
) -> Result<f64> {
    let samples = boundary_sample(imm, quad)?;
    let values: Vec<f64> = samples.iter().map(|s| f(&s.frame) * s.weight).collect();
    Ok(pairwise_sum(&values))
}

/// Contact diagnostics over the boundary nodes. Closed hypersurfaces and
/// immersions without a ball report zero.
pub fn free_boundary_residual(imm: &Immersion) -> FreeBoundaryResidual {
    let ball = match (imm.is_closed(), imm.ball()) {
        (false, Some(b)) => *b,
        _ => return FreeBoundaryResidual::default(),
    };
    let mut out = FreeBoundaryResidual::default();
    for (th, _) in boundary_angles(imm, &QuadratureSpec::new(8, 3)) {
        match frame_at(imm, ChartPoint::new(1.0, th)) {
            Ok(frame) => {
                out.position = out.position.max(abs(norm(&frame.position) - ball.model_radius));
                out.angle = out.angle.max(angle_residual(&frame));
            }
            Err(_) => {
                out.position = f64::INFINITY;
                out.angle = f64::INFINITY;
            }
        }
    }
    out
}

/// Max over boundary nodes, unit tangents `Z` of `∂Σ` and `k < n` of
/// `|h(μ, Z)|` and `|T_k(μ, Z)|`, each normalized by `1 + |tensor|`.
pub fn principal_conormal_check(imm: &Immersion, quad: &QuadratureSpec) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for s in boundary_sample(imm, quad)? {
        let bf = &s.frame;
        let f = &bf.frame;
        let state = f.state()?;
        let h_norm = sqrt(tensor_norm_sq(&f.h, &f.g_inv));
        let lowered: Vec<_> = state.newton.iter().map(|t| f.g.mul(t).symmetrized()).collect();
        for z in &bf.boundary_tangents {
            worst = worst.max(abs(bilinear(&f.h, &bf.conormal_coords, z)) / (1.0 + h_norm));
            for t in &lowered {
                let tn = sqrt(tensor_norm_sq(t, &f.g_inv));
                worst = worst.max(abs(bilinear(t, &bf.conormal_coords, z)) / (1.0 + tn));
            }
        }
    }
    Ok(worst)
}
