//! Geometry summary of a single shape.

use freeform_core::functionals::{average_hk, substatic_min};
use freeform_core::geometry::{boundary_integrate, free_boundary_residual, ricci_min, sample, sum_samples};
use freeform_core::quadrature::QuadratureSpec;
use freeform_core::spaceform::Potential;
use serde::Serialize;

use crate::error::{numerical, RunResult};
use crate::report::QuadratureRecord;
use crate::shape::ShapeSpec;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShapeHypotheses {
    pub ricci_min: f64,
    pub convexity_min: f64,
    pub free_boundary_pos: f64,
    pub free_boundary_angle: f64,
    /// Axis potential positive at every node.
    pub half_ball: bool,
    /// Smallest eigenvalue of the sub-static tensor of the axis potential
    /// (absent where the potential is not positive).
    pub substatic_min: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShapeDescription {
    pub shape: ShapeSpec,
    pub n: usize,
    #[serde(rename = "K")]
    pub curvature: i32,
    pub area: f64,
    /// Zero for closed shapes.
    pub boundary_length: f64,
    /// Averages `H̄_k`, `k = 1..=n`.
    pub mean_curvature_averages: Vec<f64>,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub axis: Vec<f64>,
    pub hypotheses: ShapeHypotheses,
    /// False when the chart derivatives are finite differences.
    pub exact_derivatives: bool,
    pub quadrature: QuadratureRecord,
}

pub fn describe_shape(spec: &ShapeSpec, quad: &QuadratureSpec) -> RunResult<ShapeDescription> {
    let imm = spec.build()?;
    let n = imm.dim();
    let space = imm.space();
    let samples = sample(&imm, quad).map_err(numerical)?;
    let area = sum_samples(&samples, |_| 1.0);
    let boundary_length = if imm.is_closed() {
        0.0
    } else {
        boundary_integrate(&imm, quad, |_| 1.0).map_err(numerical)?
    };
    let mean_curvature_averages = (1..=n)
        .map(|k| average_hk(&imm, k, None, quad))
        .collect::<Result<Vec<_>, _>>()
        .map_err(numerical)?;
    let pot = Potential::new(space, &imm.axis()).map_err(numerical)?;
    let (mut kmin, mut kmax, mut ric) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
    let mut half_ball = true;
    let mut sub: f64 = f64::INFINITY;
    for s in &samples {
        let f = &s.frame;
        kmin = kmin.min(f.kappa[0]);
        kmax = kmax.max(f.kappa[n - 1]);
        ric = ric.min(ricci_min(f, space));
        match pot.value(&f.position) {
            Ok(v) if v > 0.0 => sub = sub.min(substatic_min(f, &pot).map_err(numerical)?),
            _ => half_ball = false,
        }
    }
    let fb = free_boundary_residual(&imm);
    Ok(ShapeDescription {
        shape: spec.clone(),
        n,
        curvature: spec.curvature,
        area,
        boundary_length,
        mean_curvature_averages,
        kappa_min: kmin,
        kappa_max: kmax,
        axis: imm.axis(),
        hypotheses: ShapeHypotheses {
            ricci_min: ric,
            convexity_min: kmin,
            free_boundary_pos: fb.position,
            free_boundary_angle: fb.angle,
            half_ball,
            substatic_min: half_ball.then_some(sub),
        },
        exact_derivatives: imm.exact_derivatives(),
        quadrature: quad.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn euclidean_cap_closed_forms() {
        // cap of radius 1 in the unit ball
        let d = describe_shape(&ShapeSpec::cap(0, 1.0, 2, 1.0), &QuadratureSpec::default()).unwrap();
        let s2 = 2f64.sqrt();
        assert!((d.area - 2.0 * PI * (1.0 - 1.0 / s2)).abs() < 1e-10, "{}", d.area);
        assert!((d.boundary_length - 2.0 * PI / s2).abs() < 1e-10);
        assert!((d.kappa_min - 1.0).abs() < 1e-9 && (d.kappa_max - 1.0).abs() < 1e-9);
    }

    #[test]
    fn flat_disk() {
        let d = describe_shape(&ShapeSpec::disk(0, 1.0, 2), &QuadratureSpec::default()).unwrap();
        assert!((d.area - PI).abs() < 1e-12);
        assert!((d.boundary_length - 2.0 * PI).abs() < 1e-12);
        assert!(d.mean_curvature_averages.iter().all(|h| h.abs() < 1e-12));
    }

    #[test]
    fn hyperbolic_cap_meets_the_ball_orthogonally() {
        let d = describe_shape(&ShapeSpec::cap(-1, 1.0, 3, 0.5), &QuadratureSpec::default()).unwrap();
        assert!(d.hypotheses.free_boundary_pos <= 1e-10 && d.hypotheses.free_boundary_angle <= 1e-10);
        assert!(d.exact_derivatives);
    }
}
