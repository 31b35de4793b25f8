//! Integral functionals and the inequality checks built from them.

mod divergence;
mod quermass;

use alloc::string::String;
use alloc::vec::Vec;

pub use divergence::{divergence_free_check, DivergenceResidual};
pub use quermass::{
    cap_function, cap_function_inverse, check_corollary_low_dim, lid_area, quermassintegrals, CapFunction, Corollary,
    Quermass, CAP_RANGE,
};

use crate::error::{Error, Result};
use crate::geometry::{free_boundary_residual, ricci_min, sample, Immersion, Layout, PointFrame, Sample};
use crate::math::{abs, generalized_eigenvalues, pairwise_sum, powf, powi};
use crate::quadrature::QuadratureSpec;
use crate::spaceform::{Potential, SpaceForm};
use crate::symalg::{mixed_norm_sq, substatic_tensor, SymmetricState};

/// Tolerances for inequality verdicts and hypothesis gates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative slack in `lhs ≤ rhs (1 + rel) + abs`.
    pub rel: f64,
    pub abs: f64,
    /// Hypothesis gates accept values down to `−gate`.
    pub gate: f64,
    /// Free-boundary residual accepted by the gates.
    pub contact: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel: 1e-8,
            abs: 1e-12,
            gate: 1e-10,
            contact: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// A hypothesis of the inequality does not hold, so no verdict applies.
    Inapplicable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inapplicable => "inapplicable",
        }
    }
}

/// Hypothesis diagnostics gathered at the quadrature nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Hypotheses {
    pub ricci_min: f64,
    /// Smallest principal curvature.
    pub convexity_min: f64,
    pub free_boundary_pos: f64,
    pub free_boundary_angle: f64,
    /// Weight positive at every node (`None` when unweighted).
    pub half_ball: Option<bool>,
    /// Smallest eigenvalue of the sub-static tensor (`None` when unweighted).
    pub substatic_min: Option<f64>,
}

/// Both sides of an inequality `lhs ≤ rhs` and the verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct InequalityCheck {
    pub name: String,
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub hypotheses: Hypotheses,
    pub equality_expected: bool,
    pub status: Status,
    /// Intrinsic length scale `|Σ|^{1/n}`.
    pub scale: f64,
    /// Max principal-curvature spread times `scale`.
    pub non_umbilicity: f64,
}

impl InequalityCheck {
    /// `lhs / rhs` when `rhs > 0`.
    pub fn ratio(&self) -> Option<f64> {
        (self.rhs > 0.0).then(|| self.lhs / self.rhs)
    }

    pub fn pass(&self) -> bool {
        self.status == Status::Pass
    }

    /// Scale-free value of a side carrying curvature weight `2k` on an
    /// `n`-dimensional hypersurface.
    pub fn normalized(&self, value: f64, n: usize) -> f64 {
        value * powi(self.scale, 2 * self.k as i32 - n as i32)
    }
}

pub(crate) fn verdict(lhs: f64, rhs: f64, applicable: bool, tol: &Tolerances) -> Status {
    if !applicable {
        Status::Inapplicable
    } else if lhs <= rhs * (1.0 + tol.rel) + tol.abs {
        Status::Pass
    } else {
        Status::Fail
    }
}

pub(crate) fn check_order(imm: &Immersion, k: usize) -> Result<()> {
    let n = imm.dim();
    if k < 1 || k >= n {
        return Err(Error::Domain(alloc::format!("order k must lie in 1..={} for n = {n}, got {k}", n - 1)));
    }
    Ok(())
}

pub(crate) fn check_weight_symmetry(imm: &Immersion, potential: &Potential) -> Result<()> {
    if potential.space() != imm.space() || potential.direction().len() != imm.ambient_dim() {
        return Err(Error::Domain("potential does not match the ambient space".into()));
    }
    if let Layout::Reduced(n) = imm.layout() {
        let a = potential.direction();
        if a[..n].iter().any(|c| abs(*c) > 1e-14) {
            return Err(Error::Unsupported(
                "reduced layouts need a potential aligned with the axis of revolution".into(),
            ));
        }
    }
    Ok(())
}

pub(crate) fn weights(samples: &[Sample], potential: Option<&Potential>) -> Vec<f64> {
    samples
        .iter()
        .map(|s| match potential {
            Some(p) => p.value(&s.frame.position).unwrap_or(f64::NAN),
            None => 1.0,
        })
        .collect()
}

pub(crate) fn weighted_sum(samples: &[Sample], w: &[f64], mut f: impl FnMut(&PointFrame) -> f64) -> f64 {
    let values: Vec<f64> = samples
        .iter()
        .zip(w)
        .map(|(s, wi)| wi * f(&s.frame) * s.weight)
        .collect();
    pairwise_sum(&values)
}

/// `∫ w H_k / ∫ w` with `w = 1` or `w = V_a`.
pub fn average_hk(imm: &Immersion, k: usize, weight: Option<&Potential>, quad: &QuadratureSpec) -> Result<f64> {
    if k > imm.dim() {
        return Err(Error::Domain(alloc::format!("order {k} exceeds the dimension")));
    }
    if let Some(p) = weight {
        check_weight_symmetry(imm, p)?;
    }
    let samples = sample(imm, quad)?;
    let w = weights(&samples, weight);
    let w_min = w.iter().copied().fold(f64::INFINITY, f64::min);
    if !(w_min > 0.0) {
        return Err(Error::NonPositiveWeight(w_min));
    }
    Ok(weighted_sum(&samples, &w, |f| f.mean[k]) / weighted_sum(&samples, &w, |_| 1.0))
}

pub(crate) fn traceless_newton_norm_sq(frame: &PointFrame, k: usize) -> Result<f64> {
    let state = SymmetricState::new(&frame.shape_operator(), &frame.g)?;
    Ok(mixed_norm_sq(&state.traceless(k)))
}

fn length_scale(samples: &[Sample], n: usize) -> f64 {
    let area = pairwise_sum(&samples.iter().map(|s| s.weight).collect::<Vec<_>>());
    powf(area, 1.0 / n as f64)
}

pub(crate) fn common_hypotheses(imm: &Immersion, samples: &[Sample]) -> Hypotheses {
    let fb = free_boundary_residual(imm);
    let mut h = Hypotheses {
        ricci_min: f64::INFINITY,
        convexity_min: f64::INFINITY,
        free_boundary_pos: fb.position,
        free_boundary_angle: fb.angle,
        half_ball: None,
        substatic_min: None,
    };
    for s in samples {
        h.ricci_min = h.ricci_min.min(ricci_min(&s.frame, imm.space()));
        h.convexity_min = h.convexity_min.min(s.frame.kappa[0]);
    }
    h
}

/// Smallest eigenvalue, relative to `g`, of the sub-static tensor of `V`.
pub fn substatic_min(frame: &PointFrame, potential: &Potential) -> Result<f64> {
    let v = potential.value(&frame.position)?;
    let v_nu = potential.derivative(&frame.position, &frame.normal);
    let s = substatic_tensor(&frame.h, &frame.g, v, v_nu)?;
    generalized_eigenvalues(&s, &frame.g)
        .and_then(|e| e.first().copied())
        .ok_or_else(|| Error::Degenerate("metric is not positive definite".into()))
}

fn non_umbilicity(samples: &[Sample], scale: f64) -> f64 {
    samples
        .iter()
        .map(|s| s.frame.curvature_spread())
        .fold(0.0, f64::max)
        * scale
}

/// Both sides of
/// `∫ w (H_k − H̄_k^w)² ≤ n(n−1)/(n−k)² ∫ w |T̊_k|²`
/// with `w = 1` (gate: nonnegative Ricci curvature) or `w = V_a` (gates:
/// `V_a > 0` on Σ and the sub-static tensor positive semi-definite). Closed
/// hypersurfaces are accepted and checked under the Ricci gate.
pub fn check_main_inequality(
    imm: &Immersion,
    k: usize,
    weight: Option<&Potential>,
    quad: &QuadratureSpec,
    tol: &Tolerances,
) -> Result<InequalityCheck> {
    check_order(imm, k)?;
    if let Some(p) = weight {
        check_weight_symmetry(imm, p)?;
    }
    let n = imm.dim();
    let samples = sample(imm, quad)?;
    let mut hyp = common_hypotheses(imm, &samples);
    let w = weights(&samples, weight);
    let mut applicable = hyp.free_boundary_pos <= tol.contact && hyp.free_boundary_angle <= tol.contact;
    match weight {
        None => applicable &= hyp.ricci_min >= -tol.gate,
        Some(p) => {
            let positive = w.iter().all(|wi| *wi > 0.0);
            hyp.half_ball = Some(positive);
            let mut smin = f64::INFINITY;
            for s in &samples {
                smin = smin.min(substatic_min(&s.frame, p)?);
            }
            hyp.substatic_min = Some(smin);
            applicable &= positive && smin >= -tol.gate;
        }
    }
    let (lhs, rhs) = if w.iter().all(|wi| wi.is_finite()) {
        let total = weighted_sum(&samples, &w, |_| 1.0);
        let mean = weighted_sum(&samples, &w, |f| f.mean[k]) / total;
        let lhs = weighted_sum(&samples, &w, |f| {
            let d = f.mean[k] - mean;
            d * d
        });
        let mut norms = Vec::with_capacity(samples.len());
        for s in &samples {
            norms.push(traceless_newton_norm_sq(&s.frame, k)?);
        }
        let terms: Vec<f64> = samples
            .iter()
            .zip(&w)
            .zip(&norms)
            .map(|((s, wi), t)| wi * t * s.weight)
            .collect();
        let c = (n * (n - 1)) as f64 / ((n - k) * (n - k)) as f64;
        (lhs, c * pairwise_sum(&terms))
    } else {
        applicable = false;
        (f64::NAN, f64::NAN)
    };
    let scale = length_scale(&samples, n);
    let name = match (weight.is_some(), imm.is_closed()) {
        (true, _) => "weighted",
        (false, true) => "closed",
        (false, false) => "free_boundary",
    };
    Ok(InequalityCheck {
        name: name.into(),
        k,
        lhs,
        rhs,
        hypotheses: hyp,
        equality_expected: false,
        status: verdict(lhs, rhs, applicable, tol),
        scale,
        non_umbilicity: non_umbilicity(&samples, scale),
    })
}

/// The two formulations of the closed-surface inequality in Euclidean
/// space:
/// `∫ (H − H̄)² ≤ n/(n−1) ∫ |h̊|²` and `∫ |h − (H̄/n) g|² ≤ n/(n−1) ∫ |h̊|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerezReport {
    pub first: InequalityCheck,
    pub second: InequalityCheck,
    /// Relative residual of `lhs₂ = ∫|h̊|² + lhs₁/n`, the identity that makes
    /// the formulations equivalent.
    pub equivalence_residual: f64,
}

pub fn check_perez(imm: &Immersion, quad: &QuadratureSpec, tol: &Tolerances) -> Result<PerezReport> {
    if !imm.is_closed() {
        return Err(Error::BoundaryPresent);
    }
    if imm.space() != SpaceForm::Euclidean {
        return Err(Error::Domain("this check applies to hypersurfaces of Euclidean space".into()));
    }
    let n = imm.dim();
    let nf = n as f64;
    let samples = sample(imm, quad)?;
    let hyp = common_hypotheses(imm, &samples);
    let w = weights(&samples, None);
    let area = weighted_sum(&samples, &w, |_| 1.0);
    let mean = weighted_sum(&samples, &w, |f| f.mean[1]) / area;
    let lhs1 = weighted_sum(&samples, &w, |f| {
        let d = f.mean[1] - mean;
        d * d
    });
    let traceless = weighted_sum(&samples, &w, |f| {
        let h = f.mean[1] / nf;
        f.kappa.iter().map(|k| (k - h) * (k - h)).sum()
    });
    let lhs2 = weighted_sum(&samples, &w, |f| {
        let h = mean / nf;
        f.kappa.iter().map(|k| (k - h) * (k - h)).sum()
    });
    let rhs = nf / (nf - 1.0) * traceless;
    let applicable = hyp.ricci_min >= -tol.gate;
    let scale = length_scale(&samples, n);
    let nu = non_umbilicity(&samples, scale);
    let make = |name: &str, lhs: f64| InequalityCheck {
        name: name.into(),
        k: 1,
        lhs,
        rhs,
        hypotheses: hyp,
        equality_expected: false,
        status: verdict(lhs, rhs, applicable, tol),
        scale,
        non_umbilicity: nu,
    };
    let predicted = traceless + lhs1 / nf;
    let denom = abs(predicted).max(abs(lhs2));
    Ok(PerezReport {
        first: make("perez_mean", lhs1),
        second: make("perez_tensor", lhs2),
        equivalence_residual: if denom > 0.0 { abs(lhs2 - predicted) / denom } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_cap, make_closed_sphere, make_flat_disk, make_profile_shape, BaseShape, Perturbation};
    use crate::spaceform::BallDomain;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn caps_have_constant_mean_curvature_averages() {
        let b = BallDomain::new(SpaceForm::Euclidean, 1.0).unwrap();
        for rho in [0.5, 2.0] {
            let cap = make_cap(SpaceForm::Euclidean, &b, rho, Layout::Full).unwrap();
            assert!((average_hk(&cap, 1, None, &q()).unwrap() - 2.0 / rho).abs() < 1e-12);
            let v = Potential::new(SpaceForm::Euclidean, &[0.0, 0.0, 1.0]).unwrap();
            assert!((average_hk(&cap, 1, Some(&v), &q()).unwrap() - 2.0 / rho).abs() < 1e-12);
            let minus = Potential::new(SpaceForm::Euclidean, &[0.0, 0.0, -1.0]).unwrap();
            assert!(matches!(average_hk(&cap, 1, Some(&minus), &q()), Err(Error::NonPositiveWeight(_))));
        }
    }

    #[test]
    fn caps_and_disks_give_equality() {
        let tol = Tolerances::default();
        for space in SpaceForm::ALL {
            let b = BallDomain::new(space, 1.0).unwrap();
            for layout in [Layout::Full, Layout::Reduced(3), Layout::Reduced(4)] {
                let n = layout.dim();
                for imm in [
                    make_cap(space, &b, 0.7 * b.model_radius, layout).unwrap(),
                    make_flat_disk(space, &b, layout).unwrap(),
                ] {
                    for k in 1..n {
                        let c = check_main_inequality(&imm, k, None, &q(), &tol).unwrap();
                        assert!(c.normalized(c.lhs, n) <= 1e-10 && c.normalized(c.rhs, n) <= 1e-10, "{c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn hyperbolic_flat_disk_is_inapplicable() {
        let b = BallDomain::new(SpaceForm::Hyperbolic, 1.0).unwrap();
        let d = make_flat_disk(SpaceForm::Hyperbolic, &b, Layout::Full).unwrap();
        let c = check_main_inequality(&d, 1, None, &q(), &Tolerances::default()).unwrap();
        assert_eq!(c.status, Status::Inapplicable);
        assert!((c.hypotheses.ricci_min + 1.0).abs() < 1e-12);
    }

    #[test]
    fn perturbed_convex_cap_is_strict() {
        let b = BallDomain::new(SpaceForm::Euclidean, 1.0).unwrap();
        let pert = Perturbation {
            r: vec![0.0],
            z: vec![0.0, 0.15],
        };
        let imm = make_profile_shape(SpaceForm::Euclidean, &b, BaseShape::Cap(1.0), &pert, 0.4, Layout::Full).unwrap();
        let c = check_main_inequality(&imm, 1, None, &q(), &Tolerances::default()).unwrap();
        assert!(c.hypotheses.ricci_min >= 0.0, "{c:?}");
        assert!(c.lhs > 0.0 && c.lhs < c.rhs, "{c:?}");
        assert_eq!(c.status, Status::Pass);
    }

    #[test]
    fn weighted_check_on_caps() {
        let tol = Tolerances::default();
        for space in SpaceForm::ALL {
            let b = BallDomain::new(space, 0.9).unwrap();
            let cap = make_cap(space, &b, 0.8 * b.model_radius, Layout::Full).unwrap();
            let v = Potential::new(space, &[0.0, 0.0, 1.0]).unwrap();
            let c = check_main_inequality(&cap, 1, Some(&v), &q(), &tol).unwrap();
            assert_eq!(c.hypotheses.half_ball, Some(true));
            assert!(c.lhs.abs() < 1e-10 && c.rhs.abs() < 1e-10);
            let minus = Potential::new(space, &[0.0, 0.0, -1.0]).unwrap();
            let c = check_main_inequality(&cap, 1, Some(&minus), &q(), &tol).unwrap();
            assert_eq!(c.status, Status::Inapplicable);
        }
    }

    #[test]
    fn perez_formulations_are_linked() {
        let tol = Tolerances::default();
        let s = make_closed_sphere(SpaceForm::Euclidean, 1.0, &[], 0.0, Layout::Reduced(3)).unwrap();
        let r = check_perez(&s, &q(), &tol).unwrap();
        assert!(r.first.lhs.abs() < 1e-12 && r.second.lhs.abs() < 1e-12 && r.first.rhs.abs() < 1e-12);
        let s = make_closed_sphere(SpaceForm::Euclidean, 1.0, &[0.1, 0.05], 0.5, Layout::Reduced(2)).unwrap();
        let r = check_perez(&s, &q(), &tol).unwrap();
        assert!(r.equivalence_residual < 1e-12);
        assert!(r.first.pass() && r.second.pass());
        assert!(r.first.lhs < r.first.rhs);
        let b = BallDomain::new(SpaceForm::Euclidean, 1.0).unwrap();
        let cap = make_cap(SpaceForm::Euclidean, &b, 1.0, Layout::Full).unwrap();
        assert!(matches!(check_perez(&cap, &q(), &tol), Err(Error::BoundaryPresent)));
    }

    #[test]
    fn perez_sides_scale_homogeneously() {
        let tol = Tolerances::default();
        let a = make_closed_sphere(SpaceForm::Euclidean, 1.0, &[0.2], 0.4, Layout::Reduced(3)).unwrap();
        let b = make_closed_sphere(SpaceForm::Euclidean, 2.5, &[0.2], 0.4, Layout::Reduced(3)).unwrap();
        let ra = check_perez(&a, &q(), &tol).unwrap();
        let rb = check_perez(&b, &q(), &tol).unwrap();
        // every integral scales like λ^{n−2}
        let f = 2.5f64.powi(1);
        assert!((rb.first.lhs / ra.first.lhs - f).abs() < 1e-10);
        assert!((rb.first.rhs / ra.first.rhs - f).abs() < 1e-10);
    }
}
