//! The weighted Reilly formula on a hypersurface with boundary, the
//! weighted Neumann problem behind the main inequality, and a step-by-step
//! replay of its proof.
//!
//! With `Ω = Σ`, outward conormal `μ`, `X = ∇f − f ∇V/V`,
//! `A_ij = f_ij − V_ij f/V` and `A = tr A`,
//!
//! ```text
//! ∫ V (A² − |A_ij|²) = ∫ S(X, X)
//!     + ∫_∂ V (h^∂ − (V_μ/V) g)(X̃, X̃)
//!     + ∫_∂ [V H^∂ (f_μ − V_μ f/V)² + 2 V (f_μ − V_μ f/V)(Δ̃f − Δ̃V f/V)]
//! ```
//!
//! where `S = ΔV g − ∇²V + V Ric`, tildes are boundary quantities and
//! `h^∂(Y, Z) = g(∇_Y μ, Z)`.

mod fields;
mod neumann;

use alloc::vec;
use alloc::vec::Vec;

pub use fields::{
    ambient_jet, chart_connection, AmbientField, AxialPolynomial, ChartConnection, ConstantField, FieldJet,
    PolynomialField, SurfaceField,
};
pub use neumann::{proof_chain_check, solve_neumann, NeumannResidual, NeumannSolution, ProofChain};

use crate::error::{Error, Result};
use crate::geometry::{frame_at, profile_metric, ricci_tensor, sample, ChartPoint, Immersion, Layout, PointFrame};
use crate::math::{abs, pairwise_sum, powi, sphere_area, sqrt, PI};
use crate::quadrature::{composite, QuadratureSpec};
use crate::spaceform::Potential;
use crate::symalg::substatic_tensor;

/// The integrated terms of the weighted Reilly formula.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ReillyLedger {
    /// `∫ V (A² − |A_ij|²)`.
    pub bulk_lhs: f64,
    /// `∫ S(X, X)`.
    pub bulk_substatic: f64,
    /// `∫_∂ V (h^∂ − (V_μ/V) g)(X̃, X̃)`.
    pub boundary_h: f64,
    /// The remaining boundary integral (mean curvature and normal terms).
    pub boundary_hn: f64,
    /// `|left − right|`.
    pub residual: f64,
    /// Largest absolute integral among the terms.
    pub scale: f64,
}

impl ReillyLedger {
    pub fn rhs(&self) -> f64 {
        self.bulk_substatic + self.boundary_h + self.boundary_hn
    }

    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual / self.scale
        } else {
            self.residual
        }
    }
}

/// Pointwise bulk terms: `(V A², V |A_ij|², S(X, X))`.
pub(crate) fn bulk_terms(frame: &PointFrame, space: crate::spaceform::SpaceForm, f: &FieldJet, v: &FieldJet) -> (f64, f64, f64) {
    let ratio = f.value / v.value;
    let a = f.hess.sub(&v.hess.scale(ratio));
    let ga = frame.g_inv.mul(&a);
    let tr = ga.trace();
    let norm_sq = ga.mul(&ga).trace();
    let x_cov: Vec<f64> = f.grad.iter().zip(&v.grad).map(|(fi, vi)| fi - vi * ratio).collect();
    let x = frame.g_inv.mul_vec(&x_cov);
    let s = frame
        .g
        .scale(v.laplacian)
        .sub(&v.hess)
        .add(&ricci_tensor(frame, space).scale(v.value));
    let sxx = crate::math::bilinear(&s, &x, &x);
    (v.value * tr * tr, v.value * norm_sq, sxx)
}

/// Boundary integrands `(h-term, H- and normal-term)` and the measure
/// weight at one boundary node.
fn boundary_terms(imm: &Immersion, theta: f64, f: &dyn SurfaceField, v: &dyn SurfaceField) -> Result<(f64, f64, f64)> {
    let frame = frame_at(imm, ChartPoint::new(1.0, theta))?;
    let fj = f.jet(imm, &frame)?;
    let vj = v.jet(imm, &frame)?;
    if !(vj.value > 0.0) {
        return Err(Error::NonPositiveWeight(vj.value));
    }
    let vv = vj.value;
    match imm.layout() {
        Layout::Full => {
            let gi = &frame.g_inv;
            let s = sqrt(gi[(0, 0)]);
            let mu = [gi[(0, 0)] / s, gi[(1, 0)] / s];
            let conn = chart_connection(imm, &frame)?;
            let gamma = frame.g[(1, 1)];
            let gamma_th = conn.dg[1][(1, 1)];
            // h^∂(∂θ, ∂θ) = −g(μ, ∇_θ ∂θ)
            let h_bd: f64 = (0..2)
                .map(|l| {
                    let g_lk_gamma: f64 = (0..2).map(|k| frame.g[(l, k)] * conn.gamma[k][(1, 1)]).sum();
                    -mu[l] * g_lk_gamma
                })
                .sum();
            let mean_bd = h_bd / gamma;
            let normal = |j: &FieldJet| mu[0] * j.grad[0] + mu[1] * j.grad[1];
            let tangential_laplacian = |j: &FieldJet| (j.partial_hess[(1, 1)] - 0.5 * gamma_th * j.grad[1] / gamma) / gamma;
            let ratio = fj.value / vv;
            let v_mu = normal(&vj);
            let robin = normal(&fj) - v_mu * ratio;
            let lap = tangential_laplacian(&fj) - tangential_laplacian(&vj) * ratio;
            let x_th = (fj.grad[1] - vj.grad[1] * ratio) / gamma;
            let h_term = vv * (h_bd - v_mu / vv * gamma) * x_th * x_th;
            let hn_term = vv * mean_bd * robin * robin + 2.0 * vv * robin * lap;
            Ok((h_term, hn_term, sqrt(gamma)))
        }
        Layout::Reduced(n) => {
            let pm = profile_metric(imm, 1.0).ok_or_else(|| Error::Unsupported("profile required".into()))?;
            let mean_bd = (n as f64 - 1.0) * pm.rho_s / pm.rho;
            let robin = fj.grad[0] - vj.grad[0] * fj.value / vv;
            // symmetric fields have no tangential gradient or Laplacian
            let measure = sphere_area(n - 1) * powi(pm.rho, (n - 1) as i32);
            Ok((0.0, vv * mean_bd * robin * robin, measure))
        }
    }
}

/// The two boundary integrals of the Reilly formula (zero when closed).
pub(crate) fn boundary_integrals(
    imm: &Immersion,
    f: &dyn SurfaceField,
    v: &dyn SurfaceField,
    quad: &QuadratureSpec,
) -> Result<(f64, f64)> {
    if imm.is_closed() {
        return Ok((0.0, 0.0));
    }
    let angles: Vec<(f64, f64)> = match imm.layout() {
        Layout::Full => composite(quad.order, quad.panels(), 0.0, 2.0 * PI).iter().collect(),
        Layout::Reduced(_) => vec![(0.0, 1.0)],
    };
    let (mut bh, mut bhn) = (Vec::new(), Vec::new());
    for (th, w) in angles {
        let (h, hn, m) = boundary_terms(imm, th, f, v)?;
        bh.push(h * w * m);
        bhn.push(hn * w * m);
    }
    Ok((pairwise_sum(&bh), pairwise_sum(&bhn)))
}

/// Both sides of the weighted Reilly formula for a positive weight `v` and
/// a test function `f`. In reduced layout both fields must be invariant
/// under rotations about the axis.
pub fn reilly_residual(
    imm: &Immersion,
    v: &dyn SurfaceField,
    f: &dyn SurfaceField,
    quad: &QuadratureSpec,
) -> Result<ReillyLedger> {
    let samples = sample(imm, quad)?;
    let mut sq = Vec::with_capacity(samples.len());
    let mut norm = Vec::with_capacity(samples.len());
    let mut sub = Vec::with_capacity(samples.len());
    for s in &samples {
        let fj = f.jet(imm, &s.frame)?;
        let vj = v.jet(imm, &s.frame)?;
        if !(vj.value > 0.0) {
            return Err(Error::NonPositiveWeight(vj.value));
        }
        let (a2, an, sxx) = bulk_terms(&s.frame, imm.space(), &fj, &vj);
        sq.push(a2 * s.weight);
        norm.push(an * s.weight);
        sub.push(sxx * s.weight);
    }
    let (boundary_h, boundary_hn) = boundary_integrals(imm, f, v, quad)?;
    let int_sq = pairwise_sum(&sq);
    let int_norm = pairwise_sum(&norm);
    let bulk_lhs = pairwise_sum(&sq.iter().zip(&norm).map(|(a, b)| a - b).collect::<Vec<_>>());
    let bulk_substatic = pairwise_sum(&sub);
    let rhs = bulk_substatic + boundary_h + boundary_hn;
    let scale = [abs(int_sq), abs(int_norm), abs(bulk_substatic), abs(boundary_h), abs(boundary_hn)]
        .into_iter()
        .fold(0.0, f64::max);
    Ok(ReillyLedger {
        bulk_lhs,
        bulk_substatic,
        boundary_h,
        boundary_hn,
        residual: abs(bulk_lhs - rhs),
        scale,
    })
}

/// Largest entrywise gap, relative to `1 + |S|`, between the sub-static
/// tensor `ΔV g − ∇²V + V Ric` assembled from intrinsic derivatives of
/// `V = V_a` and its factorization `(V h − V_ν g) g⁻¹ (H g − h)`.
pub fn substatic_consistency(imm: &Immersion, potential: &Potential, quad: &QuadratureSpec) -> Result<f64> {
    if potential.space() != imm.space() || potential.direction().len() != imm.ambient_dim() {
        return Err(Error::Domain("potential does not match the ambient space".into()));
    }
    crate::functionals::check_weight_symmetry(imm, potential)?;
    let mut worst: f64 = 0.0;
    for s in sample(imm, quad)? {
        let fr = &s.frame;
        let vj = ambient_jet(imm, fr, potential)?;
        let intrinsic = fr
            .g
            .scale(vj.laplacian)
            .sub(&vj.hess)
            .add(&ricci_tensor(fr, imm.space()).scale(vj.value));
        let v_nu = potential.derivative(&fr.position, &fr.normal);
        let factored = substatic_tensor(&fr.h, &fr.g, vj.value, v_nu)?;
        // compare mixed tensors so chart scaling drops out
        let gap = fr.g_inv.mul(&intrinsic.sub(&factored)).max_abs();
        worst = worst.max(gap / (1.0 + fr.g_inv.mul(&factored).max_abs()));
    }
    Ok(worst)
}

/// Convergence order of the Reilly residual between two quadrature levels.
pub fn reilly_order(coarse: &ReillyLedger, fine: &ReillyLedger) -> f64 {
    crate::math::log2(coarse.residual / fine.residual)
}
