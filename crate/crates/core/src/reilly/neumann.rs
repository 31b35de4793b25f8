//! The weighted Neumann problem
//! `Δf − (ΔV/V) f = H_k − H̄_k^V` in Σ, `f_μ − (V_μ/V) f = 0` on ∂Σ,
//! on rotationally symmetric hypersurfaces, and the proof chain built on it.
//!
//! Writing `f = V w` turns the problem into `div(V² ∇w) = V (H_k − H̄_k^V)`
//! with `w_μ = 0`. Along the profile this is `(p w_t)_t = q` with
//! `p = ρ^{n−1} V²/σ` and `q = ρ^{n−1} σ V (H_k − H̄)`. The flux vanishes on
//! the axis, so `p w_t = ∫_0^t q`, and the compatibility condition makes it
//! vanish at the boundary as well. Both integrations are done with nested
//! Gauss rules, which keeps the solution accurate to near round-off.

use alloc::vec;
use alloc::vec::Vec;

use super::fields::{jet_from_arclength, FieldJet, SurfaceField};
use super::{bulk_terms, ConstantField};
use crate::error::{Error, Result};
use crate::functionals::{
    check_main_inequality, check_weight_symmetry, common_hypotheses, substatic_min, InequalityCheck, Tolerances,
};
use crate::geometry::{frame_at, profile_metric, sample, ChartPoint, Immersion, Layout, PointFrame, ProfileMetric};
use crate::math::{abs, bilinear, dot, pairwise_sum, powi, sqrt};
use crate::quadrature::{gauss_legendre, QuadratureSpec};
use crate::spaceform::Potential;
use crate::symalg::traceless_newton_eigenvalues;

/// Extra Gauss points per panel used by the nested integrations.
const EXTRA_ORDER: usize = 4;

/// Step of the finite-difference stencils in [`NeumannSolution::residual`].
const STENCIL_STEP: f64 = 1e-3;

/// Weight data along the profile: `V`, `V_t`, `V_tt`.
fn weight_jet(imm: &Immersion, weight: Option<&Potential>, t: f64) -> Result<(f64, f64, f64)> {
    let Some(pot) = weight else {
        return Ok((1.0, 0.0, 0.0));
    };
    let n = imm.dim();
    let j = imm
        .profile_jet(t)
        .ok_or_else(|| Error::Unsupported("profile required".into()))?;
    let mut x = vec![0.0; n + 1];
    x[0] = j.r;
    x[n] = j.z;
    let mut xt = vec![0.0; n + 1];
    xt[0] = j.r1;
    xt[n] = j.z1;
    let mut xtt = vec![0.0; n + 1];
    xtt[0] = j.r2;
    xtt[n] = j.z2;
    let grad = pot.gradient(&x);
    let v = pot.value(&x)?;
    let v_t = dot(&grad, &xt);
    let v_tt = bilinear(&pot.hessian(&x), &xt, &xt) + dot(&grad, &xtt);
    Ok((v, v_t, v_tt))
}

/// ODE coefficients at one profile parameter.
#[derive(Clone, Copy, Debug)]
struct Local {
    pm: ProfileMetric,
    v: f64,
    v_t: f64,
    v_tt: f64,
    p: f64,
    p_t: f64,
    q: f64,
}

/// A numerical solution of the weighted Neumann problem, normalized by
/// `∫ V f = 0`.
#[derive(Clone, Debug)]
pub struct NeumannSolution {
    imm: Immersion,
    k: usize,
    weight: Option<Potential>,
    mean: f64,
    panels: usize,
    nodes: Vec<f64>,
    gl_weights: Vec<f64>,
    /// `∫_0^{a_i} q` at panel starts.
    flux_at: Vec<f64>,
    /// `∫_0^{a_i} Q/p` at panel starts.
    potential_at: Vec<f64>,
    offset: f64,
}

/// Residuals of a Neumann solution.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumannResidual {
    /// Relative residual of `(p w_t)_t = q` at points between the nodes.
    pub interior: f64,
    /// Relative Robin residual `|V w_μ|` at the boundary.
    pub boundary: f64,
    /// `|∫ V (H_k − H̄_k^V)|` relative to `∫ V |H_k − H̄_k^V|`.
    pub compatibility: f64,
}

impl NeumannResidual {
    pub fn max(&self) -> f64 {
        self.interior.max(self.boundary).max(self.compatibility)
    }
}

impl NeumannSolution {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn weight(&self) -> Option<&Potential> {
        self.weight.as_ref()
    }

    pub fn immersion(&self) -> &Immersion {
        &self.imm
    }

    /// `H̄_k^V` used as the source shift.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    fn local(&self, t: f64) -> Result<Local> {
        let n = self.imm.dim();
        let pm = profile_metric(&self.imm, t).ok_or_else(|| Error::Unsupported("profile required".into()))?;
        let frame = frame_at(&self.imm, ChartPoint::new(t, 0.0))?;
        let (v, v_t, v_tt) = weight_jet(&self.imm, self.weight.as_ref(), t)?;
        let nf = n as f64;
        let rho_n1 = powi(pm.rho, n as i32 - 1);
        let rho_t = pm.rho_s * pm.sigma;
        let p = rho_n1 * v * v / pm.sigma;
        let p_t = (nf - 1.0) * powi(pm.rho, n as i32 - 2) * rho_t * v * v / pm.sigma
            + 2.0 * rho_n1 * v * v_t / pm.sigma
            - rho_n1 * v * v * pm.sigma_t / (pm.sigma * pm.sigma);
        let q = rho_n1 * pm.sigma * v * (frame.mean[self.k] - self.mean);
        Ok(Local {
            pm,
            v,
            v_t,
            v_tt,
            p,
            p_t,
            q,
        })
    }

    fn panel(&self, t: f64) -> (usize, f64) {
        let i = ((t * self.panels as f64) as usize).min(self.panels - 1);
        (i, i as f64 / self.panels as f64)
    }

    /// Gauss rule on `[a, b]`.
    fn gauss(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.gl_weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    /// `Q(t) = ∫_0^t q`.
    fn flux(&self, t: f64) -> Result<f64> {
        let (i, a) = self.panel(t);
        let mut acc = vec![self.flux_at[i]];
        for (s, w) in self.gauss(a, t) {
            acc.push(w * self.local(s)?.q);
        }
        Ok(pairwise_sum(&acc))
    }

    /// `w(t)` without the normalizing offset.
    fn raw_potential(&self, t: f64) -> Result<f64> {
        let (i, a) = self.panel(t);
        let mut acc = vec![self.potential_at[i]];
        for (s, w) in self.gauss(a, t) {
            acc.push(w * self.flux(s)? / self.local(s)?.p);
        }
        Ok(pairwise_sum(&acc))
    }

    /// `(f, f_s, f_ss)` at profile parameter `t`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64, f64)> {
        let l = self.local(t)?;
        let w = self.raw_potential(t)? + self.offset;
        let w_t = self.flux(t)? / l.p;
        let w_tt = (l.q - l.p_t * w_t) / l.p;
        let (s, st) = (l.pm.sigma, l.pm.sigma_t);
        let w_s = w_t / s;
        let w_ss = (w_tt - w_s * st) / (s * s);
        let v_s = l.v_t / s;
        let v_ss = (l.v_tt - v_s * st) / (s * s);
        Ok((
            l.v * w,
            v_s * w + l.v * w_s,
            v_ss * w + 2.0 * v_s * w_s + l.v * w_ss,
        ))
    }

    /// Residuals of the computed solution. The interior residual
    /// differentiates the computed `w` with fourth-order stencils, so it
    /// measures the nested integration rather than restating the ODE.
    pub fn residual(&self) -> Result<NeumannResidual> {
        let h = STENCIL_STEP;
        let mut interior: f64 = 0.0;
        let count = 4 * self.panels;
        for j in 0..count {
            let t = (j as f64 + 0.5) / count as f64;
            if t - 2.0 * h <= 0.0 || t + 2.0 * h >= 1.0 {
                continue;
            }
            let w: Vec<f64> = [-2.0, -1.0, 0.0, 1.0, 2.0]
                .iter()
                .map(|o| self.raw_potential(t + o * h))
                .collect::<Result<_>>()?;
            let w_t = (-w[4] + 8.0 * w[3] - 8.0 * w[1] + w[0]) / (12.0 * h);
            let w_tt = (-w[4] + 16.0 * w[3] - 30.0 * w[2] + 16.0 * w[1] - w[0]) / (12.0 * h * h);
            let l = self.local(t)?;
            let (a, b) = (l.p * w_tt, l.p_t * w_t);
            let den = abs(a) + abs(b) + abs(l.q);
            if den > 0.0 {
                interior = interior.max(abs(a + b - l.q) / den);
            }
        }
        let total_abs = self.abs_source_integral()?;
        let end = *self.flux_at.last().unwrap_or(&0.0);
        let rel = |x: f64| if total_abs > 0.0 { abs(x) / total_abs } else { abs(x) };
        let boundary = if self.imm.is_closed() { 0.0 } else { rel(end) };
        Ok(NeumannResidual {
            interior,
            boundary,
            compatibility: rel(end),
        })
    }

    fn abs_source_integral(&self) -> Result<f64> {
        let mut acc = Vec::new();
        for i in 0..self.panels {
            let a = i as f64 / self.panels as f64;
            for (s, w) in self.gauss(a, a + 1.0 / self.panels as f64) {
                acc.push(w * abs(self.local(s)?.q));
            }
        }
        Ok(pairwise_sum(&acc))
    }
}

impl SurfaceField for NeumannSolution {
    fn jet(&self, imm: &Immersion, frame: &PointFrame) -> Result<FieldJet> {
        let Layout::Reduced(n) = imm.layout() else {
            return Err(Error::Unsupported("Neumann solutions live on reduced layouts".into()));
        };
        let t = frame.point.t;
        let pm = profile_metric(imm, t).ok_or_else(|| Error::Unsupported("profile required".into()))?;
        let (f, f_s, f_ss) = self.eval(t)?;
        Ok(jet_from_arclength(f, f_s, f_ss, &pm, n))
    }
}

/// Solves the weighted Neumann problem for `H_k` on a rotationally
/// symmetric hypersurface in reduced layout (`V = 1` when `weight` is
/// `None`). `quad` sets the panel count and the normalization rule.
pub fn solve_neumann(
    imm: &Immersion,
    k: usize,
    weight: Option<&Potential>,
    quad: &QuadratureSpec,
) -> Result<NeumannSolution> {
    if !matches!(imm.layout(), Layout::Reduced(_)) || imm.profile().is_none() {
        return Err(Error::Unsupported("the Neumann solver needs a profile in reduced layout".into()));
    }
    crate::functionals::check_order(imm, k)?;
    if let Some(p) = weight {
        check_weight_symmetry(imm, p)?;
    }
    let (nodes, gl_weights) = gauss_legendre(quad.order + EXTRA_ORDER);
    let mut sol = NeumannSolution {
        imm: imm.clone(),
        k,
        weight: weight.cloned(),
        mean: 0.0,
        panels: quad.panels(),
        nodes,
        gl_weights,
        flux_at: Vec::new(),
        potential_at: Vec::new(),
        offset: 0.0,
    };
    let width = 1.0 / sol.panels as f64;
    // the mean is taken with the inner rule so that the flux closes exactly
    let (mut num, mut den) = (Vec::new(), Vec::new());
    for i in 0..sol.panels {
        let a = i as f64 * width;
        for (t, w) in sol.gauss(a, a + width) {
            let l = sol.local(t)?;
            if !(l.v > 0.0) {
                return Err(Error::NonPositiveWeight(l.v));
            }
            let frame = frame_at(imm, ChartPoint::new(t, 0.0))?;
            let base = w * powi(l.pm.rho, imm.dim() as i32 - 1) * l.pm.sigma * l.v;
            num.push(base * frame.mean[k]);
            den.push(base);
        }
    }
    sol.mean = pairwise_sum(&num) / pairwise_sum(&den);
    sol.flux_at = vec![0.0];
    for i in 0..sol.panels {
        let a = i as f64 * width;
        let mut acc = vec![sol.flux_at[i]];
        for (t, w) in sol.gauss(a, a + width) {
            acc.push(w * sol.local(t)?.q);
        }
        sol.flux_at.push(pairwise_sum(&acc));
    }
    sol.potential_at = vec![0.0];
    for i in 0..sol.panels {
        let a = i as f64 * width;
        let mut acc = vec![sol.potential_at[i]];
        for (t, w) in sol.gauss(a, a + width) {
            acc.push(w * sol.flux(t)? / sol.local(t)?.p);
        }
        sol.potential_at.push(pairwise_sum(&acc));
    }
    // ∫ V f = ∫ V² w = 0
    let samples = sample(imm, quad)?;
    let (mut vw, mut vv) = (Vec::new(), Vec::new());
    for s in &samples {
        let t = s.frame.point.t;
        let v = weight_jet(imm, weight, t)?.0;
        vw.push(s.weight * v * v * sol.raw_potential(t)?);
        vv.push(s.weight * v * v);
    }
    sol.offset = -pairwise_sum(&vw) / pairwise_sum(&vv);
    Ok(sol)
}

/// The proof of the main inequality replayed on a Neumann solution:
///
/// * (a) `∫ V (H_k − H̄)² = (n/(n−k)) (−∫ V ⟨T̊_k, Å⟩)`;
/// * (b) `∫ V |Å|² ≤ ((n−1)/n) ∫ V A²`, with slack equal to the Reilly terms
///   dropped by the proof;
/// * (c) Cauchy–Schwarz and `A = H_k − H̄` give back the main inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofChain {
    pub k: usize,
    /// `∫ V (H_k − H̄)²`.
    pub identity_lhs: f64,
    /// `(n/(n−k)) (−∫ V ⟨T̊_k, Å⟩)`.
    pub identity_rhs: f64,
    /// `∫ V |Å|²`.
    pub traceless_norm: f64,
    /// `∫ V A²`.
    pub trace_norm: f64,
    /// `((n−1)/n) ∫ V A² − ∫ V |Å|²`.
    pub slack: f64,
    /// `∫ S(X, X) + ∫_∂ V (h^∂ − (V_μ/V) g)(X̃, X̃)`.
    pub discarded: f64,
    /// The boundary term killed by the Robin condition.
    pub robin_term: f64,
    /// `∫ V |T̊_k|²`.
    pub tensor_norm: f64,
    /// `(n/(n−k)) (∫ V |T̊_k|²)^{1/2} (∫ V |Å|²)^{1/2}`.
    pub holder_bound: f64,
    /// `n(n−1)/(n−k)² ∫ V |T̊_k|²`.
    pub final_rhs: f64,
    /// `∫ V (A − (H_k − H̄))²` relative to `∫ V (H_k − H̄)²`.
    pub pde_gap: f64,
    /// The main inequality checked directly on the same hypersurface.
    pub main: InequalityCheck,
    /// Whether the hypotheses of the main inequality hold.
    pub applicable: bool,
}

impl ProofChain {
    /// Relative gap in step (a).
    pub fn step_a(&self) -> f64 {
        rel_gap(self.identity_lhs, self.identity_rhs)
    }

    /// Relative gap between the slack of step (b) and the dropped terms.
    pub fn step_b(&self) -> f64 {
        abs(self.slack - self.discarded) / self.trace_norm.max(self.traceless_norm).max(f64::MIN_POSITIVE)
    }

    /// Largest relative gap between the chain's end points and the direct
    /// evaluation of the main inequality.
    pub fn step_c(&self) -> f64 {
        rel_gap(self.identity_lhs, self.main.lhs).max(rel_gap(self.final_rhs, self.main.rhs))
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    let s = abs(a).max(abs(b));
    if s > 0.0 {
        abs(a - b) / s
    } else {
        0.0
    }
}

/// Replays the proof chain for `sol` with the quadrature `quad`.
pub fn proof_chain_check(sol: &NeumannSolution, quad: &QuadratureSpec, tol: &Tolerances) -> Result<ProofChain> {
    let imm = &sol.imm;
    let n = imm.dim();
    let k = sol.k;
    let nf = n as f64;
    let c = nf / (n - k) as f64;
    let samples = sample(imm, quad)?;
    let one = ConstantField(1.0);
    let (mut f2, mut inner, mut tl, mut tr, mut sub, mut tn, mut gap) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for s in &samples {
        let fr = &s.frame;
        let vj = match sol.weight.as_ref() {
            Some(p) => p.jet(imm, fr)?,
            None => one.jet(imm, fr)?,
        };
        let fj = sol.jet(imm, fr)?;
        let v = vj.value;
        let src = fr.mean[k] - sol.mean;
        let ratio = fj.value / v;
        let a = fj.hess.sub(&vj.hess.scale(ratio));
        let tra = a.trace();
        let diag: Vec<f64> = (0..n).map(|i| fr.h[(i, i)]).collect();
        let tk = traceless_newton_eigenvalues(&diag, k);
        let a_tl: Vec<f64> = (0..n).map(|i| a[(i, i)] - tra / nf).collect();
        let w = s.weight * v;
        f2.push(w * src * src);
        inner.push(w * dot(&tk, &a_tl));
        tl.push(w * dot(&a_tl, &a_tl));
        tr.push(w * tra * tra);
        tn.push(w * dot(&tk, &tk));
        gap.push(w * (tra - src) * (tra - src));
        sub.push(s.weight * bulk_terms(fr, imm.space(), &fj, &vj).2);
    }
    let identity_lhs = pairwise_sum(&f2);
    let traceless_norm = pairwise_sum(&tl);
    let trace_norm = pairwise_sum(&tr);
    let tensor_norm = pairwise_sum(&tn);
    let weight: &dyn SurfaceField = match sol.weight.as_ref() {
        Some(p) => p,
        None => &one,
    };
    let (boundary_h, robin_term) = super::boundary_integrals(imm, sol, weight, quad)?;
    let main = check_main_inequality(imm, k, sol.weight.as_ref(), quad, tol)?;
    let mut applicable = main.hypotheses.free_boundary_pos <= tol.contact && main.hypotheses.free_boundary_angle <= tol.contact;
    match sol.weight.as_ref() {
        None => applicable &= common_hypotheses(imm, &samples).ricci_min >= -tol.gate,
        Some(p) => {
            for s in &samples {
                applicable &= substatic_min(&s.frame, p)? >= -tol.gate;
            }
            applicable &= main.hypotheses.half_ball == Some(true);
        }
    }
    Ok(ProofChain {
        k,
        identity_lhs,
        identity_rhs: -c * pairwise_sum(&inner),
        traceless_norm,
        trace_norm,
        slack: (nf - 1.0) / nf * trace_norm - traceless_norm,
        discarded: pairwise_sum(&sub) + boundary_h,
        robin_term,
        tensor_norm,
        holder_bound: c * sqrt(tensor_norm) * sqrt(traceless_norm),
        final_rhs: c * (nf - 1.0) / (n - k) as f64 * tensor_norm,
        pde_gap: if identity_lhs > 0.0 {
            pairwise_sum(&gap) / identity_lhs
        } else {
            pairwise_sum(&gap)
        },
        main,
        applicable,
    })
}
