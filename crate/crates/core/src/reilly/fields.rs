//! Scalar fields on hypersurfaces and their intrinsic derivatives.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{profile_metric, Immersion, Layout, PointFrame};
use crate::math::{dot, Mat};
use crate::spaceform::Potential;

/// A smooth function on model space with flat derivatives.
pub trait AmbientField: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn hessian(&self, x: &[f64]) -> Mat;
}

impl AmbientField for Potential {
    fn value(&self, x: &[f64]) -> f64 {
        self.value_unchecked(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        Potential::gradient(self, x)
    }

    fn hessian(&self, x: &[f64]) -> Mat {
        Potential::hessian(self, x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantField(pub f64);

impl AmbientField for ConstantField {
    fn value(&self, _: &[f64]) -> f64 {
        self.0
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        vec![0.0; x.len()]
    }

    fn hessian(&self, x: &[f64]) -> Mat {
        Mat::zeros(x.len(), x.len())
    }
}

/// `c + ⟨b, x⟩ + ½ xᵀ Q x + Σ γ_i x_i³`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialField {
    pub constant: f64,
    pub linear: Vec<f64>,
    /// Symmetric.
    pub quadratic: Mat,
    pub cubic: Vec<f64>,
}

impl PolynomialField {
    /// `|x|²` on `R^dim`.
    pub fn squared_norm(dim: usize) -> Self {
        PolynomialField {
            constant: 0.0,
            linear: vec![0.0; dim],
            quadratic: Mat::identity(dim).scale(2.0),
            cubic: vec![0.0; dim],
        }
    }
}

impl AmbientField for PolynomialField {
    fn value(&self, x: &[f64]) -> f64 {
        let qx = self.quadratic.mul_vec(x);
        let cubic: f64 = self.cubic.iter().zip(x).map(|(g, xi)| g * xi * xi * xi).sum();
        self.constant + dot(&self.linear, x) + 0.5 * dot(x, &qx) + cubic
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let qx = self.quadratic.mul_vec(x);
        (0..x.len())
            .map(|i| self.linear[i] + qx[i] + 3.0 * self.cubic[i] * x[i] * x[i])
            .collect()
    }

    fn hessian(&self, x: &[f64]) -> Mat {
        let mut h = self.quadratic.clone();
        for i in 0..x.len() {
            h[(i, i)] += 6.0 * self.cubic[i] * x[i];
        }
        h
    }
}

/// `Σ c · |x|^{2i} · z^j` with `z` the last coordinate: invariant under
/// rotations about the last axis.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AxialPolynomial {
    pub terms: Vec<(u32, u32, f64)>,
}

impl AxialPolynomial {
    /// `(F, F_q, F_z, F_qq, F_qz, F_zz)` at `q = |x|²`, `z`.
    fn partials(&self, q: f64, z: f64) -> [f64; 6] {
        let pw = |b: f64, e: i64| if e < 0 { 0.0 } else { crate::math::powi(b, e as i32) };
        let mut out = [0.0; 6];
        for &(i, j, c) in &self.terms {
            let (i, j) = (i as i64, j as i64);
            let (fi, fj) = (i as f64, j as f64);
            out[0] += c * pw(q, i) * pw(z, j);
            out[1] += c * fi * pw(q, i - 1) * pw(z, j);
            out[2] += c * fj * pw(q, i) * pw(z, j - 1);
            out[3] += c * fi * (fi - 1.0) * pw(q, i - 2) * pw(z, j);
            out[4] += c * fi * fj * pw(q, i - 1) * pw(z, j - 1);
            out[5] += c * fj * (fj - 1.0) * pw(q, i) * pw(z, j - 2);
        }
        out
    }
}

impl AmbientField for AxialPolynomial {
    fn value(&self, x: &[f64]) -> f64 {
        self.partials(dot(x, x), x[x.len() - 1])[0]
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let d = x.len();
        let p = self.partials(dot(x, x), x[d - 1]);
        let mut g: Vec<f64> = x.iter().map(|xi| 2.0 * p[1] * xi).collect();
        g[d - 1] += p[2];
        g
    }

    fn hessian(&self, x: &[f64]) -> Mat {
        let d = x.len();
        let p = self.partials(dot(x, x), x[d - 1]);
        let z = d - 1;
        Mat::from_fn(d, d, |k, l| {
            let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
            2.0 * p[1] * delta(k, l)
                + 4.0 * p[3] * x[k] * x[l]
                + 2.0 * p[4] * (x[k] * delta(l, z) + x[l] * delta(k, z))
                + p[5] * delta(k, z) * delta(l, z)
        })
    }
}

/// Value and intrinsic derivatives of a field at a frame, in the frame basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldJet {
    pub value: f64,
    /// Covariant gradient (chart partials in full layout).
    pub grad: Vec<f64>,
    /// Covariant Hessian `∇²f`.
    pub hess: Mat,
    /// Second chart partials `∂_i ∂_j f` (equal to `hess` in reduced layout).
    pub partial_hess: Mat,
    pub laplacian: f64,
}

/// A scalar field on a hypersurface.
pub trait SurfaceField: Sync {
    fn jet(&self, imm: &Immersion, frame: &PointFrame) -> Result<FieldJet>;
}

impl<T: AmbientField> SurfaceField for T {
    fn jet(&self, imm: &Immersion, frame: &PointFrame) -> Result<FieldJet> {
        ambient_jet(imm, frame, self)
    }
}

/// Metric derivatives and Christoffel symbols of a full chart.
#[derive(Clone, Debug)]
pub struct ChartConnection {
    /// `dg[k][(i, j)] = ∂_k g_ij`.
    pub dg: [Mat; 2],
    /// `gamma[k][(i, j)] = Γ^k_ij`.
    pub gamma: [Mat; 2],
}

/// Christoffel symbols of the induced metric from the chart jets:
/// `∂_k g_ij = 2 e^{2u} ⟨∇u, x_k⟩ ḡ_ij + e^{2u} (⟨x_ik, x_j⟩ + ⟨x_i, x_jk⟩)`
/// with `ḡ_ij = ⟨x_i, x_j⟩`.
pub fn chart_connection(imm: &Immersion, frame: &PointFrame) -> Result<ChartConnection> {
    let jet = imm
        .surface_jet(frame.point)
        .ok_or_else(|| Error::Unsupported("Christoffel symbols need a full chart".into()))?;
    let x = jet.x;
    let phi2 = frame.conformal_factor * frame.conformal_factor;
    let grad_u = imm.space().grad_log_factor(&x);
    let dg: [Mat; 2] = core::array::from_fn(|k| {
        let uk = dot(&grad_u, &jet.d1[k]);
        Mat::from_fn(2, 2, |i, j| {
            2.0 * phi2 * uk * dot(&jet.d1[i], &jet.d1[j])
                + phi2 * (dot(&jet.d2[i][k], &jet.d1[j]) + dot(&jet.d1[i], &jet.d2[j][k]))
        })
    });
    let gi = &frame.g_inv;
    let gamma: [Mat; 2] = core::array::from_fn(|k| {
        Mat::from_fn(2, 2, |i, j| {
            (0..2)
                .map(|l| 0.5 * gi[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]))
                .sum()
        })
    });
    Ok(ChartConnection { dg, gamma })
}

/// Intrinsic jet of an ambient field restricted to the hypersurface. In
/// reduced layout the field must be invariant under rotations about the
/// axis.
pub fn ambient_jet(imm: &Immersion, frame: &PointFrame, field: &(impl AmbientField + ?Sized)) -> Result<FieldJet> {
    let x = &frame.position;
    let value = field.value(x);
    let df = field.gradient(x);
    let d2f = field.hessian(x);
    match imm.layout() {
        Layout::Full => {
            let jet = imm
                .surface_jet(frame.point)
                .ok_or_else(|| Error::Unsupported("full layout without chart".into()))?;
            let grad: Vec<f64> = (0..2).map(|i| dot(&df, &jet.d1[i])).collect();
            let partial_hess = Mat::from_fn(2, 2, |i, j| {
                crate::math::bilinear(&d2f, &jet.d1[i], &jet.d1[j]) + dot(&df, &jet.d2[i][j])
            });
            let conn = chart_connection(imm, frame)?;
            let hess = Mat::from_fn(2, 2, |i, j| {
                partial_hess[(i, j)] - (0..2).map(|k| conn.gamma[k][(i, j)] * grad[k]).sum::<f64>()
            })
            .symmetrized();
            let laplacian = frame.g_inv.mul(&hess).trace();
            Ok(FieldJet {
                value,
                grad,
                hess,
                partial_hess,
                laplacian,
            })
        }
        Layout::Reduced(n) => {
            let t = frame.point.t;
            let j = imm
                .profile_jet(t)
                .ok_or_else(|| Error::Unsupported("reduced layout without profile".into()))?;
            let pm = profile_metric(imm, t).ok_or_else(|| Error::Unsupported("profile metric".into()))?;
            let mut xt = vec![0.0; n + 1];
            xt[0] = j.r1;
            xt[n] = j.z1;
            let mut xtt = vec![0.0; n + 1];
            xtt[0] = j.r2;
            xtt[n] = j.z2;
            let f_t = dot(&df, &xt);
            let f_tt = crate::math::bilinear(&d2f, &xt, &xt) + dot(&df, &xtt);
            Ok(profile_field_jet(value, f_t, f_tt, &pm, n))
        }
    }
}

/// Jet of a rotationally symmetric field from its `t`-derivatives.
pub(crate) fn profile_field_jet(
    value: f64,
    f_t: f64,
    f_tt: f64,
    pm: &crate::geometry::ProfileMetric,
    n: usize,
) -> FieldJet {
    let f_s = f_t / pm.sigma;
    let f_ss = (f_tt - f_s * pm.sigma_t) / (pm.sigma * pm.sigma);
    jet_from_arclength(value, f_s, f_ss, pm, n)
}

pub(crate) fn jet_from_arclength(
    value: f64,
    f_s: f64,
    f_ss: f64,
    pm: &crate::geometry::ProfileMetric,
    n: usize,
) -> FieldJet {
    let across = pm.rho_s / pm.rho * f_s;
    let mut d = vec![across; n];
    d[0] = f_ss;
    let hess = Mat::diag(&d);
    let mut grad = vec![0.0; n];
    grad[0] = f_s;
    FieldJet {
        value,
        grad,
        partial_hess: hess.clone(),
        hess,
        laplacian: f_ss + (n as f64 - 1.0) * across,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: &dyn AmbientField, x: &[f64]) {
        let h = 1e-5;
        let g = f.gradient(x);
        let hs = f.hessian(x);
        for i in 0..x.len() {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            assert!((g[i] - (f.value(&xp) - f.value(&xm)) / (2.0 * h)).abs() < 1e-8);
            let (gp, gm) = (f.gradient(&xp), f.gradient(&xm));
            for j in 0..x.len() {
                assert!((hs[(i, j)] - (gp[j] - gm[j]) / (2.0 * h)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn field_derivatives_match_finite_differences() {
        let x = [0.3, -0.2, 0.5];
        fd_check(&PolynomialField::squared_norm(3), &x);
        fd_check(
            &PolynomialField {
                constant: 1.0,
                linear: vec![0.1, 0.2, -0.3],
                quadratic: Mat::from_rows(3, 3, &[1.0, 0.2, 0.0, 0.2, -0.5, 0.1, 0.0, 0.1, 0.3]),
                cubic: vec![0.3, -0.1, 0.2],
            },
            &x,
        );
        fd_check(
            &AxialPolynomial {
                terms: vec![(0, 0, 1.0), (1, 0, 0.5), (1, 1, -0.3), (2, 0, 0.2), (0, 3, 0.4)],
            },
            &[0.3, -0.2, 0.1, 0.5],
        );
    }
}
