//! Pointwise algebra of the shape operator.
//!
//! `H_k` is the (unnormalized) k-th elementary symmetric polynomial of the
//! principal curvatures, so `H_1 = tr W` and at `κ = (1,…,1)` the values are
//! binomial coefficients. Newton tensors are mixed `(1,1)` tensors built by
//! `T_0 = I`, `T_m = H_m I − T_{m−1} W`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, generalized_eigenvalues, Mat};

/// `g·W` must be symmetric to this (relative) tolerance.
pub const SELF_ADJOINT_TOL: f64 = 1e-10;

/// κ is umbilic when `max |κ_i − mean| ≤ UMBILIC_TOL (1 + |mean|)`.
pub const UMBILIC_TOL: f64 = 1e-9;

/// `(H_0, …, H_n)` from the coefficients of `∏ (1 + κ_i t)`.
pub fn mean_curvatures(kappa: &[f64]) -> Vec<f64> {
    let n = kappa.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (i, k) in kappa.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] += k * e[j - 1];
        }
    }
    e
}

/// Eigenvalues of the Newton tensor `T_m` in a principal frame: entry `i` is
/// `σ_m` of κ with `κ_i` removed.
pub fn newton_eigenvalues(kappa: &[f64], m: usize) -> Vec<f64> {
    let h = mean_curvatures(kappa);
    let mut t = vec![1.0; kappa.len()];
    for j in 1..=m {
        for (ti, ki) in t.iter_mut().zip(kappa) {
            *ti = h[j] - ki * *ti;
        }
    }
    t
}

/// Eigenvalues of `T̊_m = T_m − ((n−m) H_m / n) I` in a principal frame.
pub fn traceless_newton_eigenvalues(kappa: &[f64], m: usize) -> Vec<f64> {
    let n = kappa.len();
    let h = mean_curvatures(kappa);
    let shift = (n - m) as f64 * h[m] / n as f64;
    newton_eigenvalues(kappa, m).into_iter().map(|t| t - shift).collect()
}

/// Shape-operator algebra at one point.
#[derive(Clone, Debug)]
pub struct SymmetricState {
    /// Mixed shape operator `W = g⁻¹ h`.
    pub shape_operator: Mat,
    pub metric: Mat,
    /// Principal curvatures, ascending.
    pub kappa: Vec<f64>,
    /// `H_0 … H_n`.
    pub mean: Vec<f64>,
    /// `T_0 … T_{n−1}` as mixed tensors.
    pub newton: Vec<Mat>,
}

impl SymmetricState {
    /// From the covariant second fundamental form `h` and the metric `g`.
    pub fn from_forms(h: &Mat, g: &Mat) -> Result<Self> {
        let g_inv = g
            .spd_inverse()
            .ok_or_else(|| Error::Degenerate("metric is not positive definite".into()))?;
        Self::new(&g_inv.mul(h), g)
    }

    /// From the mixed shape operator `W` and the metric `g`.
    pub fn new(w: &Mat, g: &Mat) -> Result<Self> {
        let n = w.rows();
        if n < 1 || !w.is_square() || g.rows() != n || !g.is_square() {
            return Err(Error::Domain("shape operator and metric must be square of equal size".into()));
        }
        let h = g.mul(w);
        let scale = h.max_abs().max(1.0);
        let asym = h.asymmetry();
        if asym > SELF_ADJOINT_TOL * scale {
            return Err(Error::Asymmetry(asym));
        }
        let kappa = generalized_eigenvalues(&h.symmetrized(), g)
            .ok_or_else(|| Error::Degenerate("metric is not positive definite".into()))?;
        let mean = mean_curvatures(&kappa);
        let newton = newton_recursion(w, &mean);
        Ok(SymmetricState {
            shape_operator: w.clone(),
            metric: g.clone(),
            kappa,
            mean,
            newton,
        })
    }

    pub fn dim(&self) -> usize {
        self.kappa.len()
    }

    /// Traceless Newton tensor `T̊_m` (mixed).
    pub fn traceless(&self, m: usize) -> Mat {
        traceless_part(&self.newton[m], self.mean[m], m)
    }

    pub fn cone(&self) -> ConeReport {
        cone_report(&self.kappa)
    }

    pub fn is_umbilic(&self) -> bool {
        is_umbilic(&self.kappa)
    }
}

fn newton_recursion(w: &Mat, mean: &[f64]) -> Vec<Mat> {
    let n = w.rows();
    let mut out = Vec::with_capacity(n);
    let mut t = Mat::identity(n);
    out.push(t.clone());
    for m in 1..n {
        t = Mat::identity(n).scale(mean[m]).sub(&t.mul(w));
        out.push(t.clone());
    }
    out
}

/// Newton tensors `T_0 … T_{n−1}` of the mixed shape operator `W`.
pub fn newton_tensors(w: &Mat, g: &Mat) -> Result<Vec<Mat>> {
    Ok(SymmetricState::new(w, g)?.newton)
}

/// `T_m` straight from the generalized Kronecker delta,
/// `(T_m)^i_j = (1/m!) δ^{i i_1…i_m}_{j j_1…j_m} W^{j_1}_{i_1} ⋯ W^{j_m}_{i_m}`.
/// Cost grows factorially; meant as a reference for small `n`.
pub fn newton_tensor_by_delta(w: &Mat, m: usize) -> Mat {
    let n = w.rows();
    let mut t = Mat::zeros(n, n);
    if m >= n {
        return t;
    }
    let perms = permutations(m + 1);
    let mut factorial = 1.0;
    for j in 2..=m {
        factorial *= j as f64;
    }
    let mut upper = vec![0usize; m + 1];
    fn tuples(depth: usize, upper: &mut Vec<usize>, n: usize, visit: &mut dyn FnMut(&[usize])) {
        if depth == upper.len() {
            visit(upper);
            return;
        }
        for c in 0..n {
            if !upper[..depth].contains(&c) {
                upper[depth] = c;
                tuples(depth + 1, upper, n, visit);
            }
        }
    }
    tuples(0, &mut upper, n, &mut |up| {
        for (perm, sign) in &perms {
            let mut prod = *sign;
            for k in 1..=m {
                prod *= w[(up[perm[k]], up[k])];
            }
            t[(up[0], up[perm[0]])] += prod;
        }
    });
    t.scale(1.0 / factorial)
}

/// All permutations of `0..k` with their signs.
fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..k).collect();
    fn heap(len: usize, p: &mut Vec<usize>, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) -> f64 {
        if len <= 1 {
            out.push((p.clone(), sign));
            return sign;
        }
        let mut s = sign;
        for i in 0..len - 1 {
            s = heap(len - 1, p, s, out);
            if len.is_multiple_of(2) {
                p.swap(i, len - 1);
            } else {
                p.swap(0, len - 1);
            }
            s = -s;
        }
        heap(len - 1, p, s, out)
    }
    heap(k, &mut p, 1.0, &mut out);
    out
}

/// `T_m − ((n−m) H_m / n) I` for a mixed `T_m`.
pub fn traceless_part(t_m: &Mat, h_m: f64, m: usize) -> Mat {
    let n = t_m.rows();
    let shift = (n - m) as f64 * h_m / n as f64;
    t_m.sub(&Mat::identity(n).scale(shift))
}

/// Squared tensor norm `T^i_j T^j_i` of a g-self-adjoint mixed tensor.
pub fn mixed_norm_sq(t: &Mat) -> f64 {
    t.mul(t).trace()
}

pub fn is_umbilic(kappa: &[f64]) -> bool {
    if kappa.is_empty() {
        return true;
    }
    let mean = kappa.iter().sum::<f64>() / kappa.len() as f64;
    let dev = kappa.iter().fold(0.0f64, |m, k| m.max(abs(k - mean)));
    dev <= UMBILIC_TOL * (1.0 + abs(mean))
}

/// Membership of κ in the Garding cones `Γ_k⁺`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeReport {
    /// Largest `k` with `H_1, …, H_k > 0` (0 if `H_1 ≤ 0`).
    pub max_k: usize,
    /// `in_cone[k-1]` is membership in `Γ_k⁺`, `k = 1..=n`.
    pub in_cone: Vec<bool>,
}

impl ConeReport {
    pub fn contains(&self, k: usize) -> bool {
        k == 0 || (k <= self.in_cone.len() && self.in_cone[k - 1])
    }
}

pub fn cone_report(kappa: &[f64]) -> ConeReport {
    let h = mean_curvatures(kappa);
    let mut in_cone = Vec::with_capacity(kappa.len());
    let mut ok = true;
    let mut max_k = 0;
    for (k, hk) in h.iter().enumerate().skip(1) {
        ok = ok && *hk > 0.0;
        in_cone.push(ok);
        if ok {
            max_k = k;
        }
    }
    ConeReport { max_k, in_cone }
}

/// Both sides of `((n−k)/n) H_1 H_k ≥ (k+1) H_{k+1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonMaclaurin {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

pub fn newton_maclaurin_check(kappa: &[f64], k: usize) -> Result<NewtonMaclaurin> {
    let n = kappa.len();
    if k == 0 || k >= n {
        return Err(Error::Domain(alloc::format!("order k must lie in 1..{n}, got {k}")));
    }
    if !cone_report(kappa).contains(k) {
        return Err(Error::ConeViolation(k));
    }
    let h = mean_curvatures(kappa);
    let lhs = (n - k) as f64 / n as f64 * h[1] * h[k];
    let rhs = (k + 1) as f64 * h[k + 1];
    Ok(NewtonMaclaurin {
        lhs,
        rhs,
        slack: lhs - rhs,
    })
}

/// `(V h − V_ν g) g⁻¹ (H g − h)`, the factorized form of
/// `ΔV g − ∇²V + V Ric` for `V = V_a` on a hypersurface of a space form.
/// Inputs and output are covariant.
pub fn substatic_tensor(h: &Mat, g: &Mat, v: f64, v_normal: f64) -> Result<Mat> {
    let g_inv = g
        .spd_inverse()
        .ok_or_else(|| Error::Degenerate("metric is not positive definite".into()))?;
    let mean = g_inv.mul(h).trace();
    let left = h.scale(v).sub(&g.scale(v_normal));
    let right = g.scale(mean).sub(h);
    Ok(left.mul(&g_inv).mul(&right).symmetrized())
}
