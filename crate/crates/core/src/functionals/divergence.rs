//! Weak-form check that Newton tensors are divergence free.
//!
//! For a vector field `X` vanishing on `∂Σ`, `div T_m = 0` is equivalent to
//! `∫ ⟨T_m, ∇X⟩ = 0`, and `div T̊_m = −((n−m)/n) ∇H_m` to
//! `∫ ⟨T̊_m, ∇X⟩ + ((n−m)/n) ∫ H_m div X = 0`. On rotationally symmetric
//! hypersurfaces the test fields are `X = ψ(t) ∂_s` along the profile.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{frame_at, profile_metric, ChartPoint, Immersion, Layout};
use crate::math::{abs, pairwise_sum, powi, sphere_area};
use crate::quadrature::QuadratureSpec;
use crate::symalg::newton_eigenvalues;

/// Largest relative weak-form residuals over the test fields.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DivergenceResidual {
    pub newton: f64,
    pub traceless: f64,
}

impl DivergenceResidual {
    pub fn max(&self) -> f64 {
        self.newton.max(self.traceless)
    }
}

/// Test profiles `ψ = t²(1−t)² p(t)`, with `ψ` and `ψ'`.
fn test_fields() -> Vec<impl Fn(f64) -> (f64, f64)> {
    (0..3)
        .map(|j: i32| {
            move |t: f64| {
                let jf = j as f64;
                let u = t * t * (1.0 - t) * (1.0 - t);
                let du = 2.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
                let p = powi(t, j);
                let dp = if j == 0 { 0.0 } else { jf * powi(t, j - 1) };
                (u * p, du * p + u * dp)
            }
        })
        .collect()
}

/// Weak divergence residuals of `T_m` and `T̊_m` for a profile hypersurface.
pub fn divergence_free_check(imm: &Immersion, m: usize, quad: &QuadratureSpec) -> Result<DivergenceResidual> {
    let n = imm.dim();
    if m >= n {
        return Err(Error::Domain(alloc::format!("Newton tensor order must be below {n}")));
    }
    if imm.profile().is_none() {
        return Err(Error::Unsupported("divergence check needs a rotationally symmetric hypersurface".into()));
    }
    let nf = n as f64;
    let c = (n - m) as f64 / nf;
    let rule = quad.rule(0.0, 1.0);
    let orbit = sphere_area(n - 1);
    // the adapted frame of the reduced layout diagonalizes h
    let reduced = match (imm.layout(), imm.profile()) {
        (Layout::Full, Some(p)) => Some(Immersion::from_profile(
            imm.space(),
            imm.ball().copied(),
            p.clone(),
            Layout::Reduced(2),
            imm.kind(),
        )?),
        _ => None,
    };
    let src = reduced.as_ref().unwrap_or(imm);
    let mut nodes = Vec::with_capacity(rule.len());
    for (t, w) in rule.iter() {
        let pm = profile_metric(imm, t).ok_or_else(|| Error::Unsupported("profile required".into()))?;
        let f = frame_at(src, ChartPoint::new(t, 0.0))?;
        let (k1, k2) = (f.h[(0, 0)], f.h[(1, 1)]);
        let mut kappa = alloc::vec![k2; n];
        kappa[0] = k1;
        let t_m = newton_eigenvalues(&kappa, m);
        let h_m = crate::symalg::mean_curvatures(&kappa)[m];
        let da = w * orbit * pm.sigma * powi(pm.rho, (n - 1) as i32);
        nodes.push((t, da, pm, t_m, h_m));
    }
    let mut out = DivergenceResidual::default();
    for psi in test_fields() {
        let (mut plain, mut plain_abs, mut tl, mut tl_abs) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (t, da, pm, t_m, h_m) in &nodes {
            let (v, dv) = psi(*t);
            let along = dv / pm.sigma;
            let across = v * pm.rho_s / pm.rho;
            let a = t_m[0] * along;
            let b = t_m[1] * (nf - 1.0) * across;
            plain.push((a + b) * da);
            plain_abs.push((abs(a) + abs(b)) * da);
            let shift = c * h_m;
            let div = along + (nf - 1.0) * across;
            let ta = (t_m[0] - shift) * along;
            let tb = (t_m[1] - shift) * (nf - 1.0) * across;
            let tc = c * h_m * div;
            tl.push((ta + tb + tc) * da);
            tl_abs.push((abs(ta) + abs(tb) + abs(tc)) * da);
        }
        let rel = |num: &[f64], den: &[f64]| {
            let d = pairwise_sum(den);
            if d > 0.0 {
                abs(pairwise_sum(num)) / d
            } else {
                0.0
            }
        };
        out.newton = out.newton.max(rel(&plain, &plain_abs));
        out.traceless = out.traceless.max(rel(&tl, &tl_abs));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_cap, make_closed_sphere, make_profile_shape, BaseShape, Perturbation};
    use crate::spaceform::{BallDomain, SpaceForm};

    #[test]
    fn identity_tensor_is_exact() {
        let b = BallDomain::new(SpaceForm::Spherical, 1.0).unwrap();
        let pert = Perturbation {
            r: vec![0.1],
            z: vec![0.2],
        };
        let imm = make_profile_shape(SpaceForm::Spherical, &b, BaseShape::Disk, &pert, 0.3, Layout::Reduced(3)).unwrap();
        let r = divergence_free_check(&imm, 0, &QuadratureSpec::default()).unwrap();
        assert!(r.newton < 1e-13, "{r:?}");
    }

    #[test]
    fn umbilic_caps_are_divergence_free() {
        for space in SpaceForm::ALL {
            let b = BallDomain::new(space, 1.0).unwrap();
            let cap = make_cap(space, &b, 0.9 * b.model_radius, Layout::Reduced(3)).unwrap();
            for m in 0..3 {
                let r = divergence_free_check(&cap, m, &QuadratureSpec::default()).unwrap();
                assert!(r.max() < 1e-10, "{space:?} m={m} {r:?}");
            }
        }
    }

    #[test]
    fn perturbed_profiles_converge() {
        let b = BallDomain::new(SpaceForm::Hyperbolic, 1.0).unwrap();
        let pert = Perturbation {
            r: vec![0.2, 0.1],
            z: vec![0.3, -0.2],
        };
        let imm = make_profile_shape(SpaceForm::Hyperbolic, &b, BaseShape::Cap(0.5), &pert, 0.3, Layout::Reduced(4))
            .unwrap();
        for m in 1..4 {
            let coarse = divergence_free_check(&imm, m, &QuadratureSpec::new(3, 1)).unwrap().max();
            let fine = divergence_free_check(&imm, m, &QuadratureSpec::new(3, 2)).unwrap().max();
            let best = divergence_free_check(&imm, m, &QuadratureSpec::default()).unwrap().max();
            assert!(coarse / fine >= 8.0, "m={m}: {coarse} {fine}");
            assert!(best < 1e-11, "{best}");
        }
        let s = make_closed_sphere(SpaceForm::Euclidean, 1.0, &[0.2, 0.1], 0.5, Layout::Reduced(3)).unwrap();
        assert!(divergence_free_check(&s, 1, &QuadratureSpec::default()).unwrap().max() < 1e-11);
    }
}
