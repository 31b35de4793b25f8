//! Conformally flat ball models of the three space forms.
//!
//! Points are always flat-background coordinates `x ∈ R^{n+1}`; the space-form
//! metric is `e^{2u} δ` with
//!
//! | K  | e^{u}            | domain            |
//! |----|------------------|-------------------|
//! | 0  | 1                | R^{n+1}           |
//! | −1 | 2 / (1 − \|x\|²) | open unit ball    |
//! | +1 | 2 / (1 + \|x\|²) | R^{n+1} (south pole at infinity) |
//!
//! Geodesic balls are centered at the model origin.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, atan, atanh, cos, cosh, dot, norm, sinh, sqrt, tan, tanh, Mat, PI};

/// Points of the spherical model with `|x|` above this are treated as the
/// excluded south pole.
pub const SPHERICAL_CUTOFF: f64 = 1e6;

/// Relative tolerance for "this point lies on ∂B".
pub const ON_SPHERE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceForm {
    Hyperbolic,
    Euclidean,
    Spherical,
}

impl SpaceForm {
    pub const ALL: [SpaceForm; 3] = [SpaceForm::Hyperbolic, SpaceForm::Euclidean, SpaceForm::Spherical];

    pub fn from_curvature(k: i32) -> Result<Self> {
        match k {
            -1 => Ok(SpaceForm::Hyperbolic),
            0 => Ok(SpaceForm::Euclidean),
            1 => Ok(SpaceForm::Spherical),
            _ => Err(Error::Domain(format!("sectional curvature must be -1, 0 or 1, got {k}"))),
        }
    }

    /// Sectional curvature `K`.
    pub fn curvature(self) -> i32 {
        match self {
            SpaceForm::Hyperbolic => -1,
            SpaceForm::Euclidean => 0,
            SpaceForm::Spherical => 1,
        }
    }

    pub fn k(self) -> f64 {
        self.curvature() as f64
    }

    pub fn is_admissible(self, x: &[f64]) -> bool {
        let r2 = dot(x, x);
        match self {
            SpaceForm::Hyperbolic => r2 < 1.0,
            SpaceForm::Euclidean => r2.is_finite(),
            SpaceForm::Spherical => sqrt(r2) <= SPHERICAL_CUTOFF,
        }
    }

    pub fn check_admissible(self, x: &[f64]) -> Result<()> {
        if self.is_admissible(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "point with |x| = {} is outside the K = {} model",
                norm(x),
                self.curvature()
            )))
        }
    }

    /// Conformal factor `e^{u}` at `x` (the metric is `e^{2u} δ`).
    pub fn conformal_factor(self, x: &[f64]) -> f64 {
        let r2 = dot(x, x);
        match self {
            SpaceForm::Euclidean => 1.0,
            SpaceForm::Hyperbolic => 2.0 / (1.0 - r2),
            SpaceForm::Spherical => 2.0 / (1.0 + r2),
        }
    }

    /// Flat gradient of `u = log e^{u}`.
    pub fn grad_log_factor(self, x: &[f64]) -> Vec<f64> {
        let r2 = dot(x, x);
        let c = match self {
            SpaceForm::Euclidean => 0.0,
            SpaceForm::Hyperbolic => 2.0 / (1.0 - r2),
            SpaceForm::Spherical => -2.0 / (1.0 + r2),
        };
        x.iter().map(|xi| c * xi).collect()
    }

    /// Geodesic radius `R` → Euclidean radius of ∂B in model coordinates.
    pub fn radius_to_model(self, radius: f64) -> Result<f64> {
        self.check_radius(radius)?;
        Ok(match self {
            SpaceForm::Euclidean => radius,
            SpaceForm::Hyperbolic => {
                let c = cosh(radius);
                sqrt((c - 1.0) / (c + 1.0))
            }
            SpaceForm::Spherical => {
                let c = cos(radius);
                sqrt((1.0 - c) / (1.0 + c))
            }
        })
    }

    /// Inverse of [`SpaceForm::radius_to_model`].
    pub fn model_to_radius(self, model_radius: f64) -> Result<f64> {
        if !(model_radius > 0.0) || !model_radius.is_finite() {
            return Err(Error::Domain(format!("model radius must be positive, got {model_radius}")));
        }
        match self {
            SpaceForm::Euclidean => Ok(model_radius),
            SpaceForm::Hyperbolic => {
                if model_radius >= 1.0 {
                    return Err(Error::Domain(format!(
                        "hyperbolic model radius must be < 1, got {model_radius}"
                    )));
                }
                Ok(2.0 * atanh(model_radius))
            }
            SpaceForm::Spherical => Ok(2.0 * atan(model_radius)),
        }
    }

    fn check_radius(self, radius: f64) -> Result<()> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("geodesic radius must be positive, got {radius}")));
        }
        if self == SpaceForm::Spherical && radius >= PI {
            return Err(Error::Domain(format!("spherical geodesic radius must be < π, got {radius}")));
        }
        Ok(())
    }

    /// Umbilicity factor of the geodesic sphere of radius `R`:
    /// `h^{∂B} = factor · g^{∂B}` with respect to the outward normal.
    pub fn sphere_umbilicity(self, radius: f64) -> Result<f64> {
        self.check_radius(radius)?;
        Ok(match self {
            SpaceForm::Euclidean => 1.0 / radius,
            SpaceForm::Hyperbolic => 1.0 / tanh(radius),
            SpaceForm::Spherical => 1.0 / tan(radius),
        })
    }

    /// Length of the geodesic-sphere position factor `|x| e^{u}` (R, sinh R, sin R).
    pub fn sphere_warp(self, radius: f64) -> f64 {
        match self {
            SpaceForm::Euclidean => radius,
            SpaceForm::Hyperbolic => sinh(radius),
            SpaceForm::Spherical => crate::math::sin(radius),
        }
    }
}

/// Geodesic ball `B` of radius `R` centered at the model origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallDomain {
    pub space: SpaceForm,
    pub radius: f64,
    pub model_radius: f64,
}

impl BallDomain {
    pub fn new(space: SpaceForm, radius: f64) -> Result<Self> {
        let model_radius = space.radius_to_model(radius)?;
        Ok(BallDomain {
            space,
            radius,
            model_radius,
        })
    }

    pub fn from_model_radius(space: SpaceForm, model_radius: f64) -> Result<Self> {
        let radius = space.model_to_radius(model_radius)?;
        Ok(BallDomain {
            space,
            radius,
            model_radius,
        })
    }

    /// Factor in `h^{∂B} = factor · g^{∂B}`: `1/R`, `coth R`, `cot R`.
    pub fn boundary_umbilicity(&self) -> f64 {
        // radius validated at construction
        self.space.sphere_umbilicity(self.radius).unwrap_or(f64::NAN)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        norm(x) <= self.model_radius * (1.0 + ON_SPHERE_TOL)
    }

    /// Outward unit normal of ∂B at `x` (unit in the space-form metric),
    /// expressed as a flat vector.
    pub fn outward_normal(&self, x: &[f64]) -> Vec<f64> {
        let r = norm(x);
        let phi = self.space.conformal_factor(x);
        x.iter().map(|xi| xi / (r * phi)).collect()
    }
}

/// The potential `V_a` attached to a constant direction `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    space: SpaceForm,
    direction: Vec<f64>,
}

impl Potential {
    /// `direction` is normalized; a zero vector is rejected.
    pub fn new(space: SpaceForm, direction: &[f64]) -> Result<Self> {
        let len = norm(direction);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::Domain("potential direction must be a nonzero vector".into()));
        }
        Ok(Potential {
            space,
            direction: direction.iter().map(|a| a / len).collect(),
        })
    }

    /// Potential with an unnormalized direction; `V_{a+b} = V_a + V_b` holds
    /// for these.
    pub fn unnormalized(space: SpaceForm, direction: &[f64]) -> Self {
        Potential {
            space,
            direction: direction.to_vec(),
        }
    }

    pub fn space(&self) -> SpaceForm {
        self.space
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    /// Conformal weight `q` with `V_a = c ⟨x,a⟩ q`.
    fn weight(&self, r2: f64) -> (f64, f64) {
        match self.space {
            SpaceForm::Euclidean => (1.0, 1.0),
            SpaceForm::Hyperbolic => (2.0, 1.0 / (1.0 - r2)),
            SpaceForm::Spherical => (2.0, 1.0 / (1.0 + r2)),
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.space.check_admissible(x)?;
        Ok(self.value_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: &[f64]) -> f64 {
        let (c, q) = self.weight(dot(x, x));
        c * dot(x, &self.direction) * q
    }

    /// Flat gradient of `V_a`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let xa = dot(x, &self.direction);
        let r2 = dot(x, x);
        match self.space {
            SpaceForm::Euclidean => self.direction.clone(),
            SpaceForm::Hyperbolic | SpaceForm::Spherical => {
                let (c, q) = self.weight(r2);
                // ∂q = s 2x q² with s = +1 (K=−1) or −1 (K=+1)
                let s = if self.space == SpaceForm::Hyperbolic { 1.0 } else { -1.0 };
                self.direction
                    .iter()
                    .zip(x)
                    .map(|(a, xi)| c * (a * q + xa * s * 2.0 * xi * q * q))
                    .collect()
            }
        }
    }

    /// Flat Hessian of `V_a`.
    pub fn hessian(&self, x: &[f64]) -> Mat {
        let d = x.len();
        match self.space {
            SpaceForm::Euclidean => Mat::zeros(d, d),
            SpaceForm::Hyperbolic | SpaceForm::Spherical => {
                let r2 = dot(x, x);
                let xa = dot(x, &self.direction);
                let (c, q) = self.weight(r2);
                let s = if self.space == SpaceForm::Hyperbolic { 1.0 } else { -1.0 };
                let a = &self.direction;
                Mat::from_fn(d, d, |i, j| {
                    let dq_i = s * 2.0 * x[i] * q * q;
                    let dq_j = s * 2.0 * x[j] * q * q;
                    let delta = if i == j { 1.0 } else { 0.0 };
                    let ddq = s * 2.0 * delta * q * q + 8.0 * x[i] * x[j] * q * q * q;
                    c * (a[i] * dq_j + a[j] * dq_i + xa * ddq)
                })
            }
        }
    }

    /// Derivative of `V_a` along a flat vector `v` (for a space-form unit
    /// vector this is the normal derivative `(V_a)_v`).
    pub fn derivative(&self, x: &[f64], v: &[f64]) -> f64 {
        dot(&self.gradient(x), v)
    }

    /// `x ∈ B_{a+}`: `V_a(x) > 0` and `x` in the closed ball.
    pub fn half_ball_membership(&self, ball: &BallDomain, x: &[f64]) -> bool {
        self.space.is_admissible(x) && self.value_unchecked(x) > 0.0 && ball.contains(x)
    }

    /// `(V_a)_{N̄} / V_a` at a point of ∂B, with `N̄` the outward unit normal of ∂B.
    pub fn boundary_ratio(&self, ball: &BallDomain, x: &[f64]) -> Result<f64> {
        self.space.check_admissible(x)?;
        let r = norm(x);
        if abs(r - ball.model_radius) > ON_SPHERE_TOL * ball.model_radius.max(1.0) {
            return Err(Error::Domain(format!(
                "point is not on ∂B: |x| = {r}, model radius {}",
                ball.model_radius
            )));
        }
        let v = self.value_unchecked(x);
        if v == 0.0 || abs(v) < 1e-300 {
            return Err(Error::Degenerate("V_a vanishes at the boundary point".into()));
        }
        let n_bar = ball.outward_normal(x);
        Ok(self.derivative(x, &n_bar) / v)
    }
}

/// `R → R_model`, free-function form.
pub fn radius_to_model(space: SpaceForm, radius: f64) -> Result<f64> {
    space.radius_to_model(radius)
}

/// Umbilicity factor of ∂B.
pub fn boundary_sphere_shape_operator(ball: &BallDomain) -> f64 {
    ball.boundary_umbilicity()
}

pub fn potential_value(potential: &Potential, x: &[f64]) -> Result<f64> {
    potential.value(x)
}

pub fn half_ball_membership(potential: &Potential, ball: &BallDomain, x: &[f64]) -> bool {
    potential.half_ball_membership(ball, x)
}

pub fn boundary_potential_ratio(potential: &Potential, ball: &BallDomain, x: &[f64]) -> Result<f64> {
    potential.boundary_ratio(ball, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn radius_conversion_examples() {
        assert_eq!(SpaceForm::Euclidean.radius_to_model(2.0).unwrap(), 2.0);
        let s = SpaceForm::Spherical.radius_to_model(PI / 2.0).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        let h = SpaceForm::Hyperbolic.radius_to_model(1.0).unwrap();
        assert!((h - 0.4621171573).abs() < 1e-10);
        assert!((h - (0.5f64).tanh()).abs() < 1e-15);
    }

    #[test]
    fn radius_conversion_rejects_bad_radii() {
        assert!(SpaceForm::Euclidean.radius_to_model(0.0).is_err());
        assert!(SpaceForm::Hyperbolic.radius_to_model(-1.0).is_err());
        assert!(SpaceForm::Spherical.radius_to_model(PI).is_err());
        assert!(SpaceForm::Hyperbolic.model_to_radius(1.0).is_err());
    }

    #[test]
    fn potential_examples() {
        let a = [1.0, 0.0, 0.0];
        let hyp = Potential::new(SpaceForm::Hyperbolic, &a).unwrap();
        assert_eq!(hyp.value(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!((hyp.value(&[0.5, 0.0, 0.0]).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!(hyp.value(&[1.0, 0.0, 0.0]).is_err());
        let flat = Potential::new(SpaceForm::Euclidean, &a).unwrap();
        assert!((flat.value(&[0.3, 0.0, 0.4]).unwrap() - 0.3).abs() < 1e-16);
    }

    #[test]
    fn half_ball_examples() {
        let ball = BallDomain::new(SpaceForm::Euclidean, 1.0).unwrap();
        let p = Potential::new(SpaceForm::Euclidean, &[0.0, 0.0, 1.0]).unwrap();
        assert!(!p.half_ball_membership(&ball, &[0.0, 0.0, 0.0]));
        assert!(!p.half_ball_membership(&ball, &[0.0, 0.0, -0.5]));
        assert!(p.half_ball_membership(&ball, &[0.0, 0.1, 0.5]));
        assert!(!p.half_ball_membership(&ball, &[0.0, 0.0, 1.5]));
    }

    #[test]
    fn umbilicity_table() {
        let e = BallDomain::new(SpaceForm::Euclidean, 2.0).unwrap();
        assert_eq!(e.boundary_umbilicity(), 0.5);
        let h = BallDomain::new(SpaceForm::Hyperbolic, 1.0).unwrap();
        assert!((h.boundary_umbilicity() - 1.3130352855).abs() < 1e-10);
        let s = BallDomain::new(SpaceForm::Spherical, PI / 2.0).unwrap();
        assert!(s.boundary_umbilicity().abs() < 1e-15);
    }

    #[test]
    fn boundary_ratio_matches_umbilicity() {
        for (space, r) in [
            (SpaceForm::Euclidean, 2.0),
            (SpaceForm::Hyperbolic, 1.0),
            (SpaceForm::Spherical, PI / 2.0),
            (SpaceForm::Spherical, 2.5),
        ] {
            let ball = BallDomain::new(space, r).unwrap();
            let p = Potential::new(space, &[0.3, -0.2, 0.9]).unwrap();
            let rm = ball.model_radius;
            let dir = [0.6, 0.0, 0.8];
            let x: Vec<f64> = dir.iter().map(|d| d * rm).collect();
            let ratio = p.boundary_ratio(&ball, &x).unwrap();
            assert!(
                (ratio - ball.boundary_umbilicity()).abs() < 1e-10 * (1.0 + ratio.abs()),
                "{space:?}: {ratio} vs {}",
                ball.boundary_umbilicity()
            );
        }
    }

    #[test]
    fn boundary_ratio_errors() {
        let ball = BallDomain::new(SpaceForm::Euclidean, 1.0).unwrap();
        let p = Potential::new(SpaceForm::Euclidean, &[1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(p.boundary_ratio(&ball, &[0.0, 1.0, 0.0]), Err(Error::Degenerate(_))));
        assert!(matches!(p.boundary_ratio(&ball, &[0.5, 0.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn potential_derivatives_match_finite_differences() {
        let x = vec![0.2, -0.1, 0.3];
        for space in SpaceForm::ALL {
            let p = Potential::new(space, &[0.2, 0.5, -0.4]).unwrap();
            let g = p.gradient(&x);
            let hess = p.hessian(&x);
            let h = 1e-5;
            for i in 0..3 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (p.value_unchecked(&xp) - p.value_unchecked(&xm)) / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-8, "{space:?} grad {i}");
                let gp = p.gradient(&xp);
                let gm = p.gradient(&xm);
                for j in 0..3 {
                    let fd2 = (gp[j] - gm[j]) / (2.0 * h);
                    assert!((fd2 - hess[(i, j)]).abs() < 1e-7, "{space:?} hess {i}{j}");
                }
            }
        }
    }
}
