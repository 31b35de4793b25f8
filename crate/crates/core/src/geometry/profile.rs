//! Profile curves `t ↦ (r(t), z(t))`, `t ∈ [0, 1]`, of rotationally
//! symmetric hypersurfaces `x = r ω + z a`, `ω ∈ S^{n−1} ⊥ a`.
//!
//! Every profile is smooth across the axis: `r` is odd and `z` even in `t`
//! near `t = 0` (and near `t = 1` for closed profiles).

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, cos, sin, sqrt, Mat, PI};

/// Profile values with first and second `t`-derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ProfileJet {
    pub r: f64,
    pub r1: f64,
    pub r2: f64,
    pub z: f64,
    pub z1: f64,
    pub z2: f64,
}

impl ProfileJet {
    pub fn speed(&self) -> f64 {
        sqrt(self.r1 * self.r1 + self.z1 * self.z1)
    }

    fn add(mut self, other: &ProfileJet) -> ProfileJet {
        self.r += other.r;
        self.r1 += other.r1;
        self.r2 += other.r2;
        self.z += other.z;
        self.z1 += other.z1;
        self.z2 += other.z2;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    /// Arc of the circle of radius `rho` centered at `(0, center)`, from the
    /// point nearest the origin (`t = 0`) through angle `angle`.
    Cap { rho: f64, center: f64, angle: f64 },
    /// Segment `r = radius · t`, `z = 0`.
    Disk { radius: f64 },
    /// `base + Σ r_terms[j] t^{2j+3} ω + Σ z_terms[j] t^{2j+2} a`.
    Perturbed {
        base: Box<Profile>,
        r_terms: Vec<f64>,
        z_terms: Vec<f64>,
    },
    /// Closed surface `ρ(φ)(sin φ ω + cos φ a)`, `φ = π t`, with
    /// `ρ = model_radius (1 + Σ terms[j] cos^{j+1} φ)`.
    Sphere { model_radius: f64, terms: Vec<f64> },
}

impl Profile {
    pub fn is_closed(&self) -> bool {
        matches!(self, Profile::Sphere { .. })
    }

    pub fn jet(&self, t: f64) -> ProfileJet {
        match self {
            Profile::Cap { rho, center, angle } => {
                let (s, c) = (sin(angle * t), cos(angle * t));
                ProfileJet {
                    r: rho * s,
                    r1: rho * angle * c,
                    r2: -rho * angle * angle * s,
                    z: center - rho * c,
                    z1: rho * angle * s,
                    z2: rho * angle * angle * c,
                }
            }
            Profile::Disk { radius } => ProfileJet {
                r: radius * t,
                r1: *radius,
                ..ProfileJet::default()
            },
            Profile::Perturbed {
                base,
                r_terms,
                z_terms,
            } => base.jet(t).add(&perturbation_jet(r_terms, z_terms, t)),
            Profile::Sphere { model_radius, terms } => sphere_jet(*model_radius, terms, t),
        }
    }
}

fn monomial(p: i32, t: f64) -> (f64, f64, f64) {
    let pf = p as f64;
    let v = crate::math::powi(t, p);
    let d1 = if p >= 1 { pf * crate::math::powi(t, p - 1) } else { 0.0 };
    let d2 = if p >= 2 { pf * (pf - 1.0) * crate::math::powi(t, p - 2) } else { 0.0 };
    (v, d1, d2)
}

fn perturbation_jet(r_terms: &[f64], z_terms: &[f64], t: f64) -> ProfileJet {
    let mut j = ProfileJet::default();
    for (i, c) in r_terms.iter().enumerate() {
        let (v, d1, d2) = monomial(2 * i as i32 + 3, t);
        j.r += c * v;
        j.r1 += c * d1;
        j.r2 += c * d2;
    }
    for (i, c) in z_terms.iter().enumerate() {
        let (v, d1, d2) = monomial(2 * i as i32 + 2, t);
        j.z += c * v;
        j.z1 += c * d1;
        j.z2 += c * d2;
    }
    j
}

fn sphere_jet(model_radius: f64, terms: &[f64], t: f64) -> ProfileJet {
    let phi = PI * t;
    let (s, c) = (sin(phi), cos(phi));
    // q(c) = Σ terms[j] c^{j+1}
    let (mut q, mut dq, mut ddq) = (0.0, 0.0, 0.0);
    for (j, a) in terms.iter().enumerate() {
        let (v, d1, d2) = monomial(j as i32 + 1, c);
        q += a * v;
        dq += a * d1;
        ddq += a * d2;
    }
    let rho = model_radius * (1.0 + q);
    let rho1 = -model_radius * dq * s;
    let rho2 = model_radius * (ddq * s * s - dq * c);
    let (p1, p2) = (PI, PI * PI);
    ProfileJet {
        r: rho * s,
        r1: p1 * (rho1 * s + rho * c),
        r2: p2 * (rho2 * s + 2.0 * rho1 * c - rho * s),
        z: rho * c,
        z1: p1 * (rho1 * c - rho * s),
        z2: p2 * (rho2 * c - 2.0 * rho1 * s - rho * c),
    }
}

/// Base cap meeting `|x| = model_radius` orthogonally: circle of radius
/// `rho` centered at `sqrt(rho² + R²) a`.
pub fn cap_profile(rho: f64, model_radius: f64) -> Profile {
    let center = sqrt(rho * rho + model_radius * model_radius);
    // contact where cos(angle) = rho / center
    let angle = crate::math::acos(rho / center);
    Profile::Cap { rho, center, angle }
}

/// Residuals of the contact conditions at `t = 1`: `|x|² − R²` and the
/// cross product of position and tangent.
fn contact_residual(p: &Profile, model_radius: f64) -> [f64; 2] {
    let j = p.jet(1.0);
    [
        j.r * j.r + j.z * j.z - model_radius * model_radius,
        j.r * j.z1 - j.z * j.r1,
    ]
}

/// Adds `β t³` to `r` and `α t²` to `z` so the profile ends on the circle of
/// radius `model_radius` and meets it orthogonally. Newton iteration on the
/// two contact conditions.
pub fn project_contact(mut base_r: Vec<f64>, mut base_z: Vec<f64>, base: Profile, model_radius: f64) -> Result<Profile> {
    if base_r.is_empty() {
        base_r.push(0.0);
    }
    if base_z.is_empty() {
        base_z.push(0.0);
    }
    let scale = model_radius * model_radius;
    let mut profile = Profile::Perturbed {
        base: Box::new(base),
        r_terms: base_r,
        z_terms: base_z,
    };
    for _ in 0..50 {
        let res = contact_residual(&profile, model_radius);
        if abs(res[0]) <= 1e-15 * scale && abs(res[1]) <= 1e-15 * scale {
            return Ok(profile);
        }
        let j = profile.jet(1.0);
        // d/dα: z += 1, z1 += 2 ; d/dβ: r += 1, r1 += 3
        let jac = Mat::from_rows(
            2,
            2,
            &[2.0 * j.z, 2.0 * j.r, 2.0 * j.r - j.r1, j.z1 - 3.0 * j.z],
        );
        let step = jac
            .solve(&[-res[0], -res[1]])
            .ok_or_else(|| Error::ConstraintProjection("contact correction system is singular".into()))?;
        if let Profile::Perturbed { r_terms, z_terms, .. } = &mut profile {
            z_terms[0] += step[0];
            r_terms[0] += step[1];
        }
    }
    let res = contact_residual(&profile, model_radius);
    if abs(res[0]) <= 1e-12 * scale && abs(res[1]) <= 1e-12 * scale {
        Ok(profile)
    } else {
        Err(Error::ConstraintProjection(format!(
            "contact correction did not converge (residuals {:.3e}, {:.3e})",
            res[0], res[1]
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(p: &Profile) {
        let h = 1e-5;
        for t in [0.1, 0.37, 0.8] {
            let j = p.jet(t);
            let (jp, jm) = (p.jet(t + h), p.jet(t - h));
            assert!((j.r1 - (jp.r - jm.r) / (2.0 * h)).abs() < 1e-7);
            assert!((j.z1 - (jp.z - jm.z) / (2.0 * h)).abs() < 1e-7);
            assert!((j.r2 - (jp.r1 - jm.r1) / (2.0 * h)).abs() < 1e-6);
            assert!((j.z2 - (jp.z1 - jm.z1) / (2.0 * h)).abs() < 1e-6);
        }
    }

    #[test]
    fn jets_match_finite_differences() {
        fd_check(&cap_profile(0.7, 1.0));
        fd_check(&Profile::Disk { radius: 2.0 });
        fd_check(&Profile::Sphere {
            model_radius: 0.5,
            terms: vec![0.1, -0.05, 0.02],
        });
        fd_check(&Profile::Perturbed {
            base: Box::new(cap_profile(1.0, 1.0)),
            r_terms: vec![0.05, -0.01],
            z_terms: vec![0.02, 0.03],
        });
    }

    #[test]
    fn cap_profile_meets_the_sphere_orthogonally() {
        for (rho, rm) in [(0.3, 1.0), (1.0, 1.0), (5.0, 0.4), (0.2, 3.0)] {
            let res = contact_residual(&cap_profile(rho, rm), rm);
            let scale = rho * rho + rm * rm;
            assert!(res[0].abs() < 1e-14 * scale && res[1].abs() < 1e-14 * scale);
        }
    }

    #[test]
    fn projection_restores_contact() {
        let p = project_contact(vec![0.03], vec![0.05, -0.02], cap_profile(1.2, 1.0), 1.0).unwrap();
        let res = contact_residual(&p, 1.0);
        assert!(res[0].abs() < 1e-14 && res[1].abs() < 1e-14);
        let d = project_contact(vec![], vec![0.0, 0.04], Profile::Disk { radius: 1.0 }, 1.0).unwrap();
        let res = contact_residual(&d, 1.0);
        assert!(res[0].abs() < 1e-14 && res[1].abs() < 1e-14);
    }
}
