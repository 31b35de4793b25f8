//! Generators for the test shapes.

use alloc::format;
use alloc::vec::Vec;

use super::profile::{cap_profile, project_contact, Profile};
use super::{Immersion, Layout, ShapeKind};
use crate::error::{Error, Result};
use crate::math::{abs, sqrt};
use crate::spaceform::{BallDomain, SpaceForm};

/// Largest accepted perturbation amplitude.
pub const MAX_AMPLITUDE: f64 = 0.5;

/// Unperturbed free-boundary shape underlying a profile perturbation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BaseShape {
    /// Cap on a model sphere of this Euclidean radius.
    Cap(f64),
    Disk,
}

/// Profile perturbation coefficients. `r[j]` multiplies `t^{2j+3}` in the
/// radial component and `z[j]` multiplies `t^{2j+2}` in the axial one, both
/// in units of the model radius of the ball.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Perturbation {
    pub r: Vec<f64>,
    pub z: Vec<f64>,
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("cap radius must be positive and finite, got {rho}")));
    }
    Ok(())
}

fn base_profile(base: BaseShape, ball: &BallDomain) -> Result<Profile> {
    match base {
        BaseShape::Cap(rho) => {
            check_rho(rho)?;
            Ok(cap_profile(rho, ball.model_radius))
        }
        BaseShape::Disk => Ok(Profile::Disk {
            radius: ball.model_radius,
        }),
    }
}

/// Piece of the model sphere of Euclidean radius `rho` centered at
/// `sqrt(rho² + R_model²) a` inside the ball. It meets `∂B` orthogonally and
/// is umbilic in every space form.
pub fn make_cap(space: SpaceForm, ball: &BallDomain, rho: f64, layout: Layout) -> Result<Immersion> {
    check_ball(space, ball)?;
    check_rho(rho)?;
    Immersion::from_profile(
        space,
        Some(*ball),
        cap_profile(rho, ball.model_radius),
        layout,
        ShapeKind::Cap,
    )
}

/// Totally geodesic disk through the center of the ball, orthogonal to the
/// axis.
pub fn make_flat_disk(space: SpaceForm, ball: &BallDomain, layout: Layout) -> Result<Immersion> {
    check_ball(space, ball)?;
    Immersion::from_profile(
        space,
        Some(*ball),
        Profile::Disk {
            radius: ball.model_radius,
        },
        layout,
        ShapeKind::Disk,
    )
}

/// Rotationally symmetric perturbation of a cap or disk, corrected so that
/// it still ends on `∂B` and meets it orthogonally.
pub fn make_profile_shape(
    space: SpaceForm,
    ball: &BallDomain,
    base: BaseShape,
    perturbation: &Perturbation,
    amplitude: f64,
    layout: Layout,
) -> Result<Immersion> {
    check_ball(space, ball)?;
    check_amplitude(amplitude)?;
    let scale = amplitude * ball.model_radius;
    let r: Vec<f64> = perturbation.r.iter().map(|c| c * scale).collect();
    let z: Vec<f64> = perturbation.z.iter().map(|c| c * scale).collect();
    let profile = project_contact(r, z, base_profile(base, ball)?, ball.model_radius)?;
    check_embedded_in_ball(&profile, ball.model_radius)?;
    Immersion::from_profile(space, Some(*ball), profile, layout, ShapeKind::Profile)
}

/// Geodesic sphere of radius `radius` about the model origin, with radial
/// function multiplied by `1 + amplitude Σ terms[j] cos^{j+1} φ`.
pub fn make_closed_sphere(
    space: SpaceForm,
    radius: f64,
    terms: &[f64],
    amplitude: f64,
    layout: Layout,
) -> Result<Immersion> {
    check_amplitude(amplitude)?;
    let model_radius = space.radius_to_model(radius)?;
    let scaled: Vec<f64> = terms.iter().map(|c| c * amplitude).collect();
    let bound: f64 = scaled.iter().map(|c| abs(*c)).sum();
    if bound >= 1.0 {
        return Err(Error::Domain("perturbation makes the radial function vanish".into()));
    }
    if space == SpaceForm::Hyperbolic && model_radius * (1.0 + bound) >= 1.0 {
        return Err(Error::Domain("perturbed sphere leaves the hyperbolic model".into()));
    }
    let profile = Profile::Sphere {
        model_radius,
        terms: scaled,
    };
    Immersion::from_profile(space, None, profile, layout, ShapeKind::Closed)
}

fn check_ball(space: SpaceForm, ball: &BallDomain) -> Result<()> {
    if ball.space != space {
        return Err(Error::Domain("ball belongs to a different space form".into()));
    }
    Ok(())
}

fn check_amplitude(amplitude: f64) -> Result<()> {
    if !amplitude.is_finite() || abs(amplitude) > MAX_AMPLITUDE {
        return Err(Error::Range {
            value: amplitude,
            lo: -MAX_AMPLITUDE,
            hi: MAX_AMPLITUDE,
        });
    }
    Ok(())
}

/// The profile must stay off the axis, keep positive speed, start
/// transversally to the axis and stay inside the ball before `t = 1`.
fn check_embedded_in_ball(profile: &Profile, model_radius: f64) -> Result<()> {
    let start = profile.jet(0.0);
    if !(start.r1 > 0.0) {
        return Err(Error::ConstraintProjection("profile does not leave the axis".into()));
    }
    let samples = 400;
    for i in 1..=samples {
        let t = i as f64 / samples as f64;
        let j = profile.jet(t);
        if !(j.r > 0.0) || !(j.speed() > 1e-8 * model_radius) {
            return Err(Error::ConstraintProjection(format!("profile degenerates near t = {t}")));
        }
        let rad = sqrt(j.r * j.r + j.z * j.z);
        if i < samples && rad > model_radius * (1.0 + 1e-12) {
            return Err(Error::ConstraintProjection(format!("profile leaves the ball near t = {t}")));
        }
    }
    Ok(())
}
