//! Seeded shape families.

use freeform_core::geometry::{ricci_min, sample, sum_samples, Immersion};
use freeform_core::quadrature::QuadratureSpec;
use freeform_core::spaceform::SpaceForm;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{RunError, RunResult};
use crate::shape::ShapeSpec;

/// Geodesic radius of the ambient ball used by every family.
pub const BALL_RADIUS: f64 = 1.0;

/// Largest admissible `max |κ| · |Σ|^{1/n}` of a drawn shape. Larger
/// values come from near-cusps the default quadrature does not resolve.
pub const CURVATURE_BOUND: f64 = 25.0;

/// Draws allowed per requested shape before giving up.
const ATTEMPTS_PER_SHAPE: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    /// Caps over a range of radii plus the flat disk.
    Caps,
    Disk,
    /// Perturbed caps and disks.
    Perturbed,
    /// Perturbed caps with nonnegative Ricci curvature and `κ ≥ 0`.
    Convex,
    /// Round geodesic spheres.
    Spheres,
    /// Perturbed geodesic spheres with nonnegative Ricci curvature.
    Closed,
}

/// Generation settings shared by all families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyConfig {
    pub count: usize,
    pub seed: u64,
    /// Largest perturbation amplitude.
    pub epsilon: f64,
    /// Rule used to screen generated shapes.
    pub quad: QuadratureSpec,
}

fn model_radius(space: SpaceForm) -> f64 {
    space.radius_to_model(BALL_RADIUS).unwrap_or(1.0)
}

fn rng_for(cfg: &FamilyConfig, family: Family, k: i32, n: usize) -> ChaCha8Rng {
    let tag = (family as u64) << 40 ^ ((k + 2) as u64) << 32 ^ n as u64;
    ChaCha8Rng::seed_from_u64(cfg.seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Cap radii spread log-uniformly over `[0.3, 5] · R_model`.
fn cap_radii(space: SpaceForm, count: usize) -> Vec<f64> {
    let rm = model_radius(space);
    (0..count)
        .map(|i| {
            let s = if count > 1 { i as f64 / (count - 1) as f64 } else { 0.5 };
            rm * 10f64.powf(-0.52 + 1.22 * s)
        })
        .collect()
}

fn coefficients(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Curvature within [`CURVATURE_BOUND`] and, when `convex`, `κ ≥ 0` and
/// nonnegative Ricci curvature at every node.
fn admissible(imm: &Immersion, quad: &QuadratureSpec, convex: bool) -> bool {
    let Ok(samples) = sample(imm, quad) else { return false };
    let area = sum_samples(&samples, |_| 1.0);
    let peak = samples
        .iter()
        .flat_map(|x| x.frame.kappa.iter().map(|k| k.abs()))
        .fold(0.0, f64::max);
    if !(peak * area.powf(1.0 / imm.dim() as f64) <= CURVATURE_BOUND) {
        return false;
    }
    !convex
        || samples
            .iter()
            .all(|x| x.frame.kappa[0] >= 0.0 && ricci_min(&x.frame, imm.space()) >= 0.0)
}

/// Draws shapes until `count` constructible, resolved (and, when `screen`,
/// convex) ones are found.
fn draw(
    cfg: &FamilyConfig,
    screen: bool,
    mut rng: ChaCha8Rng,
    mut propose: impl FnMut(&mut ChaCha8Rng) -> ShapeSpec,
) -> RunResult<Vec<ShapeSpec>> {
    let mut out = Vec::with_capacity(cfg.count);
    let mut tries = 0;
    while out.len() < cfg.count {
        if tries >= ATTEMPTS_PER_SHAPE * cfg.count.max(1) {
            return Err(RunError::Config(format!(
                "only {} of {} shapes could be generated; lower --epsilon",
                out.len(),
                cfg.count
            )));
        }
        tries += 1;
        let spec = propose(&mut rng);
        let Ok(imm) = spec.build() else { continue };
        if !admissible(&imm, &cfg.quad, screen) {
            continue;
        }
        out.push(spec);
    }
    Ok(out)
}

/// Shapes of `family` in the space form of curvature `k`, dimension `n`.
pub fn generate(family: Family, k: i32, n: usize, cfg: &FamilyConfig) -> RunResult<Vec<ShapeSpec>> {
    let space = SpaceForm::from_curvature(k).map_err(|e| RunError::Config(e.to_string()))?;
    if !(cfg.epsilon >= 0.0) || cfg.epsilon > freeform_core::geometry::MAX_AMPLITUDE {
        return Err(RunError::Config(format!(
            "--epsilon must lie in [0, {}]",
            freeform_core::geometry::MAX_AMPLITUDE
        )));
    }
    let rm = model_radius(space);
    let rng = rng_for(cfg, family, k, n);
    let eps = cfg.epsilon;
    match family {
        Family::Caps => {
            let mut v: Vec<ShapeSpec> = cap_radii(space, cfg.count)
                .into_iter()
                .map(|rho| ShapeSpec::cap(k, BALL_RADIUS, n, rho))
                .collect();
            v.push(ShapeSpec::disk(k, BALL_RADIUS, n));
            Ok(v)
        }
        Family::Disk => Ok(vec![ShapeSpec::disk(k, BALL_RADIUS, n)]),
        Family::Spheres => Ok((0..cfg.count)
            .map(|i| {
                let s = if cfg.count > 1 { i as f64 / (cfg.count - 1) as f64 } else { 0.5 };
                ShapeSpec::closed(k, 0.3 + 1.0 * s, n, Vec::new(), 0.0)
            })
            .collect()),
        Family::Perturbed => draw(cfg, false, rng, |rng| {
            let rho = (rng.gen::<f64>() < 0.75).then(|| rm * 10f64.powf(rng.gen_range(-0.3..0.6)));
            let amp = rng.gen_range(0.2 * eps..=eps);
            ShapeSpec::profile(k, BALL_RADIUS, n, rho, coefficients(rng, 2), coefficients(rng, 2), amp)
        }),
        Family::Convex => draw(cfg, true, rng, |rng| {
            let rho = rm * 10f64.powf(rng.gen_range(-0.4..0.1));
            let amp = rng.gen_range(0.2 * eps..=eps);
            ShapeSpec::profile(k, BALL_RADIUS, n, Some(rho), coefficients(rng, 2), coefficients(rng, 2), amp)
        }),
        Family::Closed => draw(cfg, true, rng, |rng| {
            let radius = rng.gen_range(0.4..1.2);
            let amp = rng.gen_range(0.2 * eps..=eps);
            ShapeSpec::closed(k, radius, n, coefficients(rng, 3), amp / 3.0)
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(count: usize, seed: u64) -> FamilyConfig {
        FamilyConfig {
            count,
            seed,
            epsilon: 0.15,
            quad: QuadratureSpec::new(8, 3),
        }
    }

    #[test]
    fn families_are_deterministic() {
        for fam in [Family::Perturbed, Family::Convex, Family::Closed] {
            let a = generate(fam, -1, 2, &cfg(4, 7)).unwrap();
            let b = generate(fam, -1, 2, &cfg(4, 7)).unwrap();
            let c = generate(fam, -1, 2, &cfg(4, 8)).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
            assert_eq!(a.len(), 4);
        }
    }

    #[test]
    fn caps_family_includes_the_disk() {
        let v = generate(Family::Caps, 1, 3, &cfg(10, 0)).unwrap();
        assert_eq!(v.len(), 11);
        assert!(v.iter().all(|s| s.build().is_ok()));
    }

    #[test]
    fn epsilon_is_validated() {
        let mut c = cfg(2, 0);
        c.epsilon = 0.8;
        assert_eq!(generate(Family::Perturbed, 0, 2, &c).unwrap_err().exit_code(), 2);
    }
}
