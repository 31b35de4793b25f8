//! Parametric hypersurfaces in space-form balls and their pointwise geometry.
//!
//! Two layouts are supported. [`Layout::Full`] is a genuine two-parameter
//! chart of a surface in three-dimensional model space. [`Layout::Reduced`]
//! describes a rotationally symmetric hypersurface of any dimension by its
//! profile curve; frames are evaluated at one representative point of each
//! orbit, in an orthonormal frame adapted to the profile, and integrals pick
//! up the orbit volume.

mod boundary;
mod chart;
mod profile;
mod shapes;

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

pub use boundary::{
    boundary_frame_at, boundary_integrate, boundary_sample, free_boundary_residual, principal_conormal_check,
    BoundaryFrame, BoundarySample, FreeBoundaryResidual,
};
pub use chart::{finite_difference_jet, PolarChart, SurfaceJet, FD_STEP};
pub use profile::{cap_profile, project_contact, Profile, ProfileJet};
pub use shapes::{
    make_cap, make_closed_sphere, make_flat_disk, make_profile_shape, BaseShape, Perturbation, MAX_AMPLITUDE,
};

use crate::error::{Error, Result};
use crate::math::{
    abs, cos, cross3, dot, generalized_eigenvalues, norm, pairwise_sum, sin, sphere_area, sqrt, Mat, PI,
};
use crate::quadrature::{composite, QuadratureSpec};
use crate::spaceform::{BallDomain, SpaceForm};
use crate::symalg::{mean_curvatures, SymmetricState};

/// Smallest admissible eigenvalue of the induced metric.
pub const METRIC_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// Two-parameter chart of a surface (`n = 2`).
    Full,
    /// Rotationally symmetric hypersurface of dimension `n ≥ 2` described by
    /// its profile.
    Reduced(usize),
}

impl Layout {
    pub fn dim(self) -> usize {
        match self {
            Layout::Full => 2,
            Layout::Reduced(n) => n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeKind {
    Cap,
    Disk,
    Profile,
    Closed,
    Chart,
}

#[derive(Clone, Debug)]
pub enum Surface {
    Profile(Profile),
    Chart(Arc<dyn PolarChart>),
}

/// Chart coordinates. `theta` is ignored for reduced layouts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ChartPoint {
    pub t: f64,
    pub theta: f64,
}

impl ChartPoint {
    pub fn new(t: f64, theta: f64) -> Self {
        ChartPoint { t, theta }
    }
}

/// An immersed hypersurface of a space form, possibly with boundary on the
/// sphere bounding `ball`.
#[derive(Clone, Debug)]
pub struct Immersion {
    space: SpaceForm,
    ball: Option<BallDomain>,
    surface: Surface,
    layout: Layout,
    kind: ShapeKind,
    /// Columns `e1, e2, a` of a right-handed orthonormal frame; profiles are
    /// revolved about `a` in full layout.
    axes: [[f64; 3]; 3],
    orientation: f64,
}

const STANDARD_AXES: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

impl Immersion {
    /// A profile hypersurface as given, without any validation of its
    /// contact with the ball. The orientation is fixed so that `∫ H ≥ 0`.
    pub fn from_profile(
        space: SpaceForm,
        ball: Option<BallDomain>,
        profile: Profile,
        layout: Layout,
        kind: ShapeKind,
    ) -> Result<Self> {
        if layout.dim() < 2 {
            return Err(Error::Domain("hypersurface dimension must be at least 2".into()));
        }
        let imm = Immersion {
            space,
            ball,
            surface: Surface::Profile(profile),
            layout,
            kind,
            axes: STANDARD_AXES,
            orientation: 1.0,
        };
        imm.oriented()
    }

    /// A user chart in full layout.
    pub fn from_chart(space: SpaceForm, ball: Option<BallDomain>, chart: Arc<dyn PolarChart>) -> Result<Self> {
        let imm = Immersion {
            space,
            ball,
            surface: Surface::Chart(chart),
            layout: Layout::Full,
            kind: ShapeKind::Chart,
            axes: STANDARD_AXES,
            orientation: 1.0,
        };
        imm.oriented()
    }

    fn oriented(mut self) -> Result<Self> {
        let coarse = QuadratureSpec::new(8, 3);
        let total = integrate(&self, &coarse, |f| f.mean_curvature())?;
        if total < 0.0 {
            self.orientation = -1.0;
        }
        Ok(self)
    }

    /// Revolve about `axis` instead of the third coordinate axis (full
    /// layout only; the orientation is unaffected).
    pub fn with_axis(mut self, axis: &[f64]) -> Result<Self> {
        if self.layout != Layout::Full || matches!(self.surface, Surface::Chart(_)) {
            return Err(Error::Unsupported("axis rotation applies to full-layout profile surfaces".into()));
        }
        if axis.len() != 3 || !(norm(axis) > 0.0) {
            return Err(Error::Domain("axis must be a nonzero 3-vector".into()));
        }
        let l = norm(axis);
        let a = [axis[0] / l, axis[1] / l, axis[2] / l];
        // any unit vector orthogonal to a
        let pick = if abs(a[0]) < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let p = dot(&pick, &a);
        let mut e1 = [pick[0] - p * a[0], pick[1] - p * a[1], pick[2] - p * a[2]];
        let l1 = norm(&e1);
        e1.iter_mut().for_each(|c| *c /= l1);
        let e2 = cross3(&a, &e1);
        self.axes = [e1, e2, a];
        Ok(self)
    }

    pub fn space(&self) -> SpaceForm {
        self.space
    }

    pub fn ball(&self) -> Option<&BallDomain> {
        self.ball.as_ref()
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim() + 1
    }

    pub fn kind(&self) -> ShapeKind {
        self.kind
    }

    pub fn surface(&self) -> &Surface {
        &self.surface
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    /// Axis of revolution in model coordinates.
    pub fn axis(&self) -> Vec<f64> {
        match self.layout {
            Layout::Full => self.axes[2].to_vec(),
            Layout::Reduced(n) => {
                let mut a = vec![0.0; n + 1];
                a[n] = 1.0;
                a
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        match &self.surface {
            Surface::Profile(p) => p.is_closed(),
            Surface::Chart(c) => c.is_closed(),
        }
    }

    pub fn has_boundary(&self) -> bool {
        !self.is_closed()
    }

    /// False when derivatives come from finite differences.
    pub fn exact_derivatives(&self) -> bool {
        match &self.surface {
            Surface::Profile(_) => true,
            Surface::Chart(c) => c.has_exact_derivatives(),
        }
    }

    pub fn profile(&self) -> Option<&Profile> {
        match &self.surface {
            Surface::Profile(p) => Some(p),
            Surface::Chart(_) => None,
        }
    }

    pub fn profile_jet(&self, t: f64) -> Option<ProfileJet> {
        self.profile().map(|p| p.jet(t))
    }

    /// Model-space jet of the full chart at `p`.
    pub fn surface_jet(&self, p: ChartPoint) -> Option<SurfaceJet> {
        if self.layout != Layout::Full {
            return None;
        }
        match &self.surface {
            Surface::Chart(c) => Some(c.jet(p.t, p.theta)),
            Surface::Profile(prof) => {
                let j = prof.jet(p.t);
                let [e1, e2, a] = self.axes;
                let (s, c) = (sin(p.theta), cos(p.theta));
                let comb = |u: f64, v: f64, w: f64| -> [f64; 3] {
                    [
                        u * e1[0] + v * e2[0] + w * a[0],
                        u * e1[1] + v * e2[1] + w * a[1],
                        u * e1[2] + v * e2[2] + w * a[2],
                    ]
                };
                // ω = c e1 + s e2, ω' = −s e1 + c e2
                let x = comb(j.r * c, j.r * s, j.z);
                let xt = comb(j.r1 * c, j.r1 * s, j.z1);
                let xth = comb(-j.r * s, j.r * c, 0.0);
                let xtt = comb(j.r2 * c, j.r2 * s, j.z2);
                let xtth = comb(-j.r1 * s, j.r1 * c, 0.0);
                let xthth = comb(-j.r * c, -j.r * s, 0.0);
                Some(SurfaceJet {
                    x,
                    d1: [xt, xth],
                    d2: [[xtt, xtth], [xtth, xthth]],
                })
            }
        }
    }

    /// Model point of the chart point `p`.
    pub fn position(&self, p: ChartPoint) -> Vec<f64> {
        match self.layout {
            Layout::Full => self.surface_jet(p).map(|j| j.x.to_vec()).unwrap_or_default(),
            Layout::Reduced(n) => {
                let j = self.profile_jet(p.t).unwrap_or_default();
                let mut x = vec![0.0; n + 1];
                x[0] = j.r;
                x[n] = j.z;
                x
            }
        }
    }

    /// Sign applied to `x_t × x_θ` to get the flat unit normal in full
    /// layout. Revolved profiles have `x_t × x_θ = −r |x_t| N_profile`.
    fn chart_normal_sign(&self) -> f64 {
        match self.surface {
            Surface::Profile(_) => -self.orientation,
            Surface::Chart(_) => self.orientation,
        }
    }
}

/// Pointwise geometry in the space-form metric.
#[derive(Clone, Debug)]
pub struct PointFrame {
    pub point: ChartPoint,
    /// Model coordinates.
    pub position: Vec<f64>,
    /// Frame vectors (flat components) in which `g` and `h` are expressed:
    /// chart derivatives in full layout, an orthonormal adapted frame in
    /// reduced layout (profile direction first).
    pub tangents: Vec<Vec<f64>>,
    pub g: Mat,
    pub g_inv: Mat,
    pub h: Mat,
    /// Unit normal, flat components of a vector of unit space-form length.
    pub normal: Vec<f64>,
    /// Flat unit normal `N^flat = e^{u} ν`.
    pub flat_normal: Vec<f64>,
    /// Conformal factor `e^{u}` at the point.
    pub conformal_factor: f64,
    /// Principal curvatures, ascending.
    pub kappa: Vec<f64>,
    /// `H_0 … H_n`.
    pub mean: Vec<f64>,
    /// Area density with respect to the chart measure (`dt dθ` in full
    /// layout, `dt` in reduced layout, orbit volume included).
    pub density: f64,
}

impl PointFrame {
    pub fn dim(&self) -> usize {
        self.kappa.len()
    }

    /// `H = H_1`.
    pub fn mean_curvature(&self) -> f64 {
        self.mean[1]
    }

    /// Mixed shape operator `g⁻¹ h`.
    pub fn shape_operator(&self) -> Mat {
        self.g_inv.mul(&self.h)
    }

    pub fn state(&self) -> Result<SymmetricState> {
        SymmetricState::new(&self.shape_operator(), &self.g)
    }

    /// Largest difference of principal curvatures.
    pub fn curvature_spread(&self) -> f64 {
        match (self.kappa.first(), self.kappa.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }
}

/// Evaluate the geometry of `imm` at the chart point `p`.
pub fn frame_at(imm: &Immersion, p: ChartPoint) -> Result<PointFrame> {
    match imm.layout {
        Layout::Full => full_frame(imm, p),
        Layout::Reduced(n) => reduced_frame(imm, n, p),
    }
}

fn full_frame(imm: &Immersion, p: ChartPoint) -> Result<PointFrame> {
    let jet = imm
        .surface_jet(p)
        .ok_or_else(|| Error::Unsupported("full frame requires a full-layout immersion".into()))?;
    let x = jet.x;
    imm.space.check_admissible(&x)?;
    let phi = imm.space.conformal_factor(&x);
    let grad_u = imm.space.grad_log_factor(&x);
    let cross = cross3(&jet.d1[0], &jet.d1[1]);
    let cn = norm(&cross);
    if !(cn > 0.0) || !cn.is_finite() {
        return Err(Error::Degenerate("chart derivatives are linearly dependent".into()));
    }
    let sign = imm.chart_normal_sign();
    let n_flat: Vec<f64> = cross.iter().map(|c| sign * c / cn).collect();
    let nu = dot(&grad_u, &n_flat);
    let gf = Mat::from_fn(2, 2, |i, j| dot(&jet.d1[i], &jet.d1[j]));
    let hf = Mat::from_fn(2, 2, |i, j| -dot(&jet.d2[i][j], &n_flat));
    let g = gf.scale(phi * phi);
    let h = hf.add(&gf.scale(nu)).scale(phi);
    finish_frame(
        p,
        x.to_vec(),
        vec![jet.d1[0].to_vec(), jet.d1[1].to_vec()],
        g,
        h,
        n_flat,
        phi,
        None,
    )
}

fn reduced_frame(imm: &Immersion, n: usize, p: ChartPoint) -> Result<PointFrame> {
    let prof = imm
        .profile()
        .ok_or_else(|| Error::Unsupported("reduced layout requires a profile".into()))?;
    let j = prof.jet(p.t);
    let o = imm.orientation;
    let l = j.speed();
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::Degenerate("profile speed vanishes".into()));
    }
    let mut x = vec![0.0; n + 1];
    x[0] = j.r;
    x[n] = j.z;
    imm.space.check_admissible(&x)?;
    let phi = imm.space.conformal_factor(&x);
    let grad_u = imm.space.grad_log_factor(&x);
    let mut n_flat = vec![0.0; n + 1];
    n_flat[0] = o * j.z1 / l;
    n_flat[n] = -o * j.r1 / l;
    let nu = dot(&grad_u, &n_flat);
    let k_profile = o * (j.r1 * j.z2 - j.z1 * j.r2) / (l * l * l);
    let k_orbit = if abs(j.r) > 1e-14 * l {
        o * j.z1 / (j.r * l)
    } else {
        // limit at the axis: z'/r → z''/r'
        o * j.z2 / (j.r1 * l)
    };
    let k1 = (k_profile + nu) / phi;
    let k2 = (k_orbit + nu) / phi;
    let mut diag = vec![k2; n];
    diag[0] = k1;
    let h = Mat::diag(&diag);
    let g = Mat::identity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut e = vec![0.0; n + 1];
    e[0] = j.r1 / (phi * l);
    e[n] = j.z1 / (phi * l);
    tangents.push(e);
    for i in 1..n {
        let mut e = vec![0.0; n + 1];
        e[i] = 1.0 / phi;
        tangents.push(e);
    }
    let orbit = phi * abs(j.r);
    let density = sphere_area(n - 1) * phi * l * crate::math::powi(orbit, (n - 1) as i32);
    let mut kappa = diag.clone();
    kappa.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    finish_frame(p, x, tangents, g, h, n_flat, phi, Some((kappa, density)))
}

#[allow(clippy::too_many_arguments)]
fn finish_frame(
    p: ChartPoint,
    position: Vec<f64>,
    tangents: Vec<Vec<f64>>,
    g: Mat,
    h: Mat,
    flat_normal: Vec<f64>,
    phi: f64,
    known: Option<(Vec<f64>, f64)>,
) -> Result<PointFrame> {
    let (g_inv, kappa, density) = match known {
        Some((kappa, density)) => (Mat::identity(g.rows()), kappa, density),
        None => {
            let g_inv = g
                .spd_inverse()
                .ok_or_else(|| Error::Degenerate("induced metric is not positive definite".into()))?;
            let g_eigs = crate::math::symmetric_eigenvalues(&g);
            if g_eigs[0] <= METRIC_FLOOR {
                return Err(Error::Degenerate("induced metric is nearly singular".into()));
            }
            let kappa = generalized_eigenvalues(&h.symmetrized(), &g)
                .ok_or_else(|| Error::Degenerate("induced metric is not positive definite".into()))?;
            let density = sqrt(g.det());
            (g_inv, kappa, density)
        }
    };
    let mean = mean_curvatures(&kappa);
    let normal = flat_normal.iter().map(|c| c / phi).collect();
    Ok(PointFrame {
        point: p,
        position,
        tangents,
        g,
        g_inv,
        h,
        normal,
        flat_normal,
        conformal_factor: phi,
        kappa,
        mean,
        density,
    })
}

/// Intrinsic data of a rotationally symmetric hypersurface at profile
/// parameter `t`: arclength speed `σ = ds/dt` and its `t`-derivative, and
/// the orbit radius `ρ` with its first two arclength derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileMetric {
    pub sigma: f64,
    pub sigma_t: f64,
    pub rho: f64,
    pub rho_s: f64,
    pub rho_ss: f64,
}

/// [`ProfileMetric`] of a profile immersion (either layout).
pub fn profile_metric(imm: &Immersion, t: f64) -> Option<ProfileMetric> {
    let j = imm.profile_jet(t)?;
    let q = j.r * j.r + j.z * j.z;
    // ∇u = c x
    let c = match imm.space {
        SpaceForm::Euclidean => 0.0,
        SpaceForm::Hyperbolic => 2.0 / (1.0 - q),
        SpaceForm::Spherical => -2.0 / (1.0 + q),
    };
    let p = j.r * j.r1 + j.z * j.z1;
    let p_t = j.r1 * j.r1 + j.r * j.r2 + j.z1 * j.z1 + j.z * j.z2;
    let u_t = c * p;
    let u_tt = c * c * p * p + c * p_t;
    let phi = imm.space.conformal_factor(&[j.r, j.z]);
    let phi_t = phi * u_t;
    let phi_tt = phi * (u_t * u_t + u_tt);
    let l = j.speed();
    let l_t = (j.r1 * j.r2 + j.z1 * j.z2) / l;
    let sigma = phi * l;
    let sigma_t = phi_t * l + phi * l_t;
    let rho = phi * j.r;
    let rho_t = phi_t * j.r + phi * j.r1;
    let rho_tt = phi_tt * j.r + 2.0 * phi_t * j.r1 + phi * j.r2;
    Some(ProfileMetric {
        sigma,
        sigma_t,
        rho,
        rho_s: rho_t / sigma,
        rho_ss: (rho_tt * sigma - rho_t * sigma_t) / (sigma * sigma * sigma),
    })
}

/// A frame together with its quadrature weight times area density.
#[derive(Clone, Debug)]
pub struct Sample {
    pub frame: PointFrame,
    pub weight: f64,
}

/// Number of `θ` panels used with a given quadrature setting.
fn angular_panels(quad: &QuadratureSpec) -> usize {
    quad.panels().max(2) / 2
}

/// Frames and area weights at every quadrature node.
pub fn sample(imm: &Immersion, quad: &QuadratureSpec) -> Result<Vec<Sample>> {
    let t_rule = quad.rule(0.0, 1.0);
    match imm.layout {
        Layout::Reduced(_) => t_rule
            .iter()
            .map(|(t, w)| {
                let frame = frame_at(imm, ChartPoint::new(t, 0.0))?;
                let weight = w * frame.density;
                Ok(Sample { frame, weight })
            })
            .collect(),
        Layout::Full => {
            let th_rule = composite(quad.order, angular_panels(quad), 0.0, 2.0 * PI);
            let mut out = Vec::with_capacity(t_rule.len() * th_rule.len());
            for (t, wt) in t_rule.iter() {
                for (th, wth) in th_rule.iter() {
                    let frame = frame_at(imm, ChartPoint::new(t, th))?;
                    let weight = wt * wth * frame.density;
                    out.push(Sample { frame, weight });
                }
            }
            Ok(out)
        }
    }
}

/// `Σ f(frame) · weight` with pairwise summation.
pub fn sum_samples(samples: &[Sample], mut f: impl FnMut(&PointFrame) -> f64) -> f64 {
    let values: Vec<f64> = samples.iter().map(|s| f(&s.frame) * s.weight).collect();
    pairwise_sum(&values)
}

/// `∫_Σ f dA`.
pub fn integrate(imm: &Immersion, quad: &QuadratureSpec, f: impl FnMut(&PointFrame) -> f64) -> Result<f64> {
    Ok(sum_samples(&sample(imm, quad)?, f))
}

/// Ricci tensor of Σ from the Gauss equation, covariant in the frame basis.
pub fn ricci_tensor(frame: &PointFrame, space: SpaceForm) -> Mat {
    let n = frame.dim();
    let hh = frame.h.mul(&frame.g_inv).mul(&frame.h);
    frame
        .h
        .scale(frame.mean_curvature())
        .sub(&hh)
        .add(&frame.g.scale((n as f64 - 1.0) * space.k()))
        .symmetrized()
}

/// Smallest eigenvalue of the Ricci tensor relative to `g`.
pub fn ricci_min(frame: &PointFrame, space: SpaceForm) -> f64 {
    generalized_eigenvalues(&ricci_tensor(frame, space), &frame.g)
        .and_then(|e| e.first().copied())
        .unwrap_or(f64::NAN)
}
