//! Verification suites: each turns a list of shapes into report records.

use freeform_core::functionals::{
    check_corollary_low_dim, check_main_inequality, check_perez, divergence_free_check, quermassintegrals,
    Corollary, InequalityCheck, Status, Tolerances,
};
use freeform_core::geometry::{free_boundary_residual, sample, Immersion, Layout};
use freeform_core::math::{abs, norm, Mat, PI};
use freeform_core::quadrature::QuadratureSpec;
use freeform_core::reilly::{
    proof_chain_check, reilly_residual, solve_neumann, substatic_consistency, AxialPolynomial, PolynomialField,
    SurfaceField,
};
use freeform_core::spaceform::{Potential, SpaceForm};
use freeform_core::symalg::{newton_tensor_by_delta, SymmetricState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{numerical, RunError, RunResult};
use crate::report::{Record, ReportEnvelope, Verdict, NEGLIGIBLE};
use crate::shape::ShapeSpec;

/// `residual / scale` accepted for the weighted Reilly formula.
pub const REILLY_TOL: f64 = 1e-6;
/// Relative residual accepted for the Neumann solve.
pub const NEUMANN_TOL: f64 = 1e-7;
/// Step (a) of the proof chain, relative.
pub const CHAIN_IDENTITY_TOL: f64 = 1e-6;
/// Step (b): slack against discarded Reilly terms, relative.
pub const CHAIN_SLACK_TOL: f64 = 1e-5;
/// Step (c): chain end points against the direct evaluation, relative.
pub const CHAIN_FINAL_TOL: f64 = 1e-6;
pub const BOUNDARY_IDENTITY_TOL: f64 = 1e-10;
pub const SUBSTATIC_TOL: f64 = 1e-8;
pub const DIVERGENCE_TOL: f64 = 1e-8;
pub const NEWTON_TOL: f64 = 1e-10;
pub const QUERMASS_TOL: f64 = 1e-8;
pub const PEREZ_EQUIVALENCE_TOL: f64 = 1e-10;
/// Smallest admissible `min V_a / max |V_a|` for the weighted identities.
pub const WEIGHT_MARGIN: f64 = 1e-3;
/// Random boundary points per shape in the boundary identity.
const BOUNDARY_POINTS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Main inequality, unweighted, free boundary.
    Thm1,
    /// Main inequality weighted by the axis potential.
    Thm4,
    /// Convex free-boundary hypersurfaces of Euclidean balls.
    CorConvex,
    /// Low-dimensional corollaries in the unit Euclidean ball.
    CorLowdim,
    /// Both closed-surface formulations in Euclidean space.
    Perez,
    /// Higher-order closed-hypersurface inequality in space forms.
    Kwong,
    /// Weighted Reilly formula, Neumann solve and proof chain.
    Reilly,
    /// Pointwise and integral identities.
    Identities,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Thm1 => "thm1",
            Suite::Thm4 => "thm4",
            Suite::CorConvex => "cor-convex",
            Suite::CorLowdim => "cor-lowdim",
            Suite::Perez => "perez",
            Suite::Kwong => "kwong",
            Suite::Reilly => "reilly",
            Suite::Identities => "identities",
        }
    }

    /// Suites whose statements live in Euclidean space only.
    pub fn euclidean_only(self) -> bool {
        matches!(self, Suite::CorConvex | Suite::CorLowdim | Suite::Perez)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum LowDimCase {
    /// Surfaces in the unit 3-ball.
    I,
    /// Three-folds in the unit 4-ball.
    Ii,
}

impl LowDimCase {
    pub fn dim(self) -> usize {
        match self {
            LowDimCase::I => 2,
            LowDimCase::Ii => 3,
        }
    }
}

/// Orders `k` to check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Orders {
    All,
    Only(Vec<usize>),
}

impl Orders {
    pub fn for_dim(&self, n: usize) -> RunResult<Vec<usize>> {
        match self {
            Orders::All => Ok((1..n).collect()),
            Orders::Only(ks) => {
                if let Some(k) = ks.iter().find(|k| **k < 1 || **k >= n) {
                    return Err(RunError::Config(format!("order k = {k} must lie in 1..{}", n - 1)));
                }
                Ok(ks.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub shapes: Vec<ShapeSpec>,
    pub orders: Orders,
    pub quad: QuadratureSpec,
    pub tol: Tolerances,
    pub case: LowDimCase,
    /// Seeds the random fields of the Reilly and identity suites.
    pub seed: u64,
}

impl SuiteConfig {
    pub fn new(suite: Suite, shapes: Vec<ShapeSpec>) -> Self {
        SuiteConfig {
            suite,
            shapes,
            orders: Orders::All,
            quad: QuadratureSpec::default(),
            tol: Tolerances::default(),
            case: LowDimCase::I,
            seed: 0,
        }
    }

    fn validate(&self) -> RunResult<()> {
        if !(self.tol.rel > 0.0 && self.tol.abs >= 0.0 && self.tol.gate >= 0.0) {
            return Err(RunError::Config("tolerances must be positive".into()));
        }
        if self.quad.order < 1 || self.quad.order > 64 || self.quad.level > 12 {
            return Err(RunError::Config("quadrature order must be in 1..=64 and level at most 12".into()));
        }
        for s in &self.shapes {
            if self.suite.euclidean_only() && s.curvature != 0 {
                return Err(RunError::Config(format!("{} applies to Euclidean space (K = 0)", self.suite.name())));
            }
            match self.suite {
                Suite::Perez | Suite::Kwong if !s.is_closed() => {
                    return Err(RunError::Config(format!("{} needs closed shapes", self.suite.name())))
                }
                Suite::Thm1 | Suite::Thm4 | Suite::CorConvex | Suite::CorLowdim if s.is_closed() => {
                    return Err(RunError::Config(format!("{} needs free-boundary shapes", self.suite.name())))
                }
                Suite::CorLowdim if s.dim() != self.case.dim() || s.radius != 1.0 => {
                    return Err(RunError::Config(format!(
                        "cor-lowdim case needs n = {} in the unit ball",
                        self.case.dim()
                    )))
                }
                _ => {}
            }
            self.orders.for_dim(s.dim())?;
        }
        Ok(())
    }
}

/// Number of worker threads from `FREEFORM_THREADS` (all cores when unset).
pub fn thread_count() -> Option<usize> {
    std::env::var("FREEFORM_THREADS").ok()?.trim().parse().ok().filter(|n| *n > 0)
}

/// Runs a suite. Shapes are processed in parallel and records are reduced
/// in input order, so reports do not depend on the thread count.
pub fn run_suite(cfg: &SuiteConfig) -> RunResult<ReportEnvelope> {
    cfg.validate()?;
    let work = || {
        cfg.shapes
            .par_iter()
            .enumerate()
            .map(|(i, s)| shape_records(cfg, i, s))
            .collect::<Vec<_>>()
    };
    let results = match thread_count() {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| RunError::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let per_shape = results.into_iter().collect::<RunResult<Vec<_>>>()?;
    Ok(ReportEnvelope::new(cfg.suite.name(), per_shape))
}

fn axis_potential(imm: &Immersion) -> RunResult<Potential> {
    Potential::new(imm.space(), &imm.axis()).map_err(numerical)
}

fn residual_record(suite: &str, check: &str, shape: &ShapeSpec, k: usize, value: f64, tol: f64, q: &QuadratureSpec) -> Record {
    let v = if value <= tol { Verdict::Pass } else { Verdict::Fail };
    Record::new(suite, check, shape, k, value, tol, v, q)
}

/// Records for one shape.
pub fn shape_records(cfg: &SuiteConfig, index: usize, spec: &ShapeSpec) -> RunResult<Vec<Record>> {
    let imm = spec.build()?;
    let n = imm.dim();
    let ks = cfg.orders.for_dim(n)?;
    let q = &cfg.quad;
    let tol = &cfg.tol;
    let name = cfg.suite.name();
    let from = |c: &InequalityCheck| Record::from_check(name, spec, c, q);
    let mut out = Vec::new();
    match cfg.suite {
        Suite::Thm1 | Suite::Kwong => {
            for k in ks {
                let c = check_main_inequality(&imm, k, None, q, tol).map_err(numerical)?;
                out.push(from(&c));
            }
        }
        Suite::Thm4 => {
            let pot = axis_potential(&imm)?;
            for k in ks {
                let c = check_main_inequality(&imm, k, Some(&pot), q, tol).map_err(numerical)?;
                out.push(from(&c));
            }
        }
        Suite::CorConvex => {
            for k in ks {
                let mut c = check_main_inequality(&imm, k, None, q, tol).map_err(numerical)?;
                c.name = "convex".into();
                if c.hypotheses.convexity_min < -tol.gate {
                    c.status = Status::Inapplicable;
                }
                out.push(from(&c));
            }
        }
        Suite::CorLowdim => {
            let which = match cfg.case {
                LowDimCase::I => Corollary::Surface,
                LowDimCase::Ii => Corollary::ThreeFold,
            };
            let c = check_corollary_low_dim(&imm, which, q, tol).map_err(numerical)?;
            out.push(from(&c));
        }
        Suite::Perez => {
            let p = check_perez(&imm, q, tol).map_err(numerical)?;
            out.push(from(&p.first));
            out.push(from(&p.second));
            out.push(residual_record(name, "perez_equivalence", spec, 1, p.equivalence_residual, PEREZ_EQUIVALENCE_TOL, q));
        }
        Suite::Reilly => reilly_records(cfg, index, spec, &imm, &ks, &mut out)?,
        Suite::Identities => identity_records(cfg, index, spec, &imm, &mut out)?,
    }
    Ok(out)
}

fn field_rng(cfg: &SuiteConfig, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ (index as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Random positive weight and test function; axially symmetric in reduced
/// layout.
pub fn random_fields(imm: &Immersion, rng: &mut impl Rng) -> (Box<dyn SurfaceField>, Box<dyn SurfaceField>) {
    let mut u = |a: f64| rng.gen_range(-a..=a);
    match imm.layout() {
        Layout::Full => {
            let q: Vec<f64> = (0..9).map(|_| u(1.0)).collect();
            let f = PolynomialField {
                constant: u(1.0),
                linear: (0..3).map(|_| u(1.0)).collect(),
                quadratic: Mat::from_fn(3, 3, |i, j| 0.5 * (q[3 * i + j] + q[3 * j + i])),
                cubic: (0..3).map(|_| u(0.5)).collect(),
            };
            let v = PolynomialField {
                constant: 2.0,
                linear: (0..3).map(|_| u(0.3)).collect(),
                quadratic: Mat::diag(&[0.3 + u(0.2), 0.3 + u(0.2), 0.3 + u(0.2)]),
                cubic: vec![0.0; 3],
            };
            (Box::new(v), Box::new(f))
        }
        Layout::Reduced(_) => {
            let f = AxialPolynomial {
                terms: vec![
                    (0, 0, u(1.0)),
                    (1, 0, u(1.0)),
                    (0, 1, u(1.0)),
                    (0, 2, u(1.0)),
                    (1, 1, u(1.0)),
                    (2, 0, u(0.5)),
                    (0, 3, u(0.5)),
                ],
            };
            let v = AxialPolynomial {
                terms: vec![(0, 0, 2.0), (1, 0, 0.3 + u(0.2)), (0, 1, u(0.3))],
            };
            (Box::new(v), Box::new(f))
        }
    }
}

fn reilly_records(
    cfg: &SuiteConfig,
    index: usize,
    spec: &ShapeSpec,
    imm: &Immersion,
    ks: &[usize],
    out: &mut Vec<Record>,
) -> RunResult<()> {
    let (q, name) = (&cfg.quad, cfg.suite.name());
    let mut rng = field_rng(cfg, index);
    let (v, f) = random_fields(imm, &mut rng);
    let led = reilly_residual(imm, v.as_ref(), f.as_ref(), q).map_err(numerical)?;
    let verdict = if led.relative() <= REILLY_TOL { Verdict::Pass } else { Verdict::Fail };
    out.push(Record::new(name, "reilly", spec, 0, led.bulk_lhs, led.rhs(), verdict, q));
    let pot = axis_potential(imm)?;
    if weight_bounded(imm, &pot, q)? {
        let led = reilly_residual(imm, &pot, f.as_ref(), q).map_err(numerical)?;
        let verdict = if led.relative() <= REILLY_TOL { Verdict::Pass } else { Verdict::Fail };
        out.push(Record::new(name, "reilly_potential", spec, 0, led.bulk_lhs, led.rhs(), verdict, q));
    } else {
        out.push(Record::new(name, "reilly_potential", spec, 0, f64::NAN, f64::NAN, Verdict::Inapplicable, q));
    }
    let Some(profile) = imm.profile() else { return Ok(()) };
    // the Neumann solve runs on the rotationally reduced form of the profile
    let reduced = match imm.layout() {
        Layout::Full => Immersion::from_profile(imm.space(), imm.ball().copied(), profile.clone(), Layout::Reduced(2), imm.kind())
            .map_err(numerical)?,
        Layout::Reduced(_) => imm.clone(),
    };
    let pot = axis_potential(&reduced)?;
    let weighted = weight_bounded(&reduced, &pot, q)?;
    for &k in ks {
        chain_records(cfg, spec, &reduced, k, None, out)?;
        if weighted {
            chain_records(cfg, spec, &reduced, k, Some(&pot), out)?;
        } else {
            out.push(Record::new(name, "weighted_neumann", spec, k, f64::NAN, f64::NAN, Verdict::Inapplicable, q));
        }
    }
    Ok(())
}

/// `V_a` bounded away from zero relative to its size. Shapes touching
/// `{V_a = 0}` (a perturbed disk through the center, say) make the `1/V`
/// terms non-integrable, and the weighted identities do not apply.
fn weight_bounded(imm: &Immersion, pot: &Potential, q: &QuadratureSpec) -> RunResult<bool> {
    let (mut lo, mut hi) = (f64::INFINITY, 0f64);
    for s in sample(imm, q).map_err(numerical)? {
        let Ok(v) = pot.value(&s.frame.position) else { return Ok(false) };
        lo = lo.min(v);
        hi = hi.max(abs(v));
    }
    Ok(lo > WEIGHT_MARGIN * hi)
}

fn chain_records(
    cfg: &SuiteConfig,
    spec: &ShapeSpec,
    reduced: &Immersion,
    k: usize,
    weight: Option<&Potential>,
    out: &mut Vec<Record>,
) -> RunResult<()> {
    let (q, name) = (&cfg.quad, cfg.suite.name());
    let prefix = if weight.is_some() { "weighted_" } else { "" };
    let sol = solve_neumann(reduced, k, weight, q).map_err(numerical)?;
    let res = sol.residual().map_err(numerical)?;
    out.push(residual_record(name, &format!("{prefix}neumann"), spec, k, res.max(), NEUMANN_TOL, q));
    let chain = proof_chain_check(&sol, q, &cfg.tol).map_err(numerical)?;
    let n = reduced.dim();
    let negligible = |a: f64, b: f64| chain.main.normalized(abs(a).max(abs(b)), n) <= NEGLIGIBLE;
    let slack_ok = !chain.applicable || chain.slack >= -cfg.tol.abs - CHAIN_SLACK_TOL * chain.trace_norm;
    let steps = [
        (
            "proof_chain_a",
            chain.identity_lhs,
            chain.identity_rhs,
            chain.step_a() <= CHAIN_IDENTITY_TOL || negligible(chain.identity_lhs, chain.identity_rhs),
        ),
        (
            "proof_chain_b",
            chain.slack,
            chain.discarded,
            slack_ok && (chain.step_b() <= CHAIN_SLACK_TOL || negligible(chain.slack, chain.discarded)),
        ),
        (
            "proof_chain_c",
            chain.identity_lhs,
            chain.final_rhs,
            chain.step_c() <= CHAIN_FINAL_TOL || negligible(chain.identity_lhs, chain.final_rhs),
        ),
    ];
    for (check, lhs, rhs, ok) in steps {
        let mut r = Record::new(name, &format!("{prefix}{check}"), spec, k, lhs, rhs, verdict(ok), q);
        r.hypotheses = (&chain.main.hypotheses).into();
        out.push(r);
    }
    Ok(())
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn identity_records(cfg: &SuiteConfig, index: usize, spec: &ShapeSpec, imm: &Immersion, out: &mut Vec<Record>) -> RunResult<()> {
    let (q, name) = (&cfg.quad, cfg.suite.name());
    let n = imm.dim();
    let space = imm.space();
    if !imm.is_closed() {
        let fb = free_boundary_residual(imm);
        out.push(residual_record(name, "free_boundary", spec, 0, fb.position.max(fb.angle), cfg.tol.contact, q));
    }
    if let Some(ball) = imm.ball() {
        let mut rng = field_rng(cfg, index);
        let d = imm.ambient_dim();
        let mut worst: f64 = 0.0;
        let mut used = 0;
        while used < BOUNDARY_POINTS {
            let a: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (la, lp) = (norm(&a), norm(&p));
            if la < 1e-3 || lp < 1e-3 {
                continue;
            }
            let x: Vec<f64> = p.iter().map(|c| c / lp * ball.model_radius).collect();
            let pot = Potential::new(space, &a).map_err(numerical)?;
            // the ratio is singular where V_a vanishes
            if abs(pot.value(&x).map_err(numerical)?) < 1e-3 * ball.model_radius {
                continue;
            }
            let ratio = pot.boundary_ratio(ball, &x).map_err(numerical)?;
            worst = worst.max(abs(ball.boundary_umbilicity() - ratio) / (1.0 + abs(ratio)));
            used += 1;
        }
        out.push(residual_record(name, "boundary_umbilicity", spec, 0, worst, BOUNDARY_IDENTITY_TOL, q));
    }
    let pot = axis_potential(imm)?;
    let gap = substatic_consistency(imm, &pot, q).map_err(numerical)?;
    out.push(residual_record(name, "substatic_factorization", spec, 0, gap, SUBSTATIC_TOL, q));
    if imm.profile().is_some() {
        for m in 1..n {
            let r = divergence_free_check(imm, m, q).map_err(numerical)?;
            out.push(residual_record(name, "divergence_free", spec, m, r.max(), DIVERGENCE_TOL, q));
        }
    }
    let mut worst: f64 = 0.0;
    for s in sample(imm, &QuadratureSpec::new(q.order.min(4), 1)).map_err(numerical)? {
        let st = SymmetricState::new(&s.frame.shape_operator(), &s.frame.g).map_err(numerical)?;
        for (m, t) in st.newton.iter().enumerate() {
            let scale = 1.0 + t.max_abs();
            let delta = newton_tensor_by_delta(&st.shape_operator, m);
            worst = worst.max(delta.sub(t).max_abs() / scale);
            worst = worst.max(abs(t.trace() - (n - m) as f64 * st.mean[m]) / scale);
        }
    }
    out.push(residual_record(name, "newton_algebra", spec, 0, worst, NEWTON_TOL, q));
    let unit_euclidean = space == SpaceForm::Euclidean && spec.radius == 1.0 && !imm.is_closed();
    if n == 2 && unit_euclidean && imm.profile().is_some() {
        let w3 = quermassintegrals(imm, q).and_then(|w| w.get(3)).map_err(numerical)?;
        let target = 2.0 * PI / 3.0;
        let ok = abs(w3 - target) <= QUERMASS_TOL * target;
        out.push(Record::new(name, "quermass_w3", spec, 3, w3, target, verdict(ok), q));
    }
    Ok(())
}
