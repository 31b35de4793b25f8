//! Amplitude sweeps: one inequality evaluated along `ε ↦ shape(ε)`.

use std::io::Write;
use std::str::FromStr;

use freeform_core::functionals::{check_corollary_low_dim, check_main_inequality, Corollary, InequalityCheck, Tolerances};
use freeform_core::quadrature::QuadratureSpec;
use freeform_core::spaceform::Potential;
use rayon::prelude::*;

use crate::error::{numerical, RunError, RunResult};
use crate::family::BALL_RADIUS;
use crate::report::{csv_num, defined_ratio};
use crate::shape::ShapeSpec;
use crate::suite::Suite;

/// `start:end:step`, inclusive of `end` up to rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonRange {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl FromStr for EpsilonRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!("expected start:end:step, got {s:?}"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        let r = EpsilonRange {
            start: num(a)?,
            end: num(b)?,
            step: num(c)?,
        };
        if !(r.step > 0.0) || !(r.end >= r.start) || !r.start.is_finite() || !r.end.is_finite() {
            return Err("need start ≤ end and step > 0".into());
        }
        Ok(r)
    }
}

impl EpsilonRange {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// The built-in `profile` shape: a cap with a fixed mixed perturbation.
pub fn builtin_profile(curvature: i32, n: usize) -> ShapeSpec {
    ShapeSpec::profile(curvature, BALL_RADIUS, n, Some(0.8), vec![0.6, -0.3], vec![0.8, 0.2], 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
}

fn check_at(suite: Suite, spec: &ShapeSpec, k: usize, quad: &QuadratureSpec, tol: &Tolerances) -> RunResult<InequalityCheck> {
    let imm = spec.build()?;
    let c = match suite {
        Suite::Thm1 | Suite::Kwong | Suite::CorConvex => check_main_inequality(&imm, k, None, quad, tol),
        Suite::Thm4 => {
            let pot = Potential::new(imm.space(), &imm.axis()).map_err(numerical)?;
            check_main_inequality(&imm, k, Some(&pot), quad, tol)
        }
        Suite::CorLowdim => {
            let which = if imm.dim() == 2 { Corollary::Surface } else { Corollary::ThreeFold };
            check_corollary_low_dim(&imm, which, quad, tol)
        }
        Suite::Perez | Suite::Reilly | Suite::Identities => {
            return Err(RunError::Config(format!("{} has no single inequality to sweep", suite.name())))
        }
    };
    c.map_err(numerical)
}

pub fn run_sweep(
    suite: Suite,
    base: &ShapeSpec,
    range: &EpsilonRange,
    k: usize,
    quad: &QuadratureSpec,
    tol: &Tolerances,
) -> RunResult<Vec<SweepPoint>> {
    range
        .values()
        .par_iter()
        .map(|&eps| {
            let c = check_at(suite, &base.with_amplitude(eps), k, quad, tol)?;
            Ok(SweepPoint {
                epsilon: eps,
                lhs: c.lhs,
                rhs: c.rhs,
                ratio: defined_ratio(&c, base.dim()),
            })
        })
        .collect()
}

pub fn write_sweep_csv(points: &[SweepPoint], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "epsilon,lhs,rhs,ratio")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{}",
            csv_num(Some(p.epsilon)),
            csv_num(Some(p.lhs)),
            csv_num(Some(p.rhs)),
            csv_num(p.ratio)
        )?;
    }
    Ok(())
}
