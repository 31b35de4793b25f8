//! JSON shape definitions: `{"kind": "cap|disk|profile|closed", "K": int, "R": float, "params": {...}}`.
//!
//! `R` is the geodesic radius of the ball (of the sphere itself for
//! `closed`). Parameters:
//!
//! * `n`: hypersurface dimension (default 2; `n ≥ 3` always uses the
//!   rotationally reduced layout),
//! * `layout`: `"full"` or `"reduced"` for `n = 2` (default full),
//! * `rho`: Euclidean model radius of the cap sphere (`cap`, and `profile`
//!   on a cap base),
//! * `base`: `"cap"` or `"disk"` for `profile` (default: cap when `rho` is
//!   given),
//! * `r`, `z`: perturbation coefficients of a `profile`,
//! * `terms`: radial coefficients of a `closed` shape,
//! * `amplitude`: perturbation amplitude `ε`,
//! * `axis`: cap axis (full layout only).

use std::path::Path;

use freeform_core::geometry::{
    make_cap, make_closed_sphere, make_flat_disk, make_profile_shape, BaseShape, Immersion, Layout, Perturbation,
};
use freeform_core::spaceform::{BallDomain, SpaceForm};
use serde::{Deserialize, Serialize};

use crate::error::{RunError, RunResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKindSpec {
    Cap,
    Disk,
    Profile,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutSpec {
    Full,
    Reduced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseSpec {
    Cap,
    Disk,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<LayoutSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub r: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub z: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    pub kind: ShapeKindSpec,
    #[serde(rename = "K")]
    pub curvature: i32,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(default)]
    pub params: ShapeParams,
}

impl ShapeSpec {
    fn base(kind: ShapeKindSpec, curvature: i32, radius: f64, n: usize) -> Self {
        ShapeSpec {
            kind,
            curvature,
            radius,
            params: ShapeParams {
                n: Some(n),
                ..ShapeParams::default()
            },
        }
    }

    pub fn cap(curvature: i32, radius: f64, n: usize, rho: f64) -> Self {
        let mut s = Self::base(ShapeKindSpec::Cap, curvature, radius, n);
        s.params.rho = Some(rho);
        s
    }

    pub fn disk(curvature: i32, radius: f64, n: usize) -> Self {
        Self::base(ShapeKindSpec::Disk, curvature, radius, n)
    }

    /// Perturbed cap (`rho = Some`) or perturbed disk.
    pub fn profile(curvature: i32, radius: f64, n: usize, rho: Option<f64>, r: Vec<f64>, z: Vec<f64>, amplitude: f64) -> Self {
        let mut s = Self::base(ShapeKindSpec::Profile, curvature, radius, n);
        s.params.base = Some(if rho.is_some() { BaseSpec::Cap } else { BaseSpec::Disk });
        s.params.rho = rho;
        s.params.r = r;
        s.params.z = z;
        s.params.amplitude = Some(amplitude);
        s
    }

    pub fn closed(curvature: i32, radius: f64, n: usize, terms: Vec<f64>, amplitude: f64) -> Self {
        let mut s = Self::base(ShapeKindSpec::Closed, curvature, radius, n);
        s.params.terms = terms;
        s.params.amplitude = Some(amplitude);
        s
    }

    pub fn from_json(text: &str) -> RunResult<Self> {
        serde_json::from_str(text).map_err(|e| RunError::Config(format!("shape definition: {e}")))
    }

    pub fn from_path(path: &Path) -> RunResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn dim(&self) -> usize {
        self.params.n.unwrap_or(2)
    }

    pub fn space(&self) -> RunResult<SpaceForm> {
        SpaceForm::from_curvature(self.curvature).map_err(|e| RunError::Config(e.to_string()))
    }

    /// Same shape with the perturbation amplitude replaced.
    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        let mut s = self.clone();
        s.params.amplitude = Some(amplitude);
        s
    }

    pub fn is_closed(&self) -> bool {
        self.kind == ShapeKindSpec::Closed
    }

    pub fn layout(&self) -> RunResult<Layout> {
        let n = self.dim();
        if n < 2 {
            return Err(RunError::Config(format!("dimension n = {n} must be at least 2")));
        }
        match (n, self.params.layout) {
            (2, None | Some(LayoutSpec::Full)) => Ok(Layout::Full),
            (_, Some(LayoutSpec::Full)) => Err(RunError::Config(
                "full charts exist only for n = 2; higher dimensions are rotationally reduced".into(),
            )),
            (_, _) => Ok(Layout::Reduced(n)),
        }
    }

    /// Constructs the immersion.
    pub fn build(&self) -> RunResult<Immersion> {
        let space = self.space()?;
        let layout = self.layout()?;
        let p = &self.params;
        let shape_err = RunError::Shape;
        let ball = || BallDomain::new(space, self.radius).map_err(shape_err);
        let imm = match self.kind {
            ShapeKindSpec::Cap => {
                let rho = p
                    .rho
                    .ok_or_else(|| RunError::Config("cap needs params.rho".into()))?;
                make_cap(space, &ball()?, rho, layout).map_err(shape_err)?
            }
            ShapeKindSpec::Disk => make_flat_disk(space, &ball()?, layout).map_err(shape_err)?,
            ShapeKindSpec::Profile => {
                let base = match (p.base, p.rho) {
                    (Some(BaseSpec::Disk), _) | (None, None) => BaseShape::Disk,
                    (_, Some(rho)) => BaseShape::Cap(rho),
                    (Some(BaseSpec::Cap), None) => {
                        return Err(RunError::Config("profile on a cap base needs params.rho".into()))
                    }
                };
                let pert = Perturbation {
                    r: p.r.clone(),
                    z: p.z.clone(),
                };
                make_profile_shape(space, &ball()?, base, &pert, p.amplitude.unwrap_or(0.0), layout).map_err(shape_err)?
            }
            ShapeKindSpec::Closed => {
                make_closed_sphere(space, self.radius, &p.terms, p.amplitude.unwrap_or(0.0), layout).map_err(shape_err)?
            }
        };
        match &p.axis {
            Some(axis) => imm.with_axis(axis).map_err(shape_err),
            None => Ok(imm),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let s = ShapeSpec::profile(-1, 1.0, 3, Some(0.4), vec![0.1, 0.2], vec![0.3], 0.2);
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"K\":-1") && text.contains("\"R\":1.0"), "{text}");
        assert_eq!(ShapeSpec::from_json(&text).unwrap(), s);
    }

    #[test]
    fn minimal_documents_parse() {
        let s = ShapeSpec::from_json(r#"{"kind": "disk", "K": 0, "R": 1}"#).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.build().unwrap().layout(), Layout::Full);
        let c = ShapeSpec::from_json(r#"{"kind": "cap", "K": 1, "R": 1, "params": {"rho": 0.5, "n": 3}}"#).unwrap();
        assert_eq!(c.build().unwrap().layout(), Layout::Reduced(3));
    }

    #[test]
    fn bad_documents_are_config_errors() {
        for text in [
            r#"{"kind": "cap", "K": 0, "R": 1}"#,
            r#"{"kind": "blob", "K": 0, "R": 1}"#,
            r#"{"kind": "disk", "K": 2, "R": 1}"#,
            r#"{"kind": "disk", "K": 0, "R": 1, "params": {"n": 3, "layout": "full"}}"#,
            r#"{"kind": "disk", "K": 0, "R": 1, "params": {"colour": 3}}"#,
        ] {
            let err = ShapeSpec::from_json(text).and_then(|s| s.build()).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}: {err}");
        }
    }

    #[test]
    fn impossible_shapes_are_shape_errors() {
        let s = ShapeSpec::disk(1, 4.0, 2);
        assert_eq!(s.build().unwrap_err().exit_code(), 3);
        let s = ShapeSpec::profile(0, 1.0, 2, None, vec![0.1], vec![0.1], 0.9);
        assert_eq!(s.build().unwrap_err().exit_code(), 3);
    }
}
