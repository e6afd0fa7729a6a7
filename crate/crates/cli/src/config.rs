//! JSON scene configuration.
//!
//! Numeric fields accept either a JSON number or an expression string
//! without variables, e.g. `"sqrt(3)/2"` or `"-2*pi"`.

use std::fmt;

use pencil_core::dtype::{feasible_domain, synthesize_marching_scale, Synthesis, SynthesisRequest};
use pencil_core::{Controls, CurveSpec, Expression, GeomError, MarchingScale, SurfacePencil};
use serde::{Deserialize, Serialize};

use crate::Failure;

const FEASIBILITY_SAMPLES: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Value(f64),
    Expr(String),
}

impl Num {
    pub fn resolve(&self, field: &str) -> Result<f64, Failure> {
        match self {
            Num::Value(x) => Ok(*x),
            Num::Expr(src) => Expression::parse(src, &[])
                .map_err(|e| Failure::Validation(format!("{field}: {e}")))?
                .evaluate_const()
                .map_err(|e| Failure::Validation(format!("{field}: {e}"))),
        }
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num::Value(x)
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Value(x) => write!(f, "{x}"),
            Num::Expr(s) => f.write_str(s),
        }
    }
}

fn one() -> Num {
    Num::Value(1.0)
}

fn zero() -> Num {
    Num::Value(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub x: String,
    pub y: String,
    pub z: String,
    pub param: String,
    pub range: [Num; 2],
    #[serde(default)]
    pub unit_speed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Explicit,
    Synthesized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitConfig {
    pub u: String,
    pub v: String,
    pub w: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductConfig {
    pub l: String,
    pub m: String,
    pub n: String,
    #[serde(rename = "U")]
    pub big_u: String,
    #[serde(rename = "V")]
    pub big_v: String,
    #[serde(rename = "W")]
    pub big_w: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlsConfig {
    #[serde(default = "one")]
    pub x: Num,
    #[serde(default = "one")]
    pub y: Num,
    #[serde(default = "one")]
    pub z: Num,
}

impl Default for ControlsConfig {
    fn default() -> Self {
        ControlsConfig {
            x: one(),
            y: one(),
            z: one(),
        }
    }
}

/// Summary of a sampled coefficient table; the table itself is rebuilt
/// from `c` and `sign` when the config is loaded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReference {
    pub segments: Vec<TableSegmentInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSegmentInfo {
    pub start: f64,
    pub end: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarchingConfig {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit: Option<ExplicitConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<ProductConfig>,
    #[serde(default)]
    pub controls: ControlsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Num>,
    /// Sign of the binormal coefficient `w`; only read when synthesizing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_profile: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasible_domain: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TableReference>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_ns")]
    pub ns: usize,
    #[serde(default = "default_nt")]
    pub nt: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_range: Option<[Num; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_range: Option<[Num; 2]>,
}

fn default_ns() -> usize {
    200
}

fn default_nt() -> usize {
    50
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            ns: default_ns(),
            nt: default_nt(),
            t_range: None,
            s_range: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obj_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<String>,
}

impl OutputsConfig {
    fn is_empty(&self) -> bool {
        self.obj_path.is_none() && self.csv_path.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub curve: CurveConfig,
    pub marching: MarchingConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "zero")]
    pub t0: Num,
    #[serde(default, skip_serializing_if = "OutputsConfig::is_empty")]
    pub outputs: OutputsConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// A validated, ready-to-evaluate scene.
#[derive(Debug, Clone)]
pub struct Scene {
    pub name: String,
    pub pencil: SurfacePencil,
    pub s_range: (f64, f64),
    pub t_range: (f64, f64),
    pub ns: usize,
    pub nt: usize,
    /// Target constant, when the config states one.
    pub c: Option<f64>,
    pub sign: f64,
    pub synthesis: Option<Synthesis>,
}

fn range(pair: &[Num; 2], field: &str) -> Result<(f64, f64), Failure> {
    let r = (pair[0].resolve(field)?, pair[1].resolve(field)?);
    if r.0.partial_cmp(&r.1) != Some(std::cmp::Ordering::Less) {
        return Err(Failure::Validation(format!("{field}: [{}, {}] is not well ordered", r.0, r.1)));
    }
    Ok(r)
}

impl SceneConfig {
    pub fn from_json(text: &str) -> Result<SceneConfig, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::Validation(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn curve_spec(&self) -> Result<CurveSpec, Failure> {
        let c = &self.curve;
        for (field, src) in [("curve.x", &c.x), ("curve.y", &c.y), ("curve.z", &c.z)] {
            Expression::parse(src, &[c.param.as_str()]).map_err(|e| Failure::Validation(format!("{field}: {e}")))?;
        }
        let domain = range(&c.range, "curve.range")?;
        CurveSpec::parse(&c.x, &c.y, &c.z, &c.param, domain, c.unit_speed).map_err(Failure::from)
    }

    pub fn controls(&self) -> Result<Controls, Failure> {
        let c = &self.marching.controls;
        Ok(Controls {
            x: c.x.resolve("marching.controls.x")?,
            y: c.y.resolve("marching.controls.y")?,
            z: c.z.resolve("marching.controls.z")?,
        })
    }

    pub fn target_c(&self) -> Result<Option<f64>, Failure> {
        self.marching.c.as_ref().map(|c| c.resolve("marching.c")).transpose()
    }

    pub fn sign(&self) -> Result<f64, Failure> {
        match self.marching.sign {
            None => Ok(1.0),
            Some(s) if s == 1.0 || s == -1.0 => Ok(s),
            Some(s) => Err(Failure::Validation(format!("marching.sign must be 1 or -1, got {s}"))),
        }
    }

    pub fn t0_value(&self) -> Result<f64, Failure> {
        self.t0.resolve("t0")
    }

    pub fn synthesis_request(&self, curve: CurveSpec) -> Result<SynthesisRequest, Failure> {
        let c = self
            .target_c()?
            .ok_or_else(|| Failure::Validation("marching.c is required for synthesis".into()))?;
        let u_profile = self
            .marching
            .u_profile
            .as_deref()
            .map(|src| Expression::parse(src, &["t"]))
            .transpose()
            .map_err(|e| Failure::Validation(format!("marching.u_profile: {e}")))?;
        Ok(SynthesisRequest {
            curve,
            c,
            w_sign: self.sign()?,
            u_profile,
            t0: self.t0_value()?,
        })
    }

    /// Validate the config and build its pencil, synthesizing the marching
    /// scale when the mode asks for it.
    pub fn scene(&self) -> Result<Scene, Failure> {
        let curve = self.curve_spec()?;
        let t0 = self.t0_value()?;
        let param = curve.param().to_string();
        if self.grid.ns < 2 || self.grid.nt < 2 {
            return Err(Failure::Validation(format!(
                "grid must be at least 2x2, got {}x{}",
                self.grid.ns, self.grid.nt
            )));
        }
        let t_range = match &self.grid.t_range {
            Some(r) => range(r, "grid.t_range")?,
            None => (t0, t0 + 1.0),
        };
        let s_range = match &self.grid.s_range {
            Some(r) => range(r, "grid.s_range")?,
            None => curve.domain(),
        };
        let controls = self.controls()?;
        let (marching, synthesis) = match self.marching.mode {
            Mode::Explicit => {
                let m = &self.marching;
                let ms = match (&m.explicit, &m.product) {
                    (Some(e), None) => MarchingScale::general(&param, [&e.u, &e.v, &e.w].map(String::as_str), controls, t0),
                    (None, Some(p)) => MarchingScale::product(
                        &param,
                        [&p.l, &p.m, &p.n].map(String::as_str),
                        [&p.big_u, &p.big_v, &p.big_w].map(String::as_str),
                        controls,
                        t0,
                    ),
                    _ => {
                        return Err(Failure::Validation(
                            "explicit mode needs exactly one of marching.explicit or marching.product".into(),
                        ))
                    }
                }
                .map_err(|e| Failure::Validation(format!("marching: {e}")))?;
                if let Some(c) = self.target_c()? {
                    if feasible_domain(&curve, c, FEASIBILITY_SAMPLES).is_empty() {
                        return Err(Failure::Infeasible(format!(
                            "no point of the curve admits a D-type normal with c = {c}"
                        )));
                    }
                }
                (ms, None)
            }
            Mode::Synthesized => {
                let syn = synthesize_marching_scale(&self.synthesis_request(curve.clone())?)?;
                let mut ms = syn.marching.clone();
                ms.controls = controls;
                (ms, Some(syn))
            }
        };
        let pencil = SurfacePencil::new(curve, marching, t_range)?;
        Ok(Scene {
            name: self.name.clone().unwrap_or_else(|| "scene".to_string()),
            pencil,
            s_range,
            t_range,
            ns: self.grid.ns,
            nt: self.grid.nt,
            c: self.target_c()?,
            sign: self.sign()?,
            synthesis,
        })
    }
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        use pencil_core::ExprError;
        match e {
            GeomError::InfeasibleConstant { .. } => Failure::Infeasible(e.to_string()),
            GeomError::Invalid(_)
            | GeomError::NotIsoparametric { .. }
            | GeomError::NotUnitSpeed { .. }
            | GeomError::Expr(
                ExprError::Syntax { .. }
                | ExprError::UnknownFunction { .. }
                | ExprError::UnknownVariable { .. }
                | ExprError::Unbound(_),
            ) => Failure::Validation(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}
