//! Frenet apparatus of analytic space curves.
//!
//! Derivatives come from third-order jets of the coordinate expressions, so
//! curvature and torsion are exact up to floating point for any speed:
//!
//! ```text
//! κ = |r' × r''| / |r'|³       τ = det(r', r'', r''') / |r' × r''|²
//! ```
//!
//! For a unit-speed parametrization these reduce to `κ = |r''|` and
//! `τ = det(r', r'', r''') / |r''|²`.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::expr::{Bindings, Expression};
use crate::jet::Jet3;

pub type Vec3 = Vector3<f64>;

/// Speed threshold below which a curve is treated as irregular.
pub const EPS_REG: f64 = 1e-9;
/// Curvature threshold (scaled by `1 + speed`) below which the frame is undefined.
pub const EPS_K: f64 = 1e-9;
/// Allowed deviation from unit speed for curves declared unit speed.
pub const UNIT_SPEED_TOL: f64 = 1e-9;

/// A curve `r(q) = (x(q), y(q), z(q))` over a closed parameter interval.
#[derive(Debug, Clone)]
pub struct CurveSpec {
    coords: [Expression; 3],
    param: String,
    domain: (f64, f64),
    unit_speed: bool,
}

impl CurveSpec {
    /// Parse the three coordinate expressions in `param`.
    pub fn parse(
        x: &str,
        y: &str,
        z: &str,
        param: &str,
        domain: (f64, f64),
        unit_speed: bool,
    ) -> Result<CurveSpec> {
        let vars = [param];
        CurveSpec::new(
            [
                Expression::parse(x, &vars)?,
                Expression::parse(y, &vars)?,
                Expression::parse(z, &vars)?,
            ],
            param,
            domain,
            unit_speed,
        )
    }

    pub fn new(
        coords: [Expression; 3],
        param: &str,
        domain: (f64, f64),
        unit_speed: bool,
    ) -> Result<CurveSpec> {
        if domain.0.partial_cmp(&domain.1) != Some(std::cmp::Ordering::Less) || !domain.0.is_finite() || !domain.1.is_finite() {
            return Err(GeomError::Invalid(format!(
                "curve domain [{}, {}] is not a proper interval",
                domain.0, domain.1
            )));
        }
        if param == "t" {
            return Err(GeomError::Invalid(
                "curve parameter may not be named 't' (reserved for the pencil)".into(),
            ));
        }
        for c in &coords {
            if let Some(v) = c.free_vars().iter().find(|v| *v != param) {
                return Err(GeomError::Invalid(format!("curve coordinate uses unknown variable '{v}'")));
            }
        }
        Ok(CurveSpec {
            coords,
            param: param.to_string(),
            domain,
            unit_speed,
        })
    }

    pub fn coords(&self) -> &[Expression; 3] {
        &self.coords
    }

    pub fn param(&self) -> &str {
        &self.param
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn declared_unit_speed(&self) -> bool {
        self.unit_speed
    }

    /// Same curve restricted to another parameter interval.
    pub fn with_domain(&self, domain: (f64, f64)) -> Result<CurveSpec> {
        CurveSpec::new(self.coords.clone(), &self.param, domain, self.unit_speed)
    }

    /// `n` uniformly spaced parameters covering the domain, endpoints included.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        uniform_samples(self.domain, n)
    }

    pub fn point(&self, q: f64) -> Result<Vec3> {
        let b = Bindings::from([(self.param.clone(), q)]);
        Ok(Vec3::new(
            self.coords[0].evaluate(&b)?,
            self.coords[1].evaluate(&b)?,
            self.coords[2].evaluate(&b)?,
        ))
    }

    /// Componentwise third-order jets of `r` at `q`.
    pub fn point_jets(&self, q: f64) -> Result<[Jet3; 3]> {
        let fixed = Bindings::new();
        let j = |i: usize| self.coords[i].evaluate_jet3(&self.param, q, &fixed);
        Ok([j(0)?, j(1)?, j(2)?])
    }

    /// Derivatives `r, r', r'', r'''` at `q`.
    pub fn derivatives(&self, q: f64) -> Result<[Vec3; 4]> {
        let [x, y, z] = self.point_jets(q)?;
        Ok([
            Vec3::new(x.v0, y.v0, z.v0),
            Vec3::new(x.v1, y.v1, z.v1),
            Vec3::new(x.v2, y.v2, z.v2),
            Vec3::new(x.v3, y.v3, z.v3),
        ])
    }

    pub fn frenet_at(&self, q: f64) -> Result<FrenetApparatus> {
        frenet_at(self, q)
    }
}

pub fn uniform_samples(range: (f64, f64), n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (range.0 + range.1)],
        _ => {
            let step = (range.1 - range.0) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { range.1 } else { range.0 + step * i as f64 })
                .collect()
        }
    }
}

/// Componentwise jets of the curve at `q`.
pub fn curve_point_jets(curve: &CurveSpec, q: f64) -> Result<[Jet3; 3]> {
    curve.point_jets(q)
}

/// Frenet frame, curvature, torsion, speed and unit Darboux vector at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrenetApparatus {
    pub param: f64,
    pub position: Vec3,
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
    pub kappa: f64,
    pub tau: f64,
    /// `|r'|`
    pub speed: f64,
    pub darboux: Vec3,
}

impl FrenetApparatus {
    /// Components of `v` in the (T, N, B) basis.
    pub fn components(&self, v: &Vec3) -> Vec3 {
        Vec3::new(v.dot(&self.tangent), v.dot(&self.normal), v.dot(&self.binormal))
    }

    /// `a T + b N + c B`
    pub fn combine(&self, a: f64, b: f64, c: f64) -> Vec3 {
        self.tangent * a + self.normal * b + self.binormal * c
    }
}

pub fn frenet_at(curve: &CurveSpec, q: f64) -> Result<FrenetApparatus> {
    let [r0, r1, r2, r3] = curve.derivatives(q)?;
    let speed = r1.norm();
    if speed <= EPS_REG {
        return Err(GeomError::Irregular { param: q, speed });
    }
    if curve.unit_speed && (speed - 1.0).abs() > UNIT_SPEED_TOL {
        return Err(GeomError::NotUnitSpeed { param: q, speed });
    }
    let cross = r1.cross(&r2);
    let cross_norm = cross.norm();
    let kappa = cross_norm / (speed * speed * speed);
    if kappa <= EPS_K * (1.0 + speed) {
        return Err(GeomError::InflectionPoint { param: q, kappa });
    }
    let tau = cross.dot(&r3) / (cross_norm * cross_norm);
    let tangent = r1 / speed;
    let binormal = cross / cross_norm;
    let normal = binormal.cross(&tangent);
    let darboux = darboux_unit_from(&tangent, &binormal, kappa, tau);
    Ok(FrenetApparatus {
        param: q,
        position: r0,
        tangent,
        normal,
        binormal,
        kappa,
        tau,
        speed,
        darboux,
    })
}

/// Unit Darboux vector `(τ T + κ B) / sqrt(κ² + τ²)`.
pub fn darboux_unit(app: &FrenetApparatus) -> Vec3 {
    darboux_unit_from(&app.tangent, &app.binormal, app.kappa, app.tau)
}

pub fn darboux_unit_from(tangent: &Vec3, binormal: &Vec3, kappa: f64, tau: f64) -> Vec3 {
    (tangent * tau + binormal * kappa) / kappa.hypot(tau)
}

/// Curvature and torsion from the unit-speed formulas `|r''|` and
/// `det(r', r'', r''') / |r''|²`; only meaningful when `|r'| = 1`.
pub fn unit_speed_curvature_torsion(r1: &Vec3, r2: &Vec3, r3: &Vec3) -> (f64, f64) {
    let k = r2.norm();
    let det = Matrix3::from_columns(&[*r1, *r2, *r3]).determinant();
    (k, det / (k * k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CurveKind {
    Planar,
    GeneralHelix,
    Salkowski,
    AntiSalkowski,
    Generic,
}

/// The invariant behind a classification: `tau` (≡ 0), `d = τ/κ`, `a = κ`
/// or `b = τ`, with its spread over the samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub name: &'static str,
    pub value: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveClass {
    pub kind: CurveKind,
    pub evidence: Option<Evidence>,
    pub samples_used: usize,
    pub skipped: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Spread {
    mean: f64,
    min: f64,
    max: f64,
}

impl Spread {
    fn of(values: impl Iterator<Item = f64> + Clone) -> Spread {
        let n = values.clone().count() as f64;
        let (min, max, sum) = values.fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(lo, hi, s), v| {
            (lo.min(v), hi.max(v), s + v)
        });
        Spread {
            mean: sum / n,
            min,
            max,
        }
    }

    fn width(&self) -> f64 {
        self.max - self.min
    }

    fn is_constant(&self, tol: f64) -> bool {
        self.width() <= tol * (1.0 + self.mean.abs())
    }

    fn evidence(&self, name: &'static str) -> Evidence {
        Evidence {
            name,
            value: self.mean,
            deviation: (self.max - self.mean).max(self.mean - self.min),
        }
    }
}

/// Classify the curve from `sample_count` uniform samples. Samples at
/// inflection points are skipped.
pub fn classify_curve(curve: &CurveSpec, sample_count: usize, tol: f64) -> Result<CurveClass> {
    if sample_count < 8 {
        return Err(GeomError::Invalid(format!(
            "classification needs at least 8 samples, got {sample_count}"
        )));
    }
    let mut kt = Vec::with_capacity(sample_count);
    let mut skipped = Vec::new();
    for q in curve.samples(sample_count) {
        match frenet_at(curve, q) {
            Ok(app) => kt.push((app.kappa, app.tau)),
            Err(GeomError::InflectionPoint { .. }) => {
                log::warn!("classification skips inflection sample at {q}");
                skipped.push(q);
            }
            Err(e) => return Err(e),
        }
    }
    if kt.is_empty() {
        return Err(GeomError::NotEnoughSamples {
            usable: 0,
            requested: sample_count,
        });
    }
    let kappa = Spread::of(kt.iter().map(|p| p.0));
    let tau = Spread::of(kt.iter().map(|p| p.1));
    let ratio = Spread::of(kt.iter().map(|p| p.1 / p.0));
    let max_abs_tau = tau.max.abs().max(tau.min.abs());

    let (kind, evidence) = if max_abs_tau <= tol {
        (
            CurveKind::Planar,
            Evidence {
                name: "tau",
                value: 0.0,
                deviation: max_abs_tau,
            },
        )
    } else if ratio.is_constant(tol) {
        (CurveKind::GeneralHelix, ratio.evidence("d"))
    } else if kappa.is_constant(tol) {
        (CurveKind::Salkowski, kappa.evidence("a"))
    } else if tau.is_constant(tol) {
        (CurveKind::AntiSalkowski, tau.evidence("b"))
    } else {
        return Ok(CurveClass {
            kind: CurveKind::Generic,
            evidence: None,
            samples_used: kt.len(),
            skipped,
        });
    };
    Ok(CurveClass {
        kind,
        evidence: Some(evidence),
        samples_used: kt.len(),
        skipped,
    })
}
