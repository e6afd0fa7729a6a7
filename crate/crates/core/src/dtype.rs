//! D-type curves: verification of `⟨n, W₀⟩ = c` along the common curve,
//! the component conditions on the surface normal, and synthesis of
//! marching scales that realize a prescribed constant `c`.
//!
//! Along `t = t0` the normal has no tangential part, `n = φ₂ N + φ₃ B`, and
//! since `W₀` lies in the rectifying plane,
//!
//! ```text
//! ⟨n, W₀⟩ = φ₃ κ / sqrt(κ² + τ²)
//! ```
//!
//! so `⟨n, W₀⟩ = c` holds iff `φ₃ = c sqrt(κ² + τ²) / κ` and
//! `φ₂ = ± sqrt(1 - c² (κ² + τ²) / κ²)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::expr::{BinOp, Expression, Node};
use crate::frenet::{classify_curve, frenet_at, uniform_samples, CurveKind, CurveSpec, FrenetApparatus};
use crate::pencil::{
    marching_values, Controls, MarchingForm, MarchingScale, SampledScale, SurfacePencil, TABLE_CHANNELS,
    T_VAR,
};
use crate::table::{build_segment, TableSegment};

/// Radicand tolerance: parameters with `1 - c²(κ²+τ²)/κ² < -FEASIBILITY_TOL` are infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-12;
/// Parameter resolution of feasible-interval endpoints.
pub const BOUNDARY_RESOLUTION: f64 = 1e-9;
/// Tolerance used to flag the geodesic and asymptotic special cases.
pub const SPECIAL_CASE_TOL: f64 = 1e-9;

/// Components of the unit surface normal along `t = t0` in the Frenet basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Phi {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

/// `1 - c² (κ² + τ²) / κ²`
pub fn radicand(c: f64, kappa: f64, tau: f64) -> f64 {
    1.0 - c * c * (kappa * kappa + tau * tau) / (kappa * kappa)
}

/// `c sqrt(κ² + τ²) / κ`, the binormal component required by `c`.
pub fn required_phi3(c: f64, kappa: f64, tau: f64) -> f64 {
    c * kappa.hypot(tau) / kappa
}

struct CurveSample {
    frame: FrenetApparatus,
    phi: Phi,
    iso: f64,
}

fn sample_at(p: &SurfacePencil, s: f64) -> Result<CurveSample> {
    let frame = p.frame(s)?;
    let t0 = p.t0();
    let mv = marching_values(&p.marching, s, t0)?;
    let n = p.normal_with(&frame, s, t0)?;
    let c = frame.components(&n);
    Ok(CurveSample {
        frame,
        phi: Phi {
            phi1: c[0],
            phi2: c[1],
            phi3: c[2],
        },
        iso: mv.u.abs().max(mv.v.abs()).max(mv.w.abs()),
    })
}

pub fn phi_components(p: &SurfacePencil, s: f64) -> Result<Phi> {
    sample_at(p, s).map(|x| x.phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DTypeSample {
    pub s: f64,
    /// `⟨n(s, t0), W₀(s)⟩`
    pub inner: f64,
    pub phi2: f64,
    pub phi3: f64,
    /// `n = cos θ N + sin θ B`
    pub theta: f64,
    pub kappa: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedSample {
    pub s: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SpecialCases {
    /// `c = 0`: the surface normal is parallel to the principal normal.
    pub geodesic: bool,
    /// `|φ₃| = 1` on a planar curve: normal orthogonal to the principal normal.
    pub asymptotic_planar: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DTypeReport {
    pub samples: Vec<DTypeSample>,
    pub c_estimate: f64,
    pub max_deviation: f64,
    pub skipped: Vec<SkippedSample>,
    pub tolerance: f64,
    pub verdict: bool,
    pub special: SpecialCases,
}

impl DTypeReport {
    /// Assemble a report from samples; `c_estimate` is their mean.
    pub fn from_samples(samples: Vec<DTypeSample>, skipped: Vec<SkippedSample>, tolerance: f64) -> DTypeReport {
        let c_estimate = if samples.is_empty() {
            f64::NAN
        } else {
            samples.iter().map(|x| x.inner).sum::<f64>() / samples.len() as f64
        };
        let max_deviation = samples
            .iter()
            .map(|x| (x.inner - c_estimate).abs())
            .fold(0.0, f64::max);
        let verdict = !samples.is_empty() && max_deviation <= tolerance;
        let special = SpecialCases {
            geodesic: verdict && c_estimate.abs() <= SPECIAL_CASE_TOL,
            asymptotic_planar: !samples.is_empty()
                && samples
                    .iter()
                    .all(|x| x.phi3.abs() >= 1.0 - SPECIAL_CASE_TOL && x.tau.abs() <= SPECIAL_CASE_TOL),
        };
        DTypeReport {
            samples,
            c_estimate,
            max_deviation,
            skipped,
            tolerance,
            verdict,
            special,
        }
    }
}

pub fn verify_dtype(p: &SurfacePencil, sample_count: usize, tolerance: f64) -> Result<DTypeReport> {
    verify_dtype_on(p, p.curve.domain(), sample_count, tolerance)
}

/// Verify on a sub-range of the curve parameter. Samples where the frame,
/// the marching scale or the normal is undefined are skipped.
pub fn verify_dtype_on(
    p: &SurfacePencil,
    range: (f64, f64),
    sample_count: usize,
    tolerance: f64,
) -> Result<DTypeReport> {
    if sample_count < 16 {
        return Err(GeomError::Invalid(format!(
            "verification needs at least 16 samples, got {sample_count}"
        )));
    }
    let results: Vec<(f64, Result<CurveSample>)> = uniform_samples(range, sample_count)
        .into_par_iter()
        .map(|s| (s, sample_at(p, s)))
        .collect();
    let mut samples = Vec::with_capacity(sample_count);
    let mut skipped = Vec::new();
    for (s, r) in results {
        match r {
            Ok(cs) => {
                let Phi { phi2, phi3, .. } = cs.phi;
                samples.push(DTypeSample {
                    s,
                    inner: phi3 * cs.frame.kappa / cs.frame.kappa.hypot(cs.frame.tau),
                    phi2,
                    phi3,
                    theta: phi3.atan2(phi2),
                    kappa: cs.frame.kappa,
                    tau: cs.frame.tau,
                });
            }
            Err(e) => skipped.push(SkippedSample {
                s,
                reason: e.to_string(),
            }),
        }
    }
    if samples.len() < 2 {
        return Err(GeomError::NotEnoughSamples {
            usable: samples.len(),
            requested: sample_count,
        });
    }
    Ok(DTypeReport::from_samples(samples, skipped, tolerance))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    pub name: &'static str,
    pub max_error: f64,
    pub passed: bool,
}

/// Specialization of the conditions for a recognized curve family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CorollaryBranch {
    /// `c = 0`: `φ₂ = ±1`, `φ₃ = 0`.
    Geodesic,
    /// Planar curve with `|c| = 1`: `φ₂ = 0`, `φ₃ = ±1`.
    AsymptoticPlanar,
    /// `τ ≡ 0`: `φ₃ = c`, `φ₂ = ±sqrt(1 - c²)`.
    Planar,
    /// `τ/κ = d`: `φ₃ = c sqrt(1 + d²)`.
    GeneralHelix { d: f64 },
    /// `κ = a`: `φ₃ = c sqrt(a² + τ²) / a`.
    Salkowski { a: f64 },
    /// `τ = b`: `φ₃ = c sqrt(κ² + b²) / κ`.
    AntiSalkowski { b: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryCheck {
    pub branch: CorollaryBranch,
    /// Worst disagreement between the specialized `φ₃` formula and the measured `φ₃`.
    pub phi3_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub c: f64,
    pub phi2_sign: f64,
    pub conditions: Vec<ConditionResult>,
    pub corollary: Option<CorollaryCheck>,
    pub samples_used: usize,
    pub passed: bool,
}

/// Check, sample by sample, the isoparametric condition and the required
/// Frenet components of the normal for constant `c` and branch `phi2_sign`
/// (the sign of `φ₂`).
pub fn check_theorem_conditions(
    p: &SurfacePencil,
    c: f64,
    phi2_sign: f64,
    sample_count: usize,
    tol: f64,
) -> Result<TheoremCheck> {
    if sample_count < 16 {
        return Err(GeomError::Invalid(format!(
            "theorem check needs at least 16 samples, got {sample_count}"
        )));
    }
    let sign = phi2_sign.signum();
    let mut iso = 0.0f64;
    let mut phi1 = 0.0f64;
    let mut phi2 = 0.0f64;
    let mut phi3 = 0.0f64;
    let mut used = Vec::new();
    for s in p.curve.samples(sample_count) {
        let Ok(cs) = sample_at(p, s) else { continue };
        let (k, t) = (cs.frame.kappa, cs.frame.tau);
        let rad = radicand(c, k, t);
        if rad < -tol {
            return Err(GeomError::InfeasibleConstant {
                c,
                param: s,
                radicand: rad,
            });
        }
        iso = iso.max(cs.iso);
        phi1 = phi1.max(cs.phi.phi1.abs());
        phi2 = phi2.max((cs.phi.phi2 - sign * rad.max(0.0).sqrt()).abs());
        phi3 = phi3.max((cs.phi.phi3 - required_phi3(c, k, t)).abs());
        used.push((s, cs));
    }
    if used.len() < 2 {
        return Err(GeomError::NotEnoughSamples {
            usable: used.len(),
            requested: sample_count,
        });
    }
    let cond = |name, max_error: f64| ConditionResult {
        name,
        max_error,
        passed: max_error <= tol,
    };
    let conditions = vec![
        cond("isoparametric", iso),
        cond("phi1_zero", phi1),
        cond("phi2_branch", phi2),
        cond("phi3_required", phi3),
    ];
    let corollary = corollary_check(p, c, tol, &used)?;
    let passed = conditions.iter().all(|x| x.passed) && corollary.as_ref().is_none_or(|x| x.passed);
    Ok(TheoremCheck {
        c,
        phi2_sign: sign,
        conditions,
        corollary,
        samples_used: used.len(),
        passed,
    })
}

fn corollary_check(
    p: &SurfacePencil,
    c: f64,
    tol: f64,
    used: &[(f64, CurveSample)],
) -> Result<Option<CorollaryCheck>> {
    let class = classify_curve(&p.curve, used.len().max(8), tol.max(1e-9))?;
    let branch = if c.abs() <= tol {
        CorollaryBranch::Geodesic
    } else {
        let evidence = class.evidence.as_ref().map(|e| e.value).unwrap_or(f64::NAN);
        match class.kind {
            CurveKind::Planar if (c.abs() - 1.0).abs() <= tol => CorollaryBranch::AsymptoticPlanar,
            CurveKind::Planar => CorollaryBranch::Planar,
            CurveKind::GeneralHelix => CorollaryBranch::GeneralHelix { d: evidence },
            CurveKind::Salkowski => CorollaryBranch::Salkowski { a: evidence },
            CurveKind::AntiSalkowski => CorollaryBranch::AntiSalkowski { b: evidence },
            CurveKind::Generic => return Ok(None),
        }
    };
    let predicted = |f: &FrenetApparatus| -> f64 {
        match &branch {
            CorollaryBranch::Geodesic => 0.0,
            CorollaryBranch::AsymptoticPlanar => c.signum(),
            CorollaryBranch::Planar => c,
            CorollaryBranch::GeneralHelix { d } => c * (1.0 + d * d).sqrt(),
            CorollaryBranch::Salkowski { a } => c * a.hypot(f.tau) / a,
            CorollaryBranch::AntiSalkowski { b } => c * f.kappa.hypot(*b) / f.kappa,
        }
    };
    let phi3_error = used
        .iter()
        .map(|(_, cs)| (cs.phi.phi3 - predicted(&cs.frame)).abs())
        .fold(0.0, f64::max);
    Ok(Some(CorollaryCheck {
        branch,
        phi3_error,
        passed: phi3_error <= tol,
    }))
}

fn feasible_at(curve: &CurveSpec, c: f64, s: f64) -> bool {
    frenet_at(curve, s).is_ok_and(|f| radicand(c, f.kappa, f.tau) >= -FEASIBILITY_TOL)
}

/// Subintervals of the curve domain where the frame is defined and
/// `c² (κ² + τ²) ≤ κ²`, with endpoints located by bisection.
pub fn feasible_domain(curve: &CurveSpec, c: f64, sample_count: usize) -> Vec<(f64, f64)> {
    let qs = curve.samples(sample_count.max(64));
    let states: Vec<bool> = qs.par_iter().map(|&s| feasible_at(curve, c, s)).collect();
    let ok = |s: f64| feasible_at(curve, c, s);
    let mut out = Vec::new();
    let mut start = states[0].then_some(qs[0]);
    for i in 1..qs.len() {
        match (states[i - 1], states[i]) {
            (false, true) => start = Some(bisect_boundary(qs[i - 1], qs[i], ok)),
            (true, false) => {
                let end = bisect_boundary(qs[i], qs[i - 1], ok);
                if let Some(a) = start.take() {
                    if end > a {
                        out.push((a, end));
                    }
                }
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        let end = *qs.last().unwrap();
        if end > a {
            out.push((a, end));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct SynthesisRequest {
    pub curve: CurveSpec,
    pub c: f64,
    /// Sign of the binormal coefficient `w`; `+1` gives `φ₂ < 0`.
    pub w_sign: f64,
    /// `u(t)`, vanishing at `t0`; defaults to `t - t0`.
    pub u_profile: Option<Expression>,
    pub t0: f64,
}

impl SynthesisRequest {
    pub fn new(curve: CurveSpec, c: f64) -> Self {
        SynthesisRequest {
            curve,
            c,
            w_sign: 1.0,
            u_profile: None,
            t0: 0.0,
        }
    }
}

/// Constant coefficients `v = v_coef (t - t0)`, `w = w_coef (t - t0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForm {
    pub v_coef: f64,
    pub w_coef: f64,
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub marching: MarchingScale,
    pub closed_form: Option<ClosedForm>,
    pub feasible: Vec<(f64, f64)>,
    /// Parts of the curve domain the marching scale does not cover.
    pub excluded: Vec<(f64, f64)>,
}

const SYNTH_SAMPLES: usize = 256;
const TABLE_INITIAL_NODES: usize = 257;
const TABLE_MAX_NODES: usize = 1 << 17;
const TABLE_TOL: f64 = 1e-10;

/// `[a, radicand, 1/|r'|]` with `a = c sqrt(κ²+τ²) / (κ |r'|)`.
fn coefficient_channels(curve: &CurveSpec, c: f64, s: f64) -> Option<[f64; TABLE_CHANNELS]> {
    let f = frenet_at(curve, s).ok()?;
    let rad = radicand(c, f.kappa, f.tau);
    (rad >= -FEASIBILITY_TOL).then(|| [required_phi3(c, f.kappa, f.tau) / f.speed, rad, 1.0 / f.speed])
}

fn t_minus_t0(t0: f64) -> Node {
    let t = Node::Var(T_VAR.to_string());
    if t0 == 0.0 {
        t
    } else {
        Node::Binary(BinOp::Sub, Box::new(t), Box::new(Node::Number(t0)))
    }
}

fn scaled_t(coef: f64, t0: f64) -> Expression {
    Expression::from_node(Node::Binary(
        BinOp::Mul,
        Box::new(Node::Number(coef)),
        Box::new(t_minus_t0(t0)),
    ))
}

/// Marching scale with `⟨n, W₀⟩ = c` along the curve: `u = U(t)`,
/// `v = c sqrt(κ²+τ²)/κ (t - t0)/|r'|`, `w = ±sqrt(1 - c²(κ²+τ²)/κ²) (t - t0)/|r'|`.
pub fn synthesize_marching_scale(req: &SynthesisRequest) -> Result<Synthesis> {
    if req.w_sign.abs() != 1.0 {
        return Err(GeomError::Invalid(format!("sign must be +1 or -1, got {}", req.w_sign)));
    }
    let curve = &req.curve;
    let param = curve.param();
    let u_profile = match &req.u_profile {
        Some(u) => {
            if u.free_vars().iter().any(|v| v != T_VAR) {
                return Err(GeomError::Invalid("u profile may only depend on t".into()));
            }
            u.clone()
        }
        None => Expression::from_node(t_minus_t0(req.t0)),
    };
    let feasible = feasible_domain(curve, req.c, SYNTH_SAMPLES);
    if feasible.is_empty() {
        let (param, rad) = curve
            .samples(SYNTH_SAMPLES)
            .into_iter()
            .filter_map(|s| frenet_at(curve, s).ok().map(|f| (s, radicand(req.c, f.kappa, f.tau))))
            .fold((f64::NAN, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        return Err(GeomError::InfeasibleConstant {
            c: req.c,
            param,
            radicand: rad,
        });
    }

    let domain = curve.domain();
    let whole = feasible.len() == 1 && feasible[0] == domain;
    if whole {
        if let Some(cf) = constant_coefficients(curve, req.c, req.w_sign) {
            let one = || Expression::constant(1.0);
            let marching = MarchingScale {
                form: MarchingForm::Product {
                    l: one(),
                    m: one(),
                    n: one(),
                    big_u: u_profile,
                    big_v: scaled_t(cf.v_coef, req.t0),
                    big_w: scaled_t(cf.w_coef, req.t0),
                },
                controls: Controls::default(),
                t0: req.t0,
                s_var: param.to_string(),
            };
            return Ok(Synthesis {
                marching,
                closed_form: Some(cf),
                feasible,
                excluded: Vec::new(),
            });
        }
    }

    let mut segments = Vec::new();
    for &(lo, hi) in &feasible {
        segments.extend(table_segments(curve, req.c, lo, hi));
    }
    if segments.is_empty() {
        return Err(GeomError::NotEnoughSamples {
            usable: 0,
            requested: TABLE_INITIAL_NODES,
        });
    }
    let excluded = complement(domain, segments.iter().map(|s| (s.start, s.end)));
    let marching = MarchingScale {
        form: MarchingForm::Sampled(SampledScale {
            u_profile,
            w_sign: req.w_sign,
            segments,
        }),
        controls: Controls::default(),
        t0: req.t0,
        s_var: param.to_string(),
    };
    Ok(Synthesis {
        marching,
        closed_form: None,
        feasible,
        excluded,
    })
}

fn constant_coefficients(curve: &CurveSpec, c: f64, w_sign: f64) -> Option<ClosedForm> {
    let values: Option<Vec<[f64; 2]>> = curve
        .samples(SYNTH_SAMPLES)
        .into_par_iter()
        .map(|s| coefficient_channels(curve, c, s).map(|[a, rad, inv]| [a, w_sign * rad.max(0.0).sqrt() * inv]))
        .collect();
    let values = values?;
    let first = values[0];
    let constant = values.iter().all(|v| {
        (0..2).all(|i| (v[i] - first[i]).abs() <= 1e-12 * (1.0 + first[i].abs()))
    });
    constant.then(|| {
        let n = values.len() as f64;
        ClosedForm {
            v_coef: values.iter().map(|v| v[0]).sum::<f64>() / n,
            w_coef: values.iter().map(|v| v[1]).sum::<f64>() / n,
        }
    })
}

/// Tables over `[lo, hi]`, split wherever a node of the initial grid has
/// no frame.
fn table_segments(curve: &CurveSpec, c: f64, lo: f64, hi: f64) -> Vec<TableSegment<TABLE_CHANNELS>> {
    let f = |s: f64| coefficient_channels(curve, c, s);
    let nodes = uniform_samples((lo, hi), TABLE_INITIAL_NODES);
    let ok: Vec<bool> = nodes.par_iter().map(|&s| f(s).is_some()).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        if !ok[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < nodes.len() && ok[i] {
            i += 1;
        }
        let run = i - start;
        if run >= 4 {
            let mut a = nodes[start];
            let mut b = nodes[i - 1];
            if start > 0 {
                a = bisect_boundary(nodes[start - 1], a, |s| f(s).is_some());
            }
            if i < nodes.len() {
                b = bisect_boundary(nodes[i], b, |s| f(s).is_some());
            }
            if let Some(seg) = build_segment(a, b, run, TABLE_MAX_NODES, TABLE_TOL, f) {
                out.push(seg);
            }
        }
    }
    out
}

/// Move from `good` toward `bad` while `ok` holds, to `BOUNDARY_RESOLUTION`.
fn bisect_boundary(bad: f64, good: f64, ok: impl Fn(f64) -> bool) -> f64 {
    let (mut bad, mut good) = (bad, good);
    while (bad - good).abs() > BOUNDARY_RESOLUTION {
        let mid = 0.5 * (bad + good);
        if ok(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

fn complement(domain: (f64, f64), covered: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut cursor = domain.0;
    for (a, b) in covered {
        if a > cursor {
            out.push((cursor, a));
        }
        cursor = cursor.max(b);
    }
    if cursor < domain.1 {
        out.push((cursor, domain.1));
    }
    out
}
