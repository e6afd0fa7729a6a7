#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use pencil_core::{Controls, CurveSpec, MarchingScale, SurfacePencil, Vec3};

pub fn circle() -> CurveSpec {
    CurveSpec::parse("cos(s)", "sin(s)", "0", "s", (-TAU, TAU), true).unwrap()
}

pub fn helix() -> CurveSpec {
    CurveSpec::parse("cos(s/sqrt(2))", "sin(s/sqrt(2))", "s/sqrt(2)", "s", (-TAU, TAU), true).unwrap()
}

pub fn eight() -> CurveSpec {
    CurveSpec::parse("sin(q)", "sin(q)*cos(q)", "0", "q", (0.0, TAU), false).unwrap()
}

pub const SALKOWSKI_X: &str = "5/sqrt(26)*((sqrt(26) - 26)/(104 + 8*sqrt(26))*sin((1 + sqrt(26)/13)*q) + (sqrt(26) + 26)/(-104 + 8*sqrt(26))*sin((1 - sqrt(26)/13)*q) - 1/2*sin(q))";
pub const SALKOWSKI_Y: &str = "5/sqrt(26)*((26 - sqrt(26))/(104 + 8*sqrt(26))*cos((1 + sqrt(26)/13)*q) - (sqrt(26) + 26)/(-104 + 8*sqrt(26))*cos((1 - sqrt(26)/13)*q) + 1/2*cos(q))";
pub const SALKOWSKI_Z: &str = "25/(4*sqrt(26))*cos(sqrt(26)/13*q)";

pub fn salkowski() -> CurveSpec {
    CurveSpec::parse(SALKOWSKI_X, SALKOWSKI_Y, SALKOWSKI_Z, "q", (0.0, TAU), false).unwrap()
}

/// Twisted cubic `(q, q², q³)`: non-unit speed, `τ/κ` not constant.
pub fn twisted_cubic() -> CurveSpec {
    CurveSpec::parse("q", "q^2", "q^3", "q", (-1.0, 1.0), false).unwrap()
}

/// Where the Salkowski binormal coefficient stays real for c = √3/2.
pub fn salkowski_feasible_end() -> f64 {
    26f64.sqrt() * PI / 6.0
}

pub fn product_pencil(curve: CurveSpec, v: &str, w: &str, t_range: (f64, f64)) -> SurfacePencil {
    let param = curve.param().to_string();
    let ms = MarchingScale::product(&param, ["1", "1", "1"], ["t", v, w], Controls::default(), 0.0).unwrap();
    SurfacePencil::new(curve, ms, t_range).unwrap()
}

pub fn general_pencil(curve: CurveSpec, u: &str, v: &str, w: &str, t_range: (f64, f64)) -> SurfacePencil {
    let param = curve.param().to_string();
    let ms = MarchingScale::general(&param, [u, v, w], Controls::default(), 0.0).unwrap();
    SurfacePencil::new(curve, ms, t_range).unwrap()
}

pub fn example3_pencil() -> SurfacePencil {
    general_pencil(
        eight(),
        "t",
        "sqrt(3)/2*t/sqrt(4*cos(q)^4 - 3*cos(q)^2 + 1)",
        "1/2*t/sqrt(4*cos(q)^4 - 3*cos(q)^2 + 1)",
        (0.0, 1.0),
    )
}

pub fn example4_pencil() -> SurfacePencil {
    general_pencil(
        salkowski().with_domain((0.0, salkowski_feasible_end())).unwrap(),
        "t",
        "sqrt(78)/(10*cos(sqrt(26)/26*q)^2)*t",
        "sqrt(26)/10*sqrt(1 - 3*tan(sqrt(26)/26*q)^2)/cos(sqrt(26)/26*q)*t",
        (0.0, 1.0),
    )
}

/// Central differences of orders 1 to 3, Richardson-extrapolated twice
/// (steps `h`, `h/2`, `h/4`) so the truncation error is `O(h^6)`.
pub fn richardson<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> [f64; 3] {
    let d = |h: f64| {
        let (p1, m1, p2, m2) = (f(x + h), f(x - h), f(x + 2.0 * h), f(x - 2.0 * h));
        let f0 = f(x);
        [
            (p1 - m1) / (2.0 * h),
            (p1 - 2.0 * f0 + m1) / (h * h),
            (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h),
        ]
    };
    let (a, b, c) = (d(h), d(h / 2.0), d(h / 4.0));
    [0, 1, 2].map(|k| {
        let r1 = (4.0 * b[k] - a[k]) / 3.0;
        let r2 = (4.0 * c[k] - b[k]) / 3.0;
        (16.0 * r2 - r1) / 15.0
    })
}

pub fn richardson_vec<F: Fn(f64) -> Vec3>(f: F, x: f64, h: f64) -> [Vec3; 3] {
    let comp = |i: usize| richardson(|q| f(q)[i], x, h);
    let (a, b, c) = (comp(0), comp(1), comp(2));
    [0, 1, 2].map(|k| Vec3::new(a[k], b[k], c[k]))
}

/// Curvature, torsion and speed from finite-difference derivatives of the
/// position alone.
pub fn kappa_tau_oracle(curve: &CurveSpec, q: f64) -> (f64, f64, f64) {
    let [d1, d2, d3] = richardson_vec(|x| curve.point(x).unwrap(), q, 0.04);
    let cross = d1.cross(&d2);
    let speed = d1.norm();
    (cross.norm() / speed.powi(3), cross.dot(&d3) / cross.norm_squared(), speed)
}

/// Unit normal of `P` from central differences of surface points, and the
/// unit Darboux direction from the oracle curvature and torsion.
pub fn inner_oracle(p: &SurfacePencil, s: f64, t: f64) -> f64 {
    let h = 1e-5;
    let at = |s: f64, t: f64| pencil_core::surface_point(p, s, t).unwrap();
    let ps = (at(s + h, t) - at(s - h, t)) / (2.0 * h);
    let pt = (at(s, t + h) - at(s, t - h)) / (2.0 * h);
    let n = ps.cross(&pt).normalize();
    let [d1, d2, _] = richardson_vec(|x| p.curve.point(x).unwrap(), s, 0.04);
    let (kappa, tau, _) = kappa_tau_oracle(&p.curve, s);
    let tangent = d1.normalize();
    let binormal = d1.cross(&d2).normalize();
    let w0 = (tangent * tau + binormal * kappa) / kappa.hypot(tau);
    n.dot(&w0)
}
