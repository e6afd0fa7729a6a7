//! Surface pencils `P(s, t) = r(s) + u T + v N + w B` around a common curve.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::expr::{Bindings, Expression};
use crate::frenet::{frenet_at, uniform_samples, CurveSpec, FrenetApparatus, Vec3, EPS_REG};
use crate::table::TableSegment;

/// Name of the marching parameter in every marching-scale expression.
pub const T_VAR: &str = "t";

/// Scalar multipliers applied to `u`, `v`, `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Controls {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Default for Controls {
    fn default() -> Self {
        Controls {
            x: 1.0,
            y: 1.0,
            z: 1.0,
        }
    }
}

/// Channels of a synthesized table: v-coefficient, feasibility radicand and `1/|r'|`.
pub const TABLE_CHANNELS: usize = 3;

/// Marching scale produced by synthesis when the coefficients vary along
/// the curve: `u = U(t)`, `v = a(s) (t - t0)`, `w = b(s) (t - t0)` with
/// `b = w_sign * sqrt(radicand) / |r'|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledScale {
    pub u_profile: Expression,
    pub w_sign: f64,
    pub segments: Vec<TableSegment<TABLE_CHANNELS>>,
}

impl SampledScale {
    fn segment(&self, s: f64) -> Result<&TableSegment<TABLE_CHANNELS>> {
        self.segments
            .iter()
            .find(|seg| seg.contains(s))
            .ok_or(GeomError::Excluded { param: s })
    }

    /// `(a, a', b, b')` at `s`.
    pub fn coefficients(&self, s: f64) -> Result<(f64, f64, f64, f64)> {
        let ([a, rad, inv_speed], [da, drad, dinv]) = self.segment(s)?.eval(s);
        let (b, db) = if rad > 0.0 {
            let root = rad.sqrt();
            (root * inv_speed, 0.5 * drad / root * inv_speed + root * dinv)
        } else {
            (0.0, 0.0)
        };
        Ok((a, da, self.w_sign * b, self.w_sign * db))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MarchingForm {
    /// `u = l(s) U(t)`, `v = m(s) V(t)`, `w = n(s) W(t)`
    Product {
        l: Expression,
        m: Expression,
        n: Expression,
        big_u: Expression,
        big_v: Expression,
        big_w: Expression,
    },
    /// Bivariate `u(s, t)`, `v(s, t)`, `w(s, t)`
    General {
        u: Expression,
        v: Expression,
        w: Expression,
    },
    Sampled(SampledScale),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarchingScale {
    pub form: MarchingForm,
    pub controls: Controls,
    pub t0: f64,
    /// Curve parameter name used by the `s`-dependent parts.
    pub s_var: String,
}

impl MarchingScale {
    pub fn product(
        s_var: &str,
        lmn: [&str; 3],
        uvw: [&str; 3],
        controls: Controls,
        t0: f64,
    ) -> Result<MarchingScale> {
        let s = |src: &str| Expression::parse(src, &[s_var]);
        let t = |src: &str| Expression::parse(src, &[T_VAR]);
        Ok(MarchingScale {
            form: MarchingForm::Product {
                l: s(lmn[0])?,
                m: s(lmn[1])?,
                n: s(lmn[2])?,
                big_u: t(uvw[0])?,
                big_v: t(uvw[1])?,
                big_w: t(uvw[2])?,
            },
            controls,
            t0,
            s_var: s_var.to_string(),
        })
    }

    pub fn general(s_var: &str, uvw: [&str; 3], controls: Controls, t0: f64) -> Result<MarchingScale> {
        let e = |src: &str| Expression::parse(src, &[s_var, T_VAR]);
        Ok(MarchingScale {
            form: MarchingForm::General {
                u: e(uvw[0])?,
                v: e(uvw[1])?,
                w: e(uvw[2])?,
            },
            controls,
            t0,
            s_var: s_var.to_string(),
        })
    }

    /// `u = v = w = 0` everywhere.
    pub fn zero(s_var: &str, t0: f64) -> MarchingScale {
        let z = Expression::constant(0.0);
        MarchingScale {
            form: MarchingForm::General {
                u: z.clone(),
                v: z.clone(),
                w: z,
            },
            controls: Controls::default(),
            t0,
            s_var: s_var.to_string(),
        }
    }
}

/// Values and first partials of the marching-scale functions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MarchingValues {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub u_s: f64,
    pub v_s: f64,
    pub w_s: f64,
    pub u_t: f64,
    pub v_t: f64,
    pub w_t: f64,
}

/// Value and derivative of an expression in a single variable.
fn jet1(e: &Expression, var: &str, at: f64) -> Result<(f64, f64)> {
    let j = e.evaluate_jet3(var, at, &Bindings::new())?;
    Ok((j.v0, j.v1))
}

/// Value, `∂/∂s` and `∂/∂t` of a bivariate expression.
fn jet2(e: &Expression, s_var: &str, s: f64, t: f64) -> Result<(f64, f64, f64)> {
    let ds = e.evaluate_jet3(s_var, s, &Bindings::from([(T_VAR.to_string(), t)]))?;
    let dt = e.evaluate_jet3(T_VAR, t, &Bindings::from([(s_var.to_string(), s)]))?;
    Ok((ds.v0, ds.v1, dt.v1))
}

pub fn marching_values(ms: &MarchingScale, s: f64, t: f64) -> Result<MarchingValues> {
    let c = ms.controls;
    let raw = match &ms.form {
        MarchingForm::Product {
            l,
            m,
            n,
            big_u,
            big_v,
            big_w,
        } => {
            let part = |a: &Expression, b: &Expression| -> Result<(f64, f64, f64)> {
                let (a0, a1) = jet1(a, &ms.s_var, s)?;
                let (b0, b1) = jet1(b, T_VAR, t)?;
                Ok((a0 * b0, a1 * b0, a0 * b1))
            };
            [part(l, big_u)?, part(m, big_v)?, part(n, big_w)?]
        }
        MarchingForm::General { u, v, w } => [
            jet2(u, &ms.s_var, s, t)?,
            jet2(v, &ms.s_var, s, t)?,
            jet2(w, &ms.s_var, s, t)?,
        ],
        MarchingForm::Sampled(sampled) => {
            let (u0, u1) = jet1(&sampled.u_profile, T_VAR, t)?;
            let (a, da, b, db) = sampled.coefficients(s)?;
            let dt = t - ms.t0;
            [(u0, 0.0, u1), (a * dt, da * dt, a), (b * dt, db * dt, b)]
        }
    };
    let [(u, u_s, u_t), (v, v_s, v_t), (w, w_s, w_t)] = raw;
    Ok(MarchingValues {
        u: c.x * u,
        v: c.y * v,
        w: c.z * w,
        u_s: c.x * u_s,
        v_s: c.y * v_s,
        w_s: c.z * w_s,
        u_t: c.x * u_t,
        v_t: c.y * v_t,
        w_t: c.z * w_t,
    })
}

/// Samples used to check the isoparametric requirement at construction.
const ISO_CHECK_SAMPLES: usize = 64;
const ISO_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SurfacePencil {
    pub curve: CurveSpec,
    pub marching: MarchingScale,
    pub t_range: (f64, f64),
}

impl SurfacePencil {
    /// Validates `t0 ∈ t_range`, matching parameter names, and that
    /// `u = v = w = 0` at `t0` on sampled curve parameters.
    pub fn new(curve: CurveSpec, marching: MarchingScale, t_range: (f64, f64)) -> Result<SurfacePencil> {
        if t_range.0.partial_cmp(&t_range.1) != Some(std::cmp::Ordering::Less) {
            return Err(GeomError::Invalid(format!(
                "t range [{}, {}] is not a proper interval",
                t_range.0, t_range.1
            )));
        }
        let t0 = marching.t0;
        if !(t_range.0..=t_range.1).contains(&t0) {
            return Err(GeomError::Invalid(format!(
                "t0 = {t0} lies outside [{}, {}]",
                t_range.0, t_range.1
            )));
        }
        if marching.s_var != curve.param() {
            return Err(GeomError::Invalid(format!(
                "marching scale uses '{}' but the curve parameter is '{}'",
                marching.s_var,
                curve.param()
            )));
        }
        for s in uniform_samples(curve.domain(), ISO_CHECK_SAMPLES) {
            // parameters outside an expression's domain are not part of the surface
            let Ok(mv) = marching_values(&marching, s, t0) else {
                continue;
            };
            let magnitude = mv.u.abs().max(mv.v.abs()).max(mv.w.abs());
            if magnitude > ISO_TOL {
                return Err(GeomError::NotIsoparametric { s, t0, magnitude });
            }
        }
        Ok(SurfacePencil {
            curve,
            marching,
            t_range,
        })
    }

    pub fn t0(&self) -> f64 {
        self.marching.t0
    }

    pub fn frame(&self, s: f64) -> Result<FrenetApparatus> {
        frenet_at(&self.curve, s)
    }

    pub fn point_with(&self, frame: &FrenetApparatus, s: f64, t: f64) -> Result<Vec3> {
        let mv = marching_values(&self.marching, s, t)?;
        Ok(frame.position + frame.combine(mv.u, mv.v, mv.w))
    }

    pub fn partials_with(&self, frame: &FrenetApparatus, s: f64, t: f64) -> Result<(Vec3, Vec3)> {
        let mv = marching_values(&self.marching, s, t)?;
        Ok(partials_from(frame, &mv))
    }

    pub fn normal_with(&self, frame: &FrenetApparatus, s: f64, t: f64) -> Result<Vec3> {
        let (ps, pt) = self.partials_with(frame, s, t)?;
        unit_normal(&ps, &pt).ok_or(GeomError::DegenerateNormal { s, t })
    }
}

/// Chain rule through the Frenet equations for a curve of speed `ρ`:
///
/// ```text
/// ∂P/∂s = (ρ - ρκv + u_s) T + (ρκu - ρτw + v_s) N + (ρτv + w_s) B
/// ∂P/∂t = u_t T + v_t N + w_t B
/// ```
pub fn partials_from(frame: &FrenetApparatus, mv: &MarchingValues) -> (Vec3, Vec3) {
    let rho = frame.speed;
    let (k, tau) = (frame.kappa, frame.tau);
    let ps = frame.combine(
        rho - rho * k * mv.v + mv.u_s,
        rho * k * mv.u - rho * tau * mv.w + mv.v_s,
        rho * tau * mv.v + mv.w_s,
    );
    let pt = frame.combine(mv.u_t, mv.v_t, mv.w_t);
    (ps, pt)
}

/// Normalized `ps × pt`, or `None` when the partials are (nearly) parallel.
pub fn unit_normal(ps: &Vec3, pt: &Vec3) -> Option<Vec3> {
    let cross = ps.cross(pt);
    let len = cross.norm();
    (len > EPS_REG * (ps.norm() * pt.norm() + EPS_REG)).then(|| cross / len)
}

pub fn surface_point(p: &SurfacePencil, s: f64, t: f64) -> Result<Vec3> {
    p.point_with(&p.frame(s)?, s, t)
}

pub fn surface_partials(p: &SurfacePencil, s: f64, t: f64) -> Result<(Vec3, Vec3)> {
    p.partials_with(&p.frame(s)?, s, t)
}

pub fn surface_normal(p: &SurfacePencil, s: f64, t: f64) -> Result<Vec3> {
    p.normal_with(&p.frame(s)?, s, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TAU: f64 = std::f64::consts::TAU;

    fn example1(controls: Controls) -> SurfacePencil {
        let curve = CurveSpec::parse("cos(s)", "sin(s)", "0", "s", (-TAU, TAU), true).unwrap();
        let ms = MarchingScale::product("s", ["1", "1", "1"], ["t", "sqrt(3)/2*t", "t/2"], controls, 0.0)
            .unwrap();
        SurfacePencil::new(curve, ms, (0.0, 5.0)).unwrap()
    }

    #[test]
    fn example1_marching_values() {
        let p = example1(Controls::default());
        let h = 3f64.sqrt() / 2.0;
        let mv = marching_values(&p.marching, 0.7, 0.0).unwrap();
        assert_eq!((mv.u, mv.v, mv.w), (0.0, 0.0, 0.0));
        assert_eq!((mv.u_s, mv.v_s, mv.w_s), (0.0, 0.0, 0.0));
        assert_relative_eq!(mv.u_t, 1.0);
        assert_relative_eq!(mv.v_t, h, epsilon = 1e-15);
        assert_relative_eq!(mv.w_t, 0.5);
        let mv = marching_values(&p.marching, -1.0, 2.0).unwrap();
        assert_relative_eq!(mv.u, 2.0);
        assert_relative_eq!(mv.v, 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(mv.w, 1.0);

        let scaled = example1(Controls {
            x: 0.2,
            y: 1.0 / 3.0,
            z: 1.0,
        });
        let mv = marching_values(&scaled.marching, 0.3, 2.0).unwrap();
        assert_relative_eq!(mv.u, 0.4, epsilon = 1e-15);
        assert_relative_eq!(mv.v, 3f64.sqrt() / 3.0, epsilon = 1e-15);
        assert_relative_eq!(mv.w, 1.0);
    }

    #[test]
    fn example1_point_and_normal() {
        let p = example1(Controls::default());
        let h = 3f64.sqrt() / 2.0;
        let x = surface_point(&p, 0.0, 1.0).unwrap();
        assert_relative_eq!(x[0], 1.0 - h, epsilon = 1e-15);
        assert_relative_eq!(x[1], 1.0, epsilon = 1e-15);
        assert_relative_eq!(x[2], 0.5, epsilon = 1e-15);

        let (ps, pt) = surface_partials(&p, 0.0, 0.0).unwrap();
        let f = p.frame(0.0).unwrap();
        assert!((ps - f.tangent).norm() < 1e-15);
        let comps = f.components(&pt);
        assert_relative_eq!(comps[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(comps[1], h, epsilon = 1e-15);
        assert_relative_eq!(comps[2], 0.5, epsilon = 1e-15);

        let n = surface_normal(&p, 0.0, 0.0).unwrap();
        assert_relative_eq!(n[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(n[1], 0.0, epsilon = 1e-15);
        assert_relative_eq!(n[2], h, epsilon = 1e-15);
    }

    #[test]
    fn zero_scale_reproduces_curve_and_degenerates() {
        let curve = CurveSpec::parse("cos(s)", "sin(s)", "s", "s", (0.0, 3.0), false).unwrap();
        let p = SurfacePencil::new(curve.clone(), MarchingScale::zero("s", 0.0), (0.0, 1.0)).unwrap();
        for (s, t) in [(0.1, 0.0), (1.0, 0.7), (2.9, 1.0)] {
            assert_eq!(surface_point(&p, s, t).unwrap(), curve.point(s).unwrap());
            let (_, pt) = surface_partials(&p, s, t).unwrap();
            assert_eq!(pt, Vec3::zeros());
            assert!(matches!(surface_normal(&p, s, t), Err(GeomError::DegenerateNormal { .. })));
        }
    }

    #[test]
    fn non_isoparametric_scale_rejected() {
        let curve = CurveSpec::parse("cos(s)", "sin(s)", "0", "s", (0.0, 3.0), true).unwrap();
        let ms = MarchingScale::general("s", ["t + 1", "t", "t"], Controls::default(), 0.0).unwrap();
        assert!(matches!(
            SurfacePencil::new(curve, ms, (0.0, 1.0)),
            Err(GeomError::NotIsoparametric { .. })
        ));
    }

    #[test]
    fn t0_must_lie_in_range() {
        let curve = CurveSpec::parse("cos(s)", "sin(s)", "0", "s", (0.0, 3.0), true).unwrap();
        let ms = MarchingScale::general("s", ["t-2", "t-2", "t-2"], Controls::default(), 2.0).unwrap();
        assert!(SurfacePencil::new(curve.clone(), ms.clone(), (0.0, 1.0)).is_err());
        assert!(SurfacePencil::new(curve, ms, (0.0, 3.0)).is_ok());
    }
}
