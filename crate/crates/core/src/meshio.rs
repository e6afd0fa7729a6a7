//! Grid sampling of pencil surfaces and text serialization of meshes and
//! verification reports.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::dtype::DTypeReport;
use crate::error::{GeomError, Result};
use crate::frenet::{uniform_samples, Vec3};
use crate::pencil::SurfacePencil;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Defect {
    pub index: usize,
    pub s: f64,
    pub t: f64,
    pub reason: String,
}

/// Quad mesh over an `ns × nt` parameter grid, stored s-major: vertex
/// `(i, j)` lives at `i * nt + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub ns: usize,
    pub nt: usize,
    pub positions: Vec<Vec3>,
    /// Unit normals, or zero where the normal is undefined.
    pub normals: Vec<Vec3>,
    /// Counterclockwise about `∂P/∂s × ∂P/∂t`.
    pub faces: Vec<[usize; 4]>,
    pub defects: Vec<Defect>,
}

impl SurfaceMesh {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nt + j
    }
}

fn grid_faces(ns: usize, nt: usize) -> Vec<[usize; 4]> {
    let mut faces = Vec::with_capacity((ns - 1) * (nt - 1));
    for i in 0..ns - 1 {
        for j in 0..nt - 1 {
            let a = i * nt + j;
            let b = (i + 1) * nt + j;
            faces.push([a, b, b + 1, a + 1]);
        }
    }
    faces
}

struct Vertex {
    position: Vec3,
    normal: Vec3,
    defect: Option<String>,
}

fn sample_row(p: &SurfacePencil, s: f64, ts: &[f64], nudge: f64) -> Vec<Vertex> {
    let frame = p.frame(s);
    // an undefined frame is replaced by its one-sided limit; the row is still flagged
    let (frame, frame_err) = match frame {
        Ok(f) => (Ok(f), None),
        Err(e) => (p.frame(s + nudge).or_else(|_| p.frame(s - nudge)), Some(e.to_string())),
    };
    ts.iter()
        .map(|&t| {
            let f = match &frame {
                Ok(f) => f,
                Err(e) => {
                    return Vertex {
                        position: p.curve.point(s).unwrap_or_else(|_| Vec3::zeros()),
                        normal: Vec3::zeros(),
                        defect: Some(frame_err.clone().unwrap_or_else(|| e.to_string())),
                    }
                }
            };
            let position = match p.point_with(f, s, t) {
                Ok(x) => x,
                Err(e) => {
                    return Vertex {
                        position: f.position,
                        normal: Vec3::zeros(),
                        defect: Some(e.to_string()),
                    }
                }
            };
            match (&frame_err, p.normal_with(f, s, t)) {
                (None, Ok(n)) => Vertex {
                    position,
                    normal: n,
                    defect: None,
                },
                (Some(e), _) => Vertex {
                    position,
                    normal: Vec3::zeros(),
                    defect: Some(e.clone()),
                },
                (None, Err(e)) => Vertex {
                    position,
                    normal: Vec3::zeros(),
                    defect: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Sample the pencil on a uniform `ns × nt` grid. Vertices where the frame,
/// the marching scale or the normal is undefined get a zero normal and are
/// listed in `defects`.
pub fn sample_grid(
    p: &SurfacePencil,
    ns: usize,
    nt: usize,
    s_range: (f64, f64),
    t_range: (f64, f64),
) -> Result<SurfaceMesh> {
    if ns < 2 || nt < 2 {
        return Err(GeomError::Invalid(format!("grid must be at least 2x2, got {ns}x{nt}")));
    }
    let ss = uniform_samples(s_range, ns);
    let ts = uniform_samples(t_range, nt);
    let nudge = 1e-7 * (s_range.1 - s_range.0).abs().max(1.0);
    let rows: Vec<Vec<Vertex>> = ss.par_iter().map(|&s| sample_row(p, s, &ts, nudge)).collect();

    let mut positions = Vec::with_capacity(ns * nt);
    let mut normals = Vec::with_capacity(ns * nt);
    let mut defects = Vec::new();
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            if let Some(reason) = v.defect {
                defects.push(Defect {
                    index: i * nt + j,
                    s: ss[i],
                    t: ts[j],
                    reason,
                });
            }
            positions.push(v.position);
            normals.push(v.normal);
        }
    }
    Ok(SurfaceMesh {
        ns,
        nt,
        positions,
        normals,
        faces: grid_faces(ns, nt),
        defects,
    })
}

/// Format with exactly `digits` significant digits, keeping trailing zeros
/// and switching to exponent form outside `1e-4 ≤ |x| < 10^digits`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    }
}

fn obj_vec(v: &Vec3) -> String {
    format!("{} {} {}", format_sig(v[0], 9), format_sig(v[1], 9), format_sig(v[2], 9))
}

/// Wavefront OBJ: `v`, `vn` and 1-based `f a//a b//b c//c d//d` lines.
pub fn write_obj<W: Write>(mesh: &SurfaceMesh, sink: &mut W) -> io::Result<()> {
    let mut out = io::BufWriter::new(sink);
    for p in &mesh.positions {
        writeln!(out, "v {}", obj_vec(p))?;
    }
    for n in &mesh.normals {
        writeln!(out, "vn {}", obj_vec(n))?;
    }
    for f in &mesh.faces {
        let [a, b, c, d] = f.map(|i| i + 1);
        writeln!(out, "f {a}//{a} {b}//{b} {c}//{c} {d}//{d}")?;
    }
    out.flush()
}

/// `s,inner,phi2,phi3,theta` rows at 12 significant digits followed by the
/// `c_estimate` and `max_deviation` summary rows.
pub fn write_report_csv<W: Write>(report: &DTypeReport, sink: &mut W) -> io::Result<()> {
    let mut out = io::BufWriter::new(sink);
    writeln!(out, "s,inner,phi2,phi3,theta")?;
    for x in &report.samples {
        writeln!(
            out,
            "{},{},{},{},{}",
            format_sig(x.s, 12),
            format_sig(x.inner, 12),
            format_sig(x.phi2, 12),
            format_sig(x.phi3, 12),
            format_sig(x.theta, 12)
        )?;
    }
    writeln!(out, "c_estimate,{}", format_sig(report.c_estimate, 12))?;
    writeln!(out, "max_deviation,{}", format_sig(report.max_deviation, 12))?;
    out.flush()
}
