//! Geometry kernel for surface pencils that share a common D-type curve.
//!
//! A D-type curve on a surface is one along which the surface normal `n`
//! makes a constant inner product with the curve's unit Darboux vector
//! `W₀ = (τ T + κ B) / sqrt(κ² + τ²)`. The kernel evaluates analytic curves
//! through third-order jets ([`jet`], [`expr`]), builds their Frenet
//! apparatus ([`frenet`]), evaluates pencils `P = r + u T + v N + w B`
//! ([`pencil`]), verifies and synthesizes the D-type condition ([`dtype`])
//! and exports meshes and reports ([`meshio`]).

pub mod dtype;
pub mod error;
pub mod expr;
pub mod frenet;
pub mod jet;
pub mod meshio;
pub mod pencil;
pub mod table;

pub use dtype::{
    check_theorem_conditions, feasible_domain, phi_components, synthesize_marching_scale, verify_dtype,
    verify_dtype_on, DTypeReport, DTypeSample, Phi, Synthesis, SynthesisRequest, TheoremCheck,
};
pub use error::{GeomError, Result};
pub use expr::{Bindings, ExprError, Expression};
pub use frenet::{
    classify_curve, curve_point_jets, darboux_unit, frenet_at, CurveClass, CurveKind, CurveSpec, FrenetApparatus,
    Vec3,
};
pub use jet::Jet3;
pub use meshio::{sample_grid, write_obj, write_report_csv, SurfaceMesh};
pub use pencil::{
    marching_values, surface_normal, surface_partials, surface_point, Controls, MarchingForm, MarchingScale,
    MarchingValues, SurfacePencil,
};
