use thiserror::Error;

use crate::expr::ExprError;

/// Errors raised by the geometric kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("curve is irregular at {param} (speed {speed:e})")]
    Irregular { param: f64, speed: f64 },
    #[error("Frenet frame undefined at {param}: curvature {kappa:e} below threshold")]
    InflectionPoint { param: f64, kappa: f64 },
    #[error("curve declared unit speed but |r'| = {speed} at {param}")]
    NotUnitSpeed { param: f64, speed: f64 },
    #[error("surface normal degenerate at (s, t) = ({s}, {t})")]
    DegenerateNormal { s: f64, t: f64 },
    #[error("constant c = {c} infeasible at {param}: 1 - c^2 (k^2 + t^2)/k^2 = {radicand:e}")]
    InfeasibleConstant { c: f64, param: f64, radicand: f64 },
    #[error("parameter {param} lies outside the synthesized subdomains")]
    Excluded { param: f64 },
    #[error("not enough usable samples: {usable} of {requested}")]
    NotEnoughSamples { usable: usize, requested: usize },
    #[error("marching scale does not vanish at t0 = {t0}: |(u, v, w)| = {magnitude:e} at s = {s}")]
    NotIsoparametric { s: f64, t0: f64, magnitude: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
