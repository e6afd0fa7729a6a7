//! The four subcommands. Each returns the JSON document destined for
//! standard output together with the process exit code.

use std::fs;
use std::path::{Path, PathBuf};

use pencil_core::dtype::{synthesize_marching_scale, Synthesis};
use pencil_core::{classify_curve, sample_grid, verify_dtype_on, write_obj, write_report_csv, DTypeReport, MarchingForm};
use serde_json::{json, Value};

use crate::config::{
    ControlsConfig, MarchingConfig, Mode, Num, ProductConfig, Scene, SceneConfig, TableReference, TableSegmentInfo,
};
use crate::presets;
use crate::Failure;

pub const DEFAULT_SAMPLES: usize = 1000;
pub const UNIT_SPEED_TOL: f64 = 1e-8;
pub const GENERAL_TOL: f64 = 1e-6;
pub const CLASSIFY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Build,
    Verify,
    Classify,
    Synthesize,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    /// Output directory; overrides the config's `outputs` paths.
    pub out_dir: Option<PathBuf>,
    pub c: Option<Num>,
    pub sign: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: Value,
}

/// Load a scene from a preset name or a config file path (exactly one).
pub fn load_config(preset: Option<&str>, path: Option<&Path>) -> Result<SceneConfig, Failure> {
    match (preset, path) {
        (Some(name), None) => presets::load(name),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
            SceneConfig::from_json(&text)
        }
        (Some(_), Some(_)) => Err(Failure::Validation("give either --preset or --config, not both".into())),
        (None, None) => Err(Failure::Validation("one of --preset or --config is required".into())),
    }
}

pub fn run(command: Command, mut cfg: SceneConfig, opts: &RunOptions) -> Result<Outcome, Failure> {
    if let Some(c) = &opts.c {
        cfg.marching.c = Some(c.clone());
    }
    if let Some(sign) = opts.sign {
        cfg.marching.sign = Some(sign);
    }
    if opts.samples.is_some_and(|n| n < 16) {
        return Err(Failure::Validation("--samples must be at least 16".into()));
    }
    if opts.tol.is_some_and(|t| t.is_nan() || t <= 0.0) {
        return Err(Failure::Validation("--tol must be positive".into()));
    }
    match command {
        Command::Build => build(&cfg, opts),
        Command::Verify => verify(&cfg, opts),
        Command::Classify => classify(&cfg, opts),
        Command::Synthesize => synthesize(&cfg, opts),
    }
}

fn default_tol(scene: &Scene) -> f64 {
    if scene.pencil.curve.declared_unit_speed() {
        UNIT_SPEED_TOL
    } else {
        GENERAL_TOL
    }
}

fn output_path(cfg: &SceneConfig, scene: &Scene, opts: &RunOptions, ext: &str) -> PathBuf {
    let configured = match ext {
        "obj" => cfg.outputs.obj_path.as_ref(),
        _ => cfg.outputs.csv_path.as_ref(),
    };
    match (&opts.out_dir, configured) {
        (None, Some(p)) => PathBuf::from(p),
        (dir, _) => dir.clone().unwrap_or_default().join(format!("{}.{ext}", scene.name)),
    }
}

fn create_with<F>(path: &Path, write: F) -> Result<(), Failure>
where
    F: FnOnce(&mut fs::File) -> std::io::Result<()>,
{
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut file = fs::File::create(path).map_err(io)?;
    write(&mut file).map_err(io)
}

/// Parts of the curve domain that the scene leaves out.
fn excluded(scene: &Scene) -> Vec<(f64, f64)> {
    if let Some(Synthesis { excluded, .. }) = &scene.synthesis {
        return excluded.clone();
    }
    let (a, b) = scene.pencil.curve.domain();
    let (lo, hi) = scene.s_range;
    let mut out = Vec::new();
    if lo > a {
        out.push((a, lo.min(b)));
    }
    if hi < b {
        out.push((hi.max(a), b));
    }
    out
}

fn report_json(report: &DTypeReport) -> Value {
    json!({
        "c_estimate": report.c_estimate,
        "max_deviation": report.max_deviation,
        "tolerance": report.tolerance,
        "verdict": report.verdict,
        "samples": report.samples.len(),
        "skipped": report.skipped,
        "special": report.special,
    })
}

fn build(cfg: &SceneConfig, opts: &RunOptions) -> Result<Outcome, Failure> {
    let scene = cfg.scene()?;
    let tol = opts.tol.unwrap_or_else(|| default_tol(&scene));
    let mesh = sample_grid(&scene.pencil, scene.ns, scene.nt, scene.s_range, scene.t_range)?;
    let report = verify_dtype_on(&scene.pencil, scene.s_range, opts.samples.unwrap_or(DEFAULT_SAMPLES), tol)?;

    let obj = output_path(cfg, &scene, opts, "obj");
    let csv = output_path(cfg, &scene, opts, "csv");
    create_with(&obj, |f| write_obj(&mesh, f))?;
    create_with(&csv, |f| write_report_csv(&report, f))?;

    let mut defect_s: Vec<f64> = mesh.defects.iter().map(|d| d.s).collect();
    defect_s.dedup();
    let mut summary = report_json(&report);
    let extra = json!({
        "command": "build",
        "name": scene.name,
        "vertices": mesh.positions.len(),
        "faces": mesh.faces.len(),
        "defects": mesh.defects.len(),
        "defect_params": defect_s,
        "excluded": excluded(&scene),
        "obj": obj,
        "csv": csv,
    });
    merge(&mut summary, extra);
    Ok(Outcome {
        code: 0,
        stdout: summary,
    })
}

fn verify(cfg: &SceneConfig, opts: &RunOptions) -> Result<Outcome, Failure> {
    let scene = cfg.scene()?;
    let tol = opts.tol.unwrap_or_else(|| default_tol(&scene));
    let report = verify_dtype_on(&scene.pencil, scene.s_range, opts.samples.unwrap_or(DEFAULT_SAMPLES), tol)?;
    let csv = output_path(cfg, &scene, opts, "csv");
    create_with(&csv, |f| write_report_csv(&report, f))?;
    let mut summary = report_json(&report);
    merge(
        &mut summary,
        json!({
            "command": "verify",
            "name": scene.name,
            "excluded": excluded(&scene),
            "csv": csv,
        }),
    );
    Ok(Outcome {
        code: if report.verdict { 0 } else { 1 },
        stdout: summary,
    })
}

fn classify(cfg: &SceneConfig, opts: &RunOptions) -> Result<Outcome, Failure> {
    let curve = cfg.curve_spec()?;
    let class = classify_curve(
        &curve,
        opts.samples.unwrap_or(DEFAULT_SAMPLES),
        opts.tol.unwrap_or(CLASSIFY_TOL),
    )?;
    let stdout = serde_json::to_value(&class).map_err(|e| Failure::Numerical(e.to_string()))?;
    Ok(Outcome { code: 0, stdout })
}

fn synthesize(cfg: &SceneConfig, _opts: &RunOptions) -> Result<Outcome, Failure> {
    let curve = cfg.curve_spec()?;
    let domain = curve.domain();
    let req = cfg.synthesis_request(curve)?;
    let syn = synthesize_marching_scale(&req)?;

    let mut out = cfg.clone();
    out.outputs = Default::default();
    out.marching = MarchingConfig {
        mode: Mode::Explicit,
        explicit: None,
        product: None,
        controls: ControlsConfig::default(),
        c: Some(Num::Value(req.c)),
        sign: Some(req.w_sign),
        u_profile: None,
        feasible_domain: None,
        table: None,
    };
    match &syn.marching.form {
        MarchingForm::Product {
            l,
            m,
            n,
            big_u,
            big_v,
            big_w,
        } => {
            out.marching.product = Some(ProductConfig {
                l: l.to_string(),
                m: m.to_string(),
                n: n.to_string(),
                big_u: big_u.to_string(),
                big_v: big_v.to_string(),
                big_w: big_w.to_string(),
            });
        }
        MarchingForm::Sampled(scale) => {
            out.marching.mode = Mode::Synthesized;
            out.marching.u_profile = Some(scale.u_profile.to_string());
            out.marching.table = Some(TableReference {
                segments: scale
                    .segments
                    .iter()
                    .map(|seg| TableSegmentInfo {
                        start: seg.start,
                        end: seg.end,
                        nodes: seg.nodes().len(),
                    })
                    .collect(),
            });
        }
        MarchingForm::General { .. } => {
            return Err(Failure::Numerical("synthesis produced an unexpected marching form".into()))
        }
    }
    let strict_subset = syn.feasible.len() != 1 || syn.feasible[0] != domain;
    if strict_subset {
        out.marching.feasible_domain = Some(syn.feasible.iter().map(|&(a, b)| [a, b]).collect());
        let lo = syn.feasible.first().map(|f| f.0).unwrap_or(domain.0);
        let hi = syn.feasible.last().map(|f| f.1).unwrap_or(domain.1);
        out.grid.s_range = Some([Num::Value(lo), Num::Value(hi)]);
    }
    let stdout = serde_json::to_value(&out).map_err(|e| Failure::Numerical(e.to_string()))?;
    Ok(Outcome { code: 0, stdout })
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}
