//! Recipe to verified complex, and the artifacts written along the way.

use std::path::Path;

use cusp_core::complex::TypeIIIReport;
use cusp_core::cycles::is_negative_definite;
use cusp_core::surgery::{fan_from_toric_cycle, solve_lengths};
use cusp_core::{
    build_complex, close_surface, dual_cycle, verify_type_iii, AlmostToricBase, BlowupPlacement, CloseOptions,
    ClosedSurface, ComplexJson, Cycle, TriComplex,
};
use log::{debug, info};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::recipe::{Lengths, Recipe, Step};
use crate::render;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("input error: {0}")]
    Input(String),
    #[error("{step} failed: {message}")]
    Geometric { step: String, message: String },
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Input(_) => 2,
            PipelineError::Geometric { .. } => 3,
        }
    }

    fn geometric(step: impl Into<String>, e: impl std::fmt::Display) -> Self {
        PipelineError::Geometric { step: step.into(), message: e.to_string() }
    }
}

fn input(e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Input(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub anchor: Option<usize>,
    pub periods: usize,
    /// Allow blow-up triangles to share sides even if the recipe does not ask.
    pub relaxed_cuts: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { anchor: None, periods: 1, relaxed_cuts: false }
    }
}

/// The toric base of a recipe, before any surgery.
pub fn toric_base(recipe: &Recipe) -> Result<AlmostToricBase, PipelineError> {
    let cycle = Cycle::new(recipe.toric_cycle.clone()).map_err(input)?;
    let rays = fan_from_toric_cycle(&cycle).map_err(input)?;
    let lengths = match &recipe.lengths {
        Lengths::Explicit(l) => l.iter().map(|&x| x as i128).collect(),
        Lengths::Support { support } => {
            if let Some(&i) = support.iter().find(|&&i| i >= rays.len()) {
                return Err(PipelineError::Input(format!("support index {i} beyond {} edges", rays.len())));
            }
            solve_lengths(&rays, support).map_err(input)?
        }
    };
    debug!("edge lengths {lengths:?}");
    AlmostToricBase::moment_polygon(&rays, &lengths).map_err(input)
}

/// Apply the recipe's surgeries in order.
pub fn build_base(recipe: &Recipe, relaxed: bool) -> Result<AlmostToricBase, PipelineError> {
    let mut b = toric_base(recipe)?.with_relaxed_cuts(recipe.relaxed_cuts || relaxed);
    for (i, step) in recipe.surgeries.iter().enumerate() {
        let at = || format!("step {i} ({})", step.name());
        b =
            match *step {
                Step::Blowup { edge, size, offset, shear } => {
                    let size =
                        match size {
                            Some(s) => s as i128,
                            None => b.boundary.iter().find(|e| e.label == edge).map(|e| e.length).ok_or_else(|| {
                                PipelineError::geometric(at(), format!("no boundary component {edge}"))
                            })?,
                        };
                    b.internal_blowup_with(&BlowupPlacement {
                        edge,
                        size,
                        offset: offset.map(i128::from),
                        shear: shear.map(i128::from),
                    })
                }
                Step::Smooth { vertex, n } => b.node_smoothing(vertex, n as i128),
            }
            .map_err(|e| PipelineError::geometric(at(), e))?;
        debug!("after {}: boundary {}", at(), b.bookkeeping_cycle());
    }
    Ok(b)
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct Run {
    pub base: AlmostToricBase,
    pub surface: ClosedSurface,
    pub complex: TriComplex,
    pub expected_dual: Cycle,
    pub report: TypeIIIReport,
}

pub fn run(recipe: &Recipe, opts: RunOptions) -> Result<Run, PipelineError> {
    let base = build_base(recipe, opts.relaxed_cuts)?;
    let cycle = base.bookkeeping_cycle();
    if !is_negative_definite(&cycle) {
        return Err(PipelineError::Input(format!("boundary cycle {cycle} is not negative definite")));
    }
    let expected_dual = dual_cycle(&cycle).map_err(input)?;
    if expected_dual.len() < 2 {
        // a one-edge star would need a face glued to itself at v0
        return Err(PipelineError::Input(format!(
            "dual cycle {expected_dual} has one component; the star of v0 needs at least two edges"
        )));
    }
    info!("boundary cycle {cycle}, expected dual {expected_dual}");
    let surface = close_surface(&base, CloseOptions { anchor: opts.anchor, periods: opts.periods })
        .map_err(|e| PipelineError::geometric("compactify", e))?;
    info!("closed surface with {} singular points", surface.singular_count());
    let complex = build_complex(&surface).map_err(|e| PipelineError::geometric("triangulate", e))?;
    info!("{} faces, {} flips at v0", complex.faces.len(), complex.flips);
    let report = verify_type_iii(&complex, &expected_dual).map_err(|e| PipelineError::geometric("verify", e))?;
    Ok(Run { base, surface, complex, expected_dual, report })
}

/// The report as written to disk, tied to the complex it checks.
#[derive(Clone, Debug, Serialize)]
pub struct ReportFile<'a> {
    pub complex_sha256: String,
    pub expected_dual: &'a Cycle,
    pub all_ok: bool,
    pub failures: Vec<&'static str>,
    pub report: &'a TypeIIIReport,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn report_json(complex_text: &str, expected_dual: &Cycle, report: &TypeIIIReport) -> String {
    let file = ReportFile {
        complex_sha256: sha256_hex(complex_text.as_bytes()),
        expected_dual,
        all_ok: report.all_ok(),
        failures: report.failures(),
        report,
    };
    to_json(&file)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("artifacts serialize");
    s.push('\n');
    s
}

/// File names and contents, in a fixed order.
pub fn artifacts(r: &Run, svg: bool) -> Vec<(&'static str, String)> {
    let complex = to_json(&ComplexJson::from_complex(&r.complex));
    let report = report_json(&complex, &r.expected_dual, &r.report);
    let mut out = vec![
        ("base.json", to_json(&r.base)),
        ("surface.json", to_json(&r.surface)),
        ("complex.json", complex),
        ("report.json", report),
    ];
    if svg {
        out.push(("base.svg", render::base_svg(&r.surface.base)));
        out.push(("complex.svg", render::complex_svg(&r.complex)));
    }
    out
}

pub fn write_artifacts(dir: &Path, files: &[(&'static str, String)]) -> Result<(), PipelineError> {
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::Input(format!("{}: {e}", dir.display())))?;
    for (name, text) in files {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(|e| PipelineError::Input(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

/// Re-read a complex and check it against `expected_dual`.
pub fn verify_text(complex_text: &str, expected_dual: &Cycle) -> Result<(TypeIIIReport, String), PipelineError> {
    let j: ComplexJson = serde_json::from_str(complex_text).map_err(input)?;
    let t = j.into_complex().map_err(input)?;
    let report = verify_type_iii(&t, expected_dual).map_err(input)?;
    let text = report_json(complex_text, expected_dual, &report);
    Ok((report, text))
}
