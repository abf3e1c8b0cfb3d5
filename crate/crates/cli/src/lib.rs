//! Pipeline driver behind the `cusp` binary.
//!
//! Each command returns its standard output and an exit code so that it can
//! be tested without spawning a process. Exit codes: 0 success, 2 input
//! error, 3 geometric failure, 4 verification failure.

pub mod pipeline;
pub mod recipe;
pub mod render;

use std::path::Path;

use cusp_core::cycles::{dual_side_monodromy, is_negative_definite};
use cusp_core::{charge, dual_cycle, monodromy, sl2z_word, ComplexJson, Cycle, Mat2};

pub use pipeline::{PipelineError, Run, RunOptions};
pub use recipe::{Lengths, Recipe, Step};

/// Text for standard output plus the process exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }
}

/// Accepts `6,9`, `6 9` or `(6,9)`.
pub fn parse_cycle(s: &str) -> Result<Cycle, PipelineError> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    let entries = t
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<i64>().map_err(|e| PipelineError::Input(format!("{p:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Cycle::new(entries).map_err(|e| PipelineError::Input(e.to_string()))
}

fn show_matrix(m: &Mat2) -> String {
    format!("[[{}, {}], [{}, {}]]", m.a, m.b, m.c, m.d)
}

/// The lexicographically largest rotation, used for printing.
pub fn leading_rotation(c: &Cycle) -> Cycle {
    (0..c.len()).map(|k| c.rotated(k)).max_by(|a, b| a.entries().cmp(b.entries())).expect("cycles are nonempty")
}

pub fn cmd_dual(cycle: &str) -> Result<Outcome, PipelineError> {
    let d = parse_cycle(cycle)?;
    let e = leading_rotation(&dual_cycle(&d).map_err(|e| PipelineError::Input(e.to_string()))?);
    Ok(Outcome::ok(format!("{e}\nQ={} Q'={}\n", charge(&d), charge(&e))))
}

pub fn cmd_charge(cycle: &str) -> Result<Outcome, PipelineError> {
    let d = parse_cycle(cycle)?;
    Ok(Outcome::ok(format!("{}\n", charge(&d))))
}

pub fn cmd_monodromy(cycle: &str) -> Result<Outcome, PipelineError> {
    let d = parse_cycle(cycle)?;
    let n = monodromy(&d);
    let mut out = format!("N = {}\ntrace = {}\n", show_matrix(&n), n.trace());
    match sl2z_word(&n) {
        Ok(w) => out.push_str(&format!("word = {w}\n")),
        Err(e) => out.push_str(&format!("word = none ({e})\n")),
    }
    if is_negative_definite(&d) {
        if let Ok(w) = sl2z_word(&dual_side_monodromy(&dual_cycle(&d).expect("negative definite"))) {
            out.push_str(&format!("dual side word = {w}\n"));
        }
    }
    Ok(Outcome::ok(out))
}

fn read(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))
}

pub fn load_recipe(path: &Path) -> Result<Recipe, PipelineError> {
    Recipe::from_json(&read(path)?).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))
}

fn summary(r: &cusp_core::TypeIIIReport) -> String {
    let mut s = format!(
        "V={} E={} F={} chi={}\ncharge total {}\nv0 cycle ({}) charge {} valence {} after {} flips\nv0 word {} dual word {}\n",
        r.vertices,
        r.edges,
        r.faces,
        r.euler_characteristic,
        r.charge_total,
        r.v0_cycle,
        r.v0_charge,
        r.v0_valence,
        r.flips,
        r.v0_word,
        r.dual_word
    );
    let failures = r.failures();
    if failures.is_empty() {
        s.push_str("all checks passed\n");
    } else {
        s.push_str(&format!("failed checks: {}\n", failures.join(", ")));
    }
    s
}

/// Run a recipe and write its artifacts into `out`.
pub fn cmd_construct(recipe: &Path, out: &Path, opts: RunOptions, svg: bool) -> Result<Outcome, PipelineError> {
    let r = load_recipe(recipe)?;
    let run = pipeline::run(&r, opts)?;
    let files = pipeline::artifacts(&run, svg);
    pipeline::write_artifacts(out, &files)?;
    let code = if run.report.all_ok() { 0 } else { 4 };
    Ok(Outcome { stdout: summary(&run.report), code })
}

/// Check a complex file; the report JSON goes to standard output.
pub fn cmd_verify(complex: &Path, expected_dual: &str) -> Result<Outcome, PipelineError> {
    let dual = parse_cycle(expected_dual)?;
    let (report, text) = pipeline::verify_text(&read(complex)?, &dual)?;
    Ok(Outcome { stdout: text, code: if report.all_ok() { 0 } else { 4 } })
}

/// Draw a base, closed surface or complex JSON file.
pub fn cmd_render(artifact: &Path) -> Result<Outcome, PipelineError> {
    let text = read(artifact)?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| PipelineError::Input(e.to_string()))?;
    let bad = |e: serde_json::Error| PipelineError::Input(format!("{}: {e}", artifact.display()));
    let svg = if v.get("kind").is_some() {
        let j: ComplexJson = serde_json::from_value(v).map_err(bad)?;
        render::complex_svg(&j.into_complex().map_err(|e| PipelineError::Input(e.to_string()))?)
    } else if v.get("base").is_some() {
        let s: cusp_core::ClosedSurface = serde_json::from_value(v).map_err(bad)?;
        render::base_svg(&s.base)
    } else {
        let b: cusp_core::AlmostToricBase = serde_json::from_value(v).map_err(bad)?;
        render::base_svg(&b)
    };
    Ok(Outcome::ok(svg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_strings() {
        assert_eq!(parse_cycle("6,9").unwrap(), Cycle::new(vec![6, 9]).unwrap());
        assert_eq!(parse_cycle(" (4, 6, 5) ").unwrap(), Cycle::new(vec![4, 6, 5]).unwrap());
        assert_eq!(parse_cycle("3 2 2").unwrap(), Cycle::new(vec![3, 2, 2]).unwrap());
        assert!(parse_cycle("").is_err());
        assert!(parse_cycle("4,x").is_err());
    }

    #[test]
    fn dual_command() {
        let o = cmd_dual("3").unwrap();
        assert_eq!(o.stdout, "3\nQ=12 Q'=12\n");
        assert_eq!(cmd_dual("4,6,5").unwrap().stdout, "3,2,3,2,2,2,3,2,2\nQ=18 Q'=6\n");
        assert_eq!(cmd_dual("2,2,2").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn monodromy_command() {
        let o = cmd_monodromy("4,6,5").unwrap();
        assert!(o.stdout.contains("trace = 105"), "{}", o.stdout);
        let p = cmd_monodromy("2,2,2").unwrap();
        assert!(p.stdout.contains("trace = 2"), "{}", p.stdout);
    }
}
