//! Plain-text bench descriptions.
//!
//! A `.bench` file is line oriented: `key = value` assignments, and
//! `arm <name>:` headers followed by one element call per line. Every
//! length carries a unit suffix (`nm`, `um`, `mm`, `cm`, `m`); angles are
//! written as `pi`, `pi/2`, `3pi/4`, `1.2rad` or `90deg`. See
//! `docs/bench-format.md` for the grammar.

mod lexer;
mod parser;
mod render;

use std::fmt;

use crate::elements::{ElementPipeline, OpticalElement};
use crate::error::{ArmLabel, Result};
use crate::field::{gaussian_input, BenchParams, ComplexField, GridSpec};
use crate::interferometer::InterferometerSpec;

pub use parser::{parse_bench, parse_length};
pub use render::render_bench;

/// Contents of `desk_default.bench`.
pub const DESK_DEFAULT_BENCH: &str = include_str!("../../../../benches/desk_default.bench");

#[derive(Debug, Clone, PartialEq)]
pub struct BenchDocument {
    pub params: BenchParams,
    /// Relative interferometer phase [rad].
    pub phase: f64,
    pub grid: GridSpec,
    pub upper: ElementPipeline,
    pub lower: ElementPipeline,
}

impl BenchDocument {
    /// Paper parameters, `phi = pi`, default grid, standard arm orderings.
    pub fn desk_default() -> Self {
        let params = BenchParams::desk_default();
        let spec = InterferometerSpec::standard(&params, std::f64::consts::PI);
        BenchDocument {
            params,
            phase: spec.phase,
            grid: GridSpec::desk_default(),
            upper: spec.upper_arm().clone(),
            lower: spec.lower_arm().clone(),
        }
    }

    pub fn input_field(&self) -> Result<ComplexField> {
        gaussian_input(self.grid, self.params.w)
    }

    pub fn interferometer(&self) -> Result<InterferometerSpec> {
        InterferometerSpec::new(self.upper.clone(), self.lower.clone(), self.phase)
    }

    /// Semantic problems with the document as a whole. The parser runs this
    /// after a clean syntactic pass; callers that edit a document (grid
    /// overrides) should rerun it.
    pub fn check(&self) -> Vec<SemanticIssue> {
        let mut issues = Vec::new();
        let h = self.grid.half_extent();
        let mut issue = |anchor: Anchor, message: String| issues.push(SemanticIssue { anchor, message });

        if self.params.l > h {
            issue(
                Anchor::Key("l"),
                format!("operator region l = {:e} m exceeds the grid half-extent {h:e} m", self.params.l),
            );
        }
        if h < 4.0 * self.params.w {
            issue(
                Anchor::Key("input"),
                format!("grid half-extent {h:e} m is below 4 w = {:e} m", 4.0 * self.params.w),
            );
        }
        for (arm, pipeline) in [(ArmLabel::Upper, &self.upper), (ArmLabel::Lower, &self.lower)] {
            let count = pipeline.momentum_bench_count();
            if count != 1 {
                issue(
                    Anchor::Arm(arm),
                    format!("arm `{arm}` must contain exactly one momentum bench (pbench), found {count}"),
                );
            }
            for (index, element) in pipeline.elements.iter().enumerate() {
                if let Some(message) = element_issue(element, &self.grid) {
                    issue(Anchor::Element(arm, index), message);
                }
            }
        }
        issues
    }
}

fn element_issue(element: &OpticalElement, grid: &GridSpec) -> Option<String> {
    let h = grid.half_extent();
    match *element {
        OpticalElement::PositionBench { l } if l > h => {
            Some(format!("xbench l = {l:e} m exceeds the grid half-extent {h:e} m"))
        }
        OpticalElement::PhaseShifter { lo, hi, .. } if !(lo <= hi && lo >= -h && hi <= h) => {
            Some(format!("phase region [{lo:e}, {hi:e}] m is not inside the grid"))
        }
        // Fourier-plane coverage of a pbench is a runtime failure, not a
        // document error: coarse grids must still load so validation can
        // report them.
        _ => None,
    }
}

/// Where a semantic problem should be reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Key(&'static str),
    Arm(ArmLabel),
    Element(ArmLabel, usize),
    Document,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemanticIssue {
    pub anchor: Anchor,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    Syntax,
    Semantic,
    Unit,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::Syntax => "syntax error",
            DiagnosticKind::Semantic => "semantic error",
            DiagnosticKind::Unit => "unit error",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    /// 1-based; 0 when the problem has no single location.
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.kind, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

/// All diagnostics from a failed parse.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseFailure {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseFailure {}
