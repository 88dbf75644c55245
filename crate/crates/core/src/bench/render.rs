use std::fmt::Write;

use super::BenchDocument;
use crate::elements::{ElementPipeline, OpticalElement};
use crate::error::ArmLabel;

fn len(v: f64) -> String {
    format!("{v:?}m")
}

fn element_line(e: &OpticalElement, global_lambda: f64) -> String {
    let lambda_arg = |lambda: f64| {
        if lambda.to_bits() == global_lambda.to_bits() {
            String::new()
        } else {
            format!(", lambda={}", len(lambda))
        }
    };
    match *e {
        OpticalElement::PositionBench { l } => format!("xbench(l={})", len(l)),
        OpticalElement::MomentumBench { lambda, f, l } => {
            format!("pbench(f={}, l={}{})", len(f), len(l), lambda_arg(lambda))
        }
        OpticalElement::LensFt { lambda, f } => format!("lens(f={}{})", len(f), lambda_arg(lambda)),
        OpticalElement::LinearAttenuator { l } => format!("atten(l={})", len(l)),
        OpticalElement::HardAperture { l } => format!("aperture(l={})", len(l)),
        OpticalElement::AxisFlip => "flip()".to_string(),
        OpticalElement::PhaseShifter { lo, hi, shift } => {
            format!("phase(region=[{}, {}], shift={shift:?}rad)", len(lo), len(hi))
        }
    }
}

/// Writes a document in canonical form: base units, full precision, so
/// that `parse_bench(render_bench(doc)) == doc`.
pub fn render_bench(doc: &BenchDocument) -> String {
    let p = &doc.params;
    let mut out = String::new();
    let _ = writeln!(out, "lambda = {}", len(p.lambda));
    let _ = writeln!(out, "f = {}", len(p.f));
    let _ = writeln!(out, "l = {}", len(p.l));
    let _ = writeln!(out, "hbar = {:?}Js", p.hbar);
    let _ = writeln!(out, "input = gaussian(w={})", len(p.w));
    let _ = writeln!(out, "phase = {:?}rad", doc.phase);
    let _ = writeln!(out, "grid.n = {}", doc.grid.n_points());
    let _ = writeln!(out, "grid.half_extent = {}", len(doc.grid.half_extent()));
    let arms: [(ArmLabel, &ElementPipeline); 2] = [(ArmLabel::Upper, &doc.upper), (ArmLabel::Lower, &doc.lower)];
    for (label, pipeline) in arms {
        let _ = writeln!(out, "\narm {label}:");
        for e in &pipeline.elements {
            let _ = writeln!(out, "  {}", element_line(e, p.lambda));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::parse_bench;

    #[test]
    fn default_round_trips() {
        let doc = BenchDocument::desk_default();
        let text = render_bench(&doc);
        assert_eq!(parse_bench(&text).unwrap(), doc);
    }
}
