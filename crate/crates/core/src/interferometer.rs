//! Mach-Zehnder superposition of the two operator orderings.
//!
//! Port `D1` receives `(U_lower + e^{i phi} U_upper) psi / 2` and port `D2`
//! receives `(U_lower - e^{i phi} U_upper) psi / 2`. With the standard arms
//! (`x~ p~` below, `p~ x~` above) `D1` is the commutator port at `phi = pi`
//! and the anti-commutator port at `phi = 0`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::elements::{run_pipeline, ClipWarning, ElementPipeline, OpticalElement};
use crate::error::{ArmLabel, OpticsError, Result};
use crate::field::{BenchParams, ComplexField};

#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerSpec {
    upper_arm: ElementPipeline,
    lower_arm: ElementPipeline,
    /// Relative phase of the upper arm [rad].
    pub phase: f64,
}

impl InterferometerSpec {
    /// Both arms must hold exactly one momentum bench so that the `-i` each
    /// bench contributes is common to the two paths.
    pub fn new(upper_arm: ElementPipeline, lower_arm: ElementPipeline, phase: f64) -> Result<Self> {
        for (arm, pipeline) in [(ArmLabel::Upper, &upper_arm), (ArmLabel::Lower, &lower_arm)] {
            let found = pipeline.momentum_bench_count();
            if found != 1 {
                return Err(OpticsError::MomentumBenchCount { arm, found });
            }
        }
        Ok(InterferometerSpec {
            upper_arm,
            lower_arm,
            phase,
        })
    }

    /// Upper arm `p~ x~` (position bench first), lower arm `x~ p~`.
    pub fn standard(params: &BenchParams, phase: f64) -> Self {
        let x = OpticalElement::PositionBench { l: params.l };
        let p = OpticalElement::MomentumBench {
            lambda: params.lambda,
            f: params.f,
            l: params.l,
        };
        InterferometerSpec {
            upper_arm: vec![x.clone(), p.clone()].into(),
            lower_arm: vec![p, x].into(),
            phase,
        }
    }

    pub fn upper_arm(&self) -> &ElementPipeline {
        &self.upper_arm
    }

    pub fn lower_arm(&self) -> &ElementPipeline {
        &self.lower_arm
    }

    pub fn with_phase(&self, phase: f64) -> Self {
        InterferometerSpec {
            phase,
            ..self.clone()
        }
    }
}

/// Fields reaching the two detectors.
#[derive(Debug, Clone)]
pub struct PortOutputs {
    pub d1: ComplexField,
    pub d2: ComplexField,
    /// `(norm_sq(d1), norm_sq(d2))`, not renormalized.
    pub raw_probabilities: (f64, f64),
    pub warnings: Vec<ClipWarning>,
}

/// Each arm applied once to the input; port fields for any phase are cheap
/// linear combinations of these.
#[derive(Debug, Clone)]
pub struct ArmFields {
    pub upper: ComplexField,
    pub lower: ComplexField,
    pub warnings: Vec<ClipWarning>,
}

impl ArmFields {
    pub fn evaluate(input: &ComplexField, spec: &InterferometerSpec) -> Result<Self> {
        let run = |arm: ArmLabel, pipeline: &ElementPipeline| {
            run_pipeline(input, pipeline)
                .map_err(|e| OpticsError::Arm {
                    arm,
                    source: Box::new(e),
                })
                .map(|out| {
                    let warnings = out.warnings.into_iter().map(move |mut w| {
                        w.arm = Some(arm);
                        w
                    });
                    (out.field, warnings.collect::<Vec<_>>())
                })
        };
        let (upper, mut warnings) = run(ArmLabel::Upper, &spec.upper_arm)?;
        let (lower, lower_warnings) = run(ArmLabel::Lower, &spec.lower_arm)?;
        warnings.extend(lower_warnings);
        Ok(ArmFields {
            upper,
            lower,
            warnings,
        })
    }

    pub fn ports(&self, phase: f64) -> Result<PortOutputs> {
        let half = Complex64::new(0.5, 0.0);
        let rot = Complex64::from_polar(0.5, phase);
        let d1 = self.lower.combine(half, &self.upper, rot)?;
        let d2 = self.lower.combine(half, &self.upper, -rot)?;
        let raw_probabilities = (d1.norm_sq(), d2.norm_sq());
        Ok(PortOutputs {
            d1,
            d2,
            raw_probabilities,
            warnings: self.warnings.clone(),
        })
    }
}

/// Runs the input through both arms and recombines them at `spec.phase`.
///
/// The input is expected to be normalized; nothing here depends on it, so
/// unnormalized inputs are accepted and scale linearly.
pub fn run_interferometer(input: &ComplexField, spec: &InterferometerSpec) -> Result<PortOutputs> {
    ArmFields::evaluate(input, spec)?.ports(spec.phase)
}

/// Detection probabilities at `D1` over a set of phases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityMap {
    /// [rad]
    pub phases: Vec<f64>,
    /// [m]
    pub x_axis: Vec<f64>,
    /// Row-major `[phase][x]`, |d1|^2 in m^-1.
    pub intensity: Vec<f64>,
    /// True when each phase row was rescaled to unit total probability.
    pub normalized: bool,
}

impl ProbabilityMap {
    /// The `D1` profile at the `k`-th phase.
    pub fn profile(&self, k: usize) -> &[f64] {
        let n = self.x_axis.len();
        &self.intensity[k * n..(k + 1) * n]
    }

    pub fn phase_count(&self) -> usize {
        self.phases.len()
    }

    /// Copy with each profile rescaled to unit integrated probability.
    pub fn normalized_rows(&self) -> ProbabilityMap {
        let n = self.x_axis.len();
        let dx = if n > 1 { self.x_axis[1] - self.x_axis[0] } else { 1.0 };
        let mut intensity = self.intensity.clone();
        for row in intensity.chunks_mut(n) {
            let total: f64 = row.iter().sum::<f64>() * dx;
            if total > 0.0 {
                row.iter_mut().for_each(|v| *v /= total);
            }
        }
        ProbabilityMap {
            intensity,
            normalized: true,
            ..self.clone()
        }
    }
}

/// `count` phases evenly spaced over `[0, 2 pi)`.
pub fn uniform_phases(count: usize) -> Vec<f64> {
    (0..count).map(|k| TAU * k as f64 / count as f64).collect()
}

/// Raw `|d1(x)|^2` for every phase. Arms are evaluated once; the per-phase
/// recombination runs in parallel with output ordered by phase index.
pub fn phase_sweep(
    input: &ComplexField,
    spec: &InterferometerSpec,
    phases: &[f64],
) -> Result<ProbabilityMap> {
    if phases.is_empty() {
        return Err(OpticsError::InvalidArgument(
            "phase sweep needs at least one phase".into(),
        ));
    }
    let arms = ArmFields::evaluate(input, spec)?;
    let rows: Vec<Vec<f64>> = phases
        .par_iter()
        .map(|&phi| {
            let rot = Complex64::from_polar(0.5, phi);
            arms.lower
                .samples()
                .iter()
                .zip(arms.upper.samples())
                .map(|(&lo, &up)| (lo * 0.5 + rot * up).norm_sqr())
                .collect()
        })
        .collect();
    Ok(ProbabilityMap {
        phases: phases.to_vec(),
        x_axis: input.grid().coordinates(),
        intensity: rows.concat(),
        normalized: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PortSwitchReport {
    pub passed: bool,
    /// Largest sample deviation relative to the largest port amplitude.
    pub max_deviation: f64,
}

pub const PORT_SWITCH_TOLERANCE: f64 = 1e-12;

/// Checks that `D1(phi = 0) = D2(phi = pi)` and `D2(phi = 0) = D1(phi = pi)`.
pub fn port_switch_check(input: &ComplexField, spec: &InterferometerSpec) -> Result<PortSwitchReport> {
    let arms = ArmFields::evaluate(input, spec)?;
    let zero = arms.ports(0.0)?;
    let pi = arms.ports(std::f64::consts::PI)?;
    let scale = [&zero.d1, &zero.d2, &pi.d1, &pi.d2]
        .iter()
        .map(|f| f.max_abs())
        .fold(0.0, f64::max);
    let deviation = |a: &ComplexField, b: &ComplexField| {
        a.samples()
            .iter()
            .zip(b.samples())
            .map(|(u, v)| (u - v).norm())
            .fold(0.0, f64::max)
    };
    let raw = deviation(&zero.d1, &pi.d2).max(deviation(&zero.d2, &pi.d1));
    let max_deviation = if scale > 0.0 { raw / scale } else { raw };
    Ok(PortSwitchReport {
        passed: max_deviation <= PORT_SWITCH_TOLERANCE,
        max_deviation,
    })
}
