//! Optical elements and the composite benches realizing the dimensionless
//! position and momentum operators.
//!
//! Pipelines are stored in temporal order: the first element is the first
//! one the light meets. An operator product `x~ p~` is therefore the
//! pipeline `[momentum bench, position bench]`.

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::fmt;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{ArmLabel, OpticsError, Result};
use crate::field::{ComplexField, GridSpec};

/// Fraction of input power an aperture may discard before a clipping
/// warning is raised.
pub const CLIP_WARNING_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum OpticalElement {
    /// Multiplies samples with `lo <= x <= hi` by `exp(i shift)`.
    PhaseShifter { lo: f64, hi: f64, shift: f64 },
    /// Amplitude transmission `|x| / l` on `[-l, l]`, zero outside.
    LinearAttenuator { l: f64 },
    /// Unit transmission on `[-l, l]`, zero outside.
    HardAperture { l: f64 },
    /// Thin lens mapping the front focal plane onto the back focal plane.
    LensFt { lambda: f64, f: f64 },
    /// Relabels `x -> -x`.
    AxisFlip,
    /// Pi phase shifter on `[-l, 0]` followed by a linear attenuator.
    PositionBench { l: f64 },
    /// 4f system with a position bench in the Fourier plane.
    MomentumBench { lambda: f64, f: f64, l: f64 },
}

impl OpticalElement {
    /// Phase shifter with the shift wrapped into `[0, 2 pi)`.
    pub fn phase_shifter(lo: f64, hi: f64, shift: f64) -> Self {
        OpticalElement::PhaseShifter {
            lo,
            hi,
            shift: wrap_phase(shift),
        }
    }

    pub fn is_momentum_bench(&self) -> bool {
        matches!(self, OpticalElement::MomentumBench { .. })
    }

    pub fn apply(&self, field: &ComplexField) -> Result<BenchOutput> {
        match *self {
            OpticalElement::PhaseShifter { lo, hi, shift } => {
                apply_phase_shifter(field, lo, hi, shift).map(BenchOutput::clean)
            }
            OpticalElement::LinearAttenuator { l } => {
                apply_linear_attenuator(field, l).map(BenchOutput::clean)
            }
            OpticalElement::HardAperture { l } => {
                apply_hard_aperture(field, l).map(BenchOutput::clean)
            }
            OpticalElement::LensFt { lambda, f } => {
                lens_fourier_transform(field, lambda, f).map(BenchOutput::clean)
            }
            OpticalElement::AxisFlip => Ok(BenchOutput::clean(apply_axis_flip(field))),
            OpticalElement::PositionBench { l } => apply_position_bench(field, l),
            OpticalElement::MomentumBench { lambda, f, l } => {
                apply_momentum_bench(field, lambda, f, l)
            }
        }
    }
}

impl fmt::Display for OpticalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpticalElement::PhaseShifter { lo, hi, shift } => {
                write!(f, "phase(region=[{lo:e} m, {hi:e} m], shift={shift} rad)")
            }
            OpticalElement::LinearAttenuator { l } => write!(f, "atten(l={l:e} m)"),
            OpticalElement::HardAperture { l } => write!(f, "aperture(l={l:e} m)"),
            OpticalElement::LensFt { lambda, f: fl } => {
                write!(f, "lens(f={fl:e} m, lambda={lambda:e} m)")
            }
            OpticalElement::AxisFlip => f.write_str("flip()"),
            OpticalElement::PositionBench { l } => write!(f, "xbench(l={l:e} m)"),
            OpticalElement::MomentumBench { lambda, f: fl, l } => {
                write!(f, "pbench(f={fl:e} m, l={l:e} m, lambda={lambda:e} m)")
            }
        }
    }
}

pub fn wrap_phase(shift: f64) -> f64 {
    let wrapped = shift.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Where an aperture discarded power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClipPlane {
    Position,
    Fourier,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClipWarning {
    pub plane: ClipPlane,
    /// Aperture half-width [m].
    pub aperture: f64,
    /// Power outside the aperture relative to the power arriving at it.
    pub clipped_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arm: Option<ArmLabel>,
}

impl fmt::Display for ClipWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(arm) = self.arm {
            write!(f, "{arm} arm, ")?;
        }
        if let Some(i) = self.element {
            write!(f, "element {i}, ")?;
        }
        let plane = match self.plane {
            ClipPlane::Position => "position",
            ClipPlane::Fourier => "Fourier",
        };
        write!(
            f,
            "{plane} plane: aperture |x| <= {:e} m clipped {:.3e} of the power",
            self.aperture, self.clipped_fraction
        )
    }
}

/// A field plus the clipping warnings raised while producing it.
#[derive(Debug, Clone)]
pub struct BenchOutput {
    pub field: ComplexField,
    pub warnings: Vec<ClipWarning>,
}

impl BenchOutput {
    fn clean(field: ComplexField) -> Self {
        BenchOutput {
            field,
            warnings: Vec::new(),
        }
    }
}

pub fn apply_phase_shifter(
    field: &ComplexField,
    lo: f64,
    hi: f64,
    shift: f64,
) -> Result<ComplexField> {
    let h = field.grid().half_extent();
    if !(lo <= hi && lo >= -h && hi <= h) {
        return Err(OpticsError::InvalidRegion { lo, hi });
    }
    let factor = Complex64::from_polar(1.0, wrap_phase(shift));
    Ok(field.map(|x, s| if x >= lo && x <= hi { s * factor } else { s }))
}

fn check_aperture(l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(OpticsError::InvalidArgument(format!(
            "aperture half-width must be positive, got {l}"
        )))
    }
}

pub fn apply_linear_attenuator(field: &ComplexField, l: f64) -> Result<ComplexField> {
    check_aperture(l)?;
    Ok(field.map(|x, s| if x.abs() <= l { s * (x.abs() / l) } else { Complex64::new(0.0, 0.0) }))
}

pub fn apply_hard_aperture(field: &ComplexField, l: f64) -> Result<ComplexField> {
    check_aperture(l)?;
    Ok(field.map(|x, s| if x.abs() <= l { s } else { Complex64::new(0.0, 0.0) }))
}

/// `out(x_i) = in(-x_i)`. The grid excludes `+half_extent`, so the sample at
/// `-half_extent` maps onto itself.
pub fn apply_axis_flip(field: &ComplexField) -> ComplexField {
    let s = field.samples();
    let n = s.len();
    let flipped = (0..n).map(|i| s[(n - i) % n]).collect();
    ComplexField::from_samples(*field.grid(), flipped).expect("length preserved")
}

fn clip_check(field: &ComplexField, l: f64, plane: ClipPlane) -> Option<ClipWarning> {
    let total = field.norm_sq();
    if total <= 0.0 {
        return None;
    }
    let fraction = field.power_outside(l) / total;
    (fraction > CLIP_WARNING_THRESHOLD).then(|| {
        let w = ClipWarning {
            plane,
            aperture: l,
            clipped_fraction: fraction,
            element: None,
            arm: None,
        };
        log::warn!("{w}");
        w
    })
}

/// Multiplies the field by `x / l` on `[-l, l]` and zeroes it outside.
pub fn apply_position_bench(field: &ComplexField, l: f64) -> Result<BenchOutput> {
    position_bench_in(field, l, ClipPlane::Position)
}

fn position_bench_in(field: &ComplexField, l: f64, plane: ClipPlane) -> Result<BenchOutput> {
    check_aperture(l)?;
    if l > field.grid().half_extent() {
        return Err(OpticsError::InvalidArgument(format!(
            "operator region l = {l:e} m exceeds the grid half-extent {:e} m",
            field.grid().half_extent()
        )));
    }
    let warnings = clip_check(field, l, plane).into_iter().collect();
    let shifted = apply_phase_shifter(field, -l, 0.0, PI)?;
    let field = apply_linear_attenuator(&shifted, l)?;
    Ok(BenchOutput { field, warnings })
}

/// Half-extent of the back-focal-plane grid paired with `grid`:
/// `dp = lambda f / (n dx)`, so the half-extent is `lambda f / (2 dx)`.
pub fn fourier_plane_half_extent(grid: &GridSpec, lambda: f64, f: f64) -> f64 {
    lambda * f / (2.0 * grid.spacing())
}

/// Optical Fourier transform performed by a lens of focal length `f`:
///
/// `phi(p) = (i lambda f)^(-1/2) * integral psi(x) exp(-2 pi i x p / (lambda f)) dx`
///
/// evaluated on the reciprocal grid with `dx * dp = lambda f / n`. With both
/// grids centred (`x_i = (i - n/2) dx`), the kernel factors into a plain
/// forward DFT sandwiched between `(-1)^i` and `(-1)^j`; the leftover
/// `exp(-i pi n / 2)` is 1 because `n` is a multiple of 4.
pub fn lens_fourier_transform(field: &ComplexField, lambda: f64, f: f64) -> Result<ComplexField> {
    for (name, v) in [("lambda", lambda), ("f", f)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(OpticsError::InvalidArgument(format!(
                "lens {name} must be positive, got {v}"
            )));
        }
    }
    let grid = field.grid();
    let n = grid.n_points();
    let out_grid = GridSpec::new(n, fourier_plane_half_extent(grid, lambda, f))?;

    let mut buf: Vec<Complex64> = field
        .samples()
        .iter()
        .enumerate()
        .map(|(i, &s)| if i % 2 == 0 { s } else { -s })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let prefactor =
        Complex64::from_polar(grid.spacing() / (lambda * f).sqrt(), -FRAC_PI_4);
    for (j, s) in buf.iter_mut().enumerate() {
        *s *= if j % 2 == 0 { prefactor } else { -prefactor };
    }
    ComplexField::from_samples(out_grid, buf)
}

/// 4f momentum bench: lens, position bench in the Fourier plane, lens, then
/// the `x' = -x` relabeling of the inverted image. The result is
/// `-i (p~ psi)(x)` with `p~ = (lambda f / 2 pi l) (-i d/dx)`.
pub fn apply_momentum_bench(
    field: &ComplexField,
    lambda: f64,
    f: f64,
    l: f64,
) -> Result<BenchOutput> {
    check_aperture(l)?;
    let paired = fourier_plane_half_extent(field.grid(), lambda, f);
    if paired < l {
        return Err(OpticsError::FourierPlaneCoverage {
            paired_half_extent: paired,
            l,
        });
    }
    let spectrum = lens_fourier_transform(field, lambda, f)?;
    let BenchOutput {
        field: filtered,
        warnings,
    } = position_bench_in(&spectrum, l, ClipPlane::Fourier)?;
    let image = lens_fourier_transform(&filtered, lambda, f)?;
    // back on the input grid up to rounding; pin it to the exact original
    let image = ComplexField::from_samples(*field.grid(), image.into_samples())?;
    Ok(BenchOutput {
        field: apply_axis_flip(&image),
        warnings,
    })
}

/// Ordered optical elements forming one interferometer arm.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ElementPipeline {
    pub elements: Vec<OpticalElement>,
}

impl ElementPipeline {
    pub fn new(elements: Vec<OpticalElement>) -> Self {
        ElementPipeline { elements }
    }

    pub fn momentum_bench_count(&self) -> usize {
        self.elements.iter().filter(|e| e.is_momentum_bench()).count()
    }
}

impl From<Vec<OpticalElement>> for ElementPipeline {
    fn from(elements: Vec<OpticalElement>) -> Self {
        ElementPipeline { elements }
    }
}

/// Applies the elements in temporal order. Errors carry the failing
/// element's index.
pub fn run_pipeline(field: &ComplexField, pipeline: &ElementPipeline) -> Result<BenchOutput> {
    let mut current = BenchOutput::clean(field.clone());
    for (index, element) in pipeline.elements.iter().enumerate() {
        let out = element
            .apply(&current.field)
            .map_err(|e| OpticsError::Element {
                index,
                source: Box::new(e),
            })?;
        current.field = out.field;
        current
            .warnings
            .extend(out.warnings.into_iter().map(|mut w| {
                w.element = Some(index);
                w
            }));
    }
    Ok(current)
}
