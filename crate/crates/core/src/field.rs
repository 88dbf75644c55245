//! Sampled 1-D transverse wave functions.
//!
//! Fields carry physical units: samples are amplitudes in m^(-1/2) so that
//! `sum |psi_i|^2 * dx` is a probability.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OpticsError, Result};

/// Reduced Planck constant in J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Uniform grid on `[-half_extent, +half_extent)`.
///
/// The spacing is always derived from the point count and the extent, so
/// two grids built from the same arguments produce bit-identical
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n_points: usize,
    half_extent: f64,
}

impl GridSpec {
    pub const MIN_POINTS: usize = 16;

    pub fn new(n_points: usize, half_extent: f64) -> Result<Self> {
        if n_points < Self::MIN_POINTS || !n_points.is_power_of_two() {
            return Err(OpticsError::InvalidArgument(format!(
                "grid point count must be a power of two >= {}, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        if !(half_extent > 0.0 && half_extent.is_finite()) {
            return Err(OpticsError::InvalidArgument(format!(
                "grid half-extent must be positive and finite, got {half_extent}"
            )));
        }
        Ok(GridSpec {
            n_points,
            half_extent,
        })
    }

    /// 4096 points over 12 mm, which resolves the default bench.
    pub fn desk_default() -> Self {
        GridSpec {
            n_points: 4096,
            half_extent: 6e-3,
        }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.n_points as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        // offset from the centre keeps grid points that are whole multiples
        // of dx exact
        (i as f64 - (self.n_points / 2) as f64) * self.spacing()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Same point count and extents equal to 1e-12 relative. Grids that come
    /// back from a pair of lens transforms differ from the original only by
    /// rounding.
    pub fn is_compatible(&self, other: &GridSpec) -> bool {
        self.n_points == other.n_points
            && (self.half_extent - other.half_extent).abs() <= 1e-12 * self.half_extent
    }

    pub(crate) fn check_compatible(&self, other: &GridSpec) -> Result<()> {
        if self.is_compatible(other) {
            Ok(())
        } else {
            Err(OpticsError::IncompatibleGrid(format!(
                "({} points, half-extent {:e} m) vs ({} points, half-extent {:e} m)",
                self.n_points, self.half_extent, other.n_points, other.half_extent
            )))
        }
    }
}

/// Complex amplitudes sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    samples: Vec<Complex64>,
}

impl ComplexField {
    pub fn from_samples(grid: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.n_points() {
            return Err(OpticsError::InvalidArgument(format!(
                "{} samples supplied for a {}-point grid",
                samples.len(),
                grid.n_points()
            )));
        }
        Ok(ComplexField { grid, samples })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let samples = (0..grid.n_points()).map(|i| f(grid.x(i))).collect();
        ComplexField { grid, samples }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        ComplexField {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Same grid, samples replaced by `f(x, psi(x))`.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, &s)| f(self.grid.x(i), s))
            .collect();
        ComplexField {
            grid: self.grid,
            samples,
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        self.map(|_, s| s * factor)
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &ComplexField, b: Complex64) -> Result<Self> {
        self.grid.check_compatible(&other.grid)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&u, &v)| a * u + b * v)
            .collect();
        Ok(ComplexField {
            grid: self.grid,
            samples,
        })
    }

    /// `sum |psi_i|^2 dx`.
    pub fn norm_sq(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    /// `sum conj(self_i) other_i dx`.
    pub fn inner(&self, other: &ComplexField) -> Result<Complex64> {
        self.grid.check_compatible(&other.grid)?;
        let sum: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(sum * self.grid.spacing())
    }

    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm_sq();
        if !(n2 > 1e-300) || !n2.is_finite() {
            return Err(OpticsError::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n2.sqrt(), 0.0)))
    }

    /// Squared overlap of the normalized fields. Insensitive to global phase.
    pub fn fidelity(&self, other: &ComplexField) -> Result<f64> {
        let overlap = self.inner(other)?;
        let na = self.norm_sq();
        let nb = other.norm_sq();
        if !(na > 1e-300 && nb > 1e-300) {
            return Err(OpticsError::ZeroNorm);
        }
        Ok(overlap.norm_sqr() / (na * nb))
    }

    /// Power carried by samples with `|x| > l`.
    pub fn power_outside(&self, l: f64) -> f64 {
        self.samples
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.x(*i).abs() > l)
            .map(|(_, s)| s.norm_sqr())
            .sum::<f64>()
            * self.grid.spacing()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    /// `||self - reference|| / ||reference||`.
    pub fn relative_l2(&self, reference: &ComplexField) -> Result<f64> {
        let diff = self.combine(Complex64::new(1.0, 0.0), reference, Complex64::new(-1.0, 0.0))?;
        let denom = reference.norm_sq();
        if !(denom > 1e-300) {
            return Err(OpticsError::ZeroNorm);
        }
        Ok((diff.norm_sq() / denom).sqrt())
    }

    /// Relative L2 distance after removing the best global phase between the
    /// two fields (magnitudes are compared as-is).
    pub fn relative_l2_up_to_phase(&self, reference: &ComplexField) -> Result<f64> {
        let overlap = self.inner(reference)?;
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.scaled(phase).relative_l2(reference)
    }
}

/// Physical constants of one bench configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchParams {
    /// Wavelength [m].
    pub lambda: f64,
    /// Lens focal length [m].
    pub f: f64,
    /// Half-width of the operator region [m].
    pub l: f64,
    /// Gaussian input waist [m].
    pub w: f64,
    /// Reduced Planck constant [J s].
    pub hbar: f64,
}

impl BenchParams {
    pub fn new(lambda: f64, f: f64, l: f64, w: f64) -> Result<Self> {
        Self::with_hbar(lambda, f, l, w, HBAR)
    }

    pub fn with_hbar(lambda: f64, f: f64, l: f64, w: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("f", f), ("l", l), ("w", w), ("hbar", hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(OpticsError::InvalidArgument(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(BenchParams {
            lambda,
            f,
            l,
            w,
            hbar,
        })
    }

    /// 800 nm light, 50 cm lenses, 1.5 mm operator region, 0.5 mm waist.
    pub fn desk_default() -> Self {
        BenchParams {
            lambda: 800e-9,
            f: 0.5,
            l: 1.5e-3,
            w: 0.5e-3,
            hbar: HBAR,
        }
    }

    /// `C = lambda f / (2 pi l^2)`, so that `[x~, p~] = i C`.
    pub fn dimensionless_c(&self) -> f64 {
        self.lambda * self.f / (2.0 * PI * self.l * self.l)
    }

    /// Scale factor between the momentum bench output and `-i d/dx`:
    /// `p~ = (lambda f / 2 pi l) (-i d/dx)`.
    pub fn momentum_scale(&self) -> f64 {
        self.lambda * self.f / (2.0 * PI * self.l)
    }
}

/// Normalized Gaussian `(2 / pi w^2)^(1/4) exp(-x^2 / w^2)`.
pub fn gaussian_input(grid: GridSpec, w: f64) -> Result<ComplexField> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(OpticsError::InvalidArgument(format!(
            "waist must be positive, got {w}"
        )));
    }
    if grid.half_extent() < 4.0 * w {
        return Err(OpticsError::TruncationRisk {
            half_extent: grid.half_extent(),
            required: 4.0 * w,
        });
    }
    Ok(ComplexField::from_fn(grid, |x| {
        Complex64::new(gaussian_amplitude(x, w), 0.0)
    }))
}

pub(crate) fn gaussian_amplitude(x: f64, w: f64) -> f64 {
    (2.0 / (PI * w * w)).powf(0.25) * (-x * x / (w * w)).exp()
}
