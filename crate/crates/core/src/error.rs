use serde::Serialize;
use thiserror::Error;

/// Which interferometer arm an error came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ArmLabel {
    Upper,
    Lower,
}

impl std::fmt::Display for ArmLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArmLabel::Upper => f.write_str("upper"),
            ArmLabel::Lower => f.write_str("lower"),
        }
    }
}

#[derive(Debug, Error)]
pub enum OpticsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid half-extent {half_extent:e} m is below 4 w = {required:e} m; Gaussian tail would be truncated")]
    TruncationRisk { half_extent: f64, required: f64 },

    #[error("field has zero norm")]
    ZeroNorm,

    #[error("incompatible grids: {0}")]
    IncompatibleGrid(String),

    #[error("phase-shifter region [{lo:e}, {hi:e}] m lies outside the grid")]
    InvalidRegion { lo: f64, hi: f64 },

    #[error("Fourier-plane grid half-extent {paired_half_extent:e} m does not cover the aperture l = {l:e} m")]
    FourierPlaneCoverage { paired_half_extent: f64, l: f64 },

    #[error("element {index}: {source}")]
    Element {
        index: usize,
        #[source]
        source: Box<OpticsError>,
    },

    #[error("{arm} arm: {source}")]
    Arm {
        arm: ArmLabel,
        #[source]
        source: Box<OpticsError>,
    },

    #[error("interferometer arm `{arm}` must contain exactly one momentum bench, found {found}")]
    MomentumBenchCount { arm: ArmLabel, found: usize },

    #[error("input field is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("Wigner transform left an imaginary residue of {residue:e} (max |W| = {max:e})")]
    NonRealWigner { residue: f64, max: f64 },

    #[error("incompatible Wigner axes: {0}")]
    IncompatibleAxes(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = OpticsError> = std::result::Result<T, E>;
