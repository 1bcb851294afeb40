use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised while building systems, targets, factorizations and schedules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("circuit parameter `{name}` must be strictly positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("{what} must be finite")]
    NonFinite { what: &'static str },

    #[error("{what} is not a unit vector (norm {norm})")]
    NotUnit { what: String, norm: f64 },

    #[error("{what} is not a group element (residual {residual:e})")]
    NotInGroup { what: &'static str, residual: f64 },

    #[error("waypoint {index} repeats the previous point of the transfer")]
    RepeatedWaypoint { index: usize },

    #[error("explicit target for leg {} does not map its start to its end (residual {residual:e})", .leg + 1)]
    TargetMismatch { leg: usize, residual: f64 },

    #[error("unsupported fourth-order target {target:?}: only (0,1,0,0), (0,0,1,0) and (0,0,0,1) from (1,0,0,0) are constructed")]
    UnsupportedTarget { target: Vec<f64> },

    #[error("resonance condition {condition} not satisfied: {detail}")]
    ResonanceUnmet { condition: &'static str, detail: String },

    #[error("z-rotation angle is a multiple of 2π; no two-factor split exists")]
    ZeroAngle,

    #[error("phase {theta} lies outside the admissible arc ({lo}, {hi})")]
    PhaseOutsideArc { theta: f64, lo: f64, hi: f64 },

    #[error("γ = {gamma} lies outside the half-plane Im γ > -{slope}·Re γ (duration would be {duration})")]
    HalfPlane { gamma: Complex64, slope: f64, duration: f64 },

    #[error("pulse {index} has control {control}, which is not a switch position (0 or 1)")]
    NotBangBang { index: usize, control: f64 },

    #[error("factor {index} ({kind}) is not directly realizable as a pulse")]
    Unrealizable { index: usize, kind: &'static str },

    #[error("pulse durations must be positive and finite, got {0}")]
    InvalidDuration(f64),

    #[error("subsystem factor lists disagree at factor {index}: p has ({p_drift}, {p_control}), q has ({q_drift}, {q_control})")]
    CoefficientMismatch {
        index: usize,
        p_drift: f64,
        p_control: f64,
        q_drift: f64,
        q_control: f64,
    },

    #[error("factorization does not reconstruct its target (residual {residual:e})")]
    Reconstruction { residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("algorithm `{algorithm}` cannot be used with a {dimension}-dimensional network")]
    AlgorithmDimension { algorithm: &'static str, dimension: usize },
}

impl Error {
    /// True for failures that mean "this transfer cannot be synthesized", as
    /// opposed to malformed input.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedTarget { .. }
                | Error::ResonanceUnmet { .. }
                | Error::ZeroAngle
                | Error::PhaseOutsideArc { .. }
                | Error::HalfPlane { .. }
                | Error::NotBangBang { .. }
                | Error::CoefficientMismatch { .. }
                | Error::Reconstruction { .. }
        )
    }
}
