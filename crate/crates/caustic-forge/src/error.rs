//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("curve is not closed (seam defect {gap:.3e})")]
    NotClosed { gap: f64 },
    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },
    #[error("degenerate tangent vector at t = {t:.6}")]
    DegenerateTangent { t: f64 },
    #[error("line misses the oval")]
    NoIntersection,
    #[error("line is tangent to the oval within tolerance")]
    Tangential,
    #[error("curvature {kappa:.3e} at t = {t:.6} fails the convexity bound")]
    NotConvex { t: f64, kappa: f64 },
    #[error("curve is self-intersecting")]
    SelfIntersecting,
    #[error("radial solve failed along direction θ = {theta:.6}")]
    RadialSolveFailed { theta: f64 },
    #[error("ray is tangential at the reflection point (φ = {phi:.3e})")]
    TangentialReflection { phi: f64 },
    #[error("transverse field is tangent to the boundary at t = {t:.6}")]
    FieldTangent { t: f64 },
    #[error("inner curve is not strictly contained in the table")]
    NotContained,
    #[error("refinement budget of {budget} samples exceeded")]
    RefinementBudgetExceeded { budget: usize },
    #[error("line family is degenerate and fits no common point")]
    DegenerateFamily,
    #[error("sign-change indicator too noisy to count reliably")]
    NoisyIndicator,
    #[error("curve is not a graph over the angular coordinate")]
    NotAGraph,
    #[error("flow step dt = {dt:.3e} exceeds the stability bound {limit:.3e}")]
    StabilityViolation { dt: f64, limit: f64 },
    #[error("node spacing collapsed during flow (min {min:.3e}, mean {mean:.3e})")]
    Pinch { min: f64, mean: f64 },
    #[error("flow hit the step budget ({max_steps}) before the stop condition")]
    MaxStepsExceeded { max_steps: u64 },
    #[error("source point must lie strictly inside the oval")]
    SourceOutside,
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag for stderr reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotClosed { .. } => "not_closed",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::DegenerateTangent { .. } => "degenerate_tangent",
            Error::NoIntersection => "no_intersection",
            Error::Tangential => "tangential",
            Error::NotConvex { .. } => "not_convex",
            Error::SelfIntersecting => "self_intersecting",
            Error::RadialSolveFailed { .. } => "radial_solve_failed",
            Error::TangentialReflection { .. } => "tangential_reflection",
            Error::FieldTangent { .. } => "field_tangent",
            Error::NotContained => "not_contained",
            Error::RefinementBudgetExceeded { .. } => "refinement_budget_exceeded",
            Error::DegenerateFamily => "degenerate_family",
            Error::NoisyIndicator => "noisy_indicator",
            Error::NotAGraph => "not_a_graph",
            Error::StabilityViolation { .. } => "stability_violation",
            Error::Pinch { .. } => "pinch",
            Error::MaxStepsExceeded { .. } => "max_steps_exceeded",
            Error::SourceOutside => "source_outside",
            Error::ConfigInvalid(_) => "config_invalid",
            Error::Io(_) | Error::File { .. } => "io",
            Error::Json(_) => "json",
        }
    }

    /// CLI exit code: 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::ConfigInvalid(_) | Error::Json(_) | Error::SourceOutside | Error::NotContained => 2,
            Error::Io(_) | Error::File { .. } => 2,
            _ => 3,
        }
    }
}
