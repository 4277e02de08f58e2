//! Scalar ODE for the wall shear `α₁(t) = ∂_r u_θ(t, p₀)` at a boundary point.
//!
//! Plain (no-slip) right-hand side:
//!
//! ```text
//! α₁' = −k² α₁ + α₃ + 2k α₂ + 2η
//! ```
//!
//! With inflow speed `λ₀` through the boundary and a Coriolis parameter `β`
//! on the sphere:
//!
//! ```text
//! α₁' = −k(k+λ₀) α₁ + (2k−λ₀) α₂ + α₃ + 2η + λ₀ β (a sin(aδ) − k cos(aδ))
//! ```
//!
//! A boundary point separates at the first time `α₁` reaches zero.

mod classify;
mod coefficients;
mod integrate;
mod schedule;
mod sweep;

pub use classify::{classify_profile, classify_streamlines, ProfileClass, StreamlineClass, DEFAULT_ETA_TOL, DEFAULT_SMALLNESS};
pub use coefficients::{rhs_coriolis, rhs_plain, BoundaryCoefficients, OdeGeometry};
pub use integrate::{asymptotic_fixed_point, detect_separation, integrate, OdeMode, OdeTrace};
pub use schedule::{CoefficientSchedule, Wave};
pub use sweep::{sweep_cell, SweepCell};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("initial wall shear must be positive, got {0}")]
    NonPositiveInitial(f64),
    #[error("time step and end time must be positive and finite (dt = {dt}, t_end = {t_end})")]
    InvalidSpan { dt: f64, t_end: f64 },
    #[error("step too stiff for fixed-step RK4: rate·dt = {0} (must be < 1)")]
    Stiff(f64),
    #[error("non-finite value of α₁ at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },
    #[error("coefficient schedule undefined at t = {0}")]
    ScheduleSpan(f64),
    #[error("invalid coefficient schedule: {0}")]
    InvalidSchedule(String),
    #[error("Coriolis forcing requires the sphere (β = {beta} on {kind})")]
    CoriolisOffSphere { beta: f64, kind: crate::geometry::ManifoldKind },
    #[error("k(k+λ₀) = {0} ≤ 0: no attracting fixed point")]
    DegenerateFixedPoint(f64),
    #[error("smallness parameter must lie in (0, 1), got {0}")]
    InvalidSmallness(f64),
    #[error("curvature k = {stored} disagrees with c(δ)/s(δ) = {expected}")]
    InconsistentCurvature { stored: f64, expected: f64 },
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
}
