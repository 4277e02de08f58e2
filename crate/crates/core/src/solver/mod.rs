//! Incompressible Navier–Stokes on the annulus `δ ≤ r ≤ R` with unit viscosity,
//!
//! ```text
//! u_t + ∇_u u − Δu − 2Ric u + β cos(ar) ∗u + dp = 0,   d*u = 0,
//! ```
//!
//! advanced by Heun's method with an exact discrete projection after each
//! stage. The runner records the wall coefficients at a monitored boundary
//! point together with the separation-ODE residual.

mod config;
mod integrator;
mod mms;
mod projection;
mod record;

pub use config::{InitialField, OuterCondition, SolverConfig, TangentialProfile};
pub use integrator::{kinetic_energy, pressure_boundary_residual, pressure_projection, step, Solver, StepOutput};
pub use mms::{manufactured_forcing_run, manufactured_refinement, ErrorReport, ManufacturedFlow};
pub use record::{run, run_with_initial, Snapshot, StepRecord, SimulationRecord, RECORD_CSV_HEADER};

use thiserror::Error;

use crate::fields::FieldError;
use crate::separation::OdeError;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("time step {dt:e} exceeds the {limit_kind} limit {limit:e} at t = {t}")]
    Cfl {
        dt: f64,
        limit: f64,
        limit_kind: &'static str,
        t: f64,
    },
    #[error("non-finite {what} encountered")]
    NonFinite { what: &'static str },
    #[error("non-finite velocity at step {step} (t = {t})")]
    Blowup { step: usize, t: f64 },
    #[error("projection left divergence {divergence:e} above {tol:e} after {sweeps} sweeps")]
    ProjectionStalled { divergence: f64, tol: f64, sweeps: usize },
    #[error("projection matrix is singular for Fourier mode {mode}")]
    SingularProjection { mode: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

impl SolverError {
    /// Configuration problems as opposed to numerical failures.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            SolverError::Config(_)
                | SolverError::Field(FieldError::GridTooCoarse { .. })
                | SolverError::Field(FieldError::InvalidOuterRadius { .. })
                | SolverError::Field(FieldError::Geometry(_))
                | SolverError::Field(FieldError::Format(_))
                | SolverError::Field(FieldError::Csv(_))
                | SolverError::Field(FieldError::Io(_))
                | SolverError::Field(FieldError::ShapeMismatch { .. })
                | SolverError::Field(FieldError::StencilTooWide { .. })
                | SolverError::Ode(OdeError::CoriolisOffSphere { .. })
        )
    }
}
