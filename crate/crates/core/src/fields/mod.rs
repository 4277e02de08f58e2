//! Velocity fields on a polar annulus `δ ≤ r ≤ R` around the obstacle and the
//! frame-component operators acting on them.
//!
//! Components are taken in the orthonormal frame `e₁ = ∂_r`, `e₂ = (1/s)∂_θ`;
//! the same numbers describe the 1-form `u♭ = u_r e¹ + u_θ e²`.

mod boundary;
mod field;
mod grid;
mod io;
pub mod ops;

pub use boundary::{
    boundary_identity_residual, extract_boundary_coefficients, extract_boundary_coefficients_with,
    wall_convection_flux, IdentityOptions, IdentityReport, StencilOrders,
};
pub use field::{ScalarField, VelocityField, WallCondition};
pub use grid::{AnnulusGrid, GridSpec};
pub use io::{read_field_csv, write_field_csv, FieldDescriptor, FIELD_CSV_HEADER};
pub use ops::{
    convection_full, convection_tangential, divergence, hodge_star_1form, laplacian_normal, laplacian_normal_divfree,
    laplacian_tangential, pressure_gradient, pressure_gradient_identity, vector_laplacian, vorticity,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("grid needs at least 8 points per direction, got {nr}×{ntheta}")]
    GridTooCoarse { nr: usize, ntheta: usize },
    #[error("outer radius {outer} must exceed the obstacle radius {delta}")]
    InvalidOuterRadius { delta: f64, outer: f64 },
    #[error("field shape {found:?} does not match grid {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("wall stencil needs {need} radial points, grid has {nr}")]
    StencilTooWide { need: usize, nr: usize },
    #[error("invalid stencil orders {0:?}")]
    InvalidStencil(StencilOrders),
    #[error("θ index {j} out of range (ntheta = {ntheta})")]
    ThetaIndex { j: usize, ntheta: usize },
    #[error("wall condition violated by {defect:e} (tolerance {tol:e})")]
    WallCondition { defect: f64, tol: f64 },
    #[error("interior divergence {max:e} exceeds tolerance {tol:e}")]
    NotDivergenceFree { max: f64, tol: f64 },
    #[error("malformed field file: {0}")]
    Format(String),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Ode(#[from] crate::separation::OdeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
