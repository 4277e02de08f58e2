//! Boundary-layer separation on constant-curvature surfaces.
//!
//! * [`geometry`]: metric functions `s_a`, `c_a` and the boundary curvature `k`.
//! * [`fields`]: polar-grid velocity fields and the coordinate operators
//!   (divergence, vorticity, Laplacian components, convection, pressure gradient),
//!   wall-derivative extraction and the boundary identity check.
//! * [`separation`]: the scalar ODE for the wall shear, its integration,
//!   separation detection and profile classifiers.
//! * [`solver`]: Navier–Stokes on the annulus, recording the wall coefficients
//!   and the ODE residual at a monitored boundary point.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

pub mod fields;
pub mod geometry;
pub mod manufactured;
pub mod scalar;
pub mod separation;
pub mod solver;
pub mod stencil;
pub mod verification;

pub use scalar::Real;

pub type Manifold64 = geometry::Manifold<f64>;
pub type Obstacle64 = geometry::Obstacle<f64>;
pub type AnnulusGrid64 = fields::AnnulusGrid<f64>;
pub type GridSpec64 = fields::GridSpec<f64>;
pub type VelocityField64 = fields::VelocityField<f64>;
pub type ScalarField64 = fields::ScalarField<f64>;
pub type BoundaryCoefficients64 = separation::BoundaryCoefficients<f64>;
pub type OdeGeometry64 = separation::OdeGeometry<f64>;
pub type OdeTrace64 = separation::OdeTrace<f64>;
pub type CoefficientSchedule64 = separation::CoefficientSchedule<f64>;
pub type SolverConfig64 = solver::SolverConfig<f64>;
pub type SimulationRecord64 = solver::SimulationRecord<f64>;
