use serde::Serialize;

use super::{asymptotic_fixed_point, detect_separation, integrate, CoefficientSchedule, OdeError, OdeGeometry, OdeMode};
use crate::scalar::{lit, Real};

/// Result of integrating one `(λ₀, β)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepCell<T> {
    pub lambda0: T,
    pub beta: T,
    /// First zero of `α₁`, `None` if it stays positive up to `t_end`.
    pub t0: Option<T>,
    /// Long-time limit for constant schedules with `k(k+λ₀) > 0`.
    pub alpha1_star: Option<T>,
    pub min_alpha1: T,
    /// `λ₀ β (a sin aδ − k cos aδ)`.
    pub forcing: T,
    /// Largest `|(2k−λ₀)α₂ + α₃ + 2η|` over the sampled times.
    pub other_terms: T,
}

impl<T: Real> SweepCell<T> {
    /// Constant forcing at least twice every other `α₁`-independent term.
    pub fn forcing_dominates(&self) -> bool {
        self.forcing > lit::<T>(2.0) * self.other_terms
    }
}

/// Integrates the Coriolis form of the ODE with `geom`'s `λ₀, β` replaced by the cell values.
pub fn sweep_cell<T: Real>(
    geom: &OdeGeometry<T>,
    lambda0: T,
    beta: T,
    sched: &CoefficientSchedule<T>,
    alpha1_0: T,
    t_end: T,
    dt: T,
) -> Result<SweepCell<T>, OdeError> {
    let g = geom.with_inflow(lambda0, beta);
    let trace = integrate(OdeMode::Coriolis, alpha1_0, sched, &g, t_end, dt)?;
    let two = lit::<T>(2.0);
    let mut other = T::zero();
    for &t in &trace.times {
        let (a2, a3, eta) = sched.eval(t)?;
        other = other.max(((two * g.k - lambda0) * a2 + a3 + two * eta).abs());
    }
    let alpha1_star = match sched.constant_values() {
        Some((a2, a3, eta)) => asymptotic_fixed_point(OdeMode::Coriolis, &g, a2, a3, eta).ok(),
        None => None,
    };
    Ok(SweepCell {
        lambda0,
        beta,
        t0: detect_separation(&trace),
        alpha1_star,
        min_alpha1: trace.min_alpha1().unwrap_or(alpha1_0),
        forcing: g.coriolis_forcing(),
        other_terms: other,
    })
}
