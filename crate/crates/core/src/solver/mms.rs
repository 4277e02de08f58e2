//! Method of manufactured solutions for the full momentum operator.

use serde::Serialize;

use super::config::SolverConfig;
use super::integrator::Solver;
use super::record::run_with_initial;
use super::SolverError;
use crate::fields::{AnnulusGrid, VelocityField};
use crate::manufactured::{exact, Manufactured, Metric, TimeFactor};
use crate::scalar::{lit, Real};
use crate::verification::OrderStudy;

/// Exact solution `τ(t)·U(r, θ)` with `U` divergence-free and meeting the
/// boundary data of the config.
#[derive(Debug, Clone)]
pub struct ManufacturedFlow<T> {
    pub field: Manufactured<T>,
    pub time: TimeFactor<T>,
}

/// Node samples of `U`, `∇_U U`, `ΔU` and `∗U`.
struct Pieces<T> {
    u: VelocityField<T>,
    conv: VelocityField<T>,
    lap: VelocityField<T>,
}

impl<T: Real> ManufacturedFlow<T> {
    /// The zero field.
    pub fn rest(m: crate::geometry::Manifold<T>, delta: T) -> Self {
        Self {
            field: Manufactured {
                manifold: m,
                ur: crate::manufactured::Separable::new(delta),
                utheta: crate::manufactured::Separable::new(delta),
            },
            time: TimeFactor::steady(),
        }
    }

    fn pieces(&self, g: &AnnulusGrid<T>) -> Pieces<T> {
        let mut u = VelocityField::zeros(g);
        let mut conv = VelocityField::zeros(g);
        let mut lap = VelocityField::zeros(g);
        for i in 0..g.nr {
            let metric = Metric::at(&g.manifold, g.r[i]);
            for j in 0..g.ntheta {
                let k = g.idx(i, j);
                let (a, b) = self.field.partials(g.r[i], g.theta[j]);
                u.ur[k] = a.v();
                u.utheta[k] = b.v();
                (conv.ur[k], conv.utheta[k]) = exact::convection(&metric, &a, &b);
                (lap.ur[k], lap.utheta[k]) = exact::hodge_laplacian(&metric, &a, &b);
            }
        }
        Pieces { u, conv, lap }
    }

    pub fn sample(&self, g: &AnnulusGrid<T>, t: T) -> VelocityField<T> {
        self.field.sample(g).scale(self.time.value(t))
    }
}

/// Final-time error of a forced run against the exact field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub nr: usize,
    pub ntheta: usize,
    pub h: f64,
    pub dt: f64,
    pub steps: usize,
    /// Max over all nodes of `|u − u_exact|` at `t_end`.
    pub max_error: f64,
    /// Largest interior divergence seen in the record.
    pub max_divergence: f64,
}

/// Runs `cfg` from the exact initial state with the forcing that makes
/// `flow` an exact solution of the continuous equations, and measures the
/// final error. The outer data in `cfg` must match `flow` at `R`.
pub fn manufactured_forcing_run<T: Real>(
    cfg: &SolverConfig<T>,
    flow: &ManufacturedFlow<T>,
) -> Result<ErrorReport, SolverError> {
    let solver = Solver::new(cfg)?;
    let g = &solver.grid;
    let p = flow.pieces(g);
    let ric = lit::<T>(2.0) * g.manifold.gaussian_curvature();
    let a = g.manifold.a;
    let beta = cfg.beta;
    let nt = g.ntheta;
    // f = τ'U + τ²∇_U U − τ(ΔU + 2κU) + τβ cos(ar) ∗U
    let forcing = |t: T| -> VelocityField<T> {
        let (tau, rate) = (flow.time.value(t), flow.time.rate(t));
        let mut f = VelocityField::zeros(g);
        for i in 0..g.nr {
            let cor = beta * (a * g.r[i]).cos();
            for k in i * nt..(i + 1) * nt {
                let (ur, ut) = (p.u.ur[k], p.u.utheta[k]);
                f.ur[k] = rate * ur + tau * tau * p.conv.ur[k] - tau * (p.lap.ur[k] + ric * ur) - tau * cor * ut;
                f.utheta[k] =
                    rate * ut + tau * tau * p.conv.utheta[k] - tau * (p.lap.utheta[k] + ric * ut) + tau * cor * ur;
            }
        }
        f
    };
    let u0 = flow.sample(g, T::zero());
    let rec = run_with_initial(cfg, &solver, u0, Some(&forcing))?;
    let exact_end = flow.sample(g, cfg.t_end);
    Ok(ErrorReport {
        nr: g.nr,
        ntheta: g.ntheta,
        h: g.hr.to_f64_lossy(),
        dt: rec.dt.to_f64_lossy(),
        steps: rec.steps.len() - 1,
        max_error: rec.final_field.max_abs_diff(&exact_end).to_f64_lossy(),
        max_divergence: rec.steps.iter().map(|s| s.divergence.to_f64_lossy()).fold(0.0, f64::max),
    })
}

/// Repeats [`manufactured_forcing_run`] on the `(nr, nθ)` levels with
/// `dt ∝ h²` (the stable diffusive step scaled by `dt_factor`).
pub fn manufactured_refinement<T: Real>(
    cfg: &SolverConfig<T>,
    flow: &ManufacturedFlow<T>,
    levels: &[(usize, usize)],
    dt_factor: T,
) -> Result<(OrderStudy, Vec<ErrorReport>), SolverError> {
    let mut reports = Vec::new();
    for &(nr, nt) in levels {
        let mut c = cfg.clone();
        c.grid.nr = nr;
        c.grid.ntheta = nt;
        let s = Solver::new(&c)?;
        c.dt = Some(dt_factor * s.diffusive_limit());
        reports.push(manufactured_forcing_run(&c, flow)?);
    }
    let study = OrderStudy::new(
        "manufactured_solver",
        reports.iter().map(|r| r.h).collect(),
        reports.iter().map(|r| r.max_error).collect(),
    );
    Ok((study, reports))
}
