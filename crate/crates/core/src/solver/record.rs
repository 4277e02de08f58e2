use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::SolverConfig;
use super::integrator::{kinetic_energy, Solver};
use super::SolverError;
use crate::fields::{
    boundary_identity_residual, divergence, extract_boundary_coefficients, IdentityOptions, VelocityField,
};
use crate::scalar::{lit, Real};
use crate::separation::{rhs_coriolis, BoundaryCoefficients};

pub const RECORD_CSV_HEADER: &str = "t,alpha1,alpha2,alpha3,eta,rhs,residual";

/// Wall data at `p₀` and diagnostics after one accepted step (row 0 is the initial state).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord<T> {
    pub t: T,
    pub coefficients: BoundaryCoefficients<T>,
    /// ODE right-hand side from the extracted coefficients.
    pub rhs: T,
    /// The same quantity assembled directly from the Laplacian and its derivatives.
    pub rhs_raw: T,
    /// `|dα₁/dt − rhs|`, filled in once the whole series is known.
    pub residual: T,
    pub energy: T,
    /// Interior divergence after the step.
    pub divergence: T,
    /// Wall pressure relation defect; `None` for the initial row.
    pub pressure_residual: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub step: usize,
    pub t: T,
    pub field: VelocityField<T>,
}

#[derive(Debug, Clone)]
pub struct SimulationRecord<T> {
    pub dt: T,
    pub steps: Vec<StepRecord<T>>,
    pub snapshots: Vec<Snapshot<T>>,
    pub final_field: VelocityField<T>,
}

impl<T: Real> SimulationRecord<T> {
    pub fn times(&self) -> Vec<T> {
        self.steps.iter().map(|s| s.t).collect()
    }

    pub fn max_residual(&self) -> T {
        self.steps.iter().map(|s| s.residual).fold(T::zero(), T::max)
    }

    /// Largest residual over records with `t ≥ from`.
    pub fn max_residual_after(&self, from: T) -> T {
        self.steps
            .iter()
            .filter(|s| s.t >= from)
            .map(|s| s.residual)
            .fold(T::zero(), T::max)
    }

    pub fn last(&self) -> &StepRecord<T> {
        self.steps.last().expect("a record always holds the initial row")
    }

    /// `t,alpha1,alpha2,alpha3,eta,rhs,residual` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: &mut W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "{RECORD_CSV_HEADER}")?;
        for s in &self.steps {
            let c = &s.coefficients;
            let row = [s.t, c.alpha1, c.alpha2, c.alpha3, c.eta, s.rhs, s.residual];
            let cells: Vec<String> = row.iter().map(|v| format!("{:.16e}", v.to_f64_lossy())).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// `t,energy,divergence,rhs_raw,pressure_residual`.
    pub fn write_diagnostics_csv<W: Write>(&self, out: &mut W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "t,energy,divergence,rhs_raw,pressure_residual")?;
        for s in &self.steps {
            let p = s.pressure_residual.map(|v| format!("{:.16e}", v.to_f64_lossy())).unwrap_or_default();
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{p}",
                s.t.to_f64_lossy(),
                s.energy.to_f64_lossy(),
                s.divergence.to_f64_lossy(),
                s.rhs_raw.to_f64_lossy()
            )?;
        }
        Ok(())
    }
}

/// Second-order derivative of a uniformly sampled series: centered inside,
/// one-sided three-point at both ends.
pub(crate) fn series_derivative<T: Real>(y: &[T], dt: T) -> Vec<T> {
    let n = y.len();
    if n < 2 {
        return vec![T::zero(); n];
    }
    if n == 2 {
        let d = (y[1] - y[0]) / dt;
        return vec![d, d];
    }
    let two = lit::<T>(2.0);
    let (three, four) = (lit::<T>(3.0), lit::<T>(4.0));
    let mut d = vec![T::zero(); n];
    d[0] = (-three * y[0] + four * y[1] - y[2]) / (two * dt);
    d[n - 1] = (three * y[n - 1] - four * y[n - 2] + y[n - 3]) / (two * dt);
    for i in 1..n - 1 {
        d[i] = (y[i + 1] - y[i - 1]) / (two * dt);
    }
    d
}

/// Runs `cfg` from its configured initial field; `base` resolves a field
/// descriptor path.
pub fn run<T: Real + serde::de::DeserializeOwned>(
    cfg: &SolverConfig<T>,
    base: &Path,
) -> Result<SimulationRecord<T>, SolverError> {
    let solver = Solver::new(cfg)?;
    let u0 = cfg.initial_field(&solver.grid, base)?;
    run_with_initial(cfg, &solver, u0, None)
}

/// Runs from `u0` with an optional body force `forcing(t)`.
pub fn run_with_initial<T: Real>(
    cfg: &SolverConfig<T>,
    solver: &Solver<T>,
    u0: VelocityField<T>,
    forcing: Option<&dyn Fn(T) -> VelocityField<T>>,
) -> Result<SimulationRecord<T>, SolverError> {
    let g = &solver.grid;
    let dt_max = cfg.dt.unwrap_or_else(|| solver.auto_dt(&u0));
    let nsteps = if cfg.t_end > T::zero() {
        (cfg.t_end / dt_max - lit::<T>(1e-9)).ceil().to_usize().unwrap_or(0).max(1)
    } else {
        0
    };
    let dt = if nsteps > 0 {
        cfg.t_end / T::from_usize_lossy(nsteps)
    } else {
        dt_max
    };
    let lambda0 = cfg.wall.lambda0();
    let with_inflow = lambda0 != T::zero() || cfg.beta != T::zero();
    let opts = IdentityOptions {
        boundary_tol: lit(1e-12),
        inflow: with_inflow.then_some((lambda0, cfg.beta)),
        ..IdentityOptions::default()
    };
    let j = cfg.p0_theta_index;

    let observe = |u: &VelocityField<T>, t: T, pressure_residual: Option<T>| -> Result<StepRecord<T>, SolverError> {
        let coefficients = extract_boundary_coefficients(u, g, j)?.with_inflow(lambda0, cfg.beta);
        let rhs = rhs_coriolis(&coefficients)?;
        let rhs_raw = boundary_identity_residual(u, g, j, &opts)?.raw;
        Ok(StepRecord {
            t,
            coefficients,
            rhs,
            rhs_raw,
            residual: T::zero(),
            energy: kinetic_energy(u, g),
            divergence: divergence(u, g)?.max_abs_rows(1..g.nr - 1),
            pressure_residual,
        })
    };

    let mut u = u0;
    u.check_shape(g)?;
    // the initial data only needs to be divergence-free up to truncation error
    u = solver.project(&u, T::one())?.0;
    let mut steps = vec![observe(&u, T::zero(), None)?];
    let mut snapshots = Vec::new();
    let snap = cfg.snapshot_every;
    if snap.is_some() {
        snapshots.push(Snapshot {
            step: 0,
            t: T::zero(),
            field: u.clone(),
        });
    }
    for n in 0..nsteps {
        let t = dt * T::from_usize_lossy(n);
        let out = solver.step_with(&u, t, dt, forcing).map_err(|e| match e {
            SolverError::NonFinite { .. } => SolverError::Blowup {
                step: n + 1,
                t: (t + dt).to_f64_lossy(),
            },
            other => other,
        })?;
        u = out.velocity;
        let t_next = dt * T::from_usize_lossy(n + 1);
        let pres = solver.pressure_boundary_residual(&u, &out.pressure)?;
        steps.push(observe(&u, t_next, Some(pres))?);
        if snap.is_some_and(|every| (n + 1) % every == 0) {
            snapshots.push(Snapshot {
                step: n + 1,
                t: t_next,
                field: u.clone(),
            });
        }
    }

    let alpha1: Vec<T> = steps.iter().map(|s| s.coefficients.alpha1).collect();
    let rate = series_derivative(&alpha1, dt);
    for (s, d) in steps.iter_mut().zip(rate) {
        s.residual = if nsteps > 0 { (d - s.rhs).abs() } else { T::zero() };
    }
    Ok(SimulationRecord {
        dt,
        steps,
        snapshots,
        final_field: u,
    })
}
