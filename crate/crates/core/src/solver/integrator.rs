use super::config::{OuterCondition, SolverConfig};
use super::projection::Projector;
use super::SolverError;
use crate::fields::ops::diff::{d_r, d_t};
use crate::fields::{convection_full, vector_laplacian, AnnulusGrid, ScalarField, VelocityField, WallCondition};
use crate::scalar::{lit, Real};

/// Result of one time step.
#[derive(Debug, Clone)]
pub struct StepOutput<T> {
    pub velocity: VelocityField<T>,
    /// Pressure consistent with the step, `½φ₁ + φ₂` of the two stages.
    pub pressure: ScalarField<T>,
}

/// Grid, boundary data and factored projection for one configuration.
#[derive(Debug)]
pub struct Solver<T> {
    pub grid: AnnulusGrid<T>,
    pub wall: WallCondition<T>,
    pub outer: OuterCondition<T>,
    pub beta: T,
    pub div_tol: T,
    /// `u_r(R)`: the wall flux `λ₀ s(δ)` spread over the outer circle.
    pub outer_ur: T,
    outer_ut: Vec<T>,
    coriolis: Vec<T>,
    projector: Projector,
    /// `min(hr, min_i s_i hθ)`.
    pub h_min: T,
}

impl<T: Real> Solver<T> {
    pub fn new(cfg: &SolverConfig<T>) -> Result<Self, SolverError> {
        cfg.validate()?;
        let grid = cfg.grid.build()?;
        let projector = Projector::new(&grid)?;
        let n = grid.nr;
        let outer_ur = cfg.wall.lambda0() * grid.s[0] / grid.s[n - 1];
        let outer_ut = match &cfg.outer {
            OuterCondition::PrescribedTangential { profile } => grid.theta.iter().map(|&t| profile.eval(t)).collect(),
            OuterCondition::StressFree => vec![T::zero(); grid.ntheta],
        };
        let a = grid.manifold.a;
        let coriolis = grid.r.iter().map(|&r| cfg.beta * (a * r).cos()).collect();
        let s_min = grid.s.iter().copied().fold(T::infinity(), T::min);
        let h_min = grid.hr.min(s_min * grid.htheta);
        Ok(Self {
            wall: cfg.wall,
            outer: cfg.outer.clone(),
            beta: cfg.beta,
            div_tol: cfg.div_tol,
            outer_ur,
            outer_ut,
            coriolis,
            projector,
            h_min,
            grid,
        })
    }

    /// `0.25 h²`.
    pub fn diffusive_limit(&self) -> T {
        lit::<T>(0.25) * self.h_min * self.h_min
    }

    /// `0.5 h / max|u|` (infinite at rest).
    pub fn advective_limit(&self, u: &VelocityField<T>) -> T {
        let v = u.max_speed();
        if v > T::zero() {
            lit::<T>(0.5) * self.h_min / v
        } else {
            T::infinity()
        }
    }

    /// Both stability bounds, reporting the first one `dt` violates.
    pub fn check_cfl(&self, u: &VelocityField<T>, dt: T, t: T) -> Result<(), SolverError> {
        let slack = T::one() + lit::<T>(1e-12);
        for (limit, kind) in [(self.diffusive_limit(), "diffusive"), (self.advective_limit(u), "advective")] {
            if dt > limit * slack {
                return Err(SolverError::Cfl {
                    dt: dt.to_f64_lossy(),
                    limit: limit.to_f64_lossy(),
                    limit_kind: kind,
                    t: t.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }

    /// 90 % of the tighter stability bound for `u`.
    pub fn auto_dt(&self, u: &VelocityField<T>) -> T {
        lit::<T>(0.9) * self.diffusive_limit().min(self.advective_limit(u))
    }

    /// `−∇_u u + Δu + 2κu − β cos(ar) ∗u`, the velocity tendency without pressure.
    pub fn tendency(&self, u: &VelocityField<T>) -> Result<VelocityField<T>, SolverError> {
        let g = &self.grid;
        let conv = convection_full(u, g)?;
        let mut out = vector_laplacian(u, g)?;
        let ric = lit::<T>(2.0) * g.manifold.gaussian_curvature();
        let nt = g.ntheta;
        for i in 0..g.nr {
            let b = self.coriolis[i];
            for k in i * nt..(i + 1) * nt {
                let (ur, ut) = (u.ur[k], u.utheta[k]);
                // ∗u = (−u_θ, u_r)
                out.ur[k] = out.ur[k] - conv.ur[k] + ric * ur + b * ut;
                out.utheta[k] = out.utheta[k] - conv.utheta[k] + ric * ut - b * ur;
            }
        }
        Ok(out)
    }

    fn impose_dirichlet(&self, u: &mut VelocityField<T>) {
        u.impose_wall(&self.wall);
        let g = &self.grid;
        let base = (g.nr - 1) * g.ntheta;
        for j in 0..g.ntheta {
            u.ur[base + j] = self.outer_ur;
            if let OuterCondition::PrescribedTangential { .. } = self.outer {
                u.utheta[base + j] = self.outer_ut[j];
            }
        }
    }

    /// Stress-free outer row from the two interior rows, after projection.
    fn impose_stress_free(&self, u: &mut VelocityField<T>) {
        if let OuterCondition::StressFree = self.outer {
            let g = &self.grid;
            let (n, nt) = (g.nr, g.ntheta);
            let h = g.hr;
            let denom = lit::<T>(3.0) - lit::<T>(2.0) * h * g.c[n - 1] / g.s[n - 1];
            for j in 0..nt {
                let k = (n - 1) * nt + j;
                u.utheta[k] = (lit::<T>(4.0) * u.utheta[k - nt] - u.utheta[k - 2 * nt]) / denom;
            }
        }
    }

    /// Imposes the boundary rows and projects; returns `ψ/dt`.
    fn close(&self, u: &mut VelocityField<T>, dt: T) -> Result<Vec<T>, SolverError> {
        self.impose_dirichlet(u);
        let psi = self.projector.project(&self.grid, u, self.div_tol)?;
        self.impose_stress_free(u);
        let inv = T::one() / dt;
        Ok(psi.into_iter().map(|p| lit::<T>(p) * inv).collect())
    }

    /// One Heun step of size `dt` from time `t`. `forcing(t)` is added to the
    /// tendency at both stages.
    pub fn step_with(
        &self,
        u: &VelocityField<T>,
        t: T,
        dt: T,
        forcing: Option<&dyn Fn(T) -> VelocityField<T>>,
    ) -> Result<StepOutput<T>, SolverError> {
        u.check_shape(&self.grid)?;
        if u.first_non_finite().is_some() {
            return Err(SolverError::NonFinite { what: "velocity" });
        }
        self.check_cfl(u, dt, t)?;
        let rate = |v: &VelocityField<T>, time: T| -> Result<VelocityField<T>, SolverError> {
            let mut f = self.tendency(v)?;
            if let Some(src) = forcing {
                f = f.axpy(T::one(), &src(time));
            }
            Ok(f)
        };
        let half = lit::<T>(0.5);
        let mut u1 = u.axpy(dt, &rate(u, t)?);
        let phi1 = self.close(&mut u1, dt)?;
        let mut u2 = u.scale(half).axpy(half, &u1.axpy(dt, &rate(&u1, t + dt)?));
        let phi2 = self.close(&mut u2, dt)?;
        if u2.first_non_finite().is_some() {
            return Err(SolverError::NonFinite { what: "velocity" });
        }
        let pressure = ScalarField {
            nr: self.grid.nr,
            ntheta: self.grid.ntheta,
            values: phi1.iter().zip(&phi2).map(|(&a, &b)| half * a + b).collect(),
        };
        Ok(StepOutput { velocity: u2, pressure })
    }

    /// Projection of an arbitrary tentative field with the configured
    /// boundary rows; returns the projected field and `φ` with
    /// `u = tentative − dt·∇φ` in the interior.
    pub fn project(&self, tentative: &VelocityField<T>, dt: T) -> Result<(VelocityField<T>, ScalarField<T>), SolverError> {
        tentative.check_shape(&self.grid)?;
        if tentative.first_non_finite().is_some() {
            return Err(SolverError::NonFinite { what: "tentative velocity" });
        }
        let mut u = tentative.clone();
        let phi = self.close(&mut u, dt)?;
        Ok((
            u,
            ScalarField {
                nr: self.grid.nr,
                ntheta: self.grid.ntheta,
                values: phi,
            },
        ))
    }

    /// `max_j |(1/s)∂_θ p − g(Δu,e₂) + λ₀∂_r u_θ + β cos(aδ) λ₀|` on the wall.
    pub fn pressure_boundary_residual(&self, u: &VelocityField<T>, p: &ScalarField<T>) -> Result<T, SolverError> {
        let g = &self.grid;
        p.check_shape(g)?;
        let lap = vector_laplacian(u, g)?;
        let ut_r = d_r(g, &u.utheta);
        let pt = d_t(g, &p.values);
        let lambda0 = self.wall.lambda0();
        let cor = self.coriolis[0] * lambda0;
        let s = g.s[0];
        Ok((0..g.ntheta)
            .map(|j| (pt[j] / s - lap.utheta[j] + lambda0 * ut_r[j] + cor).abs())
            .fold(T::zero(), T::max))
    }
}

/// One step of size `cfg.dt` (or the automatic step) from `t = 0` with no forcing.
pub fn step<T: Real>(state: &VelocityField<T>, cfg: &SolverConfig<T>) -> Result<VelocityField<T>, SolverError> {
    let solver = Solver::new(cfg)?;
    let dt = cfg.dt.unwrap_or_else(|| solver.auto_dt(state));
    Ok(solver.step_with(state, T::zero(), dt, None)?.velocity)
}

/// Projects `tentative` with step `dt` (`cfg.dt` when `None`, else 1).
pub fn pressure_projection<T: Real>(
    tentative: &VelocityField<T>,
    cfg: &SolverConfig<T>,
) -> Result<(VelocityField<T>, ScalarField<T>), SolverError> {
    let solver = Solver::new(cfg)?;
    solver.project(tentative, cfg.dt.unwrap_or(T::one()))
}

/// See [`Solver::pressure_boundary_residual`].
pub fn pressure_boundary_residual<T: Real>(
    state: &VelocityField<T>,
    pressure: &ScalarField<T>,
    cfg: &SolverConfig<T>,
) -> Result<T, SolverError> {
    Solver::new(cfg)?.pressure_boundary_residual(state, pressure)
}

/// `½ ∫ |u|² dA` with the trapezoidal rule in `r` and the `s dr dθ` area element.
pub fn kinetic_energy<T: Real>(u: &VelocityField<T>, g: &AnnulusGrid<T>) -> T {
    let nt = g.ntheta;
    let mut e = T::zero();
    for i in 0..g.nr {
        let w = if i == 0 || i == g.nr - 1 { lit::<T>(0.5) } else { T::one() };
        let row: T = (i * nt..(i + 1) * nt)
            .map(|k| u.ur[k] * u.ur[k] + u.utheta[k] * u.utheta[k])
            .sum();
        e = e + w * g.s[i] * row;
    }
    lit::<T>(0.5) * e * g.hr * g.htheta
}
