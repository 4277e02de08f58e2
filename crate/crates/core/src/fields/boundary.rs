//! Wall derivatives at `r = δ` and the check that the raw vorticity-flux
//! integrand collapses to the right-hand side of the separation ODE.

use serde::{Deserialize, Serialize};

use super::ops::divergence;
use super::{AnnulusGrid, FieldError, VelocityField};
use crate::scalar::{lit, Real};
use crate::separation::{rhs_coriolis, rhs_plain, BoundaryCoefficients, OdeGeometry};
use crate::stencil::{centered_weights, forward_weights};

/// Accuracy orders of the one-sided radial stencils used at the wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StencilOrders {
    pub first: usize,
    pub second: usize,
    pub third: usize,
    /// Order of the centered θ-differences taken along the wall.
    pub theta: usize,
}

impl Default for StencilOrders {
    fn default() -> Self {
        Self {
            first: 4,
            second: 4,
            third: 2,
            theta: 4,
        }
    }
}

impl StencilOrders {
    fn points(&self) -> usize {
        (1 + self.first).max(2 + self.second).max(3 + self.third)
    }

    fn validate(&self) -> Result<(), FieldError> {
        let ok = [self.first, self.second, self.third].iter().all(|&o| o >= 1)
            && self.theta >= 2
            && self.theta % 2 == 0;
        if ok {
            Ok(())
        } else {
            Err(FieldError::InvalidStencil(*self))
        }
    }
}

/// Radial derivatives `∂^d_r f(δ, θ_j)` for `d = 0..=3` at every θ node.
struct WallJet<T> {
    d: [Vec<T>; 4],
}

impl<T: Real> WallJet<T> {
    fn new(g: &AnnulusGrid<T>, f: &[T], orders: &StencilOrders) -> Self {
        let nt = g.ntheta;
        let stencils: [Vec<T>; 3] = [
            forward_weights(1, orders.first),
            forward_weights(2, orders.second),
            forward_weights(3, orders.third),
        ];
        let mut d: [Vec<T>; 4] = std::array::from_fn(|_| vec![T::zero(); nt]);
        d[0].copy_from_slice(&f[..nt]);
        let mut hpow = T::one();
        for (order, w) in stencils.iter().enumerate() {
            hpow = hpow * g.hr;
            for j in 0..nt {
                let acc = w.iter().enumerate().fold(T::zero(), |acc, (i, &wi)| acc + wi * f[i * nt + j]);
                d[order + 1][j] = acc / hpow;
            }
        }
        Self { d }
    }
}

fn check_rows<T: Real>(g: &AnnulusGrid<T>, orders: &StencilOrders) -> Result<(), FieldError> {
    orders.validate()?;
    let need = orders.points();
    if g.nr < need {
        return Err(FieldError::StencilTooWide { need, nr: g.nr });
    }
    Ok(())
}

fn check_theta<T: Real>(g: &AnnulusGrid<T>, j: usize) -> Result<(), FieldError> {
    if j >= g.ntheta {
        return Err(FieldError::ThetaIndex { j, ntheta: g.ntheta });
    }
    Ok(())
}

/// Centered θ-derivative of order `deriv` of the periodic wall data `v` at node `j`.
fn theta_deriv<T: Real>(g: &AnnulusGrid<T>, v: &[T], j: usize, deriv: usize, accuracy: usize) -> T {
    let w = centered_weights::<T>(deriv, accuracy);
    let n = g.ntheta as isize;
    let p = (w.len() / 2) as isize;
    let acc = w.iter().enumerate().fold(T::zero(), |acc, (k, &wk)| {
        let jj = (j as isize + k as isize - p).rem_euclid(n) as usize;
        acc + wk * v[jj]
    });
    acc / g.htheta.powi(deriv as i32)
}

/// `α₁, α₂, α₃, η` at `(δ, θ_j)` with the default stencil orders.
pub fn extract_boundary_coefficients<T: Real>(
    f: &VelocityField<T>,
    g: &AnnulusGrid<T>,
    j: usize,
) -> Result<BoundaryCoefficients<T>, FieldError> {
    extract_boundary_coefficients_with(f, g, j, &StencilOrders::default())
}

/// As [`extract_boundary_coefficients`] with explicit stencil accuracy orders.
pub fn extract_boundary_coefficients_with<T: Real>(
    f: &VelocityField<T>,
    g: &AnnulusGrid<T>,
    j: usize,
    orders: &StencilOrders,
) -> Result<BoundaryCoefficients<T>, FieldError> {
    f.check_shape(g)?;
    check_theta(g, j)?;
    check_rows(g, orders)?;
    let jet = WallJet::new(g, &f.utheta, orders);
    coefficients_from_jet(g, &jet, j, orders.theta)
}

fn coefficients_from_jet<T: Real>(
    g: &AnnulusGrid<T>,
    jet: &WallJet<T>,
    j: usize,
    theta_order: usize,
) -> Result<BoundaryCoefficients<T>, FieldError> {
    let geom = OdeGeometry::new(&g.manifold, &g.obstacle)?;
    let s = g.s[0];
    let eta = theta_deriv(g, &jet.d[1], j, 2, theta_order) / (s * s);
    Ok(geom.coefficients(jet.d[1][j], jet.d[2][j], jet.d[3][j], eta))
}

/// Preconditions and variant of [`boundary_identity_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityOptions<T> {
    /// Allowed deviation of the wall values from the wall condition.
    pub boundary_tol: T,
    /// Allowed interior discrete divergence; `None` skips the check.
    pub div_tol: Option<T>,
    /// `(λ₀, β)`: inflow speed and Coriolis parameter. `None` means no-slip.
    pub inflow: Option<(T, T)>,
    pub orders: StencilOrders,
}

impl<T: Real> Default for IdentityOptions<T> {
    fn default() -> Self {
        Self {
            boundary_tol: lit(1e-12),
            div_tol: None,
            inflow: None,
            orders: StencilOrders::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport<T> {
    /// Raw integrand assembled from the Laplacian components and their derivatives.
    pub raw: T,
    /// ODE right-hand side built from the extracted coefficients.
    pub simplified: T,
    /// `raw − simplified`.
    pub residual: T,
    /// `(1/s)∂_θ g(Δu, e¹) − (1/s)∂_θ∂²_r u_r` at the wall.
    pub deltae3_gap: T,
    pub coefficients: BoundaryCoefficients<T>,
}

/// Evaluates at `(δ, θ_j)` both the raw integrand
///
/// ```text
/// ∂_r g(Δu,e²) − (1/s)∂_θ g(Δu,e¹) + (c/s) g(Δu,e²) + 2κ ∂_r u_θ
/// ```
///
/// (κ the Gaussian curvature) and `rhs_plain` of the extracted coefficients,
/// returning their difference. With `inflow = Some((λ₀, β))` the raw form
/// gains `−(c/s)λ₀(∂_r u_θ + β cos aδ) − λ₀∂²_r u_θ + aβλ₀ sin aδ` and is
/// compared with `rhs_coriolis`.
///
/// `∂_r g(Δu,e²)` is expanded by the product rule so that only radial wall
/// derivatives of `u_r`, `u_θ` and θ-differences of them enter.
pub fn boundary_identity_residual<T: Real>(
    f: &VelocityField<T>,
    g: &AnnulusGrid<T>,
    j: usize,
    opts: &IdentityOptions<T>,
) -> Result<IdentityReport<T>, FieldError> {
    f.check_shape(g)?;
    check_theta(g, j)?;
    check_rows(g, &opts.orders)?;

    let (lambda0, beta) = opts.inflow.unwrap_or((T::zero(), T::zero()));
    let wall_ur = (0..g.ntheta).fold(T::zero(), |m, jj| m.max((f.ur[jj] - lambda0).abs()));
    let wall_ut = (0..g.ntheta).fold(T::zero(), |m, jj| m.max(f.utheta[jj].abs()));
    let defect = wall_ur.max(wall_ut);
    if !(defect <= opts.boundary_tol) {
        return Err(FieldError::WallCondition {
            defect: defect.to_f64_lossy(),
            tol: opts.boundary_tol.to_f64_lossy(),
        });
    }
    if let Some(tol) = opts.div_tol {
        let div = divergence(f, g)?.max_abs_rows(1..g.nr - 1);
        if !(div <= tol) {
            return Err(FieldError::NotDivergenceFree {
                max: div.to_f64_lossy(),
                tol: tol.to_f64_lossy(),
            });
        }
    }

    let ut = WallJet::new(g, &f.utheta, &opts.orders);
    let ur = WallJet::new(g, &f.ur, &opts.orders);
    let m = &g.manifold;
    let kappa = m.gaussian_curvature();
    let two = lit::<T>(2.0);
    let (s, c) = (g.s[0], g.c[0]);
    let (s2, s3) = (s * s, s * s * s);

    let u0 = ut.d[0][j];
    let u1 = ut.d[1][j];
    let u2 = ut.d[2][j];
    let u3 = ut.d[3][j];
    let dth = |v: &[T], d: usize| theta_deriv(g, v, j, d, opts.orders.theta);
    let r0_t = dth(&ur.d[0], 1);
    let r1_t = dth(&ur.d[1], 1);
    let r2_t = dth(&ur.d[2], 1);
    let r0_ttt = dth(&ur.d[0], 3);
    let u0_tt = dth(&ut.d[0], 2);
    let u1_tt = dth(&ut.d[1], 2);

    // g(Δu, e²) and its radial derivative; (c/s)' = −1/s², (c/s²)' = −(κs² + 2c²)/s³
    let e2 = -u0 / s2 + c / s * u1 + u2 + c / s2 * r0_t - r1_t / s;
    let d_cs2 = -(kappa * s2 + two * c * c) / s3;
    let e2_r = -u1 / s2 + two * c * u0 / s3 - u1 / s2 + c / s * u2 + u3 + d_cs2 * r0_t + two * c / s2 * r1_t
        - r2_t / s;
    // ∂_θ g(Δu, e¹)
    let e1_t = (r0_ttt - c * u0_tt - s * u1_tt) / s2;

    let mut raw = e2_r - e1_t / s + c / s * e2 + two * kappa * u1;
    let deltae3_gap = e1_t / s - r2_t / s;

    let coefficients = coefficients_from_jet(g, &ut, j, opts.orders.theta)?;
    let simplified = if opts.inflow.is_some() {
        let ad = m.a * g.delta();
        raw = raw - c / s * lambda0 * (u1 + beta * ad.cos()) - lambda0 * u2 + m.a * beta * lambda0 * ad.sin();
        rhs_coriolis(&coefficients.with_inflow(lambda0, beta))?
    } else {
        rhs_plain(&coefficients)
    };

    Ok(IdentityReport {
        raw,
        simplified,
        residual: raw - simplified,
        deltae3_gap,
        coefficients: coefficients.with_inflow(lambda0, beta),
    })
}

/// Radial derivative of `g(∇_u u, e₂)` at `(δ, θ_j)`, from the grid operator.
pub fn wall_convection_flux<T: Real>(
    f: &VelocityField<T>,
    g: &AnnulusGrid<T>,
    j: usize,
) -> Result<T, FieldError> {
    check_theta(g, j)?;
    let conv = super::ops::convection_tangential(f, g)?;
    let w = forward_weights::<T>(1, 4);
    let col: Vec<T> = (0..w.len()).map(|i| conv.values[g.idx(i, j)]).collect();
    Ok(w.iter().zip(&col).fold(T::zero(), |a, (&wi, &v)| a + wi * v) / g.hr)
}
