//! Coordinate operators on the annulus grid.
//!
//! Interior derivatives are centered second-order differences; the two
//! radial end rows use one-sided second-order stencils and θ wraps around.

use super::{AnnulusGrid, FieldError, ScalarField, VelocityField};
use crate::scalar::{lit, Real};

/// Finite-difference derivatives of node data stored row-major (θ fastest).
pub mod diff {
    use super::*;

    /// `∂_r f`.
    pub fn d_r<T: Real>(g: &AnnulusGrid<T>, f: &[T]) -> Vec<T> {
        let (nr, nt) = (g.nr, g.ntheta);
        let mut out = vec![T::zero(); f.len()];
        let inv2h = T::one() / (lit::<T>(2.0) * g.hr);
        let (three, four) = (lit::<T>(3.0), lit::<T>(4.0));
        for j in 0..nt {
            out[j] = (-three * f[j] + four * f[nt + j] - f[2 * nt + j]) * inv2h;
            let l = (nr - 1) * nt + j;
            out[l] = (three * f[l] - four * f[l - nt] + f[l - 2 * nt]) * inv2h;
        }
        for i in 1..nr - 1 {
            for j in 0..nt {
                let k = i * nt + j;
                out[k] = (f[k + nt] - f[k - nt]) * inv2h;
            }
        }
        out
    }

    /// `∂²_r f`.
    pub fn d_rr<T: Real>(g: &AnnulusGrid<T>, f: &[T]) -> Vec<T> {
        let (nr, nt) = (g.nr, g.ntheta);
        let mut out = vec![T::zero(); f.len()];
        let inv = T::one() / (g.hr * g.hr);
        let (two, four, five) = (lit::<T>(2.0), lit::<T>(4.0), lit::<T>(5.0));
        for j in 0..nt {
            out[j] = (two * f[j] - five * f[nt + j] + four * f[2 * nt + j] - f[3 * nt + j]) * inv;
            let l = (nr - 1) * nt + j;
            out[l] = (two * f[l] - five * f[l - nt] + four * f[l - 2 * nt] - f[l - 3 * nt]) * inv;
        }
        for i in 1..nr - 1 {
            for j in 0..nt {
                let k = i * nt + j;
                out[k] = (f[k + nt] - two * f[k] + f[k - nt]) * inv;
            }
        }
        out
    }

    /// `∂_θ f`, periodic.
    pub fn d_t<T: Real>(g: &AnnulusGrid<T>, f: &[T]) -> Vec<T> {
        let nt = g.ntheta;
        let inv2h = T::one() / (lit::<T>(2.0) * g.htheta);
        let mut out = vec![T::zero(); f.len()];
        for (row_in, row_out) in f.chunks_exact(nt).zip(out.chunks_exact_mut(nt)) {
            for j in 0..nt {
                let jp = if j + 1 == nt { 0 } else { j + 1 };
                let jm = if j == 0 { nt - 1 } else { j - 1 };
                row_out[j] = (row_in[jp] - row_in[jm]) * inv2h;
            }
        }
        out
    }

    /// `∂²_θ f`, periodic.
    pub fn d_tt<T: Real>(g: &AnnulusGrid<T>, f: &[T]) -> Vec<T> {
        let nt = g.ntheta;
        let inv = T::one() / (g.htheta * g.htheta);
        let two = lit::<T>(2.0);
        let mut out = vec![T::zero(); f.len()];
        for (row_in, row_out) in f.chunks_exact(nt).zip(out.chunks_exact_mut(nt)) {
            for j in 0..nt {
                let jp = if j + 1 == nt { 0 } else { j + 1 };
                let jm = if j == 0 { nt - 1 } else { j - 1 };
                row_out[j] = (row_in[jp] - two * row_in[j] + row_in[jm]) * inv;
            }
        }
        out
    }

    /// `∂_r ∂_θ f`.
    pub fn d_rt<T: Real>(g: &AnnulusGrid<T>, f: &[T]) -> Vec<T> {
        d_r(g, &d_t(g, f))
    }

    /// Multiplies row `i` by `w[i]`.
    pub fn scale_rows<T: Real>(g: &AnnulusGrid<T>, w: &[T], f: &[T]) -> Vec<T> {
        f.chunks_exact(g.ntheta)
            .zip(w)
            .flat_map(|(row, &wi)| row.iter().map(move |&v| wi * v))
            .collect()
    }
}

use diff::{d_r, d_rr, d_rt, d_t, d_tt};

fn scalar<T: Real>(g: &AnnulusGrid<T>, values: Vec<T>) -> ScalarField<T> {
    ScalarField {
        nr: g.nr,
        ntheta: g.ntheta,
        values,
    }
}

/// Applies `f(i, k)` at every node `k` of row `i`.
fn per_node<T: Real>(g: &AnnulusGrid<T>, mut f: impl FnMut(usize, usize) -> T) -> Vec<T> {
    let mut out = Vec::with_capacity(g.len());
    for i in 0..g.nr {
        for j in 0..g.ntheta {
            out.push(f(i, i * g.ntheta + j));
        }
    }
    out
}

/// `(1/s)(∂_r(s u_r) + ∂_θ u_θ)`; the flux `s u_r` is differenced as a whole.
pub fn divergence<T: Real>(f: &VelocityField<T>, g: &AnnulusGrid<T>) -> Result<ScalarField<T>, FieldError> {
    f.check_shape(g)?;
    let flux = d_r(g, &diff::scale_rows(g, &g.s, &f.ur));
    let dt = d_t(g, &f.utheta);
    Ok(scalar(g, per_node(g, |i, k| (flux[k] + dt[k]) / g.s[i])))
}

/// `∗du = (1/s)(∂_r(s u_θ) − ∂_θ u_r)`.
pub fn vorticity<T: Real>(f: &VelocityField<T>, g: &AnnulusGrid<T>) -> Result<ScalarField<T>, FieldError> {
    f.check_shape(g)?;
    let flux = d_r(g, &diff::scale_rows(g, &g.s, &f.utheta));
    let dt = d_t(g, &f.ur);
    Ok(scalar(g, per_node(g, |i, k| (flux[k] - dt[k]) / g.s[i])))
}

/// `(u_r, u_θ) ↦ (−u_θ, u_r)`, i.e. `∗e¹ = e²`, `∗e² = −e¹`.
pub fn hodge_star_1form<T: Real>(f: &VelocityField<T>) -> VelocityField<T> {
    VelocityField {
        nr: f.nr,
        ntheta: f.ntheta,
        ur: f.utheta.iter().map(|&v| -v).collect(),
        utheta: f.ur.clone(),
    }
}

/// `g(Δu, e¹) = (1/s²)(∂²_θ u_r − c ∂_θ u_θ − s ∂_r∂_θ u_θ)`.
pub fn laplacian_normal<T: Real>(f: &VelocityField<T>, g: &AnnulusGrid<T>) -> Result<ScalarField<T>, FieldError> {
    f.check_shape(g)?;
    let ur_tt = d_tt(g, &f.ur);
    let ut_t = d_t(g, &f.utheta);
    let ut_rt = d_rt(g, &f.utheta);
    Ok(scalar(
        g,
        per_node(g, |i, k| {
            let (s, c) = (g.s[i], g.c[i]);
            (ur_tt[k] - c * ut_t[k] - s * ut_rt[k]) / (s * s)
        }),
    ))
}

/// The normal Laplacian component rewritten for divergence-free fields:
/// `(1/s²)∂²_θ u_r − (c/s²)∂_θ u_θ − κ u_r + 2(c/s)∂_r u_r + ∂²_r u_r`
/// with `κ` the Gaussian curvature (the `∓a²` term).
pub fn laplacian_normal_divfree<T: Real>(
    f: &VelocityField<T>,
    g: &AnnulusGrid<T>,
) -> Result<ScalarField<T>, FieldError> {
    f.check_shape(g)?;
    let kappa = g.manifold.gaussian_curvature();
    let two = lit::<T>(2.0);
    let ur_tt = d_tt(g, &f.ur);
    let ut_t = d_t(g, &f.utheta);
    let ur_r = d_r(g, &f.ur);
    let ur_rr = d_rr(g, &f.ur);
    Ok(scalar(
        g,
        per_node(g, |i, k| {
            let (s, c) = (g.s[i], g.c[i]);
            ur_tt[k] / (s * s) - c * ut_t[k] / (s * s) - kappa * f.ur[k] + two * c / s * ur_r[k] + ur_rr[k]
        }),
    ))
}

/// `g(Δu, e²) = −u_θ/s² + (c/s)∂_r u_θ + ∂²_r u_θ + (c/s²)∂_θ u_r − (1/s)∂_r∂_θ u_r`.
pub fn laplacian_tangential<T: Real>(
    f: &VelocityField<T>,
    g: &AnnulusGrid<T>,
) -> Result<ScalarField<T>, FieldError> {
    f.check_shape(g)?;
    let ut_r = d_r(g, &f.utheta);
    let ut_rr = d_rr(g, &f.utheta);
    let ur_t = d_t(g, &f.ur);
    let ur_rt = d_rt(g, &f.ur);
    Ok(scalar(
        g,
        per_node(g, |i, k| {
            let (s, c) = (g.s[i], g.c[i]);
            -f.utheta[k] / (s * s) + c / s * ut_r[k] + ut_rr[k] + c / (s * s) * ur_t[k] - ur_rt[k] / s
        }),
    ))
}

/// Hodge Laplacian `−(dd* + d*d)` on 1-forms, both frame components.
///
/// Agrees with [`laplacian_normal`] / [`laplacian_tangential`] on
/// divergence-free fields; unlike them it is dissipative for every field,
/// which is why the solver uses it.
pub fn vector_laplacian<T: Real>(f: &VelocityField<T>, g: &AnnulusGrid<T>) -> Result<VelocityField<T>, FieldError> {
    f.check_shape(g)?;
    let kappa = g.manifold.gaussian_curvature();
    let two = lit::<T>(2.0);
    let d = |v: &[T]| (d_r(g, v), d_rr(g, v), d_t(g, v), d_tt(g, v));
    let (ur_r, ur_rr, ur_t, ur_tt) = d(&f.ur);
    let (ut_r, ut_rr, ut_t, ut_tt) = d(&f.utheta);
    let mut out = VelocityField::zeros(g);
    for i in 0..g.nr {
        let (s, c) = (g.s[i], g.c[i]);
        let k_s = c / s;
        // (c/s)' = −κ − c²/s²
        let dk = -kappa - k_s * k_s;
        let inv_s2 = T::one() / (s * s);
        for j in 0..g.ntheta {
            let k = g.idx(i, j);
            out.ur[k] = inv_s2 * ur_tt[k] - two * c * inv_s2 * ut_t[k] + dk * f.ur[k] + k_s * ur_r[k] + ur_rr[k];
            out.utheta[k] =
                dk * f.utheta[k] + k_s * ut_r[k] + ut_rr[k] + two * c * inv_s2 * ur_t[k] + inv_s2 * ut_tt[k];
        }
    }
    Ok(out)
}

/// `g(∇_u u, e₂) = u_r ∂_r u_θ + u_θ u_r c/s + (1/s) u_θ ∂_θ u_θ`.
pub fn convection_tangential<T: Real>(
    f: &VelocityField<T>,
    g: &AnnulusGrid<T>,
) -> Result<ScalarField<T>, FieldError> {
    f.check_shape(g)?;
    let ut_r = d_r(g, &f.utheta);
    let ut_t = d_t(g, &f.utheta);
    Ok(scalar(
        g,
        per_node(g, |i, k| {
            let (s, c) = (g.s[i], g.c[i]);
            let (a, b) = (f.ur[k], f.utheta[k]);
            a * ut_r[k] + b * a * c / s + b * ut_t[k] / s
        }),
    ))
}

/// Both components of `∇_u u`; the normal one is
/// `u_r ∂_r u_r + (1/s) u_θ ∂_θ u_r − (c/s) u_θ²`.
pub fn convection_full<T: Real>(f: &VelocityField<T>, g: &AnnulusGrid<T>) -> Result<VelocityField<T>, FieldError> {
    f.check_shape(g)?;
    let ur_r = d_r(g, &f.ur);
    let ur_t = d_t(g, &f.ur);
    let tangential = convection_tangential(f, g)?;
    let normal = per_node(g, |i, k| {
        let (s, c) = (g.s[i], g.c[i]);
        let (a, b) = (f.ur[k], f.utheta[k]);
        a * ur_r[k] + b * ur_t[k] / s - c / s * b * b
    });
    Ok(VelocityField {
        nr: g.nr,
        ntheta: g.ntheta,
        ur: normal,
        utheta: tangential.values,
    })
}

/// `∇p = ∂_r p e₁ + (1/s) ∂_θ p e₂`.
pub fn pressure_gradient<T: Real>(p: &ScalarField<T>, g: &AnnulusGrid<T>) -> Result<VelocityField<T>, FieldError> {
    p.check_shape(g)?;
    let pr = d_r(g, &p.values);
    let pt = d_t(g, &p.values);
    Ok(VelocityField {
        nr: g.nr,
        ntheta: g.ntheta,
        ur: pr,
        utheta: per_node(g, |i, k| pt[k] / g.s[i]),
    })
}

/// `∂_r g(∇p, e₂) + (c/s) g(∇p, e₂) − (1/s) ∂_θ g(∇p, e₁)`; vanishes for smooth `p`.
pub fn pressure_gradient_identity<T: Real>(
    p: &ScalarField<T>,
    g: &AnnulusGrid<T>,
) -> Result<ScalarField<T>, FieldError> {
    let gp = pressure_gradient(p, g)?;
    let e2_r = d_r(g, &gp.utheta);
    let e1_t = d_t(g, &gp.ur);
    Ok(scalar(
        g,
        per_node(g, |i, k| {
            let (s, c) = (g.s[i], g.c[i]);
            e2_r[k] + c / s * gp.utheta[k] - e1_t[k] / s
        }),
    ))
}
