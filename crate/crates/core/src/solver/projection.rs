//! Exact discrete projection onto fields with zero interior divergence.
//!
//! The divergence `D` and the gradient `G` are the collocated centered
//! operators of [`crate::fields::ops`], so `D∘G` has the wide radial stencil
//! `φ_{i±2}`. The θ-direction is diagonalised by the DFT; each Fourier mode
//! leaves a banded real system in `r` that is factored once by dense LU.
//! Rows `0` and `N−1` are never corrected, which leaves two free values per
//! mode. They are fixed by quadratic extrapolation from the opposite-parity
//! chain (smooth `φ` at the walls) or, for the modes that `D∘G` cannot see in
//! θ (mean and Nyquist), by pinning `φ₀ = φ_{N−1} = 0`. With an even number of
//! radial nodes each parity chain then carries exactly one pin.
//!
//! The solve runs in `f64` whatever the field scalar type.

use std::sync::Arc;

use nalgebra::{DMatrix, LU};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::SolverError;
use crate::fields::{divergence, AnnulusGrid, VelocityField};
use crate::scalar::{lit, Real};

const MAX_SWEEPS: usize = 6;

pub(crate) struct Projector {
    nr: usize,
    nt: usize,
    hr: f64,
    htheta: f64,
    s: Vec<f64>,
    /// One factorisation per distinct `sin²(m hθ)`, i.e. `m = 0..=nθ/2`.
    modes: Vec<LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Projector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Projector")
            .field("nr", &self.nr)
            .field("ntheta", &self.nt)
            .finish_non_exhaustive()
    }
}

impl Projector {
    pub(crate) fn new<T: Real>(g: &AnnulusGrid<T>) -> Result<Self, SolverError> {
        if g.nr % 2 != 0 {
            return Err(SolverError::Config(format!(
                "the projection needs an even number of radial nodes, got nr = {}",
                g.nr
            )));
        }
        let (nr, nt) = (g.nr, g.ntheta);
        let hr = g.hr.to_f64_lossy();
        let htheta = g.htheta.to_f64_lossy();
        let s: Vec<f64> = g.s.iter().map(|v| v.to_f64_lossy()).collect();
        let modes = (0..=nt / 2)
            .map(|m| {
                let sig = (m as f64 * htheta).sin() / htheta;
                let blind = m == 0 || 2 * m == nt;
                Self::mode_matrix(nr, hr, &s, sig * sig, blind).lu()
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            nr,
            nt,
            hr,
            htheta,
            s,
            modes,
            forward: planner.plan_fft_forward(nt),
            inverse: planner.plan_fft_inverse(nt),
        })
    }

    fn mode_matrix(n: usize, h: f64, s: &[f64], sig2: f64, blind: bool) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(n, n);
        let w = 1.0 / (4.0 * h * h);
        for i in 1..n - 1 {
            for (ip, sign) in [(i + 1, 1.0), (i - 1, -1.0)] {
                if (1..n - 1).contains(&ip) {
                    let c = sign * w * s[ip] / s[i];
                    a[(i, ip + 1)] += c;
                    a[(i, ip - 1)] -= c;
                }
            }
            a[(i, i)] -= sig2 / (s[i] * s[i]);
        }
        let scale = 1.0 / (h * h);
        if blind {
            a[(0, 0)] = scale;
            a[(n - 1, n - 1)] = scale;
        } else {
            for (k, c) in [(0, 8.0), (1, -15.0), (3, 10.0), (5, -3.0)] {
                a[(0, k)] = c * scale / 8.0;
                a[(n - 1, n - 1 - k)] = c * scale / 8.0;
            }
        }
        a
    }

    /// Solves `D G ψ = rhs` on interior rows; `rhs` is row-major `nr × nθ`
    /// with the wall and outer rows ignored.
    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
        let (nr, nt) = (self.nr, self.nt);
        let mut spec: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); nr * nt];
        for i in 1..nr - 1 {
            let row = &mut spec[i * nt..(i + 1) * nt];
            for (z, &v) in row.iter_mut().zip(&rhs[i * nt..(i + 1) * nt]) {
                *z = Complex::new(v, 0.0);
            }
            self.forward.process(row);
        }
        let mut b = DMatrix::<f64>::zeros(nr, 2);
        for m in 0..nt {
            let lu = &self.modes[m.min(nt - m)];
            for i in 0..nr {
                let z = spec[i * nt + m];
                b[(i, 0)] = z.re;
                b[(i, 1)] = z.im;
            }
            let x = lu.solve(&b).ok_or(SolverError::SingularProjection { mode: m })?;
            for i in 0..nr {
                spec[i * nt + m] = Complex::new(x[(i, 0)], x[(i, 1)]);
            }
        }
        let mut out = vec![0.0; nr * nt];
        let norm = 1.0 / nt as f64;
        for i in 0..nr {
            let row = &mut spec[i * nt..(i + 1) * nt];
            self.inverse.process(row);
            for (o, z) in out[i * nt..(i + 1) * nt].iter_mut().zip(row.iter()) {
                *o = z.re * norm;
            }
        }
        Ok(out)
    }

    /// `u ← u − Gψ` on interior rows.
    fn correct<T: Real>(&self, u: &mut VelocityField<T>, psi: &[f64]) {
        let (nr, nt) = (self.nr, self.nt);
        let (ir, it) = (0.5 / self.hr, 0.5 / self.htheta);
        for i in 1..nr - 1 {
            for j in 0..nt {
                let k = i * nt + j;
                let jp = if j + 1 == nt { k + 1 - nt } else { k + 1 };
                let jm = if j == 0 { k + nt - 1 } else { k - 1 };
                let gr = (psi[k + nt] - psi[k - nt]) * ir;
                let gt = (psi[jp] - psi[jm]) * it / self.s[i];
                u.ur[k] = u.ur[k] - lit::<T>(gr);
                u.utheta[k] = u.utheta[k] - lit::<T>(gt);
            }
        }
    }

    /// Projects `u` in place until the interior divergence is below `tol`;
    /// returns the accumulated potential `ψ` (so `u_out = u_in − Gψ`).
    pub(crate) fn project<T: Real>(
        &self,
        g: &AnnulusGrid<T>,
        u: &mut VelocityField<T>,
        tol: T,
    ) -> Result<Vec<f64>, SolverError> {
        let mut total = vec![0.0; self.nr * self.nt];
        let target = tol.to_f64_lossy();
        let mut sweeps = 0;
        loop {
            let div = divergence(u, g)?;
            let worst = div.max_abs_rows(1..g.nr - 1).to_f64_lossy();
            if !worst.is_finite() {
                return Err(SolverError::NonFinite { what: "divergence" });
            }
            // a tenth of the target leaves headroom for the caller's own check
            if worst <= 0.1 * target {
                return Ok(total);
            }
            if sweeps == MAX_SWEEPS {
                if worst <= target {
                    return Ok(total);
                }
                return Err(SolverError::ProjectionStalled {
                    divergence: worst,
                    tol: target,
                    sweeps,
                });
            }
            let rhs: Vec<f64> = div.values.iter().map(|v| v.to_f64_lossy()).collect();
            let psi = self.solve(&rhs)?;
            self.correct(u, &psi);
            for (t, p) in total.iter_mut().zip(&psi) {
                *t += p;
            }
            sweeps += 1;
        }
    }
}
