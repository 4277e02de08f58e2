use serde::{Deserialize, Serialize};

use super::{AnnulusGrid, FieldError};
use crate::scalar::Real;

/// Condition imposed on the obstacle wall `r = δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(deserialize = "T: Deserialize<'de>"))]
pub enum WallCondition<T> {
    /// `u_r = u_θ = 0`.
    NoSlip,
    /// `u_r = λ₀`, `u_θ = 0`.
    Inflow { lambda0: T },
}

impl<T: Real> WallCondition<T> {
    pub fn lambda0(&self) -> T {
        match *self {
            WallCondition::NoSlip => T::zero(),
            WallCondition::Inflow { lambda0 } => lambda0,
        }
    }
}

/// Velocity components `(u_r, u_θ)` in the orthonormal frame `(e₁, e₂)` at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField<T> {
    pub nr: usize,
    pub ntheta: usize,
    pub ur: Vec<T>,
    pub utheta: Vec<T>,
}

/// One value per grid node (pressure, diagnostics).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    pub nr: usize,
    pub ntheta: usize,
    pub values: Vec<T>,
}

impl<T: Real> VelocityField<T> {
    pub fn zeros(g: &AnnulusGrid<T>) -> Self {
        Self {
            nr: g.nr,
            ntheta: g.ntheta,
            ur: vec![T::zero(); g.len()],
            utheta: vec![T::zero(); g.len()],
        }
    }

    /// Samples `f(r, θ) -> (u_r, u_θ)` at every node.
    pub fn from_fn(g: &AnnulusGrid<T>, mut f: impl FnMut(T, T) -> (T, T)) -> Self {
        let mut out = Self::zeros(g);
        for i in 0..g.nr {
            for j in 0..g.ntheta {
                let (a, b) = f(g.r[i], g.theta[j]);
                let k = g.idx(i, j);
                out.ur[k] = a;
                out.utheta[k] = b;
            }
        }
        out
    }

    pub fn from_parts(g: &AnnulusGrid<T>, ur: Vec<T>, utheta: Vec<T>) -> Result<Self, FieldError> {
        let f = Self {
            nr: g.nr,
            ntheta: g.ntheta,
            ur,
            utheta,
        };
        f.check_shape(g)?;
        Ok(f)
    }

    pub fn check_shape(&self, g: &AnnulusGrid<T>) -> Result<(), FieldError> {
        let n = g.len();
        if self.nr != g.nr || self.ntheta != g.ntheta || self.ur.len() != n || self.utheta.len() != n {
            return Err(FieldError::ShapeMismatch {
                expected: (g.nr, g.ntheta),
                found: (self.nr, self.ntheta),
            });
        }
        Ok(())
    }

    /// Flat index of the first non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.ur
            .iter()
            .zip(&self.utheta)
            .position(|(a, b)| !a.is_finite() || !b.is_finite())
    }

    /// Largest deviation from the wall condition on `r = δ`.
    pub fn wall_defect(&self, wall: &WallCondition<T>) -> T {
        let l = wall.lambda0();
        (0..self.ntheta)
            .map(|j| (self.ur[j] - l).abs().max(self.utheta[j].abs()))
            .fold(T::zero(), T::max)
    }

    /// Overwrites the wall row with the exact wall values.
    pub fn impose_wall(&mut self, wall: &WallCondition<T>) {
        let l = wall.lambda0();
        for j in 0..self.ntheta {
            self.ur[j] = l;
            self.utheta[j] = T::zero();
        }
    }

    pub fn max_speed(&self) -> T {
        self.ur
            .iter()
            .zip(&self.utheta)
            .map(|(&a, &b)| (a * a + b * b).sqrt())
            .fold(T::zero(), T::max)
    }

    /// `self + w·other`, component-wise.
    pub fn axpy(&self, w: T, other: &Self) -> Self {
        let ur = self.ur.iter().zip(&other.ur).map(|(&a, &b)| a + w * b).collect();
        let ut = self.utheta.iter().zip(&other.utheta).map(|(&a, &b)| a + w * b).collect();
        Self {
            nr: self.nr,
            ntheta: self.ntheta,
            ur,
            utheta: ut,
        }
    }

    pub fn scale(&self, w: T) -> Self {
        Self {
            nr: self.nr,
            ntheta: self.ntheta,
            ur: self.ur.iter().map(|&a| w * a).collect(),
            utheta: self.utheta.iter().map(|&a| w * a).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.ur
            .iter()
            .zip(&other.ur)
            .chain(self.utheta.iter().zip(&other.utheta))
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }
}

impl<T: Real> ScalarField<T> {
    pub fn zeros(g: &AnnulusGrid<T>) -> Self {
        Self {
            nr: g.nr,
            ntheta: g.ntheta,
            values: vec![T::zero(); g.len()],
        }
    }

    pub fn from_fn(g: &AnnulusGrid<T>, mut f: impl FnMut(T, T) -> T) -> Self {
        let mut values = Vec::with_capacity(g.len());
        for i in 0..g.nr {
            for j in 0..g.ntheta {
                values.push(f(g.r[i], g.theta[j]));
            }
        }
        Self {
            nr: g.nr,
            ntheta: g.ntheta,
            values,
        }
    }

    pub fn check_shape(&self, g: &AnnulusGrid<T>) -> Result<(), FieldError> {
        if self.nr != g.nr || self.ntheta != g.ntheta || self.values.len() != g.len() {
            return Err(FieldError::ShapeMismatch {
                expected: (g.nr, g.ntheta),
                found: (self.nr, self.ntheta),
            });
        }
        Ok(())
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[i * self.ntheta + j]
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Largest magnitude over radial rows `rows`.
    pub fn max_abs_rows(&self, rows: std::ops::Range<usize>) -> T {
        self.values[rows.start * self.ntheta..rows.end * self.ntheta]
            .iter()
            .fold(T::zero(), |m, v| m.max(v.abs()))
    }
}
