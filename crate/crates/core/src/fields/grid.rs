use serde::{Deserialize, Serialize};

use super::FieldError;
use crate::geometry::{Manifold, Obstacle};
use crate::scalar::Real;

/// Serializable description of an [`AnnulusGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default"))]
pub struct GridSpec<T> {
    pub manifold: Manifold<T>,
    pub delta: T,
    pub outer_radius: T,
    pub nr: usize,
    pub ntheta: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn build(&self) -> Result<AnnulusGrid<T>, FieldError> {
        AnnulusGrid::new(self.manifold, Obstacle::new(self.delta)?, self.outer_radius, self.nr, self.ntheta)
    }
}

/// Collocated polar grid on `δ ≤ r ≤ R`, periodic in θ.
///
/// Node `(i, j)` sits at `r_i = δ + i·hr`, `θ_j = j·hθ` and is stored at
/// flat index `i·ntheta + j` (θ fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusGrid<T> {
    pub manifold: Manifold<T>,
    pub obstacle: Obstacle<T>,
    pub outer_radius: T,
    pub nr: usize,
    pub ntheta: usize,
    pub hr: T,
    pub htheta: T,
    pub r: Vec<T>,
    pub theta: Vec<T>,
    pub s: Vec<T>,
    pub c: Vec<T>,
}

impl<T: Real> AnnulusGrid<T> {
    pub const MIN_POINTS: usize = 8;

    pub fn new(
        manifold: Manifold<T>,
        obstacle: Obstacle<T>,
        outer_radius: T,
        nr: usize,
        ntheta: usize,
    ) -> Result<Self, FieldError> {
        manifold.validate()?;
        if nr < Self::MIN_POINTS || ntheta < Self::MIN_POINTS {
            return Err(FieldError::GridTooCoarse { nr, ntheta });
        }
        let delta = obstacle.delta;
        if !(outer_radius > delta) || !outer_radius.is_finite() {
            return Err(FieldError::InvalidOuterRadius {
                delta: delta.to_f64_lossy(),
                outer: outer_radius.to_f64_lossy(),
            });
        }
        manifold.check_radius(outer_radius)?;

        let hr = (outer_radius - delta) / T::from_usize_lossy(nr - 1);
        let htheta = T::TAU() / T::from_usize_lossy(ntheta);
        let mut r: Vec<T> = (0..nr).map(|i| delta + hr * T::from_usize_lossy(i)).collect();
        r[0] = delta;
        r[nr - 1] = outer_radius;
        let theta = (0..ntheta).map(|j| htheta * T::from_usize_lossy(j)).collect();
        let s = r.iter().map(|&x| manifold.s(x)).collect();
        let c = r.iter().map(|&x| manifold.c(x)).collect();
        Ok(Self {
            manifold,
            obstacle,
            outer_radius,
            nr,
            ntheta,
            hr,
            htheta,
            r,
            theta,
            s,
            c,
        })
    }

    pub fn spec(&self) -> GridSpec<T> {
        GridSpec {
            manifold: self.manifold,
            delta: self.obstacle.delta,
            outer_radius: self.outer_radius,
            nr: self.nr,
            ntheta: self.ntheta,
        }
    }

    pub fn delta(&self) -> T {
        self.obstacle.delta
    }

    pub fn len(&self) -> usize {
        self.nr * self.ntheta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ntheta + j
    }

    /// Same grid with both point counts multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self, FieldError> {
        Self::new(
            self.manifold,
            self.obstacle,
            self.outer_radius,
            self.nr * factor,
            self.ntheta * factor,
        )
    }

    /// Index of the node with θ closest to `theta` (taken mod 2π).
    pub fn nearest_theta_index(&self, theta: T) -> usize {
        let mut t = theta % T::TAU();
        if t < T::zero() {
            t = t + T::TAU();
        }
        let j = (t / self.htheta).round().to_usize().unwrap_or(0);
        j % self.ntheta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_hit_both_radii() {
        let g = AnnulusGrid::new(Manifold::<f64>::sphere(1.0).unwrap(), Obstacle::new(0.5).unwrap(), 1.7, 13, 16).unwrap();
        assert_eq!(g.r[0], 0.5);
        assert_eq!(g.r[12], 1.7);
        assert!((g.hr - 0.1).abs() < 1e-15);
        assert!((g.htheta * 16.0 - std::f64::consts::TAU).abs() < 1e-15);
        assert_eq!(g.idx(2, 3), 35);
        assert_eq!(g.nearest_theta_index(-g.htheta), 15);
    }

    #[test]
    fn rejects_bad_grids() {
        let m = Manifold::euclidean();
        let o = Obstacle::new(1.0).unwrap();
        assert!(matches!(AnnulusGrid::new(m, o, 2.0, 7, 16), Err(FieldError::GridTooCoarse { .. })));
        assert!(matches!(AnnulusGrid::new(m, o, 1.0, 16, 16), Err(FieldError::InvalidOuterRadius { .. })));
        let sphere = Manifold::sphere(1.0).unwrap();
        assert!(AnnulusGrid::new(sphere, o, 3.5, 16, 16).is_err());
    }

    #[test]
    fn spec_round_trips_through_json() {
        let g = AnnulusGrid::new(Manifold::hyperbolic(1.0).unwrap(), Obstacle::new(1.0).unwrap(), 2.0, 10, 12).unwrap();
        let json = serde_json::to_string(&g.spec()).unwrap();
        let back: GridSpec<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back.build().unwrap(), g);
    }
}
