use serde::{Deserialize, Serialize};

use super::OdeError;
use crate::geometry::{boundary_curvature_k, Manifold, ManifoldKind, Obstacle};
use crate::scalar::Real;

/// Time-independent data of the ODE: geometry plus inflow and rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default"))]
pub struct OdeGeometry<T> {
    pub kind: ManifoldKind,
    pub a: T,
    pub delta: T,
    pub k: T,
    #[serde(default)]
    pub lambda0: T,
    #[serde(default)]
    pub beta: T,
}

impl<T: Real> OdeGeometry<T> {
    /// Derives `k` from the manifold and obstacle; `λ₀ = β = 0`.
    pub fn new(m: &Manifold<T>, obs: &Obstacle<T>) -> Result<Self, OdeError> {
        Ok(Self {
            kind: m.kind,
            a: m.a,
            delta: obs.delta,
            k: boundary_curvature_k(m, obs)?,
            lambda0: T::zero(),
            beta: T::zero(),
        })
    }

    pub fn with_inflow(mut self, lambda0: T, beta: T) -> Self {
        self.lambda0 = lambda0;
        self.beta = beta;
        self
    }

    /// `λ₀ β (a sin(aδ) − k cos(aδ))`.
    pub fn coriolis_forcing(&self) -> T {
        let ad = self.a * self.delta;
        self.lambda0 * self.beta * (self.a * ad.sin() - self.k * ad.cos())
    }

    /// Sign-determining factor `λ₀ (a sin(aδ) − k cos(aδ))` of the constant forcing.
    pub fn forcing_direction(&self) -> T {
        let ad = self.a * self.delta;
        self.lambda0 * (self.a * ad.sin() - self.k * ad.cos())
    }

    pub fn check_coriolis(&self) -> Result<(), OdeError> {
        if self.beta != T::zero() && self.kind != ManifoldKind::Sphere {
            return Err(OdeError::CoriolisOffSphere {
                beta: self.beta.to_f64_lossy(),
                kind: self.kind,
            });
        }
        Ok(())
    }

    pub fn coefficients(&self, alpha1: T, alpha2: T, alpha3: T, eta: T) -> BoundaryCoefficients<T> {
        BoundaryCoefficients {
            kind: self.kind,
            k: self.k,
            alpha1,
            alpha2,
            alpha3,
            eta,
            lambda0: self.lambda0,
            beta: self.beta,
            a: self.a,
            delta: self.delta,
        }
    }
}

/// Inputs of the separation ODE at one boundary point and one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCoefficients<T> {
    pub kind: ManifoldKind,
    /// `c(δ)/s(δ)`
    pub k: T,
    /// `∂_r u_θ`
    pub alpha1: T,
    /// `∂²_r u_θ`
    pub alpha2: T,
    /// `∂³_r u_θ`
    pub alpha3: T,
    /// `s(δ)⁻² ∂_r ∂²_θ u_θ`
    pub eta: T,
    pub lambda0: T,
    pub beta: T,
    pub a: T,
    pub delta: T,
}

impl<T: Real> BoundaryCoefficients<T> {
    pub fn geometry(&self) -> OdeGeometry<T> {
        OdeGeometry {
            kind: self.kind,
            a: self.a,
            delta: self.delta,
            k: self.k,
            lambda0: self.lambda0,
            beta: self.beta,
        }
    }

    pub fn with_inflow(mut self, lambda0: T, beta: T) -> Self {
        self.lambda0 = lambda0;
        self.beta = beta;
        self
    }

    /// Verifies `k` against `c(δ)/s(δ)` for hand-assembled instances.
    pub fn check_curvature(&self, rel_tol: T) -> Result<(), OdeError> {
        let m = Manifold::new(self.kind, self.a)?;
        let expected = boundary_curvature_k(&m, &Obstacle::new(self.delta)?)?;
        let scale = expected.abs().max(T::one());
        if (expected - self.k).abs() <= rel_tol * scale {
            Ok(())
        } else {
            Err(OdeError::InconsistentCurvature {
                stored: self.k.to_f64_lossy(),
                expected: expected.to_f64_lossy(),
            })
        }
    }
}

/// `−k² α₁ + α₃ + 2k α₂ + 2η`.
pub fn rhs_plain<T: Real>(c: &BoundaryCoefficients<T>) -> T {
    let two = T::one() + T::one();
    -c.k * c.k * c.alpha1 + c.alpha3 + two * c.k * c.alpha2 + two * c.eta
}

/// Right-hand side with inflow `λ₀` and Coriolis parameter `β` (sphere only when `β ≠ 0`).
pub fn rhs_coriolis<T: Real>(c: &BoundaryCoefficients<T>) -> Result<T, OdeError> {
    let g = c.geometry();
    g.check_coriolis()?;
    let two = T::one() + T::one();
    let l = c.lambda0;
    Ok(-c.k * (c.k + l) * c.alpha1 + (two * c.k - l) * c.alpha2 + c.alpha3 + two * c.eta + g.coriolis_forcing())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn coeffs(k: f64, a1: f64, a2: f64, a3: f64, eta: f64) -> BoundaryCoefficients<f64> {
        BoundaryCoefficients {
            kind: ManifoldKind::Euclidean,
            k,
            alpha1: a1,
            alpha2: a2,
            alpha3: a3,
            eta,
            lambda0: 0.0,
            beta: 0.0,
            a: 0.0,
            delta: 1.0 / k,
        }
    }

    #[test]
    fn plain_examples() {
        assert_eq!(rhs_plain(&coeffs(1.0, 0.0, 0.0, 0.0, 0.0)), 0.0);
        assert_eq!(rhs_plain(&coeffs(1.0, 1.0, 0.0, 0.0, 0.0)), -1.0);
        assert_eq!(rhs_plain(&coeffs(2.0, 0.5, 1.0, -3.0, 0.25)), -0.5);
    }

    #[test]
    fn coriolis_forcing_vanishes_at_quarter_pi() {
        let c = BoundaryCoefficients {
            kind: ManifoldKind::Sphere,
            k: 1.0,
            alpha1: 0.0,
            alpha2: 0.0,
            alpha3: 0.0,
            eta: 0.0,
            lambda0: 1.0,
            beta: 2.0,
            a: 1.0,
            delta: PI / 4.0,
        };
        assert!(rhs_coriolis(&c).unwrap().abs() < 1e-15);
    }

    #[test]
    fn coriolis_forcing_at_unit_radius() {
        // independent scalar evaluation: 0.5·4·(sin 1 − cot 1 · cos 1)
        let cot1 = 1.0f64.cos() / 1.0f64.sin();
        let expected = 0.5 * 4.0 * (1.0f64.sin() - cot1 * 1.0f64.cos());
        // same quantity through sin² − cos² = −cos 2
        let via_double_angle = -2.0 * 2.0f64.cos() / 1.0f64.sin();
        assert!((expected - via_double_angle).abs() < 1e-14);
        assert!((expected - 0.98910).abs() < 1e-5);
        let c = BoundaryCoefficients {
            kind: ManifoldKind::Sphere,
            k: cot1,
            alpha1: 0.0,
            alpha2: 0.0,
            alpha3: 0.0,
            eta: 0.0,
            lambda0: 0.5,
            beta: 4.0,
            a: 1.0,
            delta: 1.0,
        };
        assert!((rhs_coriolis(&c).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn coriolis_rejected_off_sphere() {
        let mut c = coeffs(1.0, 1.0, 0.0, 0.0, 0.0);
        c.beta = 1.0;
        assert!(matches!(rhs_coriolis(&c), Err(OdeError::CoriolisOffSphere { .. })));
        c.beta = 0.0;
        c.lambda0 = 0.3;
        assert!(rhs_coriolis(&c).is_ok());
    }

    #[test]
    fn curvature_consistency_check() {
        let m = Manifold::hyperbolic(1.0).unwrap();
        let g = OdeGeometry::new(&m, &Obstacle::new(1.0).unwrap()).unwrap();
        let c = g.coefficients(1.0, 0.0, 0.0, 0.0);
        assert!(c.check_curvature(1e-12).is_ok());
        let mut bad = c;
        bad.k = 2.0;
        assert!(matches!(bad.check_curvature(1e-12), Err(OdeError::InconsistentCurvature { .. })));
    }
}
