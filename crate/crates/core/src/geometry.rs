//! Metric quantities of the round sphere S²(a²), the hyperbolic plane H²(−a²)
//! and the Euclidean plane in normal polar coordinates (r, θ).
//!
//! The metric is `dr² + s(r)² dθ²` with `s' = c`. On the sphere
//! `s = sin(ar)/a`, `c = cos(ar)`; on the hyperbolic plane `s = sinh(ar)/a`,
//! `c = cosh(ar)`; on the plane `s = r`, `c = 1`. Whenever a formula carries
//! a `±` the upper sign belongs to the sphere and the lower to the hyperbolic
//! plane; [`Manifold::curvature_sign`] encodes that choice (+1, −1, 0).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("curvature scale a = {a} is invalid for {kind} (need a > 0, or a = 0 for euclidean)")]
    InvalidScale { kind: ManifoldKind, a: f64 },
    #[error("obstacle radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("radius {r} is outside the sphere chart (a·r = {ar} must stay below π)")]
    OutsideChart { r: f64, ar: f64 },
    #[error("s_a(δ) vanishes at δ = {0}; the boundary curvature is undefined")]
    DegenerateBoundary(f64),
    #[error("a·δ = {0} ≥ π/2 gives k ≤ 0; pass the wide-obstacle override to allow it")]
    WideObstacle(f64),
}

/// Which constant-curvature surface the flow lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifoldKind {
    Sphere,
    Hyperbolic,
    Euclidean,
}

impl std::fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ManifoldKind::Sphere => "sphere",
            ManifoldKind::Hyperbolic => "hyperbolic",
            ManifoldKind::Euclidean => "euclidean",
        })
    }
}

/// Geometry kind plus curvature scale `a` (units 1/length).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default"))]
pub struct Manifold<T> {
    pub kind: ManifoldKind,
    #[serde(default)]
    pub a: T,
}

impl<T: Real> Manifold<T> {
    pub fn new(kind: ManifoldKind, a: T) -> Result<Self, GeometryError> {
        let m = Self { kind, a };
        m.validate()?;
        Ok(m)
    }

    pub fn sphere(a: T) -> Result<Self, GeometryError> {
        Self::new(ManifoldKind::Sphere, a)
    }

    pub fn hyperbolic(a: T) -> Result<Self, GeometryError> {
        Self::new(ManifoldKind::Hyperbolic, a)
    }

    pub fn euclidean() -> Self {
        Self {
            kind: ManifoldKind::Euclidean,
            a: T::zero(),
        }
    }

    /// Checks `a > 0` for curved kinds and `a = 0` for the plane.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let ok = match self.kind {
            ManifoldKind::Euclidean => self.a == T::zero(),
            _ => self.a.is_finite() && self.a > T::zero(),
        };
        if ok {
            Ok(())
        } else {
            Err(GeometryError::InvalidScale {
                kind: self.kind,
                a: self.a.to_f64_lossy(),
            })
        }
    }

    /// +1 on the sphere, −1 on the hyperbolic plane, 0 on the plane.
    pub fn curvature_sign(&self) -> T {
        match self.kind {
            ManifoldKind::Sphere => T::one(),
            ManifoldKind::Hyperbolic => -T::one(),
            ManifoldKind::Euclidean => T::zero(),
        }
    }

    /// Gaussian curvature `±a²`.
    pub fn gaussian_curvature(&self) -> T {
        self.curvature_sign() * self.a * self.a
    }

    /// Warping function `s_a(r)`.
    pub fn s(&self, r: T) -> T {
        match self.kind {
            ManifoldKind::Sphere => (self.a * r).sin() / self.a,
            ManifoldKind::Hyperbolic => (self.a * r).sinh() / self.a,
            ManifoldKind::Euclidean => r,
        }
    }

    /// `c_a(r) = s_a'(r)`.
    pub fn c(&self, r: T) -> T {
        match self.kind {
            ManifoldKind::Sphere => (self.a * r).cos(),
            ManifoldKind::Hyperbolic => (self.a * r).cosh(),
            ManifoldKind::Euclidean => T::one(),
        }
    }

    /// `c_a'(r) = ∓a² s_a(r)`.
    pub fn dc(&self, r: T) -> T {
        -self.gaussian_curvature() * self.s(r)
    }

    /// Ric(u) = factor · u; `+a²` sphere, `−a²` hyperbolic, 0 plane.
    pub fn ricci_factor(&self) -> T {
        self.gaussian_curvature()
    }

    /// Largest radius for which the polar chart is nondegenerate.
    pub fn chart_limit(&self) -> T {
        match self.kind {
            ManifoldKind::Sphere => T::PI() / self.a,
            _ => T::infinity(),
        }
    }

    pub fn check_radius(&self, r: T) -> Result<(), GeometryError> {
        if r < self.chart_limit() {
            Ok(())
        } else {
            Err(GeometryError::OutsideChart {
                r: r.to_f64_lossy(),
                ar: (self.a * r).to_f64_lossy(),
            })
        }
    }
}

/// Obstacle `K`: closed geodesic ball of radius `delta` around the base point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle<T> {
    pub delta: T,
}

impl<T: Real> Obstacle<T> {
    pub fn new(delta: T) -> Result<Self, GeometryError> {
        if delta.is_finite() && delta > T::zero() {
            Ok(Self { delta })
        } else {
            Err(GeometryError::InvalidRadius(delta.to_f64_lossy()))
        }
    }

    /// `a·δ ≥ π/2` on the sphere, where the combined curvature `k` stops being positive.
    pub fn is_wide(&self, m: &Manifold<T>) -> bool {
        m.kind == ManifoldKind::Sphere && m.a * self.delta >= T::FRAC_PI_2()
    }

    /// Domain guard: `a·δ < π` always, and `a·δ < π/2` unless `allow_wide` is set.
    pub fn check(&self, m: &Manifold<T>, allow_wide: bool) -> Result<(), GeometryError> {
        m.check_radius(self.delta)?;
        if !allow_wide && self.is_wide(m) {
            return Err(GeometryError::WideObstacle((m.a * self.delta).to_f64_lossy()));
        }
        Ok(())
    }
}

pub fn metric_s<T: Real>(m: &Manifold<T>, r: T) -> T {
    m.s(r)
}

pub fn metric_c<T: Real>(m: &Manifold<T>, r: T) -> T {
    m.c(r)
}

pub fn ricci_factor<T: Real>(m: &Manifold<T>) -> T {
    m.ricci_factor()
}

/// `k = c_a(δ)/s_a(δ)`: boundary geodesic curvature mixed with the ambient curvature.
pub fn boundary_curvature_k<T: Real>(m: &Manifold<T>, obs: &Obstacle<T>) -> Result<T, GeometryError> {
    m.check_radius(obs.delta)
        .map_err(|_| GeometryError::DegenerateBoundary(obs.delta.to_f64_lossy()))?;
    let s = m.s(obs.delta);
    if s <= T::zero() {
        return Err(GeometryError::DegenerateBoundary(obs.delta.to_f64_lossy()));
    }
    Ok(m.c(obs.delta) / s)
}

/// `c² + κ s² − 1` with κ the Gaussian curvature; zero up to rounding.
pub fn pythagorean_defect<T: Real>(m: &Manifold<T>, r: T) -> T {
    let s = m.s(r);
    let c = m.c(r);
    c * c + m.gaussian_curvature() * s * s - T::one()
}

/// Sample points `r_i = lo + i (hi − lo)/(n − 1)`.
#[cfg(test)]
pub(crate) fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let step = (hi - lo) / T::from_usize_lossy(n.max(2) - 1);
    (0..n).map(|i| lo + step * T::from_usize_lossy(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn metric_examples() {
        let sph = Manifold::sphere(1.0).unwrap();
        assert!((metric_s(&sph, PI / 2.0) - 1.0).abs() < 1e-15);
        assert_eq!(metric_c(&sph, 0.0), 1.0);

        let flat = Manifold::<f64>::euclidean();
        assert_eq!(metric_s(&flat, 2.5), 2.5);
        assert_eq!(metric_c(&flat, 7.0), 1.0);

        // series oracle for sinh(1) and cosh(1)
        let (mut sinh1, mut cosh1, mut term) = (0.0, 0.0, 1.0);
        for n in 0..30 {
            if n > 0 {
                term /= n as f64;
            }
            if n % 2 == 0 {
                cosh1 += term;
            } else {
                sinh1 += term;
            }
        }
        let hyp = Manifold::hyperbolic(1.0).unwrap();
        assert!((metric_s(&hyp, 1.0) - sinh1).abs() < 1e-14);
        assert!((metric_s(&hyp, 1.0) - 1.1752012).abs() < 1e-7);
        let hyp2 = Manifold::hyperbolic(2.0).unwrap();
        assert!((metric_c(&hyp2, 0.5) - cosh1).abs() < 1e-14);
        assert!((metric_c(&hyp2, 0.5) - 1.5430806).abs() < 1e-7);
    }

    #[test]
    fn curvature_k_examples() {
        let sph = Manifold::sphere(1.0).unwrap();
        let k = boundary_curvature_k(&sph, &Obstacle::new(PI / 4.0).unwrap()).unwrap();
        assert!((k - 1.0).abs() < 1e-15);

        let flat = Manifold::<f64>::euclidean();
        assert_eq!(boundary_curvature_k(&flat, &Obstacle::new(2.0).unwrap()).unwrap(), 0.5);

        let hyp = Manifold::hyperbolic(1.0).unwrap();
        let k = boundary_curvature_k(&hyp, &Obstacle::new(1.0).unwrap()).unwrap();
        assert!((k - 1.0f64.cosh() / 1.0f64.sinh()).abs() < 1e-15);
        assert!((k - 1.3130353).abs() < 1e-7);
    }

    #[test]
    fn degenerate_sphere_boundary_is_rejected() {
        let sph = Manifold::sphere(1.0).unwrap();
        let err = boundary_curvature_k(&sph, &Obstacle::new(PI).unwrap()).unwrap_err();
        assert!(matches!(err, GeometryError::DegenerateBoundary(_)));
    }

    #[test]
    fn ricci_examples() {
        assert_eq!(ricci_factor(&Manifold::sphere(2.0).unwrap()), 4.0);
        assert_eq!(ricci_factor(&Manifold::hyperbolic(2.0).unwrap()), -4.0);
        assert_eq!(ricci_factor(&Manifold::<f64>::euclidean()), 0.0);
    }

    #[test]
    fn scale_validation() {
        assert!(Manifold::sphere(0.0).is_err());
        assert!(Manifold::hyperbolic(-1.0).is_err());
        assert!(Manifold::new(ManifoldKind::Euclidean, 1.0).is_err());
        assert!(Obstacle::new(0.0).is_err());
        assert!(Obstacle::new(f64::NAN).is_err());
    }

    #[test]
    fn wide_obstacle_guard() {
        let sph = Manifold::sphere(1.0).unwrap();
        let wide = Obstacle::new(2.0).unwrap();
        assert!(wide.is_wide(&sph));
        assert!(matches!(wide.check(&sph, false), Err(GeometryError::WideObstacle(_))));
        assert!(wide.check(&sph, true).is_ok());
        assert!(Obstacle::new(3.5).unwrap().check(&sph, true).is_err());
        let k = boundary_curvature_k(&sph, &wide).unwrap();
        assert!(k < 0.0);
    }

    #[test]
    fn c_is_derivative_of_s() {
        for m in [
            Manifold::sphere(1.3).unwrap(),
            Manifold::hyperbolic(0.7).unwrap(),
            Manifold::euclidean(),
        ] {
            let mut prev = f64::INFINITY;
            for h in [1e-2, 5e-3] {
                let mut worst: f64 = 0.0;
                for r in linspace::<f64>(0.1, 2.0, 40) {
                    let fd = (m.s(r + h) - m.s(r - h)) / (2.0 * h);
                    worst = worst.max((fd - m.c(r)).abs());
                }
                if prev.is_finite() && prev > 1e-12 {
                    let ratio = prev / worst;
                    assert!(ratio > 3.5 && ratio < 4.5, "{:?}: ratio {ratio}", m.kind);
                }
                prev = worst;
            }
        }
    }

    #[test]
    fn pythagorean_identity_to_few_ulp() {
        for m in [
            Manifold::sphere(1.0).unwrap(),
            Manifold::sphere(2.5).unwrap(),
            Manifold::hyperbolic(1.0).unwrap(),
            Manifold::euclidean(),
        ] {
            for r in linspace::<f64>(0.0, 1.2, 50) {
                let c = m.c(r);
                let scale = (c * c).max(1.0);
                assert!(pythagorean_defect(&m, r).abs() <= 4.0 * f64::EPSILON * scale);
            }
        }
    }

    #[test]
    fn small_scale_matches_flat() {
        let m = Manifold::sphere(1e-6).unwrap();
        let h = Manifold::hyperbolic(1e-6).unwrap();
        for r in linspace::<f64>(0.01, 10.0, 100) {
            assert!((m.s(r) - r).abs() < 1e-8 * r);
            assert!((h.s(r) - r).abs() < 1e-8 * r);
        }
    }

    #[test]
    fn k_decreases_with_delta() {
        for m in [
            Manifold::sphere(1.0).unwrap(),
            Manifold::hyperbolic(1.0).unwrap(),
            Manifold::euclidean(),
        ] {
            let ks: Vec<f64> = linspace(0.05, 1.5, 60)
                .into_iter()
                .map(|d| boundary_curvature_k(&m, &Obstacle::new(d).unwrap()).unwrap())
                .collect();
            assert!(ks.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn generic_over_f32() {
        let m = Manifold::<f32>::sphere(1.0).unwrap();
        let k = boundary_curvature_k(&m, &Obstacle::new(std::f32::consts::FRAC_PI_4).unwrap()).unwrap();
        assert!((k - 1.0).abs() < 1e-6);
    }

    #[test]
    fn kind_serializes_as_lowercase() {
        let m = Manifold::sphere(1.0).unwrap();
        let js = serde_json::to_string(&m).unwrap();
        assert_eq!(js, r#"{"kind":"sphere","a":1.0}"#);
        let back: Manifold<f64> = serde_json::from_str(r#"{"kind":"euclidean"}"#).unwrap();
        assert_eq!(back, Manifold::euclidean());
    }
}
