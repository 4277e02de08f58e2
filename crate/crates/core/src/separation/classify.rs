use serde::{Deserialize, Serialize};

use super::{BoundaryCoefficients, OdeError};
use crate::scalar::{lit, Real};

/// Half-width of the band around η = 0 reported as parallel.
pub const DEFAULT_ETA_TOL: f64 = 1e-12;

/// Default ratio for "small compared with" in [`classify_profile`].
pub const DEFAULT_SMALLNESS: f64 = 0.1;

/// Shape of the streamlines next to the wall, read off the sign of η.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamlineClass {
    Convexing,
    Parallel,
    Concaving,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileClass {
    Poiseuille,
    BeforeSeparation,
    Other,
}

pub fn classify_streamlines<T: Real>(eta: T, tol: T) -> StreamlineClass {
    if eta < -tol {
        StreamlineClass::Convexing
    } else if eta > tol {
        StreamlineClass::Concaving
    } else {
        StreamlineClass::Parallel
    }
}

/// Sign-pattern classification of the wall profile.
///
/// Poiseuille type: `α₁ > 0`, `α₂ < 0`, `−k²α₁ + 2kα₂ < 0` and
/// `|α₃| ≤ ρ max(k²|α₁|, 2k|α₂|)`.
///
/// Before separation: `α₂ > 0`, `α₃ < 0`, `2kα₂ + α₃ < 0` and
/// `|α₁| ≤ ρ max(|α₂|/k', |α₃|/k'²)` with `k' = max(k, 1/δ)`.
pub fn classify_profile<T: Real>(c: &BoundaryCoefficients<T>, smallness: T) -> Result<ProfileClass, OdeError> {
    if !(smallness > T::zero() && smallness < T::one()) {
        return Err(OdeError::InvalidSmallness(smallness.to_f64_lossy()));
    }
    let two = lit::<T>(2.0);
    let k = c.k;
    let (a1, a2, a3) = (c.alpha1, c.alpha2, c.alpha3);

    let poiseuille = a1 > T::zero()
        && a2 < T::zero()
        && -k * k * a1 + two * k * a2 < T::zero()
        && a3.abs() <= smallness * (k * k * a1.abs()).max(two * k * a2.abs());
    if poiseuille {
        return Ok(ProfileClass::Poiseuille);
    }

    let kp = k.max(T::one() / c.delta);
    let before = a2 > T::zero()
        && a3 < T::zero()
        && two * k * a2 + a3 < T::zero()
        && a1.abs() <= smallness * (a2.abs() / kp).max(a3.abs() / (kp * kp));
    if before {
        return Ok(ProfileClass::BeforeSeparation);
    }
    Ok(ProfileClass::Other)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ManifoldKind;

    fn c(k: f64, a1: f64, a2: f64, a3: f64) -> BoundaryCoefficients<f64> {
        BoundaryCoefficients {
            kind: ManifoldKind::Euclidean,
            k,
            alpha1: a1,
            alpha2: a2,
            alpha3: a3,
            eta: 0.0,
            lambda0: 0.0,
            beta: 0.0,
            a: 0.0,
            delta: 1.0,
        }
    }

    #[test]
    fn streamline_signs() {
        assert_eq!(classify_streamlines(-1.0, DEFAULT_ETA_TOL), StreamlineClass::Convexing);
        assert_eq!(classify_streamlines(0.0, DEFAULT_ETA_TOL), StreamlineClass::Parallel);
        assert_eq!(classify_streamlines(1.0, DEFAULT_ETA_TOL), StreamlineClass::Concaving);
        assert_eq!(classify_streamlines(1e-13, DEFAULT_ETA_TOL), StreamlineClass::Parallel);
    }

    #[test]
    fn profile_examples() {
        assert_eq!(classify_profile(&c(1.0, 1.0, -1.0, 0.0), 0.1).unwrap(), ProfileClass::Poiseuille);
        assert_eq!(
            classify_profile(&c(1.0, 0.0, 1.0, -3.0), 0.1).unwrap(),
            ProfileClass::BeforeSeparation
        );
        assert_eq!(classify_profile(&c(1.0, 1.0, 1.0, 1.0), 0.1).unwrap(), ProfileClass::Other);
    }

    #[test]
    fn smallness_is_enforced() {
        // α₃ too large relative to the dominant terms
        assert_eq!(classify_profile(&c(1.0, 1.0, -1.0, 0.5), 0.1).unwrap(), ProfileClass::Other);
        assert!(classify_profile(&c(1.0, 1.0, -1.0, 0.0), 1.0).is_err());
        assert!(classify_profile(&c(1.0, 1.0, -1.0, 0.0), 0.0).is_err());
    }
}
