use serde::{Deserialize, Serialize};

use super::OdeError;
use crate::scalar::Real;

/// `mean + amplitude · sin(omega t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default"))]
pub struct Wave<T> {
    #[serde(default)]
    pub mean: T,
    #[serde(default)]
    pub amplitude: T,
    #[serde(default)]
    pub omega: T,
    #[serde(default)]
    pub phase: T,
}

impl<T: Real> Wave<T> {
    fn eval(&self, t: T) -> T {
        self.mean + self.amplitude * (self.omega * t + self.phase).sin()
    }
}

/// Time dependence of `(α₂, α₃, η)` along an integration.
///
/// JSON form is internally tagged by `kind`, e.g.
/// `{"kind":"constant","alpha2":0.0,"alpha3":-1.0,"eta":0.1}` or
/// `{"kind":"table","t":[0,1],"alpha2":[..],"alpha3":[..],"eta":[..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default"))]
pub enum CoefficientSchedule<T> {
    Constant {
        alpha2: T,
        alpha3: T,
        eta: T,
    },
    /// Polynomial coefficients in `t`, lowest degree first.
    Polynomial {
        alpha2: Vec<T>,
        alpha3: Vec<T>,
        eta: Vec<T>,
    },
    Sinusoid {
        alpha2: Wave<T>,
        alpha3: Wave<T>,
        eta: Wave<T>,
    },
    /// Samples at strictly increasing times, linearly interpolated.
    Table {
        t: Vec<T>,
        alpha2: Vec<T>,
        alpha3: Vec<T>,
        eta: Vec<T>,
    },
}

fn horner<T: Real>(coeffs: &[T], t: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * t + c)
}

impl<T: Real> CoefficientSchedule<T> {
    pub fn constant(alpha2: T, alpha3: T, eta: T) -> Self {
        Self::Constant { alpha2, alpha3, eta }
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        match self {
            Self::Constant { alpha2, alpha3, eta } => {
                if [alpha2, alpha3, eta].iter().all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err(OdeError::InvalidSchedule("non-finite constant".into()))
                }
            }
            Self::Polynomial { alpha2, alpha3, eta } => {
                if alpha2.iter().chain(alpha3).chain(eta).all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err(OdeError::InvalidSchedule("non-finite polynomial coefficient".into()))
                }
            }
            Self::Sinusoid { .. } => Ok(()),
            Self::Table { t, alpha2, alpha3, eta } => {
                if t.len() < 2 {
                    return Err(OdeError::InvalidSchedule("table needs at least two samples".into()));
                }
                if alpha2.len() != t.len() || alpha3.len() != t.len() || eta.len() != t.len() {
                    return Err(OdeError::InvalidSchedule("table columns differ in length".into()));
                }
                if !t.windows(2).all(|w| w[1] > w[0]) {
                    return Err(OdeError::InvalidSchedule("table times must be strictly increasing".into()));
                }
                Ok(())
            }
        }
    }

    /// Whether the schedule is defined on `[t0, t1]`.
    pub fn covers(&self, t0: T, t1: T) -> bool {
        match self {
            Self::Table { t, .. } => !t.is_empty() && t[0] <= t0 && t1 <= t[t.len() - 1],
            _ => true,
        }
    }

    /// `(α₂, α₃, η)` at time `t`.
    pub fn eval(&self, time: T) -> Result<(T, T, T), OdeError> {
        match self {
            Self::Constant { alpha2, alpha3, eta } => Ok((*alpha2, *alpha3, *eta)),
            Self::Polynomial { alpha2, alpha3, eta } => {
                Ok((horner(alpha2, time), horner(alpha3, time), horner(eta, time)))
            }
            Self::Sinusoid { alpha2, alpha3, eta } => Ok((alpha2.eval(time), alpha3.eval(time), eta.eval(time))),
            Self::Table { t, alpha2, alpha3, eta } => {
                let n = t.len();
                if n < 2 || time < t[0] || time > t[n - 1] || time.is_nan() {
                    return Err(OdeError::ScheduleSpan(time.to_f64_lossy()));
                }
                // first index with t[idx] > time, clamped so [idx-1, idx] brackets
                let idx = t.partition_point(|&x| x <= time).clamp(1, n - 1);
                let (t0, t1) = (t[idx - 1], t[idx]);
                let w = (time - t0) / (t1 - t0);
                let lerp = |v: &[T]| v[idx - 1] + w * (v[idx] - v[idx - 1]);
                Ok((lerp(alpha2), lerp(alpha3), lerp(eta)))
            }
        }
    }

    /// The long-time limit when the schedule is constant.
    pub fn constant_values(&self) -> Option<(T, T, T)> {
        match self {
            Self::Constant { alpha2, alpha3, eta } => Some((*alpha2, *alpha3, *eta)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_interpolates_linearly() {
        let s = CoefficientSchedule::Table {
            t: vec![0.0, 1.0, 3.0],
            alpha2: vec![0.0, 2.0, 0.0],
            alpha3: vec![1.0, 1.0, 1.0],
            eta: vec![0.0, -1.0, 1.0],
        };
        s.validate().unwrap();
        assert_eq!(s.eval(0.5).unwrap(), (1.0, 1.0, -0.5));
        assert_eq!(s.eval(2.0).unwrap(), (1.0, 1.0, 0.0));
        assert_eq!(s.eval(3.0).unwrap(), (0.0, 1.0, 1.0));
        assert!(matches!(s.eval(3.5), Err(OdeError::ScheduleSpan(_))));
        assert!(s.covers(0.0, 3.0));
        assert!(!s.covers(0.0, 3.1));
    }

    #[test]
    fn table_must_increase() {
        let s = CoefficientSchedule::Table {
            t: vec![0.0, 0.0],
            alpha2: vec![0.0, 0.0],
            alpha3: vec![0.0, 0.0],
            eta: vec![0.0, 0.0],
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn polynomial_and_sinusoid() {
        let p = CoefficientSchedule::Polynomial {
            alpha2: vec![1.0, 2.0],
            alpha3: vec![0.0, 0.0, 1.0],
            eta: vec![],
        };
        assert_eq!(p.eval(2.0).unwrap(), (5.0, 4.0, 0.0));
        let w = Wave {
            mean: 1.0,
            amplitude: 2.0,
            omega: std::f64::consts::PI,
            phase: 0.0,
        };
        let s = CoefficientSchedule::Sinusoid { alpha2: w, alpha3: w, eta: w };
        let (a2, _, _) = s.eval(0.5).unwrap();
        assert!((a2 - 3.0).abs() < 1e-15);
    }

    #[test]
    fn json_descriptors() {
        let c: CoefficientSchedule<f64> =
            serde_json::from_str(r#"{"kind":"constant","alpha2":0.5,"alpha3":-1.0,"eta":0.25}"#).unwrap();
        assert_eq!(c, CoefficientSchedule::constant(0.5, -1.0, 0.25));
        let t: CoefficientSchedule<f64> = serde_json::from_str(
            r#"{"kind":"table","t":[0,1],"alpha2":[0,1],"alpha3":[0,0],"eta":[1,1]}"#,
        )
        .unwrap();
        assert!(matches!(t, CoefficientSchedule::Table { .. }));
    }
}
