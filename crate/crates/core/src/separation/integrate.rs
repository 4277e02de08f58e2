use serde::{Deserialize, Serialize};

use super::{rhs_coriolis, rhs_plain, CoefficientSchedule, OdeError, OdeGeometry};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OdeMode {
    /// No-slip wall, no rotation.
    Plain,
    /// Inflow `λ₀` and Coriolis parameter `β`.
    Coriolis,
}

/// Sampled solution of the separation ODE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeTrace<T> {
    pub mode: OdeMode,
    pub times: Vec<T>,
    pub alpha1: Vec<T>,
    pub rhs: Vec<T>,
}

impl<T: Real> OdeTrace<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn min_alpha1(&self) -> Option<T> {
        self.alpha1.iter().copied().reduce(T::min)
    }

    pub fn last(&self) -> Option<(T, T)> {
        Some((*self.times.last()?, *self.alpha1.last()?))
    }

    /// Writes `t,alpha1,rhs` rows preceded by `# ` comment lines.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "t,alpha1,rhs")?;
        for ((t, a), r) in self.times.iter().zip(&self.alpha1).zip(&self.rhs) {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                t.to_f64_lossy(),
                a.to_f64_lossy(),
                r.to_f64_lossy()
            )?;
        }
        Ok(())
    }
}

fn rhs_at<T: Real>(
    mode: OdeMode,
    geom: &OdeGeometry<T>,
    sched: &CoefficientSchedule<T>,
    t: T,
    alpha1: T,
) -> Result<T, OdeError> {
    let (a2, a3, eta) = sched.eval(t)?;
    match mode {
        OdeMode::Plain => {
            let g = OdeGeometry {
                lambda0: T::zero(),
                beta: T::zero(),
                ..*geom
            };
            Ok(rhs_plain(&g.coefficients(alpha1, a2, a3, eta)))
        }
        OdeMode::Coriolis => rhs_coriolis(&geom.coefficients(alpha1, a2, a3, eta)),
    }
}

/// Linear decay rate of the ODE: `k²` (plain) or `k(k+λ₀)` (Coriolis).
fn decay_rate<T: Real>(mode: OdeMode, geom: &OdeGeometry<T>) -> T {
    match mode {
        OdeMode::Plain => geom.k * geom.k,
        OdeMode::Coriolis => geom.k * (geom.k + geom.lambda0),
    }
}

/// Fixed-step classical RK4 from `t = 0` to `t_end`; the last step is shortened
/// to land exactly on `t_end`.
pub fn integrate<T: Real>(
    mode: OdeMode,
    alpha1_0: T,
    sched: &CoefficientSchedule<T>,
    geom: &OdeGeometry<T>,
    t_end: T,
    dt: T,
) -> Result<OdeTrace<T>, OdeError> {
    if !(alpha1_0 > T::zero()) || !alpha1_0.is_finite() {
        return Err(OdeError::NonPositiveInitial(alpha1_0.to_f64_lossy()));
    }
    if !(dt > T::zero() && t_end > T::zero() && dt.is_finite() && t_end.is_finite()) {
        return Err(OdeError::InvalidSpan {
            dt: dt.to_f64_lossy(),
            t_end: t_end.to_f64_lossy(),
        });
    }
    if mode == OdeMode::Coriolis {
        geom.check_coriolis()?;
    }
    let stiff = geom.k * geom.k * dt;
    let stiff = stiff.max(decay_rate(mode, geom).abs() * dt);
    if stiff >= T::one() {
        return Err(OdeError::Stiff(stiff.to_f64_lossy()));
    }
    sched.validate()?;
    if !sched.covers(T::zero(), t_end) {
        return Err(OdeError::ScheduleSpan(t_end.to_f64_lossy()));
    }

    // number of steps; a remainder below 1e-9·dt is absorbed into the last full step
    let ratio = t_end / dt;
    let mut nsteps = ratio.floor().to_usize().unwrap_or(0);
    if ratio - T::from_usize_lossy(nsteps) > lit::<T>(1e-9) {
        nsteps += 1;
    }
    let nsteps = nsteps.max(1);

    let half = lit::<T>(0.5);
    let sixth = lit::<T>(1.0 / 6.0);
    let two = lit::<T>(2.0);

    let mut times = Vec::with_capacity(nsteps + 1);
    let mut alpha1 = Vec::with_capacity(nsteps + 1);
    let mut rhs = Vec::with_capacity(nsteps + 1);

    let mut t = T::zero();
    let mut y = alpha1_0;
    let mut f0 = rhs_at(mode, geom, sched, t, y)?;
    times.push(t);
    alpha1.push(y);
    rhs.push(f0);

    for step in 1..=nsteps {
        let t_next = if step == nsteps {
            t_end
        } else {
            dt * T::from_usize_lossy(step)
        };
        let h = t_next - t;
        let k1 = f0;
        let k2 = rhs_at(mode, geom, sched, t + half * h, y + half * h * k1)?;
        let k3 = rhs_at(mode, geom, sched, t + half * h, y + half * h * k2)?;
        let k4 = rhs_at(mode, geom, sched, t_next, y + h * k3)?;
        y = y + h * sixth * (k1 + two * k2 + two * k3 + k4);
        t = t_next;
        if !y.is_finite() {
            return Err(OdeError::NonFinite {
                step,
                t: t.to_f64_lossy(),
            });
        }
        f0 = rhs_at(mode, geom, sched, t, y)?;
        times.push(t);
        alpha1.push(y);
        rhs.push(f0);
    }

    Ok(OdeTrace {
        mode,
        times,
        alpha1,
        rhs,
    })
}

/// First time at which `α₁` reaches zero, linearly interpolated between the
/// bracketing samples. `None` when `α₁` stays positive.
pub fn detect_separation<T: Real>(trace: &OdeTrace<T>) -> Option<T> {
    let a = &trace.alpha1;
    let t = &trace.times;
    if a.is_empty() {
        return None;
    }
    if a[0] <= T::zero() {
        return Some(t[0]);
    }
    for i in 1..a.len() {
        if a[i] == T::zero() {
            return Some(t[i]);
        }
        if a[i] < T::zero() {
            let w = a[i - 1] / (a[i - 1] - a[i]);
            return Some(t[i - 1] + w * (t[i] - t[i - 1]));
        }
    }
    None
}

/// Long-time limit of `α₁` for constant `(α̃₂, α̃₃, η̃)`:
/// `[(2k−λ₀)α̃₂ + α̃₃ + 2η̃ + λ₀β(a sin(aδ) − k cos(aδ))] / (k(k+λ₀))`.
pub fn asymptotic_fixed_point<T: Real>(
    mode: OdeMode,
    geom: &OdeGeometry<T>,
    alpha2: T,
    alpha3: T,
    eta: T,
) -> Result<T, OdeError> {
    let g = match mode {
        OdeMode::Plain => OdeGeometry {
            lambda0: T::zero(),
            beta: T::zero(),
            ..*geom
        },
        OdeMode::Coriolis => {
            geom.check_coriolis()?;
            *geom
        }
    };
    let denom = g.k * (g.k + g.lambda0);
    if !(denom > T::zero()) {
        return Err(OdeError::DegenerateFixedPoint(denom.to_f64_lossy()));
    }
    let two = lit::<T>(2.0);
    let num = (two * g.k - g.lambda0) * alpha2 + alpha3 + two * eta + g.coriolis_forcing();
    Ok(num / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Manifold, ManifoldKind, Obstacle};

    fn flat(k: f64) -> OdeGeometry<f64> {
        OdeGeometry {
            kind: ManifoldKind::Euclidean,
            a: 0.0,
            delta: 1.0 / k,
            k,
            lambda0: 0.0,
            beta: 0.0,
        }
    }

    /// Closed form of the constant-coefficient linear ODE.
    fn analytic(k: f64, f: f64, a0: f64, t: f64) -> f64 {
        f / (k * k) + (a0 - f / (k * k)) * (-k * k * t).exp()
    }

    #[test]
    fn matches_closed_form() {
        let (a2, a3, eta) = (0.3, -0.4, 0.2);
        let k = 1.2;
        let f = a3 + 2.0 * k * a2 + 2.0 * eta;
        let sched = CoefficientSchedule::constant(a2, a3, eta);
        let tr = integrate(OdeMode::Plain, 2.0, &sched, &flat(k), 10.0, 1e-3).unwrap();
        assert_eq!(tr.times.len(), 10_001);
        assert_eq!(*tr.times.last().unwrap(), 10.0);
        for (t, a) in tr.times.iter().zip(&tr.alpha1) {
            let ex = analytic(k, f, 2.0, *t);
            assert!(((a - ex) / ex).abs() < 1e-8);
        }
    }

    #[test]
    fn pure_decay_value() {
        let sched = CoefficientSchedule::constant(0.0, 0.0, 0.0);
        let tr = integrate(OdeMode::Plain, 1.0, &sched, &flat(1.0), 5.0, 1e-3).unwrap();
        let (_, a) = tr.last().unwrap();
        assert!(((a - (-5.0f64).exp()) / (-5.0f64).exp()).abs() < 1e-8);
        assert!((a - 6.7379e-3).abs() < 1e-7);
    }

    #[test]
    fn equilibrium_is_stationary() {
        let k = 1.5;
        let sched = CoefficientSchedule::constant(0.5, 0.25, 0.1);
        let fp = asymptotic_fixed_point(OdeMode::Plain, &flat(k), 0.5, 0.25, 0.1).unwrap();
        let tr = integrate(OdeMode::Plain, fp, &sched, &flat(k), 10.0, 1e-3).unwrap();
        assert!(tr.alpha1.iter().all(|a| (a - fp).abs() < 1e-10));
    }

    #[test]
    fn shortened_last_step() {
        let sched = CoefficientSchedule::constant(0.0, 0.0, 0.0);
        let tr = integrate(OdeMode::Plain, 1.0, &sched, &flat(1.0), 1.05, 0.1).unwrap();
        assert_eq!(tr.times.len(), 12);
        assert_eq!(*tr.times.last().unwrap(), 1.05);
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_bad_inputs() {
        let sched = CoefficientSchedule::constant(0.0, 0.0, 0.0);
        let g = flat(1.0);
        assert!(matches!(
            integrate(OdeMode::Plain, 0.0, &sched, &g, 1.0, 0.1),
            Err(OdeError::NonPositiveInitial(_))
        ));
        assert!(matches!(
            integrate(OdeMode::Plain, 1.0, &sched, &g, 1.0, -0.1),
            Err(OdeError::InvalidSpan { .. })
        ));
        assert!(matches!(
            integrate(OdeMode::Plain, 1.0, &sched, &flat(4.0), 1.0, 0.1),
            Err(OdeError::Stiff(_))
        ));
        let short = CoefficientSchedule::Table {
            t: vec![0.0, 0.5],
            alpha2: vec![0.0, 0.0],
            alpha3: vec![0.0, 0.0],
            eta: vec![0.0, 0.0],
        };
        assert!(matches!(
            integrate(OdeMode::Plain, 1.0, &short, &g, 1.0, 0.1),
            Err(OdeError::ScheduleSpan(_))
        ));
        let mut rot = g;
        rot.beta = 1.0;
        assert!(matches!(
            integrate(OdeMode::Coriolis, 1.0, &sched, &rot, 1.0, 0.1),
            Err(OdeError::CoriolisOffSphere { .. })
        ));
    }

    #[test]
    fn detection_examples() {
        let positive = OdeTrace {
            mode: OdeMode::Plain,
            times: vec![0.0, 1.0, 2.0],
            alpha1: vec![1.0, 1.0, 1.0],
            rhs: vec![0.0; 3],
        };
        assert_eq!(detect_separation(&positive), None);
        let crossing = OdeTrace {
            mode: OdeMode::Plain,
            times: vec![0.0, 1.0],
            alpha1: vec![1.0, -1.0],
            rhs: vec![0.0; 2],
        };
        assert_eq!(detect_separation(&crossing), Some(0.5));
    }

    #[test]
    fn detection_matches_analytic_root() {
        // α₁(t) = F/k² + (α₁(0) − F/k²) e^{−k²t} with F < 0 crosses zero at
        // t* = ln((α₁(0) − F/k²)/(−F/k²)) / k²
        let k: f64 = 1.0;
        let f: f64 = -1.0;
        let a0: f64 = 1.0;
        let t_star = ((a0 - f / (k * k)) / (-f / (k * k))).ln() / (k * k);
        let dt = 1e-2;
        let sched = CoefficientSchedule::constant(0.0, f, 0.0);
        let tr = integrate(OdeMode::Plain, a0, &sched, &flat(k), 2.0, dt).unwrap();
        let t0 = detect_separation(&tr).unwrap();
        assert!((t0 - t_star).abs() <= dt);
        assert!((t_star - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn fixed_point_examples() {
        let g = flat(2.0);
        let fp = asymptotic_fixed_point(OdeMode::Plain, &g, 1.0, 0.5, 0.25).unwrap();
        assert!((fp - (4.0 + 0.5 + 0.5) / 4.0).abs() < 1e-15);

        let m = Manifold::sphere(1.0).unwrap();
        let sg = OdeGeometry::new(&m, &Obstacle::new(1.2).unwrap())
            .unwrap()
            .with_inflow(0.5, 3.0);
        assert!(sg.coriolis_forcing() > 0.0);
        assert!(asymptotic_fixed_point(OdeMode::Coriolis, &sg, 0.0, 0.0, 0.0).unwrap() > 0.0);

        let degenerate = OdeGeometry { k: 1.0, lambda0: -2.0, ..flat(1.0) };
        assert!(matches!(
            asymptotic_fixed_point(OdeMode::Coriolis, &degenerate, 0.0, 0.0, 0.0),
            Err(OdeError::DegenerateFixedPoint(_))
        ));
    }

    #[test]
    fn rk4_fourth_order() {
        let k = 1.5;
        let (a2, a3, eta) = (0.2, 0.1, -0.3);
        let f = a3 + 2.0 * k * a2 + 2.0 * eta;
        let sched = CoefficientSchedule::constant(a2, a3, eta);
        let err = |dt: f64| {
            let tr = integrate(OdeMode::Plain, 1.0, &sched, &flat(k), 2.0, dt).unwrap();
            let (t, a) = tr.last().unwrap();
            (a - analytic(k, f, 1.0, t)).abs()
        };
        let ratio = err(0.2) / err(0.1);
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn trace_csv_header() {
        let sched = CoefficientSchedule::constant(0.0, 0.0, 0.0);
        let tr = integrate(OdeMode::Plain, 1.0, &sched, &flat(1.0), 0.2, 0.1).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf, &["seed=7".to_string()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# seed=7"));
        assert_eq!(lines.next(), Some("t,alpha1,rhs"));
        assert_eq!(lines.count(), 3);
    }
}
