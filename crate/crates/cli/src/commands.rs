use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use layersep::fields::write_field_csv;
use layersep::geometry::{Manifold, Obstacle};
use layersep::separation::{
    asymptotic_fixed_point, classify_profile, classify_streamlines, detect_separation, integrate, sweep_cell,
    CoefficientSchedule, OdeGeometry, OdeMode, ProfileClass, StreamlineClass, DEFAULT_ETA_TOL, DEFAULT_SMALLNESS,
};
use layersep::solver::{run, Solver};
use layersep::SolverConfig64;
use layersep::verification::{run_battery, CheckResult, Suite, VerifyConfig};

use crate::error::CliError;
use crate::output::{self, num};
use crate::Manifest;

fn default_dt() -> f64 {
    1e-3
}

fn default_alpha1() -> f64 {
    1.0
}

fn default_smallness() -> f64 {
    DEFAULT_SMALLNESS
}

fn default_eta_tol() -> f64 {
    DEFAULT_ETA_TOL
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeConfig {
    pub manifold: Manifold<f64>,
    pub delta: f64,
    #[serde(default)]
    pub lambda0: f64,
    #[serde(default)]
    pub beta: f64,
    /// Defaults to `coriolis` when `λ₀` or `β` is nonzero.
    #[serde(default)]
    pub mode: Option<OdeMode>,
    #[serde(default = "default_alpha1")]
    pub alpha1_0: f64,
    pub schedule: CoefficientSchedule<f64>,
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_smallness")]
    pub smallness: f64,
    #[serde(default = "default_eta_tol")]
    pub eta_tol: f64,
}

impl OdeConfig {
    fn mode(&self) -> OdeMode {
        self.mode.unwrap_or(if self.lambda0 != 0.0 || self.beta != 0.0 {
            OdeMode::Coriolis
        } else {
            OdeMode::Plain
        })
    }

    fn geometry(&self) -> Result<OdeGeometry<f64>, CliError> {
        let g = OdeGeometry::new(&self.manifold, &Obstacle::new(self.delta).map_err(|e| CliError::Config(e.to_string()))?)?
            .with_inflow(self.lambda0, self.beta);
        if self.mode() == OdeMode::Plain && (self.lambda0 != 0.0 || self.beta != 0.0) {
            return Err(CliError::Config("mode \"plain\" ignores lambda0 and beta; set them to 0".into()));
        }
        g.check_coriolis()?;
        Ok(g)
    }
}

#[derive(Debug, Serialize)]
struct Classification {
    t: f64,
    streamlines: StreamlineClass,
    profile: ProfileClass,
}

#[derive(Debug, Serialize)]
struct OdeSummary {
    mode: OdeMode,
    k: f64,
    /// First zero of `α₁`, `null` if none before `t_end`.
    t0: Option<f64>,
    alpha1_star: Option<f64>,
    alpha1_final: f64,
    min_alpha1: f64,
    steps: usize,
    classifications: Vec<Classification>,
}

pub fn ode(m: &Manifest) -> Result<(), CliError> {
    let r = output::load::<OdeConfig>(m)?;
    let c = &r.config;
    let g = c.geometry()?;
    let mode = c.mode();
    let trace = integrate(mode, c.alpha1_0, &c.schedule, &g, c.t_end, c.dt)?;
    let t0 = detect_separation(&trace);
    let alpha1_star = c
        .schedule
        .constant_values()
        .and_then(|(a2, a3, eta)| asymptotic_fixed_point(mode, &g, a2, a3, eta).ok());

    let mut classifications = Vec::new();
    let (t_last, a_last) = trace.last().unwrap_or((0.0, c.alpha1_0));
    for (t, a1) in [(0.0, c.alpha1_0), (t_last, a_last)] {
        let (a2, a3, eta) = c.schedule.eval(t)?;
        classifications.push(Classification {
            t,
            streamlines: classify_streamlines(eta, c.eta_tol),
            profile: classify_profile(&g.coefficients(a1, a2, a3, eta), c.smallness)?,
        });
    }
    let summary = OdeSummary {
        mode,
        k: g.k,
        t0,
        alpha1_star,
        alpha1_final: a_last,
        min_alpha1: trace.min_alpha1().unwrap_or(c.alpha1_0),
        steps: trace.times.len() - 1,
        classifications,
    };

    let header = r.header("ode", m.seed);
    let mut w = output::create(&m.out, "ode_trace.csv")?;
    trace.write_csv(&mut w, &header)?;
    w.flush()?;
    output::write_json(&m.out, "ode_summary.json", &header, &summary)?;
    m.say(format!(
        "ode: {} steps, k = {:.6}, t0 = {}, alpha1* = {}",
        summary.steps,
        g.k,
        t0.map_or("none".into(), |t| format!("{t:.6}")),
        alpha1_star.map_or("n/a".into(), |a| format!("{a:.6}")),
    ));
    Ok(())
}

pub fn simulate(m: &Manifest) -> Result<(), CliError> {
    let r = output::load::<SolverConfig64>(m)?;
    let c = &r.config;
    c.validate()?;
    let rec = run(c, &r.base)?;
    let header = r.header("simulate", m.seed);

    let mut w = output::create(&m.out, "record.csv")?;
    rec.write_csv(&mut w, &header)?;
    w.flush()?;
    let mut w = output::create(&m.out, "diagnostics.csv")?;
    rec.write_diagnostics_csv(&mut w, &header)?;
    w.flush()?;
    if !rec.snapshots.is_empty() {
        let g = Solver::new(c)?.grid;
        let dir = m.out.join("snapshots");
        for s in &rec.snapshots {
            let mut w = output::create(&dir, &format!("step_{:06}.csv", s.step))?;
            let mut h = header.clone();
            h.push(format!("t {}", num(s.t)));
            write_field_csv(&mut w, &s.field, &g, &h).map_err(|e| CliError::Config(e.to_string()))?;
            w.flush()?;
        }
    }

    let last = rec.last();
    let alpha1: Vec<f64> = rec.steps.iter().map(|s| s.coefficients.alpha1).collect();
    let t0 = alpha1
        .windows(2)
        .zip(rec.steps.windows(2))
        .find(|(a, _)| a[0] > 0.0 && a[1] <= 0.0)
        .map(|(a, s)| s[0].t + (s[1].t - s[0].t) * a[0] / (a[0] - a[1]));
    let summary = serde_json::json!({
        "dt": rec.dt,
        "steps": rec.steps.len() - 1,
        "t_end": last.t,
        "alpha1_final": last.coefficients.alpha1,
        "t0": t0,
        "max_residual": rec.max_residual(),
        "max_divergence": rec.steps.iter().map(|s| s.divergence).fold(0.0, f64::max),
        "final_energy": last.energy,
        "snapshots": rec.snapshots.len(),
    });
    output::write_json(&m.out, "simulation_summary.json", &header, &summary)?;
    m.say(format!(
        "simulate: {} steps of dt = {:.3e}, alpha1(t_end) = {:.6}, max ODE residual {:.3e}",
        rec.steps.len() - 1,
        rec.dt,
        last.coefficients.alpha1,
        rec.max_residual()
    ));
    Ok(())
}

fn check_row(c: &CheckResult) -> String {
    format!(
        "{:?},{},{},\"{}\",{}",
        c.suite,
        c.name,
        num(c.measured),
        c.criterion.replace('"', "'"),
        c.passed
    )
    .to_lowercase()
}

/// `verify`, or with `operators_only` the `operators-check` subset.
pub fn verify(m: &Manifest, operators_only: bool) -> Result<(), CliError> {
    let mut r = output::load_or_default::<VerifyConfig>(m)?;
    if operators_only {
        r.config.suites = vec![Suite::Operators];
    }
    if m.levels < 2 {
        return Err(CliError::Config(format!("--levels must be at least 2, got {}", m.levels)));
    }
    let command = if operators_only { "operators-check" } else { "verify" };
    let checks = run_battery(&r.config, m.seed, m.levels);
    let header = r.header(command, m.seed);

    let mut w = output::create(&m.out, &format!("{command}.csv"))?;
    for h in &header {
        writeln!(w, "# {h}")?;
    }
    writeln!(w, "suite,name,measured,criterion,passed")?;
    for c in &checks {
        writeln!(w, "{}", check_row(c))?;
    }
    w.flush()?;
    output::write_json(&m.out, &format!("{command}.json"), &header, &serde_json::json!({ "checks": checks }))?;

    for c in &checks {
        let tag = if c.passed { "pass" } else { "FAIL" };
        m.say(format!("{tag} {:?} {}: {:.4e} ({})", c.suite, c.name, c.measured, c.criterion));
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    m.say(format!("{command}: {} of {} checks passed", checks.len() - failed.len(), checks.len()));
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{} check(s) failed: {}", failed.len(), failed.join(", "))))
    }
}

/// An explicit list or `count` evenly spaced values from `start` to `stop`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Axis {
    Values { values: Vec<f64> },
    Range { start: f64, stop: f64, count: usize },
}

impl Axis {
    fn points(&self) -> Vec<f64> {
        match self {
            Axis::Values { values } => values.clone(),
            Axis::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub manifold: Manifold<f64>,
    pub delta: f64,
    pub lambda0: Axis,
    pub beta: Axis,
    #[serde(default = "default_alpha1")]
    pub alpha1_0: f64,
    pub schedule: CoefficientSchedule<f64>,
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

pub fn sweep(m: &Manifest) -> Result<(), CliError> {
    let r = output::load::<SweepConfig>(m)?;
    let c = &r.config;
    let (lambdas, betas) = (c.lambda0.points(), c.beta.points());
    if let Some(v) = lambdas.iter().chain(&betas).find(|v| !v.is_finite()) {
        return Err(CliError::Config(format!("sweep axes must be finite, found {v}")));
    }
    if lambdas.is_empty() || betas.is_empty() {
        return Err(CliError::Config("sweep axes must not be empty".into()));
    }
    let geom = OdeGeometry::new(&c.manifold, &Obstacle::new(c.delta).map_err(|e| CliError::Config(e.to_string()))?)?;
    let cells: Vec<(f64, f64)> = lambdas.iter().flat_map(|&l| betas.iter().map(move |&b| (l, b))).collect();
    // par_iter().collect() keeps cell order whatever the completion order
    let results = cells
        .par_iter()
        .map(|&(l, b)| sweep_cell(&geom, l, b, &c.schedule, c.alpha1_0, c.t_end, c.dt))
        .collect::<Result<Vec<_>, _>>()?;

    let header = r.header("sweep", m.seed);
    let mut w = output::create(&m.out, "sweep.csv")?;
    for h in &header {
        writeln!(w, "# {h}")?;
    }
    writeln!(w, "lambda0,beta,t0_or_inf,alpha1_star")?;
    for cell in &results {
        let t0 = cell.t0.map_or("inf".to_string(), num);
        let star = cell.alpha1_star.map_or("nan".to_string(), num);
        writeln!(w, "{},{},{t0},{star}", num(cell.lambda0), num(cell.beta))?;
    }
    w.flush()?;
    let never = results.iter().filter(|c| c.t0.is_none()).count();
    m.say(format!("sweep: {} cells, {never} never separate before t_end = {}", results.len(), c.t_end));
    Ok(())
}
