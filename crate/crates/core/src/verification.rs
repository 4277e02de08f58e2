//! Refinement studies shared by the acceptance tests and the `verify` command.

use serde::{Deserialize, Serialize};

use crate::fields::{
    self, boundary_identity_residual, AnnulusGrid, FieldError, IdentityOptions, ScalarField, VelocityField,
};
use crate::geometry::{Manifold, Obstacle};
use crate::manufactured::{exact, Manufactured, Metric, RandomStream, Separable, Trig};

/// Errors at a sequence of grid levels and the observed orders between them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderStudy {
    pub name: String,
    pub h: Vec<f64>,
    pub errors: Vec<f64>,
    pub orders: Vec<f64>,
}

impl OrderStudy {
    pub fn new(name: impl Into<String>, h: Vec<f64>, errors: Vec<f64>) -> Self {
        let orders = h
            .windows(2)
            .zip(errors.windows(2))
            .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
            .collect();
        Self {
            name: name.into(),
            h,
            errors,
            orders,
        }
    }

    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn finest_error(&self) -> f64 {
        self.errors.last().copied().unwrap_or(f64::NAN)
    }
}

/// Annulus used by the default studies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub manifold: Manifold<f64>,
    pub delta: f64,
    pub outer: f64,
}

impl Domain {
    pub fn grid(&self, nr: usize, ntheta: usize) -> Result<AnnulusGrid<f64>, FieldError> {
        AnnulusGrid::new(self.manifold, Obstacle::new(self.delta)?, self.outer, nr, ntheta)
    }

    /// Euclidean δ=1, R=2; sphere a=1, δ=π/6, R=π/2; hyperbolic a=1, δ=1, R=2.
    pub fn standard() -> [Domain; 3] {
        [
            Domain {
                manifold: Manifold::euclidean(),
                delta: 1.0,
                outer: 2.0,
            },
            Domain {
                manifold: Manifold::sphere(1.0).expect("a > 0"),
                delta: std::f64::consts::FRAC_PI_6,
                outer: std::f64::consts::FRAC_PI_2,
            },
            Domain {
                manifold: Manifold::hyperbolic(1.0).expect("a > 0"),
                delta: 1.0,
                outer: 2.0,
            },
        ]
    }
}

/// A general smooth (not divergence-free) field plus a smooth pressure.
pub fn smooth_test_data(domain: &Domain, seed: u64) -> (Manufactured<f64>, Separable<f64>) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut sep = || {
        let mut f = Separable::new(domain.delta);
        for m in 0..=2 {
            for trig in [Trig::Cos, Trig::Sin] {
                if m == 0 && trig == Trig::Sin {
                    continue;
                }
                let poly = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
                f = f.with(poly, false, m, trig);
            }
        }
        f
    };
    let ur = sep();
    let ut = sep();
    let p = sep();
    (
        Manufactured {
            manifold: domain.manifold,
            ur,
            utheta: ut,
        },
        p,
    )
}

fn max_interior_error(g: &AnnulusGrid<f64>, num: &[f64], exact: &[f64]) -> f64 {
    let nt = g.ntheta;
    num[nt..(g.nr - 1) * nt]
        .iter()
        .zip(&exact[nt..(g.nr - 1) * nt])
        .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

type Exact = fn(&Metric<f64>, &crate::manufactured::Partials<f64>, &crate::manufactured::Partials<f64>) -> f64;

/// Interior max-norm errors of every operator on one grid.
pub fn operator_errors(
    g: &AnnulusGrid<f64>,
    u: &Manufactured<f64>,
    p: &Separable<f64>,
) -> Result<Vec<(&'static str, f64)>, FieldError> {
    let f = u.sample(g);
    let mut out = Vec::new();
    let mut push = |name: &'static str, num: ScalarField<f64>, op: Exact| {
        let ex = u.sample_exact(g, op);
        out.push((name, max_interior_error(g, &num.values, &ex.values)));
    };
    push("divergence", fields::divergence(&f, g)?, exact::divergence);
    push("vorticity", fields::vorticity(&f, g)?, exact::vorticity);
    push("laplacian_normal", fields::laplacian_normal(&f, g)?, exact::laplacian_normal);
    push("laplacian_tangential", fields::laplacian_tangential(&f, g)?, exact::laplacian_tangential);
    let split = |v: VelocityField<f64>| {
        (
            ScalarField {
                nr: v.nr,
                ntheta: v.ntheta,
                values: v.ur,
            },
            ScalarField {
                nr: v.nr,
                ntheta: v.ntheta,
                values: v.utheta,
            },
        )
    };
    let (h1, h2) = split(fields::vector_laplacian(&f, g)?);
    push("hodge_laplacian_e1", h1, |m, a, b| exact::hodge_laplacian(m, a, b).0);
    push("hodge_laplacian_e2", h2, |m, a, b| exact::hodge_laplacian(m, a, b).1);
    let (c1, c2) = split(fields::convection_full(&f, g)?);
    push("convection_e1", c1, |m, a, b| exact::convection(m, a, b).0);
    push("convection_e2", c2, |m, a, b| exact::convection(m, a, b).1);

    let ps = p.sample(g);
    let (g1, g2) = split(fields::pressure_gradient(&ps, g)?);
    let man = g.manifold;
    let grad_exact = |comp: usize| {
        ScalarField::from_fn(g, |r, th| {
            let e = exact::gradient(&Metric::at(&man, r), &p.partials(&man, r, th));
            if comp == 0 {
                e.0
            } else {
                e.1
            }
        })
    };
    out.push(("pressure_gradient_e1", max_interior_error(g, &g1.values, &grad_exact(0).values)));
    out.push(("pressure_gradient_e2", max_interior_error(g, &g2.values, &grad_exact(1).values)));
    Ok(out)
}

/// Operator refinement study on `n×n` grids for each `n` in `sizes`.
pub fn operator_convergence(domain: &Domain, sizes: &[usize], seed: u64) -> Result<Vec<OrderStudy>, FieldError> {
    let (u, p) = smooth_test_data(domain, seed);
    let mut hs = Vec::new();
    let mut per_level = Vec::new();
    for &n in sizes {
        let g = domain.grid(n + 1, n)?;
        hs.push(g.hr);
        per_level.push(operator_errors(&g, &u, &p)?);
    }
    let names: Vec<&str> = per_level[0].iter().map(|(n, _)| *n).collect();
    Ok(names
        .iter()
        .enumerate()
        .map(|(k, name)| OrderStudy::new(*name, hs.clone(), per_level.iter().map(|lvl| lvl[k].1).collect()))
        .collect())
}

/// No-slip divergence-free field from a seeded stream function.
pub fn stream_field(domain: &Domain, seed: u64) -> Manufactured<f64> {
    Manufactured::random_stream(
        domain.manifold,
        &RandomStream {
            delta: domain.delta,
            outer: None,
            max_mode: 2,
            degree: 1,
            amplitude: 1.0,
            seed,
        },
    )
}

/// Refinement of `|boundary_identity_residual|`, maximised over all wall nodes.
///
/// With `inflow = Some((λ₀, β))` the field gets `u_r += λ₀` and the
/// Coriolis form of the identity is checked.
pub fn identity_convergence(
    domain: &Domain,
    sizes: &[usize],
    seed: u64,
    inflow: Option<(f64, f64)>,
) -> Result<OrderStudy, FieldError> {
    let mut u = stream_field(domain, seed);
    if let Some((l, _)) = inflow {
        u = u.with_inflow(l);
    }
    let opts = IdentityOptions {
        boundary_tol: 1e-12,
        inflow,
        ..IdentityOptions::default()
    };
    let mut hs = Vec::new();
    let mut errs = Vec::new();
    for &n in sizes {
        let g = domain.grid(n, n)?;
        let f = u.sample(&g);
        let mut worst: f64 = 0.0;
        for j in 0..g.ntheta {
            worst = worst.max(boundary_identity_residual(&f, &g, j, &opts)?.residual.abs());
        }
        hs.push(g.hr);
        errs.push(worst);
    }
    let name = if inflow.is_some() { "coriolis_identity" } else { "plain_identity" };
    Ok(OrderStudy::new(name, hs, errs))
}

/// Checks the verification battery can run; `verify` selects a subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Geometry,
    Ode,
    Operators,
    Identity,
    Coriolis,
    Solver,
    EuclideanLimit,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Geometry,
        Suite::Ode,
        Suite::Operators,
        Suite::Identity,
        Suite::Coriolis,
        Suite::Solver,
        Suite::EuclideanLimit,
    ];
}

/// Pass thresholds of the battery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// `|c² + κs² − 1|` in units of `ε·max(1, c²)`.
    pub curvature_ulps: f64,
    pub ode_rel_error: f64,
    /// RK4 error ratio under `dt → dt/2` must fall in this range.
    pub ode_ratio: (f64, f64),
    pub fixed_point: f64,
    pub operator_order: (f64, f64),
    pub identity_order: f64,
    pub identity_abs: f64,
    pub coriolis_order: f64,
    pub pde_ode_order: f64,
    pub divergence: f64,
    pub euclidean_limit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            curvature_ulps: 4.0,
            ode_rel_error: 1e-8,
            ode_ratio: (12.0, 20.0),
            fixed_point: 1e-6,
            operator_order: (1.8, 2.2),
            identity_order: 1.8,
            identity_abs: 1e-3,
            coriolis_order: 1.8,
            pde_ode_order: 1.0,
            divergence: 1e-10,
            euclidean_limit: 1e-6,
        }
    }
}

/// Document read by `verify --config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub suites: Vec<Suite>,
    pub tolerances: Tolerances,
    /// Operator and identity studies use `base_n · 2^k`, `k < levels`.
    pub base_n: usize,
    /// Solver studies use `solver_base_n · 2^k` radial and angular nodes.
    pub solver_base_n: usize,
    pub solver_t_end: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            suites: Suite::ALL.to_vec(),
            tolerances: Tolerances::default(),
            base_n: 32,
            solver_base_n: 16,
            solver_t_end: 0.03,
        }
    }
}

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: Suite,
    pub name: String,
    pub measured: f64,
    pub criterion: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub study: Option<OrderStudy>,
}

impl CheckResult {
    fn new(suite: Suite, name: impl Into<String>, measured: f64, criterion: String, passed: bool) -> Self {
        Self {
            suite,
            name: name.into(),
            measured,
            criterion,
            passed,
            study: None,
        }
    }

    fn order_band(suite: Suite, study: OrderStudy, lo: f64, hi: f64) -> Self {
        let (min, max) = (study.min_order(), study.max_order());
        let passed = min >= lo && max <= hi;
        let measured = if min < lo || max <= hi { min } else { max };
        Self {
            suite,
            name: study.name.clone(),
            measured,
            criterion: format!("order in [{lo}, {hi}]"),
            passed,
            study: Some(study),
        }
    }

    fn order_at_least(suite: Suite, study: OrderStudy, lo: f64) -> Self {
        let min = study.min_order();
        Self {
            suite,
            name: study.name.clone(),
            measured: min,
            criterion: format!("order >= {lo}"),
            passed: min >= lo,
            study: Some(study),
        }
    }
}

/// `n·2^k` for `k < levels`.
pub fn level_sizes(base: usize, levels: usize) -> Vec<usize> {
    (0..levels.max(2)).map(|k| base << k).collect()
}

/// Runs the selected suites; errors inside a check become failed lines.
pub fn run_battery(cfg: &VerifyConfig, seed: u64, levels: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for &suite in &cfg.suites {
        let res = match suite {
            Suite::Geometry => geometry_checks(&cfg.tolerances, seed),
            Suite::Ode => ode_checks(&cfg.tolerances),
            Suite::Operators => operator_checks(cfg, seed, levels),
            Suite::Identity => identity_checks(cfg, seed, levels, false),
            Suite::Coriolis => identity_checks(cfg, seed, levels, true),
            Suite::Solver => solver_checks(cfg, levels),
            Suite::EuclideanLimit => euclidean_limit_checks(&cfg.tolerances, seed),
        };
        match res {
            Ok(mut v) => out.append(&mut v),
            Err(e) => out.push(CheckResult::new(suite, "error", f64::NAN, e, false)),
        }
    }
    out
}

type Checks = Result<Vec<CheckResult>, String>;

fn geometry_checks(tol: &Tolerances, seed: u64) -> Checks {
    use crate::geometry::pythagorean_defect;
    use rand::{Rng, SeedableRng};
    let mut out = Vec::new();

    let d = Domain::standard()[1];
    let g = d.grid(17, 16).map_err(|e| e.to_string())?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let u = VelocityField::from_fn(&g, |_, _| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let back = fields::hodge_star_1form(&fields::hodge_star_1form(&u));
    let defect = back.axpy(1.0, &u).max_speed();
    out.push(CheckResult::new(
        Suite::Geometry,
        "hodge_star_squared",
        defect,
        "**u + u == 0 exactly".into(),
        defect == 0.0,
    ));

    let mut worst: f64 = 0.0;
    for m in [
        Manifold::<f64>::sphere(1.0).expect("a > 0"),
        Manifold::sphere(0.3).expect("a > 0"),
        Manifold::hyperbolic(1.0).expect("a > 0"),
        Manifold::hyperbolic(2.5).expect("a > 0"),
        Manifold::euclidean(),
    ] {
        let top = m.chart_limit().min(2.0) * 0.999;
        for i in 1..=200 {
            let r = top * i as f64 / 200.0;
            let c = m.c(r);
            let ulps = pythagorean_defect(&m, r).abs() / (f64::EPSILON * (c * c).max(1.0));
            worst = worst.max(ulps);
        }
    }
    out.push(CheckResult::new(
        Suite::Geometry,
        "pythagorean_identity_ulps",
        worst,
        format!("<= {}", tol.curvature_ulps),
        worst <= tol.curvature_ulps,
    ));
    Ok(out)
}

fn ode_checks(tol: &Tolerances) -> Checks {
    use crate::separation::{integrate, sweep_cell, CoefficientSchedule, OdeGeometry, OdeMode};
    let e = |e: crate::separation::OdeError| e.to_string();
    let mut out = Vec::new();

    // α₁' = −k²α₁ + F with F = α₃ + 2kα₂ + 2η
    let obs = Obstacle::new(1.0).map_err(|x| x.to_string())?;
    let m = Manifold::euclidean();
    let geom = OdeGeometry::new(&m, &obs).map_err(e)?;
    let (a2, a3, eta, a10) = (0.4, -0.3, 0.25, 2.0);
    let sched = CoefficientSchedule::constant(a2, a3, eta);
    let k = geom.k;
    let f = a3 + 2.0 * k * a2 + 2.0 * eta;
    let exact = |t: f64| f / (k * k) + (a10 - f / (k * k)) * (-k * k * t).exp();
    let max_err = |dt: f64, rel: bool| -> Result<f64, String> {
        let tr = integrate(OdeMode::Plain, a10, &sched, &geom, 10.0, dt).map_err(e)?;
        Ok(tr
            .times
            .iter()
            .zip(&tr.alpha1)
            .map(|(&t, &y)| {
                let d = (y - exact(t)).abs();
                if rel {
                    d / exact(t).abs()
                } else {
                    d
                }
            })
            .fold(0.0, f64::max))
    };
    let rel = max_err(1e-3, true)?;
    out.push(CheckResult::new(
        Suite::Ode,
        "analytic_constant_coefficients",
        rel,
        format!("relative error < {:e}", tol.ode_rel_error),
        rel < tol.ode_rel_error,
    ));
    let ratio = max_err(0.2, false)? / max_err(0.1, false)?;
    out.push(CheckResult::new(
        Suite::Ode,
        "rk4_halving_ratio",
        ratio,
        format!("in [{}, {}]", tol.ode_ratio.0, tol.ode_ratio.1),
        (tol.ode_ratio.0..=tol.ode_ratio.1).contains(&ratio),
    ));

    // fixed point on the sphere with k(k+λ₀) ≥ 1
    let sphere = Manifold::sphere(1.0).map_err(|x| x.to_string())?;
    let sg = OdeGeometry::new(&sphere, &Obstacle::new(0.6).map_err(|x| x.to_string())?).map_err(e)?;
    let cell = sweep_cell(&sg, 0.5, 2.0, &sched, 1.0, 40.0, 1e-3).map_err(e)?;
    let gap = match cell.alpha1_star {
        Some(star) => {
            let tr = integrate(OdeMode::Coriolis, 1.0, &sched, &sg.with_inflow(0.5, 2.0), 40.0, 1e-3).map_err(e)?;
            (tr.alpha1.last().copied().unwrap_or(f64::NAN) - star).abs()
        }
        None => f64::NAN,
    };
    out.push(CheckResult::new(
        Suite::Ode,
        "asymptotic_fixed_point",
        gap,
        format!("|alpha1(40) - alpha1*| < {:e}", tol.fixed_point),
        gap < tol.fixed_point,
    ));

    let (worst, all) = never_zero_sweep().map_err(e)?;
    out.push(CheckResult::new(
        Suite::Ode,
        "never_zero_sweep_min_alpha1",
        worst,
        "forcing dominates and min alpha1 > 0 in all 100 cells".into(),
        all && worst > 0.0,
    ));
    Ok(out)
}

/// 10×10 `(λ₀, β)` cells in the regime `λ₀(a sin aδ − k cos aδ) > 0`, `β` large;
/// returns the smallest `α₁` seen and whether forcing dominated in every cell.
pub fn never_zero_sweep() -> Result<(f64, bool), crate::separation::OdeError> {
    use crate::separation::{sweep_cell, CoefficientSchedule, OdeGeometry};
    let sphere = Manifold::sphere(1.0)?;
    // δ = π/6: a sin aδ − k cos aδ = −1, so suction λ₀ < 0 gives positive forcing
    let geom = OdeGeometry::new(&sphere, &Obstacle::new(std::f64::consts::FRAC_PI_6)?)?;
    let sched = CoefficientSchedule::constant(-0.5, -2.0, -0.4);
    let mut worst = f64::INFINITY;
    let mut all = true;
    for i in 0..10 {
        let lambda0 = -0.2 - 0.1 * i as f64;
        for jb in 0..10 {
            let beta = 80.0 + 10.0 * jb as f64;
            let c = sweep_cell(&geom, lambda0, beta, &sched, 0.5, 10.0, 1e-2)?;
            all &= c.forcing_dominates() && c.t0.is_none();
            worst = worst.min(c.min_alpha1);
        }
    }
    Ok((worst, all))
}

fn operator_checks(cfg: &VerifyConfig, seed: u64, levels: usize) -> Checks {
    let tol = &cfg.tolerances;
    let sizes = level_sizes(cfg.base_n, levels);
    let mut out = Vec::new();
    for d in Domain::standard() {
        let studies = operator_convergence(&d, &sizes, seed).map_err(|e| e.to_string())?;
        for mut s in studies {
            s.name = format!("{}:{}", d.manifold.kind, s.name);
            out.push(CheckResult::order_band(Suite::Operators, s, tol.operator_order.0, tol.operator_order.1));
        }
        let study = divfree_laplacian_agreement(&d, &sizes, seed).map_err(|e| e.to_string())?;
        out.push(CheckResult::order_band(Suite::Operators, study, tol.operator_order.0, tol.operator_order.1));
    }
    Ok(out)
}

/// Refinement of `max|Δ₁ − Δ₁'|` between the general and divergence-free
/// forms of the normal Laplacian on a stream-function field.
pub fn divfree_laplacian_agreement(domain: &Domain, sizes: &[usize], seed: u64) -> Result<OrderStudy, FieldError> {
    let u = stream_field(domain, seed);
    let mut hs = Vec::new();
    let mut errs = Vec::new();
    for &n in sizes {
        let g = domain.grid(n + 1, n)?;
        let f = u.sample(&g);
        let a = fields::laplacian_normal(&f, &g)?;
        let b = fields::laplacian_normal_divfree(&f, &g)?;
        let nt = g.ntheta;
        let worst = a.values[nt..(g.nr - 1) * nt]
            .iter()
            .zip(&b.values[nt..(g.nr - 1) * nt])
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        hs.push(g.hr);
        errs.push(worst);
    }
    Ok(OrderStudy::new(
        format!("{}:laplacian_forms_agree", domain.manifold.kind),
        hs,
        errs,
    ))
}

fn identity_checks(cfg: &VerifyConfig, seed: u64, levels: usize, coriolis: bool) -> Checks {
    let tol = &cfg.tolerances;
    let sizes = level_sizes(cfg.base_n, levels);
    let mut out = Vec::new();
    for d in Domain::standard() {
        let inflow = if coriolis {
            let beta = if d.manifold.kind == crate::geometry::ManifoldKind::Sphere { 2.0 } else { 0.0 };
            Some((0.7, beta))
        } else {
            None
        };
        let mut s = identity_convergence(&d, &sizes, seed, inflow).map_err(|e| e.to_string())?;
        s.name = format!("{}:{}", d.manifold.kind, s.name);
        let finest = s.finest_error();
        if coriolis {
            out.push(CheckResult::order_at_least(Suite::Coriolis, s, tol.coriolis_order));
        } else {
            let name = format!("{}:finest_residual", s.name);
            out.push(CheckResult::order_at_least(Suite::Identity, s, tol.identity_order));
            out.push(CheckResult::new(
                Suite::Identity,
                name,
                finest,
                format!("< {:e}", tol.identity_abs),
                finest < tol.identity_abs,
            ));
        }
    }
    Ok(out)
}

/// Driven no-slip run `U(θ) = 1 + 0.3 cos θ` on `domain` with `n×n` nodes.
pub fn driven_config(domain: &Domain, n: usize, t_end: f64) -> crate::solver::SolverConfig<f64> {
    use crate::solver::{InitialField, OuterCondition, SolverConfig, TangentialProfile};
    let mut c = SolverConfig::new(
        fields::GridSpec {
            manifold: domain.manifold,
            delta: domain.delta,
            outer_radius: domain.outer,
            nr: n,
            ntheta: n,
        },
        t_end,
    );
    c.outer = OuterCondition::PrescribedTangential {
        profile: TangentialProfile {
            mean: 1.0,
            cos: vec![0.3],
            sin: vec![],
        },
    };
    c.initial = InitialField::Matched;
    c
}

/// Final-time ODE residual of driven runs under `(h, dt) → (h/2, dt/4)`,
/// plus the largest interior divergence over all runs.
pub fn pde_ode_study(domain: &Domain, sizes: &[usize], t_end: f64) -> Result<(OrderStudy, f64), crate::solver::SolverError> {
    use crate::solver::{run, Solver};
    let mut hs = Vec::new();
    let mut res = Vec::new();
    let mut div: f64 = 0.0;
    let mut dt = 0.0;
    for (lvl, &n) in sizes.iter().enumerate() {
        let mut c = driven_config(domain, n, t_end);
        let s = Solver::new(&c)?;
        dt = if lvl == 0 { 0.9 * s.diffusive_limit() } else { dt / 4.0 };
        c.dt = Some(dt);
        let rec = run(&c, std::path::Path::new("."))?;
        div = rec.steps.iter().map(|s| s.divergence).fold(div, f64::max);
        hs.push(s.grid.hr);
        res.push(rec.last().residual);
    }
    Ok((OrderStudy::new(format!("{}:pde_ode_residual", domain.manifold.kind), hs, res), div))
}

fn solver_checks(cfg: &VerifyConfig, levels: usize) -> Checks {
    let tol = &cfg.tolerances;
    let sizes = level_sizes(cfg.solver_base_n, levels);
    let mut out = Vec::new();
    for d in Domain::standard() {
        let (study, div) = pde_ode_study(&d, &sizes, cfg.solver_t_end).map_err(|e| e.to_string())?;
        let name = format!("{}:max_divergence", d.manifold.kind);
        out.push(CheckResult::order_at_least(Suite::Solver, study, tol.pde_ode_order));
        out.push(CheckResult::new(
            Suite::Solver,
            name,
            div,
            format!("< {:e}", tol.divergence),
            div < tol.divergence,
        ));
    }
    Ok(out)
}

/// Largest relative difference between every operator (and the ODE
/// right-hand side) at curvature scale `a = 1e-6` and on the flat plane.
pub fn euclidean_limit_defect(seed: u64) -> Result<f64, FieldError> {
    use crate::separation::{rhs_coriolis, OdeGeometry};
    let flat = Domain {
        manifold: Manifold::euclidean(),
        delta: 1.0,
        outer: 2.0,
    };
    let mut worst: f64 = 0.0;
    for curved in [Manifold::sphere(1e-6)?, Manifold::hyperbolic(1e-6)?] {
        let bent = Domain { manifold: curved, ..flat };
        let (u, p) = smooth_test_data(&flat, seed);
        let g0 = flat.grid(33, 32)?;
        let g1 = bent.grid(33, 32)?;
        let sample = |g: &AnnulusGrid<f64>| {
            let mut f = u.sample(g);
            // keep the same nodal data on both grids
            f.ur = u.sample(&g0).ur;
            f.utheta = u.sample(&g0).utheta;
            f
        };
        let (f0, f1) = (sample(&g0), sample(&g1));
        let ps = p.sample(&g0);
        let mut cmp = |a: Vec<f64>, b: Vec<f64>| {
            let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
            let d = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            worst = worst.max(d / scale);
        };
        cmp(fields::divergence(&f1, &g1)?.values, fields::divergence(&f0, &g0)?.values);
        cmp(fields::vorticity(&f1, &g1)?.values, fields::vorticity(&f0, &g0)?.values);
        cmp(fields::laplacian_normal(&f1, &g1)?.values, fields::laplacian_normal(&f0, &g0)?.values);
        cmp(fields::laplacian_tangential(&f1, &g1)?.values, fields::laplacian_tangential(&f0, &g0)?.values);
        let (h1, h0) = (fields::vector_laplacian(&f1, &g1)?, fields::vector_laplacian(&f0, &g0)?);
        cmp(h1.ur, h0.ur);
        cmp(h1.utheta, h0.utheta);
        let (c1, c0) = (fields::convection_full(&f1, &g1)?, fields::convection_full(&f0, &g0)?);
        cmp(c1.ur, c0.ur);
        cmp(c1.utheta, c0.utheta);
        let (q1, q0) = (fields::pressure_gradient(&ps, &g1)?, fields::pressure_gradient(&ps, &g0)?);
        cmp(q1.ur, q0.ur);
        cmp(q1.utheta, q0.utheta);

        let obs = Obstacle::new(1.0)?;
        let k0 = OdeGeometry::new(&flat.manifold, &obs)?.coefficients(0.8, -0.3, 0.5, 0.2);
        let k1 = OdeGeometry::new(&curved, &obs)?.coefficients(0.8, -0.3, 0.5, 0.2);
        cmp(vec![rhs_coriolis(&k1)?], vec![rhs_coriolis(&k0)?]);
    }
    Ok(worst)
}

fn euclidean_limit_checks(tol: &Tolerances, seed: u64) -> Checks {
    let d = euclidean_limit_defect(seed).map_err(|e| e.to_string())?;
    Ok(vec![CheckResult::new(
        Suite::EuclideanLimit,
        "a=1e-6_vs_flat",
        d,
        format!("relative difference < {:e}", tol.euclidean_limit),
        d < tol.euclidean_limit,
    )])
}
