use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};
use std::path::Path;

use layersep::fields::*;
use layersep::geometry::Manifold;
use layersep::manufactured::{Manufactured, RandomStream, TimeFactor};
use layersep::solver::*;
use layersep::verification::OrderStudy;

fn euclid_spec(n: usize) -> GridSpec<f64> {
    GridSpec {
        manifold: Manifold::euclidean(),
        delta: 1.0,
        outer_radius: 2.0,
        nr: n,
        ntheta: n,
    }
}

fn sphere_spec(n: usize) -> GridSpec<f64> {
    GridSpec {
        manifold: Manifold::sphere(1.0).unwrap(),
        delta: FRAC_PI_6,
        outer_radius: FRAC_PI_2,
        nr: n,
        ntheta: n,
    }
}

fn driven(spec: GridSpec<f64>, t_end: f64) -> SolverConfig<f64> {
    let mut c = SolverConfig::new(spec, t_end);
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

fn stream(spec: &GridSpec<f64>, seed: u64, amplitude: f64) -> Manufactured<f64> {
    Manufactured::random_stream(
        spec.manifold,
        &RandomStream {
            delta: spec.delta,
            outer: Some(spec.outer_radius),
            max_mode: 3,
            degree: 2,
            amplitude,
            seed,
        },
    )
}

fn here() -> &'static Path {
    Path::new(".")
}

#[test]
fn rest_state_is_exact() {
    let mut c = SolverConfig::new(euclid_spec(16), 0.01);
    c.dt = Some(1e-3);
    let s = Solver::new(&c).unwrap();
    let mut u = VelocityField::zeros(&s.grid);
    for _ in 0..5 {
        u = step(&u, &c).unwrap();
    }
    assert_eq!(u.max_speed(), 0.0);

    c.dt = None;
    let rec = run(&c, here()).unwrap();
    for s in &rec.steps {
        let k = &s.coefficients;
        assert_eq!([k.alpha1, k.alpha2, k.alpha3, k.eta, s.rhs, s.residual, s.energy], [0.0; 7]);
        assert_eq!(s.pressure_residual.unwrap_or(0.0), 0.0);
    }
}

#[test]
fn axisymmetric_data_stays_axisymmetric() {
    let c = SolverConfig::new(euclid_spec(16), 0.0);
    let s = Solver::new(&c).unwrap();
    let g = &s.grid;
    // u_θ = (r−1)²(2−r)², no-slip on both circles
    let mut u = VelocityField::from_fn(g, |r, _| (0.0, ((r - 1.0) * (2.0 - r)).powi(2) * 4.0));
    let dt = 0.9 * s.diffusive_limit();
    for n in 0..100 {
        u = s.step_with(&u, dt * n as f64, dt, None).unwrap().velocity;
    }
    assert!(u.ur.iter().all(|v| v.abs() < 1e-13), "u_r drifted");
    for i in 0..g.nr {
        let row = &u.utheta[g.idx(i, 0)..g.idx(i, 0) + g.ntheta];
        let spread = row.iter().fold(0.0f64, |m, v| m.max((v - row[0]).abs()));
        assert!(spread < 1e-13, "row {i}: {spread}");
    }
}

#[test]
fn energy_never_grows_with_homogeneous_data() {
    for (spec, beta) in [(sphere_spec(24), 5.0), (euclid_spec(24), 0.0)] {
        for outer in [OuterCondition::default(), OuterCondition::StressFree] {
            let mut c = SolverConfig::new(spec, 0.0);
            c.beta = beta;
            c.outer = outer;
            assert!(c.homogeneous());
            let s = Solver::new(&c).unwrap();
            let g = &s.grid;
            let mut u = stream(&spec, 9, 3.0).sample(g);
            let dt = 0.9 * s.diffusive_limit();
            let mut e = kinetic_energy(&u, g);
            for n in 0..200 {
                u = s.step_with(&u, 0.0, dt, None).unwrap().velocity;
                let next = kinetic_energy(&u, g);
                assert!(next <= e, "step {n}: {e} -> {next}");
                e = next;
            }
        }
    }
}

#[test]
fn every_step_is_divergence_free_and_meets_the_wall_condition() {
    let mut c = driven(euclid_spec(32), 0.01);
    c.snapshot_every = Some(10);
    let rec = run(&c, here()).unwrap();
    assert!(rec.steps.len() > 20);
    for s in &rec.steps {
        assert!(s.divergence < 1e-10, "{}", s.divergence);
    }
    let times = rec.times();
    assert!(times.windows(2).all(|w| w[1] > w[0]));
    for snap in &rec.snapshots {
        assert_eq!(snap.field.wall_defect(&WallCondition::NoSlip), 0.0);
    }
    assert_eq!(rec.snapshots.len(), (rec.steps.len() - 1) / 10 + 1);
}

#[test]
fn projection_is_idempotent() {
    let spec = sphere_spec(24);
    let c = SolverConfig::new(spec, 0.0);
    let s = Solver::new(&c).unwrap();
    let (once, _) = s.project(&stream(&spec, 3, 1.0).sample(&s.grid), 1.0).unwrap();
    let (twice, phi) = s.project(&once, 1.0).unwrap();
    assert!(twice.max_abs_diff(&once) < 1e-12);
    assert!(phi.max_abs() < 1e-10);
}

#[test]
fn projection_annihilates_gradients() {
    // ∂_r ψ = 0 on both circles
    let err = |n: usize| {
        let c = SolverConfig::new(euclid_spec(n), 0.0);
        let s = Solver::new(&c).unwrap();
        let g = &s.grid;
        let psi = ScalarField::from_fn(g, |r, t| ((r - 1.0) * (2.0 - r)).powi(2) * (1.0 + (2.0 * t).cos() + t.sin()));
        let grad = pressure_gradient(&psi, g).unwrap();
        let (u, _) = s.project(&grad, 1.0).unwrap();
        let mut m = 0.0f64;
        for i in 1..g.nr - 1 {
            for j in 0..g.ntheta {
                let k = g.idx(i, j);
                m = m.max(u.ur[k].abs()).max(u.utheta[k].abs());
            }
        }
        (m, grad.max_speed())
    };
    let (a, scale) = err(16);
    let (b, _) = err(32);
    assert!(a < 0.15 * scale && b < a / 3.0, "{a} {b} {scale}");
}

#[test]
fn random_tentative_fields_project_below_tolerance() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    for spec in [euclid_spec(20), sphere_spec(32)] {
        let c = SolverConfig::new(spec, 0.0);
        let s = Solver::new(&c).unwrap();
        let g = &s.grid;
        let u = VelocityField::from_fn(g, |_, _| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let (p, _) = s.project(&u, 1e-3).unwrap();
        assert!(divergence(&p, g).unwrap().max_abs_rows(1..g.nr - 1) < 1e-10);
        // only the interior moves
        assert_eq!(p.ur[..g.ntheta], vec![0.0; g.ntheta][..]);
    }
}

#[test]
fn pressure_relation_on_the_wall_converges() {
    let mut rows = Vec::new();
    let mut dt = 0.0;
    for n in [16, 32] {
        let mut c = driven(euclid_spec(n), 0.02);
        let s = Solver::new(&c).unwrap();
        dt = if n == 16 { 0.9 * s.diffusive_limit() } else { dt / 4.0 };
        c.dt = Some(dt);
        let rec = run(&c, here()).unwrap();
        rows.push((s.grid.hr, rec.last().pressure_residual.unwrap()));
    }
    let study = OrderStudy::new("pressure", rows.iter().map(|r| r.0).collect(), rows.iter().map(|r| r.1).collect());
    assert!(study.min_order() >= 1.0, "{study:?}");

    // rest: zero
    let c = SolverConfig::new(euclid_spec(16), 0.0);
    let s = Solver::new(&c).unwrap();
    let z = VelocityField::zeros(&s.grid);
    assert_eq!(pressure_boundary_residual(&z, &ScalarField::zeros(&s.grid), &c).unwrap(), 0.0);
}

#[test]
fn ode_residual_converges_on_a_driven_run() {
    let mut hs = Vec::new();
    let mut res = Vec::new();
    let mut dt = 0.0;
    for n in [16, 32, 64] {
        let mut c = driven(euclid_spec(n), 0.03);
        let s = Solver::new(&c).unwrap();
        dt = if n == 16 { 0.9 * s.diffusive_limit() } else { dt / 4.0 };
        c.dt = Some(dt);
        let rec = run(&c, here()).unwrap();
        assert!(rec.steps.iter().all(|s| s.residual.is_finite()));
        hs.push(s.grid.hr);
        res.push(rec.last().residual);
    }
    let study = OrderStudy::new("pde_ode", hs, res);
    assert!(study.min_order() >= 1.0, "{study:?}");
}

#[test]
fn coriolis_suction_keeps_the_wall_shear_positive() {
    // a = 1, δ = π/6: a sin aδ − k cos aδ = −1, so λ₀ < 0 makes the forcing positive
    let mut c = driven(sphere_spec(24), 0.1);
    c.wall = WallCondition::Inflow { lambda0: -1.0 };
    c.beta = 50.0;
    let rec = run(&c, here()).unwrap();
    assert!(rec.steps.iter().all(|s| s.coefficients.alpha1 > 0.0));
    assert!(rec.last().coefficients.alpha1 > rec.steps[0].coefficients.alpha1);

    c.wall = WallCondition::Inflow { lambda0: 1.0 };
    let rec = run(&c, here()).unwrap();
    assert!(rec.last().coefficients.alpha1 < 0.0);
}

#[test]
fn manufactured_rest_has_zero_error() {
    let c = SolverConfig::new(sphere_spec(16), 0.01);
    let flow = ManufacturedFlow::rest(c.grid.manifold, c.grid.delta);
    let r = manufactured_forcing_run(&c, &flow).unwrap();
    assert_eq!(r.max_error, 0.0);
}

#[test]
fn manufactured_solutions_converge_at_second_order() {
    let cases = [(euclid_spec(16), 0.0, TimeFactor::steady()), (sphere_spec(16), 3.0, TimeFactor { epsilon: 0.5, omega: 20.0 })];
    for (spec, beta, time) in cases {
        let mut c = SolverConfig::new(spec, 0.03);
        c.beta = beta;
        let flow = ManufacturedFlow {
            field: stream(&spec, 5, 1.0),
            time,
        };
        let (study, reports) = manufactured_refinement(&c, &flow, &[(16, 16), (32, 32)], 0.9).unwrap();
        assert!((1.7..2.3).contains(&study.min_order()), "{study:?}");
        assert!(reports.iter().all(|r| r.max_divergence < 1e-10));
    }
}

#[test]
fn configuration_errors() {
    let mut c = SolverConfig::new(euclid_spec(16), 1.0);
    c.beta = 1.0;
    let e = Solver::new(&c).unwrap_err();
    assert!(e.is_config() && e.to_string().contains("sphere"), "{e}");

    let c = SolverConfig::new(euclid_spec(17), 1.0);
    assert!(Solver::new(&c).unwrap_err().is_config());

    let mut c = SolverConfig::new(euclid_spec(16), 1.0);
    c.p0_theta_index = 16;
    assert!(Solver::new(&c).unwrap_err().is_config());

    let mut c = SolverConfig::new(euclid_spec(16), 1.0);
    c.dt = Some(-1.0);
    assert!(Solver::new(&c).unwrap_err().is_config());
}

#[test]
fn numerical_errors() {
    let c = SolverConfig::new(euclid_spec(16), 0.0);
    let s = Solver::new(&c).unwrap();
    let u = VelocityField::zeros(&s.grid);
    let e = s.step_with(&u, 0.0, 10.0 * s.diffusive_limit(), None).unwrap_err();
    assert!(matches!(e, SolverError::Cfl { limit_kind: "diffusive", .. }), "{e}");

    let fast = VelocityField::from_fn(&s.grid, |_, _| (0.0, 1e4));
    let e = s.step_with(&fast, 0.0, 0.5 * s.diffusive_limit(), None).unwrap_err();
    assert!(matches!(e, SolverError::Cfl { limit_kind: "advective", .. }), "{e}");

    let mut bad = VelocityField::zeros(&s.grid);
    bad.ur[40] = f64::NAN;
    assert!(matches!(s.step_with(&bad, 0.0, 1e-5, None), Err(SolverError::NonFinite { .. })));
    assert!(!SolverError::NonFinite { what: "x" }.is_config());
}

#[test]
fn config_json_round_trip_and_defaults() {
    let c = driven(sphere_spec(32), 0.5);
    let text = serde_json::to_string_pretty(&c).unwrap();
    let back: SolverConfig<f64> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c);

    let minimal = r#"{"grid": {"manifold": {"kind": "euclidean"}, "delta": 1.0, "outer_radius": 2.0, "nr": 16, "ntheta": 16},
                      "t_end": 0.1}"#;
    let m: SolverConfig<f64> = serde_json::from_str(minimal).unwrap();
    assert_eq!(m.wall, WallCondition::NoSlip);
    assert_eq!(m.div_tol, 1e-10);
    assert!(m.homogeneous());
    assert!(serde_json::from_str::<SolverConfig<f64>>(&minimal.replace("t_end", "t_stop")).is_err());
}

#[test]
fn initial_field_from_file() {
    let dir = std::env::temp_dir().join(format!("layersep-solver-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let spec = euclid_spec(16);
    let g = spec.build().unwrap();
    let u = stream(&spec, 1, 1.0).sample(&g);
    let mut csv = Vec::new();
    write_field_csv(&mut csv, &u, &g, &[]).unwrap();
    std::fs::write(dir.join("u0.csv"), csv).unwrap();
    let desc = FieldDescriptor {
        grid: spec,
        data: "u0.csv".into(),
        time: None,
    };
    std::fs::write(dir.join("u0.json"), serde_json::to_string(&desc).unwrap()).unwrap();

    let mut c = SolverConfig::new(spec, 0.0);
    c.initial = InitialField::File {
        descriptor: "u0.json".into(),
    };
    assert_eq!(c.initial_field(&g, &dir).unwrap(), u);

    c.grid.nr = 18;
    let g18 = c.grid.build().unwrap();
    assert!(c.initial_field(&g18, &dir).unwrap_err().is_config());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn single_precision_smoke() {
    let mut c = SolverConfig::<f32>::new(
        GridSpec {
            manifold: Manifold::euclidean(),
            delta: 1.0,
            outer_radius: 2.0,
            nr: 16,
            ntheta: 16,
        },
        0.005,
    );
    c.div_tol = 1e-4;
    c.outer = OuterCondition::PrescribedTangential {
        profile: TangentialProfile {
            mean: 1.0,
            cos: vec![],
            sin: vec![],
        },
    };
    c.initial = InitialField::Matched;
    let rec = run(&c, here()).unwrap();
    assert!(rec.last().coefficients.alpha1 > 0.0);
}

#[test]
fn matched_profile_meets_the_outer_data() {
    let c = driven(euclid_spec(16), 0.0);
    let s = Solver::new(&c).unwrap();
    let g = &s.grid;
    let u = c.initial_field(g, here()).unwrap();
    let top = (g.nr - 1) * g.ntheta;
    for j in 0..g.ntheta {
        let want = 1.0 + 0.3 * g.theta[j].cos();
        assert!((u.utheta[top + j] - want).abs() < 1e-13);
        assert!(u.ur[top + j].abs() < 1e-13);
    }
    assert_eq!(u.wall_defect(&WallCondition::NoSlip), 0.0);
}
