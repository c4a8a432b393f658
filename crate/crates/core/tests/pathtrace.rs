use bpl::ingest::{catalog, parse_poly};
use bpl::numerics::sturm_roots;
use bpl::pathtrace::*;
use bpl::poly::rat_from_f64;

fn cubic_root_oracle(mu: f64) -> f64 {
    // largest root of x^3 - 3 mu x^2 - x + mu, isolated exactly
    let t = vec!["t".to_string()];
    let mut p = parse_poly("t^3 - t", &t).unwrap();
    let m = rat_from_f64(mu).unwrap();
    let q = parse_poly("1 - 3*t^2", &t).unwrap();
    p = &p + &q.scale(&m);
    sturm_roots(&p, 0.5, 2.0).unwrap().last().unwrap().mid()
}

#[test]
fn cusp_path_is_three_mu() {
    let prob = catalog::problem("cusp").unwrap();
    let t = trace_path(&prob, &[1.0, 0.0], &TraceConfig::default()).unwrap();
    assert_eq!(t.samples.len(), 40);
    for s in &t.samples {
        assert!((s.x[0] - 3.0 * s.mu).abs() <= 1e-8);
        assert!(s.x[1].abs() <= 1e-10);
        assert!(s.gvals.iter().all(|g| *g > 0.0));
    }
    let lim = t.limit().expect("converged");
    assert!(lim.iter().all(|v| v.abs() < 1e-8));
}

#[test]
fn no_central_path_tracks_cubic() {
    let prob = catalog::problem("no-central-path").unwrap();
    let t = trace_path(&prob, &[2.0, 0.0], &TraceConfig::default()).unwrap();
    let lim = t.limit().expect("converged");
    assert!((lim[0] - 1.0).abs() <= 1e-6 && lim[1].abs() <= 1e-6);
    for s in &t.samples {
        let x = s.x[0];
        assert!((x.powi(3) - 3.0 * s.mu * x * x - x + s.mu).abs() <= 1e-10);
        assert_eq!(s.x[1], 0.0);
    }
    for s in t.samples.iter().step_by(7) {
        assert!((s.x[0] - cubic_root_oracle(s.mu)).abs() <= 1e-10);
    }
}

#[test]
fn non_existence_has_no_solution() {
    let prob = catalog::problem("non-existence").unwrap();
    let t = trace_path(&prob, &[1.0, 1.0], &TraceConfig::default()).unwrap();
    assert_eq!(t.status, TraceStatus::NoSolution);
    assert!(t.samples.is_empty());
}

#[test]
fn morse_non_compact_loses_isolation() {
    let prob = catalog::problem("morse-non-compact").unwrap();
    let t = trace_path(&prob, &[1.5, 0.5], &TraceConfig::default()).unwrap();
    assert_eq!(t.status, TraceStatus::LostIsolation);
}

#[test]
fn barrier_form_agrees_along_cusp_path() {
    let prob = catalog::problem("cusp").unwrap();
    let t = trace_path(&prob, &[1.0, 0.0], &TraceConfig::default()).unwrap();
    let b = bpl::systems::build_barrier_system(&prob);
    for s in &t.samples {
        let v = b.evaluate(&s.x, s.mu);
        assert!(v.iter().all(|r| r.abs() <= 1e-8), "{v:?} at mu={}", s.mu);
    }
}

#[test]
fn schedule_independence() {
    let prob = catalog::problem("no-central-path").unwrap();
    let a = trace_path(&prob, &[2.0, 0.0], &TraceConfig::default()).unwrap();
    let cfg = TraceConfig { theta: 0.25, steps: 20, ..TraceConfig::default() };
    let b = trace_path(&prob, &[2.0, 0.0], &cfg).unwrap();
    let (la, lb) = (a.limit().unwrap(), b.limit().unwrap());
    assert!(la.iter().zip(lb).all(|(x, y)| (x - y).abs() <= 1e-8));
}

#[test]
fn figure_eight_seeds() {
    let prob = catalog::problem("figure-eight").unwrap();
    let seeds = seed_search(&prob, &[[-1.5, 1.5], [-1.5, 1.5]], 16, 0.1);
    assert!(seeds.len() >= 2, "{seeds:?}");
    let starts: Vec<Vec<f64>> = seeds.iter().map(|s| s.point.clone()).collect();
    let limits: Vec<Vec<f64>> = trace_many(&prob, &starts, &TraceConfig::default())
        .into_iter()
        .filter_map(|t| t.unwrap().limit().map(<[f64]>::to_vec))
        .collect();
    for target in [[-1.0, 0.0], [0.0, 0.0]] {
        assert!(
            limits.iter().any(|l| (l[0] - target[0]).abs() <= 1e-4 && (l[1] - target[1]).abs() <= 1e-4),
            "{target:?} missing from {limits:?}"
        );
    }
}

#[test]
fn seed_search_edge_cases() {
    let prob = catalog::problem("no-central-path").unwrap();
    assert_eq!(seed_search(&prob, &[[0.0, 3.0], [-1.0, 1.0]], 16, 0.1).len(), 1);
    assert!(seed_search(&prob, &[[-3.0, -2.0], [-1.0, 1.0]], 16, 0.1).is_empty());
}

#[test]
fn multiplier_sign_test() {
    let grid = geometric_grid(0.1, 0.5, 30);
    let (f, ps) = catalog::kkt_fixture("remark-no-critical-path").unwrap();
    let c = check_existence_via_multiplier(&f, &ps[0], &grid, &[0.0, 0.1, -0.2]);
    assert_eq!(c.verdict, ExistenceVerdict::NoPositiveRoot);
    for (xi, u) in c.xi.iter().zip(&c.u) {
        assert!((u + 2.0 * xi).abs() <= 1e-12);
    }

    let (f, ps) = catalog::kkt_fixture("finitely-many").unwrap();
    let x1 = 0.1f64.cbrt();
    let c = check_existence_via_multiplier(&f, &ps[0], &grid, &[x1, 0.0, 1.0 / (3.0 * x1 * x1)]);
    assert_eq!(c.verdict, ExistenceVerdict::PathExists);
    for (x, mu) in c.x.iter().zip(&c.xi_u) {
        // the induced path is (3 mu, 0)
        assert!((x[0] - 3.0 * mu).abs() <= 1e-10 * x[0].max(1.0));
        assert!(x[1].abs() <= 1e-12);
    }

    let (v, _) = check_existence_search(&f, &ps[0], &grid, &[[-2.0, 2.0], [-2.0, 2.0]], 8);
    assert_eq!(v, ExistenceVerdict::PathExists);
}

