use bpl::asymptotics::*;
use bpl::ingest::{catalog, parse_poly, POProblem};
use bpl::pathtrace::*;

fn exponents(fit: &ExponentFit) -> Vec<Option<f64>> {
    fit.coords.iter().map(|c| c.finite().map(|f| f.r)).collect()
}

#[test]
fn cusp_exponents() {
    let prob = catalog::problem("cusp").unwrap();
    let t = trace_path(&prob, &[1.0, 0.0], &TraceConfig::default()).unwrap();
    let fit = fit_exponents(&t.samples, &[0.0, 0.0], &FitOptions::default()).unwrap();
    let r = exponents(&fit);
    assert!((r[0].unwrap() - 1.0).abs() <= 0.01);
    assert_eq!(r[1], None);
    let rho = propose_rho(&fit, 16).unwrap().rho;
    assert_eq!(rho, 1);
    assert!(check_smooth_after_reparam(&t.samples, &[0.0, 0.0], 1, 3).passes_through(3));
}

#[test]
fn no_central_path_exponent() {
    let prob = catalog::problem("no-central-path").unwrap();
    let t = trace_path(&prob, &[2.0, 0.0], &TraceConfig::default()).unwrap();
    let fit = fit_exponents(&t.samples, &[1.0, 0.0], &FitOptions::default()).unwrap();
    assert!((exponents(&fit)[0].unwrap() - 1.0).abs() <= 0.01);
    // the extrapolated limit serves as well as the exact one
    let est = estimate_limit(&t.samples).unwrap();
    let fit = fit_exponents(&t.samples, &est, &FitOptions::default()).unwrap();
    assert!((exponents(&fit)[0].unwrap() - 1.0).abs() <= 0.01);
}

#[test]
fn non_analytic_catalog_path() {
    // unique interior path x1 = 9 mu / 2, x2 = (9 sqrt 6 / 4) mu^{3/2}
    let prob = catalog::problem("non-analytic").unwrap();
    let seeds = seed_search(&prob, &[[0.0, 2.0], [0.0, 2.0]], 16, 0.1);
    assert_eq!(seeds.len(), 1);
    let t = trace_path(&prob, &seeds[0].point, &TraceConfig::default()).unwrap();
    for s in &t.samples {
        assert!((s.x[0] - 4.5 * s.mu).abs() <= 1e-9 * s.mu.max(1e-3), "{:?} {}", s.x, s.mu);
        let x2 = 9.0 * 6f64.sqrt() / 4.0 * s.mu.powf(1.5);
        assert!((s.x[1] - x2).abs() <= 1e-8 * x2);
    }
    let fit = fit_exponents(&t.samples, &[0.0, 0.0], &FitOptions::default()).unwrap();
    let r = exponents(&fit);
    assert!((r[0].unwrap() - 1.0).abs() < 1e-3 && (r[1].unwrap() - 1.5).abs() < 1e-3);
    assert_eq!(propose_rho(&fit, 16).unwrap().rho, 2);
}

#[test]
fn quadratic_objective_variant_has_quarter_exponents() {
    let names = catalog::default_names(2);
    let p = |s: &str| parse_poly(s, &names).unwrap();
    let prob = POProblem::new("nonanalytic-sq", names.clone(), p("x1^2"), vec![p("x1^3 - x2^2"), p("x2")]).unwrap();
    let seeds = seed_search(&prob, &[[0.0, 2.0], [0.0, 2.0]], 16, 0.1);
    assert_eq!(seeds.len(), 1);
    let cfg = TraceConfig { steps: 70, ..TraceConfig::default() };
    let t = trace_path(&prob, &seeds[0].point, &cfg).unwrap();
    assert!(t.limit().is_some(), "{:?}", t.status);
    let fit = fit_exponents(&t.samples, &[0.0, 0.0], &FitOptions::default()).unwrap();
    let r = exponents(&fit);
    assert!((r[0].unwrap() - 0.5).abs() <= 0.02, "{r:?}");
    assert!((r[1].unwrap() - 0.75).abs() <= 0.03, "{r:?}");
    assert_eq!(propose_rho(&fit, 16).unwrap().rho, 4);
    assert!(check_smooth_after_reparam(&t.samples, &[0.0, 0.0], 4, 2).passes_through(2));
    assert!(!check_smooth_after_reparam(&t.samples, &[0.0, 0.0], 1, 2).orders[0].passed);
}

#[test]
fn multiplier_branch_cube_root() {
    let (f, ps) = catalog::kkt_fixture("finitely-many").unwrap();
    let grid = geometric_grid(0.1, 0.5, 40);
    let x1 = 0.1f64.cbrt();
    let c = check_existence_via_multiplier(&f, &ps[0], &grid, &[x1, 0.0, 1.0 / (3.0 * x1 * x1)]);
    let fit = fit_exponents_raw(&c.xi, &c.x, &[0.0, 0.0], &FitOptions::default()).unwrap();
    assert!((exponents(&fit)[0].unwrap() - 1.0 / 3.0).abs() < 1e-3);
    assert_eq!(propose_rho(&fit, 16).unwrap().rho, 3);
}

#[test]
fn scaling_invariance() {
    let mu: Vec<f64> = (0..30).map(|k| 0.1 * 0.5f64.powi(k)).collect();
    let xs: Vec<Vec<f64>> = mu.iter().map(|m| vec![m.powf(2.0 / 3.0) * (1.0 + m)]).collect();
    let xs2: Vec<Vec<f64>> = xs.iter().map(|x| vec![2.0 * x[0]]).collect();
    let a = fit_exponents_raw(&mu, &xs, &[0.0], &FitOptions::default()).unwrap();
    let b = fit_exponents_raw(&mu, &xs2, &[0.0], &FitOptions::default()).unwrap();
    let (ra, rb) = (a.coords[0].finite().unwrap().r, b.coords[0].finite().unwrap().r);
    assert!((ra - rb).abs() < 1e-12);
}
