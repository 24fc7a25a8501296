use projcomp::carleson::*;
use projcomp::quadrature::DiskRuleParams;
use projcomp::{Complex, Symbol};

fn c_at(symbol: &Symbol, z: Complex) -> f64 {
    let rule = carleson_rule(symbol, z, DiskRuleParams::default()).unwrap();
    carleson_integral(symbol, z, &rule).unwrap()
}

#[test]
fn identity_is_one() {
    for r in [0.0, 0.3, 0.9, 0.99, 0.999] {
        let z = Complex::from_polar(r, 0.7);
        assert!((c_at(&Symbol::Identity, z) - 1.0).abs() < 1e-6, "r = {r}");
    }
}

#[test]
fn constant_symbols() {
    let zero = Symbol::Constant(Complex::new(0.0, 0.0));
    assert!((c_at(&zero, Complex::new(0.0, 0.0)) - 1.0).abs() < 1e-12);
    assert!((c_at(&zero, Complex::new(0.9, 0.0)) - 0.0361).abs() < 1e-12);
    let c = Complex::new(0.3, -0.2);
    let s = Symbol::Constant(c);
    for z in [Complex::new(0.5, 0.1), Complex::new(-0.2, 0.9)] {
        let exact = (1.0 - z.norm_sqr()).powi(2) / (Complex::new(1.0, 0.0) - z * c.conj()).norm().powi(4);
        assert!((c_at(&s, z) - exact).abs() < 1e-8);
    }
}

#[test]
fn dilation_closed_form() {
    let s = Symbol::Dilation(0.5);
    assert!((c_at(&s, Complex::new(0.8, 0.0)) - 0.36f64.powi(2) / 0.84f64.powi(2)).abs() < 1e-10);
    for r in [0.5f64, 0.99, 0.9999] {
        let exact = (1.0 - r * r).powi(2) / (1.0 - r * r / 4.0).powi(2);
        assert!((c_at(&s, Complex::from_polar(r, 2.0)) - exact).abs() < 1e-8);
    }
}

#[test]
fn near_singular_and_outside_points_rejected() {
    let rule = carleson_rule(&Symbol::Identity, Complex::new(0.5, 0.0), DiskRuleParams::default()).unwrap();
    assert!(carleson_integral(&Symbol::Identity, Complex::new(1.0, 0.0), &rule).is_err());
    let s = Symbol::Constant(Complex::new(1.0, 0.0));
    let z = Complex::new(1.0 - 1e-15, 0.0);
    assert!(matches!(
        carleson_integral(&s, z, &rule),
        Err(projcomp::Error::NearSingular { .. })
    ));
}

#[test]
fn identity_search() {
    let r = carleson_sup_search(&Symbol::Identity, &DEFAULT_RADII, 16, DiskRuleParams::default()).unwrap();
    assert!(r.symmetry_reduced);
    assert_eq!(r.grid.len(), 6 * 16);
    assert!((r.sup_estimate - 1.0).abs() < 1e-5);
    assert!(r.exponent_fit.beta.abs() < 1e-6);
    assert_eq!(r.verdict, CarlesonVerdict::BoundedEvidence);
}

#[test]
fn constant_search_evaluates_every_angle() {
    let s = Symbol::Constant(Complex::new(0.3, 0.0));
    let r = carleson_sup_search(&s, &[0.0, 0.5, 0.9], 8, DiskRuleParams::default()).unwrap();
    assert!(!r.symmetry_reduced);
    // (1 - r²)² / |1 - 0.3 z|⁴ is largest at α = 0.
    let best = r.grid.iter().filter(|p| p.r == 0.5).max_by(|a, b| a.c.partial_cmp(&b.c).unwrap()).unwrap();
    assert_eq!(best.alpha, 0.0);
    let exact = 0.75f64.powi(2) / 0.85f64.powi(4);
    assert!((best.c.unwrap() - exact).abs() < 1e-8);
}

#[test]
fn modulated_symbol_is_finite_everywhere() {
    let s: Symbol = "radial:0,1".parse().unwrap();
    let r = carleson_sup_search(&s, &DEFAULT_RADII, 8, DiskRuleParams::default()).unwrap();
    assert_eq!(r.failures, 0);
    assert!(r.grid.iter().all(|p| p.c.unwrap().is_finite() && p.c.unwrap() >= 0.0));
}

#[test]
fn flat_contact_diverges() {
    // |φ(z)| = 1 - (1 - |z|)⁴ touches the circle to fourth order.
    let s: Symbol = "radial:4,-6,4,-1".parse().unwrap();
    let r = carleson_sup_search(&s, &[0.9, 0.99, 0.999, 0.9999], 4, DiskRuleParams::default()).unwrap();
    assert_eq!(r.verdict, CarlesonVerdict::DivergenceEvidence, "{:?}", r.exponent_fit);
}

#[test]
fn forelli_rudin_values() {
    let n = |r| forelli_rudin_nodes(r);
    assert!((forelli_rudin_ratio(0.0, 3.0, n(0.0)).unwrap() - 1.0).abs() < 1e-14);
    assert!((forelli_rudin_ratio(0.5, 3.0, n(0.5)).unwrap() - 1.25).abs() < 1e-10);
    assert!((forelli_rudin_ratio(0.99, 3.0, n(0.99)).unwrap() - 1.9801).abs() < 1e-6);
    let raw = forelli_rudin_integral(0.5, 3.0, n(0.5)).unwrap();
    assert!((raw - 1.25 / 0.75f64.powi(3)).abs() < 1e-10);
    assert!(forelli_rudin_ratio(1.0 - 1e-8, 3.0, 1024).is_err());
    assert!(forelli_rudin_ratio(0.5, 0.0, 1024).is_err());
    let table = forelli_rudin_table(3.0, &[0.0, 0.5, 0.9, 0.99, 0.999]).unwrap();
    for row in &table.rows {
        assert!((row.ratio - row.exact_ratio.unwrap()).abs() < 1e-6);
    }
    assert!((table.exponent.unwrap() - 3.0).abs() < 0.05);
}

#[test]
fn analytic_chain() {
    assert_eq!(example_analytic_bound(0.0), 1.0);
    assert!((example_analytic_bound(1.0) - 4.0).abs() < 1e-15);
    assert!((example_analytic_bound(0.9) - 3.61 * 0.325 / 0.3025).abs() < 1e-12);
    assert!((example_analytic_bound(0.9999) - 4.0).abs() < 1e-3);
    assert_eq!(example_radial_integral(0.0).unwrap().exact, 0.5);
    // (1/(2a)) [(1-a)^{-2} - (1-a/2)^{-2}] at a = 1/2 is 4 - 16/9.
    assert!((example_radial_integral(0.5).unwrap().exact - (4.0 - 16.0 / 9.0)).abs() < 1e-14);
    let numeric = simpson(&|rho: f64| (1.0 - 0.5 * rho).powi(-3), 0.5, 1.0, 1e-13);
    assert!((numeric - 20.0 / 9.0).abs() < 1e-10);
    let r = example_radial_integral(0.7).unwrap();
    assert!((r.quoted - 2.0 * r.exact).abs() < 1e-12);
    assert!(example_radial_integral(1.0).is_err());
}

/// Adaptive Simpson rule, used as an independent oracle.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
}

#[test]
fn radial_integral_matches_independent_quadrature() {
    let a = 0.9;
    let numeric = simpson(&|rho: f64| (1.0 - a * rho).powi(-3), 0.5, 1.0, 1e-13);
    assert!((numeric - example_radial_integral(a).unwrap().exact).abs() < 1e-10);
}
