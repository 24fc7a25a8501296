use projcomp::hypotheses::*;
use projcomp::quadrature::{DiskQuadrature, DiskRuleParams};
use projcomp::{Complex, Symbol};

fn report(s: &Symbol) -> HypothesisReport {
    hypothesis_report(s, &BoundarySampling::default(), &HypothesisOptions::default()).unwrap()
}

#[test]
fn sampling_bounds() {
    assert!(BoundarySampling::new(32, 1e-6).is_err());
    assert!(BoundarySampling::new(64, 0.0).is_err());
    assert!(BoundarySampling::new(64, 1e-2).is_err());
    assert!(BoundarySampling::new(64, 1e-3).is_ok());
}

#[test]
fn boundary_sets() {
    let sampling = BoundarySampling::default();
    let sets = detect_boundary_sets(&Symbol::paper_example(), &sampling);
    assert_eq!(sets.f_samples.len(), sampling.count);
    assert!(!sets.k_empty);
    assert!(detect_boundary_sets(&Symbol::Dilation(0.5), &sampling).k_empty);
    assert_eq!(detect_boundary_sets(&Symbol::Conjugate, &sampling).f_samples.len(), sampling.count);
}

#[test]
fn dbar_and_jacobian_on_f() {
    let sampling = BoundarySampling::default();
    let f = detect_boundary_sets(&Symbol::paper_example(), &sampling).f_samples;
    assert!(dbar_on_f_check(&Symbol::paper_example(), &f) < 1e-12);
    let (lo, hi) = jacobian_bound_check(&Symbol::paper_example(), &f).unwrap();
    assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
    assert_eq!(dbar_on_f_check(&Symbol::Conjugate, &f), 1.0);
    assert_eq!(dbar_on_f_check(&Symbol::Monomial(2), &f), 0.0);
    let (lo, hi) = jacobian_bound_check(&Symbol::Monomial(2), &f).unwrap();
    assert!((lo - 4.0).abs() < 1e-12 && (hi - 4.0).abs() < 1e-12);
    assert_eq!(jacobian_bound_check(&Symbol::Identity, &f), Some((1.0, 1.0)));
    assert_eq!(jacobian_bound_check(&Symbol::Identity, &[]), None);
}

#[test]
fn injectivity() {
    assert_eq!(injectivity_sample_check(&Symbol::paper_example(), 0.75, 5000, 1).unwrap().violations, 0);
    assert!(injectivity_sample_check(&Symbol::Monomial(2), 0.75, 5000, 1).unwrap().violations > 0);
    assert_eq!(injectivity_sample_check(&Symbol::Identity, 0.75, 5000, 1).unwrap().violations, 0);
    assert!(injectivity_sample_check(&Symbol::Identity, 1.0, 10, 1).is_err());
}

#[test]
fn distance_comparison() {
    let radii = DEFAULT_PROBE_RADII;
    let c = distance_comparison_check(&Symbol::paper_example(), &radii, 64).unwrap();
    assert!(c.constant.unwrap() <= 1.0 + 1e-6);
    let c = distance_comparison_check(&Symbol::Identity, &radii, 64).unwrap();
    assert_eq!(c.constant, Some(1.0));
    // Every probe has |0.9 z| > 1/2; the worst is r = 0.8.
    let c = distance_comparison_check(&Symbol::Dilation(0.9), &radii, 64).unwrap();
    assert!((c.constant.unwrap() - 0.2 / 0.28).abs() < 1e-12);
    let c = distance_comparison_check(&Symbol::Dilation(0.5), &radii, 64).unwrap();
    assert_eq!((c.constant, c.probes_used), (None, 0));
}

#[test]
fn gradient_weight_ratios() {
    let rule = DiskQuadrature::build(DiskRuleParams::default()).unwrap();
    let degrees = [1, 2, 5, 10, 32, 64];
    let table = gradient_weight_inequality_check(&degrees, &rule).unwrap();
    for row in &table.rows {
        let exact = row.m as f64 / (2.0 * row.m as f64 + 1.0);
        assert!((row.ratio - exact).abs() < 1e-8, "{row:?}");
    }
    assert!(table.max_ratio < 0.5);
    assert!(gradient_weight_inequality_check(&[0], &rule).is_err());
}

#[test]
fn verdicts() {
    let r = report(&Symbol::paper_example());
    assert_eq!((r.thm1, r.thm2), (Verdict::Fail, Verdict::Pass));
    assert!(r.f_is_whole_circle && !r.k_empty);
    assert!((r.dzbar_over_delta - 1.0).abs() < 1e-3);
    let r = report(&Symbol::Dilation(0.5));
    assert_eq!((r.thm1, r.thm2), (Verdict::Lemma1Applies, Verdict::Lemma1Applies));
    let r = report(&Symbol::Monomial(2));
    assert_eq!(r.thm1, Verdict::Pass);
    assert_eq!(r.thm2, Verdict::Fail);
    let r = report(&Symbol::Conjugate);
    assert_eq!((r.thm1, r.thm2), (Verdict::Fail, Verdict::Fail));
    for s in [Symbol::Identity, Symbol::Monomial(3), Symbol::Dilation(0.9)] {
        let r = report(&s);
        assert_eq!(r.max_dzbar_on_f, 0.0);
        assert_ne!(r.thm1, Verdict::Fail, "{s}");
    }
}

#[test]
fn verdicts_are_rotation_invariant() {
    let base = report(&Symbol::paper_example());
    let rotated = Symbol::Rotated {
        angle: std::f64::consts::FRAC_PI_3,
        inner: Box::new(Symbol::paper_example()),
    };
    let r = report(&rotated);
    assert_eq!((r.thm1, r.thm2, r.k_empty), (base.thm1, base.thm2, base.k_empty));
    assert_eq!(r.f_count, base.f_count);
    assert_eq!(r.injectivity_violations, 0);
}

#[test]
fn report_serializes() {
    let json = serde_json::to_value(report(&Symbol::Dilation(0.5))).unwrap();
    assert_eq!(json["thm1"], "Lemma 1 applies");
    assert_eq!(json["k_empty"], true);
    assert!(json["f_samples"].as_array().unwrap().is_empty());
    let z: Complex = serde_json::from_value(serde_json::json!([0.5, -0.25])).unwrap();
    assert_eq!(z, Complex::new(0.5, -0.25));
}
