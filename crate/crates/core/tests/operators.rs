use projcomp::bergman::PolynomialCoeffs;
use projcomp::operators::*;
use projcomp::quadrature::{DiskQuadrature, DiskRuleParams};
use projcomp::{Complex, Symbol};

fn rule_for(symbol: &Symbol, degree: usize) -> DiskQuadrature {
    DiskQuadrature::build(operator_rule_params(symbol, degree, DiskRuleParams::default())).unwrap()
}

fn assemble_auto(symbol: &Symbol, degree: usize) -> Assembly {
    assemble(symbol, degree, RowPolicy::Auto, &rule_for(symbol, degree)).unwrap()
}

#[test]
fn monomial_two_entries() {
    let a = assemble_auto(&Symbol::Monomial(2), 16).matrix;
    for (k, row) in a.entries.iter().enumerate() {
        for (m, v) in row.iter().enumerate() {
            let expected = if k == 2 * m {
                ((m as f64 + 1.0) / (2.0 * m as f64 + 1.0)).sqrt()
            } else {
                0.0
            };
            assert!((v - expected).norm() < 1e-8, "A[{k}][{m}] = {v}");
        }
    }
    assert!((a.entries[2][1].re - (2.0f64 / 3.0).sqrt()).abs() < 1e-8);
    assert!(!a.truncation_limited);
}

#[test]
fn conjugate_and_identity_matrices() {
    let a = assemble_auto(&Symbol::Conjugate, 16).matrix;
    for (k, row) in a.entries.iter().enumerate() {
        for (m, v) in row.iter().enumerate() {
            let expected = if k == 0 && m == 0 { 1.0 } else { 0.0 };
            assert!((v - expected).norm() < 1e-10, "A[{k}][{m}] = {v}");
        }
    }
    let a = assemble_auto(&Symbol::Identity, 16).matrix;
    for (k, row) in a.entries.iter().enumerate() {
        for (m, v) in row.iter().enumerate() {
            let expected = if k == m { 1.0 } else { 0.0 };
            assert!((v - expected).norm() < 1e-10);
        }
    }
}

#[test]
fn rotation_equivariant_symbols_give_diagonal_matrices() {
    for s in [Symbol::paper_example(), "radial:0,1".parse().unwrap(), Symbol::Dilation(0.7)] {
        let a = assemble_auto(&s, 16).matrix;
        let (mut off, mut total) = (0.0, 0.0);
        for (k, row) in a.entries.iter().enumerate() {
            for (m, v) in row.iter().enumerate() {
                total += v.norm_sqr();
                if k != m {
                    off += v.norm_sqr();
                }
            }
        }
        assert!(off < 1e-10 * total, "{s}: {off} / {total}");
        if matches!(s, Symbol::PaperExample(_)) {
            assert!((a.entries[0][0] - 1.0).norm() < 1e-10);
        }
    }
}

#[test]
fn entries_respect_cauchy_schwarz() {
    for s in [Symbol::paper_example(), Symbol::Constant(Complex::new(0.3, 0.2)), Symbol::Monomial(3)] {
        let a = assemble_auto(&s, 8).matrix;
        for row in &a.entries {
            for (m, v) in row.iter().enumerate() {
                assert!(v.norm() <= a.column_norms_sq[m].sqrt() + 1e-12);
                assert!(v.norm() <= ((m + 1) as f64).sqrt() + 1e-12);
            }
        }
    }
}

#[test]
fn fixed_rows_and_serde_round_trip() {
    let s = Symbol::Monomial(2);
    let rule = rule_for(&s, 8);
    let short = assemble_k_matrix(&s, 8, RowPolicy::Fixed(8), &rule).unwrap();
    assert_eq!(short.entries.len(), 9);
    assert!(short.truncation_limited);
    let json = serde_json::to_string(&short).unwrap();
    let back: OperatorMatrix = serde_json::from_str(&json).unwrap();
    assert_eq!(back, short);
    assert!(assemble_k_matrix(&s, 8, RowPolicy::Fixed(100_000), &rule).is_err());
}

#[test]
fn composition_norm_examples() {
    let rule = DiskQuadrature::build(DiskRuleParams::default()).unwrap();
    let e5 = PolynomialCoeffs::basis_vector(5);
    assert!((composition_norm_sq(&Symbol::Identity, &e5, &rule).unwrap() - 1.0).abs() < 1e-10);
    let f = PolynomialCoeffs::new(vec![Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)]);
    let v = composition_norm_sq(&Symbol::Constant(Complex::new(0.0, 0.0)), &f, &rule).unwrap();
    assert!((v - 1.0).abs() < 1e-12);
    let g = PolynomialCoeffs::new((0..6).map(|k| Complex::new(0.5 - 0.1 * k as f64, 0.2 * k as f64)).collect());
    let v = composition_norm_sq(&Symbol::Conjugate, &g, &rule).unwrap();
    assert!((v - g.norm_sqr()).abs() < 1e-10);
}

#[test]
fn pushforward_examples() {
    let e0 = PolynomialCoeffs::basis_vector(0);
    let r = pushforward_integral(&Symbol::Identity, &e0, 100_000, 1).unwrap();
    assert!((r.estimate - 1.0).abs() <= 3.0 * r.std_error + 1e-12);
    let e1 = PolynomialCoeffs::basis_vector(1);
    let r = pushforward_integral(&Symbol::Dilation(0.5), &e1, 100_000, 2).unwrap();
    assert!((r.estimate - 0.25).abs() <= 3.0 * r.std_error, "{r:?}");
    let rule = DiskQuadrature::build(DiskRuleParams::default()).unwrap();
    let q = composition_norm_sq(&Symbol::paper_example(), &e1, &rule).unwrap();
    let r = pushforward_integral(&Symbol::paper_example(), &e1, 100_000, 3).unwrap();
    assert!((r.estimate - q).abs() <= 4.0 * r.std_error, "{r:?} vs {q}");
}

#[test]
fn monomial_norm_estimate() {
    let a = assemble_auto(&Symbol::Monomial(2), 32).matrix;
    let n = operator_norm_estimate(&a, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    assert!((n - 1.0).abs() < 1e-8, "{n}");
}

#[test]
fn holomorphic_difference_forms_vanish() {
    for s in [Symbol::Identity, Symbol::Monomial(3)] {
        let v = difference_form_norm(&s, 16, &rule_for(&s, 16)).unwrap();
        assert!(v.abs() < 1e-9, "{s}: {v}");
    }
}

#[test]
fn example_difference_form_is_stable_under_refinement() {
    let s = Symbol::paper_example();
    let coarse = difference_form_norm(&s, 16, &rule_for(&s, 16)).unwrap();
    let fine_params = DiskRuleParams::new(24, 512, 16, 0.5);
    let fine = difference_form_norm(&s, 16, &DiskQuadrature::build(fine_params).unwrap()).unwrap();
    assert!(coarse > 0.0 && coarse.is_finite());
    assert!((coarse - fine).abs() < 0.05 * fine, "{coarse} vs {fine}");
}

#[test]
fn trends() {
    let t = norm_trend(&Symbol::Identity, &[8, 16, 32], DiskRuleParams::default()).unwrap();
    assert!(t.k_norms.iter().all(|n| (n - 1.0).abs() < 1e-10));
    assert!(t.diff_norms.iter().all(|n| *n < 1e-9));
    assert!(t.k_slope.abs() < 1e-9 && t.diff_slope == 0.0);
    let t = norm_trend(&Symbol::Dilation(0.5), &[8, 16, 32, 64], DiskRuleParams::default()).unwrap();
    assert!(t.k_slope <= 0.01 && t.k_norms.iter().all(|n| *n <= 1.0 + 1e-10), "{t:?}");
    assert!(norm_trend(&Symbol::Identity, &[16, 8], DiskRuleParams::default()).is_err());
}
