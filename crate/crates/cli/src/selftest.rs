//! Closed-form oracles run by `projcomp selftest`.

use projcomp::bergman::normalized_kernel_eval;
use projcomp::carleson::{carleson_integral, carleson_rule, example_analytic_bound, example_radial_integral, forelli_rudin_nodes, forelli_rudin_ratio};
use projcomp::hypotheses::gradient_weight_inequality_check;
use projcomp::operators::{assemble_k_matrix, operator_rule_params, RowPolicy};
use projcomp::quadrature::{CircleQuadrature, DiskQuadrature, DiskRuleParams};
use projcomp::{Complex, Result, Symbol};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check(name: &'static str, value: f64, expected: f64, tolerance: f64) -> Check {
    Check {
        name,
        value,
        expected,
        tolerance,
        pass: (value - expected).abs() <= tolerance,
    }
}

pub fn run(params: DiskRuleParams) -> Result<Vec<Check>> {
    let rule = DiskQuadrature::build(params)?;
    let mut checks = vec![
        check("disk total weight", rule.integrate_real(|_| 1.0)?, 1.0, 1e-12),
        check("disk moment |z|^2", rule.integrate_real(|z| z.norm_sqr())?, 0.5, 1e-10),
        check("disk moment |z|^40", rule.integrate_real(|z| z.norm_sqr().powi(20))?, 1.0 / 21.0, 1e-10),
    ];

    let z = Complex::new(0.9, 0.0);
    let graded = DiskQuadrature::build(params.graded_for_radius(0.9))?;
    let kernel_norm = graded.integrate_real(|w| normalized_kernel_eval(z, w).map_or(f64::NAN, |k| k.norm_sqr()))?;
    checks.push(check("normalized kernel norm at 0.9", kernel_norm, 1.0, 1e-6));

    let circle = CircleQuadrature::new(256)?;
    let ring = circle
        .integrate(|zeta| Complex::new((Complex::new(1.0, 0.0) - zeta.conj() * 0.5).norm().powi(-4), 0.0))?
        .re;
    checks.push(check("circle integral at r = 0.5", ring, 1.25 / 0.75f64.powi(3), 1e-10));
    checks.push(check("Forelli-Rudin ratio at 0.99", forelli_rudin_ratio(0.99, 3.0, forelli_rudin_nodes(0.99))?, 1.9801, 1e-6));

    let c = |s: &Symbol, z: Complex| -> Result<f64> { carleson_integral(s, z, &carleson_rule(s, z, params)?) };
    checks.push(check("identity C at 0.999", c(&Symbol::Identity, Complex::new(0.0, 0.999))?, 1.0, 1e-5));
    let exact = 0.36f64.powi(2) / 0.84f64.powi(2);
    checks.push(check("dilation C at 0.8", c(&Symbol::Dilation(0.5), Complex::new(0.8, 0.0))?, exact, 1e-8));

    let mono = Symbol::Monomial(2);
    let a = assemble_k_matrix(&mono, 4, RowPolicy::Auto, &DiskQuadrature::build(operator_rule_params(&mono, 4, params))?)?;
    checks.push(check("monomial(2) entry A[2][1]", a.entries[2][1].re, (2.0f64 / 3.0).sqrt(), 1e-8));

    let table = gradient_weight_inequality_check(&[1, 10], &rule)?;
    checks.push(check("gradient weight R(1)", table.rows[0].ratio, 1.0 / 3.0, 1e-8));
    checks.push(check("gradient weight R(10)", table.rows[1].ratio, 10.0 / 21.0, 1e-8));

    checks.push(check("analytic bound at 1", example_analytic_bound(1.0), 4.0, 1e-15));
    checks.push(check("radial integral at 0", example_radial_integral(0.0)?.exact, 0.5, 1e-15));
    Ok(checks)
}
