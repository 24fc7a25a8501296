//! The Carleson functional
//!
//! ```text
//! C(z) = ∫ |k_z(φ(w))|² dA(w) = (1 - |z|²)² ∫ |1 - z conj(φ(w))|^{-4} dA(w),
//! ```
//!
//! whose supremum over the disk is finite exactly when `K_φ` is bounded,
//! together with the circle estimate and the closed-form chain used for the
//! cut-off example symbol.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::Complex;
use crate::error::{Error, Result};
use crate::hypotheses::{hypothesis_report, BoundarySampling, HypothesisOptions, HypothesisReport, Verdict};
use crate::quadrature::{angular_count_for_peak, pairwise_sum_real, DiskQuadrature, DiskRuleParams, RuleSelfTest};
use crate::symbol::Symbol;

const SINGULAR_GAP: f64 = 1e-14;

pub const DEFAULT_RADII: [f64; 6] = [0.0, 0.5, 0.9, 0.99, 0.999, 0.9999];
pub const DEFAULT_ANGLES: usize = 64;
/// `β` below which the supremum looks finite.
pub const BOUNDED_BETA: f64 = 0.1;
/// `β` above which the supremum looks infinite.
pub const DIVERGENT_BETA: f64 = 0.5;

/// Disk rule adapted to the peak of `|1 - z conj(φ(w))|^{-4}`: graded to the
/// depth of `z` and, ring by ring, fine enough in angle for
/// `a = |z| max_{|w|=ρ} |φ(w)|`.
pub fn carleson_rule(symbol: &Symbol, z: Complex, base: DiskRuleParams) -> Result<DiskQuadrature> {
    let r = z.norm();
    DiskQuadrature::build_with(base.graded_for_radius(r), |rho| {
        angular_count_for_peak(base.angular_count, r * symbol.ring_modulus_max(rho))
    })
}

/// `C(z)` under a given rule.
pub fn carleson_integral(symbol: &Symbol, z: Complex, rule: &DiskQuadrature) -> Result<f64> {
    if !(z.norm() < 1.0) {
        return Err(Error::OutsideDisk { re: z.re, im: z.im });
    }
    let integral = rule.integrate_real(|w| {
        let d = (Complex::new(1.0, 0.0) - z * symbol.value(w).conj()).norm_sqr();
        if d.sqrt() < SINGULAR_GAP {
            f64::INFINITY
        } else {
            1.0 / (d * d)
        }
    });
    let integral = integral.map_err(|e| match e {
        Error::NonFinite { re, im, .. } => {
            let w = Complex::new(re, im);
            Error::NearSingular {
                gap: (Complex::new(1.0, 0.0) - z * symbol.value(w).conj()).norm(),
                z_re: z.re,
                z_im: z.im,
                w_re: re,
                w_im: im,
            }
        }
        other => other,
    })?;
    Ok((1.0 - z.norm_sqr()).powi(2) * integral)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CarlesonVerdict {
    BoundedEvidence,
    DivergenceEvidence,
    Inconclusive,
}

impl CarlesonVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            CarlesonVerdict::BoundedEvidence => "bounded-evidence",
            CarlesonVerdict::DivergenceEvidence => "divergence-evidence",
            CarlesonVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub r: f64,
    pub alpha: f64,
    pub re: f64,
    pub im: f64,
    /// `None` when the point failed; see `error`.
    pub c: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusRule {
    pub r: f64,
    pub grading_levels: usize,
    pub max_angular: usize,
    pub node_count: usize,
    pub self_test: RuleSelfTest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    /// Slope of `log C` against `-log(1 - r)`.
    pub beta: f64,
    pub stderr: Option<f64>,
    pub alpha: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlesonReport {
    pub symbol: String,
    pub radii: Vec<f64>,
    pub angles: usize,
    pub base_rule: DiskRuleParams,
    pub rules: Vec<RadiusRule>,
    /// `C` is radial because `φ(e^{iβ}w) = e^{iκβ}φ(w)` with `κ ≠ 0`; one
    /// angle per radius was evaluated.
    pub symmetry_reduced: bool,
    pub grid: Vec<GridPoint>,
    pub sup_estimate: f64,
    pub sup_at: (f64, f64),
    pub failures: usize,
    pub exponent_fit: ExponentFit,
    pub verdict: CarlesonVerdict,
}

impl CarlesonReport {
    /// Largest finite `C` on the circle of radius `radii[i]`.
    pub fn max_at_radius(&self, i: usize) -> Option<f64> {
        self.grid[i * self.angles..(i + 1) * self.angles]
            .iter()
            .filter_map(|p| p.c)
            .fold(None, |acc, c| Some(acc.map_or(c, |a: f64| a.max(c))))
    }
}

/// Least-squares slope with its standard error.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, Option<f64>) {
    let n = points.len();
    if n < 2 {
        return (0.0, None);
    }
    let k = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, None);
    }
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    if n < 3 {
        return (slope, None);
    }
    let intercept = my - slope * mx;
    let rss: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    (slope, Some((rss / (k - 2.0) / sxx).sqrt()))
}

/// Evaluates `C` on the polar grid `radii × angles` and fits the divergence
/// exponent at the angle where `C` is largest on the outermost radius.
pub fn carleson_sup_search(symbol: &Symbol, radii: &[f64], angles: usize, base: DiskRuleParams) -> Result<CarlesonReport> {
    if radii.is_empty() || radii.iter().any(|r| !(*r >= 0.0 && *r < 1.0)) {
        return Err(Error::invalid("radii", "must be nonempty and lie in [0, 1)"));
    }
    if angles == 0 {
        return Err(Error::invalid("angles", "must be positive"));
    }
    let symmetry_reduced = symbol.angular_frequency().is_some_and(|k| k != 0);
    let evaluated_angles = if symmetry_reduced { 1 } else { angles };

    let rules = radii
        .iter()
        .map(|&r| carleson_rule(symbol, Complex::new(r, 0.0), base))
        .collect::<Result<Vec<_>>>()?;

    let tasks: Vec<(usize, usize)> = (0..radii.len())
        .flat_map(|i| (0..evaluated_angles).map(move |j| (i, j)))
        .collect();
    let values: Vec<std::result::Result<f64, String>> = tasks
        .par_iter()
        .map(|&(i, j)| {
            let z = Complex::from_polar(radii[i], TAU * j as f64 / angles as f64);
            carleson_integral(symbol, z, &rules[i]).map_err(|e| e.to_string())
        })
        .collect();

    let mut grid = Vec::with_capacity(radii.len() * angles);
    for (i, &r) in radii.iter().enumerate() {
        for j in 0..angles {
            let alpha = TAU * j as f64 / angles as f64;
            let value = &values[i * evaluated_angles + if symmetry_reduced { 0 } else { j }];
            let z = Complex::from_polar(r, alpha);
            grid.push(GridPoint {
                r,
                alpha,
                re: z.re,
                im: z.im,
                c: value.as_ref().ok().copied(),
                error: value.as_ref().err().cloned(),
            });
        }
    }

    let failures = grid.iter().filter(|p| p.c.is_none()).count();
    let (mut sup_estimate, mut sup_at) = (f64::NAN, (f64::NAN, f64::NAN));
    for p in &grid {
        if let Some(c) = p.c {
            if !(c <= sup_estimate) {
                sup_estimate = c;
                sup_at = (p.r, p.alpha);
            }
        }
    }

    // Worst angle on the outermost radius (first one on ties).
    let outer = radii
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite radii"))
        .map(|(i, _)| i)
        .expect("nonempty");
    let mut worst = 0;
    for j in 0..angles {
        let c = grid[outer * angles + j].c.unwrap_or(f64::NEG_INFINITY);
        if c > grid[outer * angles + worst].c.unwrap_or(f64::NEG_INFINITY) {
            worst = j;
        }
    }
    let points: Vec<(f64, f64)> = radii
        .iter()
        .enumerate()
        .filter_map(|(i, &r)| {
            grid[i * angles + worst]
                .c
                .filter(|c| *c > 0.0)
                .map(|c| (-(1.0 - r).ln(), c.ln()))
        })
        .collect();
    let (beta, stderr) = linear_fit(&points);
    let exponent_fit = ExponentFit {
        beta,
        stderr,
        alpha: TAU * worst as f64 / angles as f64,
        points: points.len(),
    };

    let verdict = if beta > DIVERGENT_BETA {
        CarlesonVerdict::DivergenceEvidence
    } else if beta < BOUNDED_BETA && failures == 0 {
        CarlesonVerdict::BoundedEvidence
    } else {
        CarlesonVerdict::Inconclusive
    };

    Ok(CarlesonReport {
        symbol: symbol.to_string(),
        radii: radii.to_vec(),
        angles,
        base_rule: base,
        rules: radii
            .iter()
            .zip(&rules)
            .map(|(&r, rule)| RadiusRule {
                r,
                grading_levels: rule.params().grading_levels,
                max_angular: rule.max_angular(),
                node_count: rule.node_count(),
                self_test: rule.self_test().clone(),
            })
            .collect(),
        symmetry_reduced,
        grid,
        sup_estimate,
        sup_at,
        failures,
        exponent_fit,
        verdict,
    })
}

/// Closest approach to the circle admitted by the circle estimate.
pub const FORELLI_RUDIN_MAX_R: f64 = 1.0 - 1e-7;

/// Trapezoid node count on the circle fine enough for `|1 - r e^{-iθ}|^{-s}`:
/// the aliasing error decays like `r^N`.
pub fn forelli_rudin_nodes(r: f64) -> usize {
    let need = 64.0 / (1.0 - r).max(1e-300);
    let mut count = 256usize;
    while (count as f64) < need {
        count *= 2;
    }
    count
}

fn check_forelli_rudin(r: f64, c: f64) -> Result<()> {
    if !(c > 0.0) {
        return Err(Error::invalid("c", format!("{c} must be positive")));
    }
    if !(r >= 0.0) {
        return Err(Error::invalid("r", format!("{r} must be nonnegative")));
    }
    if r > FORELLI_RUDIN_MAX_R {
        return Err(Error::NearSingular {
            gap: 1.0 - r,
            z_re: r,
            z_im: 0.0,
            w_re: 1.0,
            w_im: 0.0,
        });
    }
    Ok(())
}

/// `∫ |1 - r e^{-iθ}|^{-(1+c)} dθ/2π` by the trapezoid rule on `nodes`
/// equispaced angles. Nodes are generated on the fly in fixed-size blocks so
/// that very fine rules need no storage.
pub fn forelli_rudin_integral(r: f64, c: f64, nodes: usize) -> Result<f64> {
    check_forelli_rudin(r, c)?;
    if nodes == 0 {
        return Err(Error::invalid("nodes", "must be positive"));
    }
    const BLOCK: usize = 1 << 14;
    let blocks: Vec<f64> = (0..nodes.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let values: Vec<f64> = (b * BLOCK..((b + 1) * BLOCK).min(nodes))
                .map(|j| {
                    let zeta = Complex::from_polar(1.0, TAU * j as f64 / nodes as f64);
                    (Complex::new(1.0, 0.0) - zeta.conj() * r).norm().powf(-(1.0 + c))
                })
                .collect();
            pairwise_sum_real(&values)
        })
        .collect();
    let v = pairwise_sum_real(&blocks) / nodes as f64;
    if !v.is_finite() {
        return Err(Error::invalid("r", format!("integral at {r} is not finite")));
    }
    Ok(v)
}

/// `(1 - r²)^c ∫ |1 - r e^{-iθ}|^{-(1+c)} dθ/2π`; equals `1 + r²` for `c = 3`.
pub fn forelli_rudin_ratio(r: f64, c: f64, nodes: usize) -> Result<f64> {
    Ok((1.0 - r * r).powf(c) * forelli_rudin_integral(r, c, nodes)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForelliRudinRow {
    pub r: f64,
    pub nodes: usize,
    pub integral: f64,
    pub ratio: f64,
    /// `1 + r²`, the exact ratio for `c = 3`.
    pub exact_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForelliRudinTable {
    pub c: f64,
    pub rows: Vec<ForelliRudinRow>,
    /// `-slope` of `log integral` against `log(1 - r²)` over radii >= 0.9.
    pub exponent: Option<f64>,
    pub exponent_stderr: Option<f64>,
}

pub fn forelli_rudin_table(c: f64, radii: &[f64]) -> Result<ForelliRudinTable> {
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let nodes = forelli_rudin_nodes(r);
        let integral = forelli_rudin_integral(r, c, nodes)?;
        rows.push(ForelliRudinRow {
            r,
            nodes,
            integral,
            ratio: (1.0 - r * r).powf(c) * integral,
            exact_ratio: (c == 3.0).then_some(1.0 + r * r),
        });
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|row| row.r >= 0.9)
        .map(|row| ((1.0 - row.r * row.r).ln(), row.integral.ln()))
        .collect();
    let (exponent, exponent_stderr) = if points.len() >= 2 {
        let (slope, se) = linear_fit(&points);
        (Some(-slope), se)
    } else {
        (None, None)
    };
    Ok(ForelliRudinTable {
        c,
        rows,
        exponent,
        exponent_stderr,
    })
}

/// `(1 + r)² (1 - 3r/4) / (1 - r/2)²`.
pub fn example_analytic_bound(r: f64) -> f64 {
    (1.0 + r).powi(2) * (1.0 - 0.75 * r) / (1.0 - 0.5 * r).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialIntegral {
    pub a: f64,
    /// `∫_{1/2}^1 (1 - aρ)^{-3} dρ = (1 - 3a/4) / (2 (1-a)² (1-a/2)²)`.
    pub exact: f64,
    /// `(1 - 3a/4) / ((1-a)² (1-a/2)²)`, the closed form as usually quoted;
    /// twice the exact value.
    pub quoted: f64,
}

pub fn example_radial_integral(a: f64) -> Result<RadialIntegral> {
    if !(a >= 0.0 && a < 1.0) {
        return Err(Error::invalid("a", format!("{a} is outside [0, 1)")));
    }
    let quoted = (1.0 - 0.75 * a) / ((1.0 - a).powi(2) * (1.0 - 0.5 * a).powi(2));
    Ok(RadialIntegral {
        a,
        exact: 0.5 * quoted,
        quoted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub r: f64,
    pub analytic_bound: f64,
    pub radial_integral: Option<RadialIntegral>,
    /// `(1 - r²)²/4`: the disk `|w| <= 1/2`, where `φ = 0`.
    pub interior_term: f64,
    pub ceiling: f64,
    pub direct: Option<f64>,
    pub within_ceiling: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleConfig {
    pub radii: Vec<f64>,
    pub angles: usize,
    pub rule: DiskRuleParams,
    pub sampling: BoundarySampling,
    pub hypotheses: HypothesisOptions,
    pub forelli_rudin_radii: Vec<f64>,
}

impl Default for ExampleConfig {
    fn default() -> Self {
        ExampleConfig {
            radii: DEFAULT_RADII.to_vec(),
            angles: DEFAULT_ANGLES,
            rule: DiskRuleParams::default(),
            sampling: BoundarySampling::default(),
            hypotheses: HypothesisOptions::default(),
            forelli_rudin_radii: vec![0.0, 0.5, 0.9, 0.99, 0.999],
        }
    }
}

/// Slack allowed between the direct value and the analytic ceiling.
pub const CEILING_SLACK: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleReport {
    pub symbol: String,
    pub config: ExampleConfig,
    pub hypotheses: HypothesisReport,
    pub forelli_rudin: ForelliRudinTable,
    pub comparison: Vec<ComparisonRow>,
    pub analytic_bound_at_one: f64,
    pub analytic_bound_monotone: bool,
    pub carleson: CarlesonReport,
    pub notes: Vec<String>,
    pub verdict: CarlesonVerdict,
}

/// Runs every check on the cut-off example symbol and compares the analytic
/// ceiling with the directly computed `C`.
pub fn example_reproduce(config: &ExampleConfig) -> Result<ExampleReport> {
    let symbol = Symbol::paper_example();
    let hypotheses = hypothesis_report(&symbol, &config.sampling, &config.hypotheses)?;
    let forelli_rudin = forelli_rudin_table(3.0, &config.forelli_rudin_radii)?;
    let carleson = carleson_sup_search(&symbol, &config.radii, config.angles, config.rule)?;

    let mut comparison = Vec::with_capacity(config.radii.len());
    for (i, &r) in config.radii.iter().enumerate() {
        let analytic_bound = example_analytic_bound(r);
        let interior_term = (1.0 - r * r).powi(2) / 4.0;
        let ceiling = analytic_bound + interior_term;
        let direct = carleson.max_at_radius(i);
        comparison.push(ComparisonRow {
            r,
            analytic_bound,
            radial_integral: example_radial_integral(r).ok(),
            interior_term,
            ceiling,
            direct,
            within_ceiling: direct.is_some_and(|c| c <= ceiling + CEILING_SLACK),
        });
    }
    let analytic_bound_monotone = comparison
        .windows(2)
        .all(|w| w[0].r >= w[1].r || w[1].analytic_bound >= w[0].analytic_bound);

    let mut notes = vec![
        "the quoted closed form (1-3a/4)/((1-a)^2(1-a/2)^2) of the radial integral is twice its exact value; both are reported and the bound chain is unaffected".to_string(),
    ];
    if hypotheses.thm2 == Verdict::Pass && hypotheses.thm1 == Verdict::Fail {
        notes.push("dbar(phi) vanishes on the circle but not on any neighborhood of it".to_string());
    }

    Ok(ExampleReport {
        symbol: symbol.to_string(),
        config: config.clone(),
        hypotheses,
        forelli_rudin,
        analytic_bound_at_one: example_analytic_bound(1.0),
        analytic_bound_monotone,
        comparison,
        verdict: carleson.verdict,
        carleson,
        notes,
    })
}
