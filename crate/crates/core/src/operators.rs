//! Truncated matrices of `K_φ`, the composition norm `‖f∘φ‖²` and its
//! pushforward form, and norm diagnostics on polynomial subspaces.

use std::f64::consts::TAU;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bergman::{min_angular, ring_spectrum, MonomialBasis, PolynomialCoeffs, TAIL_TOLERANCE};
use crate::domain::{ensure_finite, Complex};
use crate::error::{Error, Result};
use crate::quadrature::{pairwise_sum_real, DiskQuadrature, DiskRuleParams};
use crate::symbol::Symbol;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Most negative eigenvalue of `G - A*A` attributed to quadrature error.
pub const PSD_TOLERANCE: f64 = 1e-9;
/// Norms at or below this level count as zero in trend fits.
pub const NORM_FLOOR: f64 = 1e-9;
/// `|slope|` below which a trend is reported as bounded.
pub const TREND_THRESHOLD: f64 = 0.05;

/// `A[k][m] = ⟨e_m∘φ, e_k⟩` for `k <= rows`, `m <= degree`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorMatrix {
    pub symbol: String,
    pub rule: DiskRuleParams,
    pub degree: usize,
    pub rows: usize,
    /// `‖e_m∘φ‖²` for each column.
    pub column_norms_sq: Vec<f64>,
    /// Largest fraction of a column's energy beyond the last row, as far as
    /// the rule resolves it.
    pub tail_indicator: f64,
    pub truncation_limited: bool,
    /// Row-major, `rows + 1` rows of `degree + 1` entries.
    pub entries: Vec<Vec<Complex>>,
}

/// How many rows to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowPolicy {
    /// Start at `2N` and double until the discarded energy is below
    /// `1e-12` of every column norm.
    Auto,
    Fixed(usize),
}

/// An operator matrix together with the Gram matrix
/// `G[m'][m] = ⟨e_m∘φ, e_{m'}∘φ⟩` of the same columns.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub matrix: OperatorMatrix,
    pub gram: Vec<Vec<Complex>>,
}

/// Raises the angular count of `base` so that every frequency of
/// `e_m∘φ`, `m <= degree`, and twice as many rows are resolved.
pub fn operator_rule_params(symbol: &Symbol, degree: usize, base: DiskRuleParams) -> DiskRuleParams {
    let spread = symbol.angular_frequency().map_or(1, |k| k.unsigned_abs().max(1)) as usize;
    let need = (4 * spread * (degree + 1)).next_power_of_two();
    DiskRuleParams {
        angular_count: base.angular_count.max(need),
        ..base
    }
}

struct Partial {
    spectrum: Vec<Vec<Complex>>,
    gram: Vec<Vec<Complex>>,
}

impl Partial {
    fn zeros(rows: usize, cols: usize) -> Self {
        Partial {
            spectrum: vec![vec![Complex::new(0.0, 0.0); cols]; rows],
            gram: vec![vec![Complex::new(0.0, 0.0); cols]; cols],
        }
    }

    fn add(&mut self, other: &Partial) {
        for (a, b) in self.spectrum.iter_mut().zip(&other.spectrum) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        for (a, b) in self.gram.iter_mut().zip(&other.gram) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }
}

/// Assembles `A` (all resolvable rows) and `G`.
///
/// Rings are grouped by annulus; each group is summed in ring order and the
/// groups are added in annulus order, so the result does not depend on the
/// number of workers.
fn assemble_full(symbol: &Symbol, degree: usize, rule: &DiskQuadrature) -> Result<(Vec<Vec<Complex>>, Vec<Vec<Complex>>)> {
    let min_m = min_angular(rule);
    let kmax = min_m / 2 - 1;
    if degree > kmax {
        return Err(Error::invalid(
            "degree",
            format!("{degree} exceeds the {kmax} frequencies resolved by {min_m} angular nodes"),
        ));
    }
    let basis = MonomialBasis::new(degree);
    let cols = degree + 1;
    let group = rule.params().radial_order.max(1);

    let partials = rule
        .rings()
        .par_chunks(group)
        .map(|rings| {
            let mut acc = Partial::zeros(kmax + 1, cols);
            let mut scratch = Vec::with_capacity(cols);
            for ring in rings {
                let m = ring.angular;
                // columns[c][j] = e_c(φ(node_j)).
                let mut columns = vec![Vec::with_capacity(m); cols];
                for (j, d) in rule.directions(ring).enumerate() {
                    let node = d * ring.rho;
                    basis.eval_all(symbol.value(node), &mut scratch);
                    for (col, v) in columns.iter_mut().zip(&scratch) {
                        col.push(ensure_finite(ring.offset + j, node, *v)?);
                    }
                }
                let w = ring.weight / m as f64;
                for a in 0..cols {
                    for b in a..cols {
                        let s: Complex = columns[b].iter().zip(&columns[a]).map(|(x, y)| x * y.conj()).sum();
                        acc.gram[a][b] += s * w;
                    }
                }
                for (c, col) in columns.iter().enumerate() {
                    let spec = ring_spectrum(col);
                    let mut radial = ring.weight;
                    for (k, row) in acc.spectrum.iter_mut().enumerate() {
                        row[c] += spec[k] * (radial * ((k + 1) as f64).sqrt());
                        radial *= ring.rho;
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut total = Partial::zeros(kmax + 1, cols);
    for p in &partials {
        total.add(p);
    }
    for a in 0..cols {
        for b in 0..a {
            total.gram[a][b] = total.gram[b][a].conj();
        }
        total.gram[a][a] = Complex::new(total.gram[a][a].re, 0.0);
    }
    Ok((total.spectrum, total.gram))
}

fn energy(rows: &[Vec<Complex>], col: usize) -> f64 {
    let terms: Vec<f64> = rows.iter().map(|r| r[col].norm_sqr()).collect();
    pairwise_sum_real(&terms)
}

/// Largest fraction of column energy held by `spectrum[from..]`.
fn tail_fraction(spectrum: &[Vec<Complex>], gram: &[Vec<Complex>], from: usize) -> f64 {
    (0..gram.len())
        .map(|c| {
            let norm = gram[c][c].re;
            if norm <= 0.0 || from >= spectrum.len() {
                0.0
            } else {
                energy(&spectrum[from..], c) / norm
            }
        })
        .fold(0.0, f64::max)
}

/// Assembles `A` and `G` for `φ` up to `degree`.
pub fn assemble(symbol: &Symbol, degree: usize, rows: RowPolicy, rule: &DiskQuadrature) -> Result<Assembly> {
    let (spectrum, gram) = assemble_full(symbol, degree, rule)?;
    let kmax = spectrum.len() - 1;
    let (rows, tail_indicator, truncation_limited) = match rows {
        RowPolicy::Fixed(r) => {
            if r > kmax {
                return Err(Error::invalid(
                    "rows",
                    format!("{r} exceeds the {kmax} rows resolved by the angular count"),
                ));
            }
            let tail = tail_fraction(&spectrum, &gram, r + 1);
            (r, tail, tail >= TAIL_TOLERANCE)
        }
        RowPolicy::Auto => {
            let mut r = (2 * degree).clamp(1, kmax);
            while r < kmax && tail_fraction(&spectrum, &gram, r + 1) >= TAIL_TOLERANCE {
                r = (2 * r).min(kmax);
            }
            if r < kmax {
                (r, tail_fraction(&spectrum, &gram, r + 1), false)
            } else {
                // Nothing beyond is visible; judge by the top rows instead.
                let window = (r / 4).max(8).min(r);
                let tail = tail_fraction(&spectrum, &gram, r + 1 - window);
                (r, tail, tail >= TAIL_TOLERANCE)
            }
        }
    };
    let column_norms_sq = (0..=degree).map(|c| gram[c][c].re).collect();
    let mut entries = spectrum;
    entries.truncate(rows + 1);
    Ok(Assembly {
        matrix: OperatorMatrix {
            symbol: symbol.to_string(),
            rule: rule.params(),
            degree,
            rows,
            column_norms_sq,
            tail_indicator,
            truncation_limited,
            entries,
        },
        gram,
    })
}

/// Truncated matrix of `K_φ`.
pub fn assemble_k_matrix(symbol: &Symbol, degree: usize, rows: RowPolicy, rule: &DiskQuadrature) -> Result<OperatorMatrix> {
    Ok(assemble(symbol, degree, rows, rule)?.matrix)
}

/// `‖f∘φ‖² = ∫ |f(φ(w))|² dA(w)`.
pub fn composition_norm_sq(symbol: &Symbol, f: &PolynomialCoeffs, rule: &DiskQuadrature) -> Result<f64> {
    if !f.is_finite() {
        return Err(Error::invalid("f", "coefficients must be finite"));
    }
    rule.integrate_real(|w| f.eval(symbol.value(w)).norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

pub const MIN_SAMPLES: usize = 1000;

fn unit_interval(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Monte Carlo estimate of `∫ |f|² dV_φ`, drawing `w` from `dA` by the polar
/// inverse CDF `w = √U e^{2πiV}` and averaging `|f(φ(w))|²`.
pub fn pushforward_integral(symbol: &Symbol, f: &PolynomialCoeffs, sample_count: usize, seed: u64) -> Result<MonteCarloEstimate> {
    if sample_count < MIN_SAMPLES {
        return Err(Error::invalid(
            "sample_count",
            format!("{sample_count} is below the minimum of {MIN_SAMPLES}"),
        ));
    }
    if !f.is_finite() {
        return Err(Error::invalid("f", "coefficients must be finite"));
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut values = Vec::with_capacity(sample_count);
    for index in 0..sample_count {
        let rho = unit_interval(&mut rng).sqrt();
        let theta = TAU * unit_interval(&mut rng);
        let w = Complex::from_polar(rho, theta);
        let v = f.eval(symbol.value(w));
        values.push(ensure_finite(index, w, v)?.norm_sqr());
    }
    let n = sample_count as f64;
    let mean = pairwise_sum_real(&values) / n;
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let variance = pairwise_sum_real(&dev) / (n - 1.0);
    Ok(MonteCarloEstimate {
        estimate: mean,
        std_error: (variance / n).sqrt(),
        samples: sample_count,
        seed,
    })
}

fn mat_vec(a: &[Vec<Complex>], x: &[Complex]) -> Vec<Complex> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

fn vec_norm(x: &[Complex]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest eigenvalue of a positive semidefinite Hermitian matrix by power
/// iteration from the normalized all-ones vector.
pub fn power_iteration(matrix: &[Vec<Complex>], tol: f64, max_iter: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("{tol} must be positive")));
    }
    let n = matrix.len();
    if n == 0 {
        return Ok(0.0);
    }
    if matrix.iter().flatten().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::invalid("matrix", "entries must be finite"));
    }
    let mut x = vec![Complex::new(1.0 / (n as f64).sqrt(), 0.0); n];
    let mut lambda = f64::NAN;
    let mut residual = f64::NAN;
    for _ in 0..max_iter {
        let y = mat_vec(matrix, &x);
        let next: f64 = x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum();
        let norm = vec_norm(&y);
        residual = vec_norm(&y.iter().zip(&x).map(|(b, a)| b - a * next).collect::<Vec<_>>());
        if norm == 0.0 {
            return Ok(0.0);
        }
        let converged = (next - lambda).abs() <= tol * next.abs();
        lambda = next;
        if converged {
            return Ok(lambda);
        }
        x = y.iter().map(|v| v / norm).collect();
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        estimate: lambda,
        residual,
    })
}

/// `A*A`.
fn normal_matrix(entries: &[Vec<Complex>], cols: usize) -> Vec<Vec<Complex>> {
    (0..cols)
        .map(|a| {
            (0..cols)
                .map(|b| entries.iter().map(|row| row[a].conj() * row[b]).sum())
                .collect()
        })
        .collect()
}

/// Largest singular value of `A`.
pub fn operator_norm_estimate(matrix: &OperatorMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    let b = normal_matrix(&matrix.entries, matrix.degree + 1);
    Ok(power_iteration(&b, tol, max_iter)?.max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DifferenceForm {
    /// `sup ‖(K_φ - D_φ) f‖²` over unit-norm `f` of degree `<= N`.
    pub max_eigenvalue: f64,
    pub min_eigenvalue: f64,
    pub rows: usize,
    pub truncation_limited: bool,
}

/// Extreme eigenvalues of `G - A*A` from an assembly.
pub fn difference_form(assembly: &Assembly, tol: f64, max_iter: usize) -> Result<DifferenceForm> {
    let cols = assembly.matrix.degree + 1;
    let aa = normal_matrix(&assembly.matrix.entries, cols);
    let d: Vec<Vec<Complex>> = assembly
        .gram
        .iter()
        .zip(&aa)
        .map(|(g, a)| g.iter().zip(a).map(|(p, q)| p - q).collect())
        .collect();
    // Gershgorin bound: σI ± D is positive semidefinite.
    let sigma = d
        .iter()
        .map(|row| row.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let (max_eigenvalue, min_eigenvalue) = if sigma == 0.0 {
        (0.0, 0.0)
    } else {
        let shifted = |sign: f64| -> Vec<Vec<Complex>> {
            d.iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, v)| v * sign + if i == j { sigma } else { 0.0 })
                        .collect()
                })
                .collect()
        };
        let top = power_iteration(&shifted(1.0), tol, max_iter)? - sigma;
        let bottom = sigma - power_iteration(&shifted(-1.0), tol, max_iter)?;
        (top, bottom)
    };
    if min_eigenvalue < -PSD_TOLERANCE {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue });
    }
    Ok(DifferenceForm {
        max_eigenvalue,
        min_eigenvalue,
        rows: assembly.matrix.rows,
        truncation_limited: assembly.matrix.truncation_limited,
    })
}

/// Largest eigenvalue of `G - A*A` at degree `N`.
pub fn difference_form_norm(symbol: &Symbol, degree: usize, rule: &DiskQuadrature) -> Result<f64> {
    let assembly = assemble(symbol, degree, RowPolicy::Auto, rule)?;
    Ok(difference_form(&assembly, DEFAULT_TOL, DEFAULT_MAX_ITER)?.max_eigenvalue)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormTrend {
    pub degrees: Vec<usize>,
    /// `‖K_φ‖` on polynomials of each degree.
    pub k_norms: Vec<f64>,
    /// Largest eigenvalue of `G - A*A` at each degree.
    pub diff_norms: Vec<f64>,
    pub k_slope: f64,
    pub diff_slope: f64,
    pub rows: Vec<usize>,
    pub truncation_limited: bool,
    pub rules: Vec<DiskRuleParams>,
}

impl NormTrend {
    pub fn k_bounded(&self) -> bool {
        self.k_slope.abs() < TREND_THRESHOLD
    }

    pub fn diff_bounded(&self) -> bool {
        self.diff_slope.abs() < TREND_THRESHOLD
    }
}

/// Least-squares slope of `log max(norm, NORM_FLOOR)` against `log N`.
pub fn log_log_slope(degrees: &[usize], norms: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = degrees
        .iter()
        .zip(norms)
        .map(|(&n, &v)| ((n as f64).ln(), v.max(NORM_FLOOR).ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Operator norms and difference-form norms over increasing degrees. The rule
/// for each degree is `base` widened by [`operator_rule_params`].
pub fn norm_trend(symbol: &Symbol, degrees: &[usize], base: DiskRuleParams) -> Result<NormTrend> {
    if degrees.is_empty() || degrees.windows(2).any(|w| w[0] >= w[1]) || degrees[0] == 0 {
        return Err(Error::invalid("degrees", "must be positive and strictly increasing"));
    }
    let mut trend = NormTrend {
        degrees: degrees.to_vec(),
        k_norms: Vec::new(),
        diff_norms: Vec::new(),
        k_slope: 0.0,
        diff_slope: 0.0,
        rows: Vec::new(),
        truncation_limited: false,
        rules: Vec::new(),
    };
    for &n in degrees {
        let params = operator_rule_params(symbol, n, base);
        let rule = DiskQuadrature::build(params)?;
        let assembly = assemble(symbol, n, RowPolicy::Auto, &rule)?;
        trend.k_norms.push(operator_norm_estimate(&assembly.matrix, DEFAULT_TOL, DEFAULT_MAX_ITER)?);
        let diff = difference_form(&assembly, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
        trend.diff_norms.push(diff.max_eigenvalue.max(0.0));
        trend.rows.push(assembly.matrix.rows);
        trend.truncation_limited |= assembly.matrix.truncation_limited;
        trend.rules.push(params);
    }
    trend.k_slope = log_log_slope(degrees, &trend.k_norms);
    trend.diff_slope = log_log_slope(degrees, &trend.diff_norms);
    Ok(trend)
}
