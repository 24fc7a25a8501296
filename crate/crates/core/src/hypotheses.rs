//! Numerical checks of the boundary hypotheses on a symbol: the sets where
//! `φ` touches the circle, holomorphy and the Jacobian there, injectivity
//! near the circle, and the distance comparison `δ(z) <= s δ(φ(z))`.

use std::f64::consts::TAU;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::bergman::MonomialBasis;
use crate::domain::{boundary_distance, Complex};
use crate::error::{Error, Result};
use crate::quadrature::DiskQuadrature;
use crate::symbol::Symbol;

/// `|∂φ/∂z̄|` below this counts as zero.
pub const DBAR_TOL: f64 = 1e-8;
/// Smallest admitted `|J_φ|` on `F`.
pub const JACOBIAN_MIN: f64 = 1e-3;
/// Image points closer than this count as a collision.
pub const COLLISION_TOL: f64 = 1e-9;
/// Pairs closer than this are not tested for injectivity.
pub const PAIR_SEPARATION: f64 = 1e-6;

/// Uniform boundary points `ζ_j = e^{2πij/M}` and the band `|φ(ζ)| > 1 - ε_b`
/// that stands in for `|φ(ζ)| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySampling {
    pub count: usize,
    pub eps_b: f64,
}

impl Default for BoundarySampling {
    fn default() -> Self {
        BoundarySampling { count: 256, eps_b: 1e-6 }
    }
}

impl BoundarySampling {
    pub fn new(count: usize, eps_b: f64) -> Result<Self> {
        if count < 64 {
            return Err(Error::invalid("boundary_samples", format!("{count} is below 64")));
        }
        if !(eps_b > 0.0 && eps_b <= 1e-3) {
            return Err(Error::invalid("eps_b", format!("{eps_b} is outside (0, 1e-3]")));
        }
        Ok(BoundarySampling { count, eps_b })
    }

    pub fn points(&self) -> impl Iterator<Item = Complex> + '_ {
        (0..self.count).map(move |j| Complex::from_polar(1.0, TAU * j as f64 / self.count as f64))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySets {
    /// Boundary samples with `|φ(ζ)| > 1 - ε_b`.
    pub f_samples: Vec<Complex>,
    pub k_empty: bool,
}

pub fn detect_boundary_sets(symbol: &Symbol, sampling: &BoundarySampling) -> BoundarySets {
    let f_samples: Vec<Complex> = sampling
        .points()
        .filter(|&z| symbol.value(z).norm() > 1.0 - sampling.eps_b)
        .collect();
    BoundarySets {
        k_empty: f_samples.is_empty(),
        f_samples,
    }
}

/// `max |∂φ/∂z̄|` over the samples; 0 for an empty set.
pub fn dbar_on_f_check(symbol: &Symbol, f_samples: &[Complex]) -> f64 {
    f_samples
        .iter()
        .map(|&z| symbol.wirtinger(z).dzbar.norm())
        .fold(0.0, f64::max)
}

/// `(min |J_φ|, max |J_φ|)` over the samples.
pub fn jacobian_bound_check(symbol: &Symbol, f_samples: &[Complex]) -> Option<(f64, f64)> {
    if f_samples.is_empty() {
        return None;
    }
    let jac: Vec<f64> = f_samples.iter().map(|&z| symbol.jacobian(z).abs()).collect();
    Some((
        jac.iter().copied().fold(f64::INFINITY, f64::min),
        jac.iter().copied().fold(0.0, f64::max),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InjectivityResult {
    pub annulus_lo: f64,
    pub pairs_checked: usize,
    pub violations: usize,
    pub seed: u64,
}

/// Radii and angles of the deterministic part of the injectivity sample.
const ADVERSARIAL_RADII: usize = 4;
const ADVERSARIAL_ANGLES: usize = 64;
/// Rotation orders `p` for the pairs `(z, e^{2πi/p} z)`.
const ROTATION_ORDERS: std::ops::RangeInclusive<u32> = 2..=8;

/// Counts pairs `z ≠ w` in `annulus_lo < |z| <= 1` with `φ(z) = φ(w)`.
///
/// Antipodal, rotated and conjugate pairs on a fixed polar grid are always
/// tested, followed by `pair_count` random pairs drawn uniformly by area.
pub fn injectivity_sample_check(symbol: &Symbol, annulus_lo: f64, pair_count: usize, seed: u64) -> Result<InjectivityResult> {
    if !(annulus_lo > 0.0 && annulus_lo < 1.0) {
        return Err(Error::invalid("annulus_lo", format!("{annulus_lo} is outside (0, 1)")));
    }
    let mut pairs = Vec::new();
    for i in 1..=ADVERSARIAL_RADII {
        let r = annulus_lo + (1.0 - annulus_lo) * i as f64 / ADVERSARIAL_RADII as f64;
        for j in 0..ADVERSARIAL_ANGLES {
            let z = Complex::from_polar(r, TAU * (j as f64 + 0.5) / ADVERSARIAL_ANGLES as f64);
            for p in ROTATION_ORDERS {
                pairs.push((z, z * Complex::from_polar(1.0, TAU / p as f64)));
            }
            pairs.push((z, z.conj()));
        }
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut uniform = || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let lo2 = annulus_lo * annulus_lo;
    let mut draw = || {
        let rho = (lo2 + (1.0 - lo2) * (1.0 - uniform())).sqrt();
        Complex::from_polar(rho, TAU * uniform())
    };
    for _ in 0..pair_count {
        let z = draw();
        let w = draw();
        pairs.push((z, w));
    }
    let mut checked = 0;
    let mut violations = 0;
    for (z, w) in pairs {
        if (z - w).norm() <= PAIR_SEPARATION {
            continue;
        }
        checked += 1;
        if (symbol.value(z) - symbol.value(w)).norm() < COLLISION_TOL {
            violations += 1;
        }
    }
    Ok(InjectivityResult {
        annulus_lo,
        pairs_checked: checked,
        violations,
        seed,
    })
}

pub const DEFAULT_PROBE_RADII: [f64; 4] = [0.8, 0.9, 0.99, 0.999];
pub const DEFAULT_PROBE_ANGLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceComparison {
    /// `max δ(z)/δ(φ(z))` over probes with `|φ(z)| > 1/2`; `None` if there
    /// are no such probes.
    pub constant: Option<f64>,
    pub probes_used: usize,
    /// Probes where `δ(φ(z)) < 1e-15`.
    pub violations: usize,
}

pub fn distance_comparison_check(symbol: &Symbol, radii: &[f64], angles: usize) -> Result<DistanceComparison> {
    if angles == 0 || radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
        return Err(Error::invalid("probes", "radii must lie in (0, 1) and angles be positive"));
    }
    let mut constant: Option<f64> = None;
    let mut probes_used = 0;
    let mut violations = 0;
    for &r in radii {
        for j in 0..angles {
            let z = Complex::from_polar(r, TAU * j as f64 / angles as f64);
            let image = symbol.value(z);
            if image.norm() <= 0.5 {
                continue;
            }
            probes_used += 1;
            let gap = boundary_distance(image);
            if gap < 1e-15 {
                violations += 1;
                continue;
            }
            let ratio = boundary_distance(z) / gap;
            constant = Some(constant.map_or(ratio, |c| c.max(ratio)));
        }
    }
    Ok(DistanceComparison {
        constant,
        probes_used,
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientWeightRow {
    pub m: usize,
    /// `∫|e_m'|²(1-|z|)² dA / ‖e_m‖²`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientWeightTable {
    pub rows: Vec<GradientWeightRow>,
    pub max_ratio: f64,
}

/// Gradient-weighted norms of the basis functions `e_m`.
pub fn gradient_weight_inequality_check(degrees: &[usize], rule: &DiskQuadrature) -> Result<GradientWeightTable> {
    if degrees.iter().any(|m| !(1..=64).contains(m)) {
        return Err(Error::invalid("degrees", "must lie in 1..=64"));
    }
    let mut rows = Vec::with_capacity(degrees.len());
    for &m in degrees {
        let basis = MonomialBasis::new(m);
        let scale = ((m + 1) as f64).sqrt() * m as f64;
        let weighted = rule.integrate_real(|z| {
            let d = z.powu(m as u32 - 1) * scale;
            d.norm_sqr() * boundary_distance(z).powi(2)
        })?;
        let norm = rule.integrate_real(|z| basis.eval(m, z).norm_sqr())?;
        rows.push(GradientWeightRow { m, ratio: weighted / norm });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(GradientWeightTable { rows, max_ratio })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    /// `φ` stays away from the circle, so `K_φ` is bounded outright.
    #[serde(rename = "Lemma 1 applies")]
    Lemma1Applies,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisOptions {
    pub annulus_lo: f64,
    pub pair_count: usize,
    pub seed: u64,
    pub probe_radii: Vec<f64>,
    pub probe_angles: usize,
}

impl Default for HypothesisOptions {
    fn default() -> Self {
        HypothesisOptions {
            annulus_lo: 0.75,
            pair_count: 10_000,
            seed: 0,
            probe_radii: DEFAULT_PROBE_RADII.to_vec(),
            probe_angles: DEFAULT_PROBE_ANGLES,
        }
    }
}

/// Fractions of `10 ε_b` at which the neighborhood `1 - 10ε_b < |z| < 1` of
/// `F` is probed along each ray.
const NEIGHBORHOOD_STEPS: [f64; 3] = [0.1, 0.5, 0.9];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub symbol: String,
    pub sampling: BoundarySampling,
    pub options: HypothesisOptions,
    pub f_samples: Vec<Complex>,
    pub f_count: usize,
    pub f_is_whole_circle: bool,
    pub k_empty: bool,
    pub max_dzbar_on_f: f64,
    pub min_jac_on_f: Option<f64>,
    pub max_jac_on_f: Option<f64>,
    /// `max |∂φ/∂z̄|` on the annulus `1 - 10ε_b < |z| < 1` along rays through `F`.
    pub max_dzbar_near_f: f64,
    /// `max |∂φ/∂z̄(z)| / δ(z)` on the same probes (informational).
    pub dzbar_over_delta: f64,
    pub injectivity: InjectivityResult,
    pub injectivity_violations: usize,
    pub distance: DistanceComparison,
    pub distance_constant: Option<f64>,
    pub thm1: Verdict,
    pub thm2: Verdict,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub dbar: f64,
    pub jacobian_min: f64,
    pub collision: f64,
}

pub fn hypothesis_report(symbol: &Symbol, sampling: &BoundarySampling, options: &HypothesisOptions) -> Result<HypothesisReport> {
    let sets = detect_boundary_sets(symbol, sampling);
    let max_dzbar_on_f = dbar_on_f_check(symbol, &sets.f_samples);
    let jac = jacobian_bound_check(symbol, &sets.f_samples);

    let mut max_dzbar_near_f: f64 = 0.0;
    let mut dzbar_over_delta: f64 = 0.0;
    for zeta in &sets.f_samples {
        for t in NEIGHBORHOOD_STEPS {
            let delta = 10.0 * sampling.eps_b * t;
            let z = zeta * (1.0 - delta);
            let d = symbol.wirtinger(z).dzbar.norm();
            max_dzbar_near_f = max_dzbar_near_f.max(d);
            dzbar_over_delta = dzbar_over_delta.max(d / boundary_distance(z));
        }
    }

    let injectivity = injectivity_sample_check(symbol, options.annulus_lo, options.pair_count, options.seed)?;
    let distance = distance_comparison_check(symbol, &options.probe_radii, options.probe_angles)?;

    let (thm1, thm2) = if sets.k_empty {
        (Verdict::Lemma1Applies, Verdict::Lemma1Applies)
    } else {
        let min_jac = jac.map_or(0.0, |j| j.0);
        (
            Verdict::from_bool(max_dzbar_on_f < DBAR_TOL && max_dzbar_near_f < DBAR_TOL),
            Verdict::from_bool(max_dzbar_on_f < DBAR_TOL && min_jac > JACOBIAN_MIN && injectivity.violations == 0),
        )
    };

    Ok(HypothesisReport {
        symbol: symbol.to_string(),
        sampling: *sampling,
        options: options.clone(),
        f_count: sets.f_samples.len(),
        f_is_whole_circle: sets.f_samples.len() == sampling.count,
        f_samples: sets.f_samples,
        k_empty: sets.k_empty,
        max_dzbar_on_f,
        min_jac_on_f: jac.map(|j| j.0),
        max_jac_on_f: jac.map(|j| j.1),
        max_dzbar_near_f,
        dzbar_over_delta,
        injectivity_violations: injectivity.violations,
        injectivity,
        distance_constant: distance.constant,
        distance,
        thm1,
        thm2,
        tolerances: Tolerances {
            dbar: DBAR_TOL,
            jacobian_min: JACOBIAN_MIN,
            collision: COLLISION_TOL,
        },
    })
}
