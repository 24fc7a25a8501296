//! Integration rules for the normalized area measure `dA = dx dy / π` on the
//! unit disk and the normalized arc measure on the unit circle.
//!
//! The disk rule is a tensor product of composite Gauss–Legendre panels in
//! the radius and the uniform trapezoid rule in the angle. Radial panels are
//! fixed on `[0, 3/4]` and thin out geometrically toward `ρ = 1`, so integrands
//! peaking at distance `~ 1 - |z|` from the circle stay resolved.

use std::f64::consts::TAU;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{ensure_finite, Complex};
use crate::error::{Error, Result};

/// Highest radial moment `∫|z|^{2m} dA` verified at build time.
pub const MOMENT_CHECK_MAX: usize = 20;
const MOMENT_TOL: f64 = 1e-10;
const TOTAL_WEIGHT_TOL: f64 = 1e-12;
const ANGULAR_TOL: f64 = 1e-12;

/// Breakpoints of the ungraded part of the radial partition.
const BASE_KNOTS: [f64; 4] = [0.0, 0.25, 0.5, 0.75];

/// Order-independent pairwise summation.
pub fn pairwise_sum(values: &[Complex]) -> Complex {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().fold(Complex::new(0.0, 0.0), |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_real(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_real(&values[..mid]) + pairwise_sum_real(&values[mid..])
}

/// Gauss–Legendre nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(order).expect("positive order"));
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskRuleParams {
    pub radial_order: usize,
    pub angular_count: usize,
    pub grading_levels: usize,
    pub grading_ratio: f64,
}

impl Default for DiskRuleParams {
    fn default() -> Self {
        DiskRuleParams {
            radial_order: 16,
            angular_count: 256,
            grading_levels: 12,
            grading_ratio: 0.5,
        }
    }
}

impl DiskRuleParams {
    pub fn new(radial_order: usize, angular_count: usize, grading_levels: usize, grading_ratio: f64) -> Self {
        DiskRuleParams {
            radial_order,
            angular_count,
            grading_levels,
            grading_ratio,
        }
    }

    /// Grading depth for integrands peaking at distance `1 - r` from the circle:
    /// ten levels beyond `-log₂(1 - r)`.
    pub fn graded_for_radius(self, r: f64) -> Self {
        let gap = (1.0 - r).max(1e-15);
        let depth = (-gap.log2()).ceil().max(0.0) as usize;
        DiskRuleParams {
            grading_levels: self.grading_levels.max(depth + 10),
            ..self
        }
    }
}

/// Upper bound on the angular node count of any ring.
pub const ANGULAR_CAP: usize = 1 << 20;

/// Nodes per unit of `1/(1 - a)` needed by the trapezoid rule on a ring where
/// the integrand behaves like `|1 - a e^{iθ}|^{-s}`.
pub const ANGULAR_RESOLUTION: f64 = 32.0;

/// Angular count that resolves `|1 - a e^{iθ}|^{-s}` on a ring, for `0 <= a < 1`.
pub fn angular_count_for_peak(base: usize, a: f64) -> usize {
    let need = ANGULAR_RESOLUTION / (1.0 - a).max(1e-300);
    let mut count = base;
    while (count as f64) < need && count < ANGULAR_CAP {
        count *= 2;
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Annulus {
    pub lo: f64,
    pub hi: f64,
}

/// One radial node with its angular resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ring {
    pub rho: f64,
    /// Radial weight including the `2ρ` Jacobian; the ring's nodes share it
    /// equally.
    pub weight: f64,
    pub angular: usize,
    /// Index of the ring's first node in ring-major order.
    pub offset: usize,
}

/// Moment residuals of a built rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleSelfTest {
    pub total_weight_error: f64,
    /// `|∫|z|^{2m} dA - 1/(m+1)|` for `m = 0..=20`.
    pub moment_errors: Vec<f64>,
    pub max_moment_error: f64,
    pub max_angular_error: f64,
}

#[derive(Debug, Clone)]
pub struct DiskQuadrature {
    params: DiskRuleParams,
    annuli: Vec<Annulus>,
    rings: Vec<Ring>,
    /// `e^{2πij/M}` for the finest ring; coarser rings stride through it.
    table: Vec<Complex>,
    node_count: usize,
    self_test: RuleSelfTest,
}

impl DiskQuadrature {
    /// Tensor rule with `params.angular_count` nodes on every ring.
    pub fn build(params: DiskRuleParams) -> Result<Self> {
        Self::build_with(params, |_| params.angular_count)
    }

    /// Rule whose ring at radius `ρ` carries at least `angular(ρ)` nodes.
    ///
    /// Counts are rounded up to `angular_count · 2^k` (capped at
    /// [`ANGULAR_CAP`]) so every ring's nodes are a subset of the finest ring's.
    pub fn build_with<A>(params: DiskRuleParams, angular: A) -> Result<Self>
    where
        A: Fn(f64) -> usize,
    {
        let DiskRuleParams {
            radial_order,
            angular_count,
            grading_levels,
            grading_ratio,
        } = params;
        if radial_order < 2 {
            return Err(Error::invalid("radial-order", "must be at least 2"));
        }
        if angular_count < 4 {
            return Err(Error::invalid("angular", "must be at least 4"));
        }
        if !(grading_ratio > 0.0 && grading_ratio < 1.0) {
            return Err(Error::invalid("grading-ratio", "must lie in (0, 1)"));
        }

        let base = BASE_KNOTS[BASE_KNOTS.len() - 1];
        let mut knots: Vec<f64> = BASE_KNOTS.to_vec();
        knots.extend((1..=grading_levels).map(|j| 1.0 - (1.0 - base) * grading_ratio.powi(j as i32)));
        knots.push(1.0);
        let annuli: Vec<Annulus> = knots
            .windows(2)
            .map(|w| Annulus { lo: w[0], hi: w[1] })
            .filter(|a| a.hi > a.lo)
            .collect();

        let mut offset = 0;
        let mut rings = Vec::new();
        for a in &annuli {
            for (rho, w) in gauss_legendre(radial_order, a.lo, a.hi) {
                let mut count = angular_count;
                let need = angular(rho);
                while count < need && count < ANGULAR_CAP.max(angular_count) {
                    count *= 2;
                }
                rings.push(Ring {
                    rho,
                    weight: 2.0 * rho * w,
                    angular: count,
                    offset,
                });
                offset += count;
            }
        }
        let finest = rings.iter().map(|r| r.angular).max().unwrap_or(angular_count);
        let table = (0..finest)
            .map(|j| Complex::from_polar(1.0, TAU * j as f64 / finest as f64))
            .collect();

        let mut rule = DiskQuadrature {
            params,
            annuli,
            rings,
            table,
            node_count: offset,
            self_test: RuleSelfTest {
                total_weight_error: 0.0,
                moment_errors: Vec::new(),
                max_moment_error: 0.0,
                max_angular_error: 0.0,
            },
        };
        rule.self_test = rule.run_self_test();
        let t = &rule.self_test;
        if t.total_weight_error > TOTAL_WEIGHT_TOL
            || t.max_moment_error > MOMENT_TOL
            || t.max_angular_error > ANGULAR_TOL
        {
            return Err(Error::SelfTest(format!(
                "params {params:?}: weight error {:e}, moment error {:e}, angular error {:e}",
                t.total_weight_error, t.max_moment_error, t.max_angular_error
            )));
        }
        Ok(rule)
    }

    fn run_self_test(&self) -> RuleSelfTest {
        let radial_moment = |m: usize| {
            let terms: Vec<f64> = self.rings.iter().map(|r| r.weight * r.rho.powi(2 * m as i32)).collect();
            pairwise_sum_real(&terms)
        };
        let moment_errors: Vec<f64> = (0..=MOMENT_CHECK_MAX)
            .map(|m| (radial_moment(m) - 1.0 / (m as f64 + 1.0)).abs())
            .collect();
        let max_moment_error = moment_errors.iter().cloned().fold(0.0, f64::max);

        // Angular exactness of z^m conj(z)^k, m != k, on the coarsest ring.
        let coarsest = self
            .rings
            .iter()
            .min_by_key(|r| r.angular)
            .copied()
            .expect("at least one ring");
        let directions: Vec<Complex> = self.directions(&coarsest).collect();
        let half = (coarsest.angular / 2).max(1);
        let probe: Vec<usize> = [0, 1, 2, 3, half / 2, half.saturating_sub(2), half - 1]
            .into_iter()
            .filter(|&m| m < half)
            .collect();
        let mut max_angular_error = 0.0_f64;
        for &m in &probe {
            for &k in &probe {
                if m == k {
                    continue;
                }
                let terms: Vec<Complex> = directions
                    .iter()
                    .map(|d| d.powu(m as u32) * d.conj().powu(k as u32))
                    .collect();
                let avg = pairwise_sum(&terms) / coarsest.angular as f64;
                max_angular_error = max_angular_error.max(avg.norm());
            }
        }
        RuleSelfTest {
            total_weight_error: moment_errors[0],
            moment_errors,
            max_moment_error,
            max_angular_error,
        }
    }

    pub fn params(&self) -> DiskRuleParams {
        self.params
    }

    pub fn annuli(&self) -> &[Annulus] {
        &self.annuli
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    /// Unit vectors `e^{2πij/M}` of a ring with `M = ring.angular`.
    pub fn directions<'a>(&'a self, ring: &Ring) -> impl Iterator<Item = Complex> + 'a {
        let stride = self.table.len() / ring.angular;
        self.table.iter().step_by(stride).copied()
    }

    /// Largest per-ring angular count.
    pub fn max_angular(&self) -> usize {
        self.table.len()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn self_test(&self) -> &RuleSelfTest {
        &self.self_test
    }

    /// All nodes with weights, ring-major.
    pub fn nodes(&self) -> impl Iterator<Item = (Complex, f64)> + '_ {
        self.rings.iter().flat_map(move |ring| {
            let w = ring.weight / ring.angular as f64;
            let rho = ring.rho;
            self.directions(ring).map(move |d| (d * rho, w))
        })
    }

    /// Weights of all nodes, ring-major.
    pub fn weights(&self) -> Vec<f64> {
        self.nodes().map(|(_, w)| w).collect()
    }

    /// `Σ w_j f(node_j)`; rings are reduced in parallel and combined in a
    /// fixed order so the result does not depend on the worker count.
    pub fn integrate<F>(&self, f: F) -> Result<Complex>
    where
        F: Fn(Complex) -> Complex + Sync,
    {
        let ring_sums: Vec<Complex> = self
            .rings
            .par_iter()
            .map(|ring| {
                let mut values = Vec::with_capacity(ring.angular);
                for (j, d) in self.directions(ring).enumerate() {
                    let node = d * ring.rho;
                    values.push(ensure_finite(ring.offset + j, node, f(node))?);
                }
                Ok(pairwise_sum(&values) * (ring.weight / ring.angular as f64))
            })
            .collect::<Result<_>>()?;
        Ok(pairwise_sum(&ring_sums))
    }

    /// Real-valued variant of [`integrate`](Self::integrate).
    pub fn integrate_real<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(Complex) -> f64 + Sync,
    {
        let ring_sums: Vec<f64> = self
            .rings
            .par_iter()
            .map(|ring| {
                let mut values = Vec::with_capacity(ring.angular);
                for (j, d) in self.directions(ring).enumerate() {
                    let node = d * ring.rho;
                    let v = f(node);
                    if !v.is_finite() {
                        return Err(Error::NonFinite {
                            index: ring.offset + j,
                            re: node.re,
                            im: node.im,
                            value: format!("{v}"),
                        });
                    }
                    values.push(v);
                }
                Ok(pairwise_sum_real(&values) * (ring.weight / ring.angular as f64))
            })
            .collect::<Result<_>>()?;
        Ok(pairwise_sum_real(&ring_sums))
    }
}

/// `Σ w_j f(node_j)` over a disk rule.
pub fn integrate_disk<F>(rule: &DiskQuadrature, f: F) -> Result<Complex>
where
    F: Fn(Complex) -> Complex + Sync,
{
    rule.integrate(f)
}

/// Uniform rule on the unit circle, nodes `e^{2πij/M}`, weights `1/M`.
#[derive(Debug, Clone)]
pub struct CircleQuadrature {
    nodes: Vec<Complex>,
}

impl CircleQuadrature {
    pub fn new(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::invalid("circle nodes", "must be positive"));
        }
        Ok(CircleQuadrature {
            nodes: (0..count)
                .map(|j| Complex::from_polar(1.0, TAU * j as f64 / count as f64))
                .collect(),
        })
    }

    pub fn nodes(&self) -> &[Complex] {
        &self.nodes
    }

    pub fn integrate<F>(&self, f: F) -> Result<Complex>
    where
        F: Fn(Complex) -> Complex,
    {
        let values = self
            .nodes
            .iter()
            .enumerate()
            .map(|(j, &z)| ensure_finite(j, z, f(z)))
            .collect::<Result<Vec<_>>>()?;
        Ok(pairwise_sum(&values) / self.nodes.len() as f64)
    }
}

/// `Σ w_j f(ζ_j)` over a circle rule.
pub fn integrate_circle<F>(rule: &CircleQuadrature, f: F) -> Result<Complex>
where
    F: Fn(Complex) -> Complex,
{
    rule.integrate(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_rule() -> DiskQuadrature {
        DiskQuadrature::build(DiskRuleParams::new(16, 64, 8, 0.5)).unwrap()
    }

    #[test]
    fn weights_positive_and_normalized() {
        let rule = default_rule();
        assert!(rule.nodes().all(|(_, w)| w > 0.0));
        let total = rule.integrate(|_| Complex::new(1.0, 0.0)).unwrap();
        assert!((total.re - 1.0).abs() < 1e-12 && total.im == 0.0);
        assert!(rule.self_test().max_moment_error < 1e-10);
    }

    #[test]
    fn nodes_strictly_inside() {
        let rule = default_rule();
        assert!(rule.rings().iter().all(|r| r.rho > 0.0 && r.rho < 1.0));
    }

    #[test]
    fn outermost_annulus_width() {
        let rule = default_rule();
        let last = rule.annuli()[rule.annuli().len() - 2];
        let expected = (1.0 - 0.5) * 0.5_f64.powi(7) * 0.25;
        assert!(((last.hi - last.lo) - expected).abs() < 1e-15);
    }

    #[test]
    fn second_moment_and_odd_integrand() {
        let rule = default_rule();
        let m2 = rule.integrate_real(|z| z.norm_sqr()).unwrap();
        assert!((m2 - 0.5).abs() < 1e-10);
        let odd = rule.integrate(|z| z).unwrap();
        assert!(odd.norm() < 1e-14);
    }

    #[test]
    fn angular_exactness() {
        let rule = default_rule();
        for m in 0..8u32 {
            for k in 0..8u32 {
                let v = rule.integrate(|z| z.powu(m) * z.conj().powu(k)).unwrap();
                let expected = if m == k { 1.0 / (m as f64 + 1.0) } else { 0.0 };
                assert!((v - expected).norm() < 1e-12, "{m} {k}: {v}");
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DiskQuadrature::build(DiskRuleParams::new(1, 64, 8, 0.5)).is_err());
        assert!(DiskQuadrature::build(DiskRuleParams::new(16, 2, 8, 0.5)).is_err());
        assert!(DiskQuadrature::build(DiskRuleParams::new(16, 64, 8, 1.0)).is_err());
        // Two-point panels cannot reach the moment tolerance.
        assert!(matches!(
            DiskQuadrature::build(DiskRuleParams::new(2, 64, 2, 0.5)),
            Err(Error::SelfTest(_))
        ));
    }

    #[test]
    fn non_finite_integrand_names_node() {
        let rule = default_rule();
        let err = rule
            .integrate(|z| if z.re > 0.9 { Complex::new(f64::NAN, 0.0) } else { z })
            .unwrap_err();
        match err {
            Error::NonFinite { re, .. } => assert!(re > 0.9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn normalized_kernel_has_unit_norm() {
        let z = Complex::new(0.99, 0.0);
        let rule = DiskQuadrature::build_with(DiskRuleParams::default().graded_for_radius(0.99), |rho| {
            angular_count_for_peak(256, 0.99 * rho)
        })
        .unwrap();
        let v = rule
            .integrate_real(|w| ((1.0 - z.norm_sqr()) / (1.0 - z.conj() * w).powu(2)).norm_sqr())
            .unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn circle_rule_examples() {
        let rule = CircleQuadrature::new(256).unwrap();
        assert!((rule.integrate(|_| Complex::new(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        assert!(rule.integrate(|z| z.powu(3)).unwrap().norm() < 1e-14);
        for k in 1..256u32 {
            assert!(rule.integrate(|z| z.powu(k)).unwrap().norm() < 1e-13);
        }
        let v = rule
            .integrate(|z| Complex::new((1.0 - 0.5 * z.conj()).norm().powi(-4), 0.0))
            .unwrap();
        assert!((v.re - 1.25 / 0.75_f64.powi(3)).abs() < 1e-10);
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let values: Vec<Complex> = (0..1000).map(|k| Complex::new(k as f64, -(k as f64))).collect();
        assert_eq!(pairwise_sum(&values), Complex::new(499500.0, -499500.0));
    }
}
