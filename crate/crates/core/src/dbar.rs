//! One-variable `∂̄`-solver and the numerical witness of Kohn's formula.
//!
//! In dimension one, `∂̄*N∂̄h` is the canonical (minimal-norm) solution `u_c`
//! of `∂u/∂z̄ = ∂h/∂z̄`. A particular solution is the Cauchy–Pompeiu transform
//!
//! ```text
//! u(z) = -(1/π) ∫_𝔻 g(w) / (w - z) dλ(w),     ∂u/∂z̄ = g,
//! ```
//!
//! and `u_c = u - P u`. Kohn's formula then says `u_c = (I - P) h`.
//!
//! The transform is integrated in polar coordinates `w = z + s e^{it}` centred
//! at `z`, where the area element `s ds dt` cancels the `1/|w - z|`
//! singularity. The disk of radius `min(1/2, δ(z)/2)` around `z` is the near
//! region; the far region runs along each ray up to the unit circle, with
//! Gauss–Legendre panels split where the ray crosses the symbol's radial knots.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::bergman::{bergman_project, MonomialBasis, PolynomialCoeffs, Samples};
use crate::domain::{boundary_distance, ensure_finite, Complex};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, pairwise_sum, DiskQuadrature, DiskRuleParams};
use crate::symbol::Symbol;

/// Node counts for the singular integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CauchyConfig {
    pub near_radial: usize,
    pub near_angular: usize,
    /// Gauss–Legendre order of each far-field panel along a ray.
    pub far_radial: usize,
    /// Minimum number of rays in the far field; raised near the boundary.
    pub far_angular: usize,
}

impl Default for CauchyConfig {
    fn default() -> Self {
        CauchyConfig {
            near_radial: 32,
            near_angular: 64,
            far_radial: 16,
            far_angular: 128,
        }
    }
}

/// Closest approach to the circle admitted by the solver.
pub const BOUNDARY_EXCLUSION: f64 = 1e-12;

impl CauchyConfig {
    /// Rays needed at distance `delta` from the circle: the ray length
    /// `s_max(t)` varies on an angular scale `~ √δ` there.
    fn far_rays(&self, delta: f64) -> usize {
        let need = 16.0 / delta.sqrt();
        let mut count = self.far_angular;
        while (count as f64) < need && count < (1 << 16) {
            count *= 2;
        }
        count
    }
}

/// Cauchy–Pompeiu transform of `g` at an interior point `z`.
///
/// `knots` lists radii across which `g` changes character; far-field panels
/// are split at them.
pub fn cauchy_transform_solve<G>(g: &G, z: Complex, config: &CauchyConfig, knots: &[f64]) -> Result<Complex>
where
    G: Fn(Complex) -> Complex + ?Sized,
{
    let delta = boundary_distance(z);
    if !(delta > BOUNDARY_EXCLUSION) {
        return Err(Error::TooCloseToBoundary {
            operation: "the Cauchy transform",
            re: z.re,
            im: z.im,
        });
    }
    let eps = (0.5 * delta).min(0.5);

    // Near region: ∫_0^{2π} ∫_0^ε g(z + s e^{it}) e^{-it} ds dt.
    let near_nodes = gauss_legendre(config.near_radial, 0.0, eps);
    let near: Vec<Complex> = (0..config.near_angular)
        .map(|j| {
            let dir = Complex::from_polar(1.0, TAU * j as f64 / config.near_angular as f64);
            let along: Vec<Complex> = near_nodes.iter().map(|&(s, w)| g(z + dir * s) * w).collect();
            pairwise_sum(&along) * dir.conj()
        })
        .collect();
    let near = pairwise_sum(&near) * (TAU / config.near_angular as f64);

    // Far region: s from ε to the unit circle along each ray.
    let rays = config.far_rays(delta);
    let r2 = z.norm_sqr();
    let panel = gauss_legendre(config.far_radial, -1.0, 1.0);
    let far: Vec<Complex> = (0..rays)
        .map(|j| {
            let dir = Complex::from_polar(1.0, TAU * j as f64 / rays as f64);
            let b = (z.conj() * dir).re;
            let s_max = -b + (b * b + 1.0 - r2).sqrt();
            let mut cuts = vec![eps];
            for &kappa in knots {
                let disc = b * b - (r2 - kappa * kappa);
                if disc > 0.0 {
                    let root = disc.sqrt();
                    for s in [-b - root, -b + root] {
                        if s > eps && s < s_max {
                            cuts.push(s);
                        }
                    }
                }
            }
            cuts.push(s_max);
            cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite cut"));
            let mut along = Vec::with_capacity(panel.len() * (cuts.len() - 1));
            for w in cuts.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                for &(x, weight) in &panel {
                    along.push(g(z + dir * (mid + half * x)) * (half * weight));
                }
            }
            pairwise_sum(&along) * dir.conj()
        })
        .collect();
    let far = pairwise_sum(&far) * (TAU / rays as f64);

    let u = -(near + far) / PI;
    ensure_finite(0, z, u)
}

/// Resolution of the Kohn identity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KohnConfig {
    /// Rule on which both sides are sampled and compared.
    pub rule: DiskRuleParams,
    pub cauchy: CauchyConfig,
    /// Truncation degree of the projection `P`.
    pub projection_degree: usize,
}

impl Default for KohnConfig {
    fn default() -> Self {
        KohnConfig {
            rule: DiskRuleParams::new(16, 64, 4, 0.5),
            cauchy: CauchyConfig::default(),
            projection_degree: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KohnReport {
    /// `‖u_c - (I - P)(f∘φ)‖`.
    pub residual: f64,
    /// `‖u_c‖`, the `∂̄*N∂̄` side.
    pub left_norm: f64,
    /// `‖(I - P)(f∘φ)‖`.
    pub right_norm: f64,
    /// Either projection still had weight on its last retained coefficient.
    pub truncation_flag: bool,
}

/// Compares the canonical solution of `∂̄u = ∂̄(f∘φ)` with `(I - P)(f∘φ)`.
///
/// `∂̄(f∘φ) = f'(φ) ∂φ/∂z̄` by the chain rule, since `f` is holomorphic.
pub fn kohn_identity_residual(symbol: &Symbol, f: &PolynomialCoeffs, config: &KohnConfig) -> Result<KohnReport> {
    if !f.is_finite() {
        return Err(Error::invalid("f", "coefficients must be finite"));
    }
    let rule = DiskQuadrature::build(config.rule)?;
    let basis = MonomialBasis::new(config.projection_degree);
    let knots = symbol.radial_knots();

    let composed = Samples::from_fn(&rule, |w| f.eval(symbol.value(w)))?;
    let dbar = |w: Complex| f.derivative(symbol.value(w)) * symbol.wirtinger(w).dzbar;

    let transformed = if symbol.is_holomorphic() {
        // ∂̄(f∘φ) ≡ 0, so the transform vanishes identically.
        Samples {
            values: vec![Complex::new(0.0, 0.0); rule.node_count()],
        }
    } else {
        let nodes: Vec<Complex> = rule.nodes().map(|(w, _)| w).collect();
        let values = nodes
            .par_iter()
            .map(|&w| cauchy_transform_solve(&dbar, w, &config.cauchy, &knots))
            .collect::<Result<Vec<_>>>()?;
        Samples { values }
    };

    let p_composed = bergman_project(&composed, basis, &rule)?;
    let p_transformed = bergman_project(&transformed, basis, &rule)?;

    let remove_projection = |samples: &Samples, coeffs: &PolynomialCoeffs| Samples {
        values: rule
            .nodes()
            .zip(&samples.values)
            .map(|((w, _), v)| v - coeffs.eval(w))
            .collect(),
    };
    let right = remove_projection(&composed, &p_composed.coeffs);
    let left = remove_projection(&transformed, &p_transformed.coeffs);
    let diff = Samples {
        values: left.values.iter().zip(&right.values).map(|(a, b)| a - b).collect(),
    };
    let norm = |s: &Samples| s.norm_sqr(&rule).max(0.0).sqrt();
    Ok(KohnReport {
        residual: norm(&diff),
        left_norm: norm(&left),
        right_norm: norm(&right),
        truncation_flag: p_composed.truncation_limited || p_transformed.truncation_limited,
    })
}
