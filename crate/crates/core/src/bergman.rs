//! Bergman kernel of the unit disk, the orthonormal monomial basis and the
//! truncated Bergman projection.

use std::cell::RefCell;
use std::str::FromStr;

use rayon::prelude::*;
use rustfft::FftPlannerScalar;
use serde::Serialize;

use crate::domain::{ensure_finite, Complex};
use crate::error::{Error, Result};
use crate::symbol::{parse_complex, parse_real};
use crate::quadrature::{pairwise_sum, pairwise_sum_real, DiskQuadrature, Ring};

const SINGULAR_GAP: f64 = 1e-14;

fn kernel_gap(z: Complex, w: Complex) -> Result<Complex> {
    let d = Complex::new(1.0, 0.0) - z.conj() * w;
    if d.norm() < SINGULAR_GAP {
        return Err(Error::NearSingular {
            gap: d.norm(),
            z_re: z.re,
            z_im: z.im,
            w_re: w.re,
            w_im: w.im,
        });
    }
    Ok(d)
}

/// `K(z, w) = (1 - conj(z) w)^{-2}`.
pub fn kernel_eval(z: Complex, w: Complex) -> Result<Complex> {
    Ok(kernel_gap(z, w)?.powi(-2))
}

/// `k_z(w) = (1 - |z|²) (1 - conj(z) w)^{-2}`.
pub fn normalized_kernel_eval(z: Complex, w: Complex) -> Result<Complex> {
    Ok(kernel_gap(z, w)?.powi(-2) * (1.0 - z.norm_sqr()))
}

/// Orthonormal basis `e_m(z) = √(m+1) z^m`, `0 <= m <= degree`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonomialBasis {
    pub degree: usize,
}

impl MonomialBasis {
    pub fn new(degree: usize) -> Self {
        MonomialBasis { degree }
    }

    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn eval(&self, m: usize, z: Complex) -> Complex {
        z.powu(m as u32) * ((m + 1) as f64).sqrt()
    }

    /// Writes `e_0(z), ..., e_degree(z)` into `out`.
    pub fn eval_all(&self, z: Complex, out: &mut Vec<Complex>) {
        out.clear();
        let mut power = Complex::new(1.0, 0.0);
        for m in 0..=self.degree {
            out.push(power * ((m + 1) as f64).sqrt());
            power *= z;
        }
    }
}

/// Coefficients of `f = Σ c_m e_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolynomialCoeffs {
    pub coeffs: Vec<Complex>,
}

impl PolynomialCoeffs {
    pub fn new(coeffs: Vec<Complex>) -> Self {
        PolynomialCoeffs { coeffs }
    }

    /// The basis function `e_m`.
    pub fn basis_vector(m: usize) -> Self {
        let mut coeffs = vec![Complex::new(0.0, 0.0); m + 1];
        coeffs[m] = Complex::new(1.0, 0.0);
        PolynomialCoeffs { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `‖f‖² = Σ |c_m|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Horner evaluation of `Σ c_m √(m+1) z^m`.
    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, (m, c)| acc * z + c * ((m + 1) as f64).sqrt())
    }

    /// `f'(z) = Σ c_m √(m+1) m z^{m-1}`.
    pub fn derivative(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, (m, c)| {
                acc * z + c * (((m + 1) as f64).sqrt() * m as f64)
            })
    }
}

/// Comma-separated coefficients, each `RE` or `RE+IMi`.
impl FromStr for PolynomialCoeffs {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|token| {
                let token = token.trim();
                if token.ends_with('i') {
                    parse_complex(token)
                } else {
                    parse_real(token).map(|re| Complex::new(re, 0.0))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PolynomialCoeffs::new(coeffs))
    }
}

/// Result of projecting sampled data onto the first `degree + 1` basis functions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    pub coeffs: PolynomialCoeffs,
    /// `‖g‖²` under the same rule.
    pub input_norm_sqr: f64,
    /// `|⟨g, e_N⟩|² / ‖g‖²`.
    pub tail_indicator: f64,
    /// The last coefficient is not negligible (`tail_indicator >= 1e-12`).
    pub truncation_limited: bool,
}

/// Tail level above which a truncated projection is flagged.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Node values of a function on a disk rule, ring-major.
#[derive(Debug, Clone)]
pub struct Samples {
    pub values: Vec<Complex>,
}

impl Samples {
    pub fn from_fn<F>(rule: &DiskQuadrature, g: F) -> Result<Self>
    where
        F: Fn(Complex) -> Complex + Sync,
    {
        let rows = rule
            .rings()
            .par_iter()
            .map(|ring| {
                rule.directions(ring)
                    .enumerate()
                    .map(|(j, d)| {
                        let node = d * ring.rho;
                        ensure_finite(ring.offset + j, node, g(node))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Samples {
            values: rows.concat(),
        })
    }

    /// Values on one ring.
    pub fn ring<'a>(&'a self, ring: &Ring) -> &'a [Complex] {
        &self.values[ring.offset..ring.offset + ring.angular]
    }

    /// `‖g‖²` under the rule.
    pub fn norm_sqr(&self, rule: &DiskQuadrature) -> f64 {
        let terms: Vec<f64> = rule
            .rings()
            .iter()
            .map(|ring| {
                let sq: Vec<f64> = self.ring(ring).iter().map(|v| v.norm_sqr()).collect();
                pairwise_sum_real(&sq) * ring.weight / ring.angular as f64
            })
            .collect();
        pairwise_sum_real(&terms)
    }

    /// `⟨self, other⟩` under the rule.
    pub fn inner(&self, other: &Samples, rule: &DiskQuadrature) -> Complex {
        let terms: Vec<Complex> = rule
            .rings()
            .iter()
            .map(|ring| {
                let prods: Vec<Complex> = self
                    .ring(ring)
                    .iter()
                    .zip(other.ring(ring))
                    .map(|(a, b)| a * b.conj())
                    .collect();
                pairwise_sum(&prods) * (ring.weight / ring.angular as f64)
            })
            .collect();
        pairwise_sum(&terms)
    }
}

/// Discrete Fourier coefficients `(1/M) Σ_j v_j e^{-2πijk/M}`, `0 <= k < M`,
/// of values at the `M` uniform angles of one ring.
pub(crate) fn ring_spectrum(values: &[Complex]) -> Vec<Complex> {
    thread_local! {
        static PLANNER: RefCell<FftPlannerScalar<f64>> = RefCell::new(FftPlannerScalar::new());
    }
    let m = values.len();
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(m));
    let mut buf = values.to_vec();
    plan.process(&mut buf);
    let scale = 1.0 / m as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Smallest angular count among the rings of `rule`.
pub(crate) fn min_angular(rule: &DiskQuadrature) -> usize {
    rule.rings().iter().map(|r| r.angular).min().unwrap_or(0)
}

/// `c_m = ⟨g, e_m⟩` by quadrature, `m <= degree`.
///
/// Each ring contributes `w ρ^m √(m+1)` times its `m`-th Fourier coefficient,
/// so the degree must stay below every ring's angular count.
pub fn bergman_project(samples: &Samples, basis: MonomialBasis, rule: &DiskQuadrature) -> Result<Projection> {
    if samples.values.len() != rule.node_count() {
        return Err(Error::invalid("samples", "length does not match the rule"));
    }
    let n = basis.len();
    if n > min_angular(rule) {
        return Err(Error::invalid(
            "degree",
            format!("{} aliases on rings with {} angular nodes", basis.degree, min_angular(rule)),
        ));
    }
    let spectra: Vec<Vec<Complex>> = rule.rings().par_iter().map(|ring| ring_spectrum(samples.ring(ring))).collect();
    let coeffs: Vec<Complex> = (0..n)
        .map(|k| {
            let column: Vec<Complex> = rule
                .rings()
                .iter()
                .zip(&spectra)
                .map(|(ring, spec)| spec[k] * (ring.rho.powi(k as i32) * ((k + 1) as f64).sqrt() * ring.weight))
                .collect();
            pairwise_sum(&column)
        })
        .collect();
    let input_norm_sqr = samples.norm_sqr(rule);
    let last = coeffs[n - 1].norm_sqr();
    let tail_indicator = if input_norm_sqr > 0.0 {
        last / input_norm_sqr
    } else {
        0.0
    };
    Ok(Projection {
        coeffs: PolynomialCoeffs::new(coeffs),
        input_norm_sqr,
        tail_indicator,
        truncation_limited: tail_indicator >= TAIL_TOLERANCE,
    })
}

/// Samples `g` on the rule and projects it.
pub fn bergman_project_fn<F>(g: F, basis: MonomialBasis, rule: &DiskQuadrature) -> Result<Projection>
where
    F: Fn(Complex) -> Complex + Sync,
{
    bergman_project(&Samples::from_fn(rule, g)?, basis, rule)
}
