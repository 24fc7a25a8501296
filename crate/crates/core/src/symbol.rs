//! Self-maps of the unit disk with exact Wirtinger calculus.
//!
//! A [`Symbol`] is a closed-form descriptor rather than an arbitrary callable,
//! so the derivative channels are analytic. Finite differences only appear in
//! [`finite_difference_wirtinger`], which exists to validate those channels.
//!
//! For the radially modulated family `φ(z) = z·G(|z|)` the derivatives are
//!
//! ```text
//! ∂φ/∂z = G(ρ) + ρ G'(ρ) / 2
//! ∂φ/∂z̄ = z² G'(ρ) / (2ρ)
//! J_φ   = G(ρ) (G(ρ) + ρ G'(ρ))
//! ```

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::domain::{check_in_closed_disk, Complex};
use crate::error::{Error, Result};

/// Smooth step `χ(ρ) = S((ρ - lo) / (hi - lo))` with
/// `S(t) = h(t) / (h(t) + h(1 - t))` and `h(t) = exp(-1/t)` for `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffProfile {
    pub lo: f64,
    pub hi: f64,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        CutoffProfile { lo: 0.5, hi: 0.75 }
    }
}

fn bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn bump_prime(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp() / (t * t)
    } else {
        0.0
    }
}

impl CutoffProfile {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::invalid(
                "cutoff",
                format!("knots must satisfy 0 <= lo < hi <= 1, got lo = {lo}, hi = {hi}"),
            ));
        }
        Ok(CutoffProfile { lo, hi })
    }

    pub fn value(&self, rho: f64) -> f64 {
        if rho <= self.lo {
            return 0.0;
        }
        if rho >= self.hi {
            return 1.0;
        }
        let t = (rho - self.lo) / (self.hi - self.lo);
        let a = bump(t);
        let b = bump(1.0 - t);
        a / (a + b)
    }

    pub fn derivative(&self, rho: f64) -> f64 {
        if rho <= self.lo || rho >= self.hi {
            return 0.0;
        }
        let width = self.hi - self.lo;
        let t = (rho - self.lo) / width;
        let a = bump(t);
        let b = bump(1.0 - t);
        let s = a + b;
        (bump_prime(t) * b + a * bump_prime(1.0 - t)) / (s * s) / width
    }
}

/// Polynomial radial profile `G(ρ) = Σ c_k ρ^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    pub coeffs: Vec<f64>,
}

impl RadialProfile {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid(
                "radial profile",
                "needs at least one finite coefficient",
            ));
        }
        Ok(RadialProfile { coeffs })
    }

    pub fn value(&self, rho: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * rho + c)
    }

    pub fn derivative(&self, rho: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * rho + k as f64 * c)
    }
}

/// The pair `(∂φ/∂z, ∂φ/∂z̄)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Wirtinger {
    pub dz: Complex,
    pub dzbar: Complex,
}

impl Wirtinger {
    /// Real Jacobian `|∂φ/∂z|² - |∂φ/∂z̄|²`.
    pub fn jacobian(&self) -> f64 {
        self.dz.norm_sqr() - self.dzbar.norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Symbol {
    Identity,
    Constant(Complex),
    Dilation(f64),
    Monomial(u32),
    Conjugate,
    /// `z (2|z| - |z|²) χ(|z|)`.
    PaperExample(CutoffProfile),
    /// `z G(|z|)` for a polynomial profile `G`.
    RadialModulated(RadialProfile),
    /// `e^{iα} φ(e^{-iα} z)`.
    Rotated { angle: f64, inner: Box<Symbol> },
}

impl Symbol {
    pub fn paper_example() -> Self {
        Symbol::PaperExample(CutoffProfile::default())
    }

    /// Value `φ(z)`. The caller guarantees `|z| <= 1`.
    pub fn value(&self, z: Complex) -> Complex {
        match self {
            Symbol::Identity => z,
            Symbol::Constant(c) => *c,
            Symbol::Dilation(a) => z * *a,
            Symbol::Monomial(p) => z.powu(*p),
            Symbol::Conjugate => z.conj(),
            Symbol::PaperExample(cutoff) => {
                let rho = z.norm();
                z * (rho * (2.0 - rho) * cutoff.value(rho))
            }
            Symbol::RadialModulated(profile) => z * profile.value(z.norm()),
            Symbol::Rotated { angle, inner } => {
                let rot = Complex::from_polar(1.0, *angle);
                rot * inner.value(z * rot.conj())
            }
        }
    }

    /// Radial profile `G` and its derivative for the radially modulated family.
    fn radial_profile(&self, rho: f64) -> Option<(f64, f64)> {
        match self {
            Symbol::PaperExample(cutoff) => {
                let base = rho * (2.0 - rho);
                let base_prime = 2.0 - 2.0 * rho;
                let chi = cutoff.value(rho);
                Some((base * chi, base_prime * chi + base * cutoff.derivative(rho)))
            }
            Symbol::RadialModulated(profile) => {
                Some((profile.value(rho), profile.derivative(rho)))
            }
            _ => None,
        }
    }

    /// Analytic Wirtinger derivatives. The caller guarantees `|z| <= 1`.
    pub fn wirtinger(&self, z: Complex) -> Wirtinger {
        let zero = Complex::new(0.0, 0.0);
        let one = Complex::new(1.0, 0.0);
        match self {
            Symbol::Identity => Wirtinger { dz: one, dzbar: zero },
            Symbol::Constant(_) => Wirtinger { dz: zero, dzbar: zero },
            Symbol::Dilation(a) => Wirtinger {
                dz: Complex::new(*a, 0.0),
                dzbar: zero,
            },
            Symbol::Monomial(p) => Wirtinger {
                dz: z.powu(p - 1) * *p as f64,
                dzbar: zero,
            },
            Symbol::Conjugate => Wirtinger { dz: zero, dzbar: one },
            Symbol::PaperExample(_) | Symbol::RadialModulated(_) => {
                let rho = z.norm();
                let (g, g_prime) = self.radial_profile(rho).expect("radial variant");
                if rho == 0.0 {
                    // Limits at the origin: z²/ρ -> 0.
                    return Wirtinger {
                        dz: Complex::new(g, 0.0),
                        dzbar: zero,
                    };
                }
                Wirtinger {
                    dz: Complex::new(g + 0.5 * rho * g_prime, 0.0),
                    dzbar: z * z * (g_prime / (2.0 * rho)),
                }
            }
            Symbol::Rotated { angle, inner } => {
                let rot = Complex::from_polar(1.0, *angle);
                let w = inner.wirtinger(z * rot.conj());
                Wirtinger {
                    dz: w.dz,
                    dzbar: w.dzbar * rot * rot,
                }
            }
        }
    }

    pub fn jacobian(&self, z: Complex) -> f64 {
        match self {
            Symbol::PaperExample(_) | Symbol::RadialModulated(_) => {
                let rho = z.norm();
                let (g, g_prime) = self.radial_profile(rho).expect("radial variant");
                g * (g + rho * g_prime)
            }
            _ => self.wirtinger(z).jacobian(),
        }
    }

    /// `∂φ/∂z̄ ≡ 0` on the whole disk.
    pub fn is_holomorphic(&self) -> bool {
        match self {
            Symbol::Identity | Symbol::Constant(_) | Symbol::Dilation(_) | Symbol::Monomial(_) => {
                true
            }
            Symbol::Conjugate | Symbol::PaperExample(_) | Symbol::RadialModulated(_) => false,
            Symbol::Rotated { inner, .. } => inner.is_holomorphic(),
        }
    }

    /// `φ(e^{iα} z) = e^{iα} φ(z)` for every `α`.
    pub fn is_rotation_equivariant(&self) -> bool {
        match self {
            Symbol::Identity
            | Symbol::Dilation(_)
            | Symbol::PaperExample(_)
            | Symbol::RadialModulated(_) => true,
            Symbol::Monomial(p) => *p == 1,
            Symbol::Constant(c) => *c == Complex::new(0.0, 0.0),
            Symbol::Conjugate => false,
            Symbol::Rotated { inner, .. } => inner.is_rotation_equivariant(),
        }
    }

    /// Radii where the symbol switches between closed-form pieces.
    ///
    /// Integrators split panels there so each panel sees a smooth integrand.
    /// Integer `κ` with `φ(e^{iβ} z) = e^{iκβ} φ(z)` for every `β`, if any.
    pub fn angular_frequency(&self) -> Option<i64> {
        match self {
            Symbol::Identity | Symbol::Dilation(_) | Symbol::PaperExample(_) | Symbol::RadialModulated(_) => Some(1),
            Symbol::Constant(_) => Some(0),
            Symbol::Monomial(p) => Some(*p as i64),
            Symbol::Conjugate => Some(-1),
            Symbol::Rotated { inner, .. } => inner.angular_frequency(),
        }
    }

    /// `max |φ|` over the circle `|z| = ρ`.
    pub fn ring_modulus_max(&self, rho: f64) -> f64 {
        match self {
            Symbol::Identity | Symbol::Conjugate => rho,
            Symbol::Constant(c) => c.norm(),
            Symbol::Dilation(a) => a * rho,
            Symbol::Monomial(p) => rho.powi(*p as i32),
            Symbol::PaperExample(cutoff) => rho * rho * (2.0 - rho) * cutoff.value(rho),
            Symbol::RadialModulated(profile) => rho * profile.value(rho).abs(),
            Symbol::Rotated { inner, .. } => inner.ring_modulus_max(rho),
        }
    }

    pub fn radial_knots(&self) -> Vec<f64> {
        match self {
            Symbol::PaperExample(cutoff) => vec![cutoff.lo, cutoff.hi],
            Symbol::Rotated { inner, .. } => inner.radial_knots(),
            _ => Vec::new(),
        }
    }

    /// Checks parameter ranges and `|φ| <= 1` on a fixed sample of disk points.
    pub fn validate(&self) -> Result<()> {
        match self {
            Symbol::Constant(c) if !(c.re.is_finite() && c.im.is_finite() && c.norm() < 1.0) => {
                return Err(Error::invalid("constant", "value must lie in the open disk"));
            }
            Symbol::Dilation(a) if !(a.is_finite() && (0.0..1.0).contains(a)) => {
                return Err(Error::invalid("dilation", "factor must lie in [0, 1)"));
            }
            Symbol::Monomial(0) => {
                return Err(Error::invalid("monomial", "power must be positive"));
            }
            Symbol::Rotated { angle, inner } => {
                if !angle.is_finite() {
                    return Err(Error::invalid("rotate", "angle must be finite"));
                }
                inner.validate()?;
            }
            _ => {}
        }
        let worst = range_sample()
            .map(|z| self.value(z).norm())
            .fold(0.0_f64, f64::max);
        if !(worst <= 1.0 + 1e-12) {
            return Err(Error::invalid(
                "symbol",
                format!("does not map the disk into itself: max |φ| = {worst} on the validation sample"),
            ));
        }
        Ok(())
    }
}

/// Deterministic sample of 10⁴ points of the closed disk (100 radii × 100 angles,
/// the outermost radius on the unit circle).
pub fn range_sample() -> impl Iterator<Item = Complex> {
    (1..=100).flat_map(|i| {
        let r = i as f64 / 100.0;
        (0..100).map(move |j| Complex::from_polar(r, std::f64::consts::TAU * (j as f64 + 0.5) / 100.0))
    })
}

/// Checked `φ(z)`.
pub fn eval_symbol(symbol: &Symbol, z: Complex) -> Result<Complex> {
    check_in_closed_disk(z)?;
    Ok(symbol.value(z))
}

/// Checked `(∂φ/∂z, ∂φ/∂z̄)`.
pub fn wirtinger_derivatives(symbol: &Symbol, z: Complex) -> Result<Wirtinger> {
    check_in_closed_disk(z)?;
    Ok(symbol.wirtinger(z))
}

/// Checked real Jacobian.
pub fn real_jacobian(symbol: &Symbol, z: Complex) -> Result<f64> {
    check_in_closed_disk(z)?;
    Ok(symbol.jacobian(z))
}

/// Central-difference Wirtinger derivatives with step `h`.
pub fn finite_difference_wirtinger(symbol: &Symbol, z: Complex, h: f64) -> Wirtinger {
    let dx = (symbol.value(z + h) - symbol.value(z - h)) / (2.0 * h);
    let iy = Complex::new(0.0, h);
    let dy = (symbol.value(z + iy) - symbol.value(z - iy)) / (2.0 * h);
    let i = Complex::new(0.0, 1.0);
    Wirtinger {
        dz: (dx - i * dy) * 0.5,
        dzbar: (dx + i * dy) * 0.5,
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Identity => write!(f, "identity"),
            Symbol::Constant(c) => {
                let sign = if c.im.is_sign_negative() { '-' } else { '+' };
                write!(f, "constant:{}{}{}i", fmt_f64(c.re), sign, fmt_f64(c.im.abs()))
            }
            Symbol::Dilation(a) => write!(f, "dilation:{}", fmt_f64(*a)),
            Symbol::Monomial(p) => write!(f, "monomial:{p}"),
            Symbol::Conjugate => write!(f, "conjugate"),
            Symbol::PaperExample(c) if *c == CutoffProfile::default() => write!(f, "paper-example"),
            Symbol::PaperExample(c) => write!(f, "paper-example:{},{}", fmt_f64(c.lo), fmt_f64(c.hi)),
            Symbol::RadialModulated(p) => {
                let coeffs: Vec<String> = p.coeffs.iter().map(|&c| fmt_f64(c)).collect();
                write!(f, "radial:{}", coeffs.join(","))
            }
            Symbol::Rotated { angle, inner } => write!(f, "rotate:{}:{}", fmt_f64(*angle), inner),
        }
    }
}

pub fn parse_real(token: &str) -> Result<f64> {
    let value: f64 = token.trim().parse().map_err(|_| Error::Parse {
        token: token.to_string(),
        reason: "expected a real number".into(),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            token: token.to_string(),
            reason: "number must be finite".into(),
        });
    }
    Ok(value)
}

/// Parses `RE+IMi` / `RE-IMi`.
pub fn parse_complex(token: &str) -> Result<Complex> {
    let bad = |reason: &str| Error::Parse {
        token: token.to_string(),
        reason: reason.to_string(),
    };
    let body = token.strip_suffix('i').ok_or_else(|| bad("expected RE+IMi"))?;
    // The separating sign is the last '+' or '-' that is not part of an exponent
    // and not the leading sign of the real part.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| {
            (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')
        })
        .ok_or_else(|| bad("expected RE+IMi"))?;
    let re = parse_real(&body[..split])?;
    let im = parse_real(&body[split..])?;
    Ok(Complex::new(re, im))
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let missing = |what: &str| Error::Parse {
            token: s.to_string(),
            reason: format!("`{head}` needs {what}"),
        };
        let no_arg = |sym: Symbol| match arg {
            None => Ok(sym),
            Some(a) => Err(Error::Parse {
                token: a.to_string(),
                reason: format!("`{head}` takes no argument"),
            }),
        };
        let symbol = match head {
            "identity" => no_arg(Symbol::Identity)?,
            "conjugate" => no_arg(Symbol::Conjugate)?,
            "constant" => Symbol::Constant(parse_complex(arg.ok_or_else(|| missing("a value RE+IMi"))?)?),
            "dilation" => Symbol::Dilation(parse_real(arg.ok_or_else(|| missing("a factor"))?)?),
            "monomial" => {
                let token = arg.ok_or_else(|| missing("a power"))?;
                let p: u32 = token.parse().map_err(|_| Error::Parse {
                    token: token.to_string(),
                    reason: "expected a positive integer".into(),
                })?;
                Symbol::Monomial(p)
            }
            "paper-example" => match arg {
                None => Symbol::paper_example(),
                Some(knots) => {
                    let (lo, hi) = knots.split_once(',').ok_or_else(|| Error::Parse {
                        token: knots.to_string(),
                        reason: "expected LO,HI".into(),
                    })?;
                    let cutoff = CutoffProfile::new(parse_real(lo)?, parse_real(hi)?).map_err(|e| {
                        Error::Parse {
                            token: knots.to_string(),
                            reason: e.to_string(),
                        }
                    })?;
                    Symbol::PaperExample(cutoff)
                }
            },
            "radial" => {
                let list = arg.ok_or_else(|| missing("coefficients C0,C1,..."))?;
                let coeffs = list.split(',').map(parse_real).collect::<Result<Vec<_>>>()?;
                Symbol::RadialModulated(RadialProfile::new(coeffs)?)
            }
            "rotate" => {
                let rest = arg.ok_or_else(|| missing("ANGLE:SYMBOL"))?;
                let (angle, inner) = rest.split_once(':').ok_or_else(|| missing("ANGLE:SYMBOL"))?;
                Symbol::Rotated {
                    angle: parse_real(angle)?,
                    inner: Box::new(inner.parse()?),
                }
            }
            other => {
                return Err(Error::Parse {
                    token: other.to_string(),
                    reason: "unknown symbol".into(),
                })
            }
        };
        symbol.validate().map_err(|e| Error::Parse {
            token: s.to_string(),
            reason: e.to_string(),
        })?;
        Ok(symbol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn builtins() -> Vec<Symbol> {
        vec![
            Symbol::Identity,
            Symbol::Constant(Complex::new(0.3, -0.2)),
            Symbol::Dilation(0.5),
            Symbol::Monomial(2),
            Symbol::Monomial(3),
            Symbol::Conjugate,
            Symbol::paper_example(),
            Symbol::RadialModulated(RadialProfile::new(vec![0.0, 1.0]).unwrap()),
            Symbol::RadialModulated(RadialProfile::new(vec![4.0, -6.0, 4.0, -1.0]).unwrap()),
            Symbol::Rotated {
                angle: PI / 3.0,
                inner: Box::new(Symbol::Monomial(2)),
            },
        ]
    }

    #[test]
    fn paper_example_values() {
        let s = Symbol::paper_example();
        assert_eq!(eval_symbol(&s, Complex::new(0.25, 0.0)).unwrap(), Complex::new(0.0, 0.0));
        for k in 0..16 {
            let z = Complex::from_polar(1.0, TAU * k as f64 / 16.0);
            assert!((eval_symbol(&s, z).unwrap() - z).norm() < 1e-15);
        }
        let z = Complex::new(0.3, 0.4);
        assert_eq!(eval_symbol(&Symbol::Identity, z).unwrap(), z);
    }

    #[test]
    fn eval_rejects_outside_disk() {
        assert!(eval_symbol(&Symbol::Identity, Complex::new(1.0 + 1e-9, 0.0)).is_err());
        assert!(eval_symbol(&Symbol::Identity, Complex::new(1.0 + 1e-13, 0.0)).is_ok());
    }

    #[test]
    fn boundary_derivatives_of_example() {
        let s = Symbol::paper_example();
        for k in 0..256 {
            let z = Complex::from_polar(1.0, TAU * k as f64 / 256.0);
            let w = wirtinger_derivatives(&s, z).unwrap();
            assert!(w.dzbar.norm() < 1e-12);
            assert!((w.dz - 1.0).norm() < 1e-12);
            assert!((real_jacobian(&s, z).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugate_and_identity_derivatives() {
        let z = Complex::new(0.1, -0.7);
        let w = Symbol::Conjugate.wirtinger(z);
        assert_eq!(w.dz, Complex::new(0.0, 0.0));
        assert_eq!(w.dzbar, Complex::new(1.0, 0.0));
        assert_eq!(Symbol::Identity.jacobian(z), 1.0);
    }

    #[test]
    fn jacobian_at_point_nine() {
        // G = 2ρ - ρ² with χ = 1: G(0.9) = 0.99, G'(0.9) = 0.2.
        let s = Symbol::paper_example();
        let j = s.jacobian(Complex::new(0.9, 0.0));
        assert!((j - 1.1583).abs() < 1e-12, "{j}");
        let fd = finite_difference_wirtinger(&s, Complex::from_polar(0.9, 1.0), 1e-5);
        assert!((fd.jacobian() - 1.1583).abs() < 1e-8);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        // 100 deterministic interior points with |z| <= 0.999.
        for s in builtins() {
            for k in 1..=100 {
                let r = 0.999 * ((k as f64 * 0.618_033_988_7) % 1.0).sqrt();
                let z = Complex::from_polar(r, 2.399_963 * k as f64);
                let exact = s.wirtinger(z);
                let fd = finite_difference_wirtinger(&s, z, 1e-5);
                assert!((exact.dz - fd.dz).norm() < 1e-6, "{s} dz at {z}");
                assert!((exact.dzbar - fd.dzbar).norm() < 1e-6, "{s} dzbar at {z}");
            }
        }
    }

    #[test]
    fn radial_limits_at_origin() {
        let s = Symbol::paper_example();
        let w = s.wirtinger(Complex::new(0.0, 0.0));
        assert_eq!(w.dz, Complex::new(0.0, 0.0));
        assert_eq!(w.dzbar, Complex::new(0.0, 0.0));
    }

    #[test]
    fn builtins_stay_in_disk() {
        for s in builtins() {
            s.validate().unwrap();
            let interior = range_sample().filter(|z| z.norm() < 0.995);
            for z in interior {
                assert!(s.value(z).norm() < 1.0, "{s} at {z}");
            }
        }
        let bad = Symbol::RadialModulated(RadialProfile::new(vec![2.0]).unwrap());
        assert!(bad.validate().is_err());
    }

    #[test]
    fn cutoff_knots_and_monotonicity() {
        let c = CutoffProfile::default();
        assert_eq!(c.value(0.5), 0.0);
        assert_eq!(c.value(0.2), 0.0);
        assert_eq!(c.value(0.75), 1.0);
        assert_eq!(c.value(1.0), 1.0);
        let mut prev = 0.0;
        for k in 0..=1000 {
            let rho = 0.5 + 0.25 * k as f64 / 1000.0;
            let v = c.value(rho);
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn cutoff_derivatives_continuous_across_knots() {
        let c = CutoffProfile::default();
        let h = 1e-4;
        for knot in [c.lo, c.hi] {
            let d1 = |x: f64| (c.value(x + h) - c.value(x - h)) / (2.0 * h);
            let d2 = |x: f64| (c.value(x + h) - 2.0 * c.value(x) + c.value(x - h)) / (h * h);
            let eps = 1e-3;
            assert!((d1(knot - eps) - d1(knot + eps)).abs() < 1e-6);
            assert!((d2(knot - eps) - d2(knot + eps)).abs() < 1e-6);
            assert!((c.derivative(knot + 1e-3) - d1(knot + 1e-3)).abs() < 1e-6);
        }
    }

    #[test]
    fn parse_round_trip_and_errors() {
        for text in [
            "identity",
            "constant:0.3+0i",
            "constant:-0.1-0.25i",
            "dilation:0.5",
            "monomial:3",
            "conjugate",
            "paper-example",
            "paper-example:0.4,0.8",
            "radial:0,1",
            "rotate:1.5:paper-example",
        ] {
            let s: Symbol = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        match "nonsense".parse::<Symbol>() {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "nonsense"),
            other => panic!("{other:?}"),
        }
        match "dilation:abc".parse::<Symbol>() {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "abc"),
            other => panic!("{other:?}"),
        }
        assert!("dilation:1.5".parse::<Symbol>().is_err());
        assert!("monomial:0".parse::<Symbol>().is_err());
        assert!("identity:3".parse::<Symbol>().is_err());
        assert_eq!(
            "constant:1e-1-2e-1i".parse::<Symbol>().unwrap(),
            Symbol::Constant(Complex::new(0.1, -0.2))
        );
    }

    proptest! {
        #[test]
        fn radial_symbols_are_rotation_equivariant(alpha in 0.0..TAU, r in 0.0..1.0f64, t in 0.0..TAU) {
            let rot = Complex::from_polar(1.0, alpha);
            let z = Complex::from_polar(r, t);
            for s in [Symbol::paper_example(), Symbol::RadialModulated(RadialProfile::new(vec![0.0, 1.0]).unwrap())] {
                let lhs = s.value(rot * z);
                let rhs = rot * s.value(z);
                prop_assert!((lhs - rhs).norm() < 1e-15);
                prop_assert!((lhs.norm() - s.value(z).norm()).abs() < 1e-15);
            }
        }

        #[test]
        fn angular_frequency_and_ring_modulus(beta in 0.0..TAU, r in 0.05..0.999f64, t in 0.0..TAU) {
            let symbols = [
                Symbol::Identity,
                Symbol::Constant(Complex::new(0.3, -0.1)),
                Symbol::Dilation(0.5),
                Symbol::Monomial(3),
                Symbol::Conjugate,
                Symbol::paper_example(),
                Symbol::RadialModulated(RadialProfile::new(vec![4.0, -6.0, 4.0, -1.0]).unwrap()),
                Symbol::Rotated { angle: 1.0, inner: Box::new(Symbol::Monomial(2)) },
            ];
            let z = Complex::from_polar(r, t);
            for s in &symbols {
                let kappa = s.angular_frequency().unwrap() as f64;
                let lhs = s.value(Complex::from_polar(1.0, beta) * z);
                let rhs = Complex::from_polar(1.0, kappa * beta) * s.value(z);
                prop_assert!((lhs - rhs).norm() < 1e-13, "{s}");
                prop_assert!(s.value(z).norm() <= s.ring_modulus_max(r) + 1e-14, "{s}");
            }
        }
    }
}
