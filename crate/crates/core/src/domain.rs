//! Points of the closed unit disk and the boundary geometry used by the
//! hypothesis checks.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Slack allowed when deciding whether a point belongs to the closed disk.
pub const DISK_SLACK: f64 = 1e-12;

/// Rejects non-finite points and points outside the closed unit disk.
pub fn check_in_closed_disk(z: Complex) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() || z.norm() > 1.0 + DISK_SLACK {
        return Err(Error::OutsideDisk { re: z.re, im: z.im });
    }
    Ok(())
}

/// Distance to the unit circle, `1 - |z|`.
pub fn boundary_distance(z: Complex) -> f64 {
    1.0 - z.norm()
}

/// Nearest point of the unit circle, `z / |z|`.
///
/// Only meaningful near the boundary; the origin has no nearest point.
pub fn boundary_projection(z: Complex) -> Result<Complex> {
    check_in_closed_disk(z)?;
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::ProjectionAtOrigin);
    }
    Ok(z / r)
}

#[cfg(test)]
pub(crate) fn polar(r: f64, theta: f64) -> Complex {
    Complex::from_polar(r, theta)
}

/// Returns an error naming the node when `value` is not finite.
pub(crate) fn ensure_finite(index: usize, node: Complex, value: Complex) -> Result<Complex> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite {
            index,
            re: node.re,
            im: node.im,
            value: format!("{value}"),
        })
    }
}
