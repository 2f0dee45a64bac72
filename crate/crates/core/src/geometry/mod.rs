//! Dimension-generic constants and quadrature on spheres, balls and annuli.

mod ball;
mod sphere;

pub use ball::{BallRule, DEFAULT_RADIAL_PANELS};
pub use sphere::{SphereRule, DEFAULT_ORDER};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Ambient dimension `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n, 2));
        }
        Ok(Dimension(n))
    }

    /// Rejects `n = 2` for operations that only make sense in space.
    pub fn spatial(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDimension(n, 3));
        }
        Ok(Dimension(n))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// `n - 1` as a float, the exponent that appears throughout.
    #[inline]
    pub fn codim_exponent(self) -> f64 {
        (self.0 - 1) as f64
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

/// `omega_{n-1}`, the (n-1)-dimensional area of the unit sphere in R^n.
pub fn unit_sphere_area(n: usize) -> Result<f64> {
    Dimension::new(n)?;
    Ok(sphere_area_unchecked(n))
}

/// `Omega_n = omega_{n-1} / n`, the volume of the unit ball.
pub fn unit_ball_volume(n: usize) -> Result<f64> {
    Ok(unit_sphere_area(n)? / n as f64)
}

pub(crate) fn sphere_area_unchecked(n: usize) -> f64 {
    // A(1) = 2, A(2) = 2 pi, A(k + 2) = 2 pi A(k) / k
    let (mut area, mut k) = if n.is_multiple_of(2) { (2.0 * PI, 2) } else { (2.0, 1) };
    while k < n {
        area *= 2.0 * PI / k as f64;
        k += 2;
    }
    area
}

/// Open spherical annulus `{ r1 < |x - center| < r2 }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub center: Vec<f64>,
    pub r1: f64,
    pub r2: f64,
}

impl AnnulusSpec {
    pub fn new(center: Vec<f64>, r1: f64, r2: f64) -> Result<Self> {
        Dimension::new(center.len())?;
        if !(r1 > 0.0) {
            return Err(Error::param("r1", format!("must be positive, got {r1}")));
        }
        if !(r1 < r2) {
            return Err(Error::param("r2", format!("must exceed r1 = {r1}, got {r2}")));
        }
        Ok(Self { center, r1, r2 })
    }

    pub fn centered(n: usize, r1: f64, r2: f64) -> Result<Self> {
        Self::new(vec![0.0; n], r1, r2)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Lebesgue measure `Omega_n (r2^n - r1^n)`.
    pub fn volume(&self) -> f64 {
        let n = self.dim() as i32;
        sphere_area_unchecked(self.dim()) / n as f64 * (self.r2.powi(n) - self.r1.powi(n))
    }
}

#[inline]
pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[inline]
pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sphere_areas_low_dimensions() {
        assert_relative_eq!(unit_sphere_area(2).unwrap(), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(unit_sphere_area(3).unwrap(), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(unit_sphere_area(4).unwrap(), 2.0 * PI * PI, max_relative = 1e-15);
    }

    #[test]
    fn ball_volume_is_area_over_n() {
        assert_relative_eq!(unit_ball_volume(3).unwrap(), 4.0 * PI / 3.0, max_relative = 1e-15);
        assert_relative_eq!(unit_ball_volume(2).unwrap(), PI, max_relative = 1e-15);
    }

    #[test]
    fn rejects_low_dimension() {
        assert_eq!(unit_sphere_area(1), Err(Error::InvalidDimension(1, 2)));
        assert!(Dimension::spatial(2).is_err());
        assert!(Dimension::spatial(3).is_ok());
    }

    #[test]
    fn annulus_validation() {
        assert!(AnnulusSpec::centered(3, 0.0, 1.0).is_err());
        assert!(AnnulusSpec::centered(3, 0.5, 0.5).is_err());
        assert!(AnnulusSpec::centered(3, 0.6, 0.5).is_err());
        let a = AnnulusSpec::centered(2, 1.0, 2.0).unwrap();
        assert_relative_eq!(a.volume(), 3.0 * PI, max_relative = 1e-15);
    }
}
