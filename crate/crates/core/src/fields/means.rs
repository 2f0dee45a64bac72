use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::QField;
use super::radial::RadialFunction;
use crate::error::{Error, Result};
use crate::geometry::{norm, unit_sphere_area, BallRule, SphereRule};
use crate::numeric::{integrate_doubling, integrate_tail, AdaptiveOptions, TailOptions, TailVerdict};
use crate::Method;

/// Validates that `S(x0, r)` lies in the field's domain.
fn check_sphere(q: &QField, x0: &[f64], r: f64) -> Result<()> {
    check_region(q, x0, r, false)
}

/// Validates that the open ball `B(x0, r)` lies in the field's domain.
pub(crate) fn check_ball(q: &QField, x0: &[f64], r: f64) -> Result<()> {
    check_region(q, x0, r, true)
}

fn check_region(q: &QField, x0: &[f64], r: f64, open: bool) -> Result<()> {
    q.check_dim(x0.len())?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("r", format!("must be positive, got {r}")));
    }
    if let Some(big) = q.domain_radius() {
        let reach = norm(x0) + r;
        if reach > big || (!open && reach == big) {
            return Err(Error::OutsideDomain(reach));
        }
    }
    Ok(())
}

fn is_origin(x0: &[f64]) -> bool {
    x0.iter().all(|&v| v == 0.0)
}

/// Mean of `Q` over the sphere `S(x0, r)` against normalized area.
pub fn spherical_mean(q: &QField, x0: &[f64], r: f64, order: usize) -> Result<f64> {
    check_sphere(q, x0, r)?;
    if let Some(c) = q.constant_value() {
        return Ok(c);
    }
    if q.is_radial() && is_origin(x0) {
        return Ok(q.radial_value(r));
    }
    let rule = SphereRule::new(x0, r, order)?;
    Ok(rule.integrate(|x| q.value(x)) / rule.area())
}

/// Spherical means at a decreasing list of radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalMeanTable {
    pub radii: Vec<f64>,
    pub means: Vec<f64>,
    pub order: usize,
}

pub fn spherical_mean_table(q: &QField, x0: &[f64], radii: &[f64], order: usize) -> Result<SphericalMeanTable> {
    if radii.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::param("radii", "must be strictly decreasing"));
    }
    let means = radii
        .par_iter()
        .map(|&r| spherical_mean(q, x0, r, order))
        .collect::<Result<Vec<f64>>>()?;
    Ok(SphericalMeanTable {
        radii: radii.to_vec(),
        means,
        order,
    })
}

/// `(int_{S(x0, r)} Q^k dA)^{1/k}`.
pub fn sphere_lnorm(q: &QField, x0: &[f64], r: f64, k: u32, order: usize) -> Result<f64> {
    check_sphere(q, x0, r)?;
    if k == 0 {
        return Err(Error::param("k", "must be positive"));
    }
    let n = x0.len();
    let kf = k as f64;
    if q.is_radial() && is_origin(x0) {
        let area = unit_sphere_area(n)? * r.powi(n as i32 - 1);
        return Ok(q.radial_value(r) * area.powf(1.0 / kf));
    }
    let rule = SphereRule::new(x0, r, order)?;
    Ok(rule.integrate(|x| q.value(x).powi(k as i32)).powf(1.0 / kf))
}

/// `L^p` norm over a ball about the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LpNorm {
    Finite { integral: f64, norm: f64, method: Method },
    Infinite { method: Method },
}

impl LpNorm {
    pub fn is_finite(&self) -> bool {
        matches!(self, LpNorm::Finite { .. })
    }
}

/// Whether `int_0 r^{n-1-p gamma} (ln 1/r)^{p s} dr` diverges.
fn power_log_integral_diverges(p: f64, gamma: f64, s: f64, n: usize) -> bool {
    let lead = p * gamma;
    let n = n as f64;
    lead > n || (lead == n && p * s >= -1.0)
}

/// `int_{B(0, radius)} Q^p dm`, with divergence decided in closed form when
/// the field's growth at the origin is known.
pub fn ball_lp_norm(q: &QField, p: f64, radius: f64, n: usize, order: usize) -> Result<LpNorm> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::param("p", format!("must be at least 1, got {p}")));
    }
    check_ball(q, &vec![0.0; n], radius)?;
    if let Some(g) = q.growth_bound() {
        if power_log_integral_diverges(p, g.gamma, g.s, n) {
            return Ok(LpNorm::Infinite {
                method: Method::Symbolic,
            });
        }
    }
    let integral = if q.is_radial() {
        let rq = q.radial()?;
        let u0 = -radius.ln();
        let opts = TailOptions {
            max_abscissa: rq.max_depth().min(TailOptions::default().max_abscissa),
            ..TailOptions::default()
        };
        let tail = integrate_tail(|u| (p * rq.ln_value_at_depth(u) - n as f64 * u).exp(), u0, opts);
        match tail.verdict {
            TailVerdict::Converged => unit_sphere_area(n)? * tail.value,
            TailVerdict::Diverged => {
                return Ok(LpNorm::Infinite {
                    method: Method::Quadrature,
                })
            }
            TailVerdict::Undecided => {
                return Err(Error::Numerical(
                    "ball integral neither converges nor diverges numerically".into(),
                ))
            }
        }
    } else {
        BallRule::new(&vec![0.0; n], radius, order)?.integrate(|x| q.value(x).powf(p))
    };
    Ok(LpNorm::Finite {
        integral,
        norm: integral.powf(1.0 / p),
        method: Method::Quadrature,
    })
}

/// `int_{delta < |x| < radius} Q^p dm` for a radial field.
pub fn truncated_ball_lp_integral(q: &QField, p: f64, delta: f64, radius: f64, n: usize) -> Result<f64> {
    if !(delta > 0.0 && delta < radius) {
        return Err(Error::param("delta", "must lie in (0, radius)"));
    }
    check_ball(q, &vec![0.0; n], radius)?;
    let rq = q.radial()?;
    let opts = AdaptiveOptions::with_rel_tol(1e-12);
    let v = integrate_doubling(
        |u| (p * rq.ln_value_at_depth(u) - n as f64 * u).exp(),
        -radius.ln(),
        -delta.ln(),
        opts,
    );
    Ok(unit_sphere_area(n)? * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn means_of_simple_fields() {
        let c = QField::constant(2.5).unwrap();
        assert_eq!(spherical_mean(&c, &[0.1, 0.2, 0.0], 0.3, 16).unwrap(), 2.5);
        let p = QField::power_log(1.0, 2.0, 0.0).unwrap();
        assert_relative_eq!(
            spherical_mean(&p, &[0.0; 3], 0.2, 16).unwrap(),
            25.0,
            max_relative = 1e-14
        );
        let a = QField::AxisRatio { axis: 0 };
        assert_relative_eq!(
            spherical_mean(&a, &[0.0; 3], 0.7, 16).unwrap(),
            1.0 / 3.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn off_center_radial_mean_uses_quadrature() {
        // |x|^2 is harmonic-plus-constant: mean over S(x0, r) is |x0|^2 + r^2
        let q = QField::power_log(1.0, -2.0, 0.0).unwrap();
        let m = spherical_mean(&q, &[0.3, 0.1, -0.2], 0.4, 16).unwrap();
        assert_relative_eq!(m, 0.14 + 0.16, max_relative = 1e-12);
    }

    #[test]
    fn domain_checks() {
        let q = QField::log_inverse();
        assert!(spherical_mean(&q, &[0.0; 3], 1.0, 16).is_err());
        assert!(spherical_mean(&q, &[0.5, 0.0, 0.0], 0.6, 16).is_err());
        assert!(spherical_mean(&q, &[0.0; 3], -0.1, 16).is_err());
    }

    #[test]
    fn sphere_norms() {
        let one = QField::constant(1.0).unwrap();
        assert_relative_eq!(
            sphere_lnorm(&one, &[0.0; 3], 1.0, 2, 16).unwrap(),
            (4.0 * PI).sqrt(),
            max_relative = 1e-14
        );
        let inv = QField::power_log(1.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(
            sphere_lnorm(&inv, &[0.0; 3], 0.5, 2, 16).unwrap(),
            2.0 * (PI).sqrt(),
            max_relative = 1e-14
        );
        // the quadrature path agrees with the closed form for radial fields
        let a = QField::AxisRatio { axis: 1 };
        let direct = sphere_lnorm(&a, &[0.0; 3], 0.5, 2, 16).unwrap();
        // int x2^4/r^4 over S(0, r) = r^2 * 4 pi / 5
        assert_relative_eq!(direct, (0.25 * 4.0 * PI / 5.0).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn ball_norms() {
        let one = QField::constant(1.0).unwrap();
        match ball_lp_norm(&one, 1.0, 1.0, 3, 16).unwrap() {
            LpNorm::Finite { integral, .. } => assert_relative_eq!(integral, 4.0 * PI / 3.0, max_relative = 1e-12),
            other => panic!("{other:?}"),
        }
        let inv2 = QField::power_log(1.0, 2.0, 0.0).unwrap();
        match ball_lp_norm(&inv2, 1.0, 1.0, 3, 16).unwrap() {
            LpNorm::Finite { integral, .. } => assert_relative_eq!(integral, 4.0 * PI, max_relative = 1e-10),
            other => panic!("{other:?}"),
        }
        let inv3 = QField::power_log(1.0, 3.0, -2.0).unwrap();
        assert!(ball_lp_norm(&inv3, 1.0, 1.0, 3, 16).unwrap().is_finite());
        let inv3 = QField::power_log(1.0, 3.0, -1.0).unwrap();
        assert!(!ball_lp_norm(&inv3, 1.0, 1.0, 3, 16).unwrap().is_finite());
        let a = QField::AxisRatio { axis: 2 };
        match ball_lp_norm(&a, 1.0, 1.0, 3, 16).unwrap() {
            LpNorm::Finite { integral, .. } => assert_relative_eq!(integral, 4.0 * PI / 9.0, max_relative = 1e-10),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn truncated_integrals_grow_for_divergent_fields() {
        let q = QField::power_log(1.0, 3.0, 0.0).unwrap();
        let a = truncated_ball_lp_integral(&q, 1.0, 1e-2, 1.0, 3).unwrap();
        let b = truncated_ball_lp_integral(&q, 1.0, 1e-4, 1.0, 3).unwrap();
        assert!(b > a + 1.0);
        // closed form 4 pi int_delta^1 r^{-1} ln(e + 1/r)^0 dr
        assert_relative_eq!(a, 4.0 * PI * (100f64).ln(), max_relative = 1e-10);
    }
}
