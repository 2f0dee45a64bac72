//! Pointwise differential data of the built-in maps: Jacobians, singular
//! values, inner dilatation, the planar complex dilatation, and Orlicz
//! energies over annuli.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criterion::PhiSpec;
use crate::error::{Error, Result};
use crate::geometry::{norm, AnnulusSpec, SphereRule};
use crate::linalg::{singular_values, Matrix};
use crate::maps::MapSpec;
use crate::numeric::{integrate, AdaptiveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JacobianMethod {
    Analytic,
    /// Fourth-order central differences; `h = None` picks `eps^{1/3} max(1, |x|)`.
    FiniteDifference {
        h: Option<f64>,
    },
}

impl JacobianMethod {
    fn is_analytic(self) -> bool {
        matches!(self, JacobianMethod::Analytic)
    }
}

/// Matrices with Frobenius norm below this count as zero on numeric paths.
pub const NUMERIC_ZERO: f64 = 1e-13;

pub fn default_step(x: &[f64]) -> f64 {
    f64::EPSILON.cbrt() * norm(x).max(1.0)
}

pub fn jacobian(spec: &MapSpec, x: &[f64], method: JacobianMethod) -> Result<Matrix> {
    spec.check_point(x)?;
    match method {
        JacobianMethod::Analytic => analytic_jacobian(spec, x),
        JacobianMethod::FiniteDifference { h } => {
            let h = h.unwrap_or_else(|| default_step(x));
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::param("h", format!("step must be positive, got {h}")));
            }
            Ok(central_differences(spec, x, h))
        }
    }
}

/// Fourth-order central stencil; the truncation error of the two-point
/// stencil at the fixed default step is too large close to the puncture.
fn central_differences(spec: &MapSpec, x: &[f64], h: f64) -> Matrix {
    let n = x.len();
    let mut m = Matrix::zeros(n, n);
    let mut xp = x.to_vec();
    let at = |j: usize, k: f64, xp: &mut [f64]| {
        xp[j] = x[j] + k * h;
        let f = spec.eval_unchecked(xp);
        xp[j] = x[j];
        f
    };
    for j in 0..n {
        let p1 = at(j, 1.0, &mut xp);
        let m1 = at(j, -1.0, &mut xp);
        let p2 = at(j, 2.0, &mut xp);
        let m2 = at(j, -2.0, &mut xp);
        for i in 0..n {
            m[(i, j)] = (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * h);
        }
    }
    m
}

fn analytic_jacobian(spec: &MapSpec, x: &[f64]) -> Result<Matrix> {
    let n = x.len();
    Ok(match spec {
        MapSpec::Radial { profile, .. } => {
            // (rho/r) I + (rho' - rho/r) x x^T / r^2
            let r = norm(x);
            let (tangential, radial) = profile.stretches(r);
            let mut m = Matrix::identity(n).scale(tangential);
            let c = (radial - tangential) / (r * r);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += c * x[i] * x[j];
                }
            }
            m
        }
        MapSpec::Twist { m: k, .. } => {
            let rho = x[0].hypot(x[1]);
            let mut m = Matrix::identity(n);
            if *k != 1 {
                if rho == 0.0 {
                    return Err(Error::NotApplicable(
                        "the twist is not differentiable on its axis".into(),
                    ));
                }
                let phi = x[1].atan2(x[0]);
                let (c, s) = (phi.cos(), phi.sin());
                let (cm, sm) = ((*k as f64 * phi).cos(), (*k as f64 * phi).sin());
                let kf = *k as f64;
                // radial direction -> radial image, angular direction stretched by k
                m[(0, 0)] = cm * c + kf * sm * s;
                m[(0, 1)] = cm * s - kf * sm * c;
                m[(1, 0)] = sm * c - kf * cm * s;
                m[(1, 1)] = sm * s + kf * cm * c;
            }
            m
        }
        MapSpec::PlanarPower { k } => {
            let d = Complex64::new(x[0], x[1]).powu(k - 1) * *k as f64;
            Matrix::from_rows(&[vec![d.re, -d.im], vec![d.im, d.re]])?
        }
        MapSpec::PlanarShear { kappa } => Matrix::diagonal(&[1.0 + kappa, 1.0 - kappa]),
    })
}

/// `K_I = (prod lambda_i) / lambda_1^n`: 1 for the zero matrix, infinite
/// for other singular matrices. Entries at or below `zero_tol` in Frobenius
/// norm count as the zero matrix.
pub fn inner_dilatation_with(m: &Matrix, zero_tol: f64) -> Result<f64> {
    let sv = singular_values(m)?;
    Ok(inner_dilatation_from_singular_values(
        &sv,
        m.frobenius_norm() <= zero_tol,
    ))
}

/// [`inner_dilatation_with`] with an exact zero test.
pub fn inner_dilatation(m: &Matrix) -> Result<f64> {
    inner_dilatation_with(m, 0.0)
}

fn inner_dilatation_from_singular_values(sv: &[f64], is_zero: bool) -> f64 {
    if is_zero {
        return 1.0;
    }
    let smallest = sv[0];
    if smallest == 0.0 {
        return f64::INFINITY;
    }
    sv[1..].iter().map(|l| l / smallest).product()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarDilatation {
    pub mu: Complex64,
    pub k_mu: f64,
}

impl PlanarDilatation {
    /// From the Wirtinger derivatives of a 2x2 Jacobian.
    pub fn from_jacobian(m: &Matrix) -> Result<Self> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: m.rows(),
            });
        }
        let (ux, uy, vx, vy) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let f_z = Complex64::new(0.5 * (ux + vy), 0.5 * (vx - uy));
        let f_zbar = Complex64::new(0.5 * (ux - vy), 0.5 * (vx + uy));
        let mu = if f_z == Complex64::new(0.0, 0.0) {
            Complex64::new(0.0, 0.0)
        } else {
            f_zbar / f_z
        };
        let a = mu.norm();
        let k_mu = if a < 1.0 { (1.0 + a) / (1.0 - a) } else { f64::INFINITY };
        Ok(Self { mu, k_mu })
    }
}

pub fn complex_dilatation(spec: &MapSpec, z: Complex64, method: JacobianMethod) -> Result<PlanarDilatation> {
    if spec.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: spec.dim(),
        });
    }
    PlanarDilatation::from_jacobian(&jacobian(spec, &[z.re, z.im], method)?)
}

/// Differential data of a map at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilatationSample {
    pub point: Vec<f64>,
    pub jacobian: Matrix,
    /// Ascending.
    pub singular_values: Vec<f64>,
    pub jac_det_abs: f64,
    pub operator_norm: f64,
    pub min_stretch: f64,
    pub inner_dilatation: f64,
    pub planar: Option<PlanarDilatation>,
}

pub fn dilatation_sample(spec: &MapSpec, x: &[f64], method: JacobianMethod) -> Result<DilatationSample> {
    let jac = jacobian(spec, x, method)?;
    let sv = singular_values(&jac)?;
    let zero = if method.is_analytic() {
        jac.is_zero()
    } else {
        jac.frobenius_norm() < NUMERIC_ZERO
    };
    let inner = inner_dilatation_from_singular_values(&sv, zero);
    let planar = if x.len() == 2 {
        Some(PlanarDilatation::from_jacobian(&jac)?)
    } else {
        None
    };
    Ok(DilatationSample {
        point: x.to_vec(),
        jac_det_abs: jac.determinant()?.abs(),
        operator_norm: *sv.last().unwrap(),
        min_stretch: sv[0],
        inner_dilatation: inner,
        singular_values: sv,
        jacobian: jac,
        planar,
    })
}

/// Samples at many points, in input order.
pub fn dilatation_samples(
    spec: &MapSpec,
    points: &[Vec<f64>],
    method: JacobianMethod,
) -> Result<Vec<DilatationSample>> {
    points.par_iter().map(|x| dilatation_sample(spec, x, method)).collect()
}

/// `int_region phi(|grad f|) dm` with `|grad f|` the Frobenius norm.
pub fn orlicz_energy(spec: &MapSpec, region: &AnnulusSpec, phi: &PhiSpec, order: usize) -> Result<f64> {
    let n = spec.dim();
    if region.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: region.dim(),
        });
    }
    phi.validate()?;
    let c = norm(&region.center);
    if c + region.r2 >= 1.0 {
        return Err(Error::OutsideDomain(c + region.r2));
    }
    if c >= region.r1 && c <= region.r2 {
        return Err(Error::AtPuncture);
    }
    let opts = AdaptiveOptions::with_rel_tol(1e-10);
    let centered = c == 0.0;
    let value = match spec {
        MapSpec::Radial { profile, .. } if centered => {
            let omega = crate::geometry::unit_sphere_area(n)?;
            integrate(
                |r| {
                    let (t, d) = profile.stretches(r);
                    let grad = ((n - 1) as f64 * t * t + d * d).sqrt();
                    omega * r.powi(n as i32 - 1) * phi.eval(grad)
                },
                region.r1,
                region.r2,
                opts,
            )
            .value
        }
        _ => {
            let unit = SphereRule::unit(n, order);
            integrate(
                |r| {
                    unit.integrate_scaled(&region.center, r, |x| {
                        analytic_jacobian(spec, x).map_or(f64::NAN, |j| phi.eval(j.frobenius_norm()))
                    })
                },
                region.r1,
                region.r2,
                opts,
            )
            .value
        }
    };
    if !value.is_finite() {
        return Err(Error::Numerical("Orlicz energy is not finite".into()));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::Profile;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn planar_power_jacobian() {
        let f = MapSpec::planar_power(2).unwrap();
        let j = jacobian(&f, &[0.5, 0.0], JacobianMethod::Analytic).unwrap();
        assert_eq!(j.to_rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let d = complex_dilatation(&f, Complex64::new(0.3, -0.4), JacobianMethod::Analytic).unwrap();
        assert_eq!(d.mu, Complex64::new(0.0, 0.0));
        assert_eq!(d.k_mu, 1.0);
    }

    #[test]
    fn power_shift_singular_values() {
        let f = MapSpec::radial(Profile::power_shift(0.5).unwrap(), 3).unwrap();
        let s = dilatation_sample(&f, &[0.0, 0.25, 0.0], JacobianMethod::Analytic).unwrap();
        assert_relative_eq!(s.singular_values[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(s.singular_values[1], 6.0, max_relative = 1e-14);
        assert_relative_eq!(s.singular_values[2], 6.0, max_relative = 1e-14);
        assert_relative_eq!(s.inner_dilatation, 36.0, max_relative = 1e-13);
        assert_relative_eq!(s.jac_det_abs, 36.0, max_relative = 1e-13);
    }

    #[test]
    fn twist_determinant_and_dilatation() {
        let f = MapSpec::twist(2, 3).unwrap();
        let a = jacobian(&f, &[0.5, 0.0, 0.0], JacobianMethod::Analytic).unwrap();
        assert_relative_eq!(a.determinant().unwrap(), 2.0, max_relative = 1e-14);
        let fd = jacobian(&f, &[0.5, 0.0, 0.0], JacobianMethod::FiniteDifference { h: Some(1e-5) }).unwrap();
        assert_relative_eq!(fd.determinant().unwrap(), 2.0, max_relative = 1e-8);
        let s = dilatation_sample(&f, &[0.1, 0.3, -0.2], JacobianMethod::Analytic).unwrap();
        assert_relative_eq!(s.inner_dilatation, 2.0, max_relative = 1e-13);
        assert!(jacobian(&f, &[0.0, 0.0, 0.5], JacobianMethod::Analytic).is_err());
    }

    #[test]
    fn shear_complex_dilatation() {
        let f = MapSpec::planar_shear(1.0 / 3.0).unwrap();
        let d = complex_dilatation(&f, Complex64::new(0.2, 0.1), JacobianMethod::Analytic).unwrap();
        assert_relative_eq!(d.mu.re, 1.0 / 3.0, max_relative = 1e-15);
        assert_eq!(d.mu.im, 0.0);
        assert_relative_eq!(d.k_mu, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn dilatation_branches() {
        assert_eq!(inner_dilatation(&Matrix::zeros(3, 3)).unwrap(), 1.0);
        assert_eq!(
            inner_dilatation(&Matrix::diagonal(&[1.0, 0.0, 2.0])).unwrap(),
            f64::INFINITY
        );
        assert_relative_eq!(inner_dilatation(&Matrix::diagonal(&[1.0, 2.0, 3.0])).unwrap(), 6.0);
        assert_eq!(
            inner_dilatation_with(&Matrix::diagonal(&[1e-15, 0.0]), NUMERIC_ZERO).unwrap(),
            1.0
        );
    }

    #[test]
    fn orlicz_energy_of_square_map() {
        // |grad z^2|^2 = 8 r^2
        let f = MapSpec::planar_power(2).unwrap();
        let d = 0.01;
        let ring = AnnulusSpec::centered(2, d, 1.0 - d).unwrap();
        let e = orlicz_energy(&f, &ring, &PhiSpec::Power { p: 2.0 }, 16).unwrap();
        assert_relative_eq!(e, 4.0 * PI * ((1.0f64 - d).powi(4) - d.powi(4)), max_relative = 1e-10);
        let touching = AnnulusSpec::centered(2, d, 1.0).unwrap();
        assert!(orlicz_energy(&f, &touching, &PhiSpec::Power { p: 2.0 }, 16).is_err());
    }

    #[test]
    fn orlicz_energy_radial_matches_sphere_path() {
        let f = MapSpec::radial(Profile::power_shift(0.5).unwrap(), 3).unwrap();
        let ring = AnnulusSpec::centered(3, 0.5, 0.9).unwrap();
        let phi = PhiSpec::Power { p: 3.0 };
        let fast = orlicz_energy(&f, &ring, &phi, 16).unwrap();
        let unit = SphereRule::unit(3, 16);
        let slow = integrate(
            |r| {
                unit.integrate_scaled(&[0.0; 3], r, |x| {
                    phi.eval(analytic_jacobian(&f, x).unwrap().frobenius_norm())
                })
            },
            0.5,
            0.9,
            AdaptiveOptions::with_rel_tol(1e-10),
        )
        .value;
        assert_relative_eq!(fast, slow, max_relative = 1e-10);
        let identity = MapSpec::radial(
            Profile::exp_integral(crate::fields::QField::constant(1.0).unwrap(), 3).unwrap(),
            3,
        )
        .unwrap();
        let vol = orlicz_energy(&identity, &ring, &PhiSpec::Power { p: 0.0 }, 16).unwrap();
        assert_relative_eq!(vol, ring.volume(), max_relative = 1e-10);
    }
}
