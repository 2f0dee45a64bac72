//! Moduli and capacities of spherical rings, the image-sphere modulus of
//! radial maps with its lower bound through a majorant, and a discrete
//! variational oracle for the curve modulus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{QField, RadialFunction};
use crate::geometry::unit_sphere_area;
use crate::maps::MapSpec;
use crate::numeric::{integrate_doubling, pairwise_sum_by, AdaptiveOptions};

fn check_ring(r1: f64, r2: f64, n: usize) -> Result<()> {
    unit_sphere_area(n)?;
    if !(r1 > 0.0 && r1.is_finite()) {
        return Err(Error::param("r1", format!("must be positive, got {r1}")));
    }
    if !(r2 >= r1 && r2.is_finite()) {
        return Err(Error::param("r2", format!("must be at least r1 = {r1}, got {r2}")));
    }
    Ok(())
}

/// Modulus of the curves joining the boundary spheres of `A(r1, r2)`:
/// `omega_{n-1} (ln(r2/r1))^{1-n}`.
pub fn ring_curve_modulus(r1: f64, r2: f64, n: usize) -> Result<f64> {
    check_ring(r1, r2, n)?;
    if r1 == r2 {
        return Err(Error::InfiniteModulus(r1));
    }
    Ok(unit_sphere_area(n)? * (r2 / r1).ln().powi(1 - n as i32))
}

/// Capacity of the ring condenser `(B(0, r2), closed B(0, r1))`; it equals
/// the curve modulus.
pub fn ring_capacity(r1: f64, r2: f64, n: usize) -> Result<f64> {
    ring_curve_modulus(r1, r2, n)
}

/// Modulus of the concentric spheres `S(0, t)`, `a < t < b`, with
/// `(n-1)`-surface admissibility: `omega_{n-1}^{-1/(n-1)} ln(b/a)`.
pub fn sphere_family_modulus(a: f64, b: f64, n: usize) -> Result<f64> {
    check_ring(a, b, n)?;
    Ok(unit_sphere_area(n)?.powf(-1.0 / (n as f64 - 1.0)) * (b / a).ln())
}

/// Capacity of the condenser formed by the unit ball and a closed ball of
/// diameter `d < 2` about its center.
pub fn ball_condenser_capacity(d: f64, n: usize) -> Result<f64> {
    if !(d > 0.0 && d < 2.0) {
        return Err(Error::param("d", "diameter must lie in (0, 2)"));
    }
    ring_capacity(d / 2.0, 1.0, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingQuantities {
    pub r1: f64,
    pub r2: f64,
    pub n: usize,
    pub curve_modulus: f64,
    pub capacity: f64,
    pub surface_modulus: f64,
}

pub fn ring_quantities(r1: f64, r2: f64, n: usize) -> Result<RingQuantities> {
    Ok(RingQuantities {
        r1,
        r2,
        n,
        curve_modulus: ring_curve_modulus(r1, r2, n)?,
        capacity: ring_capacity(r1, r2, n)?,
        surface_modulus: sphere_family_modulus(r1, r2, n)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub quantities: RingQuantities,
    /// `|capacity - curve modulus|`.
    pub capacity_vs_curve: f64,
    /// Relative gap between the surface modulus and `capacity^{-1/(n-1)}`.
    pub surface_vs_capacity: f64,
    pub tolerance: f64,
    pub holds: bool,
}

pub const DUALITY_TOLERANCE: f64 = 1e-12;

/// Checks capacity = curve modulus and surface modulus = capacity^{-1/(n-1)}.
pub fn duality_report(r1: f64, r2: f64, n: usize) -> Result<DualityReport> {
    let q = ring_quantities(r1, r2, n)?;
    let capacity_vs_curve = (q.capacity - q.curve_modulus).abs();
    let dual = q.capacity.powf(-1.0 / (n as f64 - 1.0));
    let surface_vs_capacity = (q.surface_modulus - dual).abs() / dual;
    Ok(DualityReport {
        quantities: q,
        capacity_vs_curve,
        surface_vs_capacity,
        tolerance: DUALITY_TOLERANCE,
        holds: capacity_vs_curve == 0.0 && surface_vs_capacity <= DUALITY_TOLERANCE,
    })
}

fn radial_parts(map: &MapSpec) -> Result<(&crate::maps::Profile, usize)> {
    match map {
        MapSpec::Radial { profile, n } => Ok((profile, n.get())),
        _ => Err(Error::Unsupported(
            "image sphere families are computed for radial maps only".into(),
        )),
    }
}

/// A radial map sends `S(0, r)` onto `S(0, rho(r))`, so the image of the
/// sphere family over `(eps, r0)` is the concentric family over
/// `(rho(eps), rho(r0))`.
pub fn image_sphere_family_modulus(map: &MapSpec, eps: f64, r0: f64) -> Result<f64> {
    let (profile, n) = radial_parts(map)?;
    if !(eps > 0.0 && eps < r0 && r0 <= 1.0) {
        return Err(Error::param(
            "eps",
            format!("need 0 < eps < r0 <= 1, got eps = {eps}, r0 = {r0}"),
        ));
    }
    let log_ratio = profile.ln_value(r0) - profile.ln_value(eps);
    Ok(unit_sphere_area(n)?.powf(-1.0 / (n as f64 - 1.0)) * log_ratio)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerQCheck {
    pub map: MapSpec,
    pub q: QField,
    pub eps: f64,
    pub r0: f64,
    /// Modulus of the image sphere family.
    pub lhs: f64,
    /// `int_eps^r0 dr / ||Q||_{n-1}(r)`.
    pub rhs: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub holds: bool,
}

pub const LOWER_Q_TOLERANCE: f64 = 1e-8;

/// Compares the image sphere-family modulus of a radial map with the lower
/// bound `int dr / ||Q||_{n-1}(r)`; for radial `Q` the sphere norm is
/// `Q(r) (omega_{n-1} r^{n-1})^{1/(n-1)}`.
pub fn lower_q_check_radial(map: &MapSpec, q: &QField, eps: f64, r0: f64) -> Result<LowerQCheck> {
    let (_, n) = radial_parts(map)?;
    q.check_dim(n)?;
    let rq = q.radial()?;
    let lhs = image_sphere_family_modulus(map, eps, r0)?;
    let bad = std::cell::Cell::new(false);
    let integral = integrate_doubling(
        |u| {
            let lq = rq.ln_value_at_depth(u);
            if !lq.is_finite() {
                bad.set(true);
            }
            (-lq).exp()
        },
        -r0.ln(),
        -eps.ln(),
        AdaptiveOptions {
            abs_tol: 0.0,
            rel_tol: 1e-13,
            max_intervals: 4000,
        },
    );
    if bad.get() {
        return Err(Error::param("q", "must be positive and finite on the ring"));
    }
    let rhs = unit_sphere_area(n)?.powf(-1.0 / (n as f64 - 1.0)) * integral;
    let gap = lhs - rhs;
    Ok(LowerQCheck {
        map: map.clone(),
        q: q.clone(),
        eps,
        r0,
        lhs,
        rhs,
        gap,
        tolerance: LOWER_Q_TOLERANCE,
        holds: gap >= -LOWER_Q_TOLERANCE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub modulus: f64,
    pub grid_size: usize,
    /// Lagrange multiplier of the admissibility constraint.
    pub multiplier: f64,
    pub iterations: usize,
}

pub const MIN_ORACLE_GRID: usize = 64;

/// Minimizes `sum omega r_i^{n-1} rho_i^n dr` over nonnegative radial
/// weights with `sum rho_i dr >= 1` on a midpoint grid. The stationarity
/// condition gives `rho_i(lambda)`; the multiplier is found by bisection on
/// the admissibility constraint.
pub fn variational_radial_modulus_oracle(r1: f64, r2: f64, n: usize, grid_size: usize) -> Result<OracleResult> {
    check_ring(r1, r2, n)?;
    if r1 == r2 {
        return Err(Error::InfiniteModulus(r1));
    }
    if grid_size < MIN_ORACLE_GRID {
        return Err(Error::param(
            "grid_size",
            format!("need at least {MIN_ORACLE_GRID} cells, got {grid_size}"),
        ));
    }
    let omega = unit_sphere_area(n)?;
    let nf = n as f64;
    let dr = (r2 - r1) / grid_size as f64;
    let radii: Vec<f64> = (0..grid_size).map(|i| r1 + (i as f64 + 0.5) * dr).collect();
    // n omega r^{n-1} rho^{n-1} dr = lambda dr
    let weight = |lambda: f64, r: f64| (lambda / (nf * omega * r.powi(n as i32 - 1))).powf(1.0 / (nf - 1.0));
    let mass = |lambda: f64| pairwise_sum_by(grid_size, |i| weight(lambda, radii[i]) * dr);

    let (mut lo, mut hi) = (0.0, 1.0);
    while mass(hi) < 1.0 {
        hi *= 2.0;
    }
    let mut iterations = 0;
    while iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if mass(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let lambda = hi;
    let scale = 1.0 / mass(lambda);
    let modulus = pairwise_sum_by(grid_size, |i| {
        let r = radii[i];
        omega * r.powi(n as i32 - 1) * (scale * weight(lambda, r)).powi(n as i32) * dr
    });
    Ok(OracleResult {
        modulus,
        grid_size,
        multiplier: lambda,
        iterations,
    })
}

/// Oracle modulus of the union of the curve families of pairwise disjoint
/// rings: one radial weight on the union of the rings, admissible for each.
pub fn union_ring_modulus_oracle(rings: &[(f64, f64)], n: usize, grid_size: usize) -> Result<f64> {
    let mut sorted = rings.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    if sorted.windows(2).any(|w| w[0].1 > w[1].0) {
        return Err(Error::param("rings", "rings must be pairwise disjoint"));
    }
    // the constraints act on disjoint supports, so the joint minimizer is
    // the union of the individual ones
    let parts = sorted
        .iter()
        .map(|&(a, b)| variational_radial_modulus_oracle(a, b, n, grid_size).map(|o| o.modulus))
        .collect::<Result<Vec<f64>>>()?;
    Ok(parts.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::Profile;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, PI};

    #[test]
    fn classical_rings() {
        assert_relative_eq!(ring_curve_modulus(1.0, E, 2).unwrap(), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(ring_curve_modulus(1.0, E, 3).unwrap(), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(ring_capacity(1.0, E * E, 2).unwrap(), PI, max_relative = 1e-15);
        assert_eq!(ring_curve_modulus(1.0, 1.0, 3), Err(Error::InfiniteModulus(1.0)));
        assert!(ring_curve_modulus(0.0, 1.0, 3).is_err());
        assert_relative_eq!(
            sphere_family_modulus(1.0, E, 3).unwrap(),
            (4.0 * PI).powf(-0.5),
            max_relative = 1e-15
        );
        assert_eq!(sphere_family_modulus(0.5, 0.5, 3).unwrap(), 0.0);
    }

    #[test]
    fn moduli_shrink_as_rings_widen() {
        let mut prev = f64::INFINITY;
        for k in 1..20 {
            let m = ring_curve_modulus(1.0, 2f64.powi(k), 3).unwrap();
            assert!(m < prev);
            prev = m;
        }
        assert!(prev < 0.1);
        assert!(ring_capacity(1e-12, 1.0, 3).unwrap() < 0.02);
    }

    #[test]
    fn duality_holds() {
        let d = duality_report(0.3, 0.9, 4).unwrap();
        assert!(d.holds, "{d:?}");
    }

    #[test]
    fn oracle_converges_quadratically() {
        let exact = ring_curve_modulus(1.0, E, 3).unwrap();
        let coarse = variational_radial_modulus_oracle(1.0, E, 3, 100).unwrap().modulus;
        let fine = variational_radial_modulus_oracle(1.0, E, 3, 200).unwrap().modulus;
        let ratio = (coarse - exact).abs() / (fine - exact).abs();
        assert!(ratio > 3.5 && ratio < 4.5, "{ratio}");
        assert!(variational_radial_modulus_oracle(1.0, E, 3, 10).is_err());
    }

    #[test]
    fn identity_image_modulus() {
        let id = MapSpec::radial(Profile::exp_integral(QField::constant(1.0).unwrap(), 3).unwrap(), 3).unwrap();
        let m = image_sphere_family_modulus(&id, 0.01, 0.5).unwrap();
        assert_relative_eq!(m, (4.0 * PI).powf(-0.5) * 50f64.ln(), max_relative = 1e-12);
        let check = lower_q_check_radial(&id, &QField::constant(1.0).unwrap(), 0.01, 0.5).unwrap();
        assert!(check.gap.abs() < 1e-12);
        assert!(check.holds);
    }

    #[test]
    fn union_is_subadditive() {
        let rings = [(0.1, 0.2), (0.3, 0.9)];
        let union = union_ring_modulus_oracle(&rings, 3, 1000).unwrap();
        let sum: f64 = rings.iter().map(|&(a, b)| ring_curve_modulus(a, b, 3).unwrap()).sum();
        assert!(union <= sum * (1.0 + 1e-5));
        assert!(union_ring_modulus_oracle(&[(0.1, 0.5), (0.3, 0.9)], 3, 100).is_err());
    }

    #[test]
    fn ball_condenser_capacity_grows_with_diameter() {
        let caps: Vec<f64> = [0.1, 0.5, 1.0, 1.5, 1.9]
            .iter()
            .map(|&d| ball_condenser_capacity(d, 3).unwrap())
            .collect();
        assert!(caps.windows(2).all(|w| w[1] > w[0]));
    }
}
