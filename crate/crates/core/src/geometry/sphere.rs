use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::{gauss_symmetric_jacobi, pairwise_sum_by};

/// Default polynomial exactness degree for sphere rules.
pub const DEFAULT_ORDER: usize = 16;

/// Product quadrature rule on the sphere `S(center, radius)`.
///
/// In the plane this is the uniform trapezoid rule in angle. For `n >= 3`
/// the rule is a product over hyperspherical coordinates: each polar angle
/// `theta_i` carries the weight `sin^{n-1-i}(theta_i)`, which becomes the
/// symmetric Jacobi weight in `t = cos(theta_i)` and is integrated with the
/// matching Gauss rule; the final azimuth is uniform.
///
/// Exact (up to rounding) for polynomials of total degree `<= order`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    center: Vec<f64>,
    radius: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    order: usize,
}

impl SphereRule {
    pub fn new(center: &[f64], radius: f64, order: usize) -> Result<Self> {
        let n = center.len();
        if n < 2 {
            return Err(Error::InvalidDimension(n, 2));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param("radius", format!("must be positive, got {radius}")));
        }
        if order < 2 {
            return Err(Error::param("order", format!("must be at least 2, got {order}")));
        }
        let mut rule = Self::unit(n, order);
        let scale = radius.powi(n as i32 - 1);
        for w in &mut rule.weights {
            *w *= scale;
        }
        for (i, x) in rule.nodes.iter_mut().enumerate() {
            *x = center[i % n] + radius * *x;
        }
        rule.center = center.to_vec();
        rule.radius = radius;
        Ok(rule)
    }

    /// Rule on the unit sphere centered at the origin.
    pub fn unit(n: usize, order: usize) -> Self {
        assert!(n >= 2 && order >= 2);
        // Even azimuth count keeps the rule invariant under coordinate
        // reflections.
        let azimuth = (order + 1).div_ceil(2) * 2;
        let dphi = 2.0 * PI / azimuth as f64;
        let ring: Vec<(f64, f64)> = (0..azimuth)
            .map(|k| {
                let phi = (k as f64 + 0.5) * dphi;
                (phi.cos(), phi.sin())
            })
            .collect();

        let polar_points = order / 2 + 1;
        let polar_rules: Vec<_> = (1..n - 1)
            .map(|i| gauss_symmetric_jacobi(polar_points, (n - 2 - i) as f64 / 2.0))
            .collect();

        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut index = vec![0usize; polar_rules.len()];
        let mut point = vec![0.0; n];
        loop {
            let mut sin_prod = 1.0;
            let mut w = dphi;
            for (level, rule) in polar_rules.iter().enumerate() {
                let t = rule.nodes[index[level]];
                point[level] = sin_prod * t;
                sin_prod *= (1.0 - t * t).max(0.0).sqrt();
                w *= rule.weights[index[level]];
            }
            for &(c, s) in &ring {
                point[n - 2] = sin_prod * c;
                point[n - 1] = sin_prod * s;
                nodes.extend_from_slice(&point);
                weights.push(w);
            }
            // odometer over the polar indices
            let mut level = polar_rules.len();
            loop {
                if level == 0 {
                    return Self {
                        center: vec![0.0; n],
                        radius: 1.0,
                        nodes,
                        weights,
                        order,
                    };
                }
                level -= 1;
                index[level] += 1;
                if index[level] < polar_points {
                    break;
                }
                index[level] = 0;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.nodes[i * n..(i + 1) * n]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Sum of weights, `omega_{n-1} radius^{n-1}` up to rounding.
    pub fn area(&self) -> f64 {
        pairwise_sum_by(self.len(), |i| self.weights[i])
    }

    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        pairwise_sum_by(self.len(), |i| self.weights[i] * f(self.node(i)))
    }

    /// Integrates over `S(center, radius)` using this rule as a unit-sphere
    /// template, without materializing a scaled copy.
    pub fn integrate_scaled<F: Fn(&[f64]) -> f64>(&self, center: &[f64], radius: f64, f: F) -> f64 {
        let n = self.dim();
        debug_assert_eq!(center.len(), n);
        let scale = radius.powi(n as i32 - 1) / self.radius.powi(n as i32 - 1);
        let mut buf = vec![0.0; n];
        let mut terms = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let node = self.node(i);
            for k in 0..n {
                buf[k] = center[k] + radius * (node[k] - self.center[k]) / self.radius;
            }
            terms.push(self.weights[i] * f(&buf));
        }
        scale * crate::numeric::pairwise_sum(&terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::unit_sphere_area;
    use approx::assert_relative_eq;

    #[test]
    fn nodes_lie_on_sphere() {
        let c = [0.1, -0.2, 0.3, 0.05];
        let rule = SphereRule::new(&c, 0.7, 10).unwrap();
        for i in 0..rule.len() {
            let d = crate::geometry::distance(rule.node(i), &c);
            assert!((d - 0.7).abs() <= 1e-12 * 0.7);
        }
    }

    #[test]
    fn weight_sum_matches_area() {
        for n in 2..=6 {
            let rule = SphereRule::new(&vec![0.0; n], 1.3, 8).unwrap();
            let expect = unit_sphere_area(n).unwrap() * 1.3f64.powi(n as i32 - 1);
            assert_relative_eq!(rule.area(), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn three_d_examples() {
        let rule = SphereRule::new(&[0.0, 0.0, 0.0], 1.0, DEFAULT_ORDER).unwrap();
        assert_relative_eq!(rule.integrate(|_| 1.0), 4.0 * PI, max_relative = 1e-13);
        assert_relative_eq!(rule.integrate(|x| x[0] * x[0]), 4.0 * PI / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn circle_of_radius_two() {
        let rule = SphereRule::new(&[0.0, 0.0], 2.0, DEFAULT_ORDER).unwrap();
        assert_relative_eq!(rule.integrate(|_| 1.0), 4.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn exact_on_high_degree_monomial() {
        // int_{S^2} x^4 y^2 z^2 = 4 pi * 3!! 1!! 1!! / (3 * 5 * 7 * 9) = 4 pi * 3 / 945
        let rule = SphereRule::unit(3, 8);
        let v = rule.integrate(|x| x[0].powi(4) * x[1].powi(2) * x[2].powi(2));
        assert_relative_eq!(v, 4.0 * PI * 3.0 / 945.0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SphereRule::new(&[0.0, 0.0, 0.0], 0.0, 8).is_err());
        assert!(SphereRule::new(&[0.0, 0.0, 0.0], 1.0, 1).is_err());
        assert!(SphereRule::new(&[0.0], 1.0, 8).is_err());
    }

    #[test]
    fn scaled_integration_agrees_with_materialized_rule() {
        let unit = SphereRule::unit(3, 12);
        let c = [0.2, 0.1, -0.1];
        let f = |x: &[f64]| x[0] * x[0] + x[1] * x[2] + 1.0;
        let direct = SphereRule::new(&c, 0.4, 12).unwrap().integrate(f);
        assert_relative_eq!(unit.integrate_scaled(&c, 0.4, f), direct, max_relative = 1e-13);
    }
}
