use super::sphere::SphereRule;
use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, pairwise_sum_by};

/// Default number of dyadic radial panels.
pub const DEFAULT_RADIAL_PANELS: usize = 32;

/// Quadrature on the ball `B(center, radius)`.
///
/// The radius is split into dyadic panels `[R 2^{-k-1}, R 2^{-k}]` plus an
/// innermost `[0, R 2^{-P}]`, each carrying a Gauss-Legendre rule against
/// `r^{n-1} dr`, tensored with a sphere rule. The grading keeps integrands
/// that blow up like `|x - center|^{-beta}` (with `beta < n`) accurate.
#[derive(Debug, Clone, PartialEq)]
pub struct BallRule {
    center: Vec<f64>,
    radius: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl BallRule {
    pub fn new(center: &[f64], radius: f64, order: usize) -> Result<Self> {
        Self::with_panels(center, radius, order, DEFAULT_RADIAL_PANELS)
    }

    pub fn with_panels(center: &[f64], radius: f64, order: usize, panels: usize) -> Result<Self> {
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
        let sphere = SphereRule::unit(n, order);
        // exact for r^{n-1} times a polynomial of degree `order` in r
        let radial = gauss_legendre((order + n) / 2 + 1);

        let mut edges = vec![0.0];
        for k in (0..panels).rev() {
            edges.push(radius * 0.5f64.powi(k as i32));
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in edges.windows(2) {
            for (r, wr) in radial.on_interval(w[0], w[1]) {
                let radial_weight = wr * r.powi(n as i32 - 1);
                for i in 0..sphere.len() {
                    let dir = sphere.node(i);
                    nodes.extend(dir.iter().zip(center).map(|(d, c)| c + r * d));
                    weights.push(radial_weight * sphere.weights()[i]);
                }
            }
        }
        Ok(Self {
            center: center.to_vec(),
            radius,
            nodes,
            weights,
        })
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

    pub fn volume(&self) -> f64 {
        pairwise_sum_by(self.len(), |i| self.weights[i])
    }

    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        pairwise_sum_by(self.len(), |i| self.weights[i] * f(self.node(i)))
    }

    /// Average of `f` over the ball.
    pub fn mean<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.integrate(f) / self.volume()
    }
}
