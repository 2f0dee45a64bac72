use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radial data `(r_i, v_i)` with shape-preserving piecewise-cubic Hermite
/// (Fritsch-Carlson) interpolation. Outside the knot range the end values are
/// held constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct RadialTable {
    radii: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTable {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl TryFrom<RawTable> for RadialTable {
    type Error = Error;
    fn try_from(raw: RawTable) -> Result<Self> {
        RadialTable::new(raw.radii, raw.values)
    }
}

impl From<RadialTable> for RawTable {
    fn from(t: RadialTable) -> Self {
        RawTable {
            radii: t.radii,
            values: t.values,
        }
    }
}

impl RadialTable {
    /// Radii must be strictly increasing in `(0, 1]`, values positive.
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() < 2 || radii.len() != values.len() {
            return Err(Error::param(
                "table",
                "need at least two knots and as many values as radii",
            ));
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::param("radii", "must be strictly increasing"));
        }
        if !(radii[0] > 0.0) || radii[radii.len() - 1] > 1.0 {
            return Err(Error::param("radii", "must lie in (0, 1]"));
        }
        if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::param("values", "must be positive and finite"));
        }
        let slopes = fritsch_carlson_slopes(&radii, &values);
        Ok(Self { radii, values, slopes })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    fn segment(&self, r: f64) -> Option<usize> {
        let n = self.radii.len();
        if r <= self.radii[0] || r >= self.radii[n - 1] {
            return None;
        }
        Some(self.radii.partition_point(|&k| k <= r) - 1)
    }

    pub fn value(&self, r: f64) -> f64 {
        let n = self.radii.len();
        match self.segment(r) {
            None if r <= self.radii[0] => self.values[0],
            None => self.values[n - 1],
            Some(i) => {
                let (h, t) = self.local(i, r);
                let (h00, h10, h01, h11) = (
                    (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t),
                    t * (1.0 - t) * (1.0 - t),
                    t * t * (3.0 - 2.0 * t),
                    t * t * (t - 1.0),
                );
                h00 * self.values[i]
                    + h10 * h * self.slopes[i]
                    + h01 * self.values[i + 1]
                    + h11 * h * self.slopes[i + 1]
            }
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match self.segment(r) {
            None => 0.0,
            Some(i) => {
                let (h, t) = self.local(i, r);
                let d00 = 6.0 * t * t - 6.0 * t;
                let d10 = 3.0 * t * t - 4.0 * t + 1.0;
                let d01 = -d00;
                let d11 = 3.0 * t * t - 2.0 * t;
                (d00 * self.values[i] + d01 * self.values[i + 1]) / h + d10 * self.slopes[i] + d11 * self.slopes[i + 1]
            }
        }
    }

    fn local(&self, i: usize, r: f64) -> (f64, f64) {
        let h = self.radii[i + 1] - self.radii[i];
        (h, (r - self.radii[i]) / h)
    }
}

fn fritsch_carlson_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reproduces_knots_and_lines() {
        let t = RadialTable::new(vec![0.1, 0.2, 0.5, 1.0], vec![0.2, 0.4, 1.0, 2.0]).unwrap();
        for (r, v) in [(0.1, 0.2), (0.2, 0.4), (0.5, 1.0), (1.0, 2.0), (0.3, 0.6), (0.75, 1.5)] {
            assert_relative_eq!(t.value(r), v, max_relative = 1e-14);
        }
        assert_relative_eq!(t.derivative(0.35), 2.0, max_relative = 1e-13);
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let t = RadialTable::new(vec![0.01, 0.02, 0.5, 0.6, 1.0], vec![0.1, 0.9, 0.91, 1.5, 1.6]).unwrap();
        let mut prev = 0.0;
        for k in 0..=1000 {
            let r = 0.01 + 0.99 * k as f64 / 1000.0;
            let v = t.value(r);
            assert!(v >= prev - 1e-15);
            assert!(t.derivative(r) >= -1e-12);
            prev = v;
        }
    }

    #[test]
    fn holds_end_values() {
        let t = RadialTable::new(vec![0.1, 1.0], vec![0.5, 1.0]).unwrap();
        assert_eq!(t.value(0.01), 0.5);
        assert_eq!(t.derivative(0.01), 0.0);
    }

    #[test]
    fn validation() {
        assert!(RadialTable::new(vec![0.2, 0.1], vec![1.0, 2.0]).is_err());
        assert!(RadialTable::new(vec![0.0, 0.1], vec![1.0, 2.0]).is_err());
        assert!(RadialTable::new(vec![0.1, 1.5], vec![1.0, 2.0]).is_err());
        assert!(RadialTable::new(vec![0.1, 0.2], vec![-1.0, 2.0]).is_err());
        assert!(RadialTable::new(vec![0.1], vec![1.0]).is_err());
    }
}
