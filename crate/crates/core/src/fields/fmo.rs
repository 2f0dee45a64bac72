use serde::{Deserialize, Serialize};

use super::field::QField;
use super::means::check_ball;
use super::radial::RadialFunction;
use crate::error::{Error, Result};
use crate::geometry::{BallRule, DEFAULT_ORDER};
use crate::numeric::{integrate_tail, TailOptions, TailVerdict};

/// Balls smaller than this are below the resolution of the quadrature.
const MIN_RADIUS: f64 = 1e-8;

/// Mean of `|Q - mean(Q)|` over `B(x0, eps)`; infinite when `Q` is not
/// integrable on the ball.
pub fn fmo_oscillation(q: &QField, x0: &[f64], eps: f64, order: usize) -> Result<f64> {
    if eps < MIN_RADIUS {
        return Err(Error::InsufficientResolution(format!(
            "ball radius {eps:e} is below {MIN_RADIUS:e}"
        )));
    }
    check_ball(q, x0, eps)?;
    let n = x0.len();
    if q.constant_value().is_some() {
        return Ok(0.0);
    }
    let centered = x0.iter().all(|&v| v == 0.0);
    if let (true, Some(g)) = (centered, q.growth_bound()) {
        let nf = n as f64;
        if g.gamma > nf || (g.gamma == nf && g.s >= -1.0) {
            return Ok(f64::INFINITY);
        }
    }
    if q.is_radial() && centered {
        radial_oscillation(q, n, eps)
    } else {
        let rule = BallRule::new(x0, eps, order)?;
        let mean = rule.mean(|x| q.value(x));
        Ok(rule.mean(|x| (q.value(x) - mean).abs()))
    }
}

/// With `s = |x|/eps = e^{-v}`, ball means are `n int_0^inf e^{-nv} g dv`.
fn radial_oscillation(q: &QField, n: usize, eps: f64) -> Result<f64> {
    let rq = q.radial()?;
    let nf = n as f64;
    let depth0 = -eps.ln();
    let value = |v: f64| rq.ln_value_at_depth(depth0 + v).exp();
    let mean = ball_mean(value, nf)?;
    ball_mean(|v| (value(v) - mean).abs(), nf)
}

fn ball_mean<F: Fn(f64) -> f64>(g: F, nf: f64) -> Result<f64> {
    let tail = integrate_tail(|v| nf * (-nf * v).exp() * g(v), 0.0, TailOptions::default());
    match tail.verdict {
        TailVerdict::Converged => Ok(tail.value),
        TailVerdict::Diverged => Ok(f64::INFINITY),
        TailVerdict::Undecided => Err(Error::Numerical("ball mean did not settle".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FmoVerdict {
    #[serde(rename = "FMO")]
    Fmo,
    #[serde(rename = "NotFMO")]
    NotFmo,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FmoOptions {
    pub eps0: f64,
    /// Number of halvings `K`; radii are `eps0 2^{-k}`, `k = 0..=K`.
    pub steps: usize,
    pub order: usize,
    /// Bound on the trailing oscillations relative to their median.
    pub median_factor: f64,
    /// Per-step growth factor that signals unbounded oscillation.
    pub growth_factor: f64,
    pub growth_window: usize,
}

impl Default for FmoOptions {
    fn default() -> Self {
        Self {
            eps0: 0.5,
            steps: 12,
            order: DEFAULT_ORDER,
            median_factor: 2.0,
            growth_factor: 1.5,
            growth_window: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FmoTracePoint {
    pub epsilon: f64,
    pub oscillation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmoReport {
    pub verdict: FmoVerdict,
    pub trace: Vec<FmoTracePoint>,
}

/// Tri-state finite-mean-oscillation verdict from oscillations on a dyadic
/// sequence of balls.
pub fn fmo_classify(q: &QField, x0: &[f64], opts: &FmoOptions) -> Result<FmoReport> {
    if opts.steps < 2 * opts.growth_window.max(1) {
        return Err(Error::param("steps", "too few steps for the classification window"));
    }
    let trace = (0..=opts.steps)
        .map(|k| {
            let epsilon = opts.eps0 * 0.5f64.powi(k as i32);
            fmo_oscillation(q, x0, epsilon, opts.order).map(|oscillation| FmoTracePoint { epsilon, oscillation })
        })
        .collect::<Result<Vec<_>>>()?;
    let osc: Vec<f64> = trace.iter().map(|t| t.oscillation).collect();
    Ok(FmoReport {
        verdict: classify(&osc, opts),
        trace,
    })
}

fn classify(osc: &[f64], opts: &FmoOptions) -> FmoVerdict {
    if osc.iter().any(|v| v.is_infinite()) {
        return FmoVerdict::NotFmo;
    }
    let w = opts.growth_window;
    let growing = osc[osc.len() - w - 1..]
        .windows(2)
        .all(|p| p[0] > 0.0 && p[1] >= opts.growth_factor * p[0]);
    if growing {
        return FmoVerdict::NotFmo;
    }
    let mut last: Vec<f64> = osc[osc.len() - opts.steps / 2..].to_vec();
    let max = last.iter().cloned().fold(0.0, f64::max);
    last.sort_by(f64::total_cmp);
    let m = last.len();
    let median = if m % 2 == 1 {
        last[m / 2]
    } else {
        0.5 * (last[m / 2 - 1] + last[m / 2])
    };
    if max <= opts.median_factor * median {
        FmoVerdict::Fmo
    } else {
        FmoVerdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    #[test]
    fn constant_field_has_zero_oscillation() {
        let q = QField::constant(3.0).unwrap();
        let rep = fmo_classify(&q, &[0.0; 3], &FmoOptions::default()).unwrap();
        assert!(rep.trace.iter().all(|t| t.oscillation == 0.0));
        assert_eq!(rep.verdict, FmoVerdict::Fmo);
    }

    #[test]
    fn log_field_oscillation_is_scale_free() {
        // n int_0^1 s^{n-1} |ln(1/s) - 1/n| ds = 2 / (n e)
        for n in [2usize, 3, 5] {
            let q = QField::log_inverse();
            for eps in [0.5, 0.01, 1e-6] {
                let v = fmo_oscillation(&q, &vec![0.0; n], eps, 16).unwrap();
                assert_relative_eq!(v, 2.0 / (n as f64 * E), max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn inverse_distance_oscillation_scales() {
        let q = QField::power_log(1.0, 1.0, 0.0).unwrap();
        let a = fmo_oscillation(&q, &[0.0; 3], 0.01, 16).unwrap();
        let b = fmo_oscillation(&q, &[0.0; 3], 0.005, 16).unwrap();
        assert_relative_eq!(b / a, 2.0, max_relative = 1e-10);
        let rep = fmo_classify(&q, &[0.0; 3], &FmoOptions::default()).unwrap();
        assert_eq!(rep.verdict, FmoVerdict::NotFmo);
    }

    #[test]
    fn quadrature_path_matches_radial_path() {
        let q = QField::power_log(1.0, -1.0, 0.0).unwrap();
        // |x| on B(0, eps): mean 3 eps / 4; oscillation closed form in s:
        // 3 int_0^1 s^2 |s - 3/4| ds = 3 (2 (3/4)^4 / 12 + 1/4 - 3/8 ... )
        let radial = fmo_oscillation(&q, &[0.0; 3], 0.2, 16).unwrap();
        let m: f64 = 0.75;
        let exact = 0.2 * 3.0 * (m.powi(4) / 6.0 + 0.25 - m / 3.0);
        assert_relative_eq!(radial, exact, max_relative = 1e-10);
        let off = fmo_oscillation(&q, &[1e-300, 0.0, 0.0], 0.2, 24).unwrap();
        assert_relative_eq!(off, exact, max_relative = 5e-3);
    }

    #[test]
    fn tiny_balls_rejected() {
        let q = QField::log_inverse();
        assert!(matches!(
            fmo_oscillation(&q, &[0.0; 3], 1e-9, 16),
            Err(Error::InsufficientResolution(_))
        ));
    }
}
