use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{integrate, AdaptiveOptions};
use crate::Method;

/// Orlicz gauge `phi` of the Sobolev class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiSpec {
    /// `t^p`
    Power { p: f64 },
    /// `t^p (ln(e + t))^s`
    PowerLogPhi { p: f64, s: f64 },
    /// Nondecreasing data interpolated log-linearly; beyond the last knot
    /// the power law through the last two knots is continued.
    Tabulated { t: Vec<f64>, phi: Vec<f64> },
}

impl PhiSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PhiSpec::Power { p } => {
                if !(*p >= 0.0 && p.is_finite()) {
                    return Err(Error::param("p", "must be nonnegative"));
                }
            }
            PhiSpec::PowerLogPhi { p, s } => {
                if !(*p > 0.0 && p.is_finite() && s.is_finite() && *s >= 0.0) {
                    return Err(Error::param("p", "need p > 0 and s >= 0 for a nondecreasing gauge"));
                }
            }
            PhiSpec::Tabulated { t, phi } => {
                if t.len() < 2 || t.len() != phi.len() {
                    return Err(Error::param("t", "need at least two knots and matching values"));
                }
                if !(t[0] > 0.0) || t.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::param("t", "knots must be positive and strictly increasing"));
                }
                if phi.iter().any(|v| !(*v > 0.0 && v.is_finite())) || phi.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::param("phi", "values must be positive and nondecreasing"));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            PhiSpec::Power { p } => t.powf(*p),
            PhiSpec::PowerLogPhi { p, s } => t.powf(*p) * (std::f64::consts::E + t).ln().powf(*s),
            PhiSpec::Tabulated { t: knots, phi } => {
                let m = knots.len();
                if t <= knots[0] {
                    // continue the first segment's power law toward 0
                    let slope = log_slope(knots[0], phi[0], knots[1], phi[1]);
                    return phi[0] * (t / knots[0]).powf(slope);
                }
                let i = knots.partition_point(|&k| k < t).min(m - 1).max(1) - 1;
                let slope = log_slope(knots[i], phi[i], knots[i + 1], phi[i + 1]);
                phi[i] * (t / knots[i]).powf(slope)
            }
        }
    }

    /// Power-law exponent of `phi` at infinity.
    fn tail_exponent(&self) -> f64 {
        match self {
            PhiSpec::Power { p } | PhiSpec::PowerLogPhi { p, .. } => *p,
            PhiSpec::Tabulated { t, phi } => {
                let m = t.len();
                log_slope(t[m - 2], phi[m - 2], t[m - 1], phi[m - 1])
            }
        }
    }
}

fn log_slope(t0: f64, p0: f64, t1: f64, p1: f64) -> f64 {
    (p1 / p0).ln() / (t1 / t0).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CalderonVerdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalderonReport {
    pub n: usize,
    pub verdict: CalderonVerdict,
    pub method: Method,
    /// `int_1^inf (t/phi(t))^{1/(n-2)} dt` when finite and computable.
    pub integral: Option<f64>,
    /// Power-law exponent of `phi` used for the tail.
    pub tail_exponent: f64,
}

/// Tabulated gauges whose tail exponent is this close to `n - 1` are left
/// undecided.
const TAIL_FIT_MARGIN: f64 = 0.05;
/// Upper end of the numeric part of the integral.
const NUMERIC_UPPER: f64 = 1e12;

/// Whether `int_1^inf (t / phi(t))^{1/(n-2)} dt` is finite.
pub fn calderon_check(phi: &PhiSpec, n: usize) -> Result<CalderonReport> {
    if n < 2 {
        return Err(Error::InvalidDimension(n, 2));
    }
    if n == 2 {
        return Err(Error::NotApplicable(
            "the growth condition on phi is only imposed for n >= 3".into(),
        ));
    }
    phi.validate()?;
    let k = n as f64 - 2.0;
    let crit = n as f64 - 1.0;
    let p = phi.tail_exponent();
    let report = |verdict, method, integral| CalderonReport {
        n,
        verdict,
        method,
        integral,
        tail_exponent: p,
    };
    match phi {
        PhiSpec::Power { p } => {
            if *p > crit {
                // int_1^inf t^{(1-p)/k} dt = k / (p - 1 - k)
                Ok(report(
                    CalderonVerdict::Holds,
                    Method::Symbolic,
                    Some(k / (p - 1.0 - k)),
                ))
            } else {
                Ok(report(CalderonVerdict::Fails, Method::Symbolic, None))
            }
        }
        PhiSpec::PowerLogPhi { p, s } => {
            let holds = *p > crit || (*p == crit && s / k > 1.0);
            let verdict = if holds {
                CalderonVerdict::Holds
            } else {
                CalderonVerdict::Fails
            };
            Ok(report(verdict, Method::Symbolic, None))
        }
        PhiSpec::Tabulated { .. } => {
            if (p - crit).abs() < TAIL_FIT_MARGIN {
                return Ok(report(CalderonVerdict::Inconclusive, Method::Quadrature, None));
            }
            if p < crit {
                return Ok(report(CalderonVerdict::Fails, Method::Quadrature, None));
            }
            // t = e^u, then the exact power-law remainder past 1e12
            let g = |u: f64| {
                let t = u.exp();
                t * (t / phi.eval(t)).powf(1.0 / k)
            };
            let upper = NUMERIC_UPPER.ln();
            let body = integrate(g, 0.0, upper, AdaptiveOptions::with_rel_tol(1e-10)).value;
            let beta = (1.0 - p) / k;
            let c = (NUMERIC_UPPER / phi.eval(NUMERIC_UPPER)).powf(1.0 / k) / NUMERIC_UPPER.powf(beta);
            let tail = -c * NUMERIC_UPPER.powf(beta + 1.0) / (beta + 1.0);
            Ok(report(CalderonVerdict::Holds, Method::Quadrature, Some(body + tail)))
        }
    }
}
