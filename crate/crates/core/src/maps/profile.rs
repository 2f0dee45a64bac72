use serde::{Deserialize, Serialize};

use super::table::RadialTable;
use crate::criterion::{symbolic_divergence, Divergence};
use crate::error::{Error, Result};
use crate::fields::{PowerLogGrowth, QField, RadialFunction};
use crate::geometry::Dimension;
use crate::numeric::{integrate_doubling, integrate_tail, AdaptiveOptions, TailOptions, TailVerdict};

/// Radial stretch function `rho(r)` of a map `f(x) = (x/|x|) rho(|x|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `rho(r) = 1 + r^alpha`, `alpha` in (0, 1).
    PowerShift { alpha: f64 },
    /// `rho(r) = exp(-int_r^1 dt / (t q(t)^{1/(n-1)}))` for a radial `q`.
    ExpIntegral { q: Box<QField>, n: Dimension },
    /// Monotone data, held constant below the smallest knot.
    Tabulated { table: RadialTable },
}

/// How a profile limit was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitMethod {
    /// Dyadic evaluation with Aitken extrapolation.
    Extrapolated,
    /// Improper integral of the exponent in log-depth.
    TailIntegral,
    /// Closed-form divergence analysis of the defining integral.
    Symbolic,
    /// Value at the smallest knot.
    TableEndpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileLimit {
    pub value: f64,
    pub error: f64,
    pub method: LimitMethod,
}

fn deep_opts() -> AdaptiveOptions {
    AdaptiveOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-13,
        max_intervals: 4000,
    }
}

impl Profile {
    pub fn power_shift(alpha: f64) -> Result<Self> {
        let p = Profile::PowerShift { alpha };
        p.validate(None)?;
        Ok(p)
    }

    pub fn exp_integral(q: QField, n: usize) -> Result<Self> {
        let p = Profile::ExpIntegral {
            q: Box::new(q),
            n: Dimension::new(n)?,
        };
        p.validate(Some(n))?;
        Ok(p)
    }

    pub fn tabulated(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let p = Profile::Tabulated {
            table: RadialTable::new(radii, values)?,
        };
        p.validate(None)?;
        Ok(p)
    }

    pub fn validate(&self, n: Option<usize>) -> Result<()> {
        match self {
            Profile::PowerShift { alpha } => {
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    return Err(Error::param("alpha", format!("must lie in (0, 1), got {alpha}")));
                }
            }
            Profile::ExpIntegral { q, n: pn } => {
                if let Some(n) = n {
                    if n != pn.get() {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            got: pn.get(),
                        });
                    }
                }
                q.validate()?;
                q.check_dim(pn.get())?;
                if !q.is_radial() {
                    return Err(Error::Unsupported("exp-integral profile needs a radial q".into()));
                }
            }
            Profile::Tabulated { table } => {
                if !table.is_strictly_increasing() {
                    return Err(Error::param("values", "profile data must be strictly increasing"));
                }
            }
        }
        Ok(())
    }

    /// `h(u) = q(e^{-u})^{-1/(n-1)}`, the integrand of `-ln rho` in depth.
    fn exponent_density<'a>(q: &'a QField, n: Dimension) -> impl Fn(f64) -> f64 + 'a {
        let rq = q.radial().expect("validated radial field");
        let inv = 1.0 / n.codim_exponent();
        move |u: f64| (-rq.ln_value_at_depth(u) * inv).exp()
    }

    /// `ln rho` at depth `u = ln(1/r)`.
    pub fn ln_value_at_depth(&self, u: f64) -> f64 {
        match self {
            Profile::PowerShift { alpha } => (1.0 + (-alpha * u).exp()).ln(),
            Profile::ExpIntegral { q, n } => {
                let h = Self::exponent_density(q, *n);
                -integrate_doubling(&h, 0.0, u, deep_opts())
            }
            Profile::Tabulated { table } => table.value((-u).exp()).ln(),
        }
    }

    pub fn ln_value(&self, r: f64) -> f64 {
        self.ln_value_at_depth(-r.ln())
    }

    pub fn value(&self, r: f64) -> f64 {
        match self {
            Profile::PowerShift { alpha } => 1.0 + r.powf(*alpha),
            Profile::Tabulated { table } => table.value(r),
            Profile::ExpIntegral { .. } => self.ln_value(r).exp(),
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match self {
            Profile::PowerShift { alpha } => alpha * r.powf(alpha - 1.0),
            Profile::Tabulated { table } => table.derivative(r),
            Profile::ExpIntegral { q, n } => {
                let qr = q.radial_value(r);
                self.value(r) / (r * qr.powf(1.0 / n.codim_exponent()))
            }
        }
    }

    /// Tangential stretch `rho(r)/r` and radial stretch `rho'(r)`.
    pub fn stretches(&self, r: f64) -> (f64, f64) {
        (self.value(r) / r, self.derivative(r))
    }

    /// `ln(tangential / radial)` at depth `u`.
    pub fn ln_stretch_ratio_at_depth(&self, u: f64, n: usize) -> f64 {
        match self {
            Profile::PowerShift { alpha } => (1.0 + (-alpha * u).exp()).ln() - alpha.ln() + alpha * u,
            Profile::ExpIntegral { q, .. } => {
                q.radial().expect("validated radial field").ln_value_at_depth(u) / (n as f64 - 1.0)
            }
            Profile::Tabulated { .. } => {
                let r = (-u).exp();
                let (t, d) = self.stretches(r);
                (t / d).ln()
            }
        }
    }

    pub fn max_depth(&self) -> f64 {
        match self {
            Profile::PowerShift { .. } => f64::INFINITY,
            Profile::ExpIntegral { q, .. } => q.radial().map(|r| r.max_depth()).unwrap_or(0.0),
            Profile::Tabulated { .. } => crate::fields::MAX_DIRECT_DEPTH,
        }
    }

    /// Growth of the inner dilatation of the radial map near 0.
    pub fn inner_dilatation_growth(&self, n: usize) -> Option<PowerLogGrowth> {
        match self {
            Profile::PowerShift { alpha } => Some(PowerLogGrowth {
                gamma: alpha * (n as f64 - 1.0),
                s: 0.0,
            }),
            Profile::ExpIntegral { q, .. } => {
                let g = q.asymptotics()?;
                let grows = g.gamma > 0.0 || (g.gamma == 0.0 && g.s > 0.0);
                let decays = g.gamma < 0.0 || (g.gamma == 0.0 && g.s < 0.0);
                Some(if grows {
                    g
                } else if decays {
                    g.scaled(-1.0 / (n as f64 - 1.0))
                } else {
                    PowerLogGrowth::BOUNDED
                })
            }
            Profile::Tabulated { .. } => None,
        }
    }

    /// `lim_{r -> 0+} rho(r)` with an error estimate.
    pub fn limit_at_zero(&self, tolerance: f64) -> Result<ProfileLimit> {
        match self {
            Profile::PowerShift { .. } => Ok(self.extrapolated_limit(tolerance)),
            Profile::Tabulated { table } => {
                let r = table.radii();
                if r[0] >= 1e-3 {
                    return Err(Error::InsufficientResolution(format!(
                        "smallest knot {} is not below 1e-3",
                        r[0]
                    )));
                }
                let v = table.values();
                Ok(ProfileLimit {
                    value: v[0],
                    error: (v[1] - v[0]).abs(),
                    method: LimitMethod::TableEndpoint,
                })
            }
            Profile::ExpIntegral { q, n } => {
                let h = Self::exponent_density(q, *n);
                let opts = TailOptions {
                    max_abscissa: self.max_depth().min(TailOptions::default().max_abscissa),
                    ..TailOptions::default()
                };
                let tail = integrate_tail(h, 0.0, opts);
                match tail.verdict {
                    TailVerdict::Converged => {
                        let value = (-tail.value).exp();
                        Ok(ProfileLimit {
                            value,
                            error: value * tail.tail.abs().max(1e-12),
                            method: LimitMethod::TailIntegral,
                        })
                    }
                    TailVerdict::Diverged => Ok(ProfileLimit {
                        value: 0.0,
                        error: (-tail.partial_sum()).exp(),
                        method: LimitMethod::TailIntegral,
                    }),
                    TailVerdict::Undecided => {
                        let deepest = (-tail.partial_sum()).exp();
                        match q.asymptotics().map(|g| symbolic_divergence(g, n.get())) {
                            Some(Divergence::Diverges) => Ok(ProfileLimit {
                                value: 0.0,
                                error: deepest,
                                method: LimitMethod::Symbolic,
                            }),
                            Some(Divergence::Converges) => Ok(ProfileLimit {
                                value: deepest,
                                error: deepest,
                                method: LimitMethod::Symbolic,
                            }),
                            _ => Err(Error::Numerical(
                                "profile limit undecided: the exponent integral neither converges nor diverges numerically".into(),
                            )),
                        }
                    }
                }
            }
        }
    }

    fn extrapolated_limit(&self, tolerance: f64) -> ProfileLimit {
        let tol = tolerance.max(1e-15);
        let mut seq: Vec<f64> = Vec::new();
        for k in 0..1000 {
            seq.push(self.ln_value_at_depth(k as f64 * std::f64::consts::LN_2).exp());
            let m = seq.len();
            if m >= 3 && (seq[m - 1] - seq[m - 2]).abs() < tol {
                break;
            }
        }
        let m = seq.len();
        let (a, b, c) = (seq[m - 3], seq[m - 2], seq[m - 1]);
        let d1 = b - a;
        let d2 = c - b;
        let denom = d2 - d1;
        let value = if denom.abs() > f64::MIN_POSITIVE && d1 != 0.0 {
            (c - d2 * d2 / denom).max(0.0)
        } else {
            c
        };
        ProfileLimit {
            value,
            error: (value - c).abs().max(d2.abs()),
            method: LimitMethod::Extrapolated,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_shift_value_and_limit() {
        let p = Profile::power_shift(0.5).unwrap();
        assert_relative_eq!(p.value(0.25), 1.5);
        assert_relative_eq!(p.derivative(0.25), 1.0);
        let lim = p.limit_at_zero(1e-12).unwrap();
        assert_relative_eq!(lim.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn power_shift_alpha_range() {
        assert!(Profile::power_shift(0.0).is_err());
        assert!(Profile::power_shift(1.0).is_err());
    }

    #[test]
    fn exp_integral_with_unit_q_is_identity() {
        let p = Profile::exp_integral(QField::constant(1.0).unwrap(), 3).unwrap();
        for r in [0.9, 0.5, 0.01] {
            assert_relative_eq!(p.value(r), r, max_relative = 1e-12);
            assert_relative_eq!(p.derivative(r), 1.0, max_relative = 1e-12);
        }
        let lim = p.limit_at_zero(1e-12).unwrap();
        assert_eq!(lim.value, 0.0);
    }

    #[test]
    fn exp_integral_log_power_q_closed_form() {
        // q(t) = (ln(e/t))^{n-1} gives rho(r) = 1 / ln(e/r)
        let q = QField::LogPower { shift: 1.0, power: 2.0 };
        let p = Profile::exp_integral(q, 3).unwrap();
        for r in [0.5, 1e-2, 1e-8] {
            let exact = 1.0 / (1.0 - f64::ln(r));
            assert_relative_eq!(p.value(r), exact, max_relative = 1e-11);
        }
        assert_relative_eq!(p.ln_value_at_depth(1e12), -(1e12f64 + 1.0).ln(), max_relative = 1e-11);
        let lim = p.limit_at_zero(1e-12).unwrap();
        assert_eq!(lim.value, 0.0);
    }

    #[test]
    fn exp_integral_convergent_has_positive_limit() {
        // q = t^{-2} in n = 3: rho(r) = exp(-(1 - r)) -> 1/e
        let p = Profile::exp_integral(QField::power_log(1.0, 2.0, 0.0).unwrap(), 3).unwrap();
        assert_relative_eq!(p.value(0.3), (-0.7f64).exp(), max_relative = 1e-12);
        let lim = p.limit_at_zero(1e-12).unwrap();
        assert_relative_eq!(lim.value, (-1.0f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn tabulated_limits() {
        let p = Profile::tabulated(vec![1e-4, 0.5, 1.0], vec![0.5, 0.8, 1.0]).unwrap();
        assert_eq!(p.limit_at_zero(1e-9).unwrap().value, 0.5);
        let coarse = Profile::tabulated(vec![0.01, 1.0], vec![0.5, 1.0]).unwrap();
        assert!(matches!(
            coarse.limit_at_zero(1e-9),
            Err(Error::InsufficientResolution(_))
        ));
        assert!(Profile::tabulated(vec![0.1, 1.0], vec![1.0, 0.5]).is_err());
    }
}
