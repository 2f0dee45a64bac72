use serde::{Deserialize, Serialize};
use std::cell::Cell;

use crate::error::{Error, Result};
use crate::fields::{PowerLogGrowth, QField, RadialFunction};
use crate::numeric::{integrate_doubling, integrate_tail, AdaptiveOptions, TailOptions, TailVerdict};
use crate::Method;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Divergence {
    Diverges,
    Converges,
    Inconclusive,
}

fn depth_opts() -> AdaptiveOptions {
    AdaptiveOptions {
        abs_tol: 0.0,
        rel_tol: 1e-13,
        max_intervals: 4000,
    }
}

/// `I(eps, eps0) = int_eps^eps0 dt / (t q(t)^{1/(n-1)})`, integrated in the
/// depth `u = ln(1/t)` where the integrand is `q^{-1/(n-1)}`.
pub fn criterion_integral<Q: RadialFunction + ?Sized>(q: &Q, eps: f64, eps0: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n, 2));
    }
    if !(eps > 0.0 && eps < eps0) {
        return Err(Error::param(
            "eps",
            format!("need 0 < eps < eps0, got eps = {eps}, eps0 = {eps0}"),
        ));
    }
    depth_integral(q, -eps0.ln(), -eps.ln(), n)
}

/// The same integral between depths `u0 < u1`.
pub(crate) fn depth_integral<Q: RadialFunction + ?Sized>(q: &Q, u0: f64, u1: f64, n: usize) -> Result<f64> {
    let inv = 1.0 / (n as f64 - 1.0);
    let bad = Cell::new(false);
    let v = integrate_doubling(
        |u| {
            let lq = q.ln_value_at_depth(u);
            if lq.is_nan() || lq == f64::NEG_INFINITY {
                bad.set(true);
                return 0.0;
            }
            (-lq * inv).exp()
        },
        u0,
        u1,
        depth_opts(),
    );
    if bad.get() {
        return Err(Error::param("q", "must be positive on the integration interval"));
    }
    Ok(v)
}

/// Closed-form verdict for `q ~ r^{-gamma} (ln 1/r)^s`: in depth the
/// integrand behaves like `e^{-gamma u/(n-1)} u^{-s/(n-1)}`.
pub fn symbolic_divergence(g: PowerLogGrowth, n: usize) -> Divergence {
    let crit = n as f64 - 1.0;
    if g.gamma < 0.0 || (g.gamma == 0.0 && g.s <= crit) {
        Divergence::Diverges
    } else {
        Divergence::Converges
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub eps0: f64,
    pub decades: usize,
    /// Increments below this floor do not count as divergent growth.
    pub increment_floor: f64,
    /// Increments shrinking by this ratio count as geometric decay.
    pub decay_ratio: f64,
    pub window: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            eps0: 0.5,
            decades: 8,
            increment_floor: 1e-3,
            decay_ratio: 0.7,
            window: 4,
        }
    }
}

/// Which rule produced a divergence verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceRule {
    /// Exponents of the field's growth at the puncture.
    PowerLogExponents,
    /// Doubling panels of the depth integral out to very large depth.
    DepthTail,
    /// Increments of the integral over decades of the data range.
    DecadeIncrements,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionTracePoint {
    pub epsilon: f64,
    pub integral: f64,
    pub increment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub verdict: Divergence,
    pub method: Method,
    pub rule: DivergenceRule,
    pub eps0: f64,
    pub trace: Vec<CriterionTracePoint>,
}

/// `I(eps_k, eps0)` for `eps_k = eps0 10^{-k}`, `k = 1..=decades`.
pub fn criterion_trace<Q: RadialFunction + ?Sized>(
    q: &Q,
    n: usize,
    eps0: f64,
    decades: usize,
) -> Result<Vec<CriterionTracePoint>> {
    let mut trace = Vec::with_capacity(decades);
    let mut total = 0.0;
    let u0 = -eps0.ln();
    for k in 1..=decades {
        let a = u0 + (k - 1) as f64 * std::f64::consts::LN_10;
        let b = u0 + k as f64 * std::f64::consts::LN_10;
        let increment = depth_integral(q, a, b, n)?;
        if increment < 0.0 {
            return Err(Error::Numerical("criterion integral decreased as eps shrank".into()));
        }
        total += increment;
        trace.push(CriterionTracePoint {
            epsilon: eps0 * 10f64.powi(-(k as i32)),
            integral: total,
            increment,
        });
    }
    Ok(trace)
}

/// Numeric verdict from the depth tail `int_{u0}^inf q^{-1/(n-1)} du`.
pub fn classify_by_depth_tail<Q: RadialFunction + ?Sized>(q: &Q, n: usize, eps0: f64) -> Divergence {
    let inv = 1.0 / (n as f64 - 1.0);
    let opts = TailOptions {
        max_abscissa: q.max_depth().min(TailOptions::default().max_abscissa),
        ..TailOptions::default()
    };
    let tail = integrate_tail(|u| (-q.ln_value_at_depth(u) * inv).exp(), -eps0.ln(), opts);
    match tail.verdict {
        TailVerdict::Converged => Divergence::Converges,
        TailVerdict::Diverged => Divergence::Diverges,
        TailVerdict::Undecided => Divergence::Inconclusive,
    }
}

/// Verdict from a decade trace: geometric decay of the increments means
/// convergence, increments staying above the floor mean divergence.
pub fn classify_by_decades(trace: &[CriterionTracePoint], opts: &ClassifyOptions) -> Divergence {
    let inc: Vec<f64> = trace.iter().map(|t| t.increment).collect();
    if inc.len() < opts.window + 1 {
        return Divergence::Inconclusive;
    }
    let tail = &inc[inc.len() - opts.window - 1..];
    if tail.windows(2).all(|w| w[1] < opts.decay_ratio * w[0]) {
        return Divergence::Converges;
    }
    if inc.iter().all(|&d| d >= opts.increment_floor) {
        return Divergence::Diverges;
    }
    Divergence::Inconclusive
}

/// Divergence of the criterion integral at the origin for a radial field.
pub fn classify_divergence(q: &QField, n: usize, opts: &ClassifyOptions) -> Result<DivergenceReport> {
    if !q.is_radial() {
        return Err(Error::Unsupported(
            "divergence classification needs a radial field".into(),
        ));
    }
    q.check_dim(n)?;
    if !(opts.eps0 > 0.0 && opts.eps0 < 1.0) {
        return Err(Error::param("eps0", "must lie in (0, 1)"));
    }
    let rq = q.radial()?;
    if let QField::Tabulated { table } = q {
        // stay inside the data: below the smallest knot the table is only
        // held constant
        let smallest = table.radii()[0];
        let decades = (0..=opts.decades)
            .take_while(|&k| opts.eps0 * 10f64.powi(-(k as i32)) >= smallest)
            .count()
            .saturating_sub(1);
        let trace = criterion_trace(&rq, n, opts.eps0, decades)?;
        return Ok(DivergenceReport {
            verdict: classify_by_decades(&trace, opts),
            method: Method::Quadrature,
            rule: DivergenceRule::DecadeIncrements,
            eps0: opts.eps0,
            trace,
        });
    }
    let trace = criterion_trace(&rq, n, opts.eps0, opts.decades)?;
    let (verdict, method, rule) = match q.asymptotics() {
        Some(g) => (
            symbolic_divergence(g, n),
            Method::Symbolic,
            DivergenceRule::PowerLogExponents,
        ),
        None => (
            classify_by_depth_tail(&rq, n, opts.eps0),
            Method::Quadrature,
            DivergenceRule::DepthTail,
        ),
    };
    Ok(DivergenceReport {
        verdict,
        method,
        rule,
        eps0: opts.eps0,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::RadialFn;
    use crate::maps::RadialTable;
    use approx::assert_relative_eq;

    #[test]
    fn closed_forms() {
        let one = RadialFn(|_t: f64| 1.0);
        assert_relative_eq!(
            criterion_integral(&one, 1e-4, 0.5, 3).unwrap(),
            (0.5f64 / 1e-4).ln(),
            max_relative = 1e-12
        );
        let n = 4;
        let logp = RadialFn(move |t: f64| (1.0 / t).ln().powi(n as i32 - 1));
        let exact = ((1e6f64).ln() / 2f64.ln()).ln();
        assert_relative_eq!(
            criterion_integral(&logp, 1e-6, 0.5, n).unwrap(),
            exact,
            max_relative = 1e-11
        );
        let pow = RadialFn(|t: f64| t.powi(-2));
        assert_relative_eq!(
            criterion_integral(&pow, 0.01, 0.5, 3).unwrap(),
            0.49,
            max_relative = 1e-12
        );
    }

    #[test]
    fn bad_inputs() {
        let one = RadialFn(|_t: f64| 1.0);
        assert!(criterion_integral(&one, 0.5, 0.5, 3).is_err());
        let neg = RadialFn(|_t: f64| -1.0);
        assert!(criterion_integral(&neg, 0.1, 0.5, 3).is_err());
    }

    #[test]
    fn symbolic_rule() {
        let g = |gamma, s| symbolic_divergence(PowerLogGrowth { gamma, s }, 3);
        assert_eq!(g(0.0, 2.0), Divergence::Diverges);
        assert_eq!(g(0.0, 3.0), Divergence::Converges);
        assert_eq!(g(2.0, -5.0), Divergence::Converges);
        assert_eq!(g(-0.5, 10.0), Divergence::Diverges);
    }

    #[test]
    fn depth_tail_agrees_off_the_boundary() {
        for (gamma, s, want) in [
            (0.0, 1.5, Divergence::Diverges),
            (0.0, 2.5, Divergence::Converges),
            (0.1, 0.0, Divergence::Converges),
            (-0.1, 0.0, Divergence::Diverges),
        ] {
            let q = QField::power_log(1.0, gamma, s).unwrap();
            assert_eq!(
                classify_by_depth_tail(&q.radial().unwrap(), 3, 0.5),
                want,
                "gamma {gamma} s {s}"
            );
        }
    }

    #[test]
    fn classify_power_log_and_tables() {
        let q = QField::power_log(1.0, 0.0, 2.0).unwrap();
        let rep = classify_divergence(&q, 3, &ClassifyOptions::default()).unwrap();
        assert_eq!(rep.verdict, Divergence::Diverges);
        assert_eq!(rep.method, Method::Symbolic);
        assert_eq!(rep.trace.len(), 8);
        assert!(rep.trace.windows(2).all(|w| w[1].integral >= w[0].integral));

        // tabulated r^{-2} over eight decades: increments shrink 100-fold
        let radii: Vec<f64> = (0..=40).map(|k| 0.5 * 10f64.powf(-(40 - k) as f64 / 5.0)).collect();
        let values: Vec<f64> = radii.iter().map(|r| r.powi(-2)).collect();
        let t = QField::Tabulated {
            table: RadialTable::new(radii.clone(), values).unwrap(),
        };
        let rep = classify_divergence(&t, 3, &ClassifyOptions::default()).unwrap();
        assert_eq!(rep.verdict, Divergence::Converges);
        assert_eq!(rep.rule, DivergenceRule::DecadeIncrements);

        let logs: Vec<f64> = radii.iter().map(|r| (1.0 / r).ln().powi(2)).collect();
        let t = QField::Tabulated {
            table: RadialTable::new(radii, logs).unwrap(),
        };
        assert_eq!(
            classify_divergence(&t, 3, &ClassifyOptions::default()).unwrap().verdict,
            Divergence::Diverges
        );
    }

    #[test]
    fn non_radial_rejected() {
        assert!(classify_divergence(&QField::AxisRatio { axis: 0 }, 3, &ClassifyOptions::default()).is_err());
    }
}
