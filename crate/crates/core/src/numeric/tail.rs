//! Improper integrals `int_start^inf f(u) du` for nonnegative integrands.
//!
//! The half-line is cut into panels of doubling width
//! `[start + w(2^j - 1), start + w(2^{j+1} - 1)]`. A power-law tail
//! `u^{-beta}` then contributes geometrically, with panel ratio `2^{1-beta}`,
//! and an exponential tail with ratio tending to zero. The verdict reads the
//! ratios of the last few panels.

use super::adaptive::{integrate, AdaptiveOptions};
use super::sum::pairwise_sum;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailVerdict {
    Converged,
    Diverged,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailOptions {
    /// Width of the first panel.
    pub first_width: f64,
    /// Panels never extend past this abscissa.
    pub max_abscissa: f64,
    /// Number of trailing panel ratios the verdict looks at.
    pub window: usize,
    /// All trailing ratios at or below this value mean convergence.
    pub converge_ratio: f64,
    /// All trailing ratios at or above this value mean divergence.
    pub diverge_ratio: f64,
    /// Early exit once the extrapolated tail is below `rel_tol * sum`.
    pub rel_tol: f64,
    pub panel: AdaptiveOptions,
}

impl Default for TailOptions {
    fn default() -> Self {
        Self {
            first_width: 1.0,
            max_abscissa: 2f64.powi(62),
            window: 4,
            converge_ratio: 0.97,
            diverge_ratio: 0.99,
            rel_tol: 1e-13,
            panel: AdaptiveOptions::with_rel_tol(1e-12),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailPanel {
    pub start: f64,
    pub end: f64,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailEstimate {
    pub verdict: TailVerdict,
    /// Sum over evaluated panels plus the geometric tail extrapolation when
    /// converged; the partial sum otherwise.
    pub value: f64,
    /// Extrapolated remainder (zero unless converged).
    pub tail: f64,
    pub panels: Vec<TailPanel>,
}

impl TailEstimate {
    pub fn partial_sum(&self) -> f64 {
        let c: Vec<f64> = self.panels.iter().map(|p| p.contribution).collect();
        pairwise_sum(&c)
    }

    /// Ratios of consecutive panel contributions.
    pub fn ratios(&self) -> Vec<f64> {
        self.panels
            .windows(2)
            .map(|w| panel_ratio(w[0].contribution, w[1].contribution))
            .collect()
    }
}

fn panel_ratio(prev: f64, next: f64) -> f64 {
    if next == 0.0 {
        0.0
    } else if prev == 0.0 {
        f64::INFINITY
    } else {
        next / prev
    }
}

/// Integrates a nonnegative `f` over `[start, inf)` with a convergence verdict.
pub fn integrate_tail<F: Fn(f64) -> f64>(f: F, start: f64, opts: TailOptions) -> TailEstimate {
    let mut panels: Vec<TailPanel> = Vec::new();
    let mut j = 0i32;
    loop {
        let a = start + opts.first_width * (2f64.powi(j) - 1.0);
        let b = start + opts.first_width * (2f64.powi(j + 1) - 1.0);
        if b > opts.max_abscissa && !panels.is_empty() {
            break;
        }
        let est = integrate(&f, a, b, opts.panel);
        panels.push(TailPanel {
            start: a,
            end: b,
            contribution: est.value.abs(),
        });
        let partial: f64 = panels.iter().map(|p| p.contribution).sum();
        if !partial.is_finite() {
            return TailEstimate {
                verdict: TailVerdict::Diverged,
                value: f64::INFINITY,
                tail: 0.0,
                panels,
            };
        }
        if panels.len() > opts.window {
            let ratios = trailing_ratios(&panels, opts.window);
            let worst = ratios.iter().cloned().fold(0.0, f64::max);
            if worst <= opts.converge_ratio {
                let last = panels.last().unwrap().contribution;
                let tail = last * worst / (1.0 - worst);
                if tail <= opts.rel_tol * partial || last == 0.0 {
                    return finish(panels, &opts);
                }
            }
        }
        j += 1;
        if j > 1000 {
            break;
        }
    }
    finish(panels, &opts)
}

fn trailing_ratios(panels: &[TailPanel], window: usize) -> Vec<f64> {
    let n = panels.len();
    (n - window..n)
        .map(|i| panel_ratio(panels[i - 1].contribution, panels[i].contribution))
        .collect()
}

fn finish(panels: Vec<TailPanel>, opts: &TailOptions) -> TailEstimate {
    let contributions: Vec<f64> = panels.iter().map(|p| p.contribution).collect();
    let partial = pairwise_sum(&contributions);
    if panels.len() <= opts.window {
        return TailEstimate {
            verdict: TailVerdict::Undecided,
            value: partial,
            tail: 0.0,
            panels,
        };
    }
    let ratios = trailing_ratios(&panels, opts.window);
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    let min_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    if max_ratio <= opts.converge_ratio {
        let last = *contributions.last().unwrap();
        // Use the most recent ratio for the remainder; for power tails the
        // ratios approach 2^{1-beta} from a stable direction.
        let r = *ratios.last().unwrap();
        let tail = if last == 0.0 { 0.0 } else { last * r / (1.0 - r) };
        TailEstimate {
            verdict: TailVerdict::Converged,
            value: partial + tail,
            tail,
            panels,
        }
    } else if min_ratio >= opts.diverge_ratio {
        TailEstimate {
            verdict: TailVerdict::Diverged,
            value: partial,
            tail: 0.0,
            panels,
        }
    } else {
        TailEstimate {
            verdict: TailVerdict::Undecided,
            value: partial,
            tail: 0.0,
            panels,
        }
    }
}

/// `int_a^b f` over panels of doubling width starting at `a`, for long
/// intervals in log-depth where the integrand varies on every scale.
pub fn integrate_doubling<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: AdaptiveOptions) -> f64 {
    if b < a {
        return -integrate_doubling(f, b, a, opts);
    }
    let mut parts = Vec::new();
    let mut lo = a;
    let mut width = 1.0;
    while lo < b {
        let hi = (lo + width).min(b);
        parts.push(integrate(&f, lo, hi, opts).value);
        lo = hi;
        width *= 2.0;
    }
    pairwise_sum(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_tail_converges_exactly() {
        let t = integrate_tail(|u: f64| (-u).exp(), 0.0, TailOptions::default());
        assert_eq!(t.verdict, TailVerdict::Converged);
        assert_relative_eq!(t.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn power_tail_converges_with_extrapolation() {
        // int_1^inf u^{-1.5} = 2
        let t = integrate_tail(|u: f64| u.powf(-1.5), 1.0, TailOptions::default());
        assert_eq!(t.verdict, TailVerdict::Converged);
        assert_relative_eq!(t.value, 2.0, max_relative = 1e-8);
    }

    #[test]
    fn harmonic_tail_diverges() {
        let t = integrate_tail(|u: f64| 1.0 / u, 1.0, TailOptions::default());
        assert_eq!(t.verdict, TailVerdict::Diverged);
    }

    #[test]
    fn slowly_divergent_tail_is_detected() {
        let t = integrate_tail(|u: f64| u.powf(-0.95), 1.0, TailOptions::default());
        assert_eq!(t.verdict, TailVerdict::Diverged);
    }

    #[test]
    fn slowly_convergent_tail_is_detected() {
        let t = integrate_tail(|u: f64| u.powf(-1.05), 1.0, TailOptions::default());
        assert_eq!(t.verdict, TailVerdict::Converged);
        // exact value 1/0.05 = 20
        assert_relative_eq!(t.value, 20.0, max_relative = 1e-4);
    }

    #[test]
    fn doubling_panels_match_closed_form() {
        let v = integrate_doubling(|u: f64| 1.0 / (1.0 + u), 0.0, 1e9, AdaptiveOptions::default());
        assert_relative_eq!(v, (1e9f64 + 1.0).ln(), max_relative = 1e-12);
        let w = integrate_doubling(|u: f64| 1.0 / (1.0 + u), 1e9, 0.0, AdaptiveOptions::default());
        assert_relative_eq!(w, -v);
    }

    #[test]
    fn growing_integrand_diverges() {
        let t = integrate_tail(|u: f64| (0.01 * u).exp(), 0.0, TailOptions::default());
        assert_eq!(t.verdict, TailVerdict::Diverged);
    }
}
