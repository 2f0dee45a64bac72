use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::integral::criterion_integral;
use crate::error::{Error, Result};
use crate::fields::{spherical_mean, QField, RadialFunction};
use crate::geometry::{unit_sphere_area, AnnulusSpec};
use crate::numeric::{integrate, AdaptiveOptions};

fn ring_opts() -> AdaptiveOptions {
    AdaptiveOptions {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_intervals: 2000,
    }
}

/// The extremal weight `eta0(r) = 1 / (I r q(r)^{1/(n-1)})` on `[r1, r2]`.
#[derive(Debug, Clone)]
pub struct ExtremalEta<Q> {
    q: Q,
    n: usize,
    pub r1: f64,
    pub r2: f64,
    /// `I = int_{r1}^{r2} dr / (r q^{1/(n-1)})`.
    pub integral: f64,
}

impl<Q: RadialFunction> ExtremalEta<Q> {
    pub fn eval(&self, r: f64) -> f64 {
        if r < self.r1 || r > self.r2 {
            return 0.0;
        }
        1.0 / (self.integral * r * self.q.value(r).powf(1.0 / (self.n as f64 - 1.0)))
    }

    /// `omega_{n-1} / I^{n-1}`, the minimal weighted ring energy.
    pub fn minimal_energy(&self) -> f64 {
        crate::geometry::unit_sphere_area(self.n).expect("validated dimension") / self.integral.powi(self.n as i32 - 1)
    }
}

pub fn extremal_eta<Q: RadialFunction>(q: Q, r1: f64, r2: f64, n: usize) -> Result<ExtremalEta<Q>> {
    if !(r1 > 0.0) {
        return Err(Error::param("r1", "must be positive"));
    }
    let integral = criterion_integral(&q, r1, r2, n)?;
    if !(integral > 0.0 && integral.is_finite()) {
        return Err(Error::param(
            "r2",
            "degenerate interval: the criterion integral vanishes",
        ));
    }
    Ok(ExtremalEta { q, n, r1, r2, integral })
}

/// Spherical means of a field about a fixed center, as a radial function.
#[derive(Debug, Clone)]
pub struct SphericalMeanFn<'a> {
    pub field: &'a QField,
    pub center: Vec<f64>,
    pub order: usize,
}

impl RadialFunction for SphericalMeanFn<'_> {
    fn value(&self, r: f64) -> f64 {
        spherical_mean(self.field, &self.center, r, self.order).unwrap_or(f64::NAN)
    }
}

/// `int_A Q(x) eta(|x - x0|)^n dm`, reduced to `int eta^n omega r^{n-1} q(r) dr`
/// with `q` the spherical mean of `Q` about the annulus center.
pub fn weighted_ring_integral<E: Fn(f64) -> f64>(
    q: &QField,
    eta: E,
    annulus: &AnnulusSpec,
    order: usize,
) -> Result<f64> {
    let n = annulus.dim();
    q.check_dim(n)?;
    let omega = unit_sphere_area(n)?;
    // surface the domain error once instead of inside the integrand
    spherical_mean(q, &annulus.center, annulus.r2, order)?;
    let mean = SphericalMeanFn {
        field: q,
        center: annulus.center.clone(),
        order,
    };
    let est = integrate(
        |r| eta(r).powi(n as i32) * omega * r.powi(n as i32 - 1) * mean.value(r),
        annulus.r1,
        annulus.r2,
        ring_opts(),
    );
    if !est.value.is_finite() {
        return Err(Error::Numerical("weighted ring integral is not finite".into()));
    }
    Ok(est.value)
}

/// Alternative weights compared against the extremal one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateShape {
    Constant,
    LinearRamp,
    TruncatedReciprocal,
    Bump,
    ReversedRamp,
}

impl CandidateShape {
    pub const ALL: [CandidateShape; 5] = [
        CandidateShape::Constant,
        CandidateShape::LinearRamp,
        CandidateShape::TruncatedReciprocal,
        CandidateShape::Bump,
        CandidateShape::ReversedRamp,
    ];

    /// The shape on `[r1, r2]`, normalized to unit integral in closed form.
    pub fn weight(self, r1: f64, r2: f64) -> impl Fn(f64) -> f64 {
        let w = r2 - r1;
        let mid = 0.5 * (r1 + r2);
        let truncated_mass = (mid - r1) / mid + (r2 / mid).ln();
        move |r: f64| {
            if r < r1 || r > r2 {
                return 0.0;
            }
            match self {
                CandidateShape::Constant => 1.0 / w,
                CandidateShape::LinearRamp => 2.0 * (r - r1) / (w * w),
                CandidateShape::ReversedRamp => 2.0 * (r2 - r) / (w * w),
                CandidateShape::Bump => 2.0 / w * (PI * (r - r1) / w).sin().powi(2),
                CandidateShape::TruncatedReciprocal => (1.0 / r).min(1.0 / mid) / truncated_mass,
            }
        }
    }
}

/// Candidates whose integral is within this of 1 are rescaled; others are
/// rejected.
pub const NORMALIZATION_SLACK: f64 = 0.01;

/// Rescales `eta` to unit integral over `[r1, r2]`, returning the factor.
pub fn normalization_factor<E: Fn(f64) -> f64>(eta: E, r1: f64, r2: f64) -> Result<f64> {
    let mass = integrate(eta, r1, r2, ring_opts()).value;
    if !((mass - 1.0).abs() <= NORMALIZATION_SLACK) {
        return Err(Error::param(
            "eta",
            format!("integral {mass} is not within {NORMALIZATION_SLACK} of 1"),
        ));
    }
    Ok(1.0 / mass)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRow {
    pub shape: CandidateShape,
    pub integral: f64,
    /// `integral - minimal energy`, nonnegative up to `slack`.
    pub excess: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalityReport {
    pub n: usize,
    pub r1: f64,
    pub r2: f64,
    pub criterion_integral: f64,
    /// `omega_{n-1} / I^{n-1}`.
    pub minimal_energy: f64,
    /// The weighted integral evaluated at `eta0`.
    pub at_extremal: f64,
    pub equality_error: f64,
    pub equality_holds: bool,
    pub candidates: Vec<CandidateRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalityTolerances {
    pub equality_rel: f64,
    pub inequality_slack: f64,
}

impl Default for ExtremalityTolerances {
    fn default() -> Self {
        Self {
            equality_rel: 1e-6,
            inequality_slack: 1e-9,
        }
    }
}

/// Checks that `eta0` attains `omega / I^{n-1}` and that each alternative
/// weight does no better.
pub fn verify_extremality(
    q: &QField,
    annulus: &AnnulusSpec,
    order: usize,
    tol: ExtremalityTolerances,
) -> Result<ExtremalityReport> {
    let n = annulus.dim();
    let mean = SphericalMeanFn {
        field: q,
        center: annulus.center.clone(),
        order,
    };
    spherical_mean(q, &annulus.center, annulus.r2, order)?;
    let eta0 = extremal_eta(mean, annulus.r1, annulus.r2, n)?;
    let minimal = eta0.minimal_energy();
    let at_extremal = weighted_ring_integral(q, |r| eta0.eval(r), annulus, order)?;
    let equality_error = (at_extremal - minimal).abs() / minimal;
    let mut candidates = Vec::with_capacity(CandidateShape::ALL.len());
    for shape in CandidateShape::ALL {
        let raw = shape.weight(annulus.r1, annulus.r2);
        let scale = normalization_factor(&raw, annulus.r1, annulus.r2)?;
        let integral = weighted_ring_integral(q, |r| scale * raw(r), annulus, order)?;
        let excess = integral - minimal;
        candidates.push(CandidateRow {
            shape,
            integral,
            excess,
            holds: excess >= -tol.inequality_slack * minimal.max(1.0),
        });
    }
    Ok(ExtremalityReport {
        n,
        r1: annulus.r1,
        r2: annulus.r2,
        criterion_integral: eta0.integral,
        minimal_energy: minimal,
        at_extremal,
        equality_error,
        equality_holds: equality_error <= tol.equality_rel,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::RadialFn;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    #[test]
    fn eta0_for_unit_field() {
        let eta = extremal_eta(RadialFn(|_r: f64| 1.0), 0.1, 0.4, 3).unwrap();
        for r in [0.1, 0.2, 0.4] {
            assert_relative_eq!(eta.eval(r), 1.0 / (r * 4f64.ln()), max_relative = 1e-12);
        }
        let mass = integrate(|r| eta.eval(r), 0.1, 0.4, AdaptiveOptions::default()).value;
        assert_relative_eq!(mass, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn eta0_for_log_field_is_psi_over_i() {
        let n = 3;
        let (eps, eps0) = (1e-3, 0.5);
        let q = RadialFn(|t: f64| (1.0 / t).ln().powi(2));
        let eta = extremal_eta(q, eps, eps0, n).unwrap();
        let i = ((1.0 / eps).ln() / (1.0 / eps0).ln()).ln();
        assert_relative_eq!(eta.integral, i, max_relative = 1e-11);
        for t in [2e-3_f64, 0.01, 0.3] {
            let psi = 1.0 / (t * (1.0 / t).ln());
            assert_relative_eq!(eta.eval(t), psi / i, max_relative = 1e-11);
        }
    }

    #[test]
    fn unit_field_ring_energy() {
        let one = QField::constant(1.0).unwrap();
        let ring = AnnulusSpec::centered(3, 1.0, E).unwrap();
        let rep = verify_extremality(&one, &ring, 16, ExtremalityTolerances::default()).unwrap();
        assert_relative_eq!(rep.minimal_energy, 4.0 * PI, max_relative = 1e-12);
        assert!(rep.equality_holds);
        for c in &rep.candidates {
            assert!(c.holds, "{c:?}");
        }
        let constant = &rep.candidates[0];
        assert!(constant.integral > 4.0 * PI);
    }

    #[test]
    fn candidates_are_normalized() {
        for shape in CandidateShape::ALL {
            let w = shape.weight(0.2, 0.7);
            let mass = integrate(&w, 0.2, 0.7, AdaptiveOptions::default()).value;
            assert_relative_eq!(mass, 1.0, max_relative = 1e-10);
        }
        assert!(normalization_factor(|_r: f64| 3.0, 0.0, 1.0).is_err());
        assert_relative_eq!(normalization_factor(|_r: f64| 1.005, 0.0, 1.0).unwrap(), 1.0 / 1.005);
    }

    #[test]
    fn off_center_annulus() {
        let q = QField::power_log(1.5, 1.2, 0.5).unwrap();
        let ring = AnnulusSpec::new(vec![0.05, -0.02, 0.01], 0.1, 0.6).unwrap();
        let rep = verify_extremality(&q, &ring, 16, ExtremalityTolerances::default()).unwrap();
        assert!(rep.equality_holds, "{}", rep.equality_error);
        assert!(rep.candidates.iter().all(|c| c.holds));
    }
}
