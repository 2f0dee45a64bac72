//! Concrete mappings of the punctured unit ball.

mod profile;
mod table;

pub use profile::{LimitMethod, Profile, ProfileLimit};
pub use table::{RadialTable, RawTable};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::PowerLogGrowth;
use crate::geometry::{norm, Dimension};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    /// `f(x) = (x/|x|) rho(|x|)`.
    Radial { profile: Profile, n: Dimension },
    /// Rotation of the `(x1, x2)` plane by `m` times the polar angle, other
    /// coordinates fixed.
    Twist { m: u32, n: Dimension },
    /// `f(z) = z^k` on the punctured disk.
    PlanarPower { k: u32 },
    /// `f(z) = z + kappa conj(z)`.
    PlanarShear { kappa: f64 },
}

/// Topological facts about a built-in map on the punctured unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapMetadata {
    pub bounded: bool,
    pub open_discrete_closed: bool,
    /// The limit set at the puncture misses the limit set at the boundary.
    pub limit_sets_disjoint: bool,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitSetDescription {
    SinglePoint { point: Vec<f64> },
    SphereSet { center: Vec<f64>, radius: f64 },
}

/// Tolerance used when deciding limit sets from profile limits.
const LIMIT_TOLERANCE: f64 = 1e-12;

/// `ln K_I` of a radial map from `ln(tangential / radial)`: the smaller
/// stretch is raised to the `n`-th power in the denominator.
pub(crate) fn ln_inner_dilatation_from_ratio(ln_ratio: f64, n: usize) -> f64 {
    if ln_ratio >= 0.0 {
        (n as f64 - 1.0) * ln_ratio
    } else {
        -ln_ratio
    }
}

impl MapSpec {
    pub fn radial(profile: Profile, n: usize) -> Result<Self> {
        let spec = MapSpec::Radial {
            profile,
            n: Dimension::new(n)?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn twist(m: u32, n: usize) -> Result<Self> {
        let spec = MapSpec::Twist {
            m,
            n: Dimension::spatial(n)?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn planar_power(k: u32) -> Result<Self> {
        let spec = MapSpec::PlanarPower { k };
        spec.validate()?;
        Ok(spec)
    }

    pub fn planar_shear(kappa: f64) -> Result<Self> {
        let spec = MapSpec::PlanarShear { kappa };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MapSpec::Radial { profile, n } => profile.validate(Some(n.get())),
            MapSpec::Twist { m, n } => {
                if *m == 0 {
                    return Err(Error::param("m", "must be a positive integer"));
                }
                if n.get() < 3 {
                    return Err(Error::InvalidDimension(n.get(), 3));
                }
                Ok(())
            }
            MapSpec::PlanarPower { k } => {
                if *k == 0 {
                    return Err(Error::param("k", "must be a positive integer"));
                }
                Ok(())
            }
            MapSpec::PlanarShear { kappa } => {
                if !(*kappa >= 0.0 && *kappa < 1.0) {
                    return Err(Error::param("kappa", format!("must lie in [0, 1), got {kappa}")));
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            MapSpec::Radial { n, .. } | MapSpec::Twist { n, .. } => n.get(),
            MapSpec::PlanarPower { .. } | MapSpec::PlanarShear { .. } => 2,
        }
    }

    pub fn profile(&self) -> Option<&Profile> {
        match self {
            MapSpec::Radial { profile, .. } => Some(profile),
            _ => None,
        }
    }

    pub fn metadata(&self) -> MapMetadata {
        let multiplicity = match self {
            MapSpec::Radial { .. } | MapSpec::PlanarShear { .. } => 1,
            MapSpec::Twist { m, .. } => *m,
            MapSpec::PlanarPower { k } => *k,
        };
        // Every built-in map is bounded on the unit ball, open, discrete and
        // closed there, and sends the boundary sphere onto a sphere that the
        // puncture's limit set stays inside of.
        MapMetadata {
            bounded: true,
            open_discrete_closed: true,
            limit_sets_disjoint: true,
            multiplicity,
        }
    }

    /// `K_I` when it does not depend on the point.
    pub fn constant_inner_dilatation(&self) -> Option<f64> {
        match self {
            MapSpec::Radial { .. } => None,
            MapSpec::Twist { m, .. } => Some(*m as f64),
            MapSpec::PlanarPower { .. } => Some(1.0),
            MapSpec::PlanarShear { kappa } => Some((1.0 + kappa) / (1.0 - kappa)),
        }
    }

    /// `ln K_I` on the sphere of radius `e^{-u}`. For non-radial maps with
    /// constant dilatation this is that constant.
    pub fn ln_radial_inner_dilatation_at_depth(&self, u: f64) -> f64 {
        match self {
            MapSpec::Radial { profile, n } => {
                ln_inner_dilatation_from_ratio(profile.ln_stretch_ratio_at_depth(u, n.get()), n.get())
            }
            _ => self.constant_inner_dilatation().unwrap_or(1.0).ln(),
        }
    }

    pub fn radial_inner_dilatation(&self, r: f64) -> f64 {
        self.ln_radial_inner_dilatation_at_depth(-r.ln()).exp()
    }

    pub fn radial_max_depth(&self) -> f64 {
        match self {
            MapSpec::Radial { profile, .. } => profile.max_depth(),
            _ => f64::INFINITY,
        }
    }

    /// Growth of `K_I` at the puncture, when known in closed form.
    pub fn inner_dilatation_growth(&self) -> Option<PowerLogGrowth> {
        match self {
            MapSpec::Radial { profile, n } => profile.inner_dilatation_growth(n.get()),
            _ => Some(PowerLogGrowth::BOUNDED),
        }
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let r = norm(x);
        if r == 0.0 {
            return Err(Error::AtPuncture);
        }
        if !(r < 1.0) {
            return Err(Error::OutsideDomain(r));
        }
        Ok(r)
    }

    /// `f(x)` for `0 < |x| < 1`.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        Ok(self.eval_unchecked(x))
    }

    /// The defining formula without domain checks; finite differences step
    /// slightly past the unit sphere.
    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> Vec<f64> {
        match self {
            MapSpec::Radial { profile, .. } => {
                let r = norm(x);
                let s = profile.value(r) / r;
                x.iter().map(|v| v * s).collect()
            }
            MapSpec::Twist { m, .. } => {
                let rho = x[0].hypot(x[1]);
                let phi = x[1].atan2(x[0]) * *m as f64;
                let mut out = x.to_vec();
                out[0] = rho * phi.cos();
                out[1] = rho * phi.sin();
                out
            }
            MapSpec::PlanarPower { k } => {
                let w = Complex64::new(x[0], x[1]).powu(*k);
                vec![w.re, w.im]
            }
            MapSpec::PlanarShear { kappa } => vec![x[0] * (1.0 + kappa), x[1] * (1.0 - kappa)],
        }
    }

    /// Limit set of a radial map at the puncture.
    pub fn limit_set_at_zero(&self) -> Result<LimitSetDescription> {
        let (profile, n) = match self {
            MapSpec::Radial { profile, n } => (profile, n.get()),
            _ => {
                return Err(Error::Unsupported(
                    "limit sets are computed for radial maps only".into(),
                ))
            }
        };
        let limit = profile.limit_at_zero(LIMIT_TOLERANCE)?;
        let center = vec![0.0; n];
        Ok(if limit.value <= LIMIT_TOLERANCE {
            LimitSetDescription::SinglePoint { point: center }
        } else {
            LimitSetDescription::SphereSet {
                center,
                radius: limit.value,
            }
        })
    }

    /// Whether the map extends continuously to the puncture.
    pub fn extendable_ground_truth(&self) -> Result<bool> {
        Ok(matches!(
            self.limit_set_at_zero()?,
            LimitSetDescription::SinglePoint { .. }
        ))
    }
}

/// Free-function form of [`MapSpec::eval`].
pub fn eval_map(spec: &MapSpec, x: &[f64]) -> Result<Vec<f64>> {
    spec.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::QField;
    use approx::assert_relative_eq;

    fn power_shift(alpha: f64, n: usize) -> MapSpec {
        MapSpec::radial(Profile::power_shift(alpha).unwrap(), n).unwrap()
    }

    #[test]
    fn power_shift_evaluation() {
        let f = power_shift(0.5, 3);
        let y = f.eval(&[0.25, 0.0, 0.0]).unwrap();
        assert_relative_eq!(y[0], 1.5);
        assert_eq!(&y[1..], &[0.0, 0.0]);
        assert_relative_eq!(f.radial_inner_dilatation(0.25), 36.0, max_relative = 1e-13);
    }

    #[test]
    fn twist_fixes_zero_angle_ray() {
        let f = MapSpec::twist(2, 3).unwrap();
        assert_eq!(f.eval(&[0.3, 0.0, 0.4]).unwrap(), vec![0.3, 0.0, 0.4]);
        assert!(MapSpec::twist(2, 2).is_err());
    }

    #[test]
    fn planar_power_squares() {
        let f = MapSpec::planar_power(2).unwrap();
        let y = f.eval(&[0.0, 0.9]).unwrap();
        assert_relative_eq!(y[0], -0.81, max_relative = 1e-15);
        assert!(y[1].abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let f = power_shift(0.5, 3);
        assert_eq!(f.eval(&[0.0; 3]), Err(Error::AtPuncture));
        assert!(matches!(f.eval(&[1.0, 0.0, 0.0]), Err(Error::OutsideDomain(_))));
        assert!(matches!(f.eval(&[0.1, 0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn limit_sets_and_ground_truth() {
        let f = power_shift(0.5, 3);
        match f.limit_set_at_zero().unwrap() {
            LimitSetDescription::SphereSet { center, radius } => {
                assert_eq!(center, vec![0.0; 3]);
                assert_relative_eq!(radius, 1.0, max_relative = 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert!(!f.extendable_ground_truth().unwrap());

        let id = MapSpec::radial(Profile::exp_integral(QField::constant(1.0).unwrap(), 3).unwrap(), 3).unwrap();
        assert!(matches!(
            id.limit_set_at_zero().unwrap(),
            LimitSetDescription::SinglePoint { .. }
        ));
        assert!(id.extendable_ground_truth().unwrap());

        let tab = MapSpec::radial(
            Profile::tabulated(vec![1e-4, 0.5, 1.0], vec![0.5, 0.7, 1.0]).unwrap(),
            3,
        )
        .unwrap();
        assert_eq!(
            tab.limit_set_at_zero().unwrap(),
            LimitSetDescription::SphereSet {
                center: vec![0.0; 3],
                radius: 0.5
            }
        );

        assert!(matches!(
            MapSpec::planar_power(2).unwrap().limit_set_at_zero(),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn metadata_multiplicity() {
        assert_eq!(MapSpec::twist(3, 4).unwrap().metadata().multiplicity, 3);
        assert_eq!(MapSpec::planar_power(5).unwrap().metadata().multiplicity, 5);
        assert_eq!(power_shift(0.3, 3).metadata().multiplicity, 1);
    }

    #[test]
    fn serde_round_trip() {
        let f = power_shift(0.5, 3);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"kind":"radial","profile":{"kind":"power_shift","alpha":0.5},"n":3}"#
        );
        assert_eq!(serde_json::from_str::<MapSpec>(&s).unwrap(), f);
        assert!(serde_json::from_str::<MapSpec>(
            r#"{"kind":"radial","profile":{"kind":"power_shift","alpha":0.5},"n":1}"#
        )
        .is_err());
    }
}
