use serde::{Deserialize, Serialize};

use super::radial::{ln_e_plus_exp, PowerLogGrowth, RadialFunction, MAX_DIRECT_DEPTH};
use crate::error::{Error, Result};
use crate::geometry::norm;
use crate::maps::{MapSpec, RadialTable};

/// Which power of the inner dilatation a map-derived field uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DilatationExponent {
    /// `Q = N K_I`
    One,
    /// `Q = N K_I^{1/(n-1)}`
    OneOverNMinusOne,
}

impl DilatationExponent {
    pub fn value(self, n: usize) -> f64 {
        match self {
            DilatationExponent::One => 1.0,
            DilatationExponent::OneOverNMinusOne => 1.0 / (n as f64 - 1.0),
        }
    }
}

/// Scalar majorant field `Q(x)` on the punctured ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum QField {
    /// `c |x|^{-gamma} (ln(e + 1/|x|))^s`
    PowerLog { c: f64, gamma: f64, s: f64 },
    /// `N K_I(x, f)^e` for a map `f`.
    FromMap {
        map: Box<MapSpec>,
        exponent: DilatationExponent,
        #[serde(default = "one")]
        multiplicity: u32,
    },
    /// Radial table in `|x|`, held constant outside the knots.
    Tabulated { table: RadialTable },
    /// `(shift + ln(1/|x|))^power` on the unit ball.
    LogPower { shift: f64, power: f64 },
    /// `x_axis^2 / |x|^2`, an anisotropic bounded fixture.
    AxisRatio { axis: usize },
}

fn one() -> u32 {
    1
}

impl QField {
    pub fn power_log(c: f64, gamma: f64, s: f64) -> Result<Self> {
        let q = QField::PowerLog { c, gamma, s };
        q.validate()?;
        Ok(q)
    }

    /// `ln(1/|x|)`.
    pub fn log_inverse() -> Self {
        QField::LogPower { shift: 0.0, power: 1.0 }
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::power_log(c, 0.0, 0.0)
    }

    pub fn from_map(map: MapSpec, exponent: DilatationExponent) -> Result<Self> {
        let multiplicity = map.metadata().multiplicity;
        let q = QField::FromMap {
            map: Box::new(map),
            exponent,
            multiplicity,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            QField::PowerLog { c, gamma, s } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(Error::param("c", "must be positive"));
                }
                if !gamma.is_finite() || !s.is_finite() {
                    return Err(Error::param("gamma", "exponents must be finite"));
                }
                Ok(())
            }
            QField::FromMap { map, multiplicity, .. } => {
                if *multiplicity == 0 {
                    return Err(Error::param("multiplicity", "must be positive"));
                }
                map.validate()
            }
            QField::LogPower { shift, power } => {
                if !(*shift >= 0.0 && shift.is_finite() && power.is_finite()) {
                    return Err(Error::param("shift", "must be finite and nonnegative"));
                }
                Ok(())
            }
            QField::Tabulated { .. } => Ok(()),
            QField::AxisRatio { .. } => Ok(()),
        }
    }

    /// PowerLog fields with negative `gamma` dip below 1 near the puncture,
    /// where majorants of an inner dilatation cannot live.
    pub fn below_one_flag(&self) -> bool {
        matches!(self, QField::PowerLog { gamma, .. } if *gamma < 0.0)
    }

    /// Dimension fixed by the field itself, if any.
    pub fn dim_hint(&self) -> Option<usize> {
        match self {
            QField::FromMap { map, .. } => Some(map.dim()),
            _ => None,
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if let Some(d) = self.dim_hint() {
            if d != n {
                return Err(Error::DimensionMismatch { expected: d, got: n });
            }
        }
        if let QField::AxisRatio { axis } = self {
            if *axis >= n {
                return Err(Error::param("axis", format!("axis {axis} out of range for n = {n}")));
            }
        }
        Ok(())
    }

    /// Radius of the ball (about the origin) the field lives in, if bounded.
    pub fn domain_radius(&self) -> Option<f64> {
        match self {
            QField::FromMap { .. } | QField::LogPower { .. } => Some(1.0),
            _ => None,
        }
    }

    /// True when `Q(x)` depends on `|x|` only.
    pub fn is_radial(&self) -> bool {
        !matches!(self, QField::AxisRatio { .. })
    }

    /// The value when the field is constant on its domain.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            QField::PowerLog { c, gamma, s } if *gamma == 0.0 && *s == 0.0 => Some(*c),
            QField::FromMap {
                map,
                exponent,
                multiplicity,
            } => map
                .constant_inner_dilatation()
                .map(|k| *multiplicity as f64 * k.powf(exponent.value(map.dim()))),
            _ => None,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            QField::AxisRatio { axis } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                x[*axis] * x[*axis] / r2
            }
            _ => self.radial_value(norm(x)),
        }
    }

    /// Value of a radial field at radius `r` (NaN for non-radial fields).
    pub fn radial_value(&self, r: f64) -> f64 {
        match self {
            QField::PowerLog { c, gamma, s } => c * r.powf(-gamma) * (std::f64::consts::E + 1.0 / r).ln().powf(*s),
            QField::FromMap {
                map,
                exponent,
                multiplicity,
            } => {
                let k = map.radial_inner_dilatation(r);
                *multiplicity as f64 * k.powf(exponent.value(map.dim()))
            }
            QField::Tabulated { table } => table.value(r),
            QField::LogPower { shift, power } => (shift - r.ln()).powf(*power),
            QField::AxisRatio { .. } => f64::NAN,
        }
    }

    fn ln_radial_at_depth(&self, u: f64) -> f64 {
        match self {
            QField::PowerLog { c, gamma, s } => c.ln() + gamma * u + s * ln_e_plus_exp(u).ln(),
            QField::FromMap {
                map,
                exponent,
                multiplicity,
            } => (*multiplicity as f64).ln() + exponent.value(map.dim()) * map.ln_radial_inner_dilatation_at_depth(u),
            QField::LogPower { shift, power } => power * (shift + u).ln(),
            _ => self.radial_value((-u).exp()).ln(),
        }
    }

    fn radial_max_depth(&self) -> f64 {
        match self {
            QField::PowerLog { .. } | QField::LogPower { .. } => f64::INFINITY,
            QField::FromMap { map, .. } => map.radial_max_depth(),
            _ => MAX_DIRECT_DEPTH,
        }
    }

    /// View of a radial field as a [`RadialFunction`].
    pub fn radial(&self) -> Result<RadialField<'_>> {
        if !self.is_radial() {
            return Err(Error::Unsupported("field is not radial".into()));
        }
        Ok(RadialField(self))
    }

    /// Exact leading behaviour near the puncture for radial fields with a
    /// closed form.
    pub fn asymptotics(&self) -> Option<PowerLogGrowth> {
        match self {
            QField::PowerLog { gamma, s, .. } => Some(PowerLogGrowth { gamma: *gamma, s: *s }),
            QField::LogPower { power, .. } => Some(PowerLogGrowth { gamma: 0.0, s: *power }),
            QField::FromMap { map, exponent, .. } => map
                .inner_dilatation_growth()
                .map(|g| g.scaled(exponent.value(map.dim()))),
            QField::Tabulated { .. } | QField::AxisRatio { .. } => None,
        }
    }

    /// An upper growth bound valid in every direction (bounded fixtures
    /// included).
    pub fn growth_bound(&self) -> Option<PowerLogGrowth> {
        match self {
            QField::AxisRatio { .. } => Some(PowerLogGrowth::BOUNDED),
            _ => self.asymptotics(),
        }
    }
}

/// A radial [`QField`] seen as a function of the radius.
#[derive(Debug, Clone, Copy)]
pub struct RadialField<'a>(&'a QField);

impl RadialField<'_> {
    pub fn field(&self) -> &QField {
        self.0
    }
}

impl RadialFunction for RadialField<'_> {
    fn value(&self, r: f64) -> f64 {
        self.0.radial_value(r)
    }
    fn ln_value_at_depth(&self, depth: f64) -> f64 {
        self.0.ln_radial_at_depth(depth)
    }
    fn max_depth(&self) -> f64 {
        self.0.radial_max_depth()
    }
}

/// Owned radial view, for storing inside other structures.
#[derive(Debug, Clone)]
pub struct OwnedRadialField(pub QField);

impl RadialFunction for OwnedRadialField {
    fn value(&self, r: f64) -> f64 {
        self.0.radial_value(r)
    }
    fn ln_value_at_depth(&self, depth: f64) -> f64 {
        self.0.ln_radial_at_depth(depth)
    }
    fn max_depth(&self) -> f64 {
        self.0.radial_max_depth()
    }
}
