//! Majorant fields `Q(x)`, their spherical means and norms, and the finite
//! mean oscillation estimator.

mod field;
mod fmo;
mod means;
mod radial;

pub use field::{DilatationExponent, OwnedRadialField, QField, RadialField};
pub use fmo::{fmo_classify, fmo_oscillation, FmoOptions, FmoReport, FmoTracePoint, FmoVerdict};
pub use means::{
    ball_lp_norm, sphere_lnorm, spherical_mean, spherical_mean_table, truncated_ball_lp_integral, LpNorm,
    SphericalMeanTable,
};
pub use radial::{PowerLogGrowth, RadialFn, RadialFunction, MAX_DIRECT_DEPTH};
