/// A positive function of the radius, possibly evaluable deep into the
/// puncture in logarithmic coordinates.
///
/// "Depth" is `u = ln(1/r)`. Implementations that know a closed form override
/// [`RadialFunction::ln_value_at_depth`] so that depths far beyond the
/// smallest representable radius stay meaningful.
pub trait RadialFunction: Send + Sync {
    fn value(&self, r: f64) -> f64;

    /// `ln f(e^{-depth})`.
    fn ln_value_at_depth(&self, depth: f64) -> f64 {
        self.value((-depth).exp()).ln()
    }

    /// Largest depth at which `ln_value_at_depth` is meaningful.
    fn max_depth(&self) -> f64 {
        MAX_DIRECT_DEPTH
    }
}

/// Depth limit for functions evaluated at the radius itself.
pub const MAX_DIRECT_DEPTH: f64 = 700.0;

/// Adapts a closure to [`RadialFunction`].
pub struct RadialFn<F>(pub F);

impl<F: Fn(f64) -> f64 + Send + Sync> RadialFunction for RadialFn<F> {
    fn value(&self, r: f64) -> f64 {
        (self.0)(r)
    }
}

impl<T: RadialFunction + ?Sized> RadialFunction for &T {
    fn value(&self, r: f64) -> f64 {
        (**self).value(r)
    }
    fn ln_value_at_depth(&self, depth: f64) -> f64 {
        (**self).ln_value_at_depth(depth)
    }
    fn max_depth(&self) -> f64 {
        (**self).max_depth()
    }
}

impl<T: RadialFunction + ?Sized> RadialFunction for Box<T> {
    fn value(&self, r: f64) -> f64 {
        (**self).value(r)
    }
    fn ln_value_at_depth(&self, depth: f64) -> f64 {
        (**self).ln_value_at_depth(depth)
    }
    fn max_depth(&self) -> f64 {
        (**self).max_depth()
    }
}

impl<T: RadialFunction + ?Sized> RadialFunction for std::sync::Arc<T> {
    fn value(&self, r: f64) -> f64 {
        (**self).value(r)
    }
    fn ln_value_at_depth(&self, depth: f64) -> f64 {
        (**self).ln_value_at_depth(depth)
    }
    fn max_depth(&self) -> f64 {
        (**self).max_depth()
    }
}

/// Leading behaviour `Q(r) ~ C r^{-gamma} (ln 1/r)^s` as `r -> 0`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PowerLogGrowth {
    pub gamma: f64,
    pub s: f64,
}

impl PowerLogGrowth {
    pub const BOUNDED: PowerLogGrowth = PowerLogGrowth { gamma: 0.0, s: 0.0 };

    pub fn scaled(self, e: f64) -> Self {
        Self {
            gamma: self.gamma * e,
            s: self.s * e,
        }
    }
}

/// `ln(e + e^u)` without overflow.
#[inline]
pub(crate) fn ln_e_plus_exp(u: f64) -> f64 {
    if u > 1.0 {
        u + (1.0 + (1.0 - u).exp()).ln()
    } else {
        1.0 + (1.0 + (u - 1.0).exp()).ln()
    }
}
