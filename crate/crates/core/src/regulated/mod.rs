//! Regulated functions on a compact interval.
//!
//! A regulated function has finite one-sided limits everywhere and is the
//! uniform limit of finite step functions. Every implementor of [`Regulated`]
//! must be able to produce a step approximant together with a *certified*
//! bound on the uniform error; black-box evaluables are not accepted.

mod families;
mod formula;
mod step;

pub use families::{Jump, LipschitzPieces, MonotoneJumps};
pub use formula::Formula;
pub use step::{Decomposition, StepFunction};

use std::fmt;

use crate::error::{Error, Result};

/// Compact interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(Self { a, b })
    }

    /// The unit interval `[0, 1]`.
    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    #[inline]
    pub fn contains(&self, t: f64) -> bool {
        self.a <= t && t <= self.b
    }

    pub fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::Domain { t, a: self.a, b: self.b })
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// A step function together with a certified bound on its uniform distance
/// from the function it approximates.
#[derive(Debug, Clone, PartialEq)]
pub struct Approximant {
    pub step: StepFunction,
    pub error: f64,
}

/// A function regulated on its interval with certified step approximation.
pub trait Regulated: fmt::Debug + Send + Sync {
    fn interval(&self) -> Interval;

    /// Pointwise value `f(t)`.
    fn eval(&self, t: f64) -> Result<f64>;

    /// `f(t-)`, or `None` at the left endpoint.
    fn left_limit(&self, t: f64) -> Result<Option<f64>>;

    /// `f(t+)`, or `None` at the right endpoint.
    fn right_limit(&self, t: f64) -> Result<Option<f64>>;

    /// Step function `s` with `sup |f - s| <= error <= eps`.
    fn approximate(&self, eps: f64) -> Result<Approximant>;

    /// Total variation on the whole interval, or an upper bound for it.
    /// `None` means the variation is not known.
    fn variation_bound(&self) -> Option<f64>;

    /// Certified upper bound on the sup norm.
    fn sup_bound(&self) -> f64;

    /// Finite superset of the points where the function may be discontinuous.
    fn jump_points(&self) -> Vec<f64>;

    fn as_step(&self) -> Option<&StepFunction> {
        None
    }
}

/// `f(t-)`, failing when the limit does not exist (at the left endpoint).
pub fn left_limit_at(f: &dyn Regulated, t: f64) -> Result<f64> {
    f.left_limit(t)?.ok_or_else(|| {
        Error::Unsupported(format!("left limit at the left endpoint {t}"))
    })
}

/// `f(t+)`, failing at the right endpoint.
pub fn right_limit_at(f: &dyn Regulated, t: f64) -> Result<f64> {
    f.right_limit(t)?.ok_or_else(|| {
        Error::Unsupported(format!("right limit at the right endpoint {t}"))
    })
}

/// Left jump `f(t) - f(t-)` for `t` in `(a, b]`.
pub fn left_jump(f: &dyn Regulated, t: f64) -> Result<f64> {
    Ok(f.eval(t)? - left_limit_at(f, t)?)
}

/// Right jump `f(t+) - f(t)` for `t` in `[a, b)`.
pub fn right_jump(f: &dyn Regulated, t: f64) -> Result<f64> {
    Ok(right_limit_at(f, t)? - f.eval(t)?)
}

/// BV norm `|f(a)| + var f`.
pub fn bv_norm(f: &dyn Regulated) -> Result<f64> {
    let var = f.variation_bound().ok_or_else(|| {
        Error::Unsupported("BV norm of a function with unknown variation".into())
    })?;
    Ok(f.eval(f.interval().a())?.abs() + var)
}

/// `|f(a)| + |f(b)| + var f`, the integrand factor of the second Stieltjes estimate.
pub fn endpoint_variation_norm(f: &dyn Regulated) -> Result<f64> {
    let iv = f.interval();
    let var = f.variation_bound().ok_or_else(|| {
        Error::Unsupported("variation of the integrand is unknown".into())
    })?;
    Ok(f.eval(iv.a())?.abs() + f.eval(iv.b())?.abs() + var)
}

pub(crate) fn same_interval(f: &dyn Regulated, g: &dyn Regulated) -> Result<Interval> {
    let iv = f.interval();
    if iv != g.interval() {
        return Err(Error::IntervalMismatch);
    }
    Ok(iv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_interval_rejected() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn bv_norm_conventions() {
        let iv = Interval::unit();
        let ind = StepFunction::new(iv, vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 1.0], vec![0.0, 1.0])
            .unwrap();
        assert_eq!(bv_norm(&ind).unwrap(), 1.0);
        assert_eq!(bv_norm(&StepFunction::constant(iv, 7.0)).unwrap(), 7.0);

        let id = LipschitzPieces::single(iv, Formula::affine(1.0, 0.0)).unwrap();
        assert_eq!(bv_norm(&id).unwrap(), 1.0);
        assert!(matches!(bv_norm(&id.forget_variation()), Err(Error::Unsupported(_))));
    }
}
