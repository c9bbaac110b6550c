use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

// Beyond this many turning points the sine variation falls back to its Lipschitz bound.
const MAX_TURNING_POINTS: f64 = 1e6;

/// Continuous closed-form pieces with analytically known Lipschitz constant,
/// variation and sup norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Formula {
    /// `intercept + slope * t`
    Affine { slope: f64, intercept: f64 },
    /// `coef * (t - shift)^exponent`, defined for `t >= shift`
    Power { coef: f64, exponent: f64, shift: f64 },
    /// `amp * sin(freq * t + phase)`
    Sin { amp: f64, freq: f64, phase: f64 },
}

impl Formula {
    pub fn affine(slope: f64, intercept: f64) -> Self {
        Formula::Affine { slope, intercept }
    }

    pub fn power(coef: f64, exponent: f64, shift: f64) -> Self {
        Formula::Power { coef, exponent, shift }
    }

    pub fn sin(amp: f64, freq: f64, phase: f64) -> Self {
        Formula::Sin { amp, freq, phase }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Formula::Affine { .. } => "affine",
            Formula::Power { .. } => "power",
            Formula::Sin { .. } => "sin",
        }
    }

    pub fn params(&self) -> [f64; 3] {
        match *self {
            Formula::Affine { slope, intercept } => [slope, intercept, 0.0],
            Formula::Power { coef, exponent, shift } => [coef, exponent, shift],
            Formula::Sin { amp, freq, phase } => [amp, freq, phase],
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Formula::Affine { slope, intercept } => intercept + slope * t,
            Formula::Power { coef, exponent, shift } => coef * (t - shift).max(0.0).powf(exponent),
            Formula::Sin { amp, freq, phase } => amp * (freq * t + phase).sin(),
        }
    }

    /// Checks that the formula is defined and finite on `[lo, hi]`.
    pub fn validate_on(&self, lo: f64, hi: f64) -> Result<()> {
        if self.params().iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidFunction(format!("{} parameters must be finite", self.name())));
        }
        if let Formula::Power { exponent, shift, .. } = *self {
            if exponent < 0.0 {
                return Err(Error::InvalidFunction("power exponent must be nonnegative".into()));
            }
            if shift > lo {
                return Err(Error::InvalidFunction(format!(
                    "power shift {shift} exceeds the piece start {lo}"
                )));
            }
        }
        if !(self.eval(lo).is_finite() && self.eval(hi).is_finite()) {
            return Err(Error::InvalidFunction(format!("{} is not finite on [{lo}, {hi}]", self.name())));
        }
        Ok(())
    }

    /// Lipschitz constant on `[lo, hi]`, `None` when the formula is not Lipschitz there.
    pub fn lipschitz(&self, lo: f64, hi: f64) -> Option<f64> {
        match *self {
            Formula::Affine { slope, .. } => Some(slope.abs()),
            Formula::Power { coef, exponent, shift } => {
                if exponent == 0.0 || coef == 0.0 {
                    Some(0.0)
                } else if exponent >= 1.0 {
                    Some(coef.abs() * exponent * (hi - shift).powf(exponent - 1.0))
                } else if shift < lo {
                    // derivative is largest at the left end
                    Some(coef.abs() * exponent * (lo - shift).powf(exponent - 1.0))
                } else {
                    None
                }
            }
            Formula::Sin { amp, freq, .. } => Some((amp * freq).abs()),
        }
    }

    // turning points of the sine strictly inside (lo, hi), or None if too many
    fn turning_points(&self, lo: f64, hi: f64) -> Option<Vec<f64>> {
        let Formula::Sin { amp, freq, phase } = *self else {
            return Some(Vec::new());
        };
        if freq == 0.0 || amp == 0.0 {
            return Some(Vec::new());
        }
        let (t0, t1) = (freq * lo + phase, freq * hi + phase);
        let (lo_th, hi_th) = (t0.min(t1), t0.max(t1));
        let k_min = ((lo_th - FRAC_PI_2) / PI).ceil();
        let k_max = ((hi_th - FRAC_PI_2) / PI).floor();
        if k_max - k_min > MAX_TURNING_POINTS {
            return None;
        }
        let mut pts: Vec<f64> = (0..=((k_max - k_min).max(-1.0) as i64))
            .map(|i| (FRAC_PI_2 + (k_min + i as f64) * PI - phase) / freq)
            .filter(|&t| lo < t && t < hi)
            .collect();
        pts.sort_by(f64::total_cmp);
        Some(pts)
    }

    /// Total variation on `[lo, hi]` (an upper bound for very oscillatory sines).
    pub fn variation(&self, lo: f64, hi: f64) -> f64 {
        match self.turning_points(lo, hi) {
            Some(pts) => {
                let mut prev = self.eval(lo);
                let mut var = 0.0;
                for t in pts.into_iter().chain(std::iter::once(hi)) {
                    let v = self.eval(t);
                    var += (v - prev).abs();
                    prev = v;
                }
                var
            }
            None => self.lipschitz(lo, hi).unwrap_or(f64::INFINITY) * (hi - lo),
        }
    }

    /// `sup |formula|` on `[lo, hi]`.
    pub fn sup_abs(&self, lo: f64, hi: f64) -> f64 {
        let ends = self.eval(lo).abs().max(self.eval(hi).abs());
        match *self {
            Formula::Sin { amp, .. } => match self.turning_points(lo, hi) {
                Some(pts) if pts.is_empty() => ends,
                _ => amp.abs(),
            },
            _ => ends,
        }
    }

    pub fn is_monotone_on(&self, lo: f64, hi: f64) -> bool {
        match self {
            Formula::Affine { .. } | Formula::Power { .. } => true,
            Formula::Sin { .. } => matches!(self.turning_points(lo, hi), Some(p) if p.is_empty()),
        }
    }
}
