//! The two approximating sums and their a-priori estimates.

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::partition::Partition;
use crate::regulated::{left_limit_at, right_limit_at, same_interval, Regulated};

/// Slack allowed for accumulated rounding when checking the estimates.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumKind {
    /// `sum f(xi_j) [g(alpha_j) - g(alpha_{j-1})]`
    S,
    /// The jump-aware sum defining the Young integral.
    SY,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumValue {
    pub value: f64,
    pub kind: SumKind,
    pub partition_size: usize,
}

fn check_partition(f: &dyn Regulated, g: &dyn Regulated, p: &Partition) -> Result<()> {
    let iv = same_interval(f, g)?;
    if p.division().interval() != iv {
        return Err(Error::IntervalMismatch);
    }
    Ok(())
}

pub fn sum_s(f: &dyn Regulated, g: &dyn Regulated, p: &Partition) -> Result<SumValue> {
    check_partition(f, g, p)?;
    let mut acc = CompensatedSum::new();
    let mut g_prev = g.eval(p.nodes()[0])?;
    for (_, tag, hi) in p.cells() {
        let g_hi = g.eval(hi)?;
        acc.add(f.eval(tag)? * (g_hi - g_prev));
        g_prev = g_hi;
    }
    Ok(SumValue { value: acc.value(), kind: SumKind::S, partition_size: p.nu() })
}

pub fn sum_sy(f: &dyn Regulated, g: &dyn Regulated, p: &Partition) -> Result<SumValue> {
    check_partition(f, g, p)?;
    let mut acc = CompensatedSum::new();
    for (lo, tag, hi) in p.cells() {
        let g_lo_plus = right_limit_at(g, lo)?;
        let g_hi_minus = left_limit_at(g, hi)?;
        acc.add(f.eval(lo)? * (g_lo_plus - g.eval(lo)?));
        acc.add(f.eval(tag)? * (g_hi_minus - g_lo_plus));
        acc.add(f.eval(hi)? * (g.eval(hi)? - g_hi_minus));
    }
    Ok(SumValue { value: acc.value(), kind: SumKind::SY, partition_size: p.nu() })
}

/// One inequality `|lhs| <= rhs`; `rhs` is `None` when a needed variation is unknown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: Option<f64>,
}

impl BoundCheck {
    pub fn new(lhs: f64, rhs: Option<f64>) -> Self {
        Self { lhs, rhs }
    }

    /// `rhs - |lhs|`.
    pub fn slack(&self) -> Option<f64> {
        self.rhs.map(|r| r - self.lhs.abs())
    }

    /// `None` when skipped.
    pub fn holds(&self) -> Option<bool> {
        self.slack().map(|s| s >= -BOUND_SLACK)
    }
}

/// The two estimate right-hand sides for a pair: `||f|| var g` and
/// `(|f(a)| + |f(b)| + var f) ||g||`.
pub fn estimate_rhs(f: &dyn Regulated, g: &dyn Regulated) -> Result<(Option<f64>, Option<f64>)> {
    let iv = same_interval(f, g)?;
    let first = g.variation_bound().map(|v| f.sup_bound() * v);
    let second = match f.variation_bound() {
        Some(v) => Some((f.eval(iv.a())?.abs() + f.eval(iv.b())?.abs() + v) * g.sup_bound()),
        None => None,
    };
    Ok((first, second))
}

/// Verdicts of the four sum estimates for one partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumBoundReport {
    pub s: SumValue,
    pub sy: SumValue,
    /// `|S| <= ||f|| var g`
    pub s_by_variation_of_g: BoundCheck,
    /// `|S| <= (|f(a)| + |f(b)| + var f) ||g||`
    pub s_by_variation_of_f: BoundCheck,
    /// `|S_Y| <= ||f|| var g`
    pub sy_by_variation_of_g: BoundCheck,
    /// `|S_Y| <= (|f(a)| + |f(b)| + var f) ||g||`
    pub sy_by_variation_of_f: BoundCheck,
}

impl SumBoundReport {
    pub fn checks(&self) -> [(&'static str, BoundCheck); 4] {
        [
            ("sum1_s", self.s_by_variation_of_g),
            ("sum1_sy", self.sy_by_variation_of_g),
            ("sum2_s", self.s_by_variation_of_f),
            ("sum2_sy", self.sy_by_variation_of_f),
        ]
    }

    /// False if any evaluated bound fails.
    pub fn all_hold(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.holds() != Some(false))
    }
}

pub fn check_sum_bounds(f: &dyn Regulated, g: &dyn Regulated, p: &Partition) -> Result<SumBoundReport> {
    let s = sum_s(f, g, p)?;
    let sy = sum_sy(f, g, p)?;
    let (by_g, by_f) = estimate_rhs(f, g)?;
    Ok(SumBoundReport {
        s,
        sy,
        s_by_variation_of_g: BoundCheck::new(s.value, by_g),
        s_by_variation_of_f: BoundCheck::new(s.value, by_f),
        sy_by_variation_of_g: BoundCheck::new(sy.value, by_g),
        sy_by_variation_of_f: BoundCheck::new(sy.value, by_f),
    })
}
