//! Closed-form integration when one argument is a step function, limit-based
//! integration with a certified error bound otherwise, and the
//! integration-by-parts transform linking the three integrals.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::regulated::{
    endpoint_variation_norm, left_jump, left_limit_at, right_limit_at, same_interval, Interval, Regulated,
    StepFunction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntegralKind {
    /// Kurzweil-Stieltjes (gauge) integral.
    K,
    /// Young integral.
    Y,
    /// Dushnik integral.
    D,
}

impl IntegralKind {
    pub const ALL: [IntegralKind; 3] = [IntegralKind::K, IntegralKind::Y, IntegralKind::D];
}

impl fmt::Display for IntegralKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntegralKind::K => "K",
            IntegralKind::Y => "Y",
            IntegralKind::D => "D",
        })
    }
}

impl FromStr for IntegralKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "K" => Ok(IntegralKind::K),
            "Y" => Ok(IntegralKind::Y),
            "D" => Ok(IntegralKind::D),
            other => Err(format!("unknown integral kind '{other}'")),
        }
    }
}

/// The five building blocks of a step function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    /// `1`
    One,
    /// `chi_(a, b]`
    OpenAtA,
    /// `chi_(tau, b]`, `a < tau < b`
    OpenAt(f64),
    /// `chi_[tau, b]`, `a < tau < b`
    ClosedAt(f64),
    /// `chi_[b]`
    PointB,
}

impl Elementary {
    pub fn validate(&self, interval: Interval) -> Result<()> {
        match *self {
            Elementary::OpenAt(tau) | Elementary::ClosedAt(tau) if !(interval.a() < tau && tau < interval.b()) => {
                Err(Error::Precondition(format!("tau = {tau} must lie strictly inside {interval}")))
            }
            _ => Ok(()),
        }
    }

    /// The elementary function as a [`StepFunction`].
    pub fn to_step(&self, interval: Interval) -> Result<StepFunction> {
        self.validate(interval)?;
        match *self {
            Elementary::One => Ok(StepFunction::constant(interval, 1.0)),
            Elementary::OpenAtA => StepFunction::indicator_open_from(interval, interval.a()),
            Elementary::OpenAt(t) => StepFunction::indicator_open_from(interval, t),
            Elementary::ClosedAt(t) => StepFunction::indicator_closed_from(interval, t),
            Elementary::PointB => StepFunction::indicator_point(interval, interval.b()),
        }
    }
}

/// How an [`IntegralResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    ClosedForm,
    /// The integrand was replaced by a step approximant.
    ApproximateIntegrand,
    /// The integrator was replaced by a step approximant.
    ApproximateIntegrator,
    ByParts,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub route: Route,
    /// Node count of the step approximant used, 0 on closed-form paths.
    pub approximant_nodes: usize,
    /// Certified uniform error of the approximant.
    pub approximant_error: f64,
}

impl Diagnostics {
    fn closed_form() -> Self {
        Self { route: Route::ClosedForm, approximant_nodes: 0, approximant_error: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub kind: IntegralKind,
    /// Certified bound on `|value - exact|`.
    pub error_bound: f64,
    pub diagnostics: Diagnostics,
}

impl IntegralResult {
    fn exact(value: f64, kind: IntegralKind) -> Self {
        Self { value, kind, error_bound: 0.0, diagnostics: Diagnostics::closed_form() }
    }
}

/// `int e dg` for an elementary integrand `e`.
pub fn elementary_forward(e: Elementary, g: &dyn Regulated, kind: IntegralKind) -> Result<IntegralResult> {
    let iv = g.interval();
    e.validate(iv)?;
    let (a, b) = (iv.a(), iv.b());
    let gb = g.eval(b)?;
    let dushnik = kind == IntegralKind::D;
    let value = match e {
        Elementary::One => gb - g.eval(a)?,
        Elementary::OpenAtA if dushnik => gb - g.eval(a)?,
        Elementary::OpenAtA => gb - right_limit_at(g, a)?,
        Elementary::OpenAt(tau) if dushnik => gb - g.eval(tau)?,
        Elementary::OpenAt(tau) => gb - right_limit_at(g, tau)?,
        Elementary::ClosedAt(tau) if dushnik => gb - g.eval(tau)?,
        Elementary::ClosedAt(tau) => gb - left_limit_at(g, tau)?,
        Elementary::PointB if dushnik => 0.0,
        Elementary::PointB => left_jump(g, b)?,
    };
    Ok(IntegralResult::exact(value, kind))
}

/// `int h de` for an elementary integrator `e`.
pub fn elementary_backward(h: &dyn Regulated, e: Elementary, kind: IntegralKind) -> Result<IntegralResult> {
    let iv = h.interval();
    e.validate(iv)?;
    let (a, b) = (iv.a(), iv.b());
    let dushnik = kind == IntegralKind::D;
    let value = match e {
        Elementary::One => 0.0,
        Elementary::OpenAtA if dushnik => right_limit_at(h, a)?,
        Elementary::OpenAtA => h.eval(a)?,
        Elementary::OpenAt(tau) if dushnik => right_limit_at(h, tau)?,
        Elementary::OpenAt(tau) => h.eval(tau)?,
        Elementary::ClosedAt(tau) if dushnik => left_limit_at(h, tau)?,
        Elementary::ClosedAt(tau) => h.eval(tau)?,
        Elementary::PointB if dushnik => left_limit_at(h, b)?,
        Elementary::PointB => h.eval(b)?,
    };
    Ok(IntegralResult::exact(value, kind))
}

/// Expansion of a step function into weighted elementary functions.
pub fn elementary_terms(f: &StepFunction) -> Vec<(Elementary, f64)> {
    let dec = f.decompose();
    let a = f.interval().a();
    let mut terms = Vec::with_capacity(dec.plus_jumps.len() + dec.minus_jumps.len() + 2);
    if dec.base != 0.0 {
        terms.push((Elementary::One, dec.base));
    }
    for &(s, c) in &dec.plus_jumps {
        terms.push((if s == a { Elementary::OpenAtA } else { Elementary::OpenAt(s) }, c));
    }
    for &(s, d) in &dec.minus_jumps {
        terms.push((Elementary::ClosedAt(s), d));
    }
    if dec.endpoint != 0.0 {
        terms.push((Elementary::PointB, dec.endpoint));
    }
    terms
}

/// `int f dg` with a step integrand, by linearity over its elementary terms.
pub fn integrate_step_integrand(f: &StepFunction, g: &dyn Regulated, kind: IntegralKind) -> Result<IntegralResult> {
    same_interval(f, g)?;
    let mut acc = CompensatedSum::new();
    for (e, w) in elementary_terms(f) {
        acc.add(w * elementary_forward(e, g, kind)?.value);
    }
    Ok(IntegralResult::exact(acc.value(), kind))
}

/// `int f dg` with a step integrator, by linearity over its elementary terms.
pub fn integrate_step_integrator(f: &dyn Regulated, g: &StepFunction, kind: IntegralKind) -> Result<IntegralResult> {
    same_interval(f, g)?;
    let mut acc = CompensatedSum::new();
    for (e, w) in elementary_terms(g) {
        acc.add(w * elementary_backward(f, e, kind)?.value);
    }
    Ok(IntegralResult::exact(acc.value(), kind))
}

/// Exact `int f dg` when at least one argument is a step function. The
/// integrator is decomposed when it is a step function, otherwise the integrand.
pub fn integrate_step_pair(f: &dyn Regulated, g: &dyn Regulated, kind: IntegralKind) -> Result<IntegralResult> {
    if let Some(gs) = g.as_step() {
        integrate_step_integrator(f, gs, kind)
    } else if let Some(fs) = f.as_step() {
        integrate_step_integrand(fs, g, kind)
    } else {
        Err(Error::Unsupported("neither argument is a step function; use integrate_limit".into()))
    }
}

/// Which argument the limit integrator replaces by a step approximant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LimitRoute {
    /// Pick the side with the smaller predicted error bound.
    #[default]
    Auto,
    /// Approximate the integrand uniformly; requires the variation of the integrator.
    ApproximateIntegrand,
    /// Approximate the integrator uniformly; requires the variation of the integrand.
    ApproximateIntegrator,
}

/// `int f dg` within `tol`, for regulated `f`, `g` with at least one of known
/// variation. Exact when either argument is a step function.
pub fn integrate_limit(f: &dyn Regulated, g: &dyn Regulated, kind: IntegralKind, tol: f64) -> Result<IntegralResult> {
    integrate_limit_with(f, g, kind, tol, LimitRoute::Auto)
}

pub fn integrate_limit_with(
    f: &dyn Regulated,
    g: &dyn Regulated,
    kind: IntegralKind,
    tol: f64,
    route: LimitRoute,
) -> Result<IntegralResult> {
    same_interval(f, g)?;
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    if route == LimitRoute::Auto && (f.as_step().is_some() || g.as_step().is_some()) {
        return integrate_step_pair(f, g, kind);
    }
    // predicted bound and target uniform error for each side
    let integrand_side = g.variation_bound().map(|var_g| {
        let eps = tol / (2.0 * var_g + 1.0);
        let predicted = if f.as_step().is_some() { 0.0 } else { eps * var_g };
        (predicted, eps, var_g)
    });
    let integrator_side = match endpoint_variation_norm(f) {
        Ok(norm_f) => {
            let eps = tol / (2.0 * norm_f + 1.0);
            let predicted = if g.as_step().is_some() { 0.0 } else { eps * norm_f };
            Some((predicted, eps, norm_f))
        }
        Err(_) => None,
    };
    let approximate_integrand = |(_, eps, var_g): (f64, f64, f64)| -> Result<IntegralResult> {
        let ap = f.approximate(eps)?;
        let r = integrate_step_integrand(&ap.step, g, kind)?;
        Ok(IntegralResult {
            value: r.value,
            kind,
            error_bound: ap.error * var_g,
            diagnostics: Diagnostics {
                route: Route::ApproximateIntegrand,
                approximant_nodes: ap.step.nodes().len(),
                approximant_error: ap.error,
            },
        })
    };
    let approximate_integrator = |(_, eps, norm_f): (f64, f64, f64)| -> Result<IntegralResult> {
        let ap = g.approximate(eps)?;
        let r = integrate_step_integrator(f, &ap.step, kind)?;
        Ok(IntegralResult {
            value: r.value,
            kind,
            error_bound: norm_f * ap.error,
            diagnostics: Diagnostics {
                route: Route::ApproximateIntegrator,
                approximant_nodes: ap.step.nodes().len(),
                approximant_error: ap.error,
            },
        })
    };
    let missing = |which: &str| Error::Precondition(format!("the variation of the {which} is unknown"));
    match route {
        LimitRoute::ApproximateIntegrand => approximate_integrand(integrand_side.ok_or_else(|| missing("integrator"))?),
        LimitRoute::ApproximateIntegrator => {
            approximate_integrator(integrator_side.ok_or_else(|| missing("integrand"))?)
        }
        LimitRoute::Auto => match (integrand_side, integrator_side) {
            (Some(s1), Some(s2)) => {
                // the cheaper-looking side may still exceed the node budget
                let integrand_first = s1.0 <= s2.0;
                let first = if integrand_first { approximate_integrand(s1) } else { approximate_integrator(s2) };
                match first {
                    Err(Error::ApproximationFailure { .. }) => {
                        let second = if integrand_first { approximate_integrator(s2) } else { approximate_integrand(s1) };
                        second.or(first)
                    }
                    r => r,
                }
            }
            (Some(s1), None) => approximate_integrand(s1),
            (None, Some(s2)) => approximate_integrator(s2),
            (None, None) => Err(Error::Precondition("neither function has known bounded variation".into())),
        },
    }
}

/// `f(b) g(b) - f(a) g(a)`.
pub fn boundary_term(f: &dyn Regulated, g: &dyn Regulated) -> Result<f64> {
    let iv = same_interval(f, g)?;
    Ok(f.eval(iv.b())? * g.eval(iv.b())? - f.eval(iv.a())? * g.eval(iv.a())?)
}

/// `int f dg` of kind `kind_out`, computed from the reversed integral via
///
/// `(K) int f dg = (Y) int f dg = f(b)g(b) - f(a)g(a) - (D) int g df`.
pub fn by_parts(f: &dyn Regulated, g: &dyn Regulated, kind_out: IntegralKind, tol: f64) -> Result<IntegralResult> {
    let reversed_kind = match kind_out {
        IntegralKind::K | IntegralKind::Y => IntegralKind::D,
        IntegralKind::D => IntegralKind::K,
    };
    let reversed = integrate_limit(g, f, reversed_kind, tol)?;
    Ok(IntegralResult {
        value: boundary_term(f, g)? - reversed.value,
        kind: kind_out,
        error_bound: reversed.error_bound,
        diagnostics: Diagnostics { route: Route::ByParts, ..reversed.diagnostics },
    })
}
