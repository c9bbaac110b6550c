//! Built-in non-step families: piecewise-Lipschitz and monotone functions,
//! each with an explicit finite list of jumps.

use super::{Approximant, Formula, Interval, Regulated, StepFunction};
use crate::error::{Error, Result};

/// Upper limit on the number of nodes of a generated approximant.
pub const MAX_APPROX_NODES: usize = 1 << 23;

const MAX_BISECTIONS: u32 = 64;

// Lipschitz cells are sized so that `L * width / 2 <= 0.95 eps`, leaving room for rounding.
const CELL_FILL: f64 = 1.9;

/// A jump of sizes `left = f(at) - f(at-)` and `right = f(at+) - f(at)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub at: f64,
    pub left: f64,
    pub right: f64,
}

impl Jump {
    pub fn new(at: f64, left: f64, right: f64) -> Self {
        Self { at, left, right }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("tolerance must be positive, got {eps}")))
    }
}

fn union_sorted(mut pts: Vec<f64>) -> Vec<f64> {
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `h + J` where `h` is given by one closed-form [`Formula`] per piece of a
/// division and `J` is a finite jump function vanishing at `a`.
///
/// At an interior breakpoint `h` takes the value of the piece on its right;
/// its left limit comes from the piece on the left.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzPieces {
    interval: Interval,
    breaks: Vec<f64>,
    pieces: Vec<Formula>,
    lipschitz: Vec<f64>,
    jumps: Vec<Jump>,
    jump_part: StepFunction,
    variation: Option<f64>,
}

impl LipschitzPieces {
    pub fn new(interval: Interval, breaks: Vec<f64>, pieces: Vec<Formula>, jumps: Vec<Jump>) -> Result<Self> {
        if breaks.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints need {} formulas, got {}",
                breaks.len(),
                breaks.len().saturating_sub(1),
                pieces.len()
            )));
        }
        if breaks[0] != interval.a() || breaks[breaks.len() - 1] != interval.b() {
            return Err(Error::InvalidFunction("breakpoints must span the interval".into()));
        }
        if let Some(k) = (1..breaks.len()).find(|&k| !(breaks[k - 1] < breaks[k])) {
            return Err(Error::InvalidFunction(format!(
                "breakpoints not strictly increasing at index {k}"
            )));
        }
        let mut lipschitz = Vec::with_capacity(pieces.len());
        for (i, p) in pieces.iter().enumerate() {
            let (lo, hi) = (breaks[i], breaks[i + 1]);
            p.validate_on(lo, hi)?;
            lipschitz.push(p.lipschitz(lo, hi).ok_or_else(|| {
                Error::InvalidFunction(format!("{} is not Lipschitz on [{lo}, {hi}]", p.name()))
            })?);
        }
        let jump_part = StepFunction::from_jumps(interval, 0.0, &jumps)?;
        let mut f = Self {
            interval,
            breaks,
            pieces,
            lipschitz,
            jumps,
            jump_part,
            variation: None,
        };
        f.variation = Some(f.exact_variation());
        Ok(f)
    }

    /// One formula on the whole interval, no jumps.
    pub fn single(interval: Interval, formula: Formula) -> Result<Self> {
        Self::new(interval, vec![interval.a(), interval.b()], vec![formula], Vec::new())
    }

    /// Replaces the computed Lipschitz constants by user-supplied ones, which
    /// may be looser but never tighter.
    pub fn with_lipschitz(mut self, constants: Vec<f64>) -> Result<Self> {
        if constants.len() != self.pieces.len() {
            return Err(Error::InvalidFunction(format!(
                "expected {} Lipschitz constants, got {}",
                self.pieces.len(),
                constants.len()
            )));
        }
        for (i, (&given, &exact)) in constants.iter().zip(&self.lipschitz).enumerate() {
            if !(given >= exact) || !given.is_finite() {
                return Err(Error::InvalidFunction(format!(
                    "Lipschitz constant {given} for piece {} is below the true constant {exact}",
                    i + 1
                )));
            }
        }
        self.lipschitz = constants;
        Ok(self)
    }

    /// Same function, with its variation treated as unknown.
    pub fn forget_variation(mut self) -> Self {
        self.variation = None;
        self
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Formula] {
        &self.pieces
    }

    pub fn lipschitz_constants(&self) -> &[f64] {
        &self.lipschitz
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    fn exact_variation(&self) -> f64 {
        let n = self.pieces.len();
        let mut var = self.jump_part.variation();
        for (i, p) in self.pieces.iter().enumerate() {
            var += p.variation(self.breaks[i], self.breaks[i + 1]);
            if i + 1 < n {
                let t = self.breaks[i + 1];
                var += (self.pieces[i + 1].eval(t) - p.eval(t)).abs();
            }
        }
        var
    }

    // piece whose half-open range [beta_i, beta_{i+1}) contains t, last piece at b
    fn piece_at(&self, t: f64) -> usize {
        let idx = self.breaks.partition_point(|&s| s <= t);
        idx.saturating_sub(1).min(self.pieces.len() - 1)
    }

    // piece whose range (beta_i, beta_{i+1}] contains t
    fn piece_left_of(&self, t: f64) -> usize {
        let idx = self.breaks.partition_point(|&s| s < t);
        idx.saturating_sub(1).min(self.pieces.len() - 1)
    }
}

impl Regulated for LipschitzPieces {
    fn interval(&self) -> Interval {
        self.interval
    }

    fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.pieces[self.piece_at(t)].eval(t) + self.jump_part.evaluate(t)?)
    }

    fn left_limit(&self, t: f64) -> Result<Option<f64>> {
        Ok(self
            .jump_part
            .left_limit(t)?
            .map(|j| self.pieces[self.piece_left_of(t)].eval(t) + j))
    }

    fn right_limit(&self, t: f64) -> Result<Option<f64>> {
        Ok(self
            .jump_part
            .right_limit(t)?
            .map(|j| self.pieces[self.piece_at(t)].eval(t) + j))
    }

    /// Uniform grid of step `<= 1.9 eps / L` on each piece, refined at the jumps,
    /// with the value at each cell midpoint. Certified error `max L * width / 2`.
    fn approximate(&self, eps: f64) -> Result<Approximant> {
        check_eps(eps)?;
        let mut counts = Vec::with_capacity(self.pieces.len());
        let mut total = 0.0;
        for (i, &lip) in self.lipschitz.iter().enumerate() {
            let len = self.breaks[i + 1] - self.breaks[i];
            let n = (lip * len / (CELL_FILL * eps)).ceil().max(1.0);
            total += n;
            counts.push(n);
        }
        if total > MAX_APPROX_NODES as f64 {
            let spread: f64 = self
                .lipschitz
                .iter()
                .enumerate()
                .map(|(i, l)| l * (self.breaks[i + 1] - self.breaks[i]))
                .sum();
            return Err(Error::ApproximationFailure {
                requested: eps,
                best: spread / (CELL_FILL * MAX_APPROX_NODES as f64),
            });
        }
        let mut pts = Vec::with_capacity(total as usize + self.jumps.len() + 1);
        for (i, &n) in counts.iter().enumerate() {
            let (lo, hi) = (self.breaks[i], self.breaks[i + 1]);
            let n = n as usize;
            pts.extend((0..n).map(|k| lo + (hi - lo) * (k as f64) / (n as f64)));
        }
        pts.push(self.interval.b());
        pts.extend(self.jump_part.discontinuities());
        let nodes = union_sorted(pts);

        let mut node_values = Vec::with_capacity(nodes.len());
        let mut piece_values = Vec::with_capacity(nodes.len() - 1);
        let mut error: f64 = 0.0;
        for (k, &s) in nodes.iter().enumerate() {
            node_values.push(self.eval(s)?);
            if k > 0 {
                let u = nodes[k - 1];
                let mid = 0.5 * (u + s);
                piece_values.push(self.eval(mid)?);
                error = error.max(self.lipschitz[self.piece_at(mid)] * (s - u) * 0.5);
            }
        }
        let step = StepFunction::new(self.interval, nodes, node_values, piece_values)?;
        Ok(Approximant { step, error })
    }

    fn variation_bound(&self) -> Option<f64> {
        self.variation
    }

    fn sup_bound(&self) -> f64 {
        let h = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, p)| p.sup_abs(self.breaks[i], self.breaks[i + 1]))
            .fold(0.0, f64::max);
        h + self.jump_part.sup_norm()
    }

    fn jump_points(&self) -> Vec<f64> {
        union_sorted(self.breaks.iter().copied().chain(self.jump_part.discontinuities()).collect())
    }
}

/// `h + J` with `h` a continuous monotone [`Formula`] on the whole interval and
/// `J` a finite jump function, all jumps agreeing with the direction of `h`.
///
/// Approximation only uses monotonicity, so non-Lipschitz members such as
/// `sqrt(t)` are supported.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneJumps {
    interval: Interval,
    formula: Formula,
    jumps: Vec<Jump>,
    jump_part: StepFunction,
}

impl MonotoneJumps {
    pub fn new(interval: Interval, formula: Formula, jumps: Vec<Jump>) -> Result<Self> {
        let (a, b) = (interval.a(), interval.b());
        formula.validate_on(a, b)?;
        if !formula.is_monotone_on(a, b) {
            return Err(Error::InvalidFunction(format!("{} is not monotone on {interval}", formula.name())));
        }
        let rise = formula.eval(b) - formula.eval(a);
        let sizes = || jumps.iter().flat_map(|j| [j.left, j.right]);
        let up = rise > 0.0 || (rise == 0.0 && sizes().all(|s| s >= 0.0));
        let consistent = if up { sizes().all(|s| s >= 0.0) } else { sizes().all(|s| s <= 0.0) };
        if !consistent {
            return Err(Error::InvalidFunction(
                "jump directions disagree with the monotone part".into(),
            ));
        }
        let jump_part = StepFunction::from_jumps(interval, 0.0, &jumps)?;
        Ok(Self { interval, formula, jumps, jump_part })
    }

    pub fn formula(&self) -> Formula {
        self.formula
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }
}

impl Regulated for MonotoneJumps {
    fn interval(&self) -> Interval {
        self.interval
    }

    fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.formula.eval(t) + self.jump_part.evaluate(t)?)
    }

    fn left_limit(&self, t: f64) -> Result<Option<f64>> {
        Ok(self.jump_part.left_limit(t)?.map(|j| self.formula.eval(t) + j))
    }

    fn right_limit(&self, t: f64) -> Result<Option<f64>> {
        Ok(self.jump_part.right_limit(t)?.map(|j| self.formula.eval(t) + j))
    }

    /// Bisects until the monotone part rises by at most `2 eps` per cell and
    /// uses the mean of the cell's end values.
    fn approximate(&self, eps: f64) -> Result<Approximant> {
        check_eps(eps)?;
        let h = |t: f64| self.formula.eval(t);
        let anchors = union_sorted(
            [self.interval.a(), self.interval.b()]
                .into_iter()
                .chain(self.jump_part.discontinuities())
                .collect(),
        );
        let mut nodes = vec![anchors[0]];
        let mut worst: f64 = 0.0;
        for w in anchors.windows(2) {
            let mut stack = vec![(w[0], w[1], 0u32)];
            while let Some((u, v, depth)) = stack.pop() {
                let rise = (h(v) - h(u)).abs();
                if rise <= 2.0 * eps {
                    nodes.push(v);
                    worst = worst.max(rise * 0.5);
                    continue;
                }
                let mid = 0.5 * (u + v);
                if depth >= MAX_BISECTIONS || !(u < mid && mid < v) {
                    return Err(Error::ApproximationFailure { requested: eps, best: rise * 0.5 });
                }
                if nodes.len() + stack.len() > MAX_APPROX_NODES {
                    return Err(Error::ApproximationFailure { requested: eps, best: rise * 0.5 });
                }
                stack.push((mid, v, depth + 1));
                stack.push((u, mid, depth + 1));
            }
        }
        let mut node_values = Vec::with_capacity(nodes.len());
        let mut piece_values = Vec::with_capacity(nodes.len() - 1);
        for (k, &s) in nodes.iter().enumerate() {
            node_values.push(self.eval(s)?);
            if k > 0 {
                let u = nodes[k - 1];
                let level = self.jump_part.evaluate(0.5 * (u + s))?;
                piece_values.push(0.5 * (h(u) + h(s)) + level);
            }
        }
        let step = StepFunction::new(self.interval, nodes, node_values, piece_values)?;
        Ok(Approximant { step, error: worst })
    }

    fn variation_bound(&self) -> Option<f64> {
        let (a, b) = (self.interval.a(), self.interval.b());
        Some((self.formula.eval(b) - self.formula.eval(a)).abs() + self.jump_part.variation())
    }

    fn sup_bound(&self) -> f64 {
        let (a, b) = (self.interval.a(), self.interval.b());
        self.formula.sup_abs(a, b) + self.jump_part.sup_norm()
    }

    fn jump_points(&self) -> Vec<f64> {
        self.jump_part.discontinuities()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_deviation(f: &dyn Regulated, s: &StepFunction, samples: usize) -> f64 {
        let iv = f.interval();
        (0..=samples)
            .map(|i| iv.a() + iv.len() * i as f64 / samples as f64)
            .chain(s.nodes().iter().copied())
            .map(|t| (f.eval(t).unwrap() - s.evaluate(t).unwrap()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_grid_approximant() {
        let f = LipschitzPieces::single(Interval::unit(), Formula::affine(1.0, 0.0)).unwrap();
        let ap = f.approximate(0.14).unwrap();
        assert_eq!(ap.step.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(ap.step.piece_values(), &[0.125, 0.375, 0.625, 0.875]);
        assert_eq!(ap.error, 0.125);
        assert!(max_deviation(&f, &ap.step, 10_000) <= ap.error);
    }

    #[test]
    fn jump_forced_into_grid() {
        let iv = Interval::unit();
        let f = LipschitzPieces::new(
            iv,
            vec![0.0, 1.0],
            vec![Formula::affine(1.0, 0.0)],
            vec![Jump::new(0.5, 1.0, 0.0)],
        )
        .unwrap();
        assert_eq!(f.eval(0.5).unwrap(), 1.5);
        assert_eq!(f.left_limit(0.5).unwrap(), Some(0.5));
        let ap = f.approximate(0.25).unwrap();
        assert!(ap.step.nodes().contains(&0.5));
        assert!(ap.error <= 0.25);
        assert!(max_deviation(&f, &ap.step, 10_000) <= ap.error + 1e-12);

        // jump off the grid still lands on a node
        let g = LipschitzPieces::new(
            iv,
            vec![0.0, 1.0],
            vec![Formula::affine(1.0, 0.0)],
            vec![Jump::new(0.3, 0.0, -2.0)],
        )
        .unwrap();
        let ap = g.approximate(0.1).unwrap();
        assert!(ap.step.nodes().contains(&0.3));
        assert!(max_deviation(&g, &ap.step, 10_000) <= ap.error + 1e-12);
    }

    #[test]
    fn breakpoint_limits_and_variation() {
        let iv = Interval::unit();
        let f = LipschitzPieces::new(
            iv,
            vec![0.0, 0.5, 1.0],
            vec![Formula::affine(1.0, 0.0), Formula::affine(0.0, 2.0)],
            Vec::new(),
        )
        .unwrap();
        assert_eq!(f.eval(0.5).unwrap(), 2.0);
        assert_eq!(f.left_limit(0.5).unwrap(), Some(0.5));
        assert_eq!(f.right_limit(0.5).unwrap(), Some(2.0));
        assert_eq!(f.variation_bound(), Some(0.5 + 1.5));
        assert_eq!(f.sup_bound(), 2.0);
        assert_eq!(f.jump_points(), vec![0.0, 0.5, 1.0]);
        assert_eq!(f.left_limit(0.0).unwrap(), None);
        assert_eq!(f.right_limit(1.0).unwrap(), None);
    }

    #[test]
    fn user_lipschitz_constants() {
        let f = LipschitzPieces::single(Interval::unit(), Formula::sin(1.0, 4.0, 0.0)).unwrap();
        assert!(f.clone().with_lipschitz(vec![3.0]).is_err());
        let loose = f.with_lipschitz(vec![8.0]).unwrap();
        let ap = loose.approximate(0.1).unwrap();
        assert!(ap.error <= 0.1);
    }

    #[test]
    fn non_lipschitz_rejected() {
        let r = LipschitzPieces::single(Interval::unit(), Formula::power(1.0, 0.5, 0.0));
        assert!(matches!(r, Err(Error::InvalidFunction(_))));
    }

    #[test]
    fn monotone_sqrt_with_jump() {
        let iv = Interval::unit();
        let f = MonotoneJumps::new(iv, Formula::power(1.0, 0.5, 0.0), vec![Jump::new(0.5, 0.5, 0.25)])
            .unwrap();
        assert_eq!(f.variation_bound(), Some(1.75));
        for eps in [0.1, 0.01] {
            let ap = f.approximate(eps).unwrap();
            assert!(ap.error <= eps);
            assert!(max_deviation(&f, &ap.step, 10_000) <= ap.error + 1e-12);
        }
    }

    #[test]
    fn monotone_direction_checked() {
        let iv = Interval::unit();
        assert!(MonotoneJumps::new(iv, Formula::affine(1.0, 0.0), vec![Jump::new(0.5, -1.0, 0.0)]).is_err());
        assert!(MonotoneJumps::new(iv, Formula::affine(-1.0, 0.0), vec![Jump::new(0.5, -1.0, 0.0)]).is_ok());
        assert!(MonotoneJumps::new(iv, Formula::sin(1.0, 5.0, 0.0), vec![]).is_err());
    }

    #[test]
    fn approximation_failure_reports_best() {
        let f = LipschitzPieces::single(Interval::unit(), Formula::affine(1.0, 0.0)).unwrap();
        match f.approximate(1e-12) {
            Err(Error::ApproximationFailure { requested, best }) => {
                assert_eq!(requested, 1e-12);
                assert!(best > 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(f.approximate(0.0).is_err());
    }
}
