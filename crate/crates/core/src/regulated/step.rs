use super::{Approximant, Interval, Regulated};
use crate::error::{Error, Result};

/// Finite step function on `[a, b]`.
///
/// Stored as a division `sigma_0 < ... < sigma_m`, the values at the nodes and
/// the constant values on the open pieces `(sigma_{k-1}, sigma_k)`. The
/// representation is kept canonical: an interior node whose value equals both
/// neighbouring piece values is merged away, so equal functions have equal
/// representations.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    interval: Interval,
    nodes: Vec<f64>,
    node_values: Vec<f64>,
    piece_values: Vec<f64>,
}

/// Coefficients of the representation
///
/// `f = c + sum_k c_k chi_(sigma_k, b] + sum_k d_k chi_[sigma_k, b] + d chi_[b]`.
///
/// Zero coefficients are dropped from the jump lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub interval: Interval,
    /// `c`, the value at `a`.
    pub base: f64,
    /// `(sigma_k, c_k)` for `k = 0..m-1`: right jumps, coefficients of `chi_(sigma_k, b]`.
    pub plus_jumps: Vec<(f64, f64)>,
    /// `(sigma_k, d_k)` for `k = 1..m-1`: left jumps, coefficients of `chi_[sigma_k, b]`.
    pub minus_jumps: Vec<(f64, f64)>,
    /// `d`, the coefficient of `chi_[b]`.
    pub endpoint: f64,
}

impl Decomposition {
    /// Evaluates the decomposition at `t` term by term.
    pub fn evaluate(&self, t: f64) -> f64 {
        let b = self.interval.b();
        let mut v = self.base;
        for &(s, c) in &self.plus_jumps {
            if s < t && t <= b {
                v += c;
            }
        }
        for &(s, d) in &self.minus_jumps {
            if s <= t && t <= b {
                v += d;
            }
        }
        if t == b {
            v += self.endpoint;
        }
        v
    }
}

impl StepFunction {
    /// Builds a step function and normalizes it to canonical form.
    pub fn new(
        interval: Interval,
        nodes: Vec<f64>,
        node_values: Vec<f64>,
        piece_values: Vec<f64>,
    ) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidStep("at least two nodes are required".into()));
        }
        if node_values.len() != nodes.len() {
            return Err(Error::InvalidStep(format!(
                "expected {} node values, got {}",
                nodes.len(),
                node_values.len()
            )));
        }
        if piece_values.len() + 1 != nodes.len() {
            return Err(Error::InvalidStep(format!(
                "expected {} piece values, got {}",
                nodes.len() - 1,
                piece_values.len()
            )));
        }
        if nodes[0] != interval.a() || nodes[nodes.len() - 1] != interval.b() {
            return Err(Error::InvalidStep(format!(
                "nodes must start at {} and end at {}",
                interval.a(),
                interval.b()
            )));
        }
        if let Some(k) = (1..nodes.len()).find(|&k| !(nodes[k - 1] < nodes[k])) {
            return Err(Error::InvalidStep(format!(
                "nodes not strictly increasing at index {k}"
            )));
        }
        if node_values.iter().chain(&piece_values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidStep("values must be finite".into()));
        }
        let mut f = Self { interval, nodes, node_values, piece_values };
        f.canonicalize();
        Ok(f)
    }

    pub fn constant(interval: Interval, value: f64) -> Self {
        Self {
            interval,
            nodes: vec![interval.a(), interval.b()],
            node_values: vec![value, value],
            piece_values: vec![value],
        }
    }

    /// Indicator of `[t, b]`.
    pub fn indicator_closed_from(interval: Interval, t: f64) -> Result<Self> {
        Self::indicator(interval, t, 1.0, 1.0)
    }

    /// Indicator of `(t, b]`.
    pub fn indicator_open_from(interval: Interval, t: f64) -> Result<Self> {
        Self::indicator(interval, t, 0.0, 1.0)
    }

    /// Indicator of the single point `{t}`.
    pub fn indicator_point(interval: Interval, t: f64) -> Result<Self> {
        Self::indicator(interval, t, 1.0, 0.0)
    }

    // value `at_t` at t, 0 left of t, `right` on (t, b), and `right` at b unless t == b
    fn indicator(interval: Interval, t: f64, at_t: f64, right: f64) -> Result<Self> {
        interval.check(t)?;
        let (a, b) = (interval.a(), interval.b());
        if t == a {
            Self::new(interval, vec![a, b], vec![at_t, right], vec![right])
        } else if t == b {
            Self::new(interval, vec![a, b], vec![0.0, at_t], vec![0.0])
        } else {
            Self::new(interval, vec![a, t, b], vec![0.0, at_t, right], vec![0.0, right])
        }
    }

    /// Builds `base + J` where `J` has the listed left/right jumps and is
    /// zero at `a`. Jumps at the same point are accumulated.
    pub fn from_jumps(interval: Interval, base: f64, jumps: &[super::Jump]) -> Result<Self> {
        let mut sorted: Vec<super::Jump> = Vec::with_capacity(jumps.len());
        for j in jumps {
            interval.check(j.at)?;
            if !(j.left.is_finite() && j.right.is_finite()) {
                return Err(Error::InvalidStep("jump sizes must be finite".into()));
            }
            if j.at == interval.a() && j.left != 0.0 {
                return Err(Error::InvalidStep("no left jump is possible at a".into()));
            }
            if j.at == interval.b() && j.right != 0.0 {
                return Err(Error::InvalidStep("no right jump is possible at b".into()));
            }
            sorted.push(*j);
        }
        sorted.sort_by(|x, y| x.at.total_cmp(&y.at));
        let mut merged: Vec<super::Jump> = Vec::with_capacity(sorted.len());
        for j in sorted {
            match merged.last_mut() {
                Some(last) if last.at == j.at => {
                    last.left += j.left;
                    last.right += j.right;
                }
                _ => merged.push(j),
            }
        }

        let (a, b) = (interval.a(), interval.b());
        let at = |p: f64| merged.iter().find(|j| j.at == p).copied();
        let mut nodes = vec![a];
        let mut node_values = vec![base];
        let mut piece_values = Vec::with_capacity(merged.len() + 1);
        let mut level = base + at(a).map_or(0.0, |j| j.right);
        for j in merged.iter().filter(|j| a < j.at && j.at < b) {
            piece_values.push(level);
            nodes.push(j.at);
            node_values.push(level + j.left);
            level += j.left + j.right;
        }
        piece_values.push(level);
        nodes.push(b);
        node_values.push(level + at(b).map_or(0.0, |j| j.left));
        Self::new(interval, nodes, node_values, piece_values)
    }

    fn canonicalize(&mut self) {
        let m = self.piece_values.len();
        if m < 2 {
            return;
        }
        let mut nodes = Vec::with_capacity(m + 1);
        let mut node_values = Vec::with_capacity(m + 1);
        let mut piece_values = Vec::with_capacity(m);
        nodes.push(self.nodes[0]);
        node_values.push(self.node_values[0]);
        for k in 1..m {
            let (c, d_left, d_right) =
                (self.node_values[k], self.piece_values[k - 1], self.piece_values[k]);
            if c == d_left && c == d_right {
                continue;
            }
            piece_values.push(d_left);
            nodes.push(self.nodes[k]);
            node_values.push(c);
        }
        piece_values.push(self.piece_values[m - 1]);
        nodes.push(self.nodes[m]);
        node_values.push(self.node_values[m]);
        self.nodes = nodes;
        self.node_values = node_values;
        self.piece_values = piece_values;
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// Division nodes `sigma_0..sigma_m`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node_values(&self) -> &[f64] {
        &self.node_values
    }

    pub fn piece_values(&self) -> &[f64] {
        &self.piece_values
    }

    /// Number of open pieces `m`.
    pub fn pieces(&self) -> usize {
        self.piece_values.len()
    }

    // Ok(node index) on exact hit, Err(piece index) for interior points
    fn locate(&self, t: f64) -> Result<std::result::Result<usize, usize>> {
        self.interval.check(t)?;
        Ok(match self.nodes.binary_search_by(|s| s.total_cmp(&t)) {
            Ok(k) => Ok(k),
            Err(k) => Err(k - 1),
        })
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        Ok(match self.locate(t)? {
            Ok(k) => self.node_values[k],
            Err(k) => self.piece_values[k],
        })
    }

    /// `(f(t-), f(t+))`, with `None` where the limit is not defined.
    pub fn one_sided_limits(&self, t: f64) -> Result<(Option<f64>, Option<f64>)> {
        Ok(match self.locate(t)? {
            Ok(k) => {
                let left = (k > 0).then(|| self.piece_values[k - 1]);
                let right = self.piece_values.get(k).copied();
                (left, right)
            }
            Err(k) => (Some(self.piece_values[k]), Some(self.piece_values[k])),
        })
    }

    pub fn decompose(&self) -> Decomposition {
        let m = self.pieces();
        let c = &self.node_values;
        let d = &self.piece_values;
        let plus_jumps = (0..m)
            .map(|k| (self.nodes[k], d[k] - c[k]))
            .filter(|&(_, w)| w != 0.0)
            .collect();
        let minus_jumps = (1..m)
            .map(|k| (self.nodes[k], c[k] - d[k - 1]))
            .filter(|&(_, w)| w != 0.0)
            .collect();
        Decomposition {
            interval: self.interval,
            base: c[0],
            plus_jumps,
            minus_jumps,
            endpoint: c[m] - d[m - 1],
        }
    }

    /// Exact total variation.
    pub fn variation(&self) -> f64 {
        let c = &self.node_values;
        let d = &self.piece_values;
        crate::numeric::compensated_sum(
            (0..d.len()).map(|k| (d[k] - c[k]).abs() + (c[k + 1] - d[k]).abs()),
        )
    }

    pub fn sup_norm(&self) -> f64 {
        self.node_values
            .iter()
            .chain(&self.piece_values)
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Points where the function is discontinuous.
    pub fn discontinuities(&self) -> Vec<f64> {
        let m = self.pieces();
        (0..=m)
            .filter(|&k| {
                let c = self.node_values[k];
                (k > 0 && self.piece_values[k - 1] != c) || (k < m && self.piece_values[k] != c)
            })
            .map(|k| self.nodes[k])
            .collect()
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = Self {
            interval: self.interval,
            nodes: self.nodes.clone(),
            node_values: self.node_values.iter().map(|v| v * factor).collect(),
            piece_values: self.piece_values.iter().map(|v| v * factor).collect(),
        };
        out.canonicalize();
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |x, y| x - y)
    }

    /// Pointwise combination on the union of both node sets.
    pub fn combine(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.interval != other.interval {
            return Err(Error::IntervalMismatch);
        }
        let mut nodes: Vec<f64> = self.nodes.iter().chain(&other.nodes).copied().collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let mut node_values = Vec::with_capacity(nodes.len());
        let mut piece_values = Vec::with_capacity(nodes.len() - 1);
        for (k, &s) in nodes.iter().enumerate() {
            node_values.push(op(self.evaluate(s)?, other.evaluate(s)?));
            if k > 0 {
                let (l, r) = (
                    self.one_sided_limits(s)?.0.unwrap_or_default(),
                    other.one_sided_limits(s)?.0.unwrap_or_default(),
                );
                piece_values.push(op(l, r));
            }
        }
        Self::new(self.interval, nodes, node_values, piece_values)
    }
}

impl Regulated for StepFunction {
    fn interval(&self) -> Interval {
        self.interval
    }

    fn eval(&self, t: f64) -> Result<f64> {
        self.evaluate(t)
    }

    fn left_limit(&self, t: f64) -> Result<Option<f64>> {
        Ok(self.one_sided_limits(t)?.0)
    }

    fn right_limit(&self, t: f64) -> Result<Option<f64>> {
        Ok(self.one_sided_limits(t)?.1)
    }

    fn approximate(&self, eps: f64) -> Result<Approximant> {
        if !(eps > 0.0) {
            return Err(Error::Precondition(format!("tolerance must be positive, got {eps}")));
        }
        Ok(Approximant { step: self.clone(), error: 0.0 })
    }

    fn variation_bound(&self) -> Option<f64> {
        Some(self.variation())
    }

    fn sup_bound(&self) -> f64 {
        self.sup_norm()
    }

    fn jump_points(&self) -> Vec<f64> {
        self.nodes.clone()
    }

    fn as_step(&self) -> Option<&StepFunction> {
        Some(self)
    }
}
