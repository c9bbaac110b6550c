//! Divisions, tagged partitions and gauges.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::ulp;
use crate::regulated::{Interval, StepFunction};

/// Strictly increasing nodes `a = alpha_0 < ... < alpha_nu = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Division {
    interval: Interval,
    nodes: Vec<f64>,
}

impl Division {
    pub fn new(interval: Interval, nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes[0] != interval.a() || nodes[nodes.len() - 1] != interval.b() {
            return Err(Error::InvalidDivision(format!("nodes must run from {} to {}", interval.a(), interval.b())));
        }
        if let Some(k) = (1..nodes.len()).find(|&k| !(nodes[k - 1] < nodes[k])) {
            return Err(Error::InvalidDivision(format!("nodes not strictly increasing at index {k}")));
        }
        Ok(Self { interval, nodes })
    }

    /// `cells` subintervals of equal length.
    pub fn uniform(interval: Interval, cells: usize) -> Self {
        let n = cells.max(1);
        let mut nodes: Vec<f64> =
            (0..n).map(|k| interval.a() + interval.len() * k as f64 / n as f64).collect();
        nodes.push(interval.b());
        nodes.dedup();
        Self { interval, nodes }
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of subintervals.
    pub fn nu(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.windows(2).map(|w| (w[0], w[1]))
    }

    /// True when every node of `other` is a node of `self`.
    pub fn refines(&self, other: &Division) -> bool {
        other.nodes.iter().all(|t| self.nodes.binary_search_by(|s| s.total_cmp(t)).is_ok())
    }
}

/// Adds `extra` points to the node set of `base`.
pub fn refine(base: &Division, extra: &[f64]) -> Result<Division> {
    for &t in extra {
        base.interval.check(t)?;
    }
    let mut nodes: Vec<f64> = base.nodes.iter().chain(extra).copied().collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    Ok(Division { interval: base.interval, nodes })
}

/// Where tags may sit inside their subinterval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagMode {
    /// `alpha_{j-1} <= xi_j <= alpha_j`
    Free,
    /// `alpha_{j-1} < xi_j < alpha_j`
    Interior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    division: Division,
    tags: Vec<f64>,
    mode: TagMode,
}

impl Partition {
    pub fn new(division: Division, tags: Vec<f64>, mode: TagMode) -> Result<Self> {
        if tags.len() != division.nu() {
            return Err(Error::InvalidPartition(format!(
                "{} subintervals need {} tags, got {}",
                division.nu(),
                division.nu(),
                tags.len()
            )));
        }
        for (j, ((lo, hi), &t)) in division.cells().zip(&tags).enumerate() {
            let ok = match mode {
                TagMode::Free => lo <= t && t <= hi,
                TagMode::Interior => lo < t && t < hi,
            };
            if !ok {
                return Err(Error::InvalidPartition(format!(
                    "tag {t} of subinterval {} not admissible in [{lo}, {hi}]",
                    j + 1
                )));
            }
        }
        Ok(Self { division, tags, mode })
    }

    pub fn division(&self) -> &Division {
        &self.division
    }

    pub fn nodes(&self) -> &[f64] {
        self.division.nodes()
    }

    pub fn tags(&self) -> &[f64] {
        &self.tags
    }

    pub fn mode(&self) -> TagMode {
        self.mode
    }

    pub fn nu(&self) -> usize {
        self.tags.len()
    }

    /// `(alpha_{j-1}, xi_j, alpha_j)` for each subinterval.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.division.cells().zip(&self.tags).map(|((lo, hi), &t)| (lo, t, hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagRule {
    Midpoint,
    /// Uniform in each open subinterval, deterministic per seed.
    Random(u64),
}

fn too_narrow(lo: f64, hi: f64) -> bool {
    hi - lo < 4.0 * ulp(lo.abs().max(hi.abs()))
}

fn interior_point(lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> f64 {
    for _ in 0..8 {
        let u: f64 = rng.random();
        let t = lo + u * (hi - lo);
        if lo < t && t < hi {
            return t;
        }
    }
    0.5 * (lo + hi)
}

/// Tags strictly inside each subinterval.
pub fn interior_tags(division: &Division, rule: TagRule) -> Result<Partition> {
    let mut rng = match rule {
        TagRule::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        TagRule::Midpoint => None,
    };
    let mut tags = Vec::with_capacity(division.nu());
    for (lo, hi) in division.cells() {
        if too_narrow(lo, hi) {
            return Err(Error::TagPlacement { lo, hi });
        }
        tags.push(match rng.as_mut() {
            Some(rng) => interior_point(lo, hi, rng),
            None => 0.5 * (lo + hi),
        });
    }
    Ok(Partition { division: division.clone(), tags, mode: TagMode::Interior })
}

/// Random division with `cells` random interior points plus `extra`, and
/// random tags of the requested mode.
pub fn random_partition(
    interval: Interval,
    cells: usize,
    extra: &[f64],
    mode: TagMode,
    seed: u64,
) -> Result<Partition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<f64> = (0..cells.saturating_sub(1))
        .map(|_| interval.a() + rng.random::<f64>() * interval.len())
        .collect();
    let mut division = refine(&Division::uniform(interval, 1), &pts)?;
    division = refine(&division, extra)?;
    let mut tags = Vec::with_capacity(division.nu());
    for (lo, hi) in division.cells() {
        tags.push(match mode {
            TagMode::Interior => {
                if too_narrow(lo, hi) {
                    return Err(Error::TagPlacement { lo, hi });
                }
                interior_point(lo, hi, &mut rng)
            }
            TagMode::Free => match rng.random_range(0..4u8) {
                0 => lo,
                1 => hi,
                _ => (lo + rng.random::<f64>() * (hi - lo)).clamp(lo, hi),
            },
        });
    }
    Partition::new(division, tags, mode)
}

type GaugeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum GaugeBase {
    Piecewise(StepFunction),
    Custom(GaugeFn),
}

/// Positive function `delta` on `[a, b]`.
///
/// Either piecewise constant (positivity checked at construction) or an
/// arbitrary closure (positivity only checked where evaluated), in both cases
/// with optional overrides at finitely many points. Override points act as
/// anchors: fine partitions are built with a node at every anchor, which is
/// how a gauge forces tags onto given points.
#[derive(Clone)]
pub struct Gauge {
    interval: Interval,
    base: GaugeBase,
    overrides: Vec<(f64, f64)>,
}

impl fmt::Debug for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match &self.base {
            GaugeBase::Piecewise(s) => format!("{s:?}"),
            GaugeBase::Custom(_) => "<fn>".to_string(),
        };
        f.debug_struct("Gauge")
            .field("interval", &self.interval)
            .field("base", &base)
            .field("overrides", &self.overrides)
            .finish()
    }
}

impl Gauge {
    pub fn constant(interval: Interval, delta: f64) -> Result<Self> {
        Self::piecewise(StepFunction::constant(interval, delta))
    }

    pub fn piecewise(delta: StepFunction) -> Result<Self> {
        if delta.node_values().iter().chain(delta.piece_values()).any(|&d| !(d > 0.0)) {
            return Err(Error::InvalidGauge("gauge values must be positive".into()));
        }
        Ok(Self { interval: delta.interval(), base: GaugeBase::Piecewise(delta), overrides: Vec::new() })
    }

    pub fn from_fn(interval: Interval, delta: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { interval, base: GaugeBase::Custom(Arc::new(delta)), overrides: Vec::new() }
    }

    /// Gauge forcing tags onto `points`: `point_delta` at each point (capped
    /// at half the gap to its neighbours) and
    /// `min(cap, 3/4 * distance to the nearest point)` elsewhere, so every
    /// point is the tag of the cells touching it.
    pub fn forcing(interval: Interval, cap: f64, point_delta: f64, points: &[f64]) -> Result<Self> {
        if !(cap > 0.0 && point_delta > 0.0) {
            return Err(Error::InvalidGauge("gauge values must be positive".into()));
        }
        let mut pts: Vec<f64> = points.iter().copied().filter(|&t| interval.contains(t)).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let anchors = pts.clone();
        let mut g = Self::from_fn(interval, move |t| {
            let i = anchors.partition_point(|&s| s < t);
            let mut dist = f64::INFINITY;
            if i < anchors.len() {
                dist = dist.min(anchors[i] - t);
            }
            if i > 0 {
                dist = dist.min(t - anchors[i - 1]);
            }
            cap.min(0.75 * dist)
        });
        // an anchor's cell must not reach the neighbouring anchor
        for (i, &t) in pts.iter().enumerate() {
            let gap_left = if i > 0 { t - pts[i - 1] } else { f64::INFINITY };
            let gap_right = pts.get(i + 1).map_or(f64::INFINITY, |&s| s - t);
            g = g.with_override(t, point_delta.min(0.5 * gap_left.min(gap_right)))?;
        }
        Ok(g)
    }

    pub fn with_override(mut self, t: f64, delta: f64) -> Result<Self> {
        self.interval.check(t)?;
        if !(delta > 0.0) {
            return Err(Error::InvalidGauge(format!("override at {t} must be positive")));
        }
        match self.overrides.binary_search_by(|(s, _)| s.total_cmp(&t)) {
            Ok(i) => self.overrides[i].1 = delta,
            Err(i) => self.overrides.insert(i, (t, delta)),
        }
        Ok(self)
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn delta(&self, t: f64) -> f64 {
        if let Ok(i) = self.overrides.binary_search_by(|(s, _)| s.total_cmp(&t)) {
            return self.overrides[i].1;
        }
        match &self.base {
            GaugeBase::Piecewise(s) => s.evaluate(t).unwrap_or(f64::NAN),
            GaugeBase::Custom(f) => f(t),
        }
    }

    pub fn anchors(&self) -> impl Iterator<Item = f64> + '_ {
        self.overrides.iter().map(|&(t, _)| t)
    }

    /// `[lo, hi]` lies within `delta(tag)` of `tag`.
    #[inline]
    pub fn covers(&self, lo: f64, tag: f64, hi: f64) -> bool {
        let d = self.delta(tag);
        d > 0.0 && tag - d <= lo && hi <= tag + d
    }
}

/// True iff every subinterval lies within `delta(xi_j)` of its tag.
pub fn is_fine(p: &Partition, gauge: &Gauge) -> bool {
    p.cells().all(|(lo, t, hi)| gauge.covers(lo, t, hi))
}

#[derive(Debug, Clone, Copy)]
pub struct CousinConfig {
    pub max_depth: u32,
    pub max_cells: usize,
}

impl Default for CousinConfig {
    fn default() -> Self {
        Self { max_depth: 60, max_cells: 1 << 24 }
    }
}

/// Builds a `gauge`-fine partition by recursive bisection, splitting first
/// at the gauge's anchors. Each interval is accepted with the first of
/// midpoint, left end, right end that covers it.
pub fn cousin_fine_partition(gauge: &Gauge, interval: Interval) -> Result<Partition> {
    cousin_fine_partition_with(gauge, interval, CousinConfig::default())
}

pub fn cousin_fine_partition_with(gauge: &Gauge, interval: Interval, config: CousinConfig) -> Result<Partition> {
    if gauge.interval() != interval {
        return Err(Error::IntervalMismatch);
    }
    let mut anchors: Vec<f64> = gauge
        .anchors()
        .filter(|&t| interval.a() < t && t < interval.b())
        .collect();
    anchors.insert(0, interval.a());
    anchors.push(interval.b());

    let mut nodes = vec![interval.a()];
    let mut tags = Vec::new();
    for w in anchors.windows(2) {
        let mut stack = vec![(w[0], w[1], 0u32)];
        while let Some((u, v, depth)) = stack.pop() {
            let mid = 0.5 * (u + v);
            if let Some(t) = [mid, u, v].into_iter().find(|&t| gauge.covers(u, t, v)) {
                nodes.push(v);
                tags.push(t);
                continue;
            }
            if depth >= config.max_depth || !(u < mid && mid < v) {
                return Err(Error::GaugeTooFine(format!(
                    "no fine cover of [{u}, {v}] after {depth} bisections"
                )));
            }
            if tags.len() + stack.len() >= config.max_cells {
                return Err(Error::GaugeTooFine(format!("more than {} cells required", config.max_cells)));
            }
            stack.push((mid, v, depth + 1));
            stack.push((u, mid, depth + 1));
        }
    }
    Partition::new(Division::new(interval, nodes)?, tags, TagMode::Free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn unit() -> Interval {
        Interval::unit()
    }

    fn halves() -> Partition {
        Partition::new(Division::new(unit(), vec![0.0, 0.5, 1.0]).unwrap(), vec![0.25, 0.75], TagMode::Interior)
            .unwrap()
    }

    #[test]
    fn refine_examples() {
        let base = Division::uniform(unit(), 1);
        assert_eq!(refine(&base, &[0.5]).unwrap().nodes(), &[0.0, 0.5, 1.0]);
        let d = Division::new(unit(), vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(refine(&d, &[0.5]).unwrap(), d);
        assert_eq!(refine(&base, &[0.25, 0.75]).unwrap().nodes(), &[0.0, 0.25, 0.75, 1.0]);
        assert!(matches!(refine(&base, &[1.5]), Err(Error::Domain { .. })));
    }

    #[test]
    fn interior_tag_examples() {
        let d = Division::new(unit(), vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(interior_tags(&d, TagRule::Midpoint).unwrap().tags(), &[0.25, 0.75]);
        assert_eq!(interior_tags(&Division::uniform(unit(), 1), TagRule::Midpoint).unwrap().tags(), &[0.5]);
        let p = interior_tags(&d, TagRule::Random(7)).unwrap();
        assert_eq!(p, interior_tags(&d, TagRule::Random(7)).unwrap());
        assert_ne!(p, interior_tags(&d, TagRule::Random(8)).unwrap());
        assert_eq!(p.mode(), TagMode::Interior);
    }

    #[test]
    fn interior_tags_reject_ulp_wide_cells() {
        let x = 0.5_f64;
        let d = Division::new(unit(), vec![0.0, x, x + ulp(x), 1.0]).unwrap();
        assert!(matches!(interior_tags(&d, TagRule::Midpoint), Err(Error::TagPlacement { .. })));
    }

    #[test]
    fn partition_validation() {
        let d = Division::new(unit(), vec![0.0, 0.5, 1.0]).unwrap();
        assert!(Partition::new(d.clone(), vec![0.0, 1.0], TagMode::Free).is_ok());
        assert!(Partition::new(d.clone(), vec![0.0, 1.0], TagMode::Interior).is_err());
        assert!(Partition::new(d.clone(), vec![0.25], TagMode::Free).is_err());
        assert!(Partition::new(d, vec![0.6, 0.75], TagMode::Free).is_err());
        assert!(Division::new(unit(), vec![0.0, 0.5, 0.5, 1.0]).is_err());
    }

    #[test]
    fn is_fine_examples() {
        let p = halves();
        assert!(is_fine(&p, &Gauge::constant(unit(), 0.6).unwrap()));
        assert!(!is_fine(&p, &Gauge::constant(unit(), 0.1).unwrap()));
        let whole = interior_tags(&Division::uniform(unit(), 1), TagRule::Midpoint).unwrap();
        assert!(is_fine(&whole, &Gauge::constant(unit(), 0.9).unwrap()));
    }

    #[test]
    fn cousin_examples() {
        let g = Gauge::constant(unit(), 0.5).unwrap();
        let p = cousin_fine_partition(&g, unit()).unwrap();
        assert!(p.nu() <= 2);
        assert!(is_fine(&p, &g));

        let g = Gauge::constant(unit(), 0.3).unwrap();
        let p = cousin_fine_partition(&g, unit()).unwrap();
        assert!(is_fine(&p, &g));

        let g = Gauge::constant(unit(), 1e-300).unwrap();
        assert!(matches!(cousin_fine_partition(&g, unit()), Err(Error::GaugeTooFine(_))));
    }

    #[test]
    fn cousin_respects_cell_budget() {
        let g = Gauge::constant(unit(), 1e-9).unwrap();
        let cfg = CousinConfig { max_depth: 60, max_cells: 1000 };
        assert!(matches!(cousin_fine_partition_with(&g, unit(), cfg), Err(Error::GaugeTooFine(_))));
    }

    #[test]
    fn forcing_gauge_tags_points() {
        let pts = [0.3, 1.0 / 3.0, 0.7];
        let g = Gauge::forcing(unit(), 0.05, 1e-4, &pts).unwrap();
        let p = cousin_fine_partition(&g, unit()).unwrap();
        assert!(is_fine(&p, &g));
        for &t in &pts {
            // every cell containing a forced point is tagged there
            for (lo, tag, hi) in p.cells() {
                if lo <= t && t <= hi {
                    assert_eq!(tag, t);
                }
            }
        }
    }

    #[test]
    fn random_piecewise_gauges_are_always_fine() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let k = rng.random_range(1..6);
            let mut cuts: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
            cuts.sort_by(f64::total_cmp);
            let mut nodes = vec![0.0];
            nodes.extend(cuts);
            nodes.push(1.0);
            nodes.dedup();
            let m = nodes.len();
            let vals = |rng: &mut ChaCha8Rng, n| -> Vec<f64> { (0..n).map(|_| rng.random_range(0.005..0.5)).collect() };
            let nv = vals(&mut rng, m);
            let pv = vals(&mut rng, m - 1);
            let mut g = Gauge::piecewise(StepFunction::new(unit(), nodes, nv, pv).unwrap()).unwrap();
            if rng.random_bool(0.5) {
                g = g.with_override(rng.random(), rng.random_range(1e-4..0.2)).unwrap();
            }
            let p = cousin_fine_partition(&g, unit()).unwrap();
            assert!(is_fine(&p, &g));
        }
    }

    #[test]
    fn gauge_positivity() {
        assert!(Gauge::constant(unit(), 0.0).is_err());
        assert!(Gauge::constant(unit(), 0.5).unwrap().with_override(0.5, -1.0).is_err());
        let g = Gauge::from_fn(unit(), |t| t - 0.5);
        let p = interior_tags(&Division::uniform(unit(), 4), TagRule::Midpoint).unwrap();
        assert!(!is_fine(&p, &g));
        assert!(Gauge::constant(unit(), 2.5).is_ok());
    }
}
