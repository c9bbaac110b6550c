//! Brute-force evaluation of the three integrals straight from their
//! definitions: refinement nets with strictly interior tags for the Young and
//! Dushnik integrals, shrinking gauges and fine partitions for the
//! Kurzweil-Stieltjes integral.
//!
//! The oracle samples partitions, so `converged` is evidence, not proof.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::integrators::IntegralKind;
use crate::partition::{
    cousin_fine_partition, interior_tags, refine, Division, Gauge, Partition, TagMode, TagRule,
};
use crate::regulated::{same_interval, Interval, Regulated};
use crate::sums::{sum_s, sum_sy};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Random interior tag assignments per refinement level.
    pub tag_probes: usize,
    /// Perturbed fine partitions per gauge level.
    pub gauge_probes: usize,
    pub max_levels: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { tag_probes: 32, gauge_probes: 16, max_levels: 18 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub value: f64,
    pub kind: IntegralKind,
    /// Max `|sum - value|` over the probes of the last level.
    pub achieved_spread: f64,
    /// Last refinement level evaluated.
    pub levels: u32,
    pub converged: bool,
}

fn seeding_points(f: &dyn Regulated, g: &dyn Regulated, iv: Interval) -> Vec<f64> {
    let mut pts: Vec<f64> = f
        .jump_points()
        .into_iter()
        .chain(g.jump_points())
        .chain([iv.a(), iv.b()])
        .filter(|&t| iv.contains(t))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `seeds` plus `t +- len * 4^-j` for `j = 1..=level` around each seed.
/// Cells next to a jump then shrink like `4^-level`, so sums with one-sided
/// limit errors there converge at that rate; the levels stay nested.
fn graded(seeds: &[f64], iv: Interval, level: u32) -> Vec<f64> {
    let mut pts = seeds.to_vec();
    for &t in seeds {
        for j in 1..=level {
            let h = iv.len() * (-2.0 * f64::from(j)).exp2();
            pts.extend([t - h, t + h].into_iter().filter(|&s| iv.contains(s)));
        }
    }
    pts
}

fn level_seed(seed: u64, level: u32, probe: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (u64::from(level) << 40)
        ^ (probe as u64).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

fn tol_check(tol: f64) -> Result<()> {
    if tol > 0.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("tolerance must be positive, got {tol}")))
    }
}

/// Young or Dushnik integral as the limit over nested dyadic divisions
/// seeded with every known jump point and graded towards it.
pub fn oracle_refinement(
    f: &dyn Regulated,
    g: &dyn Regulated,
    kind: IntegralKind,
    tol: f64,
    seed: u64,
) -> Result<OracleReport> {
    oracle_refinement_with(f, g, kind, tol, seed, &OracleConfig::default())
}

pub fn oracle_refinement_with(
    f: &dyn Regulated,
    g: &dyn Regulated,
    kind: IntegralKind,
    tol: f64,
    seed: u64,
    config: &OracleConfig,
) -> Result<OracleReport> {
    let iv = same_interval(f, g)?;
    tol_check(tol)?;
    let sum: fn(&dyn Regulated, &dyn Regulated, &Partition) -> Result<_> = match kind {
        IntegralKind::Y => sum_sy,
        IntegralKind::D => sum_s,
        IntegralKind::K => {
            return Err(Error::Unsupported("the refinement oracle covers Y and D; use oracle_gauge".into()))
        }
    };
    let seeds = seeding_points(f, g, iv);
    let mut previous: Option<f64> = None;
    let mut report = OracleReport { value: f64::NAN, kind, achieved_spread: f64::INFINITY, levels: 0, converged: false };
    for level in 0..=config.max_levels {
        let division = refine(&Division::uniform(iv, 1usize << level), &graded(&seeds, iv, level))?;
        let value = sum(f, g, &interior_tags(&division, TagRule::Midpoint)?)?.value;
        let mut spread: f64 = 0.0;
        for probe in 0..config.tag_probes {
            let p = interior_tags(&division, TagRule::Random(level_seed(seed, level, probe)))?;
            spread = spread.max((sum(f, g, &p)?.value - value).abs());
        }
        let drift = previous.map_or(f64::INFINITY, |v| (v - value).abs());
        report = OracleReport { value, kind, achieved_spread: spread.max(drift), levels: level, converged: false };
        if spread <= tol && drift <= tol {
            report.converged = true;
            break;
        }
        previous = Some(value);
    }
    Ok(report)
}

/// Kurzweil-Stieltjes integral as the limit over gauges `2^-L` that force
/// tags onto every known jump point.
pub fn oracle_gauge(f: &dyn Regulated, g: &dyn Regulated, tol: f64, seed: u64) -> Result<OracleReport> {
    oracle_gauge_with(f, g, tol, seed, &OracleConfig::default())
}

pub fn oracle_gauge_with(
    f: &dyn Regulated,
    g: &dyn Regulated,
    tol: f64,
    seed: u64,
    config: &OracleConfig,
) -> Result<OracleReport> {
    let iv = same_interval(f, g)?;
    tol_check(tol)?;
    let seeds = seeding_points(f, g, iv);
    let kind = IntegralKind::K;
    let mut previous: Option<f64> = None;
    let mut report = OracleReport { value: f64::NAN, kind, achieved_spread: f64::INFINITY, levels: 0, converged: false };
    for level in 0..=config.max_levels {
        let cap = iv.len() * (-(level as f64)).exp2();
        let gauge = Gauge::forcing(iv, cap, cap * cap / iv.len(), &seeds)?;
        let base = cousin_fine_partition(&gauge, iv)?;
        let value = sum_s(f, g, &base)?.value;
        let mut spread: f64 = 0.0;
        for probe in 0..config.gauge_probes {
            let mut rng = ChaCha8Rng::seed_from_u64(level_seed(seed, level, probe));
            let p = perturb(&base, &gauge, &mut rng)?;
            spread = spread.max((sum_s(f, g, &p)?.value - value).abs());
        }
        let drift = previous.map_or(f64::INFINITY, |v| (v - value).abs());
        report = OracleReport { value, kind, achieved_spread: spread.max(drift), levels: level, converged: false };
        if spread <= tol && drift <= tol {
            report.converged = true;
            break;
        }
        previous = Some(value);
    }
    Ok(report)
}

/// Random gauge-fine variant of `p`: cells are retagged or split, and every
/// change is kept only if the new cells stay fine.
fn perturb(p: &Partition, gauge: &Gauge, rng: &mut ChaCha8Rng) -> Result<Partition> {
    let mut nodes = vec![p.nodes()[0]];
    let mut tags = Vec::with_capacity(p.nu());
    let random_in = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| (lo + rng.random::<f64>() * (hi - lo)).clamp(lo, hi);
    for (lo, tag, hi) in p.cells() {
        match rng.random_range(0..4u8) {
            // retag
            0 | 1 => {
                let t = random_in(rng, lo, hi);
                tags.push(if gauge.covers(lo, t, hi) { t } else { tag });
                nodes.push(hi);
            }
            // split at a random point; the side holding the old tag keeps it
            2 => {
                let s = random_in(rng, lo, hi);
                if lo < s && s < hi {
                    let fresh = |rng: &mut ChaCha8Rng, u: f64, v: f64| {
                        let t = random_in(rng, u, v);
                        gauge.covers(u, t, v).then_some(t)
                    };
                    let (l_tag, r_tag) = if tag <= s {
                        (Some(tag), fresh(rng, s, hi))
                    } else {
                        (fresh(rng, lo, s), Some(tag))
                    };
                    if let (Some(l), Some(r)) = (l_tag, r_tag) {
                        nodes.extend([s, hi]);
                        tags.extend([l, r]);
                        continue;
                    }
                }
                nodes.push(hi);
                tags.push(tag);
            }
            _ => {
                nodes.push(hi);
                tags.push(tag);
            }
        }
    }
    Partition::new(Division::new(p.division().interval(), nodes)?, tags, TagMode::Free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::is_fine;
    use crate::regulated::{Formula, LipschitzPieces, StepFunction};
    use IntegralKind::*;

    fn unit() -> Interval {
        Interval::unit()
    }

    fn id() -> LipschitzPieces {
        LipschitzPieces::single(unit(), Formula::affine(1.0, 0.0)).unwrap()
    }

    #[test]
    fn refinement_examples() {
        let chi = StepFunction::indicator_open_from(unit(), 0.5).unwrap();
        let d = oracle_refinement(&chi, &chi, D, 1e-9, 1).unwrap();
        assert!(d.converged);
        assert!((d.value - 1.0).abs() <= 1e-9);
        let y = oracle_refinement(&chi, &chi, Y, 1e-9, 1).unwrap();
        assert!(y.converged);
        assert!(y.value.abs() <= 1e-9);

        let r = oracle_refinement(&id(), &id(), D, 1e-6, 3).unwrap();
        assert!(r.converged, "{r:?}");
        assert!((r.value - 0.5).abs() <= 1e-6);
        assert!(oracle_refinement(&id(), &id(), K, 1e-6, 3).is_err());
    }

    #[test]
    fn gauge_examples() {
        let f = StepFunction::indicator_closed_from(unit(), 0.5).unwrap();
        let r = oracle_gauge(&f, &id(), 1e-6, 5).unwrap();
        assert!(r.converged, "{r:?}");
        assert!((r.value - 0.5).abs() <= 1e-6);

        let f = StepFunction::indicator_point(unit(), 1.0).unwrap();
        let g = StepFunction::indicator_closed_from(unit(), 0.5).unwrap();
        let r = oracle_gauge(&f, &g, 1e-9, 5).unwrap();
        assert!(r.converged);
        assert!(r.value.abs() <= 1e-9);

        let one = StepFunction::constant(unit(), 1.0);
        let g = StepFunction::new(unit(), vec![0.0, 0.3, 1.0], vec![2.0, -1.0, 4.5], vec![0.5, 3.0]).unwrap();
        let r = oracle_gauge(&one, &g, 1e-12, 5).unwrap();
        assert!(r.converged);
        assert!((r.value - 2.5).abs() <= 1e-12);
    }

    #[test]
    fn unreachable_tolerance_reports_non_convergence() {
        let cfg = OracleConfig { max_levels: 8, ..OracleConfig::default() };
        let r = oracle_refinement_with(&id(), &id(), D, 1e-30, 0, &cfg).unwrap();
        assert!(!r.converged);
        assert_eq!(r.levels, 8);
        let r = oracle_gauge_with(&id(), &id(), 1e-30, 0, &cfg).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn perturbed_partitions_stay_fine() {
        let gauge = Gauge::forcing(unit(), 1.0 / 64.0, 1e-4, &[0.0, 0.3, 0.5, 1.0]).unwrap();
        let base = cousin_fine_partition(&gauge, unit()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let p = perturb(&base, &gauge, &mut rng).unwrap();
            assert!(is_fine(&p, &gauge));
        }
    }
}
