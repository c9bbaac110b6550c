//! Seeded generators of random step functions and built-in family members,
//! used by property checks and benchmarks.

use rand::Rng;

use crate::error::Result;
use crate::regulated::{Formula, Interval, Jump, LipschitzPieces, StepFunction};

/// Random step function with at most `max_nodes` nodes (at least 2) and all
/// values in `[-amplitude, amplitude]`.
pub fn random_step<R: Rng + ?Sized>(rng: &mut R, interval: Interval, max_nodes: usize, amplitude: f64) -> StepFunction {
    let n = rng.random_range(2..=max_nodes.max(2));
    let mut nodes: Vec<f64> =
        (0..n - 2).map(|_| interval.a() + rng.random::<f64>() * interval.len()).collect();
    nodes.push(interval.a());
    nodes.push(interval.b());
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let value = |rng: &mut R| rng.random_range(-amplitude..=amplitude);
    let node_values = (0..nodes.len()).map(|_| value(rng)).collect();
    let piece_values = (0..nodes.len() - 1).map(|_| value(rng)).collect();
    StepFunction::new(interval, nodes, node_values, piece_values).expect("valid by construction")
}

/// Random step function on a fixed set of interior nodes.
pub fn random_step_on<R: Rng + ?Sized>(rng: &mut R, interval: Interval, interior: &[f64], amplitude: f64) -> Result<StepFunction> {
    let mut nodes = vec![interval.a()];
    nodes.extend_from_slice(interior);
    nodes.push(interval.b());
    let value = |rng: &mut R| rng.random_range(-amplitude..=amplitude);
    let node_values = (0..nodes.len()).map(|_| value(rng)).collect();
    let piece_values = (0..nodes.len() - 1).map(|_| value(rng)).collect();
    StepFunction::new(interval, nodes, node_values, piece_values)
}

/// Random piecewise-Lipschitz function with up to `max_pieces` pieces drawn
/// from the formula catalog and up to two explicit jumps.
pub fn random_lipschitz<R: Rng + ?Sized>(rng: &mut R, interval: Interval, max_pieces: usize) -> LipschitzPieces {
    let p = rng.random_range(1..=max_pieces.max(1));
    let mut breaks: Vec<f64> =
        (0..p - 1).map(|_| interval.a() + rng.random::<f64>() * interval.len()).collect();
    breaks.push(interval.a());
    breaks.push(interval.b());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let pieces = breaks
        .windows(2)
        .map(|w| match rng.random_range(0..3u8) {
            0 => Formula::affine(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0)),
            1 => Formula::power(rng.random_range(-1.0..1.0), rng.random_range(1.0..3.0), w[0]),
            _ => Formula::sin(rng.random_range(-1.0..1.0), rng.random_range(-4.0..4.0), rng.random_range(0.0..3.0)),
        })
        .collect();
    let jumps = (0..rng.random_range(0..3))
        .map(|_| {
            let at = interval.a() + interval.len() * rng.random_range(0.05..0.95);
            Jump::new(at, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .collect();
    LipschitzPieces::new(interval, breaks, pieces, jumps).expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regulated::Regulated;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_deterministic() {
        let iv = Interval::unit();
        let a = random_step(&mut ChaCha8Rng::seed_from_u64(4), iv, 8, 5.0);
        let b = random_step(&mut ChaCha8Rng::seed_from_u64(4), iv, 8, 5.0);
        assert_eq!(a, b);
        assert!(a.nodes().len() <= 8);
        assert!(a.sup_norm() <= 5.0);
        let f = random_lipschitz(&mut ChaCha8Rng::seed_from_u64(4), iv, 3);
        assert!(f.variation_bound().is_some());
    }
}
