//! Seeded inputs shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stieltjes_core::sampling::{random_lipschitz, random_step};
use stieltjes_core::{Formula, Gauge, Interval, Jump, LipschitzPieces, MonotoneJumps, StepFunction};

pub fn step_pair(max_nodes: usize, seed: u64) -> (StepFunction, StepFunction) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let iv = Interval::unit();
    (random_step(&mut rng, iv, max_nodes, 5.0), random_step(&mut rng, iv, max_nodes, 5.0))
}

/// A piecewise-Lipschitz integrand and a monotone integrator with jumps.
pub fn smooth_pair(seed: u64) -> (LipschitzPieces, MonotoneJumps) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let iv = Interval::unit();
    let g = MonotoneJumps::new(iv, Formula::power(1.0, 0.5, 0.0), vec![Jump::new(0.4, 0.3, 0.1), Jump::new(0.8, 0.0, 0.2)])
        .expect("valid fixture");
    (random_lipschitz(&mut rng, iv, 3), g)
}

/// The forcing gauge the gauge oracle uses at `level`, anchored at `points`.
pub fn forcing_gauge(level: u32, points: &[f64]) -> Gauge {
    let cap = (-(level as f64)).exp2();
    Gauge::forcing(Interval::unit(), cap, cap * cap, points).expect("valid fixture")
}
