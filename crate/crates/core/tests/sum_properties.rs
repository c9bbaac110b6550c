use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stieltjes_core::partition::random_partition;
use stieltjes_core::regulated::Regulated;
use stieltjes_core::sampling::{random_lipschitz, random_step};
use stieltjes_core::*;

fn unit() -> Interval {
    Interval::unit()
}

#[test]
fn sum_bounds_hold_for_random_step_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..100 {
        let f = random_step(&mut rng, unit(), 8, 5.0);
        let g = random_step(&mut rng, unit(), 8, 5.0);
        let extra: Vec<f64> = if i % 2 == 0 { g.nodes().to_vec() } else { Vec::new() };
        let p = random_partition(unit(), rng.random_range(1..30), &extra, TagMode::Free, i).unwrap();
        let r = check_sum_bounds(&f, &g, &p).unwrap();
        assert!(r.all_hold(), "{r:?}");
        assert!(r.checks().iter().all(|(_, c)| c.holds().is_some()));
    }
}

#[test]
fn young_sum_equals_riemann_sum_for_continuous_integrators() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..50 {
        let f = random_step(&mut rng, unit(), 6, 3.0);
        let g = LipschitzPieces::single(unit(), Formula::sin(rng.random_range(-2.0..2.0), 3.0, 0.1)).unwrap();
        let p = random_partition(unit(), 20, f.nodes(), TagMode::Free, i).unwrap();
        let s = sum_s(&f, &g, &p).unwrap().value;
        let sy = sum_sy(&f, &g, &p).unwrap().value;
        assert!((s - sy).abs() <= 1e-12, "{s} vs {sy}");
    }
}

#[test]
fn sums_are_linear_in_the_integrand() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..100 {
        let f = random_step(&mut rng, unit(), 6, 3.0);
        let h = random_step(&mut rng, unit(), 6, 3.0);
        let g = random_step(&mut rng, unit(), 6, 3.0);
        let (l, m) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let combo = f.scale(l).add(&h.scale(m)).unwrap();
        let p = random_partition(unit(), 15, &[], TagMode::Free, i).unwrap();
        for sum in [sum_s, sum_sy] {
            let lhs = sum(&combo, &g, &p).unwrap().value;
            let rhs = l * sum(&f, &g, &p).unwrap().value + m * sum(&h, &g, &p).unwrap().value;
            assert!((lhs - rhs).abs() <= 1e-12, "{lhs} vs {rhs}");
        }
    }
}

#[test]
fn constant_integrand_telescopes() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..50 {
        let g = random_lipschitz(&mut rng, unit(), 3);
        let c = StepFunction::constant(unit(), 2.5);
        let p = random_partition(unit(), 25, &g.jump_points(), TagMode::Free, i).unwrap();
        let expected = 2.5 * (g.eval(1.0).unwrap() - g.eval(0.0).unwrap());
        assert!((sum_s(&c, &g, &p).unwrap().value - expected).abs() <= 1e-12);
        assert!((sum_sy(&c, &g, &p).unwrap().value - expected).abs() <= 1e-12);
    }
}
