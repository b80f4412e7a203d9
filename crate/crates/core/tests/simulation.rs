use netkit::geometry::{AbsorbingBall, Domain, PlanarFunnel, PlanarFunnelSpec, StepOutcome};
use netkit::geometry::planar::MultiNeckRegion;
use netkit::mc_engine::{simulate_exit_probs, simulate_mfpt_2d, SimParams, Start};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quick(workers: usize) -> SimParams {
    SimParams { dt: 1e-3, n_paths: 300, seed: 42, workers: Some(workers), ..Default::default() }
}

#[test]
fn worker_count_does_not_change_results() {
    let f = PlanarFunnel::realize(&PlanarFunnelSpec::symmetric(0.05, 1.0, std::f64::consts::PI)).unwrap();
    let start = Start::Ball { center: f.head_center, radius: 0.5 * f.head_radius };
    let one = simulate_mfpt_2d(&f.region, &start, 1.0, &quick(1)).unwrap();
    let three = simulate_mfpt_2d(&f.region, &start, 1.0, &quick(3)).unwrap();
    assert_eq!(one, three);
}

#[test]
fn seed_changes_results() {
    let disk = AbsorbingBall::<2> { center: [0.0, 0.0], radius: 1.0 };
    let a = simulate_mfpt_2d(&disk, &Start::Point([0.0, 0.0]), 1.0, &quick(1)).unwrap();
    let mut p = quick(1);
    p.seed = 43;
    let b = simulate_mfpt_2d(&disk, &Start::Point([0.0, 0.0]), 1.0, &p).unwrap();
    assert_ne!(a.mean, b.mean);
}

#[test]
fn disk_mean_matches_exact() {
    let disk = AbsorbingBall::<2> { center: [0.0, 0.0], radius: 1.0 };
    let p = SimParams { dt: 1e-5, n_paths: 4000, seed: 5, adaptive: false, workers: Some(1), ..Default::default() };
    let e = simulate_mfpt_2d(&disk, &Start::Point([0.0, 0.0]), 1.0, &p).unwrap();
    assert!((e.mean - 0.25).abs() < 4.0 * e.stderr + 0.005, "{e:?}");
}

#[test]
fn exit_counts_add_up() {
    let r = MultiNeckRegion::new(&[(0.05, 1.0), (0.05, 1.0), (0.05, 1.0)], 1.5, 1.0).unwrap();
    let (p, e) = simulate_exit_probs(&r.region, &Start::Point([0.0, 0.0]), 1.0, &quick(1)).unwrap();
    assert_eq!(p.counts.iter().sum::<usize>(), e.n_absorbed);
    assert!((p.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn step_too_large_is_refused() {
    let disk = AbsorbingBall::<2> { center: [0.0, 0.0], radius: 0.01 };
    let p = SimParams { dt: 1.0, ..quick(1) };
    assert!(simulate_mfpt_2d(&disk, &Start::Point([0.0, 0.0]), 1.0, &p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Moved steps stay strictly inside and absorptions land on a window.
    #[test]
    fn funnel_steps_never_leak(seed in 0u64..1000, scale in 0.01f64..0.5) {
        let f = PlanarFunnel::realize(&PlanarFunnelSpec::symmetric(0.05, 1.0, std::f64::consts::PI)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pos = f.head_center;
        for _ in 0..2000 {
            let d = [scale * rng.random_range(-1.0..1.0), scale * rng.random_range(-1.0..1.0)];
            match f.region.advance(&pos, &d) {
                StepOutcome::Moved(q) => {
                    prop_assert!(f.region.contains(&q), "{q:?} escaped");
                    pos = q;
                }
                StepOutcome::Absorbed { at, window } => {
                    prop_assert_eq!(window, 0);
                    prop_assert!(f.region.window_distance(&at) < 1e-9);
                    pos = f.head_center;
                }
                StepOutcome::Rejected => {}
            }
        }
    }
}
