use jacobi::mc::{corner_radial_part, estimate_moments, normalized_traces, simulate_unitary_bm, MCConfig, C64};
use jacobi_core::exact::{int, HalfIntegerParams};
use jacobi_core::moments::finite_moment;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small(d: usize, samples: usize, steps: usize) -> MCConfig {
    let mut cfg = MCConfig::new(d, d / 2, d / 2, 1.0);
    cfg.samples = samples;
    cfg.steps = steps;
    cfg.seed = 11;
    cfg.streams = 4;
    cfg
}

#[test]
fn unitary_over_a_thousand_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = simulate_unitary_bm(32, 1.0 / 32.0, 1000, &mut rng);
    let defect = (u.adjoint() * &u - DMatrix::<C64>::identity(32, 32)).norm();
    assert!(defect < 1e-10, "{defect}");
}

#[test]
fn corner_spectrum_in_unit_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (d, m, p) in [(8, 3, 5), (10, 5, 5), (6, 1, 6)] {
        let u = simulate_unitary_bm(d, 0.7, 60, &mut rng);
        let j = corner_radial_part(&u, m, p);
        for x in SymmetricEigen::new(j).eigenvalues.iter() {
            assert!((-1e-10..=1.0 + 1e-10).contains(x), "eigenvalue {x}");
        }
    }
}

#[test]
fn full_width_corner_is_identity() {
    // p = d makes Y a block of full rows of U, so Y Y* = I
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u = simulate_unitary_bm(5, 1.3, 20, &mut rng);
    let traces = normalized_traces(&corner_radial_part(&u, 2, 5), 3);
    for x in traces {
        assert!((x - 1.0).abs() < 1e-12);
    }
}

#[test]
fn bit_identical_reruns_and_thread_counts() {
    let cfg = small(6, 40, 20);
    let a = estimate_moments(&cfg, 3).unwrap();
    let b = estimate_moments(&cfg, 3).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let c = pool.install(|| estimate_moments(&cfg, 3).unwrap());
    assert_eq!(a.moments, b.moments);
    assert_eq!(a.moments, c.moments);
    let mut other = cfg.clone();
    other.seed += 1;
    assert_ne!(estimate_moments(&other, 3).unwrap().moments, a.moments);
}

#[test]
fn stderr_matches_sample_deviation() {
    // one stream, so the stream's draws can be replayed directly
    let mut cfg = small(4, 25, 10);
    cfg.streams = 1;
    let r = estimate_moments(&cfg, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(0);
    let xs: Vec<f64> = (0..25)
        .map(|_| {
            let u = simulate_unitary_bm(4, cfg.t * cfg.time_scale, cfg.steps, &mut rng);
            normalized_traces(&corner_radial_part(&u, 2, 2), 1)[0]
        })
        .collect();
    let mean = xs.iter().sum::<f64>() / 25.0;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 24.0;
    assert!((r.moments[0].mean - mean).abs() < 1e-12);
    assert!((r.moments[0].stderr - (var / 25.0).sqrt()).abs() < 1e-12);
}

#[test]
fn calibration_at_small_size() {
    let cfg = small(8, 1500, 100);
    let r = estimate_moments(&cfg, 2).unwrap();
    let first = 0.5 + 0.5 * (-1.0f64).exp();
    let e1 = &r.moments[0];
    assert!((e1.mean - first).abs() < 3.0 * e1.stderr + 0.02, "{e1:?} vs {first}");
    let exact = finite_moment(2, &HalfIntegerParams::new(4, int(4), 8).unwrap()).unwrap().eval(1.0) / 4.0;
    let e2 = &r.moments[1];
    assert!((e2.mean - exact).abs() < 3.0 * e2.stderr + 0.05, "{e2:?} vs {exact}");
}

#[test]
fn doubling_steps_moves_little() {
    let coarse = estimate_moments(&small(6, 600, 25), 1).unwrap().moments[0].clone();
    let fine = estimate_moments(&small(6, 600, 50), 1).unwrap().moments[0].clone();
    assert!((coarse.mean - fine.mean).abs() < 3.0 * coarse.stderr.max(fine.stderr), "{coarse:?} {fine:?}");
}
