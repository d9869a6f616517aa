mod common;

use common::worked_problem;
use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use twoview_core::geometry::{epipolar_residual, objective, Point2};
use twoview_core::oracle::{oracle_minimize, OracleConfig};
use twoview_core::triangulate::{
    fundamental_from_cameras, recover_point_3d, synth_instance, triangulate, CameraPair, TriangulateConfig,
};

#[test]
fn minimizer_is_optimal_among_real_points() {
    let cfg = TriangulateConfig::default();
    for seed in 0..300 {
        let p = synth_instance(seed, 0.05).problem;
        let r = triangulate(&p, &cfg).unwrap();
        let m = r.minimizer.unwrap();
        assert!(m.is_real && !m.degenerate);
        for cp in r.critical_points.iter().filter(|c| c.is_feasible(cfg.recovery.kkt_tol)) {
            assert!(m.objective <= cp.objective, "seed {seed}");
        }
        // The stored objective is the reprojection cost of the returned points.
        assert_eq!(m.objective, objective(m.x1_real(), m.x2_real(), p.u1, p.u2));
        assert!(r.n_distinct <= 6);
    }
}

#[test]
fn minimizer_is_no_worse_than_the_oracle() {
    let cfg = TriangulateConfig::default();
    for seed in 500..520 {
        let p = synth_instance(seed, 0.05).problem;
        let m = triangulate(&p, &cfg).unwrap().minimizer.unwrap();
        let o = oracle_minimize(&p, &OracleConfig::default()).unwrap();
        assert!(m.objective <= o.value + 1e-6 * (1.0 + o.value), "seed {seed}");
    }
}

#[test]
fn worked_minimizer_is_reproduced_by_the_oracle() {
    let p = worked_problem();
    let m = triangulate(&p, &TriangulateConfig::default()).unwrap().minimizer.unwrap();
    let o = oracle_minimize(&p, &OracleConfig::default()).unwrap();
    assert!((m.objective - o.value).abs() <= 1e-9);
    assert!((m.x2[0].re - o.x2.x).abs() <= 1e-6 && (m.x2[1].re - o.x2.y).abs() <= 1e-6);
}

fn random_cameras(rng: &mut ChaCha8Rng) -> CameraPair {
    let axis =
        nalgebra::Unit::new_normalize(Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 1.0));
    let rot = nalgebra::Rotation3::from_axis_angle(&axis, rng.random_range(-0.3..0.3)).into_inner();
    let t = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-0.3..0.3));
    CameraPair::from_pose(&Matrix3::identity(), &Vector3::zeros(), &rot, &t).unwrap()
}

#[test]
fn camera_fundamental_matrix_annihilates_projections() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let cams = random_cameras(&mut rng);
        let f = fundamental_from_cameras(&cams).unwrap();
        for _ in 0..100 {
            let x = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(2.0..5.0));
            let (x1, x2) = (CameraPair::project(&cams.p1, &x), CameraPair::project(&cams.p2, &x));
            assert!(epipolar_residual(f.matrix(), x1, x2).abs() <= 1e-10);
        }
    }
}

#[test]
fn triangulated_points_reconstruct_better_than_raw_measurements() {
    let cfg = TriangulateConfig::default();
    let (mut raw_err, mut mle_err) = (0.0, 0.0);
    for seed in 0..200 {
        let inst = synth_instance(seed, 0.01);
        let m = triangulate(&inst.problem, &cfg).unwrap().minimizer.unwrap();
        // Corrected correspondences are exactly consistent, so the DLT solve is exact.
        let from_mle = recover_point_3d(&inst.cameras, m.x1_real(), m.x2_real()).unwrap();
        let reproj = CameraPair::project(&inst.cameras.p1, &from_mle);
        assert!((reproj.x - m.x1[0].re).abs() <= 1e-8 && (reproj.y - m.x1[1].re).abs() <= 1e-8, "seed {seed}");
        if let Ok(from_raw) = recover_point_3d(&inst.cameras, inst.problem.u1, inst.problem.u2) {
            raw_err += (from_raw - inst.point).norm();
            mle_err += (from_mle - inst.point).norm();
        }
    }
    assert!(mle_err <= raw_err * 1.05, "mle {mle_err} raw {raw_err}");
}

#[test]
fn reprojection_cost_scales_with_noise() {
    let cfg = TriangulateConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sigma = 0.01;
    let noise = Normal::new(0.0, sigma).unwrap();
    let mut total = 0.0;
    let n = 400;
    for seed in 0..n {
        let inst = synth_instance(seed, 0.0);
        let jitter = |p: Point2, rng: &mut ChaCha8Rng| Point2::new(p.x + noise.sample(rng), p.y + noise.sample(rng));
        let u1 = jitter(inst.x1, &mut rng);
        let u2 = jitter(inst.x2, &mut rng);
        let p = twoview_core::geometry::TriangulationProblem::new(inst.problem.f, u1, u2).unwrap();
        total += triangulate(&p, &cfg).unwrap().minimizer.unwrap().objective;
    }
    // Removing one constraint from four Gaussian coordinates leaves one
    // degree of freedom in expectation: E[cost] = σ².
    let mean = total / n as f64;
    assert!((mean / (sigma * sigma) - 1.0).abs() < 0.25, "mean cost {mean:e}");
}
