//! Seeded synthetic two-view scenes with Gaussian measurement noise.
//!
//! Cameras have unit focal length and principal point at the origin. The
//! first camera is `[I | 0]`; the second sits at a baseline of 0.4 to 1.0
//! units in a uniformly random direction, slightly rotated. The 3-D point is
//! drawn from a unit box centered three units in front of the first camera.
//! Scenes are redrawn until the point is visible in both views and both
//! epipoles lie within 100 units of the principal point; near-rectified pairs
//! sit next to the stratum where the multiplier polynomial loses degree.

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::camera::{camera_center, fundamental_from_cameras, CameraPair};
use crate::geometry::{Point2, TriangulationProblem};

const MAX_TRIES: usize = 100;
const MIN_DEPTH: f64 = 0.5;
const MAX_IMAGE_RADIUS: f64 = 2.0;
const MAX_EPIPOLE_RADIUS: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticInstance {
    pub seed: u64,
    pub noise_sigma: f64,
    /// Noisy measurements and the camera-induced fundamental matrix.
    pub problem: TriangulationProblem,
    pub cameras: CameraPair,
    pub point: Vector3<f64>,
    /// Noise-free projections of `point`.
    pub x1: Point2,
    pub x2: Point2,
}

fn sample_scene(rng: &mut ChaCha8Rng) -> (CameraPair, Vector3<f64>) {
    loop {
        let axis = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let angle = rng.random_range(0.0..0.3);
        let rot = match Unit::try_new(axis, 1e-6) {
            Some(axis) => Rotation3::from_axis_angle(&axis, angle).into_inner(),
            None => continue,
        };
        let dir = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if dir.norm() < 1e-3 || dir.norm() > 1.0 {
            continue;
        }
        let center = dir.normalize() * rng.random_range(0.4..1.0);
        let cams = CameraPair::from_pose(&Matrix3::identity(), &Vector3::zeros(), &rot, &(-rot * center))
            .expect("rotation-based cameras have rank 3");
        let point = Vector3::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), rng.random_range(2.5..3.5));
        return (cams, point);
    }
}

fn acceptable(cams: &CameraPair, point: &Vector3<f64>) -> bool {
    let visible = [&cams.p1, &cams.p2].iter().all(|p| {
        let x = CameraPair::project(p, point);
        CameraPair::depth(p, point) > MIN_DEPTH && x.x.hypot(x.y) < MAX_IMAGE_RADIUS
    });
    // An epipole at infinity zeroes bd - ae and drops the polynomial degree.
    let epipoles_finite = [(&cams.p1, &cams.p2), (&cams.p2, &cams.p1)].iter().all(|(p, q)| {
        let e = *p * camera_center(q);
        e[0].hypot(e[1]) <= MAX_EPIPOLE_RADIUS * e[2].abs()
    });
    visible && epipoles_finite
}

/// Deterministic in `seed`. `noise_sigma` is the standard deviation of the
/// isotropic Gaussian noise added to each image coordinate.
pub fn synth_instance(seed: u64, noise_sigma: f64) -> SyntheticInstance {
    assert!(noise_sigma >= 0.0 && noise_sigma.is_finite(), "noise_sigma must be finite and >= 0");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scene = sample_scene(&mut rng);
    for _ in 1..MAX_TRIES {
        if acceptable(&scene.0, &scene.1) {
            break;
        }
        scene = sample_scene(&mut rng);
    }
    let (cameras, point) = scene;
    let f = fundamental_from_cameras(&cameras).expect("synthetic baseline is nonzero");
    let x1 = CameraPair::project(&cameras.p1, &point);
    let x2 = CameraPair::project(&cameras.p2, &point);
    let (u1, u2) = if noise_sigma > 0.0 {
        let normal = Normal::new(0.0, noise_sigma).expect("valid sigma");
        let mut jitter = |p: Point2| Point2::new(p.x + normal.sample(&mut rng), p.y + normal.sample(&mut rng));
        (jitter(x1), jitter(x2))
    } else {
        (x1, x2)
    };
    let problem = TriangulationProblem::new(f, u1, u2).expect("finite synthetic data");
    SyntheticInstance { seed, noise_sigma, problem, cameras, point, x1, x2 }
}

/// Per-instance seeds of a dataset, drawn from one master seed so that
/// datasets with nearby master seeds do not overlap.
pub fn instance_seeds(seed: u64, n: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.next_u64()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::epipolar_residual;

    #[test]
    fn deterministic() {
        assert_eq!(synth_instance(42, 0.01), synth_instance(42, 0.01));
        assert_ne!(synth_instance(42, 0.01).problem, synth_instance(43, 0.01).problem);
    }

    #[test]
    fn noiseless_projections_are_consistent() {
        for seed in 0..50 {
            let s = synth_instance(seed, 0.0);
            assert_eq!(s.problem.u1, s.x1);
            let r = epipolar_residual(s.problem.f.matrix(), s.x1, s.x2);
            assert!(r.abs() < 1e-12, "seed {seed}: {r}");
            assert!(acceptable(&s.cameras, &s.point));
            let baseline = crate::triangulate::camera::camera_center(&s.cameras.p2);
            let c2 = baseline.xyz() / baseline[3];
            assert!(c2.norm() >= 0.1 * s.point.norm());
        }
    }
}
