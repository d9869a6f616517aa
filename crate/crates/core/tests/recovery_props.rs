mod common;

use common::problem;
use num_complex::Complex64;
use proptest::prelude::*;
use twoview_core::geometry::normalize_pair;
use twoview_core::lagrange::{cramer_numerators, det_a};
use twoview_core::recovery::{constraint_value, lagrangian_gradient, CVec2};
use twoview_core::triangulate::{synth_instance, triangulate, TriangulateConfig};

fn real(v: [f64; 2]) -> CVec2 {
    v.map(|x| Complex64::new(x, 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gradients_match_finite_differences(p in problem(), y in prop::array::uniform4(-2.0..2.0f64), lam in -3.0..3.0f64) {
        let n = normalize_pair(&p);
        let lagrangian = |y: [f64; 4]| {
            let (y1, y2) = (real([y[0], y[1]]), real([y[2], y[3]]));
            0.5 * y.iter().map(|v| v * v).sum::<f64>() + lam * constraint_value(&n, &y1, &y2).re
        };
        let g = lagrangian_gradient(&n, Complex64::new(lam, 0.0), &real([y[0], y[1]]), &real([y[2], y[3]]));
        let h = 1e-6;
        for k in 0..4 {
            let (mut up, mut down) = (y, y);
            up[k] += h;
            down[k] -= h;
            let fd = (lagrangian(up) - lagrangian(down)) / (2.0 * h);
            prop_assert!((fd - g[k].re).abs() <= 1e-6, "k = {}: {} vs {}", k, fd, g[k]);
        }
    }
}

#[test]
fn critical_points_satisfy_the_system() {
    let cfg = TriangulateConfig::default();
    for seed in 0..200 {
        let p = synth_instance(seed, 0.01).problem;
        let n = normalize_pair(&p);
        let r = triangulate(&p, &cfg).unwrap();
        let numerators = cramer_numerators(&n);
        for cp in r.critical_points.iter().filter(|c| !c.degenerate) {
            assert!(cp.kkt_resid <= 1e-8, "seed {seed}: kkt {:e}", cp.kkt_resid);
            assert!(cp.epipolar_resid <= 1e-8, "seed {seed}: epipolar {:e}", cp.epipolar_resid);
            let d = det_a(&n).eval_complex(cp.lambda);
            let pairs = [
                (&numerators.p11, cp.y1[0]),
                (&numerators.p12, cp.y1[1]),
                (&numerators.p21, cp.y2[0]),
                (&numerators.p22, cp.y2[1]),
            ];
            for (poly, y) in pairs {
                let want = poly.eval_complex(cp.lambda);
                // Relative to the size of the numerator's terms.
                let scale = poly.abs_eval(cp.lambda.norm());
                assert!((d * y - want).norm() <= 1e-9 * scale, "seed {seed}: {} vs {want}", d * y);
            }
        }
    }
}

#[test]
fn conjugate_roots_give_conjugate_points() {
    let cfg = TriangulateConfig::default();
    for seed in 0..200 {
        let r = triangulate(&synth_instance(seed, 0.01).problem, &cfg).unwrap();
        for cp in r.critical_points.iter().filter(|c| c.lambda.im > 0.0) {
            let twin =
                r.critical_points.iter().find(|c| c.lambda == cp.lambda.conj()).expect("conjugate root reported");
            for (a, b) in cp.x1.iter().chain(&cp.x2).zip(twin.x1.iter().chain(&twin.x2)) {
                assert_eq!(*a, b.conj(), "seed {seed}");
            }
        }
    }
}
