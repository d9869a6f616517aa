#![allow(dead_code)]

use proptest::prelude::*;
use twoview_core::geometry::{Mat3, Point2, TriangulationProblem};

pub fn worked_problem() -> TriangulationProblem {
    let f = Mat3([[1.0, 1.0, 1.0], [0.0, 1.0, 1.0], [1.0, 3.0, 3.0]]);
    TriangulationProblem::from_parts(f, Point2::ORIGIN, Point2::ORIGIN).unwrap()
}

/// Product of 3×2 and 2×3 factors.
pub fn rank2(l: [[f64; 2]; 3], r: [[f64; 3]; 2]) -> Mat3 {
    Mat3(std::array::from_fn(|i| std::array::from_fn(|j| l[i][0] * r[0][j] + l[i][1] * r[1][j])))
}

pub fn coord() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

pub fn point() -> impl Strategy<Value = Point2> {
    (coord(), coord()).prop_map(|(x, y)| Point2::new(x, y))
}

/// Well-conditioned rank-2 matrices: both nonzero singular values within a
/// factor of 20 of each other.
pub fn rank2_matrix() -> impl Strategy<Value = Mat3> {
    (
        prop::array::uniform3(prop::array::uniform2(-1.0..1.0f64)),
        prop::array::uniform2(prop::array::uniform3(-1.0..1.0f64)),
    )
        .prop_map(|(l, r)| rank2(l, r))
        .prop_filter("well-conditioned rank 2", |m| {
            let s = m.singular_values();
            s[1] > s[0] / 20.0
        })
}

pub fn problem() -> impl Strategy<Value = TriangulationProblem> {
    (rank2_matrix(), point(), point())
        .prop_filter_map("valid problem", |(m, u1, u2)| TriangulationProblem::from_parts(m, u1, u2).ok())
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
