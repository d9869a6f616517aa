//! Projective camera pairs: the fundamental matrix they induce and linear
//! (DLT) recovery of the 3-D point behind a correspondence.

use nalgebra::{Matrix3, Matrix3x4, Matrix4, RowVector4, Vector3, Vector4};
use thiserror::Error;

use crate::geometry::{validate_fundamental, FundamentalMatrix, GeometryError, Mat3, Point2, DEFAULT_RANK_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CameraError {
    #[error("RankDeficientCamera: camera matrix {0} does not have rank 3")]
    RankDeficientCamera(usize),
    #[error("CoincidentCenters: both cameras share a center, there is no epipolar geometry")]
    CoincidentCenters,
    #[error("PointAtInfinity: the triangulated point has a vanishing homogeneous coordinate")]
    PointAtInfinity,
    #[error("IllConditioned: sigma3/sigma4 = {ratio:.3} of the DLT system is below 10")]
    IllConditioned { ratio: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Two finite projective cameras `x ~ P X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPair {
    pub p1: Matrix3x4<f64>,
    pub p2: Matrix3x4<f64>,
}

impl CameraPair {
    pub fn new(p1: Matrix3x4<f64>, p2: Matrix3x4<f64>) -> Result<Self, CameraError> {
        for (k, p) in [p1, p2].iter().enumerate() {
            let s = p.singular_values();
            if s.min() <= 1e-12 * s.max() {
                return Err(CameraError::RankDeficientCamera(k + 1));
            }
        }
        Ok(Self { p1, p2 })
    }

    /// `P = K[R | t]` with `K = I` from a rotation and translation.
    pub fn from_pose(
        r1: &Matrix3<f64>,
        t1: &Vector3<f64>,
        r2: &Matrix3<f64>,
        t2: &Vector3<f64>,
    ) -> Result<Self, CameraError> {
        let pose = |r: &Matrix3<f64>, t: &Vector3<f64>| {
            let mut p = Matrix3x4::zeros();
            p.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
            p.set_column(3, t);
            p
        };
        Self::new(pose(r1, t1), pose(r2, t2))
    }

    pub fn project(p: &Matrix3x4<f64>, x: &Vector3<f64>) -> Point2 {
        let h = p * x.push(1.0);
        Point2::new(h[0] / h[2], h[1] / h[2])
    }

    /// Depth-like third homogeneous coordinate of `P X̂`.
    pub fn depth(p: &Matrix3x4<f64>, x: &Vector3<f64>) -> f64 {
        (p * x.push(1.0))[2]
    }
}

/// Null vector of a rank-3 camera from its 3×3 column minors.
pub fn camera_center(p: &Matrix3x4<f64>) -> Vector4<f64> {
    let minor = |skip: usize| {
        let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
        Matrix3::from_fn(|r, c| p[(r, cols[c])]).determinant()
    };
    Vector4::new(minor(0), -minor(1), minor(2), -minor(3))
}

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0)
}

/// `F = [e₂]ₓ P₂ P₁⁺`, where `e₂ = P₂ C₁` is the second epipole.
pub fn fundamental_from_cameras(cams: &CameraPair) -> Result<FundamentalMatrix, CameraError> {
    let c1 = camera_center(&cams.p1);
    let e2 = cams.p2 * c1;
    if e2.norm() <= 1e-12 * cams.p2.norm() * c1.norm() {
        return Err(CameraError::CoincidentCenters);
    }
    let p1 = cams.p1;
    let gram = (p1 * p1.transpose()).try_inverse().ok_or(CameraError::RankDeficientCamera(1))?;
    let pinv = p1.transpose() * gram;
    let f = skew(&e2) * cams.p2 * pinv;
    Ok(validate_fundamental(Mat3::from_nalgebra(&f), DEFAULT_RANK_TOL)?)
}

/// Homogeneous DLT: the right singular vector of the smallest singular value
/// of the stacked constraints `x·p₃ᵀ − p₁ᵀ`, `y·p₃ᵀ − p₂ᵀ` of both views.
pub fn recover_point_3d(cams: &CameraPair, x1: Point2, x2: Point2) -> Result<Vector3<f64>, CameraError> {
    let rows = |p: &Matrix3x4<f64>, x: Point2| -> [RowVector4<f64>; 2] {
        [p.row(2) * x.x - p.row(0), p.row(2) * x.y - p.row(1)]
    };
    let [r0, r1] = rows(&cams.p1, x1);
    let [r2, r3] = rows(&cams.p2, x2);
    let a = Matrix4::from_rows(&[r0, r1, r2, r3]);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let (s3, s4) = (svd.singular_values[order[2]], svd.singular_values[order[3]]);
    // Floor at roundoff so that an exactly singular pair cannot look well separated.
    let s1 = svd.singular_values[order[0]];
    let ratio = s3 / s4.max(f64::EPSILON * s1);
    if ratio < 10.0 {
        return Err(CameraError::IllConditioned { ratio });
    }
    let h = v_t.row(order[3]).transpose();
    if h[3].abs() <= 1e-12 * h.norm() {
        return Err(CameraError::PointAtInfinity);
    }
    Ok(Vector3::new(h[0] / h[3], h[1] / h[3], h[2] / h[3]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::epipolar_residual;
    use nalgebra::Rotation3;

    fn pair() -> CameraPair {
        let r2 = Rotation3::from_euler_angles(0.05, -0.2, 0.1).into_inner();
        CameraPair::from_pose(&Matrix3::identity(), &Vector3::zeros(), &r2, &Vector3::new(-0.6, 0.1, 0.05)).unwrap()
    }

    #[test]
    fn center_is_null_vector() {
        let cams = pair();
        let c = camera_center(&cams.p2);
        assert!((cams.p2 * c).norm() < 1e-12);
    }

    #[test]
    fn lateral_translation_gives_skew_pattern() {
        let cams = CameraPair::from_pose(
            &Matrix3::identity(),
            &Vector3::zeros(),
            &Matrix3::identity(),
            &Vector3::new(-1.0, 0.0, 0.0),
        )
        .unwrap();
        let f = fundamental_from_cameras(&cams).unwrap();
        let m = f.rows();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = [[0.0, 0.0, 0.0], [0.0, 0.0, -s], [0.0, s, 0.0]];
        for r in 0..3 {
            for c in 0..3 {
                assert!((m[r][c].abs() - want[r][c].abs()).abs() < 1e-12);
            }
        }
        assert!(m[1][2] * m[2][1] < 0.0);
        for k in 0..50 {
            let x = Vector3::new(0.1 * k as f64 - 2.0, 0.3 - 0.01 * k as f64, 2.0 + 0.05 * k as f64);
            let r = epipolar_residual(f.matrix(), CameraPair::project(&cams.p1, &x), CameraPair::project(&cams.p2, &x));
            assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn coincident_centers() {
        let r2 = Rotation3::from_euler_angles(0.0, 0.3, 0.0).into_inner();
        let cams = CameraPair::from_pose(&Matrix3::identity(), &Vector3::zeros(), &r2, &Vector3::zeros()).unwrap();
        assert_eq!(fundamental_from_cameras(&cams), Err(CameraError::CoincidentCenters));
        let x = Vector3::new(0.2, -0.1, 3.0);
        let err = recover_point_3d(&cams, CameraPair::project(&cams.p1, &x), CameraPair::project(&cams.p2, &x));
        assert!(matches!(err, Err(CameraError::IllConditioned { .. })), "{err:?}");
    }

    #[test]
    fn noiseless_round_trip() {
        let cams = pair();
        let x = Vector3::new(0.3, -0.2, 3.1);
        let got =
            recover_point_3d(&cams, CameraPair::project(&cams.p1, &x), CameraPair::project(&cams.p2, &x)).unwrap();
        assert!((got - x).norm() < 1e-9);
    }

    #[test]
    fn rank_deficient_camera() {
        let mut p = Matrix3x4::zeros();
        p[(0, 0)] = 1.0;
        assert_eq!(CameraPair::new(p, pair().p2), Err(CameraError::RankDeficientCamera(1)));
    }
}
