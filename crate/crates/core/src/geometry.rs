//! Geometric primitives: image points, 3×3 matrices, validated fundamental
//! matrices and the origin-translation that moves both measurements to the
//! origin.

use nalgebra::Matrix3;
use num_traits::Num;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative threshold on singular-value ratios used to decide rank 2.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("ZeroMatrix: fundamental matrix is identically zero")]
    ZeroMatrix,
    #[error("RankDeficient: sigma2/sigma1 = {ratio:e} is below the rank tolerance (rank <= 1)")]
    RankDeficient { ratio: f64 },
    #[error("FullRank: sigma3/sigma1 = {ratio:e} exceeds the rank tolerance (rank 3)")]
    FullRank { ratio: f64 },
    #[error("NonFinite: {0} contains a non-finite value")]
    NonFinite(&'static str),
    #[error("InvalidTolerance: rank tolerance {0} must lie in (0, 1)")]
    InvalidTolerance(f64),
}

/// A point in an image, in image units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Homogeneous lift `(x, y, 1)`.
    pub fn lift(&self) -> [f64; 3] {
        [self.x, self.y, 1.0]
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.x, self.y]
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Self { x: v[0], y: v[1] }
    }
}

/// Row-major 3×3 real matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub fn identity() -> Self {
        Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn from_row_slice(v: &[f64]) -> Self {
        assert_eq!(v.len(), 9, "Mat3 needs 9 entries");
        Mat3([[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]])
    }

    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.0;
        out.iter_mut().flatten().for_each(|v| *v *= s);
        Mat3(out)
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat3([[m[0][0], m[1][0], m[2][0]], [m[0][1], m[1][1], m[2][1]], [m[0][2], m[1][2], m[2][2]]])
    }

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn determinant(&self) -> f64 {
        self.to_nalgebra().determinant()
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> [f64; 3] {
        let mut s: Vec<f64> = self.to_nalgebra().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        [s[0], s[1], s[2]]
    }

    pub fn to_nalgebra(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|r, c| self.0[r][c])
    }

    pub fn from_nalgebra(m: &Matrix3<f64>) -> Self {
        Mat3(std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)])))
    }
}

/// A real 3×3 matrix of numerical rank two, stored with unit Frobenius norm
/// and its largest-magnitude entry positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalMatrix {
    m: Mat3,
    scale: f64,
}

impl FundamentalMatrix {
    pub fn new(m: Mat3) -> Result<Self, GeometryError> {
        validate_fundamental(m, DEFAULT_RANK_TOL)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.m.0
    }

    /// Signed factor `s` with `input = s · stored`. Multipliers computed for
    /// the stored matrix divide by `s` to refer to the input matrix.
    pub fn input_scale(&self) -> f64 {
        self.scale
    }
}

/// Checks that `m` has numerical rank two and returns it rescaled to unit
/// Frobenius norm, signed so that its largest-magnitude entry is positive.
pub fn validate_fundamental(m: Mat3, rank_tol: f64) -> Result<FundamentalMatrix, GeometryError> {
    if !(rank_tol > 0.0 && rank_tol < 1.0) {
        return Err(GeometryError::InvalidTolerance(rank_tol));
    }
    if !m.is_finite() {
        return Err(GeometryError::NonFinite("fundamental matrix"));
    }
    let norm = m.frobenius_norm();
    if norm == 0.0 {
        return Err(GeometryError::ZeroMatrix);
    }
    // Work on the rescaled matrix so that tiny or huge inputs do not underflow.
    let unit = m.scale(1.0 / norm);
    let [s1, s2, s3] = unit.singular_values();
    if s2 / s1 < rank_tol {
        return Err(GeometryError::RankDeficient { ratio: s2 / s1 });
    }
    if s3 / s1 > rank_tol {
        return Err(GeometryError::FullRank { ratio: s3 / s1 });
    }
    let mut pivot = 0.0f64;
    for v in unit.0.iter().flatten() {
        if v.abs() > pivot.abs() {
            pivot = *v;
        }
    }
    let (unit, scale) = if pivot < 0.0 { (unit.scale(-1.0), -norm) } else { (unit, norm) };
    Ok(FundamentalMatrix { m: unit, scale })
}

/// Entries of the translated matrix `W₂⁻ᵀ F W₁⁻¹`, named by position:
///
/// ```text
/// | a b c |
/// | d e f |
/// | g h i |
/// ```
///
/// `i` is the (3,3) entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NormalizedMatrix<T = f64> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub e: T,
    pub f: T,
    pub g: T,
    pub h: T,
    pub i: T,
}

impl<T: Clone> NormalizedMatrix<T> {
    pub fn from_rows(m: &[[T; 3]; 3]) -> Self {
        let [[a, b, c], [d, e, f], [g, h, i]] = m.clone();
        Self { a, b, c, d, e, f, g, h, i }
    }

    pub fn to_rows(&self) -> [[T; 3]; 3] {
        let n = self.clone();
        [[n.a, n.b, n.c], [n.d, n.e, n.f], [n.g, n.h, n.i]]
    }

    pub fn map<U>(&self, mut op: impl FnMut(&T) -> U) -> NormalizedMatrix<U> {
        NormalizedMatrix {
            a: op(&self.a),
            b: op(&self.b),
            c: op(&self.c),
            d: op(&self.d),
            e: op(&self.e),
            f: op(&self.f),
            g: op(&self.g),
            h: op(&self.h),
            i: op(&self.i),
        }
    }
}

impl<T: Num + Clone> NormalizedMatrix<T> {
    /// Exact cofactor determinant.
    pub fn determinant(&self) -> T {
        let NormalizedMatrix { a, b, c, d, e, f, g, h, i } = self.clone();
        a.clone() * (e.clone() * i.clone() - f.clone() * h.clone()) - b.clone() * (d.clone() * i - f * g.clone())
            + c * (d * h - e * g)
    }
}

impl NormalizedMatrix<f64> {
    pub fn to_mat3(&self) -> Mat3 {
        Mat3(self.to_rows())
    }
}

/// The data of a two-view triangulation instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangulationProblem {
    pub f: FundamentalMatrix,
    pub u1: Point2,
    pub u2: Point2,
}

impl TriangulationProblem {
    pub fn new(f: FundamentalMatrix, u1: Point2, u2: Point2) -> Result<Self, GeometryError> {
        if !u1.is_finite() {
            return Err(GeometryError::NonFinite("u1"));
        }
        if !u2.is_finite() {
            return Err(GeometryError::NonFinite("u2"));
        }
        Ok(Self { f, u1, u2 })
    }

    /// Validates `m` with the default rank tolerance and builds the problem.
    pub fn from_parts(m: Mat3, u1: Point2, u2: Point2) -> Result<Self, GeometryError> {
        Self::new(FundamentalMatrix::new(m)?, u1, u2)
    }
}

/// `W₂⁻ᵀ F W₁⁻¹` over any number type, with `W_k` the unit upper-triangular
/// translation by `-u_k`. Only additions and products are used, so the result
/// is exact for exact scalars.
pub fn normalize_entries<T: Num + Clone>(m: &[[T; 3]; 3], u1: &[T; 2], u2: &[T; 2]) -> NormalizedMatrix<T> {
    let [[f00, f01, f02], [f10, f11, f12], [f20, f21, f22]] = m.clone();
    let [u11, u12] = u1.clone();
    let [u21, u22] = u2.clone();
    // Right factor W₁⁻¹ replaces the last column by F·û₁.
    let c = f00.clone() * u11.clone() + f01.clone() * u12.clone() + f02;
    let f = f10.clone() * u11.clone() + f11.clone() * u12.clone() + f12;
    let last = f20.clone() * u11 + f21.clone() * u12 + f22;
    // Left factor W₂⁻ᵀ replaces the last row by û₂ᵀ·(F W₁⁻¹).
    let g = u21.clone() * f00.clone() + u22.clone() * f10.clone() + f20;
    let h = u21.clone() * f01.clone() + u22.clone() * f11.clone() + f21;
    let i = u21 * c.clone() + u22 * f.clone() + last;
    NormalizedMatrix { a: f00, b: f01, c, d: f10, e: f11, f, g, h, i }
}

/// Moves both measurements of `p` to the origin; see [`normalize_entries`].
pub fn normalize_pair(p: &TriangulationProblem) -> NormalizedMatrix {
    normalize_entries(p.f.rows(), &p.u1.to_array(), &p.u2.to_array())
}

/// `x̂₂ᵀ F x̂₁`.
pub fn epipolar_residual(f: &Mat3, x1: Point2, x2: Point2) -> f64 {
    let fx1 = f.mul_vec(x1.lift());
    x2.x * fx1[0] + x2.y * fx1[1] + fx1[2]
}

/// `‖x₁ − u₁‖² + ‖x₂ − u₂‖²`.
pub fn objective(x1: Point2, x2: Point2, u1: Point2, u2: Point2) -> f64 {
    let d = [x1.x - u1.x, x1.y - u1.y, x2.x - u2.x, x2.y - u2.y];
    d.iter().map(|v| v * v).sum()
}
