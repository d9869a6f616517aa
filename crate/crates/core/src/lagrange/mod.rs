//! The multiplier polynomial of the stationarity system.
//!
//! With the measurements translated to the origin, the stationarity
//! conditions of the Lagrangian form a 4×4 linear system `A_λ y = −λ(c,f,g,h)ᵀ`
//! in the unknowns `(y₂₁, y₂₂, y₁₁, y₁₂)`. Cramer's rule gives each unknown as
//! `p_kl(λ) / det(A_λ)`, where both numerator and denominator are quartics.
//! Substituting into the epipolar constraint and clearing denominators gives
//! `T(λ) = −p₂ᵀ F′ p₁` with `p_k = (p_k1, p_k2, det A_λ)`. The expanded product
//! has nominal degree 8; its λ⁷ coefficient vanishes identically and its λ⁸
//! coefficient is `(bd − ae)³ det F′`, so for rank-2 input `T` has degree 6.
//!
//! Everything here is generic over [`Scalar`], so the same code runs in
//! floating point and over exact rationals.

pub mod polynomial;
pub mod reference;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};
use thiserror::Error;

use crate::geometry::NormalizedMatrix;
pub use polynomial::{Poly, RationalPolynomial, RealPolynomial, Scalar};

/// Default relative bound on the λ⁷ and λ⁸ residues before truncation.
pub const DEFAULT_TRUNC_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LagrangeError {
    #[error(
        "TruncationViolation: high coefficients (λ^7 = {c7:e}, λ^8 = {c8:e}) exceed {tol:e} relative to max |coeff| = {max:e}"
    )]
    TruncationViolation { c7: f64, c8: f64, max: f64, tol: f64 },
    #[error("NotRankDeficient: exact determinant of the matrix is nonzero")]
    NotRankDeficient,
    #[error("RankTooLow: every 2x2 minor vanishes, the matrix has rank <= 1")]
    RankTooLow,
    #[error("InvalidTolerance: truncation tolerance {0} must lie in (0, 1)")]
    InvalidTolerance(f64),
    #[error("NonRepresentable: {0} cannot be converted to an exact rational")]
    NonRepresentable(f64),
}

/// `det(A_λ)` and the Cramer numerators `p_kl = det(A_λ)·y_kl`.
#[derive(Debug, Clone, PartialEq)]
pub struct CramerNumerators<T> {
    pub p11: Poly<T>,
    pub p12: Poly<T>,
    pub p21: Poly<T>,
    pub p22: Poly<T>,
}

/// `(bd − ae)²λ⁴ − (a² + b² + d² + e²)λ² + 1`.
pub fn det_a<T: Scalar>(n: &NormalizedMatrix<T>) -> Poly<T> {
    let NormalizedMatrix { a, b, d, e, .. } = n.clone();
    let k = b.clone() * d.clone() - a.clone() * e.clone();
    let s = a.clone() * a + b.clone() * b + d.clone() * d + e.clone() * e;
    Poly::new(vec![T::one(), T::zero(), -s, T::zero(), k.clone() * k])
}

/// Closed-form quartics `λ[κ·m₃λ³ + m₂λ² + m₁λ − m₀]`, with `κ = bd − ae`.
pub fn cramer_numerators<T: Scalar>(n: &NormalizedMatrix<T>) -> CramerNumerators<T> {
    let NormalizedMatrix { a, b, c, d, e, f, g, h, .. } = n.clone();
    let k = b.clone() * d.clone() - a.clone() * e.clone();
    let quartic = |m3: T, m2: T, m1: T, m0: T| Poly::new(vec![T::zero(), -m0, m1, m2, k.clone() * m3]);
    let sq = |x: &T| x.clone() * x.clone();

    let p21 = quartic(
        e.clone() * g.clone() - d.clone() * h.clone(),
        sq(&d) * c.clone() + sq(&e) * c.clone() - a.clone() * d.clone() * f.clone() - b.clone() * e.clone() * f.clone(),
        a.clone() * g.clone() + b.clone() * h.clone(),
        c.clone(),
    );
    let p22 = quartic(
        a.clone() * h.clone() - b.clone() * g.clone(),
        sq(&a) * f.clone() + sq(&b) * f.clone() - a.clone() * c.clone() * d.clone() - b.clone() * c.clone() * e.clone(),
        d.clone() * g.clone() + e.clone() * h.clone(),
        f.clone(),
    );
    let p11 = quartic(
        c.clone() * e.clone() - b.clone() * f.clone(),
        sq(&b) * g.clone() + sq(&e) * g.clone() - a.clone() * b.clone() * h.clone() - d.clone() * e.clone() * h.clone(),
        a.clone() * c.clone() + d.clone() * f.clone(),
        g.clone(),
    );
    let p12 = quartic(
        a.clone() * f.clone() - c.clone() * d.clone(),
        sq(&a) * h.clone() + sq(&d) * h.clone() - a.clone() * b.clone() * g.clone() - d.clone() * e.clone() * g.clone(),
        b.clone() * c.clone() + e.clone() * f.clone(),
        h,
    );
    CramerNumerators { p11, p12, p21, p22 }
}

/// The full degree-8 product `−p₂ᵀ F′ p₁`, before any truncation.
pub fn expand_product<T: Scalar>(n: &NormalizedMatrix<T>) -> Poly<T> {
    let det = det_a(n);
    let CramerNumerators { p11, p12, p21, p22 } = cramer_numerators(n);
    let p2 = [&p21, &p22, &det];
    let p1 = [&p11, &p12, &det];
    let rows = n.to_rows();
    let mut acc = Poly::zero();
    for (r, row) in rows.iter().enumerate() {
        for (c, entry) in row.iter().enumerate() {
            if entry.is_zero() {
                continue;
            }
            acc = &acc + &(p2[r] * p1[c]).scaled(entry);
        }
    }
    -&acc
}

/// Floating-point `T(λ)` of degree at most six.
///
/// Fails if the discarded λ⁷/λ⁸ coefficients are not negligible, which
/// happens only when the matrix is not rank 2.
pub fn build_t(n: &NormalizedMatrix<f64>, trunc_tol: f64) -> Result<RealPolynomial, LagrangeError> {
    if !(trunc_tol > 0.0 && trunc_tol < 1.0) {
        return Err(LagrangeError::InvalidTolerance(trunc_tol));
    }
    let full = expand_product(n);
    let max = full.max_abs_coeff();
    let (c7, c8) = (full.coeff(7), full.coeff(8));
    if c7.abs() > trunc_tol * max || c8.abs() > trunc_tol * max {
        return Err(LagrangeError::TruncationViolation { c7, c8, max, tol: trunc_tol });
    }
    Ok(full.truncated(6))
}

/// Exact-rational `T(λ)`. Requires an exactly singular matrix of rank two.
pub fn build_t_exact(n: &NormalizedMatrix<BigRational>) -> Result<RationalPolynomial, LagrangeError> {
    if !n.determinant().is_zero() {
        return Err(LagrangeError::NotRankDeficient);
    }
    if exact_rank_at_most_one(n) {
        return Err(LagrangeError::RankTooLow);
    }
    let full = expand_product(n);
    debug_assert!(full.coeff(7).is_zero() && full.coeff(8).is_zero());
    Ok(full.truncated(6))
}

/// All nine 2×2 minors vanish.
fn exact_rank_at_most_one(n: &NormalizedMatrix<BigRational>) -> bool {
    let m = n.to_rows();
    let pairs = [(0, 1), (0, 2), (1, 2)];
    pairs
        .iter()
        .all(|&(r0, r1)| pairs.iter().all(|&(c0, c1)| (&m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0]).is_zero()))
}

/// Exact rational image of a float matrix (every finite double is a dyadic rational).
pub fn to_rational(n: &NormalizedMatrix<f64>) -> Result<NormalizedMatrix<BigRational>, LagrangeError> {
    let rows = n.to_rows();
    let mut out: [[BigRational; 3]; 3] = Default::default();
    for (r, row) in rows.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            out[r][c] = BigRational::from_f64(v).ok_or(LagrangeError::NonRepresentable(v))?;
        }
    }
    Ok(NormalizedMatrix::from_rows(&out))
}
