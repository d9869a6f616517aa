//! Back-substitution of multiplier roots into the stationarity system.
//!
//! For a multiplier `λ` the unknowns `(y₂₁, y₂₂, y₁₁, y₁₂)` solve
//!
//! ```text
//! | 1   0   λa  λb | |y₂₁|       |c|
//! | 0   1   λd  λe | |y₂₂| = −λ  |f|
//! | λa  λd  1   0  | |y₁₁|       |g|
//! | λb  λe  0   1  | |y₁₂|       |h|
//! ```
//!
//! which is `∇G + λ∇H = 0` for `G = ½(‖ŷ₁‖² + ‖ŷ₂‖²)` and `H = ŷ₂ᵀF′ŷ₁`.
//! The multiplier sign follows that convention; code using `∇G − λ∇H` must
//! negate `λ`.

use std::cmp::Ordering;

use nalgebra::{Matrix4, Matrix5, Vector4, Vector5};
use num_complex::Complex64;

use crate::geometry::{objective, NormalizedMatrix, Point2, TriangulationProblem};
use crate::lagrange::det_a;
use crate::roots::RootSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryConfig {
    /// `|det A_λ|` at or below this switches to a minimum-norm solve.
    pub singular_tol: f64,
    /// Stationarity and feasibility bound for a point to be trusted.
    pub kkt_tol: f64,
    pub real_tol: f64,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        Self { singular_tol: 1e-10, kkt_tol: 1e-6, real_tol: 1e-8 }
    }
}

pub type CVec2 = [Complex64; 2];

const POLISH_STEPS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktSolution {
    pub y1: CVec2,
    pub y2: CVec2,
    pub det_a_value: Complex64,
    pub degenerate: bool,
}

/// One stationary point of the Lagrangian, in both translated (`y`) and
/// image (`x`) coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub lambda: Complex64,
    pub multiplicity: usize,
    pub y1: CVec2,
    pub y2: CVec2,
    pub x1: CVec2,
    pub x2: CVec2,
    /// Objective at the real parts of `x₁, x₂`; only meaningful when `is_real`.
    pub objective: f64,
    /// `|ŷ₂ᵀF′ŷ₁|` in translated coordinates.
    pub epipolar_resid: f64,
    pub kkt_resid: f64,
    pub det_a_value: Complex64,
    pub is_real: bool,
    pub degenerate: bool,
}

impl CriticalPoint {
    pub fn x1_real(&self) -> Point2 {
        Point2::new(self.x1[0].re, self.x1[1].re)
    }

    pub fn x2_real(&self) -> Point2 {
        Point2::new(self.x2[0].re, self.x2[1].re)
    }

    /// Trusted as a candidate minimizer: real, stationary and feasible.
    pub fn is_feasible(&self, kkt_tol: f64) -> bool {
        self.is_real && self.kkt_resid <= kkt_tol && self.epipolar_resid <= kkt_tol
    }
}

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// The coefficient matrix `A_λ` and right-hand side `−λ(c, f, g, h)ᵀ`.
pub fn kkt_system(n: &NormalizedMatrix, lambda: Complex64) -> (Matrix4<Complex64>, Vector4<Complex64>) {
    let (la, lb, ld, le) = (lambda * n.a, lambda * n.b, lambda * n.d, lambda * n.e);
    let one = c(1.0);
    let zero = c(0.0);
    #[rustfmt::skip]
    let a = Matrix4::new(
        one,  zero, la,   lb,
        zero, one,  ld,   le,
        la,   ld,   one,  zero,
        lb,   le,   zero, one,
    );
    let rhs = Vector4::new(-lambda * n.c, -lambda * n.f, -lambda * n.g, -lambda * n.h);
    (a, rhs)
}

/// Solves the stationarity system at `λ`.
///
/// Uses LU with partial pivoting unless `|det A_λ| <= singular_tol`, in which
/// case a minimum-norm least-squares solution is taken from the SVD and the
/// result is flagged degenerate.
pub fn solve_kkt_system(n: &NormalizedMatrix, lambda: Complex64, cfg: &RecoveryConfig) -> KktSolution {
    let det_a_value = det_a(n).eval_complex(lambda);
    let (a, rhs) = kkt_system(n, lambda);
    let degenerate = det_a_value.norm() <= cfg.singular_tol;
    let sol = if degenerate { None } else { a.lu().solve(&rhs) };
    let (sol, degenerate) = match sol {
        Some(s) => (s, false),
        None => {
            let svd = a.svd(true, true);
            let cutoff = 1e-8 * svd.singular_values.max();
            let s = svd.solve(&rhs, cutoff).unwrap_or_else(|_| Vector4::zeros());
            (s, true)
        }
    };
    KktSolution { y2: [sol[0], sol[1]], y1: [sol[2], sol[3]], det_a_value, degenerate }
}

/// `ŷ₂ᵀF′ŷ₁`.
pub fn constraint_value(n: &NormalizedMatrix, y1: &CVec2, y2: &CVec2) -> Complex64 {
    let f1 = [y1[0] * n.a + y1[1] * n.b + n.c, y1[0] * n.d + y1[1] * n.e + n.f, y1[0] * n.g + y1[1] * n.h + n.i];
    y2[0] * f1[0] + y2[1] * f1[1] + f1[2]
}

/// `∇G + λ∇H` in the coordinate order `(y₁₁, y₁₂, y₂₁, y₂₂)`.
pub fn lagrangian_gradient(n: &NormalizedMatrix, lambda: Complex64, y1: &CVec2, y2: &CVec2) -> [Complex64; 4] {
    // ∂H/∂y₁ = first two entries of F′ᵀŷ₂, ∂H/∂y₂ = first two of F′ŷ₁.
    let dh_dy11 = y2[0] * n.a + y2[1] * n.d + n.g;
    let dh_dy12 = y2[0] * n.b + y2[1] * n.e + n.h;
    let dh_dy21 = y1[0] * n.a + y1[1] * n.b + n.c;
    let dh_dy22 = y1[0] * n.d + y1[1] * n.e + n.f;
    [y1[0] + lambda * dh_dy11, y1[1] + lambda * dh_dy12, y2[0] + lambda * dh_dy21, y2[1] + lambda * dh_dy22]
}

/// Max-norm of `∇G + λ∇H`.
pub fn kkt_residual(n: &NormalizedMatrix, lambda: Complex64, y1: &CVec2, y2: &CVec2) -> f64 {
    lagrangian_gradient(n, lambda, y1, y2).iter().fold(0.0, |m, v| m.max(v.norm()))
}

/// Largest of the stationarity and feasibility residuals.
fn kkt_merit(n: &NormalizedMatrix, lambda: Complex64, y1: &CVec2, y2: &CVec2) -> f64 {
    kkt_residual(n, lambda, y1, y2).max(constraint_value(n, y1, y2).norm())
}

/// Newton steps on the joint system `∇G + λ∇H = 0, H = 0` in `(y, λ)`.
///
/// Near a zero of `det A_λ` the back-substituted `y` inherits the root error
/// amplified by `1/det A_λ`; the bordered Jacobian stays regular there, so a
/// few joint steps restore the residuals to roundoff. A step is kept only if
/// it lowers the larger residual and leaves `λ` within `1e-6·(1 + |λ|)` of
/// the root, so the point cannot drift to a neighbouring solution.
pub fn polish_critical_point(
    n: &NormalizedMatrix,
    lambda: Complex64,
    y1: CVec2,
    y2: CVec2,
    max_steps: usize,
) -> (Complex64, CVec2, CVec2) {
    let (mut lam, mut y1, mut y2) = (lambda, y1, y2);
    let mut merit = kkt_merit(n, lam, &y1, &y2);
    for _ in 0..max_steps {
        if merit == 0.0 {
            break;
        }
        let g = lagrangian_gradient(n, lam, &y1, &y2);
        let dh = [
            y2[0] * n.a + y2[1] * n.d + n.g,
            y2[0] * n.b + y2[1] * n.e + n.h,
            y1[0] * n.a + y1[1] * n.b + n.c,
            y1[0] * n.d + y1[1] * n.e + n.f,
        ];
        let (la, lb, ld, le) = (lam * n.a, lam * n.b, lam * n.d, lam * n.e);
        let one = c(1.0);
        let zero = c(0.0);
        #[rustfmt::skip]
        let jac = Matrix5::new(
            one,   zero,  la,    ld,    dh[0],
            zero,  one,   lb,    le,    dh[1],
            la,    lb,    one,   zero,  dh[2],
            ld,    le,    zero,  one,   dh[3],
            dh[0], dh[1], dh[2], dh[3], zero,
        );
        let rhs = -Vector5::new(g[0], g[1], g[2], g[3], constraint_value(n, &y1, &y2));
        let Some(step) = jac.lu().solve(&rhs) else { break };
        let cand_y1 = [y1[0] + step[0], y1[1] + step[1]];
        let cand_y2 = [y2[0] + step[2], y2[1] + step[3]];
        let cand_lam = lam + step[4];
        if (cand_lam - lambda).norm() > 1e-6 * (1.0 + lambda.norm()) {
            break;
        }
        let cand_merit = kkt_merit(n, cand_lam, &cand_y1, &cand_y2);
        if cand_merit.is_nan() || cand_merit >= merit {
            break;
        }
        (lam, y1, y2, merit) = (cand_lam, cand_y1, cand_y2, cand_merit);
    }
    (lam, y1, y2)
}

fn is_real_scalar(z: Complex64, tol: f64) -> bool {
    z.im.abs() <= tol * (1.0 + z.re.abs())
}

/// Turns every root of `T` into a critical point of the original problem.
///
/// Sorted real points first, then by objective, then by `|λ|`.
pub fn assemble_critical_points(
    p: &TriangulationProblem,
    n: &NormalizedMatrix,
    rs: &RootSet,
    cfg: &RecoveryConfig,
) -> Vec<CriticalPoint> {
    let mut out: Vec<CriticalPoint> = rs
        .iter()
        .map(|root| {
            let sol = solve_kkt_system(n, root.value, cfg);
            let (lambda, y1, y2) = if sol.degenerate {
                (root.value, sol.y1, sol.y2)
            } else {
                polish_critical_point(n, root.value, sol.y1, sol.y2, POLISH_STEPS)
            };
            let sol = KktSolution { y1, y2, det_a_value: det_a(n).eval_complex(lambda), ..sol };
            let x1 = [sol.y1[0] + p.u1.x, sol.y1[1] + p.u1.y];
            let x2 = [sol.y2[0] + p.u2.x, sol.y2[1] + p.u2.y];
            let is_real =
                is_real_scalar(lambda, cfg.real_tol) && x1.iter().chain(&x2).all(|z| is_real_scalar(*z, cfg.real_tol));
            let objective = objective(Point2::new(x1[0].re, x1[1].re), Point2::new(x2[0].re, x2[1].re), p.u1, p.u2);
            CriticalPoint {
                lambda,
                multiplicity: root.multiplicity,
                y1: sol.y1,
                y2: sol.y2,
                x1,
                x2,
                objective,
                epipolar_resid: constraint_value(n, &sol.y1, &sol.y2).norm(),
                kkt_resid: kkt_residual(n, lambda, &sol.y1, &sol.y2),
                det_a_value: sol.det_a_value,
                is_real,
                degenerate: sol.degenerate,
            }
        })
        .collect();
    out.sort_by(critical_point_order);
    out
}

pub(crate) fn critical_point_order(a: &CriticalPoint, b: &CriticalPoint) -> Ordering {
    b.is_real
        .cmp(&a.is_real)
        .then(a.objective.total_cmp(&b.objective))
        .then(a.lambda.norm().total_cmp(&b.lambda.norm()))
        .then(a.lambda.re.total_cmp(&b.lambda.re))
        .then(a.lambda.im.total_cmp(&b.lambda.im))
}
