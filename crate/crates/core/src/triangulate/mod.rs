//! End-to-end two-view triangulation: translate the measurements to the
//! origin, build the multiplier polynomial, solve it, back-substitute every
//! root and pick the cheapest real feasible critical point.

pub mod camera;
pub mod synth;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{normalize_pair, TriangulationProblem};
use crate::lagrange::{build_t, LagrangeError, DEFAULT_TRUNC_TOL};
use crate::recovery::{assemble_critical_points, CriticalPoint, RecoveryConfig};
use crate::roots::{find_roots, RootConfig, RootError};

pub use camera::{fundamental_from_cameras, recover_point_3d, CameraError, CameraPair};
pub use synth::{instance_seeds, synth_instance, SyntheticInstance};

/// Number of complex critical points of a generic two-view instance.
pub const GENERIC_CRITICAL_POINTS: usize = 6;

/// Leading-coefficient deflation used by the pipeline. The `λ⁶` coefficient
/// carries a factor `(bd − ae)²` and is legitimately ~1e-12 of the largest
/// coefficient for cameras with distant epipoles, so only roundoff-sized
/// coefficients are dropped here.
pub const PIPELINE_DEFLATE_TOL: f64 = 1e-15;

/// Objectives closer than this are treated as tied during selection.
pub const OBJECTIVE_TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangulateConfig {
    pub trunc_tol: f64,
    pub roots: RootConfig,
    pub recovery: RecoveryConfig,
}

impl Default for TriangulateConfig {
    fn default() -> Self {
        Self {
            trunc_tol: DEFAULT_TRUNC_TOL,
            roots: RootConfig { deflate_tol: PIPELINE_DEFLATE_TOL, ..RootConfig::default() },
            recovery: RecoveryConfig::default(),
        }
    }
}

impl TriangulateConfig {
    /// Multiplies `root_tol`, `real_tol` and `kkt_tol` by `factor`.
    pub fn with_tol_scale(mut self, factor: f64) -> Self {
        self.roots.root_tol *= factor;
        self.roots.real_tol *= factor;
        self.recovery.real_tol *= factor;
        self.recovery.kkt_tol *= factor;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    /// `T` lost degree after deflation (happens when `bd − ae` vanishes).
    DegreeDropped {
        degree: usize,
    },
    MultipleRoot {
        lambda: Complex64,
        multiplicity: usize,
    },
    /// `det A_λ` vanished at a root; the point came from a least-squares solve.
    DegeneratePoint {
        lambda: Complex64,
        det_a: f64,
        kkt_resid: f64,
    },
    /// A real point failed the stationarity or feasibility bound.
    UntrustedPoint {
        lambda: Complex64,
        kkt_resid: f64,
        epipolar_resid: f64,
    },
    RootPolishIncomplete {
        reason: String,
    },
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diagnostic::DegreeDropped { degree } => write!(f, "DegreeDropped: polynomial has degree {degree}"),
            Diagnostic::MultipleRoot { lambda, multiplicity } => {
                write!(f, "MultipleRoot: lambda = {lambda} has multiplicity {multiplicity}")
            }
            Diagnostic::DegeneratePoint { lambda, det_a, kkt_resid } => {
                write!(f, "DegeneratePoint: lambda = {lambda}, |det A| = {det_a:e}, kkt residual {kkt_resid:e}")
            }
            Diagnostic::UntrustedPoint { lambda, kkt_resid, epipolar_resid } => write!(
                f,
                "UntrustedPoint: lambda = {lambda}, kkt residual {kkt_resid:e}, epipolar residual {epipolar_resid:e}"
            ),
            Diagnostic::RootPolishIncomplete { reason } => write!(f, "RootPolishIncomplete: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangulationResult {
    /// Sorted real first, then by objective, then by `|λ|`.
    pub critical_points: Vec<CriticalPoint>,
    pub minimizer: Option<CriticalPoint>,
    pub n_real: usize,
    pub n_distinct: usize,
    /// Six distinct, simple, non-degenerate critical points.
    pub generic: bool,
    pub diagnostics: Vec<Diagnostic>,
    /// See [`FundamentalMatrix::input_scale`](crate::geometry::FundamentalMatrix::input_scale).
    pub input_scale: f64,
}

impl TriangulationResult {
    /// Multiplier of `cp` with respect to the matrix the caller supplied.
    pub fn input_lambda(&self, cp: &CriticalPoint) -> Complex64 {
        cp.lambda / self.input_scale
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TriangulationError {
    #[error(transparent)]
    Polynomial(#[from] LagrangeError),
    #[error("ZeroPolynomial: the multiplier polynomial vanishes identically (both measurements at epipoles)")]
    ZeroPolynomial,
    #[error("NoRealCriticalPoint: no real, stationary, feasible critical point among {} candidates", .0.critical_points.len())]
    NoRealCriticalPoint(Box<TriangulationResult>),
}

/// Computes every critical point of the two-view problem and the global minimizer.
pub fn triangulate(
    p: &TriangulationProblem,
    cfg: &TriangulateConfig,
) -> Result<TriangulationResult, TriangulationError> {
    let n = normalize_pair(p);
    let t = build_t(&n, cfg.trunc_tol)?;
    let mut diagnostics = Vec::new();
    let roots = match find_roots(&t, &cfg.roots) {
        Ok(rs) => rs,
        Err(RootError::ZeroPolynomial) => return Err(TriangulationError::ZeroPolynomial),
        Err(RootError::NoConvergence { partial, reason }) => {
            diagnostics.push(Diagnostic::RootPolishIncomplete { reason });
            partial
        }
    };
    if roots.degree < GENERIC_CRITICAL_POINTS {
        diagnostics.push(Diagnostic::DegreeDropped { degree: roots.degree });
    }
    for r in roots.iter().filter(|r| r.multiplicity > 1) {
        diagnostics.push(Diagnostic::MultipleRoot { lambda: r.value, multiplicity: r.multiplicity });
    }

    let points = assemble_critical_points(p, &n, &roots, &cfg.recovery);
    let kkt_tol = cfg.recovery.kkt_tol;
    for cp in &points {
        if cp.degenerate {
            diagnostics.push(Diagnostic::DegeneratePoint {
                lambda: cp.lambda,
                det_a: cp.det_a_value.norm(),
                kkt_resid: cp.kkt_resid,
            });
        }
        if cp.is_real && !cp.is_feasible(kkt_tol) {
            diagnostics.push(Diagnostic::UntrustedPoint {
                lambda: cp.lambda,
                kkt_resid: cp.kkt_resid,
                epipolar_resid: cp.epipolar_resid,
            });
        }
    }

    let minimizer = select_minimizer(&points, kkt_tol);
    let n_real = points.iter().filter(|cp| cp.is_real).count();
    let n_distinct = points.len();
    let generic =
        n_distinct == GENERIC_CRITICAL_POINTS && points.iter().all(|cp| !cp.degenerate && cp.multiplicity == 1);
    let result = TriangulationResult {
        critical_points: points,
        minimizer,
        n_real,
        n_distinct,
        generic,
        diagnostics,
        input_scale: p.f.input_scale(),
    };
    if result.minimizer.is_none() {
        return Err(TriangulationError::NoRealCriticalPoint(Box::new(result)));
    }
    Ok(result)
}

/// Lowest objective among trusted real points; near-ties go to the smaller `|λ|`.
fn select_minimizer(points: &[CriticalPoint], kkt_tol: f64) -> Option<CriticalPoint> {
    let eligible: Vec<&CriticalPoint> = points.iter().filter(|cp| cp.is_feasible(kkt_tol)).collect();
    let best = eligible.iter().map(|cp| cp.objective).fold(f64::INFINITY, f64::min);
    eligible
        .into_iter()
        .filter(|cp| cp.objective <= best + OBJECTIVE_TIE_TOL)
        .min_by(|a, b| a.lambda.norm().total_cmp(&b.lambda.norm()))
        .copied()
}

/// Conjectured count of complex critical points for `n`-view triangulation,
/// `C(n) = (9n³ − 21n² + 16n − 8) / 2`. `None` for `n < 2`.
pub fn ed_degree(n: u32) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let n = n as i128;
    let twice = 9 * n * n * n - 21 * n * n + 16 * n - 8;
    debug_assert!(twice % 2 == 0);
    u64::try_from(twice / 2).ok()
}

/// Published critical-point counts for two through seven views.
pub const ED_DEGREES_2_TO_7: [u64; 6] = [6, 47, 148, 336, 638, 1081];

/// `C(2) = 6` and `C(2..=7)` reproduces [`ED_DEGREES_2_TO_7`].
pub fn check_ed_degree_formula() -> bool {
    ed_degree(2) == Some(GENERIC_CRITICAL_POINTS as u64)
        && (2u32..=7).zip(ED_DEGREES_2_TO_7).all(|(n, want)| ed_degree(n) == Some(want))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Mat3, Point2};

    fn worked_problem() -> TriangulationProblem {
        let f = Mat3([[1.0, 1.0, 1.0], [0.0, 1.0, 1.0], [1.0, 3.0, 3.0]]);
        TriangulationProblem::from_parts(f, Point2::ORIGIN, Point2::ORIGIN).unwrap()
    }

    #[test]
    fn ed_degree_values() {
        assert_eq!(ed_degree(2), Some(6));
        assert_eq!(ed_degree(3), Some(47));
        assert_eq!(ed_degree(7), Some(1081));
        assert_eq!(ed_degree(1), None);
        assert!(check_ed_degree_formula());
    }

    #[test]
    fn worked_instance() {
        let r = triangulate(&worked_problem(), &TriangulateConfig::default()).unwrap();
        assert!(r.generic);
        assert_eq!(r.n_distinct, 6);
        assert_eq!(r.n_real, 2);
        let m = r.minimizer.unwrap();
        assert!((m.x2[0].re - 0.0596).abs() < 5e-4);
        assert!((m.x1[1].re - (-0.891)).abs() < 5e-4);
        // Multipliers refer to the unscaled matrix.
        assert!((r.input_lambda(&m).re - 0.2942561625395053).abs() < 1e-12);
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
    }

    #[test]
    fn feasible_input_is_its_own_minimizer() {
        let f = Mat3([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]);
        let u1 = Point2::new(0.4, -0.2);
        let u2 = Point2::new(1.3, -0.2);
        let p = TriangulationProblem::from_parts(f, u1, u2).unwrap();
        let r = triangulate(&p, &TriangulateConfig::default()).unwrap();
        let m = r.minimizer.unwrap();
        assert!(m.objective <= 1e-24);
        assert_eq!(m.x1_real(), u1);
        assert_eq!(m.x2_real(), u2);
    }

    #[test]
    fn tol_scale_moves_three_tolerances() {
        let c = TriangulateConfig::default().with_tol_scale(10.0);
        assert!((c.roots.root_tol - 1e-9).abs() < 1e-24);
        assert!((c.recovery.kkt_tol - 1e-5).abs() < 1e-20);
        assert_eq!(c.roots.cluster_tol, 1e-7);
    }
}
