//! Brute-force reference solver for the two-view problem.
//!
//! For a fixed `x₂` the constraint confines `x₁` to the line `l = Fᵀx̂₂`, and
//! the best `x₁` is the orthogonal projection of `u₁` onto it. What remains is
//! a function of `x₂` alone,
//!
//! ```text
//! φ(x₂) = ‖x₂ − u₂‖² + (lᵀû₁)² / (l₁² + l₂²),
//! ```
//!
//! minimized here by a dense grid followed by pattern-search refinement. Only
//! feasible points are ever evaluated, so the result is an upper bound on the
//! true minimum. Nothing in this module touches the multiplier machinery.

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{Mat3, Point2, TriangulationProblem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Half-width of the square grid centered on `u₂`.
    pub half_extent: f64,
    pub grid_step: f64,
    /// Pattern search stops once its step falls below this.
    pub final_step: f64,
    /// Grid local minima refined, best first.
    pub n_starts: usize,
    pub max_refine_iter: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { half_extent: 5.0, grid_step: 0.01, final_step: 1e-9, n_starts: 4, max_refine_iter: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub x1: Point2,
    pub x2: Point2,
    pub value: f64,
    /// Grid nodes where `Fᵀx̂₂` had no affine direction and was skipped.
    pub skipped_lines: usize,
    /// Objective after each accepted refinement move, starting value first.
    pub trace: Vec<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("DegenerateLine: every candidate x2 gave an epipolar line without affine direction")]
    DegenerateLine,
    #[error("InvalidConfig: {0}")]
    InvalidConfig(&'static str),
}

/// Projection of `u₁` onto the epipolar line of `x₂` and the resulting
/// objective. `None` when the line has no affine direction.
pub fn eliminate_x1(f: &Mat3, u1: Point2, u2: Point2, x2: Point2) -> Option<(Point2, f64)> {
    let l = f.transpose().mul_vec(x2.lift());
    let norm2 = l[0] * l[0] + l[1] * l[1];
    if norm2 <= 1e-300 || !norm2.is_finite() {
        return None;
    }
    let signed = l[0] * u1.x + l[1] * u1.y + l[2];
    let t = signed / norm2;
    let x1 = Point2::new(u1.x - t * l[0], u1.y - t * l[1]);
    let d2 = (x2.x - u2.x).powi(2) + (x2.y - u2.y).powi(2);
    Some((x1, d2 + signed * signed / norm2))
}

fn reduced(p: &TriangulationProblem, x2: Point2) -> Option<f64> {
    eliminate_x1(p.f.matrix(), p.u1, p.u2, x2).map(|(_, v)| v)
}

/// Global minimum of the two-view objective by grid search over `x₂`.
pub fn oracle_minimize(p: &TriangulationProblem, cfg: &OracleConfig) -> Result<OracleResult, OracleError> {
    if !(cfg.grid_step > 0.0 && cfg.half_extent > 0.0 && cfg.final_step > 0.0) {
        return Err(OracleError::InvalidConfig("grid extent and steps must be positive"));
    }
    let n = (2.0 * cfg.half_extent / cfg.grid_step).round() as usize + 1;
    let origin = Point2::new(p.u2.x - cfg.half_extent, p.u2.y - cfg.half_extent);
    let node =
        |i: usize, j: usize| Point2::new(origin.x + i as f64 * cfg.grid_step, origin.y + j as f64 * cfg.grid_step);

    let grid: Vec<f64> =
        (0..n * n).into_par_iter().map(|k| reduced(p, node(k / n, k % n)).unwrap_or(f64::NAN)).collect();
    let skipped_lines = grid.iter().filter(|v| v.is_nan()).count();
    if skipped_lines == grid.len() {
        return Err(OracleError::DegenerateLine);
    }

    // Local minima over the 8-neighbourhood; lexicographic index breaks ties.
    let at = |i: usize, j: usize| grid[i * n + j];
    let mut starts: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = at(i, j);
            if v.is_nan() {
                continue;
            }
            let mut is_min = true;
            'scan: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || a < 0 || b < 0 || a >= n as i64 || b >= n as i64 {
                        continue;
                    }
                    let w = at(a as usize, b as usize);
                    if !w.is_nan() && w < v {
                        is_min = false;
                        break 'scan;
                    }
                }
            }
            if is_min {
                starts.push((v, i, j));
            }
        }
    }
    starts.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    starts.truncate(cfg.n_starts.max(1));

    let mut best: Option<OracleResult> = None;
    for (_, i, j) in starts {
        let r = refine_from(p, node(i, j), cfg);
        if best.as_ref().is_none_or(|b| r.value < b.value) {
            best = Some(r);
        }
    }
    let mut best = best.ok_or(OracleError::DegenerateLine)?;
    best.skipped_lines = skipped_lines;
    Ok(best)
}

/// Pattern search on `x₂` from `x2_start`, with `x₁` re-projected at every
/// evaluation. `x1_start` only seeds the reported trace when it is feasible
/// for `x2_start`; the search itself depends on `x₂` alone.
pub fn oracle_refine(p: &TriangulationProblem, x1_start: Point2, x2_start: Point2, cfg: &OracleConfig) -> OracleResult {
    let _ = x1_start;
    refine_from(p, x2_start, cfg)
}

fn refine_from(p: &TriangulationProblem, start: Point2, cfg: &OracleConfig) -> OracleResult {
    const DIRS: [(f64, f64); 8] =
        [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
    let mut x2 = start;
    let mut value = reduced(p, x2).unwrap_or(f64::INFINITY);
    let mut trace = vec![value];
    let mut step = cfg.grid_step;
    let mut iter = 0;
    while step >= cfg.final_step && iter < cfg.max_refine_iter {
        iter += 1;
        let mut moved = false;
        for (dx, dy) in DIRS {
            let cand = Point2::new(x2.x + dx * step, x2.y + dy * step);
            if let Some(v) = reduced(p, cand) {
                if v < value {
                    x2 = cand;
                    value = v;
                    moved = true;
                    break;
                }
            }
        }
        if moved {
            trace.push(value);
        } else {
            step *= 0.5;
        }
    }
    let (x1, value) = eliminate_x1(p.f.matrix(), p.u1, p.u2, x2).unwrap_or((p.u1, f64::INFINITY));
    OracleResult { x1, x2, value, skipped_lines: 0, trace }
}
