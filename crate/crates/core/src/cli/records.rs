//! Serialized forms of problems, results and synthetic ground truth.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::geometry::{GeometryError, Mat3, TriangulationProblem};
use crate::recovery::CriticalPoint;
use crate::triangulate::{SyntheticInstance, TriangulationResult};

/// `{"F": [[..], [..], [..]], "u1": [x, y], "u2": [x, y]}`; `F` is row-major.
/// Unknown fields are ignored, so `synth` output can be fed back in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInput {
    #[serde(rename = "F")]
    pub f: [[f64; 3]; 3],
    pub u1: [f64; 2],
    pub u2: [f64; 2],
}

impl ProblemInput {
    pub fn to_problem(&self) -> Result<TriangulationProblem, GeometryError> {
        TriangulationProblem::from_parts(Mat3(self.f), self.u1.into(), self.u2.into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    /// `[re, im]`, relative to the matrix as supplied.
    pub lambda: [f64; 2],
    pub multiplicity: usize,
    /// Real parts.
    pub x1: [f64; 2],
    pub x2: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1_im: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x2_im: Option<[f64; 2]>,
    pub objective: f64,
    pub epipolar_resid: f64,
    pub kkt_resid: f64,
    pub is_real: bool,
    pub degenerate: bool,
}

impl PointRecord {
    fn new(cp: &CriticalPoint, input_scale: f64, with_im: bool) -> Self {
        let lambda = cp.lambda / input_scale;
        Self {
            lambda: [lambda.re, lambda.im],
            multiplicity: cp.multiplicity,
            x1: [cp.x1[0].re, cp.x1[1].re],
            x2: [cp.x2[0].re, cp.x2[1].re],
            x1_im: with_im.then(|| [cp.x1[0].im, cp.x1[1].im]),
            x2_im: with_im.then(|| [cp.x2[0].im, cp.x2[1].im]),
            objective: cp.objective,
            epipolar_resid: cp.epipolar_resid,
            kkt_resid: cp.kkt_resid,
            is_real: cp.is_real,
            degenerate: cp.degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub minimizer: Option<PointRecord>,
    pub n_real: usize,
    pub n_distinct: usize,
    pub generic: bool,
    /// Real critical points, or all of them with `--all`.
    pub critical_points: Vec<PointRecord>,
    pub diagnostics: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ResultRecord {
    pub fn from_result(r: &TriangulationResult, all: bool, error: Option<String>) -> Self {
        Self {
            minimizer: r.minimizer.as_ref().map(|m| PointRecord::new(m, r.input_scale, all)),
            n_real: r.n_real,
            n_distinct: r.n_distinct,
            generic: r.generic,
            critical_points: r
                .critical_points
                .iter()
                .filter(|cp| all || cp.is_real)
                .map(|cp| PointRecord::new(cp, r.input_scale, all))
                .collect(),
            diagnostics: r.diagnostics.iter().map(ToString::to_string).collect(),
            error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    #[serde(rename = "X")]
    pub point: [f64; 3],
    /// Noise-free projections.
    pub x1: [f64; 2],
    pub x2: [f64; 2],
}

/// One line of a `synth` dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthRecord {
    pub seed: u64,
    pub noise_sigma: f64,
    #[serde(rename = "F")]
    pub f: [[f64; 3]; 3],
    pub u1: [f64; 2],
    pub u2: [f64; 2],
    pub truth: TruthRecord,
}

impl From<&SyntheticInstance> for SynthRecord {
    fn from(s: &SyntheticInstance) -> Self {
        Self {
            seed: s.seed,
            noise_sigma: s.noise_sigma,
            f: *s.problem.f.rows(),
            u1: s.problem.u1.to_array(),
            u2: s.problem.u2.to_array(),
            truth: TruthRecord { point: [s.point.x, s.point.y, s.point.z], x1: s.x1.to_array(), x2: s.x2.to_array() },
        }
    }
}

/// Shortest round-trip form, identical to the JSON output.
fn num(v: f64) -> String {
    serde_json::to_string(&v).expect("f64 always serializes")
}

/// Fixed columns: `lambda_re, lambda_im, x11, x12, x21, x22`, the imaginary
/// parts `x11_im .. x22_im` with `--all`, then `objective, is_real,
/// degenerate`. Batches get a leading `instance` column (0-based input
/// order). Rows are the minimizer, or every critical point with `--all`.
pub fn write_csv(w: &mut dyn Write, records: &[ResultRecord], all: bool, batch: bool) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = Vec::new();
    if batch {
        header.push("instance");
    }
    header.extend(["lambda_re", "lambda_im", "x11", "x12", "x21", "x22"]);
    if all {
        header.extend(["x11_im", "x12_im", "x21_im", "x22_im"]);
    }
    header.extend(["objective", "is_real", "degenerate"]);
    out.write_record(&header)?;

    for (k, r) in records.iter().enumerate() {
        let rows: Vec<&PointRecord> =
            if all { r.critical_points.iter().collect() } else { r.minimizer.iter().collect() };
        for p in rows {
            let mut row: Vec<String> = Vec::new();
            if batch {
                row.push(k.to_string());
            }
            row.extend([p.lambda[0], p.lambda[1], p.x1[0], p.x1[1], p.x2[0], p.x2[1]].map(num));
            if all {
                let (i1, i2) = (p.x1_im.unwrap_or_default(), p.x2_im.unwrap_or_default());
                row.extend([i1[0], i1[1], i2[0], i2[1]].map(num));
            }
            row.extend([num(p.objective), p.is_real.to_string(), p.degenerate.to_string()]);
            out.write_record(&row)?;
        }
    }
    out.flush()?;
    Ok(())
}
