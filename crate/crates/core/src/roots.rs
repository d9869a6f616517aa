//! All complex roots of a small real polynomial.
//!
//! Roots are located simultaneously with the Aberth–Ehrlich iteration,
//! forced into exact conjugate pairs, grouped into clusters that represent
//! multiple roots, and finally Newton-polished against the input polynomial.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use crate::lagrange::RealPolynomial;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    /// Leading coefficients with `|c| <= deflate_tol * max|c|` are dropped.
    pub deflate_tol: f64,
    /// Bound on the scaled residual `|p(z)| / Σ|c_j||z|^j`.
    pub root_tol: f64,
    pub cluster_tol: f64,
    pub real_tol: f64,
    pub max_iter: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self { deflate_tol: 1e-10, root_tol: 1e-10, cluster_tol: 1e-7, real_tol: 1e-8, max_iter: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// Degree after deflation; equals the multiplicity total.
    pub degree: usize,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Root> {
        self.roots.iter()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Each root repeated according to its multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.roots.iter().flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity)).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("ZeroPolynomial: every coefficient is zero or non-finite")]
    ZeroPolynomial,
    #[error("NoConvergence: {reason}")]
    NoConvergence { partial: RootSet, reason: String },
}

/// Finds every root of `p`, with multiplicity, sorted by `(re, im)`.
pub fn find_roots(p: &RealPolynomial, cfg: &RootConfig) -> Result<RootSet, RootError> {
    let max = p.max_abs_coeff();
    if max == 0.0 || !max.is_finite() || p.coeffs().iter().any(|c| !c.is_finite()) {
        return Err(RootError::ZeroPolynomial);
    }
    let keep = p.coeffs().iter().rposition(|c| c.abs() > cfg.deflate_tol * max).ok_or(RootError::ZeroPolynomial)?;
    let poly = p.truncated(keep);
    let degree = keep;
    if degree == 0 {
        return Ok(RootSet { roots: Vec::new(), degree });
    }

    // Exact zero roots are split off before the iteration.
    let zeros = poly.coeffs().iter().take_while(|c| **c == 0.0).count();
    let reduced: Vec<f64> = poly.coeffs()[zeros..].to_vec();
    let mut values = vec![Complex64::new(0.0, 0.0); zeros];
    let (found, converged) = aberth(&reduced, cfg.max_iter);
    values.extend(found);

    let values = conjugate_close(values, cfg.cluster_tol);
    let clusters = cluster(&poly, values, cfg.cluster_tol);

    let mut roots: Vec<Root> = Vec::with_capacity(clusters.len());
    let mut polish_failed = false;
    for (value, multiplicity) in clusters {
        let value = if multiplicity == 1 && value.im >= 0.0 {
            match newton_polish(&poly, value, cfg.max_iter) {
                Some(z) => z,
                None => {
                    polish_failed = true;
                    value
                }
            }
        } else {
            value
        };
        roots.push(Root { value, multiplicity, residual: 0.0 });
    }
    // Lower-half-plane members mirror their polished partners exactly.
    let upper: Vec<Complex64> = roots.iter().filter(|r| r.value.im > 0.0).map(|r| r.value).collect();
    for r in roots.iter_mut().filter(|r| r.value.im < 0.0) {
        if let Some(partner) =
            upper.iter().min_by(|a, b| dist(**a, r.value.conj()).total_cmp(&dist(**b, r.value.conj())))
        {
            r.value = partner.conj();
        }
    }
    for r in &mut roots {
        r.residual = scaled_residual(&poly, r.value);
    }
    roots.sort_by(|a, b| cmp_complex(&a.value, &b.value));

    let set = RootSet { roots, degree };
    let worst = set.roots.iter().map(|r| r.residual).fold(0.0, f64::max);
    if !converged || polish_failed || worst > cfg.root_tol {
        let reason = format!(
            "simultaneous iteration converged: {converged}, polishing failed: {polish_failed}, worst residual {worst:e}"
        );
        return Err(RootError::NoConvergence { partial: set, reason });
    }
    Ok(set)
}

/// Real parts of the numerically real roots, deduplicated and ascending.
pub fn real_filter(rs: &RootSet, real_tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = rs
        .roots
        .iter()
        .filter(|r| r.value.im.abs() <= real_tol * (1.0 + r.value.re.abs()))
        .map(|r| r.value.re)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= real_tol * (1.0 + b.abs()));
    out
}

/// `|p(z)| / Σ|c_j||z|^j`.
pub fn scaled_residual(p: &RealPolynomial, z: Complex64) -> f64 {
    let scale = p.abs_eval(z.norm());
    if scale == 0.0 {
        return 0.0;
    }
    p.eval_complex(z).norm() / scale
}

fn dist(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm()
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn horner_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn abs_horner(coeffs: &[f64], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
}

/// Aberth–Ehrlich iteration with Gauss–Seidel updates. Returns the
/// approximations and whether every one reached roundoff-level residual.
fn aberth(coeffs: &[f64], max_iter: usize) -> (Vec<Complex64>, bool) {
    let n = coeffs.len() - 1;
    if n == 0 {
        return (Vec::new(), true);
    }
    if n == 1 {
        return (vec![Complex64::new(-coeffs[0] / coeffs[1], 0.0)], true);
    }
    let lead = coeffs[n];
    let radius = {
        let r = (coeffs[0] / lead).abs().powf(1.0 / n as f64);
        if r.is_finite() && r > 0.0 {
            r
        } else {
            1.0
        }
    };
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(radius, TAU * k as f64 / n as f64 + 0.4)).collect();
    let mut done = vec![false; n];
    let eps = f64::EPSILON;
    for _ in 0..max_iter.max(1) {
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = horner_with_derivative(coeffs, z[k]);
            if p.norm() <= 4.0 * eps * n as f64 * abs_horner(coeffs, z[k].norm()) {
                done[k] = true;
                continue;
            }
            let ratio =
                if dp.norm() == 0.0 { Complex64::new(radius.max(1.0) * 1e-3, radius.max(1.0) * 1e-3) } else { p / dp };
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[k] -= step;
            if step.norm() <= eps * z[k].norm() {
                done[k] = true;
            }
        }
        if done.iter().all(|d| *d) {
            return (z, true);
        }
    }
    (z, false)
}

/// Snaps nearly real values onto the axis and pairs the rest into exact
/// conjugates.
fn conjugate_close(values: Vec<Complex64>, tol: f64) -> Vec<Complex64> {
    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for z in values {
        if z.im.abs() <= tol * (1.0 + z.re.abs()) {
            real.push(Complex64::new(z.re, 0.0));
        } else if z.im > 0.0 {
            upper.push(z);
        } else {
            lower.push(z);
        }
    }
    let mut out = real;
    let mut taken = vec![false; lower.len()];
    let mut unmatched = Vec::new();
    for u in upper {
        let best = lower
            .iter()
            .enumerate()
            .filter(|(j, _)| !taken[*j])
            .min_by(|a, b| dist(*a.1, u.conj()).total_cmp(&dist(*b.1, u.conj())));
        match best {
            Some((j, l)) => {
                taken[j] = true;
                let re = 0.5 * (u.re + l.re);
                let im = 0.5 * (u.im - l.im);
                out.push(Complex64::new(re, im));
                out.push(Complex64::new(re, -im));
            }
            None => unmatched.push(Complex64::new(u.re, 0.0)),
        }
    }
    out.extend(unmatched);
    out.extend(lower.iter().zip(&taken).filter(|(_, t)| !**t).map(|(l, _)| Complex64::new(l.re, 0.0)));
    out
}

/// Single-linkage groups of `values` under the pairwise predicate `near`.
fn link(values: &[Complex64], near: impl Fn(Complex64, Complex64) -> bool) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if near(values[i], values[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Taylor coefficient `p^(j)(c) / j!` and its absolute-value scale.
fn taylor_coeff(p: &RealPolynomial, c: Complex64, j: usize) -> (Complex64, f64) {
    let r = c.norm();
    let mut value = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for (i, &a) in p.coeffs().iter().enumerate().skip(j) {
        let binom = (0..j).fold(1.0, |acc, t| acc * (i - t) as f64 / (t + 1) as f64);
        value += c.powu((i - j) as u32) * (a * binom);
        scale += a.abs() * binom * r.powi((i - j) as i32);
    }
    (value, scale)
}

/// Groups root approximations into `(value, multiplicity)` pairs.
///
/// A multiple root of order `m` is only resolved to roughly `ε^(1/m)`, so
/// candidate groups are formed at a coarse radius and accepted as one root
/// when the Taylor coefficients of order `< m` vanish to `tol²` at the root
/// of `p^(m−1)` nearest their centroid. There the order `m − 1` coefficient
/// is zero and order `m − 2` behaves like the squared spread, so `m` distinct
/// roots further than about `tol` apart are not merged.
/// Rejected groups fall back to linking at `tol`.
fn cluster(p: &RealPolynomial, values: Vec<Complex64>, tol: f64) -> Vec<(Complex64, usize)> {
    let mut out = Vec::new();
    let coarse = link(&values, |a, b| dist(a, b) <= 1e-2 * (1.0 + a.norm().max(b.norm())));
    for group in coarse {
        let members: Vec<Complex64> = group.iter().map(|&i| values[i]).collect();
        if members.len() == 1 {
            out.push((members[0], 1));
            continue;
        }
        let m = members.len();
        let mut centroid = centroid_of(&members);
        // An m-fold root of p is a simple root of its (m-1)-th derivative.
        let mut dp = p.clone();
        for _ in 1..m {
            dp = dp.derivative();
        }
        if let Some(z) = newton_polish(&dp, centroid, 50) {
            centroid = z;
        }
        let is_multiple = (0..m).all(|j| {
            let (v, s) = taylor_coeff(p, centroid, j);
            v.norm() <= tol * tol * s
        });
        if is_multiple {
            out.push((centroid, members.len()));
            continue;
        }
        for sub in link(&members, |a, b| dist(a, b) <= tol * (1.0 + a.norm().max(b.norm()))) {
            let pts: Vec<Complex64> = sub.iter().map(|&i| members[i]).collect();
            out.push((centroid_of(&pts), pts.len()));
        }
    }
    out
}

fn centroid_of(pts: &[Complex64]) -> Complex64 {
    let sum: Complex64 = pts.iter().sum();
    let c = sum / pts.len() as f64;
    // Groups closed under conjugation have a real centroid up to roundoff.
    if pts.iter().all(|z| pts.iter().any(|w| *w == z.conj())) {
        Complex64::new(c.re, 0.0)
    } else {
        c
    }
}

/// Newton refinement of a simple root; real starting points stay real.
/// Returns `None` if the iteration wanders away from the start.
fn newton_polish(p: &RealPolynomial, start: Complex64, max_iter: usize) -> Option<Complex64> {
    let coeffs = p.coeffs();
    let mut z = start;
    let mut best = (z, p.eval_complex(z).norm());
    for _ in 0..max_iter {
        let (val, der) = horner_with_derivative(coeffs, z);
        if val.norm() == 0.0 || der.norm() == 0.0 {
            break;
        }
        let mut step = val / der;
        if start.im == 0.0 {
            step.im = 0.0;
        }
        z -= step;
        let r = p.eval_complex(z).norm();
        if r < best.1 {
            best = (z, r);
        }
        if step.norm() <= f64::EPSILON * z.norm() {
            break;
        }
    }
    if dist(best.0, start) > 1e-3 * (1.0 + start.norm()) {
        return None;
    }
    Some(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_from_roots(lead: f64, roots: &[Complex64]) -> RealPolynomial {
        let mut c = vec![Complex64::new(lead, 0.0)];
        for r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, v) in c.iter().enumerate() {
                next[k + 1] += v;
                next[k] -= v * r;
            }
            c = next;
        }
        RealPolynomial::new(c.iter().map(|v| v.re).collect())
    }

    #[test]
    fn imaginary_pair() {
        let rs = find_roots(&RealPolynomial::new(vec![1.0, 0.0, 1.0]), &RootConfig::default()).unwrap();
        assert_eq!(rs.len(), 2);
        assert!((rs.roots[0].value - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert_eq!(rs.roots[1].value, rs.roots[0].value.conj());
        assert!(rs.roots.iter().all(|r| r.multiplicity == 1));
        assert!(real_filter(&rs, 1e-8).is_empty());
    }

    #[test]
    fn triple_root() {
        let p = RealPolynomial::new(vec![-1.0, 3.0, -3.0, 1.0]);
        let rs = find_roots(&p, &RootConfig::default()).unwrap();
        assert_eq!(rs.len(), 1);
        assert_eq!(rs.roots[0].multiplicity, 3);
        assert!((rs.roots[0].value - Complex64::new(1.0, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn mixed_real_and_complex() {
        let roots = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 3.0), Complex64::new(2.0, -3.0)];
        let rs = find_roots(&poly_from_roots(1.0, &roots), &RootConfig::default()).unwrap();
        assert_eq!(real_filter(&rs, 1e-8), vec![1.0]);
    }

    #[test]
    fn zero_roots_split_off() {
        let p = RealPolynomial::new(vec![0.0, 0.0, -1.0, 1.0]);
        let rs = find_roots(&p, &RootConfig::default()).unwrap();
        assert_eq!(rs.degree, 3);
        assert_eq!(rs.roots[0].value, Complex64::new(0.0, 0.0));
        assert_eq!(rs.roots[0].multiplicity, 2);
        assert!((rs.roots[1].value.re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn deflation_and_errors() {
        let p = RealPolynomial::new(vec![2.0, -1.0, 1e-14]);
        let rs = find_roots(&p, &RootConfig::default()).unwrap();
        assert_eq!(rs.degree, 1);
        assert_eq!(rs.roots[0].value.re, 2.0);
        assert_eq!(
            find_roots(&RealPolynomial::new(vec![0.0, 0.0]), &RootConfig::default()),
            Err(RootError::ZeroPolynomial)
        );
        let c = find_roots(&RealPolynomial::new(vec![5.0]), &RootConfig::default()).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn worked_polynomial() {
        let p = RealPolynomial::new(vec![-3.0, 12.0, -3.0, -12.0, 3.0, 6.0, -2.0]);
        let rs = find_roots(&p, &RootConfig::default()).unwrap();
        assert_eq!(rs.len(), 6);
        assert_eq!(rs.total_multiplicity(), 6);
        assert!(rs.roots.iter().all(|r| r.residual <= 1e-10));
        let real = real_filter(&rs, 1e-8);
        assert_eq!(real.len(), 2);
        assert!((real[0] - 0.2942561625395053).abs() < 1e-12);
        assert!((real[1] - 2.786982720).abs() < 1e-8);
    }

    #[test]
    fn close_distinct_roots_stay_apart() {
        let roots = [Complex64::new(1.0, 0.0), Complex64::new(1.0 + 1e-4, 0.0), Complex64::new(-2.0, 0.0)];
        let rs = find_roots(&poly_from_roots(1.0, &roots), &RootConfig::default()).unwrap();
        assert_eq!(rs.len(), 3);
    }

    #[test]
    fn double_complex_pair() {
        let z = Complex64::new(0.5, 1.5);
        let roots = [z, z, z.conj(), z.conj(), Complex64::new(-1.0, 0.0)];
        let rs = find_roots(&poly_from_roots(2.0, &roots), &RootConfig::default()).unwrap();
        assert_eq!(rs.len(), 3);
        assert_eq!(rs.total_multiplicity(), 5);
        for r in rs.iter().filter(|r| r.value.im != 0.0) {
            assert_eq!(r.multiplicity, 2);
            assert!((r.value.re - 0.5).abs() < 1e-7 && (r.value.im.abs() - 1.5).abs() < 1e-7);
        }
    }
}
