use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoview_core::lagrange::RealPolynomial;
use twoview_core::roots::{find_roots, RootConfig, RootSet};

fn from_roots(lead: f64, roots: &[Complex64]) -> RealPolynomial {
    let mut c = vec![Complex64::new(lead, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, v) in c.iter().enumerate() {
            next[k + 1] += v;
            next[k] -= v * r;
        }
        c = next;
    }
    RealPolynomial::new(c.iter().map(|z| z.re).collect())
}

fn coeffs6() -> impl Strategy<Value = RealPolynomial> {
    (prop::collection::vec(-5.0..5.0f64, 6), prop_oneof![-5.0..-0.2f64, 0.2..5.0f64]).prop_map(|(mut c, lead)| {
        c.push(lead);
        RealPolynomial::new(c)
    })
}

fn values(rs: &RootSet) -> Vec<Complex64> {
    rs.expanded()
}

/// Minimum over permutations of the largest pairwise distance.
fn matching_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    fn go(a: &[Complex64], b: &mut Vec<Complex64>, worst: f64, best: &mut f64) {
        if worst >= *best {
            return;
        }
        let Some((first, rest)) = a.split_first() else {
            *best = worst;
            return;
        };
        for k in 0..b.len() {
            let z = b.swap_remove(k);
            go(rest, b, worst.max((first - z).norm()), best);
            b.push(z);
            let last = b.len() - 1;
            b.swap(k, last);
        }
    }
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut best = f64::INFINITY;
    go(a, &mut b.to_vec(), 0.0, &mut best);
    best
}

proptest! {
    #[test]
    fn count_and_conjugate_closure(p in coeffs6()) {
        let rs = find_roots(&p, &RootConfig::default()).unwrap();
        prop_assert_eq!(rs.total_multiplicity(), rs.degree);
        prop_assert_eq!(rs.degree, 6);
        for r in rs.iter().filter(|r| r.value.im != 0.0) {
            let partners = rs.iter().filter(|s| s.value == r.value.conj() && s.multiplicity == r.multiplicity).count();
            prop_assert_eq!(partners, 1);
        }
    }

    #[test]
    fn reconstruction(p in coeffs6()) {
        let rs = find_roots(&p, &RootConfig::default()).unwrap();
        let q = from_roots(p.coeff(6), &values(&rs));
        let scale = p.max_abs_coeff();
        for k in 0..=6 {
            prop_assert!((q.coeff(k) - p.coeff(k)).abs() <= 1e-8 * scale, "k = {}: {} vs {}", k, q.coeff(k), p.coeff(k));
        }
    }

    #[test]
    fn coefficient_scaling_leaves_roots(p in coeffs6(), c in prop_oneof![-1e3..-1e-3f64, 1e-3..1e3f64]) {
        let cfg = RootConfig::default();
        let (a, b) = (find_roots(&p, &cfg).unwrap(), find_roots(&p.scaled(&c), &cfg).unwrap());
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b.iter()) {
            prop_assert_eq!(x.multiplicity, y.multiplicity);
            prop_assert!((x.value - y.value).norm() <= cfg.cluster_tol * (1.0 + x.value.norm()));
        }
    }
}

#[test]
fn planted_roots_are_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let cfg = RootConfig::default();
    let mut planted_sets = 0;
    while planted_sets < 500 {
        let pairs = rng.random_range(0..=3usize);
        let mut roots: Vec<Complex64> = Vec::new();
        for _ in 0..pairs {
            let z = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(0.1..3.0));
            roots.extend([z, z.conj()]);
        }
        while roots.len() < 6 {
            roots.push(Complex64::new(rng.random_range(-3.0..3.0), 0.0));
        }
        // Planted roots are kept apart so that each one is well conditioned.
        let separated = roots.iter().enumerate().all(|(i, a)| roots[i + 1..].iter().all(|b| (a - b).norm() > 0.1));
        if !separated {
            continue;
        }
        planted_sets += 1;
        let lead = rng.random_range(0.5..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let p = from_roots(lead, &roots);
        let rs = find_roots(&p, &cfg).unwrap_or_else(|e| panic!("{roots:?}: {e}"));
        let err = matching_error(&roots, &values(&rs));
        assert!(err <= 1e-8, "planted {roots:?}, error {err:e}");
    }
}
