//! Term-by-term transcription of the expanded multiplier polynomial.
//!
//! Each coefficient of `T(λ)` is listed as a sum of integer-weighted monomials
//! in the entries `a..i`, independently of the product form used by
//! [`build_t`](super::build_t). Verification code compares the two. The λ⁶
//! coefficient is stated in factored form and agrees with the product only
//! modulo `det F′ = 0`; the lower coefficients agree identically.

use super::Scalar;
use crate::geometry::NormalizedMatrix;

const LAMBDA5: &[(i64, &str)] = &[
    (1, "a2c2d2"),
    (1, "c2d4"),
    (2, "abc2de"),
    (1, "b2c2e2"),
    (2, "c2d2e2"),
    (1, "c2e4"),
    (-2, "a3cdf"),
    (-2, "ab2cdf"),
    (-2, "acd3f"),
    (-2, "a2bcef"),
    (-2, "b3cef"),
    (-2, "bcd2ef"),
    (-2, "acde2f"),
    (-2, "bce3f"),
    (1, "a4f2"),
    (2, "a2b2f2"),
    (1, "b4f2"),
    (1, "a2d2f2"),
    (2, "abdef2"),
    (1, "b2e2f2"),
    (1, "a2b2g2"),
    (1, "b4g2"),
    (2, "abdeg2"),
    (2, "b2e2g2"),
    (1, "d2e2g2"),
    (1, "e4g2"),
    (-2, "a3bgh"),
    (-2, "ab3gh"),
    (-2, "abd2gh"),
    (-2, "a2degh"),
    (-2, "b2degh"),
    (-2, "d3egh"),
    (-2, "abe2gh"),
    (-2, "de3gh"),
    (1, "a4h2"),
    (1, "a2b2h2"),
    (2, "a2d2h2"),
    (1, "d4h2"),
    (2, "abdeh2"),
    (1, "d2e2h2"),
];

const LAMBDA4: &[(i64, &str)] = &[
    (1, "a3cg"),
    (1, "ab2cg"),
    (1, "acd2g"),
    (-5, "bcdeg"),
    (6, "ace2g"),
    (1, "a2dfg"),
    (6, "b2dfg"),
    (1, "d3fg"),
    (-5, "abefg"),
    (1, "de2fg"),
    (1, "a2bch"),
    (1, "b3ch"),
    (6, "bcd2h"),
    (-5, "acdeh"),
    (1, "bce2h"),
    (-5, "abdfh"),
    (6, "a2efh"),
    (1, "b2efh"),
    (1, "d2efh"),
    (1, "e3fh"),
    (-1, "a4i"),
    (-2, "a2b2i"),
    (-1, "b4i"),
    (-2, "a2d2i"),
    (-4, "b2d2i"),
    (-1, "d4i"),
    (4, "abdei"),
    (-4, "a2e2i"),
    (-2, "b2e2i"),
    (-2, "d2e2i"),
    (-1, "e4i"),
];

const LAMBDA3: &[(i64, &str)] = &[
    (-2, "c2d2"),
    (-2, "c2e2"),
    (4, "acdf"),
    (4, "bcef"),
    (-2, "a2f2"),
    (-2, "b2f2"),
    (-2, "b2g2"),
    (-2, "e2g2"),
    (4, "abgh"),
    (4, "degh"),
    (-2, "a2h2"),
    (-2, "d2h2"),
];

const LAMBDA2: &[(i64, &str)] =
    &[(-3, "acg"), (-3, "dfg"), (-3, "bch"), (-3, "efh"), (2, "a2i"), (2, "b2i"), (2, "d2i"), (2, "e2i")];

const LAMBDA1: &[(i64, &str)] = &[(1, "c2"), (1, "f2"), (1, "g2"), (1, "h2")];

const LAMBDA0: &[(i64, &str)] = &[(-1, "i")];

fn lookup<T: Scalar>(n: &NormalizedMatrix<T>, var: char) -> T {
    match var {
        'a' => n.a.clone(),
        'b' => n.b.clone(),
        'c' => n.c.clone(),
        'd' => n.d.clone(),
        'e' => n.e.clone(),
        'f' => n.f.clone(),
        'g' => n.g.clone(),
        'h' => n.h.clone(),
        'i' => n.i.clone(),
        other => panic!("unknown variable {other:?} in monomial table"),
    }
}

fn integer<T: Scalar>(k: i64) -> T {
    let one = T::one();
    let mut out = T::zero();
    for _ in 0..k.unsigned_abs() {
        out = out + one.clone();
    }
    if k < 0 {
        -out
    } else {
        out
    }
}

/// Evaluates a monomial written as letters with optional single-digit powers, e.g. `a2bc`.
fn monomial<T: Scalar>(n: &NormalizedMatrix<T>, term: &str) -> T {
    let mut out = T::one();
    let mut chars = term.chars().peekable();
    while let Some(var) = chars.next() {
        let power = match chars.peek().and_then(|c| c.to_digit(10)) {
            Some(p) => {
                chars.next();
                p
            }
            None => 1,
        };
        let base = lookup(n, var);
        for _ in 0..power {
            out = out * base.clone();
        }
    }
    out
}

fn table_sum<T: Scalar>(n: &NormalizedMatrix<T>, table: &[(i64, &str)]) -> T {
    table.iter().fold(T::zero(), |acc, &(k, m)| acc + integer::<T>(k) * monomial(n, m))
}

/// `(bd − ae)²(acg + dfg + bch + efh − a²i − b²i − d²i − e²i)`.
pub fn lambda6<T: Scalar>(n: &NormalizedMatrix<T>) -> T {
    let k = monomial(n, "bd") - monomial(n, "ae");
    let inner = monomial(n, "acg") + monomial(n, "dfg") + monomial(n, "bch") + monomial(n, "efh")
        - monomial(n, "a2i")
        - monomial(n, "b2i")
        - monomial(n, "d2i")
        - monomial(n, "e2i");
    k.clone() * k * inner
}

/// All seven coefficients, ascending degree.
pub fn explicit_coefficients<T: Scalar>(n: &NormalizedMatrix<T>) -> [T; 7] {
    [
        table_sum(n, LAMBDA0),
        table_sum(n, LAMBDA1),
        table_sum(n, LAMBDA2),
        table_sum(n, LAMBDA3),
        table_sum(n, LAMBDA4),
        table_sum(n, LAMBDA5),
        lambda6(n),
    ]
}

/// Number of monomials transcribed per degree, λ⁰ through λ⁵.
pub fn term_counts() -> [usize; 6] {
    [LAMBDA0.len(), LAMBDA1.len(), LAMBDA2.len(), LAMBDA3.len(), LAMBDA4.len(), LAMBDA5.len()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn worked_instance() {
        let n = NormalizedMatrix::from_rows(&[[1, 1, 1], [0, 1, 1], [1, 3, 3]])
            .map(|&v| BigRational::from_integer(BigInt::from(v)));
        let c = explicit_coefficients(&n);
        let want = [-3, 12, -3, -12, 3, 6, -2].map(|v| BigRational::from_integer(BigInt::from(v)));
        assert_eq!(c, want);
    }

    #[test]
    fn monomial_parser() {
        let n = NormalizedMatrix::from_rows(&[[2.0, 3.0, 5.0], [7.0, 11.0, 13.0], [17.0, 19.0, 23.0]]);
        assert_eq!(monomial(&n, "a2c"), 20.0);
        assert_eq!(monomial(&n, "i"), 23.0);
        assert_eq!(integer::<f64>(-5), -5.0);
        assert_eq!(term_counts(), [1, 4, 8, 12, 31, 40]);
    }
}
