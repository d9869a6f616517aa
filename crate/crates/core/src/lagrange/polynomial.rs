use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

/// Number types the polynomial machinery runs over: `f64` and exact rationals.
pub trait Scalar: Num + Clone + Neg<Output = Self> {}

impl<T: Num + Clone + Neg<Output = T>> Scalar for T {}

/// Dense univariate polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

pub type RealPolynomial = Poly<f64>;
pub type RationalPolynomial = Poly<BigRational>;

impl<T: Scalar> Poly<T> {
    /// Empty input is treated as the zero constant.
    pub fn new(mut coeffs: Vec<T>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::new(vec![T::zero()])
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `λ^k`, zero past the stored length.
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    /// Number of stored coefficients minus one; may overstate the degree
    /// when leading entries are zero.
    pub fn stored_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Degree ignoring exactly-zero leading coefficients. `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// Keeps the coefficients of degree `<= max_degree`.
    pub fn truncated(&self, max_degree: usize) -> Self {
        Self::new(self.coeffs.iter().take(max_degree + 1).cloned().collect())
    }

    /// Drops exactly-zero leading coefficients.
    pub fn trimmed(&self) -> Self {
        match self.degree() {
            Some(d) => self.truncated(d),
            None => Self::zero(),
        }
    }

    pub fn scaled(&self, s: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let mut k = T::zero();
        let coeffs = self.coeffs[1..]
            .iter()
            .map(|c| {
                k = k.clone() + T::one();
                c.clone() * k.clone()
            })
            .collect();
        Self::new(coeffs)
    }
}

impl Poly<f64> {
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c)
    }

    /// `Σ |c_j| |z|^j`, the natural scale for a residual `|p(z)|`.
    pub fn abs_eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Poly<BigRational> {
    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
    }

    /// Nearest-double image of each coefficient.
    pub fn to_f64(&self) -> RealPolynomial {
        Poly::new(self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
    }
}

impl<T: Scalar> Add for &Poly<T> {
    type Output = Poly<T>;

    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Sub for &Poly<T> {
    type Output = Poly<T>;

    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Mul for &Poly<T> {
    type Output = Poly<T>;

    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + x.clone() * y.clone();
            }
        }
        Poly::new(out)
    }
}

impl<T: Scalar> Neg for &Poly<T> {
    type Output = Poly<T>;

    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let p = Poly::new(vec![1.0, 2.0]);
        let q = Poly::new(vec![-1.0, 0.0, 3.0]);
        assert_eq!((&p * &q).coeffs(), &[-1.0, -2.0, 3.0, 6.0]);
        assert_eq!((&p + &q).coeffs(), &[0.0, 2.0, 3.0]);
        assert_eq!((&p - &q).coeffs(), &[2.0, 2.0, -3.0]);
        assert_eq!((-&p).coeffs(), &[-1.0, -2.0]);
        assert_eq!(q.eval(&2.0), 11.0);
        assert_eq!(q.derivative().coeffs(), &[0.0, 6.0]);
    }

    #[test]
    fn degree_and_trim() {
        let p = Poly::new(vec![1i64, 0, 2, 0, 0]);
        assert_eq!(p.stored_degree(), 4);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.trimmed().coeffs(), &[1, 0, 2]);
        assert!(Poly::<i64>::new(vec![]).is_zero());
    }

    #[test]
    fn rational_to_float() {
        let p = Poly::from_integers(&[-3, 12, 1]);
        assert_eq!(p.to_f64().coeffs(), &[-3.0, 12.0, 1.0]);
    }

    #[test]
    fn complex_eval() {
        let p = Poly::new(vec![1.0, 0.0, 1.0]);
        assert!(p.eval_complex(Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(p.abs_eval(2.0), 5.0);
    }
}
