use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::Rational;

/// Polynomial in the marker variable `u` with exact rational coefficients.
///
/// Trailing zero coefficients are always trimmed, so structural equality is
/// polynomial equality.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UPolynomial {
    coeffs: Vec<Rational>,
}

impl UPolynomial {
    pub fn zero() -> Self {
        UPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c u^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `[u^k]`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, u: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * u + c;
        }
        acc
    }

    /// Value at `u = 1`, i.e. the sum of the coefficients.
    pub fn at_one(&self) -> Rational {
        self.coeffs.iter().fold(Rational::zero(), |acc, c| acc + c)
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficients as `f64`, e.g. for plotting a probability mass function.
    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

impl<'a> Add<&'a UPolynomial> for &'a UPolynomial {
    type Output = UPolynomial;

    fn add(self, rhs: &'a UPolynomial) -> UPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UPolynomial::from_coeffs((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a UPolynomial> for &'a UPolynomial {
    type Output = UPolynomial;

    fn mul(self, rhs: &'a UPolynomial) -> UPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return UPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPolynomial::from_coeffs(out)
    }
}

impl std::iter::Sum for UPolynomial {
    fn sum<I: Iterator<Item = UPolynomial>>(iter: I) -> Self {
        iter.fold(UPolynomial::zero(), |acc, p| &acc + &p)
    }
}

impl fmt::Display for UPolynomial {
    /// Highest power first, e.g. `8/3*u^4 + 1*u^2 + 1/3*u`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*u")?,
                _ => write!(f, "{c}*u^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = UPolynomial::from_coeffs(vec![r(1, 2), r(0, 1), r(0, 1)]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!(UPolynomial::from_coeffs(vec![r(0, 1)]), UPolynomial::zero());
    }

    #[test]
    fn star_polynomial_arithmetic() {
        // (u^4 + 3u^2 + 2u)/6
        let p = UPolynomial::from_coeffs(vec![r(0, 1), r(1, 3), r(1, 2), r(0, 1), r(1, 6)]);
        assert_eq!(p.at_one(), r(1, 1));
        assert_eq!(p.derivative().at_one(), r(2, 1));
        assert_eq!(p.eval(&r(0, 1)), r(0, 1));
        assert_eq!(p.to_string(), "1/6*u^4 + 1/2*u^2 + 1/3*u");
    }

    #[test]
    fn product_and_power() {
        let a = UPolynomial::from_coeffs(vec![r(1, 1), r(1, 1)]);
        let sq = a.pow(2);
        assert_eq!(sq.coeffs(), &[r(1, 1), r(2, 1), r(1, 1)]);
        assert_eq!((&sq * &UPolynomial::zero()), UPolynomial::zero());
    }
}
