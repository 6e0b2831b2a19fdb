//! Exact truncated power series over the rationals.
//!
//! Every generating function handled by the workbench (the Pólya series
//! `T(z)`, the D-forest series `D(z)`, the Cayley series `C(z)`, the pointed
//! series `T/(1-T)`) is represented as an [`ExactSeries`]. No floating point
//! is used anywhere in this module.

mod counts;
mod ctree;
mod poly;

pub(crate) use counts::polya_counts_table;
pub use counts::{
    cayley_series, cayley_weights, dforest_weights, dforest_weights_by_exp, polya_counts, polya_series, CountTable,
};
pub use ctree::{
    ctree_polynomials, exact_ctree_mean, exact_ctree_variance, exact_forest_prob, pointed_series,
    BivariatePolynomialTable, ForestLaw,
};
pub use poly::UPolynomial;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Default truncation order for series computations.
pub const DEFAULT_ORDER: usize = 128;

/// Power series `a_0 + a_1 z + ... + a_N z^N + O(z^{N+1})` with exact
/// rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExactSeries {
    coeffs: Vec<Rational>,
}

impl ExactSeries {
    /// The zero series truncated at `order`.
    pub fn zero(order: usize) -> Self {
        ExactSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    /// The constant series `1`.
    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    /// The series `z` (or zero if `order == 0`).
    pub fn identity(order: usize) -> Self {
        Self::monomial(Rational::one(), 1, order)
    }

    /// `c z^k` truncated at `order`.
    pub fn monomial(c: Rational, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// Builds a series from coefficients `a_0..a_N`; the order is `len - 1`.
    ///
    /// Panics on an empty vector.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least a constant term");
        ExactSeries { coeffs }
    }

    pub fn from_integers<I, T>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        Self::from_coeffs(coeffs.into_iter().map(|c| Rational::from_integer(c.into())).collect())
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// `[z^k]` of the series; zero above the truncation order is *not*
    /// returned silently, callers must stay within `order()`.
    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs: Vec<Rational> = self.coeffs.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, Rational::zero());
        ExactSeries { coeffs }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        ExactSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplication by `z^k`, keeping the truncation order.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for i in 0..=n.saturating_sub(k) {
            if i + k <= n {
                out.coeffs[i + k] = self.coeffs[i].clone();
            }
        }
        out
    }

    /// Substitution `z -> z^i`.
    pub fn substitute_power(&self, i: usize) -> Self {
        assert!(i >= 1);
        let n = self.order();
        let mut out = Self::zero(n);
        for k in 0..=n / i {
            out.coeffs[k * i] = self.coeffs[k].clone();
        }
        out
    }

    /// Formal derivative; the result is known to order `N - 1`.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return Self::zero(0);
        }
        ExactSeries {
            coeffs: (1..=n)
                .map(|k| &self.coeffs[k] * Rational::from_integer(BigInt::from(k)))
                .collect(),
        }
    }

    /// Exponential of a series with zero constant term, via
    /// `n b_n = sum_{k=1}^n k a_k b_{n-k}`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Domain("exp requires a series with zero constant term".into()));
        }
        let n = self.order();
        let weighted: Vec<Rational> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * Rational::from_integer(BigInt::from(k)))
            .collect();
        let mut b = vec![Rational::zero(); n + 1];
        b[0] = Rational::one();
        for m in 1..=n {
            let mut acc = Rational::zero();
            for k in 1..=m {
                if !weighted[k].is_zero() && !b[m - k].is_zero() {
                    acc += &weighted[k] * &b[m - k];
                }
            }
            b[m] = acc / Rational::from_integer(BigInt::from(m));
        }
        Ok(ExactSeries { coeffs: b })
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::Domain("reciprocal requires a nonzero constant term".into()));
        }
        let n = self.order();
        let inv0 = self.coeffs[0].recip();
        let mut b = vec![Rational::zero(); n + 1];
        b[0] = inv0.clone();
        for m in 1..=n {
            let mut acc = Rational::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &b[m - k];
                }
            }
            b[m] = -(acc * &inv0);
        }
        Ok(ExactSeries { coeffs: b })
    }

    /// Composition `outer(inner(z))` truncated at `order`, by Horner's rule.
    ///
    /// The inner series must have zero constant term.
    pub fn compose(outer: &ExactSeries, inner: &ExactSeries, order: usize) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::Domain(
                "composition requires an inner series with zero constant term".into(),
            ));
        }
        if inner.order() < order {
            return Err(Error::Domain(format!(
                "inner series known to order {} only, {} requested",
                inner.order(),
                order
            )));
        }
        let inner = inner.truncate(order);
        // Only outer coefficients up to `order` can contribute.
        let top = outer.order().min(order);
        let mut acc = Self::monomial(outer.coeffs[top].clone(), 0, order);
        for k in (0..top).rev() {
            acc = &acc * &inner;
            acc.coeffs[0] += &outer.coeffs[k];
        }
        Ok(acc)
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Evaluates the truncated polynomial at an exact rational point.
    pub fn eval(&self, z: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }
}

impl<'a> Add<&'a ExactSeries> for &'a ExactSeries {
    type Output = ExactSeries;

    fn add(self, rhs: &'a ExactSeries) -> ExactSeries {
        let n = self.order().min(rhs.order());
        ExactSeries {
            coeffs: (0..=n).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect(),
        }
    }
}

impl<'a> Sub<&'a ExactSeries> for &'a ExactSeries {
    type Output = ExactSeries;

    fn sub(self, rhs: &'a ExactSeries) -> ExactSeries {
        let n = self.order().min(rhs.order());
        ExactSeries {
            coeffs: (0..=n).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect(),
        }
    }
}

impl Neg for &ExactSeries {
    type Output = ExactSeries;

    fn neg(self) -> ExactSeries {
        ExactSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<'a> Mul<&'a ExactSeries> for &'a ExactSeries {
    type Output = ExactSeries;

    /// Cauchy product truncated at the smaller order.
    fn mul(self, rhs: &'a ExactSeries) -> ExactSeries {
        let n = self.order().min(rhs.order());
        let mut out = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        ExactSeries { coeffs: out }
    }
}

impl fmt::Display for ExactSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z")?,
                _ => write!(f, "{c}*z^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order() + 1)
    }
}

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("{s:?}: zero denominator")));
            }
            Ok(Rational::new(parse_int(p)?, q))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}
