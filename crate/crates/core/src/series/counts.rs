use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::ExactSeries;
use crate::error::{Error, Result};
use crate::Rational;

/// Number of Pólya trees `t_1..t_N` via
/// `(n-1) t_n = sum_{i=1}^{n-1} t_{n-i} sum_{m | i} m t_m`.
///
/// The returned vector has `t_k` at index `k - 1`.
pub fn polya_counts(n: usize) -> Result<Vec<BigUint>> {
    if n == 0 {
        return Err(Error::EmptyRange("polya_counts needs N >= 1".into()));
    }
    let mut t = polya_counts_table(n);
    t.remove(0);
    Ok(t)
}

/// Same as [`polya_counts`] but indexed from 0 with `t_0 = 0`.
pub(crate) fn polya_counts_table(n: usize) -> Vec<BigUint> {
    let mut t = vec![BigUint::zero(); n + 1];
    // divisor sums s_i = sum_{m | i} m t_m, filled in as each t_m becomes known
    let mut s = vec![BigUint::zero(); n + 1];
    if n >= 1 {
        t[1] = BigUint::one();
        for sk in s.iter_mut().skip(1) {
            *sk += &t[1];
        }
    }
    for m in 2..=n {
        let mut acc = BigUint::zero();
        for i in 1..m {
            acc += &t[m - i] * &s[i];
        }
        let (q, r) = acc.div_rem(&BigUint::from(m - 1));
        assert!(r.is_zero(), "non-exact division in the Pólya recurrence at n = {m}");
        t[m] = q;
        let weighted = &t[m] * BigUint::from(m);
        for k in (m..=n).step_by(m) {
            s[k] += &weighted;
        }
    }
    t
}

/// The Pólya series `T(z) = sum t_n z^n` truncated at `order`.
pub fn polya_series(order: usize) -> ExactSeries {
    let t = polya_counts_table(order);
    ExactSeries::from_coeffs(t.into_iter().map(|c| Rational::from_integer(BigInt::from(c))).collect())
}

fn cayley_weight(n: usize) -> Rational {
    if n == 0 {
        return Rational::zero();
    }
    let num = BigInt::from(n).pow(n as u32 - 1);
    let den: BigInt = (1..=n).map(BigInt::from).product();
    Rational::new(num, den)
}

/// The Cayley series `C(z) = sum n^{n-1}/n! z^n` truncated at `order`.
pub fn cayley_series(order: usize) -> ExactSeries {
    ExactSeries::from_coeffs((0..=order).map(cayley_weight).collect())
}

/// Cayley weights `c_1..c_N` (`c_k` at index `k - 1`), after checking
/// `C(z) = z exp(C(z))` coefficient-wise up to `N`.
pub fn cayley_weights(n: usize) -> Result<Vec<Rational>> {
    if n == 0 {
        return Err(Error::EmptyRange("cayley_weights needs N >= 1".into()));
    }
    let c = cayley_series(n);
    let rhs = c.exp()?.shift(1);
    if rhs != c {
        return Err(Error::Consistency("Cayley series does not satisfy C = z exp(C)".into()));
    }
    Ok(c.into_coeffs().into_iter().skip(1).collect())
}

/// D-forest weights `d_0..d_N` by the recurrence
/// `n d_n = sum_{i=2}^n d_{n-i} sum_{m | i, m != i} m t_m`.
#[allow(clippy::needless_range_loop)]
fn dforest_weights_by_recurrence(n: usize, t: &[BigUint]) -> Vec<Rational> {
    let mut proper = vec![BigInt::zero(); n + 1];
    for m in 1..=n / 2 {
        let w = BigInt::from(&t[m] * BigUint::from(m));
        for k in (2 * m..=n).step_by(m) {
            proper[k] += &w;
        }
    }
    let mut d = vec![Rational::zero(); n + 1];
    d[0] = Rational::one();
    for m in 2..=n {
        let mut acc = Rational::zero();
        for i in 2..=m {
            if !d[m - i].is_zero() {
                acc += &d[m - i] * &proper[i];
            }
        }
        d[m] = acc / BigInt::from(m);
    }
    d
}

/// D-forest weights `d_0..d_N` computed as `exp(sum_{i>=2} T(z^i)/i)`.
pub fn dforest_weights_by_exp(n: usize) -> Result<Vec<Rational>> {
    let t = polya_series(n);
    let mut sum = ExactSeries::zero(n);
    for i in 2..=n.max(2) {
        let term = t
            .substitute_power(i)
            .scale(&Rational::new(BigInt::one(), BigInt::from(i)));
        sum = &sum + &term;
    }
    Ok(sum.exp()?.into_coeffs())
}

/// D-forest weights `d_0..d_N`. Both the recurrence and the exponential
/// route are evaluated; a disagreement is a consistency error.
pub fn dforest_weights(n: usize) -> Result<Vec<Rational>> {
    let t = polya_counts_table(n.max(1));
    let rec = dforest_weights_by_recurrence(n, &t);
    let via_exp = dforest_weights_by_exp(n)?;
    if rec != via_exp {
        let k = rec.iter().zip(&via_exp).position(|(a, b)| a != b).unwrap_or(0);
        return Err(Error::Consistency(format!(
            "d_{k}: recurrence gives {} but exp route gives {}",
            rec[k], via_exp[k]
        )));
    }
    Ok(rec)
}

/// The three basic coefficient sequences up to a common order.
#[derive(Clone, Debug)]
pub struct CountTable {
    /// `t[k]` for `k = 0..=N` with `t[0] = 0`.
    pub t: Vec<BigUint>,
    /// `d[k]` for `k = 0..=N`.
    pub d: Vec<Rational>,
    /// `c[k]` for `k = 0..=N` with `c[0] = 0`.
    pub c: Vec<Rational>,
}

impl CountTable {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::EmptyRange("CountTable needs N >= 1".into()));
        }
        let t = polya_counts_table(order);
        let d = dforest_weights(order)?;
        let c = cayley_series(order).into_coeffs();
        Ok(CountTable { t, d, c })
    }

    pub fn order(&self) -> usize {
        self.t.len() - 1
    }

    pub fn t_series(&self) -> ExactSeries {
        ExactSeries::from_coeffs(
            self.t
                .iter()
                .map(|c| Rational::from_integer(BigInt::from(c.clone())))
                .collect(),
        )
    }

    pub fn d_series(&self) -> ExactSeries {
        ExactSeries::from_coeffs(self.d.clone())
    }

    pub fn c_series(&self) -> ExactSeries {
        ExactSeries::from_coeffs(self.c.clone())
    }
}
