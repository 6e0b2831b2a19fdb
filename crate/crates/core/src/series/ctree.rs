use num_bigint::BigInt;
use num_traits::Zero;

use super::{CountTable, ExactSeries, UPolynomial};
use crate::error::{Error, Result};
use crate::Rational;

/// Rows `t_{c,n}(u)` for `n = 1..=N`: the C-tree size polynomials of all
/// Pólya trees of size `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariatePolynomialTable {
    rows: Vec<UPolynomial>,
}

impl BivariatePolynomialTable {
    pub fn order(&self) -> usize {
        self.rows.len()
    }

    /// `t_{c,n}(u)` for `1 <= n <= order()`.
    pub fn row(&self, n: usize) -> &UPolynomial {
        &self.rows[n - 1]
    }

    pub fn rows(&self) -> &[UPolynomial] {
        &self.rows
    }
}

/// `t_{c,n}(u) = [z^n] C(u z D(z))` for `n = 1..=N`.
///
/// Expands `C(x) = sum c_k x^k` and tracks the power of `x = zD(z)`, whose
/// exponent is the `u`-degree. Checks `t_{c,n}(1) = t_n` and
/// `[u^n] t_{c,n} = c_n` before returning.
#[allow(clippy::needless_range_loop)]
pub fn ctree_polynomials(n: usize) -> Result<BivariatePolynomialTable> {
    if n == 0 {
        return Err(Error::EmptyRange("ctree_polynomials needs N >= 1".into()));
    }
    let table = CountTable::new(n)?;
    let x = table.d_series().shift(1);

    let mut grid = vec![vec![Rational::zero(); n + 1]; n + 1];
    let mut power = x.clone();
    for k in 1..=n {
        for m in k..=n {
            let a = power.coeff(m);
            if !a.is_zero() {
                grid[m][k] = &table.c[k] * a;
            }
        }
        if k < n {
            power = &power * &x;
        }
    }
    let rows: Vec<UPolynomial> = grid.into_iter().skip(1).map(UPolynomial::from_coeffs).collect();

    for (i, row) in rows.iter().enumerate() {
        let m = i + 1;
        let t = Rational::from_integer(BigInt::from(table.t[m].clone()));
        if row.at_one() != t {
            return Err(Error::Consistency(format!(
                "t_(c,{m})(1) = {} differs from t_{m} = {t}",
                row.at_one()
            )));
        }
        if row.coeff(m) != table.c[m] {
            return Err(Error::Consistency(format!(
                "top coefficient of t_(c,{m}) is {} instead of the Cayley weight {}",
                row.coeff(m),
                table.c[m]
            )));
        }
    }
    Ok(BivariatePolynomialTable { rows })
}

/// `T(z) / (1 - T(z))` truncated at `N`, the counting series of singly
/// pointed Pólya trees. Its coefficients are checked to be integers.
pub fn pointed_series(n: usize) -> Result<ExactSeries> {
    if n == 0 {
        return Err(Error::EmptyRange("pointed_series needs N >= 1".into()));
    }
    let t = super::polya_series(n);
    let one_minus = &ExactSeries::one(n) - &t;
    let out = &t * &one_minus.reciprocal()?;
    if !out.is_integral() {
        return Err(Error::Consistency("T/(1-T) has a non-integral coefficient".into()));
    }
    Ok(out)
}

/// Finite-n law of the D-forest size attached to a random C-node.
///
/// Precomputes `T_c(z) = T/(1-T)`, the weights `d_m` and `1/D(z)` up to a
/// fixed order so that many `(n, m)` queries share the work.
#[derive(Clone, Debug)]
pub struct ForestLaw {
    pointed: Vec<BigInt>,
    d: Vec<Rational>,
    inv_d: Vec<Rational>,
}

impl ForestLaw {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::EmptyRange("ForestLaw needs order >= 1".into()));
        }
        let table = CountTable::new(order)?;
        let pointed = pointed_series(order)?
            .into_coeffs()
            .into_iter()
            .map(|c| c.to_integer())
            .collect();
        let inv_d = table.d_series().reciprocal()?.into_coeffs();
        Ok(ForestLaw {
            pointed,
            d: table.d,
            inv_d,
        })
    }

    pub fn order(&self) -> usize {
        self.pointed.len() - 1
    }

    /// `[z^n] T_c(z) d_m z^m / D(z)`: total C-node weight over trees of size
    /// `n` carried by nodes whose forest has size `m`.
    pub fn weight(&self, n: usize, m: usize) -> Result<Rational> {
        self.check(n, m)?;
        let rest = n - m;
        let mut acc = Rational::zero();
        for i in 1..=rest {
            let b = &self.inv_d[rest - i];
            if !b.is_zero() {
                acc += b * &self.pointed[i];
            }
        }
        Ok(acc * &self.d[m])
    }

    /// `[z^n] T_c(z)`, the total number of pointed trees of size `n`.
    pub fn total(&self, n: usize) -> Result<BigInt> {
        if n == 0 || n > self.order() {
            return Err(Error::Domain(format!("n = {n} outside 1..={}", self.order())));
        }
        Ok(self.pointed[n].clone())
    }

    /// Probability that a random C-node of a random tree of size `n` carries
    /// a D-forest of size `m`.
    pub fn prob(&self, n: usize, m: usize) -> Result<Rational> {
        let w = self.weight(n, m)?;
        let total = &self.pointed[n];
        if total.is_zero() {
            return Err(Error::UndefinedProbability(format!("[z^{n}] T_c(z) vanishes")));
        }
        Ok(w / total)
    }

    fn check(&self, n: usize, m: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::UndefinedProbability("no C-nodes in trees of size 0".into()));
        }
        if n > self.order() {
            return Err(Error::Domain(format!(
                "n = {n} exceeds the precomputed order {}",
                self.order()
            )));
        }
        if m > n {
            return Err(Error::Domain(format!("forest size {m} exceeds n = {n}")));
        }
        Ok(())
    }
}

/// Exact finite-n probability that a random C-node carries a D-forest of
/// size `m` in a uniform Pólya tree of size `n`.
pub fn exact_forest_prob(n: usize, m: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::UndefinedProbability("no C-nodes in trees of size 0".into()));
    }
    ForestLaw::new(n)?.prob(n, m)
}

/// Exact mean of `|C_n|`: `[z^n] T/(1-T) / t_n`.
pub fn exact_ctree_mean(n: usize) -> Result<Rational> {
    let law = ForestLaw::new(n)?;
    let t = super::polya_counts_table(n);
    Ok(Rational::new(law.total(n)?, BigInt::from(t[n].clone())))
}

/// Exact variance of `|C_n|` from `E|C_n|^2 = [z^n] T/(1-T)^3 / t_n`.
pub fn exact_ctree_variance(n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::EmptyRange("n must be >= 1".into()));
    }
    let t = super::polya_series(n);
    let inv = (&ExactSeries::one(n) - &t).reciprocal()?;
    let cube = &(&t * &inv) * &(&inv * &inv);
    let tn = t.coeff(n).clone();
    let mean = cube.coeff(n).clone() / &tn;
    let first = exact_ctree_mean(n)?;
    Ok(mean - &first * &first)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    fn poly(c: &[(i64, i64)]) -> UPolynomial {
        UPolynomial::from_coeffs(c.iter().map(|&(p, q)| r(p, q)).collect())
    }

    #[test]
    fn small_ctree_polynomials() {
        let tab = ctree_polynomials(4).unwrap();
        assert_eq!(tab.row(1), &poly(&[(0, 1), (1, 1)]));
        assert_eq!(tab.row(2), &poly(&[(0, 1), (0, 1), (1, 1)]));
        assert_eq!(tab.row(3), &poly(&[(0, 1), (1, 2), (0, 1), (3, 2)]));
        assert_eq!(tab.row(4), &poly(&[(0, 1), (1, 3), (1, 1), (0, 1), (8, 3)]));
    }

    #[test]
    fn pointed_first_terms() {
        let p = pointed_series(5).unwrap();
        let want = ExactSeries::from_integers([0, 1, 2, 5, 13, 35]);
        assert_eq!(p, want);
    }

    #[test]
    fn derivative_identity() {
        let tab = ctree_polynomials(12).unwrap();
        let p = pointed_series(12).unwrap();
        for n in 1..=12 {
            assert_eq!(tab.row(n).derivative().at_one(), *p.coeff(n), "n = {n}");
        }
    }

    #[test]
    fn forest_prob_edge_cases() {
        assert_eq!(exact_forest_prob(2, 0).unwrap(), r(1, 1));
        for n in 1..12 {
            assert_eq!(exact_forest_prob(n, 1).unwrap(), r(0, 1));
        }
        assert!(matches!(exact_forest_prob(0, 0), Err(Error::UndefinedProbability(_))));
        assert!(matches!(exact_forest_prob(3, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn forest_law_normalizes() {
        let law = ForestLaw::new(25).unwrap();
        for n in 1..=25 {
            let total: Rational = (0..=n).map(|m| law.weight(n, m).unwrap()).sum();
            assert_eq!(total, Rational::from_integer(law.total(n).unwrap()));
        }
    }

    #[test]
    fn size_four_law() {
        // t_4 = 4 trees; 13 pointed trees; forests: star with 3-cycle gives
        // root forest 3, transpositions give a forest of 2.
        let law = ForestLaw::new(4).unwrap();
        let probs: Vec<Rational> = (0..=4).map(|m| law.prob(4, m).unwrap()).collect();
        let sum: Rational = probs.iter().sum();
        assert_eq!(sum, r(1, 1));
        // weights: m=2: (1/2)(T3 root) + (1/2)(star root) = 1; m=3: 1/3 (star)
        assert_eq!(law.weight(4, 2).unwrap(), r(1, 1));
        assert_eq!(law.weight(4, 3).unwrap(), r(1, 3));
    }

    #[test]
    fn small_moments() {
        // n = 3: chain u^3, cherry (u^3+u)/2 → E = (3 + 2)/2 = 5/2
        assert_eq!(exact_ctree_mean(3).unwrap(), r(5, 2));
        // E C^2 = (9 + (9+1)/2)/2 = 7, var = 7 - 25/4 = 3/4
        assert_eq!(exact_ctree_variance(3).unwrap(), r(3, 4));
    }
}
