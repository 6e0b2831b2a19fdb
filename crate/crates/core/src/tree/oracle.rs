//! Brute-force counterparts of the series identities.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{
    enumerate_forests_with, enumerate_trees_with, forest_weight, forest_weight_by_enumeration, EnumerationLimits,
    TreeMemo,
};
use crate::error::{Error, Result};
use crate::series::UPolynomial;
use crate::Rational;

/// Forests up to this size are also weighted by listing their automorphisms.
const DEFINITIONAL_FOREST_CAP: usize = 6;

/// `d_n` as the sum of fixed-point-free automorphism fractions over all
/// D-forests of size `n`.
pub fn dn_oracle(n: usize) -> Result<Rational> {
    dn_oracle_with(n, &EnumerationLimits::default())
}

pub fn dn_oracle_with(n: usize, limits: &EnumerationLimits) -> Result<Rational> {
    let mut total = Rational::zero();
    for forest in enumerate_forests_with(n, limits)? {
        let w = forest_weight(&forest);
        if forest.size() <= DEFINITIONAL_FOREST_CAP {
            let listed = forest_weight_by_enumeration(&forest, DEFINITIONAL_FOREST_CAP)?;
            if listed != w {
                return Err(Error::Consistency(format!(
                    "forest {forest}: closed form {w} but listed automorphisms give {listed}"
                )));
            }
        }
        total += w;
    }
    Ok(total)
}

/// `t_{c,n}(u)` as the sum of fixed-point polynomials over all trees of
/// size `n`.
pub fn tcn_polynomial_oracle(n: usize) -> Result<UPolynomial> {
    tcn_polynomial_oracle_with(n, &EnumerationLimits::default())
}

pub fn tcn_polynomial_oracle_with(n: usize, limits: &EnumerationLimits) -> Result<UPolynomial> {
    let mut memo = TreeMemo::new();
    Ok(enumerate_trees_with(n, limits)?
        .iter()
        .map(|t| memo.fixed_point_polynomial(t))
        .sum())
}

/// `sum_{|T| = n} 1/|Aut(T)|`.
pub fn cayley_mass(n: usize) -> Result<Rational> {
    let mut memo = TreeMemo::new();
    let mut total = Rational::zero();
    for t in enumerate_trees_with(n, &EnumerationLimits::default())? {
        total += Rational::new(BigInt::one(), BigInt::from(memo.aut_order(&t)));
    }
    Ok(total)
}
