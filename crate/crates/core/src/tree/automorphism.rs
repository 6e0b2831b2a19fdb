use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_traits::{One, Zero};

use super::{CanonicalTree, ForestSpec};
use crate::error::{Error, Result};
use crate::series::UPolynomial;
use crate::Rational;

/// Derangement numbers `D_0..=D_r`, `D_r = (r-1)(D_{r-1} + D_{r-2})`.
pub fn derangements(r: usize) -> Vec<BigUint> {
    let mut d = vec![BigUint::one()];
    if r >= 1 {
        d.push(BigUint::zero());
    }
    for k in 2..=r {
        let next = BigUint::from(k - 1) * (&d[k - 1] + &d[k - 2]);
        d.push(next);
    }
    d
}

fn factorial(k: usize) -> BigUint {
    (1..=k).map(BigUint::from).product()
}

/// Cycle index of `S_k` evaluated at `(s, 1, 1, ...)`:
/// `(1/k!) sum_j binom(k, j) D_{k-j} s^j`.
fn symmetric_fixed_point_index(k: usize, s: &UPolynomial) -> UPolynomial {
    let der = derangements(k);
    let kf = BigInt::from(factorial(k));
    let mut acc = UPolynomial::zero();
    let mut power = UPolynomial::one();
    for j in 0..=k {
        let w = BigInt::from(binomial(BigUint::from(k), BigUint::from(j)) * &der[k - j]);
        if !w.is_zero() {
            acc = &acc + &power.scale(&Rational::new(w, kf.clone()));
        }
        if j < k {
            power = &power * s;
        }
    }
    acc
}

/// Per-subtree memo for automorphism data, keyed by canonical encoding.
#[derive(Default, Debug)]
pub struct TreeMemo {
    aut: HashMap<Vec<u32>, BigUint>,
    poly: HashMap<Vec<u32>, UPolynomial>,
    orbits: HashMap<Vec<u32>, usize>,
}

impl TreeMemo {
    pub fn new() -> Self {
        Self::default()
    }

    /// `|Aut(T)| = prod over classes of k_i! |Aut(S_i)|^{k_i}`, recursively.
    pub fn aut_order(&mut self, tree: &CanonicalTree) -> BigUint {
        self.aut_slice(tree.as_slice())
    }

    fn aut_slice(&mut self, s: &[u32]) -> BigUint {
        if s.len() == 1 {
            return BigUint::one();
        }
        if let Some(v) = self.aut.get(s) {
            return v.clone();
        }
        let t = CanonicalTree::from_canonical_sizes(s.to_vec());
        let mut acc = BigUint::one();
        for class in t.child_classes(0) {
            let sub = self.aut_slice(t.subtree(class.first));
            acc *= factorial(class.multiplicity) * sub.pow(class.multiplicity as u32);
        }
        self.aut.insert(s.to_vec(), acc.clone());
        acc
    }

    /// Fixed-point polynomial `t_T(u)` by the wreath-product recursion
    /// `t_T(u) = u prod_i Z(S_{k_i}; t_{S_i}(u), 1, ..., 1)`.
    pub fn fixed_point_polynomial(&mut self, tree: &CanonicalTree) -> UPolynomial {
        self.poly_slice(tree.as_slice())
    }

    fn poly_slice(&mut self, s: &[u32]) -> UPolynomial {
        if let Some(p) = self.poly.get(s) {
            return p.clone();
        }
        let t = CanonicalTree::from_canonical_sizes(s.to_vec());
        let mut acc = UPolynomial::monomial(Rational::one(), 1);
        for class in t.child_classes(0) {
            let sub = self.poly_slice(t.subtree(class.first));
            acc = &acc * &symmetric_fixed_point_index(class.multiplicity, &sub);
        }
        self.poly.insert(s.to_vec(), acc.clone());
        acc
    }

    /// Number of node orbits, `1 + sum over distinct child classes`.
    pub fn orbit_count(&mut self, tree: &CanonicalTree) -> usize {
        self.orbit_slice(tree.as_slice())
    }

    fn orbit_slice(&mut self, s: &[u32]) -> usize {
        if s.len() == 1 {
            return 1;
        }
        if let Some(&o) = self.orbits.get(s) {
            return o;
        }
        let t = CanonicalTree::from_canonical_sizes(s.to_vec());
        let o = 1 + t
            .child_classes(0)
            .iter()
            .map(|c| self.orbit_slice(t.subtree(c.first)))
            .sum::<usize>();
        self.orbits.insert(s.to_vec(), o);
        o
    }
}

/// Order of the automorphism group of `tree`.
pub fn aut_order(tree: &CanonicalTree) -> BigUint {
    TreeMemo::new().aut_order(tree)
}

/// `t_T(u) = (1/|Aut T|) sum_{sigma} u^{fixed points of sigma}`, computed
/// without listing the group.
pub fn fixed_point_polynomial(tree: &CanonicalTree) -> UPolynomial {
    TreeMemo::new().fixed_point_polynomial(tree)
}

/// Number of orbits of `Aut(T)` on the nodes of `tree`.
pub fn orbit_count(tree: &CanonicalTree) -> usize {
    TreeMemo::new().orbit_count(tree)
}

/// Weight `|{sigma in Aut F : no fixed point}| / |Aut F|` of a D-forest,
/// by the closed form `prod_i D_{m_i} / m_i!`.
///
/// A tree automorphism fixes its root, so a copy that is mapped onto itself
/// contributes a fixed node; fixed-point-free elements are exactly those that
/// derange the copy positions of every class.
pub fn forest_weight(forest: &ForestSpec) -> Rational {
    let mut acc = Rational::one();
    for (_, m) in forest.classes() {
        let der = derangements(*m);
        acc *= Rational::new(BigInt::from(der[*m].clone()), BigInt::from(factorial(*m)));
    }
    acc
}

/// The same weight by listing `Aut(F)` definitionally: every permutation of
/// the forest's nodes that commutes with the parent map. Feasible only for
/// tiny forests.
pub fn forest_weight_by_enumeration(forest: &ForestSpec, cap: usize) -> Result<Rational> {
    if forest.size() > cap {
        return Err(Error::ResourceCap {
            what: "forest size for brute-force automorphisms",
            requested: forest.size(),
            cap,
        });
    }
    let parent = forest.parents();
    let auts = brute_force_automorphisms(&parent);
    let free = auts
        .iter()
        .filter(|p| p.iter().enumerate().all(|(v, &w)| v != w))
        .count();
    Ok(Rational::new(BigInt::from(free), BigInt::from(auts.len())))
}

/// All permutations `p` of `0..n` with `parent(p(v)) = p(parent(v))`
/// (roots map to roots). Exhaustive over `n!` permutations.
pub fn brute_force_automorphisms(parent: &[Option<usize>]) -> Vec<Vec<usize>> {
    let n = parent.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        let ok = (0..n).all(|v| parent[perm[v]] == parent[v].map(|p| perm[p]));
        if ok {
            out.push(perm.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// An element of `Aut(T)` in wreath-product coordinates.
///
/// For every non-root node `v`, `local[v]` is the sibling copy (same parent,
/// identical subtree) onto which `v`'s subtree is sent relative to its
/// parent's frame. The global bijection is recovered top-down as
/// `phi(root) = root`, `phi(v) = phi(parent) + (local[v] - parent)`, which is
/// valid because `phi(parent)` has the same canonical layout as `parent`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AutomorphismElement {
    local: Vec<u32>,
}

impl AutomorphismElement {
    pub fn identity(tree: &CanonicalTree) -> Self {
        AutomorphismElement {
            local: (0..tree.size() as u32).collect(),
        }
    }

    /// Wraps local coordinates after checking them against `tree`.
    pub fn from_local(tree: &CanonicalTree, local: Vec<u32>) -> Result<Self> {
        let a = AutomorphismElement { local };
        a.validate(tree)?;
        Ok(a)
    }

    /// Builds an element from one permutation of copy positions per node and
    /// child class: `perms[v][c][j]` is the copy position that copy `j` of
    /// class `c` of node `v` is sent to.
    pub fn from_class_permutations(tree: &CanonicalTree, perms: &[Vec<Vec<usize>>]) -> Result<Self> {
        if perms.len() != tree.size() {
            return Err(Error::InvalidAutomorphism("one entry per node expected".into()));
        }
        let mut local: Vec<u32> = (0..tree.size() as u32).collect();
        for (v, per_class) in perms.iter().enumerate() {
            let classes = tree.child_classes(v);
            if per_class.len() != classes.len() {
                return Err(Error::InvalidAutomorphism(format!(
                    "node {v} has {} classes, {} permutations given",
                    classes.len(),
                    per_class.len()
                )));
            }
            for (class, perm) in classes.iter().zip(per_class) {
                if perm.len() != class.multiplicity {
                    return Err(Error::InvalidAutomorphism(format!(
                        "class at node {v} has {} copies",
                        class.multiplicity
                    )));
                }
                for (j, &target) in perm.iter().enumerate() {
                    if target >= class.multiplicity {
                        return Err(Error::InvalidAutomorphism("copy index out of range".into()));
                    }
                    local[class.copy(j)] = class.copy(target) as u32;
                }
            }
        }
        Self::from_local(tree, local)
    }

    pub(crate) fn from_local_unchecked(local: Vec<u32>) -> Self {
        AutomorphismElement { local }
    }

    pub fn local(&self) -> &[u32] {
        &self.local
    }

    /// Permutation of copy positions applied to class `class_index` at `v`.
    pub fn class_permutation(&self, tree: &CanonicalTree, v: usize, class_index: usize) -> Vec<usize> {
        let class = tree.child_classes(v)[class_index];
        (0..class.multiplicity)
            .map(|j| (self.local[class.copy(j)] as usize - class.first) / class.size)
            .collect()
    }

    /// Checks that every local move stays within a class of identical
    /// siblings and permutes it bijectively.
    pub fn validate(&self, tree: &CanonicalTree) -> Result<()> {
        if self.local.len() != tree.size() {
            return Err(Error::InvalidAutomorphism(format!(
                "{} entries for a tree of size {}",
                self.local.len(),
                tree.size()
            )));
        }
        if self.local[0] != 0 {
            return Err(Error::InvalidAutomorphism("root must be fixed".into()));
        }
        for v in 0..tree.size() {
            for class in tree.child_classes(v) {
                let mut hit = vec![false; class.multiplicity];
                for j in 0..class.multiplicity {
                    let c = class.copy(j);
                    let target = self.local[c] as usize;
                    if target < class.first || !(target - class.first).is_multiple_of(class.size) {
                        return Err(Error::InvalidAutomorphism(format!(
                            "node {c} is sent to {target}, not a copy of its class"
                        )));
                    }
                    let pos = (target - class.first) / class.size;
                    if pos >= class.multiplicity || std::mem::replace(&mut hit[pos], true) {
                        return Err(Error::InvalidAutomorphism(format!(
                            "class at node {v} is not permuted bijectively"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The global node bijection `phi` as an image array.
    pub fn global_map(&self, tree: &CanonicalTree) -> Vec<usize> {
        let n = tree.size();
        let mut phi = vec![0usize; n];
        for v in 0..n {
            for c in tree.children(v) {
                phi[c] = phi[v] + (self.local[c] as usize - v);
            }
        }
        phi
    }

    /// Rebuilds local coordinates from a global bijection.
    fn from_global(tree: &CanonicalTree, phi: &[usize]) -> Self {
        let mut local: Vec<u32> = (0..tree.size() as u32).collect();
        for v in 0..tree.size() {
            for c in tree.children(v) {
                local[c] = (v + phi[c] - phi[v]) as u32;
            }
        }
        AutomorphismElement { local }
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self, tree: &CanonicalTree) -> Self {
        let a = self.global_map(tree);
        let b = other.global_map(tree);
        let phi: Vec<usize> = b.iter().map(|&x| a[x]).collect();
        Self::from_global(tree, &phi)
    }

    pub fn inverse(&self, tree: &CanonicalTree) -> Self {
        let a = self.global_map(tree);
        let mut inv = vec![0; a.len()];
        for (v, &w) in a.iter().enumerate() {
            inv[w] = v;
        }
        Self::from_global(tree, &inv)
    }

    pub fn is_identity(&self) -> bool {
        self.local.iter().enumerate().all(|(v, &w)| v == w as usize)
    }

    /// Number of nodes fixed by the global map.
    pub fn fixed_point_count(&self, tree: &CanonicalTree) -> usize {
        self.global_map(tree)
            .iter()
            .enumerate()
            .filter(|(v, &w)| *v == w)
            .count()
    }
}

/// Lists all of `Aut(T)` as products of per-class permutations. Exponential;
/// intended as a micro-oracle on trees with at most `cap` elements.
pub fn enumerate_automorphisms(tree: &CanonicalTree, cap: usize) -> Result<Vec<AutomorphismElement>> {
    let order = aut_order(tree);
    if order > BigUint::from(cap) {
        return Err(Error::ResourceCap {
            what: "automorphism group order",
            requested: usize::try_from(&order).unwrap_or(usize::MAX),
            cap,
        });
    }
    let classes: Vec<_> = (0..tree.size())
        .flat_map(|v| tree.child_classes(v))
        .filter(|c| c.multiplicity > 1)
        .collect();
    let mut out = vec![AutomorphismElement::identity(tree)];
    for class in classes {
        let mut perms = Vec::new();
        let mut p: Vec<usize> = (0..class.multiplicity).collect();
        loop {
            perms.push(p.clone());
            if !next_permutation(&mut p) {
                break;
            }
        }
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for base in &out {
            for perm in &perms {
                let mut local = base.local.clone();
                for (j, &target) in perm.iter().enumerate() {
                    local[class.copy(j)] = class.copy(target) as u32;
                }
                next.push(AutomorphismElement { local });
            }
        }
        out = next;
    }
    Ok(out)
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
    fn derangement_numbers() {
        let d: Vec<u64> = derangements(7).iter().map(|x| u64::try_from(x).unwrap()).collect();
        assert_eq!(d, vec![1, 0, 1, 2, 9, 44, 265, 1854]);
    }

    #[test]
    fn group_orders_of_size_four_trees() {
        assert_eq!(aut_order(&CanonicalTree::chain(4)), BigUint::from(1u32));
        let cherry_on_top = CanonicalTree::parse_parens("((()()))").unwrap();
        assert_eq!(aut_order(&cherry_on_top), BigUint::from(2u32));
        assert_eq!(aut_order(&CanonicalTree::star(3)), BigUint::from(6u32));
    }

    #[test]
    fn worked_polynomials() {
        assert_eq!(
            fixed_point_polynomial(&CanonicalTree::star(2)),
            poly(&[(0, 1), (1, 2), (0, 1), (1, 2)])
        );
        assert_eq!(
            fixed_point_polynomial(&CanonicalTree::star(3)),
            poly(&[(0, 1), (1, 3), (1, 2), (0, 1), (1, 6)])
        );
        assert_eq!(
            fixed_point_polynomial(&CanonicalTree::single()),
            poly(&[(0, 1), (1, 1)])
        );
    }

    #[test]
    fn orbit_counts() {
        assert_eq!(orbit_count(&CanonicalTree::star(3)), 2);
        for n in 1..8 {
            assert_eq!(orbit_count(&CanonicalTree::chain(n)), n);
        }
    }

    #[test]
    fn listed_group_matches_polynomial() {
        let t = CanonicalTree::parse_parens("((()())(()())())").unwrap();
        let all = enumerate_automorphisms(&t, 1000).unwrap();
        assert_eq!(BigUint::from(all.len()), aut_order(&t));
        let mut counts = vec![0usize; t.size() + 1];
        for a in &all {
            a.validate(&t).unwrap();
            counts[a.fixed_point_count(&t)] += 1;
        }
        let p = fixed_point_polynomial(&t);
        for (k, &c) in counts.iter().enumerate() {
            assert_eq!(p.coeff(k), r(c as i64, all.len() as i64));
        }
    }

    #[test]
    fn brute_force_agrees_with_group_order() {
        for s in ["(()()())", "((()())(()()))", "((())(())())"] {
            let t = CanonicalTree::parse_parens(s).unwrap();
            let auts = brute_force_automorphisms(&t.parents());
            assert_eq!(BigUint::from(auts.len()), aut_order(&t), "{s}");
        }
    }

    #[test]
    fn element_algebra() {
        let t = CanonicalTree::parse_parens("((()())(()()))").unwrap();
        let all = enumerate_automorphisms(&t, 100).unwrap();
        assert_eq!(all.len(), 8);
        let parent = t.parents();
        for a in &all {
            let phi = a.global_map(&t);
            for v in 0..t.size() {
                assert_eq!(parent[phi[v]], parent[v].map(|p| phi[p]));
            }
            assert!(a.compose(&a.inverse(&t), &t).is_identity());
            for b in &all {
                let ab = a.compose(b, &t);
                ab.validate(&t).unwrap();
                assert!(all.contains(&ab));
            }
        }
    }

    #[test]
    fn class_permutation_round_trip() {
        let t = CanonicalTree::star(3);
        let a =
            AutomorphismElement::from_class_permutations(&t, &[vec![vec![1, 2, 0]], vec![], vec![], vec![]]).unwrap();
        assert_eq!(a.class_permutation(&t, 0, 0), vec![1, 2, 0]);
        assert_eq!(a.fixed_point_count(&t), 1);
        assert!(
            AutomorphismElement::from_class_permutations(&t, &[vec![vec![1, 1, 0]], vec![], vec![], vec![]],).is_err()
        );
    }

    #[test]
    fn invalid_local_coordinates() {
        let t = CanonicalTree::parse_parens("((())())").unwrap();
        // swapping the 2-chain with the leaf is not an automorphism
        let bad = vec![0, 3, 2, 1];
        assert!(matches!(
            AutomorphismElement::from_local(&t, bad),
            Err(Error::InvalidAutomorphism(_))
        ));
        assert!(AutomorphismElement::from_local(&t, vec![0, 1]).is_err());
    }

    #[test]
    fn enumeration_cap() {
        let t = CanonicalTree::star(8);
        assert!(matches!(
            enumerate_automorphisms(&t, 1000),
            Err(Error::ResourceCap { .. })
        ));
    }
}
