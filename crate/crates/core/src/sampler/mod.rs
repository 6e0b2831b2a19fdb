//! Exact-size uniform sampling of Pólya trees and their automorphisms.
//!
//! Trees are drawn with the classical recursive method built on
//! `(n-1) t_n = sum_{j,d >= 1, jd < n} t_{n-jd} d t_d`: pick `(j, d)` with
//! probability `t_{n-jd} d t_d / ((n-1) t_n)`, draw a tree of size `n - jd`
//! and a tree of size `d`, and hang `j` copies of the latter below the root
//! of the former.
//!
//! The choice is an exact inverse-CDF lookup of a uniform integer below
//! `(n-1) t_n`. Only as many random bits as needed are materialised: the top
//! 64 bits locate the integer to within a relative `2^-63`, which is
//! compared against floating-point cumulative weights; when that comparison
//! is too close to call, the remaining bits are drawn and the cumulative sums
//! are recomputed in exact integer arithmetic.

mod decompose;
mod experiment;

pub use decompose::{decompose, Decomposition};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentStats, HistogramMode, SummaryStats};

use num_bigint::{BigUint, RandBigInt};
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::series::polya_counts_table;
use crate::tree::{AutomorphismElement, CanonicalTree};

/// Largest tree size a sampler table is built for unless raised explicitly.
/// The table stores `t_k` for all `k <= n`, which takes memory quadratic in
/// the digit count of `t_n`.
pub const DEFAULT_TABLE_CAP: usize = 20_000;

/// Sizes up to this bound use 128-bit exact arithmetic throughout.
const SMALL: usize = 64;

/// Distance from a cumulative boundary below which the float lookup defers
/// to exact arithmetic.
const MARGIN: f64 = 1e-9;

/// Deterministic random stream identified by `(seed, stream_index)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        RngStream {
            seed,
            stream_index,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Precomputed counts for sampling trees of size up to `max_n`.
#[derive(Clone, Debug)]
pub struct PolyaSampler {
    t: Vec<BigUint>,
    t_small: Vec<u128>,
    /// `ln t_k`.
    ln_t: Vec<f64>,
}

impl PolyaSampler {
    /// Builds the table through `max_n`, refusing sizes above
    /// [`DEFAULT_TABLE_CAP`].
    pub fn new(max_n: usize) -> Result<Self> {
        Self::with_cap(max_n, DEFAULT_TABLE_CAP)
    }

    pub fn with_cap(max_n: usize, cap: usize) -> Result<Self> {
        if max_n == 0 {
            return Err(Error::EmptyRange("tree size must be >= 1".into()));
        }
        if max_n > cap {
            return Err(Error::ResourceCap {
                what: "sampler table size",
                requested: max_n,
                cap,
            });
        }
        let t = polya_counts_table(max_n);
        let t_small = t
            .iter()
            .take(SMALL + 1)
            .map(|x| x.to_u128().expect("small counts fit in 128 bits"))
            .collect();
        let ln_t = t.iter().map(ln_biguint).collect();
        Ok(PolyaSampler { t, t_small, ln_t })
    }

    pub fn max_n(&self) -> usize {
        self.t.len() - 1
    }

    /// `t_k` for `k <= max_n`.
    pub fn count(&self, k: usize) -> &BigUint {
        &self.t[k]
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::EmptyRange("tree size must be >= 1".into()));
        }
        if n > self.max_n() {
            return Err(Error::ResourceCap {
                what: "tree size beyond sampler table",
                requested: n,
                cap: self.max_n(),
            });
        }
        Ok(())
    }

    /// A uniformly random Pólya tree with `n` nodes.
    pub fn sample_tree<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<CanonicalTree> {
        self.check(n)?;
        Ok(CanonicalTree::from_canonical_sizes(self.build(n, rng)))
    }

    /// Iterative form of the recursion, so that deep trees do not exhaust
    /// the call stack.
    fn build<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<u32> {
        struct Frame {
            /// Nodes still to be placed below this root.
            remaining: usize,
            /// Copies of the subtree currently being drawn.
            pending: usize,
            kids: Vec<(Vec<u32>, usize)>,
        }
        let mut stack = vec![Frame {
            remaining: n - 1,
            pending: 0,
            kids: Vec::new(),
        }];
        loop {
            let top = stack.last_mut().expect("non-empty");
            if top.remaining == 0 {
                let done = stack.pop().expect("non-empty");
                let enc = merge_root(done.kids);
                match stack.last_mut() {
                    None => return enc,
                    Some(parent) => {
                        let j = parent.pending;
                        parent.remaining -= j * enc.len();
                        parent.kids.push((enc, j));
                    }
                }
                continue;
            }
            let (j, d) = self.choose(top.remaining + 1, rng);
            top.pending = j;
            if d == 1 {
                top.remaining -= j;
                top.kids.push((vec![1], j));
            } else {
                stack.push(Frame {
                    remaining: d - 1,
                    pending: 0,
                    kids: Vec::new(),
                });
            }
        }
    }

    /// Draws `(j, d)` for a tree of size `m >= 2`.
    fn choose<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> (usize, usize) {
        if m <= SMALL {
            return self.choose_small(m, rng);
        }
        let total = BigUint::from(m - 1) * &self.t[m];
        let bits = total.bits();
        let shift = bits - 64;
        let top = (&total >> shift).to_u64().expect("64 bits");
        let ln_norm = ((m - 1) as f64).ln() + self.ln_t[m];
        loop {
            let h = rng.next_u64();
            if h > top {
                continue;
            }
            if h < top {
                let x = h as f64 / top as f64;
                if let Some(choice) = self.choose_float(m, x, ln_norm) {
                    return choice;
                }
            }
            // too close to call: finish drawing the integer
            let low = rng.gen_biguint(shift);
            let r = (BigUint::from(h) << shift) | low;
            if r < total {
                return self.choose_exact(m, &r);
            }
        }
    }

    fn choose_small<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> (usize, usize) {
        let t = &self.t_small;
        let mut r = rng.gen_range(0..(m as u128 - 1) * t[m]);
        for (j, d) in candidates(m) {
            let w = t[m - j * d] * d as u128 * t[d];
            if r < w {
                return (j, d);
            }
            r -= w;
        }
        unreachable!("weights sum to (m-1) t_m")
    }

    /// Float lookup of `x ~ R / total`; `None` when `x` lies within
    /// [`MARGIN`] of a cumulative boundary.
    fn choose_float(&self, m: usize, x: f64, ln_norm: f64) -> Option<(usize, usize)> {
        let mut acc = 0.0;
        for (j, d) in candidates(m) {
            let w = (self.ln_t[m - j * d] + (d as f64).ln() + self.ln_t[d] - ln_norm).exp();
            acc += w;
            if (x - acc).abs() <= MARGIN {
                return None;
            }
            if x < acc {
                return Some((j, d));
            }
        }
        None
    }

    fn choose_exact(&self, m: usize, r: &BigUint) -> (usize, usize) {
        let mut acc = BigUint::zero();
        for (j, d) in candidates(m) {
            acc += &self.t[m - j * d] * BigUint::from(d) * &self.t[d];
            if *r < acc {
                return (j, d);
            }
        }
        unreachable!("weights sum to (m-1) t_m")
    }

    /// A uniform element of `Aut(tree)`: an independent uniform permutation
    /// of the copies in every class of identical siblings.
    pub fn sample_automorphism<R: Rng + ?Sized>(tree: &CanonicalTree, rng: &mut R) -> AutomorphismElement {
        sample_automorphism(tree, rng)
    }

    /// Tree, uniform automorphism and the resulting decomposition.
    pub fn sample_decomposition<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Decomposition> {
        let tree = self.sample_tree(n, rng)?;
        let a = sample_automorphism(&tree, rng);
        Ok(decompose::decompose_valid(&tree, &a))
    }
}

/// Candidate pairs in scan order: `j = 1` with `d` descending (where most of
/// the mass sits), then larger `j`.
fn candidates(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..m).flat_map(move |j| (1..=(m - 1) / j).rev().map(move |d| (j, d)))
}

/// Root with the given children (each with a copy count), merged into
/// canonical order.
fn merge_root(mut kids: Vec<(Vec<u32>, usize)>) -> Vec<u32> {
    kids.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    let total: usize = 1 + kids.iter().map(|(k, j)| k.len() * j).sum::<usize>();
    let mut out = Vec::with_capacity(total);
    out.push(total as u32);
    for (k, j) in &kids {
        for _ in 0..*j {
            out.extend_from_slice(k);
        }
    }
    out
}

fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().expect("fits") as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("fits") as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// A uniformly random Pólya tree of size `n`, building a one-off table.
pub fn sample_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CanonicalTree> {
    PolyaSampler::new(n)?.sample_tree(n, rng)
}

/// A uniform element of `Aut(tree)`.
pub fn sample_automorphism<R: Rng + ?Sized>(tree: &CanonicalTree, rng: &mut R) -> AutomorphismElement {
    let mut local: Vec<u32> = (0..tree.size() as u32).collect();
    let mut perm: Vec<usize> = Vec::new();
    for v in 0..tree.size() {
        if tree.subtree_size(v) <= 2 {
            continue;
        }
        for class in tree.child_classes(v) {
            if class.multiplicity < 2 {
                continue;
            }
            perm.clear();
            perm.extend(0..class.multiplicity);
            perm.shuffle(rng);
            for (j, &p) in perm.iter().enumerate() {
                local[class.copy(j)] = class.copy(p) as u32;
            }
        }
    }
    AutomorphismElement::from_local_unchecked(local)
}

/// Composition of [`sample_tree`], [`sample_automorphism`] and
/// [`decompose`].
pub fn sample_decomposition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Decomposition> {
    PolyaSampler::new(n)?.sample_decomposition(n, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn candidate_weights_sum_to_total() {
        let s = PolyaSampler::new(90).unwrap();
        for m in [2, 3, 10, 64, 65, 90] {
            let sum: BigUint = candidates(m)
                .map(|(j, d)| &s.t[m - j * d] * BigUint::from(d) * &s.t[d])
                .sum();
            assert_eq!(sum, BigUint::from(m - 1) * &s.t[m]);
        }
    }

    #[test]
    fn float_weights_track_exact_ones() {
        let s = PolyaSampler::new(300).unwrap();
        let m = 300;
        let ln_norm = ((m - 1) as f64).ln() + s.ln_t[m];
        let total: f64 = candidates(m)
            .map(|(j, d)| (s.ln_t[m - j * d] + (d as f64).ln() + s.ln_t[d] - ln_norm).exp())
            .sum();
        assert!((total - 1.0).abs() < 1e-12, "{total}");
    }

    #[test]
    fn exact_and_float_lookup_agree() {
        let s = PolyaSampler::new(120).unwrap();
        let m = 120;
        let total = BigUint::from(m - 1) * &s.t[m];
        let ln_norm = ((m - 1) as f64).ln() + s.ln_t[m];
        let mut rng = RngStream::new(7, 0);
        for _ in 0..2000 {
            let r = rng.gen_biguint_below(&total);
            let x = ln_biguint(&r).exp() / ln_biguint(&total).exp();
            if let Some(c) = s.choose_float(m, x, ln_norm) {
                assert_eq!(c, s.choose_exact(m, &r));
            }
        }
    }

    #[test]
    fn single_node_and_pair() {
        let s = PolyaSampler::new(5).unwrap();
        let mut rng = RngStream::new(1, 0);
        assert_eq!(s.sample_tree(1, &mut rng).unwrap(), CanonicalTree::single());
        assert_eq!(s.sample_tree(2, &mut rng).unwrap(), CanonicalTree::chain(2));
        assert!(s.sample_tree(0, &mut rng).is_err());
        assert!(matches!(s.sample_tree(6, &mut rng), Err(Error::ResourceCap { .. })));
        assert!(PolyaSampler::with_cap(100, 50).is_err());
    }

    #[test]
    fn samples_are_canonical_and_sized() {
        let s = PolyaSampler::new(400).unwrap();
        let mut rng = RngStream::new(3, 0);
        for n in [3, 17, 64, 65, 200, 400] {
            let t = s.sample_tree(n, &mut rng).unwrap();
            assert_eq!(t.size(), n);
            assert_eq!(CanonicalTree::from_sizes(t.as_slice().to_vec()).unwrap(), t);
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = RngStream::new(5, 2);
        let mut b = RngStream::new(5, 2);
        let mut c = RngStream::new(5, 3);
        let xa: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..4).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..4).map(|_| c.next_u64()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn cherry_automorphisms_are_balanced() {
        let cherry = CanonicalTree::star(2);
        let mut rng = RngStream::new(11, 0);
        let swaps = (0..4000)
            .filter(|_| !sample_automorphism(&cherry, &mut rng).is_identity())
            .count();
        assert!((swaps as f64 / 4000.0 - 0.5).abs() < 0.03);
        let chain = CanonicalTree::chain(6);
        assert!(sample_automorphism(&chain, &mut rng).is_identity());
    }

    #[test]
    fn star_automorphisms_cover_s3() {
        let star = CanonicalTree::star(3);
        let mut rng = RngStream::new(13, 0);
        let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
        for _ in 0..6000 {
            let a = sample_automorphism(&star, &mut rng);
            a.validate(&star).unwrap();
            *seen.entry(a.local().to_vec()).or_default() += 1;
        }
        assert_eq!(seen.len(), 6);
        for &c in seen.values() {
            assert!((c as f64 / 6000.0 - 1.0 / 6.0).abs() < 0.025);
        }
    }
}
