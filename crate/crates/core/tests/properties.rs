use num_bigint::BigInt;
use polya_core::sampler::{decompose, sample_automorphism, PolyaSampler, RngStream};
use polya_core::tree::{canonical_form, orbit_count, AutomorphismElement, RootedTree};
use polya_core::{CanonicalTree, ExactSeries, Rational, UPolynomial};
use proptest::prelude::*;

/// Random recursive tree given by its parent choices; node 0 is the root.
fn parent_array(max: usize) -> impl Strategy<Value = Vec<usize>> {
    (1..=max).prop_flat_map(|n| (1..n).map(|i| (0..i).boxed()).collect::<Vec<_>>())
}

fn to_rooted(parents: &[usize], relabel: &[usize]) -> RootedTree {
    let n = parents.len() + 1;
    let mut parent = vec![None; n];
    for (i, &p) in parents.iter().enumerate() {
        parent[relabel[i + 1]] = Some(relabel[p]);
    }
    RootedTree::from_parents(&parent).unwrap()
}

fn tree_and_relabel(max: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>, Vec<usize>)> {
    parent_array(max).prop_flat_map(|p| {
        let n = p.len() + 1;
        let ids: Vec<usize> = (0..n).collect();
        (Just(p), Just(ids.clone()).prop_shuffle(), Just(ids).prop_shuffle())
    })
}

fn small_series() -> impl Strategy<Value = ExactSeries> {
    prop::collection::vec(-5i64..=5, 6).prop_map(ExactSeries::from_integers)
}

fn zero_constant_series() -> impl Strategy<Value = ExactSeries> {
    prop::collection::vec(-3i64..=3, 5).prop_map(|mut c| {
        c.insert(0, 0);
        ExactSeries::from_integers(c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonical_form_ignores_labels((p, r1, r2) in tree_and_relabel(24)) {
        let a = canonical_form(&to_rooted(&p, &r1));
        let b = canonical_form(&to_rooted(&p, &r2));
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.size(), p.len() + 1);
        prop_assert_eq!(&CanonicalTree::parse_parens(&a.to_parens()).unwrap(), &a);
        prop_assert_eq!(&CanonicalTree::parse_level_sequence(&a.to_level_sequence()).unwrap(), &a);
    }

    #[test]
    fn automorphisms_form_a_group((p, r, _) in tree_and_relabel(20), seed in any::<u64>()) {
        let t = canonical_form(&to_rooted(&p, &r));
        let mut rng = RngStream::new(seed, 0);
        let a = sample_automorphism(&t, &mut rng);
        let b = sample_automorphism(&t, &mut rng);
        a.validate(&t).unwrap();
        let ab = a.compose(&b, &t);
        ab.validate(&t).unwrap();
        prop_assert!(a.compose(&a.inverse(&t), &t).is_identity());
        // a global map of an automorphism preserves the parent relation
        let phi = ab.global_map(&t);
        let parents = t.parents();
        for (v, pv) in parents.iter().enumerate() {
            prop_assert_eq!(parents[phi[v]], pv.map(|x| phi[x]));
        }
        prop_assert_eq!(AutomorphismElement::from_local(&t, ab.local().to_vec()).unwrap(), ab);
    }

    #[test]
    fn decomposition_is_consistent((p, r, _) in tree_and_relabel(30), seed in any::<u64>()) {
        let t = canonical_form(&to_rooted(&p, &r));
        let mut rng = RngStream::new(seed, 1);
        let a = sample_automorphism(&t, &mut rng);
        let d = decompose(&t, &a).unwrap();
        let total: usize = d.forests().iter().map(|&(_, s)| s).sum();
        prop_assert_eq!(d.c_size() + total, t.size());
        prop_assert_eq!(d.c_size(), a.fixed_point_count(&t));
        prop_assert!(d.c_size() >= 1);
        prop_assert!(orbit_count(&t) <= t.size());
    }

    #[test]
    fn sampled_trees_are_canonical(n in 1usize..150, seed in any::<u64>()) {
        let sampler = PolyaSampler::new(150).unwrap();
        let mut rng = RngStream::new(seed, 0);
        let t = sampler.sample_tree(n, &mut rng).unwrap();
        prop_assert_eq!(t.size(), n);
        prop_assert_eq!(CanonicalTree::from_sizes(t.as_slice().to_vec()).unwrap(), t);
    }

    #[test]
    fn series_ring_laws(a in small_series(), b in small_series(), c in small_series()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
    }

    #[test]
    fn exp_is_a_homomorphism(a in zero_constant_series(), b in zero_constant_series()) {
        let lhs = (&a + &b).exp().unwrap();
        let rhs = &a.exp().unwrap() * &b.exp().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reciprocal_inverts(mut c in prop::collection::vec(-4i64..=4, 6), c0 in 1i64..4) {
        c[0] = c0;
        let a = ExactSeries::from_integers(c);
        let inv = a.reciprocal().unwrap();
        prop_assert_eq!(&a * &inv, ExactSeries::one(a.order()));
    }

    #[test]
    fn polynomial_evaluation_is_multiplicative(
        a in prop::collection::vec(-6i64..=6, 1..5),
        b in prop::collection::vec(-6i64..=6, 1..5),
        x in -5i64..=5,
    ) {
        let to_poly = |v: &[i64]| UPolynomial::from_coeffs(v.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect());
        let (pa, pb) = (to_poly(&a), to_poly(&b));
        let x = Rational::from_integer(BigInt::from(x));
        prop_assert_eq!((&pa * &pb).eval(&x), pa.eval(&x) * pb.eval(&x));
        prop_assert_eq!((&pa + &pb).eval(&x), pa.eval(&x) + pb.eval(&x));
    }
}
