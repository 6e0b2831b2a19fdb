use std::sync::OnceLock;

use num_traits::ToPrimitive;
use polya_core::asymptotics::{
    cn_moments, compute_constants, forest_mean_asymptotic, forest_pgf, forest_prob_asymptotic, forest_table,
    ln_expectation, ln_tail_prob, tn_asymptotic, tn_ratio, SingularityConstants,
};
use polya_core::series::{exact_forest_prob, polya_counts, CountTable};
use polya_core::Error;

fn k() -> &'static SingularityConstants {
    static K: OnceLock<SingularityConstants> = OnceLock::new();
    K.get_or_init(|| compute_constants(128, 50).unwrap())
}

fn table() -> &'static CountTable {
    static T: OnceLock<CountTable> = OnceLock::new();
    T.get_or_init(|| CountTable::new(128).unwrap())
}

#[test]
fn defining_relations() {
    let k = k();
    let rho = k.rho_f64();
    assert!(0.0 < rho && rho < 1.0);
    assert!(k.b_f64() > 0.0);
    assert!(k.residual_f64().abs() < 1e-40);
    assert!((k.d_rho_f64() - (-1.0f64).exp() / rho).abs() < 1e-14);
    assert!((k.c_f64() - k.b_f64().powi(2) / 3.0).abs() < 1e-14);
    assert!(k.c1_f64().is_finite() && k.c1_f64() > 0.0);
    assert!(k.certified_digits >= 30);
}

#[test]
fn doubling_the_order_is_stable() {
    let a = k();
    let b = compute_constants(256, 50).unwrap();
    let digits = a.certified_digits;
    assert_eq!(a.decimal(&a.rho, digits), b.decimal(&b.rho, digits));
    assert_eq!(a.decimal(&a.b, digits), b.decimal(&b.b, digits));
}

#[test]
fn high_precision_digits() {
    let k = k();
    assert_eq!(k.decimal(&k.rho, 30), "3.38321856899207695196112625717e-1");
    assert_eq!(k.decimal(&k.b, 20), "2.6811281472671122386e0");
}

#[test]
fn bad_arguments() {
    assert!(matches!(compute_constants(8, 50), Err(Error::Domain(_))));
    assert!(matches!(ln_expectation(2, k()), Err(Error::Domain(_))));
    assert!(tn_asymptotic(0, k()).is_err());
    assert!(forest_pgf(1.5, k(), table()).is_err());
}

#[test]
fn count_asymptotics() {
    let k = k();
    let t = polya_counts(1000).unwrap();
    let r100 = tn_ratio(100, &t[99], k).unwrap();
    let r1000 = tn_ratio(1000, &t[999], k).unwrap();
    assert!((0.98..1.02).contains(&r100), "{r100}");
    assert!((r1000 - 1.0).abs() < (r100 - 1.0).abs());
    let one = tn_asymptotic(1, k).unwrap();
    assert!(one.is_positive());
}

#[test]
fn tail_law_limits() {
    let k = k();
    assert!(ln_tail_prob(1000, 400, k).unwrap() > 1.0 - 1e-12);
    assert!(ln_tail_prob(1_000_000, 1, k).unwrap() < 1e-100);
    // the median crossing moves by about 2 ln 10 / |ln rho| per decade
    let medians: Vec<f64> = [1e3, 1e4, 1e5]
        .iter()
        .map(|&n| {
            let m = (1..).find(|&m| ln_tail_prob(n as usize, m, k).unwrap() >= 0.5).unwrap();
            m as f64
        })
        .collect();
    let step = 2.0 * 10f64.ln() / k.rho_f64().ln().abs();
    for w in medians.windows(2) {
        let d = w[1] - w[0];
        assert!((d - step).abs() <= 0.35 * step + 1.0, "{medians:?}");
    }
}

#[test]
fn expectation_formula() {
    let k = k();
    let e = ln_expectation(5000, k).unwrap();
    assert!((e - 21.65).abs() < 0.01, "{e}");
    let lr = k.rho_f64().log10();
    let l = 5000f64.log10();
    let base10 = -2.0 * l / lr - 3.0 * (5000f64.ln().ln() / k.rho_f64().ln());
    assert!((e - base10).abs() < 1e-9);
}

#[test]
fn c_tree_proportions() {
    let m = cn_moments(1000, k()).unwrap();
    assert_eq!((m.mean / 1000.0 * 1000.0).round() / 1000.0, 0.822);
    assert_eq!((m.dn_mean / 1000.0 * 1000.0).round() / 1000.0, 0.178);
    assert!((m.mean + m.dn_mean - 1000.0).abs() < 1e-9);
}

#[test]
fn forest_law_rows() {
    let k = k();
    let t = table();
    let p = |m| forest_prob_asymptotic(m, k, t).unwrap();
    assert_eq!(format!("{:.4}", p(0)), "0.9197");
    assert_eq!(p(1), 0.0);
    assert_eq!(format!("{:.4}", p(2)), "0.0526");
    assert_eq!(format!("{:.4}", p(5)), "0.0015");
    let total: f64 = (0..=128).map(p).sum();
    assert!((total - 1.0).abs() < 1e-20 + 1e-15);
    let rows = forest_table(7, k).unwrap();
    for r in &rows {
        let tail: f64 = (r.m..=128).map(p).sum();
        assert!((r.ge - tail).abs() < 1e-12);
    }
    let partial: f64 = (0..=7).map(p).sum();
    assert!((1.0 - partial - (rows[7].ge - rows[7].eq)).abs() < 1e-12);
}

#[test]
fn generating_function_checks() {
    let k = k();
    let t = table();
    assert!((forest_pgf(1.0, k, t).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(format!("{:.4}", forest_pgf(0.0, k, t).unwrap()), "0.9197");
    let h = 1e-6;
    let slope = (forest_pgf(1.0, k, t).unwrap() - forest_pgf(1.0 - h, k, t).unwrap()) / h;
    let closed = k.b_f64().powi(2) * k.rho_f64() / 2.0 - 1.0;
    assert!((forest_mean_asymptotic(k) - closed).abs() < 1e-14);
    assert!((slope - closed).abs() < 1e-5, "{slope} vs {closed}");
    assert_eq!(format!("{closed:.3}"), "0.216");
}

#[test]
fn finite_n_law_converges() {
    let k = k();
    let t = table();
    for m in [0usize, 2, 3, 4] {
        let limit = forest_prob_asymptotic(m, k, t).unwrap();
        let d: Vec<f64> = [40usize, 80, 160]
            .iter()
            .map(|&n| (exact_forest_prob(n, m).unwrap().to_f64().unwrap() - limit).abs())
            .collect();
        for w in d.windows(2) {
            let ratio = w[0] / w[1];
            assert!((1.6..2.5).contains(&ratio), "m = {m}: {d:?}");
        }
    }
}
