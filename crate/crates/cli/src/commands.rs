use polya_core::asymptotics::{compute_constants, forest_table};
use polya_core::sampler::{
    decompose, run_experiment, sample_automorphism, Decomposition, ExperimentConfig, ExperimentStats, HistogramMode,
    PolyaSampler, RngStream,
};
use polya_core::series::{cayley_weights, ctree_polynomials, dforest_weights, pointed_series, polya_counts};
use polya_core::tree::{dn_oracle, enumerate_trees, orbit_count, tcn_polynomial_oracle, EnumerationLimits};
use polya_core::{CanonicalTree, Error, Rational};
use serde_json::{json, Map, Value};

use crate::report::{fixed, Report};
use crate::{Command, Failure};

const MAX_COUNTS: usize = 20_000;
const MAX_WEIGHTS: usize = 1_000;
const MAX_POLYS: usize = 150;
const MAX_ORDER: usize = 4_096;
const MAX_PRECISION: usize = 1_000;
const MAX_SAMPLES: usize = 1_000_000;

fn cap(what: &'static str, requested: usize, cap: usize) -> Result<(), Failure> {
    if requested > cap {
        return Err(Error::ResourceCap { what, requested, cap }.into());
    }
    Ok(())
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

pub fn run(cmd: &Command) -> Result<Report, Failure> {
    match cmd {
        Command::Counts { n } => counts(*n as usize),
        Command::Weights { n } => weights(*n as usize),
        Command::Polys { n } => polys(*n as usize),
        Command::Constants { order, precision } => constants(*order, *precision),
        Command::Oracle { n } => oracle(*n as usize),
        Command::Sample { n, count, seed } => sample(*n as usize, *count as usize, seed.seed),
        Command::Decompose { n, tree, seed } => decomposition(n.map(|n| n as usize), tree.as_deref(), seed.seed),
        Command::Experiment {
            n,
            trials,
            workers,
            all_nodes,
            digits,
            seed,
        } => {
            let cfg = ExperimentConfig {
                n: *n as usize,
                trials: *trials as usize,
                seed: seed.seed,
                workers: *workers as usize,
                mode: if *all_nodes {
                    HistogramMode::AllNodes
                } else {
                    HistogramMode::UniformNode
                },
            };
            experiment(&cfg, *digits)
        }
        Command::Table1 { max_m, order, digits } => table1(*max_m, *order, *digits),
    }
}

fn counts(n: usize) -> Result<Report, Failure> {
    cap("counts size", n, MAX_COUNTS)?;
    let t = strings(&polya_counts(n)?);
    Ok(Report::new(json!({ "t": t })).rows(vec![t]))
}

fn weights(n: usize) -> Result<Report, Failure> {
    cap("weights size", n, MAX_WEIGHTS)?;
    let d = strings(&dforest_weights(n)?);
    let mut c = vec!["0".to_string()];
    c.extend(strings(&cayley_weights(n)?));
    let rows = (0..=n)
        .map(|k| vec![k.to_string(), d[k].clone(), c[k].clone()])
        .collect();
    Ok(Report::new(json!({ "d": d, "c": c }))
        .header(&["n", "d", "c"])
        .rows(rows))
}

fn polys(n: usize) -> Result<Report, Failure> {
    cap("polynomial table size", n, MAX_POLYS)?;
    let table = ctree_polynomials(n)?;
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for k in 1..=n {
        let p = table.row(k);
        let coeffs = strings(p.coeffs());
        for (j, c) in coeffs.iter().enumerate().filter(|(_, c)| *c != "0") {
            rows.push(vec![k.to_string(), j.to_string(), c.clone()]);
        }
        entries.push(json!({ "n": k, "coeffs": coeffs, "poly": p.to_string() }));
    }
    Ok(Report::new(json!({ "polys": entries }))
        .header(&["n", "k", "coeff"])
        .rows(rows))
}

fn constants(order: usize, precision: usize) -> Result<Report, Failure> {
    cap("series order", order, MAX_ORDER)?;
    cap("precision digits", precision, MAX_PRECISION)?;
    let k = compute_constants(order, precision)?;
    let map = k.to_map();
    let obj: Map<String, Value> = map.iter().map(|(a, b)| (a.clone(), Value::String(b.clone()))).collect();
    let rows = map.into_iter().map(|(a, b)| vec![a, b]).collect();
    Ok(Report::new(Value::Object(obj)).header(&["key", "value"]).rows(rows))
}

#[allow(clippy::needless_range_loop)]
fn oracle(n: usize) -> Result<Report, Failure> {
    let limits = EnumerationLimits::default();
    cap("oracle size", n, limits.max_forest_size)?;
    let d = dforest_weights(n)?;
    let table = ctree_polynomials(n)?;
    let pointed = pointed_series(n)?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    let mut record = |k: usize, what: &str, series: String, brute: String| {
        let equal = series == brute;
        if !equal {
            mismatches.push(format!("{what} at n = {k}: series {series}, enumeration {brute}"));
        }
        rows.push(vec![
            k.to_string(),
            what.to_string(),
            series.clone(),
            brute.clone(),
            equal.to_string(),
        ]);
        checks.push(json!({ "n": k, "quantity": what, "series": series, "enumeration": brute, "equal": equal }));
    };
    for k in 0..=n {
        record(k, "d_n", d[k].to_string(), dn_oracle(k)?.to_string());
        if k == 0 {
            continue;
        }
        record(
            k,
            "t_cn",
            table.row(k).to_string(),
            tcn_polynomial_oracle(k)?.to_string(),
        );
        let orbits: usize = enumerate_trees(k)?.iter().map(orbit_count).sum();
        record(
            k,
            "orbit_sum",
            pointed.coeff(k).to_string(),
            Rational::from_integer(orbits.into()).to_string(),
        );
    }
    if !mismatches.is_empty() {
        return Err(Error::Consistency(mismatches.join("; ")).into());
    }
    Ok(Report::new(json!({ "status": "OK", "n": n, "checks": checks }))
        .header(&["n", "quantity", "series", "enumeration", "equal"])
        .rows(rows))
}

fn sample(n: usize, count: usize, seed: u64) -> Result<Report, Failure> {
    cap("sample count", count, MAX_SAMPLES)?;
    let sampler = PolyaSampler::new(n)?;
    let mut rng = RngStream::new(seed, 0);
    let trees: Vec<String> = (0..count)
        .map(|_| sampler.sample_tree(n, &mut rng).map(|t| t.to_parens()))
        .collect::<Result<_, _>>()?;
    let rows = trees
        .iter()
        .enumerate()
        .map(|(i, t)| vec![i.to_string(), t.clone()])
        .collect();
    Ok(Report::new(json!({ "n": n, "seed": seed.to_string(), "trees": trees }))
        .header(&["index", "tree"])
        .rows(rows))
}

fn decomposition_json(d: &Decomposition, seed: u64) -> Value {
    let forests: Vec<Value> = d.forests().iter().map(|&(v, s)| json!([v, s])).collect();
    json!({
        "seed": seed.to_string(),
        "tree": d.tree().to_parens(),
        "size": d.tree().size(),
        "c_mask": d.mask_string(),
        "c_size": d.c_size(),
        "max_forest": d.max_forest(),
        "forests": forests,
    })
}

fn decomposition(n: Option<usize>, tree: Option<&str>, seed: u64) -> Result<Report, Failure> {
    let mut rng = RngStream::new(seed, 0);
    let d = match (n, tree) {
        (_, Some(s)) => {
            let t = CanonicalTree::parse_parens(s)?;
            let a = sample_automorphism(&t, &mut rng);
            decompose(&t, &a)?
        }
        (Some(n), None) => PolyaSampler::new(n)?.sample_decomposition(n, &mut rng)?,
        (None, None) => return Err(Failure::Usage("either --n or --tree is required".into())),
    };
    let rows = d
        .forests()
        .iter()
        .map(|&(v, s)| vec![v.to_string(), s.to_string()])
        .collect();
    Ok(Report::new(decomposition_json(&d, seed))
        .header(&["node", "forest_size"])
        .rows(rows))
}

fn summary_json(s: &polya_core::sampler::SummaryStats, digits: usize) -> Value {
    let q: Map<String, Value> = s
        .quantiles
        .iter()
        .map(|(level, v)| (format!("q{}", (level * 100.0).round()), Value::String(v.to_string())))
        .collect();
    json!({
        "mean": fixed(s.mean, digits),
        "variance": fixed(s.variance, digits),
        "std_error": fixed(s.std_error(), digits),
        "min": s.min.to_string(),
        "max": s.max.to_string(),
        "quantiles": q,
    })
}

fn experiment(cfg: &ExperimentConfig, digits: usize) -> Result<Report, Failure> {
    let sampler = PolyaSampler::new(cfg.n)?;
    let st: ExperimentStats = run_experiment(&sampler, cfg)?;
    let hist = st.histogram();
    let rows = hist
        .iter()
        .map(|&(m, f)| vec![m.to_string(), fixed(f, digits)])
        .collect();
    let hist_json: Vec<Value> = hist.iter().map(|&(m, f)| json!([m, fixed(f, digits)])).collect();
    let json = json!({
        "n": st.n.to_string(),
        "trials": st.trials.to_string(),
        "seed": st.seed.to_string(),
        "workers": cfg.workers.to_string(),
        "histogram_mode": match st.mode {
            HistogramMode::UniformNode => "uniform_c_node",
            HistogramMode::AllNodes => "all_c_nodes",
        },
        "mean_c": fixed(st.mean_c(), digits),
        "var_c": fixed(st.var_c(), digits),
        "mean_c_over_n": fixed(st.mean_c() / st.n as f64, digits),
        "var_c_over_n": fixed(st.var_c() / st.n as f64, digits),
        "c_size": summary_json(&st.c_size, digits),
        "max_forest": summary_json(&st.max_forest, digits),
        "histogram_observations": st.histogram_total.to_string(),
        "histogram": hist_json,
    });
    Ok(Report::new(json).header(&["m", "freq"]).rows(rows))
}

fn table1(max_m: usize, order: usize, digits: usize) -> Result<Report, Failure> {
    cap("series order", order, MAX_ORDER)?;
    let k = compute_constants(order, 50)?;
    let rows = forest_table(max_m, &k)?;
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| json!({ "m": r.m, "eq": fixed(r.eq, digits), "ge": fixed(r.ge, digits) }))
        .collect();
    let csv_rows = rows
        .iter()
        .map(|r| vec![r.m.to_string(), fixed(r.eq, digits), fixed(r.ge, digits)])
        .collect();
    Ok(Report::new(json!({ "order": order, "rows": json_rows }))
        .header(&["m", "eq", "ge"])
        .rows(csv_rows))
}
