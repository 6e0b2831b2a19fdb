use rand::Rng;

use super::{PolyaSampler, RngStream};
use crate::error::{Error, Result};

/// How the forest-size histogram is collected.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum HistogramMode {
    /// One uniformly chosen C-node per trial, so histogram entries are
    /// averages of independent indicators.
    #[default]
    UniformNode,
    /// Every C-node of every trial.
    AllNodes,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
    pub mode: HistogramMode,
}

impl ExperimentConfig {
    pub fn new(n: usize, trials: usize, seed: u64) -> Self {
        ExperimentConfig {
            n,
            trials,
            seed,
            workers: 1,
            mode: HistogramMode::default(),
        }
    }
}

/// Mean, variance and quantiles of an integer sample.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub min: usize,
    pub max: usize,
    /// `(level, value)` pairs, lower empirical quantiles.
    pub quantiles: Vec<(f64, usize)>,
}

impl SummaryStats {
    pub const LEVELS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

    pub fn from_values(values: &[usize]) -> Self {
        let count = values.len();
        let sum: u128 = values.iter().map(|&v| v as u128).sum();
        let sum_sq: u128 = values.iter().map(|&v| (v as u128) * (v as u128)).sum();
        let mean = sum as f64 / count as f64;
        let variance = if count > 1 {
            // exact centred sum of squares: (n sum_sq - sum^2) / n
            let centred = (count as u128 * sum_sq - sum * sum) as f64 / count as f64;
            centred / (count - 1) as f64
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        let quantiles = Self::LEVELS
            .iter()
            .map(|&q| {
                let idx = ((q * count as f64).ceil() as usize).clamp(1, count) - 1;
                (q, sorted[idx])
            })
            .collect();
        SummaryStats {
            count,
            mean,
            variance,
            min: sorted.first().copied().unwrap_or(0),
            max: sorted.last().copied().unwrap_or(0),
            quantiles,
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

/// Aggregated outcome of independent decompositions of uniform trees.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentStats {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub mode: HistogramMode,
    /// Summary of `|C_n|`.
    pub c_size: SummaryStats,
    /// Summary of the largest forest `L_n`.
    pub max_forest: SummaryStats,
    /// Raw counts of forest sizes `0..=n-1`.
    pub histogram_counts: Vec<u64>,
    /// Number of observations in the histogram.
    pub histogram_total: u64,
}

impl ExperimentStats {
    pub fn mean_c(&self) -> f64 {
        self.c_size.mean
    }

    pub fn var_c(&self) -> f64 {
        self.c_size.variance
    }

    /// Relative frequency of forest size `m`.
    pub fn frequency(&self, m: usize) -> f64 {
        self.histogram_counts.get(m).copied().unwrap_or(0) as f64 / self.histogram_total as f64
    }

    /// `(m, relative frequency)` for every observed `m`.
    pub fn histogram(&self) -> Vec<(usize, f64)> {
        self.histogram_counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(m, &c)| (m, c as f64 / self.histogram_total as f64))
            .collect()
    }
}

struct TrialRecord {
    c_size: usize,
    max_forest: usize,
    forests: Vec<usize>,
}

fn run_trial(sampler: &PolyaSampler, cfg: &ExperimentConfig, index: usize) -> Result<TrialRecord> {
    let mut rng = RngStream::new(cfg.seed, index as u64);
    let d = sampler.sample_decomposition(cfg.n, &mut rng)?;
    let forests = match cfg.mode {
        HistogramMode::UniformNode => {
            let pick = rng.gen_range(0..d.c_size());
            vec![d.forests()[pick].1]
        }
        HistogramMode::AllNodes => d.forests().iter().map(|&(_, s)| s).collect(),
    };
    Ok(TrialRecord {
        c_size: d.c_size(),
        max_forest: d.max_forest(),
        forests,
    })
}

/// Runs `trials` independent decompositions of uniform trees of size `n`.
///
/// Trial `i` draws from the stream `(seed, i)` and records are merged in
/// trial order, so the result does not depend on `workers`.
pub fn run_experiment(sampler: &PolyaSampler, cfg: &ExperimentConfig) -> Result<ExperimentStats> {
    if cfg.trials == 0 {
        return Err(Error::Domain("trials must be >= 1".into()));
    }
    if cfg.workers == 0 {
        return Err(Error::Domain("workers must be >= 1".into()));
    }
    sampler.check(cfg.n)?;
    let records = collect_records(sampler, cfg)?;

    let c: Vec<usize> = records.iter().map(|r| r.c_size).collect();
    let l: Vec<usize> = records.iter().map(|r| r.max_forest).collect();
    let mut histogram_counts = vec![0u64; cfg.n];
    let mut histogram_total = 0;
    for r in &records {
        for &m in &r.forests {
            histogram_counts[m] += 1;
            histogram_total += 1;
        }
    }
    Ok(ExperimentStats {
        n: cfg.n,
        trials: cfg.trials,
        seed: cfg.seed,
        mode: cfg.mode,
        c_size: SummaryStats::from_values(&c),
        max_forest: SummaryStats::from_values(&l),
        histogram_counts,
        histogram_total,
    })
}

#[cfg(feature = "parallel")]
fn collect_records(sampler: &PolyaSampler, cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    use rayon::prelude::*;
    if cfg.workers == 1 {
        return (0..cfg.trials).map(|i| run_trial(sampler, cfg, i)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| run_trial(sampler, cfg, i))
            .collect()
    })
}

/// Without the `parallel` feature every worker count runs sequentially.
#[cfg(not(feature = "parallel"))]
fn collect_records(sampler: &PolyaSampler, cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    (0..cfg.trials).map(|i| run_trial(sampler, cfg, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_small_sample() {
        let s = SummaryStats::from_values(&[1, 2, 3, 4]);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!((s.min, s.max), (1, 4));
        assert_eq!(s.quantiles[2], (0.5, 2));
        let one = SummaryStats::from_values(&[7]);
        assert_eq!(one.variance, 0.0);
    }

    #[test]
    fn zero_trials_or_workers_rejected() {
        let s = PolyaSampler::new(10).unwrap();
        let mut cfg = ExperimentConfig::new(10, 0, 1);
        assert!(matches!(run_experiment(&s, &cfg), Err(Error::Domain(_))));
        cfg.trials = 5;
        cfg.workers = 0;
        assert!(run_experiment(&s, &cfg).is_err());
    }

    #[test]
    fn degenerate_sizes_are_deterministic() {
        let s = PolyaSampler::new(2).unwrap();
        for n in [1, 2] {
            let st = run_experiment(&s, &ExperimentConfig::new(n, 50, 9)).unwrap();
            assert_eq!(st.c_size.mean, n as f64);
            assert_eq!(st.max_forest.max, 0);
            assert_eq!(st.histogram(), vec![(0, 1.0)]);
        }
    }

    #[test]
    fn histogram_modes_and_normalisation() {
        let s = PolyaSampler::new(30).unwrap();
        let mut cfg = ExperimentConfig::new(30, 300, 4);
        let a = run_experiment(&s, &cfg).unwrap();
        assert_eq!(a.histogram_total, 300);
        cfg.mode = HistogramMode::AllNodes;
        let b = run_experiment(&s, &cfg).unwrap();
        assert_eq!(b.histogram_total as f64, b.c_size.mean * 300.0);
        for st in [a, b] {
            let sum: f64 = st.histogram().iter().map(|(_, f)| f).sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let s = PolyaSampler::new(60).unwrap();
        let mut cfg = ExperimentConfig::new(60, 200, 0x5EED_0001);
        let one = run_experiment(&s, &cfg).unwrap();
        cfg.workers = 3;
        assert_eq!(run_experiment(&s, &cfg).unwrap(), one);
    }
}
