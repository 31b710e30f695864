//! Seeded ensembles of market-share runs and statistics over their limit
//! points.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{run, RunConfig};
use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::scalar::{from_usize, Scalar};

pub const DEFAULT_RUNS: usize = 500;
pub const DEFAULT_BINS: usize = 20;
pub const DEFAULT_GRID_STEP: f64 = 0.01;
pub const DEFAULT_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleResult<T> {
    pub config: RunConfig<T>,
    pub run_count: usize,
    pub master_seed: u64,
    pub final_shares: Vec<T>,
}

/// Seed of run `index` in an ensemble: the first word of ChaCha8 stream
/// `index` under key `master`.
pub fn child_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

/// Runs `runs` independent simulations. Run `i` uses
/// `child_seed(config.seed, i)`; output order follows the run index whatever
/// order the workers finish in. `jobs = None` uses the global thread pool.
pub fn run_ensemble<T: Scalar>(
    graph: &SocialGraph,
    config: &RunConfig<T>,
    runs: usize,
    jobs: Option<usize>,
) -> Result<EnsembleResult<T>> {
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    config.validate()?;
    let one = |i: usize| {
        let cfg = RunConfig {
            seed: child_seed(config.seed, i as u64),
            ..config.clone()
        };
        run(graph, &cfg).map(|p| p.final_share_1).map_err(|e| Error::Run {
            index: i,
            source: Box::new(e),
        })
    };
    let collect = || (0..runs).into_par_iter().map(one).collect::<Result<Vec<T>>>();
    let final_shares = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(collect)?,
        None => collect()?,
    };
    Ok(EnsembleResult {
        config: config.clone(),
        run_count: runs,
        master_seed: config.seed,
        final_shares,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram<T> {
    /// `bins + 1` uniform edges over `[0, 1]`.
    pub edges: Vec<T>,
    pub counts: Vec<usize>,
}

/// Uniform histogram over `[0, 1]`; the last bin is closed on the right.
pub fn histogram<T: Scalar>(values: &[T], bins: usize) -> Result<Histogram<T>> {
    if bins == 0 {
        return Err(Error::InvalidArgument("bins must be at least 1".into()));
    }
    let nb = from_usize::<T>(bins);
    let mut counts = vec![0usize; bins];
    for &v in values {
        if !(v >= T::zero() && v <= T::one()) {
            return Err(Error::InvalidArgument(format!("value {v} outside [0, 1]")));
        }
        let i = (v * nb).floor().to_usize().unwrap_or(0).min(bins - 1);
        counts[i] += 1;
    }
    let edges = (0..=bins).map(|i| from_usize::<T>(i) / nb).collect();
    Ok(Histogram { edges, counts })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionStats<T> {
    pub mean: T,
    pub median: T,
    /// Sample standard deviation (n - 1 denominator).
    pub std: T,
    pub iqr: T,
    /// `q95 - q05`
    pub quantile_range_05_95: T,
    pub min: T,
    pub max: T,
}

/// Linear-interpolation quantile of sorted data (the "type 7" rule).
pub fn quantile_sorted<T: Scalar>(sorted: &[T], q: T) -> T {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = q * from_usize::<T>(n - 1);
    let lo = h.floor().to_usize().unwrap_or(0).min(n - 1);
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - from_usize::<T>(lo)) * (sorted[hi] - sorted[lo])
}

pub fn dispersion_stats<T: Scalar>(values: &[T]) -> Result<DispersionStats<T>> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument("dispersion needs at least two runs".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite shares"));
    let n = from_usize::<T>(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    let ss: T = values.iter().map(|&v| (v - mean) * (v - mean)).sum();
    let q = |p: f64| quantile_sorted(&sorted, T::lit(p));
    Ok(DispersionStats {
        mean,
        median: q(0.5),
        std: (ss / (n - T::one())).sqrt(),
        iqr: q(0.75) - q(0.25),
        quantile_range_05_95: q(0.95) - q(0.05),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    ADominates,
    BDominates,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominanceReport<T> {
    pub verdict: Dominance,
    /// `max |F_a(x) - F_b(x)|` over the grid.
    pub max_gap: T,
}

/// Fraction of `sorted` that is `<= x`.
pub fn ecdf<T: Scalar>(sorted: &[T], x: T) -> T {
    from_usize::<T>(sorted.partition_point(|&v| v <= x)) / from_usize::<T>(sorted.len())
}

/// First-order stochastic dominance of empirical distributions on a grid
/// `0, step, 2 step, ..., 1`.
///
/// `a` dominates when `F_a(x) <= F_b(x) + tolerance` at every grid point and
/// `F_b(x) - F_a(x) > tolerance` at some grid point.
pub fn stochastic_dominance<T: Scalar>(a: &[T], b: &[T], grid_step: T, tolerance: T) -> Result<DominanceReport<T>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("dominance needs two non-empty samples"));
    }
    if !(grid_step > T::zero() && grid_step <= T::lit(0.5)) {
        return Err(Error::InvalidArgument(format!(
            "grid step {grid_step} outside (0, 0.5]"
        )));
    }
    let sort = |s: &[T]| {
        let mut v = s.to_vec();
        v.sort_by(|x, y| x.partial_cmp(y).expect("finite sample"));
        v
    };
    let (sa, sb) = (sort(a), sort(b));
    let points = (T::one() / grid_step).round().to_usize().unwrap_or(1).max(1);
    let np = from_usize::<T>(points);

    let mut max_gap = T::zero();
    let (mut a_never_above, mut b_never_above) = (true, true);
    let (mut a_strictly_below, mut b_strictly_below) = (false, false);
    for k in 0..=points {
        let x = from_usize::<T>(k) / np;
        let fa = ecdf(&sa, x);
        let fb = ecdf(&sb, x);
        max_gap = max_gap.max((fa - fb).abs());
        if fa > fb + tolerance {
            a_never_above = false;
        }
        if fb > fa + tolerance {
            b_never_above = false;
        }
        if fb - fa > tolerance {
            a_strictly_below = true;
        }
        if fa - fb > tolerance {
            b_strictly_below = true;
        }
    }
    let verdict = match (a_never_above && a_strictly_below, b_never_above && b_strictly_below) {
        (true, false) => Dominance::ADominates,
        (false, true) => Dominance::BDominates,
        _ => Dominance::Neither,
    };
    Ok(DominanceReport { verdict, max_gap })
}

/// Pearson correlation.
pub fn correlation<T: Scalar>(x: &[T], y: &[T]) -> T {
    let n = from_usize::<T>(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        sxy = sxy + (a - mx) * (b - my);
        sxx = sxx + (a - mx) * (a - mx);
        syy = syy + (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}
