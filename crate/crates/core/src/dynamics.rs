//! Sequential market-share process on a friendship network.
//!
//! Two random individuals seed the options. Then, one at a time, a uniformly
//! random undecided individual
//!
//! 1. counts `F_i`, the neighbors who chose option `i` and recommend it,
//! 2. picks option 1 with probability
//!    `logistic(alpha_s (S1 - S2) + alpha_f (F1 - F2))`, where `S_i` is the
//!    running average rating of option `i`,
//! 3. rates the chosen option with a draw from `Normal(S_chosen, sigma)`,
//!    clamped to the star scale unless disabled,
//! 4. recommends it iff the rating is strictly above `theta`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::choice::{logistic_unchecked, MAX_STARS, MIN_STARS};
use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::scalar::{from_usize, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig<T> {
    pub alpha_s: T,
    pub alpha_f: T,
    /// Standard deviation of individual ratings, in stars.
    pub sigma: T,
    /// Recommendation threshold, in stars.
    pub theta: T,
    /// `(S1⁰, S2⁰)`
    pub initial_stars: [T; 2],
    pub clamp_ratings: bool,
    /// Number of pseudo-ratings the initial stars count as.
    pub prior_weight: u32,
    pub seed: u64,
}

impl<T: Scalar> RunConfig<T> {
    /// Rounded study-1 coefficients, `sigma = 1`, `theta = 0`, `S⁰ = (4, 2)`.
    pub fn new(seed: u64) -> Self {
        RunConfig {
            alpha_s: T::lit(0.73),
            alpha_f: T::lit(0.22),
            sigma: T::one(),
            theta: T::zero(),
            initial_stars: [T::lit(4.0), T::lit(2.0)],
            clamp_ratings: true,
            prior_weight: 1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.alpha_s, self.alpha_f, self.sigma, self.theta]
            .iter()
            .chain(&self.initial_stars)
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite {
                what: "run configuration",
            });
        }
        if self.sigma < T::zero() {
            return Err(Error::InvalidArgument(format!(
                "sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        for s in self.initial_stars {
            if s < T::lit(MIN_STARS) || s > T::lit(MAX_STARS) {
                return Err(Error::InvalidArgument(format!(
                    "initial stars {s} outside [{MIN_STARS}, {MAX_STARS}]"
                )));
            }
        }
        if self.prior_weight == 0 {
            return Err(Error::InvalidArgument("prior weight must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Decision {
    Undecided,
    Option1,
    Option2,
}

impl Decision {
    fn index(self) -> Option<usize> {
        match self {
            Decision::Undecided => None,
            Decision::Option1 => Some(0),
            Decision::Option2 => Some(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathPoint<T> {
    pub t: usize,
    pub share_1: T,
    pub s1: T,
    pub s2: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarketSharePath<T> {
    pub seed: u64,
    pub points: Vec<PathPoint<T>>,
    pub final_share_1: T,
}

#[derive(Debug, Clone)]
pub struct SimulationState<T> {
    decision: Vec<Decision>,
    recommends: Vec<bool>,
    undecided: Vec<usize>,
    /// Running mean rating per option.
    rating_mean: [T; 2],
    rating_count: [u64; 2],
    chosen: [usize; 2],
    step_index: usize,
    path: Vec<PathPoint<T>>,
}

impl<T: Scalar> SimulationState<T> {
    /// Seeds two distinct uniformly random individuals with option 1 and
    /// option 2. Each option starts from `prior_weight` pseudo-ratings at its
    /// initial star value; the seed individuals then rate and recommend like
    /// everyone else.
    pub fn init<R: Rng + ?Sized>(graph: &SocialGraph, config: &RunConfig<T>, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let n = graph.node_count();
        if n < 3 {
            return Err(Error::GraphTooSmall { nodes: n, needed: 3 });
        }
        let first = rng.random_range(0..n);
        let mut second = rng.random_range(0..n - 1);
        if second >= first {
            second += 1;
        }
        let mut state = SimulationState {
            decision: vec![Decision::Undecided; n],
            recommends: vec![false; n],
            undecided: (0..n).filter(|&v| v != first && v != second).collect(),
            rating_mean: config.initial_stars,
            rating_count: [config.prior_weight as u64; 2],
            chosen: [0, 0],
            step_index: 0,
            path: Vec::with_capacity(n - 1),
        };
        state.adopt(first, 0, config, rng);
        state.adopt(second, 1, config, rng);
        state.record();
        Ok(state)
    }

    /// Activates one undecided individual.
    pub fn step<R: Rng + ?Sized>(&mut self, graph: &SocialGraph, config: &RunConfig<T>, rng: &mut R) -> Result<()> {
        if self.undecided.is_empty() {
            return Err(Error::InvalidArgument("every individual has already decided".into()));
        }
        let slot = rng.random_range(0..self.undecided.len());
        let node = self.undecided.swap_remove(slot);
        let p = self.choice_probability(node, graph, config);
        let option = if T::sample_unit(rng) < p { 0 } else { 1 };
        self.adopt(node, option, config, rng);
        self.step_index += 1;
        self.record();
        Ok(())
    }

    fn adopt<R: Rng + ?Sized>(&mut self, node: usize, option: usize, config: &RunConfig<T>, rng: &mut R) {
        let mean = self.rating_mean[option];
        let mut rating = if config.sigma == T::zero() {
            mean
        } else {
            mean + config.sigma * T::sample_standard_normal(rng)
        };
        if config.clamp_ratings {
            rating = rating.max(T::lit(MIN_STARS)).min(T::lit(MAX_STARS));
        }
        self.rating_count[option] += 1;
        // Incremental mean: a rating equal to the mean leaves it bit-identical.
        let count = T::from_u64(self.rating_count[option]).expect("count fits");
        self.rating_mean[option] = mean + (rating - mean) / count;
        self.decision[node] = if option == 0 {
            Decision::Option1
        } else {
            Decision::Option2
        };
        self.recommends[node] = rating > config.theta;
        self.chosen[option] += 1;
    }

    fn record(&mut self) {
        let point = PathPoint {
            t: self.step_index,
            share_1: self.share_1(),
            s1: self.rating_mean[0],
            s2: self.rating_mean[1],
        };
        self.path.push(point);
    }

    /// `[F1, F2]`: neighbors of `node` that chose each option and recommend it.
    pub fn friend_counts(&self, node: usize, graph: &SocialGraph) -> [u32; 2] {
        let mut f = [0u32; 2];
        for &v in graph.neighbors(node) {
            if self.recommends[v] {
                if let Some(i) = self.decision[v].index() {
                    f[i] += 1;
                }
            }
        }
        f
    }

    /// Probability that `node` would pick option 1 if activated now.
    pub fn choice_probability(&self, node: usize, graph: &SocialGraph, config: &RunConfig<T>) -> T {
        let [f1, f2] = self.friend_counts(node, graph);
        let df = T::lit(f1 as f64) - T::lit(f2 as f64);
        let ds = self.rating_mean[0] - self.rating_mean[1];
        logistic_unchecked(config.alpha_s * ds + config.alpha_f * df)
    }

    /// Sets a node's state directly, without rating anything. For what-if
    /// probes of [`choice_probability`](Self::choice_probability).
    pub fn assign(&mut self, node: usize, decision: Decision, recommends: bool) {
        let was = self.decision[node];
        if let Some(i) = was.index() {
            self.chosen[i] -= 1;
        } else if decision != Decision::Undecided {
            self.undecided.retain(|&v| v != node);
        }
        if let Some(i) = decision.index() {
            self.chosen[i] += 1;
        } else if was != Decision::Undecided {
            self.undecided.push(node);
        }
        self.decision[node] = decision;
        self.recommends[node] = recommends && decision != Decision::Undecided;
    }

    /// Fraction of decided individuals who chose option 1.
    pub fn share_1(&self) -> T {
        let total = self.chosen[0] + self.chosen[1];
        if total == 0 {
            return T::zero();
        }
        from_usize::<T>(self.chosen[0]) / from_usize::<T>(total)
    }

    pub fn stars(&self) -> [T; 2] {
        self.rating_mean
    }

    pub fn rating_counts(&self) -> [u64; 2] {
        self.rating_count
    }

    pub fn decision(&self, node: usize) -> Decision {
        self.decision[node]
    }

    pub fn recommends(&self, node: usize) -> bool {
        self.recommends[node]
    }

    pub fn decided_count(&self) -> usize {
        self.chosen[0] + self.chosen[1]
    }

    pub fn undecided_count(&self) -> usize {
        self.undecided.len()
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn path(&self) -> &[PathPoint<T>] {
        &self.path
    }

    pub fn into_path(self, seed: u64) -> MarketSharePath<T> {
        let final_share_1 = self.share_1();
        MarketSharePath {
            seed,
            points: self.path,
            final_share_1,
        }
    }
}

/// Random stream for a run. Every run draws from ChaCha8 seeded with
/// `config.seed`.
pub fn run_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Initialises and steps until everyone has decided.
pub fn run<T: Scalar>(graph: &SocialGraph, config: &RunConfig<T>) -> Result<MarketSharePath<T>> {
    let mut rng = run_rng(config.seed);
    let mut state = SimulationState::init(graph, config, &mut rng)?;
    while state.undecided_count() > 0 {
        state.step(graph, config, &mut rng)?;
    }
    Ok(state.into_path(config.seed))
}
