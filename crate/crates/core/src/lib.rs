//! Logit choice under two sources of social influence.
//!
//! A chooser deciding between two options sees each option's average star
//! rating (the crowd) and the number of friends recommending it. The
//! probability of picking option 1 is
//!
//! ```text
//! P(option 1) = logistic(alpha_s * (S1 - S2) + alpha_f * (F1 - F2))
//! ```
//!
//! This crate fits that model to choice data ([`estimation`]), and runs the
//! market-share process it induces on a friendship network ([`dynamics`],
//! [`montecarlo`]).
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`, which is what the CLI uses.

pub mod choice;
pub mod dynamics;
pub mod error;
pub mod estimation;
pub mod graph;
pub mod io;
pub mod montecarlo;
pub mod scalar;

pub use error::{Error, Result};
pub use graph::SocialGraph;
pub use scalar::Scalar;

pub type ChoiceModel = choice::ChoiceModel<f64>;
pub type ChoiceInstance = choice::ChoiceInstance<f64>;
pub type RankItem = choice::RankItem<f64>;
pub type Observation = estimation::Observation<f64>;
pub type DesignMatrix = estimation::DesignMatrix<f64>;
pub type FitOptions = estimation::FitOptions<f64>;
pub type FitResult = estimation::FitResult<f64>;
pub type CvTable = estimation::CvTable<f64>;
pub type RunConfig = dynamics::RunConfig<f64>;
pub type SimulationState = dynamics::SimulationState<f64>;
pub type MarketSharePath = dynamics::MarketSharePath<f64>;
pub type EnsembleResult = montecarlo::EnsembleResult<f64>;
pub type Histogram = montecarlo::Histogram<f64>;
pub type DispersionStats = montecarlo::DispersionStats<f64>;
pub type DominanceReport = montecarlo::DominanceReport<f64>;

pub type ChoiceModelF32 = choice::ChoiceModel<f32>;
pub type RunConfigF32 = dynamics::RunConfig<f32>;
pub type MarketSharePathF32 = dynamics::MarketSharePath<f32>;
