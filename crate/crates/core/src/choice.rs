//! The two-option logit choice function and what is built on top of it:
//! probabilities, odds ratios and option ranking.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MIN_STARS: f64 = 1.0;
pub const MAX_STARS: f64 = 5.0;

/// Inverse-logit link `1 / (1 + e^-x)`.
pub fn logistic<T: Scalar>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::NonFinite {
            what: "logistic argument",
        });
    }
    Ok(logistic_unchecked(x))
}

/// Evaluates the link without input validation. Never overflows: the
/// exponential is always taken of a non-positive number.
pub(crate) fn logistic_unchecked<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// `exp(coefficient)`: the multiplicative change in the odds of picking
/// option 1 per unit increase of the predictor.
///
/// For a coefficient fitted on negative-opinion counts the value is below 1.
/// The effect of one *fewer* negative opinion is `odds_ratio(-coefficient)`;
/// neither direction is inverted implicitly.
pub fn odds_ratio<T: Scalar>(coefficient: T) -> Result<T> {
    if !coefficient.is_finite() {
        return Err(Error::NonFinite { what: "coefficient" });
    }
    Ok(coefficient.exp())
}

/// Whether the friend counts of an instance are recommendations or
/// negative opinions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    #[default]
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChoiceModel<T> {
    alpha_s: T,
    alpha_f: T,
    intercept: T,
    label: String,
}

impl<T: Scalar> ChoiceModel<T> {
    /// Model without intercept.
    pub fn new(alpha_s: T, alpha_f: T) -> Result<Self> {
        Self::with_intercept(alpha_s, alpha_f, T::zero())
    }

    pub fn with_intercept(alpha_s: T, alpha_f: T, intercept: T) -> Result<Self> {
        if !(alpha_s.is_finite() && alpha_f.is_finite() && intercept.is_finite()) {
            return Err(Error::NonFinite {
                what: "model coefficient",
            });
        }
        Ok(ChoiceModel {
            alpha_s,
            alpha_f,
            intercept,
            label: String::from("custom"),
        })
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Built-in coefficient sets.
    ///
    /// | label    | alpha_s | alpha_f | fitted on                           |
    /// |----------|---------|---------|-------------------------------------|
    /// | study1   | 0.73549 | 0.20471 | hotels, positive recommendations    |
    /// | study2   | 0.503   | -0.281  | hotels, negative opinions           |
    /// | study3   | 0.349   | 0.167   | movie trailers, positive            |
    /// | dynamics | 0.73    | 0.22    | rounded values used for simulations |
    pub fn preset(label: &str) -> Result<Self> {
        let (s, f) = match label {
            "study1" => (0.73549, 0.20471),
            "study2" => (0.503, -0.281),
            "study3" => (0.349, 0.167),
            "dynamics" => (0.73, 0.22),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown preset `{other}` (expected one of {})",
                    PRESET_LABELS.join(", ")
                )))
            }
        };
        Ok(Self::new(T::lit(s), T::lit(f))?.labeled(label))
    }

    pub fn alpha_s(&self) -> T {
        self.alpha_s
    }

    pub fn alpha_f(&self) -> T {
        self.alpha_f
    }

    pub fn intercept(&self) -> T {
        self.intercept
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Polarity of the data a preset was fitted on; `None` for custom models.
    pub fn fitted_polarity(&self) -> Option<Polarity> {
        match self.label.as_str() {
            "study1" | "study3" | "dynamics" => Some(Polarity::Positive),
            "study2" => Some(Polarity::Negative),
            _ => None,
        }
    }

    /// Linear predictor for given differences `S1 - S2` and `F1 - F2`.
    pub fn linear_predictor(&self, delta_stars: T, delta_friends: T) -> T {
        self.intercept + self.alpha_s * delta_stars + self.alpha_f * delta_friends
    }

    pub fn probability_from_deltas(&self, delta_stars: T, delta_friends: T) -> T {
        logistic_unchecked(self.linear_predictor(delta_stars, delta_friends))
    }

    /// Per-item score used for ranking.
    pub fn linear_score(&self, stars: T, friends: T) -> T {
        self.alpha_s * stars + self.alpha_f * friends
    }
}

pub const PRESET_LABELS: [&str; 4] = ["study1", "study2", "study3", "dynamics"];

/// A single two-option decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChoiceInstance<T> {
    pub stars: [T; 2],
    pub friends: [u32; 2],
    pub polarity: Polarity,
}

impl<T: Scalar> ChoiceInstance<T> {
    pub fn new(stars_1: T, stars_2: T, friends_1: u32, friends_2: u32, polarity: Polarity) -> Result<Self> {
        for s in [stars_1, stars_2] {
            if !s.is_finite() {
                return Err(Error::NonFinite { what: "stars" });
            }
            if s < T::lit(MIN_STARS) || s > T::lit(MAX_STARS) {
                return Err(Error::InvalidArgument(format!(
                    "stars {s} outside [{MIN_STARS}, {MAX_STARS}]"
                )));
            }
        }
        Ok(ChoiceInstance {
            stars: [stars_1, stars_2],
            friends: [friends_1, friends_2],
            polarity,
        })
    }

    pub fn positive(stars_1: T, stars_2: T, friends_1: u32, friends_2: u32) -> Result<Self> {
        Self::new(stars_1, stars_2, friends_1, friends_2, Polarity::Positive)
    }

    pub fn delta_stars(&self) -> T {
        self.stars[0] - self.stars[1]
    }

    pub fn delta_friends(&self) -> T {
        T::lit(self.friends[0] as f64) - T::lit(self.friends[1] as f64)
    }

    pub fn swapped(&self) -> Self {
        ChoiceInstance {
            stars: [self.stars[1], self.stars[0]],
            friends: [self.friends[1], self.friends[0]],
            polarity: self.polarity,
        }
    }
}

/// Probability that option 1 is chosen. Option 2 gets the complement.
///
/// The formula is the same for both polarities; for negative-opinion
/// instances the sign lives in the model's `alpha_f`.
pub fn choice_probability<T: Scalar>(model: &ChoiceModel<T>, instance: &ChoiceInstance<T>) -> T {
    model.probability_from_deltas(instance.delta_stars(), instance.delta_friends())
}

/// True when a preset fitted on one polarity is applied to the other.
pub fn polarity_mismatch<T: Scalar>(model: &ChoiceModel<T>, instance: &ChoiceInstance<T>) -> bool {
    model.fitted_polarity().is_some_and(|p| p != instance.polarity)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankItem<T> {
    pub label: String,
    pub stars: T,
    pub friends: u32,
}

impl<T: Scalar> RankItem<T> {
    pub fn new(label: impl Into<String>, stars: T, friends: u32) -> Self {
        RankItem {
            label: label.into(),
            stars,
            friends,
        }
    }
}

/// Orders items by descending `alpha_s * stars + alpha_f * friends`. Ties keep
/// input order. For two items this is the order implied by
/// [`choice_probability`] against 0.5.
pub fn rank_options<'a, T: Scalar>(model: &ChoiceModel<T>, items: &'a [RankItem<T>]) -> Result<Vec<&'a RankItem<T>>> {
    if items.is_empty() {
        return Err(Error::Empty("rank_options needs at least one item"));
    }
    let mut scored: Vec<(T, &RankItem<T>)> = items
        .iter()
        .map(|it| (model.linear_score(it.stars, T::lit(it.friends as f64)), it))
        .collect();
    // sort_by is stable
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));
    Ok(scored.into_iter().map(|(_, it)| it).collect())
}
