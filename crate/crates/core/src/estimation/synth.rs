use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Observation;
use crate::choice::{ChoiceModel, Polarity};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Draws `respondents` answers to every question of `question_design`,
/// each `chose_1 ~ Bernoulli(model probability at (Δstars, Δfriends))`.
/// Question `k` (0-based) gets id `Q{k+1}`. Deterministic in `seed`.
pub fn synth_generate<T: Scalar>(
    model: &ChoiceModel<T>,
    question_design: &[(T, T)],
    respondents: usize,
    seed: u64,
) -> Result<Vec<Observation<T>>> {
    if respondents == 0 {
        return Err(Error::InvalidArgument("respondents must be at least 1".into()));
    }
    if question_design.is_empty() {
        return Err(Error::Empty("question design"));
    }
    let probs: Vec<T> = question_design
        .iter()
        .map(|&(ds, df)| model.probability_from_deltas(ds, df))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(respondents * question_design.len());
    for _ in 0..respondents {
        for (k, (&(ds, df), &p)) in question_design.iter().zip(&probs).enumerate() {
            let chose_1 = T::sample_unit(&mut rng) < p;
            out.push(Observation::new(format!("Q{}", k + 1), ds, df, chose_1));
        }
    }
    Ok(out)
}

/// Eight questions in which the better-rated option has the weaker friend
/// signal: fewer recommendations (positive) or more negative opinions
/// (negative). Chosen so each coefficient has a standard error of about
/// 0.025 or less at 350 respondents under every preset.
pub fn default_question_design<T: Scalar>(polarity: Polarity) -> Vec<(T, T)> {
    const QUESTIONS: [(f64, f64); 8] = [
        (4.0, 1.0),
        (4.0, 4.0),
        (4.0, 6.0),
        (3.0, 2.0),
        (3.0, 5.0),
        (2.0, 3.0),
        (1.0, 12.0),
        (1.0, 14.0),
    ];
    let sign = match polarity {
        Polarity::Positive => -1.0,
        Polarity::Negative => 1.0,
    };
    QUESTIONS.iter().map(|&(s, f)| (T::lit(s), T::lit(sign * f))).collect()
}

/// `rows` predictor pairs cycling through the balanced grid
/// `Δstars ∈ {-2..2} × Δfriends ∈ {-10..10}`.
pub fn grid_design<T: Scalar>(rows: usize) -> Vec<(T, T)> {
    let cells: Vec<(T, T)> = (-2..=2)
        .flat_map(|s| (-10..=10).map(move |f| (T::lit(s as f64), T::lit(f as f64))))
        .collect();
    cells.iter().cycle().take(rows).copied().collect()
}
