//! Maximum-likelihood fitting of the choice logit, with optional demographic
//! interactions, leave-one-question-out cross-validation and a synthetic data
//! generator.

mod cv;
mod design;
mod irls;
mod linalg;
mod synth;

pub use cv::{loo_cross_validate, CvRow, CvTable};
pub use design::{
    build_design_matrix, AgeBracket, Demographics, DesignMatrix, Education, Factor, Gender, InteractionSpec, Variable,
};
pub use irls::{fit_logit, pseudo_r2, FitOptions, FitResult, SEPARATION_NORM};
pub use synth::{default_question_design, grid_design, synth_generate};

use serde::Serialize;

/// One respondent's answer to one question.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation<T> {
    pub question_id: String,
    /// `S1 - S2`
    pub delta_stars: T,
    /// `F1 - F2`
    pub delta_friends: T,
    pub chose_1: bool,
    pub demographics: Option<Demographics>,
}

impl<T> Observation<T> {
    pub fn new(question_id: impl Into<String>, delta_stars: T, delta_friends: T, chose_1: bool) -> Self {
        Observation {
            question_id: question_id.into(),
            delta_stars,
            delta_friends,
            chose_1,
            demographics: None,
        }
    }

    pub fn with_demographics(mut self, demographics: Demographics) -> Self {
        self.demographics = Some(demographics);
        self
    }
}
