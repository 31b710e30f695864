use rayon::prelude::*;
use serde::Serialize;

use super::{build_design_matrix, fit_logit, FitOptions, Observation};
use crate::choice::logistic_unchecked;
use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvRow<T> {
    pub question_id: String,
    pub actual: T,
    pub predicted: T,
    pub abs_difference: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvTable<T> {
    pub rows: Vec<CvRow<T>>,
    pub mean_abs_difference: T,
}

/// Leave-one-question-out cross-validation of the two-predictor model.
///
/// For each question `q` (in order of first appearance) the model is fitted
/// on every other question; `predicted` is the mean fitted probability over
/// `q`'s rows and `actual` the observed fraction choosing option 1.
pub fn loo_cross_validate<T: Scalar>(data: &[Observation<T>], options: &FitOptions<T>) -> Result<CvTable<T>> {
    let mut questions: Vec<&str> = Vec::new();
    for obs in data {
        if !questions.contains(&obs.question_id.as_str()) {
            questions.push(&obs.question_id);
        }
    }
    if questions.len() < 2 {
        return Err(Error::InvalidArgument(
            "cross-validation needs at least two distinct questions".into(),
        ));
    }

    let rows = questions
        .par_iter()
        .map(|&q| {
            fold(data, q, options).map_err(|e| Error::Fold {
                question_id: q.to_string(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mean = rows.iter().map(|r| r.abs_difference).sum::<T>() / from_usize::<T>(rows.len());
    Ok(CvTable {
        rows,
        mean_abs_difference: mean,
    })
}

fn fold<T: Scalar>(data: &[Observation<T>], q: &str, options: &FitOptions<T>) -> Result<CvRow<T>> {
    let (held_out, training): (Vec<_>, Vec<_>) = data.iter().cloned().partition(|o| o.question_id == q);
    let (x, y) = build_design_matrix(&training, None)?;
    let fit = fit_logit(&x, &y, options)?;
    let (offset, slopes) = if options.intercept {
        (fit.coefficients[0], &fit.coefficients[1..])
    } else {
        (T::zero(), &fit.coefficients[..])
    };
    let n = from_usize::<T>(held_out.len());
    let predicted = held_out
        .iter()
        .map(|o| logistic_unchecked(offset + slopes[0] * o.delta_stars + slopes[1] * o.delta_friends))
        .sum::<T>()
        / n;
    let actual = from_usize::<T>(held_out.iter().filter(|o| o.chose_1).count()) / n;
    Ok(CvRow {
        question_id: q.to_string(),
        actual,
        predicted,
        abs_difference: (actual - predicted).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::Polarity;
    use crate::estimation::{default_question_design, synth_generate};
    use crate::ChoiceModel;

    #[test]
    fn synthetic_study1_predicts_well() {
        let m = ChoiceModel::preset("study1").unwrap();
        let data = synth_generate(&m, &default_question_design(Polarity::Positive), 350, 17).unwrap();
        let table = loo_cross_validate(&data, &FitOptions::default()).unwrap();
        assert_eq!(table.rows.len(), 8);
        assert_eq!(table.rows[3].question_id, "Q4");
        assert!(table.mean_abs_difference < 0.05, "{}", table.mean_abs_difference);
    }

    #[test]
    fn symmetric_questions_have_equal_error() {
        // Q1 and Q2 share predictors and response fractions; Q3 anchors the fit.
        let mut data = Vec::new();
        for (q, ds, df) in [
            ("Q1", 1.0, -2.0),
            ("Q2", 1.0, -2.0),
            ("Q3", 2.0, 1.0),
            ("Q4", -1.0, 3.0),
        ] {
            for i in 0..20 {
                data.push(Observation::new(q, ds, df, i % 3 != 0));
            }
        }
        let table = loo_cross_validate(&data, &FitOptions::default()).unwrap();
        assert_eq!(table.rows[0].abs_difference, table.rows[1].abs_difference);
    }

    #[test]
    fn single_question_rejected() {
        let data = vec![
            Observation::new("Q1", 1.0, 2.0, true),
            Observation::new("Q1", 1.0, 2.0, false),
        ];
        assert!(loo_cross_validate(&data, &FitOptions::default()).is_err());
    }

    #[test]
    fn fold_failure_names_the_fold() {
        // Without Q1 the friends column is identically zero.
        let mut data = Vec::new();
        for i in 0..10 {
            data.push(Observation::new("Q1", 1.0, 2.0, i % 2 == 0));
            data.push(Observation::new("Q2", 1.0, 0.0, i < 7));
            data.push(Observation::new("Q3", -1.0, 0.0, i < 4));
        }
        match loo_cross_validate(&data, &FitOptions::default()) {
            Err(Error::Fold { question_id, .. }) => assert_eq!(question_id, "Q1"),
            other => panic!("{other:?}"),
        }
    }
}
