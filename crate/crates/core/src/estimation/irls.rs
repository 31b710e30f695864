use serde::Serialize;

use super::linalg::Cholesky;
use super::DesignMatrix;
use crate::choice::logistic_unchecked;
use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

/// Coefficient norm beyond which a fit is declared divergent. logistic(50)
/// is 1 to double precision.
pub const SEPARATION_NORM: f64 = 50.0;

const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitOptions<T> {
    /// Convergence threshold on the log-likelihood change between iterations.
    pub tolerance: T,
    pub max_iterations: usize,
    /// Prepend a column of ones. Off by default: the choice model has no
    /// intercept.
    pub intercept: bool,
}

impl<T: Scalar> Default for FitOptions<T> {
    fn default() -> Self {
        FitOptions {
            tolerance: T::lit(1e-8),
            max_iterations: 100,
            intercept: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult<T> {
    pub names: Vec<String>,
    pub coefficients: Vec<T>,
    pub standard_errors: Vec<T>,
    pub z_values: Vec<T>,
    pub log_likelihood: T,
    pub pseudo_r2: T,
    pub iterations: usize,
    pub converged: bool,
    /// Log-likelihood after every accepted iterate, starting at beta = 0.
    pub log_likelihood_trace: Vec<T>,
    #[serde(skip)]
    pub fitted: Vec<T>,
}

impl<T: Scalar> FitResult<T> {
    pub fn coefficient(&self, name: &str) -> Option<T> {
        self.index(name).map(|i| self.coefficients[i])
    }

    pub fn standard_error(&self, name: &str) -> Option<T> {
        self.index(name).map(|i| self.standard_errors[i])
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `Σ (y_i - π_i) x_i` at the returned coefficients.
    pub fn score(&self, design: &DesignMatrix<T>, responses: &[bool]) -> Vec<T> {
        let design = if self.names.len() == design.cols() + 1 {
            design.with_intercept()
        } else {
            design.clone()
        };
        let eval = evaluate(&design, responses, &self.coefficients);
        eval.score
    }
}

struct Evaluation<T> {
    log_likelihood: T,
    score: Vec<T>,
    /// `Xᵀ W X`, row-major.
    information: Vec<T>,
    fitted: Vec<T>,
}

fn evaluate<T: Scalar>(x: &DesignMatrix<T>, y: &[bool], beta: &[T]) -> Evaluation<T> {
    let p = x.cols();
    let mut ll = T::zero();
    let mut score = vec![T::zero(); p];
    let mut info = vec![T::zero(); p * p];
    let mut fitted = Vec::with_capacity(x.rows());
    for (i, &yi) in y.iter().enumerate() {
        let row = x.row(i);
        let eta = row.iter().zip(beta).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        let pi = logistic_unchecked(eta);
        let qi = logistic_unchecked(-eta);
        // log p = -softplus(-eta), log q = -softplus(eta)
        ll = ll - if yi { softplus(-eta) } else { softplus(eta) };
        let resid = if yi { qi } else { -pi };
        let w = pi * qi;
        for a in 0..p {
            score[a] = score[a] + row[a] * resid;
            let wa = w * row[a];
            for b in 0..=a {
                info[a * p + b] = info[a * p + b] + wa * row[b];
            }
        }
        fitted.push(pi);
    }
    for a in 0..p {
        for b in 0..a {
            info[b * p + a] = info[a * p + b];
        }
    }
    Evaluation {
        log_likelihood: ll,
        score,
        information: info,
        fitted,
    }
}

fn softplus<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &a| acc + a * a).sqrt()
}

/// Maximum-likelihood logistic regression by Newton-Raphson (IRLS) with
/// step-halving.
///
/// Iteration stops once the log-likelihood changes by less than
/// `options.tolerance` and the Newton step has become small. Separated data
/// makes the coefficients grow without bound and is reported as
/// [`Error::Separation`] once their norm exceeds [`SEPARATION_NORM`].
pub fn fit_logit<T: Scalar>(
    design: &DesignMatrix<T>,
    responses: &[bool],
    options: &FitOptions<T>,
) -> Result<FitResult<T>> {
    if design.rows() != responses.len() {
        return Err(Error::InvalidArgument(format!(
            "design has {} rows but {} responses",
            design.rows(),
            responses.len()
        )));
    }
    let owned;
    let x = if options.intercept {
        owned = design.with_intercept();
        &owned
    } else {
        design
    };
    let p = x.cols();
    if x.rows() < p {
        return Err(Error::TooFewRows {
            rows: x.rows(),
            cols: p,
        });
    }
    let ones = responses.iter().filter(|&&y| y).count();
    if ones == 0 || ones == responses.len() {
        return Err(Error::SingleClass);
    }

    let limit = T::lit(SEPARATION_NORM);
    let step_tolerance = options.tolerance.sqrt();
    let mut beta = vec![T::zero(); p];
    let mut eval = evaluate(x, responses, &beta);
    let mut trace = vec![eval.log_likelihood];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < options.max_iterations {
        iterations += 1;
        let chol = Cholesky::factor(&eval.information, p)?;
        let mut step = chol.solve(&eval.score);

        let mut candidate: Vec<T> = beta.iter().zip(&step).map(|(&b, &d)| b + d).collect();
        let mut next = evaluate(x, responses, &candidate);
        let mut halvings = 0;
        while next.log_likelihood < eval.log_likelihood && halvings < MAX_HALVINGS {
            step.iter_mut().for_each(|d| *d = *d * T::lit(0.5));
            candidate = beta.iter().zip(&step).map(|(&b, &d)| b + d).collect();
            next = evaluate(x, responses, &candidate);
            halvings += 1;
        }
        if next.log_likelihood < eval.log_likelihood {
            // No ascent direction left at working precision.
            converged = true;
            break;
        }

        let change = next.log_likelihood - eval.log_likelihood;
        let step_size = step.iter().fold(T::zero(), |m, d| m.max(d.abs()));
        beta = candidate;
        eval = next;
        trace.push(eval.log_likelihood);

        let n = norm(&beta);
        if n > limit {
            return Err(Error::Separation {
                norm: n.to_f64_lossy(),
                limit: SEPARATION_NORM,
            });
        }
        if change < options.tolerance && step_size < step_tolerance {
            converged = true;
            break;
        }
    }

    let chol = Cholesky::factor(&eval.information, p)?;
    let standard_errors: Vec<T> = chol.inverse_diagonal().into_iter().map(|v| v.sqrt()).collect();
    let z_values = beta
        .iter()
        .zip(&standard_errors)
        .map(|(&b, &se)| if se > T::zero() { b / se } else { T::nan() })
        .collect();
    let r2 = pseudo_r2(responses, &eval.fitted)?;

    Ok(FitResult {
        names: x.names().to_vec(),
        coefficients: beta,
        standard_errors,
        z_values,
        log_likelihood: eval.log_likelihood,
        pseudo_r2: r2,
        iterations,
        converged,
        log_likelihood_trace: trace,
        fitted: eval.fitted,
    })
}

/// Efron's pseudo-R²: `1 - Σ(y_i - π_i)² / Σ(y_i - ȳ)²`.
pub fn pseudo_r2<T: Scalar>(responses: &[bool], predictions: &[T]) -> Result<T> {
    if responses.len() != predictions.len() {
        return Err(Error::InvalidArgument(format!(
            "{} responses but {} predictions",
            responses.len(),
            predictions.len()
        )));
    }
    if responses.len() < 2 {
        return Err(Error::InvalidArgument(
            "pseudo-R² needs at least two observations".into(),
        ));
    }
    let y: Vec<T> = responses
        .iter()
        .map(|&b| if b { T::one() } else { T::zero() })
        .collect();
    let mean = y.iter().copied().sum::<T>() / from_usize::<T>(y.len());
    let total: T = y.iter().map(|&v| (v - mean) * (v - mean)).sum();
    if total == T::zero() {
        return Err(Error::SingleClass);
    }
    let resid: T = y.iter().zip(predictions).map(|(&v, &p)| (v - p) * (v - p)).sum();
    Ok(T::one() - resid / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{build_design_matrix, grid_design, synth_generate};
    use crate::ChoiceModel;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid_fit(seed: u64) -> (DesignMatrix<f64>, Vec<bool>, FitResult<f64>) {
        let model = ChoiceModel::preset("study1").unwrap();
        let design = grid_design(2800);
        let data = synth_generate(&model, &design, 1, seed).unwrap();
        let (x, y) = build_design_matrix(&data, None).unwrap();
        let fit = fit_logit(&x, &y, &FitOptions::default()).unwrap();
        (x, y, fit)
    }

    #[test]
    fn recovers_study1_on_balanced_grid() {
        let (x, y, fit) = grid_fit(11);
        assert!(fit.converged);
        assert_abs_diff_eq!(fit.coefficient("alpha_s").unwrap(), 0.73549, epsilon = 0.08);
        assert_abs_diff_eq!(fit.coefficient("alpha_f").unwrap(), 0.20471, epsilon = 0.08);
        let worst = fit.score(&x, &y).iter().fold(0.0_f64, |m, s| m.max(s.abs()));
        assert!(worst < 1e-6, "score {worst}");
        for ((&b, &se), &z) in fit.coefficients.iter().zip(&fit.standard_errors).zip(&fit.z_values) {
            assert_abs_diff_eq!(z, b / se, epsilon = 1e-12);
        }
        assert!(fit.pseudo_r2 <= 1.0);
    }

    #[test]
    fn log_likelihood_never_decreases() {
        let (_, _, fit) = grid_fit(3);
        for w in fit.log_likelihood_trace.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn coin_flips_give_null_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let design = grid_design(2000);
        let rows: Vec<Vec<f64>> = design.iter().map(|&(s, f)| vec![s, f]).collect();
        let x = DesignMatrix::from_rows(vec!["alpha_s".into(), "alpha_f".into()], &rows).unwrap();
        let y: Vec<bool> = (0..rows.len()).map(|_| rng.random::<bool>()).collect();
        let fit = fit_logit(&x, &y, &FitOptions::default()).unwrap();
        for (&b, &se) in fit.coefficients.iter().zip(&fit.standard_errors) {
            assert!(b.abs() < 3.0 * se, "{b} vs se {se}");
        }
    }

    #[test]
    fn perfect_separation_is_detected() {
        let rows: Vec<Vec<f64>> = [-2.0, -1.0, 1.0, 2.0, -2.0, 1.0]
            .iter()
            .zip([3.0, -1.0, 0.0, 2.0, 1.0, -4.0])
            .map(|(&s, f)| vec![s, f])
            .collect();
        let y: Vec<bool> = rows.iter().map(|r| r[0] > 0.0).collect();
        let x = DesignMatrix::from_rows(vec!["alpha_s".into(), "alpha_f".into()], &rows).unwrap();
        let err = fit_logit(&x, &y, &FitOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Separation { .. }), "{err}");
    }

    #[test]
    fn rank_deficiency_is_detected() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![i as f64 - 10.0, 2.0 * (i as f64 - 10.0)])
            .collect();
        let y: Vec<bool> = (0..20).map(|i| i % 3 == 0).collect();
        let x = DesignMatrix::from_rows(vec!["a".into(), "b".into()], &rows).unwrap();
        assert!(matches!(
            fit_logit(&x, &y, &FitOptions::default()),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn precondition_errors() {
        let x = DesignMatrix::from_rows(vec!["a".into(), "b".into()], &[vec![1.0, 2.0]]).unwrap();
        assert!(matches!(
            fit_logit(&x, &[true], &FitOptions::default()),
            Err(Error::TooFewRows { .. })
        ));
        let x = DesignMatrix::from_rows(vec!["a".into()], &[vec![1.0], vec![2.0]]).unwrap();
        assert!(matches!(
            fit_logit(&x, &[true, true], &FitOptions::default()),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn intercept_is_recovered() {
        let model = ChoiceModel::with_intercept(0.7, 0.2, -0.4).unwrap();
        let data = synth_generate(&model, &grid_design(4000), 1, 8).unwrap();
        let (x, y) = build_design_matrix(&data, None).unwrap();
        let opts = FitOptions {
            intercept: true,
            ..FitOptions::default()
        };
        let fit = fit_logit(&x, &y, &opts).unwrap();
        assert_eq!(fit.names[0], "intercept");
        assert_abs_diff_eq!(fit.coefficient("intercept").unwrap(), -0.4, epsilon = 0.2);
        let worst = fit.score(&x, &y).iter().fold(0.0_f64, |m, s| m.max(s.abs()));
        assert!(worst < 1e-6);
    }

    #[test]
    fn relabeling_options_leaves_coefficients_unchanged() {
        let (x, y, fit) = grid_fit(21);
        let flipped: Vec<bool> = y.iter().map(|b| !b).collect();
        let relabeled = fit_logit(&x.negated(), &flipped, &FitOptions::default()).unwrap();
        assert_eq!(relabeled.coefficients, fit.coefficients);
        // Either half of the relabeling on its own negates them.
        let negated = fit_logit(&x.negated(), &y, &FitOptions::default()).unwrap();
        let neg: Vec<f64> = fit.coefficients.iter().map(|b| -b).collect();
        assert_eq!(negated.coefficients, neg);
    }

    #[test]
    fn scaling_a_column_rescales_its_coefficient() {
        let (x, y, fit) = grid_fit(4);
        let scaled = fit_logit(&x.scale_column(1, 4.0), &y, &FitOptions::default()).unwrap();
        assert_abs_diff_eq!(scaled.coefficients[1] * 4.0, fit.coefficients[1], epsilon = 1e-8);
        assert_abs_diff_eq!(scaled.coefficients[0], fit.coefficients[0], epsilon = 1e-8);
        for (a, b) in scaled.fitted.iter().zip(&fit.fitted) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn pseudo_r2_reference_values() {
        assert_eq!(pseudo_r2(&[true, false], &[1.0, 0.0]).unwrap(), 1.0);
        let y = [true, false, true, true];
        assert_eq!(pseudo_r2(&y, &[0.75; 4]).unwrap(), 0.0);
        // 1 - 0.36 / (2/3)
        assert_abs_diff_eq!(
            pseudo_r2(&[true, true, false], &[0.8, 0.6, 0.4]).unwrap(),
            0.46,
            epsilon = 1e-12
        );
        assert!(matches!(pseudo_r2(&[true, true], &[0.5, 0.5]), Err(Error::SingleClass)));
        assert!(pseudo_r2(&[true], &[0.5]).is_err());
        assert!(pseudo_r2(&[true, false], &[0.5]).is_err());
    }

    #[test]
    fn fits_in_f32() {
        let model = ChoiceModel::preset("study1").unwrap();
        let data64 = synth_generate(&model, &grid_design(2800), 1, 1).unwrap();
        let data: Vec<_> = data64
            .iter()
            .map(|o| {
                crate::estimation::Observation::new(
                    o.question_id.clone(),
                    o.delta_stars as f32,
                    o.delta_friends as f32,
                    o.chose_1,
                )
            })
            .collect();
        let (x, y) = build_design_matrix(&data, None).unwrap();
        let opts = FitOptions {
            tolerance: 1e-4_f32,
            ..FitOptions::default()
        };
        let fit = fit_logit(&x, &y, &opts).unwrap();
        assert!((fit.coefficients[0] - 0.735).abs() < 0.08);
    }

    proptest! {
        #[test]
        fn pseudo_r2_never_exceeds_one(pairs in proptest::collection::vec((any::<bool>(), 0.0..1.0_f64), 2..50)) {
            let y: Vec<bool> = pairs.iter().map(|p| p.0).collect();
            prop_assume!(y.iter().any(|&b| b) && y.iter().any(|&b| !b));
            let p: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            prop_assert!(pseudo_r2(&y, &p).unwrap() <= 1.0);
        }
    }
}
