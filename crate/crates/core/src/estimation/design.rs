use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Observation;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
}

/// Age in ten-year brackets. `Under20` is the default baseline; the other
/// five levels are the `age1`..`age5` dummies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgeBracket {
    Under20,
    From20To29,
    From30To39,
    From40To49,
    From50To59,
    From60,
}

/// Highest completed education. `HighSchool` is the default baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Education {
    HighSchool,
    Associates,
    Bachelors,
    Graduate,
}

const AGES: [AgeBracket; 6] = [
    AgeBracket::Under20,
    AgeBracket::From20To29,
    AgeBracket::From30To39,
    AgeBracket::From40To49,
    AgeBracket::From50To59,
    AgeBracket::From60,
];

const EDUCATIONS: [Education; 4] = [
    Education::HighSchool,
    Education::Associates,
    Education::Bachelors,
    Education::Graduate,
];

impl FromStr for Gender {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "male" | "m" | "0" => Ok(Gender::Male),
            "female" | "f" | "1" => Ok(Gender::Female),
            _ => Err(Error::UnknownLevel {
                variable: "gender",
                level: s.to_string(),
            }),
        }
    }
}

impl FromStr for AgeBracket {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let idx = match t.as_str() {
            "<20" | "under20" => Some(0),
            "20-29" => Some(1),
            "30-39" => Some(2),
            "40-49" => Some(3),
            "50-59" => Some(4),
            "60+" => Some(5),
            other => other.strip_prefix("age").unwrap_or(other).parse::<usize>().ok(),
        };
        idx.and_then(|i| AGES.get(i).copied())
            .ok_or_else(|| Error::UnknownLevel {
                variable: "age",
                level: s.to_string(),
            })
    }
}

impl FromStr for Education {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let idx = match t.as_str() {
            "highschool" | "high_school" | "high school" => Some(0),
            "associates" | "associate" => Some(1),
            "bachelors" | "bachelor" => Some(2),
            "graduate" => Some(3),
            other => other.strip_prefix("edu").unwrap_or(other).parse::<usize>().ok(),
        };
        idx.and_then(|i| EDUCATIONS.get(i).copied())
            .ok_or_else(|| Error::UnknownLevel {
                variable: "education",
                level: s.to_string(),
            })
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gender::Male => "male",
            Gender::Female => "female",
        })
    }
}

impl fmt::Display for AgeBracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "age{}", *self as usize)
    }
}

impl fmt::Display for Education {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "edu{}", *self as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Demographics {
    pub gender: Gender,
    pub age: AgeBracket,
    pub education: Education,
}

impl Demographics {
    pub fn new(gender: Gender, age: AgeBracket, education: Education) -> Self {
        Demographics { gender, age, education }
    }

    /// Every variable at its default baseline.
    pub fn baseline() -> Self {
        Demographics::new(Gender::Male, AgeBracket::Under20, Education::HighSchool)
    }

    fn level(&self, variable: Variable) -> usize {
        match variable {
            Variable::Gender => self.gender as usize,
            Variable::Age => self.age as usize,
            Variable::Education => self.education as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    Gender,
    Age,
    Education,
}

impl Variable {
    pub fn level_count(self) -> usize {
        match self {
            Variable::Gender => 2,
            Variable::Age => AGES.len(),
            Variable::Education => EDUCATIONS.len(),
        }
    }

    fn parse_level(self, s: &str) -> Result<usize> {
        Ok(match self {
            Variable::Gender => s.parse::<Gender>()? as usize,
            Variable::Age => s.parse::<AgeBracket>()? as usize,
            Variable::Education => s.parse::<Education>()? as usize,
        })
    }

    fn dummy_name(self, level: usize) -> String {
        match self {
            Variable::Gender => "gender".to_string(),
            Variable::Age => format!("age{level}"),
            Variable::Education => format!("edu{level}"),
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variable::Gender => "gender",
            Variable::Age => "age",
            Variable::Education => "education",
        })
    }
}

/// A categorical variable together with its omitted baseline level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Factor {
    pub variable: Variable,
    pub baseline: usize,
}

impl Factor {
    pub fn new(variable: Variable, baseline: &str) -> Result<Self> {
        Ok(Factor {
            variable,
            baseline: variable.parse_level(baseline)?,
        })
    }

    /// `(dummy name, level)` for every non-baseline level.
    pub fn dummies(&self) -> Vec<(String, usize)> {
        (0..self.variable.level_count())
            .filter(|&l| l != self.baseline)
            .map(|l| (self.variable.dummy_name(l), l))
            .collect()
    }
}

/// Which demographic dummies interact with the stars and friends predictors.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct InteractionSpec {
    pub factors: Vec<Factor>,
}

impl InteractionSpec {
    pub fn new(factors: Vec<Factor>) -> Self {
        InteractionSpec { factors }
    }

    /// Gender, education and age with default baselines: 9 dummies, 20 columns.
    pub fn full() -> Self {
        InteractionSpec::new(vec![
            Factor {
                variable: Variable::Gender,
                baseline: 0,
            },
            Factor {
                variable: Variable::Education,
                baseline: 0,
            },
            Factor {
                variable: Variable::Age,
                baseline: 0,
            },
        ])
    }
}

/// Dense row-major design matrix with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix<T> {
    names: Vec<String>,
    rows: usize,
    data: Vec<T>,
}

impl<T: Scalar> DesignMatrix<T> {
    pub fn from_rows(names: Vec<String>, rows: &[Vec<T>]) -> Result<Self> {
        let cols = names.len();
        if cols == 0 {
            return Err(Error::Empty("design needs at least one column"));
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(DesignMatrix {
            names,
            rows: rows.len(),
            data,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.names.len()
    }

    pub fn row(&self, i: usize) -> &[T] {
        let c = self.cols();
        &self.data[i * c..(i + 1) * c]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols() + j]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = T> + '_ {
        (0..self.rows).map(move |i| self.get(i, j))
    }

    /// Copy with a leading column of ones named `intercept`.
    pub fn with_intercept(&self) -> Self {
        let c = self.cols();
        let mut names = Vec::with_capacity(c + 1);
        names.push("intercept".to_string());
        names.extend(self.names.iter().cloned());
        let mut data = Vec::with_capacity(self.rows * (c + 1));
        for i in 0..self.rows {
            data.push(T::one());
            data.extend_from_slice(self.row(i));
        }
        DesignMatrix {
            names,
            rows: self.rows,
            data,
        }
    }

    /// Copy with every entry of column `j` multiplied by `factor`.
    pub fn scale_column(&self, j: usize, factor: T) -> Self {
        let mut out = self.clone();
        let c = self.cols();
        for i in 0..self.rows {
            out.data[i * c + j] = out.data[i * c + j] * factor;
        }
        out
    }

    /// Copy with every entry negated.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v = -*v);
        out
    }
}

/// Builds `[alpha_s, alpha_f]` columns from the predictor differences and,
/// when `spec` is given, the interaction columns `d_s = d * delta_stars` and
/// `d_f = d * delta_friends` for every dummy `d`.
pub fn build_design_matrix<T: Scalar>(
    data: &[Observation<T>],
    spec: Option<&InteractionSpec>,
) -> Result<(DesignMatrix<T>, Vec<bool>)> {
    if data.is_empty() {
        return Err(Error::Empty("no observations"));
    }
    let dummies: Vec<(Variable, String, usize)> = spec
        .map(|s| {
            s.factors
                .iter()
                .flat_map(|f| f.dummies().into_iter().map(move |(n, l)| (f.variable, n, l)))
                .collect()
        })
        .unwrap_or_default();

    let mut names = vec!["alpha_s".to_string(), "alpha_f".to_string()];
    for (_, name, _) in &dummies {
        names.push(format!("{name}_s"));
        names.push(format!("{name}_f"));
    }

    let cols = names.len();
    let mut values = Vec::with_capacity(data.len() * cols);
    let mut y = Vec::with_capacity(data.len());
    for (row, obs) in data.iter().enumerate() {
        values.push(obs.delta_stars);
        values.push(obs.delta_friends);
        if !dummies.is_empty() {
            let demo = obs.demographics.as_ref().ok_or_else(|| Error::MissingDemographics {
                row,
                question_id: obs.question_id.clone(),
            })?;
            for (variable, _, level) in &dummies {
                let on = if demo.level(*variable) == *level {
                    T::one()
                } else {
                    T::zero()
                };
                values.push(on * obs.delta_stars);
                values.push(on * obs.delta_friends);
            }
        }
        y.push(obs.chose_1);
    }
    Ok((
        DesignMatrix {
            names,
            rows: data.len(),
            data: values,
        },
        y,
    ))
}
