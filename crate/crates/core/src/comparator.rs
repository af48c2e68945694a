//! Lexicographic ranking of two confusion matrices.
//!
//! Steps are examined in order (CO, ANTI, II, ID by default). A step decides
//! when its two values differ by more than `epsilon`. Larger CO and II are
//! better; larger ANTI and ID are worse. If every step ties the matrices are
//! incomparable.

use core::fmt;
use core::str::FromStr;

use alloc::vec::Vec;

use crate::coefficients::{anti_correlation, co_correlation, CoefficientProfile};
use crate::error::{Error, Result};
use crate::matrix::ConfusionMatrix;
use crate::solver::{optimize_monotone, Direction, SolverOptions};

pub const DEFAULT_EPSILON: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    FirstInferior,
    FirstSuperior,
    Incomparable,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::FirstInferior => "first-inferior",
            Outcome::FirstSuperior => "first-superior",
            Outcome::Incomparable => "incomparable",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Outcome::FirstInferior => Outcome::FirstSuperior,
            Outcome::FirstSuperior => Outcome::FirstInferior,
            Outcome::Incomparable => Outcome::Incomparable,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    Co,
    Anti,
    Ii,
    Id,
}

impl Step {
    pub const DEFAULT_ORDER: [Step; 4] = [Step::Co, Step::Anti, Step::Ii, Step::Id];

    pub fn larger_is_better(self) -> bool {
        matches!(self, Step::Co | Step::Ii)
    }

    pub fn name(self) -> &'static str {
        match self {
            Step::Co => "CO",
            Step::Anti => "ANTI",
            Step::Ii => "II",
            Step::Id => "ID",
        }
    }

    /// Parses a comma-separated order such as `CO,ANTI,II,ID`. Steps may not repeat.
    pub fn parse_order(s: &str) -> Result<Vec<Step>> {
        let mut out = Vec::new();
        for part in s.split(',') {
            let step: Step = part.trim().parse()?;
            if out.contains(&step) {
                return Err(Error::InvalidOptions("comparison steps may not repeat"));
            }
            out.push(step);
        }
        Ok(out)
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Step {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Step::DEFAULT_ORDER
            .into_iter()
            .find(|step| step.name().eq_ignore_ascii_case(s))
            .ok_or(Error::InvalidOptions("comparison step must be one of CO, ANTI, II, ID"))
    }
}

/// The four coefficients the comparison can consult.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepValues {
    pub co: f64,
    pub anti: f64,
    pub ii: f64,
    pub id: f64,
}

impl StepValues {
    pub fn get(&self, step: Step) -> f64 {
        match step {
            Step::Co => self.co,
            Step::Anti => self.anti,
            Step::Ii => self.ii,
            Step::Id => self.id,
        }
    }

    pub fn from_profile(p: &CoefficientProfile) -> Self {
        Self { co: p.co.value, anti: p.anti.value, ii: p.ii.value, id: p.id.value }
    }

    pub fn compute(m: &ConfusionMatrix, opts: &SolverOptions) -> Result<Self> {
        Ok(Self {
            co: co_correlation(m, opts)?.value,
            anti: anti_correlation(m, opts)?.value,
            ii: optimize_monotone(m, Direction::Increasing, opts)?.value,
            id: optimize_monotone(m, Direction::Decreasing, opts)?.value,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub outcome: Outcome,
    /// `None` exactly when the outcome is incomparable.
    pub deciding_step: Option<Step>,
    /// Values for the first and second matrix.
    pub values: (StepValues, StepValues),
    pub epsilon: f64,
}

/// Compares with the default step order.
pub fn compare(m: &ConfusionMatrix, n: &ConfusionMatrix, epsilon: f64, opts: &SolverOptions) -> Result<Verdict> {
    compare_with_order(m, n, epsilon, &Step::DEFAULT_ORDER, opts)
}

pub fn compare_with_order(
    m: &ConfusionMatrix,
    n: &ConfusionMatrix,
    epsilon: f64,
    order: &[Step],
    opts: &SolverOptions,
) -> Result<Verdict> {
    check_epsilon(epsilon)?;
    let a = StepValues::compute(m, opts)?;
    let b = StepValues::compute(n, opts)?;
    compare_profiles(&a, &b, epsilon, order)
}

/// Compares precomputed values.
pub fn compare_profiles(a: &StepValues, b: &StepValues, epsilon: f64, order: &[Step]) -> Result<Verdict> {
    check_epsilon(epsilon)?;
    for &step in order {
        let (x, y) = (a.get(step), b.get(step));
        let first_lower = x < y - epsilon;
        let second_lower = y < x - epsilon;
        let outcome = match (first_lower, second_lower, step.larger_is_better()) {
            (true, _, true) | (_, true, false) => Outcome::FirstInferior,
            (_, true, true) | (true, _, false) => Outcome::FirstSuperior,
            _ => continue,
        };
        return Ok(Verdict { outcome, deciding_step: Some(step), values: (*a, *b), epsilon });
    }
    Ok(Verdict { outcome: Outcome::Incomparable, deciding_step: None, values: (*a, *b), epsilon })
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon >= 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidOptions("epsilon must be a finite nonnegative number"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(co: f64, anti: f64, ii: f64, id: f64) -> StepValues {
        StepValues { co, anti, ii, id }
    }

    #[test]
    fn step_directions() {
        let order = Step::DEFAULT_ORDER;
        let base = values(0.5, 0.5, 0.5, 0.5);
        let v = compare_profiles(&values(0.4, 0.5, 0.5, 0.5), &base, 1e-4, &order).unwrap();
        assert_eq!((v.outcome, v.deciding_step), (Outcome::FirstInferior, Some(Step::Co)));
        let v = compare_profiles(&values(0.5, 0.6, 0.5, 0.5), &base, 1e-4, &order).unwrap();
        assert_eq!((v.outcome, v.deciding_step), (Outcome::FirstInferior, Some(Step::Anti)));
        let v = compare_profiles(&values(0.5, 0.5, 0.6, 0.5), &base, 1e-4, &order).unwrap();
        assert_eq!((v.outcome, v.deciding_step), (Outcome::FirstSuperior, Some(Step::Ii)));
        let v = compare_profiles(&values(0.5, 0.5, 0.5, 0.4), &base, 1e-4, &order).unwrap();
        assert_eq!((v.outcome, v.deciding_step), (Outcome::FirstSuperior, Some(Step::Id)));
    }

    #[test]
    fn ties_within_epsilon() {
        let a = values(0.5, 0.5, 0.5, 0.5);
        let b = values(0.50005, 0.49995, 0.5, 0.5);
        let v = compare_profiles(&a, &b, 1e-4, &Step::DEFAULT_ORDER).unwrap();
        assert_eq!(v.outcome, Outcome::Incomparable);
        assert_eq!(v.deciding_step, None);
        let v = compare_profiles(&a, &b, 0.0, &Step::DEFAULT_ORDER).unwrap();
        assert_eq!(v.deciding_step, Some(Step::Co));
    }

    #[test]
    fn custom_order() {
        let a = values(0.4, 0.5, 0.9, 0.5);
        let b = values(0.5, 0.5, 0.5, 0.5);
        let order = Step::parse_order("ii, co").unwrap();
        let v = compare_profiles(&a, &b, 1e-4, &order).unwrap();
        assert_eq!((v.outcome, v.deciding_step), (Outcome::FirstSuperior, Some(Step::Ii)));
        assert!(Step::parse_order("CO,CO").is_err());
        assert!(Step::parse_order("CO,SUP").is_err());
    }

    #[test]
    fn antisymmetric() {
        let a = values(0.7, 0.2, 0.5, 0.1);
        let b = values(0.7, 0.3, 0.4, 0.1);
        let ab = compare_profiles(&a, &b, 1e-4, &Step::DEFAULT_ORDER).unwrap();
        let ba = compare_profiles(&b, &a, 1e-4, &Step::DEFAULT_ORDER).unwrap();
        assert_eq!(ab.outcome, ba.outcome.flipped());
        assert_eq!(ab.deciding_step, ba.deciding_step);
    }

    #[test]
    fn rejects_bad_epsilon() {
        let a = values(0.0, 0.0, 0.0, 0.0);
        assert!(compare_profiles(&a, &a, -1.0, &Step::DEFAULT_ORDER).is_err());
        assert!(compare_profiles(&a, &a, f64::NAN, &Step::DEFAULT_ORDER).is_err());
    }
}
