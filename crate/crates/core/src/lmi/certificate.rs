use serde::{Deserialize, Serialize};

use super::LmiForm;
use crate::lti::Frequency;

/// Outcome of one per-frequency solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRecord {
    pub frequency: Frequency,
    /// Solver status, or `"error"` when the problem could not be built.
    pub status: String,
    /// Largest `t` with `W - sum y_i Q_i - t I >= 0`.
    pub t_star: Option<f64>,
    /// Bound on the largest eigenvalue of `F(y)`: `-(eps + t_star)`.
    pub margin: Option<f64>,
    pub epsilon: f64,
    pub feasible: bool,
    pub variables: Vec<f64>,
    pub iterations: usize,
    pub order: usize,
    pub hermitian_order: usize,
    pub nnz: usize,
    pub fill_ratio: Option<f64>,
    pub solver_path: Option<String>,
    pub build_ms: f64,
    pub solve_ms: f64,
    pub error: Option<String>,
}

impl FrequencyRecord {
    /// Record for a frequency whose problem could not be set up.
    pub fn failed(frequency: Frequency, error: String) -> Self {
        Self {
            frequency,
            status: "error".into(),
            t_star: None,
            margin: None,
            epsilon: 0.0,
            feasible: false,
            variables: Vec::new(),
            iterations: 0,
            order: 0,
            hermitian_order: 0,
            nnz: 0,
            fill_ratio: None,
            solver_path: None,
            build_ms: 0.0,
            solve_ms: 0.0,
            error: Some(error),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Every grid frequency has a strictly feasible multiplier.
    RobustlyStable,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub form: LmiForm,
    pub labels: Vec<String>,
    pub records: Vec<FrequencyRecord>,
    pub verdict: Verdict,
}

impl StabilityCertificate {
    pub fn from_records(form: LmiForm, labels: Vec<String>, records: Vec<FrequencyRecord>) -> Self {
        let verdict = if !records.is_empty() && records.iter().all(|r| r.feasible) {
            Verdict::RobustlyStable
        } else {
            Verdict::Inconclusive
        };
        Self {
            form,
            labels,
            records,
            verdict,
        }
    }

    /// Frequencies whose LMI was not certified.
    pub fn failures(&self) -> impl Iterator<Item = &FrequencyRecord> {
        self.records.iter().filter(|r| !r.feasible)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(w: f64, feasible: bool) -> FrequencyRecord {
        let mut r = FrequencyRecord::failed(Frequency::Finite(w), String::new());
        r.feasible = feasible;
        r
    }

    #[test]
    fn verdict_needs_every_frequency() {
        let ok = StabilityCertificate::from_records(
            LmiForm::Sparse,
            vec![],
            vec![rec(0.0, true), rec(1.0, true)],
        );
        assert_eq!(ok.verdict, Verdict::RobustlyStable);
        let bad = StabilityCertificate::from_records(
            LmiForm::Sparse,
            vec![],
            vec![rec(0.0, true), rec(1.0, false)],
        );
        assert_eq!(bad.verdict, Verdict::Inconclusive);
        assert_eq!(bad.failures().count(), 1);
        let empty = StabilityCertificate::from_records(LmiForm::Lumped, vec![], vec![]);
        assert_eq!(empty.verdict, Verdict::Inconclusive);
    }
}
