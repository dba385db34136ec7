//! Per-frequency robustness analysis: build the chosen LMI, solve for its
//! margin and collect the outcomes into a [`StabilityCertificate`].

use std::time::Instant;

use thiserror::Error;

use crate::lmi::{
    lumped_lmi, sparse_lmi, FrequencyRecord, LmiError, LmiForm, SdpFeasibilityProblem,
    StabilityCertificate,
};
use crate::lti::{Frequency, FrequencyGrid};
use crate::model::{well_posed, InterconnectedSystem};
use crate::sdp::{solve_margin, SolverOptions};

#[derive(Debug, Error)]
pub enum AnalysisError {
    /// The lumped form needs `(I - Gamma G_zw)^{-1}` at every grid point.
    #[error("interconnection is ill-posed on the grid; the lumped form is undefined")]
    IllPosed,
    #[error(transparent)]
    Lmi(#[from] LmiError),
}

pub fn build_lmi(
    sys: &InterconnectedSystem,
    w: Frequency,
    form: LmiForm,
) -> Result<SdpFeasibilityProblem, LmiError> {
    match form {
        LmiForm::Lumped => lumped_lmi(sys, w),
        LmiForm::Sparse => sparse_lmi(sys, w),
    }
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Builds and solves one frequency. Failures are recorded, not returned, so
/// one bad frequency does not hide the others.
pub fn analyze_frequency(
    sys: &InterconnectedSystem,
    w: Frequency,
    form: LmiForm,
    solver: &SolverOptions,
) -> FrequencyRecord {
    let start = Instant::now();
    let problem = match build_lmi(sys, w, form) {
        Ok(p) => p,
        Err(e) => return FrequencyRecord::failed(w, e.to_string()),
    };
    let build_ms = millis(start);
    let start = Instant::now();
    let solved = solve_margin(&problem, solver);
    let solve_ms = millis(start);
    let mut rec = FrequencyRecord::failed(w, String::new());
    rec.epsilon = problem.epsilon();
    rec.order = problem.order();
    rec.hermitian_order = problem.hermitian_order();
    rec.nnz = problem.pattern().nnz();
    rec.build_ms = build_ms;
    rec.solve_ms = solve_ms;
    match solved {
        Ok(r) => {
            rec.status = r.status.to_string();
            // Every iterate is strictly feasible, so a positive t certifies
            // the LMI whatever the termination status.
            rec.feasible = r.t.is_finite() && r.t > 0.0;
            rec.margin = Some(-(problem.epsilon() + r.t));
            rec.t_star = Some(r.t);
            rec.variables = r.y;
            rec.iterations = r.iterations;
            rec.fill_ratio = r.fill.map(|f| f.fill_ratio);
            rec.solver_path = Some(r.path.to_string());
            rec.error = None;
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Certificate over `grid`, frequencies in grid order.
pub fn analyze(
    sys: &InterconnectedSystem,
    grid: &FrequencyGrid,
    form: LmiForm,
    solver: &SolverOptions,
) -> Result<StabilityCertificate, AnalysisError> {
    if form == LmiForm::Lumped && !well_posed(sys, grid) {
        return Err(AnalysisError::IllPosed);
    }
    let records = grid
        .iter()
        .map(|w| analyze_frequency(sys, w, form, solver))
        .collect();
    Ok(certificate(sys, form, records))
}

/// Certificate from records computed elsewhere, e.g. in parallel.
pub fn certificate(
    sys: &InterconnectedSystem,
    form: LmiForm,
    records: Vec<FrequencyRecord>,
) -> StabilityCertificate {
    let mut labels: Vec<String> = (1..=sys.len()).map(|i| format!("r{i}")).collect();
    if form == LmiForm::Sparse {
        labels.push("x".into());
    }
    StabilityCertificate::from_records(form, labels, records)
}
