use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sparsiqc::analysis::{analyze_frequency, certificate};
use sparsiqc::lmi::{LmiForm, Verdict};
use sparsiqc::lti::FrequencyGrid;
use sparsiqc::model::well_posed;
use sparsiqc::sdp::{SolverOptions, SolverPath};

use super::millis;
use crate::error::CliError;
use crate::files::{
    create_dir, hash_value, sha256_hex, write_json, FillSummary, FormOutcome, InstanceFile,
    RunManifest,
};

#[derive(Serialize)]
struct Settings<'a> {
    instance_sha256: String,
    forms: &'a [LmiForm],
    grid: &'a FrequencyGrid,
    solver: &'a SolverOptions,
}

/// Analyzes every form over the grid and writes one certificate per form
/// plus a manifest. With both forms the verdicts must agree.
pub fn run(
    instance: &Path,
    forms: &[LmiForm],
    grid: &FrequencyGrid,
    path: SolverPath,
    out: &Path,
) -> Result<String, CliError> {
    let start = Instant::now();
    let (file, bytes) = InstanceFile::read(instance)?;
    let sys = &file.system;
    let solver = SolverOptions::default().with_path(path);
    let settings = Settings {
        instance_sha256: sha256_hex(&bytes),
        forms,
        grid,
        solver: &solver,
    };
    create_dir(out)?;
    let mut manifest = RunManifest::new(
        "analyze",
        hash_value(&settings),
        Some(file.generator.seed),
        grid.points().to_vec(),
    );
    let mut lines = Vec::new();
    for &form in forms {
        if form == LmiForm::Lumped && !well_posed(sys, grid) {
            // The sparse form does not need the loop inverse and still runs.
            lines.push(format!("{form}: ill-posed on the grid, not analyzed"));
            manifest.outcomes.push(FormOutcome {
                form,
                verdict: None,
                error: Some("interconnection is ill-posed on the grid".into()),
                certificate: None,
                records: Vec::new(),
                timing: Default::default(),
                fill: None,
            });
            continue;
        }
        let form_start = Instant::now();
        let points: Vec<_> = grid.iter().collect();
        // Collect keeps grid order whatever the scheduling.
        let records: Vec<_> = points
            .par_iter()
            .map(|&w| analyze_frequency(sys, w, form, &solver))
            .collect();
        let cert = certificate(sys, form, records);
        let name = format!("certificate_{form}.json");
        write_json(&out.join(&name), &cert)?;
        let fill = FillSummary::from_records(&cert.records);
        let build_ms = cert.records.iter().map(|r| r.build_ms).sum();
        let solve_ms = cert.records.iter().map(|r| r.solve_ms).sum();
        let failures = cert.failures().count();
        lines.push(format!(
            "{form}: {} ({} of {} frequencies not certified)",
            verdict_text(cert.verdict),
            failures,
            cert.records.len()
        ));
        manifest.outcomes.push(FormOutcome {
            form,
            verdict: Some(cert.verdict),
            error: None,
            certificate: Some(name.clone()),
            fill,
            timing: crate::files::Timing {
                build_ms,
                solve_ms,
                total_ms: millis(form_start),
            },
            records: cert.records,
        });
        manifest.artifacts.push(name);
    }
    let verdicts: Vec<Verdict> = manifest.outcomes.iter().filter_map(|o| o.verdict).collect();
    let agree = verdicts.windows(2).all(|p| p[0] == p[1]);
    manifest.verdict = if agree {
        verdicts.first().copied()
    } else {
        None
    };
    manifest.fill = manifest
        .outcomes
        .iter()
        .find(|o| o.form == LmiForm::Sparse)
        .and_then(|o| o.fill.clone());
    manifest.timing.build_ms = manifest.outcomes.iter().map(|o| o.timing.build_ms).sum();
    manifest.timing.solve_ms = manifest.outcomes.iter().map(|o| o.timing.solve_ms).sum();
    manifest.timing.total_ms = millis(start);
    let path = manifest.write(out)?;
    lines.push(format!("manifest {}", path.display()));
    if !agree {
        eprintln!("{}", lines.join("\n"));
        return Err(CliError::VerdictMismatch);
    }
    Ok(lines.join("\n"))
}

fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::RobustlyStable => "robustly stable on the grid",
        Verdict::Inconclusive => "inconclusive",
    }
}
