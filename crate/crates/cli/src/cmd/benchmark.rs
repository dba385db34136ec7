use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sparsiqc::analysis::analyze_frequency;
use sparsiqc::generate::{generate_instance, GeneratorConfig, Topology};
use sparsiqc::lmi::LmiForm;
use sparsiqc::lti::Frequency;
use sparsiqc::sdp::{SolverOptions, SolverPath};

use super::millis;
use crate::error::CliError;
use crate::files::{check_schema, create_dir, read_config, sha256_hex, RunManifest, Timing};

#[derive(Deserialize)]
struct BenchmarkConfig {
    schema_version: Option<u32>,
    topology: Topology,
    sizes: Vec<usize>,
    trials: usize,
    seed: u64,
    #[serde(default = "default_frequency")]
    frequency: Frequency,
    #[serde(default = "default_forms")]
    forms: Vec<LmiForm>,
    /// Each listed path is timed separately.
    #[serde(default = "default_paths")]
    solver_paths: Vec<SolverPath>,
}

fn default_frequency() -> Frequency {
    Frequency::Finite(1.0)
}

fn default_forms() -> Vec<LmiForm> {
    vec![LmiForm::Lumped, LmiForm::Sparse]
}

fn default_paths() -> Vec<SolverPath> {
    vec![SolverPath::Auto]
}

#[derive(Serialize)]
struct Row {
    #[serde(rename = "N")]
    n: usize,
    trial: usize,
    form: LmiForm,
    build_ms: f64,
    solve_ms: f64,
    order: usize,
    nnz: usize,
    fill_ratio: Option<f64>,
    margin: Option<f64>,
    solver_path: Option<String>,
}

/// Times one frequency per `(N, trial, form, path)`. Runs sequentially so
/// that timings are not distorted by sharing cores.
pub fn run(config_path: &Path, out: &Path) -> Result<String, CliError> {
    let start = Instant::now();
    let (cfg, bytes): (BenchmarkConfig, _) = read_config(config_path)?;
    check_schema(cfg.schema_version, config_path)?;
    let config_err = |msg: String| CliError::Config {
        path: config_path.to_owned(),
        msg,
    };
    if cfg.sizes.is_empty()
        || cfg.trials == 0
        || cfg.forms.is_empty()
        || cfg.solver_paths.is_empty()
    {
        return Err(config_err(
            "sizes, trials, forms and solver_paths must be nonempty".into(),
        ));
    }
    for &n in &cfg.sizes {
        let mut gen = GeneratorConfig::chain(n, cfg.seed);
        gen.topology = cfg.topology;
        gen.validate().map_err(|e| config_err(e.to_string()))?;
    }
    create_dir(out)?;
    let csv_name = "benchmark.csv";
    let mut writer = csv::Writer::from_path(out.join(csv_name))?;
    let mut manifest = RunManifest::new(
        "benchmark",
        sha256_hex(&bytes),
        Some(cfg.seed),
        vec![cfg.frequency],
    );
    let mut timing = Timing::default();
    let mut rows = 0;
    for &n in &cfg.sizes {
        let mut gen = GeneratorConfig::chain(n, cfg.seed);
        gen.topology = cfg.topology;
        gen.instances = cfg.trials;
        for trial in 0..cfg.trials {
            let inst = generate_instance(&gen, trial)?;
            for &form in &cfg.forms {
                for &path in &cfg.solver_paths {
                    let opts = SolverOptions::default().with_path(path);
                    let rec = analyze_frequency(&inst.system, cfg.frequency, form, &opts);
                    timing.build_ms += rec.build_ms;
                    timing.solve_ms += rec.solve_ms;
                    writer.serialize(Row {
                        n,
                        trial,
                        form,
                        build_ms: rec.build_ms,
                        solve_ms: rec.solve_ms,
                        order: rec.order,
                        nnz: rec.nnz,
                        fill_ratio: rec.fill_ratio,
                        margin: rec.margin,
                        solver_path: rec.solver_path,
                    })?;
                    rows += 1;
                }
            }
        }
    }
    writer.flush().map_err(|source| CliError::Io {
        path: out.join(csv_name),
        source,
    })?;
    manifest.artifacts.push(csv_name.into());
    timing.total_ms = millis(start);
    manifest.timing = timing;
    let path = manifest.write(out)?;
    Ok(format!(
        "{rows} rows -> {}; manifest {}",
        out.join(csv_name).display(),
        path.display()
    ))
}
