use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Deserialize;
use sparsiqc::generate::{generate_instance, GeneratorConfig};

use super::millis;
use crate::error::CliError;
use crate::files::{
    check_schema, create_dir, read_config, sha256_hex, write_json, InstanceFile, InstanceSummary,
    RunManifest,
};

#[derive(Deserialize)]
struct GenerateConfig {
    schema_version: Option<u32>,
    #[serde(flatten)]
    generator: GeneratorConfig,
}

/// Writes `instance_k.json` for `k < instances` and a manifest. Instances are
/// generated in parallel; each draws from its own stream, so the output does
/// not depend on `--jobs`.
pub fn run(config_path: &Path, out: &Path) -> Result<String, CliError> {
    let start = Instant::now();
    let (cfg, bytes): (GenerateConfig, _) = read_config(config_path)?;
    check_schema(cfg.schema_version, config_path)?;
    let gen = cfg.generator;
    gen.validate().map_err(|e| CliError::Config {
        path: config_path.to_owned(),
        msg: e.to_string(),
    })?;
    create_dir(out)?;
    let instances = (0..gen.instances)
        .into_par_iter()
        .map(|k| generate_instance(&gen, k))
        .collect::<Result<Vec<_>, _>>()?;
    let mut manifest = RunManifest::new(
        "generate",
        sha256_hex(&bytes),
        Some(gen.seed),
        gen.grid.points().to_vec(),
    );
    for inst in instances {
        let name = InstanceFile::file_name(inst.index);
        manifest.instances.push(InstanceSummary {
            index: inst.index,
            file: name.clone(),
            conditions_pass: inst.report.all_pass(),
            rescaled: inst.rescale_factors.iter().any(|&f| f != 1.0),
        });
        write_json(&out.join(&name), &InstanceFile::new(&gen, inst))?;
        manifest.artifacts.push(name);
    }
    manifest.timing.total_ms = millis(start);
    let path = manifest.write(out)?;
    Ok(format!(
        "generated {} instance(s); manifest {}",
        gen.instances,
        path.display()
    ))
}
