//! On-disk artifacts: versioned instance files and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sparsiqc::generate::{ConditionReport, GeneratedInstance, GeneratorConfig};
use sparsiqc::lmi::{FrequencyRecord, LmiForm, Verdict};
use sparsiqc::lti::Frequency;
use sparsiqc::model::{AdjacencyMatrix, InterconnectedSystem};

use crate::error::CliError;

/// Version written into every JSON artifact; readers reject other values.
pub const SCHEMA_VERSION: u32 = 1;

pub fn check_schema(version: Option<u32>, path: &Path) -> Result<(), CliError> {
    match version {
        None | Some(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(CliError::Config {
            path: path.to_owned(),
            msg: format!("unsupported schema_version {v}, expected {SCHEMA_VERSION}"),
        }),
    }
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Parses a config file; any parse failure is a config error.
pub fn read_config<T: DeserializeOwned>(path: &Path) -> Result<(T, Vec<u8>), CliError> {
    let bytes = read_bytes(path)?;
    let value = serde_json::from_slice(&bytes).map_err(|e| CliError::Config {
        path: path.to_owned(),
        msg: e.to_string(),
    })?;
    Ok((value, bytes))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<(T, Vec<u8>), CliError> {
    let bytes = read_bytes(path)?;
    let value = serde_json::from_slice(&bytes).map_err(|source| CliError::Json {
        path: path.to_owned(),
        source,
    })?;
    Ok((value, bytes))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
        path: path.to_owned(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of a value through its compact JSON form, used for invocation
/// settings that do not come from a single file.
pub fn hash_value<T: Serialize>(value: &T) -> String {
    sha256_hex(&serde_json::to_vec(value).expect("settings serialize"))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub generator: GeneratorConfig,
    pub index: usize,
    pub adjacency: AdjacencyMatrix,
    pub system: InterconnectedSystem,
    pub rescale_factors: Vec<f64>,
    pub report: ConditionReport,
}

impl InstanceFile {
    pub fn new(generator: &GeneratorConfig, inst: GeneratedInstance) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            generator: generator.clone(),
            index: inst.index,
            adjacency: inst.adjacency,
            system: inst.system,
            rescale_factors: inst.rescale_factors,
            report: inst.report,
        }
    }

    pub fn file_name(index: usize) -> String {
        format!("instance_{index}.json")
    }

    pub fn read(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let (file, bytes): (Self, _) = read_json(path)?;
        check_schema(Some(file.schema_version), path)?;
        Ok((file, bytes))
    }
}

/// Wall-clock breakdown in milliseconds. `total_ms` covers the whole command
/// and so bounds the sum of the build and solve parts.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub build_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FillSummary {
    pub mean_ratio: f64,
    pub max_ratio: f64,
    /// Records whose solve went through the sparse factorization.
    pub samples: usize,
}

impl FillSummary {
    pub fn from_records(records: &[FrequencyRecord]) -> Option<Self> {
        let ratios: Vec<f64> = records.iter().filter_map(|r| r.fill_ratio).collect();
        if ratios.is_empty() {
            return None;
        }
        Some(Self {
            mean_ratio: ratios.iter().sum::<f64>() / ratios.len() as f64,
            max_ratio: ratios.iter().copied().fold(0.0, f64::max),
            samples: ratios.len(),
        })
    }
}

/// Per-form result of an analysis run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormOutcome {
    pub form: LmiForm,
    pub verdict: Option<Verdict>,
    /// Set when the form could not be analyzed at all.
    pub error: Option<String>,
    pub certificate: Option<String>,
    pub records: Vec<FrequencyRecord>,
    pub timing: Timing,
    pub fill: Option<FillSummary>,
}

/// One line per generated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub index: usize,
    pub file: String,
    pub conditions_pass: bool,
    pub rescaled: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    /// SHA-256 of the config file, or of the instance file and flags.
    pub config_hash: String,
    pub seed: Option<u64>,
    pub grid: Vec<Frequency>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub instances: Vec<InstanceSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outcomes: Vec<FormOutcome>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub artifacts: Vec<String>,
    pub timing: Timing,
    pub fill: Option<FillSummary>,
    pub verdict: Option<Verdict>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        config_hash: String,
        seed: Option<u64>,
        grid: Vec<Frequency>,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            config_hash,
            seed,
            grid,
            instances: Vec::new(),
            outcomes: Vec::new(),
            artifacts: Vec::new(),
            timing: Timing::default(),
            fill: None,
            verdict: None,
        }
    }

    pub const FILE_NAME: &'static str = "manifest.json";

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(Self::FILE_NAME);
        write_json(&path, self)?;
        Ok(path)
    }
}
