use std::path::Path;

use sparsiqc::analysis::build_lmi;
use sparsiqc::lmi::{export_sdpa, LmiForm};
use sparsiqc::lti::Frequency;

use crate::error::CliError;
use crate::files::InstanceFile;

pub fn run(instance: &Path, w: Frequency, form: LmiForm, out: &Path) -> Result<String, CliError> {
    let (file, _) = InstanceFile::read(instance)?;
    let problem = build_lmi(&file.system, w, form)?;
    export_sdpa(&problem, out)?;
    Ok(format!(
        "wrote {form} problem at w = {w}: order {}, {} variables -> {}",
        problem.order(),
        problem.m(),
        out.display()
    ))
}
