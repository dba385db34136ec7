use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{LmiError, SdpFeasibilityProblem};
use crate::sparse::SymSparse;

/// Contents of a single-block SDPA sparse file: matrix 0 is `W`, matrices
/// `1..=m` are the `Q_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpaData {
    pub b: Vec<f64>,
    pub w: SymSparse,
    pub q: Vec<SymSparse>,
}

/// Writes `m`, the block count (always 1), the block size, `b`, and then one
/// `matno 1 i j value` line per upper-triangle nonzero with 1-based indices.
/// Values use Rust's shortest round-trip formatting.
pub fn write_sdpa<W: Write>(problem: &SdpFeasibilityProblem, out: W) -> Result<(), LmiError> {
    let mut out = BufWriter::new(out);
    writeln!(out, "{}", problem.m())?;
    writeln!(out, "1")?;
    writeln!(out, "{}", problem.order())?;
    let b: Vec<String> = problem.b().iter().map(|v| format!("{v:?}")).collect();
    writeln!(out, "{}", b.join(" "))?;
    for (k, mat) in std::iter::once(problem.w()).chain(problem.q()).enumerate() {
        for &(r, c, v) in mat.entries() {
            writeln!(out, "{k} 1 {} {} {v:?}", c + 1, r + 1)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn export_sdpa(problem: &SdpFeasibilityProblem, path: &Path) -> Result<(), LmiError> {
    write_sdpa(problem, File::create(path)?)
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T, LmiError> {
    let tok = tok.ok_or_else(|| LmiError::Parse(format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| LmiError::Parse(format!("bad {what}: {tok:?}")))
}

/// Reads the single-block files produced by [`write_sdpa`]. Comment lines
/// starting with `"` or `*` are skipped, `,{}()` count as separators and
/// anything after `=` on a line is ignored.
pub fn read_sdpa<R: Read>(input: R) -> Result<SdpaData, LmiError> {
    let mut text = String::new();
    for line in BufReader::new(input).lines() {
        let line = line?;
        let t = line.trim_start();
        if t.starts_with('"') || t.starts_with('*') {
            continue;
        }
        // Header lines may carry trailing `= name` annotations.
        text.push_str(line.split('=').next().unwrap_or(""));
        text.push('\n');
    }
    let cleaned: String = text
        .chars()
        .map(|c| if ",{}()".contains(c) { ' ' } else { c })
        .collect();
    let mut toks = cleaned.split_whitespace();
    let m: usize = parse(toks.next(), "m")?;
    let nblocks: usize = parse(toks.next(), "block count")?;
    if nblocks != 1 {
        return Err(LmiError::Parse(format!(
            "expected one block, found {nblocks}"
        )));
    }
    let size: i64 = parse(toks.next(), "block size")?;
    if size <= 0 {
        return Err(LmiError::Parse(format!("unsupported block size {size}")));
    }
    let n = size as usize;
    let b = (0..m)
        .map(|_| parse(toks.next(), "b entry"))
        .collect::<Result<Vec<f64>, _>>()?;
    let mut triplets: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); m + 1];
    while let Some(first) = toks.next() {
        let k: usize = parse(Some(first), "matrix number")?;
        let blk: usize = parse(toks.next(), "block number")?;
        let i: usize = parse(toks.next(), "row")?;
        let j: usize = parse(toks.next(), "column")?;
        let v: f64 = parse(toks.next(), "value")?;
        if k > m || blk != 1 || i == 0 || j == 0 || i > n || j > n {
            return Err(LmiError::Parse(format!(
                "entry {k} {blk} {i} {j} out of range"
            )));
        }
        triplets[k].push((i - 1, j - 1, v));
    }
    let mut mats = triplets
        .into_iter()
        .map(|t| SymSparse::from_triplets(n, t))
        .collect::<Result<Vec<_>, _>>()?;
    let w = mats.remove(0);
    Ok(SdpaData { b, w, q: mats })
}
