use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ModelError;

/// Sparse 0-1 matrix `Gamma` with `w = Gamma z`.
///
/// Rows are stacked subsystem inputs (block sizes `m_i`), columns stacked
/// outputs (block sizes `l_i`). Row `r` is either unconnected or driven by the
/// single output `source[r]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Wire", into = "Wire")]
pub struct InterconnectionMatrix {
    row_blocks: Vec<usize>,
    col_blocks: Vec<usize>,
    row_offsets: Vec<usize>,
    col_offsets: Vec<usize>,
    source: Vec<Option<usize>>,
}

fn offsets(blocks: &[usize]) -> Vec<usize> {
    let mut o = Vec::with_capacity(blocks.len() + 1);
    o.push(0);
    for &b in blocks {
        o.push(o.last().unwrap() + b);
    }
    o
}

impl InterconnectionMatrix {
    /// `entries` are `(row, col)` positions of the ones.
    pub fn new(
        row_blocks: Vec<usize>,
        col_blocks: Vec<usize>,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ModelError> {
        if row_blocks.len() != col_blocks.len() {
            return Err(ModelError::InvalidInterconnection(format!(
                "{} row blocks but {} column blocks",
                row_blocks.len(),
                col_blocks.len()
            )));
        }
        let row_offsets = offsets(&row_blocks);
        let col_offsets = offsets(&col_blocks);
        let (rows, cols) = (*row_offsets.last().unwrap(), *col_offsets.last().unwrap());
        let mut source = vec![None; rows];
        for (r, c) in entries {
            if r >= rows || c >= cols {
                return Err(ModelError::InvalidInterconnection(format!(
                    "entry ({r}, {c}) outside {rows}x{cols}"
                )));
            }
            if source[r].replace(c).is_some() {
                return Err(ModelError::InvalidInterconnection(format!(
                    "row {r} has more than one nonzero"
                )));
            }
        }
        Ok(Self {
            row_blocks,
            col_blocks,
            row_offsets,
            col_offsets,
            source,
        })
    }

    /// No connections at all.
    pub fn zero(row_blocks: Vec<usize>, col_blocks: Vec<usize>) -> Result<Self, ModelError> {
        Self::new(row_blocks, col_blocks, [])
    }

    pub fn rows(&self) -> usize {
        self.source.len()
    }

    pub fn cols(&self) -> usize {
        *self.col_offsets.last().unwrap()
    }

    pub fn blocks(&self) -> usize {
        self.row_blocks.len()
    }

    pub fn row_blocks(&self) -> &[usize] {
        &self.row_blocks
    }

    pub fn col_blocks(&self) -> &[usize] {
        &self.col_blocks
    }

    /// Offsets of each subsystem's inputs; length `N + 1`.
    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    /// Offsets of each subsystem's outputs; length `N + 1`.
    pub fn col_offsets(&self) -> &[usize] {
        &self.col_offsets
    }

    pub fn source(&self, row: usize) -> Option<usize> {
        self.source[row]
    }

    /// `(block, local index)` of a global output column.
    pub fn col_owner(&self, col: usize) -> (usize, usize) {
        let b = self.col_offsets.partition_point(|&o| o <= col) - 1;
        (b, col - self.col_offsets[b])
    }

    /// `(block, local index)` of a global input row.
    pub fn row_owner(&self, row: usize) -> (usize, usize) {
        let b = self.row_offsets.partition_point(|&o| o <= row) - 1;
        (b, row - self.row_offsets[b])
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.source[row] == Some(col)
    }

    pub fn nnz(&self) -> usize {
        self.source.iter().flatten().count()
    }

    /// `(row, col)` of every one, by row.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.source
            .iter()
            .enumerate()
            .filter_map(|(r, c)| c.map(|c| (r, c)))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.rows(), self.cols());
        for (r, c) in self.entries() {
            g[(r, c)] = 1.0;
        }
        g
    }

    /// Largest singular value. `Gamma^T Gamma` is diagonal with the column
    /// counts on its diagonal, so this is exact.
    pub fn gamma(&self) -> f64 {
        let mut counts = vec![0usize; self.cols()];
        for (_, c) in self.entries() {
            counts[c] += 1;
        }
        (counts.into_iter().max().unwrap_or(0) as f64).sqrt()
    }

    /// Square with exactly one nonzero per row and per column.
    pub fn is_permutation(&self) -> bool {
        if self.rows() != self.cols() {
            return false;
        }
        let mut seen = vec![false; self.cols()];
        for s in &self.source {
            match s {
                Some(c) if !seen[*c] => seen[*c] = true,
                _ => return false,
            }
        }
        true
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows() == self.cols() && self.entries().all(|(r, c)| self.get(c, r))
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    rows: usize,
    cols: usize,
    row_blocks: Vec<usize>,
    col_blocks: Vec<usize>,
    /// Coordinate list of `[row, col, value]` with value 1.
    entries: Vec<(usize, usize, u8)>,
}

impl From<InterconnectionMatrix> for Wire {
    fn from(g: InterconnectionMatrix) -> Self {
        Wire {
            rows: g.rows(),
            cols: g.cols(),
            entries: g.entries().map(|(r, c)| (r, c, 1)).collect(),
            row_blocks: g.row_blocks,
            col_blocks: g.col_blocks,
        }
    }
}

impl TryFrom<Wire> for InterconnectionMatrix {
    type Error = ModelError;

    fn try_from(w: Wire) -> Result<Self, ModelError> {
        if let Some(&(r, c, v)) = w.entries.iter().find(|e| e.2 != 1) {
            return Err(ModelError::InvalidInterconnection(format!(
                "entry ({r}, {c}) has value {v}, expected 1"
            )));
        }
        let g = Self::new(
            w.row_blocks,
            w.col_blocks,
            w.entries.into_iter().map(|(r, c, _)| (r, c)),
        )?;
        if g.rows() != w.rows || g.cols() != w.cols {
            return Err(ModelError::InvalidInterconnection(format!(
                "declared {}x{} but blocks give {}x{}",
                w.rows,
                w.cols,
                g.rows(),
                g.cols()
            )));
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_two_ones_in_a_row() {
        assert!(InterconnectionMatrix::new(vec![1, 1], vec![1, 1], [(0, 1), (0, 0)]).is_err());
        assert!(InterconnectionMatrix::new(vec![1], vec![1], [(0, 1)]).is_err());
    }

    #[test]
    fn gamma_counts_column_fan_out() {
        let g = InterconnectionMatrix::new(vec![1, 1, 1], vec![1, 1, 1], [(0, 1), (1, 0), (2, 0)])
            .unwrap();
        assert!((g.gamma() - 2f64.sqrt()).abs() < 1e-15);
        let svd = g.to_dense().svd(false, false);
        assert!((svd.singular_values.max() - g.gamma()).abs() < 1e-12);
        assert!(!g.is_permutation());
    }

    #[test]
    fn owners() {
        let g = InterconnectionMatrix::zero(vec![1, 2, 0, 1], vec![2, 0, 1, 1]).unwrap();
        assert_eq!(g.row_owner(0), (0, 0));
        assert_eq!(g.row_owner(2), (1, 1));
        assert_eq!(g.row_owner(3), (3, 0));
        assert_eq!(g.col_owner(1), (0, 1));
        assert_eq!(g.col_owner(2), (2, 0));
    }

    #[test]
    fn json_triplets() {
        let g = InterconnectionMatrix::new(vec![1, 1], vec![1, 1], [(0, 1), (1, 0)]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains(r#""entries":[[0,1,1],[1,0,1]]"#));
        assert_eq!(
            serde_json::from_str::<InterconnectionMatrix>(&s).unwrap(),
            g
        );
        let bad = s.replace("[0,1,1]", "[0,1,2]");
        assert!(serde_json::from_str::<InterconnectionMatrix>(&bad).is_err());
    }
}
