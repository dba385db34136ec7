use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::AdjacencyMatrix;

/// `P(k) = k^-alpha / sum_{j=1}^{kmax} j^-alpha` for `k = 1..=kmax`; entry
/// `k - 1` holds `P(k)`.
pub fn truncated_power_law(kmax: usize, alpha: f64) -> Vec<f64> {
    let raw: Vec<f64> = (1..=kmax).map(|k| (k as f64).powf(-alpha)).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / z).collect()
}

/// Node degrees of an undirected simple graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSequence(Vec<usize>);

impl DegreeSequence {
    pub fn new(degrees: Vec<usize>) -> Self {
        Self(degrees)
    }

    /// Draws `n` degrees from the power law truncated to `[1, n - 1]`, then
    /// moves single units between random nodes until the sum is `2n - 2`.
    /// Requires `n >= 2` and `alpha > 1`.
    pub fn sample<R: Rng>(n: usize, alpha: f64, rng: &mut R) -> Self {
        assert!(n >= 2, "a tree degree sequence needs at least two nodes");
        let dist =
            WeightedIndex::new(truncated_power_law(n - 1, alpha)).expect("weights are positive");
        let mut deg: Vec<usize> = (0..n).map(|_| dist.sample(rng) + 1).collect();
        let target = 2 * n - 2;
        let mut sum: usize = deg.iter().sum();
        while sum != target {
            let (pick, delta): (Vec<usize>, isize) = if sum > target {
                ((0..n).filter(|&i| deg[i] > 1).collect(), -1)
            } else {
                ((0..n).filter(|&i| deg[i] < n - 1).collect(), 1)
            };
            let i = pick[rng.gen_range(0..pick.len())];
            deg[i] = deg[i]
                .checked_add_signed(delta)
                .expect("degree stays positive");
            sum = sum.checked_add_signed(delta).expect("sum stays positive");
        }
        Self(deg)
    }

    pub fn degrees(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    /// Erdos-Gallai test.
    pub fn is_graphical(&self) -> bool {
        let mut d = self.0.clone();
        if d.iter().sum::<usize>() % 2 == 1 {
            return false;
        }
        d.sort_unstable_by(|a, b| b.cmp(a));
        let n = d.len();
        let mut lhs = 0;
        for k in 1..=n {
            lhs += d[k - 1];
            let rhs = k * (k - 1) + d[k..].iter().map(|&x| x.min(k)).sum::<usize>();
            if lhs > rhs {
                return false;
            }
        }
        true
    }

    /// Positive degrees summing to `2n - 2`: exactly the degree sequences of
    /// trees on `n >= 2` nodes.
    pub fn is_tree_sequence(&self) -> bool {
        let n = self.0.len();
        n >= 2 && self.0.iter().all(|&d| d >= 1) && self.sum() == 2 * n - 2
    }

    /// Tree with these degrees: each node `i` appears `degree(i) - 1` times in
    /// a shuffled Pruefer sequence, which is then decoded.
    pub fn realize_tree<R: Rng>(&self, rng: &mut R) -> Option<AdjacencyMatrix> {
        if !self.is_tree_sequence() {
            return None;
        }
        let n = self.0.len();
        let mut code: Vec<usize> = (0..n)
            .flat_map(|i| std::iter::repeat_n(i, self.0[i] - 1))
            .collect();
        code.shuffle(rng);
        let mut remaining = self.0.clone();
        let mut leaves: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&i| remaining[i] == 1).map(Reverse).collect();
        let mut edges = Vec::with_capacity(n - 1);
        for &x in &code {
            let Reverse(leaf) = leaves.pop().expect("a Pruefer code always leaves a leaf");
            edges.push((leaf, x));
            remaining[x] -= 1;
            if remaining[x] == 1 {
                leaves.push(Reverse(x));
            }
        }
        let Reverse(a) = leaves.pop()?;
        let Reverse(b) = leaves.pop()?;
        edges.push((a, b));
        AdjacencyMatrix::from_edges(n, edges).ok()
    }
}

pub(crate) fn sample_tree<R: Rng>(n: usize, alpha: f64, rng: &mut R) -> AdjacencyMatrix {
    DegreeSequence::sample(n, alpha, rng)
        .realize_tree(rng)
        .expect("sampled sequences are tree sequences")
}

/// Scale-free tree on `n >= 2` nodes with exponent `alpha > 1`, deterministic
/// in `seed`.
pub fn sample_scale_free(n: usize, alpha: f64, seed: u64) -> AdjacencyMatrix {
    sample_tree(n, alpha, &mut ChaCha8Rng::seed_from_u64(seed))
}
