//! Random instances for simulations and property checks.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution as _, Exp1};

use crate::alphabet::{Alphabet, Distribution, JointDistribution};
use crate::coding::{CodeNode, CodeTree};
use crate::error::Result;
use crate::partition::Partition;
use crate::structure::PartitionStructure;

/// A draw from the flat Dirichlet distribution on `n` letters.
pub fn flat_dirichlet<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

/// A flat-Dirichlet distribution on `alphabet`.
pub fn random_distribution<R: Rng + ?Sized>(
    alphabet: Alphabet,
    rng: &mut R,
) -> Result<Distribution> {
    let n = alphabet.len();
    Distribution::new_renormalized(alphabet, flat_dirichlet(n, rng))
}

/// Like [`random_distribution`], but each letter is zeroed with probability
/// `zero_rate` (at least one letter keeps positive mass).
pub fn random_sparse_distribution<R: Rng + ?Sized>(
    alphabet: Alphabet,
    zero_rate: f64,
    rng: &mut R,
) -> Result<Distribution> {
    let n = alphabet.len();
    let mut w = flat_dirichlet(n, rng);
    let keep = rng.random_range(0..n);
    for (i, x) in w.iter_mut().enumerate() {
        if i != keep && rng.random::<f64>() < zero_rate {
            *x = 0.0;
        }
    }
    Distribution::new_renormalized(alphabet, w)
}

/// A joint distribution with flat-Dirichlet cell probabilities.
pub fn random_joint<R: Rng + ?Sized>(
    rows: Alphabet,
    cols: Alphabet,
    rng: &mut R,
) -> Result<JointDistribution> {
    let cells = flat_dirichlet(rows.len() * cols.len(), rng);
    JointDistribution::new(rows, cols, cells)
}

/// A partition of `0..n` (`n ≥ 2`) with at least two blocks.
pub fn random_partition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Partition {
    assert!(n >= 2, "a partition with two blocks needs two letters");
    loop {
        let k = rng.random_range(2..=n);
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let s = Partition::from_labels(&labels);
        if s.num_blocks() >= 2 {
            return s;
        }
    }
}

/// A normalized structure of up to `max_terms` random partitions with
/// flat-Dirichlet measures (coinciding partitions are merged).
pub fn random_structure<R: Rng + ?Sized>(
    alphabet: Alphabet,
    max_terms: usize,
    rng: &mut R,
) -> Result<PartitionStructure> {
    let n = alphabet.len();
    let k = rng.random_range(1..=max_terms.max(1));
    let measures = flat_dirichlet(k, rng);
    let terms = measures
        .into_iter()
        .map(|m| (random_partition(n, rng), m))
        .collect();
    Ok(PartitionStructure::merged(alphabet, terms))
}

/// A binary code tree on `0..n` built by recursively cutting a shuffled
/// letter list at a uniform position.
pub fn random_code_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CodeTree> {
    fn build<R: Rng + ?Sized>(letters: &[usize], rng: &mut R) -> CodeNode {
        if letters.len() == 1 {
            return CodeNode::Leaf(letters[0]);
        }
        let cut = rng.random_range(1..letters.len());
        CodeNode::branch(build(&letters[..cut], rng), build(&letters[cut..], rng))
    }
    let mut letters: Vec<usize> = (0..n).collect();
    letters.shuffle(rng);
    if letters.is_empty() {
        return CodeTree::balanced(0);
    }
    CodeTree::new(n, build(&letters, rng))
}
