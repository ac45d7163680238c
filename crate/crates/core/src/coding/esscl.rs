//! Expected structure-sensitive code length for general partition structures.

use serde::Serialize;

use super::CodeTree;
use crate::alphabet::Distribution;
use crate::concordance::{d_hat, BinarySplit};
use crate::error::{Error, Result};
use crate::notions::h_s;
use crate::structure::{PartitionStructure, StructureSource};

/// Merit earned by one internal node of a code tree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeMerit {
    /// Bit string from the root to the node.
    pub path: String,
    /// `P(A_i)`.
    pub mass: f64,
    /// `d^i`: the concordance distance between the node's two sides after
    /// conditioning on the node. Zero at nodes of zero mass and at splits
    /// with all mass on one side.
    pub merit: f64,
}

/// ESSCL of a code tree together with its per-node and per-letter terms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EssclReport {
    /// `Σ_i P(A_i) d^i`.
    pub total: f64,
    pub nodes: Vec<NodeMerit>,
    /// `CL(a)`: the sum of merits on the path to each letter.
    pub letter_lengths: Vec<f64>,
}

impl EssclReport {
    /// `Σ_a P(a) CL(a)`, which equals `total`.
    pub fn letterwise_total(&self, p: &Distribution) -> f64 {
        self.letter_lengths
            .iter()
            .zip(p.probs())
            .map(|(l, q)| l * q)
            .sum()
    }
}

/// Expected structure-sensitive code length of `code` under `(P, Ŝ)`.
pub fn esscl(code: &CodeTree, p: &Distribution, s: &dyn StructureSource) -> Result<EssclReport> {
    p.alphabet()
        .ensure_same(s.alphabet(), "distribution and structure")?;
    let n = code.alphabet_len();
    if p.len() != n {
        return Err(Error::AlphabetMismatch(format!(
            "code tree on {n} letters, distribution on {}",
            p.len()
        )));
    }
    let mut nodes = Vec::new();
    let mut failure = None;
    code.for_each_internal(&mut |path, l, r| {
        if failure.is_some() {
            return;
        }
        let (x, y) = (l.leaves(), r.leaves());
        let mass = p.mass(&x) + p.mass(&y);
        let merit = if mass <= 0.0 {
            0.0
        } else {
            let split = BinarySplit::new(n, &x, &y).expect("code tree sides are disjoint");
            match d_hat(&split, s, p) {
                Ok(d) => d,
                Err(Error::DegenerateSplit) => 0.0,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        };
        nodes.push(NodeMerit {
            path: path.to_string(),
            mass,
            merit,
        });
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let total = nodes.iter().map(|m| m.mass * m.merit).sum();
    let words = code.codewords();
    let letter_lengths = words
        .iter()
        .map(|w| {
            (0..w.len())
                .map(|k| {
                    let prefix = &w[..k];
                    nodes
                        .iter()
                        .find(|m| m.path == prefix)
                        .map_or(0.0, |m| m.merit)
                })
                .sum()
        })
        .collect();
    Ok(EssclReport {
        total,
        nodes,
        letter_lengths,
    })
}

/// ESSCL per symbol of block coding versus `H_S`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypicalCompression {
    pub block_length: usize,
    pub esscl: f64,
    pub esscl_per_symbol: f64,
    pub h_s: f64,
}

/// Codes blocks of `m` letters with the balanced tree over `A^m` (in
/// lexicographic order) and the product structure `Ŝ^m`.
///
/// Only the regime where every block is equally likely is supported: `P`
/// uniform and `|A|` a power of two. There every split of the balanced tree
/// halves the remaining mass, and ESSCL per symbol equals `H_S` exactly.
pub fn typical_compression_check(
    p: &Distribution,
    s: &PartitionStructure,
    m: usize,
) -> Result<TypicalCompression> {
    p.alphabet()
        .ensure_same(s.alphabet(), "distribution and structure")?;
    if m == 0 {
        return Err(Error::Validation("block length must be at least 1".into()));
    }
    let n = p.len();
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::UnsupportedRegime(format!(
            "alphabet size {n} is not a power of two"
        )));
    }
    let u = 1.0 / n as f64;
    if p.probs().iter().any(|&q| (q - u).abs() > 1e-12) {
        return Err(Error::UnsupportedRegime(
            "distribution is not uniform".into(),
        ));
    }
    if !s.is_normalized() {
        return Err(Error::NotNormalized(format!(
            "structure has total measure {}",
            s.total_measure()
        )));
    }
    let block_p = p.power(m)?;
    let block_s = s.power(m)?;
    let code = CodeTree::balanced(block_p.len())?;
    let report = esscl(&code, &block_p, &block_s)?;
    Ok(TypicalCompression {
        block_length: m,
        esscl: report.total,
        esscl_per_symbol: report.total / m as f64,
        h_s: h_s(p, s)?,
    })
}
