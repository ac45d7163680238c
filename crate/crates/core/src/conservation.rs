//! Positional conservation of alignment columns scored with `H_U` over an
//! ultrametric tree of amino acids.

use rayon::prelude::*;
use serde::Serialize;

use crate::alphabet::{Alphabet, Distribution};
use crate::entropy::entropy;
use crate::error::{Error, Result};
use crate::io::alignment::{Alignment, AMINO_ACIDS};
use crate::ultrametric::{DistanceMatrix, UltrametricTree};

/// Leaf label used for the gap in [`GapMode::ExtraLetter`].
pub const GAP_LETTER: &str = "-";

/// Default coverage below which a column is flagged.
pub const DEFAULT_COVERAGE_THRESHOLD: f64 = 0.5;

/// How gaps enter the column distribution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapMode {
    /// Drop gapped rows and renormalize over the residues.
    #[default]
    Skip,
    /// Treat the gap as a letter. If the tree has no `-` leaf, one is
    /// attached below the root, at maximal distance from every amino acid.
    ExtraLetter,
}

/// Scores of one alignment column. Scores are `None` when the column has no
/// residue to score (all gaps under [`GapMode::Skip`]).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColumnScore {
    pub index: usize,
    /// Fraction of rows holding a residue rather than a gap.
    pub coverage: f64,
    pub h_u: Option<f64>,
    /// Classical entropy of the column.
    pub h: Option<f64>,
    /// Classical entropy after merging letters into the top-level clusters
    /// of the tree (the root's natural partition).
    pub h_reduced: Option<f64>,
    /// Coverage is below the report's threshold.
    pub low_coverage: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservationReport {
    pub gap_mode: GapMode,
    pub coverage_threshold: f64,
    pub columns: Vec<ColumnScore>,
}

/// Adds a gap leaf at distance `root_height` from every other leaf.
fn with_gap_leaf(tree: &UltrametricTree) -> Result<UltrametricTree> {
    let d = tree.to_distance_matrix();
    let n = d.len();
    let mut letters = tree.alphabet().letters().to_vec();
    letters.push(GAP_LETTER.to_string());
    let height = tree.root_height();
    let extended = DistanceMatrix::from_fn(Alphabet::new(letters)?, |a, b| {
        if b == n {
            height
        } else {
            d.get(a, b)
        }
    })?;
    UltrametricTree::from_distance(&extended)
}

/// Scores every column of `aln` against `tree`.
///
/// Column frequencies are unweighted: every row counts once.
pub fn conservation_score(
    aln: &Alignment,
    tree: &UltrametricTree,
    gap_mode: GapMode,
    coverage_threshold: f64,
) -> Result<ConservationReport> {
    if !(0.0..=1.0).contains(&coverage_threshold) {
        return Err(Error::Validation(format!(
            "coverage threshold {coverage_threshold} outside [0, 1]"
        )));
    }
    let missing: Vec<char> = AMINO_ACIDS
        .chars()
        .filter(|c| tree.alphabet().index_of(&c.to_string()).is_err())
        .collect();
    if !missing.is_empty() {
        return Err(Error::AlphabetMismatch(format!(
            "tree has no leaf for amino acids {}",
            missing.iter().collect::<String>()
        )));
    }
    let augmented;
    let tree = match gap_mode {
        GapMode::ExtraLetter if tree.alphabet().index_of(GAP_LETTER).is_err() => {
            augmented = with_gap_leaf(tree)?;
            &augmented
        }
        _ => tree,
    };
    let alphabet = tree.alphabet();
    let mut lookup = [usize::MAX; 256];
    for c in AMINO_ACIDS.bytes() {
        lookup[c as usize] = alphabet.index_of(&(c as char).to_string())?;
    }
    if gap_mode == GapMode::ExtraLetter {
        lookup[b'-' as usize] = alphabet.index_of(GAP_LETTER)?;
    }
    let top = tree.natural_partition(tree.root());
    let rows = aln.num_rows() as f64;

    let columns = (0..aln.width())
        .into_par_iter()
        .map(|j| {
            let mut counts = vec![0.0; alphabet.len()];
            let mut residues = 0usize;
            for c in aln.column(j) {
                if c != b'-' {
                    residues += 1;
                }
                let k = lookup[c as usize];
                if k != usize::MAX {
                    counts[k] += 1.0;
                }
            }
            let coverage = residues as f64 / rows;
            let scored = counts.iter().sum::<f64>() > 0.0;
            let (h_u, h, h_reduced) = if scored {
                let p = Distribution::new_renormalized(alphabet.clone(), counts)?;
                let reduced: Vec<f64> = top.iter().map(|block| p.mass(block)).collect();
                (
                    Some(tree.hu(&p)?),
                    Some(p.entropy()),
                    Some(entropy(&reduced)),
                )
            } else {
                (None, None, None)
            };
            Ok(ColumnScore {
                index: j,
                coverage,
                h_u,
                h,
                h_reduced,
                low_coverage: coverage < coverage_threshold,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConservationReport {
        gap_mode,
        coverage_threshold,
        columns,
    })
}
