//! JSON formats for distributions, joint distributions and partition
//! structures.
//!
//! ```json
//! {"alphabet": ["a", "b"], "probs": [0.3, 0.7]}
//! {"rows": ["x", "y"], "cols": ["a", "b"], "probs": [[0.1, 0.2], [0.3, 0.4]]}
//! {"alphabet": ["a", "b", "c"],
//!  "partitions": [{"measure": 1.0, "components": [["a"], ["b", "c"]]}]}
//! ```

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Distribution, JointDistribution};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::structure::PartitionStructure;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionJson {
    pub alphabet: Vec<String>,
    pub probs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointJson {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub probs: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionJson {
    pub measure: f64,
    pub components: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureJson {
    pub alphabet: Vec<String>,
    pub partitions: Vec<PartitionJson>,
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::parse(
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

/// Parses a distribution; with `renormalize` any positive total is accepted
/// and rescaled, otherwise the total must be 1 within `1e-9`.
pub fn parse_distribution(text: &str, renormalize: bool) -> Result<Distribution> {
    let raw: DistributionJson = from_json(text)?;
    let alphabet = Alphabet::new(raw.alphabet)?;
    if renormalize {
        Distribution::new_renormalized(alphabet, raw.probs)
    } else {
        Distribution::new(alphabet, raw.probs)
    }
}

pub fn distribution_to_json(p: &Distribution) -> String {
    to_json(&DistributionJson {
        alphabet: p.alphabet().letters().to_vec(),
        probs: p.probs().to_vec(),
    })
}

pub fn parse_joint(text: &str) -> Result<JointDistribution> {
    let raw: JointJson = from_json(text)?;
    let rows = Alphabet::new(raw.rows)?;
    let cols = Alphabet::new(raw.cols)?;
    if raw.probs.len() != rows.len() || raw.probs.iter().any(|r| r.len() != cols.len()) {
        return Err(Error::Validation(format!(
            "joint matrix must be {}x{}",
            rows.len(),
            cols.len()
        )));
    }
    JointDistribution::new(rows, cols, raw.probs.into_iter().flatten().collect())
}

pub fn joint_to_json(j: &JointDistribution) -> String {
    let m = j.cols().len();
    to_json(&JointJson {
        rows: j.rows().letters().to_vec(),
        cols: j.cols().letters().to_vec(),
        probs: j.probs().chunks(m).map(|r| r.to_vec()).collect(),
    })
}

/// Parses a partition structure. When `on` is given, the file's alphabet
/// must hold the same letters (in any order) and the structure is built on
/// `on`'s letter order.
pub fn parse_structure(text: &str, on: Option<&Alphabet>) -> Result<PartitionStructure> {
    let raw: StructureJson = from_json(text)?;
    let own = Alphabet::new(raw.alphabet)?;
    let alphabet = match on {
        Some(a) => {
            let mut x: Vec<&String> = own.letters().iter().collect();
            let mut y: Vec<&String> = a.letters().iter().collect();
            x.sort();
            y.sort();
            if x != y {
                return Err(Error::AlphabetMismatch(
                    "structure alphabet differs from the distribution's".into(),
                ));
            }
            a.clone()
        }
        None => own,
    };
    let mut terms = Vec::with_capacity(raw.partitions.len());
    for (k, part) in raw.partitions.iter().enumerate() {
        let comps = part
            .components
            .iter()
            .map(|c| {
                c.iter()
                    .map(|l| alphabet.index_of(l))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let s = Partition::from_components(alphabet.len(), &comps)
            .map_err(|e| Error::Validation(format!("partition {k}: {e}")))?;
        terms.push((s, part.measure));
    }
    PartitionStructure::new(alphabet, terms)
}

pub fn structure_to_json(s: &PartitionStructure) -> String {
    let a = s.alphabet();
    to_json(&StructureJson {
        alphabet: a.letters().to_vec(),
        partitions: s
            .terms()
            .iter()
            .map(|(p, m)| PartitionJson {
                measure: *m,
                components: p
                    .components()
                    .iter()
                    .map(|c| c.iter().map(|&i| a.letter(i).to_string()).collect())
                    .collect(),
            })
            .collect(),
    })
}
