//! Set partitions of an alphabet stored in canonical form.

use std::fmt;

use crate::error::{Error, Result};

/// A partition of the letter indices `0..n`.
///
/// Stored as a restricted growth string: letter `a` belongs to block
/// `labels[a]`, and blocks are numbered in order of their smallest member.
/// Two partitions with the same blocks therefore compare equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    labels: Vec<u32>,
    blocks: usize,
}

impl Partition {
    /// Builds a partition from arbitrary block labels, one per letter.
    pub fn from_labels<L: Copy + Eq + std::hash::Hash>(labels: &[L]) -> Self {
        let mut map = std::collections::HashMap::new();
        let mut out = Vec::with_capacity(labels.len());
        for &l in labels {
            let next = map.len() as u32;
            out.push(*map.entry(l).or_insert(next));
        }
        Partition {
            labels: out,
            blocks: map.len(),
        }
    }

    /// Builds a partition of `0..n` from its components.
    pub fn from_components(n: usize, components: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (c, comp) in components.iter().enumerate() {
            if comp.is_empty() {
                return Err(Error::PartitionMismatch("empty component".into()));
            }
            for &a in comp {
                if a >= n {
                    return Err(Error::PartitionMismatch(format!(
                        "letter index {a} outside alphabet of size {n}"
                    )));
                }
                if labels[a] != usize::MAX {
                    return Err(Error::PartitionMismatch(format!(
                        "letter index {a} appears in two components"
                    )));
                }
                labels[a] = c;
            }
        }
        if let Some(a) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::PartitionMismatch(format!(
                "letter index {a} is not covered"
            )));
        }
        Ok(Self::from_labels(&labels))
    }

    /// The partition of `n` letters into singletons.
    pub fn singletons(n: usize) -> Self {
        Partition {
            labels: (0..n as u32).collect(),
            blocks: n,
        }
    }

    /// The one-block partition of `n` letters.
    pub fn whole(n: usize) -> Self {
        Partition {
            labels: vec![0; n],
            blocks: usize::from(n > 0),
        }
    }

    /// Two-block partition with `side` as one block.
    pub fn binary(n: usize, side: &[usize]) -> Result<Self> {
        let mut labels = vec![1u8; n];
        for &a in side {
            if a >= n {
                return Err(Error::InvalidSplit(format!(
                    "letter index {a} out of range"
                )));
            }
            labels[a] = 0;
        }
        let p = Self::from_labels(&labels);
        if p.blocks != 2 {
            return Err(Error::InvalidSplit("both sides must be non-empty".into()));
        }
        Ok(p)
    }

    /// Size of the underlying alphabet.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of components (the cardinality `|s|`).
    pub fn num_blocks(&self) -> usize {
        self.blocks
    }

    pub fn block_of(&self, a: usize) -> usize {
        self.labels[a] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Components as sorted letter lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.blocks];
        for (a, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(a);
        }
        out
    }

    /// True when `a` and `b` fall in different components.
    pub fn separates(&self, a: usize, b: usize) -> bool {
        self.labels[a] != self.labels[b]
    }

    fn check_same(&self, other: &Partition) -> Result<()> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(format!(
                "partitions of {} and {} letters",
                self.len(),
                other.len()
            )))
        }
    }

    /// The common refinement `s ∩ t`: all non-empty pairwise intersections.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        self.check_same(other)?;
        let pairs: Vec<(u32, u32)> = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(&a, &b)| (a, b))
            .collect();
        Ok(Self::from_labels(&pairs))
    }

    /// True iff every component of `self` lies inside a component of `other`.
    pub fn refines(&self, other: &Partition) -> Result<bool> {
        self.check_same(other)?;
        let mut target = vec![u32::MAX; self.blocks];
        for (&l, &m) in self.labels.iter().zip(&other.labels) {
            let t = &mut target[l as usize];
            if *t == u32::MAX {
                *t = m;
            } else if *t != m {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The partition `s|B` of the sub-alphabet `B` (indices renumbered to
    /// positions within the sorted subset).
    pub fn restrict(&self, subset: &[usize]) -> Partition {
        let labels: Vec<u32> = subset.iter().map(|&a| self.labels[a]).collect();
        Self::from_labels(&labels)
    }

    /// Product partition `s × t` on `A × B`; letter `(a, b)` sits at index
    /// `a * |B| + b` and its component is the pair of components.
    pub fn product(&self, other: &Partition) -> Partition {
        let kb = other.blocks as u32;
        let mut labels = Vec::with_capacity(self.len() * other.len());
        for &la in &self.labels {
            for &lb in &other.labels {
                labels.push(la * kb + lb);
            }
        }
        Self::from_labels(&labels)
    }

    /// Sums `weights` over each component.
    pub fn reduce(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.blocks];
        for (&l, &w) in self.labels.iter().zip(weights) {
            out[l as usize] += w;
        }
        out
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.components().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c:?}")?;
        }
        write!(f, "}}")
    }
}
