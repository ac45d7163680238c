//! Concordance between a binary split and a partition, the concordance
//! distance between two sets of letters, and the distance between letters
//! induced by a partition structure.

use crate::alphabet::{normalize_subset, Distribution};
use crate::entropy::{entropy, pairwise_sum};
use crate::error::{Error, Result};
use crate::notions::h_s;
use crate::partition::Partition;
use crate::structure::{restrict_source, PartitionStructure, StructureSource};
use crate::ultrametric::DistanceMatrix;

/// Two disjoint non-empty letter sets `{A_1, A_2}`.
///
/// When the sets do not cover the alphabet, every quantity is computed after
/// conditioning the probability and the structure on their union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinarySplit {
    n: usize,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl BinarySplit {
    pub fn new(n: usize, left: &[usize], right: &[usize]) -> Result<Self> {
        let left = normalize_subset(n, left).map_err(|e| Error::InvalidSplit(e.to_string()))?;
        let right = normalize_subset(n, right).map_err(|e| Error::InvalidSplit(e.to_string()))?;
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidSplit("both sides must be non-empty".into()));
        }
        if left.iter().any(|a| right.binary_search(a).is_ok()) {
            return Err(Error::InvalidSplit("sides overlap".into()));
        }
        Ok(BinarySplit { n, left, right })
    }

    /// The split `{side, complement}` of `0..n`.
    pub fn complementary(n: usize, side: &[usize]) -> Result<Self> {
        let side = normalize_subset(n, side)?;
        let rest: Vec<usize> = (0..n).filter(|a| side.binary_search(a).is_err()).collect();
        Self::new(n, &side, &rest)
    }

    /// The split given by a two-component partition.
    pub fn from_partition(t: &Partition) -> Result<Self> {
        let comps = t.components();
        if comps.len() != 2 {
            return Err(Error::InvalidSplit(format!(
                "expected 2 components, got {}",
                comps.len()
            )));
        }
        Self::new(t.len(), &comps[0], &comps[1])
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn alphabet_len(&self) -> usize {
        self.n
    }

    pub fn is_complementary(&self) -> bool {
        self.left.len() + self.right.len() == self.n
    }

    /// `A_1 ∪ A_2`, sorted.
    pub fn union(&self) -> Vec<usize> {
        let mut u: Vec<usize> = self.left.iter().chain(&self.right).copied().collect();
        u.sort_unstable();
        u
    }

    /// The split as a partition of its union (positions within the union).
    fn local_partition(&self, union: &[usize]) -> Partition {
        let labels: Vec<bool> = union
            .iter()
            .map(|a| self.left.binary_search(a).is_ok())
            .collect();
        Partition::from_labels(&labels)
    }
}

/// Everything needed to evaluate concordances of one split: the probability
/// conditioned on the split's union and the split's own entropy.
struct SplitContext {
    union: Vec<usize>,
    probs: Vec<f64>,
    t: Partition,
    h_t: f64,
}

impl SplitContext {
    fn new(split: &BinarySplit, p: &Distribution) -> Result<Self> {
        if split.alphabet_len() != p.len() {
            return Err(Error::AlphabetMismatch(format!(
                "split on {} letters, distribution on {}",
                split.alphabet_len(),
                p.len()
            )));
        }
        let union = split.union();
        let mass = p.mass(&union);
        if mass <= 0.0 {
            return Err(Error::DegenerateSplit);
        }
        let probs: Vec<f64> = union.iter().map(|&a| p.prob(a) / mass).collect();
        let t = split.local_partition(&union);
        let h_t = entropy(&t.reduce(&probs));
        if h_t <= 0.0 {
            return Err(Error::DegenerateSplit);
        }
        Ok(SplitContext {
            union,
            probs,
            t,
            h_t,
        })
    }

    /// `H(P^s) - H(P^{s∩t}) + H(P^t)` for `s` given on the full alphabet.
    fn defect(&self, s: &Partition) -> f64 {
        let local = s.restrict(&self.union);
        let h_s = entropy(&local.reduce(&self.probs));
        let joined = local.join(&self.t).expect("same local alphabet");
        let h_st = entropy(&joined.reduce(&self.probs));
        h_s - h_st + self.h_t
    }
}

/// Concordance `C(t, s) = [H(P^s) - H(P^{s∩t}) + H(P^t)] / H(P^t)`, a value
/// in `[0, 1]`: 1 when `s` refines `t`, 0 when they are independent.
pub fn concordance(t: &BinarySplit, s: &Partition, p: &Distribution) -> Result<f64> {
    if s.len() != p.len() {
        return Err(Error::PartitionMismatch(
            "partition and distribution differ in size".into(),
        ));
    }
    let ctx = SplitContext::new(t, p)?;
    Ok(ctx.defect(s) / ctx.h_t)
}

/// Concordance distance `d_Ŝ(A_1, A_2) = Σ Ŝ(s) C(t, s)`.
pub fn d_hat(t: &BinarySplit, s: &dyn StructureSource, p: &Distribution) -> Result<f64> {
    p.alphabet()
        .ensure_same(s.alphabet(), "distribution and structure")?;
    let ctx = SplitContext::new(t, p)?;
    let mut terms = Vec::with_capacity(s.num_terms());
    s.for_each_term(&mut |part, m| {
        if m > 0.0 {
            terms.push(m * ctx.defect(part));
        }
    });
    Ok(pairwise_sum(&terms) / ctx.h_t)
}

/// The same distance through the entropy gap:
/// `[H_S(A, P, Ŝ) - Σ_j P(A_j) H_S(A_j, P|A_j, Ŝ|A_j)] / H(P^t)`.
pub fn d_hat_via_entropy_gap(
    t: &BinarySplit,
    s: &dyn StructureSource,
    p: &Distribution,
) -> Result<f64> {
    let parts = grouping_decompose(t, s, p)?;
    let inner: f64 = parts
        .masses
        .iter()
        .zip(&parts.parts)
        .map(|(m, h)| m * h)
        .sum();
    Ok((parts.total - inner) / parts.split_entropy)
}

/// Terms of the grouping identity
/// `H_S = d_Ŝ(A_1, A_2) H(P^t) + Σ_j P(A_j) H_S(A_j, P|A_j, Ŝ|A_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupingDecomposition {
    /// `d_Ŝ(A_1, A_2)`.
    pub merit: f64,
    /// `H(P^t)`.
    pub split_entropy: f64,
    /// `H_S` of the (conditioned) whole.
    pub total: f64,
    /// `P(A_j)` for each side, conditioned on the union.
    pub masses: [f64; 2],
    /// `H_S(A_j, P|A_j, Ŝ|A_j)` for each side.
    pub parts: [f64; 2],
}

impl GroupingDecomposition {
    /// `merit * H(P^t) + Σ P(A_j) * part_j`, which should equal `total`.
    pub fn reassembled(&self) -> f64 {
        self.merit * self.split_entropy
            + self.masses[0] * self.parts[0]
            + self.masses[1] * self.parts[1]
    }
}

/// Decomposes `H_S` along the split.
pub fn grouping_decompose(
    t: &BinarySplit,
    s: &dyn StructureSource,
    p: &Distribution,
) -> Result<GroupingDecomposition> {
    p.alphabet()
        .ensure_same(s.alphabet(), "distribution and structure")?;
    let ctx = SplitContext::new(t, p)?;
    let (whole_p, whole_s): (Distribution, PartitionStructure) = if t.is_complementary() {
        (p.clone(), s.to_eager())
    } else {
        (p.restrict(&ctx.union)?, restrict_source(s, &ctx.union)?)
    };
    let total = h_s(&whole_p, &whole_s)?;
    let mut masses = [0.0; 2];
    let mut parts = [0.0; 2];
    for (j, side) in [t.left(), t.right()].into_iter().enumerate() {
        let local: Vec<usize> = side
            .iter()
            .map(|a| ctx.union.binary_search(a).expect("side lies in the union"))
            .collect();
        masses[j] = whole_p.mass(&local);
        parts[j] = h_s(&whole_p.restrict(&local)?, &whole_s.restrict(&local)?)?;
    }
    let merit = d_hat(t, s, p)?;
    Ok(GroupingDecomposition {
        merit,
        split_entropy: ctx.h_t,
        total,
        masses,
        parts,
    })
}

/// `D_Ŝ(a, b)`: total measure of the partitions separating `a` from `b`.
pub fn state_distance(a: usize, b: usize, s: &dyn StructureSource) -> f64 {
    let mut terms = Vec::new();
    s.for_each_term(&mut |part, m| {
        if part.separates(a, b) {
            terms.push(m);
        }
    });
    pairwise_sum(&terms)
}

/// The full matrix of [`state_distance`].
pub fn state_distance_matrix(s: &dyn StructureSource) -> DistanceMatrix {
    let n = s.alphabet().len();
    let mut d = vec![0.0; n * n];
    s.for_each_term(&mut |part, m| {
        for a in 0..n {
            for b in a + 1..n {
                if part.separates(a, b) {
                    d[a * n + b] += m;
                    d[b * n + a] += m;
                }
            }
        }
    });
    DistanceMatrix::new(s.alphabet().clone(), d).expect("measures are non-negative")
}
