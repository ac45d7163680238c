//! Typical sequences over letters, partitions and structured pairs.
//!
//! Typicality is weak (entropy) typicality: a sequence `x` of length `N` is
//! typical when `|-(1/N) log₂ P(x) - H| ≤ ε`. Since membership depends only on
//! the type (symbol counts) of a sequence, exact enumeration runs over types
//! and weighs each by its multinomial count.

use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::alphabet::Distribution;
use crate::entropy::entropy;
use crate::error::{Error, Result};
use crate::notions::h_s;
use crate::partition::Partition;
use crate::structure::{PartitionStructure, StructuredPoint, StructuredSpace};

/// Default cap on the number of sequences an exact enumeration may cover.
pub const ENUMERATION_CAP: u64 = 1 << 24;

/// Slack on the typicality test so that exactly equi-surprising sequences
/// are not lost to rounding when `ε` is tiny.
const TYPICALITY_SLACK: f64 = 1e-12;

/// What the symbols of a sequence are.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    /// Letters of `A`, drawn from `P`.
    Letters,
    /// Partitions of `S`, drawn from `Ŝ`.
    Partitions,
    /// Pairs (component, partition), drawn from `Q(i, s) = P(i) Ŝ(s)`.
    Structured,
    /// Components of one partition `s`, drawn from `P^s`.
    Reduced,
}

/// IID sequences of a fixed length over a finite symbol set.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceSpace {
    kind: SequenceKind,
    probs: Vec<f64>,
    length: usize,
    cap: u64,
}

impl SequenceSpace {
    fn build(kind: SequenceKind, probs: Vec<f64>, length: usize) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptySubset);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > crate::entropy::PROB_TOL {
            return Err(Error::NotNormalized(format!(
                "symbol probabilities sum to {total}"
            )));
        }
        Ok(SequenceSpace {
            kind,
            probs,
            length,
            cap: ENUMERATION_CAP,
        })
    }

    pub fn letters(p: &Distribution, length: usize) -> Result<Self> {
        Self::build(SequenceKind::Letters, p.probs().to_vec(), length)
    }

    /// Requires a normalized structure.
    pub fn partitions(s: &PartitionStructure, length: usize) -> Result<Self> {
        Self::build(
            SequenceKind::Partitions,
            s.terms().iter().map(|t| t.1).collect(),
            length,
        )
    }

    /// Symbols in the order of [`StructuredSpace::points`]. Requires a
    /// normalized structure.
    pub fn structured(p: &Distribution, s: &PartitionStructure, length: usize) -> Result<Self> {
        let space = StructuredSpace::new(p, s)?;
        Self::build(SequenceKind::Structured, space.q().to_vec(), length)
    }

    pub fn reduced(p: &Distribution, s: &Partition, length: usize) -> Result<Self> {
        Self::build(SequenceKind::Reduced, p.reduced_probs(s)?, length)
    }

    /// Replaces the enumeration cap.
    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// Entropy of one symbol.
    pub fn entropy(&self) -> f64 {
        entropy(&self.probs)
    }

    /// Number of sequences, `k^N`, as a float.
    pub fn size(&self) -> f64 {
        (self.probs.len() as f64).powi(self.length as i32)
    }

    fn check_cap(&self) -> Result<()> {
        let size = self.size();
        if size > self.cap as f64 {
            return Err(Error::SpaceTooLarge {
                size,
                cap: self.cap as f64,
            });
        }
        Ok(())
    }

    fn is_typical(&self, log2_prob: f64, epsilon: f64) -> bool {
        if self.length == 0 {
            return true;
        }
        log2_prob.is_finite()
            && (-log2_prob / self.length as f64 - self.entropy()).abs()
                <= epsilon + TYPICALITY_SLACK
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial fits in u64 under the enumeration cap")
}

/// `N! / Π n_i!`.
fn multinomial(counts: &[usize]) -> u64 {
    let mut remaining: usize = counts.iter().sum();
    let mut acc: u64 = 1;
    for &c in counts {
        acc = acc
            .checked_mul(binomial(remaining, c))
            .expect("multinomial fits in u64 under the enumeration cap");
        remaining -= c;
    }
    acc
}

/// Visits every composition of `total` into `parts` non-negative parts.
fn for_each_composition(total: usize, parts: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(rest: usize, slot: usize, counts: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if slot + 1 == counts.len() {
            counts[slot] = rest;
            f(counts);
            return;
        }
        for c in 0..=rest {
            counts[slot] = c;
            go(rest - c, slot + 1, counts, f);
        }
    }
    if parts == 0 {
        return;
    }
    let mut counts = vec![0; parts];
    go(total, 0, &mut counts, f);
}

/// `log₂` probability of any sequence of the given type.
fn type_log2_prob(probs: &[f64], counts: &[usize]) -> f64 {
    let mut lp = 0.0;
    for (&p, &c) in probs.iter().zip(counts) {
        if c > 0 {
            if p <= 0.0 {
                return f64::NEG_INFINITY;
            }
            lp += c as f64 * p.log2();
        }
    }
    lp
}

/// Visits every type of `space` in parallel chunks (by the count of the
/// first symbol) and folds with `fold`, merging chunk results with `merge`.
fn fold_types<T: Send>(
    space: &SequenceSpace,
    init: impl Fn() -> T + Sync,
    fold: impl Fn(&mut T, &[usize]) + Sync,
    merge: impl Fn(T, T) -> T + Sync + Send,
) -> T {
    let n = space.length;
    let k = space.probs.len();
    if k == 1 {
        let mut acc = init();
        fold(&mut acc, &[n]);
        return acc;
    }
    (0..=n)
        .into_par_iter()
        .map(|first| {
            let mut acc = init();
            let mut counts = vec![0; k];
            counts[0] = first;
            for_each_composition(n - first, k - 1, &mut |rest| {
                counts[1..].copy_from_slice(rest);
                fold(&mut acc, &counts);
            });
            acc
        })
        .reduce(&init, merge)
}

/// Exact size and probability of the typical set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypicalSet {
    pub kind: SequenceKind,
    pub length: usize,
    pub epsilon: f64,
    /// Entropy `H` of one symbol.
    pub entropy: f64,
    /// Total number of sequences.
    pub space_size: f64,
    pub count: u64,
    pub mass: f64,
    /// `log₂(count) / N`; `None` for an empty set or `N = 0`.
    pub rate: Option<f64>,
    /// `mass · 2^{N(H-ε)}`, a lower bound on `count`.
    pub lower_envelope: f64,
    /// `2^{N(H+ε)}`, an upper bound on `count`.
    pub upper_envelope: f64,
    /// `count` lies within the two envelopes.
    pub within_envelope: bool,
    /// Method-of-types correction `k · log₂(N+1) / N`.
    pub types_correction: f64,
    /// `H - ε - correction ≤ rate ≤ H + ε`.
    pub within_rate_envelope: bool,
}

/// Counts the typical sequences of `space` exactly.
pub fn typical_set(space: &SequenceSpace, epsilon: f64) -> Result<TypicalSet> {
    if !(epsilon >= 0.0) {
        return Err(Error::Validation(format!(
            "epsilon {epsilon} must be non-negative"
        )));
    }
    space.check_cap()?;
    let (count, masses) = fold_types(
        space,
        || (0u64, Vec::new()),
        |acc, counts| {
            let lp = type_log2_prob(&space.probs, counts);
            if space.is_typical(lp, epsilon) {
                let m = multinomial(counts);
                acc.0 += m;
                acc.1.push(m as f64 * lp.exp2());
            }
        },
        |mut a, b| {
            a.0 += b.0;
            a.1.extend(b.1);
            a
        },
    );
    let mut masses = masses;
    masses.sort_by(f64::total_cmp);
    let mass = crate::entropy::pairwise_sum(&masses);
    let n = space.length as f64;
    let h = space.entropy();
    let lower = mass * (n * (h - epsilon)).exp2();
    let upper = (n * (h + epsilon)).exp2();
    let rel = 1e-9;
    let c = count as f64;
    let within_envelope = c >= lower * (1.0 - rel) && c <= upper * (1.0 + rel);
    let types_correction = if space.length == 0 {
        f64::INFINITY
    } else {
        space.probs.len() as f64 * (n + 1.0).log2() / n
    };
    let rate = (count > 0 && space.length > 0).then(|| c.log2() / n);
    let within_rate_envelope = rate
        .is_some_and(|r| r >= h - epsilon - types_correction - 1e-12 && r <= h + epsilon + 1e-12);
    Ok(TypicalSet {
        kind: space.kind,
        length: space.length,
        epsilon,
        entropy: h,
        space_size: space.size(),
        count,
        mass,
        rate,
        lower_envelope: lower,
        upper_envelope: upper,
        within_envelope,
        types_correction,
        within_rate_envelope,
    })
}

/// The partition sequence underlying a sequence of structured pairs.
pub fn project(seq: &[StructuredPoint]) -> Vec<usize> {
    seq.iter().map(|x| x.partition).collect()
}

/// `Π P(i_j)`: the probability of each pair's component read as a subset of
/// the alphabet.
pub fn subset_probability(
    seq: &[StructuredPoint],
    p: &Distribution,
    s: &PartitionStructure,
) -> Result<f64> {
    p.alphabet()
        .ensure_same(s.alphabet(), "distribution and structure")?;
    let mut out = 1.0;
    for x in seq {
        let (part, _) = s.terms().get(x.partition).ok_or_else(|| {
            Error::Validation(format!("structure has no partition {}", x.partition))
        })?;
        let comps = part.components();
        let comp = comps.get(x.component).ok_or_else(|| {
            Error::Validation(format!(
                "partition {} has no component {}",
                x.partition, x.component
            ))
        })?;
        out *= p.mass(comp);
    }
    Ok(out)
}

/// Typical structured-pair sequences grouped by their partition sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceClasses {
    pub length: usize,
    pub epsilon: f64,
    /// `H(Q)`, the entropy typicality is measured against.
    pub h_q: f64,
    /// `H(Ŝ)`.
    pub h_structure: f64,
    pub h_s: f64,
    pub typical_count: u64,
    pub typical_mass: f64,
    pub class_count: u64,
    pub min_class_size: u64,
    pub max_class_size: u64,
    /// `log₂(class count) / N`, compared against `H(Ŝ)`.
    pub class_count_rate: Option<f64>,
    /// `log₂(min class size) / N`, compared against `H_S`.
    pub min_class_size_rate: Option<f64>,
    pub max_class_size_rate: Option<f64>,
    /// The classes are disjoint and cover the typical set: the class sizes
    /// sum to `typical_count`.
    pub classes_cover: bool,
}

/// Groups the typical length-`length` structured-pair sequences by their
/// projection onto partition sequences.
pub fn equivalence_class_stats(
    length: usize,
    p: &Distribution,
    s: &PartitionStructure,
    epsilon: f64,
) -> Result<EquivalenceClasses> {
    if !s.is_normalized() {
        return Err(Error::NotNormalized(format!(
            "structure has total measure {}",
            s.total_measure()
        )));
    }
    let space = SequenceSpace::structured(p, s, length)?;
    let typical = typical_set(&space, epsilon)?;
    let owner: Vec<usize> = StructuredSpace::new(p, s)?
        .points()
        .iter()
        .map(|x| x.partition)
        .collect();
    let parts = s.len();

    // Class size depends only on the partition counts of the projection.
    let sizes: HashMap<Vec<usize>, u64> = fold_types(
        &space,
        HashMap::new,
        |acc, counts| {
            let lp = type_log2_prob(&space.probs, counts);
            if !space.is_typical(lp, epsilon) {
                return;
            }
            let mut s_type = vec![0; parts];
            let mut within: Vec<Vec<usize>> = vec![Vec::new(); parts];
            for (sym, &c) in counts.iter().enumerate() {
                s_type[owner[sym]] += c;
                within[owner[sym]].push(c);
            }
            let ways: u64 = within.iter().map(|w| multinomial(w)).product();
            *acc.entry(s_type).or_insert(0) += ways;
        },
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        },
    );
    let class_count: u64 = sizes.keys().map(|m| multinomial(m)).sum();
    let covered: u64 = sizes.iter().map(|(m, v)| multinomial(m) * v).sum();
    let min_class_size = sizes.values().copied().min().unwrap_or(0);
    let max_class_size = sizes.values().copied().max().unwrap_or(0);
    let n = length as f64;
    let rate = |x: u64| (x > 0 && length > 0).then(|| (x as f64).log2() / n);
    let measures: Vec<f64> = s.terms().iter().map(|t| t.1).collect();
    Ok(EquivalenceClasses {
        length,
        epsilon,
        h_q: space.entropy(),
        h_structure: entropy(&measures),
        h_s: h_s(p, s)?,
        typical_count: typical.count,
        typical_mass: typical.mass,
        class_count,
        min_class_size,
        max_class_size,
        class_count_rate: rate(class_count),
        min_class_size_rate: rate(min_class_size),
        max_class_size_rate: rate(max_class_size),
        classes_cover: covered == typical.count,
    })
}

/// A Monte Carlo estimate of the typical set, for spaces too large to
/// enumerate. The values are approximate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypicalEstimate {
    pub approximate: bool,
    pub length: usize,
    pub epsilon: f64,
    pub samples: usize,
    /// Fraction of sampled sequences that are typical.
    pub mass_estimate: f64,
    /// `log₂` of the importance-sampling estimate `mean(1{typical} / P(x))`
    /// of the typical count; `None` if no sample was typical.
    pub log2_count_estimate: Option<f64>,
}

/// Samples `samples` sequences from the space's own distribution.
pub fn estimate_typical_set(
    space: &SequenceSpace,
    epsilon: f64,
    samples: usize,
    seed: u64,
) -> Result<TypicalEstimate> {
    if samples == 0 {
        return Err(Error::Validation("at least one sample required".into()));
    }
    let index =
        WeightedIndex::new(&space.probs).map_err(|e| Error::InvalidProbability(e.to_string()))?;
    let logs: Vec<f64> = space.probs.iter().map(|p| p.log2()).collect();
    let typical_logs: Vec<f64> = (0..samples)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let lp: f64 = (0..space.length)
                .map(|_| logs[index.sample(&mut rng)])
                .sum();
            space.is_typical(lp, epsilon).then_some(-lp)
        })
        .collect();
    let hits = typical_logs.len();
    let log2_count_estimate = typical_logs.iter().copied().reduce(f64::max).map(|top| {
        let sum: f64 = typical_logs.iter().map(|x| (x - top).exp2()).sum();
        top + sum.log2() - (samples as f64).log2()
    });
    Ok(TypicalEstimate {
        approximate: true,
        length: space.length,
        epsilon,
        samples,
        mass_estimate: hits as f64 / samples as f64,
        log2_count_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;

    fn abcd() -> Alphabet {
        Alphabet::new(["a", "b", "c", "d"]).unwrap()
    }

    fn mixed() -> PartitionStructure {
        let pairs = Partition::from_components(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        PartitionStructure::new(abcd(), vec![(Partition::singletons(4), 0.6), (pairs, 0.4)])
            .unwrap()
    }

    #[test]
    fn counting_helpers() {
        assert_eq!(multinomial(&[2, 1, 1]), 12);
        let mut seen = 0;
        for_each_composition(4, 3, &mut |c| {
            assert_eq!(c.iter().sum::<usize>(), 4);
            seen += 1;
        });
        assert_eq!(seen, 15);
    }

    #[test]
    fn uniform_is_exact() {
        let u = Distribution::uniform(abcd());
        for n in [1, 3, 6] {
            let t = typical_set(&SequenceSpace::letters(&u, n).unwrap(), 0.01).unwrap();
            assert_eq!(t.count, 4u64.pow(n as u32));
            assert!((t.mass - 1.0).abs() < 1e-12);
            assert!((t.rate.unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn skewed_binary() {
        let p = Distribution::new(Alphabet::new(["x", "y"]).unwrap(), vec![0.75, 0.25]).unwrap();
        let t = typical_set(&SequenceSpace::letters(&p, 16).unwrap(), 0.1).unwrap();
        // Typical types have 3, 4 or 5 copies of `y`.
        assert_eq!(t.count, binomial(16, 3) + binomial(16, 4) + binomial(16, 5));
        assert!(t.within_envelope);
        assert!(t.within_rate_envelope);
    }

    #[test]
    fn cap_is_enforced() {
        let u = Distribution::uniform(abcd());
        let space = SequenceSpace::letters(&u, 13).unwrap();
        assert!(matches!(
            typical_set(&space, 0.1),
            Err(Error::SpaceTooLarge { .. })
        ));
        assert!(typical_set(&space.with_cap(1 << 26), 0.1).is_ok());
    }

    #[test]
    fn traditional_structure_has_one_class() {
        let p = Distribution::new(abcd(), vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let r =
            equivalence_class_stats(6, &p, &PartitionStructure::traditional(abcd()), 0.2).unwrap();
        assert_eq!(r.class_count, 1);
        assert_eq!(r.min_class_size, r.typical_count);
        assert!(r.classes_cover);
    }

    #[test]
    fn mixed_structure_classes() {
        let u = Distribution::uniform(abcd());
        let r = equivalence_class_stats(8, &u, &mixed(), 0.15).unwrap();
        assert!(r.classes_cover);
        assert!((r.h_s - 1.6).abs() < 1e-12);
        assert!((r.h_q - (1.6 + r.h_structure)).abs() < 1e-12);
        assert!(r.class_count > 1);
        assert!(r.min_class_size <= r.max_class_size);
    }

    #[test]
    fn projection_and_subset_probability() {
        let seq = [
            StructuredPoint {
                partition: 0,
                component: 2,
            },
            StructuredPoint {
                partition: 1,
                component: 0,
            },
        ];
        assert_eq!(project(&seq), vec![0, 1]);
        assert!(project(&[]).is_empty());
        let u = Distribution::uniform(abcd());
        assert!((subset_probability(&seq, &u, &mixed()).unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(subset_probability(&[], &u, &mixed()).unwrap(), 1.0);
    }

    #[test]
    fn estimate_tracks_exact() {
        let p = Distribution::new(Alphabet::new(["x", "y"]).unwrap(), vec![0.75, 0.25]).unwrap();
        let space = SequenceSpace::letters(&p, 16).unwrap();
        let exact = typical_set(&space, 0.1).unwrap();
        let est = estimate_typical_set(&space, 0.1, 20_000, 5).unwrap();
        assert!((est.mass_estimate - exact.mass).abs() < 0.02);
        let rel = (est.log2_count_estimate.unwrap() - (exact.count as f64).log2()).abs();
        assert!(rel < 0.1);
    }
}
