//! Partition structures: finite sets of partitions carrying a non-negative
//! measure, plus the algebra built on them (combination, restriction,
//! products and the structured probability space).

use std::collections::HashMap;

use crate::alphabet::{normalize_subset, Alphabet, Distribution};
use crate::entropy::{entropy, PROB_TOL};
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Read access shared by eager and lazily-expanded structures.
///
/// Every consumer of a structure goes through this trait, so large product
/// structures never need to be materialized.
pub trait StructureSource {
    /// The alphabet the partitions live on.
    fn alphabet(&self) -> &Alphabet;

    /// Visits every `(partition, measure)` term exactly once.
    fn for_each_term(&self, f: &mut dyn FnMut(&Partition, f64));

    /// Number of terms.
    fn num_terms(&self) -> usize;

    /// `Σ Ŝ(s)`.
    fn total_measure(&self) -> f64 {
        let mut terms = Vec::new();
        self.for_each_term(&mut |_, m| terms.push(m));
        crate::entropy::pairwise_sum(&terms)
    }

    fn is_normalized(&self) -> bool {
        (self.total_measure() - 1.0).abs() <= PROB_TOL
    }

    /// Expands the terms into an owned structure.
    fn to_eager(&self) -> PartitionStructure {
        let mut terms = Vec::with_capacity(self.num_terms());
        self.for_each_term(&mut |s, m| terms.push((s.clone(), m)));
        PartitionStructure::merged(self.alphabet().clone(), terms)
    }
}

/// A finite partition structure `(S, Ŝ)` on an alphabet.
///
/// Structurally equal partitions are merged with their measures summed, and
/// every stored partition has at least two components (a one-component
/// partition carries no information and is dropped on restriction).
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionStructure {
    alphabet: Alphabet,
    terms: Vec<(Partition, f64)>,
}

impl PartitionStructure {
    /// Validates and merges the given terms.
    pub fn new(alphabet: Alphabet, terms: Vec<(Partition, f64)>) -> Result<Self> {
        for (s, m) in &terms {
            if s.len() != alphabet.len() {
                return Err(Error::PartitionMismatch(format!(
                    "partition of {} letters in a structure on {} letters",
                    s.len(),
                    alphabet.len()
                )));
            }
            if !m.is_finite() || *m < 0.0 {
                return Err(Error::InvalidMeasure(format!("measure {m} of {s:?}")));
            }
            if s.num_blocks() < 2 {
                return Err(Error::Validation(format!(
                    "partition {s:?} has a single component"
                )));
            }
        }
        Ok(Self::merged(alphabet, terms))
    }

    /// Builds a structure from `(measure, components)` pairs given as letter
    /// indices.
    pub fn from_components(alphabet: Alphabet, parts: &[(f64, Vec<Vec<usize>>)]) -> Result<Self> {
        let n = alphabet.len();
        let terms = parts
            .iter()
            .map(|(m, comps)| Ok((Partition::from_components(n, comps)?, *m)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, terms)
    }

    /// Merges duplicates and drops one-component partitions without further
    /// validation.
    pub(crate) fn merged(alphabet: Alphabet, terms: Vec<(Partition, f64)>) -> Self {
        let mut index: HashMap<Partition, usize> = HashMap::new();
        let mut out: Vec<(Partition, f64)> = Vec::new();
        for (s, m) in terms {
            if s.num_blocks() < 2 {
                continue;
            }
            match index.get(&s) {
                Some(&i) => out[i].1 += m,
                None => {
                    index.insert(s.clone(), out.len());
                    out.push((s, m));
                }
            }
        }
        PartitionStructure {
            alphabet,
            terms: out,
        }
    }

    /// The structure with no partitions.
    pub fn empty(alphabet: Alphabet) -> Self {
        PartitionStructure {
            alphabet,
            terms: Vec::new(),
        }
    }

    /// The traditional structure: the singleton partition with measure 1.
    /// Empty on a one-letter alphabet.
    pub fn traditional(alphabet: Alphabet) -> Self {
        let n = alphabet.len();
        Self::merged(alphabet, vec![(Partition::singletons(n), 1.0)])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn terms(&self) -> &[(Partition, f64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        self.terms.iter().map(|(_, m)| m).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_measure() - 1.0).abs() <= PROB_TOL
    }

    /// `Ŝ(s)`, zero for partitions not in `S`.
    pub fn measure_of(&self, s: &Partition) -> f64 {
        self.terms
            .iter()
            .find(|(t, _)| t == s)
            .map_or(0.0, |(_, m)| *m)
    }

    /// True iff every pair of letters is separated by some partition of
    /// positive measure.
    pub fn is_separating(&self) -> bool {
        self.inseparable_classes().len() == self.alphabet.len()
    }

    /// Classes of letters that no positive-measure partition separates.
    pub fn inseparable_classes(&self) -> Vec<Vec<usize>> {
        let n = self.alphabet.len();
        let mut acc = Partition::whole(n);
        for (s, m) in &self.terms {
            if *m > 0.0 {
                acc = acc
                    .join(s)
                    .expect("partitions share the structure's alphabet");
            }
        }
        if n == 0 {
            Vec::new()
        } else {
            acc.components()
        }
    }

    /// Unites letters no partition separates into single letters.
    ///
    /// Returns the structure on the merged alphabet along with the letter
    /// groups, which can be passed to [`Distribution::merge`] to carry a
    /// probability across. Never applied implicitly.
    pub fn merge_inseparable(&self) -> Result<(PartitionStructure, Vec<Vec<usize>>)> {
        let classes = self.inseparable_classes();
        let merged_letters = Partition::from_components(self.alphabet.len(), &classes)?;
        let alphabet = self.alphabet.component_alphabet(&merged_letters)?;
        let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
        let terms = self
            .terms
            .iter()
            .map(|(s, m)| (s.restrict(&reps), *m))
            .collect();
        Ok((Self::merged(alphabet, terms), classes))
    }

    /// `Ŝ1 + Ŝ2`: union of partition sets with measures added on overlap.
    pub fn combine(&self, other: &PartitionStructure) -> Result<PartitionStructure> {
        self.alphabet
            .ensure_same(&other.alphabet, "combined structures")?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Ok(Self::merged(self.alphabet.clone(), terms))
    }

    /// Multiplies every measure by `c ≥ 0`.
    pub fn scale(&self, c: f64) -> Result<PartitionStructure> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidMeasure(format!("scale factor {c}")));
        }
        Ok(PartitionStructure {
            alphabet: self.alphabet.clone(),
            terms: self.terms.iter().map(|(s, m)| (s.clone(), m * c)).collect(),
        })
    }

    /// The structure rescaled to total measure 1.
    pub fn normalized(&self) -> Result<PartitionStructure> {
        let total = self.total_measure();
        if total <= 0.0 {
            return Err(Error::NotNormalized(
                "structure has zero total measure".into(),
            ));
        }
        self.scale(1.0 / total)
    }

    /// `Ŝ|B`, see [`restrict_source`].
    pub fn restrict(&self, subset: &[usize]) -> Result<PartitionStructure> {
        restrict_source(self, subset)
    }

    /// `Ŝ_A × Ŝ_B` on `A × B`.
    pub fn product(&self, other: &PartitionStructure) -> Result<PartitionStructure> {
        let alphabet = self.alphabet.product(&other.alphabet)?;
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for (s, m) in &self.terms {
            for (t, w) in &other.terms {
                terms.push((s.product(t), m * w));
            }
        }
        Ok(Self::merged(alphabet, terms))
    }

    /// The `m`-fold product `Ŝ^m`, eager for `m ≤ 3` and lazy above.
    pub fn power(&self, m: usize) -> Result<StructureRepr> {
        if m == 0 {
            return Err(Error::Validation("power must be at least 1".into()));
        }
        if m <= EAGER_PRODUCT_LIMIT {
            let mut out = self.clone();
            for _ in 1..m {
                out = out.product(self)?;
            }
            Ok(StructureRepr::Eager(out))
        } else {
            Ok(StructureRepr::Lazy(ProductStructure::new(vec![
                self.clone(
                );
                m
            ])?))
        }
    }

    /// The structured space `S̲` with `Q(i, s) = P(i) Ŝ(s)`.
    pub fn build_q(&self, p: &Distribution) -> Result<StructuredSpace> {
        StructuredSpace::new(p, self)
    }
}

impl StructureSource for PartitionStructure {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn for_each_term(&self, f: &mut dyn FnMut(&Partition, f64)) {
        for (s, m) in &self.terms {
            f(s, *m);
        }
    }

    fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn total_measure(&self) -> f64 {
        PartitionStructure::total_measure(self)
    }

    fn to_eager(&self) -> PartitionStructure {
        self.clone()
    }
}

/// Products with at most this many factors are expanded eagerly.
pub const EAGER_PRODUCT_LIMIT: usize = 3;

/// A product structure `Ŝ_1 × … × Ŝ_m` kept as its list of factors.
///
/// Letters of the product alphabet are tuples in lexicographic order, the
/// last factor varying fastest.
#[derive(Clone, Debug)]
pub struct ProductStructure {
    factors: Vec<PartitionStructure>,
    alphabet: Alphabet,
}

impl ProductStructure {
    pub fn new(factors: Vec<PartitionStructure>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::Validation("product of zero structures".into()))?;
        let mut alphabet = first.alphabet.clone();
        for f in &factors[1..] {
            alphabet = alphabet.product(&f.alphabet)?;
        }
        Ok(ProductStructure { factors, alphabet })
    }

    pub fn factors(&self) -> &[PartitionStructure] {
        &self.factors
    }
}

impl StructureSource for ProductStructure {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn for_each_term(&self, f: &mut dyn FnMut(&Partition, f64)) {
        if self.factors.iter().any(|s| s.is_empty()) {
            return;
        }
        let k = self.factors.len();
        let mut idx = vec![0usize; k];
        loop {
            let (s0, m0) = &self.factors[0].terms[idx[0]];
            let mut part = s0.clone();
            let mut measure = *m0;
            for j in 1..k {
                let (s, m) = &self.factors[j].terms[idx[j]];
                part = part.product(s);
                measure *= m;
            }
            f(&part, measure);

            let mut j = k;
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < self.factors[j].len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    fn num_terms(&self) -> usize {
        self.factors.iter().map(|s| s.len()).product()
    }

    fn total_measure(&self) -> f64 {
        self.factors.iter().map(|s| s.total_measure()).product()
    }
}

/// A structure that is either materialized or a lazy product.
#[derive(Clone, Debug)]
pub enum StructureRepr {
    Eager(PartitionStructure),
    Lazy(ProductStructure),
}

impl StructureSource for StructureRepr {
    fn alphabet(&self) -> &Alphabet {
        match self {
            StructureRepr::Eager(s) => s.alphabet(),
            StructureRepr::Lazy(s) => s.alphabet(),
        }
    }

    fn for_each_term(&self, f: &mut dyn FnMut(&Partition, f64)) {
        match self {
            StructureRepr::Eager(s) => s.for_each_term(f),
            StructureRepr::Lazy(s) => s.for_each_term(f),
        }
    }

    fn num_terms(&self) -> usize {
        match self {
            StructureRepr::Eager(s) => s.len(),
            StructureRepr::Lazy(s) => s.num_terms(),
        }
    }

    fn total_measure(&self) -> f64 {
        match self {
            StructureRepr::Eager(s) => s.total_measure(),
            StructureRepr::Lazy(s) => s.total_measure(),
        }
    }
}

/// `Ŝ|B` on the sub-alphabet `B`: each partition is restricted, restrictions
/// with a single component are dropped, and equal restrictions are merged.
/// The result is generally not normalized.
pub fn restrict_source(src: &dyn StructureSource, subset: &[usize]) -> Result<PartitionStructure> {
    let subset = normalize_subset(src.alphabet().len(), subset)?;
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let alphabet = src.alphabet().sub_alphabet(&subset)?;
    let mut terms = Vec::new();
    src.for_each_term(&mut |s, m| {
        let r = s.restrict(&subset);
        if r.num_blocks() >= 2 {
            terms.push((r, m));
        }
    });
    Ok(PartitionStructure::merged(alphabet, terms))
}

/// One point `(i, s)` of the structured space: component `component` of the
/// partition at `partition` in the structure's term list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructuredPoint {
    pub partition: usize,
    pub component: usize,
}

/// The space `S̲` of (component, partition) pairs with `Q(i,s) = P(i) Ŝ(s)`.
#[derive(Clone, Debug)]
pub struct StructuredSpace {
    points: Vec<StructuredPoint>,
    q: Vec<f64>,
    total: f64,
}

impl StructuredSpace {
    pub fn new(p: &Distribution, s: &dyn StructureSource) -> Result<Self> {
        p.alphabet()
            .ensure_same(s.alphabet(), "distribution and structure")?;
        let mut points = Vec::new();
        let mut q = Vec::new();
        let mut totals = Vec::new();
        let mut k = 0;
        s.for_each_term(&mut |part, m| {
            for (c, pc) in part.reduce(p.probs()).into_iter().enumerate() {
                points.push(StructuredPoint {
                    partition: k,
                    component: c,
                });
                q.push(pc * m);
            }
            totals.push(m);
            k += 1;
        });
        let total = crate::entropy::pairwise_sum(&totals);
        Ok(StructuredSpace { points, q, total })
    }

    pub fn points(&self) -> &[StructuredPoint] {
        &self.points
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// `Σ Q`, which equals `Σ Ŝ(s)`.
    pub fn total_mass(&self) -> f64 {
        self.total
    }

    /// True iff `Q` is a probability, i.e. the structure is normalized.
    pub fn is_probability(&self) -> bool {
        (self.total - 1.0).abs() <= PROB_TOL
    }

    /// Entropy `H(Q)` of the raw weights.
    pub fn entropy(&self) -> f64 {
        entropy(&self.q)
    }
}
