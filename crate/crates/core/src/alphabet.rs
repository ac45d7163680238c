//! Finite alphabets, probability distributions on them and joint distributions.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::entropy::PROB_TOL;
use crate::error::{Error, Result};
use crate::partition::Partition;

struct AlphabetInner {
    letters: Vec<String>,
    index: HashMap<String, usize>,
}

/// An ordered set of distinct letters. Cheap to clone.
#[derive(Clone)]
pub struct Alphabet {
    inner: Arc<AlphabetInner>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(letters: impl IntoIterator<Item = S>) -> Result<Self> {
        let letters: Vec<String> = letters.into_iter().map(Into::into).collect();
        if letters.is_empty() {
            return Err(Error::TooFewLetters { needed: 1, got: 0 });
        }
        let mut index = HashMap::with_capacity(letters.len());
        for (i, l) in letters.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLetter(l.clone()));
            }
        }
        Ok(Alphabet {
            inner: Arc::new(AlphabetInner { letters, index }),
        })
    }

    /// Alphabet of `n` letters named `0..n`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.inner.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.letters.is_empty()
    }

    pub fn letters(&self) -> &[String] {
        &self.inner.letters
    }

    pub fn letter(&self, i: usize) -> &str {
        &self.inner.letters[i]
    }

    pub fn index_of(&self, letter: &str) -> Result<usize> {
        self.inner
            .index
            .get(letter)
            .copied()
            .ok_or_else(|| Error::UnknownLetter(letter.to_string()))
    }

    /// Resolves letter names to a sorted index subset.
    pub fn subset<S: AsRef<str>>(&self, letters: &[S]) -> Result<Vec<usize>> {
        let idx: Vec<usize> = letters
            .iter()
            .map(|l| self.index_of(l.as_ref()))
            .collect::<Result<_>>()?;
        normalize_subset(self.len(), &idx)
    }

    /// The alphabet formed by the letters at `subset`, in alphabet order.
    pub fn sub_alphabet(&self, subset: &[usize]) -> Result<Alphabet> {
        let subset = normalize_subset(self.len(), subset)?;
        Alphabet::new(subset.iter().map(|&i| self.letter(i).to_string()))
    }

    /// Cartesian product; the letter `(a, b)` sits at index `a * |other| + b`.
    pub fn product(&self, other: &Alphabet) -> Result<Alphabet> {
        let mut names = Vec::with_capacity(self.len() * other.len());
        for a in self.letters() {
            for b in other.letters() {
                names.push(format!("{a},{b}"));
            }
        }
        Alphabet::new(names)
    }

    /// The alphabet whose letters are the components of `s`, each named
    /// `{a,b,...}`.
    pub fn component_alphabet(&self, s: &Partition) -> Result<Alphabet> {
        Alphabet::new(s.components().iter().map(|c| {
            let names: Vec<&str> = c.iter().map(|&i| self.letter(i)).collect();
            format!("{{{}}}", names.join(","))
        }))
    }

    pub(crate) fn same_as(&self, other: &Alphabet) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.letters() == other.letters()
    }

    pub(crate) fn ensure_same(&self, other: &Alphabet, what: &str) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(what.to_string()))
        }
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.letters()).finish()
    }
}

/// Sorts and validates a subset of letter indices.
pub fn normalize_subset(n: usize, subset: &[usize]) -> Result<Vec<usize>> {
    let mut v = subset.to_vec();
    v.sort_unstable();
    for w in v.windows(2) {
        if w[0] == w[1] {
            return Err(Error::Validation(format!(
                "letter index {} repeated in subset",
                w[0]
            )));
        }
    }
    if let Some(&last) = v.last() {
        if last >= n {
            return Err(Error::Validation(format!(
                "letter index {last} out of range for alphabet of size {n}"
            )));
        }
    }
    Ok(v)
}

fn check_probs(probs: &[f64]) -> Result<f64> {
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidProbability(format!("entry {i} is {p}")));
        }
    }
    Ok(probs.iter().sum())
}

/// A probability vector over an alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    alphabet: Alphabet,
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates non-negativity and a total of 1 within `1e-9`.
    pub fn new(alphabet: Alphabet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alphabet.len() {
            return Err(Error::AlphabetMismatch(format!(
                "{} probabilities for {} letters",
                probs.len(),
                alphabet.len()
            )));
        }
        let sum = check_probs(&probs)?;
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidProbability(format!("entries sum to {sum}")));
        }
        Ok(Distribution { alphabet, probs })
    }

    /// Like [`Distribution::new`] but rescales any positive total to 1.
    pub fn new_renormalized(alphabet: Alphabet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alphabet.len() {
            return Err(Error::AlphabetMismatch(format!(
                "{} probabilities for {} letters",
                probs.len(),
                alphabet.len()
            )));
        }
        let sum = check_probs(&probs)?;
        if sum <= 0.0 {
            return Err(Error::InvalidProbability("total mass is zero".into()));
        }
        let probs = probs.into_iter().map(|p| p / sum).collect();
        Ok(Distribution { alphabet, probs })
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let n = alphabet.len();
        Distribution {
            alphabet,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// `P(B)` for a subset of letter indices.
    pub fn mass(&self, subset: &[usize]) -> f64 {
        subset.iter().map(|&i| self.probs[i]).sum()
    }

    /// The conditional distribution `P(. | B)` on the sub-alphabet `B`.
    pub fn restrict(&self, subset: &[usize]) -> Result<Distribution> {
        let subset = normalize_subset(self.len(), subset)?;
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mass = self.mass(&subset);
        if mass <= 0.0 {
            return Err(Error::ZeroMassSubset);
        }
        let alphabet = self.alphabet.sub_alphabet(&subset)?;
        let probs = subset.iter().map(|&i| self.probs[i] / mass).collect();
        Ok(Distribution { alphabet, probs })
    }

    /// Reduced probabilities `P^s(i) = Σ_{a ∈ i} P(a)`, indexed by component.
    pub fn reduced_probs(&self, s: &Partition) -> Result<Vec<f64>> {
        if s.len() != self.len() {
            return Err(Error::PartitionMismatch(format!(
                "partition of {} letters applied to alphabet of {}",
                s.len(),
                self.len()
            )));
        }
        Ok(s.reduce(&self.probs))
    }

    /// The distribution on the reduced alphabet whose letters are the
    /// components of `s`.
    pub fn reduce(&self, s: &Partition) -> Result<Distribution> {
        let probs = self.reduced_probs(s)?;
        let alphabet = self.alphabet.component_alphabet(s)?;
        Ok(Distribution { alphabet, probs })
    }

    /// Unites letters into groups, summing their probabilities. Group `g`
    /// becomes letter `g` of the result, named after its members.
    pub fn merge(&self, groups: &[Vec<usize>]) -> Result<Distribution> {
        let s = Partition::from_components(self.len(), groups)?;
        let alphabet = self.alphabet.component_alphabet(&s)?;
        Ok(Distribution {
            alphabet,
            probs: s.reduce(&self.probs),
        })
    }

    /// The same distribution with its letters in `target`'s order. `target`
    /// must hold exactly the same letters.
    pub fn reindex(&self, target: &Alphabet) -> Result<Distribution> {
        if target.len() != self.len() {
            return Err(Error::AlphabetMismatch(format!(
                "{} letters against {}",
                self.len(),
                target.len()
            )));
        }
        let probs = target
            .letters()
            .iter()
            .map(|l| {
                self.alphabet
                    .index_of(l)
                    .map(|i| self.probs[i])
                    .map_err(|_| {
                        Error::AlphabetMismatch(format!("letter `{l}` has no probability"))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Distribution {
            alphabet: target.clone(),
            probs,
        })
    }

    /// Independent product distribution on `A x B`.
    pub fn product(&self, other: &Distribution) -> Result<Distribution> {
        let alphabet = self.alphabet.product(&other.alphabet)?;
        let mut probs = Vec::with_capacity(alphabet.len());
        for &p in &self.probs {
            for &q in &other.probs {
                probs.push(p * q);
            }
        }
        Ok(Distribution { alphabet, probs })
    }

    /// IID power `P^m` on `A^m`.
    pub fn power(&self, m: usize) -> Result<Distribution> {
        if m == 0 {
            return Err(Error::Validation("power must be at least 1".into()));
        }
        let mut out = self.clone();
        for _ in 1..m {
            out = out.product(self)?;
        }
        Ok(out)
    }

    pub fn entropy(&self) -> f64 {
        crate::entropy::entropy(&self.probs)
    }
}

/// A joint probability `P_AB` on `A x B`, stored row-major (rows = `A`).
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    rows: Alphabet,
    cols: Alphabet,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: Alphabet, cols: Alphabet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != rows.len() * cols.len() {
            return Err(Error::AlphabetMismatch(format!(
                "{} entries for a {}x{} joint",
                probs.len(),
                rows.len(),
                cols.len()
            )));
        }
        let sum = check_probs(&probs)?;
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidProbability(format!(
                "joint entries sum to {sum}"
            )));
        }
        Ok(JointDistribution { rows, cols, probs })
    }

    pub fn independent(a: &Distribution, b: &Distribution) -> Self {
        let mut probs = Vec::with_capacity(a.len() * b.len());
        for &p in a.probs() {
            for &q in b.probs() {
                probs.push(p * q);
            }
        }
        JointDistribution {
            rows: a.alphabet().clone(),
            cols: b.alphabet().clone(),
            probs,
        }
    }

    /// The joint of a variable with itself: `P(a, a) = P(a)`.
    pub fn identity_coupling(p: &Distribution) -> Self {
        let n = p.len();
        let mut probs = vec![0.0; n * n];
        for i in 0..n {
            probs[i * n + i] = p.prob(i);
        }
        JointDistribution {
            rows: p.alphabet().clone(),
            cols: p.alphabet().clone(),
            probs,
        }
    }

    pub fn rows(&self) -> &Alphabet {
        &self.rows
    }

    pub fn cols(&self) -> &Alphabet {
        &self.cols
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.probs[a * self.cols.len() + b]
    }

    pub fn marginal_rows(&self) -> Distribution {
        let m = self.cols.len();
        let probs = (0..self.rows.len())
            .map(|a| self.probs[a * m..(a + 1) * m].iter().sum())
            .collect();
        Distribution {
            alphabet: self.rows.clone(),
            probs,
        }
    }

    pub fn marginal_cols(&self) -> Distribution {
        let m = self.cols.len();
        let probs = (0..m)
            .map(|b| (0..self.rows.len()).map(|a| self.probs[a * m + b]).sum())
            .collect();
        Distribution {
            alphabet: self.cols.clone(),
            probs,
        }
    }

    /// Swaps the roles of `A` and `B`.
    pub fn transpose(&self) -> Self {
        let (n, m) = (self.rows.len(), self.cols.len());
        let mut probs = vec![0.0; n * m];
        for a in 0..n {
            for b in 0..m {
                probs[b * n + a] = self.probs[a * m + b];
            }
        }
        JointDistribution {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            probs,
        }
    }

    /// Reduced joint `P_AB^{s_A,s_B}(i, j) = P_AB(i x j)`, row-major over
    /// the components of `s_a` and `s_b`.
    pub fn reduce(&self, s_a: &Partition, s_b: &Partition) -> Result<Vec<f64>> {
        if s_a.len() != self.rows.len() || s_b.len() != self.cols.len() {
            return Err(Error::PartitionMismatch(
                "partition sizes do not match the joint's alphabets".into(),
            ));
        }
        let (ka, kb) = (s_a.num_blocks(), s_b.num_blocks());
        let m = self.cols.len();
        let mut out = vec![0.0; ka * kb];
        for a in 0..self.rows.len() {
            let i = s_a.block_of(a);
            for b in 0..m {
                out[i * kb + s_b.block_of(b)] += self.probs[a * m + b];
            }
        }
        Ok(out)
    }

    /// The joint read as a single distribution on the product alphabet.
    pub fn as_distribution(&self) -> Result<Distribution> {
        let alphabet = self.rows.product(&self.cols)?;
        Ok(Distribution {
            alphabet,
            probs: self.probs.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Alphabet {
        Alphabet::new(["a", "b", "c"]).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn reindex_follows_target_order() {
        let p = Distribution::new(abc(), vec![0.5, 0.3, 0.2]).unwrap();
        let cba = Alphabet::new(["c", "b", "a"]).unwrap();
        let q = p.reindex(&cba).unwrap();
        assert!(close(q.probs(), &[0.2, 0.3, 0.5]));
        assert_eq!(q.alphabet(), &cba);
        assert!(p.reindex(&Alphabet::new(["a", "b", "d"]).unwrap()).is_err());
        assert!(p.reindex(&Alphabet::new(["a", "b"]).unwrap()).is_err());
    }

    #[test]
    fn duplicate_letters_rejected() {
        assert!(matches!(
            Alphabet::new(["a", "b", "a"]),
            Err(Error::DuplicateLetter(_))
        ));
    }

    #[test]
    fn restrict_examples() {
        let p = Distribution::new(abc(), vec![0.5, 0.25, 0.25]).unwrap();
        let r = p.restrict(&[1, 2]).unwrap();
        assert!(close(r.probs(), &[0.5, 0.5]));
        assert_eq!(r.alphabet().letters(), &["b", "c"]);

        let r = p.restrict(&[0, 1, 2]).unwrap();
        assert!(close(r.probs(), &[0.5, 0.25, 0.25]));

        let p = Distribution::new(abc(), vec![0.2, 0.3, 0.5]).unwrap();
        let r = p.restrict(&[0, 2]).unwrap();
        assert!(close(r.probs(), &[2.0 / 7.0, 5.0 / 7.0]));
    }

    #[test]
    fn restrict_zero_mass_fails() {
        let p = Distribution::new(abc(), vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.restrict(&[1, 2]), Err(Error::ZeroMassSubset));
    }

    #[test]
    fn tolerance_boundary() {
        assert!(Distribution::new(abc(), vec![0.333333333, 0.333333333, 0.333333333]).is_ok());
        assert!(Distribution::new(abc(), vec![0.33, 0.33, 0.33]).is_err());
        assert!(Distribution::new(abc(), vec![1.2, -0.1, -0.1]).is_err());
        let r = Distribution::new_renormalized(abc(), vec![1.0, 1.0, 2.0]).unwrap();
        assert!(close(r.probs(), &[0.25, 0.25, 0.5]));
    }

    #[test]
    fn reduce_examples() {
        let abcd = Alphabet::new(["a", "b", "c", "d"]).unwrap();
        let p = Distribution::uniform(abcd.clone());
        let s = Partition::from_components(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert!(close(p.reduce(&s).unwrap().probs(), &[0.5, 0.5]));

        let p = Distribution::new(abcd, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let s = Partition::from_components(4, &[vec![0, 3], vec![1, 2]]).unwrap();
        let r = p.reduce(&s).unwrap();
        assert!(close(r.probs(), &[0.5, 0.5]));
        assert_eq!(r.alphabet().letters(), &["{a,d}", "{b,c}"]);

        let p3 = Distribution::new(abc(), vec![0.5, 0.25, 0.25]).unwrap();
        assert!(close(
            p3.reduce(&Partition::singletons(3)).unwrap().probs(),
            &[0.5, 0.25, 0.25]
        ));
        assert!(matches!(
            p3.reduce(&Partition::singletons(4)),
            Err(Error::PartitionMismatch(_))
        ));
    }

    #[test]
    fn joint_marginals_and_reduction() {
        let a = Alphabet::new(["x", "y"]).unwrap();
        let j =
            JointDistribution::new(a.clone(), abc(), vec![0.1, 0.2, 0.1, 0.3, 0.2, 0.1]).unwrap();
        assert!(close(j.marginal_rows().probs(), &[0.4, 0.6]));
        assert!(close(j.marginal_cols().probs(), &[0.4, 0.4, 0.2]));
        let sb = Partition::from_components(3, &[vec![0], vec![1, 2]]).unwrap();
        let r = j.reduce(&Partition::singletons(2), &sb).unwrap();
        assert!(close(&r, &[0.1, 0.3, 0.3, 0.3]));
        assert!(close(
            j.transpose().marginal_rows().probs(),
            &[0.4, 0.4, 0.2]
        ));
    }
}
