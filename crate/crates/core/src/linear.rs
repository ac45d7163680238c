//! Structure-sensitive information for states on the real line.
//!
//! A finite point set `a_1 < … < a_n` induces `n - 1` threshold partitions
//! `{a ≤ a_i} | {a > a_i}`, each weighted by the gap `a_{i+1} - a_i`. The
//! entropy `H_R` is `H_S` over this structure; it behaves like a measure of
//! spread, comparable to the standard deviation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::Serialize;

use crate::alphabet::{Alphabet, Distribution, JointDistribution};
use crate::entropy::{binary_entropy, kl_divergence, pairwise_sum};
use crate::error::{Error, Result};
use crate::notions::{Direction, StructuredJoint};
use crate::partition::Partition;
use crate::structure::PartitionStructure;

/// Normal draws are clipped to `±NORMAL_CLIP` standard deviations.
pub const NORMAL_CLIP: f64 = 6.0;

/// A strictly increasing set of real points.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearAlphabet {
    points: Vec<f64>,
    alphabet: Alphabet,
}

impl LinearAlphabet {
    /// Letters are named after the values.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        let letters: Vec<String> = points.iter().map(|x| format!("{x}")).collect();
        Self::with_letters(points, letters)
    }

    pub fn with_letters(points: Vec<f64>, letters: Vec<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::TooFewPoints(0));
        }
        if let Some(x) = points.iter().find(|x| !x.is_finite()) {
            return Err(Error::Validation(format!("point {x} is not finite")));
        }
        for i in 1..points.len() {
            if points[i] == points[i - 1] {
                return Err(Error::DuplicateValues(points[i]));
            }
            if points[i] < points[i - 1] {
                return Err(Error::NotIncreasing(i));
            }
        }
        if letters.len() != points.len() {
            return Err(Error::Validation(format!(
                "{} letters for {} points",
                letters.len(),
                points.len()
            )));
        }
        Ok(LinearAlphabet {
            points,
            alphabet: Alphabet::new(letters)?,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `a_n - a_1`.
    pub fn span(&self) -> f64 {
        self.points[self.points.len() - 1] - self.points[0]
    }

    /// `a_n - a_1 = 1` within `1e-9`.
    pub fn is_normalized(&self) -> bool {
        (self.span() - 1.0).abs() <= 1e-9
    }

    /// The affine image on `[0, 1]`, keeping letter names.
    pub fn normalized(&self) -> Result<LinearAlphabet> {
        if self.len() < 2 {
            return Err(Error::TooFewPoints(self.len()));
        }
        let (lo, span) = (self.points[0], self.span());
        let points = self.points.iter().map(|x| (x - lo) / span).collect();
        LinearAlphabet::with_letters(points, self.alphabet.letters().to_vec())
    }

    /// The gaps `a_{i+1} - a_i`.
    pub fn gaps(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| w[1] - w[0]).collect()
    }

    fn require_two(&self) -> Result<()> {
        if self.len() < 2 {
            Err(Error::TooFewPoints(self.len()))
        } else {
            Ok(())
        }
    }
}

/// Sorts `values`, merges equal values and sums their probabilities. Without
/// `probs` every value carries weight `1/n`.
pub fn collapse_duplicates(
    values: &[f64],
    probs: Option<&[f64]>,
) -> Result<(LinearAlphabet, Distribution)> {
    if let Some(p) = probs {
        if p.len() != values.len() {
            return Err(Error::Validation(format!(
                "{} probabilities for {} values",
                p.len(),
                values.len()
            )));
        }
    }
    if let Some(x) = values.iter().find(|x| !x.is_finite()) {
        return Err(Error::Validation(format!("value {x} is not finite")));
    }
    let uniform = 1.0 / values.len() as f64;
    let mut pairs: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, probs.map_or(uniform, |p| p[i])))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut points: Vec<f64> = Vec::with_capacity(pairs.len());
    let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
    for (x, w) in pairs {
        if points.last() == Some(&x) {
            *weights.last_mut().expect("parallel vectors") += w;
        } else {
            points.push(x);
            weights.push(w);
        }
    }
    let a = LinearAlphabet::new(points)?;
    let p = Distribution::new_renormalized(a.alphabet().clone(), weights)?;
    Ok((a, p))
}

/// The threshold partitions of `a`, each with its gap as measure.
pub fn linear_structure(a: &LinearAlphabet) -> Result<PartitionStructure> {
    a.require_two()?;
    let n = a.len();
    let terms = a
        .gaps()
        .into_iter()
        .enumerate()
        .map(|(i, gap)| {
            let below: Vec<usize> = (0..=i).collect();
            Ok((Partition::binary(n, &below)?, gap))
        })
        .collect::<Result<Vec<_>>>()?;
    PartitionStructure::new(a.alphabet().clone(), terms)
}

/// `H_R = Σ (a_{i+1} - a_i) h(P(a ≤ a_i))`.
pub fn h_r(a: &LinearAlphabet, p: &Distribution) -> Result<f64> {
    a.require_two()?;
    a.alphabet()
        .ensure_same(p.alphabet(), "points and distribution")?;
    let mut below = 0.0;
    let terms: Vec<f64> = a
        .gaps()
        .iter()
        .zip(p.probs())
        .map(|(gap, q)| {
            below += q;
            gap * binary_entropy(below.clamp(0.0, 1.0))
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

fn linear_joint(
    a: &LinearAlphabet,
    b: &LinearAlphabet,
    joint: &JointDistribution,
) -> Result<StructuredJoint> {
    a.alphabet()
        .ensure_same(joint.rows(), "row points and joint distribution")?;
    b.alphabet()
        .ensure_same(joint.cols(), "column points and joint distribution")?;
    StructuredJoint::new(joint.clone(), linear_structure(a)?, linear_structure(b)?)
}

/// `H_R(A × B)`: threshold pairs weighted by the product of their gaps.
pub fn h_r_joint(a: &LinearAlphabet, b: &LinearAlphabet, joint: &JointDistribution) -> Result<f64> {
    Ok(linear_joint(a, b, joint)?.h_s_joint())
}

/// Conditional `H_R`, the structure-sensitive conditional entropy on the two
/// linear structures.
pub fn h_r_conditional(
    a: &LinearAlphabet,
    b: &LinearAlphabet,
    joint: &JointDistribution,
    direction: Direction,
) -> Result<f64> {
    Ok(linear_joint(a, b, joint)?.h_s_conditional(direction))
}

/// `I_R(A; B)`.
pub fn i_r(a: &LinearAlphabet, b: &LinearAlphabet, joint: &JointDistribution) -> Result<f64> {
    Ok(linear_joint(a, b, joint)?.i_s())
}

/// `DKL_R(P¹ || P²) = Σ gap · D(threshold split of P¹ || of P²)`; `+inf` if
/// some threshold side has zero `P²` mass but positive `P¹` mass.
pub fn dkl_r(a: &LinearAlphabet, p1: &Distribution, p2: &Distribution) -> Result<f64> {
    a.require_two()?;
    a.alphabet()
        .ensure_same(p1.alphabet(), "points and distribution")?;
    a.alphabet()
        .ensure_same(p2.alphabet(), "points and distribution")?;
    let (mut c1, mut c2) = (0.0, 0.0);
    let mut terms = Vec::with_capacity(a.len() - 1);
    for (i, gap) in a.gaps().into_iter().enumerate() {
        c1 += p1.prob(i);
        c2 += p2.prob(i);
        let (x, y) = (c1.clamp(0.0, 1.0), c2.clamp(0.0, 1.0));
        terms.push(gap * kl_divergence(&[x, 1.0 - x], &[y, 1.0 - y]));
    }
    if terms.iter().any(|t| t.is_infinite()) {
        return Ok(f64::INFINITY);
    }
    Ok(pairwise_sum(&terms))
}

/// `H_R` of a sample with every value weighted `1/n`. Values may come in
/// any order but must be distinct.
pub fn h_r_sample(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::TooFewPoints(values.len()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateValues(w[0]));
    }
    if let Some(x) = sorted.iter().find(|x| !x.is_finite()) {
        return Err(Error::Validation(format!("value {x} is not finite")));
    }
    let n = sorted.len() as f64;
    let terms: Vec<f64> = sorted
        .windows(2)
        .enumerate()
        .map(|(i, w)| (w[1] - w[0]) * binary_entropy((i + 1) as f64 / n))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `∫ h(F(x)) dx` over `[lo, hi]` by the trapezoid rule with spacing
/// `step` (the last interval may be shorter). `F` values are clamped to
/// `[0, 1]`; a decrease larger than `1e-12` is rejected.
pub fn h_r_limit(cdf: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::Validation(format!("invalid interval [{lo}, {hi}]")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Validation(format!("invalid step {step}")));
    }
    let intervals = ((hi - lo) / step).ceil() as usize;
    let xs: Vec<f64> = (0..=intervals)
        .map(|k| {
            if k == intervals {
                hi
            } else {
                lo + k as f64 * step
            }
        })
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| cdf(x)).collect();
    for k in 1..fs.len() {
        if fs[k].is_nan() || fs[k] < fs[k - 1] - 1e-12 {
            return Err(Error::NonMonotoneCdf(xs[k]));
        }
    }
    let hs: Vec<f64> = fs
        .iter()
        .map(|f| binary_entropy(f.clamp(0.0, 1.0)))
        .collect();
    let terms: Vec<f64> = (1..xs.len())
        .map(|k| 0.5 * (xs[k] - xs[k - 1]) * (hs[k] + hs[k - 1]))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Sampling distribution for the dispersion simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleDistribution {
    Uniform,
    /// Standard normal, clipped to `±NORMAL_CLIP`.
    Normal,
}

/// Pearson correlation with two-pass mean subtraction; `NaN` when either
/// coordinate has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "paired samples");
    let n = x.len() as f64;
    let mx = pairwise_sum(x) / n;
    let my = pairwise_sum(y) / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    sxy / (sxx.sqrt() * syy.sqrt())
}

/// `(H_R, population standard deviation)` of a sample after min-max
/// normalization to `[0, 1]`. Repeated values are merged with summed
/// weights.
pub fn dispersion_pair(sample: &[f64]) -> Result<(f64, f64)> {
    let lo = sample.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sample.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::Validation("sample has no spread".into()));
    }
    let normalized: Vec<f64> = sample.iter().map(|x| (x - lo) / (hi - lo)).collect();
    let (a, p) = collapse_duplicates(&normalized, None)?;
    let hr = h_r(&a, &p)?;
    let n = normalized.len() as f64;
    let mean = pairwise_sum(&normalized) / n;
    let var = normalized
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .sum::<f64>()
        / n;
    Ok((hr, var.sqrt()))
}

/// Correlation of `H_R` with the standard deviation over a set of samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub samples: usize,
    pub points_per_sample: usize,
    pub distribution: SampleDistribution,
    pub seed: u64,
    /// Pearson `r`; `NaN` if either measure is constant across samples.
    pub correlation: f64,
    pub mean_h_r: f64,
    pub mean_stddev: f64,
}

/// Pearson correlation between `H_R` and standard deviation over samples.
pub fn dispersion_correlation(samples: &[Vec<f64>]) -> Result<(f64, Vec<(f64, f64)>)> {
    let pairs = samples
        .iter()
        .map(|s| dispersion_pair(s))
        .collect::<Result<Vec<_>>>()?;
    let (h, sd): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    let r = pearson(&h, &sd);
    if r.is_nan() {
        log::warn!("correlation undefined: a dispersion measure is constant across samples");
    }
    Ok((r, pairs))
}

/// Draws `n_samples` samples of `points_per_sample` points, normalizes each
/// to `[0, 1]` and correlates `H_R` with the standard deviation. Sample `i`
/// uses stream `i` of a generator keyed by `seed`.
pub fn stddev_correlation_sim(
    n_samples: usize,
    points_per_sample: usize,
    dist: SampleDistribution,
    seed: u64,
) -> Result<CorrelationReport> {
    if points_per_sample < 3 {
        return Err(Error::TooFewPoints(points_per_sample));
    }
    if n_samples < 2 {
        return Err(Error::Validation("at least 2 samples required".into()));
    }
    let samples: Vec<Vec<f64>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            match dist {
                SampleDistribution::Uniform => {
                    let u = Uniform::new(0.0, 1.0).expect("valid range");
                    (0..points_per_sample).map(|_| u.sample(&mut rng)).collect()
                }
                SampleDistribution::Normal => (0..points_per_sample)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        z.clamp(-NORMAL_CLIP, NORMAL_CLIP)
                    })
                    .collect(),
            }
        })
        .collect();
    let (correlation, pairs) = dispersion_correlation(&samples)?;
    let n = pairs.len() as f64;
    Ok(CorrelationReport {
        samples: n_samples,
        points_per_sample,
        distribution: dist,
        seed,
        correlation,
        mean_h_r: pairs.iter().map(|p| p.0).sum::<f64>() / n,
        mean_stddev: pairs.iter().map(|p| p.1).sum::<f64>() / n,
    })
}

/// One evaluation of an expected ordering of `H_R` values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectationCheck {
    pub name: &'static str,
    /// The perturbation size.
    pub epsilon: f64,
    /// Must be strictly smaller than `rhs`.
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn h_r_of(points: &[f64], probs: &[f64]) -> Result<f64> {
    let a = LinearAlphabet::new(points.to_vec())?;
    let p = Distribution::new(a.alphabet().clone(), probs.to_vec())?;
    h_r(&a, &p)
}

/// Three orderings `H_R` should respect, each evaluated at `epsilon`:
///
/// * `near-points`: on `{0, 1/3, 1-ε, 1}` with uniform `P`, `H_R` is closer
///   to that of `{0, 1/3, 1}` with the two near points merged
///   (`P = (1/4, 1/4, 1/2)`) than to the evenly spaced `{0, 1/3, 2/3, 1}`.
///   Meaningful for `0 < ε < 1/6`.
/// * `mass-toward-middle`: on `{0, 1/2, 1}`, moving `ε` of mass from the
///   middle to the right end scores higher than moving it the other way:
///   `H_R(1/3, 1/3+ε, 1/3-ε) < H_R(1/3, 1/3-ε, 1/3+ε)`, for `0 < ε ≤ 1/3`.
/// * `middle-toward-light-end`: with `P = (1/4, 1/4, 1/2)`, moving the middle
///   point toward the light end lowers `H_R`:
///   `H_R({0, 1/2+ε, 1}) < H_R({0, 1/2-ε, 1})`, for `0 < ε < 1/2`.
pub fn check_expectations(epsilon: f64) -> Result<Vec<ExpectationCheck>> {
    let third = 1.0 / 3.0;
    let mut out = Vec::with_capacity(3);

    if epsilon > 0.0 && epsilon < 1.0 / 6.0 {
        let spread = h_r_of(&[0.0, third, 2.0 * third, 1.0], &[0.25; 4])?;
        let near = h_r_of(&[0.0, third, 1.0 - epsilon, 1.0], &[0.25; 4])?;
        let merged = h_r_of(&[0.0, third, 1.0], &[0.25, 0.25, 0.5])?;
        let (lhs, rhs) = ((near - merged).abs(), (near - spread).abs());
        out.push(ExpectationCheck {
            name: "near-points",
            epsilon,
            lhs,
            rhs,
            holds: lhs < rhs,
        });
    }
    if epsilon > 0.0 && epsilon <= third {
        let mid = [0.0, 0.5, 1.0];
        let rhs = h_r_of(&mid, &[third, third - epsilon, third + epsilon])?;
        let lhs = h_r_of(&mid, &[third, third + epsilon, third - epsilon])?;
        out.push(ExpectationCheck {
            name: "mass-toward-middle",
            epsilon,
            lhs,
            rhs,
            holds: lhs < rhs,
        });
    }
    if epsilon > 0.0 && epsilon < 0.5 {
        let p = [0.25, 0.25, 0.5];
        let rhs = h_r_of(&[0.0, 0.5 - epsilon, 1.0], &p)?;
        let lhs = h_r_of(&[0.0, 0.5 + epsilon, 1.0], &p)?;
        out.push(ExpectationCheck {
            name: "middle-toward-light-end",
            epsilon,
            lhs,
            rhs,
            holds: lhs < rhs,
        });
    }
    Ok(out)
}
