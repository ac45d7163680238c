//! Seeded random trials of the compression bound `μ_U ≤ H_U + 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{mu_u, optimize};
use crate::alphabet::{Alphabet, Distribution};
use crate::error::{Error, Result};
use crate::io::newick::{write_newick, BranchLengths};
use crate::random::flat_dirichlet;
use crate::ultrametric::{random_binary_ultrametric, UltrametricTree};

/// Slack allowed above `H_U + 1` before an instance counts as a violation.
pub const BOUND_TOL: f64 = 1e-9;

/// Parameters of a trial run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrialConfig {
    pub count: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub seed: u64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            count: 10_000,
            n_min: 3,
            n_max: 50,
            seed: 7,
        }
    }
}

/// Outcome of one random instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialInstance {
    pub index: usize,
    pub n: usize,
    pub h_u: f64,
    pub mu_u: f64,
    /// `μ_U - H_U`.
    pub gap: f64,
    pub restarts: usize,
}

/// A full description of an instance that broke the bound, enough to replay
/// it without the generator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub index: usize,
    pub seed: u64,
    /// The ultrametric tree with arc lengths.
    pub newick: String,
    pub letters: Vec<String>,
    pub probs: Vec<f64>,
    pub h_u: f64,
    pub mu_u: f64,
    /// Codeword of each letter of the optimized tree.
    pub codewords: Vec<String>,
}

/// Summary of a trial run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub config: TrialConfig,
    pub instances: Vec<TrialInstance>,
    pub max_gap: f64,
    pub max_gap_index: usize,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
}

/// The generator for instance `index`: the run seed selects the key and the
/// index selects the stream, so instances are independent of scheduling.
fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn run_instance(
    seed: u64,
    index: usize,
    n_min: usize,
    n_max: usize,
) -> Result<(TrialInstance, Option<Violation>)> {
    let mut rng = instance_rng(seed, index);
    let n = rng.random_range(n_min..=n_max);
    let alphabet = Alphabet::indexed(n)?;
    let d = random_binary_ultrametric(alphabet.clone(), &mut rng)?;
    let p = Distribution::new_renormalized(alphabet.clone(), flat_dirichlet(n, &mut rng))?;
    let tree = UltrametricTree::from_distance(&d)?;
    let h_u = tree.hu(&p)?;
    let outcome = optimize(&tree, &p)?;
    let mu = mu_u(&outcome.tree, &p, &d)?;
    let instance = TrialInstance {
        index,
        n,
        h_u,
        mu_u: mu,
        gap: mu - h_u,
        restarts: outcome.restarts,
    };
    let violation = (mu > h_u + 1.0 + BOUND_TOL).then(|| Violation {
        index,
        seed,
        newick: write_newick(&tree, BranchLengths::Arc),
        letters: alphabet.letters().to_vec(),
        probs: p.probs().to_vec(),
        h_u,
        mu_u: mu,
        codewords: outcome.tree.codewords(),
    });
    Ok((instance, violation))
}

/// Runs `count` random instances in parallel and reports the gap
/// `μ_U - H_U` of the optimized code on each. Violations of the bound are
/// recorded, not treated as errors.
pub fn run_bound_trials(config: TrialConfig) -> Result<TrialReport> {
    if config.count == 0 {
        return Err(Error::Validation("trial count must be at least 1".into()));
    }
    if config.n_min < 2 || config.n_max < config.n_min {
        return Err(Error::Validation(format!(
            "invalid letter range [{}, {}]",
            config.n_min, config.n_max
        )));
    }
    let results: Vec<(TrialInstance, Option<Violation>)> = (0..config.count)
        .into_par_iter()
        .map(|i| run_instance(config.seed, i, config.n_min, config.n_max))
        .collect::<Result<_>>()?;
    let mut instances = Vec::with_capacity(results.len());
    let mut violations = Vec::new();
    for (inst, v) in results {
        instances.push(inst);
        violations.extend(v);
    }
    let (max_gap_index, max_gap) =
        instances
            .iter()
            .map(|i| (i.index, i.gap))
            .fold((0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
    Ok(TrialReport {
        config,
        violation_count: violations.len(),
        instances,
        max_gap,
        max_gap_index,
        violations,
    })
}
