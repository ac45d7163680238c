//! The exact minimum of `μ_U` over all binary code trees, by dynamic
//! programming over letter subsets.

use super::{node_cost, CodeNode, CodeTree};
use crate::alphabet::Distribution;
use crate::error::{Error, Result};
use crate::ultrametric::DistanceMatrix;

/// Largest alphabet [`optimal_code_tree`] accepts; the search visits `3^n`
/// subset pairs.
pub const EXACT_MAX_LETTERS: usize = 16;

/// A code tree of minimum `μ_U` together with that minimum.
///
/// A node's cost `P(X ∪ Y) D(X, Y)` depends only on its two letter sets, so
/// the best tree on a set `S` is the best split `S = X ∪ Y` plus the best
/// trees on `X` and `Y`.
pub fn optimal_code_tree(p: &Distribution, d: &DistanceMatrix) -> Result<(CodeTree, f64)> {
    p.alphabet()
        .ensure_same(d.alphabet(), "distribution and distance")?;
    let n = p.len();
    if n < 2 {
        return Err(Error::TooFewLetters { needed: 2, got: n });
    }
    if n > EXACT_MAX_LETTERS {
        return Err(Error::UnsupportedRegime(format!(
            "exact search supports at most {EXACT_MAX_LETTERS} letters, got {n}"
        )));
    }
    let probs = p.probs();
    let full = (1usize << n) - 1;
    let members = |mask: usize| -> Vec<usize> { (0..n).filter(|&a| mask >> a & 1 == 1).collect() };

    // mass[S] = P(S); pair[S] = Σ_{a,b ∈ S} p_a p_b D(a,b) over ordered pairs.
    let mut mass = vec![0.0; full + 1];
    let mut pair = vec![0.0; full + 1];
    for s in 1..=full {
        let a = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        let mut link = 0.0;
        for b in 0..n {
            if rest >> b & 1 == 1 {
                link += probs[b] * d.get(a, b);
            }
        }
        mass[s] = mass[rest] + probs[a];
        pair[s] = pair[rest] + 2.0 * probs[a] * link;
    }
    let cost = |x: usize, y: usize| -> f64 {
        let (mx, my) = (mass[x], mass[y]);
        if mx > 0.0 && my > 0.0 {
            let cross = 0.5 * (pair[x | y] - pair[x] - pair[y]);
            (mx + my) * cross / (mx * my)
        } else {
            node_cost(probs, d, &members(x), &members(y))
        }
    };

    let mut best = vec![0.0; full + 1];
    let mut choice = vec![0usize; full + 1];
    for s in 1..=full {
        if s.count_ones() < 2 {
            continue;
        }
        // Each split once: the side holding the lowest letter of `s`.
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut top = f64::INFINITY;
        let mut arg = 0;
        let mut sub = rest;
        loop {
            let x = sub | low;
            if x != s {
                let y = s ^ x;
                let c = cost(x, y) + best[x] + best[y];
                if c < top {
                    top = c;
                    arg = x;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best[s] = top;
        choice[s] = arg;
    }

    fn build(s: usize, choice: &[usize]) -> CodeNode {
        if s.count_ones() == 1 {
            return CodeNode::Leaf(s.trailing_zeros() as usize);
        }
        let x = choice[s];
        CodeNode::branch(build(x, choice), build(s ^ x, choice))
    }
    Ok((CodeTree::new(n, build(full, &choice))?, best[full]))
}
