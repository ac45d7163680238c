//! Classical information measures in bits.
//!
//! Every structure-sensitive notion in this crate is a measure-weighted sum of
//! the kernels below, applied to reduced alphabets. The conventions
//! `0 * log 0 = 0` and `0 * log(0/0) = 0` hold throughout.

/// Absolute tolerance for probability sums.
pub const PROB_TOL: f64 = 1e-9;

/// `p * log2(1/p)` with the `0 * log 0 = 0` convention.
#[inline]
pub fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Sums by recursive halving so the result does not depend on how a caller
/// chunks the work.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

/// Shannon entropy `H(p)`.
///
/// The input need not be normalized; the raw `Σ p log 1/p` is returned.
pub fn entropy(p: &[f64]) -> f64 {
    let terms: Vec<f64> = p.iter().map(|&x| plogp(x)).collect();
    pairwise_sum(&terms)
}

/// Binary entropy `h(p) = H(p, 1 - p)`.
pub fn binary_entropy(p: f64) -> f64 {
    plogp(p) + plogp(1.0 - p)
}

/// Entropy of a row-major joint matrix.
pub fn joint_entropy(joint: &[f64]) -> f64 {
    entropy(joint)
}

fn row_sums(joint: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    (0..rows)
        .map(|r| joint[r * cols..(r + 1) * cols].iter().sum())
        .collect()
}

fn col_sums(joint: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    (0..cols)
        .map(|c| (0..rows).map(|r| joint[r * cols + c]).sum())
        .collect()
}

/// `H(Row | Col)` for a row-major `rows x cols` joint.
///
/// Computed term-wise as `Σ p(r,c) log(p(c)/p(r,c))`, so columns with zero
/// mass contribute nothing.
pub fn conditional_entropy_rows_given_cols(joint: &[f64], rows: usize, cols: usize) -> f64 {
    let pc = col_sums(joint, rows, cols);
    let mut terms = Vec::with_capacity(joint.len());
    for r in 0..rows {
        for c in 0..cols {
            let p = joint[r * cols + c];
            if p > 0.0 && pc[c] > 0.0 {
                terms.push(p * (pc[c] / p).log2());
            }
        }
    }
    pairwise_sum(&terms).max(0.0)
}

/// `H(Col | Row)` for a row-major `rows x cols` joint.
pub fn conditional_entropy_cols_given_rows(joint: &[f64], rows: usize, cols: usize) -> f64 {
    let pr = row_sums(joint, rows, cols);
    let mut terms = Vec::with_capacity(joint.len());
    for r in 0..rows {
        for c in 0..cols {
            let p = joint[r * cols + c];
            if p > 0.0 && pr[r] > 0.0 {
                terms.push(p * (pr[r] / p).log2());
            }
        }
    }
    pairwise_sum(&terms).max(0.0)
}

/// Mutual information `I(Row; Col)` of a row-major joint.
pub fn mutual_information(joint: &[f64], rows: usize, cols: usize) -> f64 {
    let pr = row_sums(joint, rows, cols);
    let pc = col_sums(joint, rows, cols);
    let mut terms = Vec::with_capacity(joint.len());
    for r in 0..rows {
        for c in 0..cols {
            let p = joint[r * cols + c];
            if p > 0.0 {
                terms.push(p * (p / (pr[r] * pc[c])).log2());
            }
        }
    }
    pairwise_sum(&terms).max(0.0)
}

/// Relative entropy `D(p || q)`; `+inf` when `q` is not absolutely
/// continuous with respect to `p`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "distributions must have equal length");
    let mut terms = Vec::with_capacity(p.len());
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            terms.push(pi * (pi / qi).log2());
        }
    }
    pairwise_sum(&terms).max(0.0)
}
