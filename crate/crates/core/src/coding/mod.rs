//! Binary code trees and structure-sensitive code lengths.
//!
//! A code tree reveals a letter one bit at a time. Each internal node splits
//! the letters still possible into the two sets `A_0` and `A_1`; the
//! distance-sensitive code length credits the node with the expected
//! distance between those sets instead of a flat one bit.

mod esscl;
mod exact;
mod optimize;
mod trials;

pub use esscl::{esscl, typical_compression_check, EssclReport, NodeMerit, TypicalCompression};
pub use exact::{optimal_code_tree, EXACT_MAX_LETTERS};
pub use optimize::{initial_code_tree, optimize, optimize_code, OptimizeOutcome};
pub use trials::{run_bound_trials, TrialConfig, TrialInstance, TrialReport, Violation, BOUND_TOL};

use crate::alphabet::Distribution;
use crate::entropy::binary_entropy;
use crate::error::{Error, Result};
use crate::ultrametric::DistanceMatrix;

/// A node of a strictly binary code tree. Left edges carry bit 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CodeNode {
    Leaf(usize),
    Branch(Box<CodeNode>, Box<CodeNode>),
}

impl CodeNode {
    pub fn branch(left: CodeNode, right: CodeNode) -> CodeNode {
        CodeNode::Branch(Box::new(left), Box::new(right))
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, CodeNode::Leaf(_))
    }

    /// Letters below this node in left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            CodeNode::Leaf(a) => out.push(*a),
            CodeNode::Branch(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    /// Smallest letter index below this node.
    pub(crate) fn min_letter(&self) -> usize {
        match self {
            CodeNode::Leaf(a) => *a,
            CodeNode::Branch(l, r) => l.min_letter().min(r.min_letter()),
        }
    }

    fn visit_internal<'a>(
        &'a self,
        path: &mut String,
        f: &mut dyn FnMut(&str, &'a CodeNode, &'a CodeNode),
    ) {
        if let CodeNode::Branch(l, r) = self {
            f(path, l, r);
            path.push('0');
            l.visit_internal(path, f);
            path.pop();
            path.push('1');
            r.visit_internal(path, f);
            path.pop();
        }
    }
}

/// A binary code tree whose leaves are exactly the letters `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CodeTree {
    n: usize,
    root: CodeNode,
}

impl CodeTree {
    /// Validates that every letter of `0..n` appears exactly once.
    pub fn new(n: usize, root: CodeNode) -> Result<Self> {
        let leaves = root.leaves();
        let mut seen = vec![false; n];
        for &a in &leaves {
            if a >= n {
                return Err(Error::InvalidCodeTree(format!(
                    "letter {a} outside alphabet of {n}"
                )));
            }
            if seen[a] {
                return Err(Error::InvalidCodeTree(format!("letter {a} appears twice")));
            }
            seen[a] = true;
        }
        if leaves.len() != n {
            return Err(Error::InvalidCodeTree(format!(
                "{} leaves for an alphabet of {n}",
                leaves.len()
            )));
        }
        Ok(CodeTree { n, root })
    }

    /// The balanced tree that halves the index range `0..n` at every node
    /// (the larger half on the left).
    pub fn balanced(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewLetters { needed: 1, got: 0 });
        }
        fn build(lo: usize, hi: usize) -> CodeNode {
            if hi - lo == 1 {
                CodeNode::Leaf(lo)
            } else {
                let mid = lo + (hi - lo).div_ceil(2);
                CodeNode::branch(build(lo, mid), build(mid, hi))
            }
        }
        Ok(CodeTree {
            n,
            root: build(0, n),
        })
    }

    pub fn root(&self) -> &CodeNode {
        &self.root
    }

    pub fn into_root(self) -> CodeNode {
        self.root
    }

    pub fn alphabet_len(&self) -> usize {
        self.n
    }

    /// Calls `f(path, left, right)` for every internal node in pre-order,
    /// where `path` is the node's bit string from the root.
    pub fn for_each_internal<'a>(&'a self, f: &mut dyn FnMut(&str, &'a CodeNode, &'a CodeNode)) {
        self.root.visit_internal(&mut String::new(), f);
    }

    /// The left/right letter sets of every internal node, in pre-order.
    pub fn splits(&self) -> Vec<(String, Vec<usize>, Vec<usize>)> {
        let mut out = Vec::new();
        self.for_each_internal(&mut |path, l, r| {
            out.push((path.to_string(), l.leaves(), r.leaves()))
        });
        out
    }

    /// Codeword of every letter, indexed by letter.
    pub fn codewords(&self) -> Vec<String> {
        let mut out = vec![String::new(); self.n];
        fn walk(node: &CodeNode, path: &mut String, out: &mut [String]) {
            match node {
                CodeNode::Leaf(a) => out[*a] = path.clone(),
                CodeNode::Branch(l, r) => {
                    path.push('0');
                    walk(l, path, out);
                    path.pop();
                    path.push('1');
                    walk(r, path, out);
                    path.pop();
                }
            }
        }
        walk(&self.root, &mut String::new(), &mut out);
        out
    }

    /// Classical expected code length `Σ P(a) |codeword(a)|`.
    pub fn expected_length(&self, p: &Distribution) -> Result<f64> {
        self.check_len(p.len())?;
        Ok(self
            .codewords()
            .iter()
            .zip(p.probs())
            .map(|(w, q)| q * w.len() as f64)
            .sum())
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n == self.n {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(format!(
                "code tree on {} letters, input on {n}",
                self.n
            )))
        }
    }
}

/// `D(X, Y)` with each side weighted by its conditional probability. A side
/// with zero mass is weighted uniformly instead, which keeps the value
/// meaningful (and equal to the constant for a uniform distance) at nodes
/// the source never reaches.
pub(crate) fn split_distance(p: &[f64], d: &DistanceMatrix, x: &[usize], y: &[usize]) -> f64 {
    fn weights(p: &[f64], set: &[usize]) -> Vec<f64> {
        let mass: f64 = set.iter().map(|&a| p[a]).sum();
        if mass > 0.0 {
            set.iter().map(|&a| p[a] / mass).collect()
        } else {
            vec![1.0 / set.len() as f64; set.len()]
        }
    }
    let wx = weights(p, x);
    let wy = weights(p, y);
    let mut s = 0.0;
    for (&a, &u) in x.iter().zip(&wx) {
        if u == 0.0 {
            continue;
        }
        for (&b, &v) in y.iter().zip(&wy) {
            s += u * v * d.get(a, b);
        }
    }
    s
}

/// `P(X ∪ Y) D(X, Y)`: a node's contribution to `μ_U`.
pub(crate) fn node_cost(p: &[f64], d: &DistanceMatrix, x: &[usize], y: &[usize]) -> f64 {
    let mass: f64 = x.iter().chain(y).map(|&a| p[a]).sum();
    if mass <= 0.0 {
        0.0
    } else {
        mass * split_distance(p, d, x, y)
    }
}

fn check_inputs(code: &CodeTree, p: &Distribution, d: &DistanceMatrix) -> Result<()> {
    code.check_len(p.len())?;
    code.check_len(d.len())?;
    p.alphabet()
        .ensure_same(d.alphabet(), "distribution and distance")
}

/// Distance-sensitive expected code length
/// `μ_U = Σ_{internal c} P(A^c) D(A^{c0}, A^{c1})`.
pub fn mu_u(code: &CodeTree, p: &Distribution, d: &DistanceMatrix) -> Result<f64> {
    check_inputs(code, p, d)?;
    let mut total = 0.0;
    code.for_each_internal(&mut |_, l, r| {
        total += node_cost(p.probs(), d, &l.leaves(), &r.leaves())
    });
    Ok(total)
}

/// `μ_U` by its defining recursion on conditional probabilities:
/// `μ_U(A) = D(A_0, A_1) + Σ_i P(A_i | A) μ_U(A_i)`.
pub fn mu_u_recursive(code: &CodeTree, p: &Distribution, d: &DistanceMatrix) -> Result<f64> {
    check_inputs(code, p, d)?;
    Ok(recurse(code.root(), p.probs(), d, false))
}

/// `λ_U = Σ_{internal c} P(A^c) D(A^{c0}, A^{c1}) h(P(A^{c0} | A^c))`.
pub fn lambda_u(code: &CodeTree, p: &Distribution, d: &DistanceMatrix) -> Result<f64> {
    check_inputs(code, p, d)?;
    let probs = p.probs();
    let mut total = 0.0;
    code.for_each_internal(&mut |_, l, r| {
        let (x, y) = (l.leaves(), r.leaves());
        let px: f64 = x.iter().map(|&a| probs[a]).sum();
        let py: f64 = y.iter().map(|&a| probs[a]).sum();
        if px + py > 0.0 {
            total += node_cost(probs, d, &x, &y) * binary_entropy(px / (px + py));
        }
    });
    Ok(total)
}

/// `λ_U` by its defining recursion.
pub fn lambda_u_recursive(code: &CodeTree, p: &Distribution, d: &DistanceMatrix) -> Result<f64> {
    check_inputs(code, p, d)?;
    Ok(recurse(code.root(), p.probs(), d, true))
}

fn recurse(node: &CodeNode, probs: &[f64], d: &DistanceMatrix, damped: bool) -> f64 {
    let CodeNode::Branch(l, r) = node else {
        return 0.0;
    };
    let (x, y) = (l.leaves(), r.leaves());
    let px: f64 = x.iter().map(|&a| probs[a]).sum();
    let py: f64 = y.iter().map(|&a| probs[a]).sum();
    let total = px + py;
    if total <= 0.0 {
        return 0.0;
    }
    let mut value = split_distance(probs, d, &x, &y);
    if damped {
        value *= binary_entropy(px / total);
    }
    for (child, mass) in [(l, px), (r, py)] {
        if mass > 0.0 {
            let conditional: Vec<f64> = probs.iter().map(|&q| q / mass).collect();
            value += mass / total * recurse(child, &conditional, d, damped);
        }
    }
    value
}

/// Every binary code tree on the letters `0..n` (as unordered trees: the two
/// children of a node are never swapped). There are `(2n-3)!!` of them, so
/// keep `n` small.
pub fn enumerate_code_trees(n: usize) -> Vec<CodeTree> {
    if n == 0 {
        return Vec::new();
    }
    // Insert letters one at a time at every edge (including above the root).
    let mut trees = vec![CodeNode::Leaf(0)];
    for a in 1..n {
        let mut next = Vec::new();
        for t in &trees {
            insert_everywhere(t, a, &mut next);
        }
        trees = next;
    }
    trees.into_iter().map(|root| CodeTree { n, root }).collect()
}

fn insert_everywhere(t: &CodeNode, a: usize, out: &mut Vec<CodeNode>) {
    out.push(CodeNode::branch(t.clone(), CodeNode::Leaf(a)));
    if let CodeNode::Branch(l, r) = t {
        let mut left = Vec::new();
        insert_everywhere(l, a, &mut left);
        for x in left {
            out.push(CodeNode::branch(x, (**r).clone()));
        }
        let mut right = Vec::new();
        insert_everywhere(r, a, &mut right);
        for x in right {
            out.push(CodeNode::branch((**l).clone(), x));
        }
    }
}
