//! The compression algorithm for distance-sensitive code length.
//!
//! Starting from the ultrametric tree itself (binarized), every subtree is
//! optimized bottom-up. At each node the (up to four) sub-codes below the two
//! children are recombined into every binary tree over them; if a mixed
//! combination beats the current one, optimization restarts on the mixed
//! subtree.

use super::{enumerate_code_trees, node_cost, CodeNode, CodeTree};
use crate::alphabet::Distribution;
use crate::error::{Error, Result};
use crate::ultrametric::{DistanceMatrix, UltrametricTree};

/// Relative improvement a mixed pairing needs before it is preferred over
/// the simple combination.
const IMPROVEMENT_TOL: f64 = 1e-12;

/// Result of [`optimize`].
#[derive(Clone, Debug)]
pub struct OptimizeOutcome {
    pub tree: CodeTree,
    /// Number of times a mixed pairing won and optimization restarted.
    pub restarts: usize,
    /// `(cost before, cost after)` of the subtree handled at each step, where
    /// cost is the subtree's unnormalized contribution to `μ_U`.
    pub trace: Vec<(f64, f64)>,
}

/// The ultrametric tree as a binary code tree: each multi-way node is
/// binarized by repeatedly pairing its two least probable parts (ties broken
/// by smallest letter), which is Huffman's rule and yields an optimal code
/// for a uniform distance.
pub fn initial_code_tree(tree: &UltrametricTree, p: &Distribution) -> Result<CodeTree> {
    tree.alphabet()
        .ensure_same(p.alphabet(), "tree and distribution")?;
    fn build(tree: &UltrametricTree, i: usize, probs: &[f64]) -> (CodeNode, f64) {
        let node = tree.node(i);
        if node.is_leaf() {
            let a = node.leaves[0];
            return (CodeNode::Leaf(a), probs[a]);
        }
        let mut parts: Vec<(CodeNode, f64)> = node
            .children
            .iter()
            .map(|&c| build(tree, c, probs))
            .collect();
        while parts.len() > 1 {
            parts.sort_by(|x, y| {
                x.1.total_cmp(&y.1)
                    .then_with(|| x.0.min_letter().cmp(&y.0.min_letter()))
            });
            let (a, pa) = parts.remove(0);
            let (b, pb) = parts.remove(0);
            let (l, r) = if a.min_letter() < b.min_letter() {
                (a, b)
            } else {
                (b, a)
            };
            parts.push((CodeNode::branch(l, r), pa + pb));
        }
        parts.pop().expect("internal nodes have children")
    }
    let (root, _) = build(tree, tree.root(), p.probs());
    CodeTree::new(tree.num_leaves(), root)
}

/// Runs the compression algorithm from the ultrametric tree's own topology.
pub fn optimize(tree: &UltrametricTree, p: &Distribution) -> Result<OptimizeOutcome> {
    let n = tree.num_leaves();
    if n < 2 {
        return Err(Error::TooFewLetters { needed: 2, got: n });
    }
    let initial = initial_code_tree(tree, p)?;
    optimize_code(initial, p, &tree.to_distance_matrix())
}

/// Runs the compression algorithm from an arbitrary starting code tree.
pub fn optimize_code(
    code: CodeTree,
    p: &Distribution,
    d: &DistanceMatrix,
) -> Result<OptimizeOutcome> {
    let n = code.alphabet_len();
    if n < 2 {
        return Err(Error::TooFewLetters { needed: 2, got: n });
    }
    if p.len() != n || d.len() != n {
        return Err(Error::AlphabetMismatch(
            "code tree, distribution and distance differ in size".into(),
        ));
    }
    let mut opt = Optimizer {
        p: p.probs(),
        d,
        restarts: 0,
        cap: 10 * n * n,
        trace: Vec::new(),
    };
    let root = opt.run(code.into_root())?;
    Ok(OptimizeOutcome {
        tree: CodeTree::new(n, root)?,
        restarts: opt.restarts,
        trace: opt.trace,
    })
}

struct Optimizer<'a> {
    p: &'a [f64],
    d: &'a DistanceMatrix,
    restarts: usize,
    cap: usize,
    trace: Vec<(f64, f64)>,
}

/// A node of a candidate pairing with its letter set.
struct Part {
    node: CodeNode,
    leaves: Vec<usize>,
}

impl Part {
    fn new(node: CodeNode) -> Self {
        let leaves = node.leaves();
        Part { node, leaves }
    }
}

impl Optimizer<'_> {
    fn cost(&self, x: &[usize], y: &[usize]) -> f64 {
        node_cost(self.p, self.d, x, y)
    }

    fn subtree_cost(&self, node: &CodeNode) -> f64 {
        match node {
            CodeNode::Leaf(_) => 0.0,
            CodeNode::Branch(l, r) => {
                self.cost(&l.leaves(), &r.leaves()) + self.subtree_cost(l) + self.subtree_cost(r)
            }
        }
    }

    fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
        let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
        u.sort_unstable();
        u
    }

    fn run(&mut self, node: CodeNode) -> Result<CodeNode> {
        let mut current = node;
        loop {
            let CodeNode::Branch(l, r) = current else {
                return Ok(current);
            };
            let before = self.subtree_cost(&CodeNode::Branch(l.clone(), r.clone()));
            let left = self.run(*l)?;
            let right = self.run(*r)?;
            let (best, mixed) = self.unify(left, right);
            let after = self.subtree_cost(&best);
            self.trace.push((before, after));
            if !mixed {
                return Ok(best);
            }
            self.restarts += 1;
            if self.restarts > self.cap {
                return Err(Error::IterationCap(self.cap));
            }
            current = best;
        }
    }

    /// Chooses among every binary tree over the (up to four) sub-codes of
    /// `left` and `right`; the simple combination `(left, right)` wins ties.
    /// Returns the chosen tree and whether it mixes the two sides.
    fn unify(&self, left: CodeNode, right: CodeNode) -> (CodeNode, bool) {
        use CodeNode::{Branch, Leaf};
        let mut parts = Vec::with_capacity(4);
        let side = |node: CodeNode, parts: &mut Vec<Part>| -> CodeNode {
            match node {
                Branch(a, b) => {
                    let i = parts.len();
                    parts.push(Part::new(*a));
                    parts.push(Part::new(*b));
                    CodeNode::branch(Leaf(i), Leaf(i + 1))
                }
                leaf => {
                    parts.push(Part::new(leaf));
                    Leaf(parts.len() - 1)
                }
            }
        };
        let l = side(left, &mut parts);
        let r = side(right, &mut parts);
        let simple = CodeNode::branch(l, r);
        if parts.len() == 2 {
            let [a, b]: [Part; 2] = parts.try_into().ok().expect("two parts");
            return (CodeNode::branch(a.node, b.node), false);
        }
        let mut shapes = vec![simple.clone()];
        shapes.extend(
            enumerate_code_trees(parts.len())
                .into_iter()
                .map(CodeTree::into_root)
                .filter(|t| !same_shape(t, &simple)),
        );
        let costs: Vec<f64> = shapes
            .iter()
            .map(|t| self.shape_cost(t, &parts).1)
            .collect();
        let choice = self.choose(&costs);
        (materialize(&shapes[choice], &parts), choice != 0)
    }

    /// Letters and cost of a tree whose leaves index into `parts`.
    fn shape_cost(&self, shape: &CodeNode, parts: &[Part]) -> (Vec<usize>, f64) {
        match shape {
            CodeNode::Leaf(i) => (parts[*i].leaves.clone(), 0.0),
            CodeNode::Branch(a, b) => {
                let (x, cx) = self.shape_cost(a, parts);
                let (y, cy) = self.shape_cost(b, parts);
                let c = self.cost(&x, &y) + cx + cy;
                (Self::union(&x, &y), c)
            }
        }
    }

    /// Index of the cheapest candidate; candidate 0 (the simple combination)
    /// wins unless another is cheaper by more than the tolerance.
    fn choose(&self, costs: &[f64]) -> usize {
        let simple = costs[0];
        let mut best = 0;
        let mut best_cost = simple - IMPROVEMENT_TOL * simple.abs().max(1.0);
        for (i, &c) in costs.iter().enumerate().skip(1) {
            if c < best_cost {
                best = i;
                best_cost = c;
            }
        }
        best
    }
}

/// Equality of unordered binary trees.
fn same_shape(a: &CodeNode, b: &CodeNode) -> bool {
    match (a, b) {
        (CodeNode::Leaf(x), CodeNode::Leaf(y)) => x == y,
        (CodeNode::Branch(a0, a1), CodeNode::Branch(b0, b1)) => {
            (same_shape(a0, b0) && same_shape(a1, b1)) || (same_shape(a0, b1) && same_shape(a1, b0))
        }
        _ => false,
    }
}

/// Replaces each leaf `i` of `shape` by the sub-code `parts[i]`.
fn materialize(shape: &CodeNode, parts: &[Part]) -> CodeNode {
    match shape {
        CodeNode::Leaf(i) => parts[*i].node.clone(),
        CodeNode::Branch(a, b) => CodeNode::branch(materialize(a, parts), materialize(b, parts)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::coding::{enumerate_code_trees, mu_u};

    fn two_cluster() -> DistanceMatrix {
        DistanceMatrix::from_fn(Alphabet::indexed(4).unwrap(), |a, b| {
            if a / 2 == b / 2 {
                0.2
            } else {
                1.0
            }
        })
        .unwrap()
    }

    #[test]
    fn matching_tree_is_kept() {
        let d = two_cluster();
        let t = UltrametricTree::from_distance(&d).unwrap();
        let u = Distribution::uniform(Alphabet::indexed(4).unwrap());
        let out = optimize(&t, &u).unwrap();
        let m = mu_u(&out.tree, &u, &d).unwrap();
        assert!((m - 1.2).abs() < 1e-12);
        let best = enumerate_code_trees(4)
            .iter()
            .map(|c| mu_u(c, &u, &d).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!((m - best).abs() < 1e-12);
        assert!(m <= t.hu(&u).unwrap() + 1.0);
    }

    #[test]
    fn two_letters() {
        let alphabet = Alphabet::indexed(2).unwrap();
        let d = DistanceMatrix::uniform(alphabet.clone(), 0.7).unwrap();
        let t = UltrametricTree::from_distance(&d).unwrap();
        let p = Distribution::new(alphabet, vec![0.2, 0.8]).unwrap();
        let out = optimize(&t, &p).unwrap();
        assert!((mu_u(&out.tree, &p, &d).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn hamming_dyadic_matches_entropy() {
        let alphabet = Alphabet::indexed(3).unwrap();
        let d = DistanceMatrix::uniform(alphabet.clone(), 1.0).unwrap();
        let t = UltrametricTree::from_distance(&d).unwrap();
        let p = Distribution::new(alphabet, vec![0.5, 0.25, 0.25]).unwrap();
        let out = optimize(&t, &p).unwrap();
        assert!((mu_u(&out.tree, &p, &d).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn improves_a_bad_start() {
        let d = two_cluster();
        let u = Distribution::uniform(Alphabet::indexed(4).unwrap());
        let crossed = CodeTree::new(
            4,
            CodeNode::branch(
                CodeNode::branch(CodeNode::Leaf(0), CodeNode::Leaf(2)),
                CodeNode::branch(CodeNode::Leaf(1), CodeNode::Leaf(3)),
            ),
        )
        .unwrap();
        let out = optimize_code(crossed, &u, &d).unwrap();
        assert!(out.restarts >= 1);
        assert!((mu_u(&out.tree, &u, &d).unwrap() - 1.2).abs() < 1e-12);
        assert!(out.trace.iter().all(|(b, a)| *a <= b + 1e-12));
    }

    #[test]
    fn too_few_letters() {
        let d = DistanceMatrix::new(Alphabet::indexed(1).unwrap(), vec![0.0]).unwrap();
        let t = UltrametricTree::from_distance(&d).unwrap();
        let p = Distribution::uniform(Alphabet::indexed(1).unwrap());
        assert!(matches!(optimize(&t, &p), Err(Error::TooFewLetters { .. })));
    }
}
