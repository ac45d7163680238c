//! Ultrametric distances, the trees they induce, and ultrametric entropy.
//!
//! Four independent formulations of the ultrametric entropy `H_U` are
//! provided. They must agree to within floating point error, which the test
//! suite uses as a cross-check on each of them.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::alphabet::{normalize_subset, Alphabet, Distribution};
use crate::entropy::{binary_entropy, entropy, plogp};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::structure::PartitionStructure;

/// Absolute slack in the ultrametric inequality and in normalization checks.
pub const ULTRAMETRIC_TOL: f64 = 1e-9;
/// Relative tolerance under which two distances share a tree level.
pub const LEVEL_TOL: f64 = 1e-9;

/// A symmetric, non-negative distance with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    alphabet: Alphabet,
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates a row-major `n x n` matrix.
    pub fn new(alphabet: Alphabet, d: Vec<f64>) -> Result<Self> {
        let n = alphabet.len();
        if d.len() != n * n {
            return Err(Error::InvalidDistance(format!(
                "{} entries for {n} letters",
                d.len()
            )));
        }
        for a in 0..n {
            if d[a * n + a] != 0.0 {
                return Err(Error::InvalidDistance(format!(
                    "D({0},{0}) = {1} is not zero",
                    alphabet.letter(a),
                    d[a * n + a]
                )));
            }
            for b in 0..n {
                let x = d[a * n + b];
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::InvalidDistance(format!(
                        "D({},{}) = {x}",
                        alphabet.letter(a),
                        alphabet.letter(b)
                    )));
                }
                let y = d[b * n + a];
                if (x - y).abs() > ULTRAMETRIC_TOL * x.abs().max(1.0) {
                    return Err(Error::InvalidDistance(format!(
                        "asymmetric: D({0},{1}) = {x} but D({1},{0}) = {y}",
                        alphabet.letter(a),
                        alphabet.letter(b)
                    )));
                }
            }
        }
        Ok(DistanceMatrix { alphabet, d })
    }

    /// Builds the matrix from a function of letter index pairs `a < b`.
    pub fn from_fn(alphabet: Alphabet, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let n = alphabet.len();
        let mut d = vec![0.0; n * n];
        for a in 0..n {
            for b in a + 1..n {
                let x = f(a, b);
                d[a * n + b] = x;
                d[b * n + a] = x;
            }
        }
        Self::new(alphabet, d)
    }

    /// The uniform distance `d` between every pair of distinct letters.
    pub fn uniform(alphabet: Alphabet, d: f64) -> Result<Self> {
        Self::from_fn(alphabet, |_, _| d)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.d[a * self.len() + b]
    }

    pub fn values(&self) -> &[f64] {
        &self.d
    }

    pub fn max_distance(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_normalized(&self) -> bool {
        (self.max_distance() - 1.0).abs() <= ULTRAMETRIC_TOL
    }

    /// Finds a triple violating `D(a,b) ≤ max(D(a,c), D(b,c))`.
    pub fn check_ultrametric(&self) -> Result<()> {
        let n = self.len();
        for a in 0..n {
            for b in a + 1..n {
                let dab = self.get(a, b);
                for c in 0..n {
                    if dab > self.get(a, c).max(self.get(b, c)) + ULTRAMETRIC_TOL {
                        return Err(Error::NotUltrametric {
                            a: self.alphabet.letter(a).to_string(),
                            b: self.alphabet.letter(b).to_string(),
                            c: self.alphabet.letter(c).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_ultrametric(&self) -> bool {
        self.check_ultrametric().is_ok()
    }

    /// `D|B` on the sub-alphabet `B`.
    pub fn restrict(&self, subset: &[usize]) -> Result<DistanceMatrix> {
        let subset = normalize_subset(self.len(), subset)?;
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let alphabet = self.alphabet.sub_alphabet(&subset)?;
        let k = subset.len();
        let mut d = vec![0.0; k * k];
        for (i, &a) in subset.iter().enumerate() {
            for (j, &b) in subset.iter().enumerate() {
                d[i * k + j] = self.get(a, b);
            }
        }
        Ok(DistanceMatrix { alphabet, d })
    }

    /// `Σ_{b∈B} Σ_{c∈C} p(b) p(c) D(b,c)`: the unnormalized cross mass.
    pub fn cross_mass(&self, p: &[f64], b: &[usize], c: &[usize]) -> f64 {
        let mut s = 0.0;
        for &x in b {
            if p[x] == 0.0 {
                continue;
            }
            for &y in c {
                s += p[x] * p[y] * self.get(x, y);
            }
        }
        s
    }

    /// Expected distance `D(B, C)` between disjoint sets under `p`
    /// conditioned on each side. `None` when either side has zero mass.
    pub fn expected_distance(&self, p: &[f64], b: &[usize], c: &[usize]) -> Option<f64> {
        let pb: f64 = b.iter().map(|&x| p[x]).sum();
        let pc: f64 = c.iter().map(|&x| p[x]).sum();
        if pb <= 0.0 || pc <= 0.0 {
            return None;
        }
        Some(self.cross_mass(p, b, c) / (pb * pc))
    }
}

/// A node of an ultrametric tree.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub height: f64,
    /// Sorted letter indices below this node (`A_i`).
    pub leaves: Vec<usize>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// The rooted tree induced by an ultrametric distance.
///
/// Nodes `0..n` are the leaves, node `a` holding letter `a`. Heights are
/// stored per node; the distance between two letters is the height of their
/// least common ancestor. The tree holds no probabilities: subtree masses are
/// computed from a [`Distribution`] when needed.
#[derive(Clone, Debug, PartialEq)]
pub struct UltrametricTree {
    alphabet: Alphabet,
    nodes: Vec<Node>,
    root: usize,
}

impl UltrametricTree {
    /// Builds `T_D` bottom-up: distinct distance levels are visited in
    /// ascending order and the classes of `D ≤ level` merged at each.
    pub fn from_distance(d: &DistanceMatrix) -> Result<Self> {
        d.check_ultrametric()?;
        let n = d.len();
        let mut nodes: Vec<Node> = (0..n)
            .map(|a| Node {
                parent: None,
                children: Vec::new(),
                height: 0.0,
                leaves: vec![a],
            })
            .collect();
        if n == 1 {
            return Ok(UltrametricTree {
                alphabet: d.alphabet().clone(),
                nodes,
                root: 0,
            });
        }

        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
        for a in 0..n {
            for b in a + 1..n {
                pairs.push((d.get(a, b), a, b));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

        let mut uf = UnionFind::new(n);
        // The current top node of each union-find class, keyed by class root.
        let mut top: Vec<usize> = (0..n).collect();
        let mut start = 0;
        while start < pairs.len() {
            let base = pairs[start].0;
            let mut end = start;
            while end < pairs.len() && pairs[end].0 - base <= LEVEL_TOL * base.abs() {
                end += 1;
            }
            let level = pairs[end - 1].0;

            // Collect the classes that merge at this level.
            let mut merging: Vec<Vec<usize>> = Vec::new();
            let mut group_of: std::collections::HashMap<usize, usize> = Default::default();
            let mut uf_level = uf.clone();
            for &(_, a, b) in &pairs[start..end] {
                uf_level.union(a, b);
            }
            for a in 0..n {
                let before = uf.find(a);
                let after = uf_level.find(a);
                if !group_of.contains_key(&after) {
                    group_of.insert(after, merging.len());
                    merging.push(Vec::new());
                }
                let g = &mut merging[group_of[&after]];
                if !g.contains(&before) {
                    g.push(before);
                }
            }
            for classes in merging.into_iter().filter(|c| c.len() > 1) {
                let id = nodes.len();
                let mut children: Vec<usize> = classes.iter().map(|&c| top[c]).collect();
                children.sort_by_key(|&c| nodes[c].leaves[0]);
                let mut leaves: Vec<usize> = children
                    .iter()
                    .flat_map(|&c| nodes[c].leaves.iter().copied())
                    .collect();
                leaves.sort_unstable();
                for &c in &children {
                    nodes[c].parent = Some(id);
                }
                nodes.push(Node {
                    parent: None,
                    children,
                    height: level,
                    leaves,
                });
                for &c in &classes {
                    top[c] = id;
                }
                let rep = uf_level.find(classes[0]);
                top[rep] = id;
            }
            uf = uf_level;
            start = end;
        }
        let root = nodes.len() - 1;
        Ok(UltrametricTree {
            alphabet: d.alphabet().clone(),
            nodes,
            root,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn num_leaves(&self) -> usize {
        self.alphabet.len()
    }

    pub fn root_height(&self) -> f64 {
        self.nodes[self.root].height
    }

    pub fn is_normalized(&self) -> bool {
        (self.root_height() - 1.0).abs() <= ULTRAMETRIC_TOL
    }

    /// `L_i = height(parent(i)) - height(i)`; zero at the root.
    pub fn arc_length(&self, i: usize) -> f64 {
        match self.nodes[i].parent {
            Some(p) => self.nodes[p].height - self.nodes[i].height,
            None => 0.0,
        }
    }

    /// `P_i = P(A_i)`.
    pub fn node_probability(&self, i: usize, p: &Distribution) -> f64 {
        p.mass(&self.nodes[i].leaves)
    }

    /// The natural partition `Y_i`: the leaf sets of the children of `i`.
    pub fn natural_partition(&self, i: usize) -> Vec<Vec<usize>> {
        self.nodes[i]
            .children
            .iter()
            .map(|&c| self.nodes[c].leaves.clone())
            .collect()
    }

    fn ancestors(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![i];
        while let Some(p) = self.nodes[i].parent {
            out.push(p);
            i = p;
        }
        out
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        let up: std::collections::HashSet<usize> = self.ancestors(a).into_iter().collect();
        let mut i = b;
        loop {
            if up.contains(&i) {
                return i;
            }
            i = self.nodes[i].parent.expect("nodes share the root");
        }
    }

    /// Distance between two letters: the height of their least common
    /// ancestor.
    pub fn leaf_distance(&self, a: usize, b: usize) -> f64 {
        if a == b {
            0.0
        } else {
            self.nodes[self.lca(a, b)].height
        }
    }

    pub fn to_distance_matrix(&self) -> DistanceMatrix {
        DistanceMatrix::from_fn(self.alphabet.clone(), |a, b| self.leaf_distance(a, b))
            .expect("tree heights are valid distances")
    }

    /// Distinct node heights in ascending order.
    pub fn heights(&self) -> Vec<f64> {
        let mut h: Vec<f64> = self.nodes.iter().map(|n| n.height).collect();
        h.sort_by(f64::total_cmp);
        h.dedup();
        h
    }

    /// True when every root-to-leaf path has a node at every tree height.
    pub fn is_banded(&self) -> bool {
        let heights = self.heights();
        self.nodes.iter().all(|n| match n.parent {
            Some(p) => !heights
                .iter()
                .any(|&h| h > n.height && h < self.nodes[p].height),
            None => true,
        })
    }

    /// Inserts degree-2 pass-through nodes wherever an arc crosses the height
    /// of some node, so that every band boundary meets every path.
    pub fn band(&self) -> UltrametricTree {
        let heights = self.heights();
        let mut nodes = self.nodes.clone();
        let original = self.nodes.len();
        for i in 0..original {
            let Some(p) = nodes[i].parent else { continue };
            let lo = nodes[i].height;
            let hi = nodes[p].height;
            let mut below = i;
            for &h in heights.iter().filter(|&&h| h > lo && h < hi) {
                let id = nodes.len();
                nodes.push(Node {
                    parent: None,
                    children: vec![below],
                    height: h,
                    leaves: nodes[i].leaves.clone(),
                });
                nodes[below].parent = Some(id);
                below = id;
            }
            if below != i {
                nodes[below].parent = Some(p);
                for c in nodes[p].children.iter_mut() {
                    if *c == i {
                        *c = below;
                    }
                }
            }
        }
        UltrametricTree {
            alphabet: self.alphabet.clone(),
            nodes,
            root: self.root,
        }
    }

    /// The sub-tree on a letter subset, rebuilt from the restricted distance.
    pub fn restrict(&self, subset: &[usize]) -> Result<UltrametricTree> {
        UltrametricTree::from_distance(&self.to_distance_matrix().restrict(subset)?)
    }

    fn check_distribution(&self, p: &Distribution) -> Result<()> {
        self.alphabet
            .ensure_same(p.alphabet(), "tree and distribution")
    }

    /// `H_U` by the grouping recursion on the natural partition.
    pub fn hu_recursive(&self, p: &Distribution) -> Result<f64> {
        self.check_distribution(p)?;
        Ok(self.hu_recursive_at(self.root, p.probs()))
    }

    fn hu_recursive_at(&self, i: usize, probs: &[f64]) -> f64 {
        let node = &self.nodes[i];
        if node.is_leaf() {
            return 0.0;
        }
        let mass: f64 = node.leaves.iter().map(|&a| probs[a]).sum();
        if mass <= 0.0 {
            return 0.0;
        }
        // Conditional probabilities of the children given this node.
        let child_mass: Vec<f64> = node
            .children
            .iter()
            .map(|&c| self.nodes[c].leaves.iter().map(|&a| probs[a]).sum::<f64>() / mass)
            .collect();
        let conditional: Vec<f64> = probs.iter().map(|&x| x / mass).collect();
        let mut h = node.height * entropy(&child_mass);
        for (&c, &w) in node.children.iter().zip(&child_mass) {
            if w > 0.0 {
                let sub: Vec<f64> = conditional.iter().map(|&x| x / w).collect();
                h += w * self.hu_recursive_at(c, &sub);
            }
        }
        h
    }

    /// `H_U = Σ_{non-leaf i} P_i height(i) H(P^{Y_i})`.
    pub fn hu_nodewise(&self, p: &Distribution) -> Result<f64> {
        self.check_distribution(p)?;
        let mut total = 0.0;
        for (i, node) in self.nodes.iter().enumerate() {
            if node.is_leaf() {
                continue;
            }
            let pi = self.node_probability(i, p);
            if pi <= 0.0 {
                continue;
            }
            let y: Vec<f64> = node
                .children
                .iter()
                .map(|&c| self.node_probability(c, p) / pi)
                .collect();
            total += pi * node.height * entropy(&y);
        }
        Ok(total)
    }

    /// `H_U = -Σ_{non-root i} L_i P_i log P_i`.
    pub fn hu_arcwise(&self, p: &Distribution) -> Result<f64> {
        self.check_distribution(p)?;
        let mut total = 0.0;
        for i in 0..self.nodes.len() {
            if i != self.root {
                total += self.arc_length(i) * plogp(self.node_probability(i, p));
            }
        }
        Ok(total)
    }

    /// The bands of the tree: for every height `t` below the root, the
    /// partition of the leaves by the topmost nodes at height `t`, with the
    /// band's measure `height(parent) - t`.
    pub fn bands(&self) -> Vec<(f64, Vec<Vec<usize>>, f64)> {
        let banded = if self.is_banded() {
            self.clone()
        } else {
            self.band()
        };
        let mut out = Vec::new();
        for t in banded.heights() {
            if t >= banded.root_height() {
                continue;
            }
            let tops: Vec<usize> = (0..banded.nodes.len())
                .filter(|&i| {
                    let n = &banded.nodes[i];
                    n.height == t && n.parent.is_some_and(|p| banded.nodes[p].height > t)
                })
                .collect();
            let width = tops
                .iter()
                .map(|&i| banded.nodes[banded.nodes[i].parent.unwrap()].height - t)
                .fold(f64::INFINITY, f64::min);
            let comps = tops
                .iter()
                .map(|&i| banded.nodes[i].leaves.clone())
                .collect();
            out.push((t, comps, width));
        }
        out
    }

    /// `H_U = Σ_t Ŝ(t) H(P^{s_t})` over the bands of the banded tree.
    pub fn hu_bandwise(&self, p: &Distribution) -> Result<f64> {
        self.check_distribution(p)?;
        Ok(self
            .bands()
            .into_iter()
            .map(|(_, comps, w)| {
                let reduced: Vec<f64> = comps.iter().map(|c| p.mass(c)).collect();
                w * entropy(&reduced)
            })
            .sum())
    }

    /// The ultrametric entropy `H_U(P, D)` (nodewise formulation).
    pub fn hu(&self, p: &Distribution) -> Result<f64> {
        self.hu_nodewise(p)
    }

    /// The hierarchical partition structure of a normalized tree: one
    /// partition per level `t` below the root (letters at distance `≤ t`
    /// grouped together), weighted by the gap to the next level.
    pub fn to_partition_structure(&self) -> Result<PartitionStructure> {
        if !self.is_normalized() {
            return Err(Error::NotNormalized(format!(
                "root height is {}",
                self.root_height()
            )));
        }
        let n = self.num_leaves();
        let levels = self.heights();
        let mut terms = Vec::new();
        for w in levels.windows(2) {
            let (t, next) = (w[0], w[1]);
            let mut uf = UnionFind::new(n);
            for a in 0..n {
                for b in a + 1..n {
                    if self.leaf_distance(a, b) <= t {
                        uf.union(a, b);
                    }
                }
            }
            let labels: Vec<usize> = (0..n).map(|a| uf.find(a)).collect();
            terms.push((Partition::from_labels(&labels), next - t));
        }
        PartitionStructure::new(self.alphabet.clone(), terms)
    }
}

/// `H_U(P, D)` for a distribution and ultrametric distance. Zero on a
/// one-letter alphabet.
pub fn hu(d: &DistanceMatrix, p: &Distribution) -> Result<f64> {
    UltrametricTree::from_distance(d)?.hu(p)
}

/// `H_U(P|B, D|B)`; the subset must carry positive mass.
pub fn hu_on_subset(d: &DistanceMatrix, p: &Distribution, subset: &[usize]) -> Result<f64> {
    let sub_p = p.restrict(subset)?;
    let sub_d = d.restrict(subset)?;
    hu(&sub_d, &sub_p)
}

/// Both sides of the minimality inequality for a binary partition
/// `{A_1, A_2}`:
///
/// `H_U(P, D) ≤ D(A_1, A_2) h(P(A_1)) + Σ_j P(A_j) H_U(P|A_j, D|A_j)`.
///
/// Equality holds for the tree's own natural partition when it is binary.
pub fn check_binary_partition_minimality(
    tree: &UltrametricTree,
    p: &Distribution,
    y: &Partition,
) -> Result<(f64, f64)> {
    if y.len() != tree.num_leaves() {
        return Err(Error::PartitionMismatch(
            "split does not cover the tree's leaves".into(),
        ));
    }
    if y.num_blocks() != 2 {
        return Err(Error::InvalidSplit(format!(
            "expected 2 components, got {}",
            y.num_blocks()
        )));
    }
    let comps = y.components();
    let d = tree.to_distance_matrix();
    let masses: Vec<f64> = comps.iter().map(|c| p.mass(c)).collect();
    for (c, &m) in comps.iter().zip(&masses) {
        if m <= 0.0 {
            let names: Vec<&str> = c.iter().map(|&a| tree.alphabet().letter(a)).collect();
            return Err(Error::ZeroMassSide(names.join(",")));
        }
    }
    let lhs = tree.hu(p)?;
    let cross = d
        .expected_distance(p.probs(), &comps[0], &comps[1])
        .expect("both sides have mass");
    let mut rhs = cross * binary_entropy(masses[0]);
    for (c, &m) in comps.iter().zip(&masses) {
        rhs += m * hu_on_subset(&d, p, c)?;
    }
    Ok((lhs, rhs))
}

/// A random normalized ultrametric on `n` letters whose tree is binary.
///
/// The letter set is split recursively at uniform random cut points; `n - 1`
/// uniform heights sorted in descending order are handed out in pre-order,
/// so every child sits below its parent, and the root is scaled to height 1.
pub fn random_binary_ultrametric<R: Rng + ?Sized>(
    alphabet: Alphabet,
    rng: &mut R,
) -> Result<DistanceMatrix> {
    let n = alphabet.len();
    let mut letters: Vec<usize> = (0..n).collect();
    letters.shuffle(rng);
    let mut heights: Vec<f64> = (0..n.saturating_sub(1))
        .map(|_| rng.random::<f64>())
        .collect();
    heights.sort_by(|a, b| b.total_cmp(a));
    let top = heights
        .first()
        .copied()
        .unwrap_or(1.0)
        .max(f64::MIN_POSITIVE);
    let mut d = vec![0.0; n * n];
    let mut next = 0;
    let mut stack = vec![letters];
    while let Some(set) = stack.pop() {
        if set.len() < 2 {
            continue;
        }
        let h = heights[next] / top;
        next += 1;
        let cut = rng.random_range(1..set.len());
        let (left, right) = set.split_at(cut);
        for &a in left {
            for &b in right {
                d[a * n + b] = h;
                d[b * n + a] = h;
            }
        }
        // Push right first so the left subtree is visited next (pre-order).
        stack.push(right.to_vec());
        stack.push(left.to_vec());
    }
    DistanceMatrix::new(alphabet, d)
}

#[derive(Clone)]
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}
