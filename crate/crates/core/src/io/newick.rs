//! Newick reading and writing for ultrametric trees.
//!
//! A parsed tree must have all leaves at the same distance from the root. It
//! is converted to the leaf distance matrix (the height of each least common
//! ancestor) and rebuilt from that, so redundant degree-2 nodes in the input
//! disappear and the result is the canonical tree of the distance.

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::ultrametric::{DistanceMatrix, UltrametricTree};

/// How branch lengths relate to node heights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BranchLengths {
    /// Lengths are drawn arcs, half the height difference they span: a leaf
    /// at depth `x` below the root sits under a root of height `2x`.
    #[default]
    Arc,
    /// Lengths are height differences `height(parent) - height(child)`.
    LValue,
}

impl BranchLengths {
    fn factor(self) -> f64 {
        match self {
            BranchLengths::Arc => 2.0,
            BranchLengths::LValue => 1.0,
        }
    }
}

/// A node of a raw Newick tree.
#[derive(Clone, Debug, PartialEq)]
pub struct NewickNode {
    pub name: Option<String>,
    pub length: Option<f64>,
    pub children: Vec<NewickNode>,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn location(&self) -> String {
        let before = &self.src[..self.pos.min(self.src.len())];
        let line = before.iter().filter(|&&c| c == b'\n').count() + 1;
        let col = before.iter().rev().take_while(|&&c| c != b'\n').count() + 1;
        format!("line {line}, column {col}")
    }

    fn err(&self, reason: impl Into<String>) -> Error {
        Error::parse(self.location(), reason)
    }

    fn skip_space(&mut self) -> Result<()> {
        loop {
            match self.src.get(self.pos) {
                Some(c) if c.is_ascii_whitespace() => self.pos += 1,
                Some(b'[') => {
                    let start = self.pos;
                    while self.src.get(self.pos).is_some_and(|&c| c != b']') {
                        self.pos += 1;
                    }
                    if self.pos >= self.src.len() {
                        self.pos = start;
                        return Err(self.err("unterminated comment"));
                    }
                    self.pos += 1;
                }
                _ => return Ok(()),
            }
        }
    }

    fn peek(&mut self) -> Result<Option<u8>> {
        self.skip_space()?;
        Ok(self.src.get(self.pos).copied())
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek()? == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn label(&mut self) -> Result<Option<String>> {
        match self.peek()? {
            Some(b'\'') => {
                self.pos += 1;
                let mut out = Vec::new();
                loop {
                    match self.src.get(self.pos) {
                        None => return Err(self.err("unterminated quoted label")),
                        Some(b'\'') if self.src.get(self.pos + 1) == Some(&b'\'') => {
                            out.push(b'\'');
                            self.pos += 2;
                        }
                        Some(b'\'') => {
                            self.pos += 1;
                            break;
                        }
                        Some(&c) => {
                            out.push(c);
                            self.pos += 1;
                        }
                    }
                }
                String::from_utf8(out)
                    .map(Some)
                    .map_err(|_| self.err("label is not valid UTF-8"))
            }
            _ => {
                let start = self.pos;
                while let Some(&c) = self.src.get(self.pos) {
                    if c.is_ascii_whitespace() || b"()[]':;,".contains(&c) {
                        break;
                    }
                    self.pos += 1;
                }
                if start == self.pos {
                    return Ok(None);
                }
                let s = std::str::from_utf8(&self.src[start..self.pos])
                    .map_err(|_| self.err("label is not valid UTF-8"))?;
                Ok(Some(s.replace('_', " ").trim().to_string()).filter(|s| !s.is_empty()))
            }
        }
    }

    fn length(&mut self) -> Result<Option<f64>> {
        if self.peek()? != Some(b':') {
            return Ok(None);
        }
        self.pos += 1;
        self.skip_space()?;
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit() || b"+-.eE".contains(c))
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ASCII digits");
        let value: f64 = text.parse().map_err(|_| {
            let here = self.pos;
            self.pos = start;
            let e = self.err(format!("invalid branch length `{text}`"));
            self.pos = here;
            e
        })?;
        if !value.is_finite() || value < 0.0 {
            self.pos = start;
            return Err(self.err(format!("branch length {value} must be non-negative")));
        }
        Ok(Some(value))
    }

    fn subtree(&mut self, depth: usize) -> Result<NewickNode> {
        if depth > 10_000 {
            return Err(self.err("tree nested too deeply"));
        }
        let mut children = Vec::new();
        if self.peek()? == Some(b'(') {
            self.pos += 1;
            loop {
                children.push(self.subtree(depth + 1)?);
                match self.peek()? {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected `,` or `)`")),
                }
            }
        }
        let name = self.label()?;
        let length = self.length()?;
        if children.is_empty() && name.is_none() {
            return Err(self.err("leaf without a name"));
        }
        Ok(NewickNode {
            name,
            length,
            children,
        })
    }
}

/// Parses Newick text into its raw node structure.
pub fn parse_newick_raw(text: &str) -> Result<NewickNode> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let root = p.subtree(0)?;
    p.expect(b';')?;
    if p.peek()?.is_some() {
        return Err(p.err("unexpected text after `;`"));
    }
    Ok(root)
}

/// Parses an ultrametric tree. Every non-root branch needs a length and all
/// leaves must lie at the same depth (relative tolerance `1e-9`).
pub fn parse_newick(text: &str, lengths: BranchLengths) -> Result<UltrametricTree> {
    let root = parse_newick_raw(text)?;
    let mut names = Vec::new();
    let mut depth = Vec::new();
    // For each internal node: its depth and the leaf ranges of its children.
    let mut internals: Vec<(f64, Vec<std::ops::Range<usize>>)> = Vec::new();

    fn walk(
        node: &NewickNode,
        d: f64,
        is_root: bool,
        names: &mut Vec<String>,
        depth: &mut Vec<f64>,
        internals: &mut Vec<(f64, Vec<std::ops::Range<usize>>)>,
    ) -> Result<std::ops::Range<usize>> {
        let d = if is_root {
            d
        } else {
            let len = node.length.ok_or_else(|| {
                Error::parse(
                    format!("node `{}`", node.name.as_deref().unwrap_or("(internal)")),
                    "missing branch length",
                )
            })?;
            d + len
        };
        if node.children.is_empty() {
            names.push(node.name.clone().expect("leaves are named"));
            depth.push(d);
            return Ok(names.len() - 1..names.len());
        }
        let start = names.len();
        let mut ranges = Vec::new();
        for c in &node.children {
            ranges.push(walk(c, d, false, names, depth, internals)?);
        }
        internals.push((d, ranges));
        Ok(start..names.len())
    }

    walk(&root, 0.0, true, &mut names, &mut depth, &mut internals)?;
    let alphabet = Alphabet::new(names.clone()).map_err(|e| match e {
        Error::DuplicateLetter(l) => Error::Validation(format!("leaf `{l}` appears twice")),
        other => other,
    })?;
    let n = names.len();
    let max_depth = depth.iter().copied().fold(0.0, f64::max);
    let min_depth = depth.iter().copied().fold(f64::INFINITY, f64::min);
    if max_depth - min_depth > 1e-9 * max_depth.max(1.0) {
        return Err(Error::Validation(format!(
            "leaves are not equidistant from the root (depths range from {min_depth} to {max_depth})"
        )));
    }
    let factor = lengths.factor();
    let mut d = vec![0.0; n * n];
    for (node_depth, ranges) in &internals {
        let height = factor * (max_depth - node_depth).max(0.0);
        for (i, ra) in ranges.iter().enumerate() {
            for rb in &ranges[i + 1..] {
                for a in ra.clone() {
                    for b in rb.clone() {
                        d[a * n + b] = height;
                        d[b * n + a] = height;
                    }
                }
            }
        }
    }
    UltrametricTree::from_distance(&DistanceMatrix::new(alphabet, d)?)
}

fn quote(name: &str) -> String {
    if name.is_empty()
        || name
            .bytes()
            .any(|c| c.is_ascii_whitespace() || b"()[]':;,_".contains(&c))
    {
        format!("'{}'", name.replace('\'', "''"))
    } else {
        name.to_string()
    }
}

/// Writes the tree with the given length convention. Lengths use the
/// shortest representation that reads back to the same `f64`.
pub fn write_newick(tree: &UltrametricTree, lengths: BranchLengths) -> String {
    fn node(tree: &UltrametricTree, i: usize, lengths: BranchLengths, out: &mut String) {
        let n = tree.node(i);
        if n.is_leaf() {
            out.push_str(&quote(tree.alphabet().letter(n.leaves[0])));
        } else {
            out.push('(');
            for (k, &c) in n.children.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                node(tree, c, lengths, out);
            }
            out.push(')');
        }
        if i != tree.root() {
            out.push(':');
            out.push_str(&format!("{}", tree.arc_length(i) / lengths.factor()));
        }
    }
    let mut out = String::new();
    node(tree, tree.root(), lengths, &mut out);
    out.push(';');
    out
}
