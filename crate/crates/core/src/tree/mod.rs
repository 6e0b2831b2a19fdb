//! Canonical rooted unordered trees, exhaustive enumeration, and automorphism
//! accounting.
//!
//! A [`CanonicalTree`] is stored as the preorder sequence of subtree sizes,
//! with the children of every node sorted in non-increasing canonical order.
//! Any subtree is therefore a contiguous slice of the encoding and is itself a
//! canonical encoding; comparing two canonical encodings lexicographically
//! compares first by size and then child by child, which is the canonical
//! total order used to sort siblings.

mod automorphism;
mod enumerate;
mod oracle;

pub use automorphism::{
    aut_order, brute_force_automorphisms, derangements, enumerate_automorphisms, fixed_point_polynomial, forest_weight,
    forest_weight_by_enumeration, orbit_count, AutomorphismElement, TreeMemo,
};
pub use enumerate::{
    enumerate_forests, enumerate_forests_with, enumerate_trees, enumerate_trees_with, EnumerationLimits, ForestSpec,
};
pub use oracle::{cayley_mass, dn_oracle, dn_oracle_with, tcn_polynomial_oracle, tcn_polynomial_oracle_with};

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A rooted unordered tree in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CanonicalTree {
    sizes: Vec<u32>,
}

/// One class of isomorphic siblings below a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChildClass {
    /// Preorder index of the first copy.
    pub first: usize,
    /// Size of each copy.
    pub size: usize,
    /// Number of copies `k >= 1`.
    pub multiplicity: usize,
}

impl ChildClass {
    /// Preorder index of copy `j` (0-based).
    pub fn copy(&self, j: usize) -> usize {
        self.first + j * self.size
    }
}

impl CanonicalTree {
    /// The single-node tree.
    pub fn single() -> Self {
        CanonicalTree { sizes: vec![1] }
    }

    /// A path on `n >= 1` nodes hanging from the root.
    pub fn chain(n: usize) -> Self {
        assert!(n >= 1);
        CanonicalTree {
            sizes: (1..=n as u32).rev().collect(),
        }
    }

    /// A root with `leaves` leaf children.
    pub fn star(leaves: usize) -> Self {
        let mut sizes = vec![leaves as u32 + 1];
        sizes.extend(std::iter::repeat_n(1, leaves));
        CanonicalTree { sizes }
    }

    /// Joins arbitrary canonical subtrees under a new root.
    pub fn from_children(mut children: Vec<CanonicalTree>) -> Self {
        children.sort_unstable_by(|a, b| b.cmp(a));
        Self::from_sorted_children(children.iter().map(|c| c.as_slice()))
    }

    /// Joins subtrees that are already in non-increasing canonical order.
    pub(crate) fn from_sorted_children<'a, I>(children: I) -> Self
    where
        I: IntoIterator<Item = &'a [u32]>,
    {
        let mut sizes = vec![0u32];
        for c in children {
            sizes.extend_from_slice(c);
        }
        sizes[0] = sizes.len() as u32;
        CanonicalTree { sizes }
    }

    /// Wraps an encoding that is known to be canonical.
    pub(crate) fn from_canonical_sizes(sizes: Vec<u32>) -> Self {
        debug_assert!(is_canonical(&sizes));
        CanonicalTree { sizes }
    }

    /// Builds from a raw preorder size sequence, validating structure and
    /// canonical order.
    pub fn from_sizes(sizes: Vec<u32>) -> Result<Self> {
        if !is_well_formed(&sizes) {
            return Err(Error::Parse("not a preorder subtree-size sequence".into()));
        }
        if !is_canonical(&sizes) {
            return Err(Error::Parse("children are not in canonical order".into()));
        }
        Ok(CanonicalTree { sizes })
    }

    pub fn size(&self) -> usize {
        self.sizes.len()
    }

    /// Preorder subtree sizes.
    pub fn as_slice(&self) -> &[u32] {
        &self.sizes
    }

    /// Encoding of the subtree rooted at preorder index `v`.
    pub fn subtree(&self, v: usize) -> &[u32] {
        &self.sizes[v..v + self.sizes[v] as usize]
    }

    pub fn subtree_size(&self, v: usize) -> usize {
        self.sizes[v] as usize
    }

    pub fn subtree_tree(&self, v: usize) -> CanonicalTree {
        CanonicalTree {
            sizes: self.subtree(v).to_vec(),
        }
    }

    /// Preorder indices of the children of `v`, in canonical order.
    pub fn children(&self, v: usize) -> Children<'_> {
        Children {
            sizes: &self.sizes,
            next: v + 1,
            end: v + self.sizes[v] as usize,
        }
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.sizes[v] == 1
    }

    /// Parent of every node (`None` for the root).
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.size()];
        for v in 0..self.size() {
            for c in self.children(v) {
                parent[c] = Some(v);
            }
        }
        parent
    }

    /// Depth of every node, root at depth 0.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.size()];
        for v in 0..self.size() {
            for c in self.children(v) {
                depth[c] = depth[v] + 1;
            }
        }
        depth
    }

    /// Groups the children of `v` into runs of identical subtrees.
    pub fn child_classes(&self, v: usize) -> Vec<ChildClass> {
        let mut out: Vec<ChildClass> = Vec::new();
        for c in self.children(v) {
            match out.last_mut() {
                Some(last) if last.size == self.subtree_size(c) && self.subtree(last.first) == self.subtree(c) => {
                    last.multiplicity += 1;
                }
                _ => out.push(ChildClass {
                    first: c,
                    size: self.subtree_size(c),
                    multiplicity: 1,
                }),
            }
        }
        out
    }

    /// Balanced-parenthesis serialization, e.g. `(()()())` for the 3-leaf
    /// star.
    pub fn to_parens(&self) -> String {
        let mut out = String::with_capacity(2 * self.size());
        let mut open: Vec<usize> = Vec::new();
        for (v, &s) in self.sizes.iter().enumerate() {
            while open.last().is_some_and(|&end| end <= v) {
                open.pop();
                out.push(')');
            }
            out.push('(');
            open.push(v + s as usize);
        }
        for _ in open {
            out.push(')');
        }
        out
    }

    /// Level sequence (preorder depths starting at 1), e.g. `1 2 2 2`.
    pub fn to_level_sequence(&self) -> String {
        self.depths()
            .iter()
            .map(|d| (d + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses a balanced-parenthesis string in any child order.
    pub fn parse_parens(s: &str) -> Result<Self> {
        let mut parent: Vec<Option<usize>> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        let mut closed_root = false;
        for ch in s.chars().filter(|c| !c.is_whitespace()) {
            match ch {
                '(' => {
                    if closed_root {
                        return Err(Error::Parse("more than one root".into()));
                    }
                    parent.push(stack.last().copied());
                    stack.push(parent.len() - 1);
                }
                ')' => {
                    stack.pop().ok_or_else(|| Error::Parse("unbalanced ')'".into()))?;
                    if stack.is_empty() {
                        closed_root = true;
                    }
                }
                other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
            }
        }
        if !stack.is_empty() || parent.is_empty() {
            return Err(Error::Parse("unbalanced or empty parenthesis string".into()));
        }
        RootedTree::from_parents(&parent).map(|t| canonical_form(&t))
    }

    /// Parses a whitespace-separated level sequence in any child order.
    pub fn parse_level_sequence(s: &str) -> Result<Self> {
        let levels: Vec<usize> = s
            .split_whitespace()
            .map(|t| t.parse().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<_>>()?;
        if levels.first() != Some(&1) {
            return Err(Error::Parse("level sequence must start with 1".into()));
        }
        let mut parent: Vec<Option<usize>> = vec![None];
        let mut path: Vec<usize> = vec![0];
        for (v, &l) in levels.iter().enumerate().skip(1) {
            if l < 2 || l > path.len() + 1 {
                return Err(Error::Parse(format!("invalid level {l} at position {v}")));
            }
            path.truncate(l - 1);
            parent.push(Some(*path.last().expect("path holds the root")));
            path.push(v);
        }
        RootedTree::from_parents(&parent).map(|t| canonical_form(&t))
    }
}

impl PartialOrd for CanonicalTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonicalTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sizes.cmp(&other.sizes)
    }
}

impl fmt::Display for CanonicalTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_parens())
    }
}

pub struct Children<'a> {
    sizes: &'a [u32],
    next: usize,
    end: usize,
}

impl Iterator for Children<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.next >= self.end {
            return None;
        }
        let c = self.next;
        self.next += self.sizes[c] as usize;
        Some(c)
    }
}

/// A rooted tree with unordered children, as read from user input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    children: Vec<Vec<usize>>,
    root: usize,
}

impl RootedTree {
    /// `parent[v]` is `None` for exactly one node, the root.
    pub fn from_parents(parent: &[Option<usize>]) -> Result<Self> {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        let mut root = None;
        for (v, p) in parent.iter().enumerate() {
            match *p {
                None if root.is_none() => root = Some(v),
                None => return Err(Error::Parse("more than one root".into())),
                Some(p) if p >= n => return Err(Error::Parse(format!("parent {p} out of range"))),
                Some(p) => children[p].push(v),
            }
        }
        let root = root.ok_or_else(|| Error::Parse("no root".into()))?;
        let tree = RootedTree { children, root };
        if tree.reachable() != n {
            return Err(Error::Parse("parent array contains a cycle".into()));
        }
        Ok(tree)
    }

    pub fn from_children(children: Vec<Vec<usize>>, root: usize) -> Result<Self> {
        let n = children.len();
        let mut parent = vec![None; n];
        for (v, cs) in children.iter().enumerate() {
            for &c in cs {
                if c >= n || parent[c].is_some() || c == root {
                    return Err(Error::Parse(format!("invalid child {c} of {v}")));
                }
                parent[c] = Some(v);
            }
        }
        if root >= n {
            return Err(Error::Parse("root out of range".into()));
        }
        let tree = RootedTree { children, root };
        if tree.reachable() != n {
            return Err(Error::Parse("not a single tree".into()));
        }
        Ok(tree)
    }

    pub fn size(&self) -> usize {
        self.children.len()
    }

    fn reachable(&self) -> usize {
        let mut seen = 0;
        let mut stack = vec![self.root];
        let mut visited = vec![false; self.size()];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut visited[v], true) {
                return usize::MAX;
            }
            seen += 1;
            stack.extend(&self.children[v]);
        }
        seen
    }
}

/// Canonical representative of an unordered rooted tree.
///
/// Children are encoded bottom-up and sorted in non-increasing order; two
/// trees are isomorphic exactly when their canonical forms are equal.
pub fn canonical_form(tree: &RootedTree) -> CanonicalTree {
    // iterative post-order
    let n = tree.size();
    let mut enc: Vec<Option<Vec<u32>>> = vec![None; n];
    let mut stack = vec![(tree.root, false)];
    while let Some((v, expanded)) = stack.pop() {
        if !expanded {
            stack.push((v, true));
            for &c in &tree.children[v] {
                stack.push((c, false));
            }
            continue;
        }
        let mut kids: Vec<Vec<u32>> = tree.children[v]
            .iter()
            .map(|&c| enc[c].take().expect("child encoded before parent"))
            .collect();
        kids.sort_unstable_by(|a, b| b.cmp(a));
        let mut sizes = Vec::with_capacity(1 + kids.iter().map(Vec::len).sum::<usize>());
        sizes.push(0);
        for k in kids {
            sizes.extend(k);
        }
        sizes[0] = sizes.len() as u32;
        enc[v] = Some(sizes);
    }
    CanonicalTree {
        sizes: enc[tree.root].take().expect("root encoded"),
    }
}

fn is_well_formed(sizes: &[u32]) -> bool {
    fn check(sizes: &[u32], v: usize) -> bool {
        let s = sizes[v] as usize;
        if s == 0 || v + s > sizes.len() {
            return false;
        }
        let end = v + s;
        let mut c = v + 1;
        while c < end {
            let cs = sizes[c] as usize;
            if cs == 0 || c + cs > end || !check(sizes, c) {
                return false;
            }
            c += cs;
        }
        c == end
    }
    !sizes.is_empty() && sizes[0] as usize == sizes.len() && check(sizes, 0)
}

fn is_canonical(sizes: &[u32]) -> bool {
    let t = CanonicalTree { sizes: sizes.to_vec() };
    (0..t.size()).all(|v| {
        let kids: Vec<usize> = t.children(v).collect();
        kids.windows(2).all(|w| t.subtree(w[0]) >= t.subtree(w[1]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_round_trip() {
        let t = CanonicalTree::single();
        assert_eq!(t.to_parens(), "()");
        assert_eq!(CanonicalTree::parse_parens("()").unwrap(), t);
        assert_eq!(t.to_level_sequence(), "1");
    }

    #[test]
    fn cherry_is_order_independent() {
        let a = RootedTree::from_children(vec![vec![1, 2], vec![], vec![]], 0).unwrap();
        let b = RootedTree::from_children(vec![vec![2, 1], vec![], vec![]], 0).unwrap();
        assert_eq!(canonical_form(&a), canonical_form(&b));
        assert_eq!(canonical_form(&a).to_parens(), "(()())");
    }

    #[test]
    fn star_serializations() {
        let star = CanonicalTree::star(3);
        assert_eq!(star.to_parens(), "(()()())");
        assert_eq!(star.to_level_sequence(), "1 2 2 2");
        assert_eq!(CanonicalTree::parse_level_sequence("1 2 2 2").unwrap(), star);
    }

    #[test]
    fn mixed_children_sort_descending() {
        // root with a leaf and a 2-chain, entered leaf first
        let t = CanonicalTree::parse_parens("(()(()))").unwrap();
        assert_eq!(t.as_slice(), &[4, 2, 1, 1]);
        assert_eq!(t.to_parens(), "((())())");
        assert_eq!(CanonicalTree::parse_level_sequence("1 2 2 3").unwrap(), t);
    }

    #[test]
    fn child_classes_group_equal_subtrees() {
        let t = CanonicalTree::parse_parens("((()())(()())()())").unwrap();
        let classes = t.child_classes(0);
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].multiplicity, 2);
        assert_eq!(classes[0].size, 3);
        assert_eq!(classes[1].multiplicity, 2);
        assert_eq!(classes[1].size, 1);
        assert_eq!(classes[0].copy(1), 4);
    }

    #[test]
    fn parse_errors() {
        assert!(CanonicalTree::parse_parens("(()").is_err());
        assert!(CanonicalTree::parse_parens("()()").is_err());
        assert!(CanonicalTree::parse_parens("").is_err());
        assert!(CanonicalTree::parse_parens("(x)").is_err());
        assert!(CanonicalTree::parse_level_sequence("2 1").is_err());
        assert!(CanonicalTree::parse_level_sequence("1 3").is_err());
        assert!(CanonicalTree::from_sizes(vec![3, 1, 2]).is_err());
        assert!(CanonicalTree::from_sizes(vec![3, 1, 1]).is_ok());
        assert!(CanonicalTree::from_sizes(vec![4, 1, 2, 1]).is_err());
        assert!(RootedTree::from_parents(&[None, None]).is_err());
        assert!(RootedTree::from_parents(&[Some(1), Some(0)]).is_err());
    }

    #[test]
    fn chain_parents_and_depths() {
        let c = CanonicalTree::chain(4);
        assert_eq!(c.parents(), vec![None, Some(0), Some(1), Some(2)]);
        assert_eq!(c.to_level_sequence(), "1 2 3 4");
    }
}
