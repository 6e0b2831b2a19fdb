use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::tree::{AutomorphismElement, CanonicalTree, ForestSpec};

/// Split of a tree into the C-nodes (fixed points of an automorphism) and
/// the D-forests of moved subtrees hanging off each of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    tree: CanonicalTree,
    automorphism: AutomorphismElement,
    c_mask: Vec<bool>,
    /// `(C-node, forest size)` in preorder, one entry per C-node.
    forests: Vec<(usize, usize)>,
    c_size: usize,
    max_forest: usize,
}

impl Decomposition {
    pub fn tree(&self) -> &CanonicalTree {
        &self.tree
    }

    pub fn automorphism(&self) -> &AutomorphismElement {
        &self.automorphism
    }

    pub fn is_c_node(&self, v: usize) -> bool {
        self.c_mask[v]
    }

    pub fn c_mask(&self) -> &[bool] {
        &self.c_mask
    }

    pub fn c_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.forests.iter().map(|&(v, _)| v)
    }

    /// Forest size at every C-node (0 when nothing is attached).
    pub fn forests(&self) -> &[(usize, usize)] {
        &self.forests
    }

    pub fn c_size(&self) -> usize {
        self.c_size
    }

    /// Largest D-forest over all C-nodes.
    pub fn max_forest(&self) -> usize {
        self.max_forest
    }

    /// The moved sibling subtrees at C-node `v`, grouped into a forest.
    pub fn forest_at(&self, v: usize) -> Result<ForestSpec> {
        if !self.c_mask.get(v).copied().unwrap_or(false) {
            return Err(Error::Domain(format!("node {v} is not a C-node")));
        }
        let mut classes = Vec::new();
        for class in self.tree.child_classes(v) {
            let moved = (0..class.multiplicity).filter(|&j| !self.c_mask[class.copy(j)]).count();
            if moved > 0 {
                classes.push((self.tree.subtree_tree(class.first), moved));
            }
        }
        ForestSpec::new(classes)
    }

    /// C-node mask as a 0/1 string in preorder.
    pub fn mask_string(&self) -> String {
        self.c_mask.iter().map(|&c| if c { '1' } else { '0' }).collect()
    }

    /// `node:size` pairs for the non-empty forests.
    pub fn forest_string(&self) -> String {
        let mut out = String::new();
        for &(v, s) in self.forests.iter().filter(|(_, s)| *s > 0) {
            if !out.is_empty() {
                out.push(' ');
            }
            let _ = write!(out, "{v}:{s}");
        }
        out
    }
}

/// Decomposes `tree` along the automorphism `a`.
pub fn decompose(tree: &CanonicalTree, a: &AutomorphismElement) -> Result<Decomposition> {
    a.validate(tree)?;
    Ok(decompose_valid(tree, a))
}

/// [`decompose`] for an automorphism known to be valid.
pub(crate) fn decompose_valid(tree: &CanonicalTree, a: &AutomorphismElement) -> Decomposition {
    let n = tree.size();
    let local = a.local();
    // a node is fixed iff its parent is fixed and it is not moved among its
    // siblings
    let mut c_mask = vec![false; n];
    c_mask[0] = true;
    let mut forests = Vec::new();
    for v in 0..n {
        if !c_mask[v] {
            continue;
        }
        let mut size = 0;
        for c in tree.children(v) {
            if local[c] as usize == c {
                c_mask[c] = true;
            } else {
                size += tree.subtree_size(c);
            }
        }
        forests.push((v, size));
    }
    let c_size = forests.len();
    let max_forest = forests.iter().map(|&(_, s)| s).max().unwrap_or(0);
    Decomposition {
        tree: tree.clone(),
        automorphism: a.clone(),
        c_mask,
        forests,
        c_size,
        max_forest,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star3(perm: Vec<usize>) -> (CanonicalTree, AutomorphismElement) {
        let t = CanonicalTree::star(3);
        let a = AutomorphismElement::from_class_permutations(&t, &[vec![perm], vec![], vec![], vec![]]).unwrap();
        (t, a)
    }

    #[test]
    fn identity_keeps_everything() {
        let t = CanonicalTree::parse_parens("((()())(()()))").unwrap();
        let d = decompose(&t, &AutomorphismElement::identity(&t)).unwrap();
        assert_eq!(d.c_size(), 7);
        assert_eq!(d.max_forest(), 0);
        assert!(d.forests().iter().all(|&(_, s)| s == 0));
        assert_eq!(d.mask_string(), "1111111");
        assert_eq!(d.forest_string(), "");
    }

    #[test]
    fn star_transposition() {
        let (t, a) = star3(vec![1, 0, 2]);
        let d = decompose(&t, &a).unwrap();
        assert_eq!(d.c_nodes().collect::<Vec<_>>(), vec![0, 3]);
        assert_eq!(d.forests(), &[(0, 2), (3, 0)]);
        assert_eq!(d.max_forest(), 2);
        assert_eq!(d.forest_at(0).unwrap().to_string(), "{2x()}");
        assert!(d.forest_at(1).is_err());
    }

    #[test]
    fn star_three_cycle() {
        let (t, a) = star3(vec![1, 2, 0]);
        let d = decompose(&t, &a).unwrap();
        assert_eq!(d.c_size(), 1);
        assert_eq!(d.forests(), &[(0, 3)]);
        assert_eq!(d.mask_string(), "1000");
        assert_eq!(d.forest_string(), "0:3");
    }

    #[test]
    fn invalid_automorphism_rejected() {
        let t = CanonicalTree::parse_parens("((())())").unwrap();
        // swap the chain child with the leaf child
        let bad = AutomorphismElement::from_local(&t, vec![0, 3, 2, 1]);
        assert!(bad.is_err());
        let t2 = CanonicalTree::star(2);
        let a = AutomorphismElement::identity(&t);
        assert!(decompose(&t2, &a).is_err());
    }

    #[test]
    fn nested_swap() {
        // root with two cherries; swap the cherries and the leaves of one
        let t = CanonicalTree::parse_parens("((()())(()()))").unwrap();
        let a = AutomorphismElement::from_class_permutations(
            &t,
            &[
                vec![vec![1, 0]],
                vec![vec![1, 0]],
                vec![],
                vec![],
                vec![vec![0, 1]],
                vec![],
                vec![],
            ],
        )
        .unwrap();
        let d = decompose(&t, &a).unwrap();
        assert_eq!(d.c_size(), 1);
        assert_eq!(d.forests(), &[(0, 6)]);
        assert_eq!(d.forest_at(0).unwrap().to_string(), "{2x(()())}");
    }
}
