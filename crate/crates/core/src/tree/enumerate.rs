use std::fmt;

use super::CanonicalTree;
use crate::error::{Error, Result};

/// Caps on exhaustive listing; exceeding them is a resource error rather than
/// a silent truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub max_tree_size: usize,
    pub max_forest_size: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            max_tree_size: 16,
            max_forest_size: 14,
        }
    }
}

/// A D-forest: a multiset of Pólya trees in which every distinct tree occurs
/// at least twice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ForestSpec {
    classes: Vec<(CanonicalTree, usize)>,
}

impl ForestSpec {
    /// The empty forest.
    pub fn empty() -> Self {
        ForestSpec { classes: Vec::new() }
    }

    /// Validates multiplicities (all `>= 2`) and distinctness.
    pub fn new(mut classes: Vec<(CanonicalTree, usize)>) -> Result<Self> {
        classes.sort_by(|a, b| b.0.cmp(&a.0));
        if classes.iter().any(|(_, m)| *m < 2) {
            return Err(Error::Domain(
                "every tree of a D-forest must appear at least twice".into(),
            ));
        }
        if classes.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Domain("forest classes must be distinct trees".into()));
        }
        Ok(ForestSpec { classes })
    }

    pub fn classes(&self) -> &[(CanonicalTree, usize)] {
        &self.classes
    }

    /// Total number of nodes.
    pub fn size(&self) -> usize {
        self.classes.iter().map(|(t, m)| t.size() * m).sum()
    }

    /// Parent map of all forest nodes (copies laid out one after another in
    /// preorder); roots have `None`.
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut out = Vec::with_capacity(self.size());
        for (t, m) in &self.classes {
            let p = t.parents();
            for _ in 0..*m {
                let offset = out.len();
                out.extend(p.iter().map(|x| x.map(|q| q + offset)));
            }
        }
        out
    }
}

impl fmt::Display for ForestSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.classes.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.classes.iter().map(|(t, m)| format!("{m}x{t}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// All canonical trees of size `n`, in non-increasing canonical order.
pub fn enumerate_trees(n: usize) -> Result<Vec<CanonicalTree>> {
    enumerate_trees_with(n, &EnumerationLimits::default())
}

pub fn enumerate_trees_with(n: usize, limits: &EnumerationLimits) -> Result<Vec<CanonicalTree>> {
    if n == 0 {
        return Err(Error::EmptyRange("trees have at least one node".into()));
    }
    if n > limits.max_tree_size {
        return Err(Error::ResourceCap {
            what: "tree enumeration size",
            requested: n,
            cap: limits.max_tree_size,
        });
    }
    Ok(trees_up_to(n).pop().expect("size n present"))
}

/// `by_size[s - 1]` lists all trees of size `s`, for `s = 1..=n`.
fn trees_up_to(n: usize) -> Vec<Vec<CanonicalTree>> {
    let mut by_size: Vec<Vec<CanonicalTree>> = vec![vec![CanonicalTree::single()]];
    for s in 2..=n {
        // all smaller trees, in non-increasing canonical order
        let pool: Vec<&CanonicalTree> = by_size.iter().rev().flatten().collect();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        multisets(&pool, 0, s - 1, &mut chosen, &mut |kids| {
            out.push(CanonicalTree::from_sorted_children(
                kids.iter().map(|&i| pool[i].as_slice()),
            ));
        });
        out.sort_unstable_by(|a, b| b.cmp(a));
        by_size.push(out);
    }
    by_size
}

/// Non-increasing index sequences over `pool` (indices non-decreasing) whose
/// tree sizes add up to `remaining`.
fn multisets(
    pool: &[&CanonicalTree],
    start: usize,
    remaining: usize,
    chosen: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if remaining == 0 {
        emit(chosen);
        return;
    }
    for i in start..pool.len() {
        if pool[i].size() > remaining {
            continue;
        }
        chosen.push(i);
        multisets(pool, i, remaining - pool[i].size(), chosen, emit);
        chosen.pop();
    }
}

/// All D-forests of total size `n` (the empty forest for `n = 0`).
pub fn enumerate_forests(n: usize) -> Result<Vec<ForestSpec>> {
    enumerate_forests_with(n, &EnumerationLimits::default())
}

pub fn enumerate_forests_with(n: usize, limits: &EnumerationLimits) -> Result<Vec<ForestSpec>> {
    if n > limits.max_forest_size {
        return Err(Error::ResourceCap {
            what: "forest enumeration size",
            requested: n,
            cap: limits.max_forest_size,
        });
    }
    if n < 2 {
        return Ok(if n == 0 { vec![ForestSpec::empty()] } else { Vec::new() });
    }
    let by_size = trees_up_to(n / 2);
    let pool: Vec<&CanonicalTree> = by_size.iter().rev().flatten().collect();
    let mut out = Vec::new();
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    forests(&pool, 0, n, &mut chosen, &mut |classes| {
        out.push(ForestSpec {
            classes: classes.iter().map(|&(i, m)| (pool[i].clone(), m)).collect(),
        });
    });
    Ok(out)
}

/// Chosen `(pool index, multiplicity)` pairs.
type Choice = (usize, usize);

fn forests(
    pool: &[&CanonicalTree],
    start: usize,
    remaining: usize,
    chosen: &mut Vec<Choice>,
    emit: &mut dyn FnMut(&[Choice]),
) {
    if remaining == 0 {
        emit(chosen);
        return;
    }
    for i in start..pool.len() {
        let s = pool[i].size();
        let mut m = 2;
        while m * s <= remaining {
            chosen.push((i, m));
            forests(pool, i + 1, remaining - m * s, chosen, emit);
            chosen.pop();
            m += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tree_counts() {
        let counts: Vec<usize> = (1..=10).map(|n| enumerate_trees(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 9, 20, 48, 115, 286, 719]);
    }

    #[test]
    fn size_four_trees() {
        let got: Vec<String> = enumerate_trees(4).unwrap().iter().map(|t| t.to_parens()).collect();
        assert_eq!(got, vec!["(((())))", "((()()))", "((())())", "(()()())"]);
    }

    #[test]
    fn trees_are_distinct_and_canonical() {
        let trees = enumerate_trees(9).unwrap();
        for w in trees.windows(2) {
            assert!(w[0] > w[1]);
        }
        for t in &trees {
            assert_eq!(&CanonicalTree::parse_parens(&t.to_parens()).unwrap(), t);
        }
    }

    #[test]
    fn caps_and_empty_range() {
        assert!(matches!(enumerate_trees(0), Err(Error::EmptyRange(_))));
        assert!(matches!(enumerate_trees(17), Err(Error::ResourceCap { .. })));
        assert!(matches!(enumerate_forests(15), Err(Error::ResourceCap { .. })));
        let wide = EnumerationLimits {
            max_tree_size: 3,
            max_forest_size: 3,
        };
        assert!(enumerate_trees_with(4, &wide).is_err());
    }

    #[test]
    fn small_forests() {
        assert_eq!(enumerate_forests(0).unwrap(), vec![ForestSpec::empty()]);
        assert!(enumerate_forests(1).unwrap().is_empty());
        let two = enumerate_forests(2).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].to_string(), "{2x()}");
        let four: Vec<String> = enumerate_forests(4).unwrap().iter().map(|f| f.to_string()).collect();
        assert_eq!(four, vec!["{2x(())}", "{4x()}"]);
        let five = enumerate_forests(5).unwrap();
        assert_eq!(five.len(), 1);
        assert_eq!(five[0].to_string(), "{5x()}");
    }

    #[test]
    fn forest_validation() {
        assert!(ForestSpec::new(vec![(CanonicalTree::single(), 1)]).is_err());
        let dup = vec![(CanonicalTree::single(), 2), (CanonicalTree::single(), 3)];
        assert!(ForestSpec::new(dup).is_err());
        let f = ForestSpec::new(vec![(CanonicalTree::chain(2), 2)]).unwrap();
        assert_eq!(f.size(), 4);
        assert_eq!(f.parents(), vec![None, Some(0), None, Some(2)]);
    }
}
