//! Layouts (linear arrangements) and the operations defined on them: edge
//! expand, LA cost, block types, the block swap operator and the spinal
//! decomposition of a tree under a layout.
//!
//! Positions are 1-based in the public API. Internally a layout stores both
//! directions of the bijection.

use std::collections::HashSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, EdgeKind, EmbeddedTree, Graph, HalinGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("layout is not a permutation of 0..{n}")]
    NotPermutation { n: usize },
    #[error("block is not contiguous in the layout")]
    NotContiguous,
    #[error("blocks overlap")]
    Overlapping,
    #[error("blocks must be non-empty")]
    EmptyBlock,
    #[error("blocks do not partition the vertex set")]
    NotAPartition,
}

/// Bijection `φ : V → {1..n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Layout {
    vertex_at: Vec<VertexId>,
    position: Vec<usize>,
}

impl Layout {
    /// `order[i]` is the vertex at position `i + 1`.
    pub fn from_order(order: Vec<VertexId>) -> Result<Self, LayoutError> {
        let n = order.len();
        let mut position = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                return Err(LayoutError::NotPermutation { n });
            }
            position[v] = i + 1;
        }
        Ok(Layout {
            vertex_at: order,
            position,
        })
    }

    pub fn identity(n: usize) -> Self {
        Layout::from_order((0..n).collect()).expect("identity is a permutation")
    }

    pub fn len(&self) -> usize {
        self.vertex_at.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_at.is_empty()
    }

    /// `φ(v)`, 1-based.
    pub fn position(&self, v: VertexId) -> usize {
        self.position[v]
    }

    /// `φ⁻¹(p)`, 1-based.
    pub fn vertex_at(&self, p: usize) -> VertexId {
        self.vertex_at[p - 1]
    }

    pub fn order(&self) -> &[VertexId] {
        &self.vertex_at
    }

    pub fn positions(&self) -> &[usize] {
        &self.position
    }

    pub fn first(&self) -> VertexId {
        self.vertex_at[0]
    }

    pub fn last(&self) -> VertexId {
        self.vertex_at[self.len() - 1]
    }

    pub fn reversed(&self) -> Layout {
        let mut order = self.vertex_at.clone();
        order.reverse();
        Layout::from_order(order).expect("reversal keeps the permutation")
    }

    pub fn into_order(self) -> Vec<VertexId> {
        self.vertex_at
    }

    /// 1-based positions occupied by `set`, or an error when they do not form
    /// one contiguous range.
    pub fn block_range(&self, set: &[VertexId]) -> Result<Range<usize>, LayoutError> {
        if set.is_empty() {
            return Err(LayoutError::EmptyBlock);
        }
        let lo = set.iter().map(|&v| self.position[v]).min().unwrap();
        let hi = set.iter().map(|&v| self.position[v]).max().unwrap();
        let distinct: HashSet<_> = set.iter().collect();
        if hi - lo + 1 != set.len() || distinct.len() != set.len() {
            return Err(LayoutError::NotContiguous);
        }
        Ok(lo..hi + 1)
    }
}

/// `λ(e, φ) = |φ(u) − φ(v)|`.
pub fn expand(e: &Edge, layout: &Layout) -> usize {
    layout.position(e.u).abs_diff(layout.position(e.v))
}

/// LA cost with the per-edge breakdown.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ArrangementReport {
    pub total_cost: u64,
    pub tree_cost: u64,
    pub cycle_cost: u64,
    /// `(u, v, expand)` in the graph's edge order.
    pub per_edge_expand: Vec<(VertexId, VertexId, u64)>,
}

pub fn la_cost(graph: &Graph, layout: &Layout) -> ArrangementReport {
    report_for(graph.edges().iter(), layout)
}

pub fn halin_la_cost(h: &HalinGraph, layout: &Layout) -> ArrangementReport {
    report_for(h.edges(), layout)
}

fn report_for<'a>(edges: impl Iterator<Item = &'a Edge>, layout: &Layout) -> ArrangementReport {
    let mut report = ArrangementReport {
        total_cost: 0,
        tree_cost: 0,
        cycle_cost: 0,
        per_edge_expand: vec![],
    };
    for e in edges {
        let x = expand(e, layout) as u64;
        match e.kind {
            EdgeKind::Tree => report.tree_cost += x,
            EdgeKind::Cycle => report.cycle_cost += x,
        }
        report.total_cost += x;
        report.per_edge_expand.push((e.u, e.v, x));
    }
    report
}

/// Sum of expands without building a report.
pub fn la_value<'a>(edges: impl IntoIterator<Item = &'a Edge>, layout: &Layout) -> u64 {
    edges.into_iter().map(|e| expand(e, layout) as u64).sum()
}

pub fn tree_la(tree: &EmbeddedTree, layout: &Layout) -> u64 {
    (0..tree.n())
        .filter_map(|v| {
            tree.parent(v)
                .map(|p| layout.position(p).abs_diff(layout.position(v)) as u64)
        })
        .sum()
}

/// Ordered partition `(V₁, …, V_k)` of the vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    blocks: Vec<Vec<VertexId>>,
}

impl BlockPartition {
    pub fn new(n: usize, blocks: Vec<Vec<VertexId>>) -> Result<Self, LayoutError> {
        let mut seen = vec![false; n];
        let mut count = 0;
        for b in &blocks {
            for &v in b {
                if v >= n || seen[v] {
                    return Err(LayoutError::NotAPartition);
                }
                seen[v] = true;
                count += 1;
            }
        }
        if count != n {
            return Err(LayoutError::NotAPartition);
        }
        Ok(BlockPartition { blocks })
    }

    pub fn blocks(&self) -> &[Vec<VertexId>] {
        &self.blocks
    }
}

/// True iff every vertex of `Vᵢ` precedes every vertex of `Vⱼ` for `i < j`.
pub fn is_of_type(layout: &Layout, partition: &BlockPartition) -> bool {
    blocks_in_order(layout, partition.blocks())
}

/// [`is_of_type`] for blocks that need not cover the vertex set. Empty
/// blocks impose nothing.
pub fn blocks_in_order(layout: &Layout, blocks: &[Vec<VertexId>]) -> bool {
    let mut prev_max = 0;
    for b in blocks.iter().filter(|b| !b.is_empty()) {
        let lo = b.iter().map(|&v| layout.position(v)).min().unwrap();
        let hi = b.iter().map(|&v| layout.position(v)).max().unwrap();
        if lo <= prev_max {
            return false;
        }
        prev_max = hi;
    }
    true
}

/// `σ(φ, A, B)`: exchange two contiguous blocks, keeping the order inside
/// each block. Vertices between the blocks shift by `|B| − |A|`.
pub fn sigma_swap(layout: &Layout, a: &[VertexId], b: &[VertexId]) -> Result<Layout, LayoutError> {
    let ra = layout.block_range(a)?;
    let rb = layout.block_range(b)?;
    let (first, second) = if ra.start < rb.start { (ra, rb) } else { (rb, ra) };
    if first.end > second.start {
        return Err(LayoutError::Overlapping);
    }
    let order = layout.order();
    let slice = |r: &Range<usize>| &order[r.start - 1..r.end - 1];
    let mut out = Vec::with_capacity(order.len());
    out.extend_from_slice(&order[..first.start - 1]);
    out.extend_from_slice(slice(&second));
    out.extend_from_slice(&order[first.end - 1..second.start - 1]);
    out.extend_from_slice(slice(&first));
    out.extend_from_slice(&order[second.end - 1..]);
    Ok(Layout::from_order(out).expect("swap keeps the permutation"))
}

/// Reverses the order of a contiguous block in place.
pub fn reverse_block(layout: &Layout, set: &[VertexId]) -> Result<Layout, LayoutError> {
    let r = layout.block_range(set)?;
    let mut order = layout.order().to_vec();
    order[r.start - 1..r.end - 1].reverse();
    Ok(Layout::from_order(order).expect("reversal keeps the permutation"))
}

/// The tree path between `φ⁻¹(1)` and `φ⁻¹(n)`. For `n = 1` this is the single
/// vertex.
pub fn spinal_path(tree: &EmbeddedTree, layout: &Layout) -> Vec<VertexId> {
    tree.path_between(layout.first(), layout.last())
}

/// `δ_φ(lo, hi, S)`: members of `S` strictly between `φ(lo)` and `φ(hi)`. A
/// missing bound is open.
pub fn delta_count(
    layout: &Layout,
    lo: Option<VertexId>,
    hi: Option<VertexId>,
    set: &[VertexId],
) -> usize {
    let lo = lo.map_or(0, |v| layout.position(v));
    let hi = hi.map_or(usize::MAX, |v| layout.position(v));
    set.iter()
        .filter(|&&u| {
            let p = layout.position(u);
            lo < p && p < hi
        })
        .count()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub anchor: VertexId,
    pub vertices: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpinalSubtree {
    pub root: VertexId,
    pub vertices: Vec<VertexId>,
    pub branches: Vec<Branch>,
}

impl SpinalSubtree {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpinalDecomposition {
    pub path: Vec<VertexId>,
    pub subtrees: Vec<SpinalSubtree>,
}

/// Removes the spinal path edges (and, for a Halin graph, the cycle edges)
/// and reports the subtree hanging from each spinal vertex together with its
/// branches.
pub fn spinal_decomposition(tree: &EmbeddedTree, layout: &Layout) -> SpinalDecomposition {
    let path = spinal_path(tree, layout);
    let n = tree.n();
    let mut on_path = vec![false; n];
    for &w in &path {
        on_path[w] = true;
    }
    let mut subtrees = Vec::with_capacity(path.len());
    for &w in &path {
        let mut vertices = vec![w];
        let mut branches = vec![];
        for anchor in tree.neighbors(w).filter(|&u| !on_path[u]) {
            let mut comp = vec![];
            let mut stack = vec![(anchor, w)];
            while let Some((x, from)) = stack.pop() {
                comp.push(x);
                stack.extend(tree.neighbors(x).filter(|&y| y != from).map(|y| (y, x)));
            }
            comp.sort_unstable();
            vertices.extend_from_slice(&comp);
            branches.push(Branch {
                anchor,
                vertices: comp,
            });
        }
        vertices.sort_unstable();
        subtrees.push(SpinalSubtree {
            root: w,
            vertices,
            branches,
        });
    }
    SpinalDecomposition { path, subtrees }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{halin_from_tree, EmbeddedTree};
    use std::collections::BTreeMap;

    fn star(k: usize) -> EmbeddedTree {
        let mut m = BTreeMap::new();
        m.insert(0, (1..=k).collect());
        EmbeddedTree::new(0, &m).unwrap()
    }

    fn lay(order: &[usize]) -> Layout {
        Layout::from_order(order.to_vec()).unwrap()
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Layout::from_order(vec![0, 0, 1]).is_err());
        assert!(Layout::from_order(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn expands() {
        let l = lay(&[0, 1, 2]);
        assert_eq!(expand(&Edge::new(0, 2, EdgeKind::Tree), &l), 2);
        assert_eq!(expand(&Edge::new(0, 1, EdgeKind::Tree), &l), 1);
        let r = l.reversed();
        assert_eq!(expand(&Edge::new(0, 2, EdgeKind::Tree), &r), 2);
    }

    #[test]
    fn cost_of_basic_graphs() {
        for n in 2..8 {
            assert_eq!(la_cost(&Graph::path(n), &Layout::identity(n)).total_cost, n as u64 - 1);
        }
        for n in 3..8 {
            let r = la_cost(&Graph::cycle(n), &Layout::identity(n));
            assert_eq!(r.total_cost, 2 * (n as u64 - 1));
            assert_eq!(r.cycle_cost, r.total_cost);
        }
        let k4 = halin_from_tree(star(3)).unwrap();
        let mut perm = vec![0, 1, 2, 3];
        for _ in 0..24 {
            let r = halin_la_cost(&k4, &lay(&perm));
            assert_eq!(r.total_cost, 10);
            assert_eq!(r.tree_cost + r.cycle_cost, 10);
            next_permutation(&mut perm);
        }
    }

    fn next_permutation(p: &mut [usize]) {
        let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
            p.reverse();
            return;
        };
        let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }

    #[test]
    fn types() {
        let l = lay(&[0, 1, 2, 3]);
        let p = BlockPartition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(is_of_type(&l, &p));
        assert!(!is_of_type(&lay(&[0, 2, 1, 3]), &p));
        let whole = BlockPartition::new(4, vec![vec![0, 1, 2, 3]]).unwrap();
        assert!(is_of_type(&lay(&[3, 1, 0, 2]), &whole));
        assert!(BlockPartition::new(4, vec![vec![0, 1], vec![1, 2, 3]]).is_err());
        assert!(BlockPartition::new(4, vec![vec![0, 1], vec![2]]).is_err());
    }

    #[test]
    fn sigma_examples() {
        // a1 a2 b1 b2 = 0 1 2 3
        let l = lay(&[0, 1, 2, 3]);
        assert_eq!(sigma_swap(&l, &[0, 1], &[2, 3]).unwrap().order(), &[2, 3, 0, 1]);
        // a1 a2 x b1 b2 = 0 1 4 2 3
        let l = lay(&[0, 1, 4, 2, 3]);
        assert_eq!(sigma_swap(&l, &[0, 1], &[2, 3]).unwrap().order(), &[2, 3, 4, 0, 1]);
        // unequal sizes shift the gap
        let l = lay(&[0, 4, 1, 2, 3]);
        assert_eq!(sigma_swap(&l, &[0], &[2, 3]).unwrap().order(), &[2, 3, 4, 1, 0]);
        assert_eq!(sigma_swap(&l, &[0, 1], &[2]), Err(LayoutError::NotContiguous));
        assert_eq!(sigma_swap(&l, &[4, 2], &[3]), Err(LayoutError::NotContiguous));
        assert_eq!(sigma_swap(&l, &[4, 1], &[1, 2]), Err(LayoutError::Overlapping));
        assert_eq!(sigma_swap(&l, &[4, 1], &[1]), Err(LayoutError::Overlapping));
    }

    #[test]
    fn reverse_block_keeps_outside() {
        let l = lay(&[0, 1, 2, 3, 4]);
        assert_eq!(reverse_block(&l, &[1, 2, 3]).unwrap().order(), &[0, 3, 2, 1, 4]);
    }

    #[test]
    fn spinal_paths_on_stars() {
        // K4: l1=1, c=0, l2=2, l3=3
        let t = star(3);
        assert_eq!(spinal_path(&t, &lay(&[1, 0, 2, 3])), vec![1, 0, 3]);
        let t = star(4);
        assert_eq!(spinal_path(&t, &lay(&[1, 2, 0, 3, 4])), vec![1, 0, 4]);
    }

    #[test]
    fn delta_examples() {
        let l = lay(&[0, 1, 2, 3]);
        assert_eq!(delta_count(&l, Some(0), Some(3), &[1, 2]), 2);
        assert_eq!(delta_count(&l, Some(0), Some(1), &[0, 1, 2, 3]), 0);
        assert_eq!(delta_count(&l, None, Some(3), &[0, 1, 2, 3]), 3);
        assert_eq!(delta_count(&l, None, None, &[0, 2]), 2);
    }

    #[test]
    fn decomposition_of_stars() {
        let d = spinal_decomposition(&star(4), &lay(&[1, 2, 0, 3, 4]));
        assert_eq!(d.path, vec![1, 0, 4]);
        let mid = &d.subtrees[1];
        assert_eq!(mid.root, 0);
        let branches: Vec<_> = mid.branches.iter().map(|b| b.vertices.clone()).collect();
        assert_eq!(branches, vec![vec![2], vec![3]]);
        assert!(mid.branches.iter().all(|b| b.vertices.len() == 1));

        let d = spinal_decomposition(&star(3), &lay(&[1, 0, 2, 3]));
        assert_eq!(d.subtrees[1].vertices, vec![0, 2]);
        assert_eq!(d.subtrees.iter().map(|s| s.size()).sum::<usize>(), 4);
    }
}
