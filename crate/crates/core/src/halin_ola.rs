//! Optimal arrangements of Halin graphs whose tree is recursively balanced.
//!
//! The lower bound `2(n−1) + LA*(T)` holds for every Halin graph. For an RBT
//! tree it is attained: starting from any block-structured tree optimum, a
//! sequence of sibling block swaps reorders the subtrees until the leaves
//! appear in cycle order, which leaves the tree cost untouched and makes the
//! cycle cost exactly `2(n−1)`.
//!
//! [`rearrange_to_halin_ola`] performs that swap sequence and records it as a
//! replayable [`SwapTrace`]. [`direct_rbt_halin_ola`] builds the same kind of
//! layout in one pass and serves as a cross-check.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EmbeddedTree, HalinGraph, VertexId};
use crate::layout::{halin_la_cost, la_value, tree_la, Layout, LayoutError};
use crate::tree_ola::{self, is_recursively_balanced, root_split, OracleError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HalinOlaError {
    #[error("tree is not recursively balanced (vertex {0})")]
    NotRbt(VertexId),
    #[error("input layout has tree cost {actual}, the tree optimum is {expected}")]
    NotTreeOptimalInput { expected: u64, actual: u64 },
    #[error("subtree of vertex {0} is not contiguous in the input layout")]
    NotBlockStructured(VertexId),
    #[error("layout has {actual} positions, graph has {expected} vertices")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("tree optimum unavailable: tree is not recursively balanced and {0}")]
    TreeOptimumUnavailable(OracleError),
}

/// `2(n−1) + LA(φ_T*, T)`.
pub fn halin_lower_bound(h: &HalinGraph, tree_opt_cost: u64) -> u64 {
    2 * (h.n() as u64 - 1) + tree_opt_cost
}

pub fn cycle_cost(h: &HalinGraph, layout: &Layout) -> u64 {
    la_value(h.cycle_edges(), layout)
}

/// No redundant crossing: the cycle costs exactly `2(n−1)`.
pub fn cycle_cost_is_tight(h: &HalinGraph, layout: &Layout) -> bool {
    cycle_cost(h, layout) == 2 * (h.n() as u64 - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeOptSource {
    Rbt,
    Oracle,
}

/// Exact tree optimum: linear time for RBTs, brute force otherwise.
pub fn tree_optimum(
    tree: &EmbeddedTree,
    oracle_limit: usize,
) -> Result<(u64, TreeOptSource), HalinOlaError> {
    match tree_ola::rbt_ola(tree) {
        Ok(l) => Ok((tree_la(tree, &l), TreeOptSource::Rbt)),
        Err(_) => tree_ola::brute_force_cost(&tree.to_graph(), oracle_limit)
            .map(|c| (c, TreeOptSource::Oracle))
            .map_err(HalinOlaError::TreeOptimumUnavailable),
    }
}

/// A block taking part in one swap: the subtree root and its 1-based range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlockRef {
    pub root: VertexId,
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SwapStep {
    pub level_height: usize,
    /// The earlier of the two blocks.
    pub block_a: BlockRef,
    pub block_b: BlockRef,
    /// Both blocks are mirrored on the way; set when they sit on opposite
    /// sides of their parent.
    pub reversed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SwapTrace {
    pub steps: Vec<SwapStep>,
    pub total_swaps: usize,
    pub total_moved_vertices: usize,
}

impl SwapTrace {
    /// Applies one step to a layout.
    pub fn apply(step: &SwapStep, layout: &Layout) -> Result<Layout, LayoutError> {
        let (a, b) = (step.block_a, step.block_b);
        let n = layout.len();
        if a.len != b.len || a.start + a.len > b.start || b.start + b.len > n + 1 || a.start == 0 {
            return Err(LayoutError::Overlapping);
        }
        let mut order = layout.order().to_vec();
        swap_ranges(&mut order, a.start - 1, b.start - 1, a.len, step.reversed);
        Layout::from_order(order)
    }

    pub fn replay(&self, start: &Layout) -> Result<Layout, LayoutError> {
        self.steps
            .iter()
            .try_fold(start.clone(), |l, s| SwapTrace::apply(s, &l))
    }
}

fn swap_ranges(order: &mut [VertexId], a: usize, b: usize, len: usize, reversed: bool) {
    let (head, tail) = order.split_at_mut(b);
    let left = &mut head[a..a + len];
    let right = &mut tail[..len];
    left.swap_with_slice(right);
    if reversed {
        left.reverse();
        right.reverse();
    }
}

/// Turns an optimal, block-structured tree layout into a Halin optimum using
/// only swaps of equal-size sibling subtrees.
///
/// The top level chains the root's subtrees so that consecutive blocks are
/// cycle neighbours and the last block closes the cycle back to the first.
/// Then every inner subtree, by decreasing height, orders its children from
/// the side of the block it is attached to: a subtree at the very left starts
/// next to the last top-level block, one at the very right ends next to the
/// first, and a middle one is filled from both ends inward.
pub fn rearrange_to_halin_ola(
    h: &HalinGraph,
    tree_layout: &Layout,
) -> Result<(Layout, SwapTrace), HalinOlaError> {
    let tree = h.tree();
    if tree_layout.len() != h.n() {
        return Err(HalinOlaError::SizeMismatch {
            expected: h.n(),
            actual: tree_layout.len(),
        });
    }
    let optimum = tree_ola::rbt_ola(tree).map_err(|e| match e {
        tree_ola::TreeOlaError::NotRecursivelyBalanced(v) => HalinOlaError::NotRbt(v),
    })?;
    let expected = tree_la(tree, &optimum);
    let actual = tree_la(tree, tree_layout);
    if expected != actual {
        return Err(HalinOlaError::NotTreeOptimalInput { expected, actual });
    }
    let mut r = Rearranger::new(h, tree_layout)?;
    if cycle_cost_is_tight(h, tree_layout) {
        return Ok((tree_layout.clone(), SwapTrace::default()));
    }
    r.chain_top_level();
    r.arrange_inner_subtrees();
    let layout = Layout::from_order(r.order).expect("swaps keep the permutation");
    debug_assert!(cycle_cost_is_tight(h, &layout));
    let trace = SwapTrace {
        total_swaps: r.steps.len(),
        total_moved_vertices: r.moved,
        steps: r.steps,
    };
    Ok((layout, trace))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Left,
    Right,
    Mid,
}

struct Rearranger<'a> {
    h: &'a HalinGraph,
    tree: &'a EmbeddedTree,
    order: Vec<VertexId>,
    pos: Vec<usize>,
    /// 0-based start of every subtree's block.
    start: Vec<usize>,
    size: Vec<usize>,
    height: Vec<usize>,
    /// Cycle index of each leaf.
    leaf_index: Vec<usize>,
    /// Cycle indices of the first and last leaf below each vertex.
    arc: Vec<(usize, usize)>,
    top_first: VertexId,
    top_last: VertexId,
    steps: Vec<SwapStep>,
    moved: usize,
}

impl<'a> Rearranger<'a> {
    fn new(h: &'a HalinGraph, layout: &Layout) -> Result<Self, HalinOlaError> {
        let tree = h.tree();
        let n = h.n();
        let order = layout.order().to_vec();
        let pos: Vec<usize> = layout.positions().iter().map(|p| p - 1).collect();
        let size = tree.subtree_sizes();
        let height = tree.heights();
        let mut leaf_index = vec![usize::MAX; n];
        for (i, &l) in h.cycle_order().iter().enumerate() {
            leaf_index[l] = i;
        }
        let mut start = pos.clone();
        let mut end = pos.clone();
        let mut arc = vec![(usize::MAX, 0); n];
        for &v in tree.preorder().iter().rev() {
            if tree.is_leaf(v) {
                arc[v] = (leaf_index[v], leaf_index[v]);
            } else {
                let cs = tree.children(v);
                arc[v] = (arc[cs[0]].0, arc[cs[cs.len() - 1]].1);
            }
            if end[v] - start[v] + 1 != size[v] {
                return Err(HalinOlaError::NotBlockStructured(v));
            }
            if let Some(p) = tree.parent(v) {
                start[p] = start[p].min(start[v]);
                end[p] = end[p].max(end[v]);
            }
        }
        Ok(Rearranger {
            h,
            tree,
            order,
            pos,
            start,
            size,
            height,
            leaf_index,
            arc,
            top_first: tree.root(),
            top_last: tree.root(),
            steps: vec![],
            moved: 0,
        })
    }

    /// Children of `v` sorted by the current position of their blocks.
    fn slots(&self, v: VertexId) -> Vec<VertexId> {
        let mut cs = self.tree.children(v).to_vec();
        cs.sort_by_key(|&c| self.start[c]);
        cs
    }

    fn in_block(&self, x: VertexId, block: VertexId) -> bool {
        let s = self.start[block];
        (s..s + self.size[block]).contains(&self.pos[x])
    }

    /// `σ` on the sibling blocks of `x` and `y`, mirroring both when they lie
    /// on different sides of `parent`.
    fn swap(&mut self, level: usize, parent: VertexId, x: VertexId, y: VertexId, slots: &mut [VertexId]) {
        if x == y {
            return;
        }
        let (x, y) = if self.start[x] < self.start[y] { (x, y) } else { (y, x) };
        let (a, b, len) = (self.start[x], self.start[y], self.size[x]);
        debug_assert_eq!(len, self.size[y]);
        let p = self.pos[parent];
        let reversed = (a < p) != (b < p);
        for (from, to) in [(a, b), (b, a)] {
            for i in from..from + len {
                let u = self.order[i];
                let (old_start, old_pos) = (self.start[u], self.pos[u]);
                if reversed {
                    self.start[u] = to + (from + len) - (old_start + self.size[u]);
                    self.pos[u] = to + (from + len - 1) - old_pos;
                } else {
                    self.start[u] = old_start - from + to;
                    self.pos[u] = old_pos - from + to;
                }
            }
        }
        swap_ranges(&mut self.order, a, b, len, reversed);
        self.moved += 2 * len;
        self.steps.push(SwapStep {
            level_height: level,
            block_a: BlockRef { root: x, start: a + 1, len },
            block_b: BlockRef { root: y, start: b + 1, len },
            reversed,
        });
        let i = slots.iter().position(|&s| s == x).expect("x is a slot");
        let j = slots.iter().position(|&s| s == y).expect("y is a slot");
        slots.swap(i, j);
    }

    fn chain_top_level(&mut self) {
        let root = self.tree.root();
        let level = self.height[root];
        let children = self.tree.children(root);
        let k = children.len();
        let index = |c: VertexId| children.iter().position(|&x| x == c).unwrap();
        let adjacent = |a: VertexId, b: VertexId| {
            let (i, j) = (index(a), index(b));
            (i + 1) % k == j || (j + 1) % k == i
        };
        let mut slots = self.slots(root);
        let left = slots[0];
        // The cycle neighbour of the first block that is not its embedding
        // predecessor closes the chain at the far end.
        let right = children[(index(left) + 1) % k];
        let last = slots[k - 1];
        self.swap(level, root, right, last, &mut slots);
        for i in 0..k.saturating_sub(2) {
            let cur = slots[i];
            let next = *slots[i + 1..k - 1]
                .iter()
                .find(|&&c| adjacent(cur, c))
                .expect("chain continues through a cycle neighbour");
            let here = slots[i + 1];
            self.swap(level, root, here, next, &mut slots);
        }
        self.top_first = slots[0];
        self.top_last = slots[k - 1];
    }

    fn arrange_inner_subtrees(&mut self) {
        let root = self.tree.root();
        let max_h = self.height[root];
        let mut by_height: Vec<Vec<VertexId>> = vec![vec![]; max_h + 1];
        for v in 0..self.h.n() {
            if v != root && self.height[v] >= 2 {
                by_height[self.height[v]].push(v);
            }
        }
        for h in (2..=max_h).rev() {
            for &v in &by_height[h] {
                self.arrange(v, h);
            }
        }
    }

    fn role(&self, v: VertexId) -> Role {
        if self.start[v] == 0 {
            Role::Left
        } else if self.start[v] + self.size[v] == self.h.n() {
            Role::Right
        } else {
            Role::Mid
        }
    }

    /// Leaves just outside the arc of `v`, before and after it in cycle
    /// order.
    fn outside_neighbours(&self, v: VertexId) -> (VertexId, VertexId) {
        let cycle = self.h.cycle_order();
        let m = cycle.len();
        let (f, l) = self.arc[v];
        (cycle[(f + m - 1) % m], cycle[(l + 1) % m])
    }

    /// Child of `v` whose arc contains leaf `x`.
    fn child_with_leaf(&self, v: VertexId, x: VertexId) -> VertexId {
        let i = self.leaf_index[x];
        *self
            .tree
            .children(v)
            .iter()
            .find(|&&c| self.arc[c].0 <= i && i <= self.arc[c].1)
            .expect("leaf lies in the arc of one child")
    }

    /// The endpoint child of `v` touching the outside leaf `x` on the cycle.
    fn child_facing(&self, v: VertexId, x: VertexId) -> VertexId {
        let (before, after) = self.outside_neighbours(v);
        let cycle = self.h.cycle_order();
        if x == before {
            self.child_with_leaf(v, cycle[self.arc[v].0])
        } else {
            debug_assert_eq!(x, after);
            self.child_with_leaf(v, cycle[self.arc[v].1])
        }
    }

    fn sibling_adjacent(&self, v: VertexId, a: VertexId, b: VertexId) -> bool {
        let cs = self.tree.children(v);
        let i = cs.iter().position(|&c| c == a).unwrap();
        let j = cs.iter().position(|&c| c == b).unwrap();
        i.abs_diff(j) == 1
    }

    fn arrange(&mut self, v: VertexId, level: usize) {
        let mut slots = self.slots(v);
        let k = slots.len();
        let (before, after) = self.outside_neighbours(v);
        match self.role(v) {
            Role::Left => {
                let anchor = if self.in_block(before, self.top_last) { before } else { after };
                debug_assert!(self.in_block(anchor, self.top_last));
                let first = self.child_facing(v, anchor);
                let here = slots[0];
                self.swap(level, v, here, first, &mut slots);
                for i in 0..k.saturating_sub(2) {
                    let cur = slots[i];
                    let next = *slots[i + 1..]
                        .iter()
                        .find(|&&c| self.sibling_adjacent(v, cur, c))
                        .expect("left chain continues");
                    let here = slots[i + 1];
                    self.swap(level, v, here, next, &mut slots);
                }
            }
            Role::Right => {
                let anchor = if self.in_block(before, self.top_first) { before } else { after };
                debug_assert!(self.in_block(anchor, self.top_first));
                let last = self.child_facing(v, anchor);
                let here = slots[k - 1];
                self.swap(level, v, here, last, &mut slots);
                for i in (2..k).rev() {
                    let cur = slots[i];
                    let next = *slots[..i]
                        .iter()
                        .find(|&&c| self.sibling_adjacent(v, cur, c))
                        .expect("right chain continues");
                    let here = slots[i - 1];
                    self.swap(level, v, here, next, &mut slots);
                }
            }
            Role::Mid => {
                let (left_leaf, right_leaf) = if self.pos[before] < self.start[v] {
                    (before, after)
                } else {
                    (after, before)
                };
                let first = self.child_facing(v, left_leaf);
                let last = self.child_facing(v, right_leaf);
                let (mut lo, mut hi) = (0, k - 1);
                let (mut want_lo, mut want_hi) = (first, last);
                loop {
                    let here = slots[lo];
                    self.swap(level, v, here, want_lo, &mut slots);
                    if hi > lo {
                        let here = slots[hi];
                        self.swap(level, v, here, want_hi, &mut slots);
                    }
                    if hi - lo < 3 {
                        break;
                    }
                    lo += 1;
                    hi -= 1;
                    let (l_anchor, r_anchor) = (slots[lo - 1], slots[hi + 1]);
                    want_lo = *slots[lo..=hi]
                        .iter()
                        .find(|&&c| self.sibling_adjacent(v, l_anchor, c))
                        .expect("group has a left neighbour");
                    want_hi = *slots[lo..=hi]
                        .iter()
                        .find(|&&c| self.sibling_adjacent(v, r_anchor, c))
                        .expect("group has a right neighbour");
                }
            }
        }
    }
}

/// One-pass construction of the same optimum: the root's subtrees in cyclic
/// embedding order starting from its first child, every subtree laid out
/// with its children in embedding order, each vertex placed so that the
/// smaller half of its children faces its parent.
pub fn direct_rbt_halin_ola(h: &HalinGraph) -> Result<Layout, HalinOlaError> {
    let tree = h.tree();
    let cert = is_recursively_balanced(tree);
    if !cert.verdict {
        let v = tree
            .preorder()
            .into_iter()
            .find(|&v| !cert.balanced[v] && tree.children(v).iter().all(|&c| cert.balanced[c]))
            .unwrap_or(tree.root());
        return Err(HalinOlaError::NotRbt(v));
    }
    // Bottom-up concatenation of blocks: `seq[v][side]` is v's block when it
    // sits left (0) or right (1) of its parent.
    let n = h.n();
    let mut left_seq: Vec<Vec<VertexId>> = vec![vec![]; n];
    let mut right_seq: Vec<Vec<VertexId>> = vec![vec![]; n];
    let root = tree.root();
    for &v in tree.preorder().iter().rev() {
        let cs = tree.children(v);
        if cs.is_empty() {
            left_seq[v] = vec![v];
            right_seq[v] = vec![v];
            continue;
        }
        if v == root {
            break;
        }
        let k = cs.len();
        left_seq[v] = join_children(v, cs, k.div_ceil(2), &left_seq, &right_seq);
        right_seq[v] = join_children(v, cs, k / 2, &left_seq, &right_seq);
        for &c in cs {
            left_seq[c] = vec![];
            right_seq[c] = vec![];
        }
    }
    let cs = tree.children(root);
    let order = join_children(root, cs, root_split(cs.len()), &left_seq, &right_seq);
    Ok(Layout::from_order(order).expect("blocks cover every vertex once"))
}

fn join_children(
    v: VertexId,
    children: &[VertexId],
    before: usize,
    left_seq: &[Vec<VertexId>],
    right_seq: &[Vec<VertexId>],
) -> Vec<VertexId> {
    let mut out = vec![];
    for (i, &c) in children.iter().enumerate() {
        if i == before {
            out.push(v);
        }
        if i < before {
            out.extend_from_slice(&left_seq[c]);
        } else {
            out.extend_from_slice(&right_seq[c]);
        }
    }
    if before == children.len() {
        out.push(v);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OlaCertificate {
    pub layout_cost: u64,
    pub lower_bound: u64,
    pub tree_cost: u64,
    pub cycle_cost: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_optimum: Option<u64>,
    pub optimal: bool,
    pub reason: String,
}

/// Certifies optimality when the layout meets the lower bound. A gap only
/// means the bound cannot certify this layout.
pub fn certify(h: &HalinGraph, layout: &Layout, tree_opt_cost: u64) -> OlaCertificate {
    let report = halin_la_cost(h, layout);
    let bound = halin_lower_bound(h, tree_opt_cost);
    let cost = report.total_cost;
    let (optimal, reason) = match cost.cmp(&bound) {
        std::cmp::Ordering::Equal => (true, format!("cost {cost} equals bound {bound}")),
        std::cmp::Ordering::Greater => (false, format!("cost {cost} > bound {bound}")),
        std::cmp::Ordering::Less => (
            false,
            format!("cost {cost} < bound {bound}: tree optimum {tree_opt_cost} is not exact"),
        ),
    };
    OlaCertificate {
        layout_cost: cost,
        lower_bound: bound,
        tree_cost: report.tree_cost,
        cycle_cost: report.cycle_cost,
        oracle_optimum: None,
        optimal,
        reason,
    }
}

/// [`certify`] with an exact optimum attached, which settles the cases the
/// bound leaves open.
pub fn certify_with_oracle(
    h: &HalinGraph,
    layout: &Layout,
    tree_opt_cost: u64,
    oracle_optimum: u64,
) -> OlaCertificate {
    let mut cert = certify(h, layout, tree_opt_cost);
    cert.oracle_optimum = Some(oracle_optimum);
    let cost = cert.layout_cost;
    if cost == oracle_optimum {
        cert.optimal = true;
        if cost != cert.lower_bound {
            cert.reason = format!(
                "cost {cost} equals oracle optimum (bound {} not attained)",
                cert.lower_bound
            );
        }
    } else {
        cert.optimal = false;
        cert.reason = format!("cost {cost} > oracle optimum {oracle_optimum}");
    }
    cert
}
