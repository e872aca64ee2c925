//! Tree-side machinery: the central vertex, recursively balanced trees (RBT),
//! the linear-time RBT arrangement and an exhaustive arrangement oracle.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{EmbeddedTree, Graph, VertexId};
use crate::layout::Layout;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeOlaError {
    #[error("tree is not recursively balanced (first unbalanced vertex: {0})")]
    NotRecursivelyBalanced(VertexId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("graph has {n} vertices, oracle limit is {limit}")]
    TooLarge { n: usize, limit: usize },
}

/// Vertex whose removal leaves components of size at most `⌊n/2⌋`. Among
/// several such vertices the smallest id wins.
pub fn central_vertex(tree: &EmbeddedTree) -> VertexId {
    let n = tree.n();
    let size = tree.subtree_sizes();
    (0..n)
        .find(|&v| largest_component_without(tree, &size, v) <= n / 2)
        .expect("every tree has a centroid")
}

fn largest_component_without(tree: &EmbeddedTree, size: &[usize], v: VertexId) -> usize {
    let below = tree.children(v).iter().map(|&c| size[c]).max().unwrap_or(0);
    below.max(tree.n() - size[v])
}

/// Sizes of all components left after deleting `v`.
pub fn components_without(tree: &EmbeddedTree, v: VertexId) -> Vec<usize> {
    let size = tree.subtree_sizes();
    let mut comps: Vec<usize> = tree.children(v).iter().map(|&c| size[c]).collect();
    if tree.parent(v).is_some() {
        comps.push(tree.n() - size[v]);
    }
    comps
}

/// Per-vertex subtree sizes and balance flags. `balanced[v]` holds when all
/// children of `v` head subtrees of one size and are balanced themselves.
/// The verdict also asks the root to be a central vertex, which for a
/// balanced root fails only when it has a single child and `n > 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RbtCertificate {
    pub subtree_size: Vec<usize>,
    pub balanced: Vec<bool>,
    pub verdict: bool,
}

pub fn is_recursively_balanced(tree: &EmbeddedTree) -> RbtCertificate {
    let n = tree.n();
    let mut subtree_size = vec![1; n];
    let mut balanced = vec![true; n];
    for &v in tree.preorder().iter().rev() {
        let cs = tree.children(v);
        subtree_size[v] += cs.iter().map(|&c| subtree_size[c]).sum::<usize>();
        let equal = cs.windows(2).all(|w| subtree_size[w[0]] == subtree_size[w[1]]);
        balanced[v] = equal && cs.iter().all(|&c| balanced[c]);
    }
    let verdict = balanced[tree.root()] && root_is_central(tree);
    RbtCertificate {
        subtree_size,
        balanced,
        verdict,
    }
}

fn root_is_central(tree: &EmbeddedTree) -> bool {
    tree.children(tree.root()).len() != 1 || tree.n() <= 2
}

/// Number of root children laid out before the root. Of the two splits
/// `⌈(k+1)/2⌉` and `⌊(k+1)/2⌋` the one with the cheaper root edges wins; ties
/// go to the ceiling.
pub fn root_split(k: usize) -> usize {
    let cost = |l: usize| {
        let r = k - l;
        l * l.saturating_sub(1) / 2 + r * r.saturating_sub(1) / 2
    };
    let hi = (k + 2) / 2;
    let lo = k.div_ceil(2);
    if cost(lo) < cost(hi) {
        lo
    } else {
        hi.min(k)
    }
}

/// An RBT arrangement together with the number of vertex visits spent on it.
#[derive(Debug, Clone)]
pub struct RbtOla {
    pub layout: Layout,
    pub visits: usize,
}

/// Linear-time optimal arrangement of a recursively balanced tree. Children
/// blocks follow the embedding; each vertex sits between its children so that
/// the smaller half of its blocks faces its parent.
pub fn rbt_ola(tree: &EmbeddedTree) -> Result<Layout, TreeOlaError> {
    rbt_ola_counted(tree).map(|r| r.layout)
}

pub fn rbt_ola_counted(tree: &EmbeddedTree) -> Result<RbtOla, TreeOlaError> {
    build_rbt_layout(tree, |_, cs| cs.to_vec())
}

/// Same optimum as [`rbt_ola`], with the children blocks of every vertex in a
/// seeded random order and the whole layout possibly mirrored.
pub fn rbt_ola_shuffled(tree: &EmbeddedTree, seed: u64) -> Result<Layout, TreeOlaError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = build_rbt_layout(tree, |_, cs| {
        let mut cs = cs.to_vec();
        cs.shuffle(&mut rng);
        cs
    })?;
    Ok(if rng.gen::<bool>() {
        r.layout.reversed()
    } else {
        r.layout
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Root,
    LeftOfParent,
    RightOfParent,
}

fn build_rbt_layout(
    tree: &EmbeddedTree,
    mut child_order: impl FnMut(VertexId, &[VertexId]) -> Vec<VertexId>,
) -> Result<RbtOla, TreeOlaError> {
    let n = tree.n();
    let mut visits = 0;

    // Postorder pass: sizes and balance.
    let mut size = vec![1usize; n];
    let mut stack = vec![(tree.root(), false)];
    while let Some((v, expanded)) = stack.pop() {
        if expanded {
            visits += 1;
            let cs = tree.children(v);
            if let Some(&first) = cs.first() {
                if cs.iter().any(|&c| size[c] != size[first]) {
                    return Err(TreeOlaError::NotRecursivelyBalanced(v));
                }
                size[v] += cs.len() * size[first];
            }
        } else {
            stack.push((v, true));
            stack.extend(tree.children(v).iter().map(|&c| (c, false)));
        }
    }

    if !root_is_central(tree) {
        return Err(TreeOlaError::NotRecursivelyBalanced(tree.root()));
    }

    // Placement pass: each vertex gets a block start and a side.
    let mut order = vec![usize::MAX; n];
    let mut stack = vec![(tree.root(), 0usize, Side::Root)];
    while let Some((v, start, side)) = stack.pop() {
        visits += 1;
        let cs = tree.children(v);
        if cs.is_empty() {
            order[start] = v;
            continue;
        }
        let k = cs.len();
        let block = (size[v] - 1) / k;
        let before = match side {
            Side::Root => root_split(k),
            Side::LeftOfParent => k.div_ceil(2),
            Side::RightOfParent => k / 2,
        };
        order[start + before * block] = v;
        for (i, c) in child_order(v, cs).into_iter().enumerate() {
            let (offset, side) = if i < before {
                (i * block, Side::LeftOfParent)
            } else {
                (i * block + 1, Side::RightOfParent)
            };
            stack.push((c, start + offset, side));
        }
    }
    let layout = Layout::from_order(order).expect("placement fills every position once");
    Ok(RbtOla { layout, visits })
}

/// `LA(φ, G) ≥ LA(φ₁*, G₁) + LA(φ₂*, G₂)` for an edge partition `E = E₁ ⊎ E₂`.
pub fn edge_disjoint_lower_bound(cost_g1: u64, cost_g2: u64) -> u64 {
    cost_g1 + cost_g2
}

pub const DEFAULT_ORACLE_LIMIT: usize = 10;
pub const MAX_STORED_OPTIMA: usize = 10_000;
const HARD_LIMIT: usize = 63;

#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub limit: usize,
    /// Reversal symmetry plus branch and bound. Off means plain enumeration
    /// of all `n!` layouts.
    pub prune: bool,
    /// Enumerate every optimum rather than stopping at the optimal cost.
    pub all_optima: bool,
    pub parallel: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            limit: DEFAULT_ORACLE_LIMIT,
            prune: true,
            all_optima: true,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub optimal_cost: u64,
    /// Sorted, at most [`MAX_STORED_OPTIMA`] entries.
    pub optimal_layouts: Vec<Layout>,
    /// Exact number of optimal layouts, when enumerated.
    pub optimal_count: Option<u64>,
    pub states_explored: u64,
}

pub fn brute_force_ola(graph: &Graph, limit: usize) -> Result<OracleResult, OracleError> {
    brute_force_ola_with(
        graph,
        &OracleOptions {
            limit,
            ..OracleOptions::default()
        },
    )
}

/// Optimal cost only; prunes ties so it is considerably faster.
pub fn brute_force_cost(graph: &Graph, limit: usize) -> Result<u64, OracleError> {
    let opts = OracleOptions {
        limit,
        all_optima: false,
        ..OracleOptions::default()
    };
    brute_force_ola_with(graph, &opts).map(|r| r.optimal_cost)
}

pub fn brute_force_ola_with(graph: &Graph, opts: &OracleOptions) -> Result<OracleResult, OracleError> {
    let n = graph.n();
    if n > opts.limit || n > HARD_LIMIT {
        return Err(OracleError::TooLarge {
            n,
            limit: opts.limit.min(HARD_LIMIT),
        });
    }
    if n <= 1 {
        return Ok(OracleResult {
            optimal_cost: 0,
            optimal_layouts: vec![Layout::identity(n)],
            optimal_count: Some(1),
            states_explored: 1,
        });
    }
    let mut adj = vec![0u64; n];
    let mut internal = 0u64;
    for e in graph.edges() {
        adj[e.u] |= 1 << e.v;
        adj[e.v] |= 1 << e.u;
        internal += 1;
    }
    let best = AtomicU64::new(u64::MAX);
    let run = |first: VertexId| {
        let mut s = Search::new(n, &adj, opts, &best);
        s.place_first(first, internal);
        s
    };
    let branches: Vec<Search> = if opts.parallel {
        (0..n).into_par_iter().map(run).collect()
    } else {
        (0..n).map(run).collect()
    };

    let optimal_cost = branches.iter().map(|s| s.local_best).min().unwrap();
    let states_explored = branches.iter().map(|s| s.states).sum();
    let mut layouts = vec![];
    let mut count = 0u64;
    for s in branches.iter().filter(|s| s.local_best == optimal_cost) {
        count += s.found_count;
        for order in &s.found {
            if layouts.len() >= MAX_STORED_OPTIMA {
                break;
            }
            let l = Layout::from_order(order.clone()).expect("search emits permutations");
            if opts.prune {
                layouts.push(l.reversed());
            }
            layouts.push(l);
        }
    }
    if opts.prune {
        count *= 2;
    }
    layouts.sort();
    layouts.truncate(MAX_STORED_OPTIMA);
    Ok(OracleResult {
        optimal_cost,
        optimal_layouts: layouts,
        optimal_count: opts.all_optima.then_some(count),
        states_explored,
    })
}

struct Search<'a> {
    n: usize,
    adj: &'a [u64],
    full: u64,
    prune: bool,
    all: bool,
    best: &'a AtomicU64,
    order: Vec<VertexId>,
    local_best: u64,
    found: Vec<Vec<VertexId>>,
    found_count: u64,
    states: u64,
    scratch: Vec<Vec<u32>>,
}

impl<'a> Search<'a> {
    fn new(n: usize, adj: &'a [u64], opts: &OracleOptions, best: &'a AtomicU64) -> Self {
        Search {
            n,
            adj,
            full: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
            prune: opts.prune,
            all: opts.all_optima,
            best,
            order: Vec::with_capacity(n),
            local_best: u64::MAX,
            found: vec![],
            found_count: 0,
            states: 0,
            scratch: vec![Vec::with_capacity(n); n + 1],
        }
    }

    fn place_first(&mut self, v: VertexId, internal: u64) {
        // With reversal symmetry the first vertex must have a smaller id
        // than the last one, so the largest id never starts a layout.
        if self.prune && v == self.n - 1 {
            return;
        }
        self.descend(0, v, 0, 0, internal);
    }

    /// Places `v` at position `placed.count_ones() + 1` and recurses.
    fn descend(&mut self, placed: u64, v: VertexId, g: u64, cut: u64, internal: u64) {
        self.states += 1;
        let nb = self.adj[v];
        let to_placed = (nb & placed).count_ones() as u64;
        let now = placed | (1 << v);
        let to_unplaced = (nb & !now & self.full).count_ones() as u64;
        let cut = cut - to_placed + to_unplaced;
        let internal = internal - to_unplaced;
        let g = g + cut;
        self.order.push(v);
        let depth = self.order.len();

        if depth == self.n {
            self.record(g);
        } else if !self.pruned(now, depth, g, internal) {
            let mut rest = !now & self.full;
            while rest != 0 {
                let w = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                self.descend(now, w, g, cut, internal);
            }
        }
        self.order.pop();
    }

    fn pruned(&mut self, placed: u64, depth: usize, g: u64, internal: u64) -> bool {
        if !self.prune {
            return false;
        }
        let first = self.order[0];
        let unplaced = !placed & self.full;
        if unplaced >> (first + 1) == 0 {
            return true;
        }
        let best = self.best.load(Ordering::Relaxed);
        if best == u64::MAX {
            return false;
        }
        // Cut edges still owe one unit per later slot their free endpoint
        // lands beyond the frontier; heaviest endpoints go first.
        let counts = &mut self.scratch[depth];
        counts.clear();
        let mut rest = unplaced;
        while rest != 0 {
            let w = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (self.adj[w] & placed).count_ones();
            if d > 0 {
                counts.push(d);
            }
        }
        counts.sort_unstable_by(|a, b| b.cmp(a));
        let tail: u64 = counts
            .iter()
            .enumerate()
            .map(|(j, &d)| j as u64 * d as u64)
            .sum();
        let bound = g + internal + tail;
        if self.all {
            bound > best
        } else {
            bound >= best
        }
    }

    fn record(&mut self, cost: u64) {
        if self.prune && self.order[self.n - 1] < self.order[0] {
            return;
        }
        if cost > self.local_best || (!self.all && cost == self.local_best) {
            return;
        }
        if cost < self.local_best {
            self.local_best = cost;
            self.found.clear();
            self.found_count = 0;
        }
        self.found_count += 1;
        if self.found.len() < MAX_STORED_OPTIMA {
            self.found.push(self.order.clone());
        }
        self.best.fetch_min(cost, Ordering::Relaxed);
    }
}
