//! Vertex and edge storage, plane-embedded rooted trees and Halin graphs.
//!
//! A Halin graph is built from an [`EmbeddedTree`] whose children lists carry
//! the planar embedding. The leaves, read depth-first in children order, are
//! closed into a cycle. Vertex ids are dense: a graph on `n` vertices uses the
//! ids `0..n`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("cycle detected through vertex {0}")]
    CycleDetected(VertexId),
    #[error("vertex {0} is not reachable from the root")]
    DisconnectedInput(VertexId),
    #[error("vertex {0} is listed as a child more than once")]
    DuplicateChild(VertexId),
    #[error("invalid Halin substrate: {}", format_violations(.0))]
    InvalidSubstrate(Vec<SubstrateViolation>),
}

fn format_violations(v: &[SubstrateViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Tree,
    Cycle,
}

/// Undirected edge. Endpoints are stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn new(a: VertexId, b: VertexId, kind: EdgeKind) -> Self {
        assert_ne!(a, b, "self-loop {a}");
        Edge {
            u: a.min(b),
            v: a.max(b),
            kind,
        }
    }

    pub fn endpoints(&self) -> (VertexId, VertexId) {
        (self.u, self.v)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.u, self.v)
    }
}

/// Plain undirected graph on `0..n`. Used for the oracle and cost functions;
/// trees and Halin graphs convert into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph from raw edges; every edge gets [`EdgeKind::Tree`].
    pub fn new(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Self {
        let edges = edges
            .into_iter()
            .map(|(a, b)| {
                assert!(a < n && b < n, "edge ({a},{b}) out of range for n={n}");
                Edge::new(a, b, EdgeKind::Tree)
            })
            .collect();
        Graph { n, edges }
    }

    pub fn from_edges(n: usize, edges: Vec<Edge>) -> Self {
        Graph { n, edges }
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (i - 1, i)))
    }

    /// Cycle `0-1-...-(n-1)-0`; edges are tagged [`EdgeKind::Cycle`].
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges = (0..n)
            .map(|i| Edge::new(i, (i + 1) % n, EdgeKind::Cycle))
            .collect();
        Graph { n, edges }
    }

    pub fn complete(n: usize) -> Self {
        Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    pub fn star(leaves: usize) -> Self {
        Graph::new(leaves + 1, (1..=leaves).map(|i| (0, i)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            d[e.u] += 1;
            d[e.v] += 1;
        }
        d
    }
}

/// Rooted ordered tree. The order of each children list is the planar
/// embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedTree {
    root: VertexId,
    children: Vec<Vec<VertexId>>,
    parent: Vec<Option<VertexId>>,
}

impl EmbeddedTree {
    /// Vertices not mentioned as keys are leaves. The vertex count is one
    /// more than the largest id that appears anywhere.
    pub fn new(
        root: VertexId,
        child_lists: &BTreeMap<VertexId, Vec<VertexId>>,
    ) -> Result<Self, GraphError> {
        let max_id = child_lists
            .iter()
            .flat_map(|(p, cs)| std::iter::once(*p).chain(cs.iter().copied()))
            .chain(std::iter::once(root))
            .max()
            .unwrap_or(root);
        let mut children = vec![Vec::new(); max_id + 1];
        for (&p, cs) in child_lists {
            children[p] = cs.clone();
        }
        Self::from_children(root, children)
    }

    /// `children[v]` is the ordered children list of `v`; `children.len()` is
    /// the vertex count.
    pub fn from_children(
        root: VertexId,
        children: Vec<Vec<VertexId>>,
    ) -> Result<Self, GraphError> {
        let n = children.len();
        assert!(root < n, "root {root} out of range");
        let mut parent: Vec<Option<VertexId>> = vec![None; n];
        for (p, cs) in children.iter().enumerate() {
            for &c in cs {
                assert!(c < n, "child {c} out of range");
                if c == p || c == root {
                    return Err(GraphError::CycleDetected(c));
                }
                if parent[c].is_some() {
                    return Err(GraphError::DuplicateChild(c));
                }
                parent[c] = Some(p);
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            for &c in &children[v] {
                seen[c] = true;
                stack.push(c);
            }
        }
        if let Some(v) = (0..n).find(|&v| !seen[v]) {
            // Every non-root vertex has at most one parent, so an unreachable
            // vertex with a parent sits on a parent cycle.
            return Err(match parent[v] {
                Some(_) => GraphError::CycleDetected(v),
                None => GraphError::DisconnectedInput(v),
            });
        }
        Ok(EmbeddedTree {
            root,
            children,
            parent,
        })
    }

    pub fn n(&self) -> usize {
        self.children.len()
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.children[v].is_empty()
    }

    /// Degree in the unrooted tree.
    pub fn degree(&self, v: VertexId) -> usize {
        self.children[v].len() + usize::from(self.parent[v].is_some())
    }

    /// Leaf of the unrooted tree (degree one). Differs from [`is_leaf`] only
    /// for a root with a single child.
    ///
    /// [`is_leaf`]: EmbeddedTree::is_leaf
    pub fn is_tree_leaf(&self, v: VertexId) -> bool {
        self.degree(v) <= 1
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.parent[v].into_iter().chain(self.children[v].iter().copied())
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.preorder()
            .into_iter()
            .filter_map(|v| self.parent[v].map(|p| Edge::new(p, v, EdgeKind::Tree)))
            .collect()
    }

    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(self.n(), self.edges())
    }

    /// Depth-first preorder following children order.
    pub fn preorder(&self) -> Vec<VertexId> {
        let mut order = Vec::with_capacity(self.n());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.children[v].iter().rev());
        }
        order
    }

    pub fn leaves_in_embedding_order(&self) -> Vec<VertexId> {
        self.preorder()
            .into_iter()
            .filter(|&v| self.is_leaf(v))
            .collect()
    }

    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1; self.n()];
        for &v in self.preorder().iter().rev() {
            if let Some(p) = self.parent[v] {
                size[p] += size[v];
            }
        }
        size
    }

    /// Height with a single vertex counting as height 1.
    pub fn heights(&self) -> Vec<usize> {
        let mut h = vec![1; self.n()];
        for &v in self.preorder().iter().rev() {
            if let Some(p) = self.parent[v] {
                h[p] = h[p].max(h[v] + 1);
            }
        }
        h
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.n()];
        for v in self.preorder() {
            if let Some(p) = self.parent[v] {
                d[v] = d[p] + 1;
            }
        }
        d
    }

    /// The unique tree path from `a` to `b`, both included.
    pub fn path_between(&self, a: VertexId, b: VertexId) -> Vec<VertexId> {
        let depth = self.depths();
        let (mut x, mut y) = (a, b);
        let mut front = vec![];
        let mut back = vec![];
        while depth[x] > depth[y] {
            front.push(x);
            x = self.parent[x].expect("non-root has parent");
        }
        while depth[y] > depth[x] {
            back.push(y);
            y = self.parent[y].expect("non-root has parent");
        }
        while x != y {
            front.push(x);
            back.push(y);
            x = self.parent[x].expect("non-root has parent");
            y = self.parent[y].expect("non-root has parent");
        }
        front.push(x);
        front.extend(back.into_iter().rev());
        front
    }

    /// Same tree with every children list reversed (the mirror embedding).
    pub fn mirrored(&self) -> EmbeddedTree {
        let children = self
            .children
            .iter()
            .map(|cs| cs.iter().rev().copied().collect())
            .collect();
        EmbeddedTree {
            root: self.root,
            children,
            parent: self.parent.clone(),
        }
    }

    /// Children lists of internal vertices, keyed by vertex.
    pub fn child_map(&self) -> BTreeMap<VertexId, Vec<VertexId>> {
        self.children
            .iter()
            .enumerate()
            .filter(|(_, cs)| !cs.is_empty())
            .map(|(v, cs)| (v, cs.clone()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubstrateViolation {
    TooFewLeaves { leaves: usize },
    RootDegree { root: VertexId, children: usize },
    InternalDegree { vertex: VertexId, children: usize },
}

impl fmt::Display for SubstrateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubstrateViolation::TooFewLeaves { leaves } => {
                write!(f, "tree has {leaves} leaves, at least 3 required")
            }
            SubstrateViolation::RootDegree { root, children } => {
                write!(f, "root {root} has {children} children, at least 3 required")
            }
            SubstrateViolation::InternalDegree { vertex, children } => {
                write!(f, "internal vertex {vertex} has {children} child, at least 2 required")
            }
        }
    }
}

/// Checks that closing the leaves into a cycle gives every vertex degree at
/// least three. Never fails early: all violations are reported.
pub fn validate_halin_substrate(tree: &EmbeddedTree) -> Result<(), Vec<SubstrateViolation>> {
    let mut violations = vec![];
    let leaves = (0..tree.n()).filter(|&v| tree.is_leaf(v)).count();
    if leaves < 3 {
        violations.push(SubstrateViolation::TooFewLeaves { leaves });
    }
    let root = tree.root();
    if tree.children(root).len() < 3 {
        violations.push(SubstrateViolation::RootDegree {
            root,
            children: tree.children(root).len(),
        });
    }
    for v in tree.preorder() {
        let c = tree.children(v).len();
        if v != root && c == 1 {
            violations.push(SubstrateViolation::InternalDegree {
                vertex: v,
                children: c,
            });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// `H = T ⊎ C`: an embedded tree plus the cycle through its leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalinGraph {
    tree: EmbeddedTree,
    cycle_order: Vec<VertexId>,
    tree_edges: Vec<Edge>,
    cycle_edges: Vec<Edge>,
}

impl HalinGraph {
    pub fn from_tree(tree: EmbeddedTree) -> Result<Self, GraphError> {
        validate_halin_substrate(&tree).map_err(GraphError::InvalidSubstrate)?;
        let cycle_order = tree.leaves_in_embedding_order();
        let l = cycle_order.len();
        let cycle_edges = (0..l)
            .map(|i| Edge::new(cycle_order[i], cycle_order[(i + 1) % l], EdgeKind::Cycle))
            .collect();
        let tree_edges = tree.edges();
        Ok(HalinGraph {
            tree,
            cycle_order,
            tree_edges,
            cycle_edges,
        })
    }

    pub fn tree(&self) -> &EmbeddedTree {
        &self.tree
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    pub fn m(&self) -> usize {
        self.tree_edges.len() + self.cycle_edges.len()
    }

    /// Leaves in cycle order (depth-first, children order).
    pub fn cycle_order(&self) -> &[VertexId] {
        &self.cycle_order
    }

    pub fn tree_edges(&self) -> &[Edge] {
        &self.tree_edges
    }

    pub fn cycle_edges(&self) -> &[Edge] {
        &self.cycle_edges
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.tree_edges.iter().chain(self.cycle_edges.iter())
    }

    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(self.n(), self.edges().copied().collect())
    }

    pub fn cycle_graph_edges(&self) -> Graph {
        Graph::from_edges(self.n(), self.cycle_edges.clone())
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.tree.degree(v) + if self.tree.is_leaf(v) { 2 } else { 0 }
    }
}

/// Convenience for [`HalinGraph::from_tree`].
pub fn halin_from_tree(tree: EmbeddedTree) -> Result<HalinGraph, GraphError> {
    HalinGraph::from_tree(tree)
}
