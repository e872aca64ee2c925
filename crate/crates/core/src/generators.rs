//! Seeded instance factories for wheels, k-ary balanced trees, caterpillars
//! and random Halin graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{halin_from_tree, EmbeddedTree, GraphError, HalinGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Recipe for one generated instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GenSpec {
    Wheel { spokes: usize },
    Kary { k: usize, c: usize, h: usize },
    Caterpillar { spine: usize, leaves: Vec<usize> },
    Random { n: usize, seed: u64 },
}

impl GenSpec {
    pub fn generate(&self) -> Result<HalinGraph, GenError> {
        match self {
            GenSpec::Wheel { spokes } => gen_wheel(*spokes),
            GenSpec::Kary { k, c, h } => gen_kary_rbt_halin(*k, *c, *h),
            GenSpec::Caterpillar { spine, leaves } => gen_caterpillar_halin(*spine, leaves),
            GenSpec::Random { n, seed } => gen_random_halin(*n, *seed),
        }
    }

    /// Short human label, e.g. `kary(3,2,2)`.
    pub fn label(&self) -> String {
        match self {
            GenSpec::Wheel { spokes } => format!("wheel({spokes})"),
            GenSpec::Kary { k, c, h } => format!("kary({k},{c},{h})"),
            GenSpec::Caterpillar { leaves, .. } => {
                let parts: Vec<String> = leaves.iter().map(|l| l.to_string()).collect();
                format!("caterpillar({})", parts.join(","))
            }
            GenSpec::Random { n, seed } => format!("random(n={n},seed={seed})"),
        }
    }

    /// Families on which the lower bound is known to be attained.
    pub fn bound_is_tight(&self) -> bool {
        !matches!(self, GenSpec::Random { .. })
    }
}

fn build(children: Vec<Vec<VertexId>>) -> Result<HalinGraph, GenError> {
    let tree = EmbeddedTree::from_children(0, children)?;
    Ok(halin_from_tree(tree)?)
}

pub fn gen_wheel(spokes: usize) -> Result<HalinGraph, GenError> {
    if spokes < 3 {
        return Err(GenError::BadParam(format!("wheel needs at least 3 spokes, got {spokes}")));
    }
    let mut children = vec![vec![]; spokes + 1];
    children[0] = (1..=spokes).collect();
    build(children)
}

/// Root with `k` children, every other internal vertex with `c`, all leaves
/// at depth `h`. Vertices are numbered breadth first.
pub fn gen_kary_rbt_halin(k: usize, c: usize, h: usize) -> Result<HalinGraph, GenError> {
    if k < 3 {
        return Err(GenError::BadParam(format!("root degree must be at least 3, got {k}")));
    }
    if c < 2 {
        return Err(GenError::BadParam(format!("inner degree must be at least 2, got {c}")));
    }
    if h < 1 {
        return Err(GenError::BadParam("height must be at least 1".into()));
    }
    let mut children: Vec<Vec<VertexId>> = vec![vec![]];
    let mut level = vec![0];
    for depth in 0..h {
        let fan = if depth == 0 { k } else { c };
        let mut next = Vec::with_capacity(level.len() * fan);
        for &v in &level {
            for _ in 0..fan {
                let id = children.len();
                children.push(vec![]);
                children[v].push(id);
                next.push(id);
            }
        }
        level = next;
    }
    build(children)
}

/// Spine `0..spine` with `leaves[i]` leaves hanging off spine vertex `i`.
/// Each spine vertex lists its leaves before the next spine vertex.
pub fn gen_caterpillar_halin(spine: usize, leaves: &[usize]) -> Result<HalinGraph, GenError> {
    if spine == 0 {
        return Err(GenError::BadParam("spine must be non-empty".into()));
    }
    if leaves.len() != spine {
        return Err(GenError::BadParam(format!(
            "expected {spine} leaf counts, got {}",
            leaves.len()
        )));
    }
    for (i, &l) in leaves.iter().enumerate() {
        let need = if spine == 1 {
            3
        } else if i == 0 || i == spine - 1 {
            2
        } else {
            1
        };
        if l < need {
            return Err(GenError::BadParam(format!(
                "spine vertex {i} needs at least {need} leaves for degree 3, got {l}"
            )));
        }
    }
    let n = spine + leaves.iter().sum::<usize>();
    let mut children = vec![vec![]; n];
    let mut next = spine;
    for (i, &l) in leaves.iter().enumerate() {
        children[i].extend(next..next + l);
        next += l;
        if i + 1 < spine {
            children[i].push(i + 1);
        }
    }
    build(children)
}

/// Grows a tree from a root with three leaves until it has exactly
/// `n_target` vertices: a random leaf receives two or three children, and a
/// single missing vertex is added as an extra child of an internal vertex.
pub fn gen_random_halin(n_target: usize, seed: u64) -> Result<HalinGraph, GenError> {
    if n_target < 4 {
        return Err(GenError::BadParam(format!("need at least 4 vertices, got {n_target}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut children: Vec<Vec<VertexId>> = vec![vec![1, 2, 3], vec![], vec![], vec![]];
    let mut leaves: Vec<VertexId> = vec![1, 2, 3];
    let mut internal: Vec<VertexId> = vec![0];
    while children.len() < n_target {
        let remaining = n_target - children.len();
        if remaining == 1 {
            let v = internal[rng.gen_range(0..internal.len())];
            let at = rng.gen_range(0..=children[v].len());
            let id = children.len();
            children.push(vec![]);
            children[v].insert(at, id);
            break;
        }
        let c = if remaining == 2 { 2 } else { rng.gen_range(2..=3) };
        let li = rng.gen_range(0..leaves.len());
        let v = leaves.swap_remove(li);
        internal.push(v);
        for _ in 0..c {
            let id = children.len();
            children.push(vec![]);
            children[v].push(id);
            leaves.push(id);
        }
    }
    build(children)
}
