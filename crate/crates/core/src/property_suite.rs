//! Structural facts about optimal arrangements, checked against every
//! optimum the oracle enumerates on small instances.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generators::GenSpec;
use crate::graph::{EmbeddedTree, HalinGraph, VertexId};
use crate::halin_ola::halin_lower_bound;
use crate::layout::{is_of_type, la_cost, spinal_decomposition, BlockPartition, Layout};
use crate::tree_ola::{brute_force_cost, brute_force_ola};

/// Spinal subtrees occupy consecutive blocks in spine order.
pub fn check_subtree_contiguity(h: &HalinGraph, layout: &Layout) -> bool {
    let dec = spinal_decomposition(h.tree(), layout);
    let blocks = dec.subtrees.into_iter().map(|s| s.vertices).collect();
    match BlockPartition::new(h.n(), blocks) {
        Ok(p) => is_of_type(layout, &p),
        Err(_) => false,
    }
}

/// Positions strictly increase along the spinal path.
pub fn check_spine_monotone(h: &HalinGraph, layout: &Layout) -> bool {
    let path = spinal_decomposition(h.tree(), layout).path;
    path.windows(2)
        .all(|w| layout.position(w[0]) < layout.position(w[1]))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BranchCheck {
    /// Same-side branch pairs that were compared.
    pub pairs_checked: usize,
    /// Spinal vertices with fewer than two branches on every side.
    pub vacuous: usize,
    pub non_overlapping: bool,
}

/// Two branches of one spinal vertex that both lie before it (or both after
/// it) do not interleave.
pub fn check_branch_non_overlap(h: &HalinGraph, layout: &Layout) -> BranchCheck {
    let dec = spinal_decomposition(h.tree(), layout);
    let mut out = BranchCheck {
        non_overlapping: true,
        ..BranchCheck::default()
    };
    for sub in &dec.subtrees {
        let p = layout.position(sub.root);
        let span = |vs: &[VertexId]| {
            let ps = vs.iter().map(|&v| layout.position(v));
            (ps.clone().min().unwrap(), ps.max().unwrap())
        };
        let spans: Vec<(usize, usize)> = sub.branches.iter().map(|b| span(&b.vertices)).collect();
        let before: Vec<_> = spans.iter().filter(|s| s.1 < p).collect();
        let after: Vec<_> = spans.iter().filter(|s| s.0 > p).collect();
        if before.len() < 2 && after.len() < 2 {
            out.vacuous += 1;
        }
        for side in [&before, &after] {
            for (i, a) in side.iter().enumerate() {
                for b in &side[i + 1..] {
                    out.pairs_checked += 1;
                    if !(a.1 < b.0 || b.1 < a.0) {
                        out.non_overlapping = false;
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ExtremesVerdict {
    BothLeaves,
    RepairedLeafSwap,
    Violation,
}

/// Both end positions hold tree leaves, possibly after trading a degree-3
/// end vertex with one of its leaf neighbours at no cost.
pub fn check_extremes_are_leaves(h: &HalinGraph, layout: &Layout) -> ExtremesVerdict {
    let tree = h.tree();
    let (a, b) = (layout.first(), layout.last());
    if tree.is_tree_leaf(a) && tree.is_tree_leaf(b) {
        return ExtremesVerdict::BothLeaves;
    }
    let graph = h.to_graph();
    let cost = la_cost(&graph, layout).total_cost;
    let mut cur = layout.clone();
    for end in [1, h.n()] {
        let v = cur.vertex_at(end);
        if tree.is_tree_leaf(v) {
            continue;
        }
        match repair_end(tree, &graph, &cur, v, cost) {
            Some(next) => cur = next,
            None => return ExtremesVerdict::Violation,
        }
    }
    ExtremesVerdict::RepairedLeafSwap
}

fn repair_end(
    tree: &EmbeddedTree,
    graph: &crate::graph::Graph,
    layout: &Layout,
    v: VertexId,
    cost: u64,
) -> Option<Layout> {
    if tree.degree(v) != 3 {
        return None;
    }
    let leaves: Vec<VertexId> = tree.neighbors(v).filter(|&u| tree.is_tree_leaf(u)).collect();
    if leaves.len() < 2 {
        return None;
    }
    leaves.into_iter().find_map(|u| {
        let mut order = layout.order().to_vec();
        let (pv, pu) = (layout.position(v) - 1, layout.position(u) - 1);
        order.swap(pv, pu);
        let swapped = Layout::from_order(order).ok()?;
        (la_cost(graph, &swapped).total_cost == cost).then_some(swapped)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Counterexample {
    pub instance: String,
    pub check: String,
    pub vertex_at: Vec<VertexId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceReport {
    pub label: String,
    pub gen_spec: Option<GenSpec>,
    pub n: usize,
    pub oracle_cost: u64,
    pub tree_optimum: u64,
    pub lower_bound: u64,
    pub bound_holds: bool,
    pub bound_tight: bool,
    /// Whether the family is one where the bound should be attained.
    pub tightness_expected: bool,
    pub optima_examined: usize,
    pub optimal_count: Option<u64>,
    pub contiguity_failures: usize,
    pub monotone_failures: usize,
    pub branch_failures: usize,
    pub branch_pairs_checked: usize,
    pub branch_vacuous: usize,
    pub both_leaves: usize,
    pub repaired: usize,
    pub extremes_violations: usize,
    pub counterexamples: Vec<Counterexample>,
    pub error: Option<String>,
}

impl InstanceReport {
    pub fn structure_holds(&self) -> bool {
        self.error.is_none()
            && self.contiguity_failures == 0
            && self.monotone_failures == 0
            && self.branch_failures == 0
            && self.extremes_violations == 0
    }

    pub fn bound_ok(&self) -> bool {
        self.error.is_none() && self.bound_holds && (!self.tightness_expected || self.bound_tight)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteReport {
    pub instances: Vec<InstanceReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.instances.iter().all(|r| r.structure_holds() && r.bound_ok())
    }

    pub fn counterexamples(&self) -> impl Iterator<Item = &Counterexample> {
        self.instances.iter().flat_map(|r| r.counterexamples.iter())
    }

    pub fn merge(mut self, other: SuiteReport) -> SuiteReport {
        self.instances.extend(other.instances);
        self
    }

    pub fn to_table(&self) -> String {
        let mut s = format!(
            "{:<28} {:>3} {:>5} {:>5} {:>6} {:>7} {:>6} {:>6} {:>6} {:>9}\n",
            "instance", "n", "opt", "bound", "tight", "optima", "contig", "spine", "branch", "extremes"
        );
        let mark = |fails: usize| if fails == 0 { "ok" } else { "FAIL" };
        for r in &self.instances {
            if let Some(e) = &r.error {
                s.push_str(&format!("{:<28} error: {e}\n", r.label));
                continue;
            }
            let tight = match (r.bound_tight, r.tightness_expected) {
                (true, _) => "yes",
                (false, true) => "NO",
                (false, false) => "no",
            };
            s.push_str(&format!(
                "{:<28} {:>3} {:>5} {:>5} {:>6} {:>7} {:>6} {:>6} {:>6} {:>9}\n",
                r.label,
                r.n,
                r.oracle_cost,
                r.lower_bound,
                tight,
                r.optima_examined,
                mark(r.contiguity_failures),
                mark(r.monotone_failures),
                mark(r.branch_failures),
                mark(r.extremes_violations),
            ));
        }
        s.push_str(&format!(
            "{} instances, {}\n",
            self.instances.len(),
            if self.passed() { "all checks passed" } else { "FAILURES" }
        ));
        s
    }
}

/// Runs every check on every oracle optimum of one instance.
pub fn check_instance(
    label: &str,
    spec: Option<&GenSpec>,
    h: &HalinGraph,
    oracle_limit: usize,
) -> InstanceReport {
    let mut r = InstanceReport {
        label: label.to_string(),
        gen_spec: spec.cloned(),
        n: h.n(),
        tightness_expected: spec.is_some_and(GenSpec::bound_is_tight),
        ..InstanceReport::default()
    };
    let oracle = match brute_force_ola(&h.to_graph(), oracle_limit) {
        Ok(o) => o,
        Err(e) => {
            r.error = Some(e.to_string());
            return r;
        }
    };
    let tree_opt = match brute_force_cost(&h.tree().to_graph(), oracle_limit) {
        Ok(c) => c,
        Err(e) => {
            r.error = Some(e.to_string());
            return r;
        }
    };
    r.oracle_cost = oracle.optimal_cost;
    r.tree_optimum = tree_opt;
    r.lower_bound = halin_lower_bound(h, tree_opt);
    r.bound_holds = r.oracle_cost >= r.lower_bound;
    r.bound_tight = r.oracle_cost == r.lower_bound;
    r.optima_examined = oracle.optimal_layouts.len();
    r.optimal_count = oracle.optimal_count;
    let record = |check: &str, l: &Layout, out: &mut Vec<Counterexample>| {
        out.push(Counterexample {
            instance: label.to_string(),
            check: check.to_string(),
            vertex_at: l.order().to_vec(),
        });
    };
    let mut found = vec![];
    for l in &oracle.optimal_layouts {
        if !check_subtree_contiguity(h, l) {
            r.contiguity_failures += 1;
            record("subtreeContiguity", l, &mut found);
        }
        if !check_spine_monotone(h, l) {
            r.monotone_failures += 1;
            record("spineMonotone", l, &mut found);
        }
        let b = check_branch_non_overlap(h, l);
        r.branch_pairs_checked += b.pairs_checked;
        r.branch_vacuous += b.vacuous;
        if !b.non_overlapping {
            r.branch_failures += 1;
            record("branchNonOverlap", l, &mut found);
        }
        match check_extremes_are_leaves(h, l) {
            ExtremesVerdict::BothLeaves => r.both_leaves += 1,
            ExtremesVerdict::RepairedLeafSwap => r.repaired += 1,
            ExtremesVerdict::Violation => {
                r.extremes_violations += 1;
                record("extremesAreLeaves", l, &mut found);
            }
        }
    }
    r.counterexamples = found;
    r
}

/// Checks a corpus; instances run independently and failures never abort
/// the sweep.
pub fn run_suite(corpus: &[GenSpec], oracle_limit: usize) -> SuiteReport {
    let instances = corpus
        .par_iter()
        .map(|spec| match spec.generate() {
            Ok(h) => check_instance(&spec.label(), Some(spec), &h, oracle_limit),
            Err(e) => InstanceReport {
                label: spec.label(),
                gen_spec: Some(spec.clone()),
                error: Some(e.to_string()),
                ..InstanceReport::default()
            },
        })
        .collect();
    SuiteReport { instances }
}

/// One-sided caterpillar leaf sequences with at most `max_n` vertices, one
/// representative per reversal pair.
pub fn caterpillar_specs(max_n: usize) -> Vec<GenSpec> {
    fn extend(spine: usize, prefix: &mut Vec<usize>, budget: usize, out: &mut Vec<Vec<usize>>) {
        let i = prefix.len();
        if i == spine {
            let mut rev = prefix.clone();
            rev.reverse();
            if *prefix <= rev {
                out.push(prefix.clone());
            }
            return;
        }
        let need = if spine == 1 {
            3
        } else if i == 0 || i == spine - 1 {
            2
        } else {
            1
        };
        for l in need..=budget {
            prefix.push(l);
            extend(spine, prefix, budget - l, out);
            prefix.pop();
        }
    }
    let mut out = vec![];
    for spine in 1..max_n {
        let mut seqs = vec![];
        if spine < max_n {
            extend(spine, &mut vec![], max_n - spine, &mut seqs);
        }
        out.extend(seqs.into_iter().map(|leaves| GenSpec::Caterpillar { spine, leaves }));
    }
    out
}

/// Seeds `0..count` with sizes cycling through `4..=max_n`.
pub fn random_specs(count: u64, max_n: usize) -> Vec<GenSpec> {
    let span = (max_n.max(4) - 3) as u64;
    (0..count)
        .map(|seed| GenSpec::Random {
            n: 4 + (seed % span) as usize,
            seed,
        })
        .collect()
}

/// Wheels with 3 to 8 spokes, every caterpillar up to 9 vertices, 50 random
/// instances up to 9 vertices, and the k-ary instances up to 10 vertices.
pub fn standard_corpus() -> Vec<GenSpec> {
    let mut c: Vec<GenSpec> = (3..=8).map(|spokes| GenSpec::Wheel { spokes }).collect();
    c.extend(caterpillar_specs(9));
    c.extend(random_specs(50, 9));
    c.extend(kary_specs(10));
    c
}

/// k-ary balanced instances with at most `max_n` vertices.
pub fn kary_specs(max_n: usize) -> Vec<GenSpec> {
    let mut out = vec![];
    for k in 3..max_n {
        for c in 2..max_n {
            for h in 1.. {
                let mut n = 1;
                let mut level = k;
                for _ in 0..h {
                    n += level;
                    level *= c;
                }
                if n > max_n {
                    break;
                }
                if h == 1 && c > 2 {
                    // stars do not depend on the inner degree
                    break;
                }
                out.push(GenSpec::Kary { k, c, h });
            }
        }
    }
    out
}

/// Parses a corpus description: `standard`, or comma-free items separated
/// by `;` such as `wheel:3-8`, `kary:3,2,2`, `caterpillar:9`, `random:50:9`.
pub fn parse_corpus(spec: &str) -> Result<Vec<GenSpec>, String> {
    let mut out = vec![];
    for item in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (family, rest) = item.split_once(':').unwrap_or((item, ""));
        let num = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad number {s:?} in corpus item {item:?}"))
        };
        match family {
            "standard" => out.extend(standard_corpus()),
            "wheel" => {
                let (lo, hi) = match rest.split_once('-') {
                    Some((a, b)) => (num(a)?, num(b)?),
                    None => (num(rest)?, num(rest)?),
                };
                out.extend((lo..=hi).map(|spokes| GenSpec::Wheel { spokes }));
            }
            "kary" => {
                let p: Vec<usize> = rest.split(',').map(num).collect::<Result<_, _>>()?;
                match p[..] {
                    [k, c, h] => out.push(GenSpec::Kary { k, c, h }),
                    [max_n] => out.extend(kary_specs(max_n)),
                    _ => return Err(format!("kary expects k,c,h or a size cap: {item:?}")),
                }
            }
            "caterpillar" => {
                if rest.contains(',') {
                    let leaves: Vec<usize> = rest.split(',').map(num).collect::<Result<_, _>>()?;
                    out.push(GenSpec::Caterpillar {
                        spine: leaves.len(),
                        leaves,
                    });
                } else {
                    out.extend(caterpillar_specs(num(rest)?));
                }
            }
            "random" => {
                let (count, max_n) = rest
                    .split_once(':')
                    .ok_or_else(|| format!("random expects COUNT:MAXN: {item:?}"))?;
                out.extend(random_specs(num(count)? as u64, num(max_n)?));
            }
            _ => return Err(format!("unknown corpus family {family:?}")),
        }
    }
    if out.is_empty() {
        return Err("empty corpus".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_wheel;

    fn lay(order: &[usize]) -> Layout {
        Layout::from_order(order.to_vec()).unwrap()
    }

    #[test]
    fn k4_optima_classification() {
        let k4 = gen_wheel(3).unwrap();
        let r = check_instance("k4", None, &k4, 10);
        assert_eq!(r.oracle_cost, 10);
        assert_eq!(r.optima_examined, 24);
        assert!(r.structure_holds());
        assert_eq!(r.both_leaves + r.repaired, 24);
        assert!(r.repaired > 0);
    }

    #[test]
    fn w5_optima() {
        let w5 = gen_wheel(4).unwrap();
        let r = check_instance("w5", Some(&GenSpec::Wheel { spokes: 4 }), &w5, 10);
        assert_eq!((r.oracle_cost, r.lower_bound), (14, 14));
        assert!(r.structure_holds() && r.bound_ok());
        assert_eq!(r.both_leaves, r.optima_examined);
        // a reversed optimum still passes: its spine is re-extracted
        let l = lay(&[1, 2, 0, 3, 4]).reversed();
        assert!(check_spine_monotone(&w5, &l));
        assert!(check_subtree_contiguity(&w5, &l));
    }

    #[test]
    fn branch_sides() {
        let w5 = gen_wheel(4).unwrap();
        // spine 1..4 through the hub; branches {2} and {3} on opposite sides
        let c = check_branch_non_overlap(&w5, &lay(&[1, 2, 0, 3, 4]));
        assert!(c.non_overlapping);
        assert_eq!(c.pairs_checked, 0);
        let w6 = gen_wheel(5).unwrap();
        let c = check_branch_non_overlap(&w6, &lay(&[1, 2, 3, 0, 4, 5]));
        assert_eq!(c.pairs_checked, 1);
        assert!(c.non_overlapping);
    }

    #[test]
    fn extremes_on_hub_end() {
        let w5 = gen_wheel(4).unwrap();
        assert_eq!(
            check_extremes_are_leaves(&w5, &lay(&[0, 1, 2, 3, 4])),
            ExtremesVerdict::Violation
        );
        let k4 = gen_wheel(3).unwrap();
        assert_eq!(
            check_extremes_are_leaves(&k4, &lay(&[0, 1, 2, 3])),
            ExtremesVerdict::RepairedLeafSwap
        );
    }

    #[test]
    fn corpus_shapes() {
        let cats = caterpillar_specs(9);
        assert!(cats.contains(&GenSpec::Caterpillar { spine: 1, leaves: vec![8] }));
        assert!(cats.contains(&GenSpec::Caterpillar { spine: 3, leaves: vec![2, 1, 2] }));
        assert!(!cats.contains(&GenSpec::Caterpillar { spine: 2, leaves: vec![3, 2] }));
        assert!(cats.iter().all(|s| s.generate().unwrap().n() <= 9));
        let ks = kary_specs(10);
        assert!(ks.contains(&GenSpec::Kary { k: 3, c: 2, h: 2 }));
        assert!(ks.iter().all(|s| s.generate().unwrap().n() <= 10));
        let std = standard_corpus();
        assert!(std.iter().all(|s| s.generate().unwrap().n() <= 10));
        assert_eq!(parse_corpus("wheel:3-8").unwrap().len(), 6);
        assert_eq!(parse_corpus("wheel:3-4;kary:3,2,2;random:5:9").unwrap().len(), 8);
        assert!(parse_corpus("blob:1").is_err());
    }
}
