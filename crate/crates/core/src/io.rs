//! JSON instance and layout files, and Graphviz export.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::generators::GenSpec;
use crate::graph::{EdgeKind, EmbeddedTree, GraphError, HalinGraph, SubstrateViolation, VertexId};
use crate::layout::{Layout, LayoutError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported schema version {found} (expected {SCHEMA_VERSION})")]
    SchemaVersionUnsupported { found: u64 },
    #[error("invalid Halin substrate: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidSubstrate(Vec<SubstrateViolation>),
    #[error("invalid tree: {0}")]
    Graph(GraphError),
    #[error("invalid layout: {0}")]
    Layout(#[from] LayoutError),
    #[error("layout has {actual} positions, instance has {expected} vertices")]
    LayoutSizeMismatch { expected: usize, actual: usize },
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::ParseError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

impl From<GraphError> for IoError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::InvalidSubstrate(v) => IoError::InvalidSubstrate(v),
            other => IoError::Graph(other),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_spec: Option<GenSpec>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeJson {
    root: VertexId,
    children: BTreeMap<VertexId, Vec<VertexId>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct InstanceFile {
    schema_version: u64,
    tree: TreeJson,
    /// Written for readers; recomputed from the tree on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cycle_order: Option<Vec<VertexId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<Metadata>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: HalinGraph,
    pub metadata: Option<Metadata>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Strictness {
    #[default]
    Strict,
    /// Unknown keys are dropped and reported instead of rejected.
    Lax,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

pub fn parse_instance(bytes: &[u8]) -> Result<Instance, IoError> {
    parse_instance_with(bytes, Strictness::Strict).map(|p| p.value)
}

pub fn parse_instance_with(bytes: &[u8], mode: Strictness) -> Result<Parsed<Instance>, IoError> {
    let value: Value = serde_json::from_slice(bytes)?;
    check_version(&value)?;
    let mut warnings = vec![];
    let file: InstanceFile = match mode {
        Strictness::Strict => serde_json::from_slice(bytes)?,
        Strictness::Lax => {
            let mut value = value;
            strip_unknown(&mut value, &mut warnings);
            serde_json::from_value(value)?
        }
    };
    let tree = EmbeddedTree::new(file.tree.root, &file.tree.children)?;
    let graph = HalinGraph::from_tree(tree)?;
    if let Some(stored) = &file.cycle_order {
        if stored.as_slice() != graph.cycle_order() {
            warnings.push("stored cycleOrder differs from the embedding; using the embedding".into());
        }
    }
    Ok(Parsed {
        value: Instance {
            graph,
            metadata: file.metadata,
        },
        warnings,
    })
}

fn check_version(value: &Value) -> Result<(), IoError> {
    match value.get("schemaVersion").and_then(Value::as_u64) {
        Some(v) if v == SCHEMA_VERSION as u64 => Ok(()),
        Some(v) => Err(IoError::SchemaVersionUnsupported { found: v }),
        // let the typed parse report the missing or malformed field
        None => Ok(()),
    }
}

fn strip_unknown(value: &mut Value, warnings: &mut Vec<String>) {
    fn keep(obj: &mut serde_json::Map<String, Value>, known: &[&str], at: &str, w: &mut Vec<String>) {
        let unknown: Vec<String> = obj.keys().filter(|k| !known.contains(&k.as_str())).cloned().collect();
        for k in unknown {
            w.push(format!("ignoring unknown field {at}{k}"));
            obj.remove(&k);
        }
    }
    let Some(top) = value.as_object_mut() else { return };
    keep(top, &["schemaVersion", "tree", "cycleOrder", "metadata"], "", warnings);
    if let Some(t) = top.get_mut("tree").and_then(Value::as_object_mut) {
        keep(t, &["root", "children"], "tree.", warnings);
    }
    if let Some(m) = top.get_mut("metadata").and_then(Value::as_object_mut) {
        keep(m, &["name", "genSpec"], "metadata.", warnings);
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn serialize_instance(h: &HalinGraph, metadata: Option<&Metadata>) -> String {
    let file = InstanceFile {
        schema_version: SCHEMA_VERSION as u64,
        tree: TreeJson {
            root: h.tree().root(),
            children: h.tree().child_map(),
        },
        cycle_order: Some(h.cycle_order().to_vec()),
        metadata: metadata.cloned(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("instance serializes");
    s.push('\n');
    s
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct LayoutFile {
    schema_version: u64,
    vertex_at: Vec<VertexId>,
}

pub fn parse_layout(bytes: &[u8]) -> Result<Layout, IoError> {
    let value: Value = serde_json::from_slice(bytes)?;
    check_version(&value)?;
    let file: LayoutFile = serde_json::from_slice(bytes)?;
    Ok(Layout::from_order(file.vertex_at)?)
}

/// [`parse_layout`] plus a size check against the instance.
pub fn parse_layout_for(bytes: &[u8], h: &HalinGraph) -> Result<Layout, IoError> {
    let l = parse_layout(bytes)?;
    if l.len() != h.n() {
        return Err(IoError::LayoutSizeMismatch {
            expected: h.n(),
            actual: l.len(),
        });
    }
    Ok(l)
}

pub fn serialize_layout(layout: &Layout) -> String {
    let file = LayoutFile {
        schema_version: SCHEMA_VERSION as u64,
        vertex_at: layout.order().to_vec(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("layout serializes");
    s.push('\n');
    s
}

/// Graphviz text: tree edges dashed, cycle edges bold. With a layout every
/// vertex is labelled `id:position`.
pub fn export_dot(h: &HalinGraph, layout: Option<&Layout>) -> String {
    let mut s = String::from("graph halin {\n");
    for v in 0..h.n() {
        match layout {
            Some(l) => writeln!(s, "  {v} [label=\"{v}:{}\"];", l.position(v)),
            None => writeln!(s, "  {v};"),
        }
        .unwrap();
    }
    for e in h.edges() {
        let style = match e.kind {
            EdgeKind::Tree => "dashed",
            EdgeKind::Cycle => "bold",
        };
        writeln!(s, "  {} -- {} [style={style}];", e.u, e.v).unwrap();
    }
    s.push_str("}\n");
    s
}
