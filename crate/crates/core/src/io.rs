//! Edge-list and label-file ingestion.
//!
//! Both formats are line oriented: two whitespace-separated decimal integers
//! per line, blank lines and lines starting with `#` ignored. Raw node ids may
//! be sparse; they are remapped to `0..N` in ascending order and the mapping is
//! kept in [`LoadedGraph::original_ids`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// `original_ids[dense] = raw id` as it appeared in the input files.
    pub original_ids: Vec<u64>,
}

impl LoadedGraph {
    pub fn dense_id(&self, raw: u64) -> Option<NodeId> {
        self.original_ids.binary_search(&raw).ok()
    }
}

fn records<'a>(
    text: &'a str,
    source_name: &'a str,
) -> impl Iterator<Item = Result<(usize, u64, i64)>> + 'a {
    text.lines().enumerate().filter_map(move |(idx, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            return None;
        }
        let lineno = idx + 1;
        let err = |message: String| Error::Parse {
            source_name: source_name.to_string(),
            line: lineno,
            message,
        };
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Some(Err(err(format!("expected two fields, got {line:?}"))));
        };
        let a = match a.parse::<u64>() {
            Ok(a) => a,
            Err(_) => return Some(Err(err(format!("invalid node id {a:?}")))),
        };
        let b = match b.parse::<i64>() {
            Ok(b) => b,
            Err(_) => return Some(Err(err(format!("invalid integer {b:?}")))),
        };
        Some(Ok((lineno, a, b)))
    })
}

/// Parses an edge list and a label file into a dense, labeled graph.
///
/// Directed edges are symmetrized; self-loops and duplicates are dropped.
/// The class count is `max label + 1` (at least 2).
pub fn load_graph(edge_text: &str, label_text: &str) -> Result<LoadedGraph> {
    load_graph_named(edge_text, "edges", label_text, "labels")
}

pub fn load_graph_named(
    edge_text: &str,
    edge_source: &str,
    label_text: &str,
    label_source: &str,
) -> Result<LoadedGraph> {
    let mut raw_edges = Vec::new();
    for record in records(edge_text, edge_source) {
        let (line, u, v) = record?;
        let v = u64::try_from(v).map_err(|_| Error::Parse {
            source_name: edge_source.to_string(),
            line,
            message: format!("invalid node id {v}"),
        })?;
        raw_edges.push((u, v));
    }
    let mut raw_labels: BTreeMap<u64, usize> = BTreeMap::new();
    for record in records(label_text, label_source) {
        let (line, node, label) = record?;
        let perr = |message: String| Error::Parse {
            source_name: label_source.to_string(),
            line,
            message,
        };
        let label = usize::try_from(label).map_err(|_| perr(format!("label {label} out of range")))?;
        if let Some(prev) = raw_labels.insert(node, label) {
            if prev != label {
                return Err(perr(format!("node {node} relabeled from {prev} to {label}")));
            }
        }
    }

    let mut original_ids: Vec<u64> = raw_edges
        .iter()
        .flat_map(|&(u, v)| [u, v])
        .chain(raw_labels.keys().copied())
        .collect();
    original_ids.sort_unstable();
    original_ids.dedup();
    let dense = |raw: u64| original_ids.binary_search(&raw).unwrap();

    let mut labels = Vec::with_capacity(original_ids.len());
    for (node, raw) in original_ids.iter().enumerate() {
        match raw_labels.get(raw) {
            Some(&l) => labels.push(l),
            None => return Err(Error::MissingLabel { node }),
        }
    }
    let class_count = labels.iter().max().map_or(2, |&m| (m + 1).max(2));
    let edges: Vec<_> = raw_edges.iter().map(|&(u, v)| (dense(u), dense(v))).collect();
    let graph = Graph::new(original_ids.len(), edges, labels, class_count)?;
    Ok(LoadedGraph {
        graph,
        original_ids,
    })
}

pub fn load_graph_files(edge_path: &Path, label_path: &Path) -> Result<LoadedGraph> {
    let edges = std::fs::read_to_string(edge_path).map_err(|e| Error::io(edge_path, e))?;
    let labels = std::fs::read_to_string(label_path).map_err(|e| Error::io(label_path, e))?;
    load_graph_named(
        &edges,
        &edge_path.display().to_string(),
        &labels,
        &label_path.display().to_string(),
    )
}

/// Reads the LINQS citation-network layout (`<name>.cites` with
/// "cited citing" pairs, `<name>.content` with "id feature... class" rows).
/// Feature columns are ignored; class names are mapped to indices in sorted
/// order.
pub fn load_linqs(cites_text: &str, content_text: &str) -> Result<LoadedGraph> {
    let mut class_names: Vec<&str> = Vec::new();
    let mut rows = Vec::new();
    for (idx, line) in content_text.lines().enumerate() {
        let mut fields = line.split_whitespace();
        let (Some(id), Some(class)) = (fields.next(), fields.next_back()) else {
            continue;
        };
        rows.push((idx + 1, id, class));
        class_names.push(class);
    }
    class_names.sort_unstable();
    class_names.dedup();

    // Document ids are not always numeric; intern them in order of appearance.
    let mut ids: BTreeMap<&str, u64> = BTreeMap::new();
    let mut label_text = String::new();
    for &(_, id, class) in &rows {
        let next = ids.len() as u64;
        let dense = *ids.entry(id).or_insert(next);
        let class = class_names.binary_search(&class).unwrap();
        writeln!(label_text, "{dense} {class}").unwrap();
    }
    let mut edge_text = String::new();
    for (idx, line) in cites_text.lines().enumerate() {
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b)) = (fields.next(), fields.next()) else {
            continue;
        };
        let (Some(&a), Some(&b)) = (ids.get(a), ids.get(b)) else {
            log::debug!("cites line {}: endpoint without content row, skipped", idx + 1);
            continue;
        };
        writeln!(edge_text, "{a} {b}").unwrap();
    }
    load_graph_named(&edge_text, "cites", &label_text, "content")
}

/// Emits the graph as an edge list in the ingestion format.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn write_labels(g: &Graph) -> String {
    let mut out = String::new();
    for (node, label) in g.labels().iter().enumerate() {
        writeln!(out, "{node} {label}").unwrap();
    }
    out
}

/// "dense_id raw_id" lines.
pub fn write_id_map(loaded: &LoadedGraph) -> String {
    let mut out = String::from("# dense_id original_id\n");
    for (dense, raw) in loaded.original_ids.iter().enumerate() {
        writeln!(out, "{dense} {raw}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graph() {
        let g = load_graph("0 1\n1 2", "0 0\n1 0\n2 1").unwrap().graph;
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.class_count(), 2);
    }

    #[test]
    fn self_loop_dropped() {
        let g = load_graph("0 0\n0 1", "0 0\n1 1").unwrap().graph;
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn comments_and_remapping() {
        let loaded = load_graph("# header\n10 30\n\n30 10\n30 20\n", "10 0\n20 2\n30 1\n").unwrap();
        assert_eq!(loaded.original_ids, vec![10, 20, 30]);
        assert_eq!(loaded.graph.edge_count(), 2);
        assert_eq!(loaded.graph.class_count(), 3);
        assert_eq!(loaded.graph.labels(), &[0, 2, 1]);
        assert_eq!(loaded.dense_id(30), Some(2));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = load_graph("0 1\n1 x\n", "0 0\n1 0").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = load_graph("0 1\n1 2 3\n", "0 0\n1 0").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn label_errors() {
        let err = load_graph("0 1", "0 0\n1 -1").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = load_graph("0 1\n1 2", "0 0\n1 0").unwrap_err();
        assert!(matches!(err, Error::MissingLabel { node: 2 }));
        let err = load_graph("0 1", "0 0\n1 0\n1 1").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn linqs_layout() {
        let content = "p1 0 1 0 Theory\np2 1 0 0 Neural\np3 0 0 1 Theory\n";
        let cites = "p1 p2\np3 p2\np9 p1\n";
        let g = load_linqs(cites, content).unwrap().graph;
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.labels(), &[1, 0, 1]);
    }
}
