use super::{Graph, LengthFunction};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// On-disk graph document:
/// `{"vertices":["u","v"], "edges":[{"id":"a","source":"u","target":"v","length":1.0}]}`.
///
/// Lengths are whole-edge lengths in `[0, 1]`; a missing length means `1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

impl GraphDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn graph(&self) -> Result<Graph> {
        let lookup = |edge: &str, name: &str| {
            self.vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::DanglingVertex { edge: edge.to_string(), vertex: name.to_string() })
        };
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            edges.push((e.id.clone(), lookup(&e.id, &e.source)?, lookup(&e.id, &e.target)?));
        }
        Graph::new(self.vertices.clone(), edges)
    }

    pub fn lengths(&self) -> LengthFunction {
        LengthFunction::from_edge_lengths(self.edges.iter().map(|e| e.length.unwrap_or(1.0)).collect())
    }

    pub fn from_graph(g: &Graph, lengths: Option<&LengthFunction>) -> Self {
        GraphDoc {
            vertices: g.vertex_names().to_vec(),
            edges: (0..g.num_edges())
                .map(|e| {
                    let (s, t) = g.endpoints(e);
                    EdgeDoc {
                        id: g.edge_name(e).to_string(),
                        source: g.vertex_name(s).to_string(),
                        target: g.vertex_name(t).to_string(),
                        length: lengths.map(|l| l.edge(e)),
                    }
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph documents always serialize")
    }
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    GraphDoc::from_json(text)?.graph()
}

/// Parses a graph together with its edge lengths. The lengths are not validated.
pub fn parse_metric_graph(text: &str) -> Result<(Graph, LengthFunction)> {
    let doc = GraphDoc::from_json(text)?;
    Ok((doc.graph()?, doc.lengths()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETA: &str = r#"{"vertices":["u","v"],"edges":[
        {"id":"a","source":"u","target":"v","length":1.0},
        {"id":"b","source":"u","target":"v","length":1.0},
        {"id":"c","source":"u","target":"v","length":1.0}]}"#;

    #[test]
    fn theta_document() {
        let g = parse_graph(THETA).unwrap();
        assert_eq!(g.num_half_edges(), 6);
        assert_eq!(g.edge_id("c"), Some(2));
        assert_eq!(g.endpoints(1), (0, 1));
    }

    #[test]
    fn rose_document_allows_loops() {
        let g = parse_graph(
            r#"{"vertices":["v"],"edges":[{"id":"a","source":"v","target":"v"},{"id":"b","source":"v","target":"v"}]}"#,
        )
        .unwrap();
        assert_eq!(g.num_half_edges(), 4);
        assert!(g.is_loop(0) && g.is_loop(1));
    }

    #[test]
    fn missing_vertex_is_rejected() {
        let err = parse_graph(r#"{"vertices":["u"],"edges":[{"id":"a","source":"u","target":"w"}]}"#).unwrap_err();
        assert!(matches!(err, Error::DanglingVertex { ref vertex, .. } if vertex == "w"));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let err = parse_graph(
            r#"{"vertices":["u","u"],"edges":[]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateId(_)));
        let err = parse_graph(
            r#"{"vertices":["u"],"edges":[{"id":"a","source":"u","target":"u"},{"id":"a","source":"u","target":"u"}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateId(_)));
    }

    #[test]
    fn malformed_document() {
        assert!(matches!(parse_graph("{\"vertices\": 3}"), Err(Error::Parse(_))));
        assert!(matches!(parse_graph("not json"), Err(Error::Parse(_))));
    }

    #[test]
    fn document_round_trip() {
        let (g, l) = parse_metric_graph(THETA).unwrap();
        let doc = GraphDoc::from_graph(&g, Some(&l));
        let (g2, l2) = parse_metric_graph(&doc.to_json()).unwrap();
        assert_eq!(g, g2);
        assert_eq!(l, l2);
    }
}
