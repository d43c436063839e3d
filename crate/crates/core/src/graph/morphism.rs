use super::{EdgeId, Graph, HalfEdgeId, LengthFunction, UnionFind, VertexId};
use crate::error::{Error, Result};
use crate::report::{Check, Report};

/// Where a half-edge of the source graph lands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfEdgeImage {
    HalfEdge(HalfEdgeId),
    /// The half-edge belongs to a collapsed edge.
    Vertex(VertexId),
}

/// A collapsing morphism `φ: Γ → Γ'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    vertex_map: Vec<VertexId>,
    half_edge_map: Vec<HalfEdgeImage>,
}

impl Morphism {
    pub fn identity(g: &Graph) -> Self {
        Morphism {
            vertex_map: (0..g.num_vertices()).collect(),
            half_edge_map: (0..g.num_half_edges()).map(HalfEdgeImage::HalfEdge).collect(),
        }
    }

    pub fn vertex(&self, v: VertexId) -> VertexId {
        self.vertex_map[v]
    }

    pub fn half_edge(&self, h: HalfEdgeId) -> HalfEdgeImage {
        self.half_edge_map[h]
    }

    /// Image of an edge, if it survives.
    pub fn edge(&self, e: EdgeId) -> Option<EdgeId> {
        match self.half_edge_map[Graph::forward(e)] {
            HalfEdgeImage::HalfEdge(h) => Some(Graph::edge_of(h)),
            HalfEdgeImage::Vertex(_) => None,
        }
    }

    pub fn collapsed_edges(&self) -> Vec<EdgeId> {
        (0..self.half_edge_map.len() / 2).filter(|&e| self.edge(e).is_none()).collect()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Morphism) -> Morphism {
        Morphism {
            vertex_map: self.vertex_map.iter().map(|&v| other.vertex(v)).collect(),
            half_edge_map: self
                .half_edge_map
                .iter()
                .map(|img| match *img {
                    HalfEdgeImage::HalfEdge(h) => other.half_edge(h),
                    HalfEdgeImage::Vertex(v) => HalfEdgeImage::Vertex(other.vertex(v)),
                })
                .collect(),
        }
    }

    /// Lengths on the source induced from lengths on the target; collapsed edges get zero.
    pub fn pull_back(&self, target_lengths: &LengthFunction) -> LengthFunction {
        LengthFunction::from_edge_lengths(
            (0..self.half_edge_map.len() / 2)
                .map(|e| self.edge(e).map_or(0.0, |f| target_lengths.edge(f)))
                .collect(),
        )
    }

    /// Verifies the defining properties against source and target graphs.
    pub fn check(&self, source: &Graph, target: &Graph) -> Report {
        let mut report = Report::new();
        let mut equivariant = true;
        let mut hits = vec![0usize; target.num_half_edges()];
        for h in 0..source.num_half_edges() {
            match (self.half_edge(h), self.half_edge(source.involution(h))) {
                (HalfEdgeImage::HalfEdge(a), HalfEdgeImage::HalfEdge(b)) => {
                    equivariant &= target.involution(a) == b
                        && target.target(a) == self.vertex(source.target(h));
                    hits[a] += 1;
                }
                (HalfEdgeImage::Vertex(a), HalfEdgeImage::Vertex(b)) => {
                    equivariant &= a == b
                        && a == self.vertex(source.target(h))
                        && a == self.vertex(source.source(h));
                }
                _ => equivariant = false,
            }
        }
        report.push(Check::boolean("morphism.equivariant", equivariant, None));
        report.push(Check::boolean(
            "morphism.half_edge_bijection",
            hits.iter().all(|&k| k == 1),
            None,
        ));
        let mut vertex_hit = vec![false; target.num_vertices()];
        for &v in &self.vertex_map {
            vertex_hit[v] = true;
        }
        report.push(Check::boolean("morphism.surjective", vertex_hit.iter().all(|&b| b), None));

        // each vertex preimage with its collapsed edges must be a tree
        let mut uf = UnionFind::new(source.num_vertices());
        let mut acyclic = true;
        for e in self.collapsed_edges() {
            let (s, t) = source.endpoints(e);
            acyclic &= uf.union(s, t);
        }
        let mut connected = true;
        for v in 0..source.num_vertices() {
            for w in 0..v {
                if self.vertex(v) == self.vertex(w) {
                    connected &= uf.find(v) == uf.find(w);
                }
            }
        }
        report.push(Check::boolean("morphism.preimages_are_trees", acyclic && connected, None));
        report
    }
}

/// Collapses every edge in `forest`, merging their endpoints.
///
/// The quotient keeps the surviving edges in their original order and
/// orientation; each merged vertex is named by joining its members with `+`.
pub fn collapse(g: &Graph, forest: &[EdgeId]) -> Result<(Graph, Morphism)> {
    let mut collapsed = vec![false; g.num_edges()];
    let mut uf = UnionFind::new(g.num_vertices());
    for &e in forest {
        if collapsed[e] {
            continue;
        }
        let (s, t) = g.endpoints(e);
        if !uf.union(s, t) {
            return Err(Error::CollapseCycle(e));
        }
        collapsed[e] = true;
    }

    let mut class_of_root = vec![usize::MAX; g.num_vertices()];
    let mut members: Vec<Vec<VertexId>> = Vec::new();
    let mut vertex_map = vec![0; g.num_vertices()];
    for v in 0..g.num_vertices() {
        let r = uf.find(v);
        if class_of_root[r] == usize::MAX {
            class_of_root[r] = members.len();
            members.push(Vec::new());
        }
        vertex_map[v] = class_of_root[r];
        members[class_of_root[r]].push(v);
    }
    let names = members
        .iter()
        .map(|ms| ms.iter().map(|&v| g.vertex_name(v)).collect::<Vec<_>>().join("+"))
        .collect();

    let mut edges = Vec::new();
    let mut half_edge_map = vec![HalfEdgeImage::Vertex(0); g.num_half_edges()];
    for e in 0..g.num_edges() {
        let (s, t) = g.endpoints(e);
        if collapsed[e] {
            half_edge_map[2 * e] = HalfEdgeImage::Vertex(vertex_map[s]);
            half_edge_map[2 * e + 1] = HalfEdgeImage::Vertex(vertex_map[s]);
        } else {
            let k = edges.len();
            half_edge_map[2 * e] = HalfEdgeImage::HalfEdge(2 * k);
            half_edge_map[2 * e + 1] = HalfEdgeImage::HalfEdge(2 * k + 1);
            edges.push((g.edge_name(e).to_string(), vertex_map[s], vertex_map[t]));
        }
    }
    let quotient = Graph::new(names, edges)?;
    Ok((quotient, Morphism { vertex_map, half_edge_map }))
}
