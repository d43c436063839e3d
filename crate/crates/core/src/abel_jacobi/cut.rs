use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, HalfEdgeId, LengthFunction, UnionFind, VertexId};

/// One component of `Γ` after cutting.
#[derive(Debug, Clone, PartialEq)]
pub struct CutTree {
    /// Graph vertices of the component, ascending. The first is the base.
    pub vertices: Vec<VertexId>,
    /// Uncut edges of the component, ascending.
    pub edges: Vec<EdgeId>,
    /// Half-edges `h` of cut edges with `σh` in this component, ascending.
    /// Each contributes an external edge of full length along `h`.
    pub legs: Vec<HalfEdgeId>,
}

impl CutTree {
    pub fn base(&self) -> VertexId {
        self.vertices[0]
    }
}

/// The two external edges produced by one cut edge, as `(tree, leg index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gluing {
    pub edge: EdgeId,
    /// Side carrying the forward half-edge `2k` (at its source).
    pub source_side: (usize, usize),
    /// Side carrying the reverse half-edge `2k+1` (at the target of `2k`).
    pub target_side: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutForest {
    pub cut: Vec<bool>,
    pub trees: Vec<CutTree>,
    pub gluings: Vec<Gluing>,
    /// Component index of every graph vertex.
    pub tree_of: Vec<usize>,
}

impl CutForest {
    pub fn num_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn cut_edges(&self) -> Vec<EdgeId> {
        (0..self.cut.len()).filter(|&e| self.cut[e]).collect()
    }

    /// `(tree, leg index)` of the external edge along half-edge `h`.
    pub fn leg(&self, g: &Graph, h: HalfEdgeId) -> Option<(usize, usize)> {
        let t = self.tree_of[g.source(h)];
        self.trees[t].legs.iter().position(|&x| x == h).map(|i| (t, i))
    }
}

/// Cuts every flagged edge at its midpoint and doubles each half.
pub fn cut_edges(g: &Graph, cut: &[bool]) -> Result<CutForest> {
    let n = g.num_vertices();
    let mut uf = UnionFind::new(n);
    for e in (0..g.num_edges()).filter(|&e| !cut[e]) {
        let (s, t) = g.endpoints(e);
        if !uf.union(s, t) {
            return Err(Error::CutNotForest(e));
        }
    }
    let mut tree_of = vec![usize::MAX; n];
    let mut trees: Vec<CutTree> = Vec::new();
    let mut root_index = vec![usize::MAX; n];
    for v in 0..n {
        let r = uf.find(v);
        if root_index[r] == usize::MAX {
            root_index[r] = trees.len();
            trees.push(CutTree { vertices: Vec::new(), edges: Vec::new(), legs: Vec::new() });
        }
        tree_of[v] = root_index[r];
        trees[tree_of[v]].vertices.push(v);
    }
    for e in 0..g.num_edges() {
        let h = Graph::forward(e);
        if cut[e] {
            trees[tree_of[g.source(h)]].legs.push(h);
            trees[tree_of[g.target(h)]].legs.push(g.involution(h));
        } else {
            trees[tree_of[g.source(h)]].edges.push(e);
        }
    }
    for t in trees.iter_mut() {
        t.legs.sort_unstable();
    }
    let mut forest = CutForest { cut: cut.to_vec(), trees, gluings: Vec::new(), tree_of };
    let gluings = (0..g.num_edges())
        .filter(|&e| cut[e])
        .map(|e| {
            let h = Graph::forward(e);
            Gluing {
                edge: e,
                source_side: forest.leg(g, h).expect("leg recorded"),
                target_side: forest.leg(g, g.involution(h)).expect("leg recorded"),
            }
        })
        .collect();
    forest.gluings = gluings;
    Ok(forest)
}

/// Cuts all edges of length one.
pub fn cut_long_edges(g: &Graph, lengths: &LengthFunction) -> Result<CutForest> {
    lengths.ensure_valid(g)?;
    cut_edges(g, &lengths.long_edges())
}
