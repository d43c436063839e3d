//! Standard small graphs and random generators used by tests, examples and
//! the `verify` suite.

use crate::graph::{EdgeId, Graph, LengthFunction, UnionFind};
use rand::seq::SliceRandom;
use rand::Rng;

fn build(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Graph {
    let vs: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
    let idx = |n: &str| vertices.iter().position(|v| *v == n).unwrap();
    Graph::new(vs, edges.iter().map(|&(id, s, t)| (id.to_string(), idx(s), idx(t))).collect())
        .expect("corpus graphs are well formed")
}

/// Two vertices `u, v` joined by three edges `a, b, c`, all `u → v`.
pub fn theta() -> Graph {
    build(&["u", "v"], &[("a", "u", "v"), ("b", "u", "v"), ("c", "u", "v")])
}

/// One vertex with `n` loops named `a, b, …`.
pub fn rose(n: usize) -> Graph {
    let names: Vec<String> = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let edges: Vec<(&str, &str, &str)> = names.iter().map(|s| (s.as_str(), "v", "v")).collect();
    build(&["v"], &edges)
}

/// Loops `a` at `u` and `b` at `v`, joined by the separating edge `bridge`.
pub fn dumbbell() -> Graph {
    build(&["u", "v"], &[("a", "u", "u"), ("b", "v", "v"), ("bridge", "u", "v")])
}

pub fn dumbbell_lengths(bridge: f64) -> LengthFunction {
    LengthFunction::from_edge_lengths(vec![1.0, 1.0, bridge])
}

/// A path on `n` vertices.
pub fn path(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edge_list(n, &edges).unwrap()
}

/// Complete graph on four vertices (rank 3).
pub fn k4() -> Graph {
    Graph::from_edge_list(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
}

/// K4 with the three spokes at vertex 0 shortened to `spoke`.
pub fn k4_short_star(spoke: f64) -> LengthFunction {
    LengthFunction::from_edge_lengths(vec![spoke, spoke, spoke, 1.0, 1.0, 1.0])
}

/// Complete bipartite graph K3,3 (rank 4).
pub fn k33() -> Graph {
    let mut edges = Vec::new();
    for a in 0..3 {
        for b in 3..6 {
            edges.push((a, b));
        }
    }
    Graph::from_edge_list(6, &edges).unwrap()
}

/// A random connected multigraph (loops allowed) with at most the given size.
pub fn random_connected<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize) -> Graph {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    let extra = rng.gen_range(0..=max_edges.saturating_sub(edges.len()));
    for _ in 0..extra {
        edges.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    edges.shuffle(rng);
    for e in edges.iter_mut() {
        if rng.gen_bool(0.5) {
            *e = (e.1, e.0);
        }
    }
    Graph::from_edge_list(n, &edges).unwrap()
}

/// A random connected graph of positive rank without separating edges.
pub fn random_bridgeless<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize) -> Graph {
    loop {
        let g = random_connected(rng, max_vertices, max_edges);
        if g.rank().unwrap() > 0 && g.separating_edges().is_empty() {
            return g;
        }
    }
}

/// A random connected graph of positive rank with at least one separating edge.
pub fn random_with_bridges<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize) -> Graph {
    loop {
        let g = random_connected(rng, max_vertices, max_edges);
        if g.rank().unwrap() > 0 && !g.separating_edges().is_empty() {
            return g;
        }
    }
}

/// A random valid length function: a random forest of short edges (some of
/// length zero), every other edge of length one.
pub fn random_lengths<R: Rng>(rng: &mut R, g: &Graph) -> LengthFunction {
    let mut order: Vec<EdgeId> = (0..g.num_edges()).collect();
    order.shuffle(rng);
    let mut uf = UnionFind::new(g.num_vertices());
    let mut lengths = vec![1.0; g.num_edges()];
    for e in order {
        let (s, t) = g.endpoints(e);
        if rng.gen_bool(0.6) && uf.union(s, t) {
            lengths[e] = match rng.gen_range(0..6) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.gen_range(0.05..1.0),
            };
        }
    }
    LengthFunction::from_edge_lengths(lengths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_length_function;
    use rand::SeedableRng;

    #[test]
    fn named_graphs() {
        assert_eq!(k4().rank().unwrap(), 3);
        assert_eq!(k33().rank().unwrap(), 4);
        assert_eq!(rose(3).rank().unwrap(), 3);
        assert!(validate_length_function(&k4(), &k4_short_star(0.5)).passed());
    }

    #[test]
    fn random_lengths_are_valid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let g = random_connected(&mut rng, 6, 10);
            assert!(g.is_connected());
            let l = random_lengths(&mut rng, &g);
            assert!(validate_length_function(&g, &l).passed());
        }
    }
}
