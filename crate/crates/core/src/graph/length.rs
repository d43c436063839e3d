use super::{EdgeId, Graph, HalfEdgeId, UnionFind};
use crate::error::{Error, Result};
use crate::report::{Check, Report};

/// Edges whose length is within this of `1` count as maximal.
pub const LONG_EDGE_TOL: f64 = 1e-12;

/// Edge lengths `ℓ(E) ∈ [0, 1]`. The half-edge length is `λ(e) = ℓ(E) / 2`,
/// symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthFunction {
    edge_lengths: Vec<f64>,
}

impl LengthFunction {
    pub fn from_edge_lengths(edge_lengths: Vec<f64>) -> Self {
        LengthFunction { edge_lengths }
    }

    /// Every edge of length one.
    pub fn unit(g: &Graph) -> Self {
        Self::from_edge_lengths(vec![1.0; g.num_edges()])
    }

    /// Builds and validates in one step.
    pub fn validated(g: &Graph, edge_lengths: Vec<f64>) -> Result<Self> {
        let l = Self::from_edge_lengths(edge_lengths);
        l.ensure_valid(g)?;
        Ok(l)
    }

    pub fn ensure_valid(&self, g: &Graph) -> Result<()> {
        let report = validate_length_function(g, self);
        let result = match report.failures().next() {
            None => Ok(()),
            Some(c) => Err(Error::InvalidLength(format!(
                "{} failed{}",
                c.check,
                c.location.as_deref().map(|l| format!(" at {l}")).unwrap_or_default()
            ))),
        };
        result
    }

    pub fn edge(&self, e: EdgeId) -> f64 {
        self.edge_lengths[e]
    }

    pub fn half_edge(&self, h: HalfEdgeId) -> f64 {
        self.edge_lengths[h / 2] / 2.0
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    pub fn len(&self) -> usize {
        self.edge_lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_lengths.is_empty()
    }

    pub fn is_long(&self, e: EdgeId) -> bool {
        (self.edge_lengths[e] - 1.0).abs() <= LONG_EDGE_TOL
    }

    /// Indicator of the maximal-length edges.
    pub fn long_edges(&self) -> Vec<bool> {
        (0..self.edge_lengths.len()).map(|e| self.is_long(e)).collect()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.edge_lengths.iter().all(|&l| l != 0.0)
    }
}

/// Validates a length function. The cycle condition holds when deleting
/// every edge of length one leaves a forest.
pub fn validate_length_function(g: &Graph, lengths: &LengthFunction) -> Report {
    let mut report = Report::new();
    let count_ok = lengths.len() == g.num_edges();
    report.push(Check::boolean(
        "length.count",
        count_ok,
        (!count_ok).then(|| format!("{} lengths for {} edges", lengths.len(), g.num_edges())),
    ));
    if !count_ok {
        return report;
    }

    let mut worst = f64::INFINITY;
    let mut at = None;
    for (e, &l) in lengths.edge_lengths().iter().enumerate() {
        let m = if l.is_finite() { l.min(1.0 - l) } else { f64::NEG_INFINITY };
        if m < worst {
            worst = m;
            at = Some(g.edge_name(e).to_string());
        }
    }
    if g.num_edges() == 0 {
        worst = 0.0;
    }
    report.push(Check::from_margin("length.range", worst, at.filter(|_| worst < 0.0)));

    let symmetric = (0..g.num_half_edges()).all(|h| lengths.half_edge(h) == lengths.half_edge(g.involution(h)));
    report.push(Check::boolean("length.symmetry", symmetric, None));

    let mut uf = UnionFind::new(g.num_vertices());
    let mut offending = None;
    for e in 0..g.num_edges() {
        if lengths.is_long(e) {
            continue;
        }
        let (s, t) = g.endpoints(e);
        if !uf.union(s, t) {
            offending = Some(e);
            break;
        }
    }
    report.push(Check::boolean(
        "length.cycle_condition",
        offending.is_none(),
        offending.map(|e| format!("cycle through {} has no length-1 edge", g.edge_name(e))),
    ));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    /// Every embedded cycle, as a set of edges, by brute-force subset search.
    fn embedded_cycles(g: &Graph) -> Vec<Vec<EdgeId>> {
        let m = g.num_edges();
        let mut out = Vec::new();
        for mask in 1u32..(1 << m) {
            let edges: Vec<EdgeId> = (0..m).filter(|&e| mask & (1 << e) != 0).collect();
            let mut deg = vec![0; g.num_vertices()];
            for &e in &edges {
                let (s, t) = g.endpoints(e);
                deg[s] += 1;
                deg[t] += 1;
            }
            if deg.iter().any(|&d| d != 0 && d != 2) {
                continue;
            }
            let touched: Vec<bool> = deg.iter().map(|&d| d > 0).collect();
            let (_, label) = g.components_with(|e| mask & (1 << e) != 0);
            let first = touched.iter().position(|&t| t).unwrap();
            if (0..g.num_vertices()).all(|v| !touched[v] || label[v] == label[first]) {
                out.push(edges);
            }
        }
        out
    }

    fn brute_force_valid(g: &Graph, l: &LengthFunction) -> bool {
        embedded_cycles(g).iter().all(|c| c.iter().any(|&e| l.is_long(e)))
    }

    #[test]
    fn theta_unit_lengths_are_valid() {
        let g = corpus::theta();
        let l = LengthFunction::unit(&g);
        assert!(validate_length_function(&g, &l).passed());
        assert!(l.is_nondegenerate());
    }

    #[test]
    fn theta_with_short_pair_is_invalid() {
        let g = corpus::theta();
        let l = LengthFunction::from_edge_lengths(vec![0.5, 0.5, 1.0]);
        let r = validate_length_function(&g, &l);
        assert!(!r.get("length.cycle_condition").unwrap().passed());
        assert!(!brute_force_valid(&g, &l));
    }

    #[test]
    fn rose_and_degenerate_cases() {
        let g = corpus::rose(2);
        assert!(validate_length_function(&g, &LengthFunction::unit(&g)).passed());
        let g = corpus::theta();
        let l = LengthFunction::from_edge_lengths(vec![1.0, 1.0, 0.0]);
        assert!(validate_length_function(&g, &l).passed());
        assert!(!l.is_nondegenerate());
        let bad = LengthFunction::from_edge_lengths(vec![1.0, 1.5, 1.0]);
        assert!(!validate_length_function(&g, &bad).get("length.range").unwrap().passed());
        let short = LengthFunction::from_edge_lengths(vec![1.0, 1.0]);
        assert!(!validate_length_function(&g, &short).passed());
    }

    #[test]
    fn short_loop_violates_cycle_condition() {
        let g = corpus::rose(2);
        let l = LengthFunction::from_edge_lengths(vec![1.0, 0.9]);
        assert!(!validate_length_function(&g, &l).passed());
    }

    #[test]
    fn forest_test_agrees_with_cycle_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..400 {
            let n = rng.gen_range(1..=5);
            let m = rng.gen_range(1..=7);
            let edges: Vec<_> = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
            let g = Graph::from_edge_list(n, &edges).unwrap();
            let l = LengthFunction::from_edge_lengths(
                (0..m).map(|_| if rng.gen_bool(0.5) { 1.0 } else { rng.gen_range(0.0..1.0) }).collect(),
            );
            let fast = validate_length_function(&g, &l).passed();
            assert_eq!(fast, brute_force_valid(&g, &l), "edges {edges:?} lengths {l:?}");
        }
    }
}
