use super::{ImmersedGraph, TorusLayout, TreeVertex};
use crate::error::{Error, Result};
use crate::graph::Graph;
use std::fmt::Write;

/// Splits the segment `p → p + d` at integer coordinate crossings and
/// returns the pieces translated into `[0, 1]^r`.
pub fn wrap_segment(p: &[f64], d: &[f64]) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut cuts = vec![0.0, 1.0];
    for i in 0..p.len() {
        if d[i] == 0.0 {
            continue;
        }
        let (a, b) = (p[i], p[i] + d[i]);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let mut k = lo.floor() + 1.0;
        while k < hi {
            cuts.push((k - a) / d[i]);
            k += 1.0;
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let at = |t: f64| -> Vec<f64> { p.iter().zip(d).map(|(x, y)| x + t * y).collect() };
    cuts.windows(2)
        .map(|w| {
            let mid = at(0.5 * (w[0] + w[1]));
            let shift: Vec<f64> = mid.iter().map(|x| x.floor()).collect();
            let s = at(w[0]).iter().zip(&shift).map(|(x, k)| x - k).collect();
            let e = at(w[1]).iter().zip(&shift).map(|(x, k)| x - k).collect();
            (s, e)
        })
        .collect()
}

/// Rank-2 picture of the immersion on the fundamental domain `[0, 1)²`.
pub fn immersion_svg(g: &Graph, im: &ImmersedGraph) -> Result<String> {
    if im.rank() != 2 {
        return Err(Error::RankNotTwo(im.rank()));
    }
    let size = 400.0;
    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#).unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>"#).unwrap();
    for (e, seg) in im.segments.iter().enumerate() {
        for (a, b) in wrap_segment(&seg.start, &seg.displacement) {
            writeln!(
                out,
                r#"<line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}" stroke="black" stroke-width="2"><title>{}</title></line>"#,
                a[0] * size,
                size - a[1] * size,
                b[0] * size,
                size - b[1] * size,
                g.edge_name(e)
            )
            .unwrap();
        }
    }
    for v in 0..g.num_vertices() {
        let p = ImmersedGraph::reduce(&im.potentials[v]);
        writeln!(
            out,
            r#"<circle cx="{:.6}" cy="{:.6}" r="4" fill="red"><title>{}</title></circle>"#,
            p[0] * size,
            size - p[1] * size,
            g.vertex_name(v)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// `vertex, raw_1..raw_r, good_1..good_r`.
pub fn potentials_csv(g: &Graph, im: &ImmersedGraph) -> String {
    let r = im.rank();
    let mut out = String::from("vertex");
    for i in 1..=r {
        write!(out, ",raw_{i}").unwrap();
    }
    for i in 1..=r {
        write!(out, ",good_{i}").unwrap();
    }
    out.push('\n');
    for v in 0..g.num_vertices() {
        out.push_str(g.vertex_name(v));
        for x in im.potentials[v].iter().chain(im.potential_good(v).iter()) {
            write!(out, ",{x}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// `tree, vertex, kind, label, x_1..x_r` with global positions.
pub fn tree_positions_csv(g: &Graph, layout: &TorusLayout) -> String {
    let r = layout.rank();
    let mut out = String::from("tree,vertex,kind,label");
    for i in 1..=r {
        write!(out, ",x_{i}").unwrap();
    }
    out.push('\n');
    for (ti, t) in layout.trees.iter().enumerate() {
        for v in 0..t.num_vertices() {
            let kind = match t.labels[v] {
                TreeVertex::Leaf(_) => "leaf",
                _ => "internal",
            };
            write!(out, "{ti},{v},{kind},{}", t.vertex_label(Some(g), v)).unwrap();
            for x in t.global_position(v) {
                write!(out, ",{x}").unwrap();
            }
            out.push('\n');
        }
    }
    out
}
