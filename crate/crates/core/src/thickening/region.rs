//! The sublevel set `W = Φ⁻¹[0, c]` on the rank-2 torus.
//!
//! The torus is `ℝ²/Lℤ²` with `L = s·U`. A periodic grid is laid out in
//! lattice coordinates, every node is mapped to the scaled good frame, and
//! the global field is the minimum of the per-tree fields over the deck
//! translates that can reach the fundamental domain.

use super::field::ThickeningField;
use super::lemmas::SAMPLE_MARGIN;
use crate::abel_jacobi::TorusLayout;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::report::{Check, Report};
use std::collections::HashMap;
use std::fmt::Write;

/// Default grid spacing in the scaled good frame.
pub const DEFAULT_GRID_H: f64 = 0.05;
/// The sublevel value defining `W`.
pub const LEVEL: f64 = 0.25;

/// Per-tree fields with the lattice translates that meet the fundamental domain.
#[derive(Debug, Clone)]
pub struct TorusField {
    pub lattice: Matrix,
    fields: Vec<ThickeningField>,
    /// For each tree: origins `anchor + L·k` of the relevant translates.
    origins: Vec<Vec<Vec<f64>>>,
    /// For each tree: local bounding box inflated by the support radius.
    boxes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl TorusField {
    pub fn new(layout: &TorusLayout) -> Result<Self> {
        let r = layout.rank();
        let lattice = layout.lattice.clone();
        let inv = lattice.inverse()?;
        let mut fields = Vec::new();
        let mut origins = Vec::new();
        let mut boxes = Vec::new();
        for t in &layout.trees {
            let (mut lo, mut hi) = t.bbox();
            for i in 0..r {
                lo[i] -= SAMPLE_MARGIN;
                hi[i] += SAMPLE_MARGIN;
            }
            // lattice-coordinate range of the inflated box in the global frame
            let mut rlo = vec![f64::INFINITY; r];
            let mut rhi = vec![f64::NEG_INFINITY; r];
            for corner in 0..(1usize << r) {
                let p: Vec<f64> = (0..r)
                    .map(|i| t.anchor[i] + if corner & (1 << i) != 0 { hi[i] } else { lo[i] })
                    .collect();
                let q = inv.mul_vec(&p);
                for i in 0..r {
                    rlo[i] = rlo[i].min(q[i]);
                    rhi[i] = rhi[i].max(q[i]);
                }
            }
            // y ∈ [0,1)^r and y − k inside the box: k ∈ [−rhi, 1 − rlo]
            let ranges: Vec<(i64, i64)> =
                (0..r).map(|i| ((-rhi[i]).floor() as i64 - 1, (1.0 - rlo[i]).ceil() as i64 + 1)).collect();
            let mut os = Vec::new();
            let mut k = ranges.iter().map(|&(a, _)| a).collect::<Vec<i64>>();
            'outer: loop {
                let kf: Vec<f64> = k.iter().map(|&x| x as f64).collect();
                os.push(linalg::add(&t.anchor, &lattice.mul_vec(&kf)));
                for i in 0..r {
                    if k[i] < ranges[i].1 {
                        k[i] += 1;
                        continue 'outer;
                    }
                    k[i] = ranges[i].0;
                }
                break;
            }
            fields.push(ThickeningField::new(t));
            origins.push(os);
            boxes.push((lo, hi));
        }
        Ok(TorusField { lattice, fields, origins, boxes })
    }

    /// `min Φ_T(y − origin)` with the minimizing `(tree, translate)`.
    pub fn value_with_source(&self, y: &[f64]) -> (f64, Option<(usize, usize)>) {
        let mut best = 1.0;
        let mut src = None;
        for (t, f) in self.fields.iter().enumerate() {
            let (lo, hi) = &self.boxes[t];
            for (k, o) in self.origins[t].iter().enumerate() {
                let x = linalg::sub(y, o);
                if x.iter().zip(lo.iter().zip(hi)).any(|(v, (a, b))| v < a || v > b) {
                    continue;
                }
                let v = f.value(&x);
                if v < best || src.is_none() && v <= best {
                    best = v;
                    src = Some((t, k));
                }
            }
        }
        (best, src)
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        self.value_with_source(y).0
    }

    /// Gradient of the minimizing term.
    pub fn gradient(&self, y: &[f64]) -> Vec<f64> {
        match self.value_with_source(y).1 {
            Some((t, k)) => self.fields[t].gradient(&linalg::sub(y, &self.origins[t][k])),
            None => vec![0.0; y.len()],
        }
    }
}

/// Periodic grid on the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub h: f64,
    pub level: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { h: DEFAULT_GRID_H, level: LEVEL }
    }
}

/// A boundary curve as a closed loop of points in lattice coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

/// Rasterized sublevel region with its boundary.
#[derive(Debug, Clone)]
pub struct Region {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub level: f64,
    pub lattice: Matrix,
    /// Field values, row-major with `x` fastest.
    pub values: Vec<f64>,
    pub euler_characteristic: i64,
    pub inside_nodes: usize,
    /// Boundary pieces inside single cells, in lattice coordinates within `[0, 1]²`.
    pub segments: Vec<([f64; 2], [f64; 2])>,
    pub polylines: Vec<Polyline>,
    pub min_boundary_gradient: f64,
}

impl Region {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[(j % self.ny) * self.nx + (i % self.nx)]
    }

    pub fn inside(&self, i: usize, j: usize) -> bool {
        self.value(i, j) <= self.level
    }

    /// Good-frame position of a lattice-coordinate point.
    pub fn to_good(&self, p: [f64; 2]) -> Vec<f64> {
        self.lattice.mul_vec(&p)
    }

    pub fn boundary_csv(&self) -> String {
        let mut out = String::from("curve,point,u,v,x,y\n");
        for (c, pl) in self.polylines.iter().enumerate() {
            for (k, p) in pl.points.iter().enumerate() {
                let g = self.to_good(*p);
                writeln!(out, "{c},{k},{},{},{},{}", p[0], p[1], g[0], g[1]).unwrap();
            }
        }
        out
    }

    pub fn svg(&self) -> String {
        let size = 600.0;
        let mut out = String::new();
        writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#).unwrap();
        writeln!(out, r#"<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>"#).unwrap();
        for (a, b) in &self.segments {
            writeln!(
                out,
                r#"<line x1="{:.5}" y1="{:.5}" x2="{:.5}" y2="{:.5}" stroke="navy" stroke-width="1"/>"#,
                a[0] * size,
                size - a[1] * size,
                b[0] * size,
                size - b[1] * size
            )
            .unwrap();
        }
        writeln!(out, "<!-- euler_characteristic {} -->", self.euler_characteristic).unwrap();
        out.push_str("</svg>\n");
        out
    }

    /// Header line `nx,ny,h,origin_x,origin_y` then `i,j,x,y,phi` rows.
    pub fn field_csv(&self) -> String {
        let mut out = String::from("nx,ny,h,origin_x,origin_y\n");
        writeln!(out, "{},{},{},0,0", self.nx, self.ny, self.h).unwrap();
        out.push_str("i,j,x,y,phi\n");
        for j in 0..self.ny {
            for i in 0..self.nx {
                let g = self.to_good([i as f64 / self.nx as f64, j as f64 / self.ny as f64]);
                writeln!(out, "{i},{j},{},{},{}", g[0], g[1], self.value(i, j)).unwrap();
            }
        }
        out
    }

    pub fn report(&self) -> Report {
        let mut r = Report::new();
        let closed = self.polylines.iter().all(|p| p.closed);
        r.push(Check::boolean("region.boundary_closed", closed, None));
        r.push(Check::above("region.regular_value", self.min_boundary_gradient, 1e-8, None));
        r
    }
}

/// Rasterizes `W = {min Φ ≤ c}` on a rank-2 torus layout.
pub fn sublevel_region(layout: &TorusLayout, config: GridConfig) -> Result<Region> {
    if layout.rank() != 2 {
        return Err(Error::RankNotTwo(layout.rank()));
    }
    let field = TorusField::new(layout)?;
    let lattice = layout.lattice.clone();
    let col = |j: usize| linalg::norm(&lattice.column(j));
    let nx = (col(0) / config.h).ceil().max(3.0) as usize;
    let ny = (col(1) / config.h).ceil().max(3.0) as usize;
    let level = config.level;
    let lat = |i: usize, j: usize| [i as f64 / nx as f64, j as f64 / ny as f64];
    let mut values = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            values[j * nx + i] = field.value(&lattice.mul_vec(&lat(i, j)));
        }
    }
    let inside = |i: usize, j: usize| values[(j % ny) * nx + (i % nx)] <= level;
    let val = |i: usize, j: usize| values[(j % ny) * nx + (i % nx)];

    // cubical complex of inside nodes
    let mut v = 0i64;
    let mut e = 0i64;
    let mut f = 0i64;
    for j in 0..ny {
        for i in 0..nx {
            if !inside(i, j) {
                continue;
            }
            v += 1;
            if inside(i + 1, j) {
                e += 1;
            }
            if inside(i, j + 1) {
                e += 1;
            }
            if inside(i + 1, j) && inside(i, j + 1) && inside(i + 1, j + 1) {
                f += 1;
            }
        }
    }

    // marching squares; crossings keyed by grid edge
    // horizontal edge (i,j)-(i+1,j) has id 2(j·nx+i), vertical (i,j)-(i,j+1) id 2(j·nx+i)+1
    let mut crossing: HashMap<usize, [f64; 2]> = HashMap::new();
    let mut links: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut segments = Vec::new();
    let interp = |a: f64, b: f64| (level - a) / (b - a);
    for j in 0..ny {
        for i in 0..nx {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let edges = [
                (0, 1, 2 * ((j % ny) * nx + i % nx)),
                (1, 2, 2 * ((j % ny) * nx + (i + 1) % nx) + 1),
                (3, 2, 2 * (((j + 1) % ny) * nx + i % nx)),
                (0, 3, 2 * ((j % ny) * nx + i % nx) + 1),
            ];
            let mut here: Vec<(usize, [f64; 2])> = Vec::new();
            for &(a, b, id) in &edges {
                let (pa, pb) = (corners[a], corners[b]);
                if inside(pa.0, pa.1) == inside(pb.0, pb.1) {
                    continue;
                }
                let t = interp(val(pa.0, pa.1), val(pb.0, pb.1));
                let la = lat(pa.0, pa.1);
                let lb = lat(pb.0, pb.1);
                let p = [la[0] + t * (lb[0] - la[0]), la[1] + t * (lb[1] - la[1])];
                crossing.entry(id).or_insert([p[0].rem_euclid(1.0), p[1].rem_euclid(1.0)]);
                here.push((id, p));
            }
            match here.len() {
                0 => {}
                2 => {
                    segments.push((here[0].1, here[1].1));
                    links.entry(here[0].0).or_default().push(here[1].0);
                    links.entry(here[1].0).or_default().push(here[0].0);
                }
                _ => {
                    return Err(Error::GridTooCoarse(format!(
                        "cell ({i}, {j}) has {} boundary crossings",
                        here.len()
                    )))
                }
            }
        }
    }

    let mut polylines = Vec::new();
    let mut used: HashMap<usize, bool> = HashMap::new();
    let mut ids: Vec<usize> = crossing.keys().copied().collect();
    ids.sort_unstable();
    for &start in &ids {
        if used.contains_key(&start) {
            continue;
        }
        let mut points = Vec::new();
        let mut prev = usize::MAX;
        let mut cur = start;
        let mut closed = false;
        loop {
            used.insert(cur, true);
            points.push(crossing[&cur]);
            let nbrs = links.get(&cur).cloned().unwrap_or_default();
            if nbrs.len() != 2 {
                break;
            }
            let next = if nbrs[0] != prev { nbrs[0] } else { nbrs[1] };
            if next == start {
                closed = true;
                break;
            }
            if used.contains_key(&next) {
                break;
            }
            prev = cur;
            cur = next;
        }
        polylines.push(Polyline { points, closed });
    }

    let mut min_grad = f64::INFINITY;
    for p in crossing.values() {
        let g = field.gradient(&lattice.mul_vec(p));
        min_grad = min_grad.min(linalg::norm(&g));
    }

    Ok(Region {
        nx,
        ny,
        h: config.h,
        level,
        lattice,
        values,
        euler_characteristic: v - e + f,
        inside_nodes: v as usize,
        segments,
        polylines,
        min_boundary_gradient: min_grad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abel_jacobi::{cut_long_edges, embed_trees, torus_immersion, SCALE};
    use crate::corpus;
    use crate::graph::{Graph, LengthFunction};

    fn region(g: &Graph, l: &LengthFunction) -> Region {
        let im = torus_immersion(g, l, 0).unwrap();
        let lay = embed_trees(g, &cut_long_edges(g, l).unwrap(), &im, SCALE).unwrap();
        sublevel_region(&lay, GridConfig::default()).unwrap()
    }

    #[test]
    fn theta_and_rose_have_euler_characteristic_minus_one() {
        for g in [corpus::theta(), corpus::rose(2)] {
            let r = region(&g, &LengthFunction::unit(&g));
            assert_eq!(r.euler_characteristic, -1);
            assert!(r.report().passed(), "{}", r.report());
            assert!(!r.polylines.is_empty());
        }
    }

    #[test]
    fn rank_three_is_rejected() {
        let g = corpus::k4();
        let l = LengthFunction::unit(&g);
        let im = torus_immersion(&g, &l, 0).unwrap();
        let lay = embed_trees(&g, &cut_long_edges(&g, &l).unwrap(), &im, SCALE).unwrap();
        assert!(matches!(sublevel_region(&lay, GridConfig::default()), Err(Error::RankNotTwo(3))));
    }

    #[test]
    fn exports() {
        let g = corpus::rose(2);
        let r = region(&g, &LengthFunction::unit(&g));
        assert!(r.svg().contains("<line"));
        assert!(r.boundary_csv().starts_with("curve,point,u,v,x,y"));
        let csv = r.field_csv();
        assert_eq!(csv.lines().nth(1).unwrap(), format!("{},{},0.05,0,0", r.nx, r.ny));
    }
}
