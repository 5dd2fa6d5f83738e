//! Conforming triangulations with dyadic refinement.
//!
//! Coarse meshes are fans (polygons) or the single tagged triangle; every
//! refinement splits each element into four congruent children through its
//! edge midpoints, so meshes at consecutive levels are nested and the maximum
//! element diameter halves per level.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    make_triangle, signed_triangle_area, BoundaryPart, Point, Polygon, TaggedTriangle, TriangleSpec,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryTag {
    Dirichlet,
    Neumann,
}

impl BoundaryTag {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::Dirichlet => "dirichlet",
            BoundaryTag::Neumann => "neumann",
        }
    }
}

/// A boundary edge, oriented counter-clockwise along the domain boundary.
/// `segment` is the index of the coarse boundary segment it subdivides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
    pub segment: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub nodes: Vec<Point>,
    pub elements: Vec<[usize; 3]>,
    pub boundary: Vec<BoundaryEdge>,
    pub level: u32,
}

impl Mesh {
    pub fn element_points(&self, e: usize) -> [Point; 3] {
        let [a, b, c] = self.elements[e];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn element_area(&self, e: usize) -> f64 {
        let [a, b, c] = self.element_points(e);
        signed_triangle_area(a, b, c)
    }

    pub fn area(&self) -> f64 {
        (0..self.elements.len()).map(|e| self.element_area(e)).sum()
    }

    /// Longest element edge.
    pub fn h_max(&self) -> f64 {
        (0..self.elements.len())
            .map(|e| {
                let [a, b, c] = self.element_points(e);
                a.dist(b).max(b.dist(c)).max(c.dist(a))
            })
            .fold(0.0, f64::max)
    }

    pub fn h_min(&self) -> f64 {
        (0..self.elements.len())
            .map(|e| {
                let [a, b, c] = self.element_points(e);
                a.dist(b).min(b.dist(c)).min(c.dist(a))
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Nodes lying on at least one edge with the given tag.
    pub fn tagged_nodes(&self, tag: BoundaryTag) -> Vec<bool> {
        let mut out = vec![false; self.nodes.len()];
        for be in self.boundary.iter().filter(|b| b.tag == tag) {
            out[be.nodes[0]] = true;
            out[be.nodes[1]] = true;
        }
        out
    }

    pub fn edges_on_segment(&self, segment: usize) -> impl Iterator<Item = &BoundaryEdge> {
        self.boundary.iter().filter(move |b| b.segment == segment)
    }

    /// Checks conformity, orientation and boundary tagging.
    pub fn check(&self) -> Result<()> {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for (e, el) in self.elements.iter().enumerate() {
            if !(self.element_area(e) > 0.0) {
                return Err(Error::InvalidPolygon(format!(
                    "element {e} is not positively oriented"
                )));
            }
            for i in 0..3 {
                let (a, b) = (el[i], el[(i + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut tagged: HashMap<(usize, usize), usize> = HashMap::new();
        for be in &self.boundary {
            let [a, b] = be.nodes;
            *tagged.entry((a.min(b), a.max(b))).or_default() += 1;
        }
        for (edge, &c) in &count {
            match c {
                1 => {
                    if tagged.get(edge) != Some(&1) {
                        return Err(Error::InvalidPolygon(format!(
                            "boundary edge {edge:?} carries {} tags",
                            tagged.get(edge).copied().unwrap_or(0)
                        )));
                    }
                }
                2 => {
                    if tagged.contains_key(edge) {
                        return Err(Error::InvalidPolygon(format!(
                            "interior edge {edge:?} is tagged"
                        )));
                    }
                }
                _ => {
                    return Err(Error::InvalidPolygon(format!(
                        "edge {edge:?} shared by {c} elements"
                    )))
                }
            }
        }
        if tagged.len() != self.boundary.len() || tagged.keys().any(|k| count.get(k) != Some(&1)) {
            return Err(Error::InvalidPolygon(
                "boundary list does not match mesh boundary".into(),
            ));
        }
        Ok(())
    }

    /// Uniformly scaled copy (about the origin).
    pub fn scaled(&self, t: f64) -> Mesh {
        Mesh {
            nodes: self.nodes.iter().map(|&p| p * t).collect(),
            ..self.clone()
        }
    }
}

/// Uniform 4-way refinement through edge midpoints; boundary tags are
/// inherited by the two halves of each boundary edge.
pub fn refine(m: &Mesh) -> Mesh {
    let mut nodes = m.nodes.clone();
    let mut mids: HashMap<(usize, usize), usize> = HashMap::with_capacity(m.elements.len() * 2);
    let mut midpoint = |a: usize, b: usize, nodes: &mut Vec<Point>| -> usize {
        *mids.entry((a.min(b), a.max(b))).or_insert_with(|| {
            nodes.push(nodes[a].midpoint(nodes[b]));
            nodes.len() - 1
        })
    };
    let mut elements = Vec::with_capacity(m.elements.len() * 4);
    for &[a, b, c] in &m.elements {
        let ab = midpoint(a, b, &mut nodes);
        let bc = midpoint(b, c, &mut nodes);
        let ca = midpoint(c, a, &mut nodes);
        elements.push([a, ab, ca]);
        elements.push([ab, b, bc]);
        elements.push([ca, bc, c]);
        elements.push([ab, bc, ca]);
    }
    let mut boundary = Vec::with_capacity(m.boundary.len() * 2);
    for be in &m.boundary {
        let [a, b] = be.nodes;
        let mid = midpoint(a, b, &mut nodes);
        boundary.push(BoundaryEdge {
            nodes: [a, mid],
            ..*be
        });
        boundary.push(BoundaryEdge {
            nodes: [mid, b],
            ..*be
        });
    }
    Mesh {
        nodes,
        elements,
        boundary,
        level: m.level + 1,
    }
}

pub fn refine_to(mut m: Mesh, level: u32) -> Mesh {
    while m.level < level {
        m = refine(&m);
    }
    m
}

/// Fan triangulation from the polygon's area centroid, refined `level` times.
/// All boundary edges are Dirichlet.
pub fn mesh_polygon(p: &Polygon, level: u32) -> Result<Mesh> {
    mesh_star_polygon(p, p.centroid(), level)
}

/// Fan triangulation from `center`, which must see every edge of `p` with
/// positive orientation (i.e. `p` is star-shaped about it).
pub fn mesh_star_polygon(p: &Polygon, center: Point, level: u32) -> Result<Mesh> {
    let v = p.vertices();
    let n = v.len();
    for i in 0..n {
        if !(signed_triangle_area(center, v[i], v[(i + 1) % n]) > 0.0) {
            return Err(Error::NotStarShaped {
                x: center.x,
                y: center.y,
            });
        }
    }
    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(center);
    nodes.extend_from_slice(v);
    let elements = (0..n).map(|i| [0, 1 + i, 1 + (i + 1) % n]).collect();
    let boundary = (0..n)
        .map(|i| BoundaryEdge {
            nodes: [1 + i, 1 + (i + 1) % n],
            tag: BoundaryTag::Dirichlet,
            segment: i,
        })
        .collect();
    let coarse = Mesh {
        nodes,
        elements,
        boundary,
        level: 0,
    };
    Ok(refine_to(coarse, level))
}

/// Boundary condition of each part of the reduced triangle.
pub fn part_tag(part: BoundaryPart) -> BoundaryTag {
    match part {
        BoundaryPart::Gamma1 => BoundaryTag::Dirichlet,
        BoundaryPart::Gamma2 | BoundaryPart::Gamma3 => BoundaryTag::Neumann,
    }
}

/// The single tagged triangle refined `level` times. Boundary segment `i`
/// is edge `i` of [`make_triangle`], i.e. 0 = gamma3, 1 = gamma1, 2 = gamma2.
pub fn mesh_triangle(t: &TriangleSpec, level: u32) -> Result<Mesh> {
    let tri = make_triangle(t)?;
    Ok(refine_to(coarse_tagged_triangle(&tri), level))
}

fn coarse_tagged_triangle(tri: &TaggedTriangle) -> Mesh {
    Mesh {
        nodes: tri.polygon.vertices().to_vec(),
        elements: vec![[0, 1, 2]],
        boundary: (0..3)
            .map(|i| BoundaryEdge {
                nodes: [i, (i + 1) % 3],
                tag: part_tag(tri.parts[i]),
                segment: i,
            })
            .collect(),
        level: 0,
    }
}

/// Segment index of a boundary part in meshes built by [`mesh_triangle`].
pub fn triangle_segment(part: BoundaryPart) -> usize {
    match part {
        BoundaryPart::Gamma3 => 0,
        BoundaryPart::Gamma1 => 1,
        BoundaryPart::Gamma2 => 2,
    }
}

/// Barycentric coordinates of `p` in triangle (a, b, c).
pub fn barycentric(p: Point, [a, b, c]: [Point; 3]) -> [f64; 3] {
    let det = (b - a).cross(c - a);
    let l1 = (c - p).cross(a - p) / det;
    let l2 = (a - p).cross(b - p) / det;
    [1.0 - l1 - l2, l1, l2]
}

/// Uniform-grid bucket index over element bounding boxes.
#[derive(Clone, Debug)]
pub struct ElementLocator {
    origin: Point,
    cell: (f64, f64),
    dims: (usize, usize),
    offsets: Vec<usize>,
    items: Vec<u32>,
    tol: f64,
}

impl ElementLocator {
    pub fn new(mesh: &Mesh) -> Self {
        let (mut lo, mut hi) = (
            Point::new(f64::INFINITY, f64::INFINITY),
            Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in &mesh.nodes {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let w = (hi.x - lo.x).max(1e-300);
        let h = (hi.y - lo.y).max(1e-300);
        let target = (mesh.elements.len() as f64 / 2.0).max(1.0);
        let nx = ((target * w / h).sqrt().ceil() as usize).clamp(1, 4096);
        let ny = ((target / nx as f64).ceil() as usize).clamp(1, 4096);
        let cell = (w / nx as f64, h / ny as f64);
        let tol = 1e-12 * w.max(h);
        let cell_range = |lo_v: f64, hi_v: f64, o: f64, c: f64, n: usize| {
            let i0 = (((lo_v - tol - o) / c).floor().max(0.0) as usize).min(n - 1);
            let i1 = (((hi_v + tol - o) / c).floor().max(0.0) as usize).min(n - 1);
            (i0, i1)
        };
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); nx * ny];
        for e in 0..mesh.elements.len() {
            let pts = mesh.element_points(e);
            let (x0, x1) = (
                pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min),
                pts.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max),
            );
            let (y0, y1) = (
                pts.iter().map(|p| p.y).fold(f64::INFINITY, f64::min),
                pts.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max),
            );
            let (i0, i1) = cell_range(x0, x1, lo.x, cell.0, nx);
            let (j0, j1) = cell_range(y0, y1, lo.y, cell.1, ny);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(e as u32);
                }
            }
        }
        let mut offsets = Vec::with_capacity(nx * ny + 1);
        let mut items = Vec::new();
        offsets.push(0);
        for b in buckets {
            items.extend(b);
            offsets.push(items.len());
        }
        ElementLocator {
            origin: lo,
            cell,
            dims: (nx, ny),
            offsets,
            items,
            tol,
        }
    }

    /// Element containing `p` (boundary points included) with its barycentric
    /// coordinates.
    pub fn locate(&self, mesh: &Mesh, p: Point) -> Option<(usize, [f64; 3])> {
        let (nx, ny) = self.dims;
        let fx = (p.x - self.origin.x) / self.cell.0;
        let fy = (p.y - self.origin.y) / self.cell.1;
        let slack = self.tol / self.cell.0.min(self.cell.1);
        if fx < -slack || fy < -slack || fx > nx as f64 + slack || fy > ny as f64 + slack {
            return None;
        }
        let i = (fx.floor().max(0.0) as usize).min(nx - 1);
        let j = (fy.floor().max(0.0) as usize).min(ny - 1);
        let c = j * nx + i;
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &e in &self.items[self.offsets[c]..self.offsets[c + 1]] {
            let e = e as usize;
            let lam = barycentric(p, mesh.element_points(e));
            let worst = lam[0].min(lam[1]).min(lam[2]);
            if best.is_none_or(|b| worst > b.2) {
                best = Some((e, lam, worst));
            }
        }
        match best {
            Some((e, lam, worst)) if worst >= -1e-9 => Some((e, lam)),
            _ => None,
        }
    }
}

/// Tolerance-based lookup of points, used for symmetry checks.
#[derive(Clone, Debug)]
pub struct PointSet {
    cell: f64,
    map: HashMap<(i64, i64), Vec<Point>>,
}

impl PointSet {
    pub fn new(points: impl IntoIterator<Item = Point>, cell: f64) -> Self {
        let mut map: HashMap<(i64, i64), Vec<Point>> = HashMap::new();
        for p in points {
            map.entry(Self::key(p, cell)).or_default().push(p);
        }
        PointSet { cell, map }
    }

    fn key(p: Point, cell: f64) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        let (i, j) = Self::key(p, self.cell);
        for di in -1..=1 {
            for dj in -1..=1 {
                if let Some(v) = self.map.get(&(i + di, j + dj)) {
                    if v.iter().any(|q| q.dist(p) <= tol) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// True when the node set and the element-centroid set are both invariant
/// under `map`.
pub fn invariant_under(mesh: &Mesh, map: impl Fn(Point) -> Point, tol: f64) -> bool {
    let cell = (mesh.h_min() / 4.0).max(tol * 4.0);
    let nodes = PointSet::new(mesh.nodes.iter().copied(), cell);
    if !mesh.nodes.iter().all(|&p| nodes.contains(map(p), tol)) {
        return false;
    }
    let centroid = |e: usize| {
        let [a, b, c] = mesh.element_points(e);
        Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
    };
    let cents = PointSet::new((0..mesh.elements.len()).map(centroid), cell);
    (0..mesh.elements.len()).all(|e| cents.contains(map(centroid(e)), tol))
}
