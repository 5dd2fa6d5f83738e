//! Regular polygons, the reduced right triangle, general simple polygons and
//! the dihedral symmetry group.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn polar(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Point::new(radius * c, radius * s)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Rotation about the origin.
    pub fn rotate(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn rotate_about(self, center: Point, angle: f64) -> Point {
        (self - center).rotate(angle) + center
    }

    pub fn midpoint(self, o: Point) -> Point {
        Point::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Signed area of the triangle (a, b, c); positive when counter-clockwise.
pub fn signed_triangle_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * (b - a).cross(c - a)
}

/// Parametric description of the regular polygon P_N^r.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularPolygonSpec {
    pub n: usize,
    pub r: f64,
    pub center: Point,
    /// Angle of the first vertex; zero puts it on the positive x-axis.
    pub phase: f64,
}

impl RegularPolygonSpec {
    pub fn new(n: usize, r: f64) -> Self {
        RegularPolygonSpec {
            n,
            r,
            center: Point::ORIGIN,
            phase: 0.0,
        }
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_center(mut self, center: Point) -> Self {
        self.center = center;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidPolygonSpec(format!(
                "need at least 3 sides, got {}",
                self.n
            )));
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::InvalidPolygonSpec(format!(
                "circumradius must be positive, got {}",
                self.r
            )));
        }
        Ok(())
    }

    /// Vertex k at angle phase + 2 pi k / N.
    pub fn vertex(&self, k: usize) -> Point {
        self.center + Point::polar(self.r, self.phase + 2.0 * PI * k as f64 / self.n as f64)
    }

    pub fn half_angle(&self) -> f64 {
        PI / self.n as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularMetrics {
    pub area: f64,
    pub side_length: f64,
    pub inradius: f64,
    pub central_angle: f64,
}

pub fn regular_metrics(spec: &RegularPolygonSpec) -> Result<RegularMetrics> {
    spec.validate()?;
    let n = spec.n as f64;
    let (s, c) = (PI / n).sin_cos();
    Ok(RegularMetrics {
        area: n * spec.r * spec.r * s * c,
        side_length: 2.0 * spec.r * s,
        inradius: spec.r * c,
        central_angle: 2.0 * PI / n,
    })
}

/// A simple polygon with counter-clockwise vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Point>,
    convex: bool,
}

impl Polygon {
    /// Validates vertex count, simplicity and counter-clockwise orientation.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices
            .iter()
            .any(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(Error::InvalidPolygon("non-finite vertex".into()));
        }
        let area = shoelace(&vertices);
        if !(area > 0.0) {
            return Err(Error::InvalidPolygon(format!(
                "signed area must be positive (counter-clockwise), got {area}"
            )));
        }
        if !is_simple(&vertices) {
            return Err(Error::InvalidPolygon("polygon is self-intersecting".into()));
        }
        let convex = is_convex(&vertices);
        Ok(Polygon { vertices, convex })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    /// Edge i runs from vertex i to vertex i + 1 (cyclically).
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        self.edges().map(|(a, b)| a.dist(b)).collect()
    }

    pub fn perimeter(&self) -> f64 {
        self.edge_lengths().iter().sum()
    }

    /// Area centroid.
    pub fn centroid(&self) -> Point {
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut a2 = 0.0;
        for (p, q) in self.edges() {
            let w = p.cross(q);
            a2 += w;
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        Point::new(cx / (3.0 * a2), cy / (3.0 * a2))
    }

    pub fn rotated_about(&self, center: Point, angle: f64) -> Polygon {
        Polygon {
            vertices: self
                .vertices
                .iter()
                .map(|p| p.rotate_about(center, angle))
                .collect(),
            convex: self.convex,
        }
    }

    /// Even-odd point-in-polygon test; boundary points may go either way.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Signed distance of `p` to the boundary, positive inside. Only exact for
    /// convex polygons, where it is the minimum over edge half-planes.
    pub fn support_distance(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| {
                let e = b - a;
                e.cross(p - a) / e.norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Maximum distance between any two vertices.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, p) in self.vertices.iter().enumerate() {
            for q in &self.vertices[i + 1..] {
                d = d.max(p.dist(*q));
            }
        }
        d
    }
}

fn shoelace(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>()
}

fn is_convex(v: &[Point]) -> bool {
    let n = v.len();
    let scale = v.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1e-300);
    (0..n).all(|i| {
        let a = v[i];
        let b = v[(i + 1) % n];
        let c = v[(i + 2) % n];
        (b - a).cross(c - b) >= -1e-14 * scale * scale
    })
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed segment intersection test.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

fn is_simple(v: &[Point]) -> bool {
    let n = v.len();
    if (0..n).any(|i| v[i] == v[(i + 1) % n]) {
        return false;
    }
    // consecutive edges a->b->c must not fold back onto each other
    for i in 0..n {
        let (a, b, c) = (v[i], v[(i + 1) % n], v[(i + 2) % n]);
        if orient(a, b, c) == 0.0 && (a - b).dot(c - b) > 0.0 {
            return false;
        }
    }
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (v[j], v[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

pub fn make_regular_polygon(spec: &RegularPolygonSpec) -> Result<Polygon> {
    spec.validate()?;
    let vertices = (0..spec.n).map(|k| spec.vertex(k)).collect();
    Polygon::new(vertices)
}

/// Boundary parts of the reduced triangle T(alpha, r).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryPart {
    /// Vertical cathetus opposite alpha; Dirichlet.
    Gamma1,
    /// Hypotenuse; Neumann.
    Gamma2,
    /// Horizontal cathetus; Neumann.
    Gamma3,
}

impl BoundaryPart {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryPart::Gamma1 => "gamma1",
            BoundaryPart::Gamma2 => "gamma2",
            BoundaryPart::Gamma3 => "gamma3",
        }
    }
}

/// The right triangle with hypotenuse `r` and acute angle `alpha` at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleSpec {
    pub alpha: f64,
    pub r: f64,
}

impl TriangleSpec {
    pub fn new(alpha: f64, r: f64) -> Self {
        TriangleSpec { alpha, r }
    }

    /// The fundamental triangle of P_N^r.
    pub fn for_polygon(n: usize, r: f64) -> Self {
        TriangleSpec::new(PI / n as f64, r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < PI / 2.0) || !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::InvalidTriangle {
                alpha: self.alpha,
                r: self.r,
            });
        }
        Ok(())
    }

    /// O, A, B in the canonical frame.
    pub fn vertices(&self) -> [Point; 3] {
        let (s, c) = self.alpha.sin_cos();
        [
            Point::ORIGIN,
            Point::new(self.r * c, 0.0),
            Point::new(self.r * c, self.r * s),
        ]
    }

    pub fn area(&self) -> f64 {
        let (s, c) = self.alpha.sin_cos();
        0.5 * self.r * self.r * s * c
    }
}

/// Triangle polygon with its edges tagged; edge i joins vertex i to i + 1.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggedTriangle {
    pub polygon: Polygon,
    pub parts: [BoundaryPart; 3],
}

impl TaggedTriangle {
    pub fn edge_of(&self, part: BoundaryPart) -> (Point, Point) {
        let i = self.parts.iter().position(|&p| p == part).unwrap();
        let v = self.polygon.vertices();
        (v[i], v[(i + 1) % 3])
    }
}

pub fn make_triangle(spec: &TriangleSpec) -> Result<TaggedTriangle> {
    spec.validate()?;
    let polygon = Polygon::new(spec.vertices().to_vec())?;
    Ok(TaggedTriangle {
        polygon,
        // O->A, A->B, B->O
        parts: [
            BoundaryPart::Gamma3,
            BoundaryPart::Gamma1,
            BoundaryPart::Gamma2,
        ],
    })
}

/// Minimum over the vertices of `inner` of the signed distance inside the
/// convex polygon `outer`. Negative when some vertex lies outside.
pub fn contains_with_margin(outer: &Polygon, inner: &Polygon) -> Result<f64> {
    if !outer.is_convex() {
        return Err(Error::NotConvex);
    }
    Ok(inner
        .vertices()
        .iter()
        .map(|&p| outer.support_distance(p))
        .fold(f64::INFINITY, f64::min))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetryKind {
    Rotation,
    Reflection,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DihedralElement {
    pub kind: SymmetryKind,
    pub k: usize,
    pub matrix: [[f64; 2]; 2],
}

impl DihedralElement {
    pub fn apply(&self, p: Point) -> Point {
        let m = &self.matrix;
        Point::new(m[0][0] * p.x + m[0][1] * p.y, m[1][0] * p.x + m[1][1] * p.y)
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

/// Rotations and reflections of P_N (vertex on the positive x-axis), k = 1..N.
pub fn dihedral_group(n: usize) -> Vec<DihedralElement> {
    let mut out = Vec::with_capacity(2 * n);
    for k in 1..=n {
        let (s, c) = (2.0 * PI * k as f64 / n as f64).sin_cos();
        out.push(DihedralElement {
            kind: SymmetryKind::Rotation,
            k,
            matrix: [[c, -s], [s, c]],
        });
    }
    for k in 1..=n {
        let (s, c) = (2.0 * PI * k as f64 / n as f64).sin_cos();
        out.push(DihedralElement {
            kind: SymmetryKind::Reflection,
            k,
            matrix: [[c, s], [s, -c]],
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn square_vertices_and_area() {
        let p = make_regular_polygon(&RegularPolygonSpec::new(4, 1.0)).unwrap();
        let expected = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (v, e) in p.vertices().iter().zip(expected) {
            assert!((v.x - e.0).abs() < 1e-15 && (v.y - e.1).abs() < 1e-15);
        }
        assert!(close(p.area(), 2.0, 1e-14));
        assert!(p.is_convex());
    }

    #[test]
    fn triangle_area_closed_form() {
        let p = make_regular_polygon(&RegularPolygonSpec::new(3, 1.0)).unwrap();
        assert!(close(p.area(), 3.0 * 3f64.sqrt() / 4.0, 1e-14));
        let a1 = make_regular_polygon(&RegularPolygonSpec::new(6, 1.0))
            .unwrap()
            .area();
        let a2 = make_regular_polygon(&RegularPolygonSpec::new(6, 2.0))
            .unwrap()
            .area();
        assert!(close(a2, 4.0 * a1, 1e-14));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(make_regular_polygon(&RegularPolygonSpec::new(2, 1.0)).is_err());
        assert!(make_regular_polygon(&RegularPolygonSpec::new(5, 0.0)).is_err());
        assert!(make_regular_polygon(&RegularPolygonSpec::new(5, -1.0)).is_err());
        assert!(make_triangle(&TriangleSpec::new(0.0, 1.0)).is_err());
        assert!(make_triangle(&TriangleSpec::new(PI / 2.0, 1.0)).is_err());
        assert!(make_triangle(&TriangleSpec::new(0.3, -1.0)).is_err());
    }

    #[test]
    fn metrics() {
        let m = regular_metrics(&RegularPolygonSpec::new(4, 1.0)).unwrap();
        assert!(close(m.side_length, 2f64.sqrt(), 1e-15));
        assert!(close(m.inradius, 2f64.sqrt() / 2.0, 1e-15));
        assert!(close(m.area, 2.0, 1e-15));
        let m5 = regular_metrics(&RegularPolygonSpec::new(5, 1.0)).unwrap();
        assert!(close(m.central_angle - m5.central_angle, PI / 10.0, 1e-15));
        let big = regular_metrics(&RegularPolygonSpec::new(100_000, 1.0)).unwrap();
        assert!((big.inradius - 1.0).abs() < 1e-9);
        assert!((big.area - PI).abs() < 1e-8);
    }

    #[test]
    fn canonical_triangle() {
        let t = make_triangle(&TriangleSpec::new(PI / 4.0, 1.0)).unwrap();
        let h = 2f64.sqrt() / 2.0;
        let v = t.polygon.vertices();
        assert_eq!(v[0], Point::ORIGIN);
        assert!((v[1].x - h).abs() < 1e-15 && v[1].y == 0.0);
        assert!((v[2].x - h).abs() < 1e-15 && (v[2].y - h).abs() < 1e-15);
        let (a, b) = t.edge_of(BoundaryPart::Gamma1);
        assert!((a.x - h).abs() < 1e-15 && (b.x - h).abs() < 1e-15);
        for alpha in [0.1, 0.7, 1.4] {
            let t = make_triangle(&TriangleSpec::new(alpha, 2.5)).unwrap();
            let (a, b) = t.edge_of(BoundaryPart::Gamma2);
            assert!(close(a.dist(b), 2.5, 1e-14));
        }
    }

    #[test]
    fn triangle_matches_polygon_sector() {
        // center, side midpoint, adjacent corner of P_N^r, with the side midpoint
        // rotated onto the x-axis
        for n in 3..10 {
            let r = 1.7;
            let spec = RegularPolygonSpec::new(n, r);
            let corner = spec.vertex(1);
            let mid = spec.vertex(0).midpoint(spec.vertex(1));
            let rot = -mid.angle();
            let t = TriangleSpec::for_polygon(n, r).vertices();
            assert!(mid.rotate(rot).dist(t[1]) < 1e-14);
            assert!(corner.rotate(rot).dist(t[2]) < 1e-14);
        }
    }

    #[test]
    fn margins() {
        let p5 = make_regular_polygon(&RegularPolygonSpec::new(5, 1.0)).unwrap();
        let p5s = make_regular_polygon(&RegularPolygonSpec::new(5, 0.9)).unwrap();
        let m = contains_with_margin(&p5, &p5s).unwrap();
        assert!(close(m, 0.1 * (PI / 5.0).cos(), 1e-13));
        let p4 = make_regular_polygon(&RegularPolygonSpec::new(4, 1.0)).unwrap();
        assert!(contains_with_margin(&p4, &p4).unwrap().abs() < 1e-15);
        let p4b = make_regular_polygon(&RegularPolygonSpec::new(4, 1.1)).unwrap();
        assert!(contains_with_margin(&p4, &p4b).unwrap() < 0.0);
        let dart = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, -1.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 1.0),
        ])
        .unwrap();
        assert!(!dart.is_convex());
        assert_eq!(contains_with_margin(&dart, &p4), Err(Error::NotConvex));
    }

    #[test]
    fn rejects_self_intersection_and_clockwise() {
        let bowtie = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(-1.0, 0.5),
        ];
        assert!(Polygon::new(bowtie).is_err());
        let cw = vec![
            Point::new(0.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 0.0),
        ];
        assert!(Polygon::new(cw).is_err());
    }

    #[test]
    fn dihedral_matrices() {
        let g = dihedral_group(4);
        assert_eq!(g.len(), 8);
        let id = g
            .iter()
            .find(|e| e.kind == SymmetryKind::Rotation && e.k == 4)
            .unwrap();
        assert!((id.matrix[0][0] - 1.0).abs() < 1e-15 && id.matrix[0][1].abs() < 1e-15);
        let quarter = g
            .iter()
            .find(|e| e.kind == SymmetryKind::Rotation && e.k == 1)
            .unwrap();
        let m = quarter.matrix;
        assert!(m[0][0].abs() < 1e-15 && (m[0][1] + 1.0).abs() < 1e-15);
        assert!((m[1][0] - 1.0).abs() < 1e-15 && m[1][1].abs() < 1e-15);
        for n in 3..12 {
            for e in dihedral_group(n) {
                let m = e.matrix;
                let mmt = [
                    [
                        m[0][0] * m[0][0] + m[0][1] * m[0][1],
                        m[0][0] * m[1][0] + m[0][1] * m[1][1],
                    ],
                    [
                        m[1][0] * m[0][0] + m[1][1] * m[0][1],
                        m[1][0] * m[1][0] + m[1][1] * m[1][1],
                    ],
                ];
                assert!((mmt[0][0] - 1.0).abs() < 1e-14 && mmt[0][1].abs() < 1e-14);
                assert!((mmt[1][1] - 1.0).abs() < 1e-14);
                let det = e.determinant();
                match e.kind {
                    SymmetryKind::Rotation => assert!((det - 1.0).abs() < 1e-14),
                    SymmetryKind::Reflection => assert!((det + 1.0).abs() < 1e-14),
                }
            }
        }
    }

    #[test]
    fn centroid_of_regular_polygon_is_center() {
        let c = Point::new(0.3, -1.2);
        let p = make_regular_polygon(&RegularPolygonSpec::new(7, 2.0).with_center(c)).unwrap();
        assert!(p.centroid().dist(c) < 1e-14);
    }
}
