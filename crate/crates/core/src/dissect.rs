//! Cutting P_N^r into N isosceles triangles and N quadrilaterals and rotating
//! them about the center into a polygon D of the same area inside
//! P_{N+1}^r.
//!
//! Frame: P_N^r has its first vertex on the positive x-axis, so side k has
//! its apothem at angle (2k+1)pi/N. Triangle T_k is cut symmetrically about
//! that apothem with apex angle delta = 2pi/N - 2pi/(N+1). Quadrilateral Q_k
//! is the rest of the sector between apothems k and k+1 and contains vertex
//! V_{k+1}. Q_k is turned by -k*delta, which closes the gaps and puts every
//! carried vertex on a vertex of P_{N+1}^r with phase 2pi/N. The triangles
//! fill the one remaining sector of width N*delta.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::femeig::{solve_polygon_shape, solve_triangle, ConvergenceSeries, SolverOptions};
use crate::geometry::{
    contains_with_margin, dihedral_group, make_regular_polygon, Point, Polygon, RegularPolygonSpec,
    TriangleSpec,
};
use crate::mesh::mesh_star_polygon;
use crate::triangle::{unfold, UnfoldedField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PieceKind {
    Triangle,
    Quadrilateral,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub kind: PieceKind,
    /// Index of the side (triangles) or of the sector (quadrilaterals).
    pub index: usize,
    pub original: Polygon,
    /// Rotation about the center, radians.
    pub rotation: f64,
    pub moved: Polygon,
    /// Directions of the two cut segments of `original`, in counter-clockwise
    /// order, as angles.
    pub cuts: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    /// |sum of piece areas - area(P_N)| / area(P_N).
    pub area_match: f64,
    /// Minimum over moved piece vertices of the distance inside P_{N+1}^r.
    pub containment_margin: f64,
    /// Margin is nonnegative up to 1e-12 r.
    pub contained: bool,
    /// Margin over the vertices that are not at a vertex of P_{N+1}^r.
    pub non_contact_margin: f64,
    /// Moved vertices sitting on a vertex of P_{N+1}^r.
    pub contacts: usize,
    /// area(P_{N+1}^r) - area(D).
    pub area_deficit: f64,
    pub disjoint: bool,
    /// Largest overlap depth found between two moved pieces.
    pub max_overlap: f64,
    /// Largest endpoint or parametrization mismatch over glued cut pairs.
    pub cut_matching: f64,
    /// Human-readable descriptions of failed checks.
    pub violations: Vec<String>,
}

impl Certificates {
    pub const AREA_TOL: f64 = 1e-12;
    pub const CUT_TOL: f64 = 1e-10;

    /// Area, containment (contact allowed), disjointness and cut matching.
    pub fn all_pass(&self) -> bool {
        self.violations.is_empty()
    }

    /// Containment with a margin bounded away from zero.
    pub fn strictly_inside(&self, r: f64) -> bool {
        self.containment_margin > 1e-12 * r
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissectionResult {
    pub n: usize,
    pub r: f64,
    pub delta: f64,
    pub pieces_t: Vec<Piece>,
    pub pieces_q: Vec<Piece>,
    pub assembled: Polygon,
    /// The target polygon P_{N+1}^r in the frame of D.
    pub outer: RegularPolygonSpec,
    /// `triangle_order[j]` is the triangle placed j-th in the final sector.
    pub triangle_order: Vec<usize>,
    /// The default ordering failed cut matching and another one was used.
    pub ordering_fallback: bool,
    pub certificates: Certificates,
}

impl DissectionResult {
    pub fn pieces(&self) -> impl Iterator<Item = &Piece> {
        self.pieces_q.iter().chain(&self.pieces_t)
    }

    /// Pieces in counter-clockwise order around D, starting with Q_0.
    fn ring(&self) -> Vec<&Piece> {
        self.pieces_q
            .iter()
            .chain(self.triangle_order.iter().map(|&i| &self.pieces_t[i]))
            .collect()
    }
}

/// Mesh levels for D that resolve the gap below lambda(P_N) for N <= 8.
pub fn default_d_levels(n: usize) -> RangeInclusive<u32> {
    if n <= 6 {
        4..=5
    } else {
        5..=6
    }
}

pub fn cut_angle(n: usize) -> f64 {
    2.0 * PI / n as f64 - 2.0 * PI / (n as f64 + 1.0)
}

pub fn build_dissection(n: usize, r: f64) -> Result<DissectionResult> {
    build_dissection_with_delta(n, r, cut_angle(n))
}

/// Same construction with an arbitrary cut angle, for negative controls.
pub fn build_dissection_with_delta(n: usize, r: f64, delta: f64) -> Result<DissectionResult> {
    RegularPolygonSpec::new(n, r).validate()?;
    if !(delta > 0.0 && delta < 2.0 * PI / n as f64) {
        return Err(Error::InvalidArgument(format!(
            "cut angle {delta} out of range"
        )));
    }
    let default: Vec<usize> = (0..n).collect();
    let first = assemble(n, r, delta, &default)?;
    if first.certificates.cut_matching <= Certificates::CUT_TOL {
        return Ok(first);
    }
    let reversed: Vec<usize> = (0..n).rev().collect();
    let mut candidates = vec![reversed];
    candidates.extend((1..n).map(|s| (0..n).map(|j| (j + s) % n).collect()));
    for order in candidates {
        let mut d = assemble(n, r, delta, &order)?;
        if d.certificates.cut_matching <= Certificates::CUT_TOL {
            d.ordering_fallback = true;
            return Ok(d);
        }
    }
    Ok(first)
}

fn assemble(n: usize, r: f64, delta: f64, order: &[usize]) -> Result<DissectionResult> {
    let nf = n as f64;
    let sector = 2.0 * PI / nf;
    let apothem = r * (PI / nf).cos();
    let cut_len = apothem / (delta / 2.0).cos();
    let theta = |k: usize| (2 * k + 1) as f64 * PI / nf;
    let c_minus = |k: usize| Point::polar(cut_len, theta(k) - delta / 2.0);
    let c_plus = |k: usize| Point::polar(cut_len, theta(k) + delta / 2.0);
    let o = Point::ORIGIN;

    let mut pieces_q = Vec::with_capacity(n);
    for k in 0..n {
        let next = (k + 1) % n;
        let original = Polygon::new(vec![
            o,
            c_plus(k),
            Point::polar(r, (k + 1) as f64 * sector),
            c_minus(next).rotate(if next == 0 { 2.0 * PI } else { 0.0 }),
        ])?;
        let rotation = 0.0 - k as f64 * delta;
        pieces_q.push(Piece {
            kind: PieceKind::Quadrilateral,
            index: k,
            moved: original.rotated_about(o, rotation),
            original,
            rotation,
            cuts: [theta(k) + delta / 2.0, theta(k) + sector - delta / 2.0],
        });
    }

    let q_span = nf * (sector - delta);
    let start = PI / nf + delta / 2.0 + q_span;
    let mut pieces_t: Vec<Option<Piece>> = vec![None; n];
    for (j, &i) in order.iter().enumerate() {
        let original = Polygon::new(vec![o, c_minus(i), c_plus(i)])?;
        let rotation = start + j as f64 * delta - (theta(i) - delta / 2.0);
        pieces_t[i] = Some(Piece {
            kind: PieceKind::Triangle,
            index: i,
            moved: original.rotated_about(o, rotation),
            original,
            rotation,
            cuts: [theta(i) - delta / 2.0, theta(i) + delta / 2.0],
        });
    }
    let pieces_t: Vec<Piece> = pieces_t
        .into_iter()
        .map(|p| p.expect("order is a permutation"))
        .collect();

    let mut boundary = Vec::with_capacity(3 * n);
    for q in &pieces_q {
        let v = q.moved.vertices();
        boundary.push(v[1]);
        boundary.push(v[2]);
    }
    for &i in order {
        boundary.push(pieces_t[i].moved.vertices()[1]);
    }
    let assembled = Polygon::new(boundary)?;
    let outer = RegularPolygonSpec::new(n + 1, r).with_phase(sector);

    let mut d = DissectionResult {
        n,
        r,
        delta,
        pieces_t,
        pieces_q,
        assembled,
        outer,
        triangle_order: order.to_vec(),
        ordering_fallback: false,
        certificates: Certificates {
            area_match: f64::NAN,
            containment_margin: f64::NAN,
            contained: false,
            non_contact_margin: f64::NAN,
            contacts: 0,
            area_deficit: f64::NAN,
            disjoint: false,
            max_overlap: f64::NAN,
            cut_matching: f64::NAN,
            violations: Vec::new(),
        },
    };
    d.certificates = certify(&d)?;
    Ok(d)
}

/// Overlap depth of two convex polygons along their separating-axis
/// candidates; nonpositive when their interiors are disjoint.
pub fn convex_overlap(a: &Polygon, b: &Polygon) -> f64 {
    let project = |p: &Polygon, axis: Point| {
        p.vertices()
            .iter()
            .map(|v| v.dot(axis))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
                (lo.min(t), hi.max(t))
            })
    };
    let mut depth = f64::INFINITY;
    for (p, q) in a.edges().chain(b.edges()) {
        let e = q - p;
        let axis = Point::new(-e.y, e.x) * (1.0 / e.norm());
        let (a0, a1) = project(a, axis);
        let (b0, b1) = project(b, axis);
        depth = depth.min(a1.min(b1) - a0.max(b0));
    }
    depth
}

/// Runs every check on a built dissection.
pub fn certify(d: &DissectionResult) -> Result<Certificates> {
    let r = d.r;
    let tol = 1e-12 * r;
    let mut violations = Vec::new();

    let p_n = make_regular_polygon(&RegularPolygonSpec::new(d.n, r))?;
    let piece_area: f64 = d.pieces().map(|p| p.original.area()).sum();
    let area_match = (piece_area - p_n.area()).abs() / p_n.area();
    if !(area_match < Certificates::AREA_TOL) {
        violations.push(format!("area mismatch {area_match:.3e}"));
    }

    let outer = make_regular_polygon(&d.outer)?;
    let outer_vertices = outer.vertices().to_vec();
    let pieces: Vec<&Piece> = d.pieces().collect();
    let per_piece: Vec<Result<(f64, f64, usize)>> = pieces
        .par_iter()
        .map(|p| {
            let margin = contains_with_margin(&outer, &p.moved)?;
            let mut free = f64::INFINITY;
            let mut contacts = 0;
            for &v in p.moved.vertices() {
                if outer_vertices.iter().any(|w| w.dist(v) <= tol) {
                    contacts += 1;
                } else {
                    free = free.min(outer.support_distance(v));
                }
            }
            Ok((margin, free, contacts))
        })
        .collect();
    let mut containment_margin = f64::INFINITY;
    let mut non_contact_margin = f64::INFINITY;
    let mut contacts = 0;
    for (p, res) in pieces.iter().zip(per_piece) {
        let (m, free, c) = res?;
        if m < -tol {
            violations.push(format!(
                "{:?} {} leaves P_{} by {:.3e}",
                p.kind,
                p.index,
                d.n + 1,
                -m
            ));
        }
        containment_margin = containment_margin.min(m);
        non_contact_margin = non_contact_margin.min(free);
        contacts += c;
    }
    let contained = containment_margin >= -tol;

    let mut max_overlap = f64::NEG_INFINITY;
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            let depth = convex_overlap(&pieces[i].moved, &pieces[j].moved);
            if depth > tol {
                violations.push(format!(
                    "{:?} {} overlaps {:?} {} by {:.3e}",
                    pieces[i].kind, pieces[i].index, pieces[j].kind, pieces[j].index, depth
                ));
            }
            max_overlap = max_overlap.max(depth);
        }
    }
    let moved_area: f64 = pieces.iter().map(|p| p.moved.area()).sum();
    let cover_gap = (moved_area - d.assembled.area()).abs() / d.assembled.area();
    if cover_gap > Certificates::AREA_TOL {
        violations.push(format!(
            "pieces do not tile D: relative area gap {cover_gap:.3e}"
        ));
    }
    let disjoint = max_overlap <= tol && cover_gap <= Certificates::AREA_TOL;

    let cut_matching = cut_mismatch(d);
    if !(cut_matching <= Certificates::CUT_TOL) {
        violations.push(format!("cut segments mismatch by {cut_matching:.3e}"));
    }

    Ok(Certificates {
        area_match,
        containment_margin,
        contained,
        non_contact_margin,
        contacts,
        area_deficit: outer.area() - d.assembled.area(),
        disjoint,
        max_overlap,
        cut_matching,
        violations,
    })
}

/// For every pair of pieces glued along a cut in D: the two moved segments
/// must coincide, and their preimages in P_N must be exchanged by a symmetry
/// of P_N, so that a symmetric function takes equal values at equal distance
/// from the center on both sides.
fn cut_mismatch(d: &DissectionResult) -> f64 {
    let ring = d.ring();
    let group = dihedral_group(d.n);
    let cut_len = d.r * (PI / d.n as f64).cos() / (d.delta / 2.0).cos();
    let mut worst: f64 = 0.0;
    for (j, a) in ring.iter().enumerate() {
        let b = ring[(j + 1) % ring.len()];
        let dir_a = a.cuts[1];
        let dir_b = b.cuts[0];
        let end_a = Point::polar(cut_len, dir_a + a.rotation);
        let end_b = Point::polar(cut_len, dir_b + b.rotation);
        let moved = end_a.dist(end_b) / d.r;
        let ua = Point::polar(1.0, dir_a);
        let ub = Point::polar(1.0, dir_b);
        let orbit = group
            .iter()
            .map(|g| g.apply(ua).dist(ub))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(moved).max(orbit);
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub n: usize,
    pub r: f64,
    pub lambda_next: ConvergenceSeries,
    pub lambda_d: ConvergenceSeries,
    pub lambda_n: ConvergenceSeries,
    pub lower_certified: bool,
    pub upper_certified: bool,
    pub certified: bool,
}

/// lambda(P_{N+1}^r) < lambda(D) < lambda(P_N^r). The polygons are solved
/// through their reduced triangles at `triangle_levels`, D directly on a
/// fan mesh about the center at `d_levels`.
pub fn eigen_sandwich(
    d: &DissectionResult,
    d_levels: RangeInclusive<u32>,
    triangle_levels: RangeInclusive<u32>,
    opts: SolverOptions,
) -> Result<Sandwich> {
    let (n, r) = (d.n, d.r);
    let lambda_d = solve_polygon_shape(&d.assembled, Some(Point::ORIGIN), d_levels, opts)?.series;
    let lambda_n = solve_triangle(
        &TriangleSpec::for_polygon(n, r),
        triangle_levels.clone(),
        opts,
    )?
    .series;
    let lambda_next =
        solve_triangle(&TriangleSpec::for_polygon(n + 1, r), triangle_levels, opts)?.series;
    let est = |s: &ConvergenceSeries| (s.extrapolated, s.error_estimate);
    let lower_certified = crate::certified_less(est(&lambda_next), est(&lambda_d));
    let upper_certified = crate::certified_less(est(&lambda_d), est(&lambda_n));
    Ok(Sandwich {
        n,
        r,
        lambda_next,
        lambda_d,
        lambda_n,
        lower_certified,
        upper_certified,
        certified: lower_certified && upper_certified,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransplantCheck {
    /// Integral of the transported function squared over D.
    pub l2_d: f64,
    /// Integral of its squared gradient over D.
    pub h1_d: f64,
    /// The same integrals of the eigenfunction over P_N^r.
    pub l2_p: f64,
    pub h1_p: f64,
    pub l2_rel: f64,
    pub h1_rel: f64,
}

/// Transports the first eigenfunction of P_N^r onto D piece by piece and
/// integrates it over a fan mesh of D.
pub fn transplant_check(
    d: &DissectionResult,
    triangle_level: u32,
    quadrature_level: u32,
    opts: SolverOptions,
) -> Result<TransplantCheck> {
    let (n, r) = (d.n, d.r);
    let tri = solve_triangle(
        &TriangleSpec::for_polygon(n, r),
        triangle_level..=triangle_level,
        opts,
    )?
    .field;
    let (l2_t, h1_t) = tri.energies();
    let u = unfold(&tri, n, r)?;
    let mesh = mesh_star_polygon(&d.assembled, Point::ORIGIN, quadrature_level)?;
    let pieces: Vec<&Piece> = d.pieces().collect();
    let transported = |y: Point| -> Result<(f64, Point)> {
        let p = pieces
            .iter()
            .max_by(|a, b| {
                a.moved
                    .support_distance(y)
                    .total_cmp(&b.moved.support_distance(y))
            })
            .expect("pieces exist");
        eval_transported(&u, p, y)
    };
    const W: [f64; 2] = [0.223_381_589_678_011, 0.109_951_743_655_322];
    const A: [f64; 2] = [0.445_948_490_915_965, 0.091_576_213_509_771];
    let mut l2_d = 0.0;
    let mut h1_d = 0.0;
    for e in 0..mesh.elements.len() {
        let [p0, p1, p2] = mesh.element_points(e);
        let area = mesh.element_area(e);
        for (w, a) in W.iter().zip(A) {
            let b = 1.0 - 2.0 * a;
            for lam in [[b, a, a], [a, b, a], [a, a, b]] {
                let (v, g) = transported(p0 * lam[0] + p1 * lam[1] + p2 * lam[2])?;
                l2_d += w * area * v * v;
                h1_d += w * area * g.dot(g);
            }
        }
    }
    let copies = 2.0 * n as f64;
    let (l2_p, h1_p) = (copies * l2_t, copies * h1_t);
    Ok(TransplantCheck {
        l2_d,
        h1_d,
        l2_p,
        h1_p,
        l2_rel: (l2_d - l2_p).abs() / l2_p,
        h1_rel: (h1_d - h1_p).abs() / h1_p,
    })
}

fn eval_transported(u: &UnfoldedField<'_>, p: &Piece, y: Point) -> Result<(f64, Point)> {
    let x = y.rotate(-p.rotation);
    let (v, g) = u.eval(x)?;
    Ok((v, g.rotate(p.rotation)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_cut_angle() {
        assert!((cut_angle(4) - PI / 10.0).abs() < 1e-15);
    }

    #[test]
    fn square_to_pentagon_pieces() {
        let d = build_dissection(4, 1.0).unwrap();
        let c = &d.certificates;
        assert!(c.all_pass(), "{:?}", c.violations);
        assert!(c.area_match < 1e-12);
        assert!((d.assembled.area() - 2.0).abs() < 1e-12);
        assert_eq!(d.assembled.len(), 12);
        assert_eq!(c.contacts, 4);
        assert!(c.non_contact_margin > 1e-3);
        assert!(c.area_deficit > 0.0);
        assert!(!d.ordering_fallback);
    }

    #[test]
    fn pieces_are_congruent() {
        let d = build_dissection(6, 1.0).unwrap();
        let sorted = |p: &Polygon| {
            let mut e = p.edge_lengths();
            e.sort_by(f64::total_cmp);
            e
        };
        for group in [&d.pieces_t, &d.pieces_q] {
            let first = sorted(&group[0].original);
            for p in group.iter() {
                for (a, b) in sorted(&p.original).iter().zip(&first) {
                    assert!((a - b).abs() < 1e-12);
                }
                for (a, b) in sorted(&p.moved).iter().zip(&first) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn carried_vertices_are_the_only_ones_on_the_circle() {
        let d = build_dissection(5, 1.0).unwrap();
        let on_circle = d
            .assembled
            .vertices()
            .iter()
            .filter(|v| (v.norm() - 1.0).abs() < 1e-12)
            .count();
        assert_eq!(on_circle, 5);
        assert!(d
            .assembled
            .vertices()
            .iter()
            .all(|v| v.norm() <= 1.0 + 1e-12));
    }

    #[test]
    fn perturbed_cut_angle_breaks_containment() {
        let d = build_dissection_with_delta(4, 1.0, 1.01 * cut_angle(4)).unwrap();
        assert!(!d.certificates.all_pass());
        assert!(!d.certificates.contained);
    }

    #[test]
    fn margins_scale_with_r() {
        let a = build_dissection(5, 1.0).unwrap().certificates;
        let b = build_dissection(5, 3.0).unwrap().certificates;
        assert!((b.non_contact_margin - 3.0 * a.non_contact_margin).abs() < 1e-12);
        assert!((b.area_deficit - 9.0 * a.area_deficit).abs() < 1e-11);
    }

    #[test]
    fn overlap_of_shifted_squares() {
        let sq = |x: f64| {
            Polygon::new(vec![
                Point::new(x, 0.0),
                Point::new(x + 1.0, 0.0),
                Point::new(x + 1.0, 1.0),
                Point::new(x, 1.0),
            ])
            .unwrap()
        };
        assert!((convex_overlap(&sq(0.0), &sq(0.5)) - 0.5).abs() < 1e-15);
        assert!(convex_overlap(&sq(0.0), &sq(1.0)).abs() < 1e-15);
        assert!(convex_overlap(&sq(0.0), &sq(2.0)) < 0.0);
    }

    #[test]
    fn transplant_preserves_integrals() {
        let d = build_dissection(4, 1.0).unwrap();
        let t = transplant_check(&d, 4, 4, SolverOptions::default()).unwrap();
        assert!(t.l2_rel < 2e-3, "{t:?}");
        assert!(t.h1_rel < 2e-2, "{t:?}");
    }
}
