//! Polygons, triangle partitions, midpoint refinement and Schwarz lantern
//! generators.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geom::{self, OrientedTriangle2, Point2};
use crate::numfmt::fmt_g17;

/// Above this many triangles the pairwise overlap test is skipped.
pub const PAIRWISE_OVERLAP_LIMIT: usize = 10_000;

/// Relative tolerance of the area accounting check.
pub const AREA_RTOL: f64 = 1e-9;

/// Simple polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon2 {
    vertices: Vec<Point2>,
}

fn signed_area(pts: &[Point2]) -> f64 {
    let n = pts.len();
    0.5 * (0..n).map(|i| pts[i].wedge(pts[(i + 1) % n])).sum::<f64>()
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).wedge(c - a)
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test.
fn segments_intersect(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Proper crossing: the open segments cross at a single interior point.
fn segments_cross(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

impl Polygon2 {
    /// Validates and stores the polygon, reversing clockwise input.
    pub fn new(mut vertices: Vec<Point2>) -> Result<Polygon2> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon("fewer than 3 vertices".into()));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite coordinate".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::InvalidPolygon(format!("repeated vertex at index {i}")));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                // adjacent edges share an endpoint
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                let (c, d) = (vertices[j], vertices[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return Err(Error::InvalidPolygon(format!("edges {i} and {j} intersect")));
                }
            }
        }
        let area = signed_area(&vertices);
        if area == 0.0 {
            return Err(Error::InvalidPolygon("zero area".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Polygon2 { vertices })
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Polygon2> {
        Polygon2::new(vec![
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ])
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }
}

/// A finite family of oriented plane triangles with mesh norm `‖Π‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    triangles: Vec<OrientedTriangle2>,
    mesh_norm: f64,
}

impl Partition {
    pub fn from_triangles(triangles: Vec<OrientedTriangle2>) -> Partition {
        let mesh_norm = triangles.iter().map(|t| t.diameter()).fold(0.0, f64::max);
        Partition { triangles, mesh_norm }
    }

    pub fn triangles(&self) -> &[OrientedTriangle2] {
        &self.triangles
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Largest side length over all triangles.
    pub fn mesh_norm(&self) -> f64 {
        self.mesh_norm
    }

    /// Sum of unsigned triangle areas.
    pub fn total_area(&self) -> f64 {
        self.triangles.iter().map(|t| t.area()).sum()
    }

    /// CSV with header `tri_id,ax,ay,bx,by,cx,cy`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tri_id,ax,ay,bx,by,cx,cy\n");
        for (i, t) in self.triangles.iter().enumerate() {
            let _ = writeln!(
                out,
                "{i},{},{},{},{},{},{}",
                fmt_g17(t.a.x),
                fmt_g17(t.a.y),
                fmt_g17(t.b.x),
                fmt_g17(t.b.y),
                fmt_g17(t.c.x),
                fmt_g17(t.c.y)
            );
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Partition> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.split(',').map(str::trim).eq(["tri_id", "ax", "ay", "bx", "by", "cx", "cy"]) => {}
            _ => return Err(Error::InvalidArgument("missing partition CSV header".into())),
        }
        let mut tris = Vec::new();
        for (row, line) in lines.enumerate() {
            let vals: Vec<f64> = line
                .split(',')
                .skip(1)
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidArgument(format!("row {row}: {e}")))?;
            if vals.len() != 6 {
                return Err(Error::InvalidArgument(format!("row {row}: expected 7 fields")));
            }
            tris.push(OrientedTriangle2::new(
                Point2::new(vals[0], vals[1]),
                Point2::new(vals[2], vals[3]),
                Point2::new(vals[4], vals[5]),
            ));
        }
        Ok(Partition::from_triangles(tris))
    }
}

fn point_in_triangle(p: Point2, a: Point2, b: Point2, c: Point2) -> bool {
    orient(a, b, p) >= 0.0 && orient(b, c, p) >= 0.0 && orient(c, a, p) >= 0.0
}

/// Ear-clipping triangulation; every triangle is counterclockwise.
pub fn triangulate(poly: &Polygon2) -> Result<Partition> {
    let pts = poly.vertices();
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    let mut tris = Vec::with_capacity(pts.len() - 2);
    while idx.len() > 3 {
        let n = idx.len();
        let mut clipped = false;
        for i in 0..n {
            let (ip, ic, inx) = (idx[(i + n - 1) % n], idx[i], idx[(i + 1) % n]);
            let (a, b, c) = (pts[ip], pts[ic], pts[inx]);
            if orient(a, b, c) <= 0.0 {
                continue;
            }
            let blocked = idx.iter().any(|&k| {
                k != ip && k != ic && k != inx && point_in_triangle(pts[k], a, b, c)
            });
            if blocked {
                continue;
            }
            tris.push(OrientedTriangle2::new(a, b, c));
            idx.remove(i);
            clipped = true;
            break;
        }
        if !clipped {
            return Err(Error::InvalidPolygon("no ear found (self-intersecting?)".into()));
        }
    }
    let (a, b, c) = (pts[idx[0]], pts[idx[1]], pts[idx[2]]);
    if orient(a, b, c) > 0.0 {
        tris.push(OrientedTriangle2::new(a, b, c));
    }
    Ok(Partition::from_triangles(tris))
}

/// Splits every triangle into four similar children through edge midpoints.
pub fn refine_midpoint(p: &Partition) -> Partition {
    let mut out = Vec::with_capacity(4 * p.len());
    for t in p.triangles() {
        let mab = t.a.midpoint(t.b);
        let mbc = t.b.midpoint(t.c);
        let mca = t.c.midpoint(t.a);
        out.push(OrientedTriangle2::new(t.a, mab, mca));
        out.push(OrientedTriangle2::new(mab, t.b, mbc));
        out.push(OrientedTriangle2::new(mca, mbc, t.c));
        out.push(OrientedTriangle2::new(mbc, mca, mab));
    }
    Partition::from_triangles(out)
}

/// `k` rounds of [`refine_midpoint`].
pub fn refine_times(p: &Partition, k: usize) -> Partition {
    (0..k).fold(p.clone(), |acc, _| refine_midpoint(&acc))
}

/// The local Schwarz triangle `[0, (π/m) e1 + (1/2n) e2, -(π/m) e1 + (1/2n) e2]`.
pub fn schwarz_local_triangle(m: u64, n: u64) -> Result<OrientedTriangle2> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("Schwarz indices must be positive".into()));
    }
    let (w, h) = (PI / m as f64, 0.5 / n as f64);
    Ok(OrientedTriangle2::new(Point2::new(0.0, 0.0), Point2::new(w, h), Point2::new(-w, h)))
}

/// Triangle `[(-π/m, 1/2n), 0, (π/m, 1/2n)]` with the non-mirror fourth point
/// `d = (2π/m, 0)` replacing the mirror vertex of `a`.
pub fn schwarz_fourth_point(m: u64, n: u64) -> Result<(OrientedTriangle2, Point2)> {
    let t = schwarz_local_triangle(m, n)?;
    let (w, h) = (t.b.x, t.b.y);
    Ok((
        OrientedTriangle2::new(Point2::new(-w, h), Point2::new(0.0, 0.0), Point2::new(w, h)),
        Point2::new(2.0 * w, 0.0),
    ))
}

/// Schwarz lantern over `[0, 2π] × [0, height]`: `n` rows of `2m` congruent
/// isosceles triangles with base `2π/m` and height `height/n`.
///
/// Odd rows are shifted by half a base, so their last up-triangle straddles
/// `χ1 = 2π`; the family tiles the rectangle modulo the `2π` period in `χ1`.
/// All triangles are counterclockwise.
pub fn schwarz_lantern_partition(m: u64, n: u64, height: f64) -> Result<Partition> {
    if m < 3 || n == 0 {
        return Err(Error::InvalidArgument("lantern needs m >= 3 and n >= 1".into()));
    }
    if !(height > 0.0 && height.is_finite()) {
        return Err(Error::InvalidArgument("lantern height must be positive".into()));
    }
    // abscissae on a half-base grid so shared vertices are bitwise equal
    let hw = PI / m as f64;
    let gx = |k: u64| k as f64 * hw;
    let gy = |r: u64| height * r as f64 / n as f64;
    let mut tris = Vec::with_capacity((2 * m * n) as usize);
    for row in 0..n {
        let (y0, y1) = (gy(row), gy(row + 1));
        let s = row % 2;
        for i in 0..m {
            let k = 2 * i + s;
            // apex up, base on y0
            tris.push(OrientedTriangle2::new(
                Point2::new(gx(k + 1), y1),
                Point2::new(gx(k), y0),
                Point2::new(gx(k + 2), y0),
            ));
            // apex down, base on y1
            tris.push(OrientedTriangle2::new(
                Point2::new(gx(k + 2), y0),
                Point2::new(gx(k + 3), y1),
                Point2::new(gx(k + 1), y1),
            ));
        }
    }
    Ok(Partition::from_triangles(tris))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// CSV with header `check,passed,detail`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,passed,detail\n");
        for c in &self.checks {
            let detail = c.detail.replace('"', "\"\"");
            let _ = writeln!(out, "{},{},\"{}\"", c.name, c.passed, detail);
        }
        out
    }
}

fn interiors_overlap(s: &OrientedTriangle2, t: &OrientedTriangle2) -> bool {
    let sv = s.vertices();
    let tv = t.vertices();
    for i in 0..3 {
        for j in 0..3 {
            if segments_cross(sv[i], sv[(i + 1) % 3], tv[j], tv[(j + 1) % 3]) {
                return true;
            }
        }
    }
    // one contained in the other, or identical
    let inside_strict = |p: Point2, tri: &OrientedTriangle2| {
        let (a, b, c) = if tri.bivector_scalar() >= 0.0 {
            (tri.a, tri.b, tri.c)
        } else {
            (tri.a, tri.c, tri.b)
        };
        orient(a, b, p) > 0.0 && orient(b, c, p) > 0.0 && orient(c, a, p) > 0.0
    };
    inside_strict(s.centroid(), t) || inside_strict(t.centroid(), s)
}

/// Checks the properties the area theorem relies on. Conformity is not
/// required.
pub fn validate_partition(p: &Partition, poly: &Polygon2) -> ValidationReport {
    let mut checks = Vec::new();

    let degenerate: Vec<usize> =
        (0..p.len()).filter(|&i| p.triangles()[i].is_degenerate()).collect();
    checks.push(Check {
        name: "nondegenerate",
        passed: degenerate.is_empty() && !p.is_empty(),
        detail: if p.is_empty() {
            "empty partition".into()
        } else if degenerate.is_empty() {
            format!("{} triangles", p.len())
        } else {
            format!("degenerate triangles: {:?}", &degenerate[..degenerate.len().min(10)])
        },
    });

    let flipped: Vec<usize> =
        (0..p.len()).filter(|&i| p.triangles()[i].bivector_scalar() <= 0.0).collect();
    checks.push(Check {
        name: "orientation",
        passed: flipped.is_empty(),
        detail: if flipped.is_empty() {
            "all triangles equi-oriented with I_2".into()
        } else {
            format!("{} triangles not counterclockwise, first {:?}", flipped.len(), &flipped[..flipped.len().min(10)])
        },
    });

    let total = p.total_area();
    let target = poly.area();
    let rel = (total - target).abs() / target;
    checks.push(Check {
        name: "area_accounting",
        passed: rel <= AREA_RTOL,
        detail: format!("sum {} vs polygon {} (rel {:e})", fmt_g17(total), fmt_g17(target), rel),
    });

    if p.len() <= PAIRWISE_OVERLAP_LIMIT {
        let tris = p.triangles();
        let boxes: Vec<[f64; 4]> = tris
            .iter()
            .map(|t| {
                let v = t.vertices();
                [
                    v.iter().map(|q| q.x).fold(f64::INFINITY, f64::min),
                    v.iter().map(|q| q.y).fold(f64::INFINITY, f64::min),
                    v.iter().map(|q| q.x).fold(f64::NEG_INFINITY, f64::max),
                    v.iter().map(|q| q.y).fold(f64::NEG_INFINITY, f64::max),
                ]
            })
            .collect();
        let mut first = None;
        'outer: for i in 0..tris.len() {
            for j in (i + 1)..tris.len() {
                let (a, b) = (boxes[i], boxes[j]);
                if a[2] <= b[0] || b[2] <= a[0] || a[3] <= b[1] || b[3] <= a[1] {
                    continue;
                }
                if interiors_overlap(&tris[i], &tris[j]) {
                    first = Some((i, j));
                    break 'outer;
                }
            }
        }
        checks.push(Check {
            name: "non_overlapping",
            passed: first.is_none(),
            detail: match first {
                Some((i, j)) => format!("triangles {i} and {j} overlap"),
                None => "pairwise test passed".into(),
            },
        });
    } else {
        checks.push(Check {
            name: "non_overlapping",
            passed: rel <= AREA_RTOL,
            detail: format!("{} triangles; area accounting only", p.len()),
        });
    }

    let unbalanced: Vec<usize> = (0..p.len())
        .filter(|&i| {
            let t = &p.triangles()[i];
            match geom::balanced_vertex_choice(t).and_then(|v| geom::mirror_vertex(t, v)) {
                Ok(md) => !geom::is_balanced(&md),
                Err(_) => true,
            }
        })
        .collect();
    checks.push(Check {
        name: "balanced_vertex",
        passed: unbalanced.is_empty(),
        detail: if unbalanced.is_empty() {
            "every triangle has a balanced mirror vertex".into()
        } else {
            format!("{} triangles without one", unbalanced.len())
        },
    });

    ValidationReport { checks }
}
