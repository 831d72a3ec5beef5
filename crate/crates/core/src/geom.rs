//! Oriented plane triangles, triangle bivectors, mirror vertices and the
//! balanced-vertex criterion.
//!
//! For the ordered triangle `[a, b, c]` the sides are `l_a = c - b`,
//! `l_b = a - c`, `l_c = b - a`, so `l_a + l_b + l_c = 0`. For a vertex `x`
//! the next two vertices in cyclic order are `x_+` and `x_-`, and `l_x` is the
//! side opposite `x`, running from `x_+` to `x_-`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::ga::{self, Multivector};

/// A triangle is degenerate when `|<a;b;c>| <= DEGENERACY_EPS · diam²`.
pub const DEGENERACY_EPS: f64 = 1e-12;

/// Slack on the foot parameter `tau ∈ [0, 1]`.
pub const BALANCE_EPS: f64 = 1e-12;

/// A point (or free vector) of the plane in the basis `{e1, e2}`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// `(self ∧ o)·I_2`.
    pub fn wedge(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn midpoint(self, o: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn to_multivector(self) -> Multivector {
        Multivector::vector(&[self.x, self.y]).expect("dimension 2 is valid")
    }

    pub fn from_multivector(v: &Multivector) -> Result<Point2> {
        if v.dim() != 2 {
            return Err(Error::WrongDimension { expected: 2, got: v.dim() });
        }
        Ok(Point2::new(v.coeff(1), v.coeff(2)))
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    fn mul(self, p: Point2) -> Point2 {
        p * self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    A,
    B,
    C,
}

impl Vertex {
    pub const ALL: [Vertex; 3] = [Vertex::A, Vertex::B, Vertex::C];

    pub fn label(self) -> char {
        match self {
            Vertex::A => 'A',
            Vertex::B => 'B',
            Vertex::C => 'C',
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedTriangle2 {
    pub a: Point2,
    pub b: Point2,
    pub c: Point2,
}

impl OrientedTriangle2 {
    pub const fn new(a: Point2, b: Point2, c: Point2) -> Self {
        OrientedTriangle2 { a, b, c }
    }

    pub fn vertex(&self, v: Vertex) -> Point2 {
        match v {
            Vertex::A => self.a,
            Vertex::B => self.b,
            Vertex::C => self.c,
        }
    }

    /// `(l_a, l_b, l_c)`.
    pub fn sides(&self) -> (Point2, Point2, Point2) {
        (self.c - self.b, self.a - self.c, self.b - self.a)
    }

    /// Side opposite `v`.
    pub fn side(&self, v: Vertex) -> Point2 {
        let (la, lb, lc) = self.sides();
        match v {
            Vertex::A => la,
            Vertex::B => lb,
            Vertex::C => lc,
        }
    }

    /// `<a;b;c>·I_2`, twice the signed area.
    pub fn bivector_scalar(&self) -> f64 {
        (self.b - self.a).wedge(self.c - self.a)
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * self.bivector_scalar()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Longest side length.
    pub fn diameter(&self) -> f64 {
        let (la, lb, lc) = self.sides();
        la.norm().max(lb.norm()).max(lc.norm())
    }

    pub fn is_degenerate(&self) -> bool {
        let d = self.diameter();
        !(self.a.is_finite() && self.b.is_finite() && self.c.is_finite())
            || self.bivector_scalar().abs() <= DEGENERACY_EPS * d * d
    }

    /// Cyclic relabeling so that `v` becomes the first vertex. Orientation
    /// is preserved.
    pub fn rotated_to(&self, v: Vertex) -> OrientedTriangle2 {
        match v {
            Vertex::A => *self,
            Vertex::B => OrientedTriangle2::new(self.b, self.c, self.a),
            Vertex::C => OrientedTriangle2::new(self.c, self.a, self.b),
        }
    }

    /// Same vertex set with the opposite orientation `[a, c, b]`.
    pub fn reversed(&self) -> OrientedTriangle2 {
        OrientedTriangle2::new(self.a, self.c, self.b)
    }

    pub fn translated(&self, t: Point2) -> OrientedTriangle2 {
        OrientedTriangle2::new(self.a + t, self.b + t, self.c + t)
    }

    pub fn centroid(&self) -> Point2 {
        Point2::new((self.a.x + self.b.x + self.c.x) / 3.0, (self.a.y + self.b.y + self.c.y) / 3.0)
    }

    pub fn vertices(&self) -> [Point2; 3] {
        [self.a, self.b, self.c]
    }
}

/// Mirror vertex data for one vertex `x` of an oriented triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MirrorData {
    pub vertex: Vertex,
    /// `x'`, reflection of `x` across the line of the opposite side.
    pub x_prime: Point2,
    /// `(x' + x) / 2`, the foot of the altitude from `x`.
    pub x_bar: Point2,
    /// `(x' - x) / 2`.
    pub u: Point2,
    /// `x_- - x_bar`.
    pub v: Point2,
    /// `v = tau · l_x`.
    pub tau: f64,
    /// `l_x`, the side opposite `x`.
    pub side: Point2,
    pub x: Point2,
    pub x_plus: Point2,
    pub x_minus: Point2,
}

impl MirrorData {
    /// Triangle `[x', x_+, x_-]` obtained by reflecting `x`.
    pub fn reflected_triangle(&self) -> OrientedTriangle2 {
        OrientedTriangle2::new(self.x_prime, self.x_plus, self.x_minus)
    }

    /// `max{|v_x|/|l_x|, |l_x - v_x|/|l_x|}`; at most 1 exactly when balanced.
    pub fn balance_ratio(&self) -> f64 {
        let l = self.side.norm();
        (self.v.norm() / l).max((self.side - self.v).norm() / l)
    }

    /// Length form of the balance test: `|l_x| = |l_x - v_x| + |v_x|`,
    /// checked with relative slack `rtol`.
    pub fn is_balanced_by_lengths(&self, rtol: f64) -> bool {
        let l = self.side.norm();
        ((self.side - self.v).norm() + self.v.norm() - l).abs() <= rtol * l
    }
}

/// Reflection `v x v⁻¹ = 2 (x·v / |v|²) v - x` in any dimension.
pub fn reflect_point(x: &Multivector, v: &Multivector) -> Result<Multivector> {
    let vv = ga::scalar_product(v, v)?;
    if vv == 0.0 {
        return Err(Error::ZeroVector);
    }
    let xv = ga::scalar_product(x, v)?;
    v.scale(2.0 * xv / vv).checked_sub(x)
}

/// `<a;b;c> = a∧b + b∧c + c∧a`, evaluated as `(b - a)∧(c - a)`.
pub fn triangle_bivector(a: &Multivector, b: &Multivector, c: &Multivector) -> Result<Multivector> {
    ga::outer_product(&b.checked_sub(a)?, &c.checked_sub(a)?)
}

/// `½ |<a;b;c>|`.
pub fn area(a: &Multivector, b: &Multivector, c: &Multivector) -> Result<f64> {
    Ok(0.5 * ga::norm(&triangle_bivector(a, b, c)?))
}

/// `½ sqrt(|l_a|²|l_b|² - (l_a·l_b)²)`, the side-vector route to [`area`].
pub fn area_from_sides(a: &Multivector, b: &Multivector, c: &Multivector) -> Result<f64> {
    let la = c.checked_sub(b)?;
    let lb = a.checked_sub(c)?;
    let aa = ga::scalar_product(&la, &la)?;
    let bb = ga::scalar_product(&lb, &lb)?;
    let ab = ga::scalar_product(&la, &lb)?;
    Ok(0.5 * (aa * bb - ab * ab).max(0.0).sqrt())
}

/// Mirror vertex of `which` using the linear-combination form
/// `x' = -[x + 2 x_+ (l_{x+}·l_x)/|l_x|² + 2 x_- (l_{x-}·l_x)/|l_x|²]`.
pub fn mirror_vertex(t: &OrientedTriangle2, which: Vertex) -> Result<MirrorData> {
    if t.is_degenerate() {
        return Err(Error::DegenerateTriangle);
    }
    let r = t.rotated_to(which);
    let (x, xp, xm) = (r.a, r.b, r.c);
    let (lx, lxp, lxm) = r.sides();
    let l2 = lx.norm2();
    let x_prime = -(x + xp * (2.0 * lxp.dot(lx) / l2) + xm * (2.0 * lxm.dot(lx) / l2));
    let x_bar = x_prime.midpoint(x);
    let u = (x_prime - x) * 0.5;
    let v = xm - x_bar;
    let tau = v.dot(lx) / l2;
    Ok(MirrorData { vertex: which, x_prime, x_bar, u, v, tau, side: lx, x, x_plus: xp, x_minus: xm })
}

pub fn is_balanced(md: &MirrorData) -> bool {
    md.tau >= -BALANCE_EPS && md.tau <= 1.0 + BALANCE_EPS
}

/// Vertex opposite a longest side; ties resolve in the order A, B, C.
pub fn balanced_vertex_choice(t: &OrientedTriangle2) -> Result<Vertex> {
    if t.is_degenerate() {
        return Err(Error::DegenerateTriangle);
    }
    let mut best = Vertex::A;
    let mut best_len = t.side(Vertex::A).norm();
    for v in [Vertex::B, Vertex::C] {
        let len = t.side(v).norm();
        if len > best_len {
            best = v;
            best_len = len;
        }
    }
    Ok(best)
}
