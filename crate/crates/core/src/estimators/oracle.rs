//! Adaptive quadrature of `|∂_1 s ∧ ∂_2 s|` over a polygon, used as the
//! reference value for the area estimators.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use super::compensated_sum;
use crate::error::{Error, Result};
use crate::ga;
use crate::geom::{OrientedTriangle2, Point2};
use crate::partition::{triangulate, Polygon2};
use crate::surfaces::Surface;

/// Upper bound on bisections before giving up.
pub const ORACLE_MAX_SPLITS: usize = 400_000;

const GL_ORDER: usize = 7;

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 0 { 0.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// Tensor rule on the collapsed square `p = a + ξ(b - a) + ξη(c - b)`.
fn triangle_rule<F>(f: &F, t: &OrientedTriangle2) -> Result<f64>
where
    F: Fn(Point2) -> Result<f64>,
{
    let jac = (t.b - t.a).wedge(t.c - t.b).abs();
    let mut terms = Vec::with_capacity(GL_ORDER * GL_ORDER);
    for &(xi, wi) in rule() {
        let xi = 0.5 * (xi + 1.0);
        for &(eta, wj) in rule() {
            let eta = 0.5 * (eta + 1.0);
            let p = t.a + (t.b - t.a) * xi + (t.c - t.b) * (xi * eta);
            terms.push(0.25 * wi * wj * xi * f(p)?);
        }
    }
    Ok(jac * compensated_sum(terms))
}

/// Splits at the midpoint of the longest side.
fn bisect(t: &OrientedTriangle2) -> (OrientedTriangle2, OrientedTriangle2) {
    let (la, lb, lc) = t.sides();
    let (na, nb, nc) = (la.norm2(), lb.norm2(), lc.norm2());
    // rotate so the longest side is b-c
    let r = if na >= nb && na >= nc {
        *t
    } else if nb >= nc {
        OrientedTriangle2::new(t.b, t.c, t.a)
    } else {
        OrientedTriangle2::new(t.c, t.a, t.b)
    };
    let m = r.b.midpoint(r.c);
    (OrientedTriangle2::new(r.a, r.b, m), OrientedTriangle2::new(r.a, m, r.c))
}

struct Piece {
    tri: OrientedTriangle2,
    /// Two-child estimate.
    value: f64,
    err: f64,
    seq: usize,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.seq.cmp(&self.seq))
    }
}

fn make_piece<F>(f: &F, tri: OrientedTriangle2, seq: usize) -> Result<Piece>
where
    F: Fn(Point2) -> Result<f64>,
{
    let coarse = triangle_rule(f, &tri)?;
    let (t1, t2) = bisect(&tri);
    let value = triangle_rule(f, &t1)? + triangle_rule(f, &t2)?;
    Ok(Piece { tri, value, err: (coarse - value).abs(), seq })
}

/// Globally adaptive integration of `f` over `poly`, refined until the
/// summed error estimate drops below `rtol · |I|`. Deterministic.
pub fn integrate_over_polygon<F>(f: F, poly: &Polygon2, rtol: f64) -> Result<f64>
where
    F: Fn(Point2) -> Result<f64>,
{
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    for t in triangulate(poly)?.triangles() {
        heap.push(make_piece(&f, *t, seq)?);
        seq += 1;
    }
    let mut splits = 0usize;
    loop {
        let total = compensated_sum(heap.iter().map(|p| (p.seq, p.value)).collect::<std::collections::BTreeMap<_, _>>().into_values());
        let err: f64 = heap.iter().map(|p| p.err).sum();
        if err <= rtol * total.abs() || err == 0.0 {
            return Ok(total);
        }
        if splits >= ORACLE_MAX_SPLITS {
            return Err(Error::QuadratureNotConverged { best: total, err_est: err });
        }
        // split the worst pieces in a batch to amortize the bookkeeping
        let batch = (heap.len() / 8).max(1);
        for _ in 0..batch {
            let Some(worst) = heap.pop() else { break };
            let (t1, t2) = bisect(&worst.tri);
            heap.push(make_piece(&f, t1, seq)?);
            heap.push(make_piece(&f, t2, seq + 1)?);
            seq += 2;
            splits += 1;
        }
    }
}

/// `∫_P |∂_1 s(x) ∧ ∂_2 s(x)| dx`.
pub fn area_integral_oracle(s: &Surface, poly: &Polygon2, rtol: f64) -> Result<f64> {
    integrate_over_polygon(|x| Ok(ga::norm(&s.tangent_bivector(x)?)), poly, rtol)
}
