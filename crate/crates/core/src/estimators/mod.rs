//! Inscribed-triangle estimators of Jacobian determinants, tangent bivectors
//! and surface area.
//!
//! For an oriented plane triangle `[a, b, c]` whose vertex `a` has a balanced
//! mirror vertex `a'`, the balanced mean bivector of a surface `s` is
//!
//! ```text
//! [s(a') - s(a)] ∧ [s(c) - s(b)] / (2 <a;b;c>·I_2)
//! ```
//!
//! It tends to `∂_1 s(x) ∧ ∂_2 s(x)` for every family of nondegenerate
//! triangles shrinking to `x`, unlike the inscribed mean bivector
//! `<s(a);s(b);s(c)> / (<a;b;c>·I_2)`, which Schwarz-type triangle families
//! defeat. Summing `¼ |[s(a') - s(a)] ∧ [s(c) - s(b)]|` over a partition
//! converges to the area integral of `|∂_1 s ∧ ∂_2 s|`.

mod oracle;
mod study;

pub use oracle::{area_integral_oracle, gauss_legendre, integrate_over_polygon, ORACLE_MAX_SPLITS};
pub use study::{convergence_study, loglog_fit, EstimateRow, EstimateTable, Order, StudyPoint};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ga::{self, Multivector};
use crate::geom::{self, MirrorData, OrientedTriangle2, Point2, Vertex};
use crate::partition::Partition;
use crate::surfaces::{PlaneTransform, Surface};

/// Default bound for the relaxed balance test.
pub const DEFAULT_KAPPA: f64 = 4.0;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EstimatorOptions {
    /// When set, an unbalanced vertex is accepted if
    /// `max{|v|/|l|, |l - v|/|l|} <= kappa`.
    pub relaxed_kappa: Option<f64>,
}

impl EstimatorOptions {
    pub fn relaxed(kappa: f64) -> Self {
        EstimatorOptions { relaxed_kappa: Some(kappa) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BivectorEstimate {
    pub value: Multivector,
    pub triangle: OrientedTriangle2,
    pub mirror: MirrorData,
    /// `2 <a;b;c>·I_2`.
    pub plane_bivector_scalar: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedEstimate {
    pub value: Multivector,
    /// `max{|v|/|l_a|, |l_a - v|/|l_a|}` with `v = c - (a + d)/2`.
    pub ratio: f64,
    /// `(<a;b;c> - <d;b;c>)·I_2`.
    pub denominator: f64,
}

/// Neumaier-compensated sum in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn accept_mirror(md: &MirrorData, opts: &EstimatorOptions) -> Result<()> {
    if geom::is_balanced(md) {
        return Ok(());
    }
    match opts.relaxed_kappa {
        Some(kappa) => {
            let ratio = md.balance_ratio();
            if ratio <= kappa {
                Ok(())
            } else {
                Err(Error::RelaxedBoundExceeded { ratio, kappa })
            }
        }
        None => Err(Error::Unbalanced { vertex: md.vertex.label(), tau: md.tau }),
    }
}

fn check_triangle_in_domain(s: &Surface, t: &OrientedTriangle2) -> Result<()> {
    for p in t.vertices() {
        s.domain().check(p)?;
    }
    Ok(())
}

/// Validated mirror data for the estimators: nondegenerate, balanced (or
/// within the relaxed bound) and with both triangles inside the domain.
fn prepared_mirror(
    s: &Surface,
    t: &OrientedTriangle2,
    which: Vertex,
    opts: &EstimatorOptions,
) -> Result<MirrorData> {
    let md = geom::mirror_vertex(t, which)?;
    accept_mirror(&md, opts)?;
    check_triangle_in_domain(s, t)?;
    check_triangle_in_domain(s, &md.reflected_triangle())?;
    Ok(md)
}

/// `[s(x') - s(x)] ∧ [s(x_-) - s(x_+)]`.
pub fn balanced_numerator(s: &Surface, md: &MirrorData) -> Result<Multivector> {
    let rise = s.eval(md.x_prime)?.checked_sub(&s.eval(md.x)?)?;
    let chord = s.eval(md.x_minus)?.checked_sub(&s.eval(md.x_plus)?)?;
    ga::outer_product(&rise, &chord)
}

/// `<s(x);s(x_+);s(x_-)> - <s(x');s(x_+);s(x_-)>`, the same numerator
/// written as a difference of inscribed triangle bivectors.
pub fn balanced_numerator_via_triangles(s: &Surface, md: &MirrorData) -> Result<Multivector> {
    let (x, xp, xm, xq) = (s.eval(md.x)?, s.eval(md.x_plus)?, s.eval(md.x_minus)?, s.eval(md.x_prime)?);
    geom::triangle_bivector(&x, &xp, &xm)?.checked_sub(&geom::triangle_bivector(&xq, &xp, &xm)?)
}

/// Inscribed mean bivector `<s(a);s(b);s(c)> / (<a;b;c>·I_2)`.
pub fn mean_bivector_naive(s: &Surface, t: &OrientedTriangle2) -> Result<Multivector> {
    if t.is_degenerate() {
        return Err(Error::DegenerateTriangle);
    }
    let num = geom::triangle_bivector(&s.eval(t.a)?, &s.eval(t.b)?, &s.eval(t.c)?)?;
    Ok(num.scale(1.0 / t.bivector_scalar()))
}

/// Inscribed balanced mean bivector at vertex `which`.
pub fn balanced_mean_bivector(
    s: &Surface,
    t: &OrientedTriangle2,
    which: Vertex,
    opts: &EstimatorOptions,
) -> Result<BivectorEstimate> {
    let md = prepared_mirror(s, t, which, opts)?;
    let denom = 2.0 * t.bivector_scalar();
    let value = balanced_numerator(s, &md)?.scale(1.0 / denom);
    Ok(BivectorEstimate { value, triangle: *t, mirror: md, plane_bivector_scalar: denom })
}

/// Jacobian determinant estimate
/// `{[f(a') - f(a)] ∧ [f(c) - f(b)]}·I_2 / (2 <a;b;c>·I_2)`.
pub fn jacobian_estimate(
    f: &PlaneTransform,
    t: &OrientedTriangle2,
    which: Vertex,
    opts: &EstimatorOptions,
) -> Result<f64> {
    let md = prepared_mirror(f.as_surface(), t, which, opts)?;
    let rise = f.eval(md.x_prime)? - f.eval(md.x)?;
    let chord = f.eval(md.x_minus)? - f.eval(md.x_plus)?;
    Ok(rise.wedge(chord) / (2.0 * t.bivector_scalar()))
}

/// Balanced-style quotient with an arbitrary fourth point `d` in place of the
/// mirror vertex of `a`:
/// `[<s(a);s(b);s(c)> - <s(d);s(b);s(c)>] / ([<a;b;c> - <d;b;c>]·I_2)`.
///
/// The balance ratio is always reported; it is enforced only when
/// `opts.relaxed_kappa` is set.
pub fn generalized_balanced_bivector(
    s: &Surface,
    t: &OrientedTriangle2,
    d: Point2,
    opts: &EstimatorOptions,
) -> Result<GeneralizedEstimate> {
    let denom_tri = OrientedTriangle2::new(d, t.b, t.c);
    let denominator = t.bivector_scalar() - denom_tri.bivector_scalar();
    let scale = t.diameter().max((d - t.a).norm()).max((d - t.b).norm());
    if denominator.is_nan() || denominator.abs() <= geom::DEGENERACY_EPS * scale * scale {
        return Err(Error::ZeroDenominator);
    }
    let side = t.side(Vertex::A);
    let v = t.c - t.a.midpoint(d);
    let l = side.norm();
    let ratio = (v.norm() / l).max((side - v).norm() / l);
    if let Some(kappa) = opts.relaxed_kappa {
        if ratio > kappa {
            return Err(Error::RelaxedBoundExceeded { ratio, kappa });
        }
    }
    check_triangle_in_domain(s, t)?;
    s.domain().check(d)?;
    let (sa, sb, sc, sd) = (s.eval(t.a)?, s.eval(t.b)?, s.eval(t.c)?, s.eval(d)?);
    let num = geom::triangle_bivector(&sa, &sb, &sc)?.checked_sub(&geom::triangle_bivector(&sd, &sb, &sc)?)?;
    Ok(GeneralizedEstimate { value: num.scale(1.0 / denominator), ratio, denominator })
}

/// `¼ |[s(a') - s(a)] ∧ [s(c) - s(b)]|` for the diameter vertex of `t`.
pub fn balanced_area_term(s: &Surface, t: &OrientedTriangle2, opts: &EstimatorOptions) -> Result<f64> {
    let which = geom::balanced_vertex_choice(t)?;
    let md = prepared_mirror(s, t, which, opts)?;
    Ok(0.25 * ga::norm(&balanced_numerator(s, &md)?))
}

/// `½ |<s(a);s(b);s(c)>|`.
pub fn naive_area_term(s: &Surface, t: &OrientedTriangle2) -> Result<f64> {
    if t.is_degenerate() {
        return Err(Error::DegenerateTriangle);
    }
    geom::area(&s.eval(t.a)?, &s.eval(t.b)?, &s.eval(t.c)?)
}

/// Evaluates per-triangle terms (possibly in parallel) and reduces them in
/// partition order, so the result does not depend on the worker count.
fn ordered_reduce<F>(p: &Partition, term: F) -> Result<f64>
where
    F: Fn(&OrientedTriangle2) -> Result<f64> + Sync,
{
    let terms: Vec<Result<f64>> = p.triangles().par_iter().map(&term).collect();
    let mut values = Vec::with_capacity(terms.len());
    for t in terms {
        values.push(t?);
    }
    Ok(compensated_sum(values))
}

/// Balanced area sum over a partition; each triangle is relabeled so its
/// diameter vertex plays the role of `a`.
pub fn area_estimate_balanced(s: &Surface, p: &Partition, opts: &EstimatorOptions) -> Result<f64> {
    ordered_reduce(p, |t| balanced_area_term(s, t, opts))
}

/// Classical inscribed-polyhedron area `Σ ½ |<s(a);s(b);s(c)>|`.
pub fn area_estimate_naive(s: &Surface, p: &Partition) -> Result<f64> {
    ordered_reduce(p, |t| naive_area_term(s, t))
}
