//! Parametric surfaces `s: Ω ⊂ E_2 → E_n`, plane transformations and the
//! built-in registry.
//!
//! Registry grammar:
//!
//! ```text
//! cylinder(rho=<float>) | flat | graph(<expr>) | custom(<expr>,<expr>,<expr>)
//! ```
//!
//! and for plane transformations `identity | custom(<expr>,<expr>)`, where
//! `<expr>` is an [`expr`](crate::expr) expression in `u`, `v`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::ga::{self, Multivector};
use crate::geom::{OrientedTriangle2, Point2};

type EvalFn = dyn Fn(Point2) -> Result<Vec<f64>> + Send + Sync;
type PartialsFn = dyn Fn(Point2) -> Result<(Vec<f64>, Vec<f64>)> + Send + Sync;

/// Relative finite-difference step: `h = FD_STEP · max(1, |x|)`.
pub const FD_STEP: f64 = 1e-5;

/// Open parameter domain.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum Domain {
    #[default]
    Plane,
    /// Open rectangle `(x0, x1) × (y0, y1)`.
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
}

impl Domain {
    pub fn contains(&self, p: Point2) -> bool {
        match *self {
            Domain::Plane => p.is_finite(),
            Domain::Rect { x0, y0, x1, y1 } => p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1,
        }
    }

    /// Both domain kinds are convex, so checking the vertices suffices.
    pub fn contains_triangle(&self, t: &OrientedTriangle2) -> bool {
        t.vertices().iter().all(|p| self.contains(*p))
    }

    pub fn check(&self, p: Point2) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::DomainViolation { x: p.x, y: p.y })
        }
    }
}

/// A differentiable map from an open subset of the plane into `E_n`.
#[derive(Clone)]
pub struct Surface {
    name: String,
    dim: usize,
    domain: Domain,
    eval: Arc<EvalFn>,
    partials: Option<Arc<PartialsFn>>,
}

impl fmt::Debug for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Surface")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .field("analytic_partials", &self.partials.is_some())
            .finish()
    }
}

fn central_difference<F>(f: F, x: Point2) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(Point2) -> Result<Vec<f64>>,
{
    let h = FD_STEP * x.norm().max(1.0);
    let diff = |d: Point2| -> Result<Vec<f64>> {
        let plus = f(x + d)?;
        let minus = f(x - d)?;
        Ok(plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect())
    };
    Ok((diff(Point2::new(h, 0.0))?, diff(Point2::new(0.0, h))?))
}

impl Surface {
    pub fn new<F>(name: impl Into<String>, dim: usize, eval: F) -> Result<Surface>
    where
        F: Fn(Point2) -> Result<Vec<f64>> + Send + Sync + 'static,
    {
        if !(2..=ga::MAX_DIM).contains(&dim) {
            return Err(Error::DimensionOutOfRange(dim));
        }
        Ok(Surface { name: name.into(), dim, domain: Domain::Plane, eval: Arc::new(eval), partials: None })
    }

    /// Attaches analytic `(∂_1 s, ∂_2 s)` component vectors.
    pub fn with_partials<F>(mut self, partials: F) -> Surface
    where
        F: Fn(Point2) -> Result<(Vec<f64>, Vec<f64>)> + Send + Sync + 'static,
    {
        self.partials = Some(Arc::new(partials));
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Surface {
        self.domain = domain;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.partials.is_some()
    }

    /// Component values `σ_j(x)`.
    pub fn components(&self, x: Point2) -> Result<Vec<f64>> {
        self.domain.check(x)?;
        let out = (self.eval)(x)?;
        if out.len() != self.dim {
            return Err(Error::WrongDimension { expected: self.dim, got: out.len() });
        }
        Ok(out)
    }

    pub fn eval(&self, x: Point2) -> Result<Multivector> {
        Multivector::vector(&self.components(x)?)
    }

    /// Central-difference partials, ignoring any analytic ones.
    pub fn fd_partials(&self, x: Point2) -> Result<(Multivector, Multivector)> {
        self.domain.check(x)?;
        let f = |p: Point2| self.components(p);
        let (d1, d2) = central_difference(f, x)?;
        Ok((Multivector::vector(&d1)?, Multivector::vector(&d2)?))
    }

    /// `(∂_1 s(x), ∂_2 s(x))`, analytic when available.
    pub fn partials(&self, x: Point2) -> Result<(Multivector, Multivector)> {
        match &self.partials {
            Some(p) => {
                self.domain.check(x)?;
                let (d1, d2) = p(x)?;
                Ok((Multivector::vector(&d1)?, Multivector::vector(&d2)?))
            }
            None => self.fd_partials(x),
        }
    }

    /// `∂_1 s(x) ∧ ∂_2 s(x)`.
    pub fn tangent_bivector(&self, x: Point2) -> Result<Multivector> {
        let (d1, d2) = self.partials(x)?;
        ga::outer_product(&d1, &d2)
    }

    /// `s_{j,k}(x) = σ_j(x) e1 + σ_k(x) e2`, with 1-based `j < k`.
    pub fn component_transform(&self, j: usize, k: usize) -> Result<PlaneTransform> {
        if !(1 <= j && j < k && k <= self.dim) {
            return Err(Error::IndexOutOfRange(format!("({j}, {k}) for dimension {}", self.dim)));
        }
        let (j0, k0) = (j - 1, k - 1);
        let eval = self.eval.clone();
        let mut s = Surface::new(format!("{}[{j},{k}]", self.name), 2, move |x| {
            let c = eval(x)?;
            Ok(vec![c[j0], c[k0]])
        })?
        .with_domain(self.domain);
        if let Some(p) = self.partials.clone() {
            s = s.with_partials(move |x| {
                let (d1, d2) = p(x)?;
                Ok((vec![d1[j0], d1[k0]], vec![d2[j0], d2[k0]]))
            });
        }
        Ok(PlaneTransform(s))
    }
}

/// A smooth map `f: Ω → E_2`.
#[derive(Clone, Debug)]
pub struct PlaneTransform(Surface);

impl PlaneTransform {
    pub fn new<F>(name: impl Into<String>, eval: F) -> PlaneTransform
    where
        F: Fn(Point2) -> Result<Point2> + Send + Sync + 'static,
    {
        PlaneTransform(
            Surface::new(name, 2, move |x| eval(x).map(|p| vec![p.x, p.y])).expect("dimension 2"),
        )
    }

    /// Attaches analytic gradients `(∇φ1, ∇φ2)`.
    pub fn with_gradients<F>(self, grads: F) -> PlaneTransform
    where
        F: Fn(Point2) -> Result<(Point2, Point2)> + Send + Sync + 'static,
    {
        // surface partials are the columns of the Jacobian matrix
        PlaneTransform(self.0.with_partials(move |x| {
            let (g1, g2) = grads(x)?;
            Ok((vec![g1.x, g2.x], vec![g1.y, g2.y]))
        }))
    }

    pub fn with_domain(self, domain: Domain) -> PlaneTransform {
        PlaneTransform(self.0.with_domain(domain))
    }

    pub fn identity() -> PlaneTransform {
        PlaneTransform::new("identity", Ok)
            .with_gradients(|_| Ok((Point2::new(1.0, 0.0), Point2::new(0.0, 1.0))))
    }

    /// `x ↦ M x + t` with `M = [[m11, m12], [m21, m22]]`.
    pub fn affine(m: [[f64; 2]; 2], t: Point2) -> PlaneTransform {
        PlaneTransform::new("affine", move |x| {
            Ok(Point2::new(m[0][0] * x.x + m[0][1] * x.y + t.x, m[1][0] * x.x + m[1][1] * x.y + t.y))
        })
        .with_gradients(move |_| Ok((Point2::new(m[0][0], m[0][1]), Point2::new(m[1][0], m[1][1]))))
    }

    pub fn from_exprs(e1: Expr, e2: Expr) -> PlaneTransform {
        let s = expr_surface("custom", vec![e1, e2]).expect("dimension 2");
        PlaneTransform(s)
    }

    pub fn as_surface(&self) -> &Surface {
        &self.0
    }

    pub fn name(&self) -> &str {
        self.0.name()
    }

    pub fn domain(&self) -> Domain {
        self.0.domain()
    }

    pub fn eval(&self, x: Point2) -> Result<Point2> {
        let c = self.0.components(x)?;
        Ok(Point2::new(c[0], c[1]))
    }

    /// `(∇φ1(x), ∇φ2(x))`.
    pub fn gradients(&self, x: Point2) -> Result<(Point2, Point2)> {
        let (d1, d2) = self.0.partials(x)?;
        Ok((Point2::new(d1.coeff(1), d2.coeff(1)), Point2::new(d1.coeff(2), d2.coeff(2))))
    }

    /// `(∇φ1 ∧ ∇φ2)·I_2`.
    pub fn jacobian(&self, x: Point2) -> Result<f64> {
        let (g1, g2) = self.gradients(x)?;
        Ok(g1.wedge(g2))
    }
}

/// A scalar field `ψ` with gradient, used for graph surfaces.
#[derive(Clone)]
pub struct ScalarField {
    value: Arc<dyn Fn(Point2) -> Result<f64> + Send + Sync>,
    gradient: Arc<dyn Fn(Point2) -> Result<Point2> + Send + Sync>,
    name: String,
}

impl ScalarField {
    pub fn new<F, G>(name: impl Into<String>, value: F, gradient: G) -> ScalarField
    where
        F: Fn(Point2) -> Result<f64> + Send + Sync + 'static,
        G: Fn(Point2) -> Result<Point2> + Send + Sync + 'static,
    {
        ScalarField { value: Arc::new(value), gradient: Arc::new(gradient), name: name.into() }
    }

    /// Field given by an expression; the gradient is symbolic.
    pub fn from_expr(e: Expr) -> ScalarField {
        let (du, dv) = expr::gradient(&e);
        let name = e.to_string();
        ScalarField::new(
            name,
            move |x| Ok(e.eval(x.x, x.y)?),
            move |x| Ok(Point2::new(du.eval(x.x, x.y)?, dv.eval(x.x, x.y)?)),
        )
    }

    pub fn value(&self, x: Point2) -> Result<f64> {
        (self.value)(x)
    }

    pub fn gradient(&self, x: Point2) -> Result<Point2> {
        (self.gradient)(x)
    }
}

/// `s(x) = ρ cos(χ1) h1 + ρ sin(χ1) h2 + χ2 h3`.
pub fn make_cylinder(rho: f64) -> Result<Surface> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidArgument(format!("cylinder radius must be positive, got {rho}")));
    }
    Ok(Surface::new(format!("cylinder(rho={rho})"), 3, move |x| {
        Ok(vec![rho * x.x.cos(), rho * x.x.sin(), x.y])
    })?
    .with_partials(move |x| {
        Ok((vec![-rho * x.x.sin(), rho * x.x.cos(), 0.0], vec![0.0, 0.0, 1.0]))
    }))
}

/// The plane embedded in `E_3`: `s(x) = χ1 h1 + χ2 h2`.
pub fn make_flat() -> Surface {
    Surface::new("flat", 3, |x| Ok(vec![x.x, x.y, 0.0]))
        .expect("dimension 3")
        .with_partials(|_| Ok((vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0])))
}

/// `s(x) = x + ψ(x) h3`.
pub fn make_graph(psi: ScalarField) -> Surface {
    let name = format!("graph({})", psi.name);
    let value = psi.clone();
    Surface::new(name, 3, move |x| Ok(vec![x.x, x.y, value.value(x)?]))
        .expect("dimension 3")
        .with_partials(move |x| {
            let g = psi.gradient(x)?;
            Ok((vec![1.0, 0.0, g.x], vec![0.0, 1.0, g.y]))
        })
}

/// Affine surface `s(x) = o + χ1 d1 + χ2 d2` in `E_n`.
pub fn make_affine(origin: &[f64], d1: &[f64], d2: &[f64]) -> Result<Surface> {
    let n = origin.len();
    if d1.len() != n || d2.len() != n {
        return Err(Error::InvalidArgument("affine surface columns differ in length".into()));
    }
    let (o, a, b) = (origin.to_vec(), d1.to_vec(), d2.to_vec());
    let (pa, pb) = (a.clone(), b.clone());
    Ok(Surface::new("affine", n, move |x| {
        Ok((0..n).map(|j| o[j] + x.x * a[j] + x.y * b[j]).collect())
    })?
    .with_partials(move |_| Ok((pa.clone(), pb.clone()))))
}

fn expr_surface(kind: &str, exprs: Vec<Expr>) -> Result<Surface> {
    let grads: Vec<(Expr, Expr)> = exprs.iter().map(expr::gradient).collect();
    let name = format!(
        "{kind}({})",
        exprs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
    );
    let n = exprs.len();
    Ok(Surface::new(name, n, move |x| {
        exprs.iter().map(|e| Ok(e.eval(x.x, x.y)?)).collect()
    })?
    .with_partials(move |x| {
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        for (du, dv) in &grads {
            d1.push(du.eval(x.x, x.y)?);
            d2.push(dv.eval(x.x, x.y)?);
        }
        Ok((d1, d2))
    }))
}

/// Surface with one expression per component, 2 to 8 components.
pub fn make_custom(exprs: Vec<Expr>) -> Result<Surface> {
    expr_surface("custom", exprs)
}

/// Splits `name(args)` into `name` and the top-level comma-separated args.
fn split_call(spec: &str) -> Option<(&str, Vec<&str>)> {
    let spec = spec.trim();
    let open = spec.find('(')?;
    if !spec.ends_with(')') {
        return None;
    }
    let name = spec[..open].trim();
    let inner = &spec[open + 1..spec.len() - 1];
    let mut args = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                args.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    args.push(&inner[start..]);
    Some((name, args))
}

fn bad_spec(spec: &str, why: &str) -> Error {
    Error::InvalidArgument(format!("surface spec `{spec}`: {why}"))
}

/// Builds a surface from its registry name.
pub fn parse_surface(spec: &str) -> Result<Surface> {
    let trimmed = spec.trim();
    if trimmed == "flat" {
        return Ok(make_flat());
    }
    let (name, args) =
        split_call(trimmed).ok_or_else(|| bad_spec(spec, "expected `name(...)` or `flat`"))?;
    match name {
        "cylinder" => {
            let [arg] = args.as_slice() else {
                return Err(bad_spec(spec, "cylinder takes one argument `rho=<float>`"));
            };
            let value = arg
                .trim()
                .strip_prefix("rho")
                .map(str::trim_start)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| bad_spec(spec, "expected `rho=<float>`"))?;
            let rho: f64 = value.trim().parse().map_err(|_| bad_spec(spec, "rho is not a number"))?;
            make_cylinder(rho)
        }
        "graph" => {
            let [arg] = args.as_slice() else {
                return Err(bad_spec(spec, "graph takes one expression"));
            };
            Ok(make_graph(ScalarField::from_expr(expr::parse(arg)?)))
        }
        "custom" => {
            if args.len() != 3 {
                return Err(bad_spec(spec, "custom takes three expressions"));
            }
            let exprs = args.iter().map(|a| expr::parse(a)).collect::<Result<Vec<_>, _>>()?;
            make_custom(exprs)
        }
        _ => Err(bad_spec(spec, "unknown surface kind")),
    }
}

/// Builds a plane transformation: `identity` or `custom(<expr>,<expr>)`.
pub fn parse_transform(spec: &str) -> Result<PlaneTransform> {
    let trimmed = spec.trim();
    if trimmed == "identity" {
        return Ok(PlaneTransform::identity());
    }
    match split_call(trimmed) {
        Some(("custom", args)) if args.len() == 2 => {
            Ok(PlaneTransform::from_exprs(expr::parse(args[0])?, expr::parse(args[1])?))
        }
        _ => Err(Error::InvalidArgument(format!(
            "transform spec `{spec}`: expected `identity` or `custom(<expr>,<expr>)`"
        ))),
    }
}
