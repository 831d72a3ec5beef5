//! C interface to `gasurf`.
//!
//! Every fallible entry point returns a [`GasStatus`]; on failure a message
//! is kept per thread and read with [`gas_last_error`]. Handles are opaque
//! and owned by the caller, who releases them with the matching `*_free`.
//! Bivector outputs list the coefficients of `e_jk` for `j < k` in
//! lexicographic order.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gasurf::estimators::{self, EstimatorOptions};
use gasurf::geom::{self, OrientedTriangle2, Point2, Vertex};
use gasurf::partition::{self, Partition, Polygon2};
use gasurf::surfaces::{self, PlaneTransform, Surface};
use gasurf::{ga, Error};

/// Let the library pick the vertex opposite a longest side.
pub const GAS_VERTEX_AUTO: i32 = -1;
pub const GAS_VERTEX_A: i32 = 0;
pub const GAS_VERTEX_B: i32 = 1;
pub const GAS_VERTEX_C: i32 = 2;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GasStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Degenerate = 4,
    Unbalanced = 5,
    Domain = 6,
    Numerical = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GasPoint {
    pub x: f64,
    pub y: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GasTriangle {
    pub a: GasPoint,
    pub b: GasPoint,
    pub c: GasPoint,
}

pub struct GasSurface {
    inner: Surface,
}

pub struct GasTransform {
    inner: PlaneTransform,
}

pub struct GasPartition {
    inner: Partition,
}

impl From<GasPoint> for Point2 {
    fn from(p: GasPoint) -> Self {
        Point2::new(p.x, p.y)
    }
}

impl From<Point2> for GasPoint {
    fn from(p: Point2) -> Self {
        GasPoint { x: p.x, y: p.y }
    }
}

impl From<&GasTriangle> for OrientedTriangle2 {
    fn from(t: &GasTriangle) -> Self {
        OrientedTriangle2::new(t.a.into(), t.b.into(), t.c.into())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: GasStatus,
    message: String,
}

impl Failure {
    fn new(status: GasStatus, message: impl Into<String>) -> Self {
        Failure { status, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse(_) => GasStatus::Parse,
            Error::DegenerateTriangle | Error::ZeroDenominator => GasStatus::Degenerate,
            Error::Unbalanced { .. } | Error::RelaxedBoundExceeded { .. } => GasStatus::Unbalanced,
            Error::DomainViolation { .. } => GasStatus::Domain,
            Error::QuadratureNotConverged { .. } | Error::Eval(_) => GasStatus::Numerical,
            _ => GasStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

fn set_last_error(msg: Option<String>) {
    let c = msg.map(|m| CString::new(m.replace('\0', " ")).expect("interior NULs removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard<F>(f: F) -> GasStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            GasStatus::Ok
        }
        Ok(Err(fail)) => {
            set_last_error(Some(fail.message));
            fail.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(Some(format!("internal panic: {msg}")));
            GasStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::new(GasStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::new(GasStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(GasStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(GasStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn read_points(pts: *const GasPoint, n: usize) -> Result<Vec<Point2>, Failure> {
    if pts.is_null() {
        return Err(Failure::new(GasStatus::NullPointer, "points is NULL"));
    }
    Ok(std::slice::from_raw_parts(pts, n).iter().map(|&p| p.into()).collect())
}

fn options(relaxed_kappa: f64) -> EstimatorOptions {
    if relaxed_kappa > 0.0 {
        EstimatorOptions::relaxed(relaxed_kappa)
    } else {
        EstimatorOptions::default()
    }
}

fn vertex(t: &OrientedTriangle2, v: i32) -> Result<Vertex, Failure> {
    match v {
        GAS_VERTEX_AUTO => Ok(geom::balanced_vertex_choice(t)?),
        GAS_VERTEX_A => Ok(Vertex::A),
        GAS_VERTEX_B => Ok(Vertex::B),
        GAS_VERTEX_C => Ok(Vertex::C),
        _ => Err(Failure::new(GasStatus::InvalidArgument, format!("vertex index {v}"))),
    }
}

unsafe fn write_bivector(
    b: &ga::Multivector,
    out: *mut f64,
    len: usize,
    written: *mut usize,
) -> Result<(), Failure> {
    let comps = b.bivector_components();
    if let Some(w) = written.as_mut() {
        *w = comps.len();
    }
    if len < comps.len() {
        return Err(Failure::new(
            GasStatus::BufferTooSmall,
            format!("need {} doubles, buffer holds {len}", comps.len()),
        ));
    }
    if out.is_null() {
        return Err(Failure::new(GasStatus::NullPointer, "out is NULL"));
    }
    std::slice::from_raw_parts_mut(out, comps.len()).copy_from_slice(&comps);
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn gas_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn gas_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a surface from a spec such as `cylinder(rho=1)`, `flat`,
/// `graph(u^2+v^2)` or `custom(u, v, u*v)`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gas_surface_new(spec: *const c_char, out: *mut *mut GasSurface) -> GasStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        let s = surfaces::parse_surface(read_str(spec, "spec")?)?;
        *out = Box::into_raw(Box::new(GasSurface { inner: s }));
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a handle from [`gas_surface_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gas_surface_free(s: *mut GasSurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gas_surface_dim(s: *const GasSurface, out: *mut usize) -> GasStatus {
    guard(|| {
        *out_ref(out, "out")? = deref(s, "surface")?.inner.dim();
        Ok(())
    })
}

/// `∂_1 s(x) ∧ ∂_2 s(x)`. `written` (optional) receives the component count
/// even when the buffer is too small.
///
/// # Safety
/// `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gas_surface_tangent_bivector(
    s: *const GasSurface,
    x: GasPoint,
    out: *mut f64,
    len: usize,
    written: *mut usize,
) -> GasStatus {
    guard(|| {
        let b = deref(s, "surface")?.inner.tangent_bivector(x.into())?;
        write_bivector(&b, out, len, written)
    })
}

/// Inscribed mean bivector `<s(a);s(b);s(c)> / (<a;b;c>·I_2)`.
///
/// # Safety
/// Pointers must be valid; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gas_mean_bivector_naive(
    s: *const GasSurface,
    t: *const GasTriangle,
    out: *mut f64,
    len: usize,
    written: *mut usize,
) -> GasStatus {
    guard(|| {
        let t: OrientedTriangle2 = deref(t, "triangle")?.into();
        let b = estimators::mean_bivector_naive(&deref(s, "surface")?.inner, &t)?;
        write_bivector(&b, out, len, written)
    })
}

/// Balanced mean bivector at `vertex_index` (`GAS_VERTEX_*`). A positive
/// `relaxed_kappa` accepts unbalanced vertices up to that ratio.
///
/// # Safety
/// Pointers must be valid; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gas_balanced_mean_bivector(
    s: *const GasSurface,
    t: *const GasTriangle,
    vertex_index: i32,
    relaxed_kappa: f64,
    out: *mut f64,
    len: usize,
    written: *mut usize,
) -> GasStatus {
    guard(|| {
        let t: OrientedTriangle2 = deref(t, "triangle")?.into();
        let v = vertex(&t, vertex_index)?;
        let b = estimators::balanced_mean_bivector(&deref(s, "surface")?.inner, &t, v, &options(relaxed_kappa))?;
        write_bivector(&b.value, out, len, written)
    })
}

/// Builds a plane map from `identity` or `custom(<expr>, <expr>)`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gas_transform_new(spec: *const c_char, out: *mut *mut GasTransform) -> GasStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        let f = surfaces::parse_transform(read_str(spec, "spec")?)?;
        *out = Box::into_raw(Box::new(GasTransform { inner: f }));
        Ok(())
    })
}

/// # Safety
/// `f` must be NULL or a handle from [`gas_transform_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gas_transform_free(f: *mut GasTransform) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Jacobian determinant estimate on triangle `t`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gas_jacobian_estimate(
    f: *const GasTransform,
    t: *const GasTriangle,
    vertex_index: i32,
    relaxed_kappa: f64,
    out: *mut f64,
) -> GasStatus {
    guard(|| {
        let t: OrientedTriangle2 = deref(t, "triangle")?.into();
        let v = vertex(&t, vertex_index)?;
        let f = &deref(f, "transform")?.inner;
        *out_ref(out, "out")? = estimators::jacobian_estimate(f, &t, v, &options(relaxed_kappa))?;
        Ok(())
    })
}

fn boxed_partition(p: Partition, out: &mut *mut GasPartition) {
    *out = Box::into_raw(Box::new(GasPartition { inner: p }));
}

/// Triangulated rectangle refined `levels` times.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gas_partition_rect(
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    levels: usize,
    out: *mut *mut GasPartition,
) -> GasStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        let poly = Polygon2::rectangle(x0, y0, x1, y1)?;
        boxed_partition(partition::refine_times(&partition::triangulate(&poly)?, levels), out);
        Ok(())
    })
}

/// Triangulated simple polygon refined `levels` times.
///
/// # Safety
/// `pts` must hold `n` points; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gas_partition_polygon(
    pts: *const GasPoint,
    n: usize,
    levels: usize,
    out: *mut *mut GasPartition,
) -> GasStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        let poly = Polygon2::new(read_points(pts, n)?)?;
        boxed_partition(partition::refine_times(&partition::triangulate(&poly)?, levels), out);
        Ok(())
    })
}

/// Schwarz lantern over `[0, 2π] × [0, height]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gas_partition_lantern(
    m: u64,
    n: u64,
    height: f64,
    out: *mut *mut GasPartition,
) -> GasStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        boxed_partition(partition::schwarz_lantern_partition(m, n, height)?, out);
        Ok(())
    })
}

/// One midpoint refinement of `p` as a new handle.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gas_partition_refine(p: *const GasPartition, out: *mut *mut GasPartition) -> GasStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        boxed_partition(partition::refine_midpoint(&deref(p, "partition")?.inner), out);
        Ok(())
    })
}

/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gas_partition_len(p: *const GasPartition, out: *mut usize) -> GasStatus {
    guard(|| {
        *out_ref(out, "out")? = deref(p, "partition")?.inner.len();
        Ok(())
    })
}

/// Largest triangle diameter.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gas_partition_mesh_norm(p: *const GasPartition, out: *mut f64) -> GasStatus {
    guard(|| {
        *out_ref(out, "out")? = deref(p, "partition")?.inner.mesh_norm();
        Ok(())
    })
}

/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gas_partition_triangle(
    p: *const GasPartition,
    index: usize,
    out: *mut GasTriangle,
) -> GasStatus {
    guard(|| {
        let tris = deref(p, "partition")?.inner.triangles();
        let t = tris.get(index).ok_or_else(|| {
            Failure::new(GasStatus::InvalidArgument, format!("triangle {index} of {}", tris.len()))
        })?;
        *out_ref(out, "out")? = GasTriangle { a: t.a.into(), b: t.b.into(), c: t.c.into() };
        Ok(())
    })
}

/// # Safety
/// `p` must be NULL or a live partition handle.
#[no_mangle]
pub unsafe extern "C" fn gas_partition_free(p: *mut GasPartition) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Balanced area sum over `p`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gas_area_balanced(
    s: *const GasSurface,
    p: *const GasPartition,
    relaxed_kappa: f64,
    out: *mut f64,
) -> GasStatus {
    guard(|| {
        let (s, p) = (&deref(s, "surface")?.inner, &deref(p, "partition")?.inner);
        *out_ref(out, "out")? = estimators::area_estimate_balanced(s, p, &options(relaxed_kappa))?;
        Ok(())
    })
}

/// Inscribed-polyhedron area over `p`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gas_area_naive(s: *const GasSurface, p: *const GasPartition, out: *mut f64) -> GasStatus {
    guard(|| {
        let (s, p) = (&deref(s, "surface")?.inner, &deref(p, "partition")?.inner);
        *out_ref(out, "out")? = estimators::area_estimate_naive(s, p)?;
        Ok(())
    })
}

/// Adaptive quadrature of `|∂_1 s ∧ ∂_2 s|` over a polygon. On
/// non-convergence `out` still receives the best estimate.
///
/// # Safety
/// `pts` must hold `n` points; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gas_area_oracle(
    s: *const GasSurface,
    pts: *const GasPoint,
    n: usize,
    rtol: f64,
    out: *mut f64,
) -> GasStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let poly = Polygon2::new(read_points(pts, n)?)?;
        match estimators::area_integral_oracle(&deref(s, "surface")?.inner, &poly, rtol) {
            Ok(v) => {
                *out = v;
                Ok(())
            }
            Err(e @ Error::QuadratureNotConverged { best, .. }) => {
                *out = best;
                Err(e.into())
            }
            Err(e) => Err(e.into()),
        }
    })
}
