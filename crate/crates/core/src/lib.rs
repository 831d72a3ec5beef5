//! Tangent bivectors, Jacobians and surface areas from inscribed triangles,
//! with the balanced mirror-vertex correction that makes them converge on
//! Schwarz-type meshes.
//!
//! ```
//! use gasurf::estimators::{balanced_mean_bivector, EstimatorOptions};
//! use gasurf::geom::Vertex;
//! use gasurf::partition::schwarz_local_triangle;
//! use gasurf::surfaces::make_cylinder;
//!
//! let s = make_cylinder(1.0).unwrap();
//! let t = schwarz_local_triangle(64, 64 * 64).unwrap();
//! let b = balanced_mean_bivector(&s, &t, Vertex::A, &EstimatorOptions::default()).unwrap();
//! assert!((b.value.bivector_coeff(2, 3) - 1.0).abs() < 1e-3);
//! ```

pub mod cli;
pub mod error;
pub mod estimators;
pub mod expr;
pub mod ga;
pub mod geom;
pub mod numfmt;
pub mod partition;
pub mod surfaces;

pub use error::{Error, Result};
