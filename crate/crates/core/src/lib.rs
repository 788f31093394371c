//! Exact computation with germs of finite polynomial maps, reduced
//! hypersurfaces and codimension-one foliations at the origin of `C^n`.
//!
//! Polynomials have rational coefficients. Variables are 0-based in the
//! API and printed 1-based, `x1..xn` on the source and `y1..yn` on the
//! target.

pub mod forms;
pub mod geometry;
pub mod harness;
pub mod ideals;
pub mod koszul;
pub mod poly;
pub mod text;
pub mod trace;

pub use forms::DifferentialForm;
pub use geometry::{FoliationGerm, HypersurfaceGerm, MapGerm};
pub use poly::{Polynomial, Rational};
