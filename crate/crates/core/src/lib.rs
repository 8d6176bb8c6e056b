//! Isogeometric boundary element solver for the single-layer formulation of
//! Laplace and Helmholtz Dirichlet problems on multipatch NURBS surfaces.

pub mod bench;
pub mod error;
pub mod fmm;
pub mod geometry;
pub mod kernel;
pub mod mesh;
pub mod operator;
pub mod pipeline;
pub mod potential;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod space;
pub mod spline;
pub mod vec3;

pub use error::{Error, Result};
