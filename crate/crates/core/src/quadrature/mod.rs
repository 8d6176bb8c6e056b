//! Gauss rules, regularized rules for touching element pairs and the
//! element-pair integrator.

mod gauss;
mod pair;
mod singular;

pub use gauss::{composite_rule, gauss_rule, GaussRule, MAX_ORDER};
pub use pair::{ElementGauss, PairIntegrator, QuadConfig};
pub use singular::{
    canonical_rule, classify_pair, Dihedral, ElementRef, PairClass, PairGeometry, PairPoint,
};
