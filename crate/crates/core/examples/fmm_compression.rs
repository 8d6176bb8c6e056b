//! Compressed against dense single-layer products for a growing
//! interpolation degree.

use std::sync::Arc;

use iga_bem::bench::checks::{compression_error, reference_quadrature};
use iga_bem::geometry::Builtin;
use iga_bem::kernel::{Helmholtz, Laplace};
use iga_bem::mesh::Mesh;
use iga_bem::quadrature::PairIntegrator;

fn main() -> iga_bem::Result<()> {
    let mesh = Arc::new(Mesh::new(Arc::new(Builtin::Torus.surface()), 2)?);
    let integ = PairIntegrator::new(mesh, 0, reference_quadrature())?;
    println!("{:>3} {:>12} {:>12}", "q", "laplace", "helmholtz");
    for q in [2, 4, 6, 8] {
        let l = compression_error(&integ, Laplace, 0.8, q)?;
        let h = compression_error(&integ, Helmholtz::new(2.0)?, 0.8, q)?;
        println!("{q:>3} {l:>12.2e} {h:>12.2e}");
    }
    Ok(())
}
