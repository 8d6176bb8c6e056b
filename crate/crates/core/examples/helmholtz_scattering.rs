//! Exterior Helmholtz problem on the torus with the field of a point source
//! inside the hole region as data, evaluated on a far sphere.

use std::sync::Arc;

use iga_bem::geometry::Builtin;
use iga_bem::kernel::Helmholtz;
use iga_bem::pipeline::{potential_errors, solve_dirichlet, Discretization, SolveOptions};
use iga_bem::potential::exterior_sphere_points;
use iga_bem::solver::DirichletData;

fn main() -> iga_bem::Result<()> {
    let kappa = 1.0;
    let data = DirichletData::PointSource {
        kappa,
        source: [2.0, 0.0, 0.0],
    };
    let surface = Arc::new(Builtin::Torus.surface());
    for m in 1..=3 {
        let disc = Discretization::new(surface.clone(), 0, m)?;
        let opts = SolveOptions::for_degree(0);
        let kernel = Helmholtz::new(kappa)?;
        let sol = solve_dirichlet(&disc, kernel, &data, &opts)?;
        let points = exterior_sphere_points(m);
        let report = potential_errors(&disc, kernel, &sol, &data, &points.points, opts.quad)?;
        println!(
            "m={m}: {} unknowns, {} GMRES iterations, max error {:.3e}",
            sol.coeffs.len(),
            sol.iterations,
            report.max_error
        );
    }
    Ok(())
}
