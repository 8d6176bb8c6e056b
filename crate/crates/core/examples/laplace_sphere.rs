//! Interior Laplace problem on the unit sphere with zonal harmonic data:
//! density and potential errors for one discretization.

use std::sync::Arc;

use iga_bem::geometry::Builtin;
use iga_bem::kernel::Laplace;
use iga_bem::pipeline::{potential_errors, solve_dirichlet, Discretization, SolveOptions};
use iga_bem::potential::{interior_cube_points, sphere_density_l2_error};
use iga_bem::solver::DirichletData;

fn main() -> iga_bem::Result<()> {
    let (p, m) = (1, 3);
    let surface = Arc::new(Builtin::Sphere.surface());
    let points = interior_cube_points(&surface, 0.1, 0.15)?;
    let disc = Discretization::new(surface, p, m)?;
    let opts = SolveOptions::for_degree(p);
    let data = DirichletData::ZonalHarmonic;
    let sol = solve_dirichlet(&disc, Laplace, &data, &opts)?;
    let report = potential_errors(&disc, Laplace, &sol, &data, &points.points, opts.quad)?;
    println!(
        "p={p} m={m}: {} unknowns, {} CG iterations, assembly {:.2}s, solve {:.2}s",
        sol.coeffs.len(),
        sol.iterations,
        sol.assembly_seconds,
        sol.solve_seconds
    );
    println!(
        "density L2 error {:.3e}, max potential error {:.3e} over {} points",
        sphere_density_l2_error(&disc.superspace, &sol.superspace_coeffs)?,
        report.max_error,
        points.points.len()
    );
    Ok(())
}
