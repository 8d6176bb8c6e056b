use std::sync::Arc;

use iga_bem::geometry::Builtin;
use iga_bem::kernel::{Helmholtz, Laplace};
use iga_bem::pipeline::{potential_errors, solve_dirichlet, Discretization, SolveOptions};
use iga_bem::potential::{exterior_sphere_points, sphere_density_l2_error};
use iga_bem::solver::DirichletData;

fn sphere_disc(p: usize, m: u32, perturb: bool) -> Discretization {
    let s = Builtin::Sphere.surface();
    let s = if perturb { s.perturb() } else { s };
    Discretization::new(Arc::new(s), p, m).unwrap()
}

/// Potential error at the centre of the sphere, where the zonal data vanishes.
fn centre_error(disc: &Discretization) -> f64 {
    let opts = SolveOptions::for_degree(disc.degree());
    let data = DirichletData::ZonalHarmonic;
    let sol = solve_dirichlet(disc, Laplace, &data, &opts).unwrap();
    let pts = [[0.0; 3], [0.0, 0.0, 0.5], [0.3, -0.2, 0.1]];
    potential_errors(disc, Laplace, &sol, &data, &pts, opts.quad)
        .unwrap()
        .max_error
}

#[test]
fn laplace_sphere_error_drops_with_refinement() {
    let e: Vec<f64> = (1..=3)
        .map(|m| centre_error(&sphere_disc(1, m, false)))
        .collect();
    assert!(e[1] < e[0] && e[2] < e[1] / 8.0, "{e:?}");
    assert!(e[2] < 1e-4, "{e:?}");
}

#[test]
fn density_matches_spherical_harmonic() {
    let disc = sphere_disc(1, 3, false);
    let opts = SolveOptions::for_degree(1);
    let sol = solve_dirichlet(&disc, Laplace, &DirichletData::ZonalHarmonic, &opts).unwrap();
    let err = sphere_density_l2_error(&disc.superspace, &sol.superspace_coeffs).unwrap();
    // The exact density has L2 norm 5.
    assert!(err < 0.05, "{err}");
}

#[test]
fn perturbed_mapping_solves_without_breakdown() {
    for p in 0..=2 {
        let e = centre_error(&sphere_disc(p, 1, true));
        assert!(e < 0.1, "p={p}: {e}");
    }
}

#[test]
fn helmholtz_point_source_is_reproduced_outside() {
    let data = DirichletData::PointSource {
        kappa: 0.5,
        source: [0.5, 0.5, 0.5],
    };
    let kernel = Helmholtz::new(0.5).unwrap();
    let mut errs = Vec::new();
    for m in 1..=2 {
        let disc = sphere_disc(0, m, false);
        let opts = SolveOptions::for_degree(0);
        let sol = solve_dirichlet(&disc, kernel, &data, &opts).unwrap();
        let pts = exterior_sphere_points(m).points;
        errs.push(
            potential_errors(&disc, kernel, &sol, &data, &pts, opts.quad)
                .unwrap()
                .max_error,
        );
    }
    assert!(errs[1] < errs[0] / 4.0 && errs[1] < 1e-3, "{errs:?}");
}

#[test]
fn dense_fallback_agrees_with_compression() {
    let surface = Arc::new(Builtin::Fichera.surface());
    let disc = Discretization::new(surface, 0, 3).unwrap();
    let data = DirichletData::ZonalHarmonic;
    let mut opts = SolveOptions::for_degree(0);
    let a = solve_dirichlet(&disc, Laplace, &data, &opts).unwrap();
    assert!(a.stats.far_blocks > 0);
    opts.fmm.dense_fallback = true;
    let b = solve_dirichlet(&disc, Laplace, &data, &opts).unwrap();
    assert_eq!(b.stats.far_blocks, 0);
    let diff = a
        .coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let scale = b.coeffs.iter().map(|x| x.abs()).fold(0.0, f64::max);
    assert!(diff < 1e-5 * scale, "{diff} {scale}");
}
