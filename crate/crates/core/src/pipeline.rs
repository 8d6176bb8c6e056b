//! End-to-end solution of a Dirichlet problem: discretization, compressed
//! assembly, right-hand side, Jacobi-preconditioned iteration and potential
//! evaluation.

use std::sync::Arc;
use std::time::Instant;

use crate::error::Result;
use crate::fmm::{CompressedOperator, FmmConfig, FmmStats};
use crate::geometry::Surface;
use crate::kernel::Kernel;
use crate::mesh::Mesh;
use crate::potential::{ErrorReport, PotentialEvaluator};
use crate::quadrature::{PairIntegrator, QuadConfig};
use crate::scalar::Scalar;
use crate::solver::{
    assemble_rhs, cg, galerkin_diagonal, gmres, DirichletData, GalerkinOperator, SolverConfig,
};
use crate::space::{SplineSpace, SuperSpace, TransformMatrix};
use crate::vec3::Vec3;

/// Mesh, superspace, spline space and the map between them.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub mesh: Arc<Mesh>,
    pub superspace: SuperSpace,
    pub spline: SplineSpace,
    pub transform: TransformMatrix,
}

impl Discretization {
    pub fn new(surface: Arc<Surface>, degree: usize, level: u32) -> Result<Self> {
        let mesh = Arc::new(Mesh::new(surface, level)?);
        let superspace = SuperSpace::new(mesh.clone(), degree);
        let spline = SplineSpace::new(mesh.clone(), degree);
        let transform = spline.transform(&superspace)?;
        Ok(Discretization {
            mesh,
            superspace,
            spline,
            transform,
        })
    }

    pub fn degree(&self) -> usize {
        self.superspace.degree()
    }
}

/// Knobs of a single solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub quad: QuadConfig,
    pub fmm: FmmConfig,
    pub solver: SolverConfig,
    /// Gauss points per direction for the right-hand side.
    pub rhs_order: usize,
}

impl SolveOptions {
    pub fn for_degree(p: usize) -> Self {
        SolveOptions {
            quad: QuadConfig::for_degree(p),
            fmm: FmmConfig::for_degree(p),
            solver: SolverConfig::default(),
            rhs_order: p + 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensitySolution<S> {
    /// Spline coefficients.
    pub coeffs: Vec<S>,
    /// The same density in the superspace, `T^T w`.
    pub superspace_coeffs: Vec<S>,
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    pub stats: FmmStats,
}

/// Solves `T A T^T w = T g` for the single-layer density, with CG for real
/// and restarted GMRES for complex kernels.
pub fn solve_dirichlet<K: Kernel>(
    disc: &Discretization,
    kernel: K,
    data: &DirichletData,
    opts: &SolveOptions,
) -> Result<DensitySolution<K::Scalar>> {
    opts.solver.validate()?;
    let start = Instant::now();
    let integ = PairIntegrator::new(disc.mesh.clone(), disc.degree(), opts.quad)?;
    let op = CompressedOperator::assemble(&integ, &kernel, &opts.fmm)?;
    let nl = integ.local_dim();
    let diag = galerkin_diagonal(&disc.transform, nl, |a, b, out: &mut [K::Scalar]| {
        match op.near().block(a, b) {
            Some((blk, false)) => out.copy_from_slice(blk),
            Some((blk, true)) => {
                for i in 0..nl {
                    for j in 0..nl {
                        out[i * nl + j] = blk[j * nl + i];
                    }
                }
            }
            None => {
                integ.pair_block(&kernel, a, b, out)?;
            }
        }
        Ok(())
    })?;
    let rhs_star = assemble_rhs::<K::Scalar>(&disc.superspace, data, opts.rhs_order)?;
    let rhs = disc.transform.apply(&rhs_star)?;
    let assembly_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let system = GalerkinOperator::new(&op, &disc.transform)?;
    let sol = if K::Scalar::IS_COMPLEX {
        gmres(&system, &rhs, &diag, &opts.solver)?
    } else {
        cg(&system, &rhs, &diag, &opts.solver)?
    }
    .check()?;
    let solve_seconds = start.elapsed().as_secs_f64();
    let superspace_coeffs = disc.transform.apply_transpose(&sol.x)?;
    Ok(DensitySolution {
        coeffs: sol.x,
        superspace_coeffs,
        iterations: sol.iterations,
        residual: sol.residual,
        history: sol.history,
        assembly_seconds,
        solve_seconds,
        stats: op.stats(),
    })
}

/// Potential of a solved density at `points`, compared against the exact
/// solution `data` (which must extend off the boundary).
pub fn potential_errors<K: Kernel>(
    disc: &Discretization,
    kernel: K,
    sol: &DensitySolution<K::Scalar>,
    data: &DirichletData,
    points: &[Vec3],
    quad: QuadConfig,
) -> Result<ErrorReport<K::Scalar>> {
    let ev = PotentialEvaluator::new(&disc.superspace, &sol.superspace_coeffs, quad)?;
    let computed = ev
        .eval_all(&kernel, points)?
        .into_iter()
        .map(|v| v.value)
        .collect();
    let exact = points
        .iter()
        .map(|&x| data.eval_as::<K::Scalar>(x))
        .collect();
    ErrorReport::new(points.to_vec(), computed, exact)
}
