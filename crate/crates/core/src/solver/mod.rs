//! Right-hand sides, the Galerkin system on the spline space and its
//! iterative solution.

mod iterative;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

pub use iterative::{cg, gmres, Solution, SolverConfig};

use crate::error::{Error, Result};
use crate::operator::{check_dims, LinearOperator};
use crate::scalar::Scalar;
use crate::space::{SuperSpace, TransformMatrix};
use crate::spline::{bernstein_all, MAX_DEGREE};
use crate::vec3::{dist, Vec3};

/// Normalization of the zonal degree-2 spherical harmonic, `sqrt(5 / 16 pi)`.
pub fn zonal_harmonic_scale() -> f64 {
    (5.0 / (16.0 * PI)).sqrt()
}

/// Boundary data of a Dirichlet problem.
#[derive(Clone)]
pub enum DirichletData {
    /// `sqrt(5/16pi) (3 z^2 - |x|^2)`: harmonic in all of space and equal to
    /// the zonal harmonic `Y_2^0` on the unit sphere.
    ZonalHarmonic,
    /// `exp(i kappa |x - v|) / |x - v|`, a radiating Helmholtz solution away
    /// from `v`.
    PointSource {
        kappa: f64,
        source: Vec3,
    },
    Constant(f64),
    Custom(Arc<dyn Fn(Vec3) -> Complex64 + Send + Sync>),
}

impl fmt::Debug for DirichletData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirichletData::ZonalHarmonic => write!(f, "ZonalHarmonic"),
            DirichletData::PointSource { kappa, source } => {
                write!(f, "PointSource({kappa}, {source:?})")
            }
            DirichletData::Constant(c) => write!(f, "Constant({c})"),
            DirichletData::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl DirichletData {
    /// Value at `x`; for the manufactured cases this is also the exact
    /// solution off the boundary.
    pub fn eval(&self, x: Vec3) -> Complex64 {
        match self {
            DirichletData::ZonalHarmonic => {
                let v = zonal_harmonic_scale() * (2.0 * x[2] * x[2] - x[0] * x[0] - x[1] * x[1]);
                Complex64::new(v, 0.0)
            }
            DirichletData::PointSource { kappa, source } => {
                let r = dist(x, *source);
                Complex64::from_polar(1.0 / r, kappa * r)
            }
            DirichletData::Constant(c) => Complex64::new(*c, 0.0),
            DirichletData::Custom(f) => f(x),
        }
    }

    pub fn eval_as<S: Scalar>(&self, x: Vec3) -> S {
        let v = self.eval(x);
        S::from_parts(v.re, v.im)
    }
}

/// `<g, phi_i>` for every superspace basis function, by tensor Gauss with
/// `order` points per direction.
pub fn assemble_rhs<S: Scalar>(
    space: &SuperSpace,
    data: &DirichletData,
    order: usize,
) -> Result<Vec<S>> {
    let p = space.degree();
    let n = space.local_dim();
    let mesh = space.mesh();
    let rules = (0..mesh.num_elements())
        .map(|e| mesh.element_rule(e, order))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![S::zero(); space.dim()];
    out.par_chunks_mut(n)
        .zip(&rules)
        .enumerate()
        .for_each(|(e, (o, rule))| {
            let (mut bx, mut by) = ([0.0; MAX_DEGREE + 1], [0.0; MAX_DEGREE + 1]);
            for &([s, t], w) in rule {
                bernstein_all(p, s, &mut bx);
                bernstein_all(p, t, &mut by);
                let (x, m) = mesh.eval_local(e, s, t);
                let v: S = data.eval_as::<S>(x) * (w * m);
                for b in 0..=p {
                    for a in 0..=p {
                        o[a + (p + 1) * b] += v * (bx[a] * by[b]);
                    }
                }
            }
        });
    Ok(out)
}

/// `T A T^T` acting on spline coefficients.
pub struct GalerkinOperator<'a, S> {
    pub operator: &'a dyn LinearOperator<S>,
    pub transform: &'a TransformMatrix,
}

impl<'a, S: Scalar> GalerkinOperator<'a, S> {
    pub fn new(
        operator: &'a dyn LinearOperator<S>,
        transform: &'a TransformMatrix,
    ) -> Result<Self> {
        if operator.dim() != transform.cols() {
            return Err(Error::DimensionMismatch {
                expected: transform.cols(),
                found: operator.dim(),
            });
        }
        Ok(GalerkinOperator {
            operator,
            transform,
        })
    }
}

impl<S: Scalar> LinearOperator<S> for GalerkinOperator<'_, S> {
    fn dim(&self) -> usize {
        self.transform.rows()
    }

    fn apply_into(&self, x: &[S], y: &mut [S]) -> Result<()> {
        check_dims(self.dim(), x.len(), y.len())?;
        let ax = self.operator.apply(&self.transform.apply_transpose(x)?)?;
        y.copy_from_slice(&self.transform.apply(&ax)?);
        Ok(())
    }
}

/// Exact diagonal of `T A T^T` from element-pair blocks of `A`;
/// `block(a, b, out)` writes the `local_dim x local_dim` block of elements
/// `a` and `b`.
pub fn galerkin_diagonal<S: Scalar>(
    transform: &TransformMatrix,
    local_dim: usize,
    block: impl Fn(usize, usize, &mut [S]) -> Result<()> + Sync,
) -> Result<Vec<S>> {
    (0..transform.rows())
        .into_par_iter()
        .map(|j| {
            // Coefficients grouped by element.
            let mut groups: Vec<(usize, Vec<(usize, f64)>)> = Vec::new();
            for (dof, t) in transform.row(j) {
                let (e, a) = (dof / local_dim, dof % local_dim);
                match groups.iter_mut().find(|g| g.0 == e) {
                    Some(g) => g.1.push((a, t)),
                    None => groups.push((e, vec![(a, t)])),
                }
            }
            let mut blk = vec![S::zero(); local_dim * local_dim];
            let mut acc = S::zero();
            for (ea, ca) in &groups {
                for (eb, cb) in &groups {
                    block(*ea, *eb, &mut blk)?;
                    for &(a, ta) in ca {
                        for &(b, tb) in cb {
                            acc += blk[a * local_dim + b] * (ta * tb);
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{fichera, sphere};
    use crate::mesh::Mesh;
    use crate::operator::DenseMatrix;
    use crate::space::SplineSpace;

    #[test]
    fn data_values() {
        let y20 = DirichletData::ZonalHarmonic;
        assert!((y20.eval([0.0, 0.0, 1.0]).re - 0.630783).abs() < 1e-6);
        // Harmonic: the Laplacian of 2z^2 - x^2 - y^2 vanishes; on the unit
        // sphere it agrees with 3z^2 - 1.
        let x = [0.6, 0.0, 0.8];
        assert!((y20.eval(x).re - zonal_harmonic_scale() * (3.0 * 0.64 - 1.0)).abs() < 1e-15);
        let ps = DirichletData::PointSource {
            kappa: 0.5,
            source: [0.5; 3],
        };
        let v = ps.eval([0.5, 0.5, 2.5]);
        assert!((v - Complex64::from_polar(0.5, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn constant_rhs_sums_to_area() {
        let mesh = Arc::new(Mesh::new(Arc::new(fichera()), 1).unwrap());
        let space = SuperSpace::new(mesh, 0);
        let r: Vec<f64> = assemble_rhs(&space, &DirichletData::Constant(1.0), 4).unwrap();
        assert!((r.iter().sum::<f64>() - 24.0).abs() < 1e-10);
        let z: Vec<f64> = assemble_rhs(&space, &DirichletData::Constant(0.0), 4).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn diagonal_matches_dense_product() {
        let mesh = Arc::new(Mesh::new(Arc::new(sphere()), 1).unwrap());
        let sup = SuperSpace::new(mesh.clone(), 1);
        let spl = SplineSpace::new(mesh.clone(), 1);
        let t = spl.transform(&sup).unwrap();
        let integ = crate::quadrature::PairIntegrator::new(
            mesh,
            1,
            crate::quadrature::QuadConfig::for_degree(1),
        )
        .unwrap();
        let dense = DenseMatrix::assemble(&integ, &crate::kernel::Laplace).unwrap();
        let op = GalerkinOperator::new(&dense, &t).unwrap();
        let diag = galerkin_diagonal(&t, 4, |a, b, out| {
            integ
                .pair_block(&crate::kernel::Laplace, a, b, out)
                .map(|_| ())
        })
        .unwrap();
        for j in (0..op.dim()).step_by(5) {
            let mut ej = vec![0.0; op.dim()];
            ej[j] = 1.0;
            let col = op.apply(&ej).unwrap();
            assert!((col[j] - diag[j]).abs() < 1e-12 * diag[j].abs());
        }
    }
}
