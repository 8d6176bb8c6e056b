//! Self-checks of the solver against analytic facts and reference
//! implementations, runnable from the command line.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::fmm::{CompressedOperator, FmmConfig};
use crate::geometry::{Builtin, Surface};
use crate::kernel::{Helmholtz, Kernel, Laplace};
use crate::mesh::Mesh;
use crate::operator::{DenseMatrix, LinearOperator};
use crate::quadrature::{PairIntegrator, QuadConfig};
use crate::scalar::{norm, Scalar};
use crate::space::{dim_splinespace, dim_superspace, SplineSpace, SuperSpace};
use crate::vec3::norm as vnorm;

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail,
        }
    }

    fn from_result(name: &str, res: Result<(bool, String)>) -> Self {
        match res {
            Ok((passed, detail)) => Check::new(name, passed, detail),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        }
    }
}

const BUILTINS: [Builtin; 3] = [Builtin::Sphere, Builtin::Torus, Builtin::Fichera];

/// Dimensions of constructed spaces agree with the closed forms.
pub fn dimensions() -> Check {
    let res = (|| {
        let mut worst = String::new();
        let mut count = 0;
        for b in BUILTINS {
            let surface = Arc::new(b.surface());
            for m in 0..=3 {
                let mesh = Arc::new(Mesh::new(surface.clone(), m)?);
                for p in 0..=4 {
                    let sup = SuperSpace::new(mesh.clone(), p);
                    let t = SplineSpace::new(mesh.clone(), p).transform(&sup)?;
                    count += 1;
                    if sup.dim() != dim_superspace(b.num_patches(), p, m)
                        || t.rows() != dim_splinespace(b.num_patches(), p, m)
                        || t.cols() != sup.dim()
                    {
                        worst = format!("{b} p={p} m={m}: {} x {}", t.rows(), t.cols());
                    }
                }
            }
        }
        Ok((worst.is_empty(), format!("{count} spaces checked {worst}")))
    })();
    Check::from_result("space dimensions", res)
}

/// Residuals of the implicit equations and surface areas.
pub fn geometry_exactness(samples: usize) -> Check {
    let mut rng = rand::rngs::StdRng::seed_from_u64(17);
    let mut sample = |s: &Surface, f: &dyn Fn([f64; 3]) -> f64| {
        (0..samples)
            .map(|_| {
                let patch = rng.gen_range(0..s.num_patches());
                f(s.eval_point(patch, rng.gen(), rng.gen())).abs()
            })
            .fold(0.0, f64::max)
    };
    let sphere = Builtin::Sphere.surface();
    let torus = Builtin::Torus.surface();
    let fichera = Builtin::Fichera.surface();
    let rs = sample(&sphere, &|x| vnorm(x) - 1.0);
    let rt = sample(&torus, &|x| {
        let rho = x[0].hypot(x[1]) - 2.0;
        rho.hypot(x[2]) - 0.5
    });
    let areas = [
        (sphere.area() - 4.0 * PI).abs(),
        (torus.area() - 4.0 * PI * PI).abs(),
        (fichera.area() - 24.0).abs(),
    ];
    let passed = rs <= 1e-12 && rt <= 1e-12 && areas.iter().all(|&a| a <= 1e-8);
    Check::new(
        "geometry exactness",
        passed,
        format!(
            "sphere residual {rs:.1e}, torus residual {rt:.1e}, area errors {:.1e} {:.1e} {:.1e}",
            areas[0], areas[1], areas[2]
        ),
    )
}

/// Quadrature accurate well beyond the compression error, so dense and
/// compressed operators differ by the interpolation only.
pub fn reference_quadrature() -> QuadConfig {
    QuadConfig {
        base_order: 8,
        grading: 1.0,
        singular_order: 6,
        min_order: 6,
    }
}

fn sample_vec<S: Scalar>(n: usize, seed: u64) -> Vec<S> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    (0..n)
        .map(|_| S::from_parts(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Largest relative difference of compressed and dense products over a few
/// sample vectors; every admissible block is compressed.
pub fn compression_error<K: Kernel>(
    integ: &PairIntegrator,
    kernel: K,
    eta: f64,
    q: usize,
) -> Result<f64> {
    let cfg = FmmConfig {
        eta,
        interp_degree: q,
        dense_fallback: false,
        size_check: false,
    };
    let fmm = CompressedOperator::assemble(integ, &kernel, &cfg)?;
    let dense = DenseMatrix::assemble(integ, &kernel)?;
    let mut worst: f64 = 0.0;
    for s in 0..3 {
        let x: Vec<K::Scalar> = sample_vec(dense.dim(), s);
        let a = fmm.apply(&x)?;
        let b = dense.apply(&x)?;
        let d: Vec<K::Scalar> = a.iter().zip(&b).map(|(&u, &v)| u - v).collect();
        worst = worst.max(norm(&d) / norm(&b));
    }
    Ok(worst)
}

/// Compressed against dense products on every built-in geometry for both
/// kernels, `q = 6`, `eta = 0.8`.
pub fn compression(level: u32) -> Check {
    let res = (|| {
        let mut worst: f64 = 0.0;
        let mut detail = Vec::new();
        for b in BUILTINS {
            let mesh = Arc::new(Mesh::new(Arc::new(b.surface()), level)?);
            let integ = PairIntegrator::new(mesh, 0, reference_quadrature())?;
            let l = compression_error(&integ, Laplace, 0.8, 6)?;
            let h = compression_error(&integ, Helmholtz::new(0.5)?, 0.8, 6)?;
            worst = worst.max(l).max(h);
            detail.push(format!("{b}: {l:.1e}/{h:.1e}"));
        }
        Ok((
            worst <= 1e-6,
            format!("relative errors (laplace/helmholtz) {}", detail.join(", ")),
        ))
    })();
    Check::from_result("compressed vs dense products", res)
}

/// Spline evaluation through the superspace map against direct evaluation
/// at `samples` random points per geometry and degree.
pub fn superspace_evaluation(samples: usize) -> Check {
    let res = (|| {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let mut worst: f64 = 0.0;
        for b in BUILTINS {
            let surface = Arc::new(b.surface());
            for p in 0..=4 {
                let m = rng.gen_range(0..=2);
                let mesh = Arc::new(Mesh::new(surface.clone(), m)?);
                let spl = SplineSpace::new(mesh.clone(), p);
                let sup = SuperSpace::new(mesh, p);
                let t = spl.transform(&sup)?;
                let c: Vec<f64> = (0..spl.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let cs = t.apply_transpose(&c)?;
                for _ in 0..samples {
                    let patch = rng.gen_range(0..b.num_patches());
                    let (x, y) = (rng.gen(), rng.gen());
                    worst =
                        worst.max((spl.eval(&c, patch, x, y) - sup.eval(&cs, patch, x, y)).abs());
                }
            }
        }
        Ok((worst <= 1e-13, format!("largest deviation {worst:.1e}")))
    })();
    Check::from_result("superspace evaluation", res)
}

/// The fast checks.
pub fn quick_checks() -> Vec<Check> {
    vec![
        dimensions(),
        geometry_exactness(10_000),
        superspace_evaluation(1000),
        compression(2),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_checks_pass() {
        for c in [
            dimensions(),
            geometry_exactness(500),
            superspace_evaluation(50),
        ] {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
