//! Fundamental solutions of the Laplace and Helmholtz equations.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Surface;
use crate::mesh::ClusterId;
use crate::scalar::Scalar;
use crate::vec3::{dist, Vec3};

/// Distances below this are treated as coincident points.
pub const SINGULARITY_GUARD: f64 = 1e-14;

/// A translation-invariant kernel depending on `|x - y|` only.
pub trait Kernel: Copy + Send + Sync + 'static {
    type Scalar: Scalar;

    /// Kernel value at distance `r > 0`.
    fn eval_dist(&self, r: f64) -> Self::Scalar;

    fn eval(&self, x: Vec3, y: Vec3) -> Result<Self::Scalar> {
        let r = dist(x, y);
        if r < SINGULARITY_GUARD {
            return Err(Error::Singularity { distance: r });
        }
        Ok(self.eval_dist(r))
    }
}

/// `1 / (4 pi |x - y|)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Laplace;

impl Kernel for Laplace {
    type Scalar = f64;

    #[inline]
    fn eval_dist(&self, r: f64) -> f64 {
        1.0 / (4.0 * PI * r)
    }
}

/// `exp(i kappa |x - y|) / (4 pi |x - y|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Helmholtz {
    pub kappa: f64,
}

impl Helmholtz {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::Config(format!("invalid wavenumber {kappa}")));
        }
        Ok(Helmholtz { kappa })
    }
}

impl Kernel for Helmholtz {
    type Scalar = Complex64;

    #[inline]
    fn eval_dist(&self, r: f64) -> Complex64 {
        let (s, c) = (self.kappa * r).sin_cos();
        let f = 1.0 / (4.0 * PI * r);
        Complex64::new(c * f, s * f)
    }
}

/// Problem selector used by configuration code.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelSpec {
    Laplace,
    Helmholtz { kappa: f64 },
}

impl KernelSpec {
    pub fn helmholtz(kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::Config(format!(
                "Helmholtz needs a positive wavenumber, got {kappa}"
            )));
        }
        Ok(KernelSpec::Helmholtz { kappa })
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Laplace => "laplace",
            KernelSpec::Helmholtz { .. } => "helmholtz",
        }
    }

    /// Kernel value as a complex number (real for Laplace).
    pub fn eval(&self, x: Vec3, y: Vec3) -> Result<Complex64> {
        match *self {
            KernelSpec::Laplace => Laplace.eval(x, y).map(Complex64::from_f64),
            KernelSpec::Helmholtz { kappa } => Helmholtz { kappa }.eval(x, y),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    /// Parses `laplace` or `helmholtz` (wavenumber 1 until configured).
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "laplace" => Ok(KernelSpec::Laplace),
            "helmholtz" => Ok(KernelSpec::Helmholtz { kappa: 1.0 }),
            other => Err(Error::Config(format!("unknown problem '{other}'"))),
        }
    }
}

/// The pulled-back kernel on a pair of clusters, with both clusters rescaled
/// to the unit square:
/// `(x, y) -> a_s a_t k_s(x') k_t(y') u(F_s(x'), F_t(y'))` where primes denote
/// the affine maps onto the clusters and `a_s, a_t` their reference areas.
pub struct LocalizedKernel<'a, K: Kernel> {
    pub kernel: K,
    pub surface: &'a Surface,
    pub target: ClusterId,
    pub source: ClusterId,
}

impl<'a, K: Kernel> LocalizedKernel<'a, K> {
    pub fn new(kernel: K, surface: &'a Surface, target: ClusterId, source: ClusterId) -> Self {
        LocalizedKernel {
            kernel,
            surface,
            target,
            source,
        }
    }

    fn pullback(&self, c: ClusterId, p: [f64; 2]) -> (Vec3, f64) {
        let [x0, y0] = c.origin();
        let h = c.size();
        let (pt, m) = self
            .surface
            .eval_with_measure(c.patch, x0 + h * p[0], y0 + h * p[1]);
        (pt, m * h * h)
    }

    pub fn eval(&self, x: [f64; 2], y: [f64; 2]) -> Result<K::Scalar> {
        for t in x.iter().chain(&y) {
            if !(0.0..=1.0).contains(t) {
                return Err(Error::domain(*t, "[0, 1]"));
            }
        }
        let (px, mx) = self.pullback(self.target, x);
        let (py, my) = self.pullback(self.source, y);
        Ok(self.kernel.eval(px, py)? * (mx * my))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn laplace_value() {
        let v = Laplace.eval([0.0; 3], [1.0, 0.0, 0.0]).unwrap();
        assert!((v - 0.0795775).abs() < 1e-7);
        assert!(matches!(
            Laplace.eval([1.0; 3], [1.0; 3]),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn helmholtz_value() {
        let v = Helmholtz { kappa: 0.5 }
            .eval([0.0; 3], [0.0, 1.0, 0.0])
            .unwrap();
        assert!((v.re - 0.0698357).abs() < 1e-6, "{v}");
        assert!((v.im - 0.0381522).abs() < 1e-6, "{v}");
        assert!((v.re - 0.5f64.cos() / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn zero_wavenumber_is_laplace() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        for _ in 0..5 {
            let x: Vec3 = [rng.gen(), rng.gen(), rng.gen()];
            let y: Vec3 = [rng.gen(), rng.gen(), rng.gen()];
            let h = Helmholtz { kappa: 0.0 }.eval(x, y).unwrap();
            assert_eq!(h.re, Laplace.eval(x, y).unwrap());
            assert_eq!(h.im, 0.0);
        }
    }

    #[test]
    fn symmetry() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(2);
        let h = Helmholtz { kappa: 2.0 };
        for _ in 0..1000 {
            let x: Vec3 = [rng.gen(), rng.gen(), rng.gen()];
            let y: Vec3 = [rng.gen(), rng.gen(), rng.gen()];
            assert_eq!(Laplace.eval(x, y).unwrap(), Laplace.eval(y, x).unwrap());
            assert_eq!(h.eval(x, y).unwrap(), h.eval(y, x).unwrap());
        }
    }

    #[test]
    fn helmholtz_solves_pde() {
        let kappa = 1.3;
        let k = Helmholtz { kappa };
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let step = 1e-3;
        for _ in 0..10 {
            let x: Vec3 = [
                rng.gen_range(0.5..1.5),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let u = |p: Vec3| k.eval_dist(crate::vec3::norm(p));
            let mut lap = Complex64::new(0.0, 0.0);
            for d in 0..3 {
                let mut a = x;
                let mut b = x;
                a[d] += step;
                b[d] -= step;
                lap += (u(a) + u(b) - u(x) * 2.0) / (step * step);
            }
            let res = (lap + u(x) * (kappa * kappa)).norm() / (u(x).norm() * kappa * kappa);
            assert!(res <= 1e-4, "{res}");
        }
    }

    #[test]
    fn localized_kernel_on_flat_square() {
        let kv = crate::spline::KnotVector::uniform(1, 0);
        let patch = crate::geometry::NurbsPatch::new(
            kv.clone(),
            kv,
            vec![[0.0; 3], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]],
            vec![1.0; 4],
        )
        .unwrap();
        let s = Surface::new(vec![patch]).unwrap();
        let root = ClusterId::root(0);
        let lk = LocalizedKernel::new(Laplace, &s, root, root);
        let v = lk.eval([0.0, 0.0], [1.0, 1.0]).unwrap();
        assert!((v - 1.0 / (4.0 * PI * 2f64.sqrt())).abs() < 1e-16);
        assert!(matches!(
            lk.eval([0.3, 0.3], [0.3, 0.3]),
            Err(Error::Singularity { .. })
        ));
        // Child clusters carry the area factor 1/4 each.
        let c = ClusterId::new(0, 1, 0);
        let d = ClusterId::new(0, 1, 2);
        let lk = LocalizedKernel::new(Laplace, &s, c, d);
        let v = lk.eval([0.0, 0.0], [1.0, 1.0]).unwrap();
        assert!((v - 1.0 / 16.0 / (4.0 * PI * 2f64.sqrt())).abs() < 1e-16);
    }
}
