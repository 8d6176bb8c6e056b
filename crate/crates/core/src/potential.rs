//! Evaluation of the single-layer potential off the boundary, evaluation
//! point sets and error measures.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Surface;
use crate::kernel::{Kernel, SINGULARITY_GUARD};
use crate::quadrature::{gauss_rule, QuadConfig, MAX_ORDER};
use crate::scalar::Scalar;
use crate::space::SuperSpace;
use crate::spline::{bernstein_all, MAX_DEGREE};
use crate::vec3::{dist, dot, norm, scale, sub, Vec3};

/// Which side of the boundary a point set lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Interior,
    Exterior,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationSet {
    pub points: Vec<Vec3>,
    pub side: Side,
    pub description: String,
}

/// Evaluates `u_h(x) = int_Gamma u(x, y) w_h(y) dy` for a density given by
/// superspace coefficients.
pub struct PotentialEvaluator<'a, S> {
    space: &'a SuperSpace,
    coeffs: &'a [S],
    quad: QuadConfig,
    /// Per element and Gauss order: points and weighted density values.
    cache: Vec<Box<[OnceLock<Vec<(Vec3, S)>>]>>,
}

/// Potential value with a flag for points closer than ten element
/// diameters to the boundary, where the quadrature may lose accuracy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialValue<S> {
    pub value: S,
    pub near_boundary: bool,
}

impl<'a, S: Scalar> PotentialEvaluator<'a, S> {
    pub fn new(space: &'a SuperSpace, coeffs: &'a [S], quad: QuadConfig) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: coeffs.len(),
            });
        }
        quad.validate()?;
        let cache = (0..space.mesh().num_elements())
            .map(|_| (0..MAX_ORDER).map(|_| OnceLock::new()).collect())
            .collect();
        Ok(PotentialEvaluator {
            space,
            coeffs,
            quad,
            cache,
        })
    }

    fn samples(&self, e: usize, q: usize) -> &[(Vec3, S)] {
        self.cache[e][q - 1].get_or_init(|| {
            let rule = self.space.mesh().element_rule(e, q).expect("valid order");
            let p = self.space.degree();
            let n = self.space.local_dim();
            let c = &self.coeffs[e * n..(e + 1) * n];
            let (mut bx, mut by) = ([0.0; MAX_DEGREE + 1], [0.0; MAX_DEGREE + 1]);
            let mut out = Vec::with_capacity(rule.len());
            for ([s, t], wq) in rule {
                bernstein_all(p, s, &mut bx);
                bernstein_all(p, t, &mut by);
                let (x, m) = self.space.mesh().eval_local(e, s, t);
                let mut w = S::zero();
                for b in 0..=p {
                    for a in 0..=p {
                        w += c[a + (p + 1) * b] * (bx[a] * by[b]);
                    }
                }
                out.push((x, w * (wq * m)));
            }
            out
        })
    }

    pub fn eval<K: Kernel<Scalar = S>>(&self, kernel: &K, x: Vec3) -> Result<PotentialValue<S>> {
        let mesh = self.space.mesh();
        let mut acc = S::zero();
        let mut near = false;
        for (e, el) in mesh.elements().iter().enumerate() {
            let diam = el.bbox.diameter();
            let d = el.bbox.distance_to_point(x);
            near |= d < 10.0 * diam;
            let q = self.quad.distant_order(d / diam)?;
            for &(y, w) in self.samples(e, q) {
                let r = dist(x, y);
                if r < SINGULARITY_GUARD {
                    return Err(Error::Singularity { distance: r });
                }
                acc += kernel.eval_dist(r) * w;
            }
        }
        Ok(PotentialValue {
            value: acc,
            near_boundary: near,
        })
    }

    pub fn eval_all<K: Kernel<Scalar = S>>(
        &self,
        kernel: &K,
        points: &[Vec3],
    ) -> Result<Vec<PotentialValue<S>>> {
        points.par_iter().map(|&x| self.eval(kernel, x)).collect()
    }
}

/// Comparison of computed and exact potentials on a point set.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport<S> {
    pub points: Vec<Vec3>,
    pub computed: Vec<S>,
    pub exact: Vec<S>,
    /// `max |u(x) - u_h(x)|`.
    pub max_error: f64,
    pub density_l2_error: Option<f64>,
}

impl<S: Scalar> ErrorReport<S> {
    pub fn new(points: Vec<Vec3>, computed: Vec<S>, exact: Vec<S>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyEvaluationSet("no points to compare".into()));
        }
        let max_error = computed
            .iter()
            .zip(&exact)
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0, f64::max);
        Ok(ErrorReport {
            points,
            computed,
            exact,
            max_error,
            density_l2_error: None,
        })
    }

    /// CSV rows `x,y,z,re_uh,im_uh,re_u,im_u,abs_err` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,z,re_uh,im_uh,re_u,im_u,abs_err\n");
        for ((p, &a), &b) in self.points.iter().zip(&self.computed).zip(&self.exact) {
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
                p[0],
                p[1],
                p[2],
                a.re(),
                a.im(),
                b.re(),
                b.im(),
                (a - b).abs()
            ));
        }
        out
    }
}

/// Surface samples on a `n x n` grid per patch, bucketed for radius
/// queries.
struct SampleGrid {
    cell: f64,
    buckets: HashMap<[i64; 3], Vec<Vec3>>,
}

impl SampleGrid {
    fn new(surface: &Surface, n: usize, cell: f64) -> Self {
        let mut buckets: HashMap<[i64; 3], Vec<Vec3>> = HashMap::new();
        for patch in 0..surface.num_patches() {
            for i in 0..n {
                for j in 0..n {
                    let x = i as f64 / (n - 1) as f64;
                    let y = j as f64 / (n - 1) as f64;
                    let p = surface.eval_point(patch, x, y);
                    buckets.entry(Self::key(p, cell)).or_default().push(p);
                }
            }
        }
        SampleGrid { cell, buckets }
    }

    fn key(p: Vec3, cell: f64) -> [i64; 3] {
        p.map(|c| (c / cell).floor() as i64)
    }

    /// Whether some sample lies within `radius <= cell` of `x`.
    fn any_within(&self, x: Vec3, radius: f64) -> bool {
        let k = Self::key(x, self.cell);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(b) = self.buckets.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        if b.iter().any(|&p| dist(p, x) < radius) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

/// Points, outward normals scaled by quadrature weights, for solid angle
/// computations.
fn flux_samples(surface: &Surface, cells: usize, order: usize) -> Vec<(Vec3, Vec3)> {
    let g = gauss_rule(order).expect("small order");
    let h = 1.0 / cells as f64;
    let mut out = Vec::new();
    for patch in 0..surface.num_patches() {
        for ci in 0..cells {
            for cj in 0..cells {
                for (t, wt) in g.iter() {
                    for (s, ws) in g.iter() {
                        let (x, y) = ((ci as f64 + s) * h, (cj as f64 + t) * h);
                        let sample = surface.eval(patch, x, y).expect("inside");
                        let n = crate::vec3::cross(sample.du, sample.dv);
                        out.push((sample.point, scale(n, ws * wt * h * h)));
                    }
                }
            }
        }
    }
    out
}

/// Solid angle fraction `1/(4 pi) int (y - x) . n / |y - x|^3`: one inside,
/// zero outside.
fn winding_number(samples: &[(Vec3, Vec3)], x: Vec3) -> f64 {
    samples
        .iter()
        .map(|&(y, n)| {
            let d = sub(y, x);
            let r = norm(d);
            dot(d, n) / (r * r * r)
        })
        .sum::<f64>()
        / (4.0 * PI)
}

/// Corners of the axis-aligned cubes of side `spacing` (grid aligned with
/// the origin) inside the surface whose distance to the boundary is at
/// least `margin`; distances are measured against a 64 x 64 sampling of
/// every patch.
pub fn interior_cube_points(surface: &Surface, spacing: f64, margin: f64) -> Result<EvaluationSet> {
    let bb = surface.bounding_box();
    let grid = SampleGrid::new(surface, 64, margin + spacing);
    let flux = flux_samples(surface, 8, 6);
    let lo: [i64; 3] = bb.min.map(|c| (c / spacing).floor() as i64);
    let hi: [i64; 3] = bb.max.map(|c| (c / spacing).ceil() as i64);
    let half_diag = 0.5 * spacing * 3f64.sqrt();
    let cubes: Vec<[i64; 3]> = (lo[0]..hi[0])
        .flat_map(|i| (lo[1]..hi[1]).flat_map(move |j| (lo[2]..hi[2]).map(move |k| [i, j, k])))
        .collect();
    let kept: Vec<[i64; 3]> = cubes
        .par_iter()
        .filter(|c| {
            let center = c.map(|v| (v as f64 + 0.5) * spacing);
            !grid.any_within(center, margin + half_diag) && winding_number(&flux, center) > 0.5
        })
        .copied()
        .collect();
    let mut corners = BTreeSet::new();
    for c in kept {
        for d in 0..8 {
            corners.insert([c[0] + (d & 1), c[1] + ((d >> 1) & 1), c[2] + ((d >> 2) & 1)]);
        }
    }
    if corners.is_empty() {
        return Err(Error::EmptyEvaluationSet(format!(
            "no cube of side {spacing} keeps distance {margin} from the boundary"
        )));
    }
    Ok(EvaluationSet {
        points: corners
            .into_iter()
            .map(|c| c.map(|v| v as f64 * spacing))
            .collect(),
        side: Side::Interior,
        description: format!("interior cube corners, spacing {spacing}, margin {margin}"),
    })
}

/// The first `count` points of a nested low-discrepancy sequence on the
/// sphere of `radius` around the origin.
pub fn spherical_points(count: usize, radius: f64) -> Vec<Vec3> {
    // Additive recurrence with the reciprocal powers of the plastic number,
    // mapped area-preservingly to the sphere.
    let g: f64 = 1.324_717_957_244_746;
    let (a1, a2) = (1.0 / g, 1.0 / (g * g));
    (0..count)
        .map(|i| {
            let u = (0.5 + a1 * i as f64).fract();
            let v = (0.5 + a2 * i as f64).fract();
            let z = 1.0 - 2.0 * u;
            let s = (1.0 - z * z).max(0.0).sqrt();
            let phi = 2.0 * PI * v;
            [radius * s * phi.cos(), radius * s * phi.sin(), radius * z]
        })
        .collect()
}

/// `2^(m+2)` points on the sphere of radius 6; the sets are nested in `m`.
pub fn exterior_sphere_points(level: u32) -> EvaluationSet {
    EvaluationSet {
        points: spherical_points(1 << (level + 2), 6.0),
        side: Side::Exterior,
        description: format!("{} points on the sphere of radius 6", 1u64 << (level + 2)),
    }
}

/// `sqrt(int |w_h - w|^2)` with `order` Gauss points per direction.
pub fn density_l2_error<S: Scalar>(
    space: &SuperSpace,
    coeffs: &[S],
    exact: impl Fn(Vec3) -> S + Sync,
    order: usize,
) -> Result<f64> {
    if coeffs.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: coeffs.len(),
        });
    }
    let p = space.degree();
    let n = space.local_dim();
    let mesh = space.mesh();
    let rules = (0..mesh.num_elements())
        .map(|e| mesh.element_rule(e, order))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = (0..mesh.num_elements())
        .into_par_iter()
        .map(|e| {
            let (mut bx, mut by) = ([0.0; MAX_DEGREE + 1], [0.0; MAX_DEGREE + 1]);
            let c = &coeffs[e * n..(e + 1) * n];
            let mut acc = 0.0;
            for &([s, t], wq) in &rules[e] {
                bernstein_all(p, s, &mut bx);
                bernstein_all(p, t, &mut by);
                let (x, m) = mesh.eval_local(e, s, t);
                let mut w = S::zero();
                for b in 0..=p {
                    for a in 0..=p {
                        w += c[a + (p + 1) * b] * (bx[a] * by[b]);
                    }
                }
                acc += (w - exact(x)).norm_sqr() * wq * m;
            }
            acc
        })
        .sum();
    Ok(total.sqrt())
}

/// Density error against `5 Y_2^0`, the single-layer density of the zonal
/// harmonic data on the unit sphere. Other surfaces are rejected.
pub fn sphere_density_l2_error(space: &SuperSpace, coeffs: &[f64]) -> Result<f64> {
    let surface = space.mesh().surface();
    for patch in 0..surface.num_patches() {
        for k in 0..16 {
            let (x, y) = ((k % 4) as f64 / 3.0, (k / 4) as f64 / 3.0);
            if (norm(surface.eval_point(patch, x, y)) - 1.0).abs() > 1e-10 {
                return Err(Error::Unsupported(
                    "the analytic density is only known on the unit sphere".into(),
                ));
            }
        }
    }
    let c = 5.0 * crate::solver::zonal_harmonic_scale();
    density_l2_error(
        space,
        coeffs,
        |x| c * (3.0 * x[2] * x[2] - 1.0),
        space.degree() + 4,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{fichera, sphere};
    use crate::kernel::Laplace;
    use crate::mesh::Mesh;
    use std::sync::Arc;

    #[test]
    fn exterior_points_are_nested_and_distinct() {
        let s1 = exterior_sphere_points(1).points;
        assert_eq!(s1.len(), 8);
        assert!(s1.iter().all(|p| (norm(*p) - 6.0).abs() < 1e-12));
        let s6 = exterior_sphere_points(6).points;
        assert_eq!(&s6[..8], &s1[..]);
        for (i, a) in s6.iter().enumerate() {
            for b in &s6[i + 1..] {
                assert!(dist(*a, *b) > 1e-3);
            }
        }
    }

    #[test]
    fn interior_points_of_sphere() {
        let set = interior_cube_points(&sphere(), 0.05, 0.15).unwrap();
        assert!(!set.points.is_empty());
        assert!(set.points.iter().all(|p| norm(*p) <= 0.85 + 1e-9));
        let again = interior_cube_points(&sphere(), 0.05, 0.15).unwrap();
        assert_eq!(set, again);
    }

    #[test]
    fn interior_points_avoid_the_notch() {
        let set = interior_cube_points(&fichera(), 0.05, 0.15).unwrap();
        assert!(!set.points.is_empty());
        for p in &set.points {
            assert!(p.iter().all(|c| c.abs() <= 0.85 + 1e-9));
            // Away from the removed octant by the margin, up to the
            // boundary sampling resolution.
            let d = p.iter().map(|&c| c.min(0.0).powi(2)).sum::<f64>().sqrt();
            assert!(d > 0.13, "{p:?}");
        }
    }

    #[test]
    fn zero_density_gives_zero_potential_and_known_l2_error() {
        let mesh = Arc::new(Mesh::new(Arc::new(sphere()), 1).unwrap());
        let space = SuperSpace::new(mesh, 1);
        let zero = vec![0.0; space.dim()];
        let ev = PotentialEvaluator::new(&space, &zero, QuadConfig::for_degree(1)).unwrap();
        assert_eq!(ev.eval(&Laplace, [0.1, 0.2, 0.3]).unwrap().value, 0.0);
        let err = sphere_density_l2_error(&space, &zero).unwrap();
        assert!((err - 5.0).abs() < 1e-4, "{err}");
    }

    #[test]
    fn exact_density_reproduces_interior_potential() {
        // L2 projection of 5 Y20 onto a fine superspace.
        let mesh = Arc::new(Mesh::new(Arc::new(sphere()), 2).unwrap());
        let space = SuperSpace::new(mesh.clone(), 3);
        let c = 5.0 * crate::solver::zonal_harmonic_scale();
        let coeffs = space.project(|x| c * (3.0 * x[2] * x[2] - 1.0), 8).unwrap();
        let ev = PotentialEvaluator::new(&space, &coeffs, QuadConfig::for_degree(3)).unwrap();
        let u = ev.eval(&Laplace, [0.0, 0.0, 0.5]).unwrap().value;
        assert!((u - 0.157695).abs() < 1e-5, "{u}");
        let err = sphere_density_l2_error(&space, &coeffs).unwrap();
        let fine = SuperSpace::new(Arc::new(Mesh::new(Arc::new(sphere()), 3).unwrap()), 3);
        let cf = fine.project(|x| c * (3.0 * x[2] * x[2] - 1.0), 8).unwrap();
        let err_fine = sphere_density_l2_error(&fine, &cf).unwrap();
        // Fourth order approximation of a smooth density.
        assert!(err / err_fine > 12.0, "{err} {err_fine}");
        // Away from the boundary the potential decays.
        let far = |r: f64| ev.eval(&Laplace, [0.0, 0.0, r]).unwrap().value.abs();
        assert!(far(12.0) < far(6.0));
    }

    #[test]
    fn non_sphere_density_error_is_rejected() {
        let mesh = Arc::new(Mesh::new(Arc::new(fichera()), 0).unwrap());
        let space = SuperSpace::new(mesh, 0);
        assert!(matches!(
            sphere_density_l2_error(&space, &vec![0.0; space.dim()]),
            Err(Error::Unsupported(_))
        ));
    }
}
