//! Multipatch NURBS surfaces.

mod builtin;
mod io;
mod nurbs;
mod topology;

pub use builtin::{fichera, sphere, torus, Builtin};
pub use io::{load_surface, parse_surface, save_surface, write_surface};
pub use nurbs::{BezierCell, NurbsPatch, SurfaceSample};
pub use topology::{check_interfaces, EdgeMatch, InterfaceReport};

use crate::error::{Error, Result};
use crate::quadrature::gauss_rule;
use crate::vec3::{cross, dot, norm, Aabb, Vec3};

/// Piecewise linear reparametrization `[0, 1] -> [0, 1]` with kinks at 0.3
/// and 0.7, used to spoil the smoothness of patch maps.
pub fn perturbation(x: f64) -> f64 {
    if x <= 0.3 {
        0.5 * x
    } else if x < 0.7 {
        1.75 * x - 0.375
    } else {
        0.5 * (x + 1.0)
    }
}

const PERTURBATION_KINKS: [f64; 2] = [0.3, 0.7];

/// Derivative of [`perturbation`] (right-sided at the kinks).
pub fn perturbation_derivative(x: f64) -> f64 {
    if x < 0.3 {
        0.5
    } else if x < 0.7 {
        1.75
    } else {
        0.5
    }
}

/// A closed surface given patchwise by NURBS maps.
#[derive(Clone, Debug, PartialEq)]
pub struct Surface {
    patches: Vec<NurbsPatch>,
    perturbed: bool,
}

impl Surface {
    pub fn new(patches: Vec<NurbsPatch>) -> Result<Self> {
        if patches.is_empty() {
            return Err(Error::Validation("surface has no patches".into()));
        }
        Ok(Surface {
            patches,
            perturbed: false,
        })
    }

    pub fn patches(&self) -> &[NurbsPatch] {
        &self.patches
    }

    pub fn num_patches(&self) -> usize {
        self.patches.len()
    }

    pub fn is_perturbed(&self) -> bool {
        self.perturbed
    }

    /// The same surface with every patch map composed with the perturbation
    /// in both parameters.
    pub fn perturb(&self) -> Surface {
        Surface {
            patches: self.patches.clone(),
            perturbed: true,
        }
    }

    /// Parameters in `(0, 1)` at which the patch maps fail to be smooth, in
    /// both directions.
    pub fn kinks(&self) -> &'static [f64] {
        if self.perturbed {
            &PERTURBATION_KINKS
        } else {
            &[]
        }
    }

    /// Maps a reference parameter to the parameter of the underlying NURBS.
    #[inline]
    pub fn reparam(&self, t: f64) -> f64 {
        if self.perturbed {
            perturbation(t)
        } else {
            t
        }
    }

    fn check_patch(&self, patch: usize) -> Result<()> {
        if patch >= self.patches.len() {
            return Err(Error::IndexOutOfRange {
                index: patch,
                limit: self.patches.len(),
            });
        }
        Ok(())
    }

    /// Checked evaluation of patch `patch` at `(x, y)`.
    pub fn eval(&self, patch: usize, x: f64, y: f64) -> Result<SurfaceSample> {
        self.check_patch(patch)?;
        for t in [x, y] {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::domain(t, "[0, 1]"));
            }
        }
        let (point, du, dv) = self.eval_derivatives(patch, x, y);
        Ok(SurfaceSample {
            param: [x, y],
            point,
            du,
            dv,
            measure: norm(cross(du, dv)),
        })
    }

    #[inline]
    pub fn eval_point(&self, patch: usize, x: f64, y: f64) -> Vec3 {
        self.patches[patch].eval_point(self.reparam(x), self.reparam(y))
    }

    /// Point and tangents including the chain rule for perturbed maps.
    #[inline]
    pub fn eval_derivatives(&self, patch: usize, x: f64, y: f64) -> (Vec3, Vec3, Vec3) {
        let p = &self.patches[patch];
        if !self.perturbed {
            return p.eval_derivatives(x, y);
        }
        let (pt, du, dv) = p.eval_derivatives(perturbation(x), perturbation(y));
        let (sx, sy) = (perturbation_derivative(x), perturbation_derivative(y));
        (
            pt,
            [du[0] * sx, du[1] * sx, du[2] * sx],
            [dv[0] * sy, dv[1] * sy, dv[2] * sy],
        )
    }

    /// Point and area element.
    #[inline]
    pub fn eval_with_measure(&self, patch: usize, x: f64, y: f64) -> (Vec3, f64) {
        let (pt, du, dv) = self.eval_derivatives(patch, x, y);
        (pt, norm(cross(du, dv)))
    }

    /// Bounding boxes of the `2^level x 2^level` dyadic cells of a patch,
    /// indexed `ix * 2^level + iy`.
    pub fn cell_hulls(&self, patch: usize, level: u32) -> Vec<Aabb> {
        let n = 1usize << level;
        let mut breaks: Vec<f64> = (0..=n).map(|i| self.reparam(i as f64 / n as f64)).collect();
        if self.perturbed {
            // Keep the kinks of the reparametrization as cell boundaries of
            // the refinement so every hull stays a single rational piece.
            breaks.extend([0.15, 0.85]);
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            let fine = self.patches[patch].cell_hulls(&breaks, &breaks);
            let m = breaks.len() - 1;
            let cells: Vec<usize> = (0..=n)
                .map(|i| {
                    let b = self.reparam(i as f64 / n as f64);
                    breaks.iter().position(|&t| t == b).unwrap()
                })
                .collect();
            let mut out = Vec::with_capacity(n * n);
            for ix in 0..n {
                for iy in 0..n {
                    let mut b = Aabb::empty();
                    for fx in cells[ix]..cells[ix + 1] {
                        for fy in cells[iy]..cells[iy + 1] {
                            b = b.union(&fine[fx * m + fy]);
                        }
                    }
                    out.push(b);
                }
            }
            return out;
        }
        self.patches[patch].cell_hulls(&breaks, &breaks)
    }

    /// Bounding box of the whole surface.
    pub fn bounding_box(&self) -> Aabb {
        (0..self.num_patches())
            .flat_map(|p| self.cell_hulls(p, 0))
            .fold(Aabb::empty(), |a, b| a.union(&b))
    }

    /// Integral of `f(point, normal) * measure` over the surface using
    /// `cells x cells` subdivisions of each patch with an `order`-point Gauss
    /// rule per direction.
    pub fn integrate<F>(&self, cells: usize, order: usize, f: F) -> f64
    where
        F: Fn(Vec3, Vec3) -> f64,
    {
        let rule = gauss_rule(order).expect("valid Gauss order");
        let mut breaks: Vec<f64> = (0..=cells).map(|i| i as f64 / cells as f64).collect();
        breaks.extend_from_slice(self.kinks());
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        let points: Vec<(f64, f64)> = breaks
            .windows(2)
            .flat_map(|w| {
                rule.iter()
                    .map(move |(x, wx)| (w[0] + (w[1] - w[0]) * x, (w[1] - w[0]) * wx))
            })
            .collect();
        let mut total = 0.0;
        for patch in 0..self.num_patches() {
            for &(x, wx) in &points {
                for &(y, wy) in &points {
                    let (pt, du, dv) = self.eval_derivatives(patch, x, y);
                    total += wx * wy * f(pt, cross(du, dv));
                }
            }
        }
        total
    }

    /// Surface area.
    pub fn area(&self) -> f64 {
        self.integrate(8, 16, |_, n| norm(n))
    }

    /// Enclosed volume via the divergence theorem; positive for outward
    /// oriented patches.
    pub fn signed_volume(&self) -> f64 {
        self.integrate(4, 12, |x, n| dot(x, n)) / 3.0
    }
}
