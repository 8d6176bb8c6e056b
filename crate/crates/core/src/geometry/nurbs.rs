use crate::error::{Error, Result};
use crate::spline::{bernstein_all_with_derivative, KnotVector, MAX_DEGREE};
use crate::vec3::{cross, norm, Aabb, Vec3};

/// Point, tangents and area element of a patch map at one parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceSample {
    pub param: [f64; 2],
    pub point: Vec3,
    pub du: Vec3,
    pub dv: Vec3,
    /// `|du x dv|`.
    pub measure: f64,
}

impl SurfaceSample {
    /// Unit normal `du x dv / |du x dv|`.
    pub fn normal(&self) -> Vec3 {
        let n = cross(self.du, self.dv);
        let l = norm(n);
        [n[0] / l, n[1] / l, n[2] / l]
    }
}

/// Tensor-product NURBS map from `[0, 1]^2` into space.
///
/// Control points are stored with the `u` index varying slowest:
/// point `(i, j)` lives at `i * num_v + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct NurbsPatch {
    u: KnotVector,
    v: KnotVector,
    points: Vec<Vec3>,
    weights: Vec<f64>,
}

impl NurbsPatch {
    pub fn new(u: KnotVector, v: KnotVector, points: Vec<Vec3>, weights: Vec<f64>) -> Result<Self> {
        let n = u.num_basis() * v.num_basis();
        if points.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: points.len(),
            });
        }
        if weights.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Validation(format!("weight {w} is not positive")));
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Validation("control point is not finite".into()));
        }
        Ok(NurbsPatch {
            u,
            v,
            points,
            weights,
        })
    }

    pub fn knots_u(&self) -> &KnotVector {
        &self.u
    }

    pub fn knots_v(&self) -> &KnotVector {
        &self.v
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.u.degree(), self.v.degree())
    }

    pub fn num_u(&self) -> usize {
        self.u.num_basis()
    }

    pub fn num_v(&self) -> usize {
        self.v.num_basis()
    }

    pub fn control_points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Checked evaluation with derivatives and area element.
    pub fn eval(&self, x: f64, y: f64) -> Result<SurfaceSample> {
        for t in [x, y] {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::domain(t, "[0, 1]"));
            }
        }
        let (point, du, dv) = self.eval_derivatives(x, y);
        Ok(SurfaceSample {
            param: [x, y],
            point,
            du,
            dv,
            measure: norm(cross(du, dv)),
        })
    }

    /// Point only.
    pub fn eval_point(&self, x: f64, y: f64) -> Vec3 {
        let (pu, pv) = self.degrees();
        let su = self.u.find_span(x);
        let sv = self.v.find_span(y);
        let mut nu = [0.0; MAX_DEGREE + 1];
        let mut nv = [0.0; MAX_DEGREE + 1];
        self.u.nonzero_basis(su, x, &mut nu);
        self.v.nonzero_basis(sv, y, &mut nv);
        let kv = self.num_v();
        let mut a = [0.0; 3];
        let mut w = 0.0;
        for (r, bu) in nu[..=pu].iter().enumerate() {
            let i = su - pu + r;
            for (s, bv) in nv[..=pv].iter().enumerate() {
                let idx = i * kv + sv - pv + s;
                let c = bu * bv * self.weights[idx];
                let p = self.points[idx];
                a[0] += c * p[0];
                a[1] += c * p[1];
                a[2] += c * p[2];
                w += c;
            }
        }
        [a[0] / w, a[1] / w, a[2] / w]
    }

    /// Point and both partial derivatives by the quotient rule; parameters
    /// are assumed to lie in `[0, 1]`.
    pub fn eval_derivatives(&self, x: f64, y: f64) -> (Vec3, Vec3, Vec3) {
        let (pu, pv) = self.degrees();
        let su = self.u.find_span(x);
        let sv = self.v.find_span(y);
        let (mut nu, mut du) = ([0.0; MAX_DEGREE + 1], [0.0; MAX_DEGREE + 1]);
        let (mut nv, mut dv) = ([0.0; MAX_DEGREE + 1], [0.0; MAX_DEGREE + 1]);
        self.u
            .nonzero_basis_with_derivative(su, x, &mut nu, &mut du);
        self.v
            .nonzero_basis_with_derivative(sv, y, &mut nv, &mut dv);
        let kv = self.num_v();
        // Homogeneous sums: value, d/du, d/dv.
        let mut a = [[0.0; 4]; 3];
        for r in 0..=pu {
            let i = su - pu + r;
            for s in 0..=pv {
                let idx = i * kv + sv - pv + s;
                let w = self.weights[idx];
                let p = self.points[idx];
                let f = [nu[r] * nv[s] * w, du[r] * nv[s] * w, nu[r] * dv[s] * w];
                for (acc, c) in a.iter_mut().zip(f) {
                    acc[0] += c * p[0];
                    acc[1] += c * p[1];
                    acc[2] += c * p[2];
                    acc[3] += c;
                }
            }
        }
        let w = a[0][3];
        let pt = [a[0][0] / w, a[0][1] / w, a[0][2] / w];
        let deriv = |h: &[f64; 4]| {
            [
                (h[0] - pt[0] * h[3]) / w,
                (h[1] - pt[1] * h[3]) / w,
                (h[2] - pt[2] * h[3]) / w,
            ]
        };
        (pt, deriv(&a[1]), deriv(&a[2]))
    }

    /// Bounding boxes of the patch restricted to the cells of the grid
    /// `breaks_u x breaks_v` (both sorted, starting at 0 and ending at 1).
    ///
    /// Each box encloses the control net of the restricted patch, which by
    /// the convex hull property of NURBS with positive weights encloses the
    /// patch piece. The result is indexed `i * (breaks_v.len() - 1) + j`.
    pub fn cell_hulls(&self, breaks_u: &[f64], breaks_v: &[f64]) -> Vec<Aabb> {
        let (cols, ranges_u, ranges_v) = self.refined_net(breaks_u, breaks_v);
        let mut out = Vec::with_capacity(ranges_u.len() * ranges_v.len());
        for ru in &ranges_u {
            for rv in &ranges_v {
                let mut b = Aabb::empty();
                for col in &cols[ru.clone()] {
                    for h in &col[rv.clone()] {
                        b.insert([h[0] / h[3], h[1] / h[3], h[2] / h[3]]);
                    }
                }
                out.push(b);
            }
        }
        out
    }

    /// Rational Bézier representations of the patch on the cells of the grid
    /// `breaks_u x breaks_v`, indexed like [`Self::cell_hulls`]. `None` if a
    /// cell contains an interior knot of the patch.
    pub fn bezier_cells(&self, breaks_u: &[f64], breaks_v: &[f64]) -> Option<Vec<BezierCell>> {
        let (pu, pv) = self.degrees();
        let (cols, ranges_u, ranges_v) = self.refined_net(breaks_u, breaks_v);
        if ranges_u.iter().any(|r| r.len() != pu + 1) || ranges_v.iter().any(|r| r.len() != pv + 1)
        {
            return None;
        }
        let mut out = Vec::with_capacity(ranges_u.len() * ranges_v.len());
        for ru in &ranges_u {
            for rv in &ranges_v {
                let net = cols[ru.clone()]
                    .iter()
                    .flat_map(|col| col[rv.clone()].iter().copied())
                    .collect();
                out.push(BezierCell { pu, pv, net });
            }
        }
        Some(out)
    }

    /// Homogeneous control net refined to multiplicity `p` at every break,
    /// as curves along `v`, with the control point ranges of each cell.
    #[allow(clippy::type_complexity)]
    fn refined_net(
        &self,
        breaks_u: &[f64],
        breaks_v: &[f64],
    ) -> (
        Vec<Vec<[f64; 4]>>,
        Vec<std::ops::Range<usize>>,
        Vec<std::ops::Range<usize>>,
    ) {
        let ku = self.num_u();
        let kv = self.num_v();
        // Homogeneous net as rows along u (one curve per v index).
        let mut net: Vec<Vec<[f64; 4]>> = (0..kv)
            .map(|j| {
                (0..ku)
                    .map(|i| {
                        let idx = i * kv + j;
                        let w = self.weights[idx];
                        let p = self.points[idx];
                        [p[0] * w, p[1] * w, p[2] * w, w]
                    })
                    .collect()
            })
            .collect();
        let knots_u = refine(self.u.knots(), self.u.degree(), &mut net, breaks_u);
        // Transpose to curves along v.
        let nu = net[0].len();
        let mut cols: Vec<Vec<[f64; 4]>> = (0..nu)
            .map(|i| (0..kv).map(|j| net[j][i]).collect())
            .collect();
        let knots_v = refine(self.v.knots(), self.v.degree(), &mut cols, breaks_v);
        let ranges_u = support_ranges(&knots_u, self.u.degree(), breaks_u);
        let ranges_v = support_ranges(&knots_v, self.v.degree(), breaks_v);
        (cols, ranges_u, ranges_v)
    }
}

/// A rational tensor Bézier patch on the unit square, stored as homogeneous
/// control points `net[i * (pv + 1) + j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BezierCell {
    pu: usize,
    pv: usize,
    net: Vec<[f64; 4]>,
}

impl BezierCell {
    /// Point and partial derivatives at local `(s, t)`.
    #[inline]
    pub fn eval_derivatives(&self, s: f64, t: f64) -> (Vec3, Vec3, Vec3) {
        let (pu, pv) = (self.pu, self.pv);
        let (mut nu, mut du) = ([0.0; MAX_DEGREE + 1], [0.0; MAX_DEGREE + 1]);
        let (mut nv, mut dv) = ([0.0; MAX_DEGREE + 1], [0.0; MAX_DEGREE + 1]);
        bernstein_all_with_derivative(pu, s, &mut nu, &mut du);
        bernstein_all_with_derivative(pv, t, &mut nv, &mut dv);
        let mut a = [[0.0; 4]; 3];
        for (i, row) in self.net.chunks_exact(pv + 1).enumerate() {
            // Contract along v first.
            let mut r0 = [0.0; 4];
            let mut r1 = [0.0; 4];
            for (j, h) in row.iter().enumerate() {
                for d in 0..4 {
                    r0[d] += nv[j] * h[d];
                    r1[d] += dv[j] * h[d];
                }
            }
            for d in 0..4 {
                a[0][d] += nu[i] * r0[d];
                a[1][d] += du[i] * r0[d];
                a[2][d] += nu[i] * r1[d];
            }
        }
        let w = a[0][3];
        let pt = [a[0][0] / w, a[0][1] / w, a[0][2] / w];
        let deriv = |h: &[f64; 4]| {
            [
                (h[0] - pt[0] * h[3]) / w,
                (h[1] - pt[1] * h[3]) / w,
                (h[2] - pt[2] * h[3]) / w,
            ]
        };
        (pt, deriv(&a[1]), deriv(&a[2]))
    }

    /// Point and area element at local `(s, t)`.
    #[inline]
    pub fn eval_with_measure(&self, s: f64, t: f64) -> (Vec3, f64) {
        let (pt, du, dv) = self.eval_derivatives(s, t);
        (pt, norm(cross(du, dv)))
    }
}

/// Inserts every interior break into `knots` up to multiplicity `p`,
/// updating all curves alike, and returns the refined knot sequence.
fn refine(knots: &[f64], p: usize, curves: &mut [Vec<[f64; 4]>], breaks: &[f64]) -> Vec<f64> {
    let mut knots = knots.to_vec();
    for &x in breaks {
        if x <= 0.0 || x >= 1.0 {
            continue;
        }
        let mult = knots.iter().filter(|&&k| k == x).count();
        for _ in mult..p {
            insert_knot(&mut knots, p, curves, x);
        }
    }
    knots
}

/// Boehm's single knot insertion.
fn insert_knot(knots: &mut Vec<f64>, p: usize, curves: &mut [Vec<[f64; 4]>], x: f64) {
    let k = knots.iter().rposition(|&t| t <= x).unwrap();
    for pts in curves.iter_mut() {
        let n = pts.len();
        let mut q = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let v = if i + p <= k {
                pts[i]
            } else if i > k {
                pts[i - 1]
            } else {
                let alpha = (x - knots[i]) / (knots[i + p] - knots[i]);
                let (a, b) = (pts[i], pts[i - 1]);
                [
                    alpha * a[0] + (1.0 - alpha) * b[0],
                    alpha * a[1] + (1.0 - alpha) * b[1],
                    alpha * a[2] + (1.0 - alpha) * b[2],
                    alpha * a[3] + (1.0 - alpha) * b[3],
                ]
            };
            q.push(v);
        }
        *pts = q;
    }
    knots.insert(k + 1, x);
}

/// For each cell `[breaks[c], breaks[c+1]]`, the control point indices whose
/// basis support meets the open cell.
fn support_ranges(knots: &[f64], p: usize, breaks: &[f64]) -> Vec<std::ops::Range<usize>> {
    let n = knots.len() - p - 1;
    breaks
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let lo = (0..n).find(|&j| knots[j + p + 1] > a).unwrap_or(n - 1);
            let hi = (0..n).rev().find(|&j| knots[j] < b).unwrap_or(0);
            lo..hi + 1
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bilinear(corners: [Vec3; 4]) -> NurbsPatch {
        let kv = KnotVector::uniform(1, 0);
        NurbsPatch::new(kv.clone(), kv, corners.to_vec(), vec![1.0; 4]).unwrap()
    }

    #[test]
    fn bilinear_midpoint_is_corner_mean() {
        let c = [
            [0.0, 0.0, 0.0],
            [0.0, 2.0, 1.0],
            [1.0, 0.0, 3.0],
            [1.5, 1.0, 0.5],
        ];
        let patch = bilinear(c);
        let s = patch.eval(0.5, 0.5).unwrap();
        for d in 0..3 {
            let mean = c.iter().map(|p| p[d]).sum::<f64>() / 4.0;
            assert!((s.point[d] - mean).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let kv = KnotVector::uniform(1, 0);
        let pts = vec![[0.0; 3]; 4];
        assert!(NurbsPatch::new(
            kv.clone(),
            kv.clone(),
            pts.clone(),
            vec![1.0, 1.0, -1.0, 1.0]
        )
        .is_err());
        assert!(NurbsPatch::new(kv.clone(), kv.clone(), pts[..3].to_vec(), vec![1.0; 3]).is_err());
        let patch = bilinear([[0.0; 3], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]);
        assert!(patch.eval(1.2, 0.0).is_err());
    }

    #[test]
    fn rational_quarter_circle() {
        // Quarter circle swept linearly in z.
        let u = KnotVector::uniform(2, 0);
        let v = KnotVector::uniform(1, 0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let arc = [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let wts = [1.0, h, 1.0];
        let mut pts = Vec::new();
        let mut ws = Vec::new();
        for i in 0..3 {
            for z in [0.0, 1.0] {
                pts.push([arc[i][0], arc[i][1], z]);
                ws.push(wts[i]);
            }
        }
        let patch = NurbsPatch::new(u, v, pts, ws).unwrap();
        for k in 0..=10 {
            let s = patch.eval(k as f64 / 10.0, 0.3).unwrap();
            let r = (s.point[0].powi(2) + s.point[1].powi(2)).sqrt();
            assert!((r - 1.0).abs() < 1e-14);
            assert!((s.point[2] - 0.3).abs() < 1e-14);
        }
    }

    #[test]
    fn hulls_enclose_samples() {
        let u = KnotVector::uniform(2, 0);
        let v = KnotVector::uniform(1, 0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut pts = Vec::new();
        let mut ws = Vec::new();
        for (i, a) in [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]].iter().enumerate() {
            for z in [0.0, 1.0] {
                pts.push([a[0], a[1], z]);
                ws.push(if i == 1 { h } else { 1.0 });
            }
        }
        let patch = NurbsPatch::new(u, v, pts, ws).unwrap();
        let breaks = [0.0, 0.25, 0.5, 0.75, 1.0];
        let boxes = patch.cell_hulls(&breaks, &breaks);
        assert_eq!(boxes.len(), 16);
        for (i, w) in breaks.windows(2).enumerate() {
            for (j, z) in breaks.windows(2).enumerate() {
                let b = boxes[i * 4 + j];
                for s in 0..=8 {
                    for t in 0..=8 {
                        let x = w[0] + (w[1] - w[0]) * s as f64 / 8.0;
                        let y = z[0] + (z[1] - z[0]) * t as f64 / 8.0;
                        let p = patch.eval_point(x, y);
                        assert!(b.distance_to_point(p) < 1e-14);
                    }
                }
                // Refined hulls are tight: diameter close to the piece's extent.
                assert!(b.diameter() < 0.6);
            }
        }
    }
}
