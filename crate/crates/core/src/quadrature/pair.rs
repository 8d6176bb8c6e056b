//! Element-pair Galerkin blocks of the single-layer operator.

use std::sync::{Arc, OnceLock};

use super::gauss::{gauss_rule, MAX_ORDER};
use super::singular::{
    canonical_rule, classify, pair_from_corners, Dihedral, PairClass, PairGeometry,
};
use crate::error::{Error, Result};
use crate::kernel::{Kernel, SINGULARITY_GUARD};
use crate::mesh::Mesh;
use crate::scalar::Scalar;
use crate::spline::{bernstein_all, MAX_DEGREE};
use crate::vec3::{dist, Aabb, Vec3};

/// Quadrature orders.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    /// Gauss points per direction for non-touching pairs whose distance
    /// equals their size.
    pub base_order: usize,
    /// Extra points per halving of the relative distance (and fewer per
    /// doubling).
    pub grading: f64,
    /// Gauss points per variable of the regularized rules for touching pairs.
    pub singular_order: usize,
    /// Lower bound for graded orders.
    pub min_order: usize,
}

impl QuadConfig {
    /// Defaults for ansatz degree `p`.
    pub fn for_degree(p: usize) -> Self {
        QuadConfig {
            base_order: p + 4,
            grading: 1.0,
            singular_order: p + 5,
            min_order: p + 2,
        }
    }

    /// Graded order `q0 + ceil(g log2(1 / delta))`, clamped to
    /// `[min_order, 40]`; orders beyond 40 are an error.
    pub fn distant_order(&self, delta: f64) -> Result<usize> {
        let delta = delta.max(1e-3);
        let extra = (self.grading * (1.0 / delta).log2()).ceil();
        let q = self.base_order as f64 + extra;
        if q > MAX_ORDER as f64 {
            return Err(Error::QuadratureCapacity {
                requested: q as usize,
                max: MAX_ORDER,
            });
        }
        Ok((q.max(self.min_order as f64) as usize).clamp(1, MAX_ORDER))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, q) in [
            ("quad.base_order", self.base_order),
            ("quad.singular_order", self.singular_order),
            ("quad.min_order", self.min_order),
        ] {
            if q == 0 || q > MAX_ORDER {
                return Err(Error::Config(format!("{name} must lie in 1..=40, got {q}")));
            }
        }
        if !(self.grading.is_finite() && self.grading >= 0.0) {
            return Err(Error::Config(format!(
                "quad.grading must be nonnegative, got {}",
                self.grading
            )));
        }
        Ok(())
    }
}

/// Tensor Gauss points of one element: physical points and weights
/// including the area element.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementGauss {
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
    /// Bernstein values, row `k * (p+1)^2 + a + (p+1) b` for point `k`.
    pub phi: Vec<f64>,
}

/// Two sub-rectangles `[s0, s1, t0, t1]` of elements `a` and `b`.
struct SubcellPair<'c> {
    a: usize,
    b: usize,
    ca: &'c [f64; 4],
    cb: &'c [f64; 4],
}

/// Computes element-pair blocks for one mesh and ansatz degree, caching the
/// per-element Gauss data.
pub struct PairIntegrator {
    mesh: Arc<Mesh>,
    degree: usize,
    config: QuadConfig,
    elements: Vec<Box<[OnceLock<ElementGauss>]>>,
}

impl PairIntegrator {
    pub fn new(mesh: Arc<Mesh>, degree: usize, config: QuadConfig) -> Result<Self> {
        config.validate()?;
        let elements = (0..mesh.num_elements())
            .map(|_| (0..MAX_ORDER).map(|_| OnceLock::new()).collect())
            .collect();
        Ok(PairIntegrator {
            mesh,
            degree,
            config,
            elements,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn config(&self) -> &QuadConfig {
        &self.config
    }

    /// Local basis size `(p+1)^2`.
    pub fn local_dim(&self) -> usize {
        (self.degree + 1) * (self.degree + 1)
    }

    /// Gauss data of element `e` with about `q` points per direction, split
    /// at kinks of the surface.
    pub fn element_gauss(&self, e: usize, q: usize) -> &ElementGauss {
        self.elements[e][q - 1].get_or_init(|| {
            let p = self.degree;
            let n = self.local_dim();
            let rule = self.mesh.element_rule(e, q).expect("valid order");
            let mut points = Vec::with_capacity(rule.len());
            let mut weights = Vec::with_capacity(rule.len());
            let mut phi = vec![0.0; rule.len() * n];
            let (mut bx, mut by) = ([0.0; MAX_DEGREE + 1], [0.0; MAX_DEGREE + 1]);
            for (k, &([s, t], w)) in rule.iter().enumerate() {
                let (pt, m) = self.mesh.eval_local(e, s, t);
                points.push(pt);
                weights.push(w * m);
                bernstein_all(p, s, &mut bx);
                bernstein_all(p, t, &mut by);
                let row = &mut phi[k * n..(k + 1) * n];
                for b in 0..=p {
                    for a in 0..=p {
                        row[a + (p + 1) * b] = bx[a] * by[b];
                    }
                }
            }
            ElementGauss {
                points,
                weights,
                phi,
            }
        })
    }

    /// Box distance of two elements relative to the larger diameter.
    pub fn relative_distance(&self, a: usize, b: usize) -> f64 {
        let ea = self.mesh.element(a);
        let eb = self.mesh.element(b);
        let d = ea.bbox.distance(&eb.bbox);
        d / ea.bbox.diameter().max(eb.bbox.diameter())
    }

    /// Classification with canonical maps.
    pub fn classify(&self, a: usize, b: usize) -> Result<PairGeometry> {
        classify(&self.mesh, a, b)
    }

    /// The block `out[ia * n + ib] = int_a int_b u(x, y) phi_ia(x) phi_ib(y)`
    /// over elements `a` and `b`.
    pub fn pair_block<K: Kernel>(
        &self,
        kernel: &K,
        a: usize,
        b: usize,
        out: &mut [K::Scalar],
    ) -> Result<PairClass> {
        let geom = self.classify(a, b)?;
        match geom.class {
            PairClass::Distant => {
                let q = self.config.distant_order(self.relative_distance(a, b))?;
                self.distant_block(kernel, a, b, q, out)?;
            }
            _ => self.singular_block(kernel, &geom, a, b, self.config.singular_order, out)?,
        }
        Ok(geom.class)
    }

    /// Tensor Gauss block with `q` points per direction on each element.
    pub fn distant_block<K: Kernel>(
        &self,
        kernel: &K,
        a: usize,
        b: usize,
        q: usize,
        out: &mut [K::Scalar],
    ) -> Result<()> {
        let n = self.local_dim();
        let ga = self.element_gauss(a, q);
        let gb = self.element_gauss(b, q);
        out.fill(K::Scalar::zero());
        let mut row = vec![K::Scalar::zero(); n];
        for (i, (&xa, &wa)) in ga.points.iter().zip(&ga.weights).enumerate() {
            row.fill(K::Scalar::zero());
            for (j, (&xb, &wb)) in gb.points.iter().zip(&gb.weights).enumerate() {
                let r = dist(xa, xb);
                if r < SINGULARITY_GUARD {
                    return Err(Error::Singularity { distance: r });
                }
                let k = kernel.eval_dist(r) * wb;
                for (acc, &f) in row.iter_mut().zip(&gb.phi[j * n..(j + 1) * n]) {
                    *acc += k * f;
                }
            }
            for (ia, &fa) in ga.phi[i * n..(i + 1) * n].iter().enumerate() {
                let s = wa * fa;
                for (o, &r) in out[ia * n..(ia + 1) * n].iter_mut().zip(&row) {
                    *o += r * s;
                }
            }
        }
        Ok(())
    }

    /// Regularized block for touching pairs with `q` points per variable.
    pub fn singular_block<K: Kernel>(
        &self,
        kernel: &K,
        geom: &PairGeometry,
        a: usize,
        b: usize,
        q: usize,
        out: &mut [K::Scalar],
    ) -> Result<()> {
        if !(self.mesh.is_smooth(a) && self.mesh.is_smooth(b)) {
            return self.split_singular_block(kernel, a, b, q, out);
        }
        let p = self.degree;
        let n = self.local_dim();
        let rule = canonical_rule(geom.class, q)?;
        out.fill(K::Scalar::zero());
        let (mut ax, mut ay, mut bx, mut by) = (
            [0.0; MAX_DEGREE + 1],
            [0.0; MAX_DEGREE + 1],
            [0.0; MAX_DEGREE + 1],
            [0.0; MAX_DEGREE + 1],
        );
        let mut fa = vec![0.0; n];
        let mut fb = vec![0.0; n];
        for pt in rule {
            let la = geom.map_a.apply(pt.x);
            let lb = geom.map_b.apply(pt.y);
            let (xa, ma) = self.mesh.eval_local(a, la[0], la[1]);
            let (xb, mb) = self.mesh.eval_local(b, lb[0], lb[1]);
            let r = dist(xa, xb);
            if r < SINGULARITY_GUARD {
                return Err(Error::Singularity { distance: r });
            }
            let val = kernel.eval_dist(r) * (pt.w * ma * mb);
            if p == 0 {
                out[0] += val;
                continue;
            }
            bernstein_all(p, la[0], &mut ax);
            bernstein_all(p, la[1], &mut ay);
            bernstein_all(p, lb[0], &mut bx);
            bernstein_all(p, lb[1], &mut by);
            for j in 0..=p {
                for i in 0..=p {
                    fa[i + (p + 1) * j] = ax[i] * ay[j];
                    fb[i + (p + 1) * j] = bx[i] * by[j];
                }
            }
            for (ia, &f) in fa.iter().enumerate() {
                let s = val * f;
                for (o, &g) in out[ia * n..(ia + 1) * n].iter_mut().zip(&fb) {
                    *o += s * g;
                }
            }
        }
        Ok(())
    }

    /// Touching pair with kinks inside an element: the sum over all pairs of
    /// smooth subcells, each pair classified by its shared corners.
    fn split_singular_block<K: Kernel>(
        &self,
        kernel: &K,
        a: usize,
        b: usize,
        q: usize,
        out: &mut [K::Scalar],
    ) -> Result<()> {
        let n = self.local_dim();
        let cells_a = self.mesh.subcells(a);
        let cells_b = self.mesh.subcells(b);
        let tol = 1e-10 * self.mesh.diameter(a).max(self.mesh.diameter(b));
        let mut registry: Vec<Vec3> = Vec::new();
        let mut corner_ids = |e: usize, c: &[f64; 4]| -> ([usize; 4], Aabb) {
            let mut bbox = Aabb::empty();
            let ids = [[c[0], c[2]], [c[1], c[2]], [c[1], c[3]], [c[0], c[3]]].map(|[s, t]| {
                let x = self.mesh.eval_local(e, s, t).0;
                bbox.insert(x);
                match registry.iter().position(|&y| dist(x, y) <= tol) {
                    Some(i) => i,
                    None => {
                        registry.push(x);
                        registry.len() - 1
                    }
                }
            });
            (ids, bbox)
        };
        let ids_a: Vec<_> = cells_a.iter().map(|c| corner_ids(a, c)).collect();
        let ids_b: Vec<_> = cells_b.iter().map(|c| corner_ids(b, c)).collect();
        out.fill(K::Scalar::zero());
        let mut tmp = vec![K::Scalar::zero(); n * n];
        for (ca, (ia, ba)) in cells_a.iter().zip(&ids_a) {
            for (cb, (ib, bb)) in cells_b.iter().zip(&ids_b) {
                let geom = if ia == ib {
                    PairGeometry {
                        class: PairClass::Coincident,
                        map_a: Dihedral::IDENTITY,
                        map_b: Dihedral::IDENTITY,
                    }
                } else {
                    pair_from_corners(ia, ib)?
                };
                let sub = SubcellPair { a, b, ca, cb };
                match geom.class {
                    PairClass::Distant => {
                        let delta = ba.distance(bb) / ba.diameter().max(bb.diameter());
                        let order = self.config.distant_order(delta)?;
                        self.subcell_gauss_block(kernel, &sub, order, &mut tmp)?;
                    }
                    _ => self.subcell_singular_block(kernel, &geom, &sub, q, &mut tmp)?,
                }
                for (o, &t) in out.iter_mut().zip(&tmp) {
                    *o += t;
                }
            }
        }
        Ok(())
    }

    fn basis(&self, s: f64, t: f64, out: &mut [f64]) {
        let p = self.degree;
        let (mut bx, mut by) = ([0.0; MAX_DEGREE + 1], [0.0; MAX_DEGREE + 1]);
        bernstein_all(p, s, &mut bx);
        bernstein_all(p, t, &mut by);
        for b in 0..=p {
            for a in 0..=p {
                out[a + (p + 1) * b] = bx[a] * by[b];
            }
        }
    }

    fn subcell_gauss_block<K: Kernel>(
        &self,
        kernel: &K,
        sub: &SubcellPair<'_>,
        q: usize,
        out: &mut [K::Scalar],
    ) -> Result<()> {
        let n = self.local_dim();
        let g = gauss_rule(q)?;
        let sample = |e: usize, c: &[f64; 4]| {
            let area = (c[1] - c[0]) * (c[3] - c[2]);
            let mut pts = Vec::with_capacity(q * q);
            let mut phi = vec![0.0; q * q * n];
            for (t, wt) in g.iter() {
                for (s, ws) in g.iter() {
                    let (ls, lt) = (c[0] + (c[1] - c[0]) * s, c[2] + (c[3] - c[2]) * t);
                    let (x, m) = self.mesh.eval_local(e, ls, lt);
                    let k = pts.len();
                    self.basis(ls, lt, &mut phi[k * n..(k + 1) * n]);
                    pts.push((x, ws * wt * area * m));
                }
            }
            (pts, phi)
        };
        let (pa, fa) = sample(sub.a, sub.ca);
        let (pb, fb) = sample(sub.b, sub.cb);
        out.fill(K::Scalar::zero());
        let mut row = vec![K::Scalar::zero(); n];
        for (i, &(xa, wa)) in pa.iter().enumerate() {
            row.fill(K::Scalar::zero());
            for (j, &(xb, wb)) in pb.iter().enumerate() {
                let r = dist(xa, xb);
                if r < SINGULARITY_GUARD {
                    return Err(Error::Singularity { distance: r });
                }
                let k = kernel.eval_dist(r) * wb;
                for (acc, &f) in row.iter_mut().zip(&fb[j * n..(j + 1) * n]) {
                    *acc += k * f;
                }
            }
            for (ia, &f) in fa[i * n..(i + 1) * n].iter().enumerate() {
                let s = wa * f;
                for (o, &r) in out[ia * n..(ia + 1) * n].iter_mut().zip(&row) {
                    *o += r * s;
                }
            }
        }
        Ok(())
    }

    fn subcell_singular_block<K: Kernel>(
        &self,
        kernel: &K,
        geom: &PairGeometry,
        sub: &SubcellPair<'_>,
        q: usize,
        out: &mut [K::Scalar],
    ) -> Result<()> {
        let n = self.local_dim();
        let rule = canonical_rule(geom.class, q)?;
        let (ca, cb) = (sub.ca, sub.cb);
        let scale = (ca[1] - ca[0]) * (ca[3] - ca[2]) * (cb[1] - cb[0]) * (cb[3] - cb[2]);
        let mut fa = vec![0.0; n];
        let mut fb = vec![0.0; n];
        out.fill(K::Scalar::zero());
        for pt in rule {
            let la = geom.map_a.apply(pt.x);
            let lb = geom.map_b.apply(pt.y);
            let (sa, ta) = (
                ca[0] + (ca[1] - ca[0]) * la[0],
                ca[2] + (ca[3] - ca[2]) * la[1],
            );
            let (sb, tb) = (
                cb[0] + (cb[1] - cb[0]) * lb[0],
                cb[2] + (cb[3] - cb[2]) * lb[1],
            );
            let (xa, ma) = self.mesh.eval_local(sub.a, sa, ta);
            let (xb, mb) = self.mesh.eval_local(sub.b, sb, tb);
            let r = dist(xa, xb);
            if r < SINGULARITY_GUARD {
                return Err(Error::Singularity { distance: r });
            }
            let val = kernel.eval_dist(r) * (pt.w * scale * ma * mb);
            self.basis(sa, ta, &mut fa);
            self.basis(sb, tb, &mut fb);
            for (ia, &f) in fa.iter().enumerate() {
                let s = val * f;
                for (o, &g) in out[ia * n..(ia + 1) * n].iter_mut().zip(&fb) {
                    *o += s * g;
                }
            }
        }
        Ok(())
    }
}
