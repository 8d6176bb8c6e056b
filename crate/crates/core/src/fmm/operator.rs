//! The compressed single-layer operator: element-pair near field plus an
//! interpolation-based far field with nested cluster bases.

use rayon::prelude::*;

use super::interpolation::Chebyshev;
use super::tree::{ClusterTree, Partition};
use crate::error::{Error, Result};
use crate::geometry::perturbation_derivative;
use crate::kernel::Kernel;
use crate::mesh::{hier_coords, ClusterId, CHILD_OFFSETS};
use crate::operator::{check_dims, LinearOperator};
use crate::quadrature::{gauss_rule, PairIntegrator};
use crate::scalar::Scalar;
use crate::spline::{bernstein_all, MAX_DEGREE};
use crate::vec3::{cross, dist, norm, Vec3};

/// Parameters of the compression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FmmConfig {
    /// Admissibility parameter: clusters are separated when
    /// `max(diam) < eta dist`.
    pub eta: f64,
    /// Polynomial degree of the kernel interpolation per direction.
    pub interp_degree: usize,
    /// Integrate every element pair instead of compressing.
    pub dense_fallback: bool,
    /// Compress only blocks whose coupling matrix is smaller than the dense
    /// block it replaces; otherwise compress every admissible block.
    pub size_check: bool,
}

impl FmmConfig {
    pub fn for_degree(p: usize) -> Self {
        FmmConfig {
            eta: 0.8,
            interp_degree: (2 * p + 2).max(6),
            dense_fallback: false,
            size_check: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::Config(format!(
                "fmm.eta must lie in (0, 1), got {}",
                self.eta
            )));
        }
        if self.interp_degree > 30 {
            return Err(Error::Config(format!(
                "fmm.interp_degree {} is unreasonably large",
                self.interp_degree
            )));
        }
        Ok(())
    }
}

/// Upper-triangular element-pair blocks in compressed sparse row layout,
/// with a column index for the mirrored lower triangle.
#[derive(Clone, Debug)]
pub struct NearField<S> {
    local_dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    blocks: Vec<S>,
    col_ptr: Vec<usize>,
    col_rows: Vec<u32>,
    col_blocks: Vec<u32>,
}

impl<S: Scalar> NearField<S> {
    /// Integrates the sorted pairs `(a, b)`, `a <= b`.
    pub fn assemble<K: Kernel<Scalar = S>>(
        integ: &PairIntegrator,
        kernel: &K,
        pairs: &[(usize, usize)],
    ) -> Result<Self> {
        let n = integ.local_dim();
        let ne = integ.mesh().num_elements();
        let mut blocks = vec![S::zero(); pairs.len() * n * n];
        blocks
            .par_chunks_mut(n * n)
            .zip(pairs.par_iter())
            .try_for_each(|(out, &(a, b))| integ.pair_block(kernel, a, b, out).map(|_| ()))?;
        Ok(Self::from_blocks(n, ne, pairs, blocks))
    }

    fn from_blocks(n: usize, ne: usize, pairs: &[(usize, usize)], blocks: Vec<S>) -> Self {
        let mut row_ptr = vec![0; ne + 1];
        let mut col_count = vec![0; ne + 1];
        for &(a, b) in pairs {
            row_ptr[a + 1] += 1;
            if a != b {
                col_count[b + 1] += 1;
            }
        }
        for i in 0..ne {
            row_ptr[i + 1] += row_ptr[i];
            col_count[i + 1] += col_count[i];
        }
        let col_ptr = col_count.clone();
        let mut fill = col_count;
        let mut col_rows = vec![0; col_ptr[ne]];
        let mut col_blocks = vec![0; col_ptr[ne]];
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if a != b {
                col_rows[fill[b]] = a as u32;
                col_blocks[fill[b]] = k as u32;
                fill[b] += 1;
            }
        }
        NearField {
            local_dim: n,
            row_ptr,
            cols: pairs.iter().map(|&(_, b)| b as u32).collect(),
            blocks,
            col_ptr,
            col_rows,
            col_blocks,
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.cols.len()
    }

    pub fn memory_bytes(&self) -> usize {
        self.blocks.len() * std::mem::size_of::<S>()
            + (self.cols.len() + 2 * self.col_rows.len()) * 4
    }

    /// The block of element pair `(a, b)`, transposed when only `(b, a)` is
    /// stored.
    pub fn block(&self, a: usize, b: usize) -> Option<(&[S], bool)> {
        let (r, c, t) = if a <= b { (a, b, false) } else { (b, a, true) };
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        let k = self.cols[range.clone()].binary_search(&(c as u32)).ok()? + range.start;
        let nn = self.local_dim * self.local_dim;
        Some((&self.blocks[k * nn..(k + 1) * nn], t))
    }

    /// `y += A_near x`.
    pub fn apply_add(&self, x: &[S], y: &mut [S]) {
        let n = self.local_dim;
        let nn = n * n;
        y.par_chunks_mut(n).enumerate().for_each(|(a, ya)| {
            for k in self.row_ptr[a]..self.row_ptr[a + 1] {
                let b = self.cols[k] as usize;
                let blk = &self.blocks[k * nn..(k + 1) * nn];
                let xb = &x[b * n..(b + 1) * n];
                for (i, yi) in ya.iter_mut().enumerate() {
                    *yi += blk[i * n..(i + 1) * n]
                        .iter()
                        .zip(xb)
                        .map(|(&u, &v)| u * v)
                        .sum::<S>();
                }
            }
            for k in self.col_ptr[a]..self.col_ptr[a + 1] {
                let r = self.col_rows[k] as usize;
                let id = self.col_blocks[k] as usize;
                let blk = &self.blocks[id * nn..(id + 1) * nn];
                let xr = &x[r * n..(r + 1) * n];
                for (i, &xi) in xr.iter().enumerate() {
                    for (yj, &u) in ya.iter_mut().zip(&blk[i * n..(i + 1) * n]) {
                        *yj += u * xi;
                    }
                }
            }
        });
    }
}

/// Far-field blocks `M_a K_ab M_b^T` with moments of Lagrange polynomials
/// against the local Bernstein basis.
#[derive(Clone, Debug)]
pub struct FarField<S> {
    interp: Chebyshev,
    local_dim: usize,
    depth: u32,
    num_patches: usize,
    min_level: u32,
    max_level: u32,
    nested: bool,
    /// Moments of clusters at relative depth `d`, used for levels
    /// `depth - d`: rows `j * local_dim + i`, column `m`.
    moments: Vec<Option<Vec<f64>>>,
    /// Moments specific to each cluster of a level, used instead of the
    /// shared ones on reparametrized surfaces: cluster `c` owns the slice
    /// `c * rows * nq..`.
    local_moments: Vec<Option<Vec<f64>>>,
    /// `transfer[c][mc * nq + mp]`.
    transfer: [Vec<f64>; 4],
    blocks: Vec<(ClusterId, ClusterId)>,
    couplings: Vec<S>,
    /// Per level and target cluster: `(block, transposed)`.
    targets: Vec<Vec<Vec<(u32, bool)>>>,
}

impl<S: Scalar> FarField<S> {
    /// Builds the far field for `blocks`; `coupling(a, b, out)` writes the
    /// cluster-localized kernel at the interpolation points,
    /// `out[m * nq + m'] = k_ab(z_m, z_m')`.
    pub fn build(
        tree: &ClusterTree,
        degree: usize,
        interp_degree: usize,
        blocks: Vec<(ClusterId, ClusterId)>,
        nested: bool,
        coupling: impl Fn(ClusterId, ClusterId, &mut [S]) + Sync,
    ) -> Self {
        let interp = Chebyshev::new(interp_degree);
        let nq = interp.len_2d();
        let depth = tree.depth();
        let min_level = blocks.iter().map(|b| b.0.level).min().unwrap_or(0);
        let max_level = blocks.iter().map(|b| b.0.level).max().unwrap_or(0);
        let mut moments = vec![None; depth as usize + 1];
        for level in min_level..=max_level {
            if nested && level != max_level {
                continue;
            }
            let d = (depth - level) as usize;
            moments[d] = Some(cluster_moments(&interp, degree, d as u32));
        }
        let transfer = std::array::from_fn(|c| {
            let (ox, oy) = CHILD_OFFSETS[c];
            let mut e = vec![0.0; nq * nq];
            let mut l = vec![0.0; nq];
            for mc in 0..nq {
                let z = interp.node_2d(mc);
                interp.lagrange_2d([0.5 * (ox as f64 + z[0]), 0.5 * (oy as f64 + z[1])], &mut l);
                for mp in 0..nq {
                    e[mc * nq + mp] = 0.25 * l[mp];
                }
            }
            e
        });
        let mut couplings = vec![S::zero(); blocks.len() * nq * nq];
        couplings
            .par_chunks_mut(nq * nq)
            .zip(blocks.par_iter())
            .for_each(|(out, &(a, b))| coupling(a, b, out));
        let mut targets: Vec<Vec<Vec<(u32, bool)>>> = (0..=depth)
            .map(|l| vec![Vec::new(); tree.num_clusters(l)])
            .collect();
        for (k, &(a, b)) in blocks.iter().enumerate() {
            targets[a.level as usize][a.flat_index()].push((k as u32, false));
            targets[b.level as usize][b.flat_index()].push((k as u32, true));
        }
        FarField {
            interp,
            local_dim: (degree + 1) * (degree + 1),
            depth,
            num_patches: tree.num_patches(),
            min_level,
            max_level,
            nested,
            moments,
            local_moments: vec![None; depth as usize + 1],
            transfer,
            blocks,
            couplings,
            targets,
        }
    }

    /// Far field of a translation-invariant kernel on the tree's surface.
    pub fn with_kernel<K: Kernel<Scalar = S>>(
        tree: &ClusterTree,
        degree: usize,
        interp_degree: usize,
        blocks: Vec<(ClusterId, ClusterId)>,
        kernel: &K,
    ) -> Self {
        let interp = Chebyshev::new(interp_degree);
        let nq = interp.len_2d();
        let surface = tree.mesh().surface();
        // Interpolation points and weights (area factor times measure) per
        // cluster of every level holding blocks.
        let levels: Vec<u32> = {
            let mut l: Vec<u32> = blocks.iter().map(|b| b.0.level).collect();
            l.sort_unstable();
            l.dedup();
            l
        };
        if surface.is_perturbed() {
            return Self::with_kernel_reparametrized(tree, degree, interp, blocks, kernel);
        }
        let mut samples: Vec<Vec<(Vec3, f64)>> = vec![Vec::new(); tree.depth() as usize + 1];
        for &level in &levels {
            let count = tree.num_clusters(level);
            samples[level as usize] = (0..count * nq)
                .into_par_iter()
                .map(|k| {
                    let c = tree.cluster(level, k / nq);
                    let z = interp.node_2d(k % nq);
                    let [x0, y0] = c.origin();
                    let h = c.size();
                    let (pt, m) = surface.eval_with_measure(c.patch, x0 + h * z[0], y0 + h * z[1]);
                    (pt, m * h * h)
                })
                .collect();
        }
        Self::build(tree, degree, interp_degree, blocks, true, |a, b, out| {
            couple(kernel, &samples, nq, a, b, out)
        })
    }

    /// Far field on a surface whose patch maps are composed with a
    /// piecewise linear reparametrization `f`. The kernel is interpolated in
    /// the smooth NURBS parameter `u = f(x)`, so every cluster carries its
    /// own moments `int B_i(x) L_m(f(x)) f'(x_1) f'(x_2) dx`.
    fn with_kernel_reparametrized<K: Kernel<Scalar = S>>(
        tree: &ClusterTree,
        degree: usize,
        interp: Chebyshev,
        blocks: Vec<(ClusterId, ClusterId)>,
        kernel: &K,
    ) -> Self {
        let nq = interp.len_2d();
        let mesh = tree.mesh();
        let surface = mesh.surface();
        let depth = tree.depth();
        let nl = (degree + 1) * (degree + 1);
        let order = (degree + interp.degree()) / 2 + 2;
        // Parameter box of a cluster in the NURBS parameter.
        let ubox = |c: ClusterId| {
            let [x0, y0] = c.origin();
            let h = c.size();
            let (u0, v0) = (surface.reparam(x0), surface.reparam(y0));
            [
                u0,
                v0,
                surface.reparam(x0 + h) - u0,
                surface.reparam(y0 + h) - v0,
            ]
        };
        let mut samples: Vec<Vec<(Vec3, f64)>> = vec![Vec::new(); depth as usize + 1];
        let mut local = vec![None; depth as usize + 1];
        let min_level = blocks.iter().map(|b| b.0.level).min().unwrap_or(0);
        let max_level = blocks.iter().map(|b| b.0.level).max().unwrap_or(0);
        let levels = if blocks.is_empty() {
            1..=0
        } else {
            min_level..=max_level
        };
        for level in levels {
            let count = tree.num_clusters(level);
            samples[level as usize] = (0..count * nq)
                .into_par_iter()
                .map(|k| {
                    let c = tree.cluster(level, k / nq);
                    let z = interp.node_2d(k % nq);
                    let [u0, v0, hu, hv] = ubox(c);
                    let (pt, du, dv) =
                        surface.patches()[c.patch].eval_derivatives(u0 + hu * z[0], v0 + hv * z[1]);
                    (pt, norm(cross(du, dv)) * hu * hv)
                })
                .collect();
            let per = 1usize << (2 * (depth - level));
            let rows = per * nl;
            let mut m = vec![0.0; count * rows * nq];
            m.par_chunks_mut(rows * nq)
                .enumerate()
                .for_each(|(ci, out)| {
                    let c = tree.cluster(level, ci);
                    let [u0, v0, hu, hv] = ubox(c);
                    let (mut bx, mut by) = ([0.0; MAX_DEGREE + 1], [0.0; MAX_DEGREE + 1]);
                    let mut l = vec![0.0; nq];
                    let h2 = mesh.h() * mesh.h();
                    for j in 0..per {
                        let e = ci * per + j;
                        let rule = mesh.element_rule(e, order).expect("small order");
                        for ([s, t], w) in rule {
                            bernstein_all(degree, s, &mut bx);
                            bernstein_all(degree, t, &mut by);
                            let (x, y) = mesh.to_patch(e, s, t);
                            let (u, v) = (surface.reparam(x), surface.reparam(y));
                            interp.lagrange_2d([(u - u0) / hu, (v - v0) / hv], &mut l);
                            let jac = perturbation_derivative(x) * perturbation_derivative(y);
                            let w = w * h2 * jac / (hu * hv);
                            for b in 0..=degree {
                                for a in 0..=degree {
                                    let f = w * bx[a] * by[b];
                                    let r = j * nl + a + (degree + 1) * b;
                                    for (o, &lm) in out[r * nq..(r + 1) * nq].iter_mut().zip(&l) {
                                        *o += f * lm;
                                    }
                                }
                            }
                        }
                    }
                });
            local[level as usize] = Some(m);
        }
        let mut far = Self::build(
            tree,
            degree,
            interp.degree(),
            Vec::new(),
            false,
            |_, _, _| {},
        );
        let mut couplings = vec![S::zero(); blocks.len() * nq * nq];
        couplings
            .par_chunks_mut(nq * nq)
            .zip(blocks.par_iter())
            .for_each(|(out, &(a, b))| couple(kernel, &samples, nq, a, b, out));
        for (k, &(a, b)) in blocks.iter().enumerate() {
            far.targets[a.level as usize][a.flat_index()].push((k as u32, false));
            far.targets[b.level as usize][b.flat_index()].push((k as u32, true));
        }
        far.min_level = min_level;
        far.max_level = max_level;
        far.blocks = blocks;
        far.couplings = couplings;
        far.moments = vec![None; depth as usize + 1];
        far.local_moments = local;
        far
    }

    /// Same blocks and couplings, but explicit moments on every level
    /// instead of transfers.
    pub fn to_explicit(&self) -> Self {
        let mut out = self.clone();
        out.nested = false;
        for level in self.min_level..=self.max_level {
            let d = (self.depth - level) as usize;
            if out.moments[d].is_none() && out.local_moments[level as usize].is_none() {
                out.moments[d] = Some(cluster_moments(&self.interp, self.degree(), d as u32));
            }
        }
        out
    }

    fn degree(&self) -> usize {
        (self.local_dim as f64).sqrt().round() as usize - 1
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[(ClusterId, ClusterId)] {
        &self.blocks
    }

    pub fn memory_bytes(&self) -> usize {
        let moments: usize = self
            .moments
            .iter()
            .chain(&self.local_moments)
            .flatten()
            .map(Vec::len)
            .sum();
        self.couplings.len() * std::mem::size_of::<S>() + (moments + 4 * self.transfer[0].len()) * 8
    }

    fn clusters(&self, level: u32) -> usize {
        self.num_patches << (2 * level)
    }

    /// Moments of cluster `c` of `level`, rows `r * nq..(r + 1) * nq`.
    fn cluster_moments(&self, level: u32, c: usize) -> &[f64] {
        if let Some(m) = &self.local_moments[level as usize] {
            let size = (self.local_dim << (2 * (self.depth - level))) * self.interp.len_2d();
            return &m[c * size..(c + 1) * size];
        }
        self.moments[(self.depth - level) as usize]
            .as_ref()
            .expect("moments present")
    }

    /// `x_hat = M^T x` for every cluster of `level`.
    fn gather(&self, level: u32, x: &[S]) -> Vec<S> {
        let nq = self.interp.len_2d();
        let rows = self.local_dim << (2 * (self.depth - level));
        let mut out = vec![S::zero(); self.clusters(level) * nq];
        out.par_chunks_mut(nq).enumerate().for_each(|(c, o)| {
            let m = self.cluster_moments(level, c);
            for (r, &xr) in x[c * rows..(c + 1) * rows].iter().enumerate() {
                for (oo, &mv) in o.iter_mut().zip(&m[r * nq..(r + 1) * nq]) {
                    *oo += xr * mv;
                }
            }
        });
        out
    }

    /// `y += M y_hat` for every cluster of `level`.
    fn scatter(&self, level: u32, yh: &[S], y: &mut [S]) {
        let nq = self.interp.len_2d();
        let rows = self.local_dim << (2 * (self.depth - level));
        y.par_chunks_mut(rows).enumerate().for_each(|(c, yc)| {
            let m = self.cluster_moments(level, c);
            let h = &yh[c * nq..(c + 1) * nq];
            for (r, yr) in yc.iter_mut().enumerate() {
                *yr += m[r * nq..(r + 1) * nq]
                    .iter()
                    .zip(h)
                    .map(|(&a, &b)| b * a)
                    .sum::<S>();
            }
        });
    }

    /// `y += A_far x`.
    pub fn apply_add(&self, x: &[S], y: &mut [S]) {
        if self.blocks.is_empty() {
            return;
        }
        let nq = self.interp.len_2d();
        let nn = nq * nq;
        let levels = self.min_level..=self.max_level;
        let mut xs: Vec<Vec<S>> = vec![Vec::new(); self.depth as usize + 1];
        if self.nested {
            xs[self.max_level as usize] = self.gather(self.max_level, x);
            for level in (self.min_level..self.max_level).rev() {
                let child = &xs[level as usize + 1];
                let mut parent = vec![S::zero(); self.clusters(level) * nq];
                parent.par_chunks_mut(nq).enumerate().for_each(|(p, o)| {
                    for (c, e) in self.transfer.iter().enumerate() {
                        let xc = &child[(4 * p + c) * nq..(4 * p + c + 1) * nq];
                        for (mc, &v) in xc.iter().enumerate() {
                            for (oo, &t) in o.iter_mut().zip(&e[mc * nq..(mc + 1) * nq]) {
                                *oo += v * t;
                            }
                        }
                    }
                });
                xs[level as usize] = parent;
            }
        } else {
            for level in levels.clone() {
                xs[level as usize] = self.gather(level, x);
            }
        }
        let mut ys: Vec<Vec<S>> = vec![Vec::new(); self.depth as usize + 1];
        for level in levels.clone() {
            let src = &xs[level as usize];
            let mut out = vec![S::zero(); self.clusters(level) * nq];
            out.par_chunks_mut(nq).enumerate().for_each(|(t, o)| {
                for &(k, transposed) in &self.targets[level as usize][t] {
                    let (a, b) = self.blocks[k as usize];
                    let kk = &self.couplings[k as usize * nn..(k as usize + 1) * nn];
                    if transposed {
                        let xa = &src[a.flat_index() * nq..(a.flat_index() + 1) * nq];
                        for (m, &v) in xa.iter().enumerate() {
                            for (oo, &kv) in o.iter_mut().zip(&kk[m * nq..(m + 1) * nq]) {
                                *oo += kv * v;
                            }
                        }
                    } else {
                        let xb = &src[b.flat_index() * nq..(b.flat_index() + 1) * nq];
                        for (m, oo) in o.iter_mut().enumerate() {
                            *oo += kk[m * nq..(m + 1) * nq]
                                .iter()
                                .zip(xb)
                                .map(|(&kv, &v)| kv * v)
                                .sum::<S>();
                        }
                    }
                }
            });
            ys[level as usize] = out;
        }
        if self.nested {
            for level in self.min_level..self.max_level {
                let parent = std::mem::take(&mut ys[level as usize]);
                let child = &mut ys[level as usize + 1];
                child.par_chunks_mut(nq).enumerate().for_each(|(ci, o)| {
                    let e = &self.transfer[ci % 4];
                    let yp = &parent[(ci / 4) * nq..(ci / 4 + 1) * nq];
                    for (mc, oo) in o.iter_mut().enumerate() {
                        *oo += e[mc * nq..(mc + 1) * nq]
                            .iter()
                            .zip(yp)
                            .map(|(&t, &v)| v * t)
                            .sum::<S>();
                    }
                });
            }
            self.scatter(self.max_level, &ys[self.max_level as usize], y);
        } else {
            for level in levels {
                self.scatter(level, &ys[level as usize], y);
            }
        }
    }
}

/// Kernel between the weighted interpolation points of two clusters.
fn couple<K: Kernel>(
    kernel: &K,
    samples: &[Vec<(Vec3, f64)>],
    nq: usize,
    a: ClusterId,
    b: ClusterId,
    out: &mut [K::Scalar],
) {
    let sa = &samples[a.level as usize][a.flat_index() * nq..(a.flat_index() + 1) * nq];
    let sb = &samples[b.level as usize][b.flat_index() * nq..(b.flat_index() + 1) * nq];
    for (row, &(xa, wa)) in out.chunks_mut(nq).zip(sa) {
        for (o, &(xb, wb)) in row.iter_mut().zip(sb) {
            *o = kernel.eval_dist(dist(xa, xb)) * (wa * wb);
        }
    }
}

/// Moments `int L_m(x) B_i(x) dx` over the clusters of relative depth `d`,
/// in cluster coordinates: rows `j * (p+1)^2 + i` for the `j`-th element of
/// the cluster in quadtree order.
fn cluster_moments(interp: &Chebyshev, p: usize, d: u32) -> Vec<f64> {
    let nq = interp.len_2d();
    let nl = (p + 1) * (p + 1);
    let per = 1usize << (2 * d);
    let scale = 1.0 / (1u64 << d) as f64;
    let g = gauss_rule((p + interp.degree()) / 2 + 2).expect("small order");
    let mut out = vec![0.0; per * nl * nq];
    let (mut bx, mut by) = ([0.0; MAX_DEGREE + 1], [0.0; MAX_DEGREE + 1]);
    let mut l = vec![0.0; nq];
    out.chunks_mut(nl * nq).enumerate().for_each(|(j, rows)| {
        let (ox, oy) = hier_coords(j as u32, d);
        for (t, wt) in g.iter() {
            bernstein_all(p, t, &mut by);
            for (s, ws) in g.iter() {
                bernstein_all(p, s, &mut bx);
                interp.lagrange_2d([(ox as f64 + s) * scale, (oy as f64 + t) * scale], &mut l);
                let w = ws * wt * scale * scale;
                for b in 0..=p {
                    for a in 0..=p {
                        let f = w * bx[a] * by[b];
                        let row = &mut rows[(a + (p + 1) * b) * nq..(a + (p + 1) * b + 1) * nq];
                        for (r, &lm) in row.iter_mut().zip(&l) {
                            *r += f * lm;
                        }
                    }
                }
            }
        }
    });
    out
}

/// Summary of a compressed operator.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FmmStats {
    pub near_blocks: usize,
    pub far_blocks: usize,
    pub near_bytes: usize,
    pub far_bytes: usize,
}

/// Single-layer Galerkin matrix on the superspace in compressed form.
pub struct CompressedOperator<S> {
    dim: usize,
    near: NearField<S>,
    far: FarField<S>,
}

impl<S: Scalar> CompressedOperator<S> {
    /// Partitions, integrates the near field and sets up the far field. A
    /// block is compressed only where the interpolation is smaller than the
    /// dense block it replaces.
    pub fn assemble<K: Kernel<Scalar = S>>(
        integ: &PairIntegrator,
        kernel: &K,
        config: &FmmConfig,
    ) -> Result<Self> {
        config.validate()?;
        let tree = ClusterTree::new(integ.mesh_arc().clone());
        let nl = integ.local_dim();
        let nq = (config.interp_degree + 1) * (config.interp_degree + 1);
        let depth = tree.depth();
        let compress = |level: u32| {
            !config.dense_fallback && (!config.size_check || (nl << (2 * (depth - level))) > nq)
        };
        let part = Partition::new(&tree, config.eta, compress);
        let near = NearField::assemble(integ, kernel, &part.near)?;
        let far = FarField::with_kernel(
            &tree,
            integ.degree(),
            config.interp_degree,
            part.far,
            kernel,
        );
        Ok(CompressedOperator {
            dim: integ.mesh().num_elements() * nl,
            near,
            far,
        })
    }

    pub fn near(&self) -> &NearField<S> {
        &self.near
    }

    pub fn far(&self) -> &FarField<S> {
        &self.far
    }

    pub fn stats(&self) -> FmmStats {
        FmmStats {
            near_blocks: self.near.num_blocks(),
            far_blocks: self.far.num_blocks(),
            near_bytes: self.near.memory_bytes(),
            far_bytes: self.far.memory_bytes(),
        }
    }
}

impl<S: Scalar> LinearOperator<S> for CompressedOperator<S> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_into(&self, x: &[S], y: &mut [S]) -> Result<()> {
        check_dims(self.dim, x.len(), y.len())?;
        y.fill(S::zero());
        self.near.apply_add(x, y);
        self.far.apply_add(x, y);
        Ok(())
    }
}
