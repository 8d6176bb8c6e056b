//! Uniformly refined element meshes with hierarchical (quadtree) ordering.
//!
//! At level `m` every patch is split into `4^m` square elements. Elements
//! of one patch are numbered by their quadtree index: the children of index
//! `k` are `4k, ..., 4k + 3`, visiting the sub-squares counterclockwise
//! starting at the lower left. Consequently the elements of every cluster
//! form a contiguous index range.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{BezierCell, Surface};
use crate::quadrature::composite_rule;
use crate::vec3::{Aabb, Vec3};

/// Child offsets in counterclockwise order.
pub const CHILD_OFFSETS: [(u32, u32); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

/// Quadtree index of cell `(ix, iy)` at `level`.
pub fn hier_index(ix: u32, iy: u32, level: u32) -> u32 {
    let mut k = 0;
    for l in (0..level).rev() {
        let bx = (ix >> l) & 1;
        let by = (iy >> l) & 1;
        let c = match (bx, by) {
            (0, 0) => 0,
            (1, 0) => 1,
            (1, 1) => 2,
            _ => 3,
        };
        k = 4 * k + c;
    }
    k
}

/// Inverse of [`hier_index`].
pub fn hier_coords(k: u32, level: u32) -> (u32, u32) {
    let (mut ix, mut iy) = (0, 0);
    for l in (0..level).rev() {
        let c = (k >> (2 * l)) & 3;
        let (bx, by) = CHILD_OFFSETS[c as usize];
        ix = 2 * ix + bx;
        iy = 2 * iy + by;
    }
    (ix, iy)
}

/// A dyadic sub-square of one patch, identified by `(patch, level, index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClusterId {
    pub patch: usize,
    pub level: u32,
    pub index: u32,
}

impl ClusterId {
    pub fn new(patch: usize, level: u32, index: u32) -> Self {
        ClusterId {
            patch,
            level,
            index,
        }
    }

    pub fn root(patch: usize) -> Self {
        ClusterId::new(patch, 0, 0)
    }

    pub fn children(&self) -> [ClusterId; 4] {
        let k = 4 * self.index;
        [0, 1, 2, 3].map(|c| ClusterId::new(self.patch, self.level + 1, k + c))
    }

    pub fn parent(&self) -> Option<ClusterId> {
        (self.level > 0).then(|| ClusterId::new(self.patch, self.level - 1, self.index / 4))
    }

    /// Grid coordinates of the sub-square at its level.
    pub fn coords(&self) -> (u32, u32) {
        hier_coords(self.index, self.level)
    }

    /// Side length in the reference square.
    pub fn size(&self) -> f64 {
        1.0 / (1u64 << self.level) as f64
    }

    /// Lower left corner in the reference square.
    pub fn origin(&self) -> [f64; 2] {
        let (ix, iy) = self.coords();
        let h = self.size();
        [ix as f64 * h, iy as f64 * h]
    }

    /// Position among all clusters of the same level of a surface.
    pub fn flat_index(&self) -> usize {
        (self.patch << (2 * self.level)) + self.index as usize
    }
}

/// One element of a mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Element {
    pub patch: usize,
    pub ix: u32,
    pub iy: u32,
    /// Vertex ids of the corners at local `(0,0), (1,0), (1,1), (0,1)`.
    pub corners: [usize; 4],
    pub bbox: Aabb,
}

/// Elements of a surface at one refinement level.
#[derive(Clone, Debug)]
pub struct Mesh {
    surface: Arc<Surface>,
    level: u32,
    elements: Vec<Element>,
    num_vertices: usize,
    /// Element maps as rational Bézier patches, when every element is a
    /// single polynomial piece of its patch.
    cells: Option<Vec<BezierCell>>,
}

impl Mesh {
    pub fn new(surface: Arc<Surface>, level: u32) -> Result<Self> {
        if level > 12 {
            return Err(Error::Unsupported(format!(
                "refinement level {level} is too large"
            )));
        }
        let n = 1u32 << level;
        let per_patch = (n as usize) * (n as usize);
        let scale = surface.bounding_box().diameter();
        let mut welder = Welder::new(1e-10 * scale);
        // Vertex ids of the (n+1)^2 grid points of each patch.
        let grid: Vec<Vec<usize>> = (0..surface.num_patches())
            .map(|p| {
                let mut ids = Vec::with_capacity(((n + 1) * (n + 1)) as usize);
                for i in 0..=n {
                    for j in 0..=n {
                        let x = i as f64 / n as f64;
                        let y = j as f64 / n as f64;
                        ids.push(welder.id(surface.eval_point(p, x, y)));
                    }
                }
                ids
            })
            .collect();
        let mut elements = Vec::with_capacity(surface.num_patches() * per_patch);
        let mut cells = (!surface.is_perturbed()).then(Vec::new);
        let breaks: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        for (p, ids) in grid.iter().enumerate() {
            if let Some(all) = cells.as_mut() {
                match surface.patches()[p].bezier_cells(&breaks, &breaks) {
                    Some(pieces) => all.extend((0..per_patch as u32).map(|k| {
                        let (ix, iy) = hier_coords(k, level);
                        pieces[(ix * n + iy) as usize].clone()
                    })),
                    None => cells = None,
                }
            }
            let hulls = surface.cell_hulls(p, level);
            let g = |i: u32, j: u32| ids[(i * (n + 1) + j) as usize];
            for k in 0..per_patch as u32 {
                let (ix, iy) = hier_coords(k, level);
                elements.push(Element {
                    patch: p,
                    ix,
                    iy,
                    corners: [g(ix, iy), g(ix + 1, iy), g(ix + 1, iy + 1), g(ix, iy + 1)],
                    bbox: hulls[(ix * n + iy) as usize],
                });
            }
        }
        Ok(Mesh {
            surface,
            level,
            elements,
            num_vertices: welder.count,
            cells,
        })
    }

    pub fn surface(&self) -> &Surface {
        &self.surface
    }

    pub fn surface_arc(&self) -> &Arc<Surface> {
        &self.surface
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Element side length in the reference square.
    pub fn h(&self) -> f64 {
        1.0 / (1u64 << self.level) as f64
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn elements_per_patch(&self) -> usize {
        1 << (2 * self.level)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn element(&self, e: usize) -> &Element {
        &self.elements[e]
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Global index of the element in cell `(ix, iy)` of `patch`.
    pub fn element_index(&self, patch: usize, ix: u32, iy: u32) -> usize {
        patch * self.elements_per_patch() + hier_index(ix, iy, self.level) as usize
    }

    /// Element containing the reference point `(x, y)` of `patch`, and the
    /// local coordinates within it.
    pub fn locate(&self, patch: usize, x: f64, y: f64) -> (usize, f64, f64) {
        let n = 1u32 << self.level;
        let cell = |t: f64| ((t * n as f64).floor() as u32).min(n - 1);
        let (ix, iy) = (cell(x), cell(y));
        let lx = x * n as f64 - ix as f64;
        let ly = y * n as f64 - iy as f64;
        (self.element_index(patch, ix, iy), lx, ly)
    }

    /// Reference coordinates of the local point `(s, t)` of element `e`.
    #[inline]
    pub fn to_patch(&self, e: usize, s: f64, t: f64) -> (f64, f64) {
        let el = &self.elements[e];
        let h = self.h();
        ((el.ix as f64 + s) * h, (el.iy as f64 + t) * h)
    }

    /// Physical point and area element (with respect to the element's local
    /// coordinates) at local `(s, t)`.
    #[inline]
    pub fn eval_local(&self, e: usize, s: f64, t: f64) -> (Vec3, f64) {
        if let Some(cells) = &self.cells {
            return cells[e].eval_with_measure(s, t);
        }
        let (x, y) = self.to_patch(e, s, t);
        let (pt, m) = self.surface.eval_with_measure(self.elements[e].patch, x, y);
        let h = self.h();
        (pt, m * h * h)
    }

    /// Local break points `0 = s_0 < ... < s_k = 1` of element `e` in each
    /// direction: the element edges and the surface kinks inside.
    pub fn local_breaks(&self, e: usize) -> [Vec<f64>; 2] {
        let el = &self.elements[e];
        let h = self.h();
        [el.ix, el.iy].map(|i| {
            let x0 = i as f64 * h;
            let mut b = vec![0.0];
            for &k in self.surface.kinks() {
                let s = (k - x0) / h;
                if s > 1e-12 && s < 1.0 - 1e-12 {
                    b.push(s);
                }
            }
            b.push(1.0);
            b
        })
    }

    /// Whether the patch map is smooth on all of element `e`.
    pub fn is_smooth(&self, e: usize) -> bool {
        let [s, t] = self.local_breaks(e);
        s.len() == 2 && t.len() == 2
    }

    /// Sub-rectangles `[s0, s1, t0, t1]` of element `e` on which the patch map
    /// is smooth.
    pub fn subcells(&self, e: usize) -> Vec<[f64; 4]> {
        let [bs, bt] = self.local_breaks(e);
        let mut out = Vec::with_capacity((bs.len() - 1) * (bt.len() - 1));
        for t in bt.windows(2) {
            for s in bs.windows(2) {
                out.push([s[0], s[1], t[0], t[1]]);
            }
        }
        out
    }

    /// Tensor Gauss rule with about `q` points per direction on element `e`
    /// in local coordinates, split at kinks. Weights sum to one.
    pub fn element_rule(&self, e: usize, q: usize) -> Result<Vec<([f64; 2], f64)>> {
        let [bs, bt] = self.local_breaks(e);
        let rs = composite_rule(&bs, q)?;
        let rt = composite_rule(&bt, q)?;
        Ok(rt
            .iter()
            .flat_map(|&(t, wt)| rs.iter().map(move |&(s, ws)| ([s, t], ws * wt)))
            .collect())
    }

    /// Element diameter upper bound (box diagonal).
    pub fn diameter(&self, e: usize) -> f64 {
        self.elements[e].bbox.diameter()
    }

    /// Largest element diameter.
    pub fn max_diameter(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| e.bbox.diameter())
            .fold(0.0, f64::max)
    }

    /// The cluster of `level` containing element `e`.
    pub fn cluster_of(&self, e: usize, level: u32) -> ClusterId {
        let per = self.elements_per_patch();
        let k = (e % per) as u32;
        ClusterId::new(e / per, level, k >> (2 * (self.level - level)))
    }

    /// Range of element indices belonging to a cluster.
    pub fn cluster_elements(&self, c: ClusterId) -> std::ops::Range<usize> {
        let shift = 2 * (self.level - c.level);
        let start = c.patch * self.elements_per_patch() + ((c.index as usize) << shift);
        start..start + (1usize << shift)
    }

    /// Vertex ids shared by two elements.
    pub fn shared_vertices(&self, a: usize, b: usize) -> Vec<usize> {
        let ca = &self.elements[a].corners;
        let cb = &self.elements[b].corners;
        let mut out: Vec<usize> = ca.iter().copied().filter(|v| cb.contains(v)).collect();
        out.dedup();
        out
    }
}

/// Merges points closer than a tolerance into common vertex ids.
struct Welder {
    tol: f64,
    cell: f64,
    buckets: HashMap<(i64, i64, i64), Vec<(Vec3, usize)>>,
    count: usize,
}

impl Welder {
    fn new(tol: f64) -> Self {
        Welder {
            tol,
            cell: 10.0 * tol,
            buckets: HashMap::new(),
            count: 0,
        }
    }

    fn key(&self, p: Vec3) -> (i64, i64, i64) {
        let f = |t: f64| (t / self.cell).floor() as i64;
        (f(p[0]), f(p[1]), f(p[2]))
    }

    fn id(&mut self, p: Vec3) -> usize {
        let (kx, ky, kz) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = self.buckets.get(&(kx + dx, ky + dy, kz + dz)) {
                        for (q, id) in list {
                            if crate::vec3::dist(*q, p) <= self.tol {
                                return *id;
                            }
                        }
                    }
                }
            }
        }
        let id = self.count;
        self.count += 1;
        self.buckets.entry((kx, ky, kz)).or_default().push((p, id));
        id
    }
}
