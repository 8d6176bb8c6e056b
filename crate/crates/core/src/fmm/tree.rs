//! Cluster quadtrees and the admissibility partition.

use std::sync::Arc;

use crate::mesh::{hier_index, ClusterId, Mesh};
use crate::vec3::Aabb;

/// Per-patch quadtrees down to the mesh level with bounding boxes of every
/// cluster.
#[derive(Clone, Debug)]
pub struct ClusterTree {
    mesh: Arc<Mesh>,
    /// `boxes[level][patch * 4^level + index]`.
    boxes: Vec<Vec<Aabb>>,
}

impl ClusterTree {
    pub fn new(mesh: Arc<Mesh>) -> Self {
        let surface = mesh.surface();
        let depth = mesh.level();
        let boxes = (0..=depth)
            .map(|level| {
                let n = 1u32 << level;
                let mut out = vec![Aabb::empty(); surface.num_patches() << (2 * level)];
                for patch in 0..surface.num_patches() {
                    let hulls = surface.cell_hulls(patch, level);
                    for ix in 0..n {
                        for iy in 0..n {
                            let c = ClusterId::new(patch, level, hier_index(ix, iy, level));
                            out[c.flat_index()] = hulls[(ix * n + iy) as usize];
                        }
                    }
                }
                out
            })
            .collect();
        ClusterTree { mesh, boxes }
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    /// Leaf level (the mesh level).
    pub fn depth(&self) -> u32 {
        self.mesh.level()
    }

    pub fn num_patches(&self) -> usize {
        self.mesh.surface().num_patches()
    }

    pub fn num_clusters(&self, level: u32) -> usize {
        self.num_patches() << (2 * level)
    }

    /// Cluster with position `flat` among the clusters of `level`.
    pub fn cluster(&self, level: u32, flat: usize) -> ClusterId {
        let per = 1usize << (2 * level);
        ClusterId::new(flat / per, level, (flat % per) as u32)
    }

    pub fn bbox(&self, c: ClusterId) -> &Aabb {
        &self.boxes[c.level as usize][c.flat_index()]
    }

    pub fn diameter(&self, c: ClusterId) -> f64 {
        self.bbox(c).diameter()
    }

    pub fn distance(&self, a: ClusterId, b: ClusterId) -> f64 {
        self.bbox(a).distance(self.bbox(b))
    }

    /// `max(diam a, diam b) < eta dist(a, b)` on bounding boxes.
    pub fn is_admissible(&self, a: ClusterId, b: ClusterId, eta: f64) -> bool {
        is_admissible(self.diameter(a), self.diameter(b), self.distance(a, b), eta)
    }
}

/// The admissibility condition on precomputed diameters and distance.
pub fn is_admissible(diam_a: f64, diam_b: f64, dist: f64, eta: f64) -> bool {
    diam_a.max(diam_b) < eta * dist
}

/// Blocks of the upper triangle (`a <= b`) of the element interaction
/// matrix; the lower triangle follows by symmetry of the kernel.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Partition {
    /// Compressed cluster pairs `(a, b)` with `a < b`, same level.
    pub far: Vec<(ClusterId, ClusterId)>,
    /// Element pairs `(a, b)` with `a <= b`, sorted.
    pub near: Vec<(usize, usize)>,
}

impl Partition {
    /// Standard recursive partition. Admissible pairs on levels where
    /// `compress(level)` is false are expanded into element pairs.
    pub fn new(tree: &ClusterTree, eta: f64, compress: impl Fn(u32) -> bool) -> Self {
        let mut part = Partition::default();
        let roots = tree.num_patches();
        for i in 0..roots {
            for j in i..roots {
                part.visit(tree, eta, &compress, ClusterId::root(i), ClusterId::root(j));
            }
        }
        part.near.sort_unstable();
        part
    }

    fn visit(
        &mut self,
        tree: &ClusterTree,
        eta: f64,
        compress: &impl Fn(u32) -> bool,
        a: ClusterId,
        b: ClusterId,
    ) {
        let mesh = tree.mesh();
        if a != b && tree.is_admissible(a, b, eta) {
            if compress(a.level) {
                self.far.push((a, b));
            } else {
                for ea in mesh.cluster_elements(a) {
                    self.near
                        .extend(mesh.cluster_elements(b).map(|eb| (ea, eb)));
                }
            }
            return;
        }
        if a.level == tree.depth() {
            let (ea, eb) = (
                mesh.cluster_elements(a).start,
                mesh.cluster_elements(b).start,
            );
            self.near.push((ea, eb));
            return;
        }
        let (ca, cb) = (a.children(), b.children());
        for (i, &x) in ca.iter().enumerate() {
            let start = if a == b { i } else { 0 };
            for &y in &cb[start..] {
                self.visit(tree, eta, compress, x, y);
            }
        }
    }

    /// Number of element pairs of the full matrix covered by each block
    /// family, counting mirrored blocks: `(near, far)`.
    pub fn coverage(&self, mesh: &Mesh) -> (usize, usize) {
        let near = self
            .near
            .iter()
            .map(|&(a, b)| if a == b { 1 } else { 2 })
            .sum();
        let far = self
            .far
            .iter()
            .map(|&(a, b)| 2 * mesh.cluster_elements(a).len() * mesh.cluster_elements(b).len())
            .sum();
        (near, far)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{fichera, sphere, torus};

    fn tree(surface: crate::geometry::Surface, m: u32) -> ClusterTree {
        ClusterTree::new(Arc::new(Mesh::new(Arc::new(surface), m).unwrap()))
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(1.0, 1.0, 2.0, 0.6));
        assert!(!is_admissible(1.0, 1.0, 0.0, 0.99));
        let t = tree(sphere(), 1);
        let c = ClusterId::new(0, 1, 0);
        assert!(!t.is_admissible(c, c, 0.99));
    }

    #[test]
    fn boxes_contain_elements_and_children() {
        let t = tree(torus(), 2);
        let mesh = t.mesh();
        for e in 0..mesh.num_elements() {
            let leaf = mesh.cluster_of(e, 2);
            assert_eq!(t.bbox(leaf), &mesh.element(e).bbox);
        }
        for flat in 0..t.num_clusters(1) {
            let c = t.cluster(1, flat);
            let parent = t.bbox(c);
            for k in c.children() {
                let b = t.bbox(k);
                for d in 0..3 {
                    assert!(b.min[d] >= parent.min[d] - 1e-12 && b.max[d] <= parent.max[d] + 1e-12);
                }
            }
        }
    }

    #[test]
    fn partition_covers_every_pair_once() {
        for (s, m) in [(sphere(), 3), (torus(), 2), (fichera(), 2)] {
            let t = tree(s, m);
            let mesh = t.mesh();
            let ne = mesh.num_elements();
            let part = Partition::new(&t, 0.8, |_| true);
            let mut count = vec![0u8; ne * ne];
            for &(a, b) in &part.near {
                count[a * ne + b] += 1;
                if a != b {
                    count[b * ne + a] += 1;
                }
            }
            for &(a, b) in &part.far {
                assert!(a < b && a.level == b.level);
                assert!(t.is_admissible(a, b, 0.8));
                for x in mesh.cluster_elements(a) {
                    for y in mesh.cluster_elements(b) {
                        count[x * ne + y] += 1;
                        count[y * ne + x] += 1;
                    }
                }
            }
            assert!(count.iter().all(|&c| c == 1));
            let (n, f) = part.coverage(mesh);
            assert_eq!(n + f, ne * ne);
        }
    }

    #[test]
    fn single_patch_root_is_near() {
        let kv = crate::spline::KnotVector::uniform(1, 0);
        let patch = crate::geometry::NurbsPatch::new(
            kv.clone(),
            kv,
            vec![[0.0; 3], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]],
            vec![1.0; 4],
        )
        .unwrap();
        let t = tree(crate::geometry::Surface::new(vec![patch]).unwrap(), 0);
        let part = Partition::new(&t, 0.8, |_| true);
        assert_eq!(part.near, vec![(0, 0)]);
        assert!(part.far.is_empty());
    }

    #[test]
    fn far_blocks_grow_with_eta() {
        let t = tree(sphere(), 3);
        // Larger eta admits more cluster pairs, so more element pairs are
        // compressed (the block count itself may drop as blocks merge).
        let counts: Vec<usize> = [0.4, 0.6, 0.8]
            .iter()
            .map(|&eta| Partition::new(&t, eta, |_| true).coverage(t.mesh()).1)
            .collect();
        assert!(counts.windows(2).all(|w| w[0] < w[1]), "{counts:?}");
        // Restricting compression moves element pairs to the near field but
        // keeps the coverage.
        let ne = t.mesh().num_elements();
        let part = Partition::new(&t, 0.8, |l| l < 2);
        let (n, f) = part.coverage(t.mesh());
        assert_eq!(n + f, ne * ne);
        assert!(part.far.iter().all(|(a, _)| a.level < 2));
    }
}
