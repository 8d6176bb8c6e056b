//! Tensor Chebyshev interpolation on the unit square.

use std::f64::consts::PI;

/// Chebyshev points of the first kind mapped to `[0, 1]`, with barycentric
/// Lagrange evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct Chebyshev {
    nodes: Vec<f64>,
    bary: Vec<f64>,
}

impl Chebyshev {
    /// Interpolation of polynomial degree `q` (`q + 1` points).
    pub fn new(q: usize) -> Self {
        let n = q + 1;
        let angle = |k: usize| (2 * k + 1) as f64 * PI / (2 * n) as f64;
        let nodes = (0..n).map(|k| 0.5 * (1.0 + angle(k).cos())).collect();
        let bary = (0..n)
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } * angle(k).sin())
            .collect();
        Chebyshev { nodes, bary }
    }

    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of tensor points `(q + 1)^2`.
    pub fn len_2d(&self) -> usize {
        self.nodes.len() * self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Tensor point `m = m1 + (q + 1) m2`.
    pub fn node_2d(&self, m: usize) -> [f64; 2] {
        let n = self.nodes.len();
        [self.nodes[m % n], self.nodes[m / n]]
    }

    /// All Lagrange polynomials at `x`.
    pub fn lagrange(&self, x: f64, out: &mut [f64]) {
        if let Some(k) = self.nodes.iter().position(|&z| z == x) {
            out.fill(0.0);
            out[k] = 1.0;
            return;
        }
        let mut total = 0.0;
        for ((o, &z), &w) in out.iter_mut().zip(&self.nodes).zip(&self.bary) {
            *o = w / (x - z);
            total += *o;
        }
        for o in out.iter_mut() {
            *o /= total;
        }
    }

    /// All tensor Lagrange polynomials at `p`, indexed like [`Self::node_2d`].
    pub fn lagrange_2d(&self, p: [f64; 2], out: &mut [f64]) {
        let n = self.nodes.len();
        let mut lx = vec![0.0; n];
        let mut ly = vec![0.0; n];
        self.lagrange(p[0], &mut lx);
        self.lagrange(p[1], &mut ly);
        for (j, &y) in ly.iter().enumerate() {
            for (i, &x) in lx.iter().enumerate() {
                out[i + n * j] = x * y;
            }
        }
    }
}
