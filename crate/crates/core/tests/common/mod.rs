//! Shared fixtures and independent reference integrals.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use iga_bem::geometry::{NurbsPatch, Surface};
use iga_bem::mesh::{ClusterId, Mesh};
use iga_bem::quadrature::gauss_rule;
use iga_bem::spline::bernstein_all;
use iga_bem::spline::KnotVector;
use iga_bem::vec3::{add, cross, dot, scale, sub, Vec3};

/// A flat unit square `o + s e1 + t e2` with orthonormal `e1, e2`.
#[derive(Clone, Copy, Debug)]
pub struct Square {
    pub origin: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
}

impl Square {
    pub fn new(origin: Vec3, e1: Vec3, e2: Vec3) -> Self {
        Square { origin, e1, e2 }
    }

    pub fn point(&self, s: f64, t: f64) -> Vec3 {
        add(self.origin, add(scale(self.e1, s), scale(self.e2, t)))
    }

    pub fn patch(&self) -> NurbsPatch {
        let kv = KnotVector::uniform(1, 0);
        let pts = vec![
            self.point(0.0, 0.0),
            self.point(0.0, 1.0),
            self.point(1.0, 0.0),
            self.point(1.0, 1.0),
        ];
        NurbsPatch::new(kv.clone(), kv, pts, vec![1.0; 4]).unwrap()
    }
}

pub fn flat_surface(squares: &[Square]) -> Arc<Surface> {
    Arc::new(Surface::new(squares.iter().map(Square::patch).collect()).unwrap())
}

/// Named two-square configurations covering every pair class.
pub fn fixtures() -> Vec<(&'static str, Vec<Square>)> {
    let x = [1.0, 0.0, 0.0];
    let y = [0.0, 1.0, 0.0];
    let z = [0.0, 0.0, 1.0];
    let my = [0.0, -1.0, 0.0];
    let base = Square::new([0.0; 3], x, y);
    vec![
        ("coincident", vec![base]),
        (
            "edge_coplanar",
            vec![base, Square::new([1.0, 0.0, 0.0], x, y)],
        ),
        ("edge_bent", vec![base, Square::new([0.0; 3], z, y)]),
        (
            "vertex_coplanar",
            vec![base, Square::new([-1.0, -1.0, 0.0], x, y)],
        ),
        ("vertex_bent", vec![base, Square::new([0.0; 3], z, my)]),
        ("distant", vec![base, Square::new([1.5, 0.25, 0.5], x, y)]),
    ]
}

/// `int_0^a int_0^b 1 / sqrt(s^2 + t^2 + z^2)` up to terms that cancel under
/// inclusion-exclusion in `s` and `t` separately.
fn corner_potential(a: f64, b: f64, z: f64) -> f64 {
    let r = (a * a + b * b + z * z).sqrt();
    let mut v = 0.0;
    if a != 0.0 {
        v += a * (b / (a * a + z * z).sqrt()).asinh();
    }
    if b != 0.0 {
        v += b * (a / (b * b + z * z).sqrt()).asinh();
    }
    if z != 0.0 && r > 0.0 {
        v -= z * (a * b / (z * r)).atan();
    }
    v
}

/// Closed-form `int_sq 1 / (4 pi |x - y|) dy`.
pub fn square_potential(sq: &Square, x: Vec3) -> f64 {
    let d = sub(x, sq.origin);
    let u = dot(d, sq.e1);
    let v = dot(d, sq.e2);
    let z = dot(d, cross(sq.e1, sq.e2)).abs();
    let f = |s: f64, t: f64| corner_potential(s - u, t - v, z);
    (f(1.0, 1.0) - f(0.0, 1.0) - f(1.0, 0.0) + f(0.0, 0.0)) / (4.0 * PI)
}

/// Composite Gauss rule on [0, 1], geometrically graded toward both ends.
fn graded_rule() -> Vec<(f64, f64)> {
    let sigma: f64 = 0.2;
    let layers = 22;
    let mut breaks = vec![0.0];
    for k in (1..=layers).rev() {
        breaks.push(0.5 * sigma.powi(k));
    }
    for k in 1..=layers {
        breaks.push(1.0 - 0.5 * sigma.powi(k));
    }
    breaks.push(1.0);
    let g = gauss_rule(24).unwrap();
    let mut rule = Vec::new();
    for w in breaks.windows(2) {
        let h = w[1] - w[0];
        rule.extend(g.iter().map(|(x, wx)| (w[0] + h * x, h * wx)));
    }
    rule
}

/// Integral over the unit square of a function whose singularities lie on the
/// square's boundary lines.
pub fn graded_unit_square(f: &dyn Fn(f64, f64) -> f64) -> f64 {
    let rule = graded_rule();
    let mut acc = 0.0;
    for &(t, wt) in &rule {
        for &(s, ws) in &rule {
            acc += ws * wt * f(s, t);
        }
    }
    acc
}

/// Reference value of `int_a int_b 1 / (4 pi |x - y|)` for two unit squares:
/// closed form in `y`, graded composite Gauss in `x`.
pub fn reference_pair(a: &Square, b: &Square) -> f64 {
    graded_unit_square(&|s, t| square_potential(b, a.point(s, t)))
}

/// Far-field block of `(a, b)` for a kernel given as a polynomial in the
/// cluster coordinates, by tensor Gauss integration.
pub fn exact_far_block(
    mesh: &Mesh,
    p: usize,
    a: ClusterId,
    b: ClusterId,
    poly: &dyn Fn([f64; 2], [f64; 2]) -> f64,
) -> Vec<Vec<f64>> {
    let nl = (p + 1) * (p + 1);
    let g = gauss_rule(8).unwrap();
    let local = |c: ClusterId, e: usize, s: f64, t: f64| {
        let (x, y) = mesh.to_patch(e, s, t);
        let [x0, y0] = c.origin();
        [(x - x0) / c.size(), (y - y0) / c.size()]
    };
    let ra = mesh.cluster_elements(a);
    let rb = mesh.cluster_elements(b);
    let mut out = vec![vec![0.0; rb.len() * nl]; ra.len() * nl];
    let (mut b1, mut b2, mut c1, mut c2) = ([0.0; 8], [0.0; 8], [0.0; 8], [0.0; 8]);
    let area = |c: ClusterId| (mesh.h() / c.size()).powi(2);
    for (ia, ea) in ra.clone().enumerate() {
        for (ib, eb) in rb.clone().enumerate() {
            for (t1, w1) in g.iter() {
                for (s1, v1) in g.iter() {
                    let xa = local(a, ea, s1, t1);
                    bernstein_all(p, s1, &mut b1);
                    bernstein_all(p, t1, &mut b2);
                    for (t2, w2) in g.iter() {
                        for (s2, v2) in g.iter() {
                            let yb = local(b, eb, s2, t2);
                            bernstein_all(p, s2, &mut c1);
                            bernstein_all(p, t2, &mut c2);
                            let w = w1 * v1 * w2 * v2 * area(a) * area(b) * poly(xa, yb);
                            for i in 0..nl {
                                for j in 0..nl {
                                    let fi = b1[i % (p + 1)] * b2[i / (p + 1)];
                                    let fj = c1[j % (p + 1)] * c2[j / (p + 1)];
                                    out[ia * nl + i][ib * nl + j] += w * fi * fj;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}
