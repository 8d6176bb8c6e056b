//! Exact NURBS parametrizations of the unit sphere, a torus and the Fichera
//! cube.

use std::f64::consts::FRAC_1_SQRT_2;
use std::str::FromStr;

use super::{NurbsPatch, Surface};
use crate::error::{Error, Result};
use crate::spline::{binomial, KnotVector};
use crate::vec3::Vec3;

/// Names of the built-in geometries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Sphere,
    Torus,
    Fichera,
}

impl Builtin {
    pub fn surface(self) -> Surface {
        match self {
            Builtin::Sphere => sphere(),
            Builtin::Torus => torus(),
            Builtin::Fichera => fichera(),
        }
    }

    pub fn num_patches(self) -> usize {
        match self {
            Builtin::Sphere => 6,
            Builtin::Torus => 16,
            Builtin::Fichera => 24,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Sphere => "sphere",
            Builtin::Torus => "torus",
            Builtin::Fichera => "fichera",
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sphere" => Ok(Builtin::Sphere),
            "torus" => Ok(Builtin::Torus),
            "fichera" => Ok(Builtin::Fichera),
            other => Err(Error::Config(format!("unknown geometry '{other}'"))),
        }
    }
}

impl std::fmt::Display for Builtin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Unit sphere as six rational biquartic patches in cube topology.
///
/// The face `z > max(|x|, |y|)` is the inverse stereographic image (from the
/// south pole) of a planar curved square bounded by four circular arcs. That
/// square is an exact rational biquadratic patch `(S, T) / W`; composing with
/// the inverse projection gives the homogeneous biquartic map
/// `(2 S W, 2 T W, W^2 - S^2 - T^2; W^2 + S^2 + T^2)`. The remaining faces are
/// rotations of it.
pub fn sphere() -> Surface {
    let top = sphere_top_face();
    let rotations: [fn(Vec3) -> Vec3; 6] = [
        |p| p,
        |p| [p[0], -p[1], -p[2]],
        |p| [p[2], p[1], -p[0]],
        |p| [-p[2], p[1], p[0]],
        |p| [p[0], p[2], -p[1]],
        |p| [p[0], -p[2], p[1]],
    ];
    let patches = rotations
        .iter()
        .map(|rot| {
            let pts = top.control_points().iter().map(|&p| rot(p)).collect();
            NurbsPatch::new(
                top.knots_u().clone(),
                top.knots_v().clone(),
                pts,
                top.weights().to_vec(),
            )
            .expect("valid sphere patch")
        })
        .collect();
    Surface::new(patches).expect("nonempty")
}

fn sphere_top_face() -> NurbsPatch {
    let s3 = 3f64.sqrt();
    // Corners of the curved square and the tangent intersection of its arcs.
    let c = (s3 - 1.0) / 2.0;
    let a = 2.0 * s3 - 3.0;
    // Each arc spans 30 degrees.
    let w = (std::f64::consts::PI / 12.0).cos();
    let net: [[[f64; 2]; 3]; 3] = [
        [[-c, -c], [-a, 0.0], [-c, c]],
        [[0.0, -a], [0.0, 0.0], [0.0, a]],
        [[c, -c], [a, 0.0], [c, c]],
    ];
    let omega = [1.0, w, 1.0];
    // Homogeneous biquadratic coefficients [S, T, W], indexed [i][j].
    let mut hs = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let wt = omega[i] * omega[j];
            hs[i][j] = [net[i][j][0] * wt, net[i][j][1] * wt, wt];
        }
    }
    let product = |f: &dyn Fn(&[f64; 3], &[f64; 3]) -> f64| {
        let mut out = [[0.0; 5]; 5];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let cu = binomial(2, i) * binomial(2, k) / binomial(4, i + k);
                        let cv = binomial(2, j) * binomial(2, l) / binomial(4, j + l);
                        out[i + k][j + l] += cu * cv * f(&hs[i][j], &hs[k][l]);
                    }
                }
            }
        }
        out
    };
    let x = product(&|a, b| 2.0 * a[0] * b[2]);
    let y = product(&|a, b| 2.0 * a[1] * b[2]);
    let z = product(&|a, b| a[2] * b[2] - a[0] * b[0] - a[1] * b[1]);
    let wh = product(&|a, b| a[2] * b[2] + a[0] * b[0] + a[1] * b[1]);
    let mut pts = Vec::with_capacity(25);
    let mut wts = Vec::with_capacity(25);
    for i in 0..5 {
        for j in 0..5 {
            let ww = wh[i][j];
            pts.push([x[i][j] / ww, y[i][j] / ww, z[i][j] / ww]);
            wts.push(ww);
        }
    }
    let kv = KnotVector::uniform(4, 0);
    NurbsPatch::new(kv.clone(), kv, pts, wts).expect("valid sphere face")
}

/// Quarter circle arcs of the unit circle as rational quadratic control
/// points `(x, y, weight)`.
fn quarter_arc(k: usize) -> [[f64; 3]; 3] {
    let t0 = k as f64 * std::f64::consts::FRAC_PI_2;
    let t1 = t0 + std::f64::consts::FRAC_PI_2;
    let (s0, c0) = t0.sin_cos();
    let (s1, c1) = t1.sin_cos();
    [
        [c0, s0, 1.0],
        [c0 + c1, s0 + s1, FRAC_1_SQRT_2],
        [c1, s1, 1.0],
    ]
}

/// Torus with center radius 2 and tube radius 0.5 as a 4 x 4 grid of
/// rational biquadratic patches; `u` runs around the axis, `v` around the
/// tube.
pub fn torus() -> Surface {
    torus_with_radii(2.0, 0.5)
}

pub(crate) fn torus_with_radii(big: f64, small: f64) -> Surface {
    let kv = KnotVector::uniform(2, 0);
    let mut patches = Vec::with_capacity(16);
    for it in 0..4 {
        let around = quarter_arc(it);
        for ip in 0..4 {
            let tube = quarter_arc(ip);
            let mut pts = Vec::with_capacity(9);
            let mut wts = Vec::with_capacity(9);
            for a in &around {
                for b in &tube {
                    let rho = big + small * b[0];
                    pts.push([rho * a[0], rho * a[1], small * b[1]]);
                    wts.push(a[2] * b[2]);
                }
            }
            patches.push(
                NurbsPatch::new(kv.clone(), kv.clone(), pts, wts).expect("valid torus patch"),
            );
        }
    }
    Surface::new(patches).expect("nonempty")
}

/// The cube `[-1, 1]^3` with the corner `[0, 1]^3` removed, as 24 flat unit
/// squares with outward orientation.
pub fn fichera() -> Surface {
    let kv = KnotVector::uniform(1, 0);
    let mut patches = Vec::with_capacity(24);
    let mut push = |axis: usize, level: f64, sign: f64, b0: f64, c0: f64| {
        // In-plane axes with e_b x e_c = e_axis.
        let b = (axis + 1) % 3;
        let c = (axis + 2) % 3;
        let corner = |s: f64, t: f64| {
            let mut p = [0.0; 3];
            p[axis] = level;
            p[b] = b0 + s;
            p[c] = c0 + t;
            p
        };
        // Control point (i, j) is stored at i * 2 + j.
        let pts = if sign > 0.0 {
            vec![
                corner(0.0, 0.0),
                corner(0.0, 1.0),
                corner(1.0, 0.0),
                corner(1.0, 1.0),
            ]
        } else {
            vec![
                corner(0.0, 0.0),
                corner(1.0, 0.0),
                corner(0.0, 1.0),
                corner(1.0, 1.0),
            ]
        };
        patches.push(
            NurbsPatch::new(kv.clone(), kv.clone(), pts, vec![1.0; 4]).expect("valid square"),
        );
    };
    for axis in 0..3 {
        for (level, sign) in [(-1.0, -1.0), (1.0, 1.0)] {
            for b0 in [-1.0, 0.0] {
                for c0 in [-1.0, 0.0] {
                    // The square of the removed corner is missing on the
                    // positive faces.
                    if sign > 0.0 && b0 == 0.0 && c0 == 0.0 {
                        continue;
                    }
                    push(axis, level, sign, b0, c0);
                }
            }
        }
        // Face of the notch, facing into the removed corner.
        push(axis, 0.0, 1.0, 0.0, 0.0);
    }
    Surface::new(patches).expect("nonempty")
}
