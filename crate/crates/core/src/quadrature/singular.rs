//! Regularizing coordinate transforms for element pairs that touch.
//!
//! Each singular configuration is brought into a canonical position on
//! `[0,1]^2 x [0,1]^2`:
//!
//! * coincident: both elements identical, singular along `x = y`;
//! * common edge: the shared edge is `x_1 = 0` and `y_1 = 0` with
//!   `x_2 = y_2` describing the same physical point;
//! * common vertex: the shared corner is `x = (0, 0)` and `y = (0, 0)`.
//!
//! Relative coordinates and a split into simplices/pyramids whose radial
//! variable absorbs the `1/r` singularity turn all three into smooth
//! integrands over `[0,1]^4` (8, 6 and 4 subregions respectively).

use std::sync::OnceLock;

use super::gauss::{gauss_rule, MAX_ORDER};
use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Relative position of two elements of the same mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairClass {
    Coincident,
    CommonEdge,
    CommonVertex,
    Distant,
}

/// One of the eight symmetries of the unit square, mapping canonical
/// coordinates to element-local coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Dihedral {
    pub swap: bool,
    pub flip_x: bool,
    pub flip_y: bool,
}

impl Dihedral {
    pub const IDENTITY: Dihedral = Dihedral {
        swap: false,
        flip_x: false,
        flip_y: false,
    };

    pub fn all() -> [Dihedral; 8] {
        let mut out = [Dihedral::IDENTITY; 8];
        for (k, d) in out.iter_mut().enumerate() {
            *d = Dihedral {
                swap: k & 1 != 0,
                flip_x: k & 2 != 0,
                flip_y: k & 4 != 0,
            };
        }
        out
    }

    #[inline]
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let [mut s, mut t] = if self.swap { [p[1], p[0]] } else { p };
        if self.flip_x {
            s = 1.0 - s;
        }
        if self.flip_y {
            t = 1.0 - t;
        }
        [s, t]
    }

    /// Index of the local corner hit by a canonical corner, counterclockwise
    /// from `(0, 0)`.
    fn corner(&self, p: [f64; 2]) -> usize {
        match self.apply(p) {
            [s, t] if s == 0.0 && t == 0.0 => 0,
            [s, t] if s == 1.0 && t == 0.0 => 1,
            [s, t] if s == 1.0 && t == 1.0 => 2,
            _ => 3,
        }
    }
}

/// Classification of a pair together with the maps placing both elements in
/// canonical position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairGeometry {
    pub class: PairClass,
    pub map_a: Dihedral,
    pub map_b: Dihedral,
}

/// An element of a specific mesh.
#[derive(Clone, Copy, Debug)]
pub struct ElementRef<'a> {
    pub mesh: &'a Mesh,
    pub index: usize,
}

/// Classifies two elements by their shared vertices.
pub fn classify_pair(a: ElementRef<'_>, b: ElementRef<'_>) -> Result<PairGeometry> {
    if !std::ptr::eq(a.mesh, b.mesh) {
        return Err(Error::ForeignElement);
    }
    for e in [a.index, b.index] {
        if e >= a.mesh.num_elements() {
            return Err(Error::IndexOutOfRange {
                index: e,
                limit: a.mesh.num_elements(),
            });
        }
    }
    classify(a.mesh, a.index, b.index)
}

pub(crate) fn classify(mesh: &Mesh, a: usize, b: usize) -> Result<PairGeometry> {
    let id = Dihedral::IDENTITY;
    if a == b {
        return Ok(PairGeometry {
            class: PairClass::Coincident,
            map_a: id,
            map_b: id,
        });
    }
    let el = |e: usize| mesh.element(e).corners;
    pair_from_corners(&el(a), &el(b)).map_err(|_| {
        Error::Topology(format!(
            "elements {a} and {b} share vertices that do not form an edge"
        ))
    })
}

/// Classifies two distinct quadrilaterals from the vertex ids of their
/// corners at local `(0,0), (1,0), (1,1), (0,1)`.
pub(crate) fn pair_from_corners(ca: &[usize; 4], cb: &[usize; 4]) -> Result<PairGeometry> {
    let id = Dihedral::IDENTITY;
    let shared: Vec<usize> = ca.iter().copied().filter(|v| cb.contains(v)).collect();
    let find = |corners: &[usize; 4], v0: usize, v1: Option<usize>| {
        Dihedral::all().into_iter().find(|d| {
            corners[d.corner([0.0, 0.0])] == v0
                && v1.map_or(true, |v1| corners[d.corner([0.0, 1.0])] == v1)
        })
    };
    let (class, v0, v1) = match shared.len() {
        0 => {
            return Ok(PairGeometry {
                class: PairClass::Distant,
                map_a: id,
                map_b: id,
            })
        }
        1 => (PairClass::CommonVertex, shared[0], None),
        2 => (PairClass::CommonEdge, shared[0], Some(shared[1])),
        n => {
            return Err(Error::Topology(format!(
                "quadrilaterals share {n} vertices"
            )))
        }
    };
    match (find(ca, v0, v1), find(cb, v0, v1)) {
        (Some(map_a), Some(map_b)) => Ok(PairGeometry {
            class,
            map_a,
            map_b,
        }),
        _ => Err(Error::Topology(
            "shared vertices do not form an edge".into(),
        )),
    }
}

/// A point of a rule on `[0,1]^2 x [0,1]^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairPoint {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub w: f64,
}

/// Relative coordinate split for one direction: `zeta >= 0` is the offset,
/// `sign` says whether `y` lies after `x`.
#[inline]
fn relative(sign: bool, zeta: f64, s: f64) -> (f64, f64) {
    if sign {
        let x = (1.0 - zeta) * s;
        (x, x + zeta)
    } else {
        let y = (1.0 - zeta) * s;
        (y + zeta, y)
    }
}

fn build(class: PairClass, q: usize) -> Vec<PairPoint> {
    let g = gauss_rule(q).expect("order checked by caller");
    let mut out = Vec::new();
    match class {
        PairClass::Coincident => {
            for sign1 in [true, false] {
                for sign2 in [true, false] {
                    for tri in 0..2 {
                        for (r, wr) in g.iter() {
                            for (t, wt) in g.iter() {
                                let (z1, z2) = if tri == 0 { (r, r * t) } else { (r * t, r) };
                                let jac = r * (1.0 - z1) * (1.0 - z2);
                                for (s1, w1) in g.iter() {
                                    let (x1, y1) = relative(sign1, z1, s1);
                                    for (s2, w2) in g.iter() {
                                        let (x2, y2) = relative(sign2, z2, s2);
                                        out.push(PairPoint {
                                            x: [x1, x2],
                                            y: [y1, y2],
                                            w: wr * wt * w1 * w2 * jac,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        PairClass::CommonEdge => {
            for sign in [true, false] {
                for pyr in 0..3 {
                    for (r, wr) in g.iter() {
                        for (t1, w1) in g.iter() {
                            for (t2, w2) in g.iter() {
                                // (x1, y1, zeta) with coordinate `pyr` maximal.
                                let mut v = [0.0; 3];
                                let mut k = 0;
                                for (d, vd) in v.iter_mut().enumerate() {
                                    if d == pyr {
                                        *vd = r;
                                    } else {
                                        *vd = [r * t1, r * t2][k];
                                        k += 1;
                                    }
                                }
                                let (x1, y1, zeta) = (v[0], v[1], v[2]);
                                let jac = r * r * (1.0 - zeta);
                                for (s, ws) in g.iter() {
                                    let (x2, y2) = relative(sign, zeta, s);
                                    out.push(PairPoint {
                                        x: [x1, x2],
                                        y: [y1, y2],
                                        w: wr * w1 * w2 * ws * jac,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        PairClass::CommonVertex => {
            for pyr in 0..4 {
                for (r, wr) in g.iter() {
                    for (t1, w1) in g.iter() {
                        for (t2, w2) in g.iter() {
                            for (t3, w3) in g.iter() {
                                let rest = [r * t1, r * t2, r * t3];
                                let mut v = [0.0; 4];
                                let mut k = 0;
                                for (d, vd) in v.iter_mut().enumerate() {
                                    if d == pyr {
                                        *vd = r;
                                    } else {
                                        *vd = rest[k];
                                        k += 1;
                                    }
                                }
                                out.push(PairPoint {
                                    x: [v[0], v[1]],
                                    y: [v[2], v[3]],
                                    w: wr * w1 * w2 * w3 * r * r * r,
                                });
                            }
                        }
                    }
                }
            }
        }
        PairClass::Distant => {
            for (x1, w1) in g.iter() {
                for (x2, w2) in g.iter() {
                    for (y1, w3) in g.iter() {
                        for (y2, w4) in g.iter() {
                            out.push(PairPoint {
                                x: [x1, x2],
                                y: [y1, y2],
                                w: w1 * w2 * w3 * w4,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Cached canonical rule of a class with `q` Gauss points per variable.
pub fn canonical_rule(class: PairClass, q: usize) -> Result<&'static [PairPoint]> {
    type Table = [OnceLock<Vec<PairPoint>>; MAX_ORDER];
    static TABLES: [OnceLock<Box<Table>>; 4] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    gauss_rule(q)?;
    let slot = match class {
        PairClass::Coincident => 0,
        PairClass::CommonEdge => 1,
        PairClass::CommonVertex => 2,
        PairClass::Distant => 3,
    };
    let table = TABLES[slot].get_or_init(|| Box::new(std::array::from_fn(|_| OnceLock::new())));
    Ok(table[q - 1].get_or_init(|| build(class, q)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sphere;
    use std::sync::Arc;

    #[test]
    fn rules_have_unit_volume() {
        for class in [
            PairClass::Coincident,
            PairClass::CommonEdge,
            PairClass::CommonVertex,
            PairClass::Distant,
        ] {
            for q in [2, 3, 6] {
                let r = canonical_rule(class, q).unwrap();
                let s: f64 = r.iter().map(|p| p.w).sum();
                assert!((s - 1.0).abs() < 1e-13, "{class:?} q={q}: {s}");
                assert!(r.iter().all(|p| p
                    .x
                    .iter()
                    .chain(&p.y)
                    .all(|&c| (0.0..=1.0).contains(&c))));
            }
        }
        assert!(canonical_rule(PairClass::Coincident, 41).is_err());
    }

    #[test]
    fn rules_integrate_polynomials() {
        // x1^2 y2 + x2 y1^3 over [0,1]^4 = 1/6 + 1/8.
        for class in [
            PairClass::Coincident,
            PairClass::CommonEdge,
            PairClass::CommonVertex,
        ] {
            let r = canonical_rule(class, 5).unwrap();
            let v: f64 = r
                .iter()
                .map(|p| p.w * (p.x[0].powi(2) * p.y[1] + p.x[1] * p.y[0].powi(3)))
                .sum();
            assert!(
                (v - (1.0 / 6.0 + 1.0 / 8.0)).abs() < 1e-12,
                "{class:?}: {v}"
            );
        }
    }

    #[test]
    fn dihedral_group() {
        let all = Dihedral::all();
        let mut images = std::collections::HashSet::new();
        for d in all {
            let a = d.apply([0.2, 0.7]);
            images.insert(((a[0] * 10.0).round() as i32, (a[1] * 10.0).round() as i32));
        }
        assert_eq!(images.len(), 8);
    }

    #[test]
    fn classification_on_sphere() {
        let mesh = Mesh::new(Arc::new(sphere()), 2).unwrap();
        let r = |i| ElementRef {
            mesh: &mesh,
            index: i,
        };
        assert_eq!(
            classify_pair(r(5), r(5)).unwrap().class,
            PairClass::Coincident
        );
        // Neighbouring cells inside one patch.
        let a = mesh.element_index(0, 1, 1);
        let b = mesh.element_index(0, 2, 1);
        let c = mesh.element_index(0, 2, 2);
        let d = mesh.element_index(0, 3, 3);
        assert_eq!(
            classify_pair(r(a), r(b)).unwrap().class,
            PairClass::CommonEdge
        );
        assert_eq!(
            classify_pair(r(a), r(c)).unwrap().class,
            PairClass::CommonVertex
        );
        assert_eq!(classify_pair(r(a), r(d)).unwrap().class, PairClass::Distant);
        let other = Mesh::new(Arc::new(sphere()), 2).unwrap();
        assert!(matches!(
            classify_pair(
                r(0),
                ElementRef {
                    mesh: &other,
                    index: 0
                }
            ),
            Err(Error::ForeignElement)
        ));
    }

    #[test]
    fn canonical_maps_align_shared_points() {
        let mesh = Mesh::new(Arc::new(sphere()), 1).unwrap();
        let s = mesh.surface();
        let point = |e: usize, d: Dihedral, p: [f64; 2]| {
            let l = d.apply(p);
            let (x, y) = mesh.to_patch(e, l[0], l[1]);
            s.eval_point(mesh.element(e).patch, x, y)
        };
        let mut seen_edge = 0;
        let mut seen_vertex = 0;
        for a in 0..mesh.num_elements() {
            for b in 0..mesh.num_elements() {
                let g = classify(&mesh, a, b).unwrap();
                match g.class {
                    PairClass::CommonEdge => {
                        seen_edge += 1;
                        for t in [0.0, 0.3, 1.0] {
                            let pa = point(a, g.map_a, [0.0, t]);
                            let pb = point(b, g.map_b, [0.0, t]);
                            assert!(crate::vec3::dist(pa, pb) < 1e-12);
                        }
                    }
                    PairClass::CommonVertex => {
                        seen_vertex += 1;
                        let pa = point(a, g.map_a, [0.0, 0.0]);
                        let pb = point(b, g.map_b, [0.0, 0.0]);
                        assert!(crate::vec3::dist(pa, pb) < 1e-12);
                    }
                    _ => {}
                }
            }
        }
        assert_eq!(seen_edge, 24 * 4);
        assert!(seen_vertex > 0);
    }
}
