//! Line-oriented text format for multipatch NURBS surfaces.
//!
//! ```text
//! # comment lines and blank lines are ignored
//! patches <n>
//! degree <p_u> <p_v>          # repeated for each patch
//! knots_u <k_0> <k_1> ...
//! knots_v <k_0> <k_1> ...
//! <x> <y> <z> <w>             # k_u * k_v lines, u index slowest
//! ```
//!
//! Coordinates are plain (not premultiplied by the weight). Numbers are
//! written in shortest round-trip form so saving and loading is lossless.

use std::fmt::Write as _;
use std::path::Path;

use super::{NurbsPatch, Surface};
use crate::error::{Error, Result};
use crate::spline::KnotVector;

pub fn write_surface(surface: &Surface) -> String {
    let mut out = String::new();
    writeln!(out, "patches {}", surface.num_patches()).unwrap();
    for patch in surface.patches() {
        let (pu, pv) = patch.degrees();
        writeln!(out, "degree {pu} {pv}").unwrap();
        let join = |k: &[f64]| {
            k.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "knots_u {}", join(patch.knots_u().knots())).unwrap();
        writeln!(out, "knots_v {}", join(patch.knots_v().knots())).unwrap();
        for (p, w) in patch.control_points().iter().zip(patch.weights()) {
            writeln!(out, "{:?} {:?} {:?} {:?}", p[0], p[1], p[2], w).unwrap();
        }
    }
    out
}

pub fn save_surface(surface: &Surface, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_surface(surface)).map_err(|e| Error::io(path, e))
}

pub fn load_surface(path: impl AsRef<Path>) -> Result<Surface> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_surface(&text)
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
                .filter(|(_, l)| !l.is_empty()),
        );
        Lines {
            inner: it.peekable(),
            last: 0,
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((n, l)) => {
                self.last = n;
                Ok((n, l))
            }
            None => Err(Error::Parse {
                line: self.last + 1,
                message: format!("unexpected end of input, expected {what}"),
            }),
        }
    }

    /// Next line that must start with `keyword`; returns the remaining fields.
    fn keyword(&mut self, keyword: &str) -> Result<(usize, Vec<&'a str>)> {
        let (n, line) = self.next(keyword)?;
        let mut fields = line.split_whitespace();
        if fields.next() != Some(keyword) {
            return Err(Error::Parse {
                line: n,
                message: format!("expected '{keyword}'"),
            });
        }
        Ok((n, fields.collect()))
    }
}

fn numbers<T: std::str::FromStr>(line: usize, fields: &[&str]) -> Result<Vec<T>> {
    fields
        .iter()
        .map(|f| {
            f.parse::<T>().map_err(|_| Error::Parse {
                line,
                message: format!("invalid number '{f}'"),
            })
        })
        .collect()
}

fn at_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Validation(m) => Error::Validation(format!("line {line}: {m}")),
        Error::KnotVector(m) => Error::Parse {
            line,
            message: format!("invalid knot vector: {m}"),
        },
        other => other,
    })
}

/// Parses a surface and checks that it is outward oriented.
pub fn parse_surface(text: &str) -> Result<Surface> {
    let mut lines = Lines::new(text);
    let (n, fields) = lines.keyword("patches")?;
    let count: Vec<usize> = numbers(n, &fields)?;
    if count.len() != 1 || count[0] == 0 {
        return Err(Error::Parse {
            line: n,
            message: "expected a positive patch count".into(),
        });
    }
    let mut patches = Vec::with_capacity(count[0]);
    for _ in 0..count[0] {
        let (n, fields) = lines.keyword("degree")?;
        let deg: Vec<usize> = numbers(n, &fields)?;
        if deg.len() != 2 {
            return Err(Error::Parse {
                line: n,
                message: "expected two degrees".into(),
            });
        }
        let (nu, fields) = lines.keyword("knots_u")?;
        let ku = at_line(nu, KnotVector::new(deg[0], numbers(nu, &fields)?))?;
        let (nv, fields) = lines.keyword("knots_v")?;
        let kv = at_line(nv, KnotVector::new(deg[1], numbers(nv, &fields)?))?;
        let total = ku.num_basis() * kv.num_basis();
        let mut pts = Vec::with_capacity(total);
        let mut wts = Vec::with_capacity(total);
        for _ in 0..total {
            let (n, line) = lines.next("control point")?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            let vals: Vec<f64> = numbers(n, &fields)?;
            if vals.len() != 4 {
                return Err(Error::Parse {
                    line: n,
                    message: "expected 'x y z w'".into(),
                });
            }
            if vals[3] <= 0.0 {
                return Err(Error::Validation(format!(
                    "line {n}: weight {} is not positive",
                    vals[3]
                )));
            }
            pts.push([vals[0], vals[1], vals[2]]);
            wts.push(vals[3]);
        }
        patches.push(at_line(lines.last, NurbsPatch::new(ku, kv, pts, wts))?);
    }
    if let Ok((n, _)) = lines.next("") {
        return Err(Error::Parse {
            line: n,
            message: "trailing content after last patch".into(),
        });
    }
    let surface = Surface::new(patches)?;
    if surface.signed_volume() < 0.0 {
        return Err(Error::Validation(
            "patch normals point inward (negative enclosed volume)".into(),
        ));
    }
    Ok(surface)
}
