//! Patch interface detection.

use super::Surface;
use crate::error::{Error, Result};
use crate::vec3::{dist, Vec3};

/// Maps an edge index and edge parameter to the patch parameter. Edges are
/// numbered counterclockwise: 0 is `y = 0`, 1 is `x = 1`, 2 is `y = 1`,
/// 3 is `x = 0`; each is parametrized by the free coordinate.
pub fn edge_param(edge: usize, t: f64) -> (f64, f64) {
    match edge {
        0 => (t, 0.0),
        1 => (1.0, t),
        2 => (t, 1.0),
        _ => (0.0, t),
    }
}

/// Two patch edges with coinciding traces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeMatch {
    /// `(patch, edge)` of the first edge.
    pub first: (usize, usize),
    pub second: (usize, usize),
    /// Whether the second trace runs opposite to the first.
    pub reversed: bool,
    /// Largest distance between corresponding trace samples.
    pub mismatch: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceReport {
    pub matches: Vec<EdgeMatch>,
    pub max_mismatch: f64,
}

/// Pairs every patch edge with the unique other edge whose trace coincides
/// at `samples` points (up to reversal).
pub fn check_interfaces(surface: &Surface, samples: usize) -> Result<InterfaceReport> {
    let samples = samples.max(2);
    let scale = surface.bounding_box().diameter().max(1e-300);
    let tol = 1e-8 * scale;
    let traces: Vec<((usize, usize), Vec<Vec3>)> = (0..surface.num_patches())
        .flat_map(|p| (0..4).map(move |e| (p, e)))
        .map(|(p, e)| {
            let pts = (0..samples)
                .map(|k| {
                    let (x, y) = edge_param(e, k as f64 / (samples - 1) as f64);
                    surface.eval_point(p, x, y)
                })
                .collect();
            ((p, e), pts)
        })
        .collect();
    let compare = |a: &[Vec3], b: &[Vec3], reversed: bool| -> f64 {
        let n = a.len();
        (0..n)
            .map(|k| dist(a[k], if reversed { b[n - 1 - k] } else { b[k] }))
            .fold(0.0, f64::max)
    };
    let mut partner: Vec<Option<usize>> = vec![None; traces.len()];
    let mut matches = Vec::new();
    let mut max_mismatch: f64 = 0.0;
    for i in 0..traces.len() {
        let mut found = Vec::new();
        for j in 0..traces.len() {
            if i == j {
                continue;
            }
            for reversed in [false, true] {
                let d = compare(&traces[i].1, &traces[j].1, reversed);
                if d <= tol {
                    found.push((j, reversed, d));
                }
            }
        }
        let (p, e) = traces[i].0;
        match found.len() {
            0 => {
                return Err(Error::Topology(format!(
                    "edge {e} of patch {p} is not shared with any other patch"
                )))
            }
            1 => {}
            _ => {
                return Err(Error::Topology(format!(
                    "edge {e} of patch {p} is shared with {} edges",
                    found.len()
                )))
            }
        }
        let (j, reversed, d) = found[0];
        if let Some(prev) = partner[i] {
            if prev != j {
                return Err(Error::Topology(format!(
                    "edge {e} of patch {p} is matched inconsistently"
                )));
            }
            continue;
        }
        partner[i] = Some(j);
        partner[j] = Some(i);
        max_mismatch = max_mismatch.max(d);
        matches.push(EdgeMatch {
            first: traces[i].0,
            second: traces[j].0,
            reversed,
            mismatch: d,
        });
    }
    Ok(InterfaceReport {
        matches,
        max_mismatch,
    })
}
