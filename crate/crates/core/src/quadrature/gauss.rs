use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest supported number of Gauss points per direction.
pub const MAX_ORDER: usize = 40;

/// Gauss-Legendre rule on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    fn compute(n: usize) -> GaussRule {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                if n == 1 {
                    p0 = 1.0;
                    p1 = x;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            // Recompute the derivative at the converged root.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n > 1 || dp == 0.0 {
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            }
            nodes[i] = 0.5 * (1.0 - x);
            weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
        GaussRule { nodes, weights }
    }
}

fn table() -> &'static [GaussRule] {
    static RULES: OnceLock<Vec<GaussRule>> = OnceLock::new();
    RULES.get_or_init(|| (1..=MAX_ORDER).map(GaussRule::compute).collect())
}

/// The `n`-point Gauss-Legendre rule on `[0, 1]`, `1 <= n <= 40`.
pub fn gauss_rule(n: usize) -> Result<&'static GaussRule> {
    if n == 0 {
        return Err(Error::IndexOutOfRange { index: 0, limit: 1 });
    }
    if n > MAX_ORDER {
        return Err(Error::QuadratureCapacity {
            requested: n,
            max: MAX_ORDER,
        });
    }
    Ok(&table()[n - 1])
}

/// Composite Gauss rule on `[breaks[0], breaks[last]]`: each piece of
/// relative length `w` gets `max(ceil(q w), ceil(q / 2))` points, so pieces
/// cut off by a kink keep about the accuracy of the full rule.
pub fn composite_rule(breaks: &[f64], q: usize) -> Result<Vec<(f64, f64)>> {
    if breaks.len() == 2 {
        return Ok(gauss_rule(q)?
            .iter()
            .map(|(x, w)| {
                (
                    breaks[0] + (breaks[1] - breaks[0]) * x,
                    (breaks[1] - breaks[0]) * w,
                )
            })
            .collect());
    }
    let total = breaks[breaks.len() - 1] - breaks[0];
    let mut out = Vec::new();
    for piece in breaks.windows(2) {
        let len = piece[1] - piece[0];
        let n = ((q as f64 * len / total).ceil() as usize).max(q.div_ceil(2));
        out.extend(
            gauss_rule(n)?
                .iter()
                .map(|(x, w)| (piece[0] + len * x, len * w)),
        );
    }
    Ok(out)
}
