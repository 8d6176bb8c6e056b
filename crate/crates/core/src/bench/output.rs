//! CSV tables, plot scripts and empirical convergence orders.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::ConvergenceRecord;

pub const CSV_HEADER: &str =
    "p,m,h,dof,dof_star,density_l2_err,potential_max_err,iterations,seconds";

/// Errors below this are treated as saturated and ignored by
/// [`observed_order`].
pub const ERROR_FLOOR: f64 = 1e-12;

/// Negated least-squares slope of `log2(error)` against the level, i.e. the
/// empirical order in `h = 2^-m`. `None` with fewer than three levels above
/// [`ERROR_FLOOR`].
pub fn observed_order(points: &[(u32, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, e)| e.is_finite() && e >= ERROR_FLOOR)
        .map(|&(m, e)| (m as f64, e.log2()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v:.6e}"))
}

pub fn to_csv(records: &[ConvergenceRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.6e},{},{:.3}",
            r.p,
            r.m,
            r.h,
            r.dof,
            r.dof_star,
            fmt_opt(r.density_l2_err),
            r.potential_max_err,
            r.iterations,
            r.seconds
        );
    }
    out
}

/// Matplotlib script plotting the potential (and density, when present)
/// errors of `csv_name` against `h`, with `h^(2p+3)` reference slopes.
pub fn plot_script(csv_name: &str, title: &str) -> String {
    format!(
        r#"import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

rows = defaultdict(list)
with open("{csv_name}") as f:
    for r in csv.DictReader(f):
        rows[int(r["p"])].append(r)

fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for p, rs in sorted(rows.items()):
    h = [float(r["h"]) for r in rs]
    err = [float(r["potential_max_err"]) for r in rs]
    (line,) = axes[0].loglog(h, err, "o-", label=f"p = {{p}}")
    ref = [err[0] * (x / h[0]) ** (2 * p + 3) for x in h]
    axes[0].loglog(h, ref, ":", color=line.get_color())
    dens = [(float(r["h"]), float(r["density_l2_err"])) for r in rs if r["density_l2_err"]]
    if dens:
        axes[1].loglog(*zip(*dens), "o-", color=line.get_color(), label=f"p = {{p}}")
axes[0].set_title("maximal potential error")
axes[1].set_title("density L2 error")
for ax in axes:
    ax.set_xlabel("h")
    ax.invert_xaxis()
    ax.legend()
fig.suptitle("{title}")
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "{png}")
"#,
        png = csv_name.trim_end_matches(".csv").to_string() + ".png"
    )
}

/// Writes `<stem>.csv` and `plot_<stem>.py` into `dir`.
pub fn emit_outputs(
    records: &[ConvergenceRecord],
    dir: &Path,
    stem: &str,
    title: &str,
) -> Result<(PathBuf, PathBuf)> {
    if records.is_empty() {
        return Err(Error::Validation("no records to write".into()));
    }
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let csv = dir.join(format!("{stem}.csv"));
    std::fs::write(&csv, to_csv(records)).map_err(io(&csv))?;
    let script = dir.join(format!("plot_{stem}.py"));
    std::fs::write(&script, plot_script(&format!("{stem}.csv"), title)).map_err(io(&script))?;
    Ok((csv, script))
}
