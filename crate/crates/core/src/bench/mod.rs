//! Convergence harness: sweeps over degrees and levels for one geometry and
//! problem, with CSV output and empirical orders.

pub mod checks;
mod config;
mod output;

use std::sync::Arc;
use std::time::Instant;

pub use config::{ExperimentConfig, ProblemKind, DEFAULT_MAX_DIM};
pub use output::{emit_outputs, observed_order, plot_script, to_csv, CSV_HEADER, ERROR_FLOOR};

use crate::error::Result;
use crate::geometry::Surface;
use crate::kernel::{Helmholtz, Kernel, Laplace};
use crate::pipeline::{potential_errors, solve_dirichlet, Discretization};
use crate::potential::{
    exterior_sphere_points, interior_cube_points, sphere_density_l2_error, EvaluationSet,
};
use crate::scalar::Scalar;
use crate::solver::DirichletData;

/// One row of a convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRecord {
    pub p: usize,
    pub m: u32,
    pub h: f64,
    /// Spline space dimension.
    pub dof: usize,
    /// Superspace dimension.
    pub dof_star: usize,
    pub density_l2_err: Option<f64>,
    pub potential_max_err: f64,
    pub iterations: usize,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    /// Wall time of the whole cell, including potential evaluation.
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellFailure {
    pub p: usize,
    pub m: u32,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSummary {
    pub records: Vec<ConvergenceRecord>,
    pub failures: Vec<CellFailure>,
}

impl RunSummary {
    /// `(m, potential error)` of the successful cells of degree `p`.
    pub fn potential_errors(&self, p: usize) -> Vec<(u32, f64)> {
        self.records
            .iter()
            .filter(|r| r.p == p)
            .map(|r| (r.m, r.potential_max_err))
            .collect()
    }

    pub fn density_errors(&self, p: usize) -> Vec<(u32, f64)> {
        self.records
            .iter()
            .filter(|r| r.p == p)
            .filter_map(|r| r.density_l2_err.map(|e| (r.m, e)))
            .collect()
    }

    pub fn record(&self, p: usize, m: u32) -> Option<&ConvergenceRecord> {
        self.records.iter().find(|r| r.p == p && r.m == m)
    }
}

/// Shared state of a sweep: the boundary and, for interior problems, the
/// level-independent evaluation points.
pub struct Experiment {
    pub config: ExperimentConfig,
    surface: Arc<Surface>,
    interior: Option<EvaluationSet>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        let surface = Arc::new(config.surface()?);
        config.validate(surface.num_patches())?;
        Ok(Experiment {
            config,
            surface,
            interior: None,
        })
    }

    pub fn surface(&self) -> &Arc<Surface> {
        &self.surface
    }

    fn is_unit_sphere(&self) -> bool {
        self.config.geometry.trim().eq_ignore_ascii_case("sphere")
    }

    /// Evaluation points of level `m`.
    pub fn points(&mut self, m: u32) -> Result<EvaluationSet> {
        match self.config.problem {
            ProblemKind::Laplace => {
                if self.interior.is_none() {
                    self.interior = Some(interior_cube_points(&self.surface, 0.05, 0.15)?);
                }
                Ok(self.interior.clone().expect("set above"))
            }
            ProblemKind::Helmholtz => Ok(exterior_sphere_points(m)),
        }
    }

    pub fn data(&self) -> DirichletData {
        match self.config.problem {
            ProblemKind::Laplace => DirichletData::ZonalHarmonic,
            ProblemKind::Helmholtz => DirichletData::PointSource {
                kappa: self.config.kappa,
                source: self.config.source_point(),
            },
        }
    }

    /// Solves and evaluates one `(p, m)` cell.
    pub fn run_cell(&mut self, p: usize, m: u32) -> Result<ConvergenceRecord> {
        let points = self.points(m)?;
        match self.config.problem {
            ProblemKind::Laplace => self.run_with(Laplace, p, m, &points),
            ProblemKind::Helmholtz => {
                self.run_with(Helmholtz::new(self.config.kappa)?, p, m, &points)
            }
        }
    }

    fn run_with<K: Kernel>(
        &self,
        kernel: K,
        p: usize,
        m: u32,
        points: &EvaluationSet,
    ) -> Result<ConvergenceRecord> {
        let start = Instant::now();
        let opts = self.config.options_for(p);
        let disc = Discretization::new(self.surface.clone(), p, m)?;
        let data = self.data();
        let sol = solve_dirichlet(&disc, kernel, &data, &opts)?;
        let report = potential_errors(&disc, kernel, &sol, &data, &points.points, opts.quad)?;
        let density_l2_err = if self.is_unit_sphere() && !K::Scalar::IS_COMPLEX {
            let coeffs: Vec<f64> = sol.superspace_coeffs.iter().map(|c| c.re()).collect();
            Some(sphere_density_l2_error(&disc.superspace, &coeffs)?)
        } else {
            None
        };
        Ok(ConvergenceRecord {
            p,
            m,
            h: disc.mesh.h(),
            dof: disc.spline.dim(),
            dof_star: disc.superspace.dim(),
            density_l2_err,
            potential_max_err: report.max_error,
            iterations: sol.iterations,
            assembly_seconds: sol.assembly_seconds,
            solve_seconds: sol.solve_seconds,
            seconds: start.elapsed().as_secs_f64(),
        })
    }

    /// Runs every cell in order; failed cells are collected, not fatal.
    pub fn run(
        &mut self,
        mut progress: impl FnMut(usize, u32, &Result<ConvergenceRecord>),
    ) -> RunSummary {
        let mut summary = RunSummary::default();
        let (degrees, levels) = (self.config.degrees.clone(), self.config.levels.clone());
        for &p in &degrees {
            for &m in &levels {
                let res = self.run_cell(p, m);
                progress(p, m, &res);
                match res {
                    Ok(r) => summary.records.push(r),
                    Err(e) => summary.failures.push(CellFailure {
                        p,
                        m,
                        message: e.to_string(),
                    }),
                }
            }
        }
        summary
    }

    pub fn title(&self) -> String {
        let c = &self.config;
        let geom = if c.perturb {
            format!("perturbed {}", c.geometry)
        } else {
            c.geometry.clone()
        };
        match c.problem {
            ProblemKind::Laplace => format!("Laplace problem, {geom}"),
            ProblemKind::Helmholtz => format!("Helmholtz problem, {geom}, kappa = {}", c.kappa),
        }
    }
}
