//! Flat `key = value` experiment configuration.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{load_surface, Builtin, Surface};
use crate::pipeline::SolveOptions;
use crate::solver::SolverConfig;
use crate::space::dim_superspace;
use crate::vec3::Vec3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProblemKind {
    /// Interior Laplace problem with harmonic polynomial data.
    Laplace,
    /// Exterior Helmholtz problem with point source data.
    Helmholtz,
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "laplace" => Ok(ProblemKind::Laplace),
            "helmholtz" => Ok(ProblemKind::Helmholtz),
            other => Err(Error::Config(format!("unknown problem '{other}'"))),
        }
    }
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Laplace => "laplace",
            ProblemKind::Helmholtz => "helmholtz",
        }
    }
}

/// Superspace dimension above which a cell is refused.
pub const DEFAULT_MAX_DIM: usize = 300_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Built-in name or path of a geometry file.
    pub geometry: String,
    pub problem: ProblemKind,
    pub kappa: f64,
    /// Source point of the Helmholtz data; defaults depend on the geometry.
    pub source: Option<Vec3>,
    pub degrees: Vec<usize>,
    pub levels: Vec<u32>,
    pub perturb: bool,
    pub fmm_eta: Option<f64>,
    pub fmm_interp_degree: Option<usize>,
    pub fmm_dense_fallback: bool,
    pub quad_base_order: Option<usize>,
    pub quad_grading: Option<f64>,
    pub solver: SolverConfig,
    pub out_dir: PathBuf,
    pub max_dim: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            geometry: "sphere".into(),
            problem: ProblemKind::Laplace,
            kappa: 0.5,
            source: None,
            degrees: vec![0],
            levels: vec![1, 2, 3],
            perturb: false,
            fmm_eta: None,
            fmm_interp_degree: None,
            fmm_dense_fallback: false,
            quad_base_order: None,
            quad_grading: None,
            solver: SolverConfig::default(),
            out_dir: PathBuf::from("results"),
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for '{key}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!(
            "invalid boolean '{value}' for '{key}'"
        ))),
    }
}

/// Comma separated integers and inclusive ranges `a-b`.
fn parse_list<T: FromStr + Copy + Into<u64> + TryFrom<u64>>(
    key: &str,
    value: &str,
) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once('-') {
            Some((a, b)) => {
                let (a, b): (T, T) = (parse(key, a)?, parse(key, b)?);
                let (a, b) = (a.into(), b.into());
                if a > b {
                    return Err(Error::Config(format!("empty range '{item}' for '{key}'")));
                }
                for v in a..=b {
                    out.push(
                        T::try_from(v)
                            .map_err(|_| Error::Config(format!("'{item}' out of range")))?,
                    );
                }
            }
            None => out.push(parse(key, item)?),
        }
    }
    if out.is_empty() {
        return Err(Error::Config(format!("'{key}' needs at least one value")));
    }
    Ok(out)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected 'key = value', got '{line}'"),
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, arg: &str) -> Result<()> {
        let (key, value) = arg.split_once('=').ok_or_else(|| {
            Error::Config(format!("override '{arg}' is not of the form key=value"))
        })?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "geometry" => self.geometry = value.to_string(),
            "problem" => self.problem = value.parse()?,
            "kappa" => self.kappa = parse(key, value)?,
            "source" => {
                let v: Vec<f64> = value
                    .split(',')
                    .map(|c| parse(key, c))
                    .collect::<Result<_>>()?;
                let v: Vec3 = v
                    .try_into()
                    .map_err(|_| Error::Config("'source' needs three coordinates".into()))?;
                self.source = Some(v);
            }
            "degrees" => {
                self.degrees = parse_list::<u32>(key, value)?
                    .into_iter()
                    .map(|p| p as usize)
                    .collect();
            }
            "levels" => self.levels = parse_list(key, value)?,
            "perturb" => self.perturb = parse_bool(key, value)?,
            "fmm.eta" => self.fmm_eta = Some(parse(key, value)?),
            "fmm.interp_degree" => self.fmm_interp_degree = Some(parse(key, value)?),
            "fmm.dense_fallback" => self.fmm_dense_fallback = parse_bool(key, value)?,
            "quad.base_order" => self.quad_base_order = Some(parse(key, value)?),
            "quad.grading" => self.quad_grading = Some(parse(key, value)?),
            "solver.tol" => self.solver.tol = parse(key, value)?,
            "solver.maxiter" => self.solver.maxiter = parse(key, value)?,
            "solver.restart" => self.solver.restart = parse(key, value)?,
            "out.dir" => self.out_dir = PathBuf::from(value),
            "max_dim" => self.max_dim = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn builtin(&self) -> Option<Builtin> {
        self.geometry.parse().ok()
    }

    /// The boundary, perturbed if requested.
    pub fn surface(&self) -> Result<Surface> {
        let s = match self.builtin() {
            Some(b) => b.surface(),
            None => load_surface(&self.geometry)?,
        };
        Ok(if self.perturb { s.perturb() } else { s })
    }

    /// Helmholtz source point inside the domain.
    pub fn source_point(&self) -> Vec3 {
        self.source.unwrap_or(match self.builtin() {
            Some(Builtin::Torus) => [0.0, -2.0, 0.0],
            // The octant of positive coordinates is the removed corner.
            Some(Builtin::Fichera) => [-0.5, -0.5, -0.5],
            _ => [0.5, 0.5, 0.5],
        })
    }

    pub fn options_for(&self, p: usize) -> SolveOptions {
        let mut opts = SolveOptions::for_degree(p);
        if let Some(b) = self.quad_base_order {
            opts.quad.base_order = b;
            opts.quad.min_order = opts.quad.min_order.min(b);
        }
        if let Some(g) = self.quad_grading {
            opts.quad.grading = g;
        }
        if let Some(eta) = self.fmm_eta {
            opts.fmm.eta = eta;
        }
        if let Some(q) = self.fmm_interp_degree {
            opts.fmm.interp_degree = q;
        }
        opts.fmm.dense_fallback = self.fmm_dense_fallback;
        opts.solver = self.solver;
        opts
    }

    /// Checks every knob and the size guard of every cell.
    pub fn validate(&self, num_patches: usize) -> Result<()> {
        if self.degrees.is_empty() || self.levels.is_empty() {
            return Err(Error::Config("degrees and levels must be nonempty".into()));
        }
        if self.problem == ProblemKind::Helmholtz && !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::Config(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        self.solver.validate()?;
        for &p in &self.degrees {
            let opts = self.options_for(p);
            opts.quad.validate()?;
            opts.fmm.validate()?;
            for &m in &self.levels {
                let dim = dim_superspace(num_patches, p, m);
                if dim > self.max_dim {
                    return Err(Error::Config(format!(
                        "p = {p}, m = {m} needs a superspace of dimension {dim} > {}",
                        self.max_dim
                    )));
                }
            }
        }
        Ok(())
    }

    /// File stem shared by the outputs of this configuration.
    pub fn stem(&self) -> String {
        let geom = Path::new(&self.geometry)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("surface")
            .to_string();
        let mut stem = geom;
        if self.perturb {
            stem.push_str("_perturbed");
        }
        stem.push('_');
        stem.push_str(self.problem.name());
        if self.problem == ProblemKind::Helmholtz {
            stem.push_str(&format!("_k{}", self.kappa));
        }
        stem
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_and_overrides() {
        let text = "# sweep\ngeometry = torus\nproblem = helmholtz\nkappa = 2\ndegrees = 0,1\nlevels = 1-3\nfmm.eta = 0.5\nsolver.tol = 1e-10\n";
        let mut cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.degrees, vec![0, 1]);
        assert_eq!(cfg.levels, vec![1, 2, 3]);
        assert_eq!(cfg.problem, ProblemKind::Helmholtz);
        assert_eq!(cfg.source_point(), [0.0, -2.0, 0.0]);
        cfg.apply_override("levels=2").unwrap();
        cfg.apply_override("perturb=true").unwrap();
        assert_eq!(cfg.levels, vec![2]);
        assert_eq!(cfg.stem(), "torus_perturbed_helmholtz_k2");
        let opts = cfg.options_for(1);
        assert_eq!(opts.fmm.eta, 0.5);
        assert_eq!(opts.solver.tol, 1e-10);
        cfg.validate(16).unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            ExperimentConfig::parse("nonsense"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("colour = red"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::parse("levels = 3-1"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::parse("perturb = maybe"),
            Err(Error::Config(_))
        ));
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.apply_override("levels").is_err());
        cfg.set("degrees", "4").unwrap();
        cfg.set("levels", "5").unwrap();
        cfg.set("geometry", "fichera").unwrap();
        assert!(matches!(cfg.validate(24), Err(Error::Config(_))));
    }
}
