//! Jacobi-preconditioned conjugate gradients and restarted GMRES.

use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::scalar::{dot, norm, Scalar};

/// Stopping criteria.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Relative residual `|b - A x| / |b|` to reach.
    pub tol: f64,
    pub maxiter: usize,
    /// Krylov dimension between GMRES restarts.
    pub restart: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-8,
            maxiter: 2000,
            restart: 200,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!(
                "solver.tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        if self.maxiter == 0 || self.restart == 0 {
            return Err(Error::Config(
                "solver.maxiter and solver.restart must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Result of an iterative solve; non-convergence is reported through
/// [`Solution::check`] so the last iterate stays available.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution<S> {
    pub x: Vec<S>,
    pub iterations: usize,
    /// Final relative residual.
    pub residual: f64,
    /// Relative residual after every iteration, starting with the initial one.
    pub history: Vec<f64>,
    pub converged: bool,
}

impl<S> Solution<S> {
    pub fn check(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
                residual: self.residual,
            })
        }
    }
}

fn inverse_diagonal<S: Scalar>(diag: &[S]) -> Result<Vec<S>> {
    diag.iter()
        .map(|&d| {
            if d.abs() == 0.0 || !d.is_finite() {
                Err(Error::Breakdown {
                    iterations: 0,
                    reason: "zero or non-finite diagonal entry".into(),
                })
            } else {
                Ok(S::from_f64(1.0) / d)
            }
        })
        .collect()
}

fn axpy<S: Scalar>(alpha: S, x: &[S], y: &mut [S]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Preconditioned conjugate gradients for Hermitian positive definite `a`
/// with preconditioner `diag(diag)^{-1}`, starting from zero.
pub fn cg<S: Scalar>(
    a: &dyn LinearOperator<S>,
    b: &[S],
    diag: &[S],
    cfg: &SolverConfig,
) -> Result<Solution<S>> {
    let n = a.dim();
    if b.len() != n || diag.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if b.len() != n { b.len() } else { diag.len() },
        });
    }
    let inv = inverse_diagonal(diag)?;
    let bnorm = norm(b);
    let mut x = vec![S::zero(); n];
    if bnorm == 0.0 {
        return Ok(Solution {
            x,
            iterations: 0,
            residual: 0.0,
            history: vec![0.0],
            converged: true,
        });
    }
    let mut r = b.to_vec();
    let mut z: Vec<S> = r.iter().zip(&inv).map(|(&ri, &di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut history = vec![1.0];
    let mut ap = vec![S::zero(); n];
    for it in 1..=cfg.maxiter {
        a.apply_into(&p, &mut ap)?;
        let pap = dot(&p, &ap);
        if !(pap.re() > 0.0) || !pap.is_finite() {
            return Err(Error::Breakdown {
                iterations: it,
                reason: format!("operator not positive definite (p^H A p = {:e})", pap.re()),
            });
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let res = norm(&r) / bnorm;
        history.push(res);
        if res <= cfg.tol {
            return Ok(Solution {
                x,
                iterations: it,
                residual: res,
                history,
                converged: true,
            });
        }
        for ((zi, &ri), &di) in z.iter_mut().zip(&r).zip(&inv) {
            *zi = ri * di;
        }
        let rz_new = dot(&r, &z);
        if !(rz_new.re() > 0.0) {
            return Err(Error::Breakdown {
                iterations: it,
                reason: "preconditioned residual lost positivity".into(),
            });
        }
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, &zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    let residual = *history.last().unwrap();
    Ok(Solution {
        x,
        iterations: cfg.maxiter,
        residual,
        history,
        converged: false,
    })
}

/// Restarted GMRES with right Jacobi preconditioning, starting from zero.
/// The reported residual is the true residual of the unpreconditioned
/// system.
pub fn gmres<S: Scalar>(
    a: &dyn LinearOperator<S>,
    b: &[S],
    diag: &[S],
    cfg: &SolverConfig,
) -> Result<Solution<S>> {
    let n = a.dim();
    if b.len() != n || diag.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if b.len() != n { b.len() } else { diag.len() },
        });
    }
    let inv = inverse_diagonal(diag)?;
    let bnorm = norm(b);
    let mut x = vec![S::zero(); n];
    let mut history = vec![1.0];
    if bnorm == 0.0 {
        return Ok(Solution {
            x,
            iterations: 0,
            residual: 0.0,
            history: vec![0.0],
            converged: true,
        });
    }
    let restart = cfg.restart.min(n).max(1);
    let mut total = 0;
    let mut r = b.to_vec();
    let mut w = vec![S::zero(); n];
    let mut tmp = vec![S::zero(); n];
    loop {
        let beta = norm(&r);
        if beta / bnorm <= cfg.tol {
            return Ok(Solution {
                x,
                iterations: total,
                residual: beta / bnorm,
                history,
                converged: true,
            });
        }
        if total >= cfg.maxiter {
            return Ok(Solution {
                x,
                iterations: total,
                residual: beta / bnorm,
                history,
                converged: false,
            });
        }
        let mut basis: Vec<Vec<S>> = vec![r.iter().map(|&v| v * (1.0 / beta)).collect()];
        // Hessenberg columns after rotation, rotations and rhs.
        let mut h: Vec<Vec<S>> = Vec::new();
        let mut cs: Vec<(S, S)> = Vec::new();
        let mut g = vec![S::from_f64(beta)];
        let mut k = 0;
        while k < restart && total < cfg.maxiter {
            for ((t, &v), &d) in tmp.iter_mut().zip(&basis[k]).zip(&inv) {
                *t = v * d;
            }
            a.apply_into(&tmp, &mut w)?;
            // Modified Gram-Schmidt.
            let mut col = vec![S::zero(); k + 2];
            for (j, v) in basis.iter().enumerate() {
                let hij = dot(v, &w);
                col[j] = hij;
                axpy(-hij, v, &mut w);
            }
            let hnext = norm(&w);
            col[k + 1] = S::from_f64(hnext);
            for (j, &(c, s)) in cs.iter().enumerate() {
                let (a0, a1) = (col[j], col[j + 1]);
                col[j] = c.conj() * a0 + s.conj() * a1;
                col[j + 1] = -s * a0 + c * a1;
            }
            let (a0, a1) = (col[k], col[k + 1]);
            let rnorm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
            if rnorm == 0.0 {
                return Err(Error::Breakdown {
                    iterations: total,
                    reason: "singular Hessenberg matrix".into(),
                });
            }
            let (c, s) = (a0 * (1.0 / rnorm), a1 * (1.0 / rnorm));
            col[k] = S::from_f64(rnorm);
            col[k + 1] = S::zero();
            cs.push((c, s));
            let gk = g[k];
            g[k] = c.conj() * gk;
            g.push(-s * gk);
            h.push(col);
            total += 1;
            k += 1;
            let est = g[k].abs() / bnorm;
            history.push(est);
            if est <= cfg.tol || hnext == 0.0 {
                break;
            }
            basis.push(w.iter().map(|&v| v * (1.0 / hnext)).collect());
        }
        // Back substitution for the Krylov coefficients.
        let mut y = vec![S::zero(); k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in i + 1..k {
                acc -= h[j][i] * y[j];
            }
            y[i] = acc / h[i][i];
        }
        let mut u = vec![S::zero(); n];
        for (yj, v) in y.iter().zip(&basis) {
            axpy(*yj, v, &mut u);
        }
        for ((xi, &ui), &d) in x.iter_mut().zip(&u).zip(&inv) {
            *xi += ui * d;
        }
        a.apply_into(&x, &mut tmp)?;
        for ((ri, &bi), &ai) in r.iter_mut().zip(b).zip(&tmp) {
            *ri = bi - ai;
        }
        if let Some(last) = history.last_mut() {
            *last = norm(&r) / bnorm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::DenseMatrix;
    use num_complex::Complex64;

    fn spd(n: usize) -> DenseMatrix<f64> {
        DenseMatrix::from_fn(n, |i, j| {
            let d = (i as f64 - j as f64).abs();
            if i == j {
                4.0 + i as f64
            } else {
                1.0 / (1.0 + d * d)
            }
        })
    }

    #[test]
    fn identity_in_one_iteration() {
        let id = DenseMatrix::from_fn(4, |i, j| if i == j { 1.0 } else { 0.0 });
        let b = [1.0, -2.0, 3.0, 0.5];
        let cfg = SolverConfig::default();
        let s = cg(&id, &b, &[1.0; 4], &cfg).unwrap().check().unwrap();
        assert_eq!(s.iterations, 1);
        assert_eq!(s.x, b.to_vec());
        let s = gmres(&id, &b, &[1.0; 4], &cfg).unwrap().check().unwrap();
        assert_eq!(s.iterations, 1);
        assert!(s.x.iter().zip(&b).all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn complex_diagonal() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let a = DenseMatrix::from_fn(2, |r, c| {
            if r != c {
                Complex64::default()
            } else if r == 0 {
                one
            } else {
                i * 2.0
            }
        });
        let b = [one, i * 2.0];
        let s = gmres(&a, &b, &[one, one], &SolverConfig::default())
            .unwrap()
            .check()
            .unwrap();
        assert!((s.x[0] - one).norm() < 1e-14 && (s.x[1] - one).norm() < 1e-14);
    }

    #[test]
    fn cg_and_gmres_agree_on_spd_system() {
        let a = spd(40);
        let b: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let diag = a.diagonal();
        let cfg = SolverConfig {
            tol: 1e-12,
            ..Default::default()
        };
        let x1 = cg(&a, &b, &diag, &cfg).unwrap().check().unwrap();
        let x2 = gmres(&a, &b, &diag, &cfg).unwrap().check().unwrap();
        let ax = a.apply(&x1.x).unwrap();
        assert!(ax.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-10));
        assert!(x1.x.iter().zip(&x2.x).all(|(u, v)| (u - v).abs() < 1e-10));
        let small = SolverConfig {
            restart: 3,
            tol: 1e-12,
            ..cfg
        };
        let x3 = gmres(&a, &b, &diag, &small).unwrap().check().unwrap();
        assert!(x3.x.iter().zip(&x2.x).all(|(u, v)| (u - v).abs() < 1e-9));
    }

    #[test]
    fn indefinite_operator_is_reported() {
        let a = DenseMatrix::from_fn(3, |i, j| match (i, j) {
            (0, 0) => 1.0,
            (1, 1) => -1.0,
            (2, 2) => 1.0,
            (0, 1) | (1, 0) => 0.5,
            _ => 0.0,
        });
        let r = cg(
            &a,
            &[0.0, 1.0, 0.0],
            &[1.0, 1.0, 1.0],
            &SolverConfig::default(),
        );
        assert!(matches!(r, Err(Error::Breakdown { .. })), "{r:?}");
    }

    #[test]
    fn non_convergence_keeps_iterate() {
        let a = spd(30);
        let b = vec![1.0; 30];
        let cfg = SolverConfig {
            tol: 1e-14,
            maxiter: 2,
            restart: 10,
        };
        let s = cg(&a, &b, &a.diagonal(), &cfg).unwrap();
        assert!(!s.converged && s.iterations == 2 && s.x.iter().any(|&v| v != 0.0));
        assert!(matches!(
            s.check(),
            Err(Error::NotConverged { iterations: 2, .. })
        ));
        let g = gmres(&a, &b, &a.diagonal(), &cfg).unwrap();
        assert!(!g.converged);
    }
}
