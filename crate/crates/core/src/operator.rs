//! Linear operators and the dense Galerkin matrix used as a reference.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::quadrature::PairIntegrator;
use crate::scalar::Scalar;

/// A square linear map applied matrix-free.
pub trait LinearOperator<S: Scalar>: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`.
    fn apply_into(&self, x: &[S], y: &mut [S]) -> Result<()>;

    fn apply(&self, x: &[S]) -> Result<Vec<S>> {
        let mut y = vec![S::zero(); self.dim()];
        self.apply_into(x, &mut y)?;
        Ok(y)
    }
}

pub(crate) fn check_dims(expected: usize, x: usize, y: usize) -> Result<()> {
    if x != expected {
        return Err(Error::DimensionMismatch { expected, found: x });
    }
    if y != expected {
        return Err(Error::DimensionMismatch { expected, found: y });
    }
    Ok(())
}

/// Row-major dense square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        DenseMatrix { n, data }
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<S> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Galerkin matrix on the superspace by integrating every element pair.
    pub fn assemble<K: Kernel<Scalar = S>>(integ: &PairIntegrator, kernel: &K) -> Result<Self> {
        let ne = integ.mesh().num_elements();
        let nl = integ.local_dim();
        let n = ne * nl;
        let mut data = vec![S::zero(); n * n];
        data.par_chunks_mut(nl * n)
            .enumerate()
            .try_for_each(|(a, rows)| {
                let mut block = vec![S::zero(); nl * nl];
                for b in 0..ne {
                    integ.pair_block(kernel, a, b, &mut block)?;
                    for ia in 0..nl {
                        rows[ia * n + b * nl..ia * n + (b + 1) * nl]
                            .copy_from_slice(&block[ia * nl..(ia + 1) * nl]);
                    }
                }
                Ok::<_, Error>(())
            })?;
        Ok(DenseMatrix { n, data })
    }
}

impl<S: Scalar> LinearOperator<S> for DenseMatrix<S> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[S], y: &mut [S]) -> Result<()> {
        check_dims(self.n, x.len(), y.len())?;
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            *yi = self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum();
        });
        Ok(())
    }
}
