//! The elementwise Bernstein superspace, the patchwise spline space and the
//! sparse map between their coefficient vectors.
//!
//! Superspace dof of element `e` and Bernstein index `(a, b)`:
//! `e * (p+1)^2 + a + (p+1) b`, with elements in hierarchical order.
//! Spline dof of patch `j` and tensor index `(j1, j2)`: `j k^2 + j1 k + j2`
//! with `k = 2^m + p`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::scalar::Scalar;
use crate::spline::{bernstein_all, ExtractionOperator, KnotVector, MAX_DEGREE};
use crate::vec3::Vec3;

/// `n (2^m (p+1))^2`.
pub fn dim_superspace(num_patches: usize, p: usize, m: u32) -> usize {
    let per_dir = (1usize << m) * (p + 1);
    num_patches * per_dir * per_dir
}

/// `n (2^m + p)^2`.
pub fn dim_splinespace(num_patches: usize, p: usize, m: u32) -> usize {
    let k = (1usize << m) + p;
    num_patches * k * k
}

/// Discontinuous space of degree-`p` Bernstein polynomials on every element.
#[derive(Clone, Debug)]
pub struct SuperSpace {
    mesh: Arc<Mesh>,
    degree: usize,
}

impl SuperSpace {
    pub fn new(mesh: Arc<Mesh>, degree: usize) -> Self {
        SuperSpace { mesh, degree }
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Local basis size `(p+1)^2`.
    pub fn local_dim(&self) -> usize {
        (self.degree + 1) * (self.degree + 1)
    }

    pub fn dim(&self) -> usize {
        self.mesh.num_elements() * self.local_dim()
    }

    pub fn dof(&self, element: usize, a: usize, b: usize) -> usize {
        element * self.local_dim() + a + (self.degree + 1) * b
    }

    /// Elementwise `L^2(Gamma)` projection of `f`, integrated with `order`
    /// Gauss points per direction.
    pub fn project<S: Scalar>(&self, f: impl Fn(Vec3) -> S + Sync, order: usize) -> Result<Vec<S>> {
        let p = self.degree;
        let n = self.local_dim();
        let blocks: Vec<Vec<S>> = (0..self.mesh.num_elements())
            .into_par_iter()
            .map(|e| {
                let mut mass = DMatrix::<f64>::zeros(n, n);
                let mut rhs = DMatrix::<f64>::zeros(n, 2);
                let (mut bx, mut by) = ([0.0; MAX_DEGREE + 1], [0.0; MAX_DEGREE + 1]);
                let mut phi = vec![0.0; n];
                for ([s, t], wq) in self.mesh.element_rule(e, order)? {
                    bernstein_all(p, s, &mut bx);
                    bernstein_all(p, t, &mut by);
                    let (x, m) = self.mesh.eval_local(e, s, t);
                    let w = wq * m;
                    for b in 0..=p {
                        for a in 0..=p {
                            phi[a + (p + 1) * b] = bx[a] * by[b];
                        }
                    }
                    let v = f(x);
                    for i in 0..n {
                        rhs[(i, 0)] += w * phi[i] * v.re();
                        rhs[(i, 1)] += w * phi[i] * v.im();
                        for j in 0..n {
                            mass[(i, j)] += w * phi[i] * phi[j];
                        }
                    }
                }
                let c = mass
                    .cholesky()
                    .ok_or_else(|| {
                        Error::Validation(format!("singular mass matrix on element {e}"))
                    })?
                    .solve(&rhs);
                Ok((0..n)
                    .map(|i| S::from_parts(c[(i, 0)], c[(i, 1)]))
                    .collect())
            })
            .collect::<Result<_>>()?;
        Ok(blocks.concat())
    }

    /// Evaluates a coefficient vector at reference point `(x, y)` of `patch`.
    pub fn eval<S: Scalar>(&self, coeffs: &[S], patch: usize, x: f64, y: f64) -> S {
        let p = self.degree;
        let (e, s, t) = self.mesh.locate(patch, x, y);
        let mut bx = [0.0; MAX_DEGREE + 1];
        let mut by = [0.0; MAX_DEGREE + 1];
        bernstein_all(p, s, &mut bx);
        bernstein_all(p, t, &mut by);
        let base = e * self.local_dim();
        let mut acc = S::zero();
        for b in 0..=p {
            for a in 0..=p {
                acc += coeffs[base + a + (p + 1) * b] * (bx[a] * by[b]);
            }
        }
        acc
    }
}

/// Patchwise tensor B-splines of degree `p` on the uniform knots of level
/// `m`, without continuity across patch interfaces.
#[derive(Clone, Debug)]
pub struct SplineSpace {
    mesh: Arc<Mesh>,
    knots: KnotVector,
    extraction: Vec<ExtractionOperator>,
}

impl SplineSpace {
    pub fn new(mesh: Arc<Mesh>, degree: usize) -> Self {
        let knots = KnotVector::uniform(degree, mesh.level());
        let extraction = knots.bezier_extraction();
        SplineSpace {
            mesh,
            knots,
            extraction,
        }
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.knots.degree()
    }

    pub fn knots(&self) -> &KnotVector {
        &self.knots
    }

    /// Basis functions per direction and patch, `2^m + p`.
    pub fn per_direction(&self) -> usize {
        self.knots.num_basis()
    }

    pub fn dim(&self) -> usize {
        let k = self.per_direction();
        self.mesh.surface().num_patches() * k * k
    }

    pub fn dof(&self, patch: usize, j1: usize, j2: usize) -> usize {
        let k = self.per_direction();
        patch * k * k + j1 * k + j2
    }

    /// Evaluates a coefficient vector at reference point `(x, y)` of `patch`
    /// by direct B-spline evaluation.
    pub fn eval<S: Scalar>(&self, coeffs: &[S], patch: usize, x: f64, y: f64) -> S {
        let p = self.degree();
        let sx = self.knots.find_span(x);
        let sy = self.knots.find_span(y);
        let mut bx = [0.0; MAX_DEGREE + 1];
        let mut by = [0.0; MAX_DEGREE + 1];
        self.knots.nonzero_basis(sx, x, &mut bx);
        self.knots.nonzero_basis(sy, y, &mut by);
        let mut acc = S::zero();
        for i in 0..=p {
            for j in 0..=p {
                acc += coeffs[self.dof(patch, sx - p + i, sy - p + j)] * (bx[i] * by[j]);
            }
        }
        acc
    }

    /// The sparse map `T` with `T^T` taking spline coefficients to
    /// superspace coefficients.
    pub fn transform(&self, superspace: &SuperSpace) -> Result<TransformMatrix> {
        if superspace.degree() != self.degree() || !Arc::ptr_eq(&superspace.mesh, &self.mesh) {
            return Err(Error::ForeignElement);
        }
        let p = self.degree();
        let n = p + 1;
        let mesh = &self.mesh;
        let cols = superspace.dim();
        // Column lists: for every superspace dof the spline dofs and values.
        let mut col_ptr = Vec::with_capacity(cols + 1);
        let mut col_rows = Vec::with_capacity(cols * n * n);
        let mut col_vals = Vec::with_capacity(cols * n * n);
        col_ptr.push(0);
        for e in 0..mesh.num_elements() {
            let el = mesh.element(e);
            let cx = &self.extraction[el.ix as usize].coeffs;
            let cy = &self.extraction[el.iy as usize].coeffs;
            let span_x = self.extraction[el.ix as usize].span;
            let span_y = self.extraction[el.iy as usize].span;
            for b in 0..n {
                for a in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let v = cx[i][a] * cy[j][b];
                            if v != 0.0 {
                                col_rows.push(self.dof(el.patch, span_x - p + i, span_y - p + j));
                                col_vals.push(v);
                            }
                        }
                    }
                    col_ptr.push(col_rows.len());
                }
            }
        }
        Ok(TransformMatrix::from_columns(
            self.dim(),
            cols,
            col_ptr,
            col_rows,
            col_vals,
        ))
    }
}

/// Sparse `rows x cols` matrix stored both by columns and by rows.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformMatrix {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    col_rows: Vec<usize>,
    col_vals: Vec<f64>,
    row_ptr: Vec<usize>,
    row_cols: Vec<usize>,
    row_vals: Vec<f64>,
}

impl TransformMatrix {
    fn from_columns(
        rows: usize,
        cols: usize,
        col_ptr: Vec<usize>,
        col_rows: Vec<usize>,
        col_vals: Vec<f64>,
    ) -> Self {
        let mut counts = vec![0usize; rows + 1];
        for &r in &col_rows {
            counts[r + 1] += 1;
        }
        for i in 0..rows {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let mut fill = counts;
        let mut row_cols = vec![0; col_rows.len()];
        let mut row_vals = vec![0.0; col_rows.len()];
        for c in 0..cols {
            for k in col_ptr[c]..col_ptr[c + 1] {
                let r = col_rows[k];
                row_cols[fill[r]] = c;
                row_vals[fill[r]] = col_vals[k];
                fill[r] += 1;
            }
        }
        TransformMatrix {
            rows,
            cols,
            col_ptr,
            col_rows,
            col_vals,
            row_ptr,
            row_cols,
            row_vals,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.col_vals.len()
    }

    /// Nonzeros of one column as `(row, value)`.
    pub fn column(&self, c: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.col_ptr[c]..self.col_ptr[c + 1]).map(move |k| (self.col_rows[k], self.col_vals[k]))
    }

    /// Nonzeros of one row as `(column, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.row_cols[k], self.row_vals[k]))
    }

    /// `y = T x` with `x` on the superspace.
    pub fn apply<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .into_par_iter()
            .map(|r| self.row(r).map(|(c, v)| x[c] * v).sum())
            .collect())
    }

    /// `y = T^T x` with `x` on the spline space.
    pub fn apply_transpose<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: x.len(),
            });
        }
        Ok((0..self.cols)
            .into_par_iter()
            .map(|c| self.column(c).map(|(r, v)| x[r] * v).sum())
            .collect())
    }

    /// Dense copy, row-major; intended for small test problems.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.cols]; self.rows];
        for (r, row) in d.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] = v;
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sphere, torus, Builtin};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn spaces(b: Builtin, p: usize, m: u32) -> (SplineSpace, SuperSpace, TransformMatrix) {
        let mesh = Arc::new(Mesh::new(Arc::new(b.surface()), m).unwrap());
        let spl = SplineSpace::new(mesh.clone(), p);
        let sup = SuperSpace::new(mesh, p);
        let t = spl.transform(&sup).unwrap();
        (spl, sup, t)
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dim_superspace(6, 2, 3), 3456);
        assert_eq!(dim_superspace(16, 1, 2), 1024);
        assert_eq!(dim_superspace(24, 4, 5), 614400);
        assert_eq!(dim_splinespace(6, 1, 6), 25_350);
        assert_eq!(dim_splinespace(6, 0, 7), 98_304);
        for m in 0..6 {
            assert_eq!(dim_splinespace(16, 0, m), dim_superspace(16, 0, m));
        }
    }

    #[test]
    fn space_dims_match_formulas() {
        let (spl, sup, t) = spaces(Builtin::Torus, 2, 2);
        assert_eq!(spl.dim(), dim_splinespace(16, 2, 2));
        assert_eq!(sup.dim(), dim_superspace(16, 2, 2));
        assert_eq!((t.rows(), t.cols()), (spl.dim(), sup.dim()));
    }

    #[test]
    fn constant_degree_is_a_permutation() {
        let (_, _, t) = spaces(Builtin::Sphere, 0, 2);
        assert_eq!(t.rows(), t.cols());
        let mut seen = vec![false; t.rows()];
        for c in 0..t.cols() {
            let col: Vec<_> = t.column(c).collect();
            assert_eq!(col.len(), 1);
            assert_eq!(col[0].1, 1.0);
            assert!(!seen[col[0].0]);
            seen[col[0].0] = true;
        }
    }

    #[test]
    fn column_sparsity() {
        for p in 0..5 {
            let (_, _, t) = spaces(Builtin::Sphere, p, 2);
            for c in 0..t.cols() {
                assert!(t.column(c).count() <= (p + 1) * (p + 1));
            }
        }
    }

    #[test]
    fn constants_reproduced() {
        let (spl, _, t) = spaces(Builtin::Sphere, 3, 2);
        let ones = vec![1.0; spl.dim()];
        let star = t.apply_transpose(&ones).unwrap();
        assert!(star.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn bernstein_reexpansion_single_patch_level_one() {
        let (spl, sup, t) = spaces(Builtin::Sphere, 1, 1);
        let mut rng = rand::rngs::StdRng::seed_from_u64(4);
        let v: Vec<f64> = (0..spl.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let star = t.apply_transpose(&v).unwrap();
        for _ in 0..50 {
            let (x, y): (f64, f64) = (rng.gen(), rng.gen());
            let a = spl.eval(&v, 0, x, y);
            let b = sup.eval(&star, 0, x, y);
            assert!((a - b).abs() <= 1e-13);
        }
    }

    #[test]
    fn full_row_rank() {
        // Gram matrix T T^T is positive definite: check by Cholesky.
        let (_, _, t) = spaces(Builtin::Sphere, 2, 1);
        let d = t.to_dense();
        let n = d.len();
        let mut g = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = d[i].iter().zip(&d[j]).map(|(a, b)| a * b).sum();
            }
        }
        for j in 0..n {
            let mut s = g[j][j];
            for k in 0..j {
                s -= g[j][k] * g[j][k];
            }
            assert!(s > 1e-12, "pivot {j}: {s}");
            g[j][j] = s.sqrt();
            for i in j + 1..n {
                let mut v = g[i][j];
                for k in 0..j {
                    v -= g[i][k] * g[j][k];
                }
                g[i][j] = v / g[j][j];
            }
        }
    }

    #[test]
    fn transforms_are_consistent() {
        let (spl, sup, t) = spaces(Builtin::Torus, 2, 1);
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        let u: Vec<f64> = (0..spl.dim()).map(|_| rng.gen()).collect();
        let w: Vec<f64> = (0..sup.dim()).map(|_| rng.gen()).collect();
        // <T^T u, w> = <u, T w>
        let a: f64 = t
            .apply_transpose(&u)
            .unwrap()
            .iter()
            .zip(&w)
            .map(|(x, y)| x * y)
            .sum();
        let b: f64 = t
            .apply(&w)
            .unwrap()
            .iter()
            .zip(&u)
            .map(|(x, y)| x * y)
            .sum();
        assert!((a - b).abs() < 1e-12 * a.abs());
        assert!(t.apply(&u).is_err());
        assert!(t.apply_transpose(&w).is_err());
    }

    #[test]
    fn foreign_mesh_rejected() {
        let s = Arc::new(sphere());
        let m1 = Arc::new(Mesh::new(s.clone(), 1).unwrap());
        let m2 = Arc::new(Mesh::new(s, 1).unwrap());
        let spl = SplineSpace::new(m1, 1);
        assert!(spl.transform(&SuperSpace::new(m2.clone(), 1)).is_err());
        let _ = torus();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn superspace_contains_spline_space(p in 0usize..=4, m in 0u32..=2, seed in 0u64..1000) {
            let (spl, sup, t) = spaces(Builtin::Sphere, p, m);
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let v: Vec<f64> = (0..spl.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let star = t.apply_transpose(&v).unwrap();
            for _ in 0..40 {
                let patch = rng.gen_range(0..6);
                let (x, y): (f64, f64) = (rng.gen(), rng.gen());
                prop_assert!((spl.eval(&v, patch, x, y) - sup.eval(&star, patch, x, y)).abs() <= 1e-13);
            }
        }
    }
}
