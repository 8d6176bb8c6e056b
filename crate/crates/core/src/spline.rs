//! Open knot vectors, B-spline bases, Bernstein polynomials and Bézier
//! extraction.
//!
//! All bases live on the unit interval. Knot vectors are *p-open*: the first
//! and last knot are repeated `p + 1` times, so the basis interpolates at the
//! end points and forms a partition of unity on the closed interval.

use crate::error::{Error, Result};

/// Tolerance used when comparing knots for equality.
const KNOT_EPS: f64 = 1e-14;

/// Largest supported polynomial degree.
pub const MAX_DEGREE: usize = 15;

/// A p-open knot vector on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct KnotVector {
    degree: usize,
    knots: Vec<f64>,
}

impl KnotVector {
    /// Validates and wraps a knot sequence.
    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self> {
        let p = degree;
        if p > MAX_DEGREE {
            return Err(Error::KnotVector(format!(
                "degree {p} exceeds {MAX_DEGREE}"
            )));
        }
        if knots.len() < 2 * (p + 1) {
            return Err(Error::KnotVector(format!(
                "degree {p} needs at least {} knots, got {}",
                2 * (p + 1),
                knots.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite() || *k < 0.0 || *k > 1.0) {
            return Err(Error::KnotVector("knots must lie in [0, 1]".into()));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::KnotVector("knots must be nondecreasing".into()));
        }
        let n = knots.len();
        if knots[..=p].iter().any(|&k| k != 0.0) || knots[n - p - 1..].iter().any(|&k| k != 1.0) {
            return Err(Error::KnotVector(format!(
                "first and last knot must be repeated {} times",
                p + 1
            )));
        }
        // Interior multiplicity above p would disconnect the basis.
        let mut run = 1;
        for w in knots[p..n - p].windows(2) {
            if (w[1] - w[0]).abs() <= KNOT_EPS {
                run += 1;
            } else {
                run = 1;
            }
            if run > p + 1 && w[0] > 0.0 && w[0] < 1.0 {
                return Err(Error::KnotVector(format!(
                    "interior knot {} repeated more than {} times",
                    w[0],
                    p + 1
                )));
            }
        }
        Ok(KnotVector { degree, knots })
    }

    /// The uniformly refined knot vector with interior knots `i / 2^level`.
    pub fn uniform(degree: usize, level: u32) -> Self {
        assert!(degree <= MAX_DEGREE, "degree {degree} exceeds {MAX_DEGREE}");
        let n = 1usize << level;
        let mut knots = Vec::with_capacity(n + 2 * degree + 1);
        knots.extend(std::iter::repeat(0.0).take(degree + 1));
        knots.extend((1..n).map(|i| i as f64 / n as f64));
        knots.extend(std::iter::repeat(1.0).take(degree + 1));
        KnotVector { degree, knots }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of basis functions (control points).
    pub fn num_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Nonempty knot spans as `(span index, left, right)`.
    pub fn spans(&self) -> Vec<(usize, f64, f64)> {
        let p = self.degree;
        (p..self.num_basis())
            .filter(|&j| self.knots[j + 1] > self.knots[j])
            .map(|j| (j, self.knots[j], self.knots[j + 1]))
            .collect()
    }

    /// Number of Bézier elements (nonempty spans).
    pub fn num_elements(&self) -> usize {
        self.spans().len()
    }

    /// Largest distance between neighbouring knots.
    pub fn mesh_size(&self) -> f64 {
        self.knots
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Span index `j` with `knots[j] <= x < knots[j + 1]`; `x = 1` falls into
    /// the last nonempty span.
    pub fn find_span(&self, x: f64) -> usize {
        let p = self.degree;
        let k = self.num_basis();
        if x >= self.knots[k] {
            let mut j = k - 1;
            while j > p && self.knots[j] >= self.knots[j + 1] {
                j -= 1;
            }
            return j;
        }
        // Binary search in [p, k).
        let (mut lo, mut hi) = (p, k);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if x < self.knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    fn check_param(x: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::domain(x, "[0, 1]"));
        }
        Ok(())
    }

    /// Values of the `p + 1` basis functions that are nonzero on `span`,
    /// i.e. `b_{span-p}, ..., b_span` at `x`.
    pub fn nonzero_basis(&self, span: usize, x: f64, values: &mut [f64]) {
        self.nonzero_basis_of_degree(self.degree, span, x, values);
    }

    fn nonzero_basis_of_degree(&self, degree: usize, span: usize, x: f64, values: &mut [f64]) {
        let u = &self.knots;
        let mut left = [0.0f64; MAX_DEGREE + 1];
        let mut right = [0.0f64; MAX_DEGREE + 1];
        values[0] = 1.0;
        for j in 1..=degree {
            left[j] = x - u[span + 1 - j];
            right[j] = u[span + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                let denom = right[r + 1] + left[j - r];
                let temp = if denom == 0.0 { 0.0 } else { values[r] / denom };
                values[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            values[j] = saved;
        }
    }

    /// Values and first derivatives of the nonzero basis functions on `span`.
    pub fn nonzero_basis_with_derivative(
        &self,
        span: usize,
        x: f64,
        values: &mut [f64],
        derivs: &mut [f64],
    ) {
        let p = self.degree;
        if p == 0 {
            values[0] = 1.0;
            derivs[0] = 0.0;
            return;
        }
        let u = &self.knots;
        let mut lower = [0.0f64; MAX_DEGREE + 1];
        self.nonzero_basis_of_degree(p - 1, span, x, &mut lower);
        // lower[r] = b_{span-p+1+r}^{p-1}; the degree-reduction formula
        // b_i' = p (b_i^{p-1}/(u_{i+p}-u_i) - b_{i+1}^{p-1}/(u_{i+p+1}-u_{i+1})).
        for r in 0..=p {
            let i = span - p + r;
            let mut d = 0.0;
            if r >= 1 {
                let denom = u[i + p] - u[i];
                if denom > 0.0 {
                    d += lower[r - 1] / denom;
                }
            }
            if r < p {
                let denom = u[i + p + 1] - u[i + 1];
                if denom > 0.0 {
                    d -= lower[r] / denom;
                }
            }
            derivs[r] = p as f64 * d;
        }
        self.nonzero_basis(span, x, values);
    }

    /// All `k` basis values at `x`.
    pub fn eval_basis(&self, x: f64) -> Result<Vec<f64>> {
        Self::check_param(x)?;
        let p = self.degree;
        let span = self.find_span(x);
        let mut local = vec![0.0; p + 1];
        self.nonzero_basis(span, x, &mut local);
        let mut out = vec![0.0; self.num_basis()];
        out[span - p..=span].copy_from_slice(&local);
        Ok(out)
    }

    /// All `k` basis derivatives at `x`.
    pub fn eval_basis_derivative(&self, x: f64) -> Result<Vec<f64>> {
        Self::check_param(x)?;
        let p = self.degree;
        let span = self.find_span(x);
        let mut vals = vec![0.0; p + 1];
        let mut ders = vec![0.0; p + 1];
        self.nonzero_basis_with_derivative(span, x, &mut vals, &mut ders);
        let mut out = vec![0.0; self.num_basis()];
        out[span - p..=span].copy_from_slice(&ders);
        Ok(out)
    }

    /// Bézier extraction operators, one per nonempty span, by knot insertion.
    ///
    /// For element `e` with span index `s`, the nonzero basis functions
    /// satisfy `b_{s-p+i}(x) = sum_a C[i][a] B_{a,p}(t)` where `t` is the
    /// affine image of `x` in `[0, 1]`.
    pub fn bezier_extraction(&self) -> Vec<ExtractionOperator> {
        let p = self.degree;
        let m = self.knots.len();
        // 1-based access, following the usual presentation of the algorithm.
        let u = |i: usize| self.knots[i - 1];
        let identity = || {
            let mut c = vec![vec![0.0; p + 1]; p + 1];
            for (i, row) in c.iter_mut().enumerate() {
                row[i] = 1.0;
            }
            c
        };
        let mut ops: Vec<Vec<Vec<f64>>> = vec![identity()];
        let mut a = p + 1;
        let mut b = a + 1;
        let mut alphas = vec![0.0; p + 1];
        while b < m {
            let mut next = identity();
            let i = b;
            while b < m && u(b + 1) == u(b) {
                b += 1;
            }
            let mult = b - i + 1;
            let cur = ops.last_mut().unwrap();
            if mult < p {
                let numer = u(b) - u(a);
                for j in (mult + 1..=p).rev() {
                    alphas[j - mult] = numer / (u(a + j) - u(a));
                }
                let r = p - mult;
                for j in 1..=r {
                    let save = r - j + 1;
                    let s = mult + j;
                    for k in (s + 1..=p + 1).rev() {
                        let alpha = alphas[k - s];
                        for row in cur.iter_mut() {
                            row[k - 1] = alpha * row[k - 1] + (1.0 - alpha) * row[k - 2];
                        }
                    }
                    if b < m {
                        // next(save : save + j, save) = cur(p - j + 1 : p + 1, p + 1)
                        for t in 0..=j {
                            next[save + t - 1][save - 1] = cur[p - j + t][p];
                        }
                    }
                }
            }
            if b < m {
                ops.push(next);
                a = b;
                b += 1;
            }
        }
        let spans = self.spans();
        debug_assert_eq!(spans.len(), ops.len());
        spans
            .into_iter()
            .zip(ops)
            .map(|((span, left, right), coeffs)| ExtractionOperator {
                span,
                left,
                right,
                coeffs,
            })
            .collect()
    }
}

/// Per-element Bézier extraction matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtractionOperator {
    /// Span index `s`; the local functions are `b_{s-p}, ..., b_s`.
    pub span: usize,
    pub left: f64,
    pub right: f64,
    /// `coeffs[i][a]`: coefficient of `B_{a,p}` in local function `i`.
    pub coeffs: Vec<Vec<f64>>,
}

impl ExtractionOperator {
    /// Evaluates the local B-spline functions at global parameter `x` via the
    /// Bernstein basis.
    pub fn eval_local(&self, x: f64, out: &mut [f64]) {
        let p = self.coeffs.len() - 1;
        let t = (x - self.left) / (self.right - self.left);
        let mut bern = [0.0; MAX_DEGREE + 1];
        bernstein_all(p, t, &mut bern);
        for (o, row) in out.iter_mut().zip(&self.coeffs) {
            *o = row.iter().zip(&bern).map(|(c, b)| c * b).sum();
        }
    }
}

/// Tensor product of two spline bases on the unit square.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorBSplineSpace {
    pub u: KnotVector,
    pub v: KnotVector,
}

impl TensorBSplineSpace {
    pub fn new(u: KnotVector, v: KnotVector) -> Self {
        TensorBSplineSpace { u, v }
    }

    pub fn uniform(degree: usize, level: u32) -> Self {
        let kv = KnotVector::uniform(degree, level);
        TensorBSplineSpace {
            u: kv.clone(),
            v: kv,
        }
    }

    pub fn dim(&self) -> usize {
        self.u.num_basis() * self.v.num_basis()
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// `B_{i,p}(x) = binom(p, i) x^i (1 - x)^(p - i)`.
pub fn bernstein(p: usize, i: usize, x: f64) -> Result<f64> {
    if i > p {
        return Err(Error::IndexOutOfRange { index: i, limit: p });
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(x, "[0, 1]"));
    }
    Ok(binomial(p, i) * x.powi(i as i32) * (1.0 - x).powi((p - i) as i32))
}

/// All `p + 1` Bernstein polynomials of degree `p` at `x`.
#[inline]
pub fn bernstein_all(p: usize, x: f64, out: &mut [f64]) {
    let y = 1.0 - x;
    out[0] = 1.0;
    for j in 1..=p {
        let mut saved = 0.0;
        for k in 0..j {
            let t = out[k];
            out[k] = saved + y * t;
            saved = x * t;
        }
        out[j] = saved;
    }
}

/// Bernstein values and derivatives of degree `p` at `x`.
pub fn bernstein_all_with_derivative(p: usize, x: f64, values: &mut [f64], derivs: &mut [f64]) {
    if p == 0 {
        values[0] = 1.0;
        derivs[0] = 0.0;
        return;
    }
    let mut lower = [0.0; MAX_DEGREE + 1];
    bernstein_all(p - 1, x, &mut lower);
    for i in 0..=p {
        let a = if i >= 1 { lower[i - 1] } else { 0.0 };
        let b = if i < p { lower[i] } else { 0.0 };
        derivs[i] = p as f64 * (a - b);
    }
    bernstein_all(p, x, values);
}

/// The `p + 1` Bernstein polynomials of one degree, as used on every element
/// of a refinement level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BernsteinBasis {
    pub degree: usize,
}

impl BernsteinBasis {
    pub fn new(degree: usize) -> Self {
        BernsteinBasis { degree }
    }

    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn eval(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.degree + 1];
        bernstein_all(self.degree, x, &mut out);
        out
    }

    /// Tensor product values `B_{a,p}(x) B_{b,p}(y)` at index `a + (p+1) b`.
    pub fn eval_tensor(&self, x: f64, y: f64, out: &mut [f64]) {
        let n = self.degree + 1;
        let mut bx = [0.0; MAX_DEGREE + 1];
        let mut by = [0.0; MAX_DEGREE + 1];
        bernstein_all(self.degree, x, &mut bx);
        bernstein_all(self.degree, y, &mut by);
        for b in 0..n {
            for a in 0..n {
                out[a + n * b] = bx[a] * by[b];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Literal Cox-de Boor recursion with the 0/0 = 0 convention.
    fn cox_de_boor(kv: &KnotVector, j: usize, p: usize, x: f64) -> f64 {
        let u = kv.knots();
        if p == 0 {
            let last = kv.find_span(1.0);
            if (u[j] <= x && x < u[j + 1]) || (x == 1.0 && j == last) {
                return 1.0;
            }
            return 0.0;
        }
        let mut v = 0.0;
        let d1 = u[j + p] - u[j];
        if d1 > 0.0 {
            v += (x - u[j]) / d1 * cox_de_boor(kv, j, p - 1, x);
        }
        let d2 = u[j + p + 1] - u[j + 1];
        if d2 > 0.0 {
            v += (u[j + p + 1] - x) / d2 * cox_de_boor(kv, j + 1, p - 1, x);
        }
        v
    }

    #[test]
    fn uniform_knots() {
        let kv = KnotVector::uniform(2, 0);
        assert_eq!(kv.knots(), &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(kv.num_basis(), 3);
        let kv = KnotVector::uniform(2, 1);
        assert_eq!(kv.knots(), &[0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0]);
        assert_eq!(kv.num_basis(), 4);
        for p in 0..5 {
            for m in 0..6 {
                let kv = KnotVector::uniform(p, m);
                assert_eq!(kv.num_basis(), (1 << m) + p);
                assert_eq!(kv.num_elements(), 1 << m);
            }
        }
    }

    #[test]
    fn one_third_knots() {
        let kv = KnotVector::new(1, vec![0.0, 0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0, 1.0]).unwrap();
        assert_eq!(kv.num_basis(), 4);
        let b = kv.eval_basis(0.5).unwrap();
        let expected = [0.0, 0.5, 0.5, 0.0];
        for (x, y) in b.iter().zip(expected) {
            assert!((x - y).abs() < 1e-15);
        }
        let kv0 = KnotVector::new(0, vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]).unwrap();
        assert_eq!(kv0.eval_basis(0.2).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(kv0.eval_basis(1.0).unwrap(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn invalid_knots_rejected() {
        assert!(KnotVector::new(1, vec![0.0, 0.5, 1.0, 1.0]).is_err());
        assert!(KnotVector::new(1, vec![0.0, 0.0, 0.7, 0.5, 1.0, 1.0]).is_err());
        assert!(KnotVector::new(1, vec![0.0, 0.0, 1.5, 1.0, 1.0]).is_err());
        assert!(KnotVector::new(2, vec![0.0, 0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn endpoint_interpolation() {
        for p in 0..5 {
            let kv = KnotVector::uniform(p, 2);
            let b = kv.eval_basis(0.0).unwrap();
            assert_eq!(b[0], 1.0);
            assert!(b[1..].iter().all(|&v| v == 0.0));
            let b = kv.eval_basis(1.0).unwrap();
            assert_eq!(*b.last().unwrap(), 1.0);
        }
    }

    #[test]
    fn out_of_domain() {
        let kv = KnotVector::uniform(2, 1);
        assert!(kv.eval_basis(-0.1).is_err());
        assert!(kv.eval_basis(1.0001).is_err());
        assert!(kv.eval_basis_derivative(2.0).is_err());
    }

    #[test]
    fn derivative_examples() {
        let kv = KnotVector::uniform(1, 0);
        let d = kv.eval_basis_derivative(0.3).unwrap();
        assert!((d[0] + 1.0).abs() < 1e-15 && (d[1] - 1.0).abs() < 1e-15);
        // Quadratic Bernstein derivatives at 1/2: -2(1-x), 2-4x, 2x.
        let kv = KnotVector::uniform(2, 0);
        let d = kv.eval_basis_derivative(0.5).unwrap();
        for (x, y) in d.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((x - y).abs() < 1e-15);
        }
        let kv = KnotVector::uniform(3, 3);
        let s: f64 = kv.eval_basis_derivative(0.77).unwrap().iter().sum();
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let kv = KnotVector::new(3, vec![0., 0., 0., 0., 0.2, 0.55, 0.6, 1., 1., 1., 1.]).unwrap();
        let h = 1e-6;
        for &x in &[0.1, 0.3, 0.57, 0.81] {
            let d = kv.eval_basis_derivative(x).unwrap();
            let fp = kv.eval_basis(x + h).unwrap();
            let fm = kv.eval_basis(x - h).unwrap();
            for j in 0..d.len() {
                let fd = (fp[j] - fm[j]) / (2.0 * h);
                assert!((fd - d[j]).abs() < 1e-6, "x={x} j={j}: {fd} vs {}", d[j]);
            }
        }
    }

    #[test]
    fn bernstein_examples() {
        assert!((bernstein(2, 1, 0.5).unwrap() - 0.5).abs() < 1e-15);
        for p in 0..6 {
            assert_eq!(bernstein(p, 0, 0.0).unwrap(), 1.0);
        }
        let s: f64 = (0..=3).map(|i| bernstein(3, i, 0.31).unwrap()).sum();
        assert!((s - 1.0).abs() < 1e-15);
        assert!(bernstein(2, 3, 0.5).is_err());
        assert!(bernstein(2, 1, 1.5).is_err());
    }

    #[test]
    fn bernstein_all_matches_formula() {
        let mut out = [0.0; 8];
        for p in 0..7 {
            for &x in &[0.0, 0.13, 0.5, 0.91, 1.0] {
                bernstein_all(p, x, &mut out);
                for i in 0..=p {
                    assert!((out[i] - bernstein(p, i, x).unwrap()).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn extraction_trivial_cases() {
        let kv = KnotVector::uniform(1, 0);
        let ops = kv.bezier_extraction();
        assert_eq!(ops.len(), 1);
        assert_eq!(ops[0].coeffs, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let kv = KnotVector::new(0, vec![0.0, 0.25, 0.5, 1.0]).unwrap();
        let ops = kv.bezier_extraction();
        assert_eq!(ops.len(), 3);
        assert!(ops.iter().all(|op| op.coeffs == vec![vec![1.0]]));
    }

    #[test]
    fn extraction_reconstructs_basis() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let kv = KnotVector::uniform(2, 1);
        let ops = kv.bezier_extraction();
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let x: f64 = rng.gen();
            let direct = kv.eval_basis(x).unwrap();
            let op = ops.iter().find(|op| op.left <= x && x <= op.right).unwrap();
            let mut local = [0.0; 3];
            op.eval_local(x, &mut local);
            for i in 0..3 {
                worst = worst.max((local[i] - direct[op.span - 2 + i]).abs());
            }
        }
        assert!(worst <= 1e-13, "{worst}");
    }

    #[test]
    fn extraction_nonuniform_with_repeated_knot() {
        let kv =
            KnotVector::new(3, vec![0., 0., 0., 0., 0.2, 0.5, 0.5, 0.7, 1., 1., 1., 1.]).unwrap();
        let ops = kv.bezier_extraction();
        assert_eq!(ops.len(), 4);
        for op in &ops {
            for t in 0..=10 {
                let x = op.left + (op.right - op.left) * t as f64 / 10.0;
                let direct = kv.eval_basis(x).unwrap();
                let mut local = [0.0; 4];
                op.eval_local(x, &mut local);
                for i in 0..4 {
                    let j = op.span - 3 + i;
                    // At shared knots the direct evaluation picks the right span.
                    let sp = kv.find_span(x);
                    if sp == op.span {
                        assert!((local[i] - direct[j]).abs() < 1e-13);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn partition_of_unity(p in 0usize..=5, m in 0u32..=6, x in 0.0f64..=1.0) {
            let kv = KnotVector::uniform(p, m);
            let b = kv.eval_basis(x).unwrap();
            let s: f64 = b.iter().sum();
            prop_assert!((s - 1.0).abs() <= 1e-14);
            prop_assert!(b.iter().all(|&v| v >= 0.0));
        }

        #[test]
        fn local_support(p in 0usize..=4, m in 0u32..=4, x in 0.0f64..1.0) {
            let kv = KnotVector::uniform(p, m);
            let b = kv.eval_basis(x).unwrap();
            let u = kv.knots();
            for (j, v) in b.iter().enumerate() {
                if x < u[j] || x > u[j + p + 1] {
                    prop_assert_eq!(*v, 0.0);
                }
            }
        }

        #[test]
        fn matches_recursive_cox_de_boor(p in 0usize..=4, m in 0u32..=3, x in 0.0f64..=1.0) {
            let kv = KnotVector::uniform(p, m);
            let b = kv.eval_basis(x).unwrap();
            for j in 0..kv.num_basis() {
                prop_assert!((b[j] - cox_de_boor(&kv, j, p, x)).abs() < 1e-14);
            }
        }

        #[test]
        fn extraction_equivalence(p in 0usize..=5, m in 0u32..=4, x in 0.0f64..=1.0) {
            let kv = KnotVector::uniform(p, m);
            let ops = kv.bezier_extraction();
            let span = kv.find_span(x);
            let op = ops.iter().find(|op| op.span == span).unwrap();
            let direct = kv.eval_basis(x).unwrap();
            let mut local = [0.0; 8];
            op.eval_local(x, &mut local);
            for i in 0..=p {
                prop_assert!((local[i] - direct[span - p + i]).abs() <= 1e-13);
            }
        }
    }
}
