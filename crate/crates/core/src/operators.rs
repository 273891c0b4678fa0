//! Structured measurement operators.
//!
//! The kernel operator acts on `n x n` matrices as
//!
//! ```text
//! H(X) = X + QCQ' <B, Q'XQ> + QBQ' <C, Q'XQ>
//! ```
//!
//! where `Q = [Q1 Q2]` collects `r* + r` distinct columns of the identity,
//! and the blocks (in the `r* + r` coordinates picked out by `Q`) are
//!
//! ```text
//! B = [ 0        -eps*1*1' ]        C = (alpha^2/r*) [ I  0 ]
//!     [ -eps*1*1'   I_r    ]                         [ 0  0 ]
//! ```
//!
//! In vectorized form `H = I + b c' + c b'` with `b = vec(QBQ')`,
//! `c = vec(QCQ')` and `b'c = 0`, which gives the eigenvalues
//! `{1 + delta, 1 - delta, 1, ..., 1}` for `delta = |b||c|` and hence the
//! restricted isometry constant in closed form. A concrete map with
//! `A*A = H` is the rank-one correction `vec(A(X)) = [I + (b + gamma*c)c']
//! vec(X)`; `gamma` solves `|c|^2 g^2 + 2g + |b|^2 = 0`.
//!
//! Operators are stored by their parameters and applied structurally in
//! `O(n^2)`; the dense `n^2 x n^2` form exists only as a debug path for
//! small `n`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest side length for which the dense `n^2 x n^2` debug path is built.
pub const DENSE_VEC_FORM_MAX_N: usize = 8;

/// Self-adjoint kernel `H = A*A` stored by its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelParams", into = "KernelParams")]
pub struct KernelOperator {
    n: usize,
    r: usize,
    r_star: usize,
    eps: f64,
    alpha: f64,
    perm_cols: Vec<usize>,
}

/// Wire form of [`KernelOperator`]; validated on deserialization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelParams {
    pub n: usize,
    pub r: usize,
    pub r_star: usize,
    pub eps: f64,
    pub alpha: f64,
    pub perm_cols: Vec<usize>,
}

impl TryFrom<KernelParams> for KernelOperator {
    type Error = Error;
    fn try_from(p: KernelParams) -> Result<Self> {
        KernelOperator::with_cols(p.n, p.r, p.r_star, p.eps, p.alpha, p.perm_cols)
    }
}

impl From<KernelOperator> for KernelParams {
    fn from(k: KernelOperator) -> Self {
        KernelParams {
            n: k.n,
            r: k.r,
            r_star: k.r_star,
            eps: k.eps,
            alpha: k.alpha,
            perm_cols: k.perm_cols,
        }
    }
}

impl KernelOperator {
    /// Build a kernel with the default column choice `[0, ..., r* + r - 1]`.
    pub fn new(n: usize, r: usize, r_star: usize, eps: f64, alpha: f64) -> Result<Self> {
        let cols = (0..r_star + r).collect();
        Self::with_cols(n, r, r_star, eps, alpha, cols)
    }

    /// Build a kernel with an explicit choice of identity columns; the first
    /// `r_star` entries define `Q1`, the remaining `r` define `Q2`.
    pub fn with_cols(
        n: usize,
        r: usize,
        r_star: usize,
        eps: f64,
        alpha: f64,
        perm_cols: Vec<usize>,
    ) -> Result<Self> {
        if r_star < 1 || r < r_star {
            return Err(Error::InvalidParameter(format!(
                "require r >= r_star >= 1, got r = {r}, r_star = {r_star}"
            )));
        }
        if r + r_star > n {
            return Err(Error::Dimension(format!(
                "require r + r_star <= n, got r + r_star = {} > n = {n}",
                r + r_star
            )));
        }
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "eps must be positive and finite, got {eps}"
            )));
        }
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        if perm_cols.len() != r_star + r {
            return Err(Error::InvalidParameter(format!(
                "perm_cols must have r_star + r = {} entries, got {}",
                r_star + r,
                perm_cols.len()
            )));
        }
        let mut seen = vec![false; n];
        for &p in &perm_cols {
            if p >= n {
                return Err(Error::InvalidParameter(format!(
                    "perm_cols entry {p} out of range [0, {n})"
                )));
            }
            if seen[p] {
                return Err(Error::InvalidParameter(format!(
                    "perm_cols entry {p} is duplicated"
                )));
            }
            seen[p] = true;
        }
        Ok(Self {
            n,
            r,
            r_star,
            eps,
            alpha,
            perm_cols,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn r_star(&self) -> usize {
        self.r_star
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn perm_cols(&self) -> &[usize] {
        &self.perm_cols
    }

    /// `delta = alpha^2 sqrt(r/r* + 2 eps^2 r) = |B||C|`, the RIP constant.
    pub fn rip_constant(&self) -> f64 {
        let (r, rs) = (self.r as f64, self.r_star as f64);
        self.alpha.powi(2) * (r / rs + 2.0 * self.eps.powi(2) * r).sqrt()
    }

    /// Open upper bound on admissible `alpha` for the instance constructors:
    /// `alpha < (r/r* + 2 eps^2 r)^{-1/4}` keeps `delta < 1`.
    pub fn alpha_upper_bound(r: usize, r_star: usize, eps: f64) -> f64 {
        let (r, rs) = (r as f64, r_star as f64);
        (r / rs + 2.0 * eps.powi(2) * r).powf(-0.25)
    }

    /// `|b| = sqrt(r + 2 eps^2 r r*)` for `b = vec(QBQ')`.
    pub fn b_norm(&self) -> f64 {
        let (r, rs) = (self.r as f64, self.r_star as f64);
        (r + 2.0 * self.eps.powi(2) * r * rs).sqrt()
    }

    /// `|c| = alpha^2 / sqrt(r*)` for `c = vec(QCQ')`.
    pub fn c_norm(&self) -> f64 {
        self.alpha.powi(2) / (self.r_star as f64).sqrt()
    }

    /// Analytic spectrum `{1 + delta, 1 - delta, 1 (n^2 - 2 times)}`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let delta = self.rip_constant();
        let mut eig = Vec::with_capacity(self.n * self.n);
        eig.push(1.0 + delta);
        eig.push(1.0 - delta);
        eig.resize(self.n * self.n, 1.0);
        eig
    }

    /// `<B, Q'XQ>` evaluated over the support of `B` only.
    fn b_inner(&self, x: &DMatrix<f64>) -> f64 {
        let p = &self.perm_cols;
        let mut trace = 0.0;
        for j in 0..self.r {
            trace += x[(p[self.r_star + j], p[self.r_star + j])];
        }
        let mut coupling = 0.0;
        for i in 0..self.r_star {
            for j in 0..self.r {
                coupling += x[(p[i], p[self.r_star + j])] + x[(p[self.r_star + j], p[i])];
            }
        }
        trace - self.eps * coupling
    }

    /// `<C, Q'XQ> = (alpha^2/r*) tr(Q1' X Q1)`.
    fn c_inner(&self, x: &DMatrix<f64>) -> f64 {
        let p = &self.perm_cols;
        let mut trace = 0.0;
        for i in 0..self.r_star {
            trace += x[(p[i], p[i])];
        }
        self.alpha.powi(2) / self.r_star as f64 * trace
    }

    /// Add `s * QBQ'` to `out` in place.
    fn add_scaled_b(&self, out: &mut DMatrix<f64>, s: f64) {
        let p = &self.perm_cols;
        for j in 0..self.r {
            out[(p[self.r_star + j], p[self.r_star + j])] += s;
        }
        for i in 0..self.r_star {
            for j in 0..self.r {
                out[(p[i], p[self.r_star + j])] -= self.eps * s;
                out[(p[self.r_star + j], p[i])] -= self.eps * s;
            }
        }
    }

    /// Add `s * QCQ'` to `out` in place.
    fn add_scaled_c(&self, out: &mut DMatrix<f64>, s: f64) {
        let w = self.alpha.powi(2) / self.r_star as f64;
        for i in 0..self.r_star {
            let pi = self.perm_cols[i];
            out[(pi, pi)] += w * s;
        }
    }

    fn check_shape(&self, x: &DMatrix<f64>) -> Result<()> {
        if x.nrows() != self.n || x.ncols() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "kernel expects {0} x {0}, got {1} x {2}",
                self.n,
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(())
    }

    /// `H(X)`, the structured application in `O(n^2)`.
    pub fn apply(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_shape(x)?;
        let sb = self.b_inner(x);
        let sc = self.c_inner(x);
        let mut out = x.clone();
        self.add_scaled_c(&mut out, sb);
        self.add_scaled_b(&mut out, sc);
        Ok(out)
    }

    /// `vec(QBQ')` in column-major ordering.
    pub fn b_vec(&self) -> DVector<f64> {
        let mut b = DVector::zeros(self.n * self.n);
        let p = &self.perm_cols;
        for j in 0..self.r {
            b[p[self.r_star + j] + self.n * p[self.r_star + j]] = 1.0;
        }
        for i in 0..self.r_star {
            for j in 0..self.r {
                b[p[i] + self.n * p[self.r_star + j]] = -self.eps;
                b[p[self.r_star + j] + self.n * p[i]] = -self.eps;
            }
        }
        b
    }

    /// `vec(QCQ')` in column-major ordering.
    pub fn c_vec(&self) -> DVector<f64> {
        let mut c = DVector::zeros(self.n * self.n);
        let w = self.alpha.powi(2) / self.r_star as f64;
        for i in 0..self.r_star {
            let pi = self.perm_cols[i];
            c[pi + self.n * pi] = w;
        }
        c
    }

    /// Dense `I + bc' + cb'` acting on column-major `vec(X)`. Debug path,
    /// gated to `n <= 8`.
    pub fn dense_vec_form(&self) -> Result<DMatrix<f64>> {
        if self.n > DENSE_VEC_FORM_MAX_N {
            return Err(Error::InvalidParameter(format!(
                "dense vec form is gated to n <= {DENSE_VEC_FORM_MAX_N}, got n = {}",
                self.n
            )));
        }
        let b = self.b_vec();
        let c = self.c_vec();
        let m = self.n * self.n;
        let mut out = DMatrix::identity(m, m);
        out.gemm(1.0, &b, &c.transpose(), 1.0);
        out.gemm(1.0, &c, &b.transpose(), 1.0);
        Ok(out)
    }
}

/// Explicit realization `A` with `A*A = H`, stored as the kernel plus the
/// derived rank-one coefficient `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelOperator", into = "KernelOperator")]
pub struct MeasurementMap {
    kernel: KernelOperator,
    gamma: f64,
}

impl TryFrom<KernelOperator> for MeasurementMap {
    type Error = Error;
    fn try_from(kernel: KernelOperator) -> Result<Self> {
        MeasurementMap::new(kernel)
    }
}

impl From<MeasurementMap> for KernelOperator {
    fn from(m: MeasurementMap) -> Self {
        m.kernel
    }
}

impl MeasurementMap {
    /// Requires `delta < 1` so that `sqrt(1 - delta^2)` is real.
    pub fn new(kernel: KernelOperator) -> Result<Self> {
        let delta = kernel.rip_constant();
        if delta >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "realization requires delta < 1, got delta = {delta}"
            )));
        }
        let c_norm_sq = kernel.c_norm().powi(2);
        let gamma = (-1.0 + (1.0 - delta * delta).sqrt()) / c_norm_sq;
        Ok(Self { kernel, gamma })
    }

    pub fn kernel(&self) -> &KernelOperator {
        &self.kernel
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `A(X) = X + (c' vec X) * (QBQ' + gamma QCQ')`.
    pub fn apply(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.kernel.check_shape(x)?;
        let s = self.kernel.c_inner(x);
        let mut out = x.clone();
        self.kernel.add_scaled_b(&mut out, s);
        self.kernel.add_scaled_c(&mut out, self.gamma * s);
        Ok(out)
    }

    /// `A*(Y) = Y + <QBQ' + gamma QCQ', Y> * QCQ'`.
    pub fn apply_adjoint(&self, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.kernel.check_shape(y)?;
        let t = self.kernel.b_inner(y) + self.gamma * self.kernel.c_inner(y);
        let mut out = y.clone();
        self.kernel.add_scaled_c(&mut out, t);
        Ok(out)
    }
}

/// The measurement model of an instance: either full observation
/// (`delta = 0`) or a structured realization.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Identity,
    Structured(MeasurementMap),
}

impl Operator {
    pub fn structured(kernel: KernelOperator) -> Result<Self> {
        Ok(Operator::Structured(MeasurementMap::new(kernel)?))
    }

    pub fn rip_constant(&self) -> f64 {
        match self {
            Operator::Identity => 0.0,
            Operator::Structured(m) => m.kernel().rip_constant(),
        }
    }

    /// `A(X)`.
    pub fn apply(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        match self {
            Operator::Identity => Ok(x.clone()),
            Operator::Structured(m) => m.apply(x),
        }
    }

    /// `A*(Y)`.
    pub fn apply_adjoint(&self, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        match self {
            Operator::Identity => Ok(y.clone()),
            Operator::Structured(m) => m.apply_adjoint(y),
        }
    }

    /// Kernel application `H(X) = A*A(X)`, structurally (not by composition).
    pub fn apply_kernel(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        match self {
            Operator::Identity => Ok(x.clone()),
            Operator::Structured(m) => m.kernel().apply(x),
        }
    }

    /// `|A(X)|^2`.
    pub fn norm_apply_sq(&self, x: &DMatrix<f64>) -> Result<f64> {
        Ok(self.apply(x)?.norm_squared())
    }

    /// Side length the operator acts on, if constrained.
    pub fn n(&self) -> Option<usize> {
        match self {
            Operator::Identity => None,
            Operator::Structured(m) => Some(m.kernel().n()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
    }

    /// Dense oracle for `H(X)` via the vec form; independent of the
    /// structured application path.
    fn dense_kernel_apply(k: &KernelOperator, x: &DMatrix<f64>) -> DMatrix<f64> {
        let m = k.dense_vec_form().unwrap();
        let vx = DVector::from_column_slice(x.as_slice());
        let vy = m * vx;
        DMatrix::from_column_slice(k.n(), k.n(), vy.as_slice())
    }

    #[test]
    fn delta_closed_form_small_case() {
        // r = r* = 1, eps = 0.5, alpha = 0.5: delta = 0.25 sqrt(1.5)
        let k = KernelOperator::new(2, 1, 1, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(k.rip_constant(), 0.25 * 1.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(k.rip_constant(), 0.3061862, epsilon = 1e-7);
    }

    #[test]
    fn delta_closed_form_rectangular_case() {
        // r = 4, r* = 2, eps = 0.1, alpha = 0.6: delta = 0.36 sqrt(2.08)
        let k = KernelOperator::new(8, 4, 2, 0.1, 0.6).unwrap();
        assert_abs_diff_eq!(k.rip_constant(), 0.36 * 2.08f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(k.rip_constant(), 0.5191994, epsilon = 1e-7);
    }

    #[test]
    fn delta_equals_b_norm_times_c_norm_of_dense_vectors() {
        for (n, r, rs, eps, alpha) in [(4, 2, 1, 0.3, 0.4), (6, 2, 2, 0.5, 0.5)] {
            let k = KernelOperator::new(n, r, rs, eps, alpha).unwrap();
            let b = k.b_vec();
            let c = k.c_vec();
            assert_abs_diff_eq!(k.rip_constant(), b.norm() * c.norm(), epsilon = 1e-12);
            assert_abs_diff_eq!(k.b_norm(), b.norm(), epsilon = 1e-12);
            assert_abs_diff_eq!(k.c_norm(), c.norm(), epsilon = 1e-12);
            // b'c = 0: B vanishes on the support of C
            assert_abs_diff_eq!(b.dot(&c), 0.0, epsilon = 0.0);
        }
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(KernelOperator::new(2, 1, 1, 0.5, 0.5).is_ok());
        assert!(matches!(
            KernelOperator::new(2, 2, 1, 0.5, 0.5),
            Err(Error::Dimension(_))
        ));
        assert!(KernelOperator::new(4, 2, 1, 0.0, 0.5).is_err());
        assert!(KernelOperator::new(4, 2, 1, 0.5, -0.1).is_err());
        assert!(KernelOperator::with_cols(4, 2, 1, 0.5, 0.5, vec![0, 1, 1]).is_err());
        assert!(KernelOperator::with_cols(4, 2, 1, 0.5, 0.5, vec![0, 1, 4]).is_err());
    }

    #[test]
    fn apply_matches_dense_vec_form_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (n, r, rs, eps, alpha) in [
            (3, 1, 1, 0.5, 0.5),
            (5, 2, 1, 0.3, 0.4),
            (7, 2, 2, 0.1, 0.6),
        ] {
            let k = KernelOperator::new(n, r, rs, eps, alpha).unwrap();
            for _ in 0..20 {
                let x = random_matrix(&mut rng, n, n);
                let fast = k.apply(&x).unwrap();
                let slow = dense_kernel_apply(&k, &x);
                assert!((fast - slow).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn apply_on_q1_gram_matches_dense_oracle_and_form_is_symmetric() {
        let k = KernelOperator::new(4, 2, 1, 0.5, 0.5).unwrap();
        // X = Q1 Q1' (r* = 1): e1 e1'
        let mut x = DMatrix::zeros(4, 4);
        x[(0, 0)] = 1.0;
        let fast = k.apply(&x).unwrap();
        let slow = dense_kernel_apply(&k, &x);
        assert!((fast - slow).norm() <= 1e-14);
        let dense = k.dense_vec_form().unwrap();
        assert!((&dense - dense.transpose()).norm() == 0.0);
    }

    #[test]
    fn apply_is_identity_off_the_q_support() {
        // X supported outside the first r* + r rows/cols passes through.
        let k = KernelOperator::new(5, 2, 1, 0.5, 0.5).unwrap();
        let mut x = DMatrix::zeros(5, 5);
        x[(3, 4)] = 2.0;
        x[(4, 4)] = -1.0;
        let y = k.apply(&x).unwrap();
        assert_eq!(y, x);
        // and zero maps to zero
        let z = DMatrix::zeros(5, 5);
        assert_eq!(k.apply(&z).unwrap(), z);
    }

    #[test]
    fn apply_preserves_symmetry_and_skew_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let k = KernelOperator::new(6, 2, 2, 0.4, 0.5).unwrap();
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 6, 6);
            let sym = (&a + a.transpose()) * 0.5;
            let skew = (&a - a.transpose()) * 0.5;
            let hs = k.apply(&sym).unwrap();
            let hk = k.apply(&skew).unwrap();
            assert!((&hs - hs.transpose()).norm() <= 1e-13);
            assert!((&hk + hk.transpose()).norm() <= 1e-13);
        }
    }

    #[test]
    fn eigenvalues_match_dense_decomposition() {
        // (n=2, r=r*=1, eps=0.5, alpha=0.5) -> {1.30619, 0.69381, 1, 1}
        let k = KernelOperator::new(2, 1, 1, 0.5, 0.5).unwrap();
        let dense = k.dense_vec_form().unwrap();
        let mut numeric = dense.symmetric_eigen().eigenvalues.as_slice().to_vec();
        let mut analytic = k.eigenvalues();
        numeric.sort_by(|a, b| a.partial_cmp(b).unwrap());
        analytic.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (u, v) in numeric.iter().zip(&analytic) {
            assert_abs_diff_eq!(u, v, epsilon = 1e-10);
        }
        let delta = k.rip_constant();
        assert_abs_diff_eq!(analytic[0], 1.0 - delta, epsilon = 1e-15);
        assert_abs_diff_eq!(analytic[3], 1.0 + delta, epsilon = 1e-15);
        // all positive whenever delta < 1
        assert!(analytic.iter().all(|&e| e > 0.0));
    }

    #[test]
    fn realization_composes_to_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, r, rs, eps) in [(2, 1, 1, 0.5), (6, 2, 1, 0.1), (8, 3, 2, 0.5)] {
            let alpha = 0.5 * KernelOperator::alpha_upper_bound(r, rs, eps);
            let k = KernelOperator::new(n, r, rs, eps, alpha).unwrap();
            let map = MeasurementMap::new(k.clone()).unwrap();
            for _ in 0..100 {
                let x = random_matrix(&mut rng, n, n);
                let composed = map.apply_adjoint(&map.apply(&x).unwrap()).unwrap();
                let direct = k.apply(&x).unwrap();
                assert!((composed - direct).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn realization_rejects_delta_at_least_one() {
        // alpha at the open bound gives delta = 1 exactly up to rounding
        let bound = KernelOperator::alpha_upper_bound(1, 1, 0.5);
        let k = KernelOperator::new(2, 1, 1, 0.5, bound * 1.0000001).unwrap();
        assert!(MeasurementMap::new(k).is_err());
    }

    #[test]
    fn adjoint_inner_product_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let k = KernelOperator::new(5, 2, 1, 0.3, 0.5).unwrap();
        let map = MeasurementMap::new(k).unwrap();
        for _ in 0..50 {
            let x = random_matrix(&mut rng, 5, 5);
            let y = random_matrix(&mut rng, 5, 5);
            let lhs = map.apply(&x).unwrap().dot(&y);
            let rhs = x.dot(&map.apply_adjoint(&y).unwrap());
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn rip_bound_holds_for_all_matrices() {
        // eig(H) in {1 - delta, 1, 1 + delta} so the bound is unrestricted.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = KernelOperator::new(6, 2, 1, 0.5, 0.5).unwrap();
        let delta = k.rip_constant();
        let map = MeasurementMap::new(k).unwrap();
        for _ in 0..1000 {
            let m = random_matrix(&mut rng, 6, 6);
            let ratio = map.apply(&m).unwrap().norm_squared() / m.norm_squared();
            assert!(ratio >= 1.0 - delta - 1e-12);
            assert!(ratio <= 1.0 + delta + 1e-12);
        }
    }

    #[test]
    fn delta_monotone_in_alpha_and_eps() {
        let alphas = [0.1, 0.2, 0.3, 0.4];
        let epss = [0.1, 0.3, 0.5, 0.9];
        for w in alphas.windows(2) {
            let a = KernelOperator::new(6, 2, 1, 0.5, w[0])
                .unwrap()
                .rip_constant();
            let b = KernelOperator::new(6, 2, 1, 0.5, w[1])
                .unwrap()
                .rip_constant();
            assert!(a < b);
        }
        for w in epss.windows(2) {
            let a = KernelOperator::new(6, 2, 1, w[0], 0.3)
                .unwrap()
                .rip_constant();
            let b = KernelOperator::new(6, 2, 1, w[1], 0.3)
                .unwrap()
                .rip_constant();
            assert!(a < b);
        }
    }

    #[test]
    fn kernel_serde_round_trip_and_validation() {
        let k = KernelOperator::new(5, 2, 1, 0.3, 0.45).unwrap();
        let json = serde_json::to_string(&k).unwrap();
        assert!(json.contains("\"r_star\":1"));
        let back: KernelOperator = serde_json::from_str(&json).unwrap();
        assert_eq!(back, k);
        // invalid wire data is rejected by the validating constructor
        let bad = r#"{"n":2,"r":2,"r_star":1,"eps":0.5,"alpha":0.5,"perm_cols":[0,1,2]}"#;
        assert!(serde_json::from_str::<KernelOperator>(bad).is_err());
    }

    #[test]
    fn nonuniform_perm_cols_relocate_the_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let k = KernelOperator::with_cols(6, 2, 1, 0.4, 0.5, vec![5, 0, 3]).unwrap();
        let x = random_matrix(&mut rng, 6, 6);
        let fast = k.apply(&x).unwrap();
        let slow = dense_kernel_apply(&k, &x);
        assert!((fast - slow).norm() <= 1e-12);
    }
}
