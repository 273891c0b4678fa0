//! Objectives, gradients, and Hessian quadratic/cross forms.
//!
//! Symmetric cost `f(U) = 1/2 |A(UU' - M*)|^2` with
//!
//! ```text
//! grad f(U) = (S + S') U,                S = A*A(UU' - M*)
//! <hess f(U)[V], V> = <S + S', VV'> + |A(UV' + VU')|^2
//! ```
//!
//! Asymmetric cost `g([L;R]) = 1/2 |A(LR' - M*)|^2` with
//!
//! ```text
//! grad g = [S R; S' L],                  S = A*A(LR' - M*)
//! <hess g[V1], V2> = <S, L1 R2' + L2 R1'> + <A(L R1' + L1 R'), A(L R2' + L2 R')>
//! ```
//!
//! Balancing regularizer `h([L;R]) = 1/2 |L'L - R'R|^2` with
//!
//! ```text
//! grad h = [2 L D; -2 R D],              D = L'L - R'R
//! <hess h[V], V> = 2 <D, Ld'Ld - Rd'Rd> + |P + P'|^2,   P = L'Ld - R'Rd
//! ```
//!
//! All derivative formulas are exact second directional derivatives of the
//! stored costs and are cross-checked against central differences in the
//! test suite.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operators::Operator;

/// Central-difference step for gradient checks.
pub const FD_GRAD_STEP: f64 = 1e-5;
/// Step for second-difference Hessian checks.
pub const FD_HESS_STEP: f64 = 1e-4;
/// Entries where both analytic and numeric magnitudes fall below this floor
/// are skipped in relative-error reports.
pub const FD_DENOM_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Symmetric,
    Asymmetric,
}

/// Ground-truth factorization; entrywise nonnegative by construction.
#[derive(Debug, Clone, PartialEq)]
pub enum GroundTruth {
    /// `U*` with shape `n x r_star`.
    Symmetric(DMatrix<f64>),
    /// `L*` (`n1 x r_star`) and `R*` (`n2 x r_star`).
    Asymmetric { l: DMatrix<f64>, r: DMatrix<f64> },
}

/// A complete problem description.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    variant: Variant,
    operator: Operator,
    ground_truth: GroundTruth,
    r: usize,
    lambda: f64,
    /// Cached `M* = U*U*'` (or `L*R*'`).
    target_gram: DMatrix<f64>,
}

fn require_nonneg(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.iter().any(|&v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "{what} has a non-finite entry"
        )));
    }
    if m.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "{what} must be entrywise nonnegative"
        )));
    }
    Ok(())
}

impl Instance {
    /// Symmetric instance. `r` may fall below the columns of `u_star` only
    /// through constructors that explicitly warn about it.
    pub fn symmetric(operator: Operator, u_star: DMatrix<f64>, r: usize) -> Result<Self> {
        require_nonneg(&u_star, "U_star")?;
        if u_star.ncols() < 1 || r < 1 {
            return Err(Error::InvalidParameter(
                "need r >= 1 and at least one ground-truth column".into(),
            ));
        }
        if let Some(n) = operator.n() {
            if n != u_star.nrows() {
                return Err(Error::ShapeMismatch(format!(
                    "operator side {n} vs U_star rows {}",
                    u_star.nrows()
                )));
            }
        }
        let target_gram = &u_star * u_star.transpose();
        Ok(Self {
            variant: Variant::Symmetric,
            operator,
            ground_truth: GroundTruth::Symmetric(u_star),
            r,
            lambda: 0.0,
            target_gram,
        })
    }

    /// Asymmetric instance with regularization weight `lambda >= 0`.
    pub fn asymmetric(
        operator: Operator,
        l_star: DMatrix<f64>,
        r_star: DMatrix<f64>,
        r: usize,
        lambda: f64,
    ) -> Result<Self> {
        require_nonneg(&l_star, "L_star")?;
        require_nonneg(&r_star, "R_star")?;
        if l_star.ncols() != r_star.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "L_star has {} columns, R_star has {}",
                l_star.ncols(),
                r_star.ncols()
            )));
        }
        if l_star.ncols() < 1 || r < 1 {
            return Err(Error::InvalidParameter(
                "need r >= 1 and at least one ground-truth column".into(),
            ));
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        if let Some(n) = operator.n() {
            if n != l_star.nrows() || n != r_star.nrows() {
                return Err(Error::ShapeMismatch(format!(
                    "structured operator side {n} requires n1 = n2 = {n}, got {} and {}",
                    l_star.nrows(),
                    r_star.nrows()
                )));
            }
        }
        let target_gram = &l_star * r_star.transpose();
        Ok(Self {
            variant: Variant::Asymmetric,
            operator,
            ground_truth: GroundTruth::Asymmetric {
                l: l_star,
                r: r_star,
            },
            r,
            lambda,
            target_gram,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }
    pub fn operator(&self) -> &Operator {
        &self.operator
    }
    pub fn search_rank(&self) -> usize {
        self.r
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn ground_truth(&self) -> &GroundTruth {
        &self.ground_truth
    }
    pub fn target_gram(&self) -> &DMatrix<f64> {
        &self.target_gram
    }

    pub fn u_star(&self) -> Result<&DMatrix<f64>> {
        match &self.ground_truth {
            GroundTruth::Symmetric(u) => Ok(u),
            _ => Err(Error::VariantMismatch(
                "expected a symmetric instance".into(),
            )),
        }
    }

    pub fn lr_star(&self) -> Result<(&DMatrix<f64>, &DMatrix<f64>)> {
        match &self.ground_truth {
            GroundTruth::Asymmetric { l, r } => Ok((l, r)),
            _ => Err(Error::VariantMismatch(
                "expected an asymmetric instance".into(),
            )),
        }
    }

    /// Columns of the ground-truth factor(s).
    pub fn true_rank(&self) -> usize {
        match &self.ground_truth {
            GroundTruth::Symmetric(u) => u.ncols(),
            GroundTruth::Asymmetric { l, .. } => l.ncols(),
        }
    }

    /// Row counts of a factor point: `(n, n)` or `(n1, n2)`.
    pub fn factor_rows(&self) -> (usize, usize) {
        match &self.ground_truth {
            GroundTruth::Symmetric(u) => (u.nrows(), u.nrows()),
            GroundTruth::Asymmetric { l, r } => (l.nrows(), r.nrows()),
        }
    }

    /// Rows of the stacked representation: `n` or `n1 + n2`.
    pub fn stacked_rows(&self) -> usize {
        match self.variant {
            Variant::Symmetric => self.factor_rows().0,
            Variant::Asymmetric => self.factor_rows().0 + self.factor_rows().1,
        }
    }

    /// The ground truth padded with zero columns to the search rank, when
    /// representable (`r >= true rank`).
    pub fn global_point(&self) -> Option<FactorPoint> {
        if self.r < self.true_rank() {
            return None;
        }
        let pad = |m: &DMatrix<f64>| {
            let mut out = DMatrix::zeros(m.nrows(), self.r);
            out.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
            out
        };
        Some(match &self.ground_truth {
            GroundTruth::Symmetric(u) => FactorPoint::Symmetric(pad(u)),
            GroundTruth::Asymmetric { l, r } => FactorPoint::Asymmetric {
                l: pad(l),
                r: pad(r),
            },
        })
    }
}

/// A candidate point: `U`, or a pair `(L, R)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorPoint {
    Symmetric(DMatrix<f64>),
    Asymmetric { l: DMatrix<f64>, r: DMatrix<f64> },
}

impl FactorPoint {
    /// Stacked `[U]` or `[L; R]` matrix.
    pub fn stacked(&self) -> DMatrix<f64> {
        match self {
            FactorPoint::Symmetric(u) => u.clone(),
            FactorPoint::Asymmetric { l, r } => {
                let mut out = DMatrix::zeros(l.nrows() + r.nrows(), l.ncols());
                out.view_mut((0, 0), (l.nrows(), l.ncols())).copy_from(l);
                out.view_mut((l.nrows(), 0), (r.nrows(), r.ncols()))
                    .copy_from(r);
                out
            }
        }
    }

    /// Rebuild a point of the instance's shape from a stacked matrix.
    pub fn from_stacked(inst: &Instance, m: &DMatrix<f64>) -> Result<Self> {
        let rows = inst.stacked_rows();
        if m.nrows() != rows || m.ncols() != inst.search_rank() {
            return Err(Error::ShapeMismatch(format!(
                "stacked point must be {rows} x {}, got {} x {}",
                inst.search_rank(),
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(match inst.variant() {
            Variant::Symmetric => FactorPoint::Symmetric(m.clone()),
            Variant::Asymmetric => {
                let (n1, n2) = inst.factor_rows();
                FactorPoint::Asymmetric {
                    l: m.view((0, 0), (n1, m.ncols())).into(),
                    r: m.view((n1, 0), (n2, m.ncols())).into(),
                }
            }
        })
    }

    /// `UU'` or `LR'`.
    pub fn gram(&self) -> DMatrix<f64> {
        match self {
            FactorPoint::Symmetric(u) => u * u.transpose(),
            FactorPoint::Asymmetric { l, r } => l * r.transpose(),
        }
    }

    pub fn min_entry(&self) -> f64 {
        match self {
            FactorPoint::Symmetric(u) => u.iter().cloned().fold(f64::INFINITY, f64::min),
            FactorPoint::Asymmetric { l, r } => l
                .iter()
                .chain(r.iter())
                .cloned()
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.min_entry() >= 0.0
    }

    pub fn check_shape(&self, inst: &Instance) -> Result<()> {
        let ok = match (self, inst.variant()) {
            (FactorPoint::Symmetric(u), Variant::Symmetric) => {
                u.nrows() == inst.factor_rows().0 && u.ncols() == inst.search_rank()
            }
            (FactorPoint::Asymmetric { l, r }, Variant::Asymmetric) => {
                let (n1, n2) = inst.factor_rows();
                l.nrows() == n1
                    && r.nrows() == n2
                    && l.ncols() == inst.search_rank()
                    && r.ncols() == inst.search_rank()
            }
            _ => {
                return Err(Error::VariantMismatch(
                    "point variant does not match instance variant".into(),
                ))
            }
        };
        if !ok {
            return Err(Error::ShapeMismatch(
                "point shape does not match instance".into(),
            ));
        }
        Ok(())
    }
}

fn expect_symmetric(inst: &Instance) -> Result<()> {
    match inst.variant() {
        Variant::Symmetric => Ok(()),
        _ => Err(Error::VariantMismatch(
            "operation requires a symmetric instance".into(),
        )),
    }
}

fn expect_asymmetric(inst: &Instance) -> Result<()> {
    match inst.variant() {
        Variant::Asymmetric => Ok(()),
        _ => Err(Error::VariantMismatch(
            "operation requires an asymmetric instance".into(),
        )),
    }
}

fn check_u_shape(inst: &Instance, u: &DMatrix<f64>) -> Result<()> {
    let n = inst.factor_rows().0;
    if u.nrows() != n || u.ncols() != inst.search_rank() {
        return Err(Error::ShapeMismatch(format!(
            "U must be {n} x {}, got {} x {}",
            inst.search_rank(),
            u.nrows(),
            u.ncols()
        )));
    }
    Ok(())
}

fn check_lr_shape(inst: &Instance, l: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<()> {
    let (n1, n2) = inst.factor_rows();
    let k = inst.search_rank();
    if l.nrows() != n1 || l.ncols() != k || r.nrows() != n2 || r.ncols() != k {
        return Err(Error::ShapeMismatch(format!(
            "(L, R) must be {n1} x {k} and {n2} x {k}, got {} x {} and {} x {}",
            l.nrows(),
            l.ncols(),
            r.nrows(),
            r.ncols()
        )));
    }
    Ok(())
}

/// `f(U) = 1/2 |A(UU' - M*)|^2`.
pub fn eval_f(inst: &Instance, u: &DMatrix<f64>) -> Result<f64> {
    expect_symmetric(inst)?;
    check_u_shape(inst, u)?;
    let e = u * u.transpose() - inst.target_gram();
    Ok(0.5 * inst.operator().norm_apply_sq(&e)?)
}

/// `S_U = A*A(UU' - M*)`.
fn s_matrix_f(inst: &Instance, u: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let e = u * u.transpose() - inst.target_gram();
    inst.operator().apply_kernel(&e)
}

/// `grad f(U) = (S_U + S_U') U`.
pub fn grad_f(inst: &Instance, u: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    expect_symmetric(inst)?;
    check_u_shape(inst, u)?;
    let s = s_matrix_f(inst, u)?;
    Ok((&s + s.transpose()) * u)
}

/// `<hess f(U)[V], V>` for a direction `V` of the same shape as `U`.
pub fn hess_quad_f(inst: &Instance, u: &DMatrix<f64>, udot: &DMatrix<f64>) -> Result<f64> {
    expect_symmetric(inst)?;
    check_u_shape(inst, u)?;
    check_u_shape(inst, udot)?;
    HessianForm::new(inst, &FactorPoint::Symmetric(u.clone()))?
        .quad(&FactorPoint::Symmetric(udot.clone()))
}

/// `g([L;R]) = 1/2 |A(LR' - M*)|^2`.
pub fn eval_g(inst: &Instance, l: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<f64> {
    expect_asymmetric(inst)?;
    check_lr_shape(inst, l, r)?;
    let e = l * r.transpose() - inst.target_gram();
    Ok(0.5 * inst.operator().norm_apply_sq(&e)?)
}

fn s_matrix_g(inst: &Instance, l: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let e = l * r.transpose() - inst.target_gram();
    inst.operator().apply_kernel(&e)
}

/// `grad g = (S R, S' L)`.
pub fn grad_g(
    inst: &Instance,
    l: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    expect_asymmetric(inst)?;
    check_lr_shape(inst, l, r)?;
    let s = s_matrix_g(inst, l, r)?;
    Ok((&s * r, s.transpose() * l))
}

/// Hessian cross form of `g`; symmetric in the two direction arguments.
#[allow(clippy::too_many_arguments)]
pub fn hess_cross_g(
    inst: &Instance,
    l: &DMatrix<f64>,
    r: &DMatrix<f64>,
    ld1: &DMatrix<f64>,
    rd1: &DMatrix<f64>,
    ld2: &DMatrix<f64>,
    rd2: &DMatrix<f64>,
) -> Result<f64> {
    expect_asymmetric(inst)?;
    check_lr_shape(inst, l, r)?;
    check_lr_shape(inst, ld1, rd1)?;
    check_lr_shape(inst, ld2, rd2)?;
    let s = s_matrix_g(inst, l, r)?;
    let op = inst.operator();
    let first = (&s * rd2).dot(ld1) + (&s * rd1).dot(ld2);
    let a1 = op.apply(&(l * rd1.transpose() + ld1 * r.transpose()))?;
    let a2 = op.apply(&(l * rd2.transpose() + ld2 * r.transpose()))?;
    Ok(first + a1.dot(&a2))
}

/// Hessian quadratic form of `g`: the cross form with equal arguments.
pub fn hess_quad_g(
    inst: &Instance,
    l: &DMatrix<f64>,
    r: &DMatrix<f64>,
    ld: &DMatrix<f64>,
    rd: &DMatrix<f64>,
) -> Result<f64> {
    hess_cross_g(inst, l, r, ld, rd, ld, rd)
}

/// `h([L;R]) = 1/2 |L'L - R'R|^2`.
pub fn eval_h(l: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<f64> {
    if l.ncols() != r.ncols() {
        return Err(Error::ShapeMismatch(
            "L and R must share a column count".into(),
        ));
    }
    let d = l.transpose() * l - r.transpose() * r;
    Ok(0.5 * d.norm_squared())
}

/// `grad h = (2 L D, -2 R D)` with `D = L'L - R'R`.
pub fn grad_h(l: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if l.ncols() != r.ncols() {
        return Err(Error::ShapeMismatch(
            "L and R must share a column count".into(),
        ));
    }
    let d = l.transpose() * l - r.transpose() * r;
    Ok((2.0 * l * &d, -2.0 * r * d))
}

/// Second directional derivative of `h`:
/// `2 <D, Ld'Ld - Rd'Rd> + |P + P'|^2` with `P = L'Ld - R'Rd`.
pub fn hess_quad_h(
    l: &DMatrix<f64>,
    r: &DMatrix<f64>,
    ld: &DMatrix<f64>,
    rd: &DMatrix<f64>,
) -> Result<f64> {
    if l.shape() != ld.shape() || r.shape() != rd.shape() || l.ncols() != r.ncols() {
        return Err(Error::ShapeMismatch(
            "direction shapes must match (L, R)".into(),
        ));
    }
    let d = l.transpose() * l - r.transpose() * r;
    let p = l.transpose() * ld - r.transpose() * rd;
    let sym = &p + p.transpose();
    Ok(2.0 * d.dot(&(ld.transpose() * ld - rd.transpose() * rd)) + sym.norm_squared())
}

/// Full objective: `f` for symmetric instances, `g + lambda h` otherwise.
pub fn eval_objective(inst: &Instance, point: &FactorPoint) -> Result<f64> {
    point.check_shape(inst)?;
    match (inst.variant(), point) {
        (Variant::Symmetric, FactorPoint::Symmetric(u)) => eval_f(inst, u),
        (Variant::Asymmetric, FactorPoint::Asymmetric { l, r }) => {
            Ok(eval_g(inst, l, r)? + inst.lambda() * eval_h(l, r)?)
        }
        _ => unreachable!("check_shape filters variant mismatches"),
    }
}

/// Gradient of the full objective, shaped like the point.
pub fn grad_objective(inst: &Instance, point: &FactorPoint) -> Result<FactorPoint> {
    point.check_shape(inst)?;
    match (inst.variant(), point) {
        (Variant::Symmetric, FactorPoint::Symmetric(u)) => {
            Ok(FactorPoint::Symmetric(grad_f(inst, u)?))
        }
        (Variant::Asymmetric, FactorPoint::Asymmetric { l, r }) => {
            let (mut gl, mut gr) = grad_g(inst, l, r)?;
            if inst.lambda() != 0.0 {
                let (hl, hr) = grad_h(l, r)?;
                gl += inst.lambda() * hl;
                gr += inst.lambda() * hr;
            }
            Ok(FactorPoint::Asymmetric { l: gl, r: gr })
        }
        _ => unreachable!(),
    }
}

/// Objective on the stacked representation, for solver loops.
pub fn eval_stacked(inst: &Instance, m: &DMatrix<f64>) -> Result<f64> {
    eval_objective(inst, &FactorPoint::from_stacked(inst, m)?)
}

/// Gradient on the stacked representation.
pub fn grad_stacked(inst: &Instance, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(grad_objective(inst, &FactorPoint::from_stacked(inst, m)?)?.stacked())
}

/// Hessian quadratic form of the full objective with the point-dependent
/// pieces precomputed, for scans that evaluate many directions at one point.
pub enum HessianForm<'a> {
    Symmetric {
        inst: &'a Instance,
        u: DMatrix<f64>,
        /// `S + S'`.
        s_sym: DMatrix<f64>,
    },
    Asymmetric {
        inst: &'a Instance,
        l: DMatrix<f64>,
        r: DMatrix<f64>,
        s: DMatrix<f64>,
        /// `D = L'L - R'R`.
        d: DMatrix<f64>,
        lambda: f64,
    },
}

impl<'a> HessianForm<'a> {
    pub fn new(inst: &'a Instance, point: &FactorPoint) -> Result<Self> {
        point.check_shape(inst)?;
        match point {
            FactorPoint::Symmetric(u) => {
                let s = s_matrix_f(inst, u)?;
                Ok(HessianForm::Symmetric {
                    inst,
                    u: u.clone(),
                    s_sym: &s + s.transpose(),
                })
            }
            FactorPoint::Asymmetric { l, r } => Ok(HessianForm::Asymmetric {
                inst,
                s: s_matrix_g(inst, l, r)?,
                d: l.transpose() * l - r.transpose() * r,
                l: l.clone(),
                r: r.clone(),
                lambda: inst.lambda(),
            }),
        }
    }

    /// `<hess F(point)[dir], dir>` including the `lambda h` part.
    pub fn quad(&self, dir: &FactorPoint) -> Result<f64> {
        match (self, dir) {
            (HessianForm::Symmetric { inst, u, s_sym }, FactorPoint::Symmetric(v)) => {
                dir.check_shape(inst)?;
                let first = (s_sym * v).dot(v);
                let second = inst
                    .operator()
                    .norm_apply_sq(&(u * v.transpose() + v * u.transpose()))?;
                Ok(first + second)
            }
            (
                HessianForm::Asymmetric {
                    inst,
                    l,
                    r,
                    s,
                    d,
                    lambda,
                },
                FactorPoint::Asymmetric { l: ld, r: rd },
            ) => {
                dir.check_shape(inst)?;
                let first = 2.0 * (s * rd).dot(ld);
                let second = inst
                    .operator()
                    .norm_apply_sq(&(l * rd.transpose() + ld * r.transpose()))?;
                let mut total = first + second;
                if *lambda != 0.0 {
                    let p = l.transpose() * ld - r.transpose() * rd;
                    let sym = &p + p.transpose();
                    let hterm = 2.0 * d.dot(&(ld.transpose() * ld - rd.transpose() * rd))
                        + sym.norm_squared();
                    total += lambda * hterm;
                }
                Ok(total)
            }
            _ => Err(Error::VariantMismatch(
                "direction variant does not match the Hessian form".into(),
            )),
        }
    }

    pub fn quad_stacked(&self, dir: &DMatrix<f64>) -> Result<f64> {
        let inst = match self {
            HessianForm::Symmetric { inst, .. } => inst,
            HessianForm::Asymmetric { inst, .. } => inst,
        };
        self.quad(&FactorPoint::from_stacked(inst, dir)?)
    }
}

/// Worst relative error between an analytic gradient and central
/// differences of `f` at `point`, skipping entries below the magnitude
/// floor. Returns 0 when every entry is skipped.
pub fn fd_gradient_check<F>(f: F, analytic: &DMatrix<f64>, point: &DMatrix<f64>, step: f64) -> f64
where
    F: Fn(&DMatrix<f64>) -> f64,
{
    assert!(step > 0.0, "step must be positive");
    let mut worst = 0.0f64;
    let mut probe = point.clone();
    for idx in 0..point.len() {
        let saved = probe[idx];
        probe[idx] = saved + step;
        let fp = f(&probe);
        probe[idx] = saved - step;
        let fm = f(&probe);
        probe[idx] = saved;
        let fd = (fp - fm) / (2.0 * step);
        let a = analytic[idx];
        let denom = a.abs().max(fd.abs());
        if denom <= FD_DENOM_FLOOR {
            continue;
        }
        worst = worst.max((a - fd).abs() / denom);
    }
    worst
}

/// Second directional difference `(f(p + t d) - 2 f(p) + f(p - t d)) / t^2`.
pub fn fd_second_difference<F>(f: F, point: &DMatrix<f64>, dir: &DMatrix<f64>, step: f64) -> f64
where
    F: Fn(&DMatrix<f64>) -> f64,
{
    assert!(step > 0.0, "step must be positive");
    let plus = f(&(point + dir * step));
    let mid = f(point);
    let minus = f(&(point - dir * step));
    (plus - 2.0 * mid + minus) / (step * step)
}
