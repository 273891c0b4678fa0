//! Optimality conditions over the nonnegative orthant.
//!
//! First-order (KKT) conditions at `U >= 0`:
//!
//! ```text
//! U >= 0,    G = grad F(U) >= 0,    <G, U> = 0
//! ```
//!
//! Second-order conditions restrict the Hessian quadratic form to the
//! critical cone
//!
//! ```text
//! C(U, G) = { V : V_ij = 0 where G_ij > 0,  V_ij >= 0 where U_ij = 0 }
//! ```
//!
//! Deciding positivity of a quadratic form over such a cone is copositive
//! testing, NP-hard in general, so the sampling scan below produces
//! *evidence*: a positive minimum over sampled directions never proves
//! strict positivity, while a negative sample is a checkable witness
//! against second-order necessity. The structured family of
//! [`structured_certificate_thm1`] is the exception: there the cone
//! quotient bound holds by construction, and the certificate is labeled
//! closed-form-backed.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::objectives::{
    eval_objective, grad_stacked, FactorPoint, HessianForm, Instance, Variant,
};
use crate::operators::Operator;

/// Default feasibility / complementarity tolerance.
pub const TOL_FEASIBILITY: f64 = 1e-9;
/// Default objective-gap tolerance for classifying global minima.
pub const TOL_OBJECTIVE_GAP: f64 = 1e-8;
/// Default activity threshold for the critical-cone mask.
pub const TOL_CONE_ACTIVITY: f64 = 1e-9;
/// Sampled quotients below this cutoff count as curvature violations.
pub const NEGATIVE_QUOTIENT_CUTOFF: f64 = -1e-9;
/// Default sample budget for cone scans.
pub const DEFAULT_SCAN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeStatus {
    /// `G_ij > tol`: the direction entry is forced to zero.
    Zero,
    /// `U_ij <= tol` and `G_ij <= tol`: the entry must be nonnegative.
    Nonneg,
    /// `U_ij > tol` (inactive constraint): unrestricted.
    Free,
}

/// Per-entry critical-cone statuses for a stacked point/gradient pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeMask {
    rows: usize,
    cols: usize,
    status: Vec<ConeStatus>,
    /// Linear (column-major) indices of the non-`Zero` entries, paired with
    /// whether the entry is `Free`.
    support: Vec<(usize, bool)>,
    tol: f64,
}

impl ConeMask {
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn status(&self, i: usize, j: usize) -> ConeStatus {
        self.status[i + self.rows * j]
    }

    /// Number of entries a direction may be nonzero on.
    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    /// Exact membership: `Zero` entries identically zero, `Nonneg` entries
    /// nonnegative.
    pub fn contains(&self, dir: &DMatrix<f64>) -> bool {
        if dir.nrows() != self.rows || dir.ncols() != self.cols {
            return false;
        }
        self.status.iter().zip(dir.iter()).all(|(s, &v)| match s {
            ConeStatus::Zero => v == 0.0,
            ConeStatus::Nonneg => v >= 0.0,
            ConeStatus::Free => true,
        })
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let mut zero = 0;
        let mut nonneg = 0;
        let mut free = 0;
        for s in &self.status {
            match s {
                ConeStatus::Zero => zero += 1,
                ConeStatus::Nonneg => nonneg += 1,
                ConeStatus::Free => free += 1,
            }
        }
        (zero, nonneg, free)
    }
}

/// Build the critical cone `C(U, G)` with activity threshold `tol`.
pub fn critical_cone(u: &DMatrix<f64>, g: &DMatrix<f64>, tol: f64) -> Result<ConeMask> {
    if u.shape() != g.shape() {
        return Err(Error::ShapeMismatch(format!(
            "point {:?} and gradient {:?} differ",
            u.shape(),
            g.shape()
        )));
    }
    let (rows, cols) = u.shape();
    let mut status = Vec::with_capacity(rows * cols);
    let mut support = Vec::new();
    for idx in 0..rows * cols {
        let s = if g[idx] > tol {
            ConeStatus::Zero
        } else if u[idx] <= tol {
            ConeStatus::Nonneg
        } else {
            ConeStatus::Free
        };
        if s != ConeStatus::Zero {
            support.push((idx, s == ConeStatus::Free));
        }
        status.push(s);
    }
    Ok(ConeMask {
        rows,
        cols,
        status,
        support,
        tol,
    })
}

/// Draw a unit-Frobenius-norm direction respecting the mask. Mixes dense
/// Gaussian draws projected onto the cone, single-coordinate extreme rays,
/// and equal-magnitude two-coordinate combinations (signed where free).
pub fn sample_cone_direction(mask: &ConeMask, rng: &mut impl Rng) -> Result<DMatrix<f64>> {
    if mask.support.is_empty() {
        return Err(Error::EmptyCone);
    }
    let mut dir = DMatrix::zeros(mask.rows, mask.cols);
    for _attempt in 0..32 {
        dir.fill(0.0);
        let kind = rng.gen_range(0..10u32);
        if kind < 4 {
            // dense Gaussian, projected onto the cone
            for &(idx, free) in &mask.support {
                let x: f64 = StandardNormal.sample(rng);
                dir[idx] = if free { x } else { x.max(0.0) };
            }
        } else if kind < 7 || mask.support.len() < 2 {
            // single-coordinate extreme ray
            let &(idx, free) = &mask.support[rng.gen_range(0..mask.support.len())];
            let sign = if free && rng.gen::<bool>() { -1.0 } else { 1.0 };
            dir[idx] = sign;
        } else {
            // sparse two-coordinate combination, equal magnitudes
            let a = rng.gen_range(0..mask.support.len());
            let mut b = rng.gen_range(0..mask.support.len() - 1);
            if b >= a {
                b += 1;
            }
            for &(idx, free) in [&mask.support[a], &mask.support[b]] {
                let sign = if free && rng.gen::<bool>() { -1.0 } else { 1.0 };
                dir[idx] = sign * std::f64::consts::FRAC_1_SQRT_2;
            }
        }
        let norm = dir.norm();
        if norm > 1e-12 {
            dir /= norm;
            return Ok(dir);
        }
        // projection can zero out a dense draw; redraw
    }
    // canonical fallback: the first admissible extreme ray
    dir.fill(0.0);
    dir[mask.support[0].0] = 1.0;
    Ok(dir)
}

/// First-order (KKT) margins at a point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FirstOrderReport {
    /// Min entry of the (stacked) point.
    pub feasibility_margin: f64,
    /// Min entry of the (stacked) gradient of the full objective.
    pub gradient_margin: f64,
    /// `<grad, point>`.
    pub complementarity: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Check (foc): reports margins, never errors on failure.
pub fn first_order_check(
    inst: &Instance,
    point: &FactorPoint,
    tol: f64,
) -> Result<FirstOrderReport> {
    point.check_shape(inst)?;
    let u = point.stacked();
    let g = grad_stacked(inst, &u)?;
    let feasibility_margin = u.iter().cloned().fold(f64::INFINITY, f64::min);
    let gradient_margin = g.iter().cloned().fold(f64::INFINITY, f64::min);
    let complementarity = g.dot(&u);
    let passed =
        feasibility_margin >= -tol && gradient_margin >= -tol && complementarity.abs() <= tol;
    Ok(FirstOrderReport {
        feasibility_margin,
        gradient_margin,
        complementarity,
        tol,
        passed,
    })
}

/// Result of a sampled scan of the Hessian quadratic form over the cone.
#[derive(Debug, Clone)]
pub struct ScanResult {
    /// Min over samples of `<hess[V], V> / |V|^2`.
    pub min_quotient: f64,
    /// Counter of the winning sample (ties go to the lowest).
    pub argmin_index: usize,
    /// The unit direction attaining the minimum.
    pub witness: DMatrix<f64>,
    pub num_samples: usize,
    pub seed: u64,
}

/// Sample `num_samples` cone directions and scan the Hessian quadratic form
/// of the full objective. Deterministic for a fixed seed regardless of
/// worker count.
pub fn second_order_scan(
    inst: &Instance,
    point: &FactorPoint,
    mask: &ConeMask,
    num_samples: usize,
    seed: u64,
) -> Result<ScanResult> {
    if mask.support.is_empty() {
        return Err(Error::EmptyCone);
    }
    if num_samples == 0 {
        return Err(Error::InvalidParameter("num_samples must be >= 1".into()));
    }
    let stacked = point.stacked();
    if mask.rows != stacked.nrows() || mask.cols != stacked.ncols() {
        return Err(Error::ShapeMismatch(
            "cone mask shape does not match the point".into(),
        ));
    }
    let form = HessianForm::new(inst, point)?;
    let (argmin_index, min_quotient, witness) = exec::min_by_key_indexed(num_samples, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(exec::sample_seed(seed, i as u64));
        let dir = sample_cone_direction(mask, &mut rng).expect("support checked nonempty above");
        let quad = form
            .quad_stacked(&dir)
            .expect("direction shape matches the mask");
        (quad / dir.norm_squared(), dir)
    })
    .expect("num_samples >= 1");
    Ok(ScanResult {
        min_quotient,
        argmin_index,
        witness,
        num_samples,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    GlobalMin,
    SpuriousCandidate,
    Saddle,
    NotCritical,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::GlobalMin => "GlobalMin",
            Classification::SpuriousCandidate => "SpuriousCandidate",
            Classification::Saddle => "Saddle",
            Classification::NotCritical => "NotCritical",
        };
        f.write_str(s)
    }
}

/// Epistemic status of a certificate: sampling can only gather evidence for
/// copositivity, while the structured constructions carry a proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backing {
    Evidence,
    ClosedFormBacked,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifySettings {
    pub tol_feasibility: f64,
    pub tol_objective_gap: f64,
    pub tol_cone: f64,
    pub num_samples: usize,
    pub seed: u64,
}

impl Default for ClassifySettings {
    fn default() -> Self {
        Self {
            tol_feasibility: TOL_FEASIBILITY,
            tol_objective_gap: TOL_OBJECTIVE_GAP,
            tol_cone: TOL_CONE_ACTIVITY,
            num_samples: DEFAULT_SCAN_SAMPLES,
            seed: 0,
        }
    }
}

/// Numeric results of the first/second-order checks at a point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub feasibility_margin: f64,
    pub gradient_margin: f64,
    pub complementarity_residual: f64,
    /// Min sampled Rayleigh quotient over the critical cone; `None` when the
    /// scan was skipped (global point, failed first-order, or empty cone).
    pub min_cone_quotient: Option<f64>,
    /// `F(point) - F_global`; every constructor instance has a feasible
    /// ground truth, so `F_global = 0`.
    pub objective_gap: f64,
    pub num_samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub classification: Classification,
    pub backing: Backing,
}

/// Run the full first/second-order battery at a point and classify it.
pub fn certify_point(
    inst: &Instance,
    point: &FactorPoint,
    settings: &ClassifySettings,
) -> Result<Certificate> {
    let objective_gap = eval_objective(inst, point)?;
    let first = first_order_check(inst, point, settings.tol_feasibility)?;
    let mut min_cone_quotient = None;
    let mut scanned = 0;
    let classification = if objective_gap <= settings.tol_objective_gap {
        Classification::GlobalMin
    } else if !first.passed {
        Classification::NotCritical
    } else {
        let stacked = point.stacked();
        let grad = grad_stacked(inst, &stacked)?;
        let mask = critical_cone(&stacked, &grad, settings.tol_cone)?;
        if mask.support_len() == 0 {
            // the cone is trivial: second-order conditions hold vacuously
            Classification::SpuriousCandidate
        } else {
            let scan = second_order_scan(inst, point, &mask, settings.num_samples, settings.seed)?;
            min_cone_quotient = Some(scan.min_quotient);
            scanned = scan.num_samples;
            if scan.min_quotient < NEGATIVE_QUOTIENT_CUTOFF {
                Classification::Saddle
            } else {
                Classification::SpuriousCandidate
            }
        }
    };
    Ok(Certificate {
        feasibility_margin: first.feasibility_margin,
        gradient_margin: first.gradient_margin,
        complementarity_residual: first.complementarity,
        min_cone_quotient,
        objective_gap,
        num_samples: scanned,
        seed: settings.seed,
        tol: settings.tol_feasibility,
        classification,
        backing: Backing::Evidence,
    })
}

/// Classify a point as global / spurious candidate / saddle / not critical.
pub fn classify_point(
    inst: &Instance,
    point: &FactorPoint,
    settings: &ClassifySettings,
) -> Result<Classification> {
    Ok(certify_point(inst, point, settings)?.classification)
}

/// One verified identity inside a structured certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CertificateCheck {
    fn close(name: &str, value: f64, reference: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            reference,
            tolerance,
            passed: (value - reference).abs() <= tolerance,
        }
    }

    fn at_least(name: &str, value: f64, reference: f64, slack: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            reference,
            tolerance: slack,
            passed: value >= reference - slack,
        }
    }

    fn at_most(name: &str, value: f64, reference: f64, slack: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            reference,
            tolerance: slack,
            passed: value <= reference + slack,
        }
    }
}

/// Certificate for the structured spurious points, where the cone bound
/// holds by construction rather than by sampling evidence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructuredCertificate {
    pub checks: Vec<CertificateCheck>,
    pub min_cone_quotient: f64,
    pub num_samples: usize,
    pub seed: u64,
    pub passed: bool,
    /// All identities verified and the objective gap is positive: the point
    /// is a spurious strict local minimum candidate (second-order critical
    /// for the unregularized asymmetric case).
    pub spurious_candidate: bool,
    pub strict: bool,
    pub backing: Backing,
}

fn is_q1(u: &DMatrix<f64>, perm: &[usize], r_star: usize, tol: f64) -> bool {
    if u.ncols() != r_star {
        return false;
    }
    for j in 0..r_star {
        for i in 0..u.nrows() {
            let expected = if i == perm[j] { 1.0 } else { 0.0 };
            if (u[(i, j)] - expected).abs() > tol {
                return false;
            }
        }
    }
    true
}

fn is_alpha_q2(
    u: &DMatrix<f64>,
    perm: &[usize],
    r_star: usize,
    r: usize,
    alpha: f64,
    tol: f64,
) -> bool {
    if u.ncols() != r {
        return false;
    }
    for j in 0..r {
        for i in 0..u.nrows() {
            let expected = if i == perm[r_star + j] { alpha } else { 0.0 };
            if (u[(i, j)] - expected).abs() > tol {
                return false;
            }
        }
    }
    true
}

/// Verify the displayed identities of the structured spurious point
/// `U0 = alpha Q2` (or `(alpha Q2, alpha Q2)`): objective value, gradient
/// pattern, exact complementarity, and the proven cone quotient bound probed
/// by sampling. Errors if the instance/point are not from the structured
/// constructor family.
pub fn structured_certificate_thm1(
    inst: &Instance,
    point: &FactorPoint,
    num_samples: usize,
    seed: u64,
) -> Result<StructuredCertificate> {
    let map = match inst.operator() {
        Operator::Structured(m) => m,
        Operator::Identity => {
            return Err(Error::InvalidParameter(
                "structured certificate requires the structured operator".into(),
            ))
        }
    };
    let kernel = map.kernel();
    let (alpha, eps) = (kernel.alpha(), kernel.eps());
    let (r, r_star) = (kernel.r(), kernel.r_star());
    let perm = kernel.perm_cols();
    if inst.search_rank() != r {
        return Err(Error::InvalidParameter(
            "instance search rank disagrees with the kernel".into(),
        ));
    }
    let match_tol = 1e-12;
    match (inst.variant(), point) {
        (Variant::Symmetric, FactorPoint::Symmetric(u0)) => {
            let u_star = inst.u_star()?;
            if !is_q1(u_star, perm, r_star, match_tol)
                || !is_alpha_q2(u0, perm, r_star, r, alpha, match_tol)
            {
                return Err(Error::InvalidParameter(
                    "instance/point do not match the structured constructor".into(),
                ));
            }
        }
        (Variant::Asymmetric, FactorPoint::Asymmetric { l, r: rm }) => {
            let (l_star, r_star_gt) = inst.lr_star()?;
            let ok = is_q1(l_star, perm, r_star, match_tol)
                && is_q1(r_star_gt, perm, r_star, match_tol)
                && is_alpha_q2(l, perm, r_star, r, alpha, match_tol)
                && is_alpha_q2(rm, perm, r_star, r, alpha, match_tol);
            if !ok {
                return Err(Error::InvalidParameter(
                    "instance/point do not match the structured constructor".into(),
                ));
            }
        }
        _ => {
            return Err(Error::VariantMismatch(
                "point variant does not match the instance".into(),
            ))
        }
    }

    let delta = kernel.rip_constant();
    let lambda = inst.lambda();
    let mut checks = Vec::new();

    // objective value: f(U0) = (r* - alpha^4 r)/2 >= (r*/2)(1 - delta^2)
    let value = eval_objective(inst, point)?;
    let closed_form = 0.5 * (r_star as f64 - alpha.powi(4) * r as f64);
    checks.push(CertificateCheck::close(
        "objective_closed_form",
        value,
        closed_form,
        1e-12,
    ));
    checks.push(CertificateCheck::at_least(
        "objective_rip_lower_bound",
        value,
        0.5 * r_star as f64 * (1.0 - delta * delta),
        1e-12,
    ));

    // gradient pattern: 2 alpha^3 eps on the first r* rows (halved for the
    // stacked asymmetric gradient), zero elsewhere; exact complementarity
    let stacked = point.stacked();
    let grad = grad_stacked(inst, &stacked)?;
    let block = match inst.variant() {
        Variant::Symmetric => 2.0 * alpha.powi(3) * eps,
        Variant::Asymmetric => alpha.powi(3) * eps,
    };
    let n = inst.factor_rows().0;
    let mut block_dev = 0.0f64;
    let mut off_dev = 0.0f64;
    for j in 0..grad.ncols() {
        for i in 0..grad.nrows() {
            let row_in_factor = i % n;
            let on_block = (0..r_star).any(|t| perm[t] == row_in_factor);
            let dev = if on_block {
                (grad[(i, j)] - block).abs()
            } else {
                grad[(i, j)].abs()
            };
            if on_block {
                block_dev = block_dev.max(dev);
            } else {
                off_dev = off_dev.max(dev);
            }
        }
    }
    checks.push(CertificateCheck::at_most(
        "gradient_block_deviation",
        block_dev,
        0.0,
        1e-12,
    ));
    checks.push(CertificateCheck::at_most(
        "gradient_offblock_deviation",
        off_dev,
        0.0,
        1e-12,
    ));
    let first = first_order_check(inst, point, TOL_FEASIBILITY)?;
    checks.push(CertificateCheck::at_most(
        "complementarity_exact",
        first.complementarity.abs(),
        0.0,
        1e-12,
    ));
    checks.push(CertificateCheck::at_least(
        "gradient_nonnegativity",
        first.gradient_margin,
        0.0,
        1e-12,
    ));
    checks.push(CertificateCheck::at_least(
        "feasibility",
        first.feasibility_margin,
        0.0,
        0.0,
    ));

    // proven cone quotient bound, probed by sampling
    let mask = critical_cone(&stacked, &grad, TOL_CONE_ACTIVITY)?;
    let scan = second_order_scan(inst, point, &mask, num_samples, seed)?;
    let strict = match inst.variant() {
        Variant::Symmetric => {
            checks.push(CertificateCheck::at_least(
                "cone_quotient_lower_bound",
                scan.min_quotient,
                alpha * alpha,
                1e-9,
            ));
            true
        }
        Variant::Asymmetric => {
            if lambda > 0.0 {
                let mu = lambda.min(0.25) * alpha * alpha;
                checks.push(CertificateCheck::at_least(
                    "cone_quotient_lower_bound",
                    scan.min_quotient,
                    mu,
                    1e-9,
                ));
                true
            } else {
                // second-order critical, not strict: the sampled infimum
                // approaches zero from above
                checks.push(CertificateCheck::at_least(
                    "cone_quotient_nonnegative",
                    scan.min_quotient,
                    0.0,
                    1e-9,
                ));
                checks.push(CertificateCheck::at_most(
                    "cone_quotient_attains_zero",
                    scan.min_quotient,
                    0.0,
                    1e-6,
                ));
                false
            }
        }
    };

    let passed = checks.iter().all(|c| c.passed);
    Ok(StructuredCertificate {
        min_cone_quotient: scan.min_quotient,
        num_samples: scan.num_samples,
        seed,
        passed,
        spurious_candidate: passed && value > 0.0,
        strict,
        checks,
        backing: Backing::ClosedFormBacked,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BenignBranch {
    /// `|U| <= tol`.
    ZeroPoint,
    /// `|UU' - u* u*'| <= tol`.
    GlobalFactor,
    /// The first-order hypotheses fail beyond tolerance.
    NotFirstOrder,
    /// Hypotheses hold but neither conclusion does; should not occur at a
    /// genuine first-order point of a rank-1 fully observed instance.
    Indeterminate,
}

/// Proof-path report for first-order points of benign rank-1 instances:
/// checks the two hypotheses `<grad f, u* u*' U> >= 0`, `<grad f, U> <= 0`
/// and reports which conclusion (`U = 0` or `UU' = u* u*'`) holds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenignReport {
    pub hypothesis_cone_inner: f64,
    pub hypothesis_complementarity: f64,
    pub point_norm: f64,
    pub gram_error: f64,
    pub tol: f64,
    pub branch: BenignBranch,
}

pub fn benign_rank1_classifier(
    inst: &Instance,
    point: &FactorPoint,
    tol: f64,
) -> Result<BenignReport> {
    if inst.variant() != Variant::Symmetric
        || inst.true_rank() != 1
        || !matches!(inst.operator(), Operator::Identity)
    {
        return Err(Error::InvalidParameter(
            "benign classifier requires a symmetric fully observed rank-1 instance".into(),
        ));
    }
    let u = match point {
        FactorPoint::Symmetric(u) => u,
        _ => {
            return Err(Error::VariantMismatch(
                "benign classifier expects a symmetric point".into(),
            ))
        }
    };
    point.check_shape(inst)?;
    let u_star = inst.u_star()?;
    let g = crate::objectives::grad_f(inst, u)?;
    let projected = u_star * (u_star.transpose() * u);
    let h1 = g.dot(&projected);
    let h2 = g.dot(u);
    let point_norm = u.norm();
    let gram_error = (u * u.transpose() - inst.target_gram()).norm();
    let branch = if h1 < -tol || h2 > tol {
        BenignBranch::NotFirstOrder
    } else if point_norm <= tol {
        BenignBranch::ZeroPoint
    } else if gram_error <= tol {
        BenignBranch::GlobalFactor
    } else {
        BenignBranch::Indeterminate
    };
    Ok(BenignReport {
        hypothesis_cone_inner: h1,
        hypothesis_complementarity: h2,
        point_norm,
        gram_error,
        tol,
        branch,
    })
}

/// Result of sampling the feasible ball around a point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallTestReport {
    /// Min over samples of `F(sample) - F(point)`; nonnegative values are
    /// sampling evidence of local minimality.
    pub min_gap: f64,
    pub argmin_index: usize,
    pub num_samples: usize,
    pub radius: f64,
    pub seed: u64,
}

/// Sample `{X >= 0} ∩ B(point, radius)` and report the minimum objective
/// gap. Draws a uniform direction and radius, clamps to the orthant,
/// restores the drawn distance once, and clamps again; clamping at a
/// feasible center can only shrink the distance, so samples stay in the
/// ball.
pub fn local_min_ball_test(
    inst: &Instance,
    point: &FactorPoint,
    radius: f64,
    num_samples: usize,
    seed: u64,
) -> Result<BallTestReport> {
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    if num_samples == 0 {
        return Err(Error::InvalidParameter("num_samples must be >= 1".into()));
    }
    point.check_shape(inst)?;
    let base = point.stacked();
    let base_value = eval_objective(inst, point)?;
    let (argmin_index, min_gap, ()) = exec::min_by_key_indexed(num_samples, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(exec::sample_seed(seed, i as u64));
        for _ in 0..64 {
            let mut dir = DMatrix::from_fn(base.nrows(), base.ncols(), |_, _| {
                StandardNormal.sample(&mut rng)
            });
            let norm = dir.norm();
            if norm <= 1e-300 {
                continue;
            }
            dir /= norm;
            let t = radius * rng.gen::<f64>();
            let mut w = &base + dir * t;
            w.apply(|v| *v = v.max(0.0));
            let offset = &w - &base;
            let d = offset.norm();
            if d == 0.0 {
                continue;
            }
            let mut w = &base + offset * (t / d);
            w.apply(|v| *v = v.max(0.0));
            if (&w - &base).norm() > radius {
                continue;
            }
            let value = crate::objectives::eval_stacked(inst, &w)
                .expect("sample shape matches the instance");
            return (value - base_value, ());
        }
        (f64::INFINITY, ())
    })
    .expect("num_samples >= 1");
    Ok(BallTestReport {
        min_gap,
        argmin_index,
        num_samples,
        radius,
        seed,
    })
}
