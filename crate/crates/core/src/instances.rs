//! Named instance families and their candidate points.
//!
//! Each constructor builds a complete problem together with the points the
//! analysis singles out, tagged with the classification the optimality
//! module is expected to produce. Instances serialize to a stable JSON
//! schema; matrices are row-major nested arrays with finite entries.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{FactorPoint, Instance, Variant};
use crate::operators::{KernelOperator, Operator};
use crate::optimality::Classification;

/// A candidate point with its expected classification.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub name: String,
    pub point: FactorPoint,
    pub expected: Classification,
    pub note: Option<String>,
}

/// Which construction produced an instance, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum Provenance {
    #[serde(rename = "thm1-sym")]
    Thm1Sym {
        n: usize,
        r: usize,
        r_star: usize,
        eps: f64,
        alpha: f64,
    },
    #[serde(rename = "thm1-asym")]
    Thm1Asym {
        n: usize,
        r: usize,
        r_star: usize,
        eps: f64,
        alpha: f64,
        lambda: f64,
    },
    #[serde(rename = "spu2")]
    Spu2 {
        m: usize,
        k: usize,
        r: usize,
        variant: Variant,
        lambda: f64,
    },
    #[serde(rename = "benign-r1")]
    BenignRank1 {
        n: usize,
        r: usize,
        variant: Variant,
        lambda: f64,
    },
}

impl Provenance {
    /// Neighborhood radius within which local minimality is proven for the
    /// fully observed family: `1 / (4 r sqrt(m))`.
    pub fn ball_radius(&self) -> Option<f64> {
        match self {
            Provenance::Spu2 { m, r, .. } => Some(1.0 / (4.0 * *r as f64 * (*m as f64).sqrt())),
            _ => None,
        }
    }
}

/// An instance plus named candidates and provenance.
#[derive(Debug, Clone)]
pub struct NamedInstance {
    pub instance: Instance,
    pub candidates: Vec<Candidate>,
    pub provenance: Provenance,
    /// Constructor warnings (not serialized).
    pub warnings: Vec<String>,
}

impl NamedInstance {
    pub fn candidate(&self, name: &str) -> Result<&Candidate> {
        self.candidates
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCandidate(name.to_string()))
    }

    /// Grams of all candidates expected to be spurious, for basin labeling.
    pub fn spurious_grams(&self) -> Vec<(String, DMatrix<f64>)> {
        self.candidates
            .iter()
            .filter(|c| c.expected == Classification::SpuriousCandidate)
            .map(|c| (c.name.clone(), c.point.gram()))
            .collect()
    }
}

fn identity_cols(n: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, cols, |i, j| if i == j { 1.0 } else { 0.0 })
}

/// `alpha Q2` as an `n x r` point for the default column choice.
fn alpha_q2(n: usize, r: usize, r_star: usize, alpha: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, r, |i, j| if i == r_star + j { alpha } else { 0.0 })
}

fn check_thm1_params(n: usize, r: usize, r_star: usize, eps: f64, alpha: f64) -> Result<()> {
    if r_star < 1 || r < r_star || r + r_star > n {
        return Err(Error::InvalidParameter(format!(
            "require r >= r_star >= 1 and r + r_star <= n, got n = {n}, r = {r}, r_star = {r_star}"
        )));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eps must be > 0, got {eps}"
        )));
    }
    let bound = KernelOperator::alpha_upper_bound(r, r_star, eps);
    if !(alpha > 0.0 && alpha < bound) {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} outside the admissible open interval (0, {bound})"
        )));
    }
    Ok(())
}

/// Structured symmetric instance: `U* = Q1`, spurious candidate `U0 = alpha Q2`.
pub fn make_thm1_symmetric(
    n: usize,
    r: usize,
    r_star: usize,
    eps: f64,
    alpha: f64,
) -> Result<NamedInstance> {
    check_thm1_params(n, r, r_star, eps, alpha)?;
    let kernel = KernelOperator::new(n, r, r_star, eps, alpha)?;
    let instance = Instance::symmetric(Operator::structured(kernel)?, identity_cols(n, r_star), r)?;
    let global = instance.global_point().expect("r >= r_star");
    let candidates = vec![
        Candidate {
            name: "Ustar".into(),
            point: global,
            expected: Classification::GlobalMin,
            note: None,
        },
        Candidate {
            name: "U0".into(),
            point: FactorPoint::Symmetric(alpha_q2(n, r, r_star, alpha)),
            expected: Classification::SpuriousCandidate,
            note: Some("spurious strict local minimum (closed-form certificate)".into()),
        },
    ];
    Ok(NamedInstance {
        instance,
        candidates,
        provenance: Provenance::Thm1Sym {
            n,
            r,
            r_star,
            eps,
            alpha,
        },
        warnings: Vec::new(),
    })
}

/// Structured asymmetric instance: `L* = R* = Q1`, spurious candidate
/// `(alpha Q2, alpha Q2)`; second-order critical for `lambda = 0`, strict
/// local minimum for `lambda > 0`.
pub fn make_thm1_asymmetric(
    n: usize,
    r: usize,
    r_star: usize,
    eps: f64,
    alpha: f64,
    lambda: f64,
) -> Result<NamedInstance> {
    check_thm1_params(n, r, r_star, eps, alpha)?;
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "lambda must be >= 0, got {lambda}"
        )));
    }
    let kernel = KernelOperator::new(n, r, r_star, eps, alpha)?;
    let q1 = identity_cols(n, r_star);
    let instance = Instance::asymmetric(Operator::structured(kernel)?, q1.clone(), q1, r, lambda)?;
    let global = instance.global_point().expect("r >= r_star");
    let u0 = alpha_q2(n, r, r_star, alpha);
    let note = if lambda > 0.0 {
        "spurious strict local minimum (strict because lambda > 0)"
    } else {
        "spurious second-order critical point; not strict at lambda = 0 \
         (the cone quotient infimum is 0)"
    };
    let candidates = vec![
        Candidate {
            name: "Ustar".into(),
            point: global,
            expected: Classification::GlobalMin,
            note: None,
        },
        Candidate {
            name: "U0".into(),
            point: FactorPoint::Asymmetric {
                l: u0.clone(),
                r: u0,
            },
            expected: Classification::SpuriousCandidate,
            note: Some(note.into()),
        },
    ];
    Ok(NamedInstance {
        instance,
        candidates,
        provenance: Provenance::Thm1Asym {
            n,
            r,
            r_star,
            eps,
            alpha,
            lambda,
        },
        warnings: Vec::new(),
    })
}

/// Fully observed (`delta = 0`) instance with block-imbalanced ground truth
/// of rank `k + 1`: `U0 = [(1/sqrt r) 1 1'; 0]` is a spurious local minimum
/// whenever `m > r`.
pub fn make_spu2(
    m: usize,
    k: usize,
    r: usize,
    variant: Variant,
    lambda: f64,
) -> Result<NamedInstance> {
    if r < 1 || m <= r {
        return Err(Error::InvalidParameter(format!(
            "require m > r >= 1, got m = {m}, r = {r}"
        )));
    }
    if k < 1 {
        return Err(Error::InvalidParameter(format!(
            "require k >= 1, got k = {k}"
        )));
    }
    if variant == Variant::Symmetric && lambda != 0.0 {
        return Err(Error::InvalidParameter(
            "lambda applies to the asymmetric variant only".into(),
        ));
    }
    let n = m + k;
    let r_star = k + 1;
    let mut warnings = Vec::new();
    if r < r_star {
        warnings.push(format!(
            "search rank r = {r} is below the true rank {r_star}; the zero global \
             value is unattainable, so the local minimum at U0 is not certified \
             spurious relative to an attainable global optimum"
        ));
    }
    // U* = [1_m 0; 0 I_k], U0 = [(1/sqrt r) 1_m 1_r'; 0]
    let u_star = DMatrix::from_fn(n, r_star, |i, j| {
        if j == 0 {
            if i < m {
                1.0
            } else {
                0.0
            }
        } else if i >= m && i - m == j - 1 {
            1.0
        } else {
            0.0
        }
    });
    let inv_sqrt_r = 1.0 / (r as f64).sqrt();
    let u0 = DMatrix::from_fn(n, r, |i, _| if i < m { inv_sqrt_r } else { 0.0 });

    let (instance, u0_point) = match variant {
        Variant::Symmetric => {
            let inst = Instance::symmetric(Operator::Identity, u_star, r)?;
            (inst, FactorPoint::Symmetric(u0))
        }
        Variant::Asymmetric => {
            let inst = Instance::asymmetric(Operator::Identity, u_star.clone(), u_star, r, lambda)?;
            let p = FactorPoint::Asymmetric {
                l: u0.clone(),
                r: u0,
            };
            (inst, p)
        }
    };

    let mut candidates = Vec::new();
    if let Some(global) = instance.global_point() {
        candidates.push(Candidate {
            name: "Ustar".into(),
            point: global,
            expected: Classification::GlobalMin,
            note: None,
        });
    }
    let note = match variant {
        Variant::Symmetric => {
            "spurious local minimum within radius 1/(4 r sqrt m); objective gap k/2".to_string()
        }
        Variant::Asymmetric => format!(
            "spurious local minimum within radius 1/(4 r sqrt m); balanced point, so the \
             lambda = {lambda} regularizer vanishes there and the minimum persists"
        ),
    };
    candidates.push(Candidate {
        name: "U0".into(),
        point: u0_point,
        expected: Classification::SpuriousCandidate,
        note: Some(note),
    });
    Ok(NamedInstance {
        instance,
        candidates,
        provenance: Provenance::Spu2 {
            m,
            k,
            r,
            variant,
            lambda,
        },
        warnings,
    })
}

/// Fully observed rank-1 instance; the landscape has no spurious local
/// minima (asymmetric variant fixes `lambda = 1/4`).
pub fn make_benign_rank1(
    n: usize,
    r: usize,
    u_star: &[f64],
    variant: Variant,
) -> Result<NamedInstance> {
    if u_star.len() != n || n < 1 || r < 1 {
        return Err(Error::InvalidParameter(format!(
            "need n >= 1, r >= 1 and exactly n = {n} ground-truth entries (got {})",
            u_star.len()
        )));
    }
    let mut warnings = Vec::new();
    let (instance, lambda) = match variant {
        Variant::Symmetric => {
            let u = DMatrix::from_column_slice(n, 1, u_star);
            (Instance::symmetric(Operator::Identity, u, r)?, 0.0)
        }
        Variant::Asymmetric => {
            if n % 2 != 0 {
                return Err(Error::InvalidParameter(format!(
                    "asymmetric split [a; b] needs an even n, got {n}"
                )));
            }
            let half = n / 2;
            let a = DMatrix::from_column_slice(half, 1, &u_star[..half]);
            let b = DMatrix::from_column_slice(half, 1, &u_star[half..]);
            if (a.norm() - b.norm()).abs() > 1e-12 {
                warnings.push(format!(
                    "split norms differ (|a| = {}, |b| = {}); the zero-escape argument \
                     assumes |a| = |b|",
                    a.norm(),
                    b.norm()
                ));
            }
            // lambda = 1/4 is essential for the benign asymmetric landscape
            (
                Instance::asymmetric(Operator::Identity, a, b, r, 0.25)?,
                0.25,
            )
        }
    };
    let global = instance.global_point().expect("r >= 1 = true rank");
    let zero_is_global = instance.target_gram().norm() == 0.0;
    let zero_point = match variant {
        Variant::Symmetric => FactorPoint::Symmetric(DMatrix::zeros(n, r)),
        Variant::Asymmetric => FactorPoint::Asymmetric {
            l: DMatrix::zeros(n / 2, r),
            r: DMatrix::zeros(n / 2, r),
        },
    };
    let candidates = vec![
        Candidate {
            name: "Ustar".into(),
            point: global,
            expected: Classification::GlobalMin,
            note: None,
        },
        Candidate {
            name: "Zero".into(),
            point: zero_point,
            expected: if zero_is_global {
                Classification::GlobalMin
            } else {
                Classification::Saddle
            },
            note: Some("the origin; escapable along u* e1' when the target is nonzero".into()),
        },
    ];
    Ok(NamedInstance {
        instance,
        candidates,
        provenance: Provenance::BenignRank1 {
            n,
            r,
            variant,
            lambda,
        },
        warnings,
    })
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum OperatorSpec {
    Identity,
    Thm1 {
        n: usize,
        r: usize,
        r_star: usize,
        eps: f64,
        alpha: f64,
        perm_cols: Vec<usize>,
    },
}

#[derive(Serialize, Deserialize)]
struct PointFile {
    #[serde(rename = "U", skip_serializing_if = "Option::is_none")]
    u: Option<Vec<Vec<f64>>>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    l: Option<Vec<Vec<f64>>>,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    r: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct CandidateFile {
    name: String,
    point: PointFile,
    expected: Classification,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    note: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    variant: Variant,
    operator: OperatorSpec,
    #[serde(rename = "U_star", skip_serializing_if = "Option::is_none", default)]
    u_star: Option<Vec<Vec<f64>>>,
    #[serde(rename = "L_star", skip_serializing_if = "Option::is_none", default)]
    l_star: Option<Vec<Vec<f64>>>,
    #[serde(rename = "R_star", skip_serializing_if = "Option::is_none", default)]
    r_star: Option<Vec<Vec<f64>>>,
    r: usize,
    lambda: f64,
    candidates: Vec<CandidateFile>,
    provenance: Provenance,
}

fn mat_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn rows_to_mat(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::Schema(format!("{what}: matrix must be nonempty")));
    }
    let cols = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Schema(format!(
                "{what}: row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Schema(format!(
                    "{what}: entry ({i}, {j}) is not finite"
                )));
            }
        }
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

fn point_to_file(p: &FactorPoint) -> PointFile {
    match p {
        FactorPoint::Symmetric(u) => PointFile {
            u: Some(mat_to_rows(u)),
            l: None,
            r: None,
        },
        FactorPoint::Asymmetric { l, r } => PointFile {
            u: None,
            l: Some(mat_to_rows(l)),
            r: Some(mat_to_rows(r)),
        },
    }
}

fn point_from_file(p: &PointFile, name: &str) -> Result<FactorPoint> {
    match (&p.u, &p.l, &p.r) {
        (Some(u), None, None) => Ok(FactorPoint::Symmetric(rows_to_mat(u, name)?)),
        (None, Some(l), Some(r)) => Ok(FactorPoint::Asymmetric {
            l: rows_to_mat(l, name)?,
            r: rows_to_mat(r, name)?,
        }),
        _ => Err(Error::Schema(format!(
            "candidate {name}: point must carry either \"U\" or both \"L\" and \"R\""
        ))),
    }
}

fn to_file(named: &NamedInstance) -> InstanceFile {
    let inst = &named.instance;
    let operator = match inst.operator() {
        Operator::Identity => OperatorSpec::Identity,
        Operator::Structured(m) => {
            let k = m.kernel();
            OperatorSpec::Thm1 {
                n: k.n(),
                r: k.r(),
                r_star: k.r_star(),
                eps: k.eps(),
                alpha: k.alpha(),
                perm_cols: k.perm_cols().to_vec(),
            }
        }
    };
    let (u_star, l_star, r_star) = match inst.variant() {
        Variant::Symmetric => (Some(mat_to_rows(inst.u_star().unwrap())), None, None),
        Variant::Asymmetric => {
            let (l, r) = inst.lr_star().unwrap();
            (None, Some(mat_to_rows(l)), Some(mat_to_rows(r)))
        }
    };
    InstanceFile {
        variant: inst.variant(),
        operator,
        u_star,
        l_star,
        r_star,
        r: inst.search_rank(),
        lambda: inst.lambda(),
        candidates: named
            .candidates
            .iter()
            .map(|c| CandidateFile {
                name: c.name.clone(),
                point: point_to_file(&c.point),
                expected: c.expected,
                note: c.note.clone(),
            })
            .collect(),
        provenance: named.provenance.clone(),
    }
}

fn from_file(file: InstanceFile) -> Result<NamedInstance> {
    let operator = match file.operator {
        OperatorSpec::Identity => Operator::Identity,
        OperatorSpec::Thm1 {
            n,
            r,
            r_star,
            eps,
            alpha,
            perm_cols,
        } => Operator::structured(KernelOperator::with_cols(
            n, r, r_star, eps, alpha, perm_cols,
        )?)?,
    };
    let instance =
        match file.variant {
            Variant::Symmetric => {
                let rows = file.u_star.as_ref().ok_or_else(|| {
                    Error::Schema("symmetric instance requires \"U_star\"".into())
                })?;
                Instance::symmetric(operator, rows_to_mat(rows, "U_star")?, file.r)?
            }
            Variant::Asymmetric => {
                let l = file.l_star.as_ref().ok_or_else(|| {
                    Error::Schema("asymmetric instance requires \"L_star\"".into())
                })?;
                let r = file.r_star.as_ref().ok_or_else(|| {
                    Error::Schema("asymmetric instance requires \"R_star\"".into())
                })?;
                Instance::asymmetric(
                    operator,
                    rows_to_mat(l, "L_star")?,
                    rows_to_mat(r, "R_star")?,
                    file.r,
                    file.lambda,
                )?
            }
        };
    let mut candidates = Vec::with_capacity(file.candidates.len());
    for c in &file.candidates {
        let point = point_from_file(&c.point, &c.name)?;
        point
            .check_shape(&instance)
            .map_err(|e| Error::Schema(format!("candidate {}: {e}", c.name)))?;
        candidates.push(Candidate {
            name: c.name.clone(),
            point,
            expected: c.expected,
            note: c.note.clone(),
        });
    }
    Ok(NamedInstance {
        instance,
        candidates,
        provenance: file.provenance,
        warnings: Vec::new(),
    })
}

impl Serialize for FactorPoint {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        point_to_file(self).serialize(serializer)
    }
}

/// Serialize a named instance to pretty JSON.
pub fn instance_to_json(named: &NamedInstance) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&to_file(named))?;
    s.push('\n');
    Ok(s)
}

/// Parse and validate a named instance from JSON.
pub fn instance_from_json(json: &str) -> Result<NamedInstance> {
    let file: InstanceFile =
        serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
    from_file(file)
}

pub fn save_instance(path: impl AsRef<Path>, named: &NamedInstance) -> Result<()> {
    std::fs::write(path, instance_to_json(named)?)?;
    Ok(())
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<NamedInstance> {
    let json = std::fs::read_to_string(path)?;
    instance_from_json(&json)
}
