//! Projected gradient descent over the nonnegative orthant, basin
//! experiments, and parameter sweeps.
//!
//! The iteration is `U <- max(U - s * grad F(U), 0)` entrywise. Feasibility
//! is exact at every iterate. With backtracking the objective is
//! non-increasing (Armijo condition along the projection arc), and the loop
//! stops when the unit-step projected-gradient residual
//! `|U - P(U - grad F(U))|` falls below tolerance.
//!
//! All experiment-level randomness derives per-trial seeds by counter, so a
//! single seed reproduces results regardless of worker count.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::instances::NamedInstance;
use crate::objectives::{eval_stacked, grad_stacked, FactorPoint, GroundTruth, Instance};
use crate::optimality::{
    certify_point, classify_point, critical_cone, second_order_scan, Classification,
    ClassifySettings, NEGATIVE_QUOTIENT_CUTOFF, TOL_CONE_ACTIVITY,
};

/// Gram-distance threshold for assigning a limit point to a basin.
pub const GRAM_MATCH_TOL: f64 = 1e-4;
/// Scale of the feasible perturbation applied by saddle escapes.
pub const ESCAPE_PERTURBATION: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepRule {
    /// Constant step size.
    Fixed { step: f64 },
    /// Armijo backtracking along the projection arc, restarting from `s0`
    /// each iteration.
    Backtracking {
        s0: f64,
        shrink: f64,
        sufficient_decrease: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub step: StepRule,
    /// Stop tolerance on the projected-gradient residual.
    pub tol: f64,
    pub seed: u64,
    /// Record a trajectory point every this many iterations.
    pub trajectory_stride: usize,
    /// Settings for the classification of the final point.
    pub classify: ClassifySettings,
}

impl SolverConfig {
    /// Defaults for an instance: backtracking from `s0 = 1/(1 + delta)`
    /// (the RIP-implied smoothness scale), residual tolerance `1e-9`.
    pub fn default_for(inst: &Instance) -> Self {
        let delta = inst.operator().rip_constant();
        Self {
            max_iters: 100_000,
            step: StepRule::Backtracking {
                s0: 1.0 / (1.0 + delta),
                shrink: 0.5,
                sufficient_decrease: 1e-4,
            },
            tol: 1e-9,
            seed: 0,
            trajectory_stride: 100,
            classify: ClassifySettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.step {
            StepRule::Fixed { step } => {
                if step.is_nan() || step <= 0.0 {
                    return Err(Error::InvalidParameter("fixed step must be > 0".into()));
                }
            }
            StepRule::Backtracking {
                s0,
                shrink,
                sufficient_decrease,
            } => {
                let in_unit = |v: f64| v > 0.0 && v < 1.0;
                if s0.is_nan() || s0 <= 0.0 || !in_unit(shrink) || !in_unit(sufficient_decrease) {
                    return Err(Error::InvalidParameter(
                        "backtracking requires s0 > 0, 0 < shrink < 1, 0 < c < 1".into(),
                    ));
                }
            }
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter("tolerance must be > 0".into()));
        }
        if self.max_iters == 0 || self.trajectory_stride == 0 {
            return Err(Error::InvalidParameter(
                "max_iters and trajectory_stride must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iter: usize,
    pub objective: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub final_point: FactorPoint,
    pub iterations: usize,
    pub objective: f64,
    pub residual: f64,
    pub converged: bool,
    pub classification: Classification,
    pub trajectory: Vec<TrajectoryPoint>,
}

fn clamp_nonneg(m: &mut DMatrix<f64>) {
    m.apply(|v| *v = v.max(0.0));
}

/// Unit-step projected-gradient residual `|U - P(U - G)|`.
fn pg_residual(u: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    let mut proj = u - g;
    clamp_nonneg(&mut proj);
    (u - proj).norm()
}

/// Projected gradient descent from a feasible initial point.
pub fn pgd(inst: &Instance, init: &FactorPoint, config: &SolverConfig) -> Result<RunResult> {
    config.validate()?;
    init.check_shape(inst)?;
    if init.min_entry() < 0.0 {
        return Err(Error::InvalidParameter(
            "initial point has negative entries".into(),
        ));
    }
    let mut u = init.stacked();
    let mut objective = eval_stacked(inst, &u)?;
    let mut trajectory = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut residual = f64::INFINITY;

    for iter in 0..config.max_iters {
        let g = grad_stacked(inst, &u)?;
        residual = pg_residual(&u, &g);
        if iter % config.trajectory_stride == 0 {
            trajectory.push(TrajectoryPoint {
                iter,
                objective,
                residual,
            });
        }
        if residual <= config.tol {
            converged = true;
            iterations = iter;
            break;
        }
        let next = match config.step {
            StepRule::Fixed { step } => {
                let mut cand = &u - &g * step;
                clamp_nonneg(&mut cand);
                cand
            }
            StepRule::Backtracking {
                s0,
                shrink,
                sufficient_decrease,
            } => {
                let mut s = s0;
                loop {
                    let mut cand = &u - &g * s;
                    clamp_nonneg(&mut cand);
                    let cand_obj = eval_stacked(inst, &cand)?;
                    let decrease = g.dot(&(&u - &cand));
                    if cand_obj <= objective - sufficient_decrease * decrease {
                        break cand;
                    }
                    s *= shrink;
                    if s < 1e-18 {
                        // numerically stationary; the residual check above
                        // will terminate on the next pass
                        break cand;
                    }
                }
            }
        };
        objective = eval_stacked(inst, &next)?;
        u = next;
        iterations = iter + 1;
    }

    if !converged {
        let g = grad_stacked(inst, &u)?;
        residual = pg_residual(&u, &g);
        converged = residual <= config.tol;
    }
    trajectory.push(TrajectoryPoint {
        iter: iterations,
        objective,
        residual,
    });

    let final_point = FactorPoint::from_stacked(inst, &u)?;
    let classification = classify_point(inst, &final_point, &config.classify)?;
    Ok(RunResult {
        final_point,
        iterations,
        objective,
        residual,
        converged,
        classification,
        trajectory,
    })
}

/// Initial-point distribution for experiments.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum InitDistribution {
    /// Entries i.i.d. uniform in `[0, u_max]`; `u_max` defaults to twice the
    /// largest ground-truth entry (or 1 for a zero target).
    Uniform { u_max: Option<f64> },
    /// A named candidate plus a nonnegative perturbation of the given
    /// Frobenius radius.
    Near { name: String, radius: f64 },
}

fn ground_truth_max_entry(inst: &Instance) -> f64 {
    let m = match inst.ground_truth() {
        GroundTruth::Symmetric(u) => u.amax(),
        GroundTruth::Asymmetric { l, r } => l.amax().max(r.amax()),
    };
    if m > 0.0 {
        m
    } else {
        0.5
    }
}

/// Draw one initial point from a distribution, stacked.
pub fn draw_init(
    named: &NamedInstance,
    dist: &InitDistribution,
    rng: &mut impl Rng,
) -> Result<DMatrix<f64>> {
    let inst = &named.instance;
    let rows = inst.stacked_rows();
    let cols = inst.search_rank();
    match dist {
        InitDistribution::Uniform { u_max } => {
            let hi = u_max.unwrap_or_else(|| 2.0 * ground_truth_max_entry(inst));
            if hi.is_nan() || hi <= 0.0 {
                return Err(Error::InvalidParameter("u_max must be > 0".into()));
            }
            Ok(DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(0.0..hi)))
        }
        InitDistribution::Near { name, radius } => {
            if radius.is_nan() || *radius < 0.0 {
                return Err(Error::InvalidParameter("radius must be >= 0".into()));
            }
            let base = named.candidate(name)?.point.stacked();
            let mut pert = DMatrix::from_fn(rows, cols, |_, _| {
                let x: f64 = StandardNormal.sample(rng);
                x.abs()
            });
            let norm = pert.norm();
            if norm > 0.0 {
                pert *= radius / norm;
            }
            Ok(base + pert)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasinOutcome {
    GlobalBasin,
    SpuriousBasin,
    Other,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub outcome: BasinOutcome,
    /// Name of the matched spurious candidate, if any.
    pub matched_candidate: Option<String>,
    pub iterations: usize,
    pub objective: f64,
    pub residual: f64,
    pub gram_dist_global: f64,
    pub gram_dist_spurious: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasinReport {
    pub num_trials: usize,
    pub global_fraction: f64,
    pub spurious_fraction: f64,
    pub other_fraction: f64,
    pub seed: u64,
    pub records: Vec<TrialRecord>,
}

/// Run `num_trials` independent projected-gradient runs and label each limit
/// by Gram distance (column permutations and rotations of the factor do not
/// disturb the label).
pub fn basin_experiment(
    named: &NamedInstance,
    num_trials: usize,
    dist: &InitDistribution,
    config: &SolverConfig,
) -> Result<BasinReport> {
    if num_trials == 0 {
        return Err(Error::InvalidParameter("num_trials must be >= 1".into()));
    }
    config.validate()?;
    // fail fast on a bad distribution before spawning trials
    draw_init(named, dist, &mut ChaCha8Rng::seed_from_u64(0))?;

    let inst = &named.instance;
    let target = inst.target_gram().clone();
    let spurious = named.spurious_grams();
    let records: Vec<Result<TrialRecord>> = exec::collect_indexed(num_trials, |trial| {
        let seed = exec::sample_seed(config.seed, trial as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let init_stacked = draw_init(named, dist, &mut rng)?;
        let init = FactorPoint::from_stacked(inst, &init_stacked)?;
        let mut trial_config = config.clone();
        trial_config.classify.seed = seed;
        let run = pgd(inst, &init, &trial_config)?;
        let gram = run.final_point.gram();
        let gram_dist_global = (&gram - &target).norm();
        let mut best_spurious: Option<(f64, &str)> = None;
        for (name, sg) in &spurious {
            let d = (&gram - sg).norm();
            if best_spurious.is_none_or(|(bd, _)| d < bd) {
                best_spurious = Some((d, name));
            }
        }
        let (outcome, matched) = if gram_dist_global <= GRAM_MATCH_TOL {
            (BasinOutcome::GlobalBasin, None)
        } else if let Some((d, name)) = best_spurious {
            if d <= GRAM_MATCH_TOL {
                (BasinOutcome::SpuriousBasin, Some(name.to_string()))
            } else {
                (BasinOutcome::Other, None)
            }
        } else {
            (BasinOutcome::Other, None)
        };
        Ok(TrialRecord {
            trial,
            seed,
            outcome,
            matched_candidate: matched,
            iterations: run.iterations,
            objective: run.objective,
            residual: run.residual,
            gram_dist_global,
            gram_dist_spurious: best_spurious.map(|(d, _)| d),
        })
    });
    let records: Vec<TrialRecord> = records.into_iter().collect::<Result<_>>()?;
    let count = |o: BasinOutcome| records.iter().filter(|r| r.outcome == o).count() as f64;
    Ok(BasinReport {
        num_trials,
        global_fraction: count(BasinOutcome::GlobalBasin) / num_trials as f64,
        spurious_fraction: count(BasinOutcome::SpuriousBasin) / num_trials as f64,
        other_fraction: count(BasinOutcome::Other) / num_trials as f64,
        seed: config.seed,
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EscapeStatus {
    AlreadyGlobal,
    Escaped,
    NoNegativeDirection,
}

/// Perturb a stalled point along a sampled negative-curvature cone direction
/// (scaled to [`ESCAPE_PERTURBATION`], clamped feasible) and re-run the
/// solver. Returns the input unchanged, flagged, when no negative direction
/// is found.
pub fn saddle_escape_restart(
    inst: &Instance,
    result: &RunResult,
    config: &SolverConfig,
) -> Result<(RunResult, EscapeStatus)> {
    if result.classification == Classification::GlobalMin {
        return Ok((result.clone(), EscapeStatus::AlreadyGlobal));
    }
    let u = result.final_point.stacked();
    let g = grad_stacked(inst, &u)?;
    let mask = critical_cone(&u, &g, TOL_CONE_ACTIVITY)?;
    if mask.support_len() == 0 {
        return Ok((result.clone(), EscapeStatus::NoNegativeDirection));
    }
    let scan = second_order_scan(
        inst,
        &result.final_point,
        &mask,
        config.classify.num_samples,
        exec::sample_seed(config.seed, 0xe5ca9e),
    )?;
    if scan.min_quotient >= NEGATIVE_QUOTIENT_CUTOFF {
        return Ok((result.clone(), EscapeStatus::NoNegativeDirection));
    }
    let mut perturbed = &u + scan.witness * ESCAPE_PERTURBATION;
    clamp_nonneg(&mut perturbed);
    let restart = FactorPoint::from_stacked(inst, &perturbed)?;
    let rerun = pgd(inst, &restart, config)?;
    Ok((rerun, EscapeStatus::Escaped))
}

/// Projected gradient descent with up to `max_restarts` saddle escapes.
pub fn pgd_with_restarts(
    inst: &Instance,
    init: &FactorPoint,
    config: &SolverConfig,
    max_restarts: usize,
) -> Result<RunResult> {
    let mut result = pgd(inst, init, config)?;
    for _ in 0..max_restarts {
        if result.classification == Classification::GlobalMin {
            break;
        }
        let (next, status) = saddle_escape_restart(inst, &result, config)?;
        result = next;
        if status != EscapeStatus::Escaped {
            break;
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub fraction: f64,
    pub alpha: f64,
    pub delta: f64,
    /// `f(U0)`, the objective gap of the spurious point.
    pub objective_gap: f64,
    pub certificate_passed: bool,
    pub min_cone_quotient: f64,
    pub spurious_basin_fraction: f64,
    /// Certificate passed and every near-candidate run stayed in the basin.
    pub persists: bool,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub certificate_samples: usize,
    pub basin_trials: usize,
    pub init_radius: f64,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            certificate_samples: crate::optimality::DEFAULT_SCAN_SAMPLES,
            basin_trials: 20,
            init_radius: 1e-3,
            seed: 0,
        }
    }
}

/// Probe persistence of the structured spurious point as `alpha` (and with
/// it `delta`) shrinks toward zero. Each fraction is taken of the open
/// upper bound on `alpha`.
pub fn alpha_sweep(
    n: usize,
    r: usize,
    r_star: usize,
    eps: f64,
    fractions: &[f64],
    config: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    if fractions.iter().any(|&f| !(f > 0.0 && f < 1.0)) {
        return Err(Error::InvalidParameter(
            "fractions must lie in the open interval (0, 1)".into(),
        ));
    }
    let bound = crate::operators::KernelOperator::alpha_upper_bound(r, r_star, eps);
    let mut rows = Vec::with_capacity(fractions.len());
    for (idx, &fraction) in fractions.iter().enumerate() {
        let alpha = fraction * bound;
        let named = crate::instances::make_thm1_symmetric(n, r, r_star, eps, alpha)?;
        let inst = &named.instance;
        let u0 = named.candidate("U0")?;
        let cert = crate::optimality::structured_certificate_thm1(
            inst,
            &u0.point,
            config.certificate_samples,
            exec::sample_seed(config.seed, idx as u64),
        )?;
        let mut solver = SolverConfig::default_for(inst);
        solver.seed = exec::sample_seed(config.seed, 1000 + idx as u64);
        // The escape barrier out of the basin along the rows with positive
        // gradient has scale alpha^3 eps (linear coefficient 2 alpha^3 eps
        // against quadratic curvature ~ -2); the probe radius must stay
        // well inside it or small-alpha rows read as escapes.
        let probe_radius = config.init_radius.min(0.5 * alpha.powi(3) * eps);
        let basin = basin_experiment(
            &named,
            config.basin_trials,
            &InitDistribution::Near {
                name: "U0".into(),
                radius: probe_radius,
            },
            &solver,
        )?;
        let objective_gap = crate::objectives::eval_objective(inst, &u0.point)?;
        rows.push(SweepRow {
            fraction,
            alpha,
            delta: inst.operator().rip_constant(),
            objective_gap,
            certificate_passed: cert.passed,
            min_cone_quotient: cert.min_cone_quotient,
            spurious_basin_fraction: basin.spurious_fraction,
            persists: cert.passed && basin.spurious_fraction == 1.0,
        });
    }
    Ok(rows)
}

/// Re-certify a run's final point; exposed for consistency checks.
pub fn recertify(
    inst: &Instance,
    result: &RunResult,
    settings: &ClassifySettings,
) -> Result<Classification> {
    Ok(certify_point(inst, &result.final_point, settings)?.classification)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{make_benign_rank1, make_spu2, make_thm1_symmetric};
    use crate::objectives::Variant;

    fn quick_classify() -> ClassifySettings {
        ClassifySettings {
            num_samples: 800,
            ..Default::default()
        }
    }

    #[test]
    fn pgd_from_ground_truth_stops_immediately() {
        let named = make_thm1_symmetric(4, 1, 1, 0.5, 0.4).unwrap();
        let mut config = SolverConfig::default_for(&named.instance);
        config.classify = quick_classify();
        let init = named.candidate("Ustar").unwrap().point.clone();
        let run = pgd(&named.instance, &init, &config).unwrap();
        assert!(run.converged);
        assert_eq!(run.iterations, 0);
        assert_eq!(run.objective, 0.0);
        assert_eq!(run.classification, Classification::GlobalMin);
    }

    #[test]
    fn pgd_rejects_infeasible_init() {
        let named = make_benign_rank1(3, 1, &[1.0, 0.0, 0.0], Variant::Symmetric).unwrap();
        let mut bad = DMatrix::zeros(3, 1);
        bad[(0, 0)] = -0.1;
        let config = SolverConfig::default_for(&named.instance);
        assert!(pgd(&named.instance, &FactorPoint::Symmetric(bad), &config).is_err());
    }

    #[test]
    fn pgd_converges_on_benign_instance_and_objective_is_monotone() {
        let named = make_benign_rank1(4, 1, &[1.0, 0.6, 0.3, 0.1], Variant::Symmetric).unwrap();
        let inst = &named.instance;
        let mut config = SolverConfig::default_for(inst);
        config.classify = quick_classify();
        config.trajectory_stride = 1;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let init = DMatrix::from_fn(4, 1, |_, _| rng.gen_range(0.05..1.0));
        let run = pgd(inst, &FactorPoint::Symmetric(init), &config).unwrap();
        assert!(run.converged, "residual = {}", run.residual);
        let gram_err = (run.final_point.gram() - inst.target_gram()).norm();
        assert!(gram_err <= 1e-6, "gram error {gram_err}");
        for w in run.trajectory.windows(2) {
            assert!(w[1].objective <= w[0].objective + 1e-15);
        }
        // iterates stay feasible exactly
        assert!(run.final_point.min_entry() >= 0.0);
    }

    #[test]
    fn pgd_is_deterministic() {
        let named = make_benign_rank1(4, 2, &[0.9, 0.4, 0.2, 0.7], Variant::Symmetric).unwrap();
        let mut config = SolverConfig::default_for(&named.instance);
        config.classify = quick_classify();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let init = FactorPoint::Symmetric(DMatrix::from_fn(4, 2, |_, _| rng.gen_range(0.0..1.0)));
        let a = pgd(&named.instance, &init, &config).unwrap();
        let b = pgd(&named.instance, &init, &config).unwrap();
        assert_eq!(a.final_point, b.final_point);
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    }

    #[test]
    fn fixed_step_rule_also_converges() {
        let named = make_benign_rank1(3, 1, &[0.8, 0.5, 0.2], Variant::Symmetric).unwrap();
        let mut config = SolverConfig::default_for(&named.instance);
        config.step = StepRule::Fixed { step: 0.2 };
        config.classify = quick_classify();
        let init = FactorPoint::Symmetric(DMatrix::from_element(3, 1, 0.4));
        let run = pgd(&named.instance, &init, &config).unwrap();
        assert!(run.converged);
        assert_eq!(run.classification, Classification::GlobalMin);
    }

    #[test]
    fn figure_instance_run_from_off_axis_start_returns_to_boundary_point() {
        // init (0.01, 0.5) lies inside the basin of the boundary minimum
        // (0, 0.5); the escape barrier along e1 is alpha^3 eps = 0.0625
        let named = make_thm1_symmetric(2, 1, 1, 0.5, 0.5).unwrap();
        let inst = &named.instance;
        let mut config = SolverConfig::default_for(inst);
        config.classify = quick_classify();
        let init = FactorPoint::Symmetric(DMatrix::from_column_slice(2, 1, &[0.01, 0.5]));
        let run = pgd(inst, &init, &config).unwrap();
        let u0 = named.candidate("U0").unwrap().point.stacked();
        assert!((run.final_point.stacked() - u0).norm() <= 1e-3);
        assert_eq!(run.classification, Classification::SpuriousCandidate);
    }

    #[test]
    fn near_candidate_basin_is_captured_by_the_spurious_point() {
        let named = make_thm1_symmetric(4, 1, 1, 0.5, 0.4).unwrap();
        let mut config = SolverConfig::default_for(&named.instance);
        config.classify = quick_classify();
        config.seed = 3;
        let report = basin_experiment(
            &named,
            10,
            &InitDistribution::Near {
                name: "U0".into(),
                radius: 1e-3,
            },
            &config,
        )
        .unwrap();
        assert_eq!(report.spurious_fraction, 1.0);
        assert!(report
            .records
            .iter()
            .all(|r| r.matched_candidate.as_deref() == Some("U0")));
    }

    #[test]
    fn spu2_near_candidate_basin_is_spurious() {
        let named = make_spu2(3, 1, 2, Variant::Symmetric, 0.0).unwrap();
        let mut config = SolverConfig::default_for(&named.instance);
        config.classify = quick_classify();
        config.seed = 4;
        let report = basin_experiment(
            &named,
            10,
            &InitDistribution::Near {
                name: "U0".into(),
                radius: 1e-3,
            },
            &config,
        )
        .unwrap();
        assert_eq!(report.spurious_fraction, 1.0);
    }

    #[test]
    fn benign_uniform_basin_is_global_with_restarts() {
        let named = make_benign_rank1(4, 2, &[1.0, 0.3, 0.6, 0.2], Variant::Symmetric).unwrap();
        let inst = &named.instance;
        let mut config = SolverConfig::default_for(inst);
        config.classify = quick_classify();
        config.seed = 11;
        for trial in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(exec::sample_seed(7, trial));
            let init =
                FactorPoint::Symmetric(DMatrix::from_fn(4, 2, |_, _| rng.gen_range(0.01..2.0)));
            let run = pgd_with_restarts(inst, &init, &config, 5).unwrap();
            assert_eq!(
                run.classification,
                Classification::GlobalMin,
                "trial {trial}"
            );
        }
    }

    #[test]
    fn saddle_escape_leaves_the_origin() {
        let named = make_benign_rank1(3, 1, &[1.0, 0.5, 0.0], Variant::Symmetric).unwrap();
        let inst = &named.instance;
        let mut config = SolverConfig::default_for(inst);
        config.classify = quick_classify();
        let zero = named.candidate("Zero").unwrap().point.clone();
        let run = pgd(inst, &zero, &config).unwrap();
        // the origin is stationary for PGD (gradient is exactly zero there)
        assert_eq!(run.iterations, 0);
        assert_eq!(run.classification, Classification::Saddle);
        let (rerun, status) = saddle_escape_restart(inst, &run, &config).unwrap();
        assert_eq!(status, EscapeStatus::Escaped);
        assert_eq!(rerun.classification, Classification::GlobalMin);
    }

    #[test]
    fn escape_flags_global_and_certified_points() {
        let named = make_thm1_symmetric(4, 1, 1, 0.5, 0.4).unwrap();
        let inst = &named.instance;
        let mut config = SolverConfig::default_for(inst);
        config.classify = quick_classify();
        let global = pgd(inst, &named.candidate("Ustar").unwrap().point, &config).unwrap();
        let (_, status) = saddle_escape_restart(inst, &global, &config).unwrap();
        assert_eq!(status, EscapeStatus::AlreadyGlobal);

        let spurious = pgd(inst, &named.candidate("U0").unwrap().point, &config).unwrap();
        assert_eq!(spurious.classification, Classification::SpuriousCandidate);
        let (back, status) = saddle_escape_restart(inst, &spurious, &config).unwrap();
        assert_eq!(status, EscapeStatus::NoNegativeDirection);
        assert_eq!(back.final_point, spurious.final_point);
    }

    #[test]
    fn classification_agrees_with_recertification() {
        let named = make_benign_rank1(3, 1, &[0.7, 0.4, 0.1], Variant::Symmetric).unwrap();
        let mut config = SolverConfig::default_for(&named.instance);
        config.classify = quick_classify();
        let init = FactorPoint::Symmetric(DMatrix::from_element(3, 1, 0.3));
        let run = pgd(&named.instance, &init, &config).unwrap();
        let again = recertify(&named.instance, &run, &config.classify).unwrap();
        assert_eq!(run.classification, again);
    }

    #[test]
    fn alpha_sweep_rows_persist_and_delta_increases() {
        let config = SweepConfig {
            certificate_samples: 1500,
            basin_trials: 5,
            ..Default::default()
        };
        let rows = alpha_sweep(4, 1, 1, 0.5, &[0.1, 0.5, 0.9], &config).unwrap();
        assert_eq!(rows.len(), 3);
        for w in rows.windows(2) {
            assert!(w[1].delta > w[0].delta);
        }
        for row in &rows {
            assert!(row.persists, "fraction {}", row.fraction);
            assert!(row.delta < 1.0);
            let expected_gap = 0.5 * (1.0 - row.alpha.powi(4));
            assert!((row.objective_gap - expected_gap).abs() <= 1e-12);
        }
    }

    #[test]
    fn sweep_rejects_fractions_outside_open_interval() {
        let config = SweepConfig::default();
        assert!(alpha_sweep(4, 1, 1, 0.5, &[1.0], &config).is_err());
        assert!(alpha_sweep(4, 1, 1, 0.5, &[0.0], &config).is_err());
    }
}
