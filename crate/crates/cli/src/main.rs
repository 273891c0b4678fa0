//! `nnlr` — construct, certify, and probe nonnegative low-rank recovery
//! landscapes from the command line.
//!
//! Exit codes: 0 success / expectation met, 1 usage or parameter error,
//! 2 certification expectation mismatch, 3 I/O or schema error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nnlr_core::error::Error;
use nnlr_core::exec;
use nnlr_core::instances::{
    load_instance, make_benign_rank1, make_spu2, make_thm1_asymmetric, make_thm1_symmetric,
    save_instance, NamedInstance,
};
use nnlr_core::objectives::{eval_f, FactorPoint, Variant};
use nnlr_core::operators::{KernelOperator, Operator, DENSE_VEC_FORM_MAX_N};
use nnlr_core::optimality::{
    certify_point, local_min_ball_test, structured_certificate_thm1, ClassifySettings,
    DEFAULT_SCAN_SAMPLES,
};
use nnlr_core::solver::{
    alpha_sweep, basin_experiment, draw_init, pgd, pgd_with_restarts, InitDistribution,
    SolverConfig, StepRule, SweepConfig,
};

/// 17 significant digits: round-trip exact for f64.
fn g17(x: f64) -> String {
    format!("{:.16e}", x)
}

#[derive(Parser)]
#[command(
    name = "nnlr",
    about = "Nonnegative low-rank recovery landscapes: construction, certification, experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Sym,
    Asym,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Sym => Variant::Symmetric,
            VariantArg::Asym => Variant::Asymmetric,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a named instance family and write it as JSON.
    Construct {
        #[command(subcommand)]
        family: ConstructFamily,
    },
    /// Check first/second-order conditions at a named candidate point.
    Certify(CertifyArgs),
    /// One projected-gradient run.
    Run(RunArgs),
    /// Many projected-gradient runs with basin statistics.
    Basins(BasinsArgs),
    /// Sweep alpha toward 0+ on the structured symmetric family.
    Sweep(SweepArgs),
    /// Objective values of a 2 x 1 symmetric instance on a grid, as CSV.
    Contour(ContourArgs),
    /// Operator self-checks: composition, adjoint, spectrum.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum ConstructFamily {
    /// Structured symmetric counterexample (spurious strict local minimum).
    #[command(name = "thm1-sym")]
    Thm1Sym(Thm1Args),
    /// Structured asymmetric counterexample (second-order critical at
    /// lambda = 0, strict local minimum for lambda > 0).
    #[command(name = "thm1-asym")]
    Thm1Asym(Thm1AsymArgs),
    /// Fully observed block-imbalanced family with a spurious minimum.
    Spu2(Spu2Args),
    /// Fully observed rank-1 benign family.
    #[command(name = "benign-r1")]
    BenignR1(BenignArgs),
}

#[derive(Args)]
struct Thm1Args {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    #[arg(long = "r-star")]
    r_star: usize,
    #[arg(long)]
    eps: f64,
    /// Absolute alpha; must lie in the open admissible interval.
    #[arg(long, conflicts_with = "alpha_frac")]
    alpha: Option<f64>,
    /// Alpha as a fraction of its open upper bound (default 0.5).
    #[arg(long = "alpha-frac")]
    alpha_frac: Option<f64>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct Thm1AsymArgs {
    #[command(flatten)]
    base: Thm1Args,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
}

#[derive(Args)]
struct Spu2Args {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    r: usize,
    #[arg(long, value_enum, default_value = "sym")]
    variant: VariantArg,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct BenignArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    /// Comma-separated nonnegative entries of u*; random uniform [0, 1]
    /// when omitted.
    #[arg(long = "u-star", value_delimiter = ',')]
    u_star: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "sym")]
    variant: VariantArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct CertifyArgs {
    instance: PathBuf,
    #[arg(long)]
    candidate: String,
    #[arg(long, default_value_t = DEFAULT_SCAN_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Feasibility/complementarity tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Also sample the feasible ball of this radius around the candidate.
    #[arg(long = "ball-radius")]
    ball_radius: Option<f64>,
    #[arg(long = "ball-samples", default_value_t = 100_000)]
    ball_samples: usize,
    /// Write the certificate JSON here (stdout summary always prints).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    instance: PathBuf,
    /// `uniform`, `near:<candidate>`, or `candidate:<candidate>`.
    #[arg(long)]
    init: String,
    /// Radius for `near:` inits.
    #[arg(long, default_value_t = 1e-3)]
    radius: f64,
    /// Upper bound for `uniform` init entries (default: 2 x max ground truth).
    #[arg(long = "u-max")]
    u_max: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "max-iters", default_value_t = 100_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// `backtracking` or `fixed:<step>`.
    #[arg(long, default_value = "backtracking")]
    step: String,
    /// Saddle-escape restarts after stalls.
    #[arg(long, default_value_t = 0)]
    restarts: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the objective/residual trajectory as CSV.
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

#[derive(Args)]
struct BasinsArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// `uniform` or `near:<candidate>`.
    #[arg(long, default_value = "uniform")]
    init: String,
    #[arg(long, default_value_t = 1e-3)]
    radius: f64,
    #[arg(long = "u-max")]
    u_max: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON-lines file, one record per trial.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Summary JSON file.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long = "no-timestamp", default_value_t = false)]
    no_timestamp: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long = "r-star", default_value_t = 1)]
    r_star: usize,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, value_delimiter = ',')]
    fractions: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_SCAN_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON-lines file, one row per fraction.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long = "no-timestamp", default_value_t = false)]
    no_timestamp: bool,
}

#[derive(Args)]
struct ContourArgs {
    instance: PathBuf,
    #[arg(long = "u1-min", default_value_t = 0.0)]
    u1_min: f64,
    #[arg(long = "u1-max", default_value_t = 1.5)]
    u1_max: f64,
    #[arg(long = "u2-min", default_value_t = 0.0)]
    u2_min: f64,
    #[arg(long = "u2-max", default_value_t = 1.5)]
    u2_max: f64,
    #[arg(long, default_value_t = 301)]
    steps: usize,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum CliOutcome {
    Ok,
    ExpectationMismatch,
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Json(_) | Error::Schema(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    // die quietly when a pipe closes early (e.g. `nnlr basins ... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    exec::configure_threads_from_env();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(CliOutcome::Ok) => ExitCode::from(0),
        Ok(CliOutcome::ExpectationMismatch) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}

fn dispatch(cmd: Command) -> Result<CliOutcome, Error> {
    match cmd {
        Command::Construct { family } => cmd_construct(family),
        Command::Certify(args) => cmd_certify(args),
        Command::Run(args) => cmd_run(args),
        Command::Basins(args) => cmd_basins(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Contour(args) => cmd_contour(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn resolve_alpha(args: &Thm1Args) -> (f64, f64) {
    let bound = KernelOperator::alpha_upper_bound(args.r, args.r_star, args.eps);
    let alpha = match (args.alpha, args.alpha_frac) {
        (Some(a), _) => a,
        (None, Some(f)) => f * bound,
        (None, None) => 0.5 * bound,
    };
    (alpha, bound)
}

fn write_instance(named: &NamedInstance, path: &PathBuf) -> Result<(), Error> {
    for w in &named.warnings {
        eprintln!("warning: {w}");
    }
    save_instance(path, named)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_construct(family: ConstructFamily) -> Result<CliOutcome, Error> {
    match family {
        ConstructFamily::Thm1Sym(args) => {
            let (alpha, bound) = resolve_alpha(&args);
            let named = make_thm1_symmetric(args.n, args.r, args.r_star, args.eps, alpha)?;
            let delta = named.instance.operator().rip_constant();
            println!("admissible alpha interval: (0, {})", g17(bound));
            println!("alpha = {}", g17(alpha));
            println!("delta = {}", g17(delta));
            write_instance(&named, &args.output)?;
        }
        ConstructFamily::Thm1Asym(args) => {
            let (alpha, bound) = resolve_alpha(&args.base);
            let named = make_thm1_asymmetric(
                args.base.n,
                args.base.r,
                args.base.r_star,
                args.base.eps,
                alpha,
                args.lambda,
            )?;
            let delta = named.instance.operator().rip_constant();
            println!("admissible alpha interval: (0, {})", g17(bound));
            println!("alpha = {}", g17(alpha));
            println!("delta = {}", g17(delta));
            println!("lambda = {}", g17(args.lambda));
            write_instance(&named, &args.base.output)?;
        }
        ConstructFamily::Spu2(args) => {
            let named = make_spu2(args.m, args.k, args.r, args.variant.into(), args.lambda)?;
            println!("delta = 0 (identity operator)");
            if let Some(rho) = named.provenance.ball_radius() {
                println!("proven local-minimality ball radius rho = {}", g17(rho));
            }
            write_instance(&named, &args.output)?;
        }
        ConstructFamily::BenignR1(args) => {
            let u_star = match args.u_star {
                Some(v) => v,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
                    (0..args.n)
                        .map(|_| rand::Rng::gen_range(&mut rng, 0.0..1.0))
                        .collect()
                }
            };
            let named = make_benign_rank1(args.n, args.r, &u_star, args.variant.into())?;
            println!("delta = 0 (identity operator)");
            write_instance(&named, &args.output)?;
        }
    }
    Ok(CliOutcome::Ok)
}

fn cmd_certify(args: CertifyArgs) -> Result<CliOutcome, Error> {
    let named = load_instance(&args.instance)?;
    let candidate = named.candidate(&args.candidate)?;
    let settings = ClassifySettings {
        tol_feasibility: args.tol,
        num_samples: args.samples,
        seed: args.seed,
        ..Default::default()
    };
    let cert = certify_point(&named.instance, &candidate.point, &settings)?;
    // the closed-form-backed path applies only to the structured family at
    // its own spurious point; elsewhere this errors and we fall back to
    // sampling evidence
    let structured =
        structured_certificate_thm1(&named.instance, &candidate.point, args.samples, args.seed)
            .ok();
    let ball = match args.ball_radius {
        Some(radius) => Some(local_min_ball_test(
            &named.instance,
            &candidate.point,
            radius,
            args.ball_samples,
            args.seed,
        )?),
        None => None,
    };

    println!("candidate          : {}", candidate.name);
    println!("feasibility margin : {}", g17(cert.feasibility_margin));
    println!("gradient margin    : {}", g17(cert.gradient_margin));
    println!(
        "complementarity    : {}",
        g17(cert.complementarity_residual)
    );
    println!("objective gap      : {}", g17(cert.objective_gap));
    match cert.min_cone_quotient {
        Some(q) => println!(
            "min cone quotient  : {} ({} samples)",
            g17(q),
            cert.num_samples
        ),
        None => println!("min cone quotient  : (scan skipped)"),
    }
    match &structured {
        Some(sc) => {
            println!(
                "closed-form-backed : yes ({} checks, {})",
                sc.checks.len(),
                if sc.passed { "all passed" } else { "FAILED" }
            );
            for c in &sc.checks {
                println!(
                    "  {:<32} value {} reference {} [{}]",
                    c.name,
                    g17(c.value),
                    g17(c.reference),
                    if c.passed { "ok" } else { "FAIL" }
                );
            }
        }
        None => println!("closed-form-backed : no (sampling evidence only)"),
    }
    if let Some(b) = &ball {
        println!(
            "ball test          : min gap {} over {} samples at radius {}",
            g17(b.min_gap),
            b.num_samples,
            g17(b.radius)
        );
    }
    println!("classification     : {}", cert.classification);
    println!("expected           : {}", candidate.expected);

    if let Some(path) = &args.output {
        let mut doc = serde_json::json!({
            "candidate": candidate.name,
            "expected": candidate.expected,
            "certificate": cert,
        });
        if let Some(sc) = &structured {
            doc["structured_certificate"] = serde_json::to_value(sc)?;
        }
        if let Some(b) = &ball {
            doc["ball_test"] = serde_json::to_value(b)?;
        }
        std::fs::write(path, format!("{:#}\n", doc))?;
        println!("wrote {}", path.display());
    }

    if cert.classification == candidate.expected {
        Ok(CliOutcome::Ok)
    } else {
        eprintln!(
            "expectation mismatch: classified {} but expected {}",
            cert.classification, candidate.expected
        );
        Ok(CliOutcome::ExpectationMismatch)
    }
}

fn parse_init(init: &str, radius: f64, u_max: Option<f64>) -> Result<InitDistribution, Error> {
    if init == "uniform" {
        Ok(InitDistribution::Uniform { u_max })
    } else if let Some(name) = init.strip_prefix("near:") {
        Ok(InitDistribution::Near {
            name: name.to_string(),
            radius,
        })
    } else if let Some(name) = init.strip_prefix("candidate:") {
        Ok(InitDistribution::Near {
            name: name.to_string(),
            radius: 0.0,
        })
    } else {
        Err(Error::InvalidParameter(format!(
            "unknown init spec `{init}`; use uniform, near:<name>, or candidate:<name>"
        )))
    }
}

fn parse_step(step: &str, delta: f64) -> Result<StepRule, Error> {
    if step == "backtracking" {
        Ok(StepRule::Backtracking {
            s0: 1.0 / (1.0 + delta),
            shrink: 0.5,
            sufficient_decrease: 1e-4,
        })
    } else if let Some(s) = step.strip_prefix("fixed:") {
        let step: f64 = s
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad fixed step `{s}`")))?;
        Ok(StepRule::Fixed { step })
    } else {
        Err(Error::InvalidParameter(format!(
            "unknown step rule `{step}`; use backtracking or fixed:<step>"
        )))
    }
}

fn cmd_run(args: RunArgs) -> Result<CliOutcome, Error> {
    let named = load_instance(&args.instance)?;
    let inst = &named.instance;
    let dist = parse_init(&args.init, args.radius, args.u_max)?;
    let mut config = SolverConfig::default_for(inst);
    config.max_iters = args.max_iters;
    config.tol = args.tol;
    config.seed = args.seed;
    config.step = parse_step(&args.step, inst.operator().rip_constant())?;
    config.classify.seed = args.seed;

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let init_stacked = draw_init(&named, &dist, &mut rng)?;
    let init = FactorPoint::from_stacked(inst, &init_stacked)?;
    let result = if args.restarts > 0 {
        pgd_with_restarts(inst, &init, &config, args.restarts)?
    } else {
        pgd(inst, &init, &config)?
    };

    println!("iterations     : {}", result.iterations);
    println!("objective      : {}", g17(result.objective));
    println!("residual       : {}", g17(result.residual));
    println!("converged      : {}", result.converged);
    println!("classification : {}", result.classification);

    if let Some(path) = &args.trajectory {
        let mut out = String::from("iter,objective,residual\n");
        for t in &result.trajectory {
            out.push_str(&format!(
                "{},{},{}\n",
                t.iter,
                g17(t.objective),
                g17(t.residual)
            ));
        }
        std::fs::write(path, out)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.output {
        let doc = serde_json::json!({
            "seed": args.seed,
            "init": dist,
            "result": result,
        });
        std::fs::write(path, format!("{:#}\n", doc))?;
        println!("wrote {}", path.display());
    }
    Ok(CliOutcome::Ok)
}

fn unix_timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn cmd_basins(args: BasinsArgs) -> Result<CliOutcome, Error> {
    let named = load_instance(&args.instance)?;
    let dist = parse_init(&args.init, args.radius, args.u_max)?;
    let mut config = SolverConfig::default_for(&named.instance);
    config.seed = args.seed;
    let report = basin_experiment(&named, args.trials, &dist, &config)?;

    println!(
        "trials {}  global {}  spurious {}  other {}",
        report.num_trials,
        g17(report.global_fraction),
        g17(report.spurious_fraction),
        g17(report.other_fraction)
    );

    if let Some(path) = &args.output {
        let mut out = String::new();
        for record in &report.records {
            out.push_str(&serde_json::to_string(record)?);
            out.push('\n');
        }
        std::fs::write(path, out)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.summary {
        let mut doc = serde_json::json!({
            "trials": report.num_trials,
            "seed": report.seed,
            "init": dist,
            "global_fraction": report.global_fraction,
            "spurious_fraction": report.spurious_fraction,
            "other_fraction": report.other_fraction,
        });
        if !args.no_timestamp {
            doc["generated_at_unix"] = serde_json::json!(unix_timestamp());
        }
        std::fs::write(path, format!("{:#}\n", doc))?;
        println!("wrote {}", path.display());
    }
    Ok(CliOutcome::Ok)
}

fn cmd_sweep(args: SweepArgs) -> Result<CliOutcome, Error> {
    if args.fractions.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one --fractions value is required".into(),
        ));
    }
    let config = SweepConfig {
        certificate_samples: args.samples,
        basin_trials: args.trials,
        init_radius: 1e-3,
        seed: args.seed,
    };
    let rows = alpha_sweep(
        args.n,
        args.r,
        args.r_star,
        args.eps,
        &args.fractions,
        &config,
    )?;

    println!(
        "{:>8}  {:>24}  {:>24}  {:>24}  {:>5}  {:>8}",
        "fraction", "alpha", "delta", "gap f(U0)", "cert", "persists"
    );
    for row in &rows {
        println!(
            "{:>8}  {:>24}  {:>24}  {:>24}  {:>5}  {:>8}",
            row.fraction,
            g17(row.alpha),
            g17(row.delta),
            g17(row.objective_gap),
            if row.certificate_passed {
                "pass"
            } else {
                "FAIL"
            },
            row.persists
        );
    }

    if let Some(path) = &args.output {
        let mut out = String::new();
        for row in &rows {
            out.push_str(&serde_json::to_string(row)?);
            out.push('\n');
        }
        std::fs::write(path, out)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.summary {
        let mut doc = serde_json::json!({
            "n": args.n,
            "r": args.r,
            "r_star": args.r_star,
            "eps": args.eps,
            "seed": args.seed,
            "rows": rows.len(),
            "all_persist": rows.iter().all(|r| r.persists),
        });
        if !args.no_timestamp {
            doc["generated_at_unix"] = serde_json::json!(unix_timestamp());
        }
        std::fs::write(path, format!("{:#}\n", doc))?;
        println!("wrote {}", path.display());
    }
    Ok(CliOutcome::Ok)
}

fn cmd_contour(args: ContourArgs) -> Result<CliOutcome, Error> {
    let named = load_instance(&args.instance)?;
    let inst = &named.instance;
    if inst.variant() != Variant::Symmetric || inst.factor_rows().0 != 2 || inst.search_rank() != 1
    {
        return Err(Error::InvalidParameter(
            "contour requires a symmetric instance with n = 2, r = 1".into(),
        ));
    }
    if args.steps < 2 {
        return Err(Error::InvalidParameter("steps must be >= 2".into()));
    }
    let file = std::fs::File::create(&args.output)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "u1,u2,f")?;
    let step1 = (args.u1_max - args.u1_min) / (args.steps - 1) as f64;
    let step2 = (args.u2_max - args.u2_min) / (args.steps - 1) as f64;
    for i in 0..args.steps {
        let u1 = args.u1_min + i as f64 * step1;
        for j in 0..args.steps {
            let u2 = args.u2_min + j as f64 * step2;
            let u = DMatrix::from_column_slice(2, 1, &[u1, u2]);
            let f = eval_f(inst, &u)?;
            writeln!(w, "{},{},{}", g17(u1), g17(u2), g17(f))?;
        }
    }
    w.flush()?;
    println!(
        "wrote {} ({} rows)",
        args.output.display(),
        args.steps * args.steps
    );
    Ok(CliOutcome::Ok)
}

fn cmd_verify(args: VerifyArgs) -> Result<CliOutcome, Error> {
    let named = load_instance(&args.instance)?;
    let mut all_ok = true;
    let mut check = |name: &str, value: f64, tol: f64| {
        let ok = value <= tol;
        all_ok &= ok;
        println!(
            "{:<28} {} (tolerance {}) [{}]",
            name,
            g17(value),
            g17(tol),
            if ok { "ok" } else { "FAIL" }
        );
    };
    match named.instance.operator() {
        Operator::Identity => {
            println!("identity operator: delta = 0, composition and adjoint hold exactly");
            check("composition_error", 0.0, 1e-10);
            check("adjoint_error", 0.0, 1e-12);
        }
        Operator::Structured(map) => {
            let kernel = map.kernel();
            let n = kernel.n();
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let mut comp_err = 0.0f64;
            let mut adj_err = 0.0f64;
            for _ in 0..args.samples {
                let x = DMatrix::from_fn(n, n, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
                let y = DMatrix::from_fn(n, n, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
                let composed = map.apply_adjoint(&map.apply(&x)?)?;
                comp_err = comp_err.max((&composed - kernel.apply(&x)?).norm());
                adj_err =
                    adj_err.max((map.apply(&x)?.dot(&y) - x.dot(&map.apply_adjoint(&y)?)).abs());
            }
            check("composition_error", comp_err, 1e-10);
            check("adjoint_error", adj_err, 1e-12);
            let b = kernel.b_vec();
            let c = kernel.c_vec();
            check("b_dot_c", b.dot(&c).abs(), 0.0);
            check(
                "delta_vs_dense_norms",
                (kernel.rip_constant() - b.norm() * c.norm()).abs(),
                1e-12,
            );
            if n <= DENSE_VEC_FORM_MAX_N {
                let dense = kernel.dense_vec_form()?;
                let mut numeric = dense.symmetric_eigen().eigenvalues.as_slice().to_vec();
                numeric.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut analytic = kernel.eigenvalues();
                analytic.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let err = numeric
                    .iter()
                    .zip(&analytic)
                    .map(|(u, v)| (u - v).abs())
                    .fold(0.0f64, f64::max);
                check("eigenvalue_error", err, 1e-10);
            } else {
                println!("dense spectrum check skipped (n > {DENSE_VEC_FORM_MAX_N})");
            }
            println!("delta = {}", g17(kernel.rip_constant()));
        }
    }
    if all_ok {
        println!("verify: all checks passed");
        Ok(CliOutcome::Ok)
    } else {
        Err(Error::InvalidParameter(
            "operator verification failed".into(),
        ))
    }
}
