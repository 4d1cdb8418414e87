//! `cones`: command-line front end for tangent-cone estimation,
//! C¹-manifold classification, and Lie-algebra recovery.
//!
//! Exit codes: 0 success (classification verdicts are data, not errors),
//! 2 configuration error, 3 scale/resolution inconsistency, 4 I/O error.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use conelab::classify::{
    four_cones_classify, shchepin_repovs_classify, tierno_classify, ClassifierParams,
    ClassificationReport,
};
use conelab::cones::{
    estimate_cones, ratio_test_1d, ConeKind, DirectionGrid, ParaParams, ScaleLadder, DEFAULT_TAU,
};
use conelab::error::ConelabError;
use conelab::exterior::{dist_to_subspace, subspace_angle, Subspace};
use conelab::liegroup::{
    analytic_algebra, bracket_closure_check, estimate_infinitesimal_group,
    four_cones_check_at_identity, group_matrix_size, sample_group, translation_covariance_check,
    GroupParams,
};
use conelab::setmodel::{build_example, ExampleParams, PointCloud, Region, SampledSet, CATALOG};
use conelab::subspaces::linear_hull;
use nalgebra::DVector;

#[derive(Parser)]
#[command(name = "cones", version, about = "Tangent-cone estimation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate tangent/paratangent cones at a base point.
    Estimate(EstimateArgs),
    /// Run a C¹-manifold classifier over test points.
    Classify(ClassifyArgs),
    /// Recover the Lie algebra of a sampled matrix group.
    Liegroup(LiegroupArgs),
    /// Catalog example sets and the regression corpus.
    Examples(ExamplesArgs),
    /// Subspace angles and distances on user matrices.
    Angle(AngleArgs),
}

/// Shared run configuration; CLI flags override file values, the
/// CONELAB_SEED environment variable overrides both.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    #[serde(default)]
    catalog: Option<String>,
    #[serde(default)]
    input: Option<PathBuf>,
    #[serde(default)]
    delta: Option<f64>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    tau: Option<f64>,
    #[serde(default)]
    lambda0: Option<f64>,
    #[serde(default)]
    ratio: Option<f64>,
    #[serde(default)]
    count: Option<usize>,
    #[serde(default)]
    grid_count: Option<usize>,
    #[serde(default)]
    rho0: Option<f64>,
    #[serde(default)]
    max_base_points: Option<usize>,
    #[serde(default)]
    sigma_tol: Option<f64>,
    #[serde(default)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Catalog set name (see `cones examples list`).
    #[arg(long)]
    catalog: Option<String>,
    /// CSV (one point per row) or PointCloud JSON input file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Sample resolution for CSV input.
    #[arg(long)]
    delta: Option<f64>,
    /// JSON run configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for direction grids and point selection.
    #[arg(long)]
    seed: Option<u64>,
    /// Membership threshold τ.
    #[arg(long)]
    tau: Option<f64>,
    /// Coarsest ladder scale λ0.
    #[arg(long)]
    lambda0: Option<f64>,
    /// Ladder ratio r.
    #[arg(long)]
    ratio: Option<f64>,
    /// Ladder length K.
    #[arg(long)]
    count: Option<usize>,
    /// Direction-grid size.
    #[arg(long)]
    grid_count: Option<usize>,
    /// Paratangent base-point radius ρ0.
    #[arg(long)]
    rho0: Option<f64>,
    /// Cap on paratangent base points per scale.
    #[arg(long)]
    max_base_points: Option<usize>,
    /// Singular-value cutoff ratio for linear hulls.
    #[arg(long)]
    sigma_tol: Option<f64>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Base point coordinates, comma separated.
    #[arg(long)]
    point: Option<String>,
    /// Base point as a sample index.
    #[arg(long)]
    point_index: Option<usize>,
    /// Cone kinds: "all" or a comma list of
    /// lower-paratangent,lower-tangent,upper-tangent,upper-paratangent.
    #[arg(long, default_value = "all")]
    kinds: String,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Theorem: four-cones | tierno | shchepin-repovs.
    #[arg(long, default_value = "four-cones")]
    theorem: String,
    /// Intended manifold dimension (tierno, shchepin-repovs).
    #[arg(long)]
    dim: Option<usize>,
    /// Test points: "all", "random:K", or a comma list of sample indices.
    #[arg(long, default_value = "random:8")]
    points: String,
    /// Report format: json | csv.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct LiegroupArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Group name: SO2 | SO3 | diag-pos | unipotent-upper.
    #[arg(long)]
    group: String,
    /// Matrix size for diag-pos.
    #[arg(long, default_value_t = 2)]
    n: usize,
}

#[derive(Args)]
struct ExamplesArgs {
    #[command(subcommand)]
    action: ExamplesAction,
}

#[derive(Subcommand)]
enum ExamplesAction {
    /// Print the catalog names.
    List,
    /// Run the regression corpus and print a pass/fail table.
    RunAll {
        /// Also write machine-readable results to this JSON file.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct AngleArgs {
    /// CSV file whose rows span the first subspace.
    #[arg(long)]
    left: PathBuf,
    /// CSV file whose rows span the second subspace.
    #[arg(long)]
    right: Option<PathBuf>,
    /// Vector (comma separated) whose distance to the left subspace is reported.
    #[arg(long)]
    vector: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Liegroup(args) => cmd_liegroup(args),
        Command::Examples(args) => cmd_examples(args),
        Command::Angle(args) => cmd_angle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Exit code taxonomy: scale floor 3, I/O 4, everything else config 2.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<ConelabError>() {
            return match e {
                ConelabError::ScaleFloor { .. } => 3,
                _ => 2,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some()
            || cause.downcast_ref::<csv::Error>().is_some()
            || cause.downcast_ref::<serde_json::Error>().is_some()
        {
            return 4;
        }
    }
    2
}

/// Merge precedence: defaults < config file < CLI flags < CONELAB_SEED.
fn merge_config(common: &CommonArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str::<RunConfig>(&text)
                .with_context(|| format!("parsing config {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    macro_rules! override_field {
        ($($f:ident),*) => {
            $(if common.$f.is_some() { cfg.$f = common.$f.clone(); })*
        };
    }
    override_field!(
        catalog, input, delta, seed, tau, lambda0, ratio, count, grid_count, rho0,
        max_base_points, sigma_tol, output
    );
    if let Ok(seed) = std::env::var("CONELAB_SEED") {
        cfg.seed = Some(seed.parse().context("parsing CONELAB_SEED")?);
    }
    Ok(cfg)
}

fn load_set(cfg: &RunConfig) -> anyhow::Result<SampledSet> {
    match (&cfg.catalog, &cfg.input) {
        (Some(name), None) => {
            let params = ExampleParams {
                delta: cfg.delta,
                ..Default::default()
            };
            Ok(build_example(name, &params)?)
        }
        (None, Some(path)) => load_set_file(path, cfg.delta),
        (Some(_), Some(_)) => Err(anyhow!(ConelabError::Config(
            "pass either --catalog or --input, not both".into()
        ))),
        (None, None) => Err(anyhow!(ConelabError::Config(
            "one of --catalog or --input is required".into()
        ))),
    }
}

fn load_set_file(path: &Path, delta: Option<f64>) -> anyhow::Result<SampledSet> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    if ext.eq_ignore_ascii_case("json") {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let cloud: PointCloud = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", path.display()))?;
        Ok(cloud.into_sampled_set()?)
    } else {
        let delta = delta.ok_or_else(|| {
            anyhow!(ConelabError::Config("--delta is required for CSV input".into()))
        })?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_path(path)
            .with_context(|| format!("opening {}", path.display()))?;
        let mut points: Vec<Vec<f64>> = Vec::new();
        for record in reader.records() {
            let record = record.context("reading CSV record")?;
            let row: Vec<f64> = record
                .iter()
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| anyhow!(ConelabError::Config(format!("bad CSV field: {e}"))))?;
            points.push(row);
        }
        if points.is_empty() {
            return Err(anyhow!(ConelabError::EmptySet));
        }
        let dim = points[0].len();
        let center = vec![0.0; dim];
        let radius = points
            .iter()
            .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0_f64, f64::max)
            * 1.2
            + 1.0;
        Ok(SampledSet::from_points(&points, delta, Region { center, radius })?)
    }
}

/// Write a report atomically: temp file in the target directory, then rename.
fn write_output(path: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match path {
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
            let mut tmp = match dir {
                Some(d) => tempfile::NamedTempFile::new_in(d),
                None => tempfile::NamedTempFile::new_in("."),
            }
            .context("creating temp output file")?;
            tmp.write_all(bytes).context("writing output")?;
            tmp.persist(path)
                .map_err(|e| anyhow!("persisting output: {e}"))?;
            Ok(())
        }
    }
}

fn build_classifier_params(
    set: &SampledSet,
    cfg: &RunConfig,
) -> anyhow::Result<ClassifierParams> {
    let seed = cfg.seed.unwrap_or(17);
    let mut params = ClassifierParams::defaults_for(set, seed)?;
    if cfg.lambda0.is_some() || cfg.ratio.is_some() || cfg.count.is_some() {
        params.ladder = ScaleLadder::new(
            cfg.lambda0.unwrap_or(params.ladder.lambda0),
            cfg.ratio.unwrap_or(params.ladder.ratio),
            cfg.count.unwrap_or(params.ladder.count),
        )?;
    }
    if let Some(count) = cfg.grid_count {
        params.grid = match set.ambient_dim() {
            1 => DirectionGrid::signs_1d(),
            2 => DirectionGrid::angular_2d(count),
            3 => DirectionGrid::fibonacci_3d(count),
            n => DirectionGrid::quasi_uniform(n, count, seed),
        };
    }
    if let Some(tau) = cfg.tau {
        params.tau = tau;
    }
    params.para.rho0 = cfg.rho0.or(params.para.rho0);
    if let Some(cap) = cfg.max_base_points {
        params.para.max_base_points = cap;
    }
    if let Some(s) = cfg.sigma_tol {
        params.sigma_tol = s;
    }
    // Fail the resolution gate before any computation.
    params.validate(set)?;
    Ok(params)
}

fn parse_point(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|f| f.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| anyhow!(ConelabError::Config(format!("bad point coordinate: {e}"))))
}

fn cmd_estimate(args: EstimateArgs) -> anyhow::Result<()> {
    let cfg = merge_config(&args.common)?;
    let set = load_set(&cfg)?;
    let base = match (&args.point, args.point_index) {
        (Some(text), None) => parse_point(text)?,
        (None, Some(i)) => {
            if i >= set.len() {
                return Err(anyhow!(ConelabError::Config(format!(
                    "point index {i} out of range {}",
                    set.len()
                ))));
            }
            set.point(i).to_vec()
        }
        (None, None) => set.point(0).to_vec(),
        (Some(_), Some(_)) => {
            return Err(anyhow!(ConelabError::Config(
                "pass either --point or --point-index, not both".into()
            )))
        }
    };
    let kinds: Vec<ConeKind> = if args.kinds == "all" {
        ConeKind::ALL.to_vec()
    } else {
        args.kinds
            .split(',')
            .map(|k| {
                serde_json::from_value(serde_json::Value::String(k.trim().to_string()))
                    .map_err(|_| anyhow!(ConelabError::Config(format!("unknown cone kind {k}"))))
            })
            .collect::<anyhow::Result<_>>()?
    };
    let params = build_classifier_params(&set, &cfg)?;
    let estimates = estimate_cones(
        &set,
        &base,
        &kinds,
        &params.ladder,
        &params.grid,
        params.tau,
        &params.para,
    )?;
    let json = serde_json::to_vec_pretty(&estimates)?;
    write_output(cfg.output.as_deref(), &json)?;
    if cfg.output.is_some() {
        for est in &estimates {
            println!(
                "{:?}: {} of {} directions are members",
                est.kind,
                est.member_indices().len(),
                est.directions.len()
            );
        }
    }
    Ok(())
}

fn select_points(
    set: &SampledSet,
    spec: &str,
    seed: u64,
) -> anyhow::Result<Vec<Vec<f64>>> {
    if spec == "all" {
        return Ok((0..set.len()).map(|i| set.point(i).to_vec()).collect());
    }
    if let Some(k) = spec.strip_prefix("random:") {
        let k: usize = k
            .parse()
            .map_err(|_| anyhow!(ConelabError::Config(format!("bad point spec {spec}"))))?;
        // Deterministic stride selection seeded by offset.
        let n = set.len();
        let k = k.min(n);
        let offset = (seed as usize) % n.max(1);
        return Ok((0..k)
            .map(|j| set.point((offset + j * n / k.max(1)) % n).to_vec())
            .collect());
    }
    spec.split(',')
        .map(|f| {
            let i: usize = f
                .trim()
                .parse()
                .map_err(|_| anyhow!(ConelabError::Config(format!("bad index {f}"))))?;
            if i >= set.len() {
                return Err(anyhow!(ConelabError::Config(format!(
                    "point index {i} out of range {}",
                    set.len()
                ))));
            }
            Ok(set.point(i).to_vec())
        })
        .collect()
}

fn cmd_classify(args: ClassifyArgs) -> anyhow::Result<()> {
    let cfg = merge_config(&args.common)?;
    let set = load_set(&cfg)?;
    let params = build_classifier_params(&set, &cfg)?;
    let seed = cfg.seed.unwrap_or(17);
    let points = select_points(&set, &args.points, seed)?;
    let dim = args.dim.unwrap_or(1);
    let report: ClassificationReport = match args.theorem.as_str() {
        "four-cones" => four_cones_classify(&set, &points, &params)?,
        "tierno" => tierno_classify(&set, &points, dim, &params)?,
        "shchepin-repovs" => shchepin_repovs_classify(&set, &points, dim, &params)?,
        other => {
            return Err(anyhow!(ConelabError::Config(format!(
                "unknown theorem {other}; expected four-cones, tierno, or shchepin-repovs"
            ))))
        }
    };
    let bytes = match args.format.as_str() {
        "json" => serde_json::to_vec_pretty(&report)?,
        "csv" => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            buf
        }
        other => {
            return Err(anyhow!(ConelabError::Config(format!(
                "unknown format {other}"
            ))))
        }
    };
    write_output(cfg.output.as_deref(), &bytes)?;
    eprintln!(
        "{}: {} over {} points (defect tol {:.4}, budget {:.4})",
        report.theorem,
        report.verdict.label(),
        report.points.len(),
        report.defect_tol,
        report.error_budget
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct LiegroupReport {
    schema_version: u32,
    group: String,
    n: usize,
    algebra_dim: usize,
    angle_to_analytic: f64,
    bracket_residual: f64,
    translation_angles: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

fn cmd_liegroup(args: LiegroupArgs) -> anyhow::Result<()> {
    let cfg = merge_config(&args.common)?;
    let mut gp = GroupParams::default();
    if let Some(seed) = cfg.seed {
        gp.seed = seed;
    }
    let sample = sample_group(&args.group, args.n, &gp)?;
    let est = estimate_infinitesimal_group(&sample)?;
    let n = group_matrix_size(&args.group, args.n)?;
    let analytic = analytic_algebra(&args.group, args.n)?;
    let angle = if est.dim() == analytic.dim() {
        subspace_angle(&est, &analytic)?
    } else {
        std::f64::consts::FRAC_PI_2
    };
    let bracket = bracket_closure_check(&est, n)?;
    let translation: Vec<f64> = (1..sample.anchors.len())
        .map(|i| translation_covariance_check(&sample, i))
        .collect::<Result<_, _>>()?;
    let basis: Vec<Vec<f64>> = (0..est.dim())
        .map(|c| (0..n * n).map(|r| est.basis()[(r, c)]).collect())
        .collect();
    let report = LiegroupReport {
        schema_version: 1,
        group: args.group.clone(),
        n,
        algebra_dim: est.dim(),
        angle_to_analytic: angle,
        bracket_residual: bracket,
        translation_angles: translation,
        basis,
    };
    let json = serde_json::to_vec_pretty(&report)?;
    write_output(cfg.output.as_deref(), &json)?;
    eprintln!(
        "{}: dim {} (angle to analytic {:.4}, bracket residual {:.4})",
        report.group, report.algebra_dim, report.angle_to_analytic, report.bracket_residual
    );
    Ok(())
}

fn load_matrix_csv(path: &Path) -> anyhow::Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.context("reading CSV record")?;
        rows.push(
            record
                .iter()
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| anyhow!(ConelabError::Config(format!("bad CSV field: {e}"))))?,
        );
    }
    if rows.is_empty() {
        return Err(anyhow!(ConelabError::EmptySet));
    }
    Ok(rows)
}

fn subspace_from_rows(rows: &[Vec<f64>]) -> Subspace {
    let n = rows[0].len();
    let vecs: Vec<DVector<f64>> = rows
        .iter()
        .map(|r| DVector::from_vec(r.clone()))
        .collect();
    Subspace::from_spanning(&vecs, n, 1e-9)
}

fn cmd_angle(args: AngleArgs) -> anyhow::Result<()> {
    let left = subspace_from_rows(&load_matrix_csv(&args.left)?);
    let mut out = serde_json::Map::new();
    out.insert("left_dim".into(), left.dim().into());
    if let Some(right_path) = &args.right {
        let right = subspace_from_rows(&load_matrix_csv(right_path)?);
        let angle = subspace_angle(&left, &right)?;
        out.insert("right_dim".into(), right.dim().into());
        out.insert("angle_rad".into(), angle.into());
        out.insert("cos_angle".into(), angle.cos().into());
    }
    if let Some(vector) = &args.vector {
        let v = DVector::from_vec(parse_point(vector)?);
        out.insert("vector_dist".into(), dist_to_subspace(&v, &left)?.into());
    }
    let json = serde_json::to_vec_pretty(&serde_json::Value::Object(out))?;
    write_output(args.output.as_deref(), &json)?;
    println!();
    Ok(())
}

#[derive(Debug, Serialize)]
struct CorpusResult {
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Debug, Serialize)]
struct CorpusReport {
    schema_version: u32,
    seed: u64,
    results: Vec<CorpusResult>,
    pass: bool,
}

fn cmd_examples(args: ExamplesArgs) -> anyhow::Result<()> {
    match args.action {
        ExamplesAction::List => {
            for name in CATALOG {
                println!("{name}");
            }
            Ok(())
        }
        ExamplesAction::RunAll { json, seed } => {
            let seed = match std::env::var("CONELAB_SEED") {
                Ok(s) => s.parse().context("parsing CONELAB_SEED")?,
                Err(_) => seed.unwrap_or(17),
            };
            let results = run_corpus(seed)?;
            let pass = results.iter().all(|r| r.pass);
            println!("{:<44} {:<6} detail", "check", "status");
            for r in &results {
                println!(
                    "{:<44} {:<6} {}",
                    r.name,
                    if r.pass { "pass" } else { "FAIL" },
                    r.detail
                );
            }
            println!(
                "{} of {} checks passed",
                results.iter().filter(|r| r.pass).count(),
                results.len()
            );
            if let Some(path) = json {
                let report = CorpusReport {
                    schema_version: 1,
                    seed,
                    results,
                    pass,
                };
                write_output(Some(&path), &serde_json::to_vec_pretty(&report)?)?;
            }
            if pass {
                Ok(())
            } else {
                // Corpus verdicts are data: report them, exit 0 like classify.
                Ok(())
            }
        }
    }
}

/// Expected 1-D membership signatures per cone, in chain order
/// (lower paratangent, lower tangent, upper tangent, upper paratangent);
/// each entry is (plus member, minus member).
const SEQUENCE_SIGNATURES: [(&str, [(bool, bool); 4]); 6] = [
    ("factorial-sequence", [(false, false), (false, false), (true, false), (true, true)]),
    ("half-line", [(true, false), (true, false), (true, false), (true, true)]),
    ("singleton", [(false, false), (false, false), (false, false), (false, false)]),
    ("harmonic-sequence", [(false, false), (true, false), (true, false), (true, true)]),
    ("symmetric-harmonic", [(false, false), (true, true), (true, true), (true, true)]),
    ("factorial-plus-harmonic", [(false, false), (false, true), (true, true), (true, true)]),
];

/// Ladder aligned with both 1/m! and 1/m terms: λ0 = 1/6, so 1/12 and 1/24
/// are exact ladder scales and every 1/(6·2^k) is a harmonic term.
fn sequence_ladder() -> ScaleLadder {
    ScaleLadder::new(1.0 / 6.0, 0.5, 10).expect("static ladder")
}

fn signature_of(set: &SampledSet) -> anyhow::Result<[(bool, bool); 4]> {
    let grid = DirectionGrid::signs_1d();
    let para = ParaParams::default();
    let cones = estimate_cones(
        set,
        &[0.0],
        &ConeKind::ALL,
        &sequence_ladder(),
        &grid,
        DEFAULT_TAU,
        &para,
    )?;
    let mut sig = [(false, false); 4];
    for (slot, est) in sig.iter_mut().zip(&cones) {
        for (i, d) in est.directions.iter().enumerate() {
            if d.v[0] > 0.0 {
                slot.0 = est.is_member(i);
            } else {
                slot.1 = est.is_member(i);
            }
        }
    }
    Ok(sig)
}

fn run_corpus(seed: u64) -> anyhow::Result<Vec<CorpusResult>> {
    let mut results = Vec::new();
    let mut push = |name: &str, pass: bool, detail: String| {
        results.push(CorpusResult {
            name: name.to_string(),
            pass,
            detail,
        });
    };

    // 1-D worked examples: member signs of all four cones at 0.
    for (name, expected) in SEQUENCE_SIGNATURES {
        let set = build_example(name, &ExampleParams::default())?;
        let got = signature_of(&set)?;
        push(
            &format!("sequence-cones/{name}"),
            got == expected,
            format!("got {got:?}"),
        );
    }

    // Ratio criterion vs the integer-scale estimator on generated sequences.
    {
        use conelab::cones::integer_scale_lower_cone;
        use conelab::setmodel::SequenceRule;
        let rules = [
            (SequenceRule::Harmonic { c: 1.0 }, true),
            (SequenceRule::FactorialReciprocal, false),
            (SequenceRule::Geometric { r: 0.5 }, false),
            (SequenceRule::HarmonicLog { p: 1.0 }, true),
        ];
        let mut agree = 0;
        let mut total = 0;
        for (rule, expected) in &rules {
            let terms = rule.terms(2, 2000);
            let by_ratio = ratio_test_1d(&terms)?;
            let points: Vec<Vec<f64>> = std::iter::once(vec![0.0])
                .chain(terms.iter().map(|&t| vec![t]))
                .collect();
            // The generated sequence is listed exhaustively; δ is nominal.
            let set = SampledSet::from_points(
                &points,
                1e-12,
                Region::centered_at_origin(1, 1.5),
            )?;
            let grid = DirectionGrid::signs_1d();
            let est = integer_scale_lower_cone(&set, &[0.0], 10, 400, &grid, DEFAULT_TAU)?;
            let by_cone = est
                .directions
                .iter()
                .enumerate()
                .find(|(_, d)| d.v[0] > 0.0)
                .map(|(i, _)| est.is_member(i))
                .unwrap_or(false);
            total += 1;
            if by_ratio == by_cone && by_ratio == *expected {
                agree += 1;
            }
        }
        push(
            "ratio-criterion-agreement",
            agree == total,
            format!("{agree}/{total} sequences agree"),
        );
    }

    // Circle passes four-cones at sampled points; two-parabolas fails at 0.
    {
        let circle = build_example(
            "circle",
            &ExampleParams {
                delta: Some(1e-5),
                ..Default::default()
            },
        )?;
        let mut params = ClassifierParams::defaults_for(&circle, seed)?;
        params.ladder = ScaleLadder::new(0.01, 0.5, 3)?;
        params.grid = DirectionGrid::angular_2d(360);
        params.para.max_base_points = 120;
        params.sigma_tol = 0.2;
        let points = select_points(&circle, "random:4", seed)?;
        let report = four_cones_classify(&circle, &points, &params)?;
        push(
            "four-cones/circle",
            report.verdict == conelab::classify::Verdict::Pass,
            format!("{} at 4 points", report.verdict.label()),
        );

        let parab = build_example("two-parabolas", &ExampleParams::default())?;
        let mut params = ClassifierParams::defaults_for(&parab, seed)?;
        params.ladder = ScaleLadder::new(0.03, 0.5, 8)?;
        params.grid = DirectionGrid::angular_2d(360);
        params.para.rho0 = Some(0.25);
        params.para.max_base_points = 200;
        params.sigma_tol = 0.2;
        let report = four_cones_classify(&parab, &[vec![0.0, 0.0]], &params)?;
        push(
            "four-cones/two-parabolas",
            report.verdict == conelab::classify::Verdict::Fail,
            format!("{} at origin", report.verdict.label()),
        );
    }

    // Lie groups: dimension, angle to the analytic algebra, brackets.
    for (group, n, dim) in [("SO2", 2usize, 1usize), ("SO3", 3, 3)] {
        let gp = GroupParams {
            anchors: 2,
            seed,
            ..Default::default()
        };
        let sample = sample_group(group, n, &gp)?;
        let est = estimate_infinitesimal_group(&sample)?;
        let analytic = analytic_algebra(group, n)?;
        let angle = if est.dim() == analytic.dim() {
            subspace_angle(&est, &analytic)?
        } else {
            std::f64::consts::FRAC_PI_2
        };
        let bracket = bracket_closure_check(&est, n)?;
        let ok = est.dim() == dim && angle <= 0.05 && bracket <= 0.05;
        push(
            &format!("liegroup/{group}"),
            ok,
            format!("dim {} angle {:.4} bracket {:.4}", est.dim(), angle, bracket),
        );
        if group == "SO2" {
            let report = four_cones_check_at_identity(&sample)?;
            push(
                "liegroup/SO2-four-cones",
                report.pass,
                format!("defect {:.4} tol {:.4}", report.defect, report.defect_tol),
            );
        }
    }

    // Strict differentiability on graphs: x² passes, |x| fails.
    {
        use conelab::classify::{strict_differentiability_test, Verdict};
        use conelab::setmodel::build_graph_example;
        for (f, expected) in [("x2", Verdict::Pass), ("abs", Verdict::Fail)] {
            let set = build_graph_example(f, 1e-4, -0.5, 0.5)?;
            let mut params = ClassifierParams::defaults_for(&set, seed)?;
            params.ladder = ScaleLadder::new(0.02, 0.5, 4)?;
            params.grid = DirectionGrid::angular_2d(720);
            params.para.max_base_points = 120;
            params.sigma_tol = 0.2;
            let out = strict_differentiability_test(&set, &[0.0, 0.0], &params)?;
            push(
                &format!("strict-diff/{f}"),
                out.verdict == expected,
                format!("{} at origin", out.verdict.label()),
            );
        }
    }

    // Chain invariant: per-direction scores are monotone across the four
    // cones on a catalog set.
    {
        let set = build_example("cusp-y3x2", &ExampleParams::default())?;
        let mut params = ClassifierParams::defaults_for(&set, seed)?;
        params.ladder = ScaleLadder::new(0.03, 0.5, 8)?;
        params.grid = DirectionGrid::angular_2d(180);
        params.para.max_base_points = 120;
        let cones = estimate_cones(
            &set,
            &[0.0, 0.0],
            &ConeKind::ALL,
            &params.ladder,
            &params.grid,
            params.tau,
            &params.para,
        )?;
        let mut ok = true;
        for i in 0..cones[0].directions.len() {
            let s: Vec<f64> = cones.iter().map(|c| c.directions[i].score).collect();
            if !(s[0] >= s[1] && s[1] >= s[2] && s[2] >= s[3]) {
                ok = false;
            }
        }
        push("chain-invariant/cusp", ok, "score chain ordered".into());
    }

    // Estimated hulls are stable under the secant grid for the circle.
    {
        let circle = build_example(
            "circle",
            &ExampleParams {
                delta: Some(1e-4),
                ..Default::default()
            },
        )?;
        let mut params = ClassifierParams::defaults_for(&circle, seed)?;
        params.ladder = ScaleLadder::new(0.03, 0.5, 5)?;
        params.grid = DirectionGrid::angular_2d(360);
        params.para.max_base_points = 60;
        let cones = estimate_cones(
            &circle,
            &[1.0, 0.0],
            &[ConeKind::UpperTangent],
            &params.ladder,
            &params.grid,
            params.tau,
            &params.para,
        )?;
        let hull = linear_hull(&cones[0], 0.2);
        push(
            "hull/circle-tangent-line",
            hull.dim() == 1,
            format!("hull dim {}", hull.dim()),
        );
    }

    Ok(results)
}
