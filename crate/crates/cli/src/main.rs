//! Command-line pipeline: coarsen complexes and meshes, evaluate spectral
//! approximation metrics, compute and lift spectral distances, generate the
//! synthetic dataset, report Betti numbers and collect timing data.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 partial success
//! (reduction ratio unreachable), 4 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use hodge_coarsen::coarsen::{
    coarsen, random_collapse, resolve_targets, target_laplacian, CoarsenConfig, CoarsenResult,
    FamilyKind, LaplacianSpec, RatioBasis, StopRule, TargetSpec, WeightSource,
};
use hodge_coarsen::error::Error;
use hodge_coarsen::io as hcio;
use hodge_coarsen::metrics::{
    distance_error, evaluate_metrics, lift_distances, max_degree_vertex, spectral_distance,
    vertex_correspondence, DistanceKind, DistanceParams, MetricsInput, MetricsReport,
};
use hodge_coarsen::numkernel::eigh;
use hodge_coarsen::operators::LaplacianVariant;
use hodge_coarsen::simplicial::{betti_numbers_gf2, SimplicialComplex};
use hodge_coarsen::synth::{generate_dataset, SynthSpec};

const EXIT_CONFIG: u8 = 2;
const EXIT_PARTIAL: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidSimplex(_)
        | Error::InvalidComplex(_)
        | Error::DimensionOutOfRange { .. }
        | Error::UnknownVertex(_)
        | Error::InvalidConfig(_)
        | Error::NoCandidates
        | Error::SamplingExhausted
        | Error::Parse { .. }
        | Error::UnknownVersion(_)
        | Error::Io(_)
        | Error::Json(_) => EXIT_CONFIG,
        Error::DegenerateFace { .. }
        | Error::NotSymmetric(_)
        | Error::Indefinite(_)
        | Error::TooLargeForDense(..)
        | Error::DimensionMismatch(_)
        | Error::RankDeficient(_)
        | Error::ZeroRow(_)
        | Error::ZeroColumn(_) => EXIT_NUMERICAL,
    }
}

#[derive(Parser)]
#[command(
    name = "hodge-coarsen",
    about = "Spectrum-preserving coarsening of simplicial complexes and meshes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coarsen a complex while preserving chosen spectral bands.
    Coarsen(RunFlags),
    /// Evaluate spectral approximation metrics of a coarsening.
    Evaluate(EvaluateArgs),
    /// Compute spectral distances on the coarse complex and lift them back.
    Distances(DistancesArgs),
    /// Generate the synthetic multi-holed dataset.
    Generate(GenerateArgs),
    /// Print GF(2) Betti numbers of one or more complexes.
    Betti(BettiArgs),
    /// Run a coarsening and record per-level timing data.
    Bench(BenchArgs),
}

/// Flags shared by every coarsening-style run. Values left unset fall back to
/// the `--config` file, then to defaults.
#[derive(Args, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct RunFlags {
    /// Input complex (.json) or mesh (.off).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Target band spec `kind:k:variant:lo..hi`, e.g. `hodge:1:sym:0..30`
    /// or `cotan:0:sym:0..100`. Repeatable.
    #[arg(long = "target")]
    #[serde(rename = "targets")]
    targets: Vec<String>,
    /// Fraction of entities to remove, in [0, 1].
    #[arg(long)]
    ratio: Option<f64>,
    /// What the ratio counts: simplices or vertices.
    #[arg(long)]
    basis: Option<String>,
    /// Candidate family kind: edges, faces or closed-star.
    #[arg(long)]
    families: Option<String>,
    /// Fraction of candidates re-scored per level.
    #[arg(long)]
    eta: Option<f64>,
    /// Search the edge-collapse interpolation parameter on meshes.
    #[arg(long)]
    #[serde(rename = "optimize_alpha")]
    optimize_alpha: bool,
    /// Keep harmonic eigenvectors by shifting eigenvalues by one.
    #[arg(long)]
    #[serde(rename = "no_harmonic_shift")]
    no_harmonic_shift: bool,
    /// RNG seed; identical seeds reproduce identical outputs.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with the same fields; explicit flags win.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

impl RunFlags {
    fn merged(mut self) -> Result<RunFlags, Error> {
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)?;
            let file: RunFlags = serde_json::from_str(&text)?;
            self.input = self.input.or(file.input);
            if self.targets.is_empty() {
                self.targets = file.targets;
            }
            self.ratio = self.ratio.or(file.ratio);
            self.basis = self.basis.or(file.basis);
            self.families = self.families.or(file.families);
            self.eta = self.eta.or(file.eta);
            self.optimize_alpha = self.optimize_alpha || file.optimize_alpha;
            self.no_harmonic_shift = self.no_harmonic_shift || file.no_harmonic_shift;
            self.seed = self.seed.or(file.seed);
            self.out = self.out.or(file.out);
        }
        Ok(self)
    }

    fn input(&self) -> Result<&Path, Error> {
        self.input.as_deref().ok_or_else(|| Error::InvalidConfig("--input is required".into()))
    }

    fn out(&self) -> Result<&Path, Error> {
        self.out.as_deref().ok_or_else(|| Error::InvalidConfig("--out is required".into()))
    }

    fn coarsen_config(&self) -> Result<CoarsenConfig, Error> {
        let basis = match self.basis.as_deref().unwrap_or("simplices") {
            "simplices" => RatioBasis::Simplices,
            "vertices" => RatioBasis::Vertices,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown ratio basis {other:?} (simplices|vertices)"
                )))
            }
        };
        let family_kind = match self.families.as_deref().unwrap_or("edges") {
            "edges" => FamilyKind::Edges,
            "faces" => FamilyKind::Faces,
            "closed-star" | "closed_star" => FamilyKind::ClosedStar,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown family kind {other:?} (edges|faces|closed-star)"
                )))
            }
        };
        Ok(CoarsenConfig {
            ratio: self.ratio.unwrap_or(0.5),
            basis,
            family_kind,
            combination_weights: None,
            refresh_fraction: self.eta.unwrap_or(0.1),
            optimize_alpha: self.optimize_alpha,
            seed: self.seed.unwrap_or(0),
        })
    }

    fn target_specs(&self) -> Result<Vec<TargetSpec>, Error> {
        if self.targets.is_empty() {
            return Err(Error::InvalidConfig("at least one --target is required".into()));
        }
        self.targets.iter().map(|t| parse_target(t, !self.no_harmonic_shift)).collect()
    }
}

/// Parses `kind:k:variant:lo..hi`.
fn parse_target(text: &str, harmonic_shift: bool) -> Result<TargetSpec, Error> {
    let bad = |msg: &str| Error::InvalidConfig(format!("target {text:?}: {msg}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 4 {
        return Err(bad("expected kind:k:variant:lo..hi"));
    }
    let weights = match parts[0] {
        "hodge" => WeightSource::Unit,
        "cotan" => WeightSource::Cotan,
        other => return Err(bad(&format!("unknown kind {other:?} (hodge|cotan)"))),
    };
    let k: usize = parts[1].parse().map_err(|_| bad("bad dimension"))?;
    if weights == WeightSource::Cotan && k != 0 {
        return Err(bad("cotan targets live on vertices (k = 0)"));
    }
    let variant = match parts[2] {
        "rw" | "random_walk" => LaplacianVariant::RandomWalk,
        "sym" | "symmetric" => LaplacianVariant::Symmetric,
        "unw" | "unweighted" => LaplacianVariant::Unweighted,
        other => return Err(bad(&format!("unknown variant {other:?} (rw|sym|unw)"))),
    };
    let (lo_text, hi_text) =
        parts[3].split_once("..").ok_or_else(|| bad("band must be lo..hi"))?;
    let lo: usize = lo_text.parse().map_err(|_| bad("bad band start"))?;
    let hi: usize = hi_text.parse().map_err(|_| bad("bad band end"))?;
    if hi <= lo {
        return Err(bad("band end must exceed band start"));
    }
    Ok(TargetSpec { laplacian: LaplacianSpec { k, variant, weights }, band: (lo, hi), harmonic_shift })
}

fn load_complex(path: &Path) -> Result<SimplicialComplex, Error> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("off") | Some("OFF") => hcio::read_off(path),
        _ => hcio::read_complex_json(path),
    }
}

fn write_coarsen_outputs(out: &Path, result: &CoarsenResult) -> Result<(), Error> {
    fs::create_dir_all(out)?;
    hcio::write_complex_json(&out.join("coarse.json"), &result.complex)?;
    if result.complex.positions().is_some() && result.complex.dim() >= 2 {
        hcio::write_off(&out.join("coarse.off"), &result.complex)?;
    }
    for (k, map) in result.maps.iter().enumerate() {
        hcio::write_matrix_triplets(&out.join(format!("p_{k}.csv")), map)?;
    }
    hcio::write_level_log(&out.join("levels.jsonl"), &result.levels)?;
    Ok(())
}

fn cmd_coarsen(flags: RunFlags) -> Result<u8, Error> {
    let flags = flags.merged()?;
    let complex = load_complex(flags.input()?)?;
    let specs = flags.target_specs()?;
    let config = flags.coarsen_config()?;
    let targets = resolve_targets(&complex, &specs)?;
    let result = coarsen(&complex, targets, config)?;
    write_coarsen_outputs(flags.out()?, &result)?;
    println!(
        "coarsened {} -> {} simplices over {} levels ({} vertices left)",
        complex.total_simplices(),
        result.complex.total_simplices(),
        result.levels.len(),
        result.complex.num_vertices()
    );
    if result.ratio_reached {
        Ok(0)
    } else {
        eprintln!("warning: candidates exhausted before the requested ratio");
        Ok(EXIT_PARTIAL)
    }
}

/// Metric evaluation of one target on a (fine, coarse, maps) triple.
fn evaluate_target(
    fine: &SimplicialComplex,
    coarse: &SimplicialComplex,
    maps: &[hodge_coarsen::numkernel::CooMatrix],
    spec: &TargetSpec,
) -> Result<MetricsReport, Error> {
    let k = spec.laplacian.k;
    let map = maps
        .get(k)
        .ok_or_else(|| Error::DimensionMismatch(format!("no coarsening map for dimension {k}")))?;
    let fine_spec = eigh(&target_laplacian(fine, &spec.laplacian)?.to_dense())?;
    let coarse_spec = eigh(&target_laplacian(coarse, &spec.laplacian)?.to_dense())?;
    evaluate_metrics(&MetricsInput {
        fine,
        coarse,
        fine_spectrum: &fine_spec,
        coarse_spectrum: &coarse_spec,
        map,
        k,
        band: spec.band,
    })
}

fn read_maps(
    dir: &Path,
    fine: &SimplicialComplex,
    coarse: &SimplicialComplex,
) -> Result<Vec<hodge_coarsen::numkernel::CooMatrix>, Error> {
    (0..=fine.dim())
        .map(|k| {
            let path = dir.join(format!("p_{k}.csv"));
            hcio::read_matrix_triplets(&path, coarse.num_simplices(k), fine.num_simplices(k))
        })
        .collect()
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    run: RunFlags,
    /// Coarse complex produced by `coarsen`.
    #[arg(long)]
    coarse: PathBuf,
    /// Directory holding the `p_<k>.csv` coarsening matrices.
    #[arg(long)]
    maps: PathBuf,
    /// Also evaluate a random collapse of equal reduction with this seed and
    /// emit a comparison table.
    #[arg(long)]
    against_random: Option<u64>,
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<u8, Error> {
    let flags = args.run.merged()?;
    let fine = load_complex(flags.input()?)?;
    let coarse = load_complex(&args.coarse)?;
    let specs = flags.target_specs()?;
    let out = flags.out()?;
    fs::create_dir_all(out)?;
    let maps = read_maps(&args.maps, &fine, &coarse)?;

    let mut reports = Vec::new();
    for spec in &specs {
        let report = evaluate_target(&fine, &coarse, &maps, spec)?;
        // Figure data: fine and coarse eigenvalue curves plus the matched
        // functional-map block of the band.
        let k = spec.laplacian.k;
        let fine_spec = eigh(&target_laplacian(&fine, &spec.laplacian)?.to_dense())?;
        let coarse_spec = eigh(&target_laplacian(&coarse, &spec.laplacian)?.to_dense())?;
        let n = fine_spec.len().max(coarse_spec.len());
        let mut curves = hodge_coarsen::DMatrix::zeros(n, 2);
        for (i, &v) in fine_spec.eigenvalues.iter().enumerate() {
            curves[(i, 0)] = v;
        }
        for (i, &v) in coarse_spec.eigenvalues.iter().enumerate() {
            curves[(i, 1)] = v;
        }
        hcio::write_dense_csv(&out.join(format!("eigenvalues_{k}.csv")), &curves)?;
        let (lo, hi) = report.band;
        if hi > lo {
            let block = hodge_coarsen::metrics::matched_functional_map_block(
                &fine_spec,
                &coarse_spec,
                &maps[k],
                (lo, hi),
            )?;
            hcio::write_dense_csv(&out.join(format!("block_{k}_{lo}_{hi}.csv")), &block)?;
        }
        reports.push(report);
    }
    hcio::write_reports(&out.join("report.json"), &out.join("report.csv"), &reports)?;

    if let Some(seed) = args.against_random {
        let random =
            random_collapse(&fine, StopRule::TotalSimplices(coarse.total_simplices()), seed)?;
        let mut rows = vec![format!("method,{}", hcio::REPORT_CSV_HEADER)];
        for (spec, ours) in specs.iter().zip(&reports) {
            rows.push(format!("ours,{}", hcio::report_csv_row(ours)));
            let theirs = evaluate_target(&fine, &random.complex, &random.maps, spec)?;
            rows.push(format!("random,{}", hcio::report_csv_row(&theirs)));
        }
        fs::write(out.join("comparison.csv"), rows.join("\n") + "\n")?;
    }

    for r in &reports {
        println!(
            "k={} band={}..{}: l_comm={:.4} pi_orth={:.4} c_orth={:.4} subsp={:.4} theta={:.4} lambda={:.4} e_beta={}",
            r.k, r.band.0, r.band.1, r.l_comm, r.pi_orth, r.c_orth, r.subsp, r.theta, r.lambda_err, r.e_beta
        );
    }
    Ok(0)
}

#[derive(Args)]
struct DistancesArgs {
    #[command(flatten)]
    run: RunFlags,
    /// Coarse complex produced by `coarsen`.
    #[arg(long)]
    coarse: PathBuf,
    /// Directory holding the `p_<k>.csv` coarsening matrices.
    #[arg(long)]
    maps: PathBuf,
    /// Comma-separated distance kinds:
    /// diffusion,biharmonic,commute,wks,hks.
    #[arg(long, default_value = "diffusion,biharmonic,commute,wks,hks")]
    kinds: String,
    /// Diffusion / heat-kernel time.
    #[arg(long, default_value_t = 0.1)]
    time: f64,
    /// WKS Gaussian variance.
    #[arg(long, default_value_t = 1.0)]
    wks_variance: f64,
    /// WKS log-energy range `min,max`.
    #[arg(long, default_value = "-4,4")]
    wks_range: String,
    /// WKS sample count.
    #[arg(long, default_value_t = 64)]
    wks_samples: usize,
}

fn parse_kind(text: &str) -> Result<DistanceKind, Error> {
    match text {
        "diffusion" => Ok(DistanceKind::Diffusion),
        "biharmonic" => Ok(DistanceKind::Biharmonic),
        "commute" => Ok(DistanceKind::Commute),
        "wks" => Ok(DistanceKind::Wks),
        "hks" => Ok(DistanceKind::Hks),
        other => Err(Error::InvalidConfig(format!("unknown distance kind {other:?}"))),
    }
}

/// Vertex-Laplacian spectrum used for distances: the mass-normalized cotan
/// system on meshes, the unit-weight Laplacian otherwise.
fn distance_spectrum(
    complex: &SimplicialComplex,
) -> Result<hodge_coarsen::numkernel::Spectrum, Error> {
    let weights = if complex.positions().is_some() && complex.dim() == 2 {
        WeightSource::Cotan
    } else {
        WeightSource::Unit
    };
    let spec = LaplacianSpec { k: 0, variant: LaplacianVariant::Symmetric, weights };
    eigh(&target_laplacian(complex, &spec)?.to_dense())
}

fn cmd_distances(args: DistancesArgs) -> Result<u8, Error> {
    let flags = args.run.merged()?;
    let fine = load_complex(flags.input()?)?;
    let coarse = load_complex(&args.coarse)?;
    let out = flags.out()?;
    fs::create_dir_all(out)?;
    let maps = read_maps(&args.maps, &fine, &coarse)?;
    let p0 = &maps[0];

    let kinds: Vec<DistanceKind> =
        args.kinds.split(',').map(|k| parse_kind(k.trim())).collect::<Result<_, _>>()?;
    let (wlo, whi) = args
        .wks_range
        .split_once(',')
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
        .ok_or_else(|| Error::InvalidConfig("wks range must be min,max".into()))?;

    let fine_spectrum = distance_spectrum(&fine)?;
    let coarse_spectrum = distance_spectrum(&coarse)?;
    let source = max_degree_vertex(&fine);
    let coarse_source = vertex_correspondence(p0)?[source];

    let mut error_rows = vec!["kind,source,error".to_string()];
    for kind in kinds {
        let params = DistanceParams {
            kind,
            time: args.time,
            wks_variance: args.wks_variance,
            wks_energy_range: (wlo, whi),
            wks_samples: args.wks_samples,
        };
        let reference: Vec<f64> = (0..fine.num_vertices())
            .map(|v| spectral_distance(&fine_spectrum, &params, source, v))
            .collect::<Result<_, _>>()?;
        let coarse_vals: Vec<f64> = (0..coarse.num_vertices())
            .map(|v| spectral_distance(&coarse_spectrum, &params, coarse_source, v))
            .collect::<Result<_, _>>()?;
        let lifted = lift_distances(&coarse_vals, p0)?;
        let err = distance_error(&reference, &lifted)?;

        let name = format!("{kind:?}").to_lowercase();
        let col = |vals: &[f64]| {
            hodge_coarsen::DMatrix::from_column_slice(vals.len(), 1, vals)
        };
        hcio::write_dense_csv(&out.join(format!("reference_{name}.csv")), &col(&reference))?;
        hcio::write_dense_csv(&out.join(format!("coarse_{name}.csv")), &col(&coarse_vals))?;
        hcio::write_dense_csv(&out.join(format!("lifted_{name}.csv")), &col(&lifted))?;
        error_rows.push(format!("{name},{source},{err:.17e}"));
        println!("{name}: lift error {err:.6e}");
    }
    fs::write(out.join("errors.csv"), error_rows.join("\n") + "\n")?;
    Ok(0)
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of complexes.
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 70)]
    points: usize,
    #[arg(long, default_value_t = 2)]
    holes: usize,
    #[arg(long, default_value = "0.16,0.22")]
    hole_radius: String,
    #[arg(long, default_value_t = 0.18)]
    rips_radius: f64,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(serde::Serialize)]
struct ManifestEntry {
    path: String,
    seed: u64,
    betti: Vec<usize>,
    simplices: usize,
}

#[derive(serde::Serialize)]
struct Manifest {
    template: SynthSpec,
    count: usize,
    base_seed: u64,
    /// Fraction of complexes with nontrivial first homology.
    beta1_coverage: f64,
    entries: Vec<ManifestEntry>,
}

fn cmd_generate(args: GenerateArgs) -> Result<u8, Error> {
    let (rlo, rhi) = args
        .hole_radius
        .split_once(',')
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
        .ok_or_else(|| Error::InvalidConfig("hole radius must be min,max".into()))?;
    let template = SynthSpec {
        n_points: args.points,
        n_holes: args.holes,
        domain: (1.0, 1.0),
        hole_radius: (rlo, rhi),
        rips_radius: args.rips_radius,
        max_dim: args.max_dim,
        seed: args.seed,
    };
    fs::create_dir_all(&args.out)?;
    let dataset = generate_dataset(args.count, &template, args.seed)?;
    let mut entries = Vec::with_capacity(dataset.len());
    let mut with_b1 = 0usize;
    for (i, entry) in dataset.iter().enumerate() {
        let name = format!("complex_{i:03}.json");
        hcio::write_complex_json(&args.out.join(&name), &entry.complex)?;
        if entry.betti.get(1).copied().unwrap_or(0) > 0 {
            with_b1 += 1;
        }
        entries.push(ManifestEntry {
            path: name,
            seed: entry.spec.seed,
            betti: entry.betti.clone(),
            simplices: entry.complex.total_simplices(),
        });
    }
    let manifest = Manifest {
        template,
        count: args.count,
        base_seed: args.seed,
        beta1_coverage: with_b1 as f64 / args.count.max(1) as f64,
        entries,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(args.out.join("manifest.json"), text)?;
    println!("wrote {} complexes, beta1 coverage {:.2}", args.count, manifest.beta1_coverage);
    Ok(0)
}

#[derive(Args)]
struct BettiArgs {
    /// Complex or mesh files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

fn cmd_betti(args: BettiArgs) -> Result<u8, Error> {
    let many = args.inputs.len() > 1;
    for path in &args.inputs {
        let complex = load_complex(path)?;
        let betti = betti_numbers_gf2(&complex);
        let rendered =
            betti.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" ");
        if many {
            println!("{}: {rendered}", path.display());
        } else {
            println!("{rendered}");
        }
    }
    Ok(0)
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    run: RunFlags,
}

fn cmd_bench(args: BenchArgs) -> Result<u8, Error> {
    let flags = args.run.merged()?;
    let complex = load_complex(flags.input()?)?;
    let specs = flags.target_specs()?;
    let config = flags.coarsen_config()?;
    let targets = resolve_targets(&complex, &specs)?;
    let result = coarsen(&complex, targets, config)?;
    let out = flags.out()?;
    fs::create_dir_all(out)?;
    let mut rows = vec!["level,cost_eval_ns,contract_ns,refreshed".to_string()];
    for t in &result.timings {
        rows.push(format!("{},{},{},{}", t.level, t.cost_eval_nanos, t.contract_nanos, t.refreshed));
    }
    fs::write(out.join("timings.csv"), rows.join("\n") + "\n")?;
    let total_refreshed: usize = result.timings.iter().map(|t| t.refreshed).sum();
    println!(
        "{} levels, {} cost evaluations total",
        result.levels.len(),
        total_refreshed
    );
    if result.ratio_reached {
        Ok(0)
    } else {
        Ok(EXIT_PARTIAL)
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Coarsen(flags) => cmd_coarsen(flags),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Distances(args) => cmd_distances(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Betti(args) => cmd_betti(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
