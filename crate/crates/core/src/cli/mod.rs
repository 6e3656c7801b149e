//! Batch workflows behind the `morphkit` binary.
//!
//! Every subcommand reads and writes plain files; identical inputs and flags
//! give byte-identical outputs. Exit codes: 0 success, 1 usage error, 2 data
//! error.

mod demo;

pub use demo::{run_demo, synthetic_face, DemoOptions, DemoSummary, SyntheticFace, DEMO_LANDMARKS};

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::imaging::{write_image, ImageFormat};
use crate::latent::{latent_morph, read_latents, LatentVector, LinearTestBackend};
use crate::metrics::{
    assemble_scenario, emit_report, evaluate, read_report_csv, MmpmrRule, ReportEntry,
    ReportFormat, ScenarioConfig, ScenarioMode, DEFAULT_TARGET_FMR,
};
use crate::morph::{batch_morph, read_pair_list, write_pair_list, BatchOptions, LandmarkScheme, RowStatus};
use crate::protocol::{
    generate_pairs, import_external_protocol, load_manifest, to_pair_list, validate_paths,
    PairConstraints,
};
use crate::scoring::{
    load_embeddings, load_pairing, load_references, load_scores, score_comparisons, write_scores,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

/// File names written by `evaluate`, `report` and `demo`.
pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_TXT: &str = "report.txt";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

macro_rules! data_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Data(e.to_string())
            }
        }
    )*};
}

data_error!(
    std::io::Error,
    crate::imaging::ImagingError,
    crate::morph::MorphError,
    crate::latent::LatentError,
    crate::protocol::ProtocolError,
    crate::scoring::ScoringError,
    crate::metrics::MetricsError
);

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "morphkit", version, about = "Face morph generation and morphing-attack vulnerability evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select morph pairs from a subject manifest.
    Pairs(PairsArgs),
    /// Generate landmark-based morphs for every row of a pair list.
    Morph(MorphArgs),
    /// Synthesize a morph from two latent codes.
    LatentMorph(LatentMorphArgs),
    /// Score comparisons from precomputed embeddings.
    Score(ScoreArgs),
    /// Compute threshold, FMR, FNMR and MMPMR for one or both scenarios.
    Evaluate(EvaluateArgs),
    /// Merge report CSVs into one table.
    Report(ReportArgs),
    /// Run the whole pipeline on synthetic data.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
pub struct PairsArgs {
    /// Subject manifest: subject_id,image_id,gender,ethnicity,glasses,image_path,landmarks_path.
    #[arg(long)]
    pub manifest: PathBuf,
    /// External pair protocol (image_id_a,image_id_b); replaces constraint-based selection.
    #[arg(long)]
    pub protocol: Option<PathBuf>,
    /// Pair every eligible image combination instead of one image per subject.
    #[arg(long, default_value_t = false)]
    pub all_images: bool,
    /// Fail if an image or landmark file named in the manifest is missing.
    #[arg(long, default_value_t = false)]
    pub check_files: bool,
    /// Output pair list.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MorphArgs {
    /// Pair list: id_a,image_a,landmarks_a,id_b,image_b,landmarks_b.
    #[arg(long)]
    pub pairs: PathBuf,
    /// Blend weight of the first contributor.
    #[arg(long, default_value_t = crate::morph::DEFAULT_ALPHA, value_parser = parse_alpha)]
    pub alpha: f64,
    /// Output directory for morph images and manifest.csv.
    #[arg(long)]
    pub out: PathBuf,
    /// Pairs morphed in parallel.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
    /// Landmark layout: 68, 189 or custom-K. Without it any count is accepted if both sides agree.
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<LandmarkScheme>,
}

#[derive(Debug, Args)]
pub struct LatentMorphArgs {
    /// File holding the first latent code (space_tag,v0,v1,...).
    #[arg(long)]
    pub latent_a: PathBuf,
    /// File holding the second latent code.
    #[arg(long)]
    pub latent_b: PathBuf,
    /// Blend weight of the first code.
    #[arg(long, default_value_t = crate::morph::DEFAULT_ALPHA, value_parser = parse_alpha)]
    pub alpha: f64,
    /// Output image (.png or .ppm).
    #[arg(long)]
    pub out: PathBuf,
    /// Width of the built-in linear test generator.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..=4096))]
    pub width: u32,
    /// Height of the built-in linear test generator.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..=4096))]
    pub height: u32,
    /// Seed of the built-in linear test generator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Embeddings: image_id,model_tag,v0,v1,...
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Enrollment list: reference_id,image_id.
    #[arg(long)]
    pub enrollment: PathBuf,
    /// Comparisons: label,reference_id,probe_id,morph_id,contrib_subject.
    #[arg(long)]
    pub pairing: PathBuf,
    /// Output scores CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Clone)]
pub struct EvalTags {
    /// Morph generation tool label.
    #[arg(long, default_value = "unknown")]
    pub tool: String,
    /// Face recognition system label.
    #[arg(long, default_value = "unknown")]
    pub model: String,
    /// Dataset label.
    #[arg(long, default_value = "unknown")]
    pub dataset: String,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Scores with morphs enrolled as references.
    #[arg(long)]
    pub refs_scores: Option<PathBuf>,
    /// Scores with morphs presented as probes.
    #[arg(long)]
    pub probes_scores: Option<PathBuf>,
    /// Operating point on the bona fide impostor scores.
    #[arg(long, default_value_t = DEFAULT_TARGET_FMR, value_parser = parse_target)]
    pub target_fmr: f64,
    /// Per-morph acceptance rule: min (all contributors matched) or any.
    #[arg(long, default_value_t = MmpmrRule::Min, value_parser = parse_rule)]
    pub rule: MmpmrRule,
    #[command(flatten)]
    pub tags: EvalTags,
    /// Output directory for report.csv and report.txt.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Report CSVs written by `evaluate`.
    #[arg(long, required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// Operating point named in the table title.
    #[arg(long, default_value_t = DEFAULT_TARGET_FMR, value_parser = parse_target)]
    pub target_fmr: f64,
    /// Rule named in the table title.
    #[arg(long, default_value_t = MmpmrRule::Min, value_parser = parse_rule)]
    pub rule: MmpmrRule,
    /// Output directory for report.csv and report.txt.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// Output directory for the synthetic dataset and all pipeline artifacts.
    #[arg(long)]
    pub out: PathBuf,
    /// Seed for every random choice in the synthetic data.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Synthetic subjects.
    #[arg(long, default_value_t = 24, value_parser = clap::value_parser!(u32).range(2..=500))]
    pub subjects: u32,
    /// Images per subject.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(2..=20))]
    pub images: u32,
    /// Pairs morphed in parallel.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
    #[arg(long, default_value_t = DEFAULT_TARGET_FMR, value_parser = parse_target)]
    pub target_fmr: f64,
    #[arg(long, default_value_t = MmpmrRule::Min, value_parser = parse_rule)]
    pub rule: MmpmrRule,
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("alpha must lie in [0, 1], got {v}"))
    }
}

fn parse_target(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("target FMR must lie in (0, 1), got {v}"))
    }
}

fn parse_rule(s: &str) -> std::result::Result<MmpmrRule, String> {
    s.parse().map_err(|e: crate::metrics::MetricsError| e.to_string())
}

fn parse_scheme(s: &str) -> std::result::Result<LandmarkScheme, String> {
    s.parse().map_err(|e: crate::morph::MorphError| e.to_string())
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code; messages go to stdout/stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Pairs(a) => cmd_pairs(a).map(|_| ()),
        Command::Morph(a) => cmd_morph(a).map(|_| ()),
        Command::LatentMorph(a) => cmd_latent_morph(a),
        Command::Score(a) => cmd_score(a).map(|_| ()),
        Command::Evaluate(a) => {
            let entries = cmd_evaluate(a)?;
            print!("{}", emit_report(&entries, ReportFormat::Text));
            Ok(())
        }
        Command::Report(a) => {
            let entries = cmd_report(a)?;
            print!("{}", emit_report(&entries, ReportFormat::Text));
            Ok(())
        }
        Command::Demo(a) => {
            let summary = run_demo(&DemoOptions {
                out: a.out.clone(),
                seed: a.seed,
                subjects: a.subjects as usize,
                images_per_subject: a.images as usize,
                jobs: a.jobs as usize,
                target_fmr: a.target_fmr,
                rule: a.rule,
            })?;
            print!("{}", summary.report_text);
            Ok(())
        }
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(p) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(p)?;
    }
    Ok(())
}

/// `path` relative to `base` when it lies under it, so pair lists stay
/// valid when their directory moves.
fn relative_to(path: &Path, base: &Path) -> PathBuf {
    if base.as_os_str().is_empty() {
        return path.to_path_buf();
    }
    path.strip_prefix(base).map(Path::to_path_buf).unwrap_or_else(|_| path.to_path_buf())
}

/// Writes the pair list and returns the number of pairs.
pub fn cmd_pairs(args: &PairsArgs) -> Result<usize> {
    let records = load_manifest(&args.manifest)?;
    if args.check_files {
        validate_paths(&records)?;
    }
    let pairs = match &args.protocol {
        Some(p) => import_external_protocol(p, &records)?,
        None => generate_pairs(
            &records,
            PairConstraints {
                all_image_combinations: args.all_images,
            },
        ),
    };
    if pairs.is_empty() {
        log::warn!("no eligible pairs in {}", args.manifest.display());
    }
    ensure_parent(&args.out)?;
    let base = args.out.parent().unwrap_or(Path::new(""));
    let rows: Vec<_> = to_pair_list(&pairs)
        .into_iter()
        .map(|mut r| {
            for p in [&mut r.image_a, &mut r.landmarks_a, &mut r.image_b, &mut r.landmarks_b] {
                *p = relative_to(p, base);
            }
            r
        })
        .collect();
    write_pair_list(&args.out, &rows)?;
    Ok(pairs.len())
}

/// Morphs every pair; returns `(ok, failed)` row counts. Failed pairs are
/// reported in the manifest and as a warning, not as an error.
pub fn cmd_morph(args: &MorphArgs) -> Result<(usize, usize)> {
    let pairs = read_pair_list(&args.pairs)?;
    let rows = batch_morph(
        &pairs,
        &args.out,
        &BatchOptions {
            alpha: args.alpha,
            jobs: args.jobs as usize,
            scheme: args.scheme,
        },
    )?;
    let failed = rows.iter().filter(|r| r.status == RowStatus::Error).count();
    if failed > 0 {
        log::warn!("{failed} of {} pairs failed; see {}", rows.len(), crate::morph::MANIFEST_FILE);
    }
    Ok((rows.len() - failed, failed))
}

fn single_latent(path: &Path) -> Result<LatentVector> {
    let mut v = read_latents(path)?;
    if v.len() != 1 {
        return Err(CliError::Data(format!(
            "{}: expected exactly one latent code, found {}",
            path.display(),
            v.len()
        )));
    }
    Ok(v.remove(0))
}

pub fn cmd_latent_morph(args: &LatentMorphArgs) -> Result<()> {
    let wa = single_latent(&args.latent_a)?;
    let wb = single_latent(&args.latent_b)?;
    let format = ImageFormat::from_path(&args.out).ok_or_else(|| {
        CliError::Usage(format!("{}: output must end in .png or .ppm", args.out.display()))
    })?;
    let backend = LinearTestBackend::new(
        args.width as usize,
        args.height as usize,
        wa.space_tag(),
        args.seed,
    )?;
    let img = latent_morph(&backend, &wa, &wb, args.alpha)?;
    ensure_parent(&args.out)?;
    write_image(&img, &args.out, format)?;
    Ok(())
}

/// Scores every pairing row; returns the number of rows written.
pub fn cmd_score(args: &ScoreArgs) -> Result<usize> {
    let embeddings = load_embeddings(&args.embeddings)?;
    let references = load_references(&args.enrollment, &embeddings)?;
    let pairing = load_pairing(&args.pairing)?;
    let rows = score_comparisons(&references, &embeddings, &pairing)?;
    ensure_parent(&args.out)?;
    write_scores(&args.out, &rows)?;
    Ok(rows.len())
}

/// Evaluates one scored scenario into a report entry.
pub fn evaluate_scores(
    scores: &Path,
    mode: ScenarioMode,
    target_fmr: f64,
    rule: MmpmrRule,
    tags: &EvalTags,
) -> Result<ReportEntry> {
    let rows = load_scores(scores)?;
    let config = ScenarioConfig {
        mode,
        target_fmr,
        rule,
    };
    let (set, _) = assemble_scenario(&rows, &config)?;
    let report = evaluate(&set, &config)?;
    Ok(ReportEntry {
        tool: tags.tool.clone(),
        model: tags.model.clone(),
        dataset: tags.dataset.clone(),
        mode,
        report,
    })
}

/// Writes `report.csv` and `report.txt` into `dir`.
pub fn write_reports(dir: &Path, entries: &[ReportEntry]) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(REPORT_CSV), emit_report(entries, ReportFormat::Csv))?;
    fs::write(dir.join(REPORT_TXT), emit_report(entries, ReportFormat::Text))?;
    Ok(())
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<Vec<ReportEntry>> {
    if args.refs_scores.is_none() && args.probes_scores.is_none() {
        return Err(CliError::Usage(
            "give --refs-scores, --probes-scores or both".into(),
        ));
    }
    let mut entries = Vec::new();
    for (path, mode) in [
        (&args.refs_scores, ScenarioMode::MorphsAsReferences),
        (&args.probes_scores, ScenarioMode::MorphsAsProbes),
    ] {
        if let Some(p) = path {
            entries.push(evaluate_scores(p, mode, args.target_fmr, args.rule, &args.tags)?);
        }
    }
    write_reports(&args.out, &entries)?;
    Ok(entries)
}

pub fn cmd_report(args: &ReportArgs) -> Result<Vec<ReportEntry>> {
    let mut entries = Vec::new();
    for p in &args.inputs {
        entries.extend(
            read_report_csv(p, args.target_fmr, args.rule)
                .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?,
        );
    }
    write_reports(&args.out, &entries)?;
    Ok(entries)
}
