//! The `fnc` command line: encode/decode/train/benchmark flows over the
//! shared container format.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. Every run is a pure
//! function of its flags (including `--seed`), and output files are written
//! atomically (temp file + rename).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::anneal::AnnealSchedule;
use crate::autoencoder::{self, account_bytes, decode_stages, tile, AutoencoderStage};
use crate::container::{
    decode_ae_payload, decode_ifs_payload, decode_series_payload,
    decode_vq_payload, encode_ae_payload, encode_ifs_payload, encode_series_payload,
    encode_vq_payload, CodeMode, Container, Method,
};
use crate::error::Error;
use crate::ifs::{
    chaos_game, deterministic_attractor, hamming_distance, inverse_search, DistanceMetric,
    IfsSystem, SearchOutcome,
};
use crate::image::{BinaryImage, Viewport};
use crate::pbm::{parse_image, write_pbm, PbmMode};
use crate::report::RunReport;
use crate::series::{
    estimate_dimension, fit, logistic_orbit, read_csv_series, ModelMode, Partition, TimeSeries,
};
use crate::train::{TrainConfig, TrainMethod};
use crate::vq::{quantize_blocks, LearningSchedule};

#[derive(Parser)]
#[command(name = "fnc", version, about = "Fractal and neural image codecs, plus series reconstruction")]
struct Cli {
    /// RNG seed; identical seeds reproduce output files bit-exactly.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for multi-chain searches (1 = sequential).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Output file path.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format: p1|p4 for images, text|records for reports.
    #[arg(long, global = true)]
    format: Option<String>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Iterated-function-system fractal codec.
    Ifs {
        #[command(subcommand)]
        cmd: IfsCmd,
    },
    /// Block autoencoder codec.
    Ae {
        #[command(subcommand)]
        cmd: AeCmd,
    },
    /// Vector-quantization codec.
    Vq {
        #[command(subcommand)]
        cmd: VqCmd,
    },
    /// Time-series reconstruction.
    Ts {
        #[command(subcommand)]
        cmd: TsCmd,
    },
    /// Cross-codec benchmarks.
    Bench {
        #[command(subcommand)]
        cmd: BenchCmd,
    },
}

#[derive(Subcommand)]
enum IfsCmd {
    /// Search IFS coefficients approximating a bitmap.
    Encode(IfsEncodeArgs),
    /// Render the attractor of a coefficient file at its recorded size.
    Decode(IfsDecodeArgs),
    /// Render a coefficient file or builtin system at any size.
    Render(IfsRenderArgs),
}

#[derive(Args)]
struct IfsEncodeArgs {
    /// Input bitmap (PBM P1/P4, or PGM P2/P5 binarized).
    #[arg(long)]
    input: PathBuf,
    /// Number of affine maps to search for.
    #[arg(long, default_value_t = 3)]
    maps: usize,
    #[arg(long, default_value_t = 1.0)]
    beta0: f64,
    #[arg(long, default_value_t = 1.002)]
    growth: f64,
    #[arg(long, default_value_t = 2000)]
    sweeps: usize,
    /// Coefficient discretization step.
    #[arg(long, default_value_t = 1.0 / 64.0)]
    step: f64,
    /// Collage distance used inside the search loop.
    #[arg(long, value_enum, default_value_t = MetricArg::Hamming)]
    metric: MetricArg,
    /// Binarization threshold for grayscale input.
    #[arg(long, default_value_t = 0.5)]
    gray_threshold: f64,
}

#[derive(Args)]
struct IfsDecodeArgs {
    /// Input IFS container.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 400_000)]
    iterations: usize,
    #[arg(long, default_value_t = 100)]
    burn_in: usize,
}

#[derive(Args)]
struct IfsRenderArgs {
    /// Input IFS container (or use --builtin).
    #[arg(long, conflicts_with = "builtin")]
    input: Option<PathBuf>,
    /// Builtin reference system.
    #[arg(long, value_enum)]
    builtin: Option<BuiltinSystem>,
    /// Raster size as WIDTHxHEIGHT.
    #[arg(long, default_value = "256x256")]
    size: String,
    #[arg(long, default_value_t = 400_000)]
    iterations: usize,
    #[arg(long, default_value_t = 100)]
    burn_in: usize,
    /// Use the deterministic set iteration instead of the chaos game
    /// (set iterations are capped at 64).
    #[arg(long, default_value_t = false)]
    deterministic: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuiltinSystem {
    Sierpinski,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Hamming,
    Hausdorff,
}

#[derive(Subcommand)]
enum AeCmd {
    /// Train autoencoder stages on an image's blocks.
    Train(AeTrainArgs),
    /// Encode an image through a trained model.
    Encode(AeEncodeArgs),
    /// Reconstruct the image stored in an AE container.
    Decode(InputOnlyArgs),
    /// Byte accounting and distortion of an AE container.
    Report(ReportArgs),
}

#[derive(Args)]
struct AeTrainArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = autoencoder::DEFAULT_BLOCK_SIDE)]
    block_side: usize,
    /// Number of factor-2 stages.
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, default_value_t = 0.05)]
    eta0: f64,
    #[arg(long, default_value_t = 1e6)]
    tau: f64,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Gradient)]
    method: MethodArg,
    #[arg(long, default_value_t = 0.5)]
    gray_threshold: f64,
}

#[derive(Args)]
struct AeEncodeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Trained AE container (from `ae train`).
    #[arg(long)]
    model: PathBuf,
    /// Store codes as raw f64 or quantized bytes.
    #[arg(long, value_enum, default_value_t = CodeModeArg::F64)]
    code_mode: CodeModeArg,
    #[arg(long, default_value_t = 0.5)]
    gray_threshold: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum CodeModeArg {
    F64,
    Q8,
}

#[derive(Args)]
struct InputOnlyArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    input: PathBuf,
    /// Original bitmap to measure distortion against.
    #[arg(long)]
    original: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    gray_threshold: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Gradient,
    Mc,
}

impl MethodArg {
    fn to_method(self) -> TrainMethod {
        match self {
            MethodArg::Gradient => TrainMethod::Gradient,
            MethodArg::Mc => TrainMethod::MonteCarlo,
        }
    }
}

#[derive(Subcommand)]
enum VqCmd {
    /// Train a codebook on an image's blocks.
    Train(VqTrainArgs),
    /// Quantize an image against a trained codebook.
    Encode(VqEncodeArgs),
    /// Reconstruct the image stored in a VQ container.
    Decode(InputOnlyArgs),
    /// Byte accounting and distortion of a VQ container.
    Report(ReportArgs),
}

#[derive(Args)]
struct VqTrainArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 4)]
    block_side: usize,
    /// Codebook size.
    #[arg(long, default_value_t = 16)]
    m: usize,
    #[arg(long, default_value_t = 100_000)]
    steps: usize,
    #[arg(long, default_value_t = 0.5)]
    eta0: f64,
    /// Learning-rate decay constant; defaults to steps/10.
    #[arg(long)]
    tau: Option<f64>,
    /// Enable the Kohonen neighborhood mode with this initial radius.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    gray_threshold: f64,
}

#[derive(Args)]
struct VqEncodeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Trained VQ container (from `vq train`).
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    gray_threshold: f64,
}

#[derive(Subcommand)]
enum TsCmd {
    /// Fit a phase-space model to a CSV series.
    Fit(TsFitArgs),
    /// One-step predictions from a fitted model.
    Predict(TsPredictArgs),
}

#[derive(Args)]
struct TsFitArgs {
    /// CSV input, one sample per line.
    #[arg(long)]
    input: PathBuf,
    /// Skip the first non-blank line.
    #[arg(long, default_value_t = false)]
    skip_header: bool,
    #[arg(long, default_value_t = crate::series::DEFAULT_MIN_COUNT)]
    min_count: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Linear)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Gradient)]
    method: MethodArg,
    #[arg(long, default_value_t = 1e-4)]
    eta0: f64,
    #[arg(long, default_value_t = 1e6)]
    tau: f64,
    #[arg(long, default_value_t = 200)]
    iters: usize,
}

#[derive(Args)]
struct TsPredictArgs {
    /// Fitted model container (from `ts fit`).
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = false)]
    skip_header: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Constant,
    Linear,
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Run all three image codecs on one input and compare.
    Compare(BenchArgs),
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 3)]
    maps: usize,
    #[arg(long, default_value_t = 300)]
    sweeps: usize,
    #[arg(long, default_value_t = 1.0 / 64.0)]
    step: f64,
    #[arg(long, default_value_t = 1.0)]
    beta0: f64,
    #[arg(long, default_value_t = 1.002)]
    growth: f64,
    #[arg(long, default_value_t = 20)]
    ae_block_side: usize,
    #[arg(long, default_value_t = 1)]
    ae_depth: usize,
    #[arg(long, default_value_t = 200)]
    ae_iters: usize,
    #[arg(long, default_value_t = 4)]
    vq_block_side: usize,
    #[arg(long, default_value_t = 16)]
    vq_m: usize,
    #[arg(long, default_value_t = 20_000)]
    vq_steps: usize,
    #[arg(long, default_value_t = 0.5)]
    gray_threshold: f64,
}

enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Entry point used by the `fnc` binary.
pub fn run() -> i32 {
    run_from(std::env::args())
}

/// Parses and executes; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            1
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.cmd {
        Cmd::Ifs { cmd } => match cmd {
            IfsCmd::Encode(a) => ifs_encode(cli, a),
            IfsCmd::Decode(a) => ifs_decode(cli, a),
            IfsCmd::Render(a) => ifs_render(cli, a),
        },
        Cmd::Ae { cmd } => match cmd {
            AeCmd::Train(a) => ae_train(cli, a),
            AeCmd::Encode(a) => ae_encode(cli, a),
            AeCmd::Decode(a) => ae_decode(cli, a),
            AeCmd::Report(a) => ae_report(cli, a),
        },
        Cmd::Vq { cmd } => match cmd {
            VqCmd::Train(a) => vq_train(cli, a),
            VqCmd::Encode(a) => vq_encode(cli, a),
            VqCmd::Decode(a) => vq_decode(cli, a),
            VqCmd::Report(a) => vq_report(cli, a),
        },
        Cmd::Ts { cmd } => match cmd {
            TsCmd::Fit(a) => ts_fit(cli, a),
            TsCmd::Predict(a) => ts_predict(cli, a),
        },
        Cmd::Bench { cmd } => match cmd {
            BenchCmd::Compare(a) => bench_compare(cli, a),
        },
    }
}

// ------------------------------------------------------------ helpers

fn required_output(cli: &Cli) -> CliResult<&Path> {
    cli.output
        .as_deref()
        .ok_or_else(|| CliError::Usage("--output is required for this command".into()))
}

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Data(Error::Io(e)))
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Data(Error::Io(e)))
}

/// Atomic write: temp file in the same directory, then rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| CliError::Data(Error::Io(e)))?;
    fs::rename(&tmp, path).map_err(|e| CliError::Data(Error::Io(e)))
}

fn load_image(path: &Path, gray_threshold: f64) -> CliResult<BinaryImage> {
    Ok(parse_image(&read_file(path)?, gray_threshold)?)
}

fn image_format(cli: &Cli) -> CliResult<PbmMode> {
    match cli.format.as_deref() {
        None | Some("p4") => Ok(PbmMode::Packed),
        Some("p1") => Ok(PbmMode::Plain),
        Some(other) => Err(CliError::Usage(format!("unknown image format {other:?} (use p1|p4)"))),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ReportFormat {
    Text,
    Records,
}

fn report_format(cli: &Cli) -> CliResult<ReportFormat> {
    match cli.format.as_deref() {
        None | Some("text") => Ok(ReportFormat::Text),
        Some("records") => Ok(ReportFormat::Records),
        Some(other) => {
            Err(CliError::Usage(format!("unknown report format {other:?} (use text|records)")))
        }
    }
}

fn parse_size(s: &str) -> CliResult<(usize, usize)> {
    let parts: Vec<&str> = s.split('x').collect();
    let parse = |p: &str| p.parse::<usize>().ok().filter(|&v| v > 0);
    match parts.as_slice() {
        [w, h] => match (parse(w), parse(h)) {
            (Some(w), Some(h)) => Ok((w, h)),
            _ => Err(CliError::Usage(format!("bad --size {s:?}, expected WIDTHxHEIGHT"))),
        },
        _ => Err(CliError::Usage(format!("bad --size {s:?}, expected WIDTHxHEIGHT"))),
    }
}

/// Bit-packed byte size of a width x height bitmap, the baseline all
/// compressed sizes are compared against.
fn packed_bitmap_bytes(img: &BinaryImage) -> u64 {
    (img.width().div_ceil(8) * img.height()) as u64
}

fn emit_reports(cli: &Cli, reports: &[RunReport]) -> CliResult<()> {
    let fmt = report_format(cli)?;
    let text = RunReport::table(reports);
    print!("{text}");
    if let Some(path) = cli.output.as_deref() {
        let body = match fmt {
            ReportFormat::Text => text,
            ReportFormat::Records => {
                let mut s = String::new();
                s.push_str(RunReport::record_header());
                s.push('\n');
                for r in reports {
                    s.push_str(&r.record_line());
                    s.push('\n');
                }
                s
            }
        };
        write_atomic(path, body.as_bytes())?;
    }
    Ok(())
}

// ---------------------------------------------------------------- ifs

fn search_chains(
    target: &BinaryImage,
    maps: usize,
    schedule: &AnnealSchedule,
    metric: DistanceMetric,
    chains: usize,
) -> CliResult<SearchOutcome> {
    let chains = chains.max(1);
    if chains == 1 {
        return Ok(inverse_search(target, maps, schedule, None, metric, &Viewport::UNIT)?);
    }
    // independent seeded chains; merged by best delta with ties to the
    // lowest seed so the result does not depend on scheduling
    let outcomes: Vec<crate::error::Result<SearchOutcome>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..chains)
            .map(|i| {
                let mut sched = schedule.clone();
                sched.seed = schedule.seed.wrapping_add(i as u64);
                scope.spawn(move || {
                    inverse_search(target, maps, &sched, None, metric, &Viewport::UNIT)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("search thread panicked")).collect()
    });
    let mut best: Option<SearchOutcome> = None;
    for outcome in outcomes {
        let outcome = outcome?;
        let better = match &best {
            None => true,
            Some(b) => outcome.best_delta < b.best_delta,
        };
        if better {
            best = Some(outcome);
        }
    }
    Ok(best.expect("at least one chain"))
}

fn ifs_encode(cli: &Cli, a: &IfsEncodeArgs) -> CliResult<()> {
    let out_path = required_output(cli)?;
    let target = load_image(&a.input, a.gray_threshold)?;
    let schedule = AnnealSchedule::new(a.beta0, a.growth, a.sweeps, a.step, cli.seed)?;
    let metric = match a.metric {
        MetricArg::Hamming => DistanceMetric::Hamming,
        MetricArg::Hausdorff => DistanceMetric::Hausdorff,
    };
    let outcome = search_chains(&target, a.maps, &schedule, metric, cli.threads)?;
    let container = Container {
        method: Method::Ifs,
        width: target.width() as u32,
        height: target.height() as u32,
        block_side: 0,
        pad_right: 0,
        pad_bottom: 0,
        payload: encode_ifs_payload(&outcome.system),
    };
    write_atomic(out_path, &container.to_bytes())?;
    println!(
        "ifs encode: {} maps, collage delta {:.6}, accepted {} / rejected {} moves",
        a.maps, outcome.best_delta, outcome.accepted, outcome.rejected
    );
    Ok(())
}

fn read_ifs_container(path: &Path) -> CliResult<(Container, IfsSystem)> {
    let container = Container::from_bytes(&read_file(path)?)?;
    if container.method != Method::Ifs {
        return Err(CliError::Data(Error::format(format!(
            "expected an IFS container, found method {}",
            container.method.name()
        ))));
    }
    let system = decode_ifs_payload(&container.payload)?;
    Ok((container, system))
}

fn ifs_decode(cli: &Cli, a: &IfsDecodeArgs) -> CliResult<()> {
    let out_path = required_output(cli)?;
    let (container, system) = read_ifs_container(&a.input)?;
    let img = chaos_game(
        &system,
        a.iterations,
        a.burn_in,
        &Viewport::UNIT,
        container.width as usize,
        container.height as usize,
        cli.seed,
    )?;
    write_atomic(out_path, &write_pbm(&img, image_format(cli)?))?;
    println!("ifs decode: rendered {}x{}", container.width, container.height);
    Ok(())
}

fn ifs_render(cli: &Cli, a: &IfsRenderArgs) -> CliResult<()> {
    let out_path = required_output(cli)?;
    let system = match (&a.input, a.builtin) {
        (Some(path), None) => read_ifs_container(path)?.1,
        (None, Some(BuiltinSystem::Sierpinski)) => IfsSystem::sierpinski(),
        (None, None) => {
            return Err(CliError::Usage("provide --input or --builtin".into()));
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let (w, h) = parse_size(&a.size)?;
    let img = if a.deterministic {
        let start = BinaryImage::filled(w, h)?;
        deterministic_attractor(&system, &start, &Viewport::UNIT, a.iterations.min(64))?
    } else {
        chaos_game(&system, a.iterations, a.burn_in, &Viewport::UNIT, w, h, cli.seed)?
    };
    write_atomic(out_path, &write_pbm(&img, image_format(cli)?))?;
    println!("ifs render: {}x{}, {} pixels set", w, h, img.ones());
    Ok(())
}

// ----------------------------------------------------------------- ae

fn ae_train(cli: &Cli, a: &AeTrainArgs) -> CliResult<()> {
    let out_path = required_output(cli)?;
    let img = load_image(&a.input, a.gray_threshold)?;
    let tiling = tile(&img, a.block_side)?;
    let cfg = TrainConfig {
        eta0: a.eta0,
        decay_tau: a.tau,
        max_iters: a.iters,
        seed: cli.seed,
        method: a.method.to_method(),
    };
    let (stages, _) = autoencoder::iterate_stages(tiling.blocks(), a.depth, &cfg)?;
    let (pad_r, pad_b) = tiling.padding();
    let container = Container {
        method: Method::Autoencoder,
        width: img.width() as u32,
        height: img.height() as u32,
        block_side: a.block_side as u16,
        pad_right: pad_r as u16,
        pad_bottom: pad_b as u16,
        payload: encode_ae_payload(&stages, &[], CodeMode::F64)?,
    };
    write_atomic(out_path, &container.to_bytes())?;
    let final_len = stages.last().map(|s| s.code_len()).unwrap_or(0);
    println!(
        "ae train: {} stage(s), block {}x{}, code length {}",
        stages.len(),
        a.block_side,
        a.block_side,
        final_len
    );
    Ok(())
}

fn read_ae_container(path: &Path) -> CliResult<(Container, Vec<AutoencoderStage>, Vec<Vec<f64>>, CodeMode)> {
    let container = Container::from_bytes(&read_file(path)?)?;
    if container.method != Method::Autoencoder {
        return Err(CliError::Data(Error::format(format!(
            "expected an AE container, found method {}",
            container.method.name()
        ))));
    }
    let (stages, codes, mode) = decode_ae_payload(&container.payload)?;
    Ok((container, stages, codes, mode))
}

fn ae_encode(cli: &Cli, a: &AeEncodeArgs) -> CliResult<()> {
    let out_path = required_output(cli)?;
    let img = load_image(&a.input, a.gray_threshold)?;
    let (model, stages, _, _) = read_ae_container(&a.model)?;
    let block_side = model.block_side as usize;
    let tiling = tile(&img, block_side)?;
    if tiling.block_len() != stages[0].input_len() {
        return Err(CliError::Data(Error::DimensionMismatch {
            expected: stages[0].input_len(),
            actual: tiling.block_len(),
        }));
    }
    let mut codes: Vec<Vec<f64>> = tiling.blocks().to_vec();
    for stage in &stages {
        codes = codes
            .iter()
            .map(|b| stage.encode(b))
            .collect::<crate::error::Result<Vec<_>>>()?;
    }
    let mode = match a.code_mode {
        CodeModeArg::F64 => CodeMode::F64,
        CodeModeArg::Q8 => CodeMode::Quantized8,
    };
    let (pad_r, pad_b) = tiling.padding();
    let container = Container {
        method: Method::Autoencoder,
        width: img.width() as u32,
        height: img.height() as u32,
        block_side: model.block_side,
        pad_right: pad_r as u16,
        pad_bottom: pad_b as u16,
        payload: encode_ae_payload(&stages, &codes, mode)?,
    };
    write_atomic(out_path, &container.to_bytes())?;
    println!(
        "ae encode: {} blocks -> {} codes of length {}",
        tiling.block_count(),
        codes.len(),
        stages.last().unwrap().code_len()
    );
    Ok(())
}

fn ae_reconstruct(container: &Container, stages: &[AutoencoderStage], codes: &[Vec<f64>]) -> CliResult<BinaryImage> {
    let blocks = decode_stages(stages, codes)?;
    let tiling_shape = autoencoder::BlockTiling::from_parts(
        container.block_side as usize,
        container.width as usize,
        container.height as usize,
        blocks.iter().map(|b| autoencoder::binarize(b)).collect(),
    )?;
    Ok(tiling_shape.untile())
}

fn ae_decode(cli: &Cli, a: &InputOnlyArgs) -> CliResult<()> {
    let out_path = required_output(cli)?;
    let (container, stages, codes, _) = read_ae_container(&a.input)?;
    if codes.is_empty() {
        return Err(CliError::Data(Error::format(
            "container holds no codes; run `ae encode` first",
        )));
    }
    let img = ae_reconstruct(&container, &stages, &codes)?;
    write_atomic(out_path, &write_pbm(&img, image_format(cli)?))?;
    println!("ae decode: reconstructed {}x{}", img.width(), img.height());
    Ok(())
}

fn ae_report(cli: &Cli, a: &ReportArgs) -> CliResult<()> {
    let start = Instant::now();
    let bytes = read_file(&a.input)?;
    let (container, stages, codes, mode) = read_ae_container(&a.input)?;
    if codes.is_empty() {
        return Err(CliError::Data(Error::format(
            "container holds no codes; run `ae encode` first",
        )));
    }
    let original = load_image(&a.original, a.gray_threshold)?;
    let recon = ae_reconstruct(&container, &stages, &codes)?;
    let distortion = hamming_distance(&recon, &original)?;
    let tiling = tile(&original, container.block_side as usize)?;
    let acct = account_bytes(
        &tiling,
        &stages,
        &codes,
        mode.bytes_per_code(),
        (bytes.len() - codes.iter().map(|c| c.len() * mode.bytes_per_code()).sum::<usize>()
            - stages
                .iter()
                .map(|s| (s.weights().w1().len() + s.weights().w2().len()) * 8)
                .sum::<usize>()) as u64,
    );
    let report = RunReport {
        method: "ae".into(),
        original_bytes: packed_bitmap_bytes(&original),
        compressed_bytes: bytes.len() as u64,
        metric: "hamming".into(),
        distortion,
        wall: start.elapsed(),
        seed: cli.seed,
        config: format!(
            "block_side={} depth={} codes+weights+header={}+{}+{}",
            container.block_side,
            stages.len(),
            acct.code_bytes,
            acct.weight_bytes,
            acct.header_bytes
        ),
    };
    if acct.exceeds_original() {
        println!(
            "note: compressed representation ({} bytes) is not smaller than the original ({} bytes)",
            acct.total_compressed(),
            acct.original_bytes
        );
    }
    emit_reports(cli, &[report])
}

// ----------------------------------------------------------------- vq

fn vq_train(cli: &Cli, a: &VqTrainArgs) -> CliResult<()> {
    let out_path = required_output(cli)?;
    let img = load_image(&a.input, a.gray_threshold)?;
    let tiling = tile(&img, a.block_side)?;
    let schedule = LearningSchedule {
        eta0: a.eta0,
        tau: a.tau.unwrap_or((a.steps as f64 / 10.0).max(1.0)),
        max_steps: a.steps,
        seed: cli.seed,
        neighborhood_radius: a.radius,
    };
    let codebook = crate::vq::train(tiling.blocks(), a.m, &schedule)?;
    let (pad_r, pad_b) = tiling.padding();
    let container = Container {
        method: Method::Vq,
        width: img.width() as u32,
        height: img.height() as u32,
        block_side: a.block_side as u16,
        pad_right: pad_r as u16,
        pad_bottom: pad_b as u16,
        payload: encode_vq_payload(&codebook, &[])?,
    };
    write_atomic(out_path, &container.to_bytes())?;
    println!(
        "vq train: m={} codebook over {} blocks, distortion {:.6}",
        a.m,
        tiling.block_count(),
        codebook.distortion(tiling.blocks())?
    );
    Ok(())
}

fn read_vq_container(path: &Path) -> CliResult<(Container, crate::vq::Codebook, Vec<usize>)> {
    let container = Container::from_bytes(&read_file(path)?)?;
    if container.method != Method::Vq {
        return Err(CliError::Data(Error::format(format!(
            "expected a VQ container, found method {}",
            container.method.name()
        ))));
    }
    let (codebook, indices) = decode_vq_payload(&container.payload)?;
    Ok((container, codebook, indices))
}

fn vq_encode(cli: &Cli, a: &VqEncodeArgs) -> CliResult<()> {
    let out_path = required_output(cli)?;
    let img = load_image(&a.input, a.gray_threshold)?;
    let (model, codebook, _) = read_vq_container(&a.model)?;
    let tiling = tile(&img, model.block_side as usize)?;
    let q = quantize_blocks(&tiling, &codebook, cli.seed)?;
    let (pad_r, pad_b) = tiling.padding();
    let container = Container {
        method: Method::Vq,
        width: img.width() as u32,
        height: img.height() as u32,
        block_side: model.block_side,
        pad_right: pad_r as u16,
        pad_bottom: pad_b as u16,
        payload: encode_vq_payload(&codebook, &q.indices)?,
    };
    write_atomic(out_path, &container.to_bytes())?;
    println!(
        "vq encode: {} blocks at {:.1} bits/block, nominal ratio {:.2}",
        q.indices.len(),
        crate::vq::index_bits(codebook.len()),
        q.compression_ratio
    );
    Ok(())
}

fn vq_reconstruct(container: &Container, codebook: &crate::vq::Codebook, indices: &[usize]) -> CliResult<BinaryImage> {
    let blocks: Vec<Vec<f64>> = indices
        .iter()
        .map(|&i| autoencoder::binarize(&codebook.weights()[i]))
        .collect();
    let tiling = autoencoder::BlockTiling::from_parts(
        container.block_side as usize,
        container.width as usize,
        container.height as usize,
        blocks,
    )?;
    Ok(tiling.untile())
}

fn vq_decode(cli: &Cli, a: &InputOnlyArgs) -> CliResult<()> {
    let out_path = required_output(cli)?;
    let (container, codebook, indices) = read_vq_container(&a.input)?;
    if indices.is_empty() {
        return Err(CliError::Data(Error::format(
            "container holds no indices; run `vq encode` first",
        )));
    }
    let img = vq_reconstruct(&container, &codebook, &indices)?;
    write_atomic(out_path, &write_pbm(&img, image_format(cli)?))?;
    println!("vq decode: reconstructed {}x{}", img.width(), img.height());
    Ok(())
}

fn vq_report(cli: &Cli, a: &ReportArgs) -> CliResult<()> {
    let start = Instant::now();
    let bytes = read_file(&a.input)?;
    let (container, codebook, indices) = read_vq_container(&a.input)?;
    if indices.is_empty() {
        return Err(CliError::Data(Error::format(
            "container holds no indices; run `vq encode` first",
        )));
    }
    let original = load_image(&a.original, a.gray_threshold)?;
    let recon = vq_reconstruct(&container, &codebook, &indices)?;
    let distortion = hamming_distance(&recon, &original)?;
    let report = RunReport {
        method: "vq".into(),
        original_bytes: packed_bitmap_bytes(&original),
        compressed_bytes: bytes.len() as u64,
        metric: "hamming".into(),
        distortion,
        wall: start.elapsed(),
        seed: cli.seed,
        config: format!(
            "block_side={} m={} bits_per_index={}",
            container.block_side,
            codebook.len(),
            crate::vq::index_bits(codebook.len())
        ),
    };
    emit_reports(cli, &[report])
}

// ----------------------------------------------------------------- ts

fn ts_fit(cli: &Cli, a: &TsFitArgs) -> CliResult<()> {
    let out_path = required_output(cli)?;
    let values = read_csv_series(&read_text(&a.input)?, a.skip_header)?;
    let series = TimeSeries::scalar(values)?;
    let dim = estimate_dimension(&series)?;
    let (unit, rescale) = series.rescale_to_unit();
    let mut sorted = unit.values().to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let partition = Partition::build(&sorted, a.min_count)?;
    let mode = match a.mode {
        ModeArg::Constant => ModelMode::Constant,
        ModeArg::Linear => ModelMode::Linear,
    };
    let cfg = TrainConfig {
        eta0: a.eta0,
        decay_tau: a.tau,
        max_iters: a.iters,
        seed: cli.seed,
        method: a.method.to_method(),
    };
    let model = fit(&unit, &partition, mode, &cfg)?;
    let err = model.training_error(&unit)?;
    let container = Container {
        method: Method::Net,
        width: 0,
        height: 0,
        block_side: 0,
        pad_right: 0,
        pad_bottom: 0,
        payload: encode_series_payload(&model, &rescale, err),
    };
    write_atomic(out_path, &container.to_bytes())?;
    println!(
        "ts fit: dimension {}, {} blocks, training error {:.9}",
        dim,
        partition.len(),
        err
    );
    Ok(())
}

fn ts_predict(cli: &Cli, a: &TsPredictArgs) -> CliResult<()> {
    let out_path = required_output(cli)?;
    let container = Container::from_bytes(&read_file(&a.model)?)?;
    if container.method != Method::Net {
        return Err(CliError::Data(Error::format(format!(
            "expected a series-model container, found method {}",
            container.method.name()
        ))));
    }
    let (model, rescale, stored_err) = decode_series_payload(&container.payload)?;
    let values = read_csv_series(&read_text(&a.input)?, a.skip_header)?;
    let mut out = String::new();
    let mut preds = Vec::with_capacity(values.len());
    for &x in &values {
        let pred = rescale.from_unit(model.eval(rescale.to_unit(x)));
        preds.push(pred);
        out.push_str(&format!("{pred}\n"));
    }
    write_atomic(out_path, out.as_bytes())?;
    if values.len() >= 2 {
        let sse: f64 = (0..values.len() - 1)
            .map(|i| {
                let unit_pred = model.eval(rescale.to_unit(values[i]));
                let unit_next = rescale.to_unit(values[i + 1]);
                (unit_next - unit_pred) * (unit_next - unit_pred)
            })
            .sum();
        println!(
            "ts predict: {} predictions, squared error {:.9} (model reported {:.9})",
            preds.len(),
            sse,
            stored_err
        );
    } else {
        println!("ts predict: {} predictions", preds.len());
    }
    Ok(())
}

// -------------------------------------------------------------- bench

fn bench_compare(cli: &Cli, a: &BenchArgs) -> CliResult<()> {
    let original = load_image(&a.input, a.gray_threshold)?;
    let original_bytes = packed_bitmap_bytes(&original);
    let mut reports = Vec::new();

    // IFS: coefficient search, then a chaos-game reconstruction
    {
        let start = Instant::now();
        let schedule = AnnealSchedule::new(a.beta0, a.growth, a.sweeps, a.step, cli.seed)?;
        let outcome =
            search_chains(&original, a.maps, &schedule, DistanceMetric::Hamming, cli.threads)?;
        let container = Container {
            method: Method::Ifs,
            width: original.width() as u32,
            height: original.height() as u32,
            block_side: 0,
            pad_right: 0,
            pad_bottom: 0,
            payload: encode_ifs_payload(&outcome.system),
        };
        let compressed = container.to_bytes().len() as u64;
        let recon = chaos_game(
            &outcome.system,
            200_000,
            100,
            &Viewport::UNIT,
            original.width(),
            original.height(),
            cli.seed,
        )?;
        reports.push(RunReport {
            method: "ifs".into(),
            original_bytes,
            compressed_bytes: compressed,
            metric: "hamming".into(),
            distortion: hamming_distance(&recon, &original)?,
            wall: start.elapsed(),
            seed: cli.seed,
            config: format!("maps={} sweeps={} step={}", a.maps, a.sweeps, a.step),
        });
    }

    // AE: train one stage stack, encode, reconstruct
    {
        let start = Instant::now();
        let tiling = tile(&original, a.ae_block_side)?;
        let cfg = TrainConfig::gradient(0.05, 1e6, a.ae_iters, cli.seed);
        let (stages, codes) = autoencoder::iterate_stages(tiling.blocks(), a.ae_depth, &cfg)?;
        let (pad_r, pad_b) = tiling.padding();
        let container = Container {
            method: Method::Autoencoder,
            width: original.width() as u32,
            height: original.height() as u32,
            block_side: a.ae_block_side as u16,
            pad_right: pad_r as u16,
            pad_bottom: pad_b as u16,
            payload: encode_ae_payload(&stages, &codes, CodeMode::F64)?,
        };
        let compressed = container.to_bytes().len() as u64;
        let recon = ae_reconstruct(&container, &stages, &codes)?;
        reports.push(RunReport {
            method: "ae".into(),
            original_bytes,
            compressed_bytes: compressed,
            metric: "hamming".into(),
            distortion: hamming_distance(&recon, &original)?,
            wall: start.elapsed(),
            seed: cli.seed,
            config: format!(
                "block_side={} depth={} iters={}",
                a.ae_block_side, a.ae_depth, a.ae_iters
            ),
        });
    }

    // VQ: codebook training plus packed index stream
    {
        let start = Instant::now();
        let tiling = tile(&original, a.vq_block_side)?;
        let schedule = LearningSchedule {
            eta0: 0.5,
            tau: (a.vq_steps as f64 / 10.0).max(1.0),
            max_steps: a.vq_steps,
            seed: cli.seed,
            neighborhood_radius: None,
        };
        let m = a.vq_m.min(tiling.block_count());
        let codebook = crate::vq::train(tiling.blocks(), m, &schedule)?;
        let q = quantize_blocks(&tiling, &codebook, cli.seed)?;
        let (pad_r, pad_b) = tiling.padding();
        let container = Container {
            method: Method::Vq,
            width: original.width() as u32,
            height: original.height() as u32,
            block_side: a.vq_block_side as u16,
            pad_right: pad_r as u16,
            pad_bottom: pad_b as u16,
            payload: encode_vq_payload(&codebook, &q.indices)?,
        };
        let compressed = container.to_bytes().len() as u64;
        reports.push(RunReport {
            method: "vq".into(),
            original_bytes,
            compressed_bytes: compressed,
            metric: "hamming".into(),
            distortion: hamming_distance(&q.reconstruction, &original)?,
            wall: start.elapsed(),
            seed: cli.seed,
            config: format!("block_side={} m={} steps={}", a.vq_block_side, m, a.vq_steps),
        });
    }

    emit_reports(cli, &reports)
}

/// Writes the bundled logistic-map series; handy for trying `ts fit` without
/// external data (used by the examples and tests).
pub fn write_logistic_csv(path: &Path, n: usize, x0: f64) -> crate::error::Result<()> {
    let mut body = String::with_capacity(n * 20);
    for v in logistic_orbit(x0, n) {
        body.push_str(&format!("{v}\n"));
    }
    fs::write(path, body)?;
    Ok(())
}
