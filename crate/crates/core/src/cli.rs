//! Batch command-line front end. Every subcommand maps onto one library
//! stage and exchanges RTTM, WAV and JSON files with the others.
//!
//! Exit codes: 0 success, 2 I/O, 3 processing, 64 usage.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::beamform::BeamformerKind;
use crate::der::der;
use crate::gss::{gss_enhance, GssOptions};
use crate::rectify::{rectify_stages, RectifyConfig};
use crate::rttm::{parse_rttm, write_rttm, SegmentList};
use crate::select::{ev_scores, partition_subarrays, score_subarrays, select_channels, SelectionPolicy, DEFAULT_K};
use crate::signal::{read_wav, stft, write_wav, MultichannelWave, StftConfig, WavEncoding, WavError};
use crate::sim::{render, SceneSpec, SimError};
use crate::sync::synchronize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 2;
pub const EXIT_PROCESSING: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "FARFIELD_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Processing(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Io(_) => EXIT_IO,
            Self::Processing(_) => EXIT_PROCESSING,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::Io(m) | Self::Processing(m) => m,
        }
    }
}

fn processing(e: impl std::fmt::Display) -> CliError {
    CliError::Processing(e.to_string())
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyncSettings {
    pub reference: usize,
    pub max_lag_s: f64,
}

impl Default for SyncSettings {
    fn default() -> Self {
        Self { reference: 0, max_lag_s: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectSettings {
    pub policy: SelectionPolicy,
    pub k: usize,
}

impl Default for SelectSettings {
    fn default() -> Self {
        Self { policy: SelectionPolicy::SingleSubarray, k: DEFAULT_K }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IoPaths {
    pub input: Option<PathBuf>,
    pub rttm: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

/// Settings shared by all subcommands, loadable with `--config`. Every field
/// has a default; explicit flags override the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub stft: StftConfig,
    pub sync: SyncSettings,
    pub select: SelectSettings,
    pub gss: GssOptions,
    pub rectify: RectifyConfig,
    pub stages: usize,
    pub collar_s: f64,
    pub sample_rate: u32,
    pub io: IoPaths,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            stft: StftConfig::default(),
            sync: SyncSettings::default(),
            select: SelectSettings::default(),
            gss: GssOptions::default(),
            rectify: RectifyConfig::default(),
            stages: 1,
            collar_s: 0.25,
            sample_rate: 16000,
            io: IoPaths::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), String> {
        self.stft.validate().map_err(|e| format!("/stft: {e}"))?;
        self.rectify.validate().map_err(|e| format!("/rectify: {e}"))?;
        if !(self.sync.max_lag_s.is_finite() && self.sync.max_lag_s >= 0.0) {
            return Err("/sync/max_lag_s: must be >= 0".into());
        }
        if self.select.k == 0 {
            return Err("/select/k: must be >= 1".into());
        }
        if !(self.gss.context_s.is_finite() && self.gss.context_s >= 0.0) {
            return Err("/gss/context_s: must be >= 0".into());
        }
        if self.gss.iterations == 0 {
            return Err("/gss/iterations: must be >= 1".into());
        }
        if self.stages == 0 {
            return Err("/stages: must be >= 1".into());
        }
        if !(self.collar_s.is_finite() && self.collar_s >= 0.0) {
            return Err("/collar_s: must be >= 0".into());
        }
        if self.sample_rate == 0 {
            return Err("/sample_rate: must be > 0".into());
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| format!("/{}: {}", e.path().to_string().replace('.', "/"), e.inner()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Parser)]
#[command(name = "farfield", version, about = "Far-field multichannel speech processing")]
pub struct Cli {
    /// PipelineConfig JSON; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (also FARFIELD_THREADS); results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Align all channels to a reference channel.
    Sync(SyncArgs),
    /// Rank channels, score virtual subarrays and pick channels.
    Select(SelectArgs),
    /// Guided source separation of one speaker's segments.
    Enhance(EnhanceArgs),
    /// Sliding-window cACGMM rectification of a diarization.
    Rectify(RectifyArgs),
    /// Diarization error rate of a hypothesis against a reference.
    Score(ScoreArgs),
    /// Render a scene spec to a mixture, source images and truth RTTM.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct SyncArgs {
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "ref")]
    pub reference: Option<usize>,
    #[arg(long)]
    pub max_lag_s: Option<f64>,
    /// Lag report path (default: output with a .lags.json extension).
    #[arg(long)]
    pub lags: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub rttm: Option<PathBuf>,
    #[arg(long)]
    pub policy: Option<SelectionPolicy>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnhanceArgs {
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub rttm: Option<PathBuf>,
    #[arg(long)]
    pub speaker: String,
    /// Selection JSON written by `select`; all channels when omitted.
    #[arg(long)]
    pub channels: Option<PathBuf>,
    #[arg(long)]
    pub bf: Option<BeamformerKind>,
    #[arg(long)]
    pub context_s: Option<f64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RectifyArgs {
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub rttm: Option<PathBuf>,
    #[arg(long)]
    pub window_s: Option<f64>,
    #[arg(long)]
    pub shift_s: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub stages: Option<usize>,
    /// Selection JSON written by `select`; all channels when omitted.
    #[arg(long)]
    pub channels: Option<PathBuf>,
    /// Write the last stage's frame probabilities to `<prefix>.f32/.json`.
    #[arg(long)]
    pub probs: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long)]
    pub collar: Option<f64>,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out_prefix: PathBuf,
    #[arg(long)]
    pub sample_rate: Option<u32>,
}

/// Output of `select`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub policy: SelectionPolicy,
    pub k: usize,
    pub order: Vec<usize>,
    pub scores: Vec<f64>,
    pub silent: Vec<usize>,
    pub subarrays: Vec<Vec<usize>>,
    pub sinr_db: Option<Vec<f64>>,
    pub subarray_order: Option<Vec<usize>>,
    /// Selected channels, best EV rank first.
    pub channels: Vec<usize>,
}

fn required(flag: Option<PathBuf>, fallback: &Option<PathBuf>, name: &str) -> CliResult<PathBuf> {
    flag.or_else(|| fallback.clone()).ok_or_else(|| CliError::Usage(format!("missing --{name} (or io.{name} in the config)")))
}

fn load_wave(path: &Path) -> CliResult<MultichannelWave> {
    read_wav(path).map_err(|e| match e {
        WavError::Io { .. } => CliError::Io(e.to_string()),
        other => CliError::Processing(format!("{}: {other}", path.display())),
    })
}

fn save_wave(wave: &MultichannelWave, path: &Path) -> CliResult<()> {
    write_wav(wave, path, WavEncoding::Float32).map(|_| ()).map_err(|e| match e {
        WavError::Io { .. } => CliError::Io(e.to_string()),
        other => processing(other),
    })
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| io_error(path, e))
}

fn load_rttm(path: &Path) -> CliResult<SegmentList> {
    parse_rttm(&read_text(path)?).map_err(|e| CliError::Processing(format!("{}: {e}", path.display())))
}

fn load_selection(path: &Path) -> CliResult<Vec<usize>> {
    let report: SelectionReport =
        serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Processing(format!("{}: {e}", path.display())))?;
    if report.channels.is_empty() {
        return Err(CliError::Processing(format!("{}: empty channel selection", path.display())));
    }
    Ok(report.channels)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn cmd_sync(args: SyncArgs, cfg: &PipelineConfig) -> CliResult<String> {
    let input = required(args.input, &cfg.io.input, "in")?;
    let out = required(args.out, &cfg.io.output, "out")?;
    let reference = args.reference.unwrap_or(cfg.sync.reference);
    let max_lag_s = args.max_lag_s.unwrap_or(cfg.sync.max_lag_s);
    if !(max_lag_s.is_finite() && max_lag_s >= 0.0) {
        return Err(CliError::Usage(format!("--max-lag-s {max_lag_s} must be >= 0")));
    }
    let wave = load_wave(&input)?;
    let max_lag = (max_lag_s * wave.sample_rate() as f64).round() as usize;
    let (synced, lags) = synchronize(&wave, reference, max_lag).map_err(processing)?;
    save_wave(&synced, &out)?;
    let report = to_json(&lags);
    write_bytes(&args.lags.unwrap_or_else(|| out.with_extension("lags.json")), report.as_bytes())?;
    Ok(report)
}

fn cmd_select(args: SelectArgs, cfg: &PipelineConfig) -> CliResult<String> {
    let input = required(args.input, &cfg.io.input, "in")?;
    let out = required(args.out, &cfg.io.output, "out")?;
    let policy = args.policy.unwrap_or(cfg.select.policy);
    let k = args.k.unwrap_or(cfg.select.k);
    if k == 0 {
        return Err(CliError::Usage("--k must be >= 1".into()));
    }
    let rttm = args.rttm.or_else(|| cfg.io.rttm.clone());
    let wave = load_wave(&input)?;
    if wave.num_channels() < 2 {
        return Err(CliError::Processing(format!("need ≥ 2 channels, got {}", wave.num_channels())));
    }
    let tensor = stft(&wave, &cfg.stft).map_err(processing)?;
    let ranking = ev_scores(&tensor).map_err(processing)?;
    let mut plan = partition_subarrays(&ranking, k).map_err(processing)?;
    match &rttm {
        Some(path) => {
            let segments = load_rttm(path)?;
            let activity = crate::cacgmm::segments_to_activity(&segments, tensor.frame_rate(), tensor.num_frames())
                .map_err(processing)?;
            plan = score_subarrays(&plan, &tensor, &activity).map_err(processing)?;
        }
        None if policy.needs_sinr() => {
            return Err(CliError::Usage(format!("policy {policy:?} needs --rttm for subarray scoring")));
        }
        None => {}
    }
    let channels = select_channels(&plan, &ranking, policy).map_err(processing)?;
    let report = SelectionReport {
        policy,
        k,
        order: ranking.order,
        scores: ranking.scores,
        silent: ranking.silent,
        subarrays: plan.subarrays,
        sinr_db: plan.sinr_db,
        subarray_order: plan.order,
        channels,
    };
    let text = to_json(&report);
    write_bytes(&out, text.as_bytes())?;
    Ok(text)
}

fn selected_wave(wave: MultichannelWave, channels: Option<PathBuf>) -> CliResult<MultichannelWave> {
    match channels {
        Some(path) => {
            let chosen = load_selection(&path)?;
            wave.select_channels(&chosen).map_err(|e| CliError::Processing(format!("{}: {e}", path.display())))
        }
        None => Ok(wave),
    }
}

#[derive(Debug, Serialize)]
struct EnhanceReport {
    speaker: String,
    files: Vec<String>,
    fallback_bins: usize,
}

fn cmd_enhance(args: EnhanceArgs, cfg: &PipelineConfig) -> CliResult<String> {
    let input = required(args.input, &cfg.io.input, "in")?;
    let rttm = required(args.rttm, &cfg.io.rttm, "rttm")?;
    let out_dir = required(args.out_dir, &cfg.io.output, "out-dir")?;
    let mut opts = GssOptions {
        context_s: args.context_s.unwrap_or(cfg.gss.context_s),
        iterations: args.iterations.unwrap_or(cfg.gss.iterations),
        beamformer: args.bf.unwrap_or(cfg.gss.beamformer),
        reference: cfg.gss.reference,
    };
    let segments = load_rttm(&rttm)?;
    let selected = args.channels.is_some();
    let wave = selected_wave(load_wave(&input)?, args.channels)?;
    // a selection file lists channels best first; otherwise rank them here
    if opts.reference.is_none() && !selected && wave.num_channels() >= 2 {
        let tensor = stft(&wave, &cfg.stft).map_err(processing)?;
        opts.reference = Some(ev_scores(&tensor).map_err(processing)?.best());
    }
    let enhanced = gss_enhance(&wave, &segments, &args.speaker, &cfg.stft, &opts).map_err(processing)?;
    std::fs::create_dir_all(&out_dir).map_err(|e| io_error(&out_dir, e))?;
    let mut files = Vec::with_capacity(enhanced.len());
    for seg in &enhanced {
        let name = seg.file_name();
        let mono = MultichannelWave::mono(wave.sample_rate(), seg.samples.clone()).map_err(processing)?;
        save_wave(&mono, &out_dir.join(&name))?;
        files.push(name);
    }
    let fallback_bins = enhanced.iter().map(|s| s.fallback_bins).sum();
    Ok(to_json(&EnhanceReport { speaker: args.speaker, files, fallback_bins }))
}

fn cmd_rectify(args: RectifyArgs, cfg: &PipelineConfig) -> CliResult<String> {
    let input = required(args.input, &cfg.io.input, "in")?;
    let rttm = required(args.rttm, &cfg.io.rttm, "rttm")?;
    let out = required(args.out, &cfg.io.output, "out")?;
    let rcfg = RectifyConfig {
        window_s: args.window_s.unwrap_or(cfg.rectify.window_s),
        shift_s: args.shift_s.unwrap_or(cfg.rectify.shift_s),
        threshold: args.threshold.unwrap_or(cfg.rectify.threshold),
        ..cfg.rectify
    };
    rcfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let stages = args.stages.unwrap_or(cfg.stages);
    if stages == 0 {
        return Err(CliError::Usage("--stages must be >= 1".into()));
    }
    let init = load_rttm(&rttm)?;
    let wave = selected_wave(load_wave(&input)?, args.channels)?;
    let results = rectify_stages(&wave, &init, &rcfg, &cfg.stft, stages).map_err(processing)?;
    let (segments, probs) = results.last().expect("at least one stage");
    let text = write_rttm(segments);
    write_bytes(&out, text.as_bytes())?;
    if let Some(prefix) = args.probs {
        probs.write(&prefix).map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(text)
}

fn cmd_score(args: ScoreArgs, cfg: &PipelineConfig) -> CliResult<String> {
    let collar = args.collar.unwrap_or(cfg.collar_s);
    let reference = load_rttm(&args.reference)?;
    let hypothesis = load_rttm(&args.hyp)?;
    let report = der(&reference, &hypothesis, collar).map_err(processing)?;
    let text = to_json(&report);
    if let Some(out) = args.out {
        write_bytes(&out, text.as_bytes())?;
    }
    Ok(text)
}

fn cmd_simulate(args: SimulateArgs, cfg: &PipelineConfig) -> CliResult<String> {
    let text = read_text(&args.spec)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let spec: SceneSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = format!("/{}", e.path().to_string().replace(['.', '['], "/").replace(']', ""));
        CliError::Processing(format!("invalid scene at {}: {}", if pointer == "/." { "/".into() } else { pointer }, e.inner()))
    })?;
    let sample_rate = args.sample_rate.unwrap_or(cfg.sample_rate);
    let rendered = render(&spec, sample_rate).map_err(|e| match e {
        SimError::SourceFile(_) => CliError::Io(e.to_string()),
        other => processing(other),
    })?;
    let prefix = args.out_prefix;
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    let with_suffix = |suffix: &str| {
        let mut name = prefix.as_os_str().to_owned();
        name.push(suffix);
        PathBuf::from(name)
    };
    let mut files = vec![with_suffix(".wav")];
    save_wave(&rendered.mixture, &files[0])?;
    for id in &rendered.source_ids {
        let path = with_suffix(&format!(".{id}.wav"));
        save_wave(rendered.image(id).expect("rendered source"), &path)?;
        files.push(path);
    }
    let rttm_path = with_suffix(".rttm");
    write_bytes(&rttm_path, write_rttm(&rendered.truth).as_bytes())?;
    files.push(rttm_path);
    let names: Vec<String> = files.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect();
    Ok(to_json(&names))
}

fn load_config(path: Option<&Path>) -> CliResult<PipelineConfig> {
    match path {
        None => Ok(PipelineConfig::default()),
        Some(p) => PipelineConfig::from_json(&read_text(p)?).map_err(|e| CliError::Usage(format!("{}: config {e}", p.display()))),
    }
}

fn thread_count(flag: Option<usize>) -> CliResult<Option<usize>> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| CliError::Usage(format!("{THREADS_ENV}={v:?} is not a count"))),
        Err(_) => Ok(None),
    }
}

fn dispatch(cli: Cli) -> CliResult<String> {
    let cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Sync(a) => cmd_sync(a, &cfg),
        Command::Select(a) => cmd_select(a, &cfg),
        Command::Enhance(a) => cmd_enhance(a, &cfg),
        Command::Rectify(a) => cmd_rectify(a, &cfg),
        Command::Score(a) => cmd_score(a, &cfg),
        Command::Simulate(a) => cmd_simulate(a, &cfg),
    }
}

/// Parse `args` (program name first), run, print, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(stdout, "{e}");
                    return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { EXIT_USAGE } else { EXIT_OK };
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    let threads = match thread_count(cli.threads) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            return e.code();
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let result = match builder.build() {
        Ok(pool) => pool.install(|| dispatch(cli)),
        Err(e) => Err(processing(e)),
    };
    match result {
        Ok(text) => {
            let _ = write!(stdout, "{text}");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips() {
        let cfg = PipelineConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(PipelineConfig::from_json(&text).unwrap(), cfg);
        assert_eq!(PipelineConfig::from_json("{}").unwrap(), cfg);
        assert_eq!((cfg.rectify.window_s, cfg.rectify.shift_s, cfg.collar_s), (120.0, 60.0, 0.25));
    }

    #[test]
    fn config_rejects_unknown_and_invalid() {
        let err = PipelineConfig::from_json(r#"{"rectify": {"windw_s": 3}}"#).unwrap_err();
        assert!(err.starts_with("/rectify"), "{err}");
        assert!(PipelineConfig::from_json(r#"{"stages": 0}"#).unwrap_err().starts_with("/stages"));
        assert!(PipelineConfig::from_json(r#"{"stft": {"window_length": 1000, "hop": 300, "fft_size": 1024, "window": "hann"}}"#).is_err());
    }

    #[test]
    fn usage_errors_exit_64() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["farfield", "sync", "--bogus"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["farfield", "select", "--in", "x.wav", "--policy", "best", "--out", "p.json"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["farfield", "sync", "--in", "x.wav"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(run(["farfield", "--help"], &mut out, &mut err), EXIT_OK);
    }
}
