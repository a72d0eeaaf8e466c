use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{ArgAction, CommandFactory, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "mlc-lab", version, about, args_override_self = true)]
pub struct Cli {
    /// Flat `key = value` file; keys are long flag names.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Quad,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Low,
    High,
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Rep,
    Lowrate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    SumProduct,
    MinSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodeKind {
    Peg,
    Ira,
}

#[derive(Debug, clap::Args)]
pub struct MiCurveArgs {
    #[arg(long, default_value_t = 0.0)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 6.0)]
    pub gamma_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long, value_enum, default_value_t = BackendArg::Quad)]
    pub backend: BackendArg,
    /// Monte-Carlo samples per point.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Initial Gauss-Hermite order; doubled until converged.
    #[arg(long, default_value_t = 64)]
    pub nodes: usize,
    #[arg(long, default_value = "mi_curve.csv")]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct ConvexityArgs {
    #[arg(long = "in", default_value = "mi_curve.csv")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.5)]
    pub b: f64,
    #[arg(long, value_enum, default_value_t = LevelArg::Low)]
    pub level: LevelArg,
}

#[derive(Debug, clap::Args)]
pub struct ArLineArgs {
    #[arg(long, default_value_t = 2.10)]
    pub gamma1: f64,
    /// Comma-separated repetition factors.
    #[arg(long = "M", default_value = "1,2,4,8")]
    pub m: String,
    /// Anchor rate at `gamma1`; defaults to the low-level MI there.
    #[arg(long)]
    pub rate1: Option<f64>,
    /// Read the low-level curve from this file instead of computing it.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Grid step for a computed curve.
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Margin for the reported interval where the line exceeds the curve.
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[arg(long, default_value = "ar_points.csv")]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct SimArgs {
    #[arg(long, default_value = "codes/r12_n1008.alist")]
    pub code: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Rep)]
    pub mode: ModeArg,
    #[arg(long = "M", default_value_t = 1)]
    pub m: usize,
    /// Per-use SNR in dB: `start:step:stop` or a comma list.
    #[arg(long, default_value = "0:0.25:4", allow_hyphen_values = true)]
    pub snr_db: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 100_000)]
    pub max_frames: u64,
    #[arg(long, default_value_t = 0)]
    pub min_frames: u64,
    #[arg(long, default_value_t = 100)]
    pub min_errors: u64,
    /// Frames per worker between stopping checks.
    #[arg(long, default_value_t = 32)]
    pub batch: u64,
    #[arg(long, default_value_t = 50)]
    pub max_iters: usize,
    #[arg(long, value_enum, default_value_t = RuleArg::SumProduct)]
    pub rule: RuleArg,
    /// Scale factor for min-sum.
    #[arg(long, default_value_t = 0.75)]
    pub min_sum_scale: f64,
}

#[derive(Debug, clap::Args)]
pub struct BerSweepArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long, default_value = "ber.csv")]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct SnrSearchArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long, default_value_t = 1e-2)]
    pub target_ber: f64,
    /// Target 1e-6 with enough frames to see it; prints a time estimate first.
    #[arg(long, action = ArgAction::SetTrue)]
    pub full_scale: bool,
    /// Also write every evaluated point.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct GenCodeArgs {
    #[arg(long, value_enum, default_value_t = CodeKind::Peg)]
    pub kind: CodeKind,
    #[arg(long, default_value_t = 1008)]
    pub n: usize,
    /// Design rate; sets the number of checks (peg) or information bits (ira).
    #[arg(long, default_value_t = 0.5)]
    pub rate: f64,
    #[arg(long, default_value_t = 3)]
    pub col_weight: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate low, high and total MI over an SNR grid.
    MiCurve(MiCurveArgs),
    /// Test a curve for strict convexity on `[a, b]`.
    Convexity(ConvexityArgs),
    /// Operating points of repetition on the line through `(gamma1, R1)`.
    ArLine(ArLineArgs),
    /// Coded BER of the low level over an SNR grid.
    BerSweep(BerSweepArgs),
    /// Lowest SNR reaching a target BER, by bisection over the grid ends.
    SnrSearch(SnrSearchArgs),
    /// Write a random LDPC code as an alist file.
    GenCode(GenCodeArgs),
}

/// Takes the value of `--config` out of `argv`, if present.
fn config_path(argv: &[String]) -> anyhow::Result<Option<PathBuf>> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--" {
            break;
        }
        if a == "--config" {
            let Some(p) = it.next() else {
                bail!("--config needs a path");
            };
            return Ok(Some(PathBuf::from(p)));
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Ok(Some(PathBuf::from(p)));
        }
    }
    Ok(None)
}

/// Turns config entries into flags for `subcommand`. Keys that belong to a
/// different subcommand are skipped so one file can serve every tool.
fn config_flags(text: &str, subcommand: &str) -> anyhow::Result<Vec<String>> {
    let entries = mlc_core::config::parse_config(text)?;
    let root = Cli::command();
    let Some(sub) = root.find_subcommand(subcommand) else {
        return Ok(Vec::new());
    };
    let known_anywhere = |key: &str| {
        root.get_subcommands()
            .any(|s| s.get_arguments().any(|a| a.get_long() == Some(key)))
    };
    let mut flags = Vec::new();
    for e in entries {
        if e.key == "config" {
            bail!("line {}: config files cannot include other config files", e.line);
        }
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(e.key.as_str())) else {
            if known_anywhere(&e.key) {
                continue;
            }
            bail!("line {}: unknown option {:?}", e.line, e.key);
        };
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match e.value.as_str() {
                "true" => flags.push(format!("--{}", e.key)),
                "false" => {}
                v => bail!("line {}: {:?} takes true or false, not {v:?}", e.line, e.key),
            }
        } else {
            flags.push(format!("--{}={}", e.key, e.value));
        }
    }
    Ok(flags)
}

/// Parses `argv`, splicing config-file flags in ahead of the command-line ones.
pub fn parse(argv: Vec<String>) -> anyhow::Result<Cli> {
    let Some(path) = config_path(&argv)? else {
        return Ok(Cli::try_parse_from(argv)?);
    };
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let names: Vec<String> = Cli::command()
        .get_subcommands()
        .map(|s| s.get_name().to_string())
        .collect();
    let Some(pos) = argv.iter().position(|a| names.contains(a)) else {
        return Ok(Cli::try_parse_from(argv)?);
    };
    let flags = config_flags(&text, &argv[pos])
        .with_context(|| format!("in config {}", path.display()))?;
    let mut merged = argv[..=pos].to_vec();
    merged.extend(flags);
    merged.extend_from_slice(&argv[pos + 1..]);
    Ok(Cli::try_parse_from(merged)?)
}
