//! Command-line front end.
//!
//! Every long flag can also come from a `key = value` file passed with
//! `--config`; flags given on the command line win. The augmentation output
//! directory can be set with `FREQAUG_OUT`, which sits between the command
//! line and the config file.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::augment::DEFAULT_ALPHA;
use crate::error::{Error, Result};
use crate::pipeline::{self, LambdaMode, RunConfig};
use crate::selftest;

pub const OUT_ENV: &str = "FREQAUG_OUT";

#[derive(Debug, Parser)]
#[command(name = "freqaug", version, about = "Fourier-domain augmentation with soft-thresholded amplitude mixing")]
pub struct Cli {
    /// Key-value file supplying defaults for any long flag.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Augment every source-domain image with a randomly drawn target-domain image.
    Augment(AugmentArgs),
    /// Print the leave-one-domain-out plan.
    Splits(SplitsArgs),
    /// Score predicted masks against ground truth and write a CSV report.
    Metrics(MetricsArgs),
    /// Write a log-amplitude heatmap of an image's spectrum.
    Spectrum(SpectrumArgs),
    /// Run the built-in oracle checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// Dataset root containing domain1 .. domainK.
    #[arg(long)]
    pub root: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub source_domains: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub target_domains: Vec<usize>,
    /// Fixed strength in (0, 1] or `uniform`.
    #[arg(long, default_value = "uniform")]
    pub lambda: String,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Plain amplitude mixing without soft thresholding.
    #[arg(long)]
    pub no_st: bool,
    /// Working resolution as HxW.
    #[arg(long, default_value = "256x256")]
    pub resize: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Mix only a centred low-frequency square of this side fraction.
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long, env = OUT_ENV)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitsArgs {
    #[arg(long, conflicts_with = "domains", required_unless_present = "domains")]
    pub root: Option<PathBuf>,
    /// Plan for this many domains without reading a dataset.
    #[arg(long)]
    pub domains: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// Output CSV file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// Parses `HxW`.
pub fn parse_resize(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidParameter(format!("resize must look like 256x256, got '{s}'"));
    let (h, w) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    let w: usize = w.trim().parse().map_err(|_| bad())?;
    if h == 0 || w == 0 {
        return Err(bad());
    }
    Ok((h, w))
}

/// Reads `key = value` lines; `#` starts a comment. Keys may use `-` or `_`.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", n + 1)));
        }
        out.push((key, value.trim().trim_matches('"').to_string()));
    }
    Ok(out)
}

fn has_flag(args: &[OsString], long: &str) -> bool {
    let exact = format!("--{long}");
    let prefix = format!("--{long}=");
    args.iter()
        .filter_map(|a| a.to_str())
        .any(|a| a == exact || a.starts_with(&prefix))
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let a = a.to_str()?;
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn subcommand_name(args: &[OsString]) -> Option<String> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_str()?;
        if a == "--config" {
            it.next();
        } else if !a.starts_with('-') {
            return Some(a.to_string());
        }
    }
    None
}

/// Appends config-file values for flags the subcommand accepts and the
/// command line does not already set. Keys no subcommand knows are errors.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let entries = parse_config(&text)?;
    let Some(sub) = subcommand_name(&args) else {
        return Ok(args);
    };
    let command = Cli::command();
    let Some(sub_cmd) = command.find_subcommand(&sub) else {
        return Ok(args);
    };
    let mut out = args.clone();
    for (key, value) in entries {
        let Some(arg) = sub_cmd.get_arguments().find(|a| a.get_long() == Some(key.as_str())) else {
            // Keys for other subcommands are allowed so one file can serve all of them.
            let known = key == "config"
                || command
                    .get_subcommands()
                    .flat_map(|c| c.get_arguments())
                    .any(|a| a.get_long() == Some(key.as_str()));
            if known {
                continue;
            }
            return Err(Error::Config(format!("unknown key '{key}'")));
        };
        if has_flag(&args, &key) {
            continue;
        }
        if key == "out" && sub == "augment" && std::env::var_os(OUT_ENV).is_some() {
            continue;
        }
        if matches!(arg.get_action(), clap::ArgAction::SetTrue) {
            match value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => out.push(format!("--{key}").into()),
                "false" | "no" | "0" => {}
                other => return Err(Error::Config(format!("'{key}' expects true/false, got '{other}'"))),
            }
        } else {
            out.push(format!("--{key}={value}").into());
        }
    }
    Ok(out)
}

fn augment(args: &AugmentArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut config = RunConfig::new(args.source_domains.clone(), args.target_domains.clone(), &args.out);
    config.lambda_mode = args.lambda.parse::<LambdaMode>()?;
    config.alpha = args.alpha;
    config.st_enabled = !args.no_st;
    config.resize = parse_resize(&args.resize)?;
    config.seed = args.seed;
    config.low_freq_window = args.window;
    config.validate()?;
    let datasets = pipeline::ingest(&args.root)?;
    let manifest = pipeline::run_augmentation(&config, &datasets)?;
    let _ = writeln!(
        stdout,
        "augmented {} images; manifest {}",
        manifest.rows.len(),
        manifest.path.display()
    );
    Ok(())
}

fn splits(args: &SplitsArgs, stdout: &mut dyn Write) -> Result<()> {
    let ids: Vec<usize> = match (&args.root, args.domains) {
        (Some(root), _) => pipeline::ingest(root)?.iter().map(|d| d.domain_id).collect(),
        (None, Some(k)) => (1..=k).collect(),
        (None, None) => unreachable!("clap requires one of --root/--domains"),
    };
    for (i, split) in pipeline::leave_one_out(&ids)?.iter().enumerate() {
        let _ = writeln!(stdout, "split {}: {split}", i + 1);
    }
    Ok(())
}

fn metrics(args: &MetricsArgs, stdout: &mut dyn Write) -> Result<()> {
    let table = pipeline::run_metrics(&args.pred, &args.truth)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    pipeline::write_metrics_csv(&table, &args.out)?;
    for a in &table.average {
        let _ = writeln!(
            stdout,
            "{}: DSC {:.2}  HD {}  ASD {}",
            a.label,
            a.dsc * 100.0,
            a.hd.map_or("-".into(), |v| format!("{v:.2}")),
            a.asd.map_or("-".into(), |v| format!("{v:.2}")),
        );
    }
    Ok(())
}

fn spectrum(args: &SpectrumArgs, stdout: &mut dyn Write) -> Result<()> {
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    pipeline::inspect_spectrum(&args.image, &args.out)?;
    let _ = writeln!(stdout, "wrote {}", args.out.display());
    Ok(())
}

fn run_selftest(args: &SelftestArgs, stdout: &mut dyn Write) -> Result<bool> {
    let checks = selftest::run_all(args.seed);
    for c in &checks {
        let _ = writeln!(stdout, "[{}] {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(checks.iter().all(|c| c.passed))
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Augment(a) => augment(a, stdout).map(|_| 0),
        Command::Splits(a) => splits(a, stdout).map(|_| 0),
        Command::Metrics(a) => metrics(a, stdout).map(|_| 0),
        Command::Spectrum(a) => spectrum(a, stdout).map(|_| 0),
        Command::Selftest(a) => run_selftest(a, stdout).map(|ok| if ok { 0 } else { 1 }),
    }
}

/// Full command-line entry point; returns the process exit code
/// (0 success, 1 validation error, 2 I/O error).
pub fn main_with(args: impl IntoIterator<Item = OsString>) -> i32 {
    let args: Vec<OsString> = args.into_iter().collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut stdout = std::io::stdout().lock();
    match execute(&cli, &mut stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
