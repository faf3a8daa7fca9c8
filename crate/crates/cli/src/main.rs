use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use confined_langevin::harness::with_threads;
use confined_langevin::models::registry::{list_presets, preset};
use confined_langevin::study::{parse_config, Format, Overrides, Stamp, Study};
use confined_langevin::{Error, SchemeId};

/// Confined Langevin integrators: convergence studies, collision
/// statistics and posterior sampling.
#[derive(Parser)]
#[command(name = "confined", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or config file and write report files.
    Run(RunArgs),
    /// Check a config file (or preset) without running it.
    Validate {
        /// Config file; a bare study or a stamp.
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
    },
    /// List the presets whose name contains FILTER.
    List { filter: Option<String> },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    preset: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Integrator short name: pac, acp, obabo, baoab, oabao, boaob, aboba, aobao, bab, pla, rla.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "CONFINED_THREADS")]
    threads: Option<usize>,
    #[arg(long, default_value = ".")]
    output: PathBuf,
    #[arg(long, default_value = "csv")]
    format: String,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_UNDERPOWERED: u8 = 4;

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Underpowered { .. }) => EXIT_UNDERPOWERED,
        Some(Error::Config(_) | Error::UnknownPreset(_) | Error::InvalidDomain(_) | Error::DimensionMismatch { .. }) => {
            EXIT_CONFIG
        }
        Some(_) => EXIT_NUMERIC,
        // Output directory or file-system failures.
        None => 1,
    }
}

fn load(preset_name: Option<&str>, config: Option<&Path>) -> anyhow::Result<(Study, String)> {
    match (preset_name, config) {
        (Some(name), None) => Ok((preset(name)?, name.to_string())),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let (study, name) = parse_config(&text)?;
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run").to_string();
            Ok((study, name.unwrap_or(stem)))
        }
        _ => Err(Error::Config("give exactly one of --preset and --config".into()).into()),
    }
}

/// Writes every file into a scratch directory first and moves them into
/// place only once all writes succeeded.
fn publish(dir: &Path, files: &[(String, String)]) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let scratch = tempfile::Builder::new().prefix(".confined-").tempdir_in(dir)?;
    for (name, body) in files {
        fs::write(scratch.path().join(name), body).with_context(|| format!("writing {name}"))?;
    }
    let mut out = Vec::new();
    for (name, _) in files {
        let dest = dir.join(name);
        fs::rename(scratch.path().join(name), &dest).with_context(|| format!("moving {name} into place"))?;
        out.push(dest);
    }
    Ok(out)
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let format: Format = args.format.parse()?;
    let (mut study, name) = load(args.preset.as_deref(), args.config.as_deref())?;
    let scheme = args
        .scheme
        .as_deref()
        .map(|s| SchemeId::try_from(s.to_string()))
        .transpose()?;
    study.apply(&Overrides { scheme, h: args.h, t_final: args.t_final, m: args.m, seed: args.seed })?;
    if args.threads == Some(0) {
        bail!(Error::Config("--threads must be at least 1".into()));
    }

    let outcome = with_threads(args.threads, || study.run())??;
    let mut files = outcome.files(&name, study.kind(), format);
    let stamp = Stamp { version: env!("CARGO_PKG_VERSION").to_string(), name: name.clone(), study };
    let mut text = serde_json::to_string_pretty(&stamp)?;
    text.push('\n');
    files.push(("stamp.json".to_string(), text));
    for path in publish(&args.output, &files)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn validate(config: Option<PathBuf>, preset_name: Option<String>) -> anyhow::Result<()> {
    if config.is_none() && preset_name.is_none() {
        return Err(anyhow!(Error::Config("give a config file or --preset".into())));
    }
    let (study, _) = load(preset_name.as_deref(), config.as_deref())?;
    let diags = study.diagnostics();
    if diags.is_empty() {
        println!("ok: {} study", study.kind());
        return Ok(());
    }
    for d in &diags {
        println!("{d}");
    }
    Err(Error::Config(format!("{} problem(s) found", diags.len())).into())
}

fn list(filter: Option<String>) {
    let rows = list_presets(filter.as_deref());
    let w = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = std::io::stdout().lock();
    for r in rows {
        // A closed pipe (e.g. `| head`) just ends the listing.
        if writeln!(out, "{:w$}  {}  [{}]", r.name, r.description, r.anchor).is_err() {
            break;
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Validate { config, preset } => validate(config, preset),
        Command::List { filter } => {
            list(filter);
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
