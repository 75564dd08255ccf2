mod render;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cdholo::algebra::{run_law_suite, MAX_LEVEL};
use cdholo::embedding::{whitney_reduce, Settings, Target};
use cdholo::manifold::{Manifold, ManifoldConfig, BUILTINS};

/// Cayley-Dickson algebra laws, holomorphic atlases and Whitney reduction.
#[derive(Parser, Debug)]
#[command(name = "cdholo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the algebra laws at one level.
    Laws(LawsArgs),
    /// Check the atlas of a manifold on samples.
    Validate(ValidateArgs),
    /// Reduce the product embedding to A_r^{2m+1}.
    Embed(EmbedArgs),
    /// Reduce the product embedding to A_r^{2m}, checking rank only.
    Immerse(EmbedArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Report path; defaults to stdout, or a generated name under $CDHOLO_OUTPUT_DIR.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct LawsArgs {
    #[arg(long, short, default_value_t = 3)]
    level: u32,
    /// Random elements for the sampled identities.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct ManifoldArgs {
    /// Built-in name or path to a TOML config.
    #[arg(long, default_value = "sphere")]
    manifold: String,
    /// Algebra level r; overrides the config file.
    #[arg(long, short)]
    level: Option<u32>,
    /// Complex-style dimension m; built-ins only.
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    manifold: ManifoldArgs,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    #[command(flatten)]
    manifold: ManifoldArgs,
    #[arg(long)]
    target_dim: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    tangent_samples: usize,
    #[arg(long, default_value_t = 10_000)]
    secant_pairs: usize,
    /// Tangent vectors per sampled point.
    #[arg(long, default_value_t = 8)]
    spread: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Angular margin in radians.
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 1e-6)]
    sigma_tol: f64,
    #[arg(long, default_value_t = 1e-4)]
    ratio_tol: f64,
    #[arg(long, default_value_t = 1000)]
    verify_points: usize,
    #[arg(long, default_value_t = 10_000)]
    verify_pairs: usize,
    /// Include wall-clock times in the report.
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    out: OutputArgs,
}

/// An error that maps to exit status 2.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fatal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<bool, Fatal> {
    match command {
        Command::Laws(a) => {
            if a.level > MAX_LEVEL {
                return Err(Fatal(format!("level must be at most {MAX_LEVEL}, got {}", a.level)));
            }
            positive_count("samples", a.samples)?;
            let report = run_law_suite(a.level, a.samples, a.out.seed);
            let pass = report.all_pass();
            let body = match a.out.format {
                Format::Text => render::laws_text(&report),
                Format::Json => render::envelope("laws", &report),
            };
            emit(&a.out, &format!("laws-r{}", a.level), &body)?;
            Ok(pass)
        }
        Command::Validate(a) => {
            positive_count("samples", a.samples)?;
            let man = load_manifold(&a.manifold)?;
            let report = man.validate(a.samples, a.out.seed)?;
            let pass = report.all_pass();
            let body = match a.out.format {
                Format::Text => render::atlas_text(&report),
                Format::Json => render::envelope("validate", &report),
            };
            emit(&a.out, &format!("validate-{}-r{}", slug(man.name()), man.level()), &body)?;
            Ok(pass)
        }
        Command::Embed(a) => reduce(a, Target::Embedding),
        Command::Immerse(a) => reduce(a, Target::Immersion),
    }
}

fn reduce(a: EmbedArgs, target: Target) -> Result<bool, Fatal> {
    if let Some(r) = a.manifold.level.filter(|&r| r < 2) {
        return Err(Fatal(format!(
            "{} requires r >= 2 (holomorphic manifolds are defined over A_r with 2 <= r), got r = {r}",
            target.name()
        )));
    }
    for (name, v) in [
        ("tangent-samples", a.tangent_samples),
        ("secant-pairs", a.secant_pairs),
        ("spread", a.spread),
        ("trials", a.trials),
        ("verify-points", a.verify_points),
        ("verify-pairs", a.verify_pairs),
    ] {
        positive_count(name, v)?;
    }
    for (name, v) in [("epsilon", a.epsilon), ("sigma-tol", a.sigma_tol), ("ratio-tol", a.ratio_tol)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Fatal(format!("--{name} must be positive, got {v}")));
        }
    }
    let man = load_manifold(&a.manifold)?;
    if man.level() < 2 {
        return Err(Fatal(format!("{} requires r >= 2, the manifold has r = {}", target.name(), man.level())));
    }
    let settings = Settings {
        tangent_samples: a.tangent_samples,
        secant_pairs: a.secant_pairs,
        spread: a.spread,
        trials: a.trials,
        epsilon: a.epsilon,
        sigma_tol: a.sigma_tol,
        ratio_tol: a.ratio_tol,
        verify_points: a.verify_points,
        verify_pairs: a.verify_pairs,
        target_dim: a.target_dim,
        timings: a.timings,
    };
    let stem = format!("{}-{}-r{}-seed{}", target.name(), slug(man.name()), man.level(), a.out.seed);
    let (report, _) = whitney_reduce(Arc::new(man), target, &settings, a.out.seed)?;
    let body = match a.out.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    emit(&a.out, &stem, &body)?;
    Ok(report.passed())
}

fn positive_count(name: &str, v: usize) -> Result<(), Fatal> {
    if v == 0 {
        return Err(Fatal(format!("--{name} must be at least 1")));
    }
    Ok(())
}

fn load_manifold(a: &ManifoldArgs) -> Result<Manifold, Fatal> {
    if BUILTINS.contains(&a.manifold.as_str()) {
        return Ok(Manifold::builtin(&a.manifold, a.level.unwrap_or(2), a.m.unwrap_or(1))?);
    }
    let path = Path::new(&a.manifold);
    if !path.exists() {
        return Err(Fatal(format!(
            "'{}' is neither a built-in manifold ({}) nor a config file",
            a.manifold,
            BUILTINS.join(", ")
        )));
    }
    let config = ManifoldConfig::from_file(path)?;
    Ok(config.build(a.level, a.m)?)
}

fn slug(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

/// Write `body` to the requested destination; files are replaced atomically.
fn emit(out: &OutputArgs, stem: &str, body: &str) -> Result<(), Fatal> {
    let path = match (&out.output, std::env::var_os("CDHOLO_OUTPUT_DIR")) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) if !dir.is_empty() => {
            let ext = match out.format {
                Format::Text => "txt",
                Format::Json => "json",
            };
            Some(PathBuf::from(dir).join(format!("{stem}.{ext}")))
        }
        _ => None,
    };
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(body.as_bytes()).map_err(|e| Fatal(format!("writing stdout: {e}")))?;
        return Ok(());
    };
    write_atomic(&path, body.as_bytes()).map_err(|e| Fatal(format!("writing {}: {e}", path.display())))?;
    eprintln!("report written to {}", path.display());
    Ok(())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
