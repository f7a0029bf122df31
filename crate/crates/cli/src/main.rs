use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use catsd::document::{Model, ProblemDocument};
use catsd::engine;
use catsd::export::{self, ClassificationDocument};
use catsd::hierarchy::NodeId;
use catsd::Error;
use clap::{Parser, Subcommand};

/// Hierarchical nominal classification with stochastic acceptability analysis.
#[derive(Parser)]
#[command(name = "catsd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a problem document and check that every category's decks admit parameters.
    Check {
        file: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Sample compatible parameters and write assignment frequencies per node.
    Smaa {
        file: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        burn_in: Option<usize>,
        #[arg(long)]
        thinning: Option<usize>,
        /// Output directory. Defaults to a run directory under $CATSD_OUT.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base directory for runs when --out is not given.
        #[arg(long, env = "CATSD_OUT", default_value = "catsd-runs", hide_env_values = true)]
        out_base: PathBuf,
    },
    /// Enumerate loss-minimizing classifications from a stored distribution.
    Classify {
        file: PathBuf,
        /// Directory written by `smaa`.
        #[arg(long)]
        dist: PathBuf,
        /// Node name or path (g0, g2, g(3,1), MS). Defaults to the root.
        #[arg(long, default_value = "g0")]
        node: String,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Json(_) => Failure::Usage(e.to_string()),
            other => Failure::Domain(other.to_string()),
        }
    }
}

fn load(file: &Path) -> Result<(Vec<u8>, Model), Failure> {
    let bytes = fs::read(file).map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Failure::Usage(format!("{}: not UTF-8", file.display())))?;
    let model = ProblemDocument::from_json(&text)
        .and_then(|d| d.compile())
        .map_err(|e| match Failure::from(e) {
            Failure::Usage(m) => Failure::Usage(format!("{}: {m}", file.display())),
            Failure::Domain(m) => Failure::Domain(format!("{}: {m}", file.display())),
        })?;
    Ok((bytes, model))
}

fn check(file: &Path, json: bool) -> Result<(), Failure> {
    let (_, model) = load(file)?;
    let report = engine::feasibility(&model);
    if json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(|e| Failure::Domain(e.to_string()))?);
    } else {
        print!("{}", report.render());
    }
    if report.all_feasible() {
        Ok(())
    } else {
        let bad: Vec<&str> =
            report.categories.iter().filter(|c| !c.feasible).map(|c| c.category.as_str()).collect();
        Err(Failure::Domain(format!("no compatible parameters for {}", bad.join(", "))))
    }
}

#[allow(clippy::too_many_arguments)]
fn smaa(
    file: &Path,
    samples: Option<usize>,
    seed: Option<u64>,
    burn_in: Option<usize>,
    thinning: Option<usize>,
    out: Option<PathBuf>,
    out_base: PathBuf,
) -> Result<(), Failure> {
    let (bytes, model) = load(file)?;
    let mut settings = model.smaa;
    settings.samples = samples.unwrap_or(settings.samples);
    settings.seed = seed.unwrap_or(settings.seed);
    settings.burn_in = burn_in.unwrap_or(settings.burn_in);
    settings.thinning = thinning.unwrap_or(settings.thinning);
    if settings.samples == 0 {
        return Err(Failure::Usage("--samples must be positive".into()));
    }
    let report = engine::feasibility(&model);
    if !report.all_feasible() {
        eprint!("{}", report.render());
        return Err(Failure::Domain("SMAA needs every category to be feasible".into()));
    }
    let dist = engine::smaa(&model, &settings)?;
    let dir = out.unwrap_or_else(|| {
        let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
        out_base.join(format!("{stem}-seed{}-n{}", settings.seed, settings.samples))
    });
    let manifest = export::write_run(&dir, &bytes, &settings, &model.problem.hierarchy, &dist)?;
    println!("{} samples, seed {}, written to {}", settings.samples, settings.seed, dir.display());
    for f in &manifest.files {
        println!("  {f}");
    }
    Ok(())
}

fn classify(file: &Path, dist_dir: &Path, node: &str, json: bool) -> Result<(), Failure> {
    let (bytes, model) = load(file)?;
    let dist = export::read_distribution(dist_dir)?;
    if let Ok(m) = export::read_manifest(dist_dir) {
        if m.input_sha256 != export::sha256_hex(&bytes) {
            eprintln!("warning: {} was produced from a different input file", dist_dir.display());
        }
    }
    let h = &model.problem.hierarchy;
    let id: NodeId = h.resolve(node).map_err(|e| Failure::Usage(e.to_string()))?;
    let req = model.requirements_at(&id);
    let c = engine::classify(&dist, &id, h.name(&id), req)?;
    let doc = ClassificationDocument::new(&c, &dist);
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Domain(e.to_string()))? + "\n";
    let stem = export::node_file_name(&id).replace("node_", "classification_").replace(".csv", ".json");
    fs::write(dist_dir.join(&stem), &text).map_err(|e| Failure::Domain(e.to_string()))?;
    if json {
        print!("{text}");
    } else {
        print!("{}", c.render(&dist));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { file, json } => check(&file, json),
        Command::Smaa { file, samples, seed, burn_in, thinning, out, out_base } => {
            smaa(&file, samples, seed, burn_in, thinning, out, out_base)
        }
        Command::Classify { file, dist, node, json } => classify(&file, &dist, &node, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
