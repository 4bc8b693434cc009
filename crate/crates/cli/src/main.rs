use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use treeforge_core::baire::EnumeratedSet;
use treeforge_core::scenario::{export_dot, run_file, sweep, sweep_csv, DotObject, RunOptions, SweepPredicate};

#[derive(Parser)]
#[command(name = "treeforge", version, about = "Batch runner for perfect-tree surgery scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenario files (or every *.json in a directory) and write reports.
    Run {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads.
        #[arg(long, env = "TREEFORGE_JOBS", default_value_t = 1)]
        jobs: usize,
        /// Seed for generated corpora.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate a window predicate over a range and print CSV.
    Sweep {
        #[arg(long, value_enum)]
        predicate: Predicate,
        /// X as JSON, e.g. '{"affine": {"a": 2, "b": 0}}'.
        #[arg(long = "x")]
        x: String,
        #[arg(long = "y")]
        y: String,
        #[arg(long, default_value_t = 0)]
        from: u64,
        #[arg(long)]
        to: u64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "TREEFORGE_JOBS", default_value_t = 1)]
        jobs: usize,
    },
    /// Write a DOT figure of a tree reference or a condition's stem tree.
    ExportDot {
        /// A JSON file, inline JSON, or a tree name.
        object: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long)]
        value_bound: Option<u64>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Predicate {
    Dominates,
    WeaklyDominates,
}

fn scenario_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut inner: Vec<PathBuf> = std::fs::read_dir(p)
                .with_context(|| format!("reading {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            inner.sort();
            files.extend(inner);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn run(paths: &[PathBuf], out: &Path, opts: RunOptions) -> Result<u8> {
    let mut worst = 0;
    for f in scenario_files(paths)? {
        let report = run_file(&f, out, opts).with_context(|| format!("writing reports to {}", out.display()))?;
        let status = match report.exit_code {
            0 => "pass".to_string(),
            1 => "FAIL".to_string(),
            _ => format!("ERROR {}", report.error.as_deref().unwrap_or("")),
        };
        println!("{}: {status}", f.display());
        worst = worst.max(report.exit_code as u8);
    }
    Ok(worst)
}

fn parse_set(text: &str) -> Result<EnumeratedSet> {
    serde_json::from_str(text).with_context(|| format!("bad set {text:?}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { paths, out, jobs, seed } => run(&paths, &out, RunOptions { seed, jobs }),
        Command::Sweep {
            predicate,
            x,
            y,
            from,
            to,
            out,
            jobs,
        } => (|| {
            if from > to {
                bail!("empty range {from}..={to}");
            }
            let predicate = match predicate {
                Predicate::Dominates => SweepPredicate::Dominates,
                Predicate::WeaklyDominates => SweepPredicate::WeaklyDominates,
            };
            let (x, y) = (parse_set(&x)?, parse_set(&y)?);
            let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
            let rows = pool.install(|| sweep(predicate, &x, &y, from, to))?;
            let csv = sweep_csv(predicate, &rows);
            match out {
                Some(path) => std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{csv}"),
            }
            Ok(0)
        })(),
        Command::ExportDot {
            object,
            out,
            depth,
            value_bound,
        } => (|| {
            let obj = DotObject::parse(&object)?;
            let dot = export_dot(&obj, depth, value_bound)?;
            std::fs::write(&out, dot).with_context(|| format!("writing {}", out.display()))?;
            Ok(0)
        })(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("treeforge: {e:#}");
            ExitCode::from(2)
        }
    }
}
