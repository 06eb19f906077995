use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use pfca_cli::io::{read_context, write_context, ContextFormat};
use pfca_cli::report::{write_csv, write_report};
use pfca_cli::runner::{execute, AlgoSpec, RunConfig};
use pfca_cli::scale::one_hot_from_csv;
use pfca_cli::{bench, CliError};
use pfca_core::{verify_equivalence, BackendChoice, Direction, FormalContext};

/// Formal concept analysis over homomorphically encrypted contexts.
#[derive(Parser)]
#[command(name = "pfca", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic context file (plain format)
    Gen {
        #[arg(long)]
        objects: usize,
        #[arg(long)]
        attrs: usize,
        /// Probability of a 1 in each cell, strictly between 0 and 1
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Enumerate plaintext concepts of a context file
    Lattice {
        path: PathBuf,
        #[arg(long, default_value = "tem", value_parser = ["tem", "tia"])]
        algo: String,
        /// Report file (.json or .csv)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the privacy-preserving pipeline end to end
    Run {
        path: PathBuf,
        /// f enumerates object subsets, g attribute subsets, auto the smaller side
        #[arg(long, default_value = "auto", value_parser = ["f", "g", "auto"])]
        direction: String,
        #[arg(long, default_value = "oracle", value_parser = ["oracle", "she"])]
        backend: String,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value = "on", value_parser = ["on", "off"])]
        prune: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report file (.json or .csv)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that the pipeline reproduces the classical concept set
    Verify {
        path: PathBuf,
        #[arg(long, default_value = "oracle", value_parser = ["oracle", "she"])]
        backend: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sweep synthetic contexts and emit timing rows as CSV
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        objects: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        attrs: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        density: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        algos: Vec<String>,
        #[arg(long, default_value = "oracle", value_parser = ["oracle", "she"])]
        backend: String,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value = "on", value_parser = ["on", "off"])]
        prune: String,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// One-hot binarization of a categorical CSV into a .cxt context
    Scale {
        path: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

const SECURITY_NOTE: &str =
    "note: the she backend is a toy scheme for functional testing; it makes no cryptographic security claim";

/// Above this many concepts, `run` and `lattice` keep stdout terse.
const STDOUT_PAYLOAD_LIMIT: usize = 100;

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen {
            objects,
            attrs,
            density,
            seed,
            out,
        } => {
            let ctx = FormalContext::generate(objects, attrs, density, seed)?;
            write_context(&ctx, &out, ContextFormat::from_path(&out))?;
            let stats = ctx.stats();
            println!(
                "wrote {objects}x{attrs} context with density {:.4} to {}",
                stats.density,
                out.display()
            );
            Ok(())
        }
        Command::Lattice { path, algo, out } => {
            let algo = AlgoSpec::parse(&algo)
                .ok_or_else(|| CliError::Usage(format!("unknown algorithm {algo:?}")))?;
            let cfg = RunConfig {
                algo,
                backend: BackendChoice::Oracle,
                workers: 1,
                prune: false,
                seed: 0,
                with_payload: true,
            };
            let outcome = execute(&dataset_name(&path), || read_context(&path), &cfg)?;
            println!("concepts={}", outcome.report.concept_count);
            if outcome.report.concept_count <= STDOUT_PAYLOAD_LIMIT {
                for concept in &outcome.concepts {
                    println!("  {}", format_concept(concept, &outcome.context));
                }
            } else {
                println!("(payload omitted from stdout; write it with --out)");
            }
            print_timings(&outcome.report.timings);
            if let Some(out) = out {
                write_report(&outcome.report, &out)?;
            }
            Ok(())
        }
        Command::Run {
            path,
            direction,
            backend,
            workers,
            prune,
            seed,
            out,
        } => {
            if workers == 0 {
                return Err(CliError::Usage("--workers must be at least 1".into()));
            }
            let direction = match direction.as_str() {
                "f" => Some(Direction::ObjectFirst),
                "g" => Some(Direction::AttributeFirst),
                _ => None,
            };
            let backend = parse_backend(&backend)?;
            let cfg = RunConfig {
                algo: AlgoSpec::Pfca(direction),
                backend,
                workers,
                prune: prune == "on",
                seed,
                with_payload: true,
            };
            let outcome = execute(&dataset_name(&path), || read_context(&path), &cfg)?;
            println!(
                "algo={} backend={} workers={} concepts={}",
                outcome.report.algo,
                outcome.report.backend,
                outcome.report.workers,
                outcome.report.concept_count
            );
            if outcome.report.concept_count <= STDOUT_PAYLOAD_LIMIT {
                println!("privacy-preserving concepts:");
                for pc in outcome.privacy.as_deref().unwrap_or_default() {
                    println!("  {}", format_privacy(pc, &outcome.context));
                }
                println!("recovered concepts:");
                for concept in &outcome.concepts {
                    println!("  {}", format_concept(concept, &outcome.context));
                }
            } else {
                println!("(payload omitted from stdout; write it with --out)");
            }
            print_timings(&outcome.report.timings);
            for report in &outcome.worker_reports {
                println!(
                    "worker {}: visited={} pruned={} found={} wall={:.6}s",
                    report.worker_id,
                    report.subsets_visited,
                    report.subsets_pruned,
                    report.concepts_found,
                    report.wall_time
                );
            }
            if backend == BackendChoice::She {
                println!("{SECURITY_NOTE}");
            }
            if let Some(out) = out {
                write_report(&outcome.report, &out)?;
            }
            Ok(())
        }
        Command::Verify {
            path,
            backend,
            seed,
        } => {
            let backend = parse_backend(&backend)?;
            let ctx = read_context(&path)?;
            let report = verify_equivalence(&ctx, backend, seed)?;
            println!("C_PFCA = C_FCA = {}", report.classical_count);
            if backend == BackendChoice::She {
                println!("{SECURITY_NOTE}");
            }
            Ok(())
        }
        Command::Bench {
            objects,
            attrs,
            density,
            algos,
            backend,
            workers,
            prune,
            repeats,
            seed,
            out,
        } => {
            if workers == 0 {
                return Err(CliError::Usage("--workers must be at least 1".into()));
            }
            let algos = algos
                .iter()
                .map(|name| {
                    AlgoSpec::parse(name)
                        .ok_or_else(|| CliError::Usage(format!("unknown algorithm {name:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let spec = bench::BenchSpec {
                objects,
                attrs,
                densities: density,
                algos,
                backend: parse_backend(&backend)?,
                workers,
                prune: prune == "on",
                repeats,
                seed,
            };
            let reports = bench::run_sweep(&spec)?;
            write_csv(&reports, &out)?;
            println!("wrote {} rows to {}", reports.len(), out.display());
            Ok(())
        }
        Command::Scale { path, out } => {
            let text = std::fs::read_to_string(&path)?;
            let ctx = one_hot_from_csv(&text, &path.display().to_string())?;
            write_context(&ctx, &out, ContextFormat::Cxt)?;
            println!(
                "wrote {}x{} context to {}",
                ctx.object_count(),
                ctx.attribute_count(),
                out.display()
            );
            Ok(())
        }
    }
}

fn parse_backend(name: &str) -> Result<BackendChoice, CliError> {
    BackendChoice::parse(name).ok_or_else(|| CliError::Usage(format!("unknown backend {name:?}")))
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn format_concept(concept: &pfca_core::Concept, ctx: &FormalContext) -> String {
    let objects = label_list(&concept.extent, ctx.object_labels());
    let attributes = label_list(&concept.intent, ctx.attribute_labels());
    format!("({objects}, {attributes})")
}

fn format_privacy(pc: &pfca_core::PrivacyConcept, ctx: &FormalContext) -> String {
    match pc {
        pfca_core::PrivacyConcept::FInduced { extent, intent_size } => {
            format!("({}, {intent_size})", label_list(extent, ctx.object_labels()))
        }
        pfca_core::PrivacyConcept::GInduced { extent_size, intent } => {
            format!(
                "({extent_size}, {})",
                label_list(intent, ctx.attribute_labels())
            )
        }
    }
}

fn label_list(indices: &[u32], labels: &[String]) -> String {
    if indices.is_empty() {
        return "{}".to_string();
    }
    let names: Vec<&str> = indices
        .iter()
        .map(|&i| labels[i as usize].as_str())
        .collect();
    format!("{{{}}}", names.join(","))
}

fn print_timings(timings: &pfca_cli::report::StageTimings) {
    println!(
        "timings: read={:.6}s encrypt={:.6}s process={:.6}s extract={:.6}s total={:.6}s",
        timings.read_s, timings.encrypt_s, timings.process_s, timings.extract_s, timings.total_s
    );
}
