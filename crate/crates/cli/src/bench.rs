//! Benchmark sweeps over synthetic contexts.
//!
//! For every `(objects, attrs, density, algo)` combination the sweep
//! generates a seeded context, performs one warm-up run, then records the
//! configured number of measured repeats as CSV rows. Contexts are
//! deterministic in the sweep seed; timings of course are not.

use pfca_core::{BackendChoice, FormalContext};

use crate::report::RunReport;
use crate::runner::{execute, AlgoSpec, RunConfig};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub objects: Vec<usize>,
    pub attrs: Vec<usize>,
    pub densities: Vec<f64>,
    pub algos: Vec<AlgoSpec>,
    pub backend: BackendChoice,
    pub workers: usize,
    pub prune: bool,
    pub repeats: usize,
    pub seed: u64,
}

pub fn run_sweep(spec: &BenchSpec) -> Result<Vec<RunReport>, CliError> {
    if spec.objects.is_empty()
        || spec.attrs.is_empty()
        || spec.densities.is_empty()
        || spec.algos.is_empty()
    {
        return Err(CliError::Usage(
            "bench needs at least one value for --objects, --attrs, --density, and --algos".into(),
        ));
    }
    if spec.repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    let mut reports = Vec::new();
    let mut combo = 0u64;
    for &m in &spec.objects {
        for &n in &spec.attrs {
            for &p in &spec.densities {
                combo += 1;
                let context_seed = mix_seed(spec.seed, combo);
                let dataset = format!("gen-m{m}-n{n}-p{p:.2}-s{}", spec.seed);
                for &algo in &spec.algos {
                    let cfg = RunConfig {
                        algo,
                        backend: spec.backend,
                        workers: spec.workers,
                        prune: spec.prune,
                        seed: context_seed,
                        with_payload: false,
                    };
                    // Warm-up, then measured repeats.
                    execute(&dataset, || generate(m, n, p, context_seed), &cfg)?;
                    for _ in 0..spec.repeats {
                        let outcome =
                            execute(&dataset, || generate(m, n, p, context_seed), &cfg)?;
                        reports.push(outcome.report);
                    }
                }
            }
        }
    }
    Ok(reports)
}

fn generate(m: usize, n: usize, p: f64, seed: u64) -> Result<FormalContext, CliError> {
    Ok(FormalContext::generate(m, n, p, seed)?)
}

fn mix_seed(seed: u64, combo: u64) -> u64 {
    let mut x = seed ^ combo.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x
}

/// Median of the `total_s` values in a group of repeat rows.
pub fn median_total(rows: &[&RunReport]) -> f64 {
    let mut totals: Vec<f64> = rows.iter().map(|r| r.timings.total_s).collect();
    totals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    totals[totals.len() / 2]
}
