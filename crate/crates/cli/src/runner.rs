//! Executes one run (plaintext enumeration or the encrypted pipeline) with
//! stage timing: acquiring the matrix, encryption and key setup, power-set
//! processing, and concept extraction.

use std::time::Instant;

use pfca_core::{
    derive_params, encrypt_context, enumerate_privacy_concepts, keygen, recover_concepts,
    BackendChoice, Concept, Decryptor, Direction, FormalContext, HeBackend, OracleBackend,
    PrivacyConcept, SecretKey, SheBackend, WorkerReport,
};

use crate::report::{ConceptDto, PrivacyConceptDto, RunReport, StageTimings};
use crate::CliError;

/// What to run. `Pfca(None)` resolves to the smaller power-set side once
/// the context dimensions are known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgoSpec {
    Tem,
    Tia,
    Pfca(Option<Direction>),
}

impl AlgoSpec {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "tem" => Some(AlgoSpec::Tem),
            "tia" => Some(AlgoSpec::Tia),
            "pfca-f" => Some(AlgoSpec::Pfca(Some(Direction::ObjectFirst))),
            "pfca-g" => Some(AlgoSpec::Pfca(Some(Direction::AttributeFirst))),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub algo: AlgoSpec,
    pub backend: BackendChoice,
    pub workers: usize,
    pub prune: bool,
    pub seed: u64,
    /// Attach concept payloads to the report.
    pub with_payload: bool,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    /// Present for pfca runs.
    pub privacy: Option<Vec<PrivacyConcept>>,
    /// Plaintext concepts: enumerated (tem/tia) or recovered (pfca).
    pub concepts: Vec<Concept>,
    pub worker_reports: Vec<WorkerReport>,
    pub context: FormalContext,
}

/// Runs `cfg` against the context produced by `acquire` (a file read or a
/// synthetic generation; it is timed as the read stage).
pub fn execute(
    dataset: &str,
    acquire: impl FnOnce() -> Result<FormalContext, CliError>,
    cfg: &RunConfig,
) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let ctx = acquire()?;
    let read_done = Instant::now();

    let (algo_name, backend_name, workers, privacy, concepts, worker_reports, boundaries) =
        match cfg.algo {
            AlgoSpec::Tem => {
                let encrypt_done = Instant::now();
                let concepts = ctx.enumerate_tem()?;
                let process_done = Instant::now();
                let extract_done = Instant::now();
                (
                    "tem",
                    "none".to_string(),
                    1,
                    None,
                    concepts,
                    Vec::new(),
                    (encrypt_done, process_done, extract_done),
                )
            }
            AlgoSpec::Tia => {
                let encrypt_done = Instant::now();
                let concepts = ctx.enumerate_tia()?;
                let process_done = Instant::now();
                let extract_done = Instant::now();
                (
                    "tia",
                    "none".to_string(),
                    1,
                    None,
                    concepts,
                    Vec::new(),
                    (encrypt_done, process_done, extract_done),
                )
            }
            AlgoSpec::Pfca(direction) => {
                let direction = direction
                    .unwrap_or_else(|| Direction::auto(ctx.object_count(), ctx.attribute_count()));
                let algo_name = match direction {
                    Direction::ObjectFirst => "pfca-f",
                    Direction::AttributeFirst => "pfca-g",
                };
                let params =
                    derive_params(ctx.object_count(), ctx.attribute_count(), direction)?;
                let key = keygen(&params, cfg.seed);
                let run = match cfg.backend {
                    BackendChoice::Oracle => {
                        let backend = OracleBackend::new(params);
                        encrypted_run(&backend, &key, &ctx, direction, cfg)?
                    }
                    BackendChoice::She => {
                        let backend = SheBackend::new(params, &key);
                        encrypted_run(&backend, &key, &ctx, direction, cfg)?
                    }
                };
                (
                    algo_name,
                    cfg.backend.name().to_string(),
                    cfg.workers,
                    Some(run.privacy),
                    run.recovered,
                    run.worker_reports,
                    (run.encrypt_done, run.process_done, run.extract_done),
                )
            }
        };

    let (encrypt_done, process_done, extract_done) = boundaries;
    let timings =
        StageTimings::from_boundaries(start, read_done, encrypt_done, process_done, extract_done);
    let stats = ctx.stats();
    let report = RunReport {
        dataset: dataset.to_string(),
        m: ctx.object_count(),
        n: ctx.attribute_count(),
        density: stats.density,
        algo: algo_name.to_string(),
        backend: backend_name,
        workers,
        concept_count: concepts.len(),
        timings,
        concepts: cfg
            .with_payload
            .then(|| concepts.iter().map(ConceptDto::from_concept).collect()),
        privacy_concepts: cfg.with_payload.then_some(()).and(privacy.as_ref()).map(
            |pcs| pcs.iter().map(PrivacyConceptDto::from_privacy).collect(),
        ),
    };
    Ok(RunOutcome {
        report,
        privacy,
        concepts,
        worker_reports,
        context: ctx,
    })
}

struct EncryptedRun {
    privacy: Vec<PrivacyConcept>,
    recovered: Vec<Concept>,
    worker_reports: Vec<WorkerReport>,
    encrypt_done: Instant,
    process_done: Instant,
    extract_done: Instant,
}

fn encrypted_run<B: HeBackend>(
    backend: &B,
    key: &SecretKey,
    ctx: &FormalContext,
    direction: Direction,
    cfg: &RunConfig,
) -> Result<EncryptedRun, CliError> {
    let ec = encrypt_context(backend, key, ctx, cfg.seed.wrapping_add(1))?;
    let encrypt_done = Instant::now();

    let decryptor = Decryptor::new(backend, key, cfg.seed.wrapping_add(2));
    let outcome = enumerate_privacy_concepts(
        backend,
        &ec,
        direction,
        cfg.workers,
        cfg.prune,
        &decryptor,
    )?;
    decryptor.assert_hygiene()?;
    let process_done = Instant::now();

    let recovered = recover_concepts(&outcome.concepts, ctx)?;
    let extract_done = Instant::now();

    Ok(EncryptedRun {
        privacy: outcome.concepts,
        recovered,
        worker_reports: outcome.reports,
        encrypt_done,
        process_done,
        extract_done,
    })
}
