//! Block-parallel power-set enumeration with monotone pruning.
//!
//! The power set of the enumerated side is partitioned into blocks by
//! fixing membership of the first `prefix_len` elements; each block walks
//! the remaining elements depth first, carrying the running elementwise
//! product. Aggregates only shrink as a subset grows, so once a subset's
//! aggregate hits zero its whole subtree can be skipped; pruning state is
//! block-local, which keeps the output and the visit/prune totals
//! independent of scheduling. Workers pull blocks from a shared queue
//! (work stealing under the `parallel` feature) and accumulate into local
//! buffers that are merged and canonically sorted at the end.
//!
//! With the `parallel` feature disabled, or a single worker, the same
//! blocks run on the calling thread in order.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::aggregate::{elementwise_product, product_sum, sum_elements};
use crate::concepts::{
    bottom_concept, concept_from_mask, has_full_side, mask_indices, side_singleton_sums,
    top_concept, PrivacyConcept,
};
use crate::encrypted::{CipherVector, EncryptedContext};
use crate::error::{ContextError, EngineError};
use crate::he::HeBackend;
use crate::transcript::{DecryptPurpose, Decryptor};
use crate::Direction;

/// Prefix depth of the block decomposition.
pub const BLOCK_PREFIX_DEPTH: u32 = 8;

/// One unit of work: all subsets agreeing with `prefix_mask` on the first
/// `prefix_len` elements. The blocks of a side partition its power set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaskBlock {
    pub prefix_mask: u32,
    pub prefix_len: u32,
    pub direction: Direction,
}

/// Per-worker accounting. Across all workers, visited plus pruned subsets
/// cover the power set exactly once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkerReport {
    pub worker_id: usize,
    pub subsets_visited: u64,
    pub subsets_pruned: u64,
    pub concepts_found: u64,
    pub wall_time: f64,
}

/// Merged concepts plus per-worker accounting.
#[derive(Debug, Clone)]
pub struct EnumerationOutcome {
    pub concepts: Vec<PrivacyConcept>,
    pub reports: Vec<WorkerReport>,
}

/// All blocks of the given side at the configured prefix depth.
pub fn prefix_blocks(side: u32, direction: Direction) -> Vec<TaskBlock> {
    let prefix_len = side.min(BLOCK_PREFIX_DEPTH);
    (0..1u32 << prefix_len)
        .map(|prefix_mask| TaskBlock {
            prefix_mask,
            prefix_len,
            direction,
        })
        .collect()
}

/// Enumerates privacy-preserving concepts over the encrypted context.
///
/// The output is identical for every worker count and prune setting; only
/// the schedule and the per-worker accounting vary.
pub fn enumerate_privacy_concepts<B: HeBackend>(
    backend: &B,
    ec: &EncryptedContext<B::Ciphertext>,
    direction: Direction,
    workers: usize,
    prune: bool,
    decryptor: &Decryptor<B>,
) -> Result<EnumerationOutcome, EngineError> {
    if workers == 0 {
        return Err(EngineError::InvalidWorkerCount);
    }
    let side = ec.side_len(direction);
    let dual_len = ec.dual_len(direction);
    if side > crate::context::ENUMERATION_LIMIT {
        return Err(EngineError::Context(ContextError::TooLarge {
            side,
            limit: crate::context::ENUMERATION_LIMIT,
        }));
    }
    let vectors = ec.side_vectors(direction);
    let blocks = prefix_blocks(side as u32, direction);

    #[cfg(feature = "parallel")]
    let block_results = if workers > 1 {
        run_blocks_parallel(backend, &vectors, &blocks, side, prune, decryptor, workers)?
    } else {
        run_blocks_sequential(backend, &vectors, &blocks, side, prune, decryptor)?
    };
    #[cfg(not(feature = "parallel"))]
    let block_results = run_blocks_sequential(backend, &vectors, &blocks, side, prune, decryptor)?;

    let mut reports: Vec<WorkerReport> = (0..workers)
        .map(|worker_id| WorkerReport {
            worker_id,
            subsets_visited: 0,
            subsets_pruned: 0,
            concepts_found: 0,
            wall_time: 0.0,
        })
        .collect();
    let mut found = BTreeSet::new();
    for (worker_id, outcome, secs) in block_results {
        let report = &mut reports[worker_id.min(workers - 1)];
        report.subsets_visited += outcome.visited;
        report.subsets_pruned += outcome.pruned;
        report.concepts_found += outcome.found.len() as u64;
        report.wall_time += secs;
        for (mask, aggregate) in outcome.found {
            found.insert(concept_from_mask(direction, mask, aggregate));
        }
    }

    let sums = side_singleton_sums(backend, &vectors, decryptor)?;
    if !sums.contains(&(dual_len as u64)) {
        found.insert(bottom_concept(direction, dual_len));
    }
    if !has_full_side(&found, side) {
        found.insert(top_concept(direction, side));
    }

    Ok(EnumerationOutcome {
        concepts: found.into_iter().collect(),
        reports,
    })
}

struct BlockOutcome {
    found: Vec<(u32, u64)>,
    visited: u64,
    pruned: u64,
}

type BlockResult = (usize, BlockOutcome, f64);

fn run_blocks_sequential<B: HeBackend>(
    backend: &B,
    vectors: &[CipherVector<B::Ciphertext>],
    blocks: &[TaskBlock],
    side: usize,
    prune: bool,
    decryptor: &Decryptor<B>,
) -> Result<Vec<BlockResult>, EngineError> {
    blocks
        .iter()
        .map(|block| {
            let start = Instant::now();
            let outcome = walk_block(backend, vectors, block, side, prune, decryptor)?;
            Ok((0, outcome, start.elapsed().as_secs_f64()))
        })
        .collect()
}

#[cfg(feature = "parallel")]
fn run_blocks_parallel<B: HeBackend>(
    backend: &B,
    vectors: &[CipherVector<B::Ciphertext>],
    blocks: &[TaskBlock],
    side: usize,
    prune: bool,
    decryptor: &Decryptor<B>,
    workers: usize,
) -> Result<Vec<BlockResult>, EngineError> {
    use rayon::prelude::*;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| EngineError::Context(ContextError::InvalidParameter(e.to_string())))?;
    pool.install(|| {
        blocks
            .par_iter()
            .map(|block| {
                let start = Instant::now();
                let outcome = walk_block(backend, vectors, block, side, prune, decryptor)?;
                Ok((
                    rayon::current_thread_index().unwrap_or(0),
                    outcome,
                    start.elapsed().as_secs_f64(),
                ))
            })
            .collect()
    })
}

fn walk_block<B: HeBackend>(
    backend: &B,
    vectors: &[CipherVector<B::Ciphertext>],
    block: &TaskBlock,
    side: usize,
    prune: bool,
    decryptor: &Decryptor<B>,
) -> Result<BlockOutcome, EngineError> {
    let mut walker = Walker {
        backend,
        vectors,
        decryptor,
        side: side as u32,
        prune,
        outcome: BlockOutcome {
            found: Vec::new(),
            visited: 0,
            pruned: 0,
        },
    };
    walker.outcome.visited += 1; // the block's base subset
    if block.prefix_mask == 0 {
        walker.descend(0, None, None, block.prefix_len)?;
    } else {
        let members: Vec<&CipherVector<B::Ciphertext>> = mask_indices(block.prefix_mask)
            .into_iter()
            .map(|i| &vectors[i as usize])
            .collect();
        let mut product = members[0].clone();
        for v in &members[1..] {
            product = elementwise_product(backend, &product, v)?;
        }
        let aggregate = walker.decrypt_sum(&product)?;
        walker.descend(block.prefix_mask, Some(&product), Some(aggregate), block.prefix_len)?;
    }
    Ok(walker.outcome)
}

struct Walker<'a, B: HeBackend> {
    backend: &'a B,
    vectors: &'a [CipherVector<B::Ciphertext>],
    decryptor: &'a Decryptor<'a, B>,
    side: u32,
    prune: bool,
    outcome: BlockOutcome,
}

impl<B: HeBackend> Walker<'_, B> {
    fn decrypt_sum(&self, v: &CipherVector<B::Ciphertext>) -> Result<u64, EngineError> {
        let sum = sum_elements(self.backend, v)?;
        self.decryptor.decrypt(&sum, DecryptPurpose::Aggregate)
    }

    /// Processes the node `(mask, product, aggregate)` and recurses into
    /// extensions by elements `next..side`. The empty subset has no
    /// product; it emits nothing and never prunes.
    fn descend(
        &mut self,
        mask: u32,
        product: Option<&CipherVector<B::Ciphertext>>,
        aggregate: Option<u64>,
        next: u32,
    ) -> Result<(), EngineError> {
        if let (Some(product), Some(aggregate)) = (product, aggregate) {
            if aggregate > 0 && self.strict_decrease_holds(mask, product, aggregate)? {
                self.outcome.found.push((mask, aggregate));
            }
            if self.prune && aggregate == 0 {
                // Every superset in this subtree also aggregates to zero.
                self.outcome.pruned += (1u64 << (self.side - next)) - 1;
                return Ok(());
            }
        }
        for e in next..self.side {
            let child = match product {
                Some(p) => elementwise_product(self.backend, p, &self.vectors[e as usize])?,
                None => self.vectors[e as usize].clone(),
            };
            let child_aggregate = self.decrypt_sum(&child)?;
            self.outcome.visited += 1;
            self.descend(mask | 1 << e, Some(&child), Some(child_aggregate), e + 1)?;
        }
        Ok(())
    }

    fn strict_decrease_holds(
        &self,
        mask: u32,
        product: &CipherVector<B::Ciphertext>,
        aggregate: u64,
    ) -> Result<bool, EngineError> {
        for e in 0..self.side {
            if mask >> e & 1 == 1 {
                continue;
            }
            let extended = product_sum(self.backend, product, &self.vectors[e as usize])?;
            let ext = self
                .decryptor
                .decrypt(&extended, DecryptPurpose::Aggregate)?;
            debug_assert!(ext <= aggregate);
            if ext == aggregate {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concepts::induced_concepts;
    use crate::context::FormalContext;
    use crate::encrypted::encrypt_context;
    use crate::he::{derive_params, keygen, OracleBackend, SecretKey};

    fn sample() -> FormalContext {
        FormalContext::from_rows(&[
            vec![1, 0, 0, 0, 0],
            vec![1, 1, 0, 0, 0],
            vec![0, 0, 1, 0, 1],
            vec![1, 1, 1, 1, 0],
        ])
        .unwrap()
    }

    fn oracle_setup(
        ctx: &FormalContext,
        direction: Direction,
    ) -> (OracleBackend, SecretKey, EncryptedContext<crate::he::OracleCiphertext>) {
        let params =
            derive_params(ctx.object_count(), ctx.attribute_count(), direction).unwrap();
        let key = keygen(&params, 51);
        let backend = OracleBackend::new(params);
        let ec = encrypt_context(&backend, &key, ctx, 52).unwrap();
        (backend, key, ec)
    }

    #[test]
    fn blocks_partition_the_power_set() {
        for side in [3u32, 8, 10] {
            let blocks = prefix_blocks(side, Direction::ObjectFirst);
            let prefix_len = side.min(BLOCK_PREFIX_DEPTH);
            assert_eq!(blocks.len(), 1 << prefix_len);
            let mut seen = std::collections::BTreeSet::new();
            for block in &blocks {
                let tail = side - block.prefix_len;
                for t in 0u32..1 << tail {
                    let mask = block.prefix_mask | t << block.prefix_len;
                    assert!(seen.insert(mask));
                }
            }
            assert_eq!(seen.len(), 1 << side);
        }
    }

    #[test]
    fn rejects_zero_workers() {
        let ctx = sample();
        let (backend, key, ec) = oracle_setup(&ctx, Direction::ObjectFirst);
        let decryptor = Decryptor::new(&backend, &key, 53);
        assert!(matches!(
            enumerate_privacy_concepts(&backend, &ec, Direction::ObjectFirst, 0, true, &decryptor),
            Err(EngineError::InvalidWorkerCount)
        ));
    }

    #[test]
    fn matches_sequential_reference_across_configs() {
        let ctx = sample();
        let (backend, key, ec) = oracle_setup(&ctx, Direction::ObjectFirst);
        let decryptor = Decryptor::new(&backend, &key, 53);
        let reference = induced_concepts(&backend, &ec, Direction::ObjectFirst, &decryptor).unwrap();
        for workers in [1usize, 2, 4] {
            for prune in [false, true] {
                let outcome = enumerate_privacy_concepts(
                    &backend,
                    &ec,
                    Direction::ObjectFirst,
                    workers,
                    prune,
                    &decryptor,
                )
                .unwrap();
                assert_eq!(outcome.concepts, reference, "workers {workers} prune {prune}");
                assert_eq!(outcome.reports.len(), workers);
                assert_eq!(outcome.concepts.len(), 7);
            }
        }
        decryptor.assert_hygiene().unwrap();
    }

    #[test]
    fn accounting_covers_the_power_set_exactly() {
        let ctx = FormalContext::generate(10, 6, 0.3, 77).unwrap();
        let (backend, key, ec) = oracle_setup(&ctx, Direction::ObjectFirst);
        let decryptor = Decryptor::new(&backend, &key, 54);
        for (workers, prune) in [(1, false), (1, true), (4, true)] {
            let outcome = enumerate_privacy_concepts(
                &backend,
                &ec,
                Direction::ObjectFirst,
                workers,
                prune,
                &decryptor,
            )
            .unwrap();
            let visited: u64 = outcome.reports.iter().map(|r| r.subsets_visited).sum();
            let pruned: u64 = outcome.reports.iter().map(|r| r.subsets_pruned).sum();
            assert_eq!(visited + pruned, 1 << 10, "workers {workers} prune {prune}");
            if !prune {
                assert_eq!(pruned, 0);
            }
        }
    }

    #[test]
    fn sparse_context_reports_pruning() {
        let ctx = FormalContext::generate(10, 8, 0.05, 13).unwrap();
        let (backend, key, ec) = oracle_setup(&ctx, Direction::ObjectFirst);
        let decryptor = Decryptor::new(&backend, &key, 55);
        let outcome =
            enumerate_privacy_concepts(&backend, &ec, Direction::ObjectFirst, 2, true, &decryptor)
                .unwrap();
        let pruned: u64 = outcome.reports.iter().map(|r| r.subsets_pruned).sum();
        assert!(pruned > 0);
    }

    #[test]
    fn visit_totals_are_schedule_independent() {
        let ctx = FormalContext::generate(9, 9, 0.4, 5).unwrap();
        let (backend, key, ec) = oracle_setup(&ctx, Direction::AttributeFirst);
        let decryptor = Decryptor::new(&backend, &key, 56);
        let totals: Vec<(u64, u64)> = [1usize, 2, 8]
            .iter()
            .map(|&workers| {
                let outcome = enumerate_privacy_concepts(
                    &backend,
                    &ec,
                    Direction::AttributeFirst,
                    workers,
                    true,
                    &decryptor,
                )
                .unwrap();
                (
                    outcome.reports.iter().map(|r| r.subsets_visited).sum(),
                    outcome.reports.iter().map(|r| r.subsets_pruned).sum(),
                )
            })
            .collect();
        assert_eq!(totals[0], totals[1]);
        assert_eq!(totals[1], totals[2]);
    }
}
