//! Privacy-preserving concept construction and recovery.
//!
//! A subset of the enumerated side is an extent (dually, an intent) exactly
//! when its counting aggregate is positive and strictly decreases under
//! every one-element extension. Evaluating that test over the power set of
//! the encrypted context yields privacy-preserving concepts: the known
//! index set paired with only the cardinality of its derivation. The owner
//! of the plaintext context recovers full concepts by a lookup.
//!
//! Boundary cases fall outside the strict-decrease test and are handled
//! explicitly: the empty set is an extent exactly when no row is all ones
//! (checked from the singleton aggregates), and the full set is always an
//! extent, with aggregate zero when the rows share nothing.

use std::collections::BTreeSet;

use crate::aggregate::{blinded_containment, product_fold, product_sum, sum_elements};
use crate::context::{Concept, FormalContext, ENUMERATION_LIMIT};
use crate::encrypted::{encrypt_context, CipherVector, EncryptedContext};
use crate::error::{ContextError, EngineError};
use crate::he::{
    derive_params, keygen, BackendChoice, HeBackend, OracleBackend, SecretKey, SheBackend,
};
use crate::transcript::{DecryptPurpose, Decryptor};
use crate::Direction;

/// A concept with one side replaced by its cardinality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrivacyConcept {
    /// Known extent, hidden intent: `(X, |f(X)|)`.
    FInduced { extent: Vec<u32>, intent_size: u64 },
    /// Known intent, hidden extent: `(|g(B)|, B)`.
    GInduced { extent_size: u64, intent: Vec<u32> },
}

impl PrivacyConcept {
    /// The index set this concept carries in the clear.
    pub fn known_side(&self) -> &[u32] {
        match self {
            PrivacyConcept::FInduced { extent, .. } => extent,
            PrivacyConcept::GInduced { intent, .. } => intent,
        }
    }

    pub fn cardinality(&self) -> u64 {
        match self {
            PrivacyConcept::FInduced { intent_size, .. } => *intent_size,
            PrivacyConcept::GInduced { extent_size, .. } => *extent_size,
        }
    }
}

// Canonical order: kind, then known-side size, then lexicographic indices.
impl Ord for PrivacyConcept {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let rank = |pc: &PrivacyConcept| match pc {
            PrivacyConcept::FInduced { .. } => 0u8,
            PrivacyConcept::GInduced { .. } => 1u8,
        };
        (rank(self), self.known_side().len(), self.known_side(), self.cardinality()).cmp(&(
            rank(other),
            other.known_side().len(),
            other.known_side(),
            other.cardinality(),
        ))
    }
}

impl PartialOrd for PrivacyConcept {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) fn mask_indices(mask: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut rest = mask;
    while rest != 0 {
        out.push(rest.trailing_zeros());
        rest &= rest - 1;
    }
    out
}

pub(crate) fn concept_from_mask(direction: Direction, mask: u32, aggregate: u64) -> PrivacyConcept {
    match direction {
        Direction::ObjectFirst => PrivacyConcept::FInduced {
            extent: mask_indices(mask),
            intent_size: aggregate,
        },
        Direction::AttributeFirst => PrivacyConcept::GInduced {
            extent_size: aggregate,
            intent: mask_indices(mask),
        },
    }
}

/// `(empty set, dual size)`: emitted when no vector on the enumerated side
/// is all ones.
pub(crate) fn bottom_concept(direction: Direction, dual_len: usize) -> PrivacyConcept {
    match direction {
        Direction::ObjectFirst => PrivacyConcept::FInduced {
            extent: Vec::new(),
            intent_size: dual_len as u64,
        },
        Direction::AttributeFirst => PrivacyConcept::GInduced {
            extent_size: dual_len as u64,
            intent: Vec::new(),
        },
    }
}

/// `(full set, 0)`: emitted when the full enumerated side shares nothing.
pub(crate) fn top_concept(direction: Direction, side: usize) -> PrivacyConcept {
    let all: Vec<u32> = (0..side as u32).collect();
    match direction {
        Direction::ObjectFirst => PrivacyConcept::FInduced {
            extent: all,
            intent_size: 0,
        },
        Direction::AttributeFirst => PrivacyConcept::GInduced {
            extent_size: 0,
            intent: all,
        },
    }
}

pub(crate) fn has_full_side(set: &BTreeSet<PrivacyConcept>, side: usize) -> bool {
    set.iter().any(|pc| pc.known_side().len() == side)
}

/// Decrypted sum of each vector on the enumerated side. Feeds the
/// empty-set boundary rule: a vector summing to the dual length is all
/// ones, so the empty set is not closed.
pub(crate) fn side_singleton_sums<B: HeBackend>(
    backend: &B,
    vectors: &[CipherVector<B::Ciphertext>],
    decryptor: &Decryptor<B>,
) -> Result<Vec<u64>, EngineError> {
    vectors
        .iter()
        .map(|v| {
            let s = sum_elements(backend, v)?;
            decryptor.decrypt(&s, DecryptPurpose::Aggregate)
        })
        .collect()
}

fn check_side(side: usize) -> Result<(), EngineError> {
    if side > ENUMERATION_LIMIT {
        return Err(EngineError::Context(ContextError::TooLarge {
            side,
            limit: ENUMERATION_LIMIT,
        }));
    }
    Ok(())
}

/// Privacy-preserving concepts over the object power set: pairs
/// `(extent, common-attribute count)`.
pub fn f_induced_concepts<B: HeBackend>(
    backend: &B,
    ec: &EncryptedContext<B::Ciphertext>,
    decryptor: &Decryptor<B>,
) -> Result<Vec<PrivacyConcept>, EngineError> {
    induced_concepts(backend, ec, Direction::ObjectFirst, decryptor)
}

/// Dual construction over the attribute power set: pairs
/// `(common-object count, intent)`.
pub fn g_induced_concepts<B: HeBackend>(
    backend: &B,
    ec: &EncryptedContext<B::Ciphertext>,
    decryptor: &Decryptor<B>,
) -> Result<Vec<PrivacyConcept>, EngineError> {
    induced_concepts(backend, ec, Direction::AttributeFirst, decryptor)
}

/// Sequential reference construction. Singletons go through the blinded
/// containment test (a one-element set is closed exactly when no other
/// vector contains its support); larger subsets go through the
/// strict-decrease test on aggregates. The block-parallel enumerator in
/// [`crate::parallel`] treats singletons uniformly instead; both routes
/// must and do agree.
pub fn induced_concepts<B: HeBackend>(
    backend: &B,
    ec: &EncryptedContext<B::Ciphertext>,
    direction: Direction,
    decryptor: &Decryptor<B>,
) -> Result<Vec<PrivacyConcept>, EngineError> {
    let side = ec.side_len(direction);
    let dual_len = ec.dual_len(direction);
    check_side(side)?;
    let vectors = ec.side_vectors(direction);
    let mut found = BTreeSet::new();

    // Singletons via blinded containment.
    for x in 0..side {
        let mut closed = true;
        for y in 0..side {
            if y == x {
                continue;
            }
            if blinded_containment(backend, &vectors[x], &vectors[y], decryptor)? {
                closed = false;
                break;
            }
        }
        if closed {
            let sum = sum_elements(backend, &vectors[x])?;
            let aggregate = decryptor.decrypt(&sum, DecryptPurpose::Aggregate)?;
            found.insert(concept_from_mask(direction, 1 << x, aggregate));
        }
    }

    // Subsets of two or more elements via the strict-decrease test.
    let full: u32 = (1 << side) - 1;
    for mask in 0..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        let members: Vec<&CipherVector<B::Ciphertext>> = mask_indices(mask)
            .into_iter()
            .map(|i| &vectors[i as usize])
            .collect();
        let product = product_fold(backend, &members)?;
        let sum = sum_elements(backend, &product)?;
        let aggregate = decryptor.decrypt(&sum, DecryptPurpose::Aggregate)?;
        if aggregate == 0 {
            continue;
        }
        let mut strict = true;
        for (e, vector) in vectors.iter().enumerate() {
            if mask >> e & 1 == 1 {
                continue;
            }
            let extended = product_sum(backend, &product, vector)?;
            let ext = decryptor.decrypt(&extended, DecryptPurpose::Aggregate)?;
            debug_assert!(ext <= aggregate);
            if ext == aggregate {
                strict = false;
                break;
            }
        }
        if strict {
            found.insert(concept_from_mask(direction, mask, aggregate));
        }
    }

    // Boundary concepts.
    let sums = side_singleton_sums(backend, &vectors, decryptor)?;
    if !sums.contains(&(dual_len as u64)) {
        found.insert(bottom_concept(direction, dual_len));
    }
    if !has_full_side(&found, side) {
        found.insert(top_concept(direction, side));
    }
    Ok(found.into_iter().collect())
}

/// Recovers plaintext concepts from privacy-preserving ones by deriving the
/// hidden side against the owner's context. The reported cardinality must
/// match the derived set; a mismatch signals a corrupted pipeline.
pub fn recover_concepts(
    concepts: &[PrivacyConcept],
    ctx: &FormalContext,
) -> Result<Vec<Concept>, EngineError> {
    let mut out = BTreeSet::new();
    for pc in concepts {
        let concept = match pc {
            PrivacyConcept::FInduced { extent, intent_size } => {
                let intent = ctx.derive_intent(extent)?;
                if intent.len() as u64 != *intent_size {
                    return Err(EngineError::IntegrityError {
                        reported: *intent_size,
                        actual: intent.len() as u64,
                    });
                }
                Concept::new(extent.clone(), intent)
            }
            PrivacyConcept::GInduced { extent_size, intent } => {
                let extent = ctx.derive_extent(intent)?;
                if extent.len() as u64 != *extent_size {
                    return Err(EngineError::IntegrityError {
                        reported: *extent_size,
                        actual: extent.len() as u64,
                    });
                }
                Concept::new(extent, intent.clone())
            }
        };
        out.insert(concept);
    }
    Ok(out.into_iter().collect())
}

/// Set comparison used by the verifier; the error carries the differences.
pub fn compare_concept_sets(expected: &[Concept], actual: &[Concept]) -> Result<(), EngineError> {
    let want: BTreeSet<&Concept> = expected.iter().collect();
    let got: BTreeSet<&Concept> = actual.iter().collect();
    if want == got {
        return Ok(());
    }
    Err(EngineError::VerificationFailure {
        missing: want.difference(&got).map(|c| (*c).clone()).collect(),
        unexpected: got.difference(&want).map(|c| (*c).clone()).collect(),
    })
}

/// Outcome of a successful equivalence check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerificationReport {
    pub classical_count: usize,
    pub f_induced_count: usize,
    pub g_induced_count: usize,
}

/// Runs the full pipeline in both directions and checks that the recovered
/// concepts equal the classical enumeration as sets (count equality
/// follows). Also enforces transcript hygiene on both runs.
pub fn verify_equivalence(
    ctx: &FormalContext,
    choice: BackendChoice,
    seed: u64,
) -> Result<VerificationReport, EngineError> {
    let classical = ctx.enumerate_tem()?;
    let f_induced_count = verify_direction(ctx, &classical, choice, Direction::ObjectFirst, seed)?;
    let g_induced_count =
        verify_direction(ctx, &classical, choice, Direction::AttributeFirst, seed ^ 1)?;
    Ok(VerificationReport {
        classical_count: classical.len(),
        f_induced_count,
        g_induced_count,
    })
}

fn verify_direction(
    ctx: &FormalContext,
    classical: &[Concept],
    choice: BackendChoice,
    direction: Direction,
    seed: u64,
) -> Result<usize, EngineError> {
    let params = derive_params(ctx.object_count(), ctx.attribute_count(), direction)?;
    let key = keygen(&params, seed);
    match choice {
        BackendChoice::Oracle => {
            let backend = OracleBackend::new(params);
            verify_with_backend(&backend, &key, ctx, classical, direction, seed)
        }
        BackendChoice::She => {
            let backend = SheBackend::new(params, &key);
            verify_with_backend(&backend, &key, ctx, classical, direction, seed)
        }
    }
}

fn verify_with_backend<B: HeBackend>(
    backend: &B,
    key: &SecretKey,
    ctx: &FormalContext,
    classical: &[Concept],
    direction: Direction,
    seed: u64,
) -> Result<usize, EngineError> {
    let ec = encrypt_context(backend, key, ctx, seed.wrapping_add(1))?;
    let decryptor = Decryptor::new(backend, key, seed.wrapping_add(2));
    let privacy = induced_concepts(backend, &ec, direction, &decryptor)?;
    let recovered = recover_concepts(&privacy, ctx)?;
    compare_concept_sets(classical, &recovered)?;
    decryptor.assert_hygiene()?;
    Ok(privacy.len())
}
