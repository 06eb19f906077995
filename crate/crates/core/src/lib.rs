//! Formal concept analysis over homomorphically encrypted binary contexts.
//!
//! The pipeline has four steps: the data owner encrypts an `m x n` binary
//! incidence matrix cell by cell; an untrusted evaluator computes counting
//! aggregates over ciphertext rows or columns; subsets whose aggregate is
//! positive and strictly decreases under every one-element extension are
//! collected as privacy-preserving concepts (an index set paired with only
//! the cardinality of its derivation); the owner recovers full concepts by
//! looking the hidden side up in the plaintext context. Classical
//! enumeration baselines, a verifier that checks both routes produce equal
//! concept sets, and a decryption transcript that makes the leakage
//! boundary testable round out the crate.
//!
//! Both homomorphic backends are functional models, not secure
//! cryptography; see [`he`] for the caveats.

pub mod aggregate;
pub mod bitset;
pub mod concepts;
pub mod context;
pub mod encrypted;
pub mod error;
pub mod he;
pub mod parallel;
pub mod transcript;

pub use concepts::{
    compare_concept_sets, f_induced_concepts, g_induced_concepts, induced_concepts,
    recover_concepts, verify_equivalence, PrivacyConcept, VerificationReport,
};
pub use context::{Concept, ContextStats, FormalContext, LintWarning, ENUMERATION_LIMIT};
pub use encrypted::{encrypt_context, CipherVector, EncryptedContext};
pub use error::{ContextError, EngineError, HeError};
pub use he::{
    derive_params, keygen, BackendChoice, HeBackend, HeParams, OracleBackend, Provenance,
    SecretKey, SheBackend,
};
pub use parallel::{
    enumerate_privacy_concepts, prefix_blocks, EnumerationOutcome, TaskBlock, WorkerReport,
};
pub use transcript::{DecryptPurpose, Decryptor, TranscriptRecord};

/// Which side's power set an enumeration walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Enumerate object subsets; vectors are rows.
    ObjectFirst,
    /// Enumerate attribute subsets; vectors are columns.
    AttributeFirst,
}

impl Direction {
    /// The direction with the smaller power set: attributes when
    /// `n <= m`, objects otherwise.
    pub fn auto(m: usize, n: usize) -> Self {
        if n <= m {
            Direction::AttributeFirst
        } else {
            Direction::ObjectFirst
        }
    }
}
