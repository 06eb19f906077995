//! The decryption boundary of the pipeline.
//!
//! All decryption requests funnel through a single [`Decryptor`] owned by
//! the data-owner role, which logs every request. The pipeline only ever
//! decrypts aggregates over at least two entry ciphertexts or blinded
//! comparison products, never a raw matrix cell; the transcript makes that
//! leakage boundary checkable after the fact.

use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::EngineError;
use crate::he::{HeBackend, Provenance, SecretKey};

/// Why a decryption was requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecryptPurpose {
    /// A summed aggregate feeding the concept construction.
    Aggregate,
    /// The blinded difference inside a containment comparison.
    AlphaTest,
    /// Direct recovery of a matrix cell. Never legitimate during the
    /// pipeline; recorded so misuse is visible.
    CellRecovery,
}

/// One decryption event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranscriptRecord {
    pub provenance: Provenance,
    pub value: u64,
    pub purpose: DecryptPurpose,
}

struct DecryptorState {
    rng: ChaCha12Rng,
    transcript: Vec<TranscriptRecord>,
}

/// Serializes decryption and blinding requests and records the transcript.
pub struct Decryptor<'a, B: HeBackend> {
    backend: &'a B,
    key: &'a SecretKey,
    state: Mutex<DecryptorState>,
}

impl<'a, B: HeBackend> Decryptor<'a, B> {
    pub fn new(backend: &'a B, key: &'a SecretKey, seed: u64) -> Self {
        Self {
            backend,
            key,
            state: Mutex::new(DecryptorState {
                rng: ChaCha12Rng::seed_from_u64(seed),
                transcript: Vec::new(),
            }),
        }
    }

    pub fn backend(&self) -> &'a B {
        self.backend
    }

    /// Decrypts `ct` and appends the event to the transcript.
    pub fn decrypt(
        &self,
        ct: &B::Ciphertext,
        purpose: DecryptPurpose,
    ) -> Result<u64, EngineError> {
        let value = self.backend.decrypt(self.key, ct)?;
        let record = TranscriptRecord {
            provenance: self.backend.provenance(ct),
            value,
            purpose,
        };
        self.state.lock().unwrap().transcript.push(record);
        Ok(value)
    }

    /// A fresh encryption of a uniform nonzero plaintext, for blinding.
    pub fn blinding_factor(&self) -> Result<B::Ciphertext, EngineError> {
        let mut state = self.state.lock().unwrap();
        Ok(self
            .backend
            .encrypt_random_nonzero(self.key, &mut state.rng)?)
    }

    pub fn transcript(&self) -> Vec<TranscriptRecord> {
        self.state.lock().unwrap().transcript.clone()
    }

    pub fn transcript_len(&self) -> usize {
        self.state.lock().unwrap().transcript.len()
    }

    /// Records of raw entry-cell decryptions; empty on a clean run.
    pub fn hygiene_violations(&self) -> Vec<TranscriptRecord> {
        self.state
            .lock()
            .unwrap()
            .transcript
            .iter()
            .filter(|r| r.provenance == Provenance::Entry)
            .copied()
            .collect()
    }

    /// Errors if any entry ciphertext was decrypted.
    pub fn assert_hygiene(&self) -> Result<(), EngineError> {
        let violations = self.hygiene_violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(EngineError::TranscriptViolation {
                count: violations.len(),
            })
        }
    }
}
