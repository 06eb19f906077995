//! Transparent reference backend: plaintext modulo `t` plus a random nonce.
//!
//! Arithmetic is exact and instant, which makes it the workhorse for
//! large differential tests and benchmarks. The nonce keeps repeated
//! encryptions of equal plaintexts distinct; derived ciphertexts mix the
//! operand nonces deterministically.

use rand::RngCore;

use super::{FreshTag, HeBackend, HeError, HeParams, Provenance, SecretKey};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleCiphertext {
    value: u64,
    nonce: u128,
    provenance: Provenance,
    params_id: u64,
}

impl OracleCiphertext {
    pub fn payload(&self) -> (u64, u128) {
        (self.value, self.nonce)
    }
}

pub struct OracleBackend {
    params: HeParams,
    params_id: u64,
}

impl OracleBackend {
    pub fn new(params: HeParams) -> Self {
        let params_id = params.id();
        Self { params, params_id }
    }

    fn check_pair(&self, a: &OracleCiphertext, b: &OracleCiphertext) -> Result<(), HeError> {
        if a.params_id != self.params_id || b.params_id != self.params_id {
            return Err(HeError::ParamsMismatch);
        }
        Ok(())
    }

    fn derived(&self, value: u64, a: &OracleCiphertext, b: &OracleCiphertext, op: u8) -> OracleCiphertext {
        OracleCiphertext {
            value,
            nonce: mix_nonces(a.nonce, b.nonce, op),
            provenance: Provenance::Derived,
            params_id: self.params_id,
        }
    }
}

impl HeBackend for OracleBackend {
    type Ciphertext = OracleCiphertext;

    fn name(&self) -> &'static str {
        "oracle"
    }

    fn params(&self) -> &HeParams {
        &self.params
    }

    fn encrypt(
        &self,
        key: &SecretKey,
        msg: u64,
        tag: FreshTag,
        rng: &mut dyn RngCore,
    ) -> Result<OracleCiphertext, HeError> {
        if key.params_id() != self.params_id {
            return Err(HeError::ParamsMismatch);
        }
        let t = self.params.plaintext_modulus;
        if msg >= t {
            return Err(HeError::PlaintextOutOfRange { msg, modulus: t });
        }
        let nonce = (rng.next_u64() as u128) << 64 | rng.next_u64() as u128;
        Ok(OracleCiphertext {
            value: msg,
            nonce,
            provenance: tag.into(),
            params_id: self.params_id,
        })
    }

    fn encrypt_random_nonzero(
        &self,
        key: &SecretKey,
        rng: &mut dyn RngCore,
    ) -> Result<OracleCiphertext, HeError> {
        let t = self.params.plaintext_modulus;
        let msg = 1 + rng.next_u64() % (t - 1);
        self.encrypt(key, msg, FreshTag::Blinded, rng)
    }

    fn add(&self, a: &OracleCiphertext, b: &OracleCiphertext) -> Result<OracleCiphertext, HeError> {
        self.check_pair(a, b)?;
        let t = self.params.plaintext_modulus;
        Ok(self.derived((a.value + b.value) % t, a, b, 1))
    }

    fn sub(&self, a: &OracleCiphertext, b: &OracleCiphertext) -> Result<OracleCiphertext, HeError> {
        self.check_pair(a, b)?;
        let t = self.params.plaintext_modulus;
        Ok(self.derived((a.value + t - b.value) % t, a, b, 2))
    }

    fn mul(&self, a: &OracleCiphertext, b: &OracleCiphertext) -> Result<OracleCiphertext, HeError> {
        self.check_pair(a, b)?;
        let t = self.params.plaintext_modulus;
        Ok(self.derived(a.value * b.value % t, a, b, 3))
    }

    fn decrypt(&self, key: &SecretKey, ct: &OracleCiphertext) -> Result<u64, HeError> {
        if key.params_id() != self.params_id || ct.params_id != self.params_id {
            return Err(HeError::ParamsMismatch);
        }
        Ok(ct.value)
    }

    fn provenance(&self, ct: &OracleCiphertext) -> Provenance {
        ct.provenance
    }
}

fn mix_nonces(a: u128, b: u128, op: u8) -> u128 {
    let mut x = a ^ b.rotate_left(17) ^ (op as u128);
    x ^= x >> 67;
    x = x.wrapping_mul(0x2545_f491_4f6c_dd1d_8589_8466_25b3_3d17);
    x ^= x >> 59;
    x
}
