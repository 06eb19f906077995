//! Pluggable homomorphic arithmetic over integers modulo a prime.
//!
//! Two backends implement the same interface: a transparent oracle backend
//! (plaintext plus nonce, for fast correctness testing) and a toy somewhat
//! homomorphic integer scheme. Neither makes a cryptographic security
//! claim; they demonstrate functional homomorphism and the protocol's
//! information flow.

mod oracle;
mod she;

pub use oracle::{OracleBackend, OracleCiphertext};
pub use she::{SheBackend, SheCiphertext};

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::HeError;
use crate::Direction;

/// Hard ceiling for the derived secret-modulus size.
pub const MAX_SECRET_BITS: u64 = 8192;
/// Fresh-noise magnitude exponent (rho).
pub const DEFAULT_NOISE_BITS: u32 = 8;
// The blinded comparison multiplies a difference of depth-2 sums by a random
// factor, a degree-3 circuit; the depth floor keeps it inside the bound even
// for tiny contexts.
const MIN_MUL_DEPTH: u32 = 4;

/// Scheme parameters sized for a fixed circuit shape: products of at most
/// `max_mul_depth` factors, sums of at most `max_sum_terms` terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeParams {
    /// Plaintext modulus `t`, a prime strictly above both context dimensions.
    pub plaintext_modulus: u64,
    /// Fresh-noise magnitude bound exponent (noise is below `2^noise_bits`).
    pub noise_bits: u32,
    /// Bit length of the secret modulus `p`.
    pub secret_bits: u64,
    /// Ciphertext magnitude bound exponent for fresh encryptions.
    pub public_bits: u64,
    /// Deepest product the parameters guarantee.
    pub max_mul_depth: u32,
    /// Longest sum the parameters guarantee.
    pub max_sum_terms: u64,
}

impl HeParams {
    /// Worst-case magnitude of the noise in a fresh ciphertext:
    /// `t * 2^rho + t`.
    pub fn fresh_noise_bound(&self) -> BigUint {
        let t = BigUint::from(self.plaintext_modulus);
        (&t << self.noise_bits) + &t
    }

    /// Worst-case noise after a full circuit:
    /// `max_sum_terms * fresh^max_mul_depth`.
    pub fn evaluated_noise_bound(&self) -> BigUint {
        BigUint::from(self.max_sum_terms) * self.fresh_noise_bound().pow(self.max_mul_depth)
    }

    /// Checks the parameter invariants.
    pub fn validate(&self) -> Result<(), HeError> {
        if !is_prime(self.plaintext_modulus) {
            return Err(HeError::InvalidParams(format!(
                "plaintext modulus {} is not prime",
                self.plaintext_modulus
            )));
        }
        if self.evaluated_noise_bound() >= (BigUint::one() << (self.secret_bits - 1)) {
            return Err(HeError::InvalidParams(
                "evaluated noise bound reaches 2^(secret_bits - 1)".into(),
            ));
        }
        if self.public_bits <= 2 * self.secret_bits {
            return Err(HeError::InvalidParams(
                "public_bits must exceed twice secret_bits".into(),
            ));
        }
        Ok(())
    }

    /// Fingerprint used to reject mixed-parameter operands.
    pub fn id(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for v in [
            self.plaintext_modulus,
            self.noise_bits as u64,
            self.secret_bits,
            self.public_bits,
            self.max_mul_depth as u64,
            self.max_sum_terms,
        ] {
            h ^= v;
            h = h.wrapping_mul(0x100_0000_01b3);
        }
        h
    }
}

/// Sizes the scheme for an `m x n` context enumerated in `direction`.
///
/// The plaintext modulus is the smallest prime above both dimensions so
/// aggregates never wrap; the depth budget is the enumerated side (floored
/// for the blinded comparison); the sum budget is the longer side; the
/// secret modulus is the smallest size satisfying the noise inequality.
pub fn derive_params(m: usize, n: usize, direction: Direction) -> Result<HeParams, HeError> {
    if m < 2 || n < 2 {
        return Err(HeError::InvalidParams(format!(
            "context dimensions must be at least 2x2, got {m}x{n}"
        )));
    }
    let side = match direction {
        Direction::ObjectFirst => m,
        Direction::AttributeFirst => n,
    };
    let max_mul_depth = (side as u32).max(MIN_MUL_DEPTH);
    let max_sum_terms = m.max(n) as u64;
    let plaintext_modulus = smallest_prime_above(m.max(n) as u64);

    let t = BigUint::from(plaintext_modulus);
    let fresh = (&t << DEFAULT_NOISE_BITS) + &t;
    let bound = BigUint::from(max_sum_terms) * fresh.pow(max_mul_depth);
    // Two headroom bits: the secret modulus may sit just above
    // 2^(secret_bits - 1), and centered reduction needs the noise under p/2.
    let secret_bits = bound.bits() + 2;
    if secret_bits > MAX_SECRET_BITS {
        return Err(HeError::ParamsInfeasible {
            required: secret_bits,
            ceiling: MAX_SECRET_BITS,
        });
    }
    let params = HeParams {
        plaintext_modulus,
        noise_bits: DEFAULT_NOISE_BITS,
        secret_bits,
        public_bits: 2 * secret_bits + 64,
        max_mul_depth,
        max_sum_terms,
    };
    debug_assert!(params.validate().is_ok());
    Ok(params)
}

/// Symmetric key: an odd secret modulus of exactly `secret_bits` bits,
/// coprime to the plaintext modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretKey {
    p: BigUint,
    params_id: u64,
}

impl SecretKey {
    pub fn modulus(&self) -> &BigUint {
        &self.p
    }

    pub fn params_id(&self) -> u64 {
        self.params_id
    }
}

/// Deterministic key generation from a seed.
pub fn keygen(params: &HeParams, seed: u64) -> SecretKey {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let eta = params.secret_bits;
    loop {
        let mut p = rng.gen_biguint(eta);
        p.set_bit(eta - 1, true);
        p.set_bit(0, true);
        if !(&p % params.plaintext_modulus).is_zero() {
            return SecretKey {
                p,
                params_id: params.id(),
            };
        }
    }
}

/// Where a ciphertext came from. Raw matrix cells are `Entry`; arithmetic
/// results are `Derived`; encrypted blinding factors are `Blinded`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Entry,
    Derived,
    Blinded,
}

/// Tags a fresh encryption; only arithmetic can produce `Derived`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreshTag {
    Entry,
    Blinded,
}

impl From<FreshTag> for Provenance {
    fn from(tag: FreshTag) -> Self {
        match tag {
            FreshTag::Entry => Provenance::Entry,
            FreshTag::Blinded => Provenance::Blinded,
        }
    }
}

/// Common surface of the two backends. Encryption is randomized; equal
/// plaintexts encrypt to distinct ciphertexts. All operations are pure
/// given an explicit randomness stream, so concurrent evaluation over a
/// shared backend and key is safe.
pub trait HeBackend: Send + Sync {
    type Ciphertext: Clone + Send + Sync + std::fmt::Debug;

    fn name(&self) -> &'static str;
    fn params(&self) -> &HeParams;

    fn encrypt(
        &self,
        key: &SecretKey,
        msg: u64,
        tag: FreshTag,
        rng: &mut dyn RngCore,
    ) -> Result<Self::Ciphertext, HeError>;

    /// Encrypts a uniform draw from `[1, t)`, tagged `Blinded`.
    fn encrypt_random_nonzero(
        &self,
        key: &SecretKey,
        rng: &mut dyn RngCore,
    ) -> Result<Self::Ciphertext, HeError>;

    fn add(&self, a: &Self::Ciphertext, b: &Self::Ciphertext) -> Result<Self::Ciphertext, HeError>;
    fn sub(&self, a: &Self::Ciphertext, b: &Self::Ciphertext) -> Result<Self::Ciphertext, HeError>;
    fn mul(&self, a: &Self::Ciphertext, b: &Self::Ciphertext) -> Result<Self::Ciphertext, HeError>;

    fn decrypt(&self, key: &SecretKey, ct: &Self::Ciphertext) -> Result<u64, HeError>;
    fn provenance(&self, ct: &Self::Ciphertext) -> Provenance;
}

/// Names a backend on the CLI and in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendChoice {
    Oracle,
    She,
}

impl BackendChoice {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "oracle" => Some(Self::Oracle),
            "she" => Some(Self::She),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Oracle => "oracle",
            Self::She => "she",
        }
    }
}

pub(crate) fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    if x.is_multiple_of(2) {
        return x == 2;
    }
    let mut d = 3;
    while d * d <= x {
        if x.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn smallest_prime_above(x: u64) -> u64 {
    let mut candidate = x + 1;
    while !is_prime(candidate) {
        candidate += 1;
    }
    candidate
}
