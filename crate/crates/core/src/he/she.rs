//! Toy somewhat homomorphic integer scheme.
//!
//! A message `m < t` encrypts as `c = q*p + t*r + m` with `q` uniform below
//! `2^public_bits / p` and `r` uniform in `(-2^noise_bits, 2^noise_bits)`.
//! Addition and multiplication of ciphertexts track the plaintexts modulo
//! `t` as long as the accumulated noise stays under `p/2`; `derive_params`
//! guarantees that for the configured circuit shape. Ciphertexts are plain
//! integers, so the scheme is deliberately non-compact: products grow in
//! bit length with multiplicative depth, bounded by `depth * public_bits`.
//!
//! Debug builds carry a per-ciphertext worst-case noise bound and fail
//! loudly on overflow; release builds rely on the derived parameters.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, RngCore};

use super::{FreshTag, HeBackend, HeError, HeParams, Provenance, SecretKey};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheCiphertext {
    value: BigInt,
    provenance: Provenance,
    params_id: u64,
    #[cfg(debug_assertions)]
    noise_bound: BigUint,
}

impl SheCiphertext {
    pub fn payload(&self) -> &BigInt {
        &self.value
    }

    pub fn bit_length(&self) -> u64 {
        self.value.magnitude().bits()
    }

    #[cfg(debug_assertions)]
    pub fn noise_bound(&self) -> &BigUint {
        &self.noise_bound
    }
}

pub struct SheBackend {
    params: HeParams,
    params_id: u64,
    q_bound: BigUint,
    #[cfg(debug_assertions)]
    fresh_noise: BigUint,
    #[cfg(debug_assertions)]
    evaluated_noise: BigUint,
}

impl SheBackend {
    /// Precomputes the sampling bound `floor(2^public_bits / p)` for `q`.
    pub fn new(params: HeParams, key: &SecretKey) -> Self {
        let params_id = params.id();
        let q_bound = (BigUint::one() << params.public_bits) / key.modulus();
        #[cfg(debug_assertions)]
        let fresh_noise = params.fresh_noise_bound();
        #[cfg(debug_assertions)]
        let evaluated_noise = params.evaluated_noise_bound();
        Self {
            params,
            params_id,
            q_bound,
            #[cfg(debug_assertions)]
            fresh_noise,
            #[cfg(debug_assertions)]
            evaluated_noise,
        }
    }

    fn check_pair(&self, a: &SheCiphertext, b: &SheCiphertext) -> Result<(), HeError> {
        if a.params_id != self.params_id || b.params_id != self.params_id {
            return Err(HeError::ParamsMismatch);
        }
        Ok(())
    }

    #[cfg(debug_assertions)]
    fn guard_noise(&self, bound: &BigUint) -> Result<(), HeError> {
        if *bound > self.evaluated_noise {
            return Err(HeError::NoiseOverflow);
        }
        Ok(())
    }
}

impl HeBackend for SheBackend {
    type Ciphertext = SheCiphertext;

    fn name(&self) -> &'static str {
        "she"
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
    ) -> Result<SheCiphertext, HeError> {
        if key.params_id() != self.params_id {
            return Err(HeError::ParamsMismatch);
        }
        let t = self.params.plaintext_modulus;
        if msg >= t {
            return Err(HeError::PlaintextOutOfRange { msg, modulus: t });
        }
        let noise_span = 1i64 << self.params.noise_bits;
        let r = rng.gen_range(-(noise_span - 1)..noise_span);
        let q = rng.gen_biguint_below(&self.q_bound);
        let value = BigInt::from(q) * BigInt::from(key.modulus().clone())
            + BigInt::from(t) * BigInt::from(r)
            + BigInt::from(msg);
        Ok(SheCiphertext {
            value,
            provenance: tag.into(),
            params_id: self.params_id,
            #[cfg(debug_assertions)]
            noise_bound: self.fresh_noise.clone(),
        })
    }

    fn encrypt_random_nonzero(
        &self,
        key: &SecretKey,
        rng: &mut dyn RngCore,
    ) -> Result<SheCiphertext, HeError> {
        let t = self.params.plaintext_modulus;
        let msg = rng.gen_range(1..t);
        self.encrypt(key, msg, FreshTag::Blinded, rng)
    }

    fn add(&self, a: &SheCiphertext, b: &SheCiphertext) -> Result<SheCiphertext, HeError> {
        self.check_pair(a, b)?;
        #[cfg(debug_assertions)]
        let noise_bound = {
            let bound = &a.noise_bound + &b.noise_bound;
            self.guard_noise(&bound)?;
            bound
        };
        Ok(SheCiphertext {
            value: &a.value + &b.value,
            provenance: Provenance::Derived,
            params_id: self.params_id,
            #[cfg(debug_assertions)]
            noise_bound,
        })
    }

    fn sub(&self, a: &SheCiphertext, b: &SheCiphertext) -> Result<SheCiphertext, HeError> {
        self.check_pair(a, b)?;
        #[cfg(debug_assertions)]
        let noise_bound = {
            let bound = &a.noise_bound + &b.noise_bound;
            self.guard_noise(&bound)?;
            bound
        };
        Ok(SheCiphertext {
            value: &a.value - &b.value,
            provenance: Provenance::Derived,
            params_id: self.params_id,
            #[cfg(debug_assertions)]
            noise_bound,
        })
    }

    fn mul(&self, a: &SheCiphertext, b: &SheCiphertext) -> Result<SheCiphertext, HeError> {
        self.check_pair(a, b)?;
        #[cfg(debug_assertions)]
        let noise_bound = {
            let bound = &a.noise_bound * &b.noise_bound;
            self.guard_noise(&bound)?;
            bound
        };
        Ok(SheCiphertext {
            value: &a.value * &b.value,
            provenance: Provenance::Derived,
            params_id: self.params_id,
            #[cfg(debug_assertions)]
            noise_bound,
        })
    }

    fn decrypt(&self, key: &SecretKey, ct: &SheCiphertext) -> Result<u64, HeError> {
        if key.params_id() != self.params_id || ct.params_id != self.params_id {
            return Err(HeError::ParamsMismatch);
        }
        #[cfg(debug_assertions)]
        {
            // Centered reduction is only sound while the noise stays under p/2.
            if &ct.noise_bound * 2u32 >= *key.modulus() {
                return Err(HeError::NoiseOverflow);
            }
        }
        let p = BigInt::from(key.modulus().clone());
        let mut residue = ct.value.mod_floor(&p);
        if residue.magnitude() * 2u32 > *key.modulus() && residue.is_positive() {
            residue -= &p;
        }
        let t = BigInt::from(self.params.plaintext_modulus);
        let msg = residue.mod_floor(&t);
        Ok(msg.to_u64().expect("reduced message fits in u64"))
    }

    fn provenance(&self, ct: &SheCiphertext) -> Provenance {
        ct.provenance
    }
}
