//! Ciphertext-vector operators and the counting aggregates built from them.
//!
//! For 0/1 plaintexts, the elementwise product of a family of vectors marks
//! the positions shared by all of them, and summing that product counts
//! them. Decrypting the sum of the rows selected by an object set therefore
//! yields the size of the set's common-attribute set, without revealing
//! which attributes those are; dually for columns. The blinded containment
//! test compares `sum(u)` against `sum(u*v)` under a random nonzero factor:
//! the difference is zero exactly when the support of `u` lies inside the
//! support of `v`, and any nonzero difference is masked by the blinding.

use crate::encrypted::{CipherVector, EncryptedContext};
use crate::error::EngineError;
use crate::he::HeBackend;
use crate::transcript::{DecryptPurpose, Decryptor};

/// Positionwise homomorphic product of two equal-length vectors.
pub fn elementwise_product<B: HeBackend>(
    backend: &B,
    u: &CipherVector<B::Ciphertext>,
    v: &CipherVector<B::Ciphertext>,
) -> Result<CipherVector<B::Ciphertext>, EngineError> {
    if u.len() != v.len() {
        return Err(EngineError::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let elems = u
        .iter()
        .zip(v.iter())
        .map(|(a, b)| backend.mul(a, b))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CipherVector::from_elems(elems))
}

/// Left fold of [`elementwise_product`] over one or more vectors. A single
/// vector folds to itself.
pub fn product_fold<B: HeBackend>(
    backend: &B,
    vectors: &[&CipherVector<B::Ciphertext>],
) -> Result<CipherVector<B::Ciphertext>, EngineError> {
    let (first, rest) = vectors.split_first().ok_or(EngineError::EmptyInput)?;
    let mut acc = (*first).clone();
    for v in rest {
        acc = elementwise_product(backend, &acc, v)?;
    }
    Ok(acc)
}

/// Homomorphic sum of all elements of a nonempty vector.
pub fn sum_elements<B: HeBackend>(
    backend: &B,
    v: &CipherVector<B::Ciphertext>,
) -> Result<B::Ciphertext, EngineError> {
    let mut iter = v.iter();
    let mut acc = iter.next().ok_or(EngineError::EmptyInput)?.clone();
    for c in iter {
        acc = backend.add(&acc, c)?;
    }
    Ok(acc)
}

/// Fused `sum(u * v)` that skips materializing the product vector.
pub fn product_sum<B: HeBackend>(
    backend: &B,
    u: &CipherVector<B::Ciphertext>,
    v: &CipherVector<B::Ciphertext>,
) -> Result<B::Ciphertext, EngineError> {
    if u.len() != v.len() {
        return Err(EngineError::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    if u.is_empty() {
        return Err(EngineError::EmptyInput);
    }
    let mut acc = backend.mul(u.get(0), v.get(0))?;
    for i in 1..u.len() {
        let term = backend.mul(u.get(i), v.get(i))?;
        acc = backend.add(&acc, &term)?;
    }
    Ok(acc)
}

/// Size of the common-attribute set of a nonempty object set, computed as
/// the decrypted sum of the rows' elementwise product.
pub fn common_attribute_count<B: HeBackend>(
    backend: &B,
    ec: &EncryptedContext<B::Ciphertext>,
    objects: &[u32],
    decryptor: &Decryptor<B>,
) -> Result<u64, EngineError> {
    ec.check_objects(objects)?;
    if objects.is_empty() {
        return Err(EngineError::EmptyInput);
    }
    let rows: Vec<CipherVector<B::Ciphertext>> = objects
        .iter()
        .map(|&i| ec.row_vector(i as usize))
        .collect();
    let refs: Vec<&CipherVector<B::Ciphertext>> = rows.iter().collect();
    let product = product_fold(backend, &refs)?;
    let sum = sum_elements(backend, &product)?;
    decryptor.decrypt(&sum, DecryptPurpose::Aggregate)
}

/// Size of the common-object set of a nonempty attribute set; dual of
/// [`common_attribute_count`] over columns.
pub fn common_object_count<B: HeBackend>(
    backend: &B,
    ec: &EncryptedContext<B::Ciphertext>,
    attributes: &[u32],
    decryptor: &Decryptor<B>,
) -> Result<u64, EngineError> {
    ec.check_attributes(attributes)?;
    if attributes.is_empty() {
        return Err(EngineError::EmptyInput);
    }
    let cols: Vec<CipherVector<B::Ciphertext>> = attributes
        .iter()
        .map(|&j| ec.column_vector(j as usize))
        .collect();
    let refs: Vec<&CipherVector<B::Ciphertext>> = cols.iter().collect();
    let product = product_fold(backend, &refs)?;
    let sum = sum_elements(backend, &product)?;
    decryptor.decrypt(&sum, DecryptPurpose::Aggregate)
}

/// Blinded containment test for encrypted 0/1 vectors: true when the
/// support of `u` is contained in the support of `v`. The decryptor sees
/// only `(sum(u) - sum(u*v)) * r` for a random nonzero `r`.
pub fn blinded_containment<B: HeBackend>(
    backend: &B,
    u: &CipherVector<B::Ciphertext>,
    v: &CipherVector<B::Ciphertext>,
    decryptor: &Decryptor<B>,
) -> Result<bool, EngineError> {
    let total = sum_elements(backend, u)?;
    let shared = product_sum(backend, u, v)?;
    let difference = backend.sub(&total, &shared)?;
    let blinded = backend.mul(&difference, &decryptor.blinding_factor()?)?;
    Ok(decryptor.decrypt(&blinded, DecryptPurpose::AlphaTest)? == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::FormalContext;
    use crate::encrypted::encrypt_context;
    use crate::he::{derive_params, keygen, FreshTag, OracleBackend, SecretKey, SheBackend};
    use crate::Direction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn sample() -> FormalContext {
        FormalContext::from_rows(&[
            vec![1, 0, 0, 0, 0],
            vec![1, 1, 0, 0, 0],
            vec![0, 0, 1, 0, 1],
            vec![1, 1, 1, 1, 0],
        ])
        .unwrap()
    }

    fn she_setup() -> (SheBackend, SecretKey) {
        let params = derive_params(4, 5, Direction::ObjectFirst).unwrap();
        let key = keygen(&params, 21);
        let backend = SheBackend::new(params, &key);
        (backend, key)
    }

    fn decrypt_vector<B: HeBackend>(
        backend: &B,
        key: &SecretKey,
        v: &CipherVector<B::Ciphertext>,
    ) -> Vec<u64> {
        v.iter().map(|c| backend.decrypt(key, c).unwrap()).collect()
    }

    #[test]
    fn elementwise_product_of_first_two_rows() {
        let (backend, key) = she_setup();
        let ec = encrypt_context(&backend, &key, &sample(), 3).unwrap();
        let w = elementwise_product(&backend, &ec.row_vector(0), &ec.row_vector(1)).unwrap();
        assert_eq!(decrypt_vector(&backend, &key, &w), vec![1, 0, 0, 0, 0]);

        let short = CipherVector::from_elems(vec![ec.cell(0, 0).clone()]);
        assert!(matches!(
            elementwise_product(&backend, &ec.row_vector(0), &short),
            Err(EngineError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn elementwise_identity_and_annihilator() {
        use crate::he::FreshTag;
        use rand::SeedableRng;
        let (backend, key) = she_setup();
        let ec = encrypt_context(&backend, &key, &sample(), 3).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(9);
        let mut constant_vector = |value: u64| {
            CipherVector::from_elems(
                (0..5)
                    .map(|_| backend.encrypt(&key, value, FreshTag::Entry, &mut rng).unwrap())
                    .collect(),
            )
        };
        let ones = constant_vector(1);
        let kept = elementwise_product(&backend, &ec.row_vector(3), &ones).unwrap();
        assert_eq!(decrypt_vector(&backend, &key, &kept), vec![1, 1, 1, 1, 0]);
        let zeros = constant_vector(0);
        let wiped = elementwise_product(&backend, &ec.row_vector(3), &zeros).unwrap();
        assert_eq!(decrypt_vector(&backend, &key, &wiped), vec![0; 5]);
        let zero_sum = sum_elements(&backend, &zeros).unwrap();
        assert_eq!(backend.decrypt(&key, &zero_sum).unwrap(), 0);
    }

    #[test]
    fn product_fold_base_cases() {
        let (backend, key) = she_setup();
        let ec = encrypt_context(&backend, &key, &sample(), 3).unwrap();
        let row = ec.row_vector(3);
        let single = product_fold(&backend, &[&row]).unwrap();
        assert_eq!(
            decrypt_vector(&backend, &key, &single),
            vec![1, 1, 1, 1, 0]
        );
        // 0/1 idempotence: a vector multiplied by itself keeps its plaintexts.
        let squared = product_fold(&backend, &[&row, &row]).unwrap();
        assert_eq!(
            decrypt_vector(&backend, &key, &squared),
            vec![1, 1, 1, 1, 0]
        );
        assert!(matches!(
            product_fold(&backend, &[]),
            Err(EngineError::EmptyInput)
        ));
    }

    #[test]
    fn sums_and_fused_products() {
        // Attribute-first parameters: the deepest product here is the
        // five-column aggregate.
        let params = derive_params(4, 5, Direction::AttributeFirst).unwrap();
        let key = keygen(&params, 21);
        let backend = SheBackend::new(params, &key);
        let ec = encrypt_context(&backend, &key, &sample(), 3).unwrap();
        let decryptor = Decryptor::new(&backend, &key, 4);

        let s = sum_elements(&backend, &ec.row_vector(3)).unwrap();
        assert_eq!(backend.decrypt(&key, &s).unwrap(), 4);

        let fused = product_sum(&backend, &ec.row_vector(0), &ec.row_vector(1)).unwrap();
        assert_eq!(backend.decrypt(&key, &fused).unwrap(), 1);

        assert_eq!(
            common_attribute_count(&backend, &ec, &[0, 1], &decryptor).unwrap(),
            1
        );
        assert_eq!(
            common_attribute_count(&backend, &ec, &[0, 1, 2, 3], &decryptor).unwrap(),
            0
        );
        assert_eq!(
            common_attribute_count(&backend, &ec, &[0, 2], &decryptor).unwrap(),
            0
        );
        assert_eq!(
            common_object_count(&backend, &ec, &[0, 2], &decryptor).unwrap(),
            1
        );
        assert_eq!(
            common_object_count(&backend, &ec, &[0, 1, 2, 3, 4], &decryptor).unwrap(),
            0
        );
        assert_eq!(
            common_object_count(&backend, &ec, &[0], &decryptor).unwrap(),
            3
        );
        assert!(matches!(
            common_attribute_count(&backend, &ec, &[], &decryptor),
            Err(EngineError::EmptyInput)
        ));
        decryptor.assert_hygiene().unwrap();
    }

    #[test]
    fn containment_on_sample_rows() {
        let (backend, key) = she_setup();
        let ec = encrypt_context(&backend, &key, &sample(), 3).unwrap();
        let decryptor = Decryptor::new(&backend, &key, 4);
        // support(row 1) = {a1} sits inside support(row 2) = {a1, a2}.
        assert!(blinded_containment(&backend, &ec.row_vector(0), &ec.row_vector(1), &decryptor)
            .unwrap());
        assert!(!blinded_containment(&backend, &ec.row_vector(1), &ec.row_vector(0), &decryptor)
            .unwrap());
        assert!(blinded_containment(&backend, &ec.row_vector(2), &ec.row_vector(2), &decryptor)
            .unwrap());
        decryptor.assert_hygiene().unwrap();
    }

    #[test]
    fn containment_matches_brute_force_exhaustively() {
        // Every pair of 0/1 vectors up to length 6, on the oracle backend.
        let params = derive_params(6, 6, Direction::ObjectFirst).unwrap();
        let key = keygen(&params, 5);
        let backend = OracleBackend::new(params);
        let decryptor = Decryptor::new(&backend, &key, 6);
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for len in 1..=6usize {
            for a in 0u32..1 << len {
                for b in 0u32..1 << len {
                    let encrypt_mask = |mask: u32, rng: &mut ChaCha12Rng| {
                        CipherVector::from_elems(
                            (0..len)
                                .map(|i| {
                                    backend
                                        .encrypt(
                                            &key,
                                            u64::from(mask >> i & 1),
                                            FreshTag::Entry,
                                            rng,
                                        )
                                        .unwrap()
                                })
                                .collect(),
                        )
                    };
                    let u = encrypt_mask(a, &mut rng);
                    let v = encrypt_mask(b, &mut rng);
                    let expected = a & !b == 0;
                    assert_eq!(
                        blinded_containment(&backend, &u, &v, &decryptor).unwrap(),
                        expected,
                        "len {len} a {a:b} b {b:b}"
                    );
                }
            }
        }
    }
}
