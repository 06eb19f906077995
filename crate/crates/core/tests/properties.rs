//! Property tests: Galois-connection laws, oracle equivalence of the
//! enumeration baselines, homomorphic correctness over random circuits,
//! and the bridge between encrypted aggregates and plaintext derivations.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeSet;

use pfca_core::{
    aggregate, derive_params, encrypt_context, enumerate_privacy_concepts, he::FreshTag,
    induced_concepts, keygen, recover_concepts, CipherVector, Decryptor, Direction, FormalContext,
    HeBackend, OracleBackend, SheBackend,
};

/// Definitional concept enumeration: quantifier loops only, no bitsets,
/// no closures shared with the implementation under test.
fn brute_force_concepts(rows: &[Vec<u8>]) -> BTreeSet<(Vec<u32>, Vec<u32>)> {
    let m = rows.len();
    let n = rows[0].len();
    let mut out = BTreeSet::new();
    for mask in 0u32..1 << m {
        let members: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let intent: Vec<u32> = (0..n)
            .filter(|&j| members.iter().all(|&i| rows[i][j] == 1))
            .map(|j| j as u32)
            .collect();
        let extent: Vec<u32> = (0..m)
            .filter(|&i| intent.iter().all(|&j| rows[i][j as usize] == 1))
            .map(|i| i as u32)
            .collect();
        out.insert((extent, intent));
    }
    out
}

fn arb_rows(max_dim: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
    (2..=max_dim, 2..=max_dim).prop_flat_map(|(m, n)| {
        prop::collection::vec(prop::collection::vec(0..=1u8, n), m)
    })
}

fn subset(of: usize, mask: u32) -> Vec<u32> {
    (0..of as u32).filter(|i| mask >> i & 1 == 1).collect()
}

/// Random sums of products inside the derived budget, evaluated on both
/// backends and against plaintext arithmetic mod t.
#[test]
fn thousand_random_circuits_decrypt_correctly() {
    use rand::Rng;
    let params = derive_params(6, 9, Direction::ObjectFirst).unwrap();
    let t = params.plaintext_modulus;
    let key = keygen(&params, 13);
    let oracle = OracleBackend::new(params.clone());
    let she = SheBackend::new(params.clone(), &key);
    for seed in 0..1000u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let terms = rng.gen_range(1..=params.max_sum_terms);
        let mut expected = 0u64;
        let mut acc_oracle = None;
        let mut acc_she = None;
        for _ in 0..terms {
            let depth = rng.gen_range(1..=params.max_mul_depth);
            let mut plain_product = 1u64;
            let mut prod_oracle = None;
            let mut prod_she = None;
            for _ in 0..depth {
                let v = rng.gen_range(0..t);
                plain_product = plain_product * v % t;
                let co = oracle.encrypt(&key, v, FreshTag::Entry, &mut rng).unwrap();
                let cs = she.encrypt(&key, v, FreshTag::Entry, &mut rng).unwrap();
                prod_oracle = Some(match prod_oracle {
                    None => co,
                    Some(acc) => oracle.mul(&acc, &co).unwrap(),
                });
                prod_she = Some(match prod_she {
                    None => cs,
                    Some(acc) => she.mul(&acc, &cs).unwrap(),
                });
            }
            expected = (expected + plain_product) % t;
            acc_oracle = Some(match acc_oracle {
                None => prod_oracle.unwrap(),
                Some(acc) => oracle.add(&acc, &prod_oracle.unwrap()).unwrap(),
            });
            acc_she = Some(match acc_she {
                None => prod_she.unwrap(),
                Some(acc) => she.add(&acc, &prod_she.unwrap()).unwrap(),
            });
        }
        assert_eq!(
            oracle.decrypt(&key, &acc_oracle.unwrap()).unwrap(),
            expected,
            "oracle circuit {seed}"
        );
        assert_eq!(
            she.decrypt(&key, &acc_she.unwrap()).unwrap(),
            expected,
            "she circuit {seed}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn galois_connection_laws(rows in arb_rows(7), mask_a: u32, mask_b: u32) {
        let ctx = FormalContext::from_rows(&rows).unwrap();
        let m = ctx.object_count();
        let x1 = subset(m, mask_a & mask_b);
        let x2 = subset(m, mask_a | mask_b);
        // Antitone: a larger object set has a smaller intent.
        let f_x1 = ctx.derive_intent(&x1).unwrap();
        let f_x2 = ctx.derive_intent(&x2).unwrap();
        prop_assert!(f_x2.iter().all(|a| f_x1.contains(a)));
        // Extensive + idempotent closure.
        let x = subset(m, mask_a);
        let fx = ctx.derive_intent(&x).unwrap();
        let gfx = ctx.derive_extent(&fx).unwrap();
        prop_assert!(x.iter().all(|o| gfx.contains(o)));
        prop_assert_eq!(ctx.derive_intent(&gfx).unwrap(), fx);

        let n = ctx.attribute_count();
        let b1 = subset(n, mask_a & mask_b);
        let b2 = subset(n, mask_a | mask_b);
        let g_b1 = ctx.derive_extent(&b1).unwrap();
        let g_b2 = ctx.derive_extent(&b2).unwrap();
        prop_assert!(g_b2.iter().all(|o| g_b1.contains(o)));
    }

    #[test]
    fn bitset_derivation_matches_quantifier_check(rows in arb_rows(7), mask: u32) {
        let ctx = FormalContext::from_rows(&rows).unwrap();
        let x = subset(ctx.object_count(), mask);
        let via_bitsets = ctx.derive_intent(&x).unwrap();
        let definitional: Vec<u32> = (0..ctx.attribute_count() as u32)
            .filter(|&j| x.iter().all(|&i| rows[i as usize][j as usize] == 1))
            .collect();
        prop_assert_eq!(via_bitsets, definitional);
    }

    #[test]
    fn enumeration_baselines_agree_with_brute_force(rows in arb_rows(6)) {
        let ctx = FormalContext::from_rows(&rows).unwrap();
        let expected = brute_force_concepts(&rows);
        let tem: BTreeSet<(Vec<u32>, Vec<u32>)> = ctx
            .enumerate_tem()
            .unwrap()
            .into_iter()
            .map(|c| (c.extent, c.intent))
            .collect();
        let tia: BTreeSet<(Vec<u32>, Vec<u32>)> = ctx
            .enumerate_tia()
            .unwrap()
            .into_iter()
            .map(|c| (c.extent, c.intent))
            .collect();
        prop_assert_eq!(&tem, &expected);
        prop_assert_eq!(&tia, &expected);
    }

    #[test]
    fn granular_concepts_are_concepts(rows in arb_rows(6)) {
        let ctx = FormalContext::from_rows(&rows).unwrap();
        for c in ctx.granular_concepts() {
            prop_assert!(ctx.is_concept(&c.extent, &c.intent).unwrap());
        }
    }

    #[test]
    fn granular_closure_reconstructs_all_concepts(rows in arb_rows(6)) {
        // Extents form a closure system generated by the granular extents:
        // closing them under pairwise intersection and adding the full
        // object set must reproduce the enumerated concept set.
        let ctx = FormalContext::from_rows(&rows).unwrap();
        let mut extents: BTreeSet<Vec<u32>> = ctx
            .granular_concepts()
            .into_iter()
            .map(|c| c.extent)
            .collect();
        extents.insert((0..ctx.object_count() as u32).collect());
        loop {
            let mut fresh = BTreeSet::new();
            for a in &extents {
                for b in &extents {
                    let meet: Vec<u32> =
                        a.iter().filter(|x| b.contains(x)).copied().collect();
                    if !extents.contains(&meet) {
                        fresh.insert(meet);
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            extents.extend(fresh);
        }
        let reconstructed: BTreeSet<(Vec<u32>, Vec<u32>)> = extents
            .into_iter()
            .map(|x| {
                let intent = ctx.derive_intent(&x).unwrap();
                (x, intent)
            })
            .collect();
        let tem: BTreeSet<(Vec<u32>, Vec<u32>)> = ctx
            .enumerate_tem()
            .unwrap()
            .into_iter()
            .map(|c| (c.extent, c.intent))
            .collect();
        prop_assert_eq!(reconstructed, tem);
    }

    #[test]
    fn density_times_cells_is_exact(rows in arb_rows(7)) {
        let ctx = FormalContext::from_rows(&rows).unwrap();
        let stats = ctx.stats();
        let cells = (ctx.object_count() * ctx.attribute_count()) as u64;
        prop_assert_eq!(stats.ones_count + stats.zeros_count, cells);
        let direct: u64 = rows.iter().flatten().map(|&b| b as u64).sum();
        prop_assert_eq!(stats.ones_count, direct);
    }

    #[test]
    fn aggregates_bridge_to_plaintext_derivations(rows in arb_rows(6), seed: u64) {
        let ctx = FormalContext::from_rows(&rows).unwrap();
        let m = ctx.object_count();
        let n = ctx.attribute_count();
        let params = derive_params(m, n, Direction::ObjectFirst).unwrap();
        let key = keygen(&params, seed);
        let backend = OracleBackend::new(params);
        let ec = encrypt_context(&backend, &key, &ctx, seed).unwrap();
        let decryptor = Decryptor::new(&backend, &key, seed);
        // Exhaustive over nonempty object subsets.
        for mask in 1u32..1 << m {
            let x = subset(m, mask);
            let counted =
                aggregate::common_attribute_count(&backend, &ec, &x, &decryptor).unwrap();
            prop_assert_eq!(counted as usize, ctx.derive_intent(&x).unwrap().len());
        }
        let params_g = derive_params(m, n, Direction::AttributeFirst).unwrap();
        let key_g = keygen(&params_g, seed);
        let backend_g = OracleBackend::new(params_g);
        let ec_g = encrypt_context(&backend_g, &key_g, &ctx, seed).unwrap();
        let decryptor_g = Decryptor::new(&backend_g, &key_g, seed);
        for mask in 1u32..1 << n {
            let b = subset(n, mask);
            let counted =
                aggregate::common_object_count(&backend_g, &ec_g, &b, &decryptor_g).unwrap();
            prop_assert_eq!(counted as usize, ctx.derive_extent(&b).unwrap().len());
        }
    }

    #[test]
    fn aggregate_is_monotone_under_extension(rows in arb_rows(6), mask: u32, seed: u64) {
        let ctx = FormalContext::from_rows(&rows).unwrap();
        let m = ctx.object_count();
        let params = derive_params(m, ctx.attribute_count(), Direction::ObjectFirst).unwrap();
        let key = keygen(&params, seed);
        let backend = OracleBackend::new(params);
        let ec = encrypt_context(&backend, &key, &ctx, seed).unwrap();
        let decryptor = Decryptor::new(&backend, &key, seed);
        let full = (1u32 << m) - 1;
        let base_mask = mask & full;
        prop_assume!(base_mask != 0);
        let base = subset(m, base_mask);
        let base_count =
            aggregate::common_attribute_count(&backend, &ec, &base, &decryptor).unwrap();
        for e in 0..m as u32 {
            if base_mask >> e & 1 == 1 {
                continue;
            }
            let extended = subset(m, base_mask | 1 << e);
            let ext_count =
                aggregate::common_attribute_count(&backend, &ec, &extended, &decryptor).unwrap();
            prop_assert!(ext_count <= base_count);
        }
    }

    #[test]
    fn product_fold_ignores_input_order(rows in arb_rows(5), seed: u64) {
        let ctx = FormalContext::from_rows(&rows).unwrap();
        let params =
            derive_params(ctx.object_count(), ctx.attribute_count(), Direction::ObjectFirst)
                .unwrap();
        let key = keygen(&params, seed);
        let backend = SheBackend::new(params, &key);
        let ec = encrypt_context(&backend, &key, &ctx, seed).unwrap();
        let rows_fwd: Vec<_> = (0..ctx.object_count()).map(|i| ec.row_vector(i)).collect();
        let fwd_refs: Vec<_> = rows_fwd.iter().collect();
        let rev_refs: Vec<_> = rows_fwd.iter().rev().collect();
        let fwd = aggregate::product_fold(&backend, &fwd_refs).unwrap();
        let rev = aggregate::product_fold(&backend, &rev_refs).unwrap();
        let decrypt_all = |v: &CipherVector<_>| -> Vec<u64> {
            v.iter().map(|c| backend.decrypt(&key, c).unwrap()).collect()
        };
        prop_assert_eq!(decrypt_all(&fwd), decrypt_all(&rev));
    }

    #[test]
    fn blinded_containment_matches_supports(len in 2usize..=8, a: u32, b: u32, seed: u64) {
        let params = derive_params(len, len, Direction::ObjectFirst).unwrap();
        let key = keygen(&params, seed);
        let backend = SheBackend::new(params, &key);
        let decryptor = Decryptor::new(&backend, &key, seed);
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mask = (1u32 << len) - 1;
        let (a, b) = (a & mask, b & mask);
        let mut enc = |bits: u32| -> CipherVector<_> {
            CipherVector::from_elems(
                (0..len)
                    .map(|i| {
                        backend
                            .encrypt(&key, u64::from(bits >> i & 1), FreshTag::Entry, &mut rng)
                            .unwrap()
                    })
                    .collect(),
            )
        };
        let u = enc(a);
        let v = enc(b);
        let got = aggregate::blinded_containment(&backend, &u, &v, &decryptor).unwrap();
        prop_assert_eq!(got, a & !b == 0);
    }

    #[test]
    fn strict_decrease_test_characterizes_closed_extents(rows in arb_rows(5), seed: u64) {
        // A nonempty proper subset passes the construction exactly when it
        // is a closed extent with a nonempty intent.
        let ctx = FormalContext::from_rows(&rows).unwrap();
        let m = ctx.object_count();
        let params = derive_params(m, ctx.attribute_count(), Direction::ObjectFirst).unwrap();
        let key = keygen(&params, seed);
        let backend = OracleBackend::new(params);
        let ec = encrypt_context(&backend, &key, &ctx, seed).unwrap();
        let decryptor = Decryptor::new(&backend, &key, seed);
        for mask in 1u32..(1 << m) - 1 {
            let x = subset(m, mask);
            let count =
                aggregate::common_attribute_count(&backend, &ec, &x, &decryptor).unwrap();
            let mut passes = count > 0;
            if passes {
                for e in 0..m as u32 {
                    if mask >> e & 1 == 1 {
                        continue;
                    }
                    let ext = subset(m, mask | 1 << e);
                    let ext_count =
                        aggregate::common_attribute_count(&backend, &ec, &ext, &decryptor)
                            .unwrap();
                    if ext_count == count {
                        passes = false;
                        break;
                    }
                }
            }
            let intent = ctx.derive_intent(&x).unwrap();
            let closed = ctx.derive_extent(&intent).unwrap() == x && !intent.is_empty();
            prop_assert_eq!(passes, closed, "mask {:b}", mask);
        }
    }

    #[test]
    fn parallel_enumeration_matches_sequential_reference(rows in arb_rows(6), seed: u64) {
        let ctx = FormalContext::from_rows(&rows).unwrap();
        for direction in [Direction::ObjectFirst, Direction::AttributeFirst] {
            let params =
                derive_params(ctx.object_count(), ctx.attribute_count(), direction).unwrap();
            let key = keygen(&params, seed);
            let backend = OracleBackend::new(params);
            let ec = encrypt_context(&backend, &key, &ctx, seed).unwrap();
            let decryptor = Decryptor::new(&backend, &key, seed);
            // The reference resolves singletons through blinded containment;
            // the block walker treats them uniformly. Outputs must agree.
            let reference = induced_concepts(&backend, &ec, direction, &decryptor).unwrap();
            for workers in [1usize, 3] {
                for prune in [false, true] {
                    let outcome = enumerate_privacy_concepts(
                        &backend, &ec, direction, workers, prune, &decryptor,
                    )
                    .unwrap();
                    prop_assert_eq!(&outcome.concepts, &reference);
                }
            }
            let recovered = recover_concepts(&reference, &ctx).unwrap();
            let classical = ctx.enumerate_tem().unwrap();
            prop_assert_eq!(recovered, classical);
            decryptor.assert_hygiene().unwrap();
        }
    }
}
