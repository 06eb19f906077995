//! Cellwise-encrypted contexts and ciphertext vectors.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::context::FormalContext;
use crate::error::{ContextError, EngineError};
use crate::he::{FreshTag, HeBackend, SecretKey};
use crate::Direction;

/// An ordered list of ciphertexts sharing one parameter lineage.
#[derive(Debug, Clone)]
pub struct CipherVector<C> {
    elems: Vec<C>,
}

impl<C> CipherVector<C> {
    pub fn from_elems(elems: Vec<C>) -> Self {
        Self { elems }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn get(&self, i: usize) -> &C {
        &self.elems[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C> {
        self.elems.iter()
    }
}

/// The encrypted form of a formal context: one `Entry` ciphertext per cell.
#[derive(Debug, Clone)]
pub struct EncryptedContext<C> {
    m: usize,
    n: usize,
    cells: Vec<C>,
}

impl<C: Clone> EncryptedContext<C> {
    pub fn object_count(&self) -> usize {
        self.m
    }

    pub fn attribute_count(&self) -> usize {
        self.n
    }

    pub fn cell(&self, object: usize, attribute: usize) -> &C {
        &self.cells[object * self.n + attribute]
    }

    pub fn cells(&self) -> impl Iterator<Item = &C> {
        self.cells.iter()
    }

    pub fn row_vector(&self, object: usize) -> CipherVector<C> {
        let start = object * self.n;
        CipherVector::from_elems(self.cells[start..start + self.n].to_vec())
    }

    pub fn column_vector(&self, attribute: usize) -> CipherVector<C> {
        CipherVector::from_elems(
            (0..self.m)
                .map(|i| self.cells[i * self.n + attribute].clone())
                .collect(),
        )
    }

    /// Number of elements on the side enumerated in `direction`.
    pub fn side_len(&self, direction: Direction) -> usize {
        match direction {
            Direction::ObjectFirst => self.m,
            Direction::AttributeFirst => self.n,
        }
    }

    /// Length of each vector on the enumerated side.
    pub fn dual_len(&self, direction: Direction) -> usize {
        match direction {
            Direction::ObjectFirst => self.n,
            Direction::AttributeFirst => self.m,
        }
    }

    /// All rows (object-first) or all columns (attribute-first).
    pub fn side_vectors(&self, direction: Direction) -> Vec<CipherVector<C>> {
        match direction {
            Direction::ObjectFirst => (0..self.m).map(|i| self.row_vector(i)).collect(),
            Direction::AttributeFirst => (0..self.n).map(|j| self.column_vector(j)).collect(),
        }
    }

    pub(crate) fn check_objects(&self, objects: &[u32]) -> Result<(), ContextError> {
        for &i in objects {
            if i as usize >= self.m {
                return Err(ContextError::InvalidIndex {
                    side: "object",
                    index: i as usize,
                    size: self.m,
                });
            }
        }
        Ok(())
    }

    pub(crate) fn check_attributes(&self, attributes: &[u32]) -> Result<(), ContextError> {
        for &j in attributes {
            if j as usize >= self.n {
                return Err(ContextError::InvalidIndex {
                    side: "attribute",
                    index: j as usize,
                    size: self.n,
                });
            }
        }
        Ok(())
    }
}

/// Encrypts every cell of `ctx` with `Entry` provenance.
///
/// Randomness is drawn from ChaCha12 seeded with `seed`, one stream per
/// row, so the ciphertext matrix is reproducible for a given seed while
/// repeated calls with different seeds differ cellwise.
pub fn encrypt_context<B: HeBackend>(
    backend: &B,
    key: &SecretKey,
    ctx: &FormalContext,
    seed: u64,
) -> Result<EncryptedContext<B::Ciphertext>, EngineError> {
    let m = ctx.object_count();
    let n = ctx.attribute_count();
    let mut cells = Vec::with_capacity(m * n);
    for i in 0..m {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        for j in 0..n {
            let msg = u64::from(ctx.bit(i, j));
            cells.push(backend.encrypt(key, msg, FreshTag::Entry, &mut rng)?);
        }
    }
    Ok(EncryptedContext { m, n, cells })
}
