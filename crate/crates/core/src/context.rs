//! Plaintext formal contexts, derivation operators, and concept enumeration.
//!
//! A formal context is an `m x n` binary incidence relation between objects
//! and attributes. The derivation operators form an antitone Galois
//! connection: `derive_intent` maps a set of objects to their common
//! attributes, `derive_extent` maps a set of attributes to the objects
//! possessing all of them. A concept is a pair fixed by both operators.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeSet;
use std::fmt;

use crate::bitset::Bitset;
use crate::error::ContextError;

/// Largest power-set side the exhaustive enumerators accept.
pub const ENUMERATION_LIMIT: usize = 24;

/// An immutable binary incidence relation with row and column bitset views.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalContext {
    m: usize,
    n: usize,
    rows: Vec<Bitset>,
    cols: Vec<Bitset>,
    object_labels: Vec<String>,
    attribute_labels: Vec<String>,
}

/// A formal concept: an extent and intent that determine each other.
/// Index vectors are sorted ascending and 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub extent: Vec<u32>,
    pub intent: Vec<u32>,
}

impl Concept {
    pub fn new(mut extent: Vec<u32>, mut intent: Vec<u32>) -> Self {
        extent.sort_unstable();
        extent.dedup();
        intent.sort_unstable();
        intent.dedup();
        Self { extent, intent }
    }
}

// Canonical order: extent size, then lexicographic extent.
impl Ord for Concept {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.extent.len(), &self.extent, &self.intent).cmp(&(
            other.extent.len(),
            &other.extent,
            &other.intent,
        ))
    }
}

impl PartialOrd for Concept {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact 1-counts of a context; the density is their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContextStats {
    pub ones_count: u64,
    pub zeros_count: u64,
    pub density: f64,
}

/// Structural lint findings; never errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LintWarning {
    FullRow(usize),
    EmptyRow(usize),
    FullColumn(usize),
    EmptyColumn(usize),
}

impl fmt::Display for LintWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LintWarning::FullRow(i) => write!(f, "object {} has every attribute (full row)", i + 1),
            LintWarning::EmptyRow(i) => write!(f, "object {} has no attributes (empty row)", i + 1),
            LintWarning::FullColumn(j) => {
                write!(f, "attribute {} held by every object (full column)", j + 1)
            }
            LintWarning::EmptyColumn(j) => {
                write!(f, "attribute {} held by no object (empty column)", j + 1)
            }
        }
    }
}

impl FormalContext {
    /// Builds a context from rows of 0/1 entries.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self, ContextError> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m < 2 || n < 2 {
            return Err(ContextError::InvalidDimensions { m, n });
        }
        let mut row_bits = Vec::with_capacity(m);
        let mut col_bits = vec![Bitset::zeros(m); n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(ContextError::RaggedRow {
                    row: i,
                    got: row.len(),
                    expected: n,
                });
            }
            let mut bits = Bitset::zeros(n);
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => {
                        bits.set(j, true);
                        col_bits[j].set(i, true);
                    }
                    other => {
                        return Err(ContextError::InvalidBit {
                            row: i,
                            col: j,
                            value: other,
                        })
                    }
                }
            }
            row_bits.push(bits);
        }
        Ok(Self {
            m,
            n,
            rows: row_bits,
            cols: col_bits,
            object_labels: (1..=m).map(|i| format!("o{i}")).collect(),
            attribute_labels: (1..=n).map(|j| format!("a{j}")).collect(),
        })
    }

    /// Replaces the default `o1..om` / `a1..an` labels.
    pub fn with_labels(
        mut self,
        objects: Vec<String>,
        attributes: Vec<String>,
    ) -> Result<Self, ContextError> {
        if objects.len() != self.m {
            return Err(ContextError::LabelMismatch {
                got: objects.len(),
                expected: self.m,
            });
        }
        if attributes.len() != self.n {
            return Err(ContextError::LabelMismatch {
                got: attributes.len(),
                expected: self.n,
            });
        }
        self.object_labels = objects;
        self.attribute_labels = attributes;
        Ok(self)
    }

    /// Draws a random context where each cell is 1 with probability `p`.
    ///
    /// Determinism contract: ChaCha12 seeded with `seed`, one stream per row
    /// (stream id = row index), row cells drawn left to right by comparing
    /// the top 53 bits of `next_u64` against `round(p * 2^53)`. The same
    /// `(m, n, p, seed)` reproduces the matrix bit for bit on any platform.
    pub fn generate(m: usize, n: usize, p: f64, seed: u64) -> Result<Self, ContextError> {
        if m < 2 || n < 2 {
            return Err(ContextError::InvalidDimensions { m, n });
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(ContextError::InvalidParameter(format!(
                "density must lie strictly between 0 and 1, got {p}"
            )));
        }
        let threshold = (p * (1u64 << 53) as f64).round() as u64;
        let mut rows = Vec::with_capacity(m);
        for i in 0..m {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let row: Vec<u8> = (0..n)
                .map(|_| u8::from(rng.next_u64() >> 11 < threshold))
                .collect();
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    pub fn object_count(&self) -> usize {
        self.m
    }

    pub fn attribute_count(&self) -> usize {
        self.n
    }

    pub fn bit(&self, object: usize, attribute: usize) -> bool {
        self.rows[object].get(attribute)
    }

    pub fn row_bits(&self, object: usize) -> &Bitset {
        &self.rows[object]
    }

    pub fn column_bits(&self, attribute: usize) -> &Bitset {
        &self.cols[attribute]
    }

    pub fn object_labels(&self) -> &[String] {
        &self.object_labels
    }

    pub fn attribute_labels(&self) -> &[String] {
        &self.attribute_labels
    }

    fn check_objects(&self, objects: &[u32]) -> Result<(), ContextError> {
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

    fn check_attributes(&self, attributes: &[u32]) -> Result<(), ContextError> {
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

    pub(crate) fn intent_bits(&self, objects: &Bitset) -> Bitset {
        let mut acc = Bitset::ones(self.n);
        for i in objects.iter_ones() {
            acc.intersect_with(&self.rows[i]);
        }
        acc
    }

    pub(crate) fn extent_bits(&self, attributes: &Bitset) -> Bitset {
        let mut acc = Bitset::ones(self.m);
        for j in attributes.iter_ones() {
            acc.intersect_with(&self.cols[j]);
        }
        acc
    }

    /// Attributes common to every object in `objects`. The empty set derives
    /// to the full attribute set (universal quantification over nothing).
    pub fn derive_intent(&self, objects: &[u32]) -> Result<Vec<u32>, ContextError> {
        self.check_objects(objects)?;
        let set = Bitset::from_indices(self.m, objects);
        Ok(self.intent_bits(&set).indices())
    }

    /// Objects possessing every attribute in `attributes`; dual of
    /// [`derive_intent`](Self::derive_intent).
    pub fn derive_extent(&self, attributes: &[u32]) -> Result<Vec<u32>, ContextError> {
        self.check_attributes(attributes)?;
        let set = Bitset::from_indices(self.n, attributes);
        Ok(self.extent_bits(&set).indices())
    }

    /// True when the pair is fixed by both derivation operators.
    pub fn is_concept(&self, extent: &[u32], intent: &[u32]) -> Result<bool, ContextError> {
        let derived_intent = self.derive_intent(extent)?;
        let derived_extent = self.derive_extent(intent)?;
        let mut x: Vec<u32> = extent.to_vec();
        x.sort_unstable();
        x.dedup();
        let mut b: Vec<u32> = intent.to_vec();
        b.sort_unstable();
        b.dedup();
        Ok(derived_intent == b && derived_extent == x)
    }

    /// All concepts by exhaustive enumeration of the smaller power set,
    /// closing each candidate. Canonically ordered by extent size, then
    /// lexicographic extent.
    pub fn enumerate_tem(&self) -> Result<Vec<Concept>, ContextError> {
        self.enumerate_tem_with_limit(ENUMERATION_LIMIT)
    }

    pub fn enumerate_tem_with_limit(&self, limit: usize) -> Result<Vec<Concept>, ContextError> {
        let side = self.m.min(self.n);
        if side > limit {
            return Err(ContextError::TooLarge { side, limit });
        }
        let mut out = BTreeSet::new();
        if self.m <= self.n {
            for mask in 0u64..(1u64 << self.m) {
                let objects = mask_bitset(mask, self.m);
                let intent = self.intent_bits(&objects);
                let extent = self.extent_bits(&intent);
                out.insert(Concept::new(extent.indices(), intent.indices()));
            }
        } else {
            for mask in 0u64..(1u64 << self.n) {
                let attributes = mask_bitset(mask, self.n);
                let extent = self.extent_bits(&attributes);
                let intent = self.intent_bits(&extent);
                out.insert(Concept::new(extent.indices(), intent.indices()));
            }
        }
        Ok(out.into_iter().collect())
    }

    /// All concepts by object-incremental insertion: the intent family of a
    /// context grows by `{B & row : B already an intent}` when a row is
    /// added, starting from the full attribute set.
    pub fn enumerate_tia(&self) -> Result<Vec<Concept>, ContextError> {
        let mut intents: BTreeSet<Bitset> = BTreeSet::new();
        intents.insert(Bitset::ones(self.n));
        for row in &self.rows {
            let fresh: Vec<Bitset> = intents
                .iter()
                .map(|b| {
                    let mut meet = b.clone();
                    meet.intersect_with(row);
                    meet
                })
                .collect();
            intents.extend(fresh);
        }
        let mut out = BTreeSet::new();
        for intent in &intents {
            let extent = self.extent_bits(intent);
            out.insert(Concept::new(extent.indices(), intent.indices()));
        }
        Ok(out.into_iter().collect())
    }

    /// Object- and attribute-concepts: closures of single rows and columns,
    /// deduplicated and canonically ordered.
    pub fn granular_concepts(&self) -> Vec<Concept> {
        let mut out = BTreeSet::new();
        for i in 0..self.m {
            let intent = self.rows[i].clone();
            let extent = self.extent_bits(&intent);
            out.insert(Concept::new(extent.indices(), intent.indices()));
        }
        for j in 0..self.n {
            let extent = self.cols[j].clone();
            let intent = self.intent_bits(&extent);
            out.insert(Concept::new(extent.indices(), intent.indices()));
        }
        out.into_iter().collect()
    }

    pub fn stats(&self) -> ContextStats {
        let ones: u64 = self.rows.iter().map(|r| r.count_ones() as u64).sum();
        let total = (self.m * self.n) as u64;
        ContextStats {
            ones_count: ones,
            zeros_count: total - ones,
            density: ones as f64 / total as f64,
        }
    }

    /// Flags full/empty rows and columns. Such contexts stay accepted
    /// everywhere; the boundary concepts handle them.
    pub fn validate(&self) -> Vec<LintWarning> {
        let mut warnings = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            if row.is_full() {
                warnings.push(LintWarning::FullRow(i));
            } else if row.is_empty() {
                warnings.push(LintWarning::EmptyRow(i));
            }
        }
        for (j, col) in self.cols.iter().enumerate() {
            if col.is_full() {
                warnings.push(LintWarning::FullColumn(j));
            } else if col.is_empty() {
                warnings.push(LintWarning::EmptyColumn(j));
            }
        }
        warnings
    }
}

fn mask_bitset(mask: u64, len: usize) -> Bitset {
    let mut set = Bitset::zeros(len);
    let mut rest = mask;
    while rest != 0 {
        let b = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        set.set(b, true);
    }
    set
}
