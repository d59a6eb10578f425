//! Fragmentation forward-error-correction codec.
//!
//! A firmware image is chunked into `nb_frag` equal fragments (the last one
//! zero-padded), then extended with XOR parity fragments. Each parity line
//! is a deterministic pseudo-random subset of the original fragments drawn
//! from a PRBS23 sequence, so encoder and decoder derive identical lines
//! from the redundancy index alone. Receivers run incremental Gaussian
//! elimination over GF(2) and can rebuild the image from any received
//! subset whose lines span the full fragment space.

use thiserror::Error;

// ============================================================================
// Errors
// ============================================================================

#[derive(Debug, Error, PartialEq)]
pub enum FecError {
    #[error("image must not be empty")]
    EmptyImage,

    #[error("fragment size must be at least one byte")]
    ZeroFragmentSize,

    #[error("fragment index {0} outside session plan")]
    IndexOutOfRange(usize),

    #[error("fragment payload of {got} bytes does not match fragment size {expected}")]
    PayloadSizeMismatch { got: usize, expected: usize },

    #[error("decoder is still missing fragments (rank {rank} of {needed})")]
    Incomplete { rank: usize, needed: usize },
}

// ============================================================================
// Fragmentation plan
// ============================================================================

/// Session-level fragmentation parameters shared by encoder and decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FragmentPlan {
    pub frag_size: usize,
    pub nb_frag: usize,
    pub padding: usize,
    pub nb_redundancy: usize,
}

impl FragmentPlan {
    /// Total fragments transmitted in a session: originals plus parity.
    pub fn total_fragments(&self) -> usize {
        self.nb_frag + self.nb_redundancy
    }
}

/// Chunk an image into equal fragments, zero-padding the last one.
///
/// `nb_frag = ceil(len / frag_size)`; the concatenation of the fragments
/// minus the padding reproduces the image exactly.
pub fn fragment_image(image: &[u8], frag_size: usize) -> Result<(FragmentPlan, Vec<Vec<u8>>), FecError> {
    if image.is_empty() {
        return Err(FecError::EmptyImage);
    }
    if frag_size == 0 {
        return Err(FecError::ZeroFragmentSize);
    }
    let nb_frag = image.len().div_ceil(frag_size);
    let padding = nb_frag * frag_size - image.len();
    let mut fragments = Vec::with_capacity(nb_frag);
    for i in 0..nb_frag {
        let start = i * frag_size;
        let end = (start + frag_size).min(image.len());
        let mut frag = image[start..end].to_vec();
        frag.resize(frag_size, 0);
        fragments.push(frag);
    }
    let plan = FragmentPlan {
        frag_size,
        nb_frag,
        padding,
        nb_redundancy: 0,
    };
    Ok((plan, fragments))
}

// ============================================================================
// Parity line generator (PRBS23)
// ============================================================================

fn prbs23(x: u32) -> u32 {
    let b = (x & 1) ^ ((x >> 5) & 1);
    (x >> 1) | (b << 22)
}

/// Deterministic parity line for redundancy index `n` (1-based) over `m`
/// original fragments. Returns the 0-based indices of the fragments XORed
/// into parity fragment `n`.
///
/// Distinct column indices are drawn as `x mod (m + [m is a power of two])`
/// from a PRBS23 stream seeded with `1 + 1001 n`, until `max(1, m/2)`
/// coefficients are set.
pub fn parity_line(n: usize, m: usize) -> Vec<usize> {
    assert!(n >= 1 && m >= 1, "parity_line requires n >= 1 and m >= 1");
    let target = (m / 2).max(1);
    let modulus = m + usize::from(m.is_power_of_two());
    let mut x = (1 + 1001 * n) as u32;
    let mut member = vec![false; m];
    let mut count = 0;
    while count < target {
        let r = loop {
            x = prbs23(x);
            let r = x as usize % modulus;
            if r < m {
                break r;
            }
        };
        if !member[r] {
            member[r] = true;
            count += 1;
        }
    }
    member
        .iter()
        .enumerate()
        .filter_map(|(i, &set)| set.then_some(i))
        .collect()
}

/// XOR parity fragments for the given originals.
pub fn encode_redundancy(fragments: &[Vec<u8>], nb_redundancy: usize) -> Vec<Vec<u8>> {
    let m = fragments.len();
    (1..=nb_redundancy)
        .map(|n| {
            let mut parity = vec![0u8; fragments.first().map_or(0, Vec::len)];
            for idx in parity_line(n, m) {
                for (p, b) in parity.iter_mut().zip(&fragments[idx]) {
                    *p ^= b;
                }
            }
            parity
        })
        .collect()
}

/// Fragment an image and append `nb_redundancy` parity fragments. The
/// returned vector holds coded fragment 1..=(nb_frag + nb_redundancy) in
/// transmission order.
pub fn encode_session(
    image: &[u8],
    frag_size: usize,
    nb_redundancy: usize,
) -> Result<(FragmentPlan, Vec<Vec<u8>>), FecError> {
    let (mut plan, mut fragments) = fragment_image(image, frag_size)?;
    plan.nb_redundancy = nb_redundancy;
    fragments.extend(encode_redundancy(&fragments, nb_redundancy));
    Ok((plan, fragments))
}

// ============================================================================
// Decoder
// ============================================================================

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    Pending,
    Complete,
}

#[derive(Debug, Clone)]
struct Row {
    bits: Vec<u64>,
    payload: Vec<u8>,
}

impl Row {
    fn leading(&self) -> Option<usize> {
        for (w, word) in self.bits.iter().enumerate() {
            if *word != 0 {
                return Some(w * 64 + word.trailing_zeros() as usize);
            }
        }
        None
    }

    fn xor_in(&mut self, other: &Row) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
        for (a, b) in self.payload.iter_mut().zip(&other.payload) {
            *a ^= b;
        }
    }
}

/// Incremental GF(2) Gaussian-elimination decoder.
///
/// Rows are reduced against existing pivots as they arrive; duplicates and
/// linearly dependent fragments leave the rank unchanged. Decoding is
/// complete exactly when the rank reaches `nb_frag`.
#[derive(Debug, Clone)]
pub struct Decoder {
    nb_frag: usize,
    frag_size: usize,
    words: usize,
    pivots: Vec<Option<Row>>,
    rank: usize,
    received: usize,
}

impl Decoder {
    pub fn new(plan: &FragmentPlan) -> Self {
        let words = plan.nb_frag.div_ceil(64);
        Decoder {
            nb_frag: plan.nb_frag,
            frag_size: plan.frag_size,
            words,
            pivots: vec![None; plan.nb_frag],
            rank: 0,
            received: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Count of fragments fed to the decoder, dependent ones included.
    pub fn received(&self) -> usize {
        self.received
    }

    pub fn is_complete(&self) -> bool {
        self.rank == self.nb_frag
    }

    fn line_for(&self, index: usize) -> Vec<u64> {
        let mut bits = vec![0u64; self.words];
        if index <= self.nb_frag {
            let col = index - 1;
            bits[col / 64] |= 1 << (col % 64);
        } else {
            for col in parity_line(index - self.nb_frag, self.nb_frag) {
                bits[col / 64] |= 1 << (col % 64);
            }
        }
        bits
    }

    /// Ingest coded fragment `index` (1-based; parity fragments start at
    /// `nb_frag + 1`).
    pub fn ingest(&mut self, index: usize, payload: &[u8]) -> Result<DecodeStatus, FecError> {
        if index == 0 || index > 2 * self.nb_frag + 4096 {
            return Err(FecError::IndexOutOfRange(index));
        }
        if payload.len() != self.frag_size {
            return Err(FecError::PayloadSizeMismatch {
                got: payload.len(),
                expected: self.frag_size,
            });
        }
        self.received += 1;
        let mut row = Row {
            bits: self.line_for(index),
            payload: payload.to_vec(),
        };
        while let Some(lead) = row.leading() {
            match &self.pivots[lead] {
                Some(pivot) => row.xor_in(pivot),
                None => {
                    self.pivots[lead] = Some(row);
                    self.rank += 1;
                    break;
                }
            }
        }
        Ok(if self.is_complete() {
            DecodeStatus::Complete
        } else {
            DecodeStatus::Pending
        })
    }

    /// Back-substitute and reassemble the image, stripping the padding.
    pub fn finalize(mut self, plan: &FragmentPlan) -> Result<Vec<u8>, FecError> {
        if !self.is_complete() {
            return Err(FecError::Incomplete {
                rank: self.rank,
                needed: self.nb_frag,
            });
        }
        // Eliminate columns right-to-left so every pivot row ends up with a
        // single set bit.
        for col in (0..self.nb_frag).rev() {
            let pivot = self.pivots[col].take().expect("complete decoder has all pivots");
            for other in self.pivots.iter_mut().flatten() {
                if other.bits[col / 64] & (1 << (col % 64)) != 0 {
                    other.xor_in(&pivot);
                }
            }
            self.pivots[col] = Some(pivot);
        }
        let mut image = Vec::with_capacity(self.nb_frag * self.frag_size);
        for pivot in self.pivots.iter().flatten() {
            image.extend_from_slice(&pivot.payload);
        }
        image.truncate(self.nb_frag * self.frag_size - plan.padding);
        Ok(image)
    }
}

// ============================================================================
// Tests
// ============================================================================
