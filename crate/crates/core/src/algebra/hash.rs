use ark_ff::PrimeField;
use sha2::{Digest, Sha256, Sha512};

use super::Scalar;

/// Message length `l` of the Waters hash.
pub const BIT_LENGTH: usize = 256;

pub const H1_TAG: &[u8] = b"NOMSIG-H1";
pub const H2_TAG: &[u8] = b"NOMSIG-H2";

/// Fixed-length bit string `m_1 .. m_l`, `m_1` the most significant bit of byte 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitString([u8; BIT_LENGTH / 8]);

impl BitString {
    pub const fn from_bytes(bytes: [u8; BIT_LENGTH / 8]) -> Self {
        BitString(bytes)
    }

    pub const fn zeros() -> Self {
        BitString([0; BIT_LENGTH / 8])
    }

    pub const fn ones() -> Self {
        BitString([0xff; BIT_LENGTH / 8])
    }

    pub fn as_bytes(&self) -> &[u8; BIT_LENGTH / 8] {
        &self.0
    }

    /// `m_i` for `i` in `1..=l`.
    pub fn bit(&self, i: usize) -> bool {
        assert!((1..=BIT_LENGTH).contains(&i), "bit index {i} out of range");
        let idx = i - 1;
        (self.0[idx / 8] >> (7 - idx % 8)) & 1 == 1
    }

    pub fn hamming_weight(&self) -> usize {
        self.0.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn len(&self) -> usize {
        BIT_LENGTH
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl std::fmt::Debug for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitString({})", hex::encode(self.0))
    }
}

/// Length-prefixed concatenation of fields, so that `a || b` is never ambiguous.
#[derive(Debug, Default, Clone)]
pub struct HashInput(Vec<u8>);

impl HashInput {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(mut self, bytes: &[u8]) -> Self {
        self.0.extend_from_slice(&(bytes.len() as u64).to_be_bytes());
        self.0.extend_from_slice(bytes);
        self
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// `H1 : {0,1}* -> {0,1}^256`, SHA-256 under a domain tag.
pub fn hash_h1(data: &[u8]) -> BitString {
    let digest = Sha256::new().chain_update(H1_TAG).chain_update(data).finalize();
    BitString(digest.into())
}

/// `H2 : {0,1}* -> Z_p`, a SHA-512 digest reduced mod `p`.
pub fn hash_h2(data: &[u8]) -> Scalar {
    let digest = Sha512::new().chain_update(H2_TAG).chain_update(data).finalize();
    Scalar::from_be_bytes_mod_order(&digest)
}
