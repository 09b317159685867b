//! Pairing-group abstraction shared by the scheme, the proofs and the contract.
//!
//! Everything above this module is generic over a [`Backend`]. Two backends exist:
//!
//! * [`Bn254`]: the 254-bit Barreto–Naehrig curve used by the Ethereum
//!   `ecAdd`/`ecPairing` precompiles, type-3 (no map between the source groups).
//! * [`MockExp`]: every element is represented by its discrete log with respect to
//!   the fixed generator of its group. Group law is addition of exponents and the
//!   pairing multiplies exponents. This backend is the brute-force oracle used by
//!   the test suites: verification equations turn into identities over `Z_p`.
//!
//! Both backends share the scalar field, so a seeded RNG produces the same scalar
//! trace whichever backend consumes it. Hash inputs use [`GroupElement::transcript_bytes`],
//! which for the mock is the BN254 encoding of `generator^exponent`; hashed values (and
//! therefore the whole execution) coincide between the two backends.

mod bn254;
mod hash;
mod mock;

use std::fmt::Debug;

use ark_ff::{BigInteger, PrimeField};
use thiserror::Error;

pub use bn254::{Bn254, G1Point, G2Point, GtPoint};
pub use hash::{hash_h1, hash_h2, BitString, HashInput, BIT_LENGTH, H1_TAG, H2_TAG};
pub use mock::{MockExp, MockG1, MockG2, MockGt};

/// Element of `Z_p`, `p` the order of the BN254 pairing groups.
pub type Scalar = ark_bn254::Fr;

/// Length in bytes of an encoded scalar.
pub const SCALAR_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("malformed encoding")]
    MalformedEncoding,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("point is not in the prime-order subgroup")]
    NotInSubgroup,
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
}

/// Which arithmetic sits behind a [`Backend`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BackendKind {
    RealCurve,
    MockExponent,
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::RealCurve => "bn254",
            BackendKind::MockExponent => "mock-exponent",
        }
    }
}

/// A prime-order group written multiplicatively.
pub trait GroupElement: Copy + Clone + PartialEq + Eq + Debug + Send + Sync + 'static {
    /// Size of [`GroupElement::to_bytes`] output.
    const ENCODED_LEN: usize;

    fn identity() -> Self;
    fn generator() -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn invert(&self) -> Self;
    fn pow(&self, exponent: &Scalar) -> Self;
    fn is_identity(&self) -> bool;

    fn div(&self, other: &Self) -> Self {
        self.mul(&other.invert())
    }

    /// Canonical wire encoding.
    fn to_bytes(&self) -> Vec<u8>;
    /// Inverse of [`GroupElement::to_bytes`]; rejects every non-canonical input.
    fn from_bytes(bytes: &[u8]) -> Result<Self, AlgebraError>;

    /// Bytes fed into `H1`/`H2`. Identical across backends for the same exponent.
    fn transcript_bytes(&self) -> Vec<u8>;

    fn random<R: rand::RngCore + ?Sized>(rng: &mut R) -> Self {
        Self::generator().pow(&random_scalar(rng))
    }
}

/// Three groups and an asymmetric pairing `G1 x G2 -> Gt`.
pub trait Backend: Copy + Clone + Debug + Default + PartialEq + Eq + Send + Sync + 'static {
    type G1: GroupElement;
    type G2: GroupElement;
    type Gt: GroupElement;

    const KIND: BackendKind;

    fn pairing(a: &Self::G1, b: &Self::G2) -> Self::Gt;

    /// `prod_i e(a_i, b_i)`.
    fn multi_pairing(pairs: &[(Self::G1, Self::G2)]) -> Self::Gt {
        pairs
            .iter()
            .fold(Self::Gt::identity(), |acc, (a, b)| acc.mul(&Self::pairing(a, b)))
    }

    /// Deterministic `G2` element with unknown discrete log (for the real curve).
    fn hash_to_g2(tag: &[u8]) -> Self::G2;
}

pub fn random_scalar<R: rand::RngCore + ?Sized>(rng: &mut R) -> Scalar {
    // 64 bytes reduced mod p keeps the bias below 2^-256.
    let mut wide = [0u8; 64];
    rng.fill_bytes(&mut wide);
    Scalar::from_be_bytes_mod_order(&wide)
}

pub fn random_nonzero_scalar<R: rand::RngCore + ?Sized>(rng: &mut R) -> Scalar {
    loop {
        let s = random_scalar(rng);
        if s != Scalar::from(0u64) {
            return s;
        }
    }
}

pub fn scalar_to_bytes(s: &Scalar) -> [u8; SCALAR_LEN] {
    let be = s.into_bigint().to_bytes_be();
    let mut out = [0u8; SCALAR_LEN];
    out[SCALAR_LEN - be.len()..].copy_from_slice(&be);
    out
}

/// Parses a 32-byte big-endian scalar, rejecting values `>= p`.
pub fn scalar_from_bytes(bytes: &[u8]) -> Result<Scalar, AlgebraError> {
    if bytes.len() != SCALAR_LEN {
        return Err(AlgebraError::LengthMismatch {
            expected: SCALAR_LEN,
            actual: bytes.len(),
        });
    }
    let s = Scalar::from_be_bytes_mod_order(bytes);
    if scalar_to_bytes(&s)[..] != bytes[..] {
        return Err(AlgebraError::MalformedEncoding);
    }
    Ok(s)
}

/// Bit length of the group order `p`.
pub fn scalar_modulus_bits() -> u32 {
    Scalar::MODULUS_BIT_SIZE
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn bilinear<B: Backend>(a: u64, b: u64) {
        let (sa, sb) = (Scalar::from(a), Scalar::from(b));
        let lhs = B::pairing(&B::G1::generator().pow(&sa), &B::G2::generator().pow(&sb));
        let base = B::pairing(&B::G1::generator(), &B::G2::generator());
        assert_eq!(lhs, base.pow(&(sa * sb)));
    }

    #[test]
    fn pairing_is_bilinear_on_both_backends() {
        bilinear::<Bn254>(3, 5);
        bilinear::<MockExp>(3, 5);
    }

    #[test]
    fn pairing_with_identity_is_identity() {
        assert!(Bn254::pairing(&G1Point::identity(), &G2Point::generator()).is_identity());
        assert!(MockExp::pairing(&MockG1::identity(), &MockG2::generator()).is_identity());
    }

    #[test]
    fn pairing_is_non_degenerate() {
        assert!(!Bn254::pairing(&G1Point::generator(), &G2Point::generator()).is_identity());
    }

    #[test]
    fn mock_pairing_multiplies_exponents() {
        let a = MockG1::from_exponent(Scalar::from(7u64));
        let b = MockG2::from_exponent(Scalar::from(11u64));
        assert_eq!(MockExp::pairing(&a, &b).exponent(), Scalar::from(77u64));
    }

    #[test]
    fn multi_pairing_matches_product() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let pairs: Vec<_> = (0..3)
            .map(|_| (G1Point::random(&mut rng), G2Point::random(&mut rng)))
            .collect();
        let expected = pairs
            .iter()
            .fold(GtPoint::identity(), |acc, (a, b)| acc.mul(&Bn254::pairing(a, b)));
        assert_eq!(Bn254::multi_pairing(&pairs), expected);
    }

    #[test]
    fn scalar_encoding_rejects_modulus() {
        let p = Scalar::MODULUS.to_bytes_be();
        assert_eq!(scalar_from_bytes(&p), Err(AlgebraError::MalformedEncoding));
        let one = scalar_to_bytes(&Scalar::from(1u64));
        assert_eq!(one[31], 1);
        assert_eq!(scalar_from_bytes(&one).unwrap(), Scalar::from(1u64));
    }

    #[test]
    fn scalar_modulus_is_254_bits() {
        assert_eq!(scalar_modulus_bits(), 254);
    }
}
