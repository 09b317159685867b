use ark_ff::Zero;
use sha2::{Digest, Sha512};

use super::bn254::{G1Point, G2Point, GtPoint};
use super::{scalar_from_bytes, scalar_to_bytes, AlgebraError, Backend, BackendKind, GroupElement, Scalar, SCALAR_LEN};

/// Exponent-tracking oracle: elements are discrete logs, the pairing multiplies them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MockExp;

macro_rules! mock_group {
    ($name:ident, $real:ty, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub struct $name(Scalar);

        impl $name {
            pub fn from_exponent(e: Scalar) -> Self {
                $name(e)
            }

            pub fn exponent(&self) -> Scalar {
                self.0
            }

            /// The BN254 element with the same discrete log.
            pub fn lift(&self) -> $real {
                <$real>::generator().pow(&self.0)
            }
        }

        impl GroupElement for $name {
            const ENCODED_LEN: usize = SCALAR_LEN;

            fn identity() -> Self {
                $name(Scalar::zero())
            }

            fn generator() -> Self {
                $name(Scalar::from(1u64))
            }

            fn mul(&self, other: &Self) -> Self {
                $name(self.0 + other.0)
            }

            fn invert(&self) -> Self {
                $name(-self.0)
            }

            fn pow(&self, exponent: &Scalar) -> Self {
                $name(self.0 * exponent)
            }

            fn is_identity(&self) -> bool {
                self.0.is_zero()
            }

            fn to_bytes(&self) -> Vec<u8> {
                scalar_to_bytes(&self.0).to_vec()
            }

            fn from_bytes(bytes: &[u8]) -> Result<Self, AlgebraError> {
                scalar_from_bytes(bytes).map($name)
            }

            fn transcript_bytes(&self) -> Vec<u8> {
                self.lift().to_bytes()
            }
        }
    };
}

mock_group!(MockG1, G1Point, "Mock `G1` element: `g1^exponent`.");
mock_group!(MockG2, G2Point, "Mock `G2` element: `g2^exponent`.");
mock_group!(MockGt, GtPoint, "Mock `Gt` element: `e(g1, g2)^exponent`.");

impl Backend for MockExp {
    type G1 = MockG1;
    type G2 = MockG2;
    type Gt = MockGt;

    const KIND: BackendKind = BackendKind::MockExponent;

    fn pairing(a: &MockG1, b: &MockG2) -> MockGt {
        MockGt(a.0 * b.0)
    }

    fn hash_to_g2(tag: &[u8]) -> MockG2 {
        let digest = Sha512::new()
            .chain_update(b"NOMSIG-MOCK-HASH-TO-G2")
            .chain_update(tag)
            .finalize();
        MockG2(<Scalar as ark_ff::PrimeField>::from_be_bytes_mod_order(&digest))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Bn254;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn lift_is_a_homomorphism() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let a = MockG1::random(&mut rng);
        let b = MockG2::random(&mut rng);
        let real = Bn254::pairing(&a.lift(), &b.lift());
        assert_eq!(MockExp::pairing(&a, &b).lift(), real);
        let c = MockG2::random(&mut rng);
        assert_eq!(b.mul(&c).lift(), b.lift().mul(&c.lift()));
    }

    #[test]
    fn transcript_bytes_match_real_encoding() {
        let e = Scalar::from(12345u64);
        let mock = MockG2::from_exponent(e);
        assert_eq!(mock.transcript_bytes(), G2Point::generator().pow(&e).to_bytes());
    }

    #[test]
    fn roundtrip_and_reject_overflow() {
        let m = MockG1::from_exponent(Scalar::from(42u64));
        assert_eq!(MockG1::from_bytes(&m.to_bytes()).unwrap(), m);
        assert_eq!(MockG1::from_bytes(&[0xff; 32]), Err(AlgebraError::MalformedEncoding));
    }
}
