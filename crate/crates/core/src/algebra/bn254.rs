use std::sync::OnceLock;

use ark_bn254::{Fq, Fq2, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup};
use ark_ff::{BigInteger, PrimeField, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize, Compress, Valid, Validate};
use sha2::{Digest, Sha512};

use super::{AlgebraError, Backend, BackendKind, GroupElement, Scalar};

/// The alt_bn128 curve behind Ethereum's `ecPairing` precompile.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Bn254;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct G1Point(pub G1Projective);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct G2Point(pub G2Projective);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GtPoint(pub PairingOutput<ark_bn254::Bn254>);

const FQ_LEN: usize = 32;

// Every 32-byte little-endian limb must encode a value below q once the
// two flag bits of the final limb are masked off.
fn coordinates_canonical(bytes: &[u8]) -> bool {
    let chunks = bytes.len() / FQ_LEN;
    let modulus = Fq::MODULUS.to_bytes_le();
    bytes.chunks(FQ_LEN).enumerate().all(|(i, chunk)| {
        let mut limb = chunk.to_vec();
        if i + 1 == chunks {
            limb[FQ_LEN - 1] &= 0x3f;
        }
        // compare as little-endian integers
        limb.iter().rev().cmp(modulus.iter().rev()) == std::cmp::Ordering::Less
    })
}

fn flags_valid(bytes: &[u8]) -> bool {
    // both "negative" and "infinity" set is not a legal combination
    bytes.last().map(|b| b >> 6 != 0b11).unwrap_or(false)
}

fn decode_point<A>(bytes: &[u8], len: usize) -> Result<A, AlgebraError>
where
    A: AffineRepr + CanonicalDeserialize + CanonicalSerialize,
{
    if bytes.len() != len {
        return Err(AlgebraError::LengthMismatch {
            expected: len,
            actual: bytes.len(),
        });
    }
    if !flags_valid(bytes) || !coordinates_canonical(bytes) {
        return Err(AlgebraError::MalformedEncoding);
    }
    let point = A::deserialize_with_mode(bytes, Compress::Yes, Validate::No)
        .map_err(|_| AlgebraError::NotOnCurve)?;
    let mut again = Vec::with_capacity(len);
    point
        .serialize_compressed(&mut again)
        .map_err(|_| AlgebraError::MalformedEncoding)?;
    if again != bytes {
        // e.g. an infinity flag carrying a nonzero x
        return Err(AlgebraError::MalformedEncoding);
    }
    Ok(point)
}

fn encode<T: CanonicalSerialize>(value: &T) -> Vec<u8> {
    let mut out = Vec::with_capacity(value.compressed_size());
    value
        .serialize_compressed(&mut out)
        .expect("serializing into a Vec cannot fail");
    out
}

impl GroupElement for G1Point {
    const ENCODED_LEN: usize = 32;

    fn identity() -> Self {
        G1Point(G1Projective::zero())
    }

    fn generator() -> Self {
        G1Point(G1Projective::generator())
    }

    fn mul(&self, other: &Self) -> Self {
        G1Point(self.0 + other.0)
    }

    fn invert(&self) -> Self {
        G1Point(-self.0)
    }

    fn pow(&self, exponent: &Scalar) -> Self {
        G1Point(self.0 * exponent)
    }

    fn is_identity(&self) -> bool {
        self.0.is_zero()
    }

    fn to_bytes(&self) -> Vec<u8> {
        encode(&self.0.into_affine())
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self, AlgebraError> {
        let p: G1Affine = decode_point(bytes, Self::ENCODED_LEN)?;
        if !p.is_in_correct_subgroup_assuming_on_curve() {
            return Err(AlgebraError::NotInSubgroup);
        }
        Ok(G1Point(p.into_group()))
    }

    fn transcript_bytes(&self) -> Vec<u8> {
        self.to_bytes()
    }
}

impl GroupElement for G2Point {
    const ENCODED_LEN: usize = 64;

    fn identity() -> Self {
        G2Point(G2Projective::zero())
    }

    fn generator() -> Self {
        G2Point(G2Projective::generator())
    }

    fn mul(&self, other: &Self) -> Self {
        G2Point(self.0 + other.0)
    }

    fn invert(&self) -> Self {
        G2Point(-self.0)
    }

    fn pow(&self, exponent: &Scalar) -> Self {
        G2Point(self.0 * exponent)
    }

    fn is_identity(&self) -> bool {
        self.0.is_zero()
    }

    fn to_bytes(&self) -> Vec<u8> {
        encode(&self.0.into_affine())
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self, AlgebraError> {
        let p: G2Affine = decode_point(bytes, Self::ENCODED_LEN)?;
        if !p.is_in_correct_subgroup_assuming_on_curve() {
            return Err(AlgebraError::NotInSubgroup);
        }
        Ok(G2Point(p.into_group()))
    }

    fn transcript_bytes(&self) -> Vec<u8> {
        self.to_bytes()
    }
}

fn gt_generator() -> GtPoint {
    static GEN: OnceLock<GtPoint> = OnceLock::new();
    *GEN.get_or_init(|| Bn254::pairing(&G1Point::generator(), &G2Point::generator()))
}

impl GroupElement for GtPoint {
    const ENCODED_LEN: usize = 384;

    fn identity() -> Self {
        GtPoint(PairingOutput::zero())
    }

    fn generator() -> Self {
        gt_generator()
    }

    fn mul(&self, other: &Self) -> Self {
        GtPoint(self.0 + other.0)
    }

    fn invert(&self) -> Self {
        GtPoint(-self.0)
    }

    fn pow(&self, exponent: &Scalar) -> Self {
        GtPoint(self.0 * exponent)
    }

    fn is_identity(&self) -> bool {
        self.0.is_zero()
    }

    fn to_bytes(&self) -> Vec<u8> {
        encode(&self.0)
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self, AlgebraError> {
        if bytes.len() != Self::ENCODED_LEN {
            return Err(AlgebraError::LengthMismatch {
                expected: Self::ENCODED_LEN,
                actual: bytes.len(),
            });
        }
        let value =
            PairingOutput::<ark_bn254::Bn254>::deserialize_with_mode(bytes, Compress::Yes, Validate::No)
                .map_err(|_| AlgebraError::MalformedEncoding)?;
        if encode(&value) != bytes {
            return Err(AlgebraError::MalformedEncoding);
        }
        value.check().map_err(|_| AlgebraError::NotInSubgroup)?;
        Ok(GtPoint(value))
    }

    fn transcript_bytes(&self) -> Vec<u8> {
        self.to_bytes()
    }
}

impl Backend for Bn254 {
    type G1 = G1Point;
    type G2 = G2Point;
    type Gt = GtPoint;

    const KIND: BackendKind = BackendKind::RealCurve;

    fn pairing(a: &G1Point, b: &G2Point) -> GtPoint {
        GtPoint(ark_bn254::Bn254::pairing(a.0, b.0))
    }

    fn multi_pairing(pairs: &[(G1Point, G2Point)]) -> GtPoint {
        let (a, b): (Vec<G1Affine>, Vec<G2Affine>) = pairs
            .iter()
            .map(|(a, b)| (a.0.into_affine(), b.0.into_affine()))
            .unzip();
        GtPoint(ark_bn254::Bn254::multi_pairing(a, b))
    }

    /// Try-and-increment onto the twist, then cofactor clearing.
    fn hash_to_g2(tag: &[u8]) -> G2Point {
        for counter in 0u32.. {
            let digest = Sha512::new()
                .chain_update(b"NOMSIG-HASH-TO-G2")
                .chain_update((tag.len() as u64).to_be_bytes())
                .chain_update(tag)
                .chain_update(counter.to_be_bytes())
                .finalize();
            let x = Fq2::new(
                Fq::from_be_bytes_mod_order(&digest[..32]),
                Fq::from_be_bytes_mod_order(&digest[32..]),
            );
            if let Some(point) = G2Affine::get_point_from_x_unchecked(x, true) {
                let cleared = point.clear_cofactor();
                if !cleared.is_zero() {
                    return G2Point(cleared.into_group());
                }
            }
        }
        unreachable!("counter space exhausted")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn compressed_sizes() {
        assert_eq!(G1Point::generator().to_bytes().len(), 32);
        assert_eq!(G2Point::generator().to_bytes().len(), 64);
        assert_eq!(GtPoint::generator().to_bytes().len(), 384);
    }

    #[test]
    fn generator_roundtrips() {
        let g1 = G1Point::generator();
        assert_eq!(G1Point::from_bytes(&g1.to_bytes()).unwrap(), g1);
        let g2 = G2Point::generator();
        assert_eq!(G2Point::from_bytes(&g2.to_bytes()).unwrap(), g2);
        let gt = GtPoint::generator();
        assert_eq!(GtPoint::from_bytes(&gt.to_bytes()).unwrap(), gt);
    }

    #[test]
    fn identity_roundtrips() {
        let id = G1Point::identity();
        assert_eq!(G1Point::from_bytes(&id.to_bytes()).unwrap(), id);
        let id = G2Point::identity();
        assert_eq!(G2Point::from_bytes(&id.to_bytes()).unwrap(), id);
    }

    #[test]
    fn all_ff_is_malformed() {
        assert_eq!(G1Point::from_bytes(&[0xff; 32]), Err(AlgebraError::MalformedEncoding));
        assert_eq!(G2Point::from_bytes(&[0xff; 64]), Err(AlgebraError::MalformedEncoding));
        assert_eq!(GtPoint::from_bytes(&[0xff; 384]), Err(AlgebraError::MalformedEncoding));
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(matches!(
            G1Point::from_bytes(&[0u8; 31]),
            Err(AlgebraError::LengthMismatch { expected: 32, actual: 31 })
        ));
    }

    #[test]
    fn off_curve_x_rejected() {
        let mut bytes = [0u8; 32];
        let found = (0u8..64).find(|&x| {
            bytes[0] = x;
            G1Point::from_bytes(&bytes) == Err(AlgebraError::NotOnCurve)
        });
        assert!(found.is_some());
    }

    #[test]
    fn twist_point_outside_subgroup_rejected() {
        // pick an x on the twist without clearing the cofactor
        let mut counter = 1u64;
        let point = loop {
            let x = Fq2::new(Fq::from(counter), Fq::from(7u64));
            if let Some(p) = G2Affine::get_point_from_x_unchecked(x, true) {
                if !p.is_in_correct_subgroup_assuming_on_curve() {
                    break p;
                }
            }
            counter += 1;
        };
        let bytes = encode(&point);
        assert_eq!(G2Point::from_bytes(&bytes), Err(AlgebraError::NotInSubgroup));
    }

    #[test]
    fn non_canonical_infinity_rejected() {
        let mut bytes = G1Point::identity().to_bytes();
        bytes[0] = 1;
        assert_eq!(G1Point::from_bytes(&bytes), Err(AlgebraError::MalformedEncoding));
    }

    #[test]
    fn hash_to_g2_is_deterministic_and_in_subgroup() {
        let h = Bn254::hash_to_g2(b"test");
        assert_eq!(h, Bn254::hash_to_g2(b"test"));
        assert_ne!(h, Bn254::hash_to_g2(b"other"));
        assert!(h.0.into_affine().is_in_correct_subgroup_assuming_on_curve());
        assert!(!h.is_identity());
    }

    #[test]
    fn random_roundtrip_suite() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let a = G1Point::random(&mut rng);
            assert_eq!(G1Point::from_bytes(&a.to_bytes()).unwrap(), a);
            let b = G2Point::random(&mut rng);
            assert_eq!(G2Point::from_bytes(&b.to_bytes()).unwrap(), b);
        }
        for _ in 0..20 {
            let c = GtPoint::random(&mut rng);
            assert_eq!(GtPoint::from_bytes(&c.to_bytes()).unwrap(), c);
        }
    }
}
