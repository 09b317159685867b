//! Recoverable ECDSA over secp256k1, the investor's transaction authorization.
//!
//! Signatures are over `keccak256(M)` with RFC 6979 nonces and low-s normalization.
//! A wallet address is the trailing 20 bytes of `keccak256` of the uncompressed key.

use k256::ecdsa::{RecoveryId, Signature, SigningKey, VerifyingKey};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha3::{Digest, Keccak256};
use thiserror::Error;

pub const SIGNATURE_LEN: usize = 65;
pub const ADDRESS_LEN: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriggerError {
    #[error("signature does not recover a key")]
    RecoveryFailed,
    #[error("invalid secret key")]
    InvalidSecretKey,
    #[error("expected {expected} bytes, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address(pub [u8; ADDRESS_LEN]);

impl Address {
    pub fn from_slice(bytes: &[u8]) -> Result<Self, TriggerError> {
        let arr: [u8; ADDRESS_LEN] = bytes.try_into().map_err(|_| TriggerError::LengthMismatch {
            expected: ADDRESS_LEN,
            actual: bytes.len(),
        })?;
        Ok(Address(arr))
    }

    pub fn to_hex(&self) -> String {
        format!("0x{}", hex::encode(self.0))
    }

    pub fn from_hex(s: &str) -> Result<Self, TriggerError> {
        let raw = hex::decode(s.strip_prefix("0x").unwrap_or(s)).map_err(|_| TriggerError::LengthMismatch {
            expected: ADDRESS_LEN,
            actual: 0,
        })?;
        Address::from_slice(&raw)
    }
}

impl std::fmt::Debug for Address {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Address({})", self.to_hex())
    }
}

impl std::fmt::Display for Address {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[derive(Clone)]
pub struct EcdsaKeyPair {
    pub vk: VerifyingKey,
    sk: SigningKey,
}

impl EcdsaKeyPair {
    pub fn from_secret_bytes(bytes: &[u8]) -> Result<Self, TriggerError> {
        let sk = SigningKey::from_slice(bytes).map_err(|_| TriggerError::InvalidSecretKey)?;
        Ok(EcdsaKeyPair {
            vk: *sk.verifying_key(),
            sk,
        })
    }

    pub fn secret_bytes(&self) -> [u8; 32] {
        self.sk.to_bytes().into()
    }

    pub fn address(&self) -> Address {
        address_of(&self.vk)
    }
}

impl std::fmt::Debug for EcdsaKeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "EcdsaKeyPair({})", self.address())
    }
}

/// `(r, s, v)` with `s` in the low half of the scalar range and `v` in `0..=3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EcdsaSignature {
    pub r: [u8; 32],
    pub s: [u8; 32],
    pub v: u8,
}

impl EcdsaSignature {
    /// `r || s || v`.
    pub fn to_bytes(&self) -> [u8; SIGNATURE_LEN] {
        let mut out = [0u8; SIGNATURE_LEN];
        out[..32].copy_from_slice(&self.r);
        out[32..64].copy_from_slice(&self.s);
        out[64] = self.v;
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, TriggerError> {
        if bytes.len() != SIGNATURE_LEN {
            return Err(TriggerError::LengthMismatch {
                expected: SIGNATURE_LEN,
                actual: bytes.len(),
            });
        }
        Ok(EcdsaSignature {
            r: bytes[..32].try_into().unwrap(),
            s: bytes[32..64].try_into().unwrap(),
            v: bytes[64],
        })
    }
}

pub fn message_hash(m: &[u8]) -> [u8; 32] {
    Keccak256::digest(m).into()
}

/// Deterministic key pair from a seed.
pub fn ecdsa_keygen(seed: u64) -> EcdsaKeyPair {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let sk = SigningKey::random(&mut rng);
    EcdsaKeyPair {
        vk: *sk.verifying_key(),
        sk,
    }
}

pub fn address_of(vk: &VerifyingKey) -> Address {
    let point = vk.to_encoded_point(false);
    // drop the 0x04 tag
    let digest = Keccak256::digest(&point.as_bytes()[1..]);
    Address(digest[12..].try_into().unwrap())
}

pub fn ecdsa_sign(key: &EcdsaKeyPair, m: &[u8]) -> EcdsaSignature {
    let (sig, recid) = key
        .sk
        .sign_prehash_recoverable(&message_hash(m))
        .expect("32-byte prehash always signs");
    // low-s form, flipping the y parity bit when s is negated
    let (sig, recid) = match sig.normalize_s() {
        Some(low) => (low, RecoveryId::new(!recid.is_y_odd(), recid.is_x_reduced())),
        None => (sig, recid),
    };
    let (r, s) = sig.split_bytes();
    EcdsaSignature {
        r: r.into(),
        s: s.into(),
        v: recid.to_byte(),
    }
}

pub fn ecdsa_recover(sig: &EcdsaSignature, m: &[u8]) -> Result<VerifyingKey, TriggerError> {
    let recid = RecoveryId::from_byte(sig.v).ok_or(TriggerError::RecoveryFailed)?;
    let parsed = Signature::from_scalars(sig.r, sig.s).map_err(|_| TriggerError::RecoveryFailed)?;
    if parsed.normalize_s().is_some() {
        return Err(TriggerError::RecoveryFailed);
    }
    VerifyingKey::recover_from_prehash(&message_hash(m), &parsed, recid).map_err(|_| TriggerError::RecoveryFailed)
}

/// `address_of(recover(sig, M)) == addr`; recovery failures count as a reject.
pub fn verify_against_address(sig: &EcdsaSignature, m: &[u8], addr: &Address) -> bool {
    ecdsa_recover(sig, m).is_ok_and(|vk| address_of(&vk) == *addr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use k256::elliptic_curve::ops::Reduce;
    use k256::{Scalar as K256Scalar, U256};

    fn key_from_u64(x: u64) -> EcdsaKeyPair {
        let mut bytes = [0u8; 32];
        bytes[24..].copy_from_slice(&x.to_be_bytes());
        EcdsaKeyPair::from_secret_bytes(&bytes).unwrap()
    }

    #[test]
    fn well_known_addresses() {
        assert_eq!(key_from_u64(1).address().to_hex(), "0x7e5f4552091a69125d5dfcb7b8c2659029395bdf");
        assert_eq!(key_from_u64(2).address().to_hex(), "0x2b5ad5c4795c026514f8317c7a215e218dccd6cf");
    }

    #[test]
    fn pinned_signature() {
        let key = key_from_u64(1);
        let sig = ecdsa_sign(&key, b"nomsig trigger");
        assert_eq!(hex::encode(sig.to_bytes()), PINNED_SIG);
    }

    // r and s agree with python-ecdsa's RFC 6979 signer on the same digest
    const PINNED_SIG: &str = "2d3aa89928e8d8c8e5222863ad4d7aed26d455c6aa92a2fa085da8f464a9c45122dc130a066e41bda44092f871fbddd1f60c1a84d212e65d2c7f1aa1c3a3a16801";

    #[test]
    fn sign_recover_roundtrip() {
        for seed in 0..50 {
            let key = ecdsa_keygen(seed);
            let m = seed.to_be_bytes();
            let sig = ecdsa_sign(&key, &m);
            assert_eq!(ecdsa_recover(&sig, &m).unwrap(), key.vk);
            assert!(verify_against_address(&sig, &m, &key.address()));
            assert_eq!(EcdsaSignature::from_bytes(&sig.to_bytes()).unwrap(), sig);
        }
    }

    #[test]
    fn deterministic_signing_and_keys() {
        let key = ecdsa_keygen(7);
        assert_eq!(ecdsa_sign(&key, b"x"), ecdsa_sign(&key, b"x"));
        assert_eq!(ecdsa_keygen(7).address(), key.address());
        assert_eq!(address_of(&key.vk), address_of(&key.vk));
        let addrs: std::collections::BTreeSet<_> = (0..200).map(|s| ecdsa_keygen(s).address()).collect();
        assert_eq!(addrs.len(), 200);
    }

    #[test]
    fn perturbed_message_rejected() {
        let key = ecdsa_keygen(3);
        let m = b"transfer 100".to_vec();
        let sig = ecdsa_sign(&key, &m);
        for i in 0..m.len() {
            let mut bad = m.clone();
            bad[i] ^= 1;
            assert!(!verify_against_address(&sig, &bad, &key.address()));
        }
        assert!(!verify_against_address(&sig, &m, &ecdsa_keygen(4).address()));
    }

    #[test]
    fn high_s_rejected() {
        let key = ecdsa_keygen(5);
        let sig = ecdsa_sign(&key, b"m");
        let s = <K256Scalar as Reduce<U256>>::reduce_bytes(&sig.s.into());
        let high = EcdsaSignature {
            s: (-s).to_bytes().into(),
            v: sig.v ^ 1,
            ..sig
        };
        // the flipped signature is mathematically valid, only non-canonical
        assert_eq!(ecdsa_recover(&high, b"m"), Err(TriggerError::RecoveryFailed));
    }

    #[test]
    fn malformed_components_rejected() {
        let key = ecdsa_keygen(6);
        let sig = ecdsa_sign(&key, b"m");
        for bad in [
            EcdsaSignature { v: 4, ..sig },
            EcdsaSignature { r: [0; 32], ..sig },
            EcdsaSignature { s: [0; 32], ..sig },
            EcdsaSignature { r: [0xff; 32], ..sig },
        ] {
            assert_eq!(ecdsa_recover(&bad, b"m"), Err(TriggerError::RecoveryFailed));
        }
        assert!(EcdsaSignature::from_bytes(&[0; 64]).is_err());
    }
}
