//! Hanaoka–Schuldt nominative signatures, adapted to a type-3 pairing.
//!
//! The signer (business operator) produces a pre-signature [`DeltaMsg`], which is a
//! Waters signature `(g1^r, g2^r, h_S^{a_S} F_S(M_S)^r)` on `M_S = H1(pk_N || m)`.
//! The nominee (investor) checks it, re-randomizes it and folds in its own Waters
//! component to obtain the nominative signature [`NomSignature`]. Nobody but the
//! nominee can tell a valid `sigma` from random; the nominee can either prove validity
//! interactively (see [`crate::zkproto`]) or publish a [`VerificationToken`] that makes
//! `sigma` publicly checkable with [`tk_verify`].
//!
//! Group law is written multiplicatively throughout. Every randomized operation takes
//! the RNG explicitly, and scalars are drawn in a fixed order so that a seeded run
//! produces the same trace on every [`Backend`].

use std::fmt;

use rand::RngCore;
use thiserror::Error;

use crate::algebra::{
    hash_h1, hash_h2, random_nonzero_scalar, random_scalar, AlgebraError, Backend, BitString,
    GroupElement, HashInput, Scalar, BIT_LENGTH,
};
use crate::gasmodel::OpCounts;

/// The only supported security level (bits).
pub const SECURITY_LEVEL: u32 = 128;

/// Tag for the independent Pedersen base used by the interactive proofs.
pub const PEDERSEN_TAG: &[u8] = b"NOMSIG-PEDERSEN-H";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("unsupported security level {0}")]
    UnsupportedSecurityLevel(u32),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("pre-signature fails the Waters verification equation")]
    WatersEquation,
    #[error("pre-signature uses different randomness in G1 and G2")]
    RandomnessMismatch,
    #[error("signature does not verify under the nominee key")]
    ConversionEquation,
}

impl SchemeError {
    /// True for the outcomes written as `⊥` (as opposed to malformed input).
    pub fn is_rejection(&self) -> bool {
        matches!(
            self,
            SchemeError::WatersEquation
                | SchemeError::RandomnessMismatch
                | SchemeError::ConversionEquation
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicParams<B: Backend> {
    pub security: u32,
    pub g1: B::G1,
    pub g2: B::G2,
    /// Bit length of `H1` output and of the Waters hash input.
    pub ell: usize,
    /// Second Pedersen base in `G2`, nothing-up-my-sleeve.
    pub pedersen_h: B::G2,
}

pub fn setup<B: Backend>(security: u32) -> Result<PublicParams<B>, SchemeError> {
    if security != SECURITY_LEVEL {
        return Err(SchemeError::UnsupportedSecurityLevel(security));
    }
    Ok(PublicParams {
        security,
        g1: B::G1::generator(),
        g2: B::G2::generator(),
        ell: BIT_LENGTH,
        pedersen_h: B::hash_to_g2(PEDERSEN_TAG),
    })
}

fn check_bases<G>(bases: &[G]) -> Result<(), AlgebraError> {
    if bases.len() != BIT_LENGTH + 1 {
        return Err(AlgebraError::LengthMismatch {
            expected: BIT_LENGTH + 1,
            actual: bases.len(),
        });
    }
    Ok(())
}

/// Waters hash `u_0 * prod_{i : m_i = 1} u_i`.
///
/// Also returns the number of group multiplications performed, which is the
/// Hamming weight of `m`.
pub fn waters_eval<G: GroupElement>(bases: &[G], m: &BitString) -> Result<(G, u64), AlgebraError> {
    check_bases(bases)?;
    let mut acc = bases[0];
    let mut muls = 0;
    for (i, base) in bases.iter().enumerate().skip(1) {
        if m.bit(i) {
            acc = acc.mul(base);
            muls += 1;
        }
    }
    Ok((acc, muls))
}

/// `pk_S = (g_S, h_S, u_0 .. u_l)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignerPublicKey<B: Backend> {
    g_s: B::G1,
    h_s: B::G2,
    u: Vec<B::G2>,
    // hash encoding, fixed at construction
    transcript: Vec<u8>,
}

impl<B: Backend> SignerPublicKey<B> {
    pub fn new(g_s: B::G1, h_s: B::G2, u: Vec<B::G2>) -> Result<Self, AlgebraError> {
        check_bases(&u)?;
        let mut transcript = g_s.transcript_bytes();
        transcript.extend(h_s.transcript_bytes());
        for x in &u {
            transcript.extend(x.transcript_bytes());
        }
        Ok(SignerPublicKey {
            g_s,
            h_s,
            u,
            transcript,
        })
    }

    pub fn g_s(&self) -> &B::G1 {
        &self.g_s
    }

    pub fn h_s(&self) -> &B::G2 {
        &self.h_s
    }

    /// Waters bases `u_0 .. u_l`.
    pub fn u(&self) -> &[B::G2] {
        &self.u
    }

    pub fn transcript_bytes(&self) -> &[u8] {
        &self.transcript
    }

    pub fn waters(&self, m: &BitString) -> (B::G2, u64) {
        waters_eval(&self.u, m).expect("length checked at construction")
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct SignerSecretKey {
    pub alpha_s: Scalar,
}

impl fmt::Debug for SignerSecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SignerSecretKey(..)")
    }
}

/// `pk_N = (g_N, h_N, k, u'_0 .. u'_l, x1, x2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NomineePublicKey<B: Backend> {
    g_n: B::G1,
    h_n: B::G2,
    k: B::G2,
    u_prime: Vec<B::G2>,
    x1: B::G2,
    x2: B::G2,
    transcript: Vec<u8>,
}

impl<B: Backend> NomineePublicKey<B> {
    pub fn new(
        g_n: B::G1,
        h_n: B::G2,
        k: B::G2,
        u_prime: Vec<B::G2>,
        x1: B::G2,
        x2: B::G2,
    ) -> Result<Self, AlgebraError> {
        check_bases(&u_prime)?;
        let mut transcript = g_n.transcript_bytes();
        transcript.extend(h_n.transcript_bytes());
        transcript.extend(k.transcript_bytes());
        for x in &u_prime {
            transcript.extend(x.transcript_bytes());
        }
        transcript.extend(x1.transcript_bytes());
        transcript.extend(x2.transcript_bytes());
        Ok(NomineePublicKey {
            g_n,
            h_n,
            k,
            u_prime,
            x1,
            x2,
            transcript,
        })
    }

    pub fn g_n(&self) -> &B::G1 {
        &self.g_n
    }

    pub fn h_n(&self) -> &B::G2 {
        &self.h_n
    }

    pub fn k(&self) -> &B::G2 {
        &self.k
    }

    pub fn u_prime(&self) -> &[B::G2] {
        &self.u_prime
    }

    pub fn x1(&self) -> &B::G2 {
        &self.x1
    }

    pub fn x2(&self) -> &B::G2 {
        &self.x2
    }

    pub fn transcript_bytes(&self) -> &[u8] {
        &self.transcript
    }

    pub fn waters(&self, m: &BitString) -> (B::G2, u64) {
        waters_eval(&self.u_prime, m).expect("length checked at construction")
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct NomineeSecretKey {
    pub alpha_n: Scalar,
    v_prime: Vec<Scalar>,
    pub y1: Scalar,
    pub y2: Scalar,
}

impl NomineeSecretKey {
    pub fn new(alpha_n: Scalar, v_prime: Vec<Scalar>, y1: Scalar, y2: Scalar) -> Result<Self, AlgebraError> {
        check_bases(&v_prime)?;
        if y1 == Scalar::from(0u64) || y2 == Scalar::from(0u64) {
            return Err(AlgebraError::MalformedEncoding);
        }
        Ok(NomineeSecretKey {
            alpha_n,
            v_prime,
            y1,
            y2,
        })
    }

    pub fn v_prime(&self) -> &[Scalar] {
        &self.v_prime
    }

    /// `v'_0 + sum_i v'_i m_i`, the discrete log of `F_N(m)`.
    pub fn waters_exponent(&self, m: &BitString) -> Scalar {
        (1..=BIT_LENGTH)
            .filter(|&i| m.bit(i))
            .fold(self.v_prime[0], |acc, i| acc + self.v_prime[i])
    }
}

impl fmt::Debug for NomineeSecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("NomineeSecretKey(..)")
    }
}

/// Pre-signature `(d1, d2, d3) = (g1^r, g2^r, h_S^{a_S} F_S(M_S)^r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaMsg<B: Backend> {
    pub d1: B::G1,
    pub d2: B::G2,
    pub d3: B::G2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NomSignature<B: Backend> {
    pub s1: B::G1,
    pub s2: B::G1,
    pub s3: B::G2,
    pub s: Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerificationToken<B: Backend> {
    pub tk1: B::G1,
    pub tk2: B::G1,
}

/// Hashed quantities shared by every algorithm that touches a signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivedValues<B: Backend> {
    pub m_s: BitString,
    pub t: Scalar,
    pub m_n: B::G2,
    pub m_n_bits: BitString,
}

/// `M_S = H1(pk_N || m)`.
pub fn signer_message<B: Backend>(pk_n: &NomineePublicKey<B>, m: &[u8]) -> BitString {
    hash_h1(HashInput::new().field(pk_n.transcript_bytes()).field(m).as_bytes())
}

/// `t = H2(pk_S || sigma_1 || sigma_2 || m)`.
pub fn sigma_challenge<B: Backend>(pk_s: &SignerPublicKey<B>, s1: &B::G1, s2: &B::G1, m: &[u8]) -> Scalar {
    hash_h2(
        HashInput::new()
            .field(pk_s.transcript_bytes())
            .field(&s1.transcript_bytes())
            .field(&s2.transcript_bytes())
            .field(m)
            .as_bytes(),
    )
}

impl<B: Backend> DerivedValues<B> {
    pub fn compute(
        par: &PublicParams<B>,
        pk_s: &SignerPublicKey<B>,
        pk_n: &NomineePublicKey<B>,
        m: &[u8],
        s1: &B::G1,
        s2: &B::G1,
        s: &Scalar,
    ) -> Self {
        let m_s = signer_message(pk_n, m);
        let t = sigma_challenge(pk_s, s1, s2, m);
        let m_n = par.g2.pow(&t).mul(&pk_n.k.pow(s));
        let m_n_bits = hash_h1(&m_n.transcript_bytes());
        DerivedValues {
            m_s,
            t,
            m_n,
            m_n_bits,
        }
    }

    pub fn for_signature(
        par: &PublicParams<B>,
        pk_s: &SignerPublicKey<B>,
        pk_n: &NomineePublicKey<B>,
        m: &[u8],
        sigma: &NomSignature<B>,
    ) -> Self {
        Self::compute(par, pk_s, pk_n, m, &sigma.s1, &sigma.s2, &sigma.s)
    }
}

pub fn keygen_signer<B: Backend, R: RngCore + ?Sized>(
    par: &PublicParams<B>,
    rng: &mut R,
) -> (SignerPublicKey<B>, SignerSecretKey) {
    let alpha_s = random_scalar(rng);
    let h_s = par.g2.pow(&random_scalar(rng));
    // v_0 .. v_l are used once and dropped
    let u = (0..=par.ell).map(|_| par.g2.pow(&random_scalar(rng))).collect();
    let pk = SignerPublicKey::new(par.g1.pow(&alpha_s), h_s, u).expect("l + 1 bases");
    (pk, SignerSecretKey { alpha_s })
}

pub fn keygen_nominee<B: Backend, R: RngCore + ?Sized>(
    par: &PublicParams<B>,
    rng: &mut R,
) -> (NomineePublicKey<B>, NomineeSecretKey) {
    let alpha_n = random_scalar(rng);
    let y1 = random_nonzero_scalar(rng);
    let y2 = random_nonzero_scalar(rng);
    let v_prime: Vec<Scalar> = (0..=par.ell).map(|_| random_scalar(rng)).collect();
    let h_n = par.g2.pow(&random_scalar(rng));
    let k = par.g2.pow(&random_scalar(rng));
    let inv = |y: &Scalar| ark_ff::Field::inverse(y).expect("sampled nonzero");
    let pk = NomineePublicKey::new(
        par.g1.pow(&alpha_n),
        h_n,
        k,
        v_prime.iter().map(|v| par.g2.pow(v)).collect(),
        par.g2.pow(&inv(&y1)),
        par.g2.pow(&inv(&y2)),
    )
    .expect("l + 1 bases");
    let sk = NomineeSecretKey {
        alpha_n,
        v_prime,
        y1,
        y2,
    };
    (pk, sk)
}

/// Signer side: Waters signature on `M_S = H1(pk_N || m)`.
pub fn sign<B: Backend, R: RngCore + ?Sized>(
    par: &PublicParams<B>,
    pk_n: &NomineePublicKey<B>,
    m: &[u8],
    pk_s: &SignerPublicKey<B>,
    sk_s: &SignerSecretKey,
    rng: &mut R,
) -> DeltaMsg<B> {
    let r = random_scalar(rng);
    let m_s = signer_message(pk_n, m);
    let (f_s, _) = pk_s.waters(&m_s);
    DeltaMsg {
        d1: par.g1.pow(&r),
        d2: par.g2.pow(&r),
        d3: pk_s.h_s.pow(&sk_s.alpha_s).mul(&f_s.pow(&r)),
    }
}

/// Both checks the nominee runs on a pre-signature before using it.
pub fn check_delta<B: Backend>(
    par: &PublicParams<B>,
    pk_s: &SignerPublicKey<B>,
    f_s: &B::G2,
    delta: &DeltaMsg<B>,
) -> Result<(), SchemeError> {
    // e(g_S, h_S) e(d1, F_S(M_S)) = e(g1, d3)
    let waters = B::multi_pairing(&[
        (pk_s.g_s, pk_s.h_s),
        (delta.d1, *f_s),
        (par.g1.invert(), delta.d3),
    ]);
    if !waters.is_identity() {
        return Err(SchemeError::WatersEquation);
    }
    // e(d1, g2) = e(g1, d2)
    let same_r = B::multi_pairing(&[(delta.d1, par.g2), (par.g1.invert(), delta.d2)]);
    if !same_r.is_identity() {
        return Err(SchemeError::RandomnessMismatch);
    }
    Ok(())
}

/// Nominee side: turns a checked pre-signature into the nominative signature.
pub fn receive<B: Backend, R: RngCore + ?Sized>(
    par: &PublicParams<B>,
    pk_s: &SignerPublicKey<B>,
    pk_n: &NomineePublicKey<B>,
    m: &[u8],
    delta: &DeltaMsg<B>,
    sk_n: &NomineeSecretKey,
    rng: &mut R,
) -> Result<NomSignature<B>, SchemeError> {
    let m_s = signer_message(pk_n, m);
    let (f_s, _) = pk_s.waters(&m_s);
    check_delta(par, pk_s, &f_s, delta)?;

    let r = random_scalar(rng);
    let r_prime = random_scalar(rng);
    let s = random_scalar(rng);

    let d1 = delta.d1.mul(&par.g1.pow(&r_prime));
    let d2 = delta.d2.mul(&par.g2.pow(&r_prime));
    let d3 = delta.d3.mul(&f_s.pow(&r_prime));

    let g1_r = par.g1.pow(&r);
    let y1_inv = ark_ff::Field::inverse(&sk_n.y1).expect("y1 is nonzero");
    let y2_inv = ark_ff::Field::inverse(&sk_n.y2).expect("y2 is nonzero");
    let s1 = d1.div(&g1_r).pow(&y1_inv);
    let s2 = g1_r.pow(&y2_inv);

    let derived = DerivedValues::compute(par, pk_s, pk_n, m, &s1, &s2, &s);
    let s3 = d3
        .mul(&pk_n.h_n.pow(&sk_n.alpha_n))
        .mul(&d2.pow(&sk_n.waters_exponent(&derived.m_n_bits)));

    Ok(NomSignature { s1, s2, s3, s })
}

/// `e(g1, s3) = e(g_S, h_S) e(g_N, h_N) e(a, F_S(M_S) F_N(M_N))`, batched into one product.
fn main_equation_holds<B: Backend>(
    par: &PublicParams<B>,
    pk_s: &SignerPublicKey<B>,
    pk_n: &NomineePublicKey<B>,
    s3: &B::G2,
    a: &B::G1,
    f_sum: &B::G2,
) -> bool {
    B::multi_pairing(&[
        (par.g1.invert(), *s3),
        (pk_s.g_s, pk_s.h_s),
        (pk_n.g_n, pk_n.h_n),
        (*a, *f_sum),
    ])
    .is_identity()
}

/// Nominee side: publishes `(s1^{y1}, s2^{y2})` if `sigma` is valid.
pub fn convert<B: Backend>(
    par: &PublicParams<B>,
    pk_s: &SignerPublicKey<B>,
    pk_n: &NomineePublicKey<B>,
    m: &[u8],
    sigma: &NomSignature<B>,
    sk_n: &NomineeSecretKey,
) -> Result<VerificationToken<B>, SchemeError> {
    let derived = DerivedValues::for_signature(par, pk_s, pk_n, m, sigma);
    let (f_s, _) = pk_s.waters(&derived.m_s);
    let (f_n, _) = pk_n.waters(&derived.m_n_bits);
    let tk = VerificationToken::<B> {
        tk1: sigma.s1.pow(&sk_n.y1),
        tk2: sigma.s2.pow(&sk_n.y2),
    };
    if !main_equation_holds(par, pk_s, pk_n, &sigma.s3, &tk.tk1.mul(&tk.tk2), &f_s.mul(&f_n)) {
        return Err(SchemeError::ConversionEquation);
    }
    Ok(tk)
}

/// Result of a public token check, with the work a contract would pay for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TkVerifyOutcome {
    pub accepted: bool,
    pub counts: OpCounts,
}

/// Public verification of a converted signature. Uses no secret key.
///
/// The three pairing equations are evaluated as pairing products of two, two and
/// four pairs; all eight pairs are reported for pricing as one batched call.
pub fn tk_verify<B: Backend>(
    par: &PublicParams<B>,
    pk_s: &SignerPublicKey<B>,
    pk_n: &NomineePublicKey<B>,
    m: &[u8],
    sigma: &NomSignature<B>,
    tk: &VerificationToken<B>,
) -> TkVerifyOutcome {
    let derived = DerivedValues::for_signature(par, pk_s, pk_n, m, sigma);
    let (f_s, adds_s) = pk_s.waters(&derived.m_s);
    let (f_n, adds_n) = pk_n.waters(&derived.m_n_bits);
    let f_sum = f_s.mul(&f_n);
    let tk_sum = tk.tk1.mul(&tk.tk2);

    let eq1 = B::multi_pairing(&[(sigma.s1, par.g2), (tk.tk1.invert(), pk_n.x1)]).is_identity();
    let eq2 = B::multi_pairing(&[(sigma.s2, par.g2), (tk.tk2.invert(), pk_n.x2)]).is_identity();
    let eq3 = main_equation_holds(par, pk_s, pk_n, &sigma.s3, &tk_sum, &f_sum);

    TkVerifyOutcome {
        accepted: eq1 && eq2 && eq3,
        counts: OpCounts {
            pairing_pairs: 8,
            ec_additions: adds_s + adds_n + 2,
            // g2^t and k^s inside M_N
            unpriced_scalar_muls: 2,
        },
    }
}
