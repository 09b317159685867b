//! Interactive confirmation and disavowal of a nominative signature.
//!
//! Both protocols are sigma protocols wrapped in a committed challenge: the verifier
//! first commits to its challenge with a Pedersen commitment over `G2`, the prover
//! answers with its first message, the verifier opens the commitment, and the prover
//! sends the response only if the opening is valid. Because the challenge is fixed
//! before the prover speaks, transcripts can be simulated for any verifier, which is
//! what keeps the verification result non-transferable.
//!
//! Four passes:
//!
//! 1. V -> P: `com = g2^c h^rho`
//! 2. P -> V: first message
//! 3. V -> P: `(c, rho)`
//! 4. P -> V: response
//!
//! Confirm proves `x1^{y1} = g2`, `x2^{y2} = g2` and `e1 = e2 e3^{y1} e4^{y2}`.
//! Disavow proves the same key relations and `e1 != e2 e3^{y1} e4^{y2}`: the prover
//! publishes `C = (e2 e3^{y1} e4^{y2} / e1)^beta` for a random nonzero `beta` and
//! shows knowledge of `(beta, beta*y1, beta*y2)` consistent with `C`; the verifier
//! rejects `C = 1` outright.

use rand::RngCore;
use thiserror::Error;

use crate::algebra::{random_nonzero_scalar, random_scalar, Backend, GroupElement, Scalar};
use crate::nomsig::{DerivedValues, NomSignature, NomineePublicKey, NomineeSecretKey, PublicParams, SignerPublicKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    Confirm,
    Disavow,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Confirm => "confirm",
            ProtocolKind::Disavow => "disavow",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }

    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("verifier opened its challenge commitment incorrectly; prover aborts")]
    AbortBadOpening,
    #[error("message {0} arrived out of order")]
    OutOfOrder(&'static str),
    #[error("message shape does not match the {0} protocol")]
    WrongShape(&'static str),
}

/// Public statement both parties derive from `(par, pk_S, pk_N, m, sigma)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfirmStatement<B: Backend> {
    pub e1: B::Gt,
    pub e2: B::Gt,
    pub e3: B::Gt,
    pub e4: B::Gt,
    pub x1: B::G2,
    pub x2: B::G2,
    pub g2: B::G2,
}

impl<B: Backend> ConfirmStatement<B> {
    /// `e1 / e2`, the target of `e3^{y1} e4^{y2}`.
    fn target(&self) -> B::Gt {
        self.e1.div(&self.e2)
    }

    /// Whether `e1 = e2 e3^{y1} e4^{y2}` holds for the given witness.
    pub fn holds_for(&self, witness: &Witness) -> bool {
        self.e3.pow(&witness.y1).mul(&self.e4.pow(&witness.y2)) == self.target()
    }
}

pub fn derive_statement<B: Backend>(
    par: &PublicParams<B>,
    pk_s: &SignerPublicKey<B>,
    pk_n: &NomineePublicKey<B>,
    m: &[u8],
    sigma: &NomSignature<B>,
) -> ConfirmStatement<B> {
    let derived = DerivedValues::for_signature(par, pk_s, pk_n, m, sigma);
    let f = pk_s.waters(&derived.m_s).0.mul(&pk_n.waters(&derived.m_n_bits).0);
    ConfirmStatement {
        e1: B::pairing(&par.g1, &sigma.s3),
        e2: B::multi_pairing(&[(*pk_s.g_s(), *pk_s.h_s()), (*pk_n.g_n(), *pk_n.h_n())]),
        e3: B::pairing(&sigma.s1, &f),
        e4: B::pairing(&sigma.s2, &f),
        x1: *pk_n.x1(),
        x2: *pk_n.x2(),
        g2: par.g2,
    }
}

/// `(y1, y2)` from the nominee secret key.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    pub y1: Scalar,
    pub y2: Scalar,
}

impl Witness {
    pub fn from_key(sk: &NomineeSecretKey) -> Self {
        Witness { y1: sk.y1, y2: sk.y2 }
    }
}

impl std::fmt::Debug for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Witness(..)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChallengeCommitment<B: Backend> {
    pub com: B::G2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChallengeOpening {
    pub c: Scalar,
    pub rho: Scalar,
}

pub fn commit_challenge<B: Backend>(par: &PublicParams<B>, opening: &ChallengeOpening) -> ChallengeCommitment<B> {
    ChallengeCommitment {
        com: par.g2.pow(&opening.c).mul(&par.pedersen_h.pow(&opening.rho)),
    }
}

/// Prover's commitment message. `blinded` is the disavowal element `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FirstMessage<B: Backend> {
    pub t1: B::G2,
    pub t2: B::G2,
    pub t3: B::Gt,
    pub blinded: Option<B::Gt>,
}

/// Prover's response. `z3` answers for `beta` in disavowal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Response {
    pub z1: Scalar,
    pub z2: Scalar,
    pub z3: Option<Scalar>,
}

fn check_shape<B: Backend>(kind: ProtocolKind, first: &FirstMessage<B>, resp: Option<&Response>) -> bool {
    let disavow = kind == ProtocolKind::Disavow;
    first.blinded.is_some() == disavow && resp.is_none_or(|r| r.z3.is_some() == disavow)
}

/// `x1^{z1} = t1 g2^c`, `x2^{z2} = t2 g2^c`, `e3^{z1} e4^{z2} = t3 (e1/e2)^c`.
pub fn verify_confirm<B: Backend>(
    st: &ConfirmStatement<B>,
    first: &FirstMessage<B>,
    c: &Scalar,
    resp: &Response,
) -> bool {
    if !check_shape(ProtocolKind::Confirm, first, Some(resp)) {
        return false;
    }
    let g2c = st.g2.pow(c);
    st.x1.pow(&resp.z1) == first.t1.mul(&g2c)
        && st.x2.pow(&resp.z2) == first.t2.mul(&g2c)
        && st.e3.pow(&resp.z1).mul(&st.e4.pow(&resp.z2)) == first.t3.mul(&st.target().pow(c))
}

/// `C != 1`, `(e2/e1)^{z3} e3^{z1} e4^{z2} = t3 C^c`, `x1^{z1} = t1 g2^{z3}`, `x2^{z2} = t2 g2^{z3}`.
pub fn verify_disavow<B: Backend>(
    st: &ConfirmStatement<B>,
    first: &FirstMessage<B>,
    c: &Scalar,
    resp: &Response,
) -> bool {
    if !check_shape(ProtocolKind::Disavow, first, Some(resp)) {
        return false;
    }
    let (blinded, z3) = (first.blinded.unwrap(), resp.z3.unwrap());
    if blinded.is_identity() {
        return false;
    }
    let g2z = st.g2.pow(&z3);
    st.x1.pow(&resp.z1) == first.t1.mul(&g2z)
        && st.x2.pow(&resp.z2) == first.t2.mul(&g2z)
        && st
            .target()
            .invert()
            .pow(&z3)
            .mul(&st.e3.pow(&resp.z1))
            .mul(&st.e4.pow(&resp.z2))
            == first.t3.mul(&blinded.pow(c))
}

pub fn verify_response<B: Backend>(
    kind: ProtocolKind,
    st: &ConfirmStatement<B>,
    first: &FirstMessage<B>,
    c: &Scalar,
    resp: &Response,
) -> bool {
    match kind {
        ProtocolKind::Confirm => verify_confirm(st, first, c, resp),
        ProtocolKind::Disavow => verify_disavow(st, first, c, resp),
    }
}

#[derive(Clone, Copy)]
struct Nonces {
    a1: Scalar,
    a2: Scalar,
    // disavow only: beta and its nonce
    beta: Scalar,
    a_beta: Scalar,
}

/// Nominee side of either protocol.
#[derive(Clone)]
pub struct Prover<B: Backend> {
    par: PublicParams<B>,
    kind: ProtocolKind,
    statement: ConfirmStatement<B>,
    witness: Witness,
    commitment: Option<ChallengeCommitment<B>>,
    nonces: Option<Nonces>,
}

impl<B: Backend> Prover<B> {
    pub fn new(par: &PublicParams<B>, kind: ProtocolKind, statement: ConfirmStatement<B>, witness: Witness) -> Self {
        Prover {
            par: par.clone(),
            kind,
            statement,
            witness,
            commitment: None,
            nonces: None,
        }
    }

    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    /// Pass 2.
    pub fn on_commitment<R: RngCore + ?Sized>(
        &mut self,
        commitment: ChallengeCommitment<B>,
        rng: &mut R,
    ) -> Result<FirstMessage<B>, ProtocolError> {
        if self.commitment.is_some() {
            return Err(ProtocolError::OutOfOrder("commitment"));
        }
        let st = &self.statement;
        let a1 = random_scalar(rng);
        let a2 = random_scalar(rng);
        let first = match self.kind {
            ProtocolKind::Confirm => {
                self.nonces = Some(Nonces {
                    a1,
                    a2,
                    beta: Scalar::from(0u64),
                    a_beta: Scalar::from(0u64),
                });
                FirstMessage {
                    t1: st.x1.pow(&a1),
                    t2: st.x2.pow(&a2),
                    t3: st.e3.pow(&a1).mul(&st.e4.pow(&a2)),
                    blinded: None,
                }
            }
            ProtocolKind::Disavow => {
                let beta = random_nonzero_scalar(rng);
                let a_beta = random_scalar(rng);
                self.nonces = Some(Nonces { a1, a2, beta, a_beta });
                let w = &self.witness;
                let d = st.e3.pow(&w.y1).mul(&st.e4.pow(&w.y2)).div(&st.target());
                let g2_ab = st.g2.pow(&a_beta);
                FirstMessage {
                    t1: st.x1.pow(&a1).div(&g2_ab),
                    t2: st.x2.pow(&a2).div(&g2_ab),
                    t3: st.target().invert().pow(&a_beta).mul(&st.e3.pow(&a1)).mul(&st.e4.pow(&a2)),
                    blinded: Some(d.pow(&beta)),
                }
            }
        };
        self.commitment = Some(commitment);
        Ok(first)
    }

    /// Pass 4: answer only if `(c, rho)` opens the commitment received in pass 1.
    pub fn on_opening(&mut self, opening: &ChallengeOpening) -> Result<Response, ProtocolError> {
        let commitment = self.commitment.ok_or(ProtocolError::OutOfOrder("opening"))?;
        if self.nonces.is_none() {
            return Err(ProtocolError::OutOfOrder("opening"));
        }
        if commit_challenge(&self.par, opening) != commitment {
            return Err(ProtocolError::AbortBadOpening);
        }
        Ok(self.response_for_challenge(&opening.c))
    }

    /// Response to an arbitrary challenge with the current nonces. Only meaningful for
    /// rewinding in extraction tests; the real flow goes through [`Prover::on_opening`].
    #[doc(hidden)]
    pub fn response_for_challenge(&self, c: &Scalar) -> Response {
        let n = self.nonces.expect("first message sent");
        let w = &self.witness;
        match self.kind {
            ProtocolKind::Confirm => Response {
                z1: n.a1 + *c * w.y1,
                z2: n.a2 + *c * w.y2,
                z3: None,
            },
            ProtocolKind::Disavow => Response {
                z1: n.a1 + *c * n.beta * w.y1,
                z2: n.a2 + *c * n.beta * w.y2,
                z3: Some(n.a_beta + *c * n.beta),
            },
        }
    }
}

/// Verifier side of either protocol.
#[derive(Debug, Clone)]
pub struct Verifier<B: Backend> {
    kind: ProtocolKind,
    statement: ConfirmStatement<B>,
    opening: ChallengeOpening,
    first: Option<FirstMessage<B>>,
}

impl<B: Backend> Verifier<B> {
    /// Pass 1: picks the challenge and commits to it.
    pub fn new<R: RngCore + ?Sized>(
        par: &PublicParams<B>,
        kind: ProtocolKind,
        statement: ConfirmStatement<B>,
        rng: &mut R,
    ) -> (Self, ChallengeCommitment<B>) {
        let opening = ChallengeOpening {
            c: random_scalar(rng),
            rho: random_scalar(rng),
        };
        let commitment = commit_challenge(par, &opening);
        let v = Verifier {
            kind,
            statement,
            opening,
            first: None,
        };
        (v, commitment)
    }

    /// Pass 3. `None` means the verifier rejects at once (a disavowal with `C = 1`
    /// or a message of the wrong shape) and the opening is never revealed.
    pub fn on_first_message(&mut self, first: FirstMessage<B>) -> Result<Option<ChallengeOpening>, ProtocolError> {
        if self.first.is_some() {
            return Err(ProtocolError::OutOfOrder("first message"));
        }
        if !check_shape(self.kind, &first, None) {
            return Ok(None);
        }
        if first.blinded.is_some_and(|c| c.is_identity()) {
            return Ok(None);
        }
        self.first = Some(first);
        Ok(Some(self.opening))
    }

    /// Final check after pass 4.
    pub fn on_response(&self, resp: &Response) -> Result<Verdict, ProtocolError> {
        let first = self.first.as_ref().ok_or(ProtocolError::OutOfOrder("response"))?;
        Ok(Verdict::from_bool(verify_response(
            self.kind,
            &self.statement,
            first,
            &self.opening.c,
            resp,
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranscriptEntry<B: Backend> {
    Commitment(ChallengeCommitment<B>),
    First(FirstMessage<B>),
    Opening(ChallengeOpening),
    Response(Response),
    Verdict(Verdict),
}

impl<B: Backend> TranscriptEntry<B> {
    fn slot(&self) -> usize {
        match self {
            TranscriptEntry::Commitment(_) => 0,
            TranscriptEntry::First(_) => 1,
            TranscriptEntry::Opening(_) => 2,
            TranscriptEntry::Response(_) => 3,
            TranscriptEntry::Verdict(_) => 4,
        }
    }

    fn name(&self) -> &'static str {
        ["commitment", "first message", "opening", "response", "verdict"][self.slot()]
    }
}

/// Ordered message log. Messages must follow the four-pass order; a verdict may
/// close the log early.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript<B: Backend> {
    pub kind: ProtocolKind,
    entries: Vec<TranscriptEntry<B>>,
}

impl<B: Backend> Transcript<B> {
    pub fn new(kind: ProtocolKind) -> Self {
        Transcript {
            kind,
            entries: Vec::with_capacity(5),
        }
    }

    pub fn push(&mut self, entry: TranscriptEntry<B>) -> Result<(), ProtocolError> {
        if self.verdict().is_some() {
            return Err(ProtocolError::OutOfOrder(entry.name()));
        }
        let is_verdict = matches!(entry, TranscriptEntry::Verdict(_));
        if !is_verdict && entry.slot() != self.entries.len() {
            return Err(ProtocolError::OutOfOrder(entry.name()));
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn entries(&self) -> &[TranscriptEntry<B>] {
        &self.entries
    }

    pub fn verdict(&self) -> Option<Verdict> {
        match self.entries.last() {
            Some(TranscriptEntry::Verdict(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn commitment(&self) -> Option<&ChallengeCommitment<B>> {
        self.entries.iter().find_map(|e| match e {
            TranscriptEntry::Commitment(c) => Some(c),
            _ => None,
        })
    }

    pub fn first_message(&self) -> Option<&FirstMessage<B>> {
        self.entries.iter().find_map(|e| match e {
            TranscriptEntry::First(f) => Some(f),
            _ => None,
        })
    }

    pub fn opening(&self) -> Option<&ChallengeOpening> {
        self.entries.iter().find_map(|e| match e {
            TranscriptEntry::Opening(o) => Some(o),
            _ => None,
        })
    }

    pub fn response(&self) -> Option<&Response> {
        self.entries.iter().find_map(|e| match e {
            TranscriptEntry::Response(r) => Some(r),
            _ => None,
        })
    }
}

/// Re-runs the verifier's checks over a complete transcript, ignoring its recorded verdict.
pub fn check_transcript<B: Backend>(
    par: &PublicParams<B>,
    st: &ConfirmStatement<B>,
    transcript: &Transcript<B>,
) -> Verdict {
    let (Some(com), Some(first), Some(opening), Some(resp)) = (
        transcript.commitment(),
        transcript.first_message(),
        transcript.opening(),
        transcript.response(),
    ) else {
        return Verdict::Reject;
    };
    let ok = commit_challenge(par, opening) == *com
        && verify_response(transcript.kind, st, first, &opening.c, resp);
    Verdict::from_bool(ok)
}

/// Drives both parties over an in-memory channel.
pub fn run_protocol<B: Backend, R: RngCore + ?Sized>(
    par: &PublicParams<B>,
    mut prover: Prover<B>,
    verifier_statement: ConfirmStatement<B>,
    prover_rng: &mut R,
    verifier_rng: &mut R,
) -> Result<(Verdict, Transcript<B>), ProtocolError> {
    let kind = prover.kind();
    let mut transcript = Transcript::new(kind);
    let (mut verifier, com) = Verifier::new(par, kind, verifier_statement, verifier_rng);
    transcript.push(TranscriptEntry::Commitment(com))?;

    let first = prover.on_commitment(com, prover_rng)?;
    transcript.push(TranscriptEntry::First(first))?;

    let Some(opening) = verifier.on_first_message(first)? else {
        transcript.push(TranscriptEntry::Verdict(Verdict::Reject))?;
        return Ok((Verdict::Reject, transcript));
    };
    transcript.push(TranscriptEntry::Opening(opening))?;

    let resp = prover.on_opening(&opening)?;
    transcript.push(TranscriptEntry::Response(resp))?;

    let verdict = verifier.on_response(&resp)?;
    transcript.push(TranscriptEntry::Verdict(verdict))?;
    Ok((verdict, transcript))
}

/// Nominee proves `sigma` valid.
pub fn run_confirm<B: Backend, R: RngCore + ?Sized>(
    par: &PublicParams<B>,
    prover_statement: ConfirmStatement<B>,
    sk_n: &NomineeSecretKey,
    verifier_statement: ConfirmStatement<B>,
    prover_rng: &mut R,
    verifier_rng: &mut R,
) -> Result<(Verdict, Transcript<B>), ProtocolError> {
    let prover = Prover::new(par, ProtocolKind::Confirm, prover_statement, Witness::from_key(sk_n));
    run_protocol(par, prover, verifier_statement, prover_rng, verifier_rng)
}

/// Nominee proves `sigma` invalid.
pub fn run_disavow<B: Backend, R: RngCore + ?Sized>(
    par: &PublicParams<B>,
    prover_statement: ConfirmStatement<B>,
    sk_n: &NomineeSecretKey,
    verifier_statement: ConfirmStatement<B>,
    prover_rng: &mut R,
    verifier_rng: &mut R,
) -> Result<(Verdict, Transcript<B>), ProtocolError> {
    let prover = Prover::new(par, ProtocolKind::Disavow, prover_statement, Witness::from_key(sk_n));
    run_protocol(par, prover, verifier_statement, prover_rng, verifier_rng)
}

/// First message and response that pass the checks for challenge `c`, built without a witness.
pub fn simulate_with_challenge<B: Backend, R: RngCore + ?Sized>(
    kind: ProtocolKind,
    st: &ConfirmStatement<B>,
    c: &Scalar,
    rng: &mut R,
) -> (FirstMessage<B>, Response) {
    let z1 = random_scalar(rng);
    let z2 = random_scalar(rng);
    match kind {
        ProtocolKind::Confirm => {
            let g2c = st.g2.pow(c);
            let first = FirstMessage {
                t1: st.x1.pow(&z1).div(&g2c),
                t2: st.x2.pow(&z2).div(&g2c),
                t3: st.e3.pow(&z1).mul(&st.e4.pow(&z2)).div(&st.target().pow(c)),
                blinded: None,
            };
            (first, Response { z1, z2, z3: None })
        }
        ProtocolKind::Disavow => {
            let z3 = random_scalar(rng);
            let blinded = B::Gt::generator().pow(&random_nonzero_scalar(rng));
            let g2z = st.g2.pow(&z3);
            let first = FirstMessage {
                t1: st.x1.pow(&z1).div(&g2z),
                t2: st.x2.pow(&z2).div(&g2z),
                t3: st
                    .target()
                    .invert()
                    .pow(&z3)
                    .mul(&st.e3.pow(&z1))
                    .mul(&st.e4.pow(&z2))
                    .div(&blinded.pow(c)),
                blinded: Some(blinded),
            };
            (first, Response { z1, z2, z3: Some(z3) })
        }
    }
}

/// Witness-free transcript. The simulator picks the challenge itself, which the
/// commitment lets it do before producing the first message.
///
/// With `target = Reject` the response is replaced by random scalars.
pub fn simulate_transcript<B: Backend, R: RngCore + ?Sized>(
    par: &PublicParams<B>,
    kind: ProtocolKind,
    st: &ConfirmStatement<B>,
    target: Verdict,
    rng: &mut R,
) -> Transcript<B> {
    let opening = ChallengeOpening {
        c: random_scalar(rng),
        rho: random_scalar(rng),
    };
    let (first, mut resp) = simulate_with_challenge(kind, st, &opening.c, rng);
    if target == Verdict::Reject {
        resp.z1 = random_scalar(rng);
        resp.z2 = random_scalar(rng);
    }
    let mut t = Transcript::new(kind);
    let entries = [
        TranscriptEntry::Commitment(commit_challenge(par, &opening)),
        TranscriptEntry::First(first),
        TranscriptEntry::Opening(opening),
        TranscriptEntry::Response(resp),
    ];
    for e in entries {
        t.push(e).expect("entries in order");
    }
    let verdict = check_transcript(par, st, &t);
    t.push(TranscriptEntry::Verdict(verdict)).expect("verdict last");
    t
}

/// Special-soundness extractor: two accepting answers to distinct challenges on the
/// same first message yield `(y1, y2)`.
pub fn extract_witness(kind: ProtocolKind, c: &Scalar, resp: &Response, c2: &Scalar, resp2: &Response) -> Option<Witness> {
    use ark_ff::Field;
    let dc_inv = (*c - *c2).inverse()?;
    let y1 = (resp.z1 - resp2.z1) * dc_inv;
    let y2 = (resp.z2 - resp2.z2) * dc_inv;
    match kind {
        ProtocolKind::Confirm => Some(Witness { y1, y2 }),
        ProtocolKind::Disavow => {
            // the responses carry beta*y_i; divide out beta
            let beta = (resp.z3? - resp2.z3?) * dc_inv;
            let beta_inv = beta.inverse()?;
            Some(Witness {
                y1: y1 * beta_inv,
                y2: y2 * beta_inv,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Bn254, MockExp, MockG2};
    use crate::nomsig::{convert, keygen_nominee, keygen_signer, receive, setup, sign};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    struct World<B: Backend> {
        par: PublicParams<B>,
        sk_n: NomineeSecretKey,
        valid: ConfirmStatement<B>,
        invalid: ConfirmStatement<B>,
    }

    fn world<B: Backend>(seed: u64) -> World<B> {
        let par = setup::<B>(128).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (pk_s, sk_s) = keygen_signer(&par, &mut rng);
        let (pk_n, sk_n) = keygen_nominee(&par, &mut rng);
        let delta = sign(&par, &pk_n, b"m", &pk_s, &sk_s, &mut rng);
        let sigma = receive(&par, &pk_s, &pk_n, b"m", &delta, &sk_n, &mut rng).unwrap();
        assert!(convert(&par, &pk_s, &pk_n, b"m", &sigma, &sk_n).is_ok());
        let mut bad = sigma;
        bad.s3 = B::G2::random(&mut rng);
        World {
            valid: derive_statement(&par, &pk_s, &pk_n, b"m", &sigma),
            invalid: derive_statement(&par, &pk_s, &pk_n, b"m", &bad),
            par,
            sk_n,
        }
    }

    fn run<B: Backend>(w: &World<B>, kind: ProtocolKind, st: ConfirmStatement<B>, witness: Witness, seed: u64) -> Verdict {
        let mut p = ChaCha20Rng::seed_from_u64(seed);
        let mut v = ChaCha20Rng::seed_from_u64(seed ^ 0xfeed);
        let prover = Prover::new(&w.par, kind, st, witness);
        run_protocol(&w.par, prover, st, &mut p, &mut v).unwrap().0
    }

    #[test]
    fn statement_relation_matches_validity() {
        let w = world::<MockExp>(1);
        let wit = Witness::from_key(&w.sk_n);
        assert!(w.valid.holds_for(&wit));
        assert!(!w.invalid.holds_for(&wit));
        // exponent oracle: log e1 - log e2 - y1 log e3 - y2 log e4 is nonzero for random s3
        let gap = w.invalid.e1.exponent() - w.invalid.e2.exponent()
            - wit.y1 * w.invalid.e3.exponent()
            - wit.y2 * w.invalid.e4.exponent();
        assert_ne!(gap, Scalar::from(0u64));
    }

    #[test]
    fn confirm_and_disavow_completeness_real() {
        let w = world::<Bn254>(2);
        let wit = Witness::from_key(&w.sk_n);
        assert_eq!(run(&w, ProtocolKind::Confirm, w.valid, wit, 1), Verdict::Accept);
        assert_eq!(run(&w, ProtocolKind::Disavow, w.invalid, wit, 2), Verdict::Accept);
    }

    #[test]
    fn mutual_exclusion() {
        let w = world::<MockExp>(3);
        let wit = Witness::from_key(&w.sk_n);
        for seed in 0..20 {
            assert_eq!(run(&w, ProtocolKind::Confirm, w.valid, wit, seed), Verdict::Accept);
            assert_eq!(run(&w, ProtocolKind::Disavow, w.valid, wit, seed), Verdict::Reject);
            assert_eq!(run(&w, ProtocolKind::Confirm, w.invalid, wit, seed), Verdict::Reject);
            assert_eq!(run(&w, ProtocolKind::Disavow, w.invalid, wit, seed), Verdict::Accept);
        }
    }

    #[test]
    fn honest_disavow_of_valid_signature_stops_after_first_message() {
        let w = world::<MockExp>(4);
        let mut p = ChaCha20Rng::seed_from_u64(1);
        let mut v = ChaCha20Rng::seed_from_u64(2);
        let (verdict, t) = run_disavow(&w.par, w.valid, &w.sk_n, w.valid, &mut p, &mut v).unwrap();
        assert_eq!(verdict, Verdict::Reject);
        assert_eq!(t.entries().len(), 3);
        assert!(t.opening().is_none());
        assert!(t.first_message().unwrap().blinded.unwrap().is_identity());
    }

    #[test]
    fn wrong_witness_rejected() {
        let w = world::<MockExp>(5);
        let mut rng = ChaCha20Rng::seed_from_u64(50);
        for seed in 0..100 {
            let fake = Witness {
                y1: random_scalar(&mut rng),
                y2: random_scalar(&mut rng),
            };
            assert_eq!(run(&w, ProtocolKind::Confirm, w.valid, fake, seed), Verdict::Reject);
            assert_eq!(run(&w, ProtocolKind::Disavow, w.invalid, fake, seed), Verdict::Reject);
        }
    }

    #[test]
    fn prover_aborts_on_bad_opening() {
        let w = world::<MockExp>(6);
        let mut rng = ChaCha20Rng::seed_from_u64(60);
        let (verifier, com) = Verifier::new(&w.par, ProtocolKind::Confirm, w.valid, &mut rng);
        let mut prover = Prover::new(&w.par, ProtocolKind::Confirm, w.valid, Witness::from_key(&w.sk_n));
        prover.on_commitment(com, &mut rng).unwrap();
        let forged = ChallengeOpening {
            c: verifier.opening.c + Scalar::from(1u64),
            rho: verifier.opening.rho,
        };
        assert_eq!(prover.on_opening(&forged), Err(ProtocolError::AbortBadOpening));
        assert!(prover.on_opening(&verifier.opening).is_ok());
    }

    #[test]
    fn messages_out_of_order_rejected() {
        let w = world::<MockExp>(7);
        let mut rng = ChaCha20Rng::seed_from_u64(70);
        let mut prover = Prover::new(&w.par, ProtocolKind::Confirm, w.valid, Witness::from_key(&w.sk_n));
        let opening = ChallengeOpening {
            c: Scalar::from(1u64),
            rho: Scalar::from(2u64),
        };
        assert_eq!(prover.on_opening(&opening), Err(ProtocolError::OutOfOrder("opening")));
        let mut t = Transcript::<MockExp>::new(ProtocolKind::Confirm);
        assert!(t.push(TranscriptEntry::Opening(opening)).is_err());
        let (_, com) = Verifier::new(&w.par, ProtocolKind::Confirm, w.valid, &mut rng);
        t.push(TranscriptEntry::Commitment(com)).unwrap();
        t.push(TranscriptEntry::Verdict(Verdict::Reject)).unwrap();
        assert!(t.push(TranscriptEntry::Commitment(com)).is_err());
    }

    #[test]
    fn special_soundness_extracts_key() {
        let w = world::<Bn254>(8);
        let wit = Witness::from_key(&w.sk_n);
        let mut rng = ChaCha20Rng::seed_from_u64(80);
        for (kind, st) in [(ProtocolKind::Confirm, w.valid), (ProtocolKind::Disavow, w.invalid)] {
            let (_, com) = Verifier::new(&w.par, kind, st, &mut rng);
            let mut prover = Prover::new(&w.par, kind, st, wit);
            let first = prover.on_commitment(com, &mut rng).unwrap();
            let (c, c2) = (random_scalar(&mut rng), random_scalar(&mut rng));
            let (r, r2) = (prover.response_for_challenge(&c), prover.response_for_challenge(&c2));
            assert!(verify_response(kind, &st, &first, &c, &r));
            assert!(verify_response(kind, &st, &first, &c2, &r2));
            let got = extract_witness(kind, &c, &r, &c2, &r2).unwrap();
            assert_eq!(got, wit);
            assert_eq!(st.x1.pow(&got.y1), st.g2);
            assert_eq!(st.x2.pow(&got.y2), st.g2);
        }
    }

    #[test]
    fn simulated_transcripts_verify() {
        let w = world::<Bn254>(9);
        let mut rng = ChaCha20Rng::seed_from_u64(90);
        let t = simulate_transcript(&w.par, ProtocolKind::Confirm, &w.valid, Verdict::Accept, &mut rng);
        assert_eq!(t.verdict(), Some(Verdict::Accept));
        assert_eq!(check_transcript(&w.par, &w.valid, &t), Verdict::Accept);
        // the simulator works on invalid statements too: that is non-transferability
        let t = simulate_transcript(&w.par, ProtocolKind::Confirm, &w.invalid, Verdict::Accept, &mut rng);
        assert_eq!(check_transcript(&w.par, &w.invalid, &t), Verdict::Accept);
        let t = simulate_transcript(&w.par, ProtocolKind::Disavow, &w.valid, Verdict::Accept, &mut rng);
        assert_eq!(check_transcript(&w.par, &w.valid, &t), Verdict::Accept);
        let t = simulate_transcript(&w.par, ProtocolKind::Confirm, &w.valid, Verdict::Reject, &mut rng);
        assert_eq!(t.verdict(), Some(Verdict::Reject));
    }

    #[test]
    fn simulation_needs_the_challenge_in_advance() {
        let w = world::<MockExp>(10);
        let mut rng = ChaCha20Rng::seed_from_u64(100);
        for kind in [ProtocolKind::Confirm, ProtocolKind::Disavow] {
            let guess = random_scalar(&mut rng);
            let (first, resp) = simulate_with_challenge(kind, &w.valid, &guess, &mut rng);
            let actual = random_scalar(&mut rng);
            assert!(verify_response(kind, &w.valid, &first, &guess, &resp));
            assert!(!verify_response(kind, &w.valid, &first, &actual, &resp));
        }
    }

    #[test]
    fn commitment_opens_only_to_its_challenge() {
        let par = setup::<MockExp>(128).unwrap();
        let o = ChallengeOpening {
            c: Scalar::from(3u64),
            rho: Scalar::from(4u64),
        };
        let com = commit_challenge(&par, &o);
        let other = ChallengeOpening {
            c: Scalar::from(5u64),
            ..o
        };
        assert_ne!(commit_challenge(&par, &other), com);
        // exponent view: com = c + rho * log h
        assert_eq!(
            com.com,
            MockG2::from_exponent(o.c + o.rho * par.pedersen_h.exponent())
        );
    }

    #[test]
    fn commitments_to_fixed_challenges_look_alike() {
        // low byte of com for c = 0 and c = 1 over fresh rho: same histogram
        let par = setup::<Bn254>(128).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(110);
        let mut hist = [[0u32; 16]; 2];
        for (i, c) in [0u64, 1].into_iter().enumerate() {
            for _ in 0..800 {
                let o = ChallengeOpening {
                    c: Scalar::from(c),
                    rho: random_scalar(&mut rng),
                };
                let bytes = commit_challenge(&par, &o).com.to_bytes();
                hist[i][(bytes[0] & 0x0f) as usize] += 1;
            }
        }
        let chi2: f64 = (0..16)
            .map(|b| {
                let (a, c) = (hist[0][b] as f64, hist[1][b] as f64);
                if a + c == 0.0 {
                    0.0
                } else {
                    (a - c).powi(2) / (a + c)
                }
            })
            .sum();
        // 15 degrees of freedom; 30.58 is the 0.01 critical value
        assert!(chi2 < 30.58, "chi2 {chi2}");
    }
}
