//! Versioned JSON envelopes for every artifact that crosses a process boundary.
//!
//! ```json
//! { "schema_version": 1, "kind": "sigma", "role": "nominee",
//!   "fields": { "s1": "…", "s2": "…", "s3": "…", "s": "…" } }
//! ```
//!
//! Group elements and scalars are lowercase hex of their canonical encodings, field
//! order is fixed per type, and integers that may exceed 2^53 are decimal strings.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::algebra::{scalar_from_bytes, scalar_to_bytes, AlgebraError, Backend, GroupElement, Scalar};
use crate::contract::{ContractState, ExecutionReceipt, Phase, Transfer, WalletLedger};
use crate::gasmodel::{GasReport, OpCounts};
use crate::nomsig::{
    setup, DeltaMsg, NomSignature, NomineePublicKey, NomineeSecretKey, PublicParams, SignerPublicKey,
    SignerSecretKey, VerificationToken,
};
use crate::trigger::{Address, EcdsaKeyPair};
use crate::zkproto::{
    ChallengeCommitment, ChallengeOpening, FirstMessage, ProtocolKind, Response, TranscriptEntry, Verdict,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum EnvelopeError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0}")]
    UnsupportedVersion(u32),
    #[error("expected a {expected} envelope, found {actual}")]
    WrongKind { expected: String, actual: String },
    #[error("missing field {0}")]
    MissingField(String),
    #[error("field {0} is malformed")]
    BadField(String),
    #[error("field {field}: {source}")]
    Algebra { field: String, source: AlgebraError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    pub schema_version: u32,
    pub kind: String,
    pub role: String,
    pub fields: Map<String, Value>,
}

impl Envelope {
    pub fn new(kind: &str, role: &str, fields: Map<String, Value>) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            kind: kind.into(),
            role: role.into(),
            fields,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, EnvelopeError> {
        let env: Envelope = serde_json::from_str(s)?;
        if env.schema_version != SCHEMA_VERSION {
            return Err(EnvelopeError::UnsupportedVersion(env.schema_version));
        }
        Ok(env)
    }

    pub fn expect(&self, kind: &str, role: &str) -> Result<(), EnvelopeError> {
        if self.kind != kind || self.role != role {
            return Err(EnvelopeError::WrongKind {
                expected: format!("{kind}/{role}"),
                actual: format!("{}/{}", self.kind, self.role),
            });
        }
        Ok(())
    }
}

/// A value with a fixed envelope kind and role.
pub trait Artifact: Sized {
    const KIND: &'static str;
    const ROLE: &'static str;

    fn to_fields(&self) -> Map<String, Value>;
    fn from_fields(fields: &Map<String, Value>) -> Result<Self, EnvelopeError>;

    fn to_envelope(&self) -> Envelope {
        Envelope::new(Self::KIND, Self::ROLE, self.to_fields())
    }

    fn from_envelope(env: &Envelope) -> Result<Self, EnvelopeError> {
        env.expect(Self::KIND, Self::ROLE)?;
        Self::from_fields(&env.fields)
    }

    fn to_json(&self) -> String {
        self.to_envelope().to_json()
    }

    fn from_json(s: &str) -> Result<Self, EnvelopeError> {
        Self::from_envelope(&Envelope::from_json(s)?)
    }
}

/// Builder and reader for the `fields` map.
#[derive(Default)]
struct Fields(Map<String, Value>);

impl Fields {
    fn hex(mut self, name: &str, bytes: &[u8]) -> Self {
        self.0.insert(name.into(), Value::String(hex::encode(bytes)));
        self
    }

    fn elem<G: GroupElement>(self, name: &str, g: &G) -> Self {
        self.hex(name, &g.to_bytes())
    }

    fn elems<G: GroupElement>(mut self, name: &str, gs: &[G]) -> Self {
        let list = gs.iter().map(|g| Value::String(hex::encode(g.to_bytes()))).collect();
        self.0.insert(name.into(), Value::Array(list));
        self
    }

    fn scalar(self, name: &str, s: &Scalar) -> Self {
        self.hex(name, &scalar_to_bytes(s))
    }

    fn scalars(mut self, name: &str, ss: &[Scalar]) -> Self {
        let list = ss.iter().map(|s| Value::String(hex::encode(scalar_to_bytes(s)))).collect();
        self.0.insert(name.into(), Value::Array(list));
        self
    }

    fn text(mut self, name: &str, s: &str) -> Self {
        self.0.insert(name.into(), Value::String(s.into()));
        self
    }

    fn value(mut self, name: &str, v: Value) -> Self {
        self.0.insert(name.into(), v);
        self
    }

    fn done(self) -> Map<String, Value> {
        self.0
    }
}

fn get<'a>(f: &'a Map<String, Value>, name: &str) -> Result<&'a Value, EnvelopeError> {
    f.get(name).ok_or_else(|| EnvelopeError::MissingField(name.into()))
}

fn get_text<'a>(f: &'a Map<String, Value>, name: &str) -> Result<&'a str, EnvelopeError> {
    get(f, name)?
        .as_str()
        .ok_or_else(|| EnvelopeError::BadField(name.into()))
}

fn get_hex(f: &Map<String, Value>, name: &str) -> Result<Vec<u8>, EnvelopeError> {
    decode_hex(get_text(f, name)?, name)
}

fn decode_hex(s: &str, name: &str) -> Result<Vec<u8>, EnvelopeError> {
    hex::decode(s).map_err(|_| EnvelopeError::BadField(name.into()))
}

fn algebra(name: &str) -> impl Fn(AlgebraError) -> EnvelopeError + '_ {
    move |source| EnvelopeError::Algebra {
        field: name.into(),
        source,
    }
}

fn get_elem<G: GroupElement>(f: &Map<String, Value>, name: &str) -> Result<G, EnvelopeError> {
    G::from_bytes(&get_hex(f, name)?).map_err(algebra(name))
}

fn get_list<'a>(f: &'a Map<String, Value>, name: &str) -> Result<Vec<&'a str>, EnvelopeError> {
    get(f, name)?
        .as_array()
        .ok_or_else(|| EnvelopeError::BadField(name.into()))?
        .iter()
        .map(|v| v.as_str().ok_or_else(|| EnvelopeError::BadField(name.into())))
        .collect()
}

fn get_elems<G: GroupElement>(f: &Map<String, Value>, name: &str) -> Result<Vec<G>, EnvelopeError> {
    get_list(f, name)?
        .into_iter()
        .map(|s| G::from_bytes(&decode_hex(s, name)?).map_err(algebra(name)))
        .collect()
}

fn get_scalar(f: &Map<String, Value>, name: &str) -> Result<Scalar, EnvelopeError> {
    scalar_from_bytes(&get_hex(f, name)?).map_err(algebra(name))
}

fn get_scalars(f: &Map<String, Value>, name: &str) -> Result<Vec<Scalar>, EnvelopeError> {
    get_list(f, name)?
        .into_iter()
        .map(|s| scalar_from_bytes(&decode_hex(s, name)?).map_err(algebra(name)))
        .collect()
}

fn get_num<T: std::str::FromStr>(f: &Map<String, Value>, name: &str) -> Result<T, EnvelopeError> {
    get_text(f, name)?
        .parse()
        .map_err(|_| EnvelopeError::BadField(name.into()))
}

fn get_object<'a>(f: &'a Map<String, Value>, name: &str) -> Result<&'a Map<String, Value>, EnvelopeError> {
    get(f, name)?
        .as_object()
        .ok_or_else(|| EnvelopeError::BadField(name.into()))
}

fn get_address(f: &Map<String, Value>, name: &str) -> Result<Address, EnvelopeError> {
    Address::from_hex(get_text(f, name)?).map_err(|_| EnvelopeError::BadField(name.into()))
}

fn get_bool(f: &Map<String, Value>, name: &str) -> Result<bool, EnvelopeError> {
    get(f, name)?
        .as_bool()
        .ok_or_else(|| EnvelopeError::BadField(name.into()))
}

fn bad_key(name: &str) -> impl Fn(AlgebraError) -> EnvelopeError + '_ {
    move |_| EnvelopeError::BadField(name.into())
}

impl<B: Backend> Artifact for PublicParams<B> {
    const KIND: &'static str = "params";
    const ROLE: &'static str = "public";

    fn to_fields(&self) -> Map<String, Value> {
        Fields::default()
            .text("security", &self.security.to_string())
            .text("backend", B::KIND.name())
            .elem("g1", &self.g1)
            .elem("g2", &self.g2)
            .text("ell", &self.ell.to_string())
            .elem("pedersen_h", &self.pedersen_h)
            .done()
    }

    /// Parameters are fully determined by the security level, so a file is
    /// accepted only if it matches a fresh setup.
    fn from_fields(f: &Map<String, Value>) -> Result<Self, EnvelopeError> {
        if get_text(f, "backend")? != B::KIND.name() {
            return Err(EnvelopeError::BadField("backend".into()));
        }
        let security: u32 = get_num(f, "security")?;
        let par = setup::<B>(security).map_err(|_| EnvelopeError::BadField("security".into()))?;
        let read = PublicParams {
            security,
            g1: get_elem(f, "g1")?,
            g2: get_elem(f, "g2")?,
            ell: get_num(f, "ell")?,
            pedersen_h: get_elem(f, "pedersen_h")?,
        };
        if read != par {
            return Err(EnvelopeError::BadField("params".into()));
        }
        Ok(par)
    }
}

impl<B: Backend> Artifact for SignerPublicKey<B> {
    const KIND: &'static str = "key";
    const ROLE: &'static str = "signer-public";

    fn to_fields(&self) -> Map<String, Value> {
        Fields::default()
            .elem("g_s", self.g_s())
            .elem("h_s", self.h_s())
            .elems("u", self.u())
            .done()
    }

    fn from_fields(f: &Map<String, Value>) -> Result<Self, EnvelopeError> {
        SignerPublicKey::new(get_elem(f, "g_s")?, get_elem(f, "h_s")?, get_elems(f, "u")?).map_err(algebra("u"))
    }
}

impl Artifact for SignerSecretKey {
    const KIND: &'static str = "key";
    const ROLE: &'static str = "signer-secret";

    fn to_fields(&self) -> Map<String, Value> {
        Fields::default().scalar("alpha_s", &self.alpha_s).done()
    }

    fn from_fields(f: &Map<String, Value>) -> Result<Self, EnvelopeError> {
        Ok(SignerSecretKey {
            alpha_s: get_scalar(f, "alpha_s")?,
        })
    }
}

impl<B: Backend> Artifact for NomineePublicKey<B> {
    const KIND: &'static str = "key";
    const ROLE: &'static str = "nominee-public";

    fn to_fields(&self) -> Map<String, Value> {
        Fields::default()
            .elem("g_n", self.g_n())
            .elem("h_n", self.h_n())
            .elem("k", self.k())
            .elems("u_prime", self.u_prime())
            .elem("x1", self.x1())
            .elem("x2", self.x2())
            .done()
    }

    fn from_fields(f: &Map<String, Value>) -> Result<Self, EnvelopeError> {
        NomineePublicKey::new(
            get_elem(f, "g_n")?,
            get_elem(f, "h_n")?,
            get_elem(f, "k")?,
            get_elems(f, "u_prime")?,
            get_elem(f, "x1")?,
            get_elem(f, "x2")?,
        )
        .map_err(algebra("u_prime"))
    }
}

impl Artifact for NomineeSecretKey {
    const KIND: &'static str = "key";
    const ROLE: &'static str = "nominee-secret";

    fn to_fields(&self) -> Map<String, Value> {
        Fields::default()
            .scalar("alpha_n", &self.alpha_n)
            .scalars("v_prime", self.v_prime())
            .scalar("y1", &self.y1)
            .scalar("y2", &self.y2)
            .done()
    }

    fn from_fields(f: &Map<String, Value>) -> Result<Self, EnvelopeError> {
        NomineeSecretKey::new(
            get_scalar(f, "alpha_n")?,
            get_scalars(f, "v_prime")?,
            get_scalar(f, "y1")?,
            get_scalar(f, "y2")?,
        )
        .map_err(bad_key("nominee-secret"))
    }
}

impl Artifact for EcdsaKeyPair {
    const KIND: &'static str = "key";
    const ROLE: &'static str = "ecdsa-secret";

    fn to_fields(&self) -> Map<String, Value> {
        Fields::default()
            .hex("sk", &self.secret_bytes())
            .text("address", &self.address().to_hex())
            .done()
    }

    fn from_fields(f: &Map<String, Value>) -> Result<Self, EnvelopeError> {
        let key = EcdsaKeyPair::from_secret_bytes(&get_hex(f, "sk")?).map_err(|_| EnvelopeError::BadField("sk".into()))?;
        if key.address() != get_address(f, "address")? {
            return Err(EnvelopeError::BadField("address".into()));
        }
        Ok(key)
    }
}

impl<B: Backend> Artifact for DeltaMsg<B> {
    const KIND: &'static str = "delta";
    const ROLE: &'static str = "signer";

    fn to_fields(&self) -> Map<String, Value> {
        Fields::default()
            .elem("d1", &self.d1)
            .elem("d2", &self.d2)
            .elem("d3", &self.d3)
            .done()
    }

    fn from_fields(f: &Map<String, Value>) -> Result<Self, EnvelopeError> {
        Ok(DeltaMsg {
            d1: get_elem(f, "d1")?,
            d2: get_elem(f, "d2")?,
            d3: get_elem(f, "d3")?,
        })
    }
}

impl<B: Backend> Artifact for NomSignature<B> {
    const KIND: &'static str = "sigma";
    const ROLE: &'static str = "nominee";

    fn to_fields(&self) -> Map<String, Value> {
        Fields::default()
            .elem("s1", &self.s1)
            .elem("s2", &self.s2)
            .elem("s3", &self.s3)
            .scalar("s", &self.s)
            .done()
    }

    fn from_fields(f: &Map<String, Value>) -> Result<Self, EnvelopeError> {
        Ok(NomSignature {
            s1: get_elem(f, "s1")?,
            s2: get_elem(f, "s2")?,
            s3: get_elem(f, "s3")?,
            s: get_scalar(f, "s")?,
        })
    }
}

impl<B: Backend> Artifact for VerificationToken<B> {
    const KIND: &'static str = "token";
    const ROLE: &'static str = "nominee";

    fn to_fields(&self) -> Map<String, Value> {
        Fields::default().elem("tk1", &self.tk1).elem("tk2", &self.tk2).done()
    }

    fn from_fields(f: &Map<String, Value>) -> Result<Self, EnvelopeError> {
        Ok(VerificationToken {
            tk1: get_elem(f, "tk1")?,
            tk2: get_elem(f, "tk2")?,
        })
    }
}

/// One pass of an interactive protocol run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolMessage<B: Backend> {
    pub session: String,
    pub protocol: ProtocolKind,
    pub entry: TranscriptEntry<B>,
}

impl<B: Backend> ProtocolMessage<B> {
    /// `1..=4` for the four passes, `5` for a verdict notice.
    pub fn pass_index(&self) -> u8 {
        match self.entry {
            TranscriptEntry::Commitment(_) => 1,
            TranscriptEntry::First(_) => 2,
            TranscriptEntry::Opening(_) => 3,
            TranscriptEntry::Response(_) => 4,
            TranscriptEntry::Verdict(_) => 5,
        }
    }

    pub fn sender(&self) -> &'static str {
        match self.pass_index() {
            2 | 4 => "prover",
            _ => "verifier",
        }
    }

    pub fn to_envelope(&self) -> Envelope {
        let mut f = Fields::default()
            .text("session", &self.session)
            .text("protocol", self.protocol.name())
            .text("pass", &self.pass_index().to_string());
        f = match &self.entry {
            TranscriptEntry::Commitment(c) => f.elem("com", &c.com),
            TranscriptEntry::First(m) => {
                let f = f.elem("t1", &m.t1).elem("t2", &m.t2).elem("t3", &m.t3);
                match &m.blinded {
                    Some(c) => f.elem("blinded", c),
                    None => f,
                }
            }
            TranscriptEntry::Opening(o) => f.scalar("c", &o.c).scalar("rho", &o.rho),
            TranscriptEntry::Response(r) => {
                let f = f.scalar("z1", &r.z1).scalar("z2", &r.z2);
                match &r.z3 {
                    Some(z3) => f.scalar("z3", z3),
                    None => f,
                }
            }
            TranscriptEntry::Verdict(v) => f.text("verdict", &v.to_string()),
        };
        Envelope::new("transcript-msg", self.sender(), f.done())
    }

    pub fn from_envelope(env: &Envelope) -> Result<Self, EnvelopeError> {
        if env.kind != "transcript-msg" {
            return Err(EnvelopeError::WrongKind {
                expected: "transcript-msg".into(),
                actual: env.kind.clone(),
            });
        }
        let f = &env.fields;
        let protocol = match get_text(f, "protocol")? {
            "confirm" => ProtocolKind::Confirm,
            "disavow" => ProtocolKind::Disavow,
            _ => return Err(EnvelopeError::BadField("protocol".into())),
        };
        let opt_elem = |name: &str| -> Result<Option<B::Gt>, EnvelopeError> {
            f.contains_key(name).then(|| get_elem(f, name)).transpose()
        };
        let entry = match get_num::<u8>(f, "pass")? {
            1 => TranscriptEntry::Commitment(ChallengeCommitment { com: get_elem(f, "com")? }),
            2 => TranscriptEntry::First(FirstMessage {
                t1: get_elem(f, "t1")?,
                t2: get_elem(f, "t2")?,
                t3: get_elem(f, "t3")?,
                blinded: opt_elem("blinded")?,
            }),
            3 => TranscriptEntry::Opening(ChallengeOpening {
                c: get_scalar(f, "c")?,
                rho: get_scalar(f, "rho")?,
            }),
            4 => TranscriptEntry::Response(Response {
                z1: get_scalar(f, "z1")?,
                z2: get_scalar(f, "z2")?,
                z3: f.contains_key("z3").then(|| get_scalar(f, "z3")).transpose()?,
            }),
            5 => TranscriptEntry::Verdict(match get_text(f, "verdict")? {
                "accept" => Verdict::Accept,
                "reject" => Verdict::Reject,
                _ => return Err(EnvelopeError::BadField("verdict".into())),
            }),
            _ => return Err(EnvelopeError::BadField("pass".into())),
        };
        let msg = ProtocolMessage {
            session: get_text(f, "session")?.into(),
            protocol,
            entry,
        };
        if env.role != msg.sender() {
            return Err(EnvelopeError::BadField("role".into()));
        }
        Ok(msg)
    }
}

/// Contract state together with the ledger it governs; one file holds both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractFile<B: Backend> {
    pub state: ContractState<B>,
    pub ledger: WalletLedger,
}

impl<B: Backend> Artifact for ContractFile<B> {
    const KIND: &'static str = "contract-state";
    const ROLE: &'static str = "contract";

    fn to_fields(&self) -> Map<String, Value> {
        let s = &self.state;
        let ledger: Map<String, Value> = self
            .ledger
            .accounts()
            .map(|(a, b)| (a.to_hex(), Value::String(b.to_string())))
            .collect();
        let nonces = s.used_nonces.iter().map(|n| Value::String(n.to_string())).collect();
        Fields::default()
            .text("phase", s.phase.name())
            .hex("program", &s.program)
            .text("operator", &s.operator.to_hex())
            .text("investor", &s.investor.to_hex())
            .text("advance_required", &s.advance_required.to_string())
            .text("investment_amount", &s.investment_amount.to_string())
            .value(
                "stored_sigma",
                s.stored_sigma.map_or(Value::Null, |sig| Value::Object(sig.to_fields())),
            )
            .value("used_nonces", Value::Array(nonces))
            .value("params", Value::Object(s.par.to_fields()))
            .value("signer_public", Value::Object(s.pk_s.to_fields()))
            .value("nominee_public", Value::Object(s.pk_n.to_fields()))
            .value("ledger", Value::Object(ledger))
            .done()
    }

    fn from_fields(f: &Map<String, Value>) -> Result<Self, EnvelopeError> {
        let phase = Phase::from_name(get_text(f, "phase")?).ok_or_else(|| EnvelopeError::BadField("phase".into()))?;
        let stored_sigma = match get(f, "stored_sigma")? {
            Value::Null => None,
            Value::Object(m) => Some(NomSignature::from_fields(m)?),
            _ => return Err(EnvelopeError::BadField("stored_sigma".into())),
        };
        if stored_sigma.is_some() != (phase >= Phase::SignatureStored) {
            return Err(EnvelopeError::BadField("stored_sigma".into()));
        }
        let used_nonces = get_list(f, "used_nonces")?
            .into_iter()
            .map(|n| n.parse().map_err(|_| EnvelopeError::BadField("used_nonces".into())))
            .collect::<Result<_, _>>()?;
        let mut accounts = Vec::new();
        for (addr, bal) in get_object(f, "ledger")? {
            let addr = Address::from_hex(addr).map_err(|_| EnvelopeError::BadField("ledger".into()))?;
            let bal = bal
                .as_str()
                .and_then(|b| b.parse::<u128>().ok())
                .ok_or_else(|| EnvelopeError::BadField("ledger".into()))?;
            accounts.push((addr, bal));
        }
        let state = ContractState {
            phase,
            program: get_hex(f, "program")?,
            operator: get_address(f, "operator")?,
            investor: get_address(f, "investor")?,
            advance_required: get_num(f, "advance_required")?,
            investment_amount: get_num(f, "investment_amount")?,
            stored_sigma,
            pk_s: SignerPublicKey::from_fields(get_object(f, "signer_public")?)?,
            pk_n: NomineePublicKey::from_fields(get_object(f, "nominee_public")?)?,
            par: PublicParams::from_fields(get_object(f, "params")?)?,
            used_nonces,
        };
        Ok(ContractFile {
            state,
            ledger: WalletLedger::new(accounts),
        })
    }
}

fn counts_fields(c: &OpCounts) -> Value {
    Value::Object(
        Fields::default()
            .text("pairing_pairs", &c.pairing_pairs.to_string())
            .text("ec_additions", &c.ec_additions.to_string())
            .text("unpriced_scalar_muls", &c.unpriced_scalar_muls.to_string())
            .done(),
    )
}

impl Artifact for ExecutionReceipt {
    const KIND: &'static str = "receipt";
    const ROLE: &'static str = "contract";

    fn to_fields(&self) -> Map<String, Value> {
        let g = &self.gas;
        let mut gas = Fields::default()
            .value("counts", counts_fields(&g.counts))
            .text("tkverify_gas", &g.tkverify_gas.to_string())
            .text("ecrecover_gas", &g.ecrecover_gas.to_string())
            .text("total_gas", &g.total_gas.to_string());
        if let Some(p) = g.gas_price_wei {
            gas = gas.text("gas_price_wei", &p.to_string());
        }
        let transfer = self.transfer.map_or(Value::Null, |t| {
            Value::Object(
                Fields::default()
                    .text("from", &t.from.to_hex())
                    .text("to", &t.to.to_hex())
                    .text("amount", &t.amount.to_string())
                    .done(),
            )
        });
        Fields::default()
            .text("verdict", &self.verdict.to_string())
            .value("tk_valid", Value::Bool(self.tk_valid))
            .value("ecdsa_valid", Value::Bool(self.ecdsa_valid))
            .value("gas", Value::Object(gas.done()))
            .value("transfer", transfer)
            .done()
    }

    fn from_fields(f: &Map<String, Value>) -> Result<Self, EnvelopeError> {
        let verdict = match get_text(f, "verdict")? {
            "accept" => Verdict::Accept,
            "reject" => Verdict::Reject,
            _ => return Err(EnvelopeError::BadField("verdict".into())),
        };
        let g = get_object(f, "gas")?;
        let c = get_object(g, "counts")?;
        let gas = GasReport {
            counts: OpCounts {
                pairing_pairs: get_num(c, "pairing_pairs")?,
                ec_additions: get_num(c, "ec_additions")?,
                unpriced_scalar_muls: get_num(c, "unpriced_scalar_muls")?,
            },
            tkverify_gas: get_num(g, "tkverify_gas")?,
            ecrecover_gas: get_num(g, "ecrecover_gas")?,
            total_gas: get_num(g, "total_gas")?,
            gas_price_wei: g.contains_key("gas_price_wei").then(|| get_num(g, "gas_price_wei")).transpose()?,
        };
        let transfer = match get(f, "transfer")? {
            Value::Null => None,
            Value::Object(t) => Some(Transfer {
                from: get_address(t, "from")?,
                to: get_address(t, "to")?,
                amount: get_num(t, "amount")?,
            }),
            _ => return Err(EnvelopeError::BadField("transfer".into())),
        };
        if transfer.is_some() != verdict.is_accept() {
            return Err(EnvelopeError::BadField("transfer".into()));
        }
        Ok(ExecutionReceipt {
            verdict,
            tk_valid: get_bool(f, "tk_valid")?,
            ecdsa_valid: get_bool(f, "ecdsa_valid")?,
            gas,
            transfer,
        })
    }
}
