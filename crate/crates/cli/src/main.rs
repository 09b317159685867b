//! `nomsig`: nominative-signature escrow pipeline on the command line.
//!
//! Exit codes: 0 accept/success, 1 reject, 2 malformed input or usage error.

mod transport;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use nomsig_core::algebra::Bn254;
use nomsig_core::contract::{deploy, ContractError, TriggerSubmission, TxRecord, WalletLedger};
use nomsig_core::envelope::{Artifact, ContractFile};
use nomsig_core::gasmodel::{CostTable, GasReport, DEFAULT_GAS_PRICE_WEI};
use nomsig_core::nomsig::{
    self, convert, keygen_nominee, keygen_signer, receive, sign, tk_verify, DeltaMsg, NomSignature,
    NomineePublicKey, NomineeSecretKey, PublicParams, SignerPublicKey, SignerSecretKey, VerificationToken,
};
use nomsig_core::trigger::{ecdsa_keygen, ecdsa_sign, Address, EcdsaKeyPair};
use nomsig_core::zkproto::{derive_statement, ProtocolKind, Prover, TranscriptEntry, Verdict, Verifier, Witness};

use transport::{FileChannel, Incoming};

type B = Bn254;

#[derive(Debug)]
pub enum Failure {
    Reject(String),
    Malformed(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Reject(_) => 1,
            Failure::Malformed(_) => 2,
        }
    }
}

fn malformed(ctx: impl std::fmt::Display) -> impl FnOnce(&dyn std::fmt::Display) -> Failure {
    move |e| Failure::Malformed(format!("{ctx}: {e}"))
}

#[derive(Parser)]
#[command(name = "nomsig", version, about = "Nominative signatures gating a simulated escrow contract")]
struct Cli {
    /// Seed for every random draw of the command.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// TOML file overriding precompile gas prices.
    #[arg(long, global = true)]
    cost_table: Option<PathBuf>,
    /// Gas price in wei used for ETH figures.
    #[arg(long, global = true, default_value_t = DEFAULT_GAS_PRICE_WEI)]
    gas_price: u128,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MessageArg {
    /// Program source `m`, inline.
    #[arg(long, conflicts_with = "message_file")]
    message: Option<String>,
    /// Program source `m`, read from a file.
    #[arg(long)]
    message_file: Option<PathBuf>,
}

impl MessageArg {
    fn bytes(&self) -> Result<Vec<u8>, Failure> {
        match (&self.message, &self.message_file) {
            (Some(m), _) => Ok(m.as_bytes().to_vec()),
            (None, Some(p)) => fs::read(p).map_err(|e| malformed(p.display())(&e)),
            (None, None) => Err(Failure::Malformed("one of --message or --message-file is required".into())),
        }
    }
}

/// Public inputs shared by every algorithm that touches a signature.
#[derive(Args)]
struct Public {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    signer_public: PathBuf,
    #[arg(long)]
    nominee_public: PathBuf,
    #[command(flatten)]
    message: MessageArg,
}

struct PublicCtx {
    par: PublicParams<B>,
    pk_s: SignerPublicKey<B>,
    pk_n: NomineePublicKey<B>,
    m: Vec<u8>,
}

impl Public {
    fn load(&self) -> Result<PublicCtx, Failure> {
        Ok(PublicCtx {
            par: read(&self.params)?,
            pk_s: read(&self.signer_public)?,
            pk_n: read(&self.nominee_public)?,
            m: self.message.bytes()?,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Role {
    Prover,
    Verifier,
}

#[derive(Args)]
struct ProtocolArgs {
    #[arg(long, value_enum)]
    role: Role,
    /// Directory both parties read and write numbered message files in.
    #[arg(long)]
    transport_dir: PathBuf,
    #[command(flatten)]
    public: Public,
    #[arg(long)]
    sigma: PathBuf,
    /// Prover only.
    #[arg(long)]
    nominee_secret: Option<PathBuf>,
    #[arg(long, default_value = "nomsig")]
    session: String,
    /// Seconds to wait for the other party.
    #[arg(long, default_value_t = 120)]
    timeout: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Public parameters.
    Setup {
        #[arg(long, default_value_t = nomsig::SECURITY_LEVEL)]
        security: u32,
        #[arg(long)]
        out: PathBuf,
    },
    KeygenSigner {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out_public: PathBuf,
        #[arg(long)]
        out_secret: PathBuf,
    },
    KeygenNominee {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out_public: PathBuf,
        #[arg(long)]
        out_secret: PathBuf,
    },
    /// secp256k1 wallet key; prints the address.
    KeygenEcdsa {
        #[arg(long)]
        out: PathBuf,
    },
    /// Signer's half: pre-signature delta for the nominee.
    Sign {
        #[command(flatten)]
        public: Public,
        #[arg(long)]
        signer_secret: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Nominee checks delta and completes the nominative signature.
    Receive {
        #[command(flatten)]
        public: Public,
        #[arg(long)]
        nominee_secret: PathBuf,
        #[arg(long)]
        delta: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Interactive proof that sigma is valid.
    Confirm(ProtocolArgs),
    /// Interactive proof that sigma is invalid.
    Disavow(ProtocolArgs),
    /// Nominee turns sigma into a publicly verifiable token.
    Convert {
        #[command(flatten)]
        public: Public,
        #[arg(long)]
        nominee_secret: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// New contract plus a ledger funding the two parties.
    Deploy {
        #[command(flatten)]
        public: Public,
        #[arg(long)]
        operator: String,
        #[arg(long)]
        investor: String,
        #[arg(long)]
        advance: u128,
        #[arg(long)]
        investment: u128,
        #[arg(long)]
        investor_balance: u128,
        #[arg(long, default_value_t = 0)]
        operator_balance: u128,
        #[arg(long)]
        out: PathBuf,
    },
    PayAdvance {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        amount: u128,
    },
    StoreSig {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
    },
    /// Investor signs the transfer and submits it with the token.
    Trigger {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        token: PathBuf,
        #[arg(long)]
        investor_key: PathBuf,
        #[arg(long, default_value_t = 0)]
        nonce: u64,
        #[arg(long)]
        receipt: Option<PathBuf>,
    },
    /// Meter TkVerify for a token without touching a contract.
    ReportGas {
        #[command(flatten)]
        public: Public,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        token: PathBuf,
    },
    /// Whole honest pipeline in memory.
    Demo,
}

fn read<T: Artifact>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| malformed(path.display())(&e))?;
    T::from_json(&text).map_err(|e| malformed(path.display())(&e))
}

fn write<T: Artifact>(path: &Path, value: &T) -> Result<(), Failure> {
    fs::write(path, value.to_json()).map_err(|e| malformed(path.display())(&e))
}

fn address(s: &str) -> Result<Address, Failure> {
    Address::from_hex(s).map_err(|e| malformed(s)(&e))
}

fn contract_error(e: ContractError) -> Failure {
    match e {
        ContractError::WrongPhase(_) | ContractError::NonceReplayed(_) | ContractError::InsufficientAdvance { .. } => {
            Failure::Reject(e.to_string())
        }
        _ => Failure::Malformed(e.to_string()),
    }
}

struct Pricing {
    table: CostTable,
    gas_price: u128,
}

fn pricing(cli: &Cli) -> Result<Pricing, Failure> {
    let table = match &cli.cost_table {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| malformed(p.display())(&e))?;
            toml::from_str(&text).map_err(|e| malformed(p.display())(&e))?
        }
        None => CostTable::default(),
    };
    Ok(Pricing {
        table,
        gas_price: cli.gas_price,
    })
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut rng = ChaCha20Rng::seed_from_u64(cli.seed);
    match &cli.command {
        Command::Setup { security, out } => {
            let par = nomsig::setup::<B>(*security).map_err(|e| Failure::Malformed(e.to_string()))?;
            write(out, &par)?;
        }
        Command::KeygenSigner {
            params,
            out_public,
            out_secret,
        } => {
            let par: PublicParams<B> = read(params)?;
            let (pk, sk) = keygen_signer(&par, &mut rng);
            write(out_public, &pk)?;
            write(out_secret, &sk)?;
        }
        Command::KeygenNominee {
            params,
            out_public,
            out_secret,
        } => {
            let par: PublicParams<B> = read(params)?;
            let (pk, sk) = keygen_nominee(&par, &mut rng);
            write(out_public, &pk)?;
            write(out_secret, &sk)?;
        }
        Command::KeygenEcdsa { out } => {
            let key = ecdsa_keygen(cli.seed);
            write(out, &key)?;
            println!("{}", key.address());
        }
        Command::Sign {
            public,
            signer_secret,
            out,
        } => {
            let ctx = public.load()?;
            let sk: SignerSecretKey = read(signer_secret)?;
            let delta = sign(&ctx.par, &ctx.pk_n, &ctx.m, &ctx.pk_s, &sk, &mut rng);
            write(out, &delta)?;
        }
        Command::Receive {
            public,
            nominee_secret,
            delta,
            out,
        } => {
            let ctx = public.load()?;
            let sk: NomineeSecretKey = read(nominee_secret)?;
            let delta: DeltaMsg<B> = read(delta)?;
            match receive(&ctx.par, &ctx.pk_s, &ctx.pk_n, &ctx.m, &delta, &sk, &mut rng) {
                Ok(sigma) => {
                    write(out, &sigma)?;
                    println!("accept");
                }
                Err(e) if e.is_rejection() => return Err(Failure::Reject(e.to_string())),
                Err(e) => return Err(Failure::Malformed(e.to_string())),
            }
        }
        Command::Convert {
            public,
            nominee_secret,
            sigma,
            out,
        } => {
            let ctx = public.load()?;
            let sk: NomineeSecretKey = read(nominee_secret)?;
            let sigma: NomSignature<B> = read(sigma)?;
            match convert(&ctx.par, &ctx.pk_s, &ctx.pk_n, &ctx.m, &sigma, &sk) {
                Ok(tk) => {
                    write(out, &tk)?;
                    println!("accept");
                }
                Err(e) if e.is_rejection() => return Err(Failure::Reject(e.to_string())),
                Err(e) => return Err(Failure::Malformed(e.to_string())),
            }
        }
        Command::Confirm(args) => protocol(ProtocolKind::Confirm, args, cli.seed)?,
        Command::Disavow(args) => protocol(ProtocolKind::Disavow, args, cli.seed)?,
        Command::Deploy {
            public,
            operator,
            investor,
            advance,
            investment,
            investor_balance,
            operator_balance,
            out,
        } => {
            let ctx = public.load()?;
            let (operator, investor) = (address(operator)?, address(investor)?);
            if operator == investor {
                return Err(Failure::Malformed("operator and investor must differ".into()));
            }
            let state = deploy(&ctx.m, operator, investor, ctx.pk_s, ctx.pk_n, ctx.par, *advance, *investment)
                .map_err(contract_error)?;
            let ledger = WalletLedger::new([(investor, *investor_balance), (operator, *operator_balance)]);
            write(out, &ContractFile { state, ledger })?;
            println!("deployed phase=deployed");
        }
        Command::PayAdvance { state, amount } => {
            let mut file: ContractFile<B> = read(state)?;
            file.state
                .pay_advance(&mut file.ledger, *amount)
                .map_err(contract_error)?;
            write(state, &file)?;
            println!("phase={}", file.state.phase().name());
        }
        Command::StoreSig { state, sigma } => {
            let mut file: ContractFile<B> = read(state)?;
            file.state.store_signature(read(sigma)?).map_err(contract_error)?;
            write(state, &file)?;
            println!("phase={}", file.state.phase().name());
        }
        Command::Trigger {
            state,
            token,
            investor_key,
            nonce,
            receipt,
        } => {
            let p = pricing(cli)?;
            let mut file: ContractFile<B> = read(state)?;
            let tk: VerificationToken<B> = read(token)?;
            let key: EcdsaKeyPair = read(investor_key)?;
            let tx = TxRecord {
                from: key.address(),
                to: file.state.operator(),
                amount: file.state.investment_amount(),
                nonce: *nonce,
            };
            let sub = TriggerSubmission {
                tk,
                tx,
                sig_e: ecdsa_sign(&key, &tx.to_bytes()),
            };
            let rec = file
                .state
                .submit_trigger(&mut file.ledger, &sub, &p.table, Some(p.gas_price))
                .map_err(contract_error)?;
            println!("{rec}");
            if let Some(path) = receipt {
                write(path, &rec)?;
            }
            if !rec.verdict.is_accept() {
                // state file left byte-for-byte as it was
                return Err(Failure::Reject("trigger rejected; no funds moved".into()));
            }
            write(state, &file)?;
        }
        Command::ReportGas { public, sigma, token } => {
            let p = pricing(cli)?;
            let ctx = public.load()?;
            let sigma: NomSignature<B> = read(sigma)?;
            let tk: VerificationToken<B> = read(token)?;
            let out = tk_verify(&ctx.par, &ctx.pk_s, &ctx.pk_n, &ctx.m, &sigma, &tk);
            println!("{}", Verdict::from_bool(out.accepted));
            println!("{}", GasReport::new(out.counts, &p.table, Some(p.gas_price)));
            if !out.accepted {
                return Err(Failure::Reject("token does not verify".into()));
            }
        }
        Command::Demo => demo(cli, &mut rng)?,
    }
    Ok(())
}

fn protocol(kind: ProtocolKind, args: &ProtocolArgs, seed: u64) -> Result<(), Failure> {
    let ctx = args.public.load()?;
    let sigma: NomSignature<B> = read(&args.sigma)?;
    let st = derive_statement(&ctx.par, &ctx.pk_s, &ctx.pk_n, &ctx.m, &sigma);
    let chan = FileChannel::open(&args.transport_dir, &args.session, kind, Duration::from_secs(args.timeout))?;
    let unexpected = |what: &str| Failure::Malformed(format!("unexpected message while waiting for {what}"));
    let verdict = match args.role {
        Role::Prover => {
            let path = args
                .nominee_secret
                .as_ref()
                .ok_or_else(|| Failure::Malformed("--nominee-secret is required for the prover".into()))?;
            let sk: NomineeSecretKey = read(path)?;
            // distinct stream from a verifier run with the same seed
            let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x5052_4f56);
            let mut prover = Prover::new(&ctx.par, kind, st, Witness::from_key(&sk));
            let com = match chan.recv(1, false)? {
                Incoming::Message(TranscriptEntry::Commitment(c)) => c,
                Incoming::Aborted(r) => return Err(Failure::Reject(format!("verifier aborted: {r}"))),
                _ => return Err(unexpected("commitment")),
            };
            let first = prover
                .on_commitment(com, &mut rng)
                .map_err(|e| Failure::Malformed(e.to_string()))?;
            chan.send(TranscriptEntry::First(first))?;
            let opening = match chan.recv(3, true)? {
                Incoming::Message(TranscriptEntry::Opening(o)) => o,
                Incoming::Message(TranscriptEntry::Verdict(v)) => {
                    println!("{kind} {v}", kind = kind.name());
                    return finish(v);
                }
                Incoming::Aborted(r) => return Err(Failure::Reject(format!("verifier aborted: {r}"))),
                _ => return Err(unexpected("opening")),
            };
            let resp = match prover.on_opening(&opening) {
                Ok(r) => r,
                Err(e) => {
                    chan.abort(&e.to_string())?;
                    println!("{} abort: {e}", kind.name());
                    return Err(Failure::Reject(e.to_string()));
                }
            };
            chan.send(TranscriptEntry::Response(resp))?;
            match chan.recv(5, true)? {
                Incoming::Message(TranscriptEntry::Verdict(v)) => v,
                Incoming::Aborted(r) => return Err(Failure::Reject(format!("verifier aborted: {r}"))),
                _ => return Err(unexpected("verdict")),
            }
        }
        Role::Verifier => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x5645_5249);
            let (mut verifier, com) = Verifier::new(&ctx.par, kind, st, &mut rng);
            chan.send(TranscriptEntry::Commitment(com))?;
            let first = match chan.recv(2, false)? {
                Incoming::Message(TranscriptEntry::First(f)) => f,
                Incoming::Aborted(r) => return Err(Failure::Reject(format!("prover aborted: {r}"))),
                _ => return Err(unexpected("first message")),
            };
            let opening = verifier
                .on_first_message(first)
                .map_err(|e| Failure::Malformed(e.to_string()))?;
            let verdict = match opening {
                None => Verdict::Reject,
                Some(opening) => {
                    chan.send(TranscriptEntry::Opening(opening))?;
                    match chan.recv(4, false)? {
                        Incoming::Message(TranscriptEntry::Response(r)) => verifier
                            .on_response(&r)
                            .map_err(|e| Failure::Malformed(e.to_string()))?,
                        Incoming::Aborted(r) => {
                            println!("{} reject: prover aborted: {r}", kind.name());
                            return Err(Failure::Reject(r));
                        }
                        _ => return Err(unexpected("response")),
                    }
                }
            };
            chan.send(TranscriptEntry::Verdict(verdict))?;
            verdict
        }
    };
    println!("{} {verdict}", kind.name());
    finish(verdict)
}

fn finish(v: Verdict) -> Result<(), Failure> {
    match v {
        Verdict::Accept => Ok(()),
        Verdict::Reject => Err(Failure::Reject("verifier rejected".into())),
    }
}

fn demo(cli: &Cli, rng: &mut ChaCha20Rng) -> Result<(), Failure> {
    let p = pricing(cli)?;
    let m = b"contract Fund { function invest() public payable {} }";
    let par = nomsig::setup::<B>(nomsig::SECURITY_LEVEL).map_err(|e| Failure::Malformed(e.to_string()))?;
    let (pk_s, sk_s) = keygen_signer(&par, rng);
    let (pk_n, sk_n) = keygen_nominee(&par, rng);
    let investor = ecdsa_keygen(cli.seed.wrapping_add(1));
    let operator = ecdsa_keygen(cli.seed.wrapping_add(2)).address();
    println!("investor {} operator {operator}", investor.address());

    let mut state = deploy(m, operator, investor.address(), pk_s.clone(), pk_n.clone(), par.clone(), 100, 1_000)
        .map_err(contract_error)?;
    let mut ledger = WalletLedger::new([(investor.address(), 5_000), (operator, 0)]);
    let supply = ledger.total_supply();
    state.pay_advance(&mut ledger, 100).map_err(contract_error)?;
    println!("advance paid");

    let delta = sign(&par, &pk_n, m, &pk_s, &sk_s, rng);
    let sigma = receive(&par, &pk_s, &pk_n, m, &delta, &sk_n, rng).map_err(|e| Failure::Reject(e.to_string()))?;
    state.store_signature(sigma).map_err(contract_error)?;
    println!("signature stored");

    let tk = convert(&par, &pk_s, &pk_n, m, &sigma, &sk_n).map_err(|e| Failure::Reject(e.to_string()))?;
    let tx = TxRecord {
        from: investor.address(),
        to: operator,
        amount: 1_000,
        nonce: 0,
    };
    let sub = TriggerSubmission {
        tk,
        tx,
        sig_e: ecdsa_sign(&investor, &tx.to_bytes()),
    };
    let rec = state
        .submit_trigger(&mut ledger, &sub, &p.table, Some(p.gas_price))
        .map_err(contract_error)?;
    println!("{rec}");
    println!(
        "balances investor={} operator={} supply_conserved={}",
        ledger.balance_of(&investor.address()).unwrap_or(0),
        ledger.balance_of(&operator).unwrap_or(0),
        ledger.total_supply() == supply
    );
    finish(rec.verdict)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Reject(msg) => eprintln!("reject: {msg}"),
                Failure::Malformed(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}
