//! Escrow contract that releases an investment once the nominee has converted the
//! stored nominative signature and the investor has authorized the transfer.
//!
//! Flow: deploy, advance payment, signature stored (still invisible), trigger with
//! `(tk, M, sigE)`. Every operation validates before it mutates, so an error leaves
//! both the contract and the ledger untouched.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::algebra::Backend;
use crate::gasmodel::{CostTable, GasReport};
use crate::nomsig::{tk_verify, NomSignature, NomineePublicKey, PublicParams, SignerPublicKey, VerificationToken};
use crate::trigger::{verify_against_address, Address, EcdsaSignature, ADDRESS_LEN};
use crate::zkproto::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    #[error("advance and investment must be positive")]
    InvalidAmounts,
    #[error("advance of {paid} is below the required {required}")]
    InsufficientAdvance { paid: u128, required: u128 },
    #[error("{0} cannot cover the transfer")]
    InsufficientFunds(Address),
    #[error("operation not allowed in phase {0:?}")]
    WrongPhase(Phase),
    #[error("nonce {0} already used")]
    NonceReplayed(u64),
    #[error("transaction record does not match the contract: {0}")]
    MalformedTransaction(&'static str),
    #[error("unknown address {0}")]
    UnknownAddress(Address),
}

/// Address to balance. Transfers move value, never create it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WalletLedger {
    balances: BTreeMap<Address, u128>,
}

impl WalletLedger {
    pub fn new(initial: impl IntoIterator<Item = (Address, u128)>) -> Self {
        WalletLedger {
            balances: initial.into_iter().collect(),
        }
    }

    pub fn balance_of(&self, addr: &Address) -> Result<u128, ContractError> {
        self.balances
            .get(addr)
            .copied()
            .ok_or(ContractError::UnknownAddress(*addr))
    }

    pub fn total_supply(&self) -> u128 {
        self.balances.values().sum()
    }

    pub fn accounts(&self) -> impl Iterator<Item = (&Address, &u128)> {
        self.balances.iter()
    }

    fn check_transfer(&self, from: &Address, to: &Address, amount: u128) -> Result<(), ContractError> {
        self.balance_of(to)?;
        if self.balance_of(from)? < amount {
            return Err(ContractError::InsufficientFunds(*from));
        }
        Ok(())
    }

    fn transfer(&mut self, from: &Address, to: &Address, amount: u128) -> Result<(), ContractError> {
        self.check_transfer(from, to, amount)?;
        *self.balances.get_mut(from).unwrap() -= amount;
        *self.balances.get_mut(to).unwrap() += amount;
        Ok(())
    }
}

/// Phases advance in declaration order; `Executed` is terminal. A rejected trigger
/// stays in `SignatureStored`, so it can be resubmitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    Deployed,
    AdvancePaid,
    SignatureStored,
    Executed,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Deployed => "deployed",
            Phase::AdvancePaid => "advance-paid",
            Phase::SignatureStored => "signature-stored",
            Phase::Executed => "executed",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Phase::Deployed, Phase::AdvancePaid, Phase::SignatureStored, Phase::Executed]
            .into_iter()
            .find(|p| p.name() == s)
    }
}

/// The transaction `M` the investor signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TxRecord {
    pub from: Address,
    pub to: Address,
    pub amount: u128,
    pub nonce: u64,
}

impl TxRecord {
    pub const ENCODED_LEN: usize = 2 * ADDRESS_LEN + 16 + 8;

    /// `from || to || amount (u128 BE) || nonce (u64 BE)`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::ENCODED_LEN);
        out.extend_from_slice(&self.from.0);
        out.extend_from_slice(&self.to.0);
        out.extend_from_slice(&self.amount.to_be_bytes());
        out.extend_from_slice(&self.nonce.to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ContractError> {
        if bytes.len() != Self::ENCODED_LEN {
            return Err(ContractError::MalformedTransaction("wrong length"));
        }
        let (from, rest) = bytes.split_at(ADDRESS_LEN);
        let (to, rest) = rest.split_at(ADDRESS_LEN);
        let (amount, nonce) = rest.split_at(16);
        Ok(TxRecord {
            from: Address(from.try_into().unwrap()),
            to: Address(to.try_into().unwrap()),
            amount: u128::from_be_bytes(amount.try_into().unwrap()),
            nonce: u64::from_be_bytes(nonce.try_into().unwrap()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriggerSubmission<B: Backend> {
    pub tk: VerificationToken<B>,
    pub tx: TxRecord,
    pub sig_e: EcdsaSignature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transfer {
    pub from: Address,
    pub to: Address,
    pub amount: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionReceipt {
    pub verdict: Verdict,
    pub tk_valid: bool,
    pub ecdsa_valid: bool,
    pub gas: GasReport,
    /// Present exactly when the verdict is accept.
    pub transfer: Option<Transfer>,
}

impl std::fmt::Display for ExecutionReceipt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} tk_valid={} ecdsa_valid={}", self.verdict, self.tk_valid, self.ecdsa_valid)?;
        if let Some(t) = &self.transfer {
            write!(f, " transfer {} -> {} amount={}", t.from, t.to, t.amount)?;
        }
        write!(f, "\n{}", self.gas)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractState<B: Backend> {
    pub(crate) phase: Phase,
    pub(crate) program: Vec<u8>,
    pub(crate) operator: Address,
    pub(crate) investor: Address,
    pub(crate) advance_required: u128,
    pub(crate) investment_amount: u128,
    pub(crate) stored_sigma: Option<NomSignature<B>>,
    pub(crate) pk_s: SignerPublicKey<B>,
    pub(crate) pk_n: NomineePublicKey<B>,
    pub(crate) par: PublicParams<B>,
    pub(crate) used_nonces: BTreeSet<u64>,
}

/// What anyone can read off the chain. Carries no key material.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicView<B: Backend> {
    pub phase: Phase,
    pub program: Vec<u8>,
    pub operator: Address,
    pub investor: Address,
    pub advance_required: u128,
    pub investment_amount: u128,
    pub stored_sigma: Option<NomSignature<B>>,
    pub used_nonces: Vec<u64>,
}

#[allow(clippy::too_many_arguments)]
pub fn deploy<B: Backend>(
    m: &[u8],
    operator: Address,
    investor: Address,
    pk_s: SignerPublicKey<B>,
    pk_n: NomineePublicKey<B>,
    par: PublicParams<B>,
    advance_required: u128,
    investment_amount: u128,
) -> Result<ContractState<B>, ContractError> {
    if advance_required == 0 || investment_amount == 0 {
        return Err(ContractError::InvalidAmounts);
    }
    Ok(ContractState {
        phase: Phase::Deployed,
        program: m.to_vec(),
        operator,
        investor,
        advance_required,
        investment_amount,
        stored_sigma: None,
        pk_s,
        pk_n,
        par,
        used_nonces: BTreeSet::new(),
    })
}

impl<B: Backend> ContractState<B> {
    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn program(&self) -> &[u8] {
        &self.program
    }

    pub fn operator(&self) -> Address {
        self.operator
    }

    pub fn investor(&self) -> Address {
        self.investor
    }

    pub fn advance_required(&self) -> u128 {
        self.advance_required
    }

    pub fn investment_amount(&self) -> u128 {
        self.investment_amount
    }

    pub fn stored_sigma(&self) -> Option<&NomSignature<B>> {
        self.stored_sigma.as_ref()
    }

    pub fn params(&self) -> &PublicParams<B> {
        &self.par
    }

    pub fn signer_key(&self) -> &SignerPublicKey<B> {
        &self.pk_s
    }

    pub fn nominee_key(&self) -> &NomineePublicKey<B> {
        &self.pk_n
    }

    pub fn used_nonces(&self) -> &BTreeSet<u64> {
        &self.used_nonces
    }

    fn require_phase(&self, phase: Phase) -> Result<(), ContractError> {
        if self.phase != phase {
            return Err(ContractError::WrongPhase(self.phase));
        }
        Ok(())
    }

    /// Investor pays the operator at least the required advance.
    pub fn pay_advance(&mut self, ledger: &mut WalletLedger, amount: u128) -> Result<(), ContractError> {
        self.require_phase(Phase::Deployed)?;
        if amount < self.advance_required {
            return Err(ContractError::InsufficientAdvance {
                paid: amount,
                required: self.advance_required,
            });
        }
        ledger.transfer(&self.investor, &self.operator, amount)?;
        self.phase = Phase::AdvancePaid;
        Ok(())
    }

    /// Stores `sigma` as is. It cannot be checked here: only the nominee can tell
    /// whether it is valid.
    pub fn store_signature(&mut self, sigma: NomSignature<B>) -> Result<(), ContractError> {
        self.require_phase(Phase::AdvancePaid)?;
        self.stored_sigma = Some(sigma);
        self.phase = Phase::SignatureStored;
        Ok(())
    }

    /// Runs `tk_verify` on the stored signature and recovers the investor from
    /// `sigE`. Funds move only when both accept; otherwise the contract stays armed.
    pub fn submit_trigger(
        &mut self,
        ledger: &mut WalletLedger,
        sub: &TriggerSubmission<B>,
        table: &CostTable,
        gas_price_wei: Option<u128>,
    ) -> Result<ExecutionReceipt, ContractError> {
        // replay is reported as such even once the contract has executed
        if self.used_nonces.contains(&sub.tx.nonce) {
            return Err(ContractError::NonceReplayed(sub.tx.nonce));
        }
        self.require_phase(Phase::SignatureStored)?;
        let tx = &sub.tx;
        if tx.from != self.investor {
            return Err(ContractError::MalformedTransaction("sender is not the investor"));
        }
        if tx.to != self.operator {
            return Err(ContractError::MalformedTransaction("recipient is not the operator"));
        }
        if tx.amount != self.investment_amount {
            return Err(ContractError::MalformedTransaction("amount differs from the investment"));
        }
        let sigma = self.stored_sigma.as_ref().expect("signature stored in this phase");

        let outcome = tk_verify(&self.par, &self.pk_s, &self.pk_n, &self.program, sigma, &sub.tk);
        let ecdsa_valid = verify_against_address(&sub.sig_e, &tx.to_bytes(), &self.investor);
        let gas = GasReport::new(outcome.counts, table, gas_price_wei);

        let mut receipt = ExecutionReceipt {
            verdict: Verdict::from_bool(outcome.accepted && ecdsa_valid),
            tk_valid: outcome.accepted,
            ecdsa_valid,
            gas,
            transfer: None,
        };
        if receipt.verdict.is_accept() {
            ledger.transfer(&tx.from, &tx.to, tx.amount)?;
            self.used_nonces.insert(tx.nonce);
            self.phase = Phase::Executed;
            receipt.transfer = Some(Transfer {
                from: tx.from,
                to: tx.to,
                amount: tx.amount,
            });
        }
        Ok(receipt)
    }

    pub fn query_state(&self) -> PublicView<B> {
        PublicView {
            phase: self.phase,
            program: self.program.clone(),
            operator: self.operator,
            investor: self.investor,
            advance_required: self.advance_required,
            investment_amount: self.investment_amount,
            stored_sigma: self.stored_sigma,
            used_nonces: self.used_nonces.iter().copied().collect(),
        }
    }
}

pub fn balance_of(ledger: &WalletLedger, addr: &Address) -> Result<u128, ContractError> {
    ledger.balance_of(addr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{GroupElement, MockExp};
    use crate::nomsig::{convert, keygen_nominee, keygen_signer, receive, setup, sign, NomineeSecretKey};
    use crate::trigger::{ecdsa_keygen, ecdsa_sign, EcdsaKeyPair};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    const M: &[u8] = b"fn main() { invest(); }";

    struct Env {
        contract: ContractState<MockExp>,
        ledger: WalletLedger,
        sigma: NomSignature<MockExp>,
        sk_n: NomineeSecretKey,
        investor: EcdsaKeyPair,
        operator: Address,
    }

    fn env(seed: u64) -> Env {
        let par = setup::<MockExp>(128).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (pk_s, sk_s) = keygen_signer(&par, &mut rng);
        let (pk_n, sk_n) = keygen_nominee(&par, &mut rng);
        let delta = sign(&par, &pk_n, M, &pk_s, &sk_s, &mut rng);
        let sigma = receive(&par, &pk_s, &pk_n, M, &delta, &sk_n, &mut rng).unwrap();
        let investor = ecdsa_keygen(seed);
        let operator = ecdsa_keygen(seed + 1000).address();
        let ledger = WalletLedger::new([(investor.address(), 1_000), (operator, 50)]);
        let contract = deploy(M, operator, investor.address(), pk_s, pk_n, par, 100, 400).unwrap();
        Env {
            contract,
            ledger,
            sigma,
            sk_n,
            investor,
            operator,
        }
    }

    impl Env {
        fn armed(mut self) -> Self {
            self.contract.pay_advance(&mut self.ledger, 100).unwrap();
            self.contract.store_signature(self.sigma).unwrap();
            self
        }

        fn submission(&self, nonce: u64) -> TriggerSubmission<MockExp> {
            let c = &self.contract;
            let tk = convert(&c.par, &c.pk_s, &c.pk_n, M, &self.sigma, &self.sk_n).unwrap();
            let tx = TxRecord {
                from: self.investor.address(),
                to: self.operator,
                amount: 400,
                nonce,
            };
            TriggerSubmission {
                tk,
                tx,
                sig_e: ecdsa_sign(&self.investor, &tx.to_bytes()),
            }
        }

        fn trigger(&mut self, sub: &TriggerSubmission<MockExp>) -> Result<ExecutionReceipt, ContractError> {
            self.contract
                .submit_trigger(&mut self.ledger, sub, &CostTable::default(), None)
        }
    }

    #[test]
    fn deploy_rejects_zero_amounts() {
        let e = env(1);
        let c = e.contract;
        assert_eq!(
            deploy(M, c.operator, c.investor, c.pk_s.clone(), c.pk_n.clone(), c.par.clone(), 0, 5),
            Err(ContractError::InvalidAmounts)
        );
        assert_eq!(
            deploy(M, c.operator, c.investor, c.pk_s, c.pk_n, c.par, 5, 0),
            Err(ContractError::InvalidAmounts)
        );
        assert_eq!(c.phase, Phase::Deployed);
        assert_eq!(c.program, M);
    }

    #[test]
    fn advance_payment_rules() {
        let mut e = env(2);
        let before = e.ledger.clone();
        assert_eq!(
            e.contract.pay_advance(&mut e.ledger, 99),
            Err(ContractError::InsufficientAdvance { paid: 99, required: 100 })
        );
        assert_eq!(e.ledger, before);
        assert_eq!(
            e.contract.pay_advance(&mut e.ledger, 5_000),
            Err(ContractError::InsufficientFunds(e.investor.address()))
        );
        assert_eq!(e.ledger, before);
        e.contract.pay_advance(&mut e.ledger, 100).unwrap();
        assert_eq!(e.contract.phase, Phase::AdvancePaid);
        assert_eq!(e.ledger.balance_of(&e.operator), Ok(150));
        assert_eq!(
            e.contract.pay_advance(&mut e.ledger, 100),
            Err(ContractError::WrongPhase(Phase::AdvancePaid))
        );
        assert_eq!(e.ledger.total_supply(), before.total_supply());
    }

    #[test]
    fn signature_stored_only_after_advance() {
        let mut e = env(3);
        assert_eq!(
            e.contract.store_signature(e.sigma),
            Err(ContractError::WrongPhase(Phase::Deployed))
        );
        e.contract.pay_advance(&mut e.ledger, 100).unwrap();
        e.contract.store_signature(e.sigma).unwrap();
        assert_eq!(e.contract.stored_sigma(), Some(&e.sigma));
        assert_eq!(e.contract.query_state().stored_sigma, Some(e.sigma));
    }

    #[test]
    fn honest_trigger_executes() {
        let mut e = env(4).armed();
        let sub = e.submission(0);
        let receipt = e.trigger(&sub).unwrap();
        assert_eq!(receipt.verdict, Verdict::Accept);
        assert_eq!(
            receipt.transfer,
            Some(Transfer {
                from: e.investor.address(),
                to: e.operator,
                amount: 400
            })
        );
        assert_eq!(receipt.gas.counts.pairing_pairs, 8);
        assert_eq!(e.contract.phase, Phase::Executed);
        assert_eq!(e.ledger.balance_of(&e.operator), Ok(550));
        assert_eq!(e.ledger.balance_of(&e.investor.address()), Ok(500));
    }

    #[test]
    fn tampered_token_does_not_move_funds() {
        let mut e = env(5).armed();
        let mut sub = e.submission(0);
        sub.tk.tk1 = sub.tk.tk1.mul(&<MockExp as Backend>::G1::generator());
        let before = e.ledger.clone();
        let receipt = e.trigger(&sub).unwrap();
        assert_eq!(receipt.verdict, Verdict::Reject);
        assert!(!receipt.tk_valid && receipt.ecdsa_valid);
        assert!(receipt.transfer.is_none());
        assert_eq!(e.ledger, before);
        assert_eq!(e.contract.phase, Phase::SignatureStored);
        // still armed: the honest token goes through afterwards
        assert_eq!(e.trigger(&e.submission(0)).unwrap().verdict, Verdict::Accept);
    }

    #[test]
    fn wrong_ecdsa_signer_rejected() {
        let mut e = env(6).armed();
        let mut sub = e.submission(0);
        sub.sig_e = ecdsa_sign(&ecdsa_keygen(999), &sub.tx.to_bytes());
        let receipt = e.trigger(&sub).unwrap();
        assert!(receipt.tk_valid && !receipt.ecdsa_valid);
        assert_eq!(receipt.verdict, Verdict::Reject);
        assert_eq!(e.contract.phase, Phase::SignatureStored);
    }

    #[test]
    fn replay_after_acceptance() {
        let mut e = env(7).armed();
        let sub = e.submission(3);
        e.trigger(&sub).unwrap();
        let supply = e.ledger.total_supply();
        let snapshot = e.ledger.clone();
        assert_eq!(e.trigger(&sub), Err(ContractError::NonceReplayed(3)));
        assert_eq!(e.trigger(&e.submission(4)), Err(ContractError::WrongPhase(Phase::Executed)));
        assert_eq!(e.ledger, snapshot);
        assert_eq!(e.ledger.total_supply(), supply);
    }

    #[test]
    fn mismatched_transaction_fields() {
        let mut e = env(8).armed();
        let good = e.submission(0);
        let mut wrong_amount = good;
        wrong_amount.tx.amount = 399;
        let mut wrong_to = good;
        wrong_to.tx.to = e.investor.address();
        let mut wrong_from = good;
        wrong_from.tx.from = e.operator;
        for sub in [wrong_amount, wrong_to, wrong_from] {
            assert!(matches!(e.trigger(&sub), Err(ContractError::MalformedTransaction(_))));
        }
        assert_eq!(e.contract.phase, Phase::SignatureStored);
    }

    #[test]
    fn trigger_before_signature_is_wrong_phase() {
        let mut e = env(9);
        let sub = e.submission(0);
        assert_eq!(e.trigger(&sub), Err(ContractError::WrongPhase(Phase::Deployed)));
    }

    #[test]
    fn tx_record_roundtrip() {
        let tx = TxRecord {
            from: Address([1; 20]),
            to: Address([2; 20]),
            amount: u128::MAX - 7,
            nonce: 42,
        };
        let bytes = tx.to_bytes();
        assert_eq!(bytes.len(), TxRecord::ENCODED_LEN);
        assert_eq!(TxRecord::from_bytes(&bytes), Ok(tx));
        assert!(TxRecord::from_bytes(&bytes[1..]).is_err());
    }

    #[test]
    fn unknown_address() {
        let e = env(10);
        assert_eq!(
            balance_of(&e.ledger, &Address([9; 20])),
            Err(ContractError::UnknownAddress(Address([9; 20])))
        );
    }

    #[test]
    fn identical_sequences_are_deterministic() {
        let run = || {
            let mut e = env(11).armed();
            let mut bad = e.submission(0);
            bad.tk.tk2 = bad.tk.tk1;
            let r1 = e.trigger(&bad).unwrap();
            let r2 = e.trigger(&e.submission(1)).unwrap();
            (e.contract, e.ledger, r1, r2)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn phases_are_ordered() {
        assert!(Phase::Deployed < Phase::AdvancePaid);
        assert!(Phase::SignatureStored < Phase::Executed);
        for p in [Phase::Deployed, Phase::AdvancePaid, Phase::SignatureStored, Phase::Executed] {
            assert_eq!(Phase::from_name(p.name()), Some(p));
        }
    }
}
