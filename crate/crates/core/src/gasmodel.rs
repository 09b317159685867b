//! Precompile price list and gas metering for on-chain token verification.
//!
//! Prices follow the BN254 `ecPairing` / `ecAdd` precompiles and `ecRecover`.
//! All pairings of one verification are priced as a single batched pairing call.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Gas per precompile operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostTable {
    pub pairing_base: u64,
    pub pairing_per_pair: u64,
    pub ec_add: u64,
    pub ecrecover: u64,
}

impl Default for CostTable {
    fn default() -> Self {
        CostTable {
            pairing_base: 45_000,
            pairing_per_pair: 34_000,
            ec_add: 150,
            ecrecover: 3_000,
        }
    }
}

/// Operations performed by one instrumented verification.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    /// `(G1, G2)` pairs handed to the batched pairing check.
    pub pairing_pairs: u64,
    /// Group additions (written as multiplications in the scheme).
    pub ec_additions: u64,
    /// Scalar multiplications the price list has no entry for.
    pub unpriced_scalar_muls: u64,
}

/// 0.00629058 ETH for 355,400 gas: 17.7 gwei, a March 2025 snapshot.
pub const DEFAULT_GAS_PRICE_WEI: u128 = 17_700_000_000;

pub const WEI_PER_ETH: u128 = 1_000_000_000_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GasReport {
    pub counts: OpCounts,
    pub tkverify_gas: u64,
    pub ecrecover_gas: u64,
    pub total_gas: u64,
    pub gas_price_wei: Option<u128>,
}

pub fn price_pairing_call(pairs: u64, table: &CostTable) -> u64 {
    table.pairing_base + table.pairing_per_pair * pairs
}

pub fn meter_tkverify(counts: &OpCounts, table: &CostTable) -> u64 {
    price_pairing_call(counts.pairing_pairs, table) + table.ec_add * counts.ec_additions
}

/// Gas for one `ecRecover` call.
pub fn meter_ecrecover(table: &CostTable) -> u64 {
    table.ecrecover
}

impl GasReport {
    pub fn new(counts: OpCounts, table: &CostTable, gas_price_wei: Option<u128>) -> Self {
        let tkverify_gas = meter_tkverify(&counts, table);
        let ecrecover_gas = meter_ecrecover(table);
        GasReport {
            counts,
            tkverify_gas,
            ecrecover_gas,
            total_gas: tkverify_gas + ecrecover_gas,
            gas_price_wei,
        }
    }

    /// Cost of `total_gas` in ETH, when a gas price is configured.
    pub fn eth_cost(&self) -> Option<Ratio<u128>> {
        self.eth_cost_of(self.total_gas)
    }

    pub fn eth_cost_of(&self, gas: u64) -> Option<Ratio<u128>> {
        self.gas_price_wei
            .map(|price| Ratio::new(gas as u128 * price, WEI_PER_ETH))
    }
}

/// `tkverify_gas / ecrecover_gas`.
pub fn ratio_vs_ecrecover(report: &GasReport) -> Ratio<u64> {
    assert!(report.ecrecover_gas > 0, "ecrecover gas must be positive");
    Ratio::new(report.tkverify_gas, report.ecrecover_gas)
}

pub fn ratio_to_f64(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn eth_decimal(r: &Ratio<u128>) -> String {
    // eighteen decimals, matching wei precision
    let whole = r.numer() / r.denom();
    let frac = (r.numer() % r.denom()) * WEI_PER_ETH / r.denom();
    let frac = format!("{frac:018}");
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        format!("{whole}")
    } else {
        format!("{whole}.{frac}")
    }
}

impl fmt::Display for GasReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ratio = ratio_vs_ecrecover(self);
        write!(
            f,
            "gas pairings={} ec_additions={} unpriced_scalar_muls={} tkverify={} ecrecover={} total={} ratio={:.2}",
            self.counts.pairing_pairs,
            self.counts.ec_additions,
            self.counts.unpriced_scalar_muls,
            self.tkverify_gas,
            self.ecrecover_gas,
            self.total_gas,
            ratio_to_f64(&ratio),
        )?;
        if let (Some(price), Some(tk), Some(total)) = (
            self.gas_price_wei,
            self.eth_cost_of(self.tkverify_gas),
            self.eth_cost(),
        ) {
            write!(
                f,
                " gas_price_wei={price} tkverify_eth={} total_eth={}",
                eth_decimal(&tk),
                eth_decimal(&total)
            )?;
        }
        Ok(())
    }
}
