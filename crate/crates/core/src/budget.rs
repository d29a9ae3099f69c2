//! Shared work-unit budget for exhaustive enumerations.

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

/// Default cap on work units when neither a flag nor `AML_BUDGET` is given.
pub const DEFAULT_BUDGET: u64 = 2_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("enumeration budget of {limit} work units exceeded")]
pub struct BudgetExceeded {
    pub limit: u64,
}

/// A counter that refuses to go past `limit`. Safe to share across threads.
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    used: AtomicU64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget {
            limit,
            used: AtomicU64::new(0),
        }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    /// Charges `units` of work, failing once the running total passes the limit.
    pub fn charge(&self, units: u64) -> Result<(), BudgetExceeded> {
        let before = self.used.fetch_add(units, Ordering::Relaxed);
        if before.saturating_add(units) > self.limit {
            Err(BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }

    /// Fails up front if an enumeration of `units` steps cannot fit.
    pub fn check_size(&self, units: u128) -> Result<(), BudgetExceeded> {
        if units > (self.limit - self.used().min(self.limit)) as u128 {
            Err(BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

/// `n^k` as a `u128`, saturating.
pub fn power_size(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..k {
        acc = acc.saturating_mul(n as u128);
    }
    acc
}
