//! Fair division of indivisible goods under two valuation systems at once:
//! each agent's subjective utilities and a shared market valuation.
//!
//! All arithmetic is exact ([`Value`] is an arbitrary-precision rational).
//! Goods are indexed from zero internally and named `g1..gm` in text and JSON.

pub mod algorithms;
pub mod cake;
pub mod criteria;
pub mod error;
pub mod generate;
pub mod io;
pub mod model;
pub mod oracle;
pub mod value;

pub use error::{Error, Result};
pub use model::{
    AdditiveValuation, Allocation, BlockPartition, Good, Instance, Market, MonotoneValuation,
    Ranking, TieBreak, Valuation,
};
pub use value::Value;

use criteria::DEFAULT_MMS_MAX_GOODS;
use oracle::enumerate::DEFAULT_ENUMERATION_BOUND;

/// Size limits for exhaustive searches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of allocations any single scan may visit.
    pub enumeration_bound: u64,
    pub mms_max_goods: usize,
    /// Largest number of market-rank pairs the two-agent orientation search
    /// accepts.
    pub max_pairs: usize,
    /// Overrides the built-in step limit of the EQ1 + fPO market solver.
    pub eq1_iteration_guard: Option<u64>,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            enumeration_bound: DEFAULT_ENUMERATION_BOUND,
            mms_max_goods: DEFAULT_MMS_MAX_GOODS,
            max_pairs: 12,
            eq1_iteration_guard: None,
        }
    }
}
