//! Classification of active IPv6 address populations.
//!
//! Addresses are classified two ways:
//!
//! * temporally, by whether they recur across observation days
//!   ([`temporal`]), and
//! * spatially, by how they aggregate into prefixes: multi-resolution
//!   aggregate count ratios, aggregate population distributions and dense
//!   prefix discovery ([`spatial`], [`trie`]).
//!
//! [`taxonomy`] recognises standards-defined formats (6to4, Teredo, ISATAP,
//! EUI-64). The crate is `no_std` and needs only `alloc`.
#![no_std]

extern crate alloc;

pub mod addr;
mod error;
pub mod set;
pub mod spatial;
pub mod taxonomy;
pub mod temporal;
pub mod trie;

pub use addr::{prefix_of, Address, IidView, Prefix};
pub use error::{Error, Result};
pub use set::AddressSet;
pub use spatial::{
    density_report, mra_ratios, population_distribution, privacy_signature_check, AggregateCounts, DensityReportRow,
    MraSeries, PopulationDistribution, Resolution, SignatureThresholds,
};
pub use taxonomy::{classify_format, extract_mac, u_bit, FormatClass, FormatKind, MacAddr};
pub use temporal::{Day, DayRange, ObservationLog, StabilityClass, Window};
pub use trie::{aggregate_counts, dense_fixed_length, CountingTrie, DensePrefixReport, DensityClass};

pub use num_rational::Ratio;
