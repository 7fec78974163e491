//! Multi-resolution aggregate (MRA) count ratios, aggregate population
//! distributions and fixed-length density reports.

use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;

use crate::addr::{Address, Prefix};
use crate::error::{Error, Result};
use crate::set::AddressSet;
use crate::trie::{dense_fixed_length, DensityClass};

/// `n_p`, the number of distinct `/p` prefixes covering a non-empty set, for `p` in `0..=128`.
#[derive(Clone, PartialEq, Eq)]
pub struct AggregateCounts {
    n: [u64; 129],
}

impl AggregateCounts {
    /// Counts from a sorted set. Adjacent members whose common prefix is
    /// shorter than `p` fall into different `/p` prefixes, so
    /// `n_p = 1 + #{adjacent pairs with common prefix < p}`.
    pub fn from_set(addrs: &AddressSet) -> Result<Self> {
        Self::from_sorted_slice(addrs.as_slice())
    }

    /// As [`from_set`](Self::from_set) for an ascending slice; adjacent duplicates are ignored.
    pub fn from_sorted_slice(addrs: &[Address]) -> Result<Self> {
        if addrs.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut splits_at = [0u64; 129];
        for w in addrs.windows(2) {
            debug_assert!(w[0] <= w[1], "input not sorted");
            splits_at[w[0].common_prefix_len(w[1]) as usize] += 1;
        }
        let mut n = [0u64; 129];
        let mut running = 1u64;
        for p in 0..=128 {
            n[p] = running;
            if p < 128 {
                running += splits_at[p];
            }
        }
        Ok(AggregateCounts { n })
    }

    pub(crate) fn from_counts(n: [u64; 129]) -> Self {
        AggregateCounts { n }
    }

    #[inline]
    pub fn get(&self, p: u8) -> u64 {
        self.n[p as usize]
    }

    /// Distinct addresses, `n_128`.
    pub fn total(&self) -> u64 {
        self.n[128]
    }

    pub fn as_slice(&self) -> &[u64; 129] {
        &self.n
    }
}

impl fmt::Debug for AggregateCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AggregateCounts").field("n", &&self.n[..]).finish()
    }
}

/// Bits added per MRA step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Resolution {
    Bit = 1,
    Nybble = 4,
    Byte = 8,
    Segment = 16,
}

impl Resolution {
    pub const ALL: [Resolution; 4] = [Resolution::Bit, Resolution::Nybble, Resolution::Byte, Resolution::Segment];

    pub const fn bits(self) -> u8 {
        self as u8
    }
}

impl TryFrom<u8> for Resolution {
    type Error = Error;

    fn try_from(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Resolution::Bit),
            4 => Ok(Resolution::Nybble),
            8 => Ok(Resolution::Byte),
            16 => Ok(Resolution::Segment),
            other => Err(Error::UnsupportedResolution(other)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MraPoint {
    pub p: u8,
    pub n_p: u64,
    pub n_p_plus_k: u64,
}

impl MraPoint {
    /// `n_{p+k} / n_p`, reduced.
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.n_p_plus_k, self.n_p)
    }

    pub fn ratio_f64(&self) -> f64 {
        self.n_p_plus_k as f64 / self.n_p as f64
    }
}

/// Ratios at `p = 0, k, 2k, ..., 128-k`, each reported at its left endpoint `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MraSeries {
    pub k: Resolution,
    pub points: Vec<MraPoint>,
}

impl MraSeries {
    /// Product of all ratios; telescopes to `n_128`.
    pub fn product(&self) -> Ratio<u64> {
        self.points.iter().fold(Ratio::from_integer(1), |acc, pt| acc * pt.ratio())
    }

    pub fn ratio_at(&self, p: u8) -> Option<Ratio<u64>> {
        self.points.iter().find(|pt| pt.p == p).map(MraPoint::ratio)
    }
}

pub fn mra_ratios(counts: &AggregateCounts, k: Resolution) -> MraSeries {
    let step = k.bits() as usize;
    let points = (0..128)
        .step_by(step)
        .map(|p| MraPoint { p: p as u8, n_p: counts.n[p], n_p_plus_k: counts.n[p + step] })
        .collect();
    MraSeries { k, points }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CcdfPoint {
    pub population: u64,
    /// Active prefixes whose population is at least `population`.
    pub prefixes_at_least: u64,
}

/// Per-prefix address counts at one aggregation length, with their CCDF.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PopulationDistribution {
    pub aggregate_length: u8,
    /// Active prefixes in ascending order with their populations.
    pub populations: Vec<(Prefix, u64)>,
    /// One point per distinct population value, ascending.
    pub ccdf: Vec<CcdfPoint>,
}

impl PopulationDistribution {
    pub fn active_prefixes(&self) -> u64 {
        self.populations.len() as u64
    }

    /// Fraction of active prefixes with population at least `x`.
    pub fn ccdf_at(&self, x: u64) -> Ratio<u64> {
        let total = self.active_prefixes();
        if total == 0 {
            return Ratio::from_integer(0);
        }
        let at_least = self.ccdf.iter().find(|pt| pt.population >= x).map_or(0, |pt| pt.prefixes_at_least);
        Ratio::new(at_least, total)
    }
}

pub fn population_distribution(addrs: &AddressSet, p: u8) -> Result<PopulationDistribution> {
    if p > 128 {
        return Err(Error::PrefixLength(p as u32));
    }
    let mut populations: Vec<(Prefix, u64)> = Vec::new();
    for &a in addrs {
        let prefix = Prefix::new_unchecked(a, p);
        match populations.last_mut() {
            Some((last, count)) if *last == prefix => *count += 1,
            _ => populations.push((prefix, 1)),
        }
    }

    let mut sizes: Vec<u64> = populations.iter().map(|&(_, c)| c).collect();
    sizes.sort_unstable();
    let total = sizes.len() as u64;
    let mut ccdf = Vec::new();
    let mut i = 0;
    while i < sizes.len() {
        ccdf.push(CcdfPoint { population: sizes[i], prefixes_at_least: total - i as u64 });
        let v = sizes[i];
        while i < sizes.len() && sizes[i] == v {
            i += 1;
        }
    }
    Ok(PopulationDistribution { aggregate_length: p, populations, ccdf })
}

/// One row of a fixed-length density table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DensityReportRow {
    pub class: DensityClass,
    pub dense_prefixes: u64,
    pub contained_addresses: u64,
    /// `dense_prefixes * 2^(128-p)`.
    pub possible_addresses: u128,
}

impl DensityReportRow {
    /// `contained / possible`; `None` when no prefix qualified.
    pub fn density(&self) -> Option<Ratio<u128>> {
        (self.possible_addresses > 0).then(|| Ratio::new(self.contained_addresses as u128, self.possible_addresses))
    }

    pub fn density_f64(&self) -> Option<f64> {
        self.density().map(|_| self.contained_addresses as f64 / self.possible_addresses as f64)
    }

    /// Density rounded half-up to `places` decimals (at most 18).
    pub fn density_decimal(&self, places: u32) -> Option<DecimalFraction> {
        self.density().map(|r| DecimalFraction::from_ratio(r, places))
    }
}

/// Exact decimal rendering of a fraction in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecimalFraction {
    scaled: u128,
    places: u32,
}

impl DecimalFraction {
    /// `r` rounded half-up to `places` decimal places.
    pub fn from_ratio(r: Ratio<u128>, places: u32) -> Self {
        let places = places.min(18);
        let (num, den) = (*r.numer(), *r.denom());
        let mut scaled = num / den;
        let mut rem = num % den;
        // long division, one decimal digit per step; rem < den throughout
        for _ in 0..places {
            let mut digit = 0u128;
            let mut next = 0u128;
            for _ in 0..10 {
                next = add_mod(next, rem, den, &mut digit);
            }
            rem = next;
            scaled = scaled * 10 + digit;
        }
        if rem >= den - rem {
            scaled += 1;
        }
        DecimalFraction { scaled, places }
    }
}

/// `(x + y) mod d` for `x, y < d`, bumping `carry` on wrap-around.
fn add_mod(x: u128, y: u128, d: u128, carry: &mut u128) -> u128 {
    if x >= d - y {
        *carry += 1;
        x - (d - y)
    } else {
        x + y
    }
}

impl fmt::Display for DecimalFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.places == 0 {
            return write!(f, "{}", self.scaled);
        }
        let scale = 10u128.pow(self.places);
        write!(f, "{}.{:0width$}", self.scaled / scale, self.scaled % scale, width = self.places as usize)
    }
}

/// Fixed-length dense prefixes per class with their address-space totals.
/// Classes with `p = 0` are rejected: their span is `2^128`.
pub fn density_report(addrs: &AddressSet, classes: &[DensityClass]) -> Result<Vec<DensityReportRow>> {
    if addrs.is_empty() {
        return Err(Error::EmptySet);
    }
    classes
        .iter()
        .map(|&class| {
            let p = class.prefix_len();
            if p == 0 {
                return Err(Error::SpanOverflow(p));
            }
            let report = dense_fixed_length(addrs, class);
            let dense_prefixes = report.len() as u64;
            let possible_addresses =
                (dense_prefixes as u128).checked_mul(1u128 << (128 - p)).ok_or(Error::SpanOverflow(p))?;
            Ok(DensityReportRow {
                class,
                dense_prefixes,
                contained_addresses: report.contained_addresses(),
                possible_addresses,
            })
        })
        .collect()
}

/// Thresholds for the pseudorandom-IID signature in single-bit ratios.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignatureThresholds {
    /// Ratios at `p = 64..=69` must reach this.
    pub high: f64,
    /// The ratio at `p = 70` (the u-bit) must not exceed this.
    pub low: f64,
    /// Ratios from `flat_from` on must not exceed this.
    pub flat: f64,
    pub flat_from: u8,
}

impl Default for SignatureThresholds {
    fn default() -> Self {
        SignatureThresholds { high: 1.8, low: 1.1, flat: 1.05, flat_from: 96 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SignatureFailure {
    /// A leading IID bit does not split most /64s.
    NoEarlySplit { p: u8, ratio: f64 },
    /// No dip at the u-bit.
    NoUbitDip { ratio: f64 },
    /// The tail does not flatten out.
    NotFlat { p: u8, ratio: f64 },
}

impl fmt::Display for SignatureFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignatureFailure::NoEarlySplit { p, ratio } => write!(f, "gamma_{p} = {ratio:.4} below split threshold"),
            SignatureFailure::NoUbitDip { ratio } => write!(f, "gamma_70 = {ratio:.4} shows no u-bit dip"),
            SignatureFailure::NotFlat { p, ratio } => write!(f, "gamma_{p} = {ratio:.4} above flat threshold"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignatureCheck {
    pub failures: Vec<SignatureFailure>,
}

impl SignatureCheck {
    pub fn is_consistent(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks single-bit ratios for the shape left by many pseudorandom IIDs
/// per /64 with the u-bit cleared.
pub fn privacy_signature_check(counts: &AggregateCounts, th: &SignatureThresholds) -> SignatureCheck {
    let gamma = |p: u8| counts.get(p + 1) as f64 / counts.get(p) as f64;
    let mut failures = Vec::new();
    for p in 64..=69 {
        let ratio = gamma(p);
        if ratio < th.high {
            failures.push(SignatureFailure::NoEarlySplit { p, ratio });
        }
    }
    let dip = gamma(70);
    if dip > th.low {
        failures.push(SignatureFailure::NoUbitDip { ratio: dip });
    }
    for p in th.flat_from..128 {
        let ratio = gamma(p);
        if ratio > th.flat {
            failures.push(SignatureFailure::NotFlat { p, ratio });
        }
    }
    SignatureCheck { failures }
}
