//! Per-day observation sets and stability classes.
//!
//! An address is `nd-stable` when it was seen on two days at least `n` days
//! apart (that is, with at least `n-1` days in between), optionally
//! restricted to a window around a reference day.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::addr::Address;
use crate::error::{Error, Result};
use crate::set::{merge_matches, AddressSet};

/// Whole days since 1970-01-01.
pub type Day = i64;

/// Inclusive range of days.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DayRange {
    pub first: Day,
    pub last: Day,
}

impl DayRange {
    /// `None` if `first > last`.
    pub fn new(first: Day, last: Day) -> Option<Self> {
        (first <= last).then_some(DayRange { first, last })
    }

    pub const fn single(day: Day) -> Self {
        DayRange { first: day, last: day }
    }

    pub fn contains(&self, day: Day) -> bool {
        (self.first..=self.last).contains(&day)
    }

    pub fn overlaps(&self, other: &DayRange) -> bool {
        self.first <= other.last && other.first <= self.last
    }

    pub fn days(&self) -> impl Iterator<Item = Day> {
        self.first..=self.last
    }

    pub fn day_count(&self) -> u64 {
        (self.last - self.first) as u64 + 1
    }
}

/// Days before and after the reference day that count as evidence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub before: u32,
    pub after: u32,
}

impl Window {
    pub const fn span(&self, reference: Day) -> DayRange {
        DayRange { first: reference - self.before as i64, last: reference + self.after as i64 }
    }
}

impl Default for Window {
    fn default() -> Self {
        Window { before: 7, after: 7 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StabilityClass {
    n: u32,
    window: Option<Window>,
    slew_days: u32,
}

impl StabilityClass {
    /// `nd-stable` inside the default (-7d,+7d) window.
    pub fn new(n: u32) -> Result<Self> {
        Self::with_window(n, Some(Window::default()))
    }

    /// `window = None` considers every logged day.
    pub fn with_window(n: u32, window: Option<Window>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidStabilityDays(n));
        }
        Ok(StabilityClass { n, window, slew_days: 0 })
    }

    /// Accepts day separations up to `slew_days` short of `n` to absorb
    /// timestamps that may be off by a day. Two distinct days are still required.
    pub fn with_slew_tolerance(mut self, slew_days: u32) -> Self {
        self.slew_days = slew_days;
        self
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn window(&self) -> Option<Window> {
        self.window
    }

    /// Smallest day separation that qualifies.
    pub fn required_separation(&self) -> i64 {
        self.n.saturating_sub(self.slew_days).max(1) as i64
    }
}

/// Renders as `3d-stable (-7d,+7d)`.
impl fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}d-stable", self.n)?;
        if let Some(w) = self.window {
            write!(f, " (-{}d,+{}d)", w.before, w.after)?;
        }
        Ok(())
    }
}

/// Result of classifying every day of a week.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeeklyStability {
    /// Active on some reference day and stable on at least one of them.
    pub stable: AddressSet,
    /// The week's active union minus `stable`.
    pub not_stable: AddressSet,
}

/// Deduplicated active addresses keyed by day.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObservationLog {
    days: BTreeMap<Day, AddressSet>,
}

impl ObservationLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Union-merges `addrs` into `day`.
    pub fn record_day(&mut self, day: Day, addrs: impl IntoIterator<Item = Address>) {
        let incoming: AddressSet = addrs.into_iter().collect();
        self.record_set(day, incoming);
    }

    pub fn record_set(&mut self, day: Day, set: AddressSet) {
        match self.days.get_mut(&day) {
            Some(existing) => *existing = existing.union(&set),
            None => {
                self.days.insert(day, set);
            }
        }
    }

    pub fn day(&self, day: Day) -> Option<&AddressSet> {
        self.days.get(&day)
    }

    pub fn days(&self) -> impl Iterator<Item = (Day, &AddressSet)> {
        self.days.iter().map(|(&d, s)| (d, s))
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    /// The same log with each address replaced by its `len`-bit prefix base.
    pub fn map_prefix(&self, len: u8) -> Result<ObservationLog> {
        let days = self.days.iter().map(|(&d, s)| Ok((d, s.map_prefix(len)?))).collect::<Result<_>>()?;
        Ok(ObservationLog { days })
    }

    /// Union of the day sets within `range`.
    pub fn active_in(&self, range: DayRange) -> AddressSet {
        self.days.range(range.first..=range.last).fold(AddressSet::new(), |acc, (_, s)| acc.union(s))
    }

    /// Addresses active on `reference` that are `class`-stable around it.
    pub fn nd_stable(&self, reference: Day, class: &StabilityClass) -> Result<AddressSet> {
        let base = self.days.get(&reference).ok_or(Error::MissingDay(reference))?;
        let members = base.as_slice();
        let mut first = alloc::vec![reference; members.len()];
        let mut last = first.clone();

        let days: Vec<(&Day, &AddressSet)> = match class.window {
            Some(w) => {
                let span = w.span(reference);
                self.days.range(span.first..=span.last).collect()
            }
            None => self.days.iter().collect(),
        };
        for (&day, set) in days {
            if day == reference {
                continue;
            }
            merge_matches(members, set.as_slice(), |i, _| {
                first[i] = first[i].min(day);
                last[i] = last[i].max(day);
            });
        }

        let need = class.required_separation();
        let stable = members
            .iter()
            .zip(first.iter().zip(&last))
            .filter(|(_, (f, l))| *l - *f >= need)
            .map(|(a, _)| *a)
            .collect();
        Ok(AddressSet::from_sorted(stable).unwrap_or_else(AddressSet::from_unsorted))
    }

    /// Addresses active somewhere in both periods.
    pub fn stable_across(&self, period_a: DayRange, period_b: DayRange) -> Result<AddressSet> {
        if period_a.overlaps(&period_b) {
            return Err(Error::OverlappingPeriods);
        }
        Ok(self.active_in(period_a).intersection(&self.active_in(period_b)))
    }

    /// Unique stable addresses over seven consecutive reference days starting
    /// at `first_day`, and the rest of that week's active addresses.
    pub fn weekly_unique_stable(&self, first_day: Day, class: &StabilityClass) -> Result<WeeklyStability> {
        let week = DayRange { first: first_day, last: first_day + 6 };
        let mut stable = AddressSet::new();
        let mut active = AddressSet::new();
        for day in week.days() {
            stable = stable.union(&self.nd_stable(day, class)?);
            if let Some(s) = self.days.get(&day) {
                active = active.union(s);
            }
        }
        let not_stable = active.difference(&stable);
        Ok(WeeklyStability { stable, not_stable })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    const MAR17: Day = 16511; // 2015-03-17

    fn addr(x: u128) -> Address {
        Address::from_bits(x)
    }

    fn log_of(entries: &[(Day, &[u128])]) -> ObservationLog {
        let mut log = ObservationLog::new();
        for &(d, xs) in entries {
            log.record_day(d, xs.iter().map(|&x| addr(x)));
        }
        log
    }

    fn stable(log: &ObservationLog, day: Day, n: u32) -> Vec<u128> {
        log.nd_stable(day, &StabilityClass::new(n).unwrap()).unwrap().iter().map(|a| a.bits()).collect()
    }

    #[test]
    fn record_day_merges() {
        let mut log = ObservationLog::new();
        log.record_day(10, [addr(1)]);
        log.record_day(10, [addr(1)]);
        assert_eq!(log.day(10).unwrap().len(), 1);
        log.record_day(10, [addr(2)]);
        assert_eq!(log.day(10).unwrap().len(), 2);
        log.record_day(11, [addr(1)]);
        assert_eq!(log.len(), 2);
        assert_eq!(log.day(11).unwrap().len(), 1);
    }

    #[test]
    fn consecutive_days_are_1d_only() {
        let log = log_of(&[(MAR17, &[1]), (MAR17 + 1, &[1])]);
        assert_eq!(stable(&log, MAR17, 1), [1]);
        assert!(stable(&log, MAR17, 2).is_empty());
    }

    #[test]
    fn one_day_gap_is_2d_and_1d() {
        let log = log_of(&[(MAR17, &[1]), (MAR17 + 2, &[1])]);
        assert_eq!(stable(&log, MAR17, 2), [1]);
        assert_eq!(stable(&log, MAR17, 1), [1]);
        assert!(stable(&log, MAR17, 3).is_empty());
    }

    #[test]
    fn single_observation_never_stable() {
        let log = log_of(&[(MAR17, &[1])]);
        assert!(stable(&log, MAR17, 1).is_empty());
    }

    #[test]
    fn stability_uses_days_on_both_sides() {
        let log = log_of(&[(MAR17 - 3, &[1]), (MAR17, &[1]), (MAR17 + 4, &[1])]);
        assert_eq!(stable(&log, MAR17, 7), [1]);
        assert!(stable(&log, MAR17, 8).is_empty());
    }

    #[test]
    fn window_excludes_far_days() {
        let log = log_of(&[(MAR17, &[1]), (MAR17 + 8, &[1])]);
        assert!(stable(&log, MAR17, 1).is_empty());
        let unbounded = StabilityClass::with_window(8, None).unwrap();
        assert_eq!(log.nd_stable(MAR17, &unbounded).unwrap().len(), 1);
    }

    #[test]
    fn missing_reference_day() {
        let log = log_of(&[(MAR17, &[1])]);
        let c = StabilityClass::new(1).unwrap();
        assert_eq!(log.nd_stable(MAR17 + 1, &c), Err(Error::MissingDay(MAR17 + 1)));
        assert_eq!(StabilityClass::new(0), Err(Error::InvalidStabilityDays(0)));
    }

    #[test]
    fn slew_tolerance_relaxes_by_one() {
        let log = log_of(&[(MAR17, &[1]), (MAR17 + 2, &[1])]);
        let strict = StabilityClass::new(3).unwrap();
        assert!(log.nd_stable(MAR17, &strict).unwrap().is_empty());
        let slewed = strict.with_slew_tolerance(1);
        assert_eq!(log.nd_stable(MAR17, &slewed).unwrap().len(), 1);
        // still needs two distinct days
        let only = log_of(&[(MAR17, &[1])]);
        let c = StabilityClass::new(1).unwrap().with_slew_tolerance(1);
        assert!(only.nd_stable(MAR17, &c).unwrap().is_empty());
    }

    #[test]
    fn label() {
        assert_eq!(StabilityClass::new(3).unwrap().to_string(), "3d-stable (-7d,+7d)");
        assert_eq!(StabilityClass::with_window(1, None).unwrap().to_string(), "1d-stable");
    }

    #[test]
    fn cross_epoch() {
        let year_ago = MAR17 - 365;
        let log = log_of(&[(MAR17, &[1, 2]), (MAR17 + 3, &[3]), (year_ago + 1, &[1, 3]), (year_ago + 2, &[9])]);
        let now = DayRange::new(MAR17, MAR17 + 6).unwrap();
        let then = DayRange::new(year_ago, year_ago + 6).unwrap();
        let both: Vec<u128> = log.stable_across(now, then).unwrap().iter().map(|a| a.bits()).collect();
        assert_eq!(both, [1, 3]);
        assert_eq!(log.stable_across(then, now).unwrap(), log.stable_across(now, then).unwrap());
        let overlapping = DayRange::new(MAR17 + 6, MAR17 + 10).unwrap();
        assert_eq!(log.stable_across(now, overlapping), Err(Error::OverlappingPeriods));
    }

    #[test]
    fn weekly_union() {
        // addr 1 only stable relative to the last reference day
        let mut entries: Vec<(Day, &[u128])> = (0..7).map(|i| (MAR17 + i, &[2u128][..])).collect();
        entries.push((MAR17 + 6, &[1]));
        entries.push((MAR17 + 9, &[1]));
        let log = log_of(&entries);
        let w = log.weekly_unique_stable(MAR17, &StabilityClass::new(3).unwrap()).unwrap();
        let got: Vec<u128> = w.stable.iter().map(|a| a.bits()).collect();
        assert_eq!(got, [1, 2]);
        assert!(w.not_stable.is_empty());
        assert_eq!(
            log.weekly_unique_stable(MAR17 + 1, &StabilityClass::new(3).unwrap()),
            Err(Error::MissingDay(MAR17 + 7))
        );
    }

    #[test]
    fn prefix_mapping() {
        let log = log_of(&[
            (MAR17, &[0x1_0000_0000_0000_0001, 0x1_0000_0000_0000_0002]),
            (MAR17 + 1, &[0x1_0000_0000_0000_0003]),
        ]);
        let by64 = log.map_prefix(64).unwrap();
        assert_eq!(by64.day(MAR17).unwrap().len(), 1);
        let s = by64.nd_stable(MAR17, &StabilityClass::new(1).unwrap()).unwrap();
        assert_eq!(s.len(), 1);
        assert!(log.nd_stable(MAR17, &StabilityClass::new(1).unwrap()).unwrap().is_empty());
    }
}
