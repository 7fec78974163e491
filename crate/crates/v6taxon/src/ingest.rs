//! Line-oriented log ingestion.
//!
//! Input lines are `<address>` or `<address>,<hits>`. Blank lines and lines
//! starting with `#` are skipped and not counted.

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;

use v6taxon_core::{classify_format, Address, AddressSet, Day, FormatKind};

use crate::dayfile::DayStore;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LogRecord {
    pub address: Address,
    pub hits: u64,
}

impl LogRecord {
    pub fn parse(line: &str) -> Option<LogRecord> {
        let (addr, hits) = match line.split_once(',') {
            Some((a, h)) => (a.trim(), h.trim().parse::<u64>().ok().filter(|&h| h >= 1)?),
            None => (line.trim(), 1),
        };
        Some(LogRecord { address: Address::parse(addr).ok()?, hits })
    }
}

/// Which records survive into the day file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KindFilter {
    #[default]
    All,
    /// Drops Teredo, 6to4 and ISATAP; EUI-64 and other native addresses remain.
    Native,
}

impl KindFilter {
    pub fn keeps(self, kind: FormatKind) -> bool {
        match self {
            KindFilter::All => true,
            KindFilter::Native => !kind.is_transition(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IngestSummary {
    pub lines_read: u64,
    pub records_accepted: u64,
    pub parse_failures: u64,
    /// Accepted records that repeated an earlier address.
    pub duplicates_merged: u64,
    pub total_hits: u64,
    /// Accepted records per format, indexed in [`FormatKind::ALL`] order.
    pub tallies: [u64; 5],
    /// Records whose IID has the EUI-64 layout, outside 6to4.
    pub eui64_outside_6to4: u64,
    pub distinct_macs: u64,
    /// Distinct addresses removed by the filter.
    pub filtered_out: u64,
    /// Distinct addresses kept.
    pub distinct_addresses: u64,
    pub distinct_64s: u64,
}

impl IngestSummary {
    pub fn tally(&self, kind: FormatKind) -> u64 {
        self.tallies[kind_index(kind)]
    }

    pub fn addrs_per_64(&self) -> f64 {
        if self.distinct_64s == 0 {
            0.0
        } else {
            self.distinct_addresses as f64 / self.distinct_64s as f64
        }
    }
}

fn kind_index(kind: FormatKind) -> usize {
    FormatKind::ALL.iter().position(|&k| k == kind).expect("kind listed in ALL")
}

impl fmt::Display for IngestSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lines_read {}", self.lines_read)?;
        writeln!(f, "records_accepted {}", self.records_accepted)?;
        writeln!(f, "parse_failures {}", self.parse_failures)?;
        writeln!(f, "duplicates_merged {}", self.duplicates_merged)?;
        writeln!(f, "total_hits {}", self.total_hits)?;
        for kind in FormatKind::ALL {
            writeln!(f, "{} {}", kind, self.tally(kind))?;
        }
        writeln!(f, "eui64_outside_6to4 {}", self.eui64_outside_6to4)?;
        writeln!(f, "distinct_macs {}", self.distinct_macs)?;
        writeln!(f, "filtered_out {}", self.filtered_out)?;
        writeln!(f, "distinct_addresses {}", self.distinct_addresses)?;
        writeln!(f, "distinct_64s {}", self.distinct_64s)?;
        writeln!(f, "addrs_per_64 {:.2}", self.addrs_per_64())
    }
}

pub struct Ingested {
    pub summary: IngestSummary,
    pub set: AddressSet,
}

/// Parses, classifies, deduplicates and filters one day's log stream.
/// `source` labels read errors.
pub fn ingest(mut input: impl BufRead, source: &str, filter: KindFilter) -> Result<Ingested> {
    let mut summary = IngestSummary::default();
    let mut addrs: Vec<Address> = Vec::new();
    let mut macs: HashSet<u64> = HashSet::new();
    let mut buf = Vec::with_capacity(64);

    loop {
        buf.clear();
        let n = input.read_until(b'\n', &mut buf).map_err(|e| Error::io(source, e))?;
        if n == 0 {
            break;
        }
        let line = String::from_utf8_lossy(&buf);
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        summary.lines_read += 1;
        let Some(rec) = LogRecord::parse(line) else {
            summary.parse_failures += 1;
            continue;
        };
        summary.records_accepted += 1;
        summary.total_hits += rec.hits;
        let class = classify_format(rec.address);
        summary.tallies[kind_index(class.kind)] += 1;
        if let Some(mac) = class.mac {
            if class.kind != FormatKind::Sixto4 {
                summary.eui64_outside_6to4 += 1;
                macs.insert(mac.to_u64());
            }
        }
        addrs.push(rec.address);
    }

    let all = AddressSet::from_unsorted(addrs);
    summary.duplicates_merged = summary.records_accepted - all.len() as u64;
    summary.distinct_macs = macs.len() as u64;

    let set = match filter {
        KindFilter::All => all,
        KindFilter::Native => {
            let before = all.len();
            let kept: Vec<Address> = all.into_iter().filter(|&a| filter.keeps(classify_format(a).kind)).collect();
            summary.filtered_out = (before - kept.len()) as u64;
            AddressSet::from_sorted(kept).expect("filtering keeps order")
        }
    };
    summary.distinct_addresses = set.len() as u64;
    summary.distinct_64s = set.map_prefix(64)?.len() as u64;
    Ok(Ingested { summary, set })
}

/// Ingests and persists a day. With `merge`, an existing day file is unioned in.
pub fn ingest_day(
    input: impl BufRead,
    source: &str,
    day: Day,
    store: &DayStore,
    filter: KindFilter,
    merge: bool,
) -> Result<IngestSummary> {
    let Ingested { summary, mut set } = ingest(input, source, filter)?;
    if merge && store.exists(day) {
        set = store.read(day)?.union(&set);
    }
    store.write(day, &set)?;
    Ok(summary)
}
