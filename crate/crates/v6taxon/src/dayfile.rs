//! Per-day address sets on disk.
//!
//! A day file is named `YYYYMMDD.addrset` and holds the day's addresses as
//! concatenated 16-byte big-endian values, strictly ascending, with no header.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use v6taxon_core::{Address, AddressSet, Day, DayRange, ObservationLog};

use crate::dates::format_day;
use crate::error::{Error, Result};

pub const RECORD_LEN: usize = 16;
pub const EXTENSION: &str = "addrset";

pub fn encode(set: &AddressSet) -> Vec<u8> {
    let mut out = Vec::with_capacity(set.len() * RECORD_LEN);
    for a in set {
        out.extend_from_slice(&a.octets());
    }
    out
}

/// Decodes and validates day-file bytes; the reason string names the first defect.
pub fn decode(bytes: &[u8]) -> std::result::Result<AddressSet, String> {
    if !bytes.len().is_multiple_of(RECORD_LEN) {
        return Err(format!("length {} is not a multiple of {RECORD_LEN}", bytes.len()));
    }
    let addrs: Vec<Address> =
        bytes.chunks_exact(RECORD_LEN).map(|c| Address::from_octets(c.try_into().expect("16-byte chunk"))).collect();
    AddressSet::from_sorted(addrs).map_err(|addrs| {
        let at = addrs.windows(2).position(|w| w[0] >= w[1]).unwrap_or(0) + 1;
        format!("record {at} is not strictly greater than its predecessor")
    })
}

/// A directory of day files.
#[derive(Clone, Debug)]
pub struct DayStore {
    dir: PathBuf,
}

impl DayStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        DayStore { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, day: Day) -> PathBuf {
        self.dir.join(format!("{}.{EXTENSION}", format_day(day)))
    }

    pub fn exists(&self, day: Day) -> bool {
        self.path_for(day).is_file()
    }

    /// Writes through a temporary file and renames it into place.
    pub fn write(&self, day: Day, set: &AddressSet) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let path = self.path_for(day);
        let tmp = path.with_extension(format!("{EXTENSION}.tmp"));
        let write = || -> io::Result<()> {
            let mut f = io::BufWriter::new(fs::File::create(&tmp)?);
            for a in set {
                f.write_all(&a.octets())?;
            }
            f.into_inner().map_err(|e| e.into_error())?.sync_all()?;
            fs::rename(&tmp, &path)
        };
        write().map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn read(&self, day: Day) -> Result<AddressSet> {
        let path = self.path_for(day);
        let bytes = fs::read(&path).map_err(|e| match e.kind() {
            io::ErrorKind::NotFound => Error::MissingDayFile(path.clone()),
            _ => Error::io(&path, e),
        })?;
        decode(&bytes).map_err(|reason| Error::CorruptDayFile { path, reason })
    }

    /// Days in `range`; missing files are an error unless `allow_missing`.
    pub fn load_log(&self, range: DayRange, allow_missing: bool) -> Result<ObservationLog> {
        let mut log = ObservationLog::new();
        for day in range.days() {
            match self.read(day) {
                Ok(set) => log.record_set(day, set),
                Err(Error::MissingDayFile(_)) if allow_missing => {}
                Err(e) => return Err(e),
            }
        }
        Ok(log)
    }

    /// Union of every day in `range`; all files must exist.
    pub fn load_union(&self, range: DayRange) -> Result<AddressSet> {
        let mut acc = AddressSet::new();
        for day in range.days() {
            let set = self.read(day)?;
            acc = if acc.is_empty() { set } else { acc.union(&set) };
        }
        Ok(acc)
    }
}
