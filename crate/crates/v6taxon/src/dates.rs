//! `YYYYMMDD` day labels.

use chrono::NaiveDate;
use v6taxon_core::{Day, DayRange};

use crate::error::{Error, Result};

fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid epoch")
}

pub fn parse_day(text: &str) -> Result<Day> {
    if text.len() != 8 || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Day(text.to_string()));
    }
    let date = NaiveDate::parse_from_str(text, "%Y%m%d").map_err(|_| Error::Day(text.to_string()))?;
    Ok((date - epoch()).num_days())
}

pub fn format_day(day: Day) -> String {
    (epoch() + chrono::Duration::days(day)).format("%Y%m%d").to_string()
}

/// A single day or an inclusive `first-last` range.
pub fn parse_days(text: &str) -> Result<DayRange> {
    match text.split_once('-') {
        Some((a, b)) => DayRange::new(parse_day(a)?, parse_day(b)?).ok_or_else(|| Error::Day(text.to_string())),
        None => Ok(DayRange::single(parse_day(text)?)),
    }
}
