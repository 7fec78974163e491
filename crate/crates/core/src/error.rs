use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The text is not an IPv6 address in presentation format.
    AddressParse(String),
    /// Text of the form `<address>/<len>` could not be parsed.
    PrefixParse(String),
    /// A density class spec (`n@/p`) could not be parsed or is out of range.
    DensityClassParse(String),
    PrefixLength(u32),
    /// The interface identifier does not carry the `ff:fe` EUI-64 marker.
    NotEui64(u64),
    /// An operation that needs at least one address was given none.
    EmptySet,
    UnsupportedResolution(u8),
    /// A classification was requested for a day with no observations.
    MissingDay(i64),
    OverlappingPeriods,
    InvalidStabilityDays(u32),
    /// The number of addresses a class spans exceeds 128 bits.
    SpanOverflow(u8),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::AddressParse(s) => write!(f, "invalid IPv6 address: {s:?}"),
            Error::PrefixParse(s) => write!(f, "invalid IPv6 prefix: {s:?}"),
            Error::DensityClassParse(s) => write!(f, "invalid density class: {s:?} (expected n@/p)"),
            Error::PrefixLength(len) => write!(f, "prefix length {len} out of range 0..=128"),
            Error::NotEui64(iid) => write!(f, "interface identifier {iid:016x} is not EUI-64"),
            Error::EmptySet => f.write_str("address set is empty"),
            Error::UnsupportedResolution(k) => {
                write!(f, "unsupported resolution {k} (expected 1, 4, 8 or 16)")
            }
            Error::MissingDay(d) => write!(f, "no observations recorded for day {d}"),
            Error::OverlappingPeriods => f.write_str("observation periods overlap"),
            Error::InvalidStabilityDays(n) => write!(f, "stability class needs n >= 1, got {n}"),
            Error::SpanOverflow(p) => write!(f, "span of a /{p} prefix set overflows 128 bits"),
        }
    }
}

impl core::error::Error for Error {}
