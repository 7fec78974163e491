//! Standards-defined address formats: transition mechanisms and EUI-64 IIDs.

use core::fmt;
use core::net::Ipv4Addr;
use core::str::FromStr;

use alloc::string::ToString;

use crate::addr::{Address, IidView, Prefix};
use crate::error::{Error, Result};

pub const TEREDO: Prefix = Prefix::new_unchecked(Address::from_bits(0x2001_0000 << 96), 32);
pub const SIXTO4: Prefix = Prefix::new_unchecked(Address::from_bits(0x2002 << 112), 16);

const ISATAP_MARKERS: [u64; 2] = [0x0000_5efe, 0x0200_5efe];
const U_BIT_IN_FIRST_OCTET: u8 = 0x02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FormatKind {
    Teredo,
    Sixto4,
    Isatap,
    Eui64,
    Other,
}

impl FormatKind {
    pub const ALL: [FormatKind; 5] =
        [FormatKind::Teredo, FormatKind::Sixto4, FormatKind::Isatap, FormatKind::Eui64, FormatKind::Other];

    pub const fn as_str(self) -> &'static str {
        match self {
            FormatKind::Teredo => "teredo",
            FormatKind::Sixto4 => "6to4",
            FormatKind::Isatap => "isatap",
            FormatKind::Eui64 => "eui64",
            FormatKind::Other => "other",
        }
    }

    /// Teredo, 6to4 and ISATAP carry IPv6 over IPv4 and are usually culled
    /// before analysis of native addresses.
    pub const fn is_transition(self) -> bool {
        matches!(self, FormatKind::Teredo | FormatKind::Sixto4 | FormatKind::Isatap)
    }
}

impl fmt::Display for FormatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A 48-bit IEEE MAC address.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MacAddr(pub [u8; 6]);

impl MacAddr {
    pub const fn from_u64(v: u64) -> Self {
        let b = v.to_be_bytes();
        MacAddr([b[2], b[3], b[4], b[5], b[6], b[7]])
    }

    pub const fn to_u64(self) -> u64 {
        let m = self.0;
        u64::from_be_bytes([0, 0, m[0], m[1], m[2], m[3], m[4], m[5]])
    }

    /// Modified EUI-64 interface identifier: `ff:fe` spliced between the OUI
    /// and the NIC bytes, universal/local bit inverted.
    pub const fn to_eui64_iid(self) -> IidView {
        let m = self.0;
        IidView::new(u64::from_be_bytes([m[0] ^ U_BIT_IN_FIRST_OCTET, m[1], m[2], 0xff, 0xfe, m[3], m[4], m[5]]))
    }
}

impl fmt::Display for MacAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.0;
        write!(f, "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}", m[0], m[1], m[2], m[3], m[4], m[5])
    }
}

impl fmt::Debug for MacAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for MacAddr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::AddressParse(s.to_string());
        let mut out = [0u8; 6];
        let mut parts = s.split([':', '-']);
        for slot in out.iter_mut() {
            let part = parts.next().ok_or_else(bad)?;
            if part.len() != 2 {
                return Err(bad());
            }
            *slot = u8::from_str_radix(part, 16).map_err(|_| bad())?;
        }
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(MacAddr(out))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormatClass {
    pub kind: FormatKind,
    pub embedded_ipv4: Option<Ipv4Addr>,
    /// Present whenever the IID has the EUI-64 layout, including inside a
    /// transition prefix.
    pub mac: Option<MacAddr>,
}

impl FormatClass {
    pub fn has_eui64_iid(&self) -> bool {
        self.mac.is_some()
    }
}

pub fn is_eui64_iid(iid: IidView) -> bool {
    let o = iid.octets();
    o[3] == 0xff && o[4] == 0xfe
}

/// Recovers the MAC from a modified EUI-64 IID.
pub fn extract_mac(iid: IidView) -> Result<MacAddr> {
    if !is_eui64_iid(iid) {
        return Err(Error::NotEui64(iid.value()));
    }
    let o = iid.octets();
    Ok(MacAddr([o[0] ^ U_BIT_IN_FIRST_OCTET, o[1], o[2], o[5], o[6], o[7]]))
}

/// Address bit 70: the universal/local bit of the IID.
pub const fn u_bit(addr: Address) -> u8 {
    addr.bit(70)
}

/// Classifies by precedence Teredo, 6to4, ISATAP, EUI-64, Other.
pub fn classify_format(addr: Address) -> FormatClass {
    let bits = addr.bits();
    let iid = addr.iid();
    let mac = extract_mac(iid).ok();

    if TEREDO.contains(addr) {
        // client IPv4 is stored bit-inverted in the low 32 bits
        let client = !(bits as u32);
        return FormatClass { kind: FormatKind::Teredo, embedded_ipv4: Some(Ipv4Addr::from_bits(client)), mac };
    }
    if SIXTO4.contains(addr) {
        return FormatClass {
            kind: FormatKind::Sixto4,
            embedded_ipv4: Some(Ipv4Addr::from_bits((bits >> 80) as u32)),
            mac,
        };
    }
    if ISATAP_MARKERS.contains(&(iid.value() >> 32)) {
        return FormatClass { kind: FormatKind::Isatap, embedded_ipv4: Some(Ipv4Addr::from_bits(bits as u32)), mac };
    }
    FormatClass { kind: if mac.is_some() { FormatKind::Eui64 } else { FormatKind::Other }, embedded_ipv4: None, mac }
}
