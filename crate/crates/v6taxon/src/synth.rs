//! Deterministic synthetic address populations.
//!
//! Network choices depend only on the seed. Schemes that change over time
//! (privacy IIDs, dynamic /64 assignment) also mix in the day, so
//! generating consecutive days models address churn.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use v6taxon_core::taxonomy::MacAddr;
use v6taxon_core::{Address, Day, Prefix};

use crate::error::{Error, Result};

/// IID bit carrying the universal/local flag.
const U_BIT: u64 = 1 << 57;

/// Vendor OUIs drawn for EUI-64 hosts when no MACs are given.
const OUIS: [[u8; 3]; 8] = [
    [0x00, 0x1e, 0xc2],
    [0x00, 0x11, 0x22],
    [0x00, 0x50, 0x56],
    [0x00, 0x1b, 0x63],
    [0x00, 0x0c, 0x29],
    [0x00, 0x25, 0x90],
    [0x00, 0x1a, 0xa0],
    [0x00, 0x23, 0xae],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Fixed /64s, fresh pseudorandom IIDs each day with the u-bit cleared.
    Privacy,
    /// Fixed /64s, hosts with MAC-derived IIDs.
    Eui64,
    /// Fixed /64s, hosts numbered `::1`, `::2`, ... as from a DHCPv6 pool.
    SequentialPool,
    /// A fixed IID population re-assigned to /64s from a pool every day.
    Dynamic64Pool,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "privacy" => Ok(Scheme::Privacy),
            "eui64" => Ok(Scheme::Eui64),
            "sequential-pool" => Ok(Scheme::SequentialPool),
            "dynamic-64-pool" => Ok(Scheme::Dynamic64Pool),
            other => Err(Error::Usage(format!(
                "unknown scheme {other:?} (expected privacy, eui64, sequential-pool or dynamic-64-pool)"
            ))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Privacy => "privacy",
            Scheme::Eui64 => "eui64",
            Scheme::SequentialPool => "sequential-pool",
            Scheme::Dynamic64Pool => "dynamic-64-pool",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub scheme: Scheme,
    /// Number of /64 networks (the pool size for `Dynamic64Pool`).
    pub networks: u64,
    /// Hosts per network; for `Dynamic64Pool` the population is `networks * hosts`.
    pub hosts: u64,
    pub seed: u64,
    pub day: Day,
    /// /64s are drawn inside this prefix, which must be /64 or shorter.
    pub base: Prefix,
    /// `Eui64` only: use exactly these MACs in every network instead of random ones.
    pub macs: Vec<MacAddr>,
}

impl SynthConfig {
    pub fn new(scheme: Scheme) -> Self {
        SynthConfig {
            scheme,
            networks: 1,
            hosts: 1,
            seed: 0,
            day: 0,
            base: "2001:db8::/32".parse().expect("valid default base"),
            macs: Vec::new(),
        }
    }
}

fn day_rng(seed: u64, day: Day) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(day as u64 ^ 0x5eed_0000_0000_0000);
    rng
}

/// `count` distinct /64 network numbers under `base`, ascending.
fn draw_networks(rng: &mut ChaCha8Rng, base: Prefix, count: u64) -> Result<Vec<u128>> {
    let free_bits = 64 - base.len() as u32;
    if free_bits < 64 && count > 1u64 << free_bits {
        return Err(Error::Usage(format!("{base} holds fewer than {count} /64s")));
    }
    let top = base.base().bits();
    let mut nets = std::collections::BTreeSet::new();
    while (nets.len() as u64) < count {
        let sub = if free_bits == 0 { 0 } else { rng.random::<u64>() >> (64 - free_bits) };
        nets.insert(top | (sub as u128) << 64);
    }
    Ok(nets.into_iter().collect())
}

fn random_privacy_iid(rng: &mut ChaCha8Rng) -> u64 {
    rng.random::<u64>() & !U_BIT
}

/// Addresses for one day of the configured scheme, one per host.
pub fn generate(cfg: &SynthConfig) -> Result<Box<dyn Iterator<Item = Address> + Send>> {
    if cfg.base.len() > 64 {
        return Err(Error::Usage(format!("base prefix {} is longer than /64", cfg.base)));
    }
    if cfg.networks == 0 || (cfg.hosts == 0 && cfg.macs.is_empty()) {
        return Err(Error::Usage("networks and hosts must be positive".into()));
    }
    let mut net_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let nets = draw_networks(&mut net_rng, cfg.base, cfg.networks)?;
    let hosts = cfg.hosts;

    Ok(match cfg.scheme {
        Scheme::Privacy => {
            let mut rng = day_rng(cfg.seed, cfg.day);
            Box::new(nets.into_iter().flat_map(move |net| {
                (0..hosts).map(|_| Address::from_bits(net | random_privacy_iid(&mut rng) as u128)).collect::<Vec<_>>()
            }))
        }
        Scheme::Eui64 => {
            let fixed = cfg.macs.clone();
            let mut rng = net_rng;
            Box::new(nets.into_iter().flat_map(move |net| {
                let macs: Vec<MacAddr> = if fixed.is_empty() {
                    (0..hosts)
                        .map(|_| {
                            let oui = OUIS[rng.random_range(0..OUIS.len())];
                            let nic: [u8; 3] = rng.random();
                            MacAddr([oui[0], oui[1], oui[2], nic[0], nic[1], nic[2]])
                        })
                        .collect()
                } else {
                    fixed.clone()
                };
                macs.into_iter().map(move |m| Address::from_bits(net | m.to_eui64_iid().value() as u128))
            }))
        }
        Scheme::SequentialPool => Box::new(
            nets.into_iter().flat_map(move |net| (1..=hosts).map(move |h| Address::from_bits(net | h as u128))),
        ),
        Scheme::Dynamic64Pool => {
            let population = cfg.networks.saturating_mul(hosts);
            let mut iid_rng = net_rng;
            let iids: Vec<u64> = (0..population).map(|_| random_privacy_iid(&mut iid_rng)).collect();
            let mut rng = day_rng(cfg.seed, cfg.day);
            Box::new(iids.into_iter().map(move |iid| {
                let net = nets[rng.random_range(0..nets.len())];
                Address::from_bits(net | iid as u128)
            }))
        }
    })
}

/// One address per line in canonical text form.
pub fn write_lines(cfg: &SynthConfig, out: &mut impl std::io::Write) -> Result<()> {
    for a in generate(cfg)? {
        writeln!(out, "{a}").map_err(|e| Error::io("<stdout>", e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use v6taxon_core::{classify_format, extract_mac, u_bit, FormatKind};

    fn addrs(cfg: &SynthConfig) -> Vec<Address> {
        generate(cfg).unwrap().collect()
    }

    #[test]
    fn privacy_single_host() {
        let mut cfg = SynthConfig::new(Scheme::Privacy);
        cfg.seed = 9;
        let out = addrs(&cfg);
        assert_eq!(out.len(), 1);
        assert_eq!(u_bit(out[0]), 0);
        assert!(cfg.base.contains(out[0]));
    }

    #[test]
    fn eui64_known_mac() {
        let mut cfg = SynthConfig::new(Scheme::Eui64);
        cfg.base = "2001:db8:0:1cdf::/64".parse().unwrap();
        cfg.macs = vec!["00:1e:c2:c0:11:db".parse().unwrap()];
        let out = addrs(&cfg);
        assert_eq!(out, ["2001:db8:0:1cdf:21e:c2ff:fec0:11db".parse::<Address>().unwrap()]);
    }

    #[test]
    fn eui64_macs_recoverable() {
        let mut cfg = SynthConfig::new(Scheme::Eui64);
        cfg.networks = 5;
        cfg.hosts = 40;
        for a in addrs(&cfg) {
            assert_eq!(classify_format(a).kind, FormatKind::Eui64);
            assert_eq!(u_bit(a), 1);
            assert!(extract_mac(a.iid()).is_ok());
        }
    }

    #[test]
    fn deterministic_per_seed_and_day() {
        for scheme in [Scheme::Privacy, Scheme::Eui64, Scheme::SequentialPool, Scheme::Dynamic64Pool] {
            let mut cfg = SynthConfig::new(scheme);
            cfg.networks = 4;
            cfg.hosts = 10;
            cfg.seed = 3;
            let mut a = Vec::new();
            let mut b = Vec::new();
            write_lines(&cfg, &mut a).unwrap();
            write_lines(&cfg, &mut b).unwrap();
            assert_eq!(a, b, "{scheme}");
            assert_eq!(addrs(&cfg).len(), 40, "{scheme}");
        }
    }

    #[test]
    fn churn_by_scheme() {
        let mut cfg = SynthConfig::new(Scheme::Privacy);
        cfg.networks = 3;
        cfg.hosts = 5;
        let d0 = addrs(&cfg);
        cfg.day = 1;
        let d1 = addrs(&cfg);
        assert_ne!(d0, d1);
        let nets = |v: &[Address]| v.iter().map(|a| a.bits() >> 64).collect::<std::collections::BTreeSet<_>>();
        assert_eq!(nets(&d0), nets(&d1));

        let mut pool = SynthConfig::new(Scheme::Dynamic64Pool);
        pool.networks = 50;
        pool.hosts = 2;
        let p0 = addrs(&pool);
        pool.day = 1;
        let p1 = addrs(&pool);
        let iids = |v: &[Address]| v.iter().map(|a| a.iid()).collect::<Vec<_>>();
        assert_eq!(iids(&p0), iids(&p1));
        assert_ne!(p0, p1);

        let mut seq = SynthConfig::new(Scheme::SequentialPool);
        seq.hosts = 3;
        let s0 = addrs(&seq);
        seq.day = 5;
        assert_eq!(s0, addrs(&seq));
        assert_eq!(s0[2].iid().value(), 3);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!("nope".parse::<Scheme>().is_err());
        let mut cfg = SynthConfig::new(Scheme::Privacy);
        cfg.base = "2001:db8::/120".parse().unwrap();
        assert!(generate(&cfg).is_err());
        cfg.base = "2001:db8::/63".parse().unwrap();
        cfg.networks = 3;
        assert!(generate(&cfg).is_err());
        cfg.networks = 0;
        assert!(generate(&cfg).is_err());
    }
}
