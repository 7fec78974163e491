//! Independent oracles checked against the library routes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use v6taxon_core::taxonomy::MacAddr;
use v6taxon_core::{
    aggregate_counts, dense_fixed_length, extract_mac, population_distribution, u_bit, Address, AddressSet,
    CountingTrie, DensityClass, IidView, ObservationLog, Prefix, Ratio, StabilityClass,
};

/// Least-specific disjoint prefixes of length `p..=127` holding `>= n`
/// addresses, by counting every candidate prefix at every length.
fn brute_force_dense(addrs: &[u128], class: DensityClass) -> Vec<(u128, u8, u64)> {
    let (n, p) = (class.min_addresses(), class.prefix_len());
    let mut chosen: Vec<(u128, u8, u64)> = Vec::new();
    for len in p..=127u8 {
        let mask = if len == 0 { 0 } else { u128::MAX << (128 - len) };
        let mut counts: BTreeMap<u128, u64> = BTreeMap::new();
        for &a in addrs {
            *counts.entry(a & mask).or_default() += 1;
        }
        for (base, count) in counts {
            let covered = chosen.iter().any(|&(b, l, _)| {
                let m = if l == 0 { 0 } else { u128::MAX << (128 - l) };
                base & m == b
            });
            if count >= n && !covered {
                chosen.push((base, len, count));
            }
        }
    }
    chosen.sort();
    chosen
}

fn report_tuples(r: &v6taxon_core::DensePrefixReport) -> Vec<(u128, u8, u64)> {
    r.entries.iter().map(|e| (e.prefix.base().bits(), e.prefix.len(), e.addresses)).collect()
}

fn random_in(rng: &mut ChaCha8Rng, prefix: u128, len: u32, count: usize) -> Vec<u128> {
    let host_mask = if len == 0 { u128::MAX } else { (1u128 << (128 - len)) - 1 };
    let mut out: BTreeSet<u128> = BTreeSet::new();
    while out.len() < count {
        out.insert(prefix | (rng.random::<u128>() & host_mask));
    }
    out.into_iter().collect()
}

#[test]
fn densify_matches_brute_force_in_a_112() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd3a5e);
    for trial in 0..200 {
        let base = rng.random::<u128>() & (u128::MAX << 16);
        let size = rng.random_range(1..=256);
        let addrs = random_in(&mut rng, base, 112, size);
        let class = DensityClass::new(rng.random_range(2..=4), rng.random_range(113..=127)).unwrap();
        let want = brute_force_dense(&addrs, class);

        let set: Vec<Address> = addrs.iter().map(|&x| Address::from_bits(x)).collect();
        let trie = CountingTrie::from_addresses(&set);
        assert_eq!(report_tuples(&trie.dense_prefixes(class)), want, "trial {trial} {class}");
        assert_eq!(report_tuples(&trie.densify(class).report()), want, "trial {trial} {class}");
    }
}

#[test]
fn hundred_addresses_in_one_120() {
    let mut rng = ChaCha8Rng::seed_from_u64(120);
    let base = 0x2001_0db8_0000_0000_0000_0000_0000_0000u128 | 0xab00;
    let addrs = random_in(&mut rng, base, 120, 100);
    let class: DensityClass = "2@/120".parse().unwrap();
    let want = brute_force_dense(&addrs, class);
    assert_eq!(want, vec![(base, 120, 100)]);

    let set: Vec<Address> = addrs.iter().map(|&x| Address::from_bits(x)).collect();
    let report = CountingTrie::from_addresses(&set).densify(class).report();
    assert_eq!(report.to_string(), "2001:db8::ab00/120 100\n");
}

/// `printf '%032x\n' | sort | cut -c1-$((p/4)) | uniq -c`, with the `>= n` filter.
fn sort_cut_uniq(addrs: &[u128], class: DensityClass) -> Vec<(String, u64)> {
    let mut lines: Vec<String> = addrs.iter().map(|a| format!("{a:032x}")).collect();
    lines.sort();
    let width = class.prefix_len() as usize / 4;
    let mut out: Vec<(String, u64)> = Vec::new();
    for l in lines {
        let head = l[..width].to_string();
        match out.last_mut() {
            Some((h, c)) if *h == head => *c += 1,
            _ => out.push((head, 1)),
        }
    }
    out.retain(|&(_, c)| c >= class.min_addresses());
    out
}

#[test]
fn fixed_length_matches_text_pipeline() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let base = rng.random::<u128>() & (u128::MAX << 24);
        let size = rng.random_range(1..400);
        let addrs = random_in(&mut rng, base, 104, size);
        let p = 4 * rng.random_range(26..=31u8);
        let class = DensityClass::new(rng.random_range(1..=5), p).unwrap();
        let set: AddressSet = addrs.iter().map(|&x| Address::from_bits(x)).collect();
        let got: Vec<(String, u64)> = dense_fixed_length(&set, class)
            .entries
            .iter()
            .map(|e| (e.prefix.base().to_fixed_hex()[..p as usize / 4].to_string(), e.addresses))
            .collect();
        assert_eq!(got, sort_cut_uniq(&addrs, class));
    }
}

#[test]
fn aggregate_counts_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..30 {
        let len = rng.random_range(0..=120u32);
        let base = if len == 0 { 0 } else { rng.random::<u128>() & (u128::MAX << (128 - len)) };
        let size = rng.random_range(1..500);
        let addrs = random_in(&mut rng, base, len, size);
        let set: AddressSet = addrs.iter().map(|&x| Address::from_bits(x)).collect();
        let sorted = aggregate_counts(&set).unwrap();
        let via_trie = CountingTrie::from_addresses(&set).aggregate_counts().unwrap();
        assert_eq!(sorted, via_trie);
        for p in 0..=128u8 {
            let distinct: BTreeSet<Prefix> = set.iter().map(|&a| Prefix::new(a, p).unwrap()).collect();
            assert_eq!(sorted.get(p), distinct.len() as u64, "p={p}");
        }
    }
}

/// MAC to modified EUI-64 by shifting whole fields of a u64.
fn eui64_encode(mac: u64) -> u64 {
    let oui = mac >> 24;
    let nic = mac & 0xff_ffff;
    ((oui << 40) | (0xfffe << 24) | nic) ^ (1 << 57)
}

#[test]
fn eui64_encoder_oracle() {
    assert_eq!(eui64_encode(0x001e_c2c0_11db), 0x021e_c2ff_fec0_11db);
    let mut rng = ChaCha8Rng::seed_from_u64(48);
    for _ in 0..10_000 {
        let mac = rng.random::<u64>() & 0xffff_ffff_ffff;
        let iid = IidView::new(eui64_encode(mac));
        assert_eq!(extract_mac(iid).unwrap().to_u64(), mac);
        assert_eq!(MacAddr::from_u64(mac).to_eui64_iid(), iid);
        // u-bit of the address is the inverted universal/local bit of the MAC
        let addr = Address::from_bits(0x2001_0db8u128 << 96 | iid.value() as u128);
        assert_eq!(u_bit(addr), 1 - ((mac >> 41) & 1) as u8);
    }
}

#[test]
fn population_ccdf_matches_hash_grouping() {
    let mut rng = ChaCha8Rng::seed_from_u64(4864);
    let site = 0x2001_0db8_0042u128 << 80;
    let addrs: AddressSet = (0..10_000)
        .map(|_| {
            let subnet = (rng.random::<u16>() as u128 & 0x3ff) << 64;
            Address::from_bits(site | subnet | rng.random::<u64>() as u128)
        })
        .collect();
    let dist = population_distribution(&addrs, 64).unwrap();

    let mut groups: HashMap<u128, u64> = HashMap::new();
    for a in &addrs {
        *groups.entry(a.bits() >> 64).or_default() += 1;
    }
    let total = groups.len() as u64;
    assert_eq!(dist.active_prefixes(), total);
    let max = *groups.values().max().unwrap();
    for x in 1..=max + 1 {
        let at_least = groups.values().filter(|&&c| c >= x).count() as u64;
        assert_eq!(dist.ccdf_at(x), Ratio::new(at_least, total), "x={x}");
    }
    let pops: u64 = dist.populations.iter().map(|&(_, c)| c).sum();
    assert_eq!(pops, 10_000);
}

#[test]
fn weekly_gap_of_four_days() {
    let week_start = 16511;
    let x = Address::from_bits(1);
    let mut log = ObservationLog::new();
    for d in week_start - 7..week_start + 14 {
        log.record_day(d, [Address::from_bits(2)]);
    }
    log.record_day(week_start + 1, [x]);
    log.record_day(week_start + 5, [x]);
    for n in 1..=8 {
        let w = log.weekly_unique_stable(week_start, &StabilityClass::new(n).unwrap()).unwrap();
        assert_eq!(w.stable.contains(&x), n <= 4, "n={n}");
        assert_eq!(w.not_stable.contains(&x), n > 4, "n={n}");
    }
}
