use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use v6taxon::dates::{format_day, parse_day, parse_days};
use v6taxon::dayfile::DayStore;
use v6taxon::ingest::{ingest_day, KindFilter};
use v6taxon::render;
use v6taxon::synth::{self, Scheme, SynthConfig};
use v6taxon::{Error, Result};
use v6taxon_core::spatial::AggregateCounts;
use v6taxon_core::taxonomy::MacAddr;
use v6taxon_core::{
    classify_format, dense_fixed_length, density_report, mra_ratios, population_distribution, privacy_signature_check,
    Address, AddressSet, CountingTrie, Day, DayRange, DensityClass, Prefix, Resolution, SignatureThresholds,
    StabilityClass, Window,
};

#[derive(Parser)]
#[command(name = "v6taxon", version, about = "Temporal and spatial classification of active IPv6 addresses")]
struct Cli {
    /// Directory holding YYYYMMDD.addrset day files.
    #[arg(long, global = true, default_value = ".")]
    data_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a day's log and store its address set.
    Ingest(IngestArgs),
    /// Classify addresses by format (Teredo, 6to4, ISATAP, EUI-64, other).
    Taxonomy(TaxonomyArgs),
    /// Count nd-stable addresses or prefixes.
    Stability(StabilityArgs),
    /// Multi-resolution aggregate count ratios.
    Mra(MraArgs),
    /// Dense prefixes for one or more density classes.
    Densify(DensifyArgs),
    /// Distribution of address counts per aggregate prefix.
    Popdist(PopdistArgs),
    /// Emit a synthetic address log.
    Synth(SynthArgs),
}

fn day_arg(s: &str) -> std::result::Result<Day, String> {
    parse_day(s).map_err(|e| e.to_string())
}

fn days_arg(s: &str) -> std::result::Result<DayRange, String> {
    parse_days(s).map_err(|e| e.to_string())
}

fn class_arg(s: &str) -> std::result::Result<DensityClass, String> {
    s.parse().map_err(|e: v6taxon_core::Error| e.to_string())
}

fn k_arg(s: &str) -> std::result::Result<Resolution, String> {
    let k: u8 = s.parse().map_err(|_| format!("invalid resolution {s:?}"))?;
    Resolution::try_from(k).map_err(|e| e.to_string())
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long, value_parser = day_arg)]
    day: Day,
    /// Log file, `-` for stdin.
    #[arg(long, default_value = "-")]
    input: PathBuf,
    /// Drop Teredo, 6to4 and ISATAP addresses.
    #[arg(long)]
    native_only: bool,
    /// Overwrite an existing day file instead of merging into it.
    #[arg(long)]
    replace: bool,
}

#[derive(Args)]
struct TaxonomyArgs {
    #[arg(long, default_value = "-")]
    input: PathBuf,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["ref_day", "week", "period_a"]))]
struct StabilityArgs {
    /// Classify addresses active on this day.
    #[arg(long, value_parser = day_arg)]
    ref_day: Option<Day>,
    /// Union over seven reference days starting here.
    #[arg(long, value_parser = day_arg)]
    week: Option<Day>,
    /// First period for cross-epoch stability.
    #[arg(long, value_parser = days_arg, requires = "period_b")]
    period_a: Option<DayRange>,
    #[arg(long, value_parser = days_arg, requires = "period_a")]
    period_b: Option<DayRange>,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    #[arg(long, default_value_t = 7)]
    before: u32,
    #[arg(long, default_value_t = 7)]
    after: u32,
    /// 0 classifies full addresses, 64 classifies /64 prefixes.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=128))]
    prefix_len: u8,
    /// Accept day separations this much shorter than n.
    #[arg(long, default_value_t = 0)]
    slew_tolerance: u32,
    /// List the stable members after the count line.
    #[arg(long)]
    members: bool,
    /// Treat window days without a day file as empty.
    #[arg(long)]
    allow_missing: bool,
}

#[derive(Args)]
struct MraArgs {
    #[arg(long, value_parser = days_arg)]
    days: DayRange,
    /// Resolutions in bits, from 1, 4, 8, 16.
    #[arg(long, value_parser = k_arg, value_delimiter = ',', default_value = "1,4,16")]
    k: Vec<Resolution>,
    /// Also write a plot of the series.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Append the privacy-address signature verdict as comment lines.
    #[arg(long)]
    check_privacy: bool,
    /// Emit one series per prefix of this length.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=128), conflicts_with_all = ["svg", "check_privacy"])]
    partition_len: Option<u8>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args)]
struct DensifyArgs {
    #[arg(long, value_parser = days_arg)]
    days: DayRange,
    /// Density class such as 2@112 or 2@/112; repeatable.
    #[arg(long = "class", value_parser = class_arg, required = true)]
    classes: Vec<DensityClass>,
    /// Report every length-p prefix with at least n addresses rather than
    /// least-specific aggregates.
    #[arg(long)]
    fixed_length: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Density summary per class (fixed-length) as CSV.
    #[arg(long, conflicts_with_all = ["fixed_length", "format"])]
    table: bool,
}

#[derive(Args)]
struct PopdistArgs {
    #[arg(long, value_parser = days_arg)]
    days: DayRange,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u8).range(0..=128))]
    p: u8,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    scheme: Scheme,
    #[arg(long, default_value_t = 1)]
    networks: u64,
    #[arg(long, default_value_t = 1)]
    hosts: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = day_arg, default_value = "19700101")]
    day: Day,
    /// /64s are drawn inside this prefix.
    #[arg(long, default_value = "2001:db8::/32")]
    base: Prefix,
    /// eui64 only: fixed MAC for every network; repeatable.
    #[arg(long = "mac")]
    macs: Vec<MacAddr>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out).and_then(|()| out.flush().map_err(stdout_err));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("v6taxon: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn stdout_err(e: io::Error) -> Error {
    Error::Io { path: "<stdout>".into(), source: e }
}

fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    let store = DayStore::new(&cli.data_dir);
    match cli.command {
        Command::Ingest(a) => cmd_ingest(&store, a, out),
        Command::Taxonomy(a) => cmd_taxonomy(a, out),
        Command::Stability(a) => cmd_stability(&store, a, out),
        Command::Mra(a) => cmd_mra(&store, a, out),
        Command::Densify(a) => cmd_densify(&store, a, out),
        Command::Popdist(a) => cmd_popdist(&store, a, out),
        Command::Synth(a) => cmd_synth(a, out),
    }
}

fn open_input(path: &Path) -> Result<Box<dyn BufRead>> {
    if path == Path::new("-") {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let f = File::open(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
    Ok(Box::new(BufReader::with_capacity(1 << 16, f)))
}

fn cmd_ingest(store: &DayStore, a: IngestArgs, out: &mut impl Write) -> Result<()> {
    let filter = if a.native_only { KindFilter::Native } else { KindFilter::All };
    let input = open_input(&a.input)?;
    let source = a.input.display().to_string();
    let summary = ingest_day(input, &source, a.day, store, filter, !a.replace)?;
    writeln!(out, "day {}", format_day(a.day)).map_err(stdout_err)?;
    write!(out, "{summary}").map_err(stdout_err)
}

fn cmd_taxonomy(a: TaxonomyArgs, out: &mut impl Write) -> Result<()> {
    let input = open_input(&a.input)?;
    render::taxonomy_header(out).map_err(stdout_err)?;
    let mut failures = 0u64;
    for line in input.lines() {
        let line = line.map_err(|e| Error::Io { path: a.input.clone(), source: e })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let text = line.split_once(',').map_or(line, |(addr, _)| addr.trim());
        match Address::parse(text) {
            Ok(addr) => render::taxonomy_row(out, addr, &classify_format(addr)).map_err(stdout_err)?,
            Err(_) => failures += 1,
        }
    }
    if failures > 0 {
        eprintln!("v6taxon: skipped {failures} unparseable lines");
    }
    Ok(())
}

fn cmd_stability(store: &DayStore, a: StabilityArgs, out: &mut impl Write) -> Result<()> {
    let unit = if a.prefix_len == 0 || a.prefix_len == 128 {
        "addresses".to_string()
    } else {
        format!("/{} prefixes", a.prefix_len)
    };
    let generalize = |log: v6taxon_core::ObservationLog| -> Result<_> {
        Ok(match a.prefix_len {
            0 | 128 => log,
            len => log.map_prefix(len)?,
        })
    };

    let (line, members) = if let (Some(pa), Some(pb)) = (a.period_a, a.period_b) {
        if pa.overlaps(&pb) {
            return Err(Error::Usage("--period-a and --period-b overlap".into()));
        }
        let mut log = store.load_log(pa, a.allow_missing)?;
        for (day, set) in store.load_log(pb, a.allow_missing)?.days() {
            log.record_set(day, set.clone());
        }
        let log = generalize(log)?;
        let stable = log.stable_across(pa, pb)?;
        (format!("stable across {} and {}: {} {unit}", range_text(pa), range_text(pb), stable.len()), stable)
    } else {
        let window = Window { before: a.before, after: a.after };
        let class = StabilityClass::with_window(a.n, Some(window))?.with_slew_tolerance(a.slew_tolerance);
        if let Some(first) = a.week {
            let span = DayRange { first: first - a.before as i64, last: first + 6 + a.after as i64 };
            let log = generalize(store.load_log(span, a.allow_missing)?)?;
            let weekly = log.weekly_unique_stable(first, &class)?;
            let week = DayRange { first, last: first + 6 };
            let line = format!(
                "{class} week of {}: {} stable, {} not stable {unit}",
                range_text(week),
                weekly.stable.len(),
                weekly.not_stable.len()
            );
            (line, weekly.stable)
        } else {
            let day = a.ref_day.expect("clap requires one mode");
            if !store.exists(day) {
                return Err(Error::MissingDayFile(store.path_for(day)));
            }
            let log = generalize(store.load_log(window.span(day), a.allow_missing)?)?;
            let active = log.day(day).map_or(0, AddressSet::len);
            let stable = log.nd_stable(day, &class)?;
            (format!("{class} on {}: {} of {active} active {unit}", format_day(day), stable.len()), stable)
        }
    };

    writeln!(out, "{line}").map_err(stdout_err)?;
    if a.members {
        for m in &members {
            if matches!(a.prefix_len, 0 | 128) {
                writeln!(out, "{m}")
            } else {
                writeln!(out, "{}", Prefix::new(*m, a.prefix_len)?)
            }
            .map_err(stdout_err)?;
        }
    }
    Ok(())
}

fn range_text(r: DayRange) -> String {
    if r.first == r.last {
        format_day(r.first)
    } else {
        format!("{}-{}", format_day(r.first), format_day(r.last))
    }
}

fn cmd_mra(store: &DayStore, a: MraArgs, out: &mut impl Write) -> Result<()> {
    let set = store.load_union(a.days)?;
    if let Some(len) = a.partition_len {
        render::mra_header(out, true).map_err(stdout_err)?;
        for part in set.map_prefix(len)? {
            let part = Prefix::new(part, len)?;
            let counts = AggregateCounts::from_sorted_slice(set.within(part))?;
            for &k in &a.k {
                render::mra_rows(out, &mra_ratios(&counts, k), Some(part)).map_err(stdout_err)?;
            }
        }
        return Ok(());
    }

    let counts = AggregateCounts::from_set(&set)?;
    let series: Vec<_> = a.k.iter().map(|&k| mra_ratios(&counts, k)).collect();
    render::mra_header(out, false).map_err(stdout_err)?;
    for s in &series {
        render::mra_rows(out, s, None).map_err(stdout_err)?;
    }
    for s in &series {
        render::mra_footer(out, s, set.len() as u64).map_err(stdout_err)?;
    }
    if a.check_privacy {
        let check = privacy_signature_check(&counts, &SignatureThresholds::default());
        let verdict = if check.is_consistent() { "consistent" } else { "inconsistent" };
        writeln!(out, "# privacy-signature {verdict}").map_err(stdout_err)?;
        for f in &check.failures {
            writeln!(out, "# {f}").map_err(stdout_err)?;
        }
    }
    if let Some(path) = a.svg {
        let title = format!("MRA {} ({} addresses)", range_text(a.days), set.len());
        let f = File::create(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
        let mut w = BufWriter::new(f);
        render::mra_svg(&mut w, &series, &title).and_then(|()| w.flush()).map_err(|e| Error::Io { path, source: e })?;
    }
    Ok(())
}

fn cmd_densify(store: &DayStore, a: DensifyArgs, out: &mut impl Write) -> Result<()> {
    let set = store.load_union(a.days)?;
    if a.table {
        render::density_table_header(out).map_err(stdout_err)?;
        for row in density_report(&set, &a.classes)? {
            render::density_table_row(out, &row).map_err(stdout_err)?;
        }
        return Ok(());
    }

    let trie = (!a.fixed_length).then(|| CountingTrie::from_addresses(&set));
    if let Format::Csv = a.format {
        render::dense_csv_header(out).map_err(stdout_err)?;
    }
    let several = a.classes.len() > 1;
    for &class in &a.classes {
        let report = match &trie {
            Some(t) => t.dense_prefixes(class),
            None => dense_fixed_length(&set, class),
        };
        match a.format {
            Format::Text => {
                if several {
                    writeln!(out, "# {class}").map_err(stdout_err)?;
                }
                render::dense_text(out, &report)
            }
            Format::Csv => render::dense_csv_rows(out, &report),
        }
        .map_err(stdout_err)?;
    }
    Ok(())
}

fn cmd_popdist(store: &DayStore, a: PopdistArgs, out: &mut impl Write) -> Result<()> {
    let set = store.load_union(a.days)?;
    let dist = population_distribution(&set, a.p)?;
    render::popdist_header(out).map_err(stdout_err)?;
    render::popdist_rows(out, &dist).map_err(stdout_err)
}

fn cmd_synth(a: SynthArgs, out: &mut impl Write) -> Result<()> {
    let cfg = SynthConfig {
        scheme: a.scheme,
        networks: a.networks,
        hosts: a.hosts,
        seed: a.seed,
        day: a.day,
        base: a.base,
        macs: a.macs,
    };
    synth::write_lines(&cfg, out)
}
