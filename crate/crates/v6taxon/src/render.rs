//! CSV, text and SVG emitters. CSV output uses `,` and `.` regardless of locale.

use std::io::{self, Write};

use v6taxon_core::spatial::{DecimalFraction, MraSeries, PopulationDistribution};
use v6taxon_core::{Address, DensePrefixReport, DensityReportRow, FormatClass, Prefix, Ratio};

/// Decimal places used for density columns.
pub const DENSITY_PLACES: u32 = 10;

pub fn taxonomy_header(out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "address,kind,embedded_ipv4,mac")
}

pub fn taxonomy_row(out: &mut impl Write, addr: Address, class: &FormatClass) -> io::Result<()> {
    let ipv4 = class.embedded_ipv4.map(|v| v.to_string()).unwrap_or_default();
    let mac = class.mac.map(|m| m.to_string()).unwrap_or_default();
    writeln!(out, "{addr},{},{ipv4},{mac}", class.kind)
}

pub fn mra_header(out: &mut impl Write, partitioned: bool) -> io::Result<()> {
    if partitioned {
        write!(out, "partition,")?;
    }
    writeln!(out, "k,p,n_p,n_p_plus_k,ratio")
}

pub fn mra_rows(out: &mut impl Write, series: &MraSeries, partition: Option<Prefix>) -> io::Result<()> {
    for pt in &series.points {
        if let Some(part) = partition {
            write!(out, "{part},")?;
        }
        writeln!(out, "{},{},{},{},{:.6}", series.k.bits(), pt.p, pt.n_p, pt.n_p_plus_k, pt.ratio_f64())?;
    }
    Ok(())
}

pub fn mra_footer(out: &mut impl Write, series: &MraSeries, distinct: u64) -> io::Result<()> {
    writeln!(out, "# k={} product={} distinct={distinct}", series.k.bits(), ratio_text(series.product()))
}

fn ratio_text(r: Ratio<u64>) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `<prefix>/<len> <count>` per line.
pub fn dense_text(out: &mut impl Write, report: &DensePrefixReport) -> io::Result<()> {
    write!(out, "{report}")
}

pub fn dense_csv_header(out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "class,prefix,len,count,span,density")
}

/// Rows of `class,prefix,len,count,span,density` with span `2^(128-len)`.
pub fn dense_csv_rows(out: &mut impl Write, report: &DensePrefixReport) -> io::Result<()> {
    for e in &report.entries {
        let len = e.prefix.len();
        let (span, density) = if len == 0 {
            // 2^128 does not fit in u128; count / 2^128 < 10^-19
            ("340282366920938463463374607431768211456".to_string(), zero_decimal())
        } else {
            let span = 1u128 << (128 - len);
            let d = DecimalFraction::from_ratio(Ratio::new(e.addresses as u128, span), DENSITY_PLACES);
            (span.to_string(), d.to_string())
        };
        writeln!(out, "{},{},{len},{},{span},{density}", report.class, e.prefix.base(), e.addresses)?;
    }
    Ok(())
}

fn zero_decimal() -> String {
    format!("0.{}", "0".repeat(DENSITY_PLACES as usize))
}

pub fn density_table_header(out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "density_class,dense_prefixes,addresses,possible_addresses,density")
}

/// Density left empty for classes with no dense prefix.
pub fn density_table_row(out: &mut impl Write, row: &DensityReportRow) -> io::Result<()> {
    let density = row.density_decimal(DENSITY_PLACES).map(|d| d.to_string()).unwrap_or_default();
    writeln!(
        out,
        "{},{},{},{},{density}",
        row.class, row.dense_prefixes, row.contained_addresses, row.possible_addresses
    )
}

pub fn popdist_header(out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "p,population,prefixes_at_least,active_prefixes,ccdf")
}

pub fn popdist_rows(out: &mut impl Write, dist: &PopulationDistribution) -> io::Result<()> {
    let total = dist.active_prefixes();
    for pt in &dist.ccdf {
        writeln!(
            out,
            "{},{},{},{total},{:.10}",
            dist.aggregate_length,
            pt.population,
            pt.prefixes_at_least,
            pt.prefixes_at_least as f64 / total as f64
        )?;
    }
    Ok(())
}

fn series_colour(k: u8) -> &'static str {
    match k {
        1 => "#1f4fd1",
        4 => "#000000",
        8 => "#2a9d3a",
        _ => "#d12b1f",
    }
}

fn series_label(k: u8) -> String {
    match k {
        1 => "single bits".into(),
        4 => "nybbles".into(),
        8 => "bytes".into(),
        16 => "16-bit segments".into(),
        k => format!("{k}-bit"),
    }
}

/// MRA plot: ratio against `p` on a log-2 y axis spanning `[1, 2^16]`, one
/// polyline per resolution.
pub fn mra_svg(out: &mut impl Write, series: &[MraSeries], title: &str) -> io::Result<()> {
    const W: f64 = 760.0;
    const H: f64 = 420.0;
    const LEFT: f64 = 60.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 50.0;
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let x = |p: f64| LEFT + pw * p / 128.0;
    let y = |ratio: f64| TOP + ph * (1.0 - ratio.max(1.0).log2() / 16.0);

    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    )?;
    writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#)?;
    writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#, W / 2.0, xml_escape(title))?;

    for exp in [0u32, 1, 2, 4, 8, 12, 16] {
        let yy = y(2f64.powi(exp as i32));
        writeln!(out, r##"<line x1="{LEFT}" y1="{yy:.1}" x2="{:.1}" y2="{yy:.1}" stroke="#dddddd"/>"##, LEFT + pw)?;
        writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, LEFT - 6.0, yy + 4.0, 1u64 << exp)?;
    }
    for p in (0..=128).step_by(16) {
        let xx = x(p as f64);
        writeln!(out, r##"<line x1="{xx:.1}" y1="{TOP}" x2="{xx:.1}" y2="{:.1}" stroke="#dddddd"/>"##, TOP + ph)?;
        writeln!(out, r#"<text x="{xx:.1}" y="{:.1}" text-anchor="middle">{p}</text>"#, TOP + ph + 16.0)?;
    }
    writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">prefix length p</text>"#,
        LEFT + pw / 2.0,
        H - 12.0
    )?;
    writeln!(
        out,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">aggregate count ratio</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    )?;
    writeln!(out, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#)?;

    for (i, s) in series.iter().enumerate() {
        let k = s.k.bits();
        let colour = series_colour(k);
        let points: Vec<String> =
            s.points.iter().map(|pt| format!("{:.1},{:.1}", x(pt.p as f64), y(pt.ratio_f64()))).collect();
        writeln!(out, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, points.join(" "))?;
        let ly = TOP + 14.0 + 14.0 * i as f64;
        writeln!(
            out,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{colour}" stroke-width="2"/>"#,
            LEFT + pw - 150.0,
            LEFT + pw - 130.0
        )?;
        writeln!(out, r#"<text x="{:.1}" y="{:.1}">{} (k={k})</text>"#, LEFT + pw - 125.0, ly + 4.0, series_label(k))?;
    }
    writeln!(out, "</svg>")
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
