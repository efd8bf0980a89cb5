//! CSV tables for the sweeps.
//!
//! Numbers are written with 12 significant digits in the style of C's `%g`:
//! fixed notation for decimal exponents in `[-5, 12)`, scientific otherwise,
//! trailing zeros removed. A value read back from such a field formats to the
//! same text, so parsing a table and writing it again reproduces it byte for
//! byte.

use std::io::{Read, Write};

use anyhow::{anyhow, bail, Context, Result};
use irc_core::ef::BiScenario;
use irc_core::scenario::{CompressionCell, MapCell, Protocol};

/// Significant digits of every number in a table.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` with `digits` significant digits, `%g` style.
pub fn format_g(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let p = digits.max(1);
    // The exponent after rounding to `p` digits decides the notation.
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn num(x: f64) -> String {
    format_g(x, SIGNIFICANT_DIGITS)
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn parse_num(field: &str, what: &str) -> Result<f64> {
    field
        .parse()
        .with_context(|| format!("column {what}: not a number: {field:?}"))
}

fn parse_opt_num(field: &str, what: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_num(field, what).map(Some)
    }
}

fn parse_scenario(field: &str) -> Result<Option<BiScenario>> {
    if field.is_empty() {
        return Ok(None);
    }
    BiScenario::from_tag(field)
        .map(Some)
        .ok_or_else(|| anyhow!("column bl_scenario: unknown tag {field:?}"))
}

fn parse_protocol(field: &str) -> Result<Protocol> {
    Protocol::from_tag(field).ok_or_else(|| anyhow!("column winner: unknown protocol {field:?}"))
}

/// One row of a protocol map or slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapRow {
    pub xr: f64,
    pub yr: f64,
    pub af: Option<f64>,
    pub df: Option<f64>,
    pub ef_bl: Option<f64>,
    pub ef_sl: Option<f64>,
    pub winner: Protocol,
    pub bl_scenario: Option<BiScenario>,
}

pub const MAP_HEADER: [&str; 8] = ["xr", "yr", "af", "df", "ef_bl", "ef_sl", "winner", "bl_scenario"];

impl From<&MapCell> for MapRow {
    fn from(c: &MapCell) -> Self {
        MapRow {
            xr: c.xr,
            yr: c.yr,
            af: c.af,
            df: c.df,
            ef_bl: c.ef_bl,
            ef_sl: c.ef_sl,
            winner: c.winner,
            bl_scenario: c.bl_scenario,
        }
    }
}

impl MapRow {
    fn fields(&self) -> [String; 8] {
        [
            num(self.xr),
            num(self.yr),
            opt_num(self.af),
            opt_num(self.df),
            opt_num(self.ef_bl),
            opt_num(self.ef_sl),
            self.winner.tag().to_string(),
            self.bl_scenario.map(|s| s.tag().to_string()).unwrap_or_default(),
        ]
    }

    fn parse(r: &csv::StringRecord) -> Result<Self> {
        if r.len() != MAP_HEADER.len() {
            bail!("expected {} columns, found {}", MAP_HEADER.len(), r.len());
        }
        Ok(MapRow {
            xr: parse_num(&r[0], "xr")?,
            yr: parse_num(&r[1], "yr")?,
            af: parse_opt_num(&r[2], "af")?,
            df: parse_opt_num(&r[3], "df")?,
            ef_bl: parse_opt_num(&r[4], "ef_bl")?,
            ef_sl: parse_opt_num(&r[5], "ef_sl")?,
            winner: parse_protocol(&r[6])?,
            bl_scenario: parse_scenario(&r[7])?,
        })
    }
}

/// One row of a single-level against bi-level map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionRow {
    pub xr: f64,
    pub yr: f64,
    pub sl: f64,
    pub bl: f64,
    pub bl_scenario: Option<BiScenario>,
    pub winner: Protocol,
    pub frontier: bool,
}

pub const COMPRESSION_HEADER: [&str; 7] = ["xr", "yr", "sl", "bl", "bl_scenario", "winner", "frontier"];

impl From<&CompressionCell> for CompressionRow {
    fn from(c: &CompressionCell) -> Self {
        CompressionRow {
            xr: c.xr,
            yr: c.yr,
            sl: c.sl_sum,
            bl: c.bl_sum,
            bl_scenario: c.bl_scenario,
            winner: c.winner,
            frontier: c.frontier,
        }
    }
}

impl CompressionRow {
    fn fields(&self) -> [String; 7] {
        [
            num(self.xr),
            num(self.yr),
            num(self.sl),
            num(self.bl),
            self.bl_scenario.map(|s| s.tag().to_string()).unwrap_or_default(),
            self.winner.tag().to_string(),
            u8::from(self.frontier).to_string(),
        ]
    }

    fn parse(r: &csv::StringRecord) -> Result<Self> {
        if r.len() != COMPRESSION_HEADER.len() {
            bail!("expected {} columns, found {}", COMPRESSION_HEADER.len(), r.len());
        }
        Ok(CompressionRow {
            xr: parse_num(&r[0], "xr")?,
            yr: parse_num(&r[1], "yr")?,
            sl: parse_num(&r[2], "sl")?,
            bl: parse_num(&r[3], "bl")?,
            bl_scenario: parse_scenario(&r[4])?,
            winner: parse_protocol(&r[5])?,
            frontier: match &r[6] {
                "0" => false,
                "1" => true,
                other => bail!("column frontier: expected 0 or 1, found {other:?}"),
            },
        })
    }
}

fn write_table<W: Write, const N: usize>(
    out: W,
    header: [&str; N],
    rows: impl Iterator<Item = [String; N]>,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_table<R: Read, T>(
    input: R,
    header: &[&str],
    parse: impl Fn(&csv::StringRecord) -> Result<T>,
) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let found = r.headers()?.clone();
    if found.iter().ne(header.iter().copied()) {
        bail!("unexpected header {:?}, expected {:?}", found.iter().collect::<Vec<_>>(), header);
    }
    r.records()
        .enumerate()
        .map(|(i, rec)| parse(&rec?).with_context(|| format!("data row {}", i + 1)))
        .collect()
}

pub fn write_map<W: Write>(out: W, rows: &[MapRow]) -> Result<()> {
    write_table(out, MAP_HEADER, rows.iter().map(MapRow::fields))
}

pub fn read_map<R: Read>(input: R) -> Result<Vec<MapRow>> {
    read_table(input, &MAP_HEADER, MapRow::parse)
}

pub fn write_compression<W: Write>(out: W, rows: &[CompressionRow]) -> Result<()> {
    write_table(out, COMPRESSION_HEADER, rows.iter().map(CompressionRow::fields))
}

pub fn read_compression<R: Read>(input: R) -> Result<Vec<CompressionRow>> {
    read_table(input, &COMPRESSION_HEADER, CompressionRow::parse)
}

pub fn map_csv(rows: &[MapRow]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_map(&mut buf, rows)?;
    Ok(buf)
}

pub fn compression_csv(rows: &[CompressionRow]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_compression(&mut buf, rows)?;
    Ok(buf)
}
