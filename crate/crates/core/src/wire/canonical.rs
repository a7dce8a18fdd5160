//! Canonical newline-delimited frame record format.
//!
//! One record per line, `timestamp_us,size_bytes,direction,station,bssid`
//! with direction written as `+1` or `-1` and MACs as lowercase colon-hex.
//! The first line must be the header `#macprint-frames v1`. Writing then
//! reading a record list reproduces it exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mac::MacAddr;
use crate::wire::frame::{Direction, FrameRecord};

pub const FRAMES_HEADER: &str = "#macprint-frames v1";

/// Render records in canonical form.
pub fn format_records(records: &[FrameRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 48 + FRAMES_HEADER.len() + 1);
    out.push_str(FRAMES_HEADER);
    out.push('\n');
    for r in records {
        let sign = if r.direction == Direction::Uplink {
            "+1"
        } else {
            "-1"
        };
        writeln!(
            out,
            "{},{},{},{},{}",
            r.timestamp_us, r.size_bytes, sign, r.station, r.bssid
        )
        .expect("string write cannot fail");
    }
    out
}

pub fn write_records(path: &Path, records: &[FrameRecord]) -> Result<()> {
    fs::write(path, format_records(records)).map_err(|e| Error::io(path, e))
}

fn parse_line(path: &Path, lineno: usize, line: &str) -> Result<FrameRecord> {
    let mut parts = line.split(',');
    let mut next = |what: &str| {
        parts
            .next()
            .ok_or_else(|| Error::parse(path, lineno, format!("missing field: {what}")))
    };

    let ts: i64 = next("timestamp_us")?
        .parse()
        .map_err(|_| Error::parse(path, lineno, "bad timestamp"))?;
    let size: u32 = next("size_bytes")?
        .parse()
        .map_err(|_| Error::parse(path, lineno, "bad size"))?;
    let dir = match next("direction")? {
        "+1" | "1" => Direction::Uplink,
        "-1" => Direction::Downlink,
        other => return Err(Error::parse(path, lineno, format!("bad direction: {other}"))),
    };
    let station: MacAddr = next("station")?
        .parse()
        .map_err(|_| Error::parse(path, lineno, "bad station MAC"))?;
    let bssid: MacAddr = next("bssid")?
        .parse()
        .map_err(|_| Error::parse(path, lineno, "bad bssid MAC"))?;
    if parts.next().is_some() {
        return Err(Error::parse(path, lineno, "trailing fields"));
    }
    FrameRecord::new(ts, size, dir, station, bssid)
        .map_err(|e| Error::parse(path, lineno, e.to_string()))
}

/// Outcome of reading a canonical file: validated records plus the count of
/// lines that were skipped as malformed.
pub struct CanonicalRead {
    pub records: Vec<FrameRecord>,
    pub malformed_lines: u64,
}

/// Parse canonical-format text. Lines that fail to parse or violate the
/// record invariants are skipped and counted; a missing header is fatal.
pub fn parse_records(path: &Path, text: &str) -> Result<CanonicalRead> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == FRAMES_HEADER => {}
        _ => {
            return Err(Error::Format(format!(
                "{}: missing `{FRAMES_HEADER}` header",
                path.display()
            )))
        }
    }
    let mut records = Vec::new();
    let mut malformed = 0u64;
    for (idx, line) in lines.enumerate() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_line(path, idx + 2, line) {
            Ok(r) => records.push(r),
            Err(_) => malformed += 1,
        }
    }
    // Stable sort keeps equal timestamps in file order.
    records.sort_by_key(|r| r.timestamp_us);
    Ok(CanonicalRead {
        records,
        malformed_lines: malformed,
    })
}

pub fn read_records(path: &Path) -> Result<CanonicalRead> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_records(path, &text)
}
