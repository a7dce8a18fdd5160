//! Capture ingestion: decode 802.11 capture files or canonical record files
//! into validated [`FrameRecord`] streams, keeping data frames only.

pub mod canonical;
pub mod frame;
pub mod pcap;

use std::fs;
use std::path::Path;

pub use frame::{
    infer_direction, parse_frame_control, Direction, FrameControl, FrameDisposition, FrameRecord,
    FrameType, SkipReason, MIN_DATA_FRAME_BYTES,
};

use crate::error::{Error, Result};
use crate::mac::MacAddr;

/// Per-category drop counters reported by ingestion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub kept: u64,
    pub management: u64,
    pub control: u64,
    pub extension: u64,
    pub wrong_bssid: u64,
    pub wds: u64,
    pub not_infrastructure: u64,
    pub truncated: u64,
    pub malformed: u64,
}

impl IngestStats {
    pub fn dropped(&self) -> u64 {
        self.management
            + self.control
            + self.extension
            + self.wrong_bssid
            + self.wds
            + self.not_infrastructure
            + self.truncated
            + self.malformed
    }
}

/// Result of reading one capture: time-ordered data-frame records for the
/// target BSSID, plus drop diagnostics.
pub struct Capture {
    pub records: Vec<FrameRecord>,
    pub stats: IngestStats,
}

/// Read a capture file, auto-detecting pcap versus the canonical format.
///
/// For pcap input `bssid` selects the target AP and must be given. Canonical
/// files already carry per-record BSSIDs; if `bssid` is supplied, records for
/// other BSSIDs are dropped and counted.
pub fn read_capture(path: &Path, bssid: Option<MacAddr>) -> Result<Capture> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if pcap::looks_like_pcap(&bytes) {
        let bssid = bssid.ok_or_else(|| {
            Error::config("a --bssid is required when ingesting a pcap capture")
        })?;
        let parsed = pcap::parse(path, &bytes)?;
        Ok(from_packets(&parsed, bssid))
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| Error::Format(format!("{}: not pcap and not utf-8 text", path.display())))?;
        let read = canonical::parse_records(path, &text)?;
        let mut stats = IngestStats {
            malformed: read.malformed_lines,
            ..Default::default()
        };
        let mut records = read.records;
        if let Some(b) = bssid {
            let before = records.len() as u64;
            records.retain(|r| r.bssid == b);
            stats.wrong_bssid = before - records.len() as u64;
        }
        stats.kept = records.len() as u64;
        Ok(Capture { records, stats })
    }
}

/// Filter parsed 802.11 packets down to data-frame records for one BSSID.
fn from_packets(file: &pcap::PcapFile, bssid: MacAddr) -> Capture {
    let mut stats = IngestStats {
        truncated: file.truncated,
        ..Default::default()
    };
    let mut records = Vec::new();
    for pkt in &file.packets {
        // FC(2) + duration(2) + addr1..addr3(18) + seq(2).
        if pkt.dot11.len() < MIN_DATA_FRAME_BYTES as usize {
            stats.truncated += 1;
            continue;
        }
        let fc = parse_frame_control([pkt.dot11[0], pkt.dot11[1]]);
        match fc.frame_type {
            FrameType::Management => {
                stats.management += 1;
                continue;
            }
            FrameType::Control => {
                stats.control += 1;
                continue;
            }
            FrameType::Extension => {
                stats.extension += 1;
                continue;
            }
            FrameType::Data => {}
        }
        let addr1 = MacAddr::from_slice(&pkt.dot11[4..10]).expect("length checked");
        let addr2 = MacAddr::from_slice(&pkt.dot11[10..16]).expect("length checked");
        let addr3 = MacAddr::from_slice(&pkt.dot11[16..22]).expect("length checked");
        let (direction, station) = match infer_direction(&fc, addr1, addr2, addr3, bssid) {
            FrameDisposition::Keep { direction, station } => (direction, station),
            FrameDisposition::Skip(SkipReason::WrongBssid) => {
                stats.wrong_bssid += 1;
                continue;
            }
            FrameDisposition::Skip(SkipReason::Wds) => {
                stats.wds += 1;
                continue;
            }
            FrameDisposition::Skip(SkipReason::NotInfrastructure) => {
                stats.not_infrastructure += 1;
                continue;
            }
        };
        match FrameRecord::new(pkt.timestamp_us, pkt.frame_len, direction, station, bssid) {
            Ok(r) => records.push(r),
            Err(_) => stats.malformed += 1,
        }
    }
    records.sort_by_key(|r| r.timestamp_us);
    stats.kept = records.len() as u64;
    Capture { records, stats }
}
