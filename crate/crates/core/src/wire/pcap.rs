//! Minimal classic-pcap reader for 802.11 captures.
//!
//! Only what the pipeline consumes is decoded: per-packet timestamps, the
//! original frame length, and the first bytes of the 802.11 MAC header.
//! Radiotap headers (link type 127) are measured and skipped; link type 105
//! carries the MAC header directly.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const LINKTYPE_IEEE802_11: u32 = 105;
pub const LINKTYPE_IEEE802_11_RADIOTAP: u32 = 127;

const MAGIC_US_LE: u32 = 0xa1b2_c3d4;
const MAGIC_NS_LE: u32 = 0xa1b2_3c4d;

/// One captured packet: timestamp, on-air length, and the captured 802.11
/// header bytes (radiotap already stripped).
pub struct RawPacket {
    pub timestamp_us: i64,
    /// Original 802.11 frame length on air, radiotap excluded.
    pub frame_len: u32,
    /// Captured 802.11 bytes (may be shorter than `frame_len`).
    pub dot11: Vec<u8>,
}

pub struct PcapFile {
    pub link_type: u32,
    pub packets: Vec<RawPacket>,
    /// Packets whose captured bytes were too short to parse.
    pub truncated: u64,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
    swapped: bool,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let end = self.pos.checked_add(n)?;
        if end > self.data.len() {
            return None;
        }
        let s = &self.data[self.pos..end];
        self.pos = end;
        Some(s)
    }

    fn u32(&mut self) -> Option<u32> {
        let b = self.take(4)?;
        let v = u32::from_le_bytes([b[0], b[1], b[2], b[3]]);
        Some(if self.swapped { v.swap_bytes() } else { v })
    }

    fn u16(&mut self) -> Option<u16> {
        let b = self.take(2)?;
        let v = u16::from_le_bytes([b[0], b[1]]);
        Some(if self.swapped { v.swap_bytes() } else { v })
    }
}

/// Sniff for a pcap magic number.
pub fn looks_like_pcap(bytes: &[u8]) -> bool {
    if bytes.len() < 4 {
        return false;
    }
    let v = u32::from_le_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]);
    matches!(
        v,
        MAGIC_US_LE | MAGIC_NS_LE
    ) || matches!(v.swap_bytes(), MAGIC_US_LE | MAGIC_NS_LE)
}

/// Parse a classic pcap byte buffer.
pub fn parse(path: &Path, bytes: &[u8]) -> Result<PcapFile> {
    let mut cur = Cursor {
        data: bytes,
        pos: 0,
        swapped: false,
    };
    let magic_raw = cur
        .u32()
        .ok_or_else(|| Error::Format(format!("{}: not a pcap file", path.display())))?;
    let (nanos, swapped) = match magic_raw {
        MAGIC_US_LE => (false, false),
        MAGIC_NS_LE => (true, false),
        m if m.swap_bytes() == MAGIC_US_LE => (false, true),
        m if m.swap_bytes() == MAGIC_NS_LE => (true, true),
        _ => {
            return Err(Error::Format(format!(
                "{}: unrecognized pcap magic {magic_raw:#010x}",
                path.display()
            )))
        }
    };
    cur.swapped = swapped;

    let _version_major = cur.u16();
    let _version_minor = cur.u16();
    let _thiszone = cur.u32();
    let _sigfigs = cur.u32();
    let _snaplen = cur.u32();
    let link_type = cur
        .u32()
        .ok_or_else(|| Error::Format(format!("{}: truncated pcap header", path.display())))?;

    if link_type != LINKTYPE_IEEE802_11 && link_type != LINKTYPE_IEEE802_11_RADIOTAP {
        return Err(Error::Format(format!(
            "{}: unsupported link type {link_type} (need 802.11 or 802.11+radiotap)",
            path.display()
        )));
    }

    let mut packets = Vec::new();
    let mut truncated = 0u64;
    loop {
        // Per-record header: ts_sec, ts_subsec, incl_len, orig_len.
        let ts_sec = match cur.u32() {
            Some(v) => v,
            None => break,
        };
        let (ts_sub, incl, orig) = match (cur.u32(), cur.u32(), cur.u32()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                truncated += 1;
                break;
            }
        };
        let data = match cur.take(incl as usize) {
            Some(d) => d,
            None => {
                truncated += 1;
                break;
            }
        };
        let micros = if nanos {
            ts_sub as i64 / 1000
        } else {
            ts_sub as i64
        };
        let timestamp_us = ts_sec as i64 * 1_000_000 + micros;

        let (dot11, frame_len) = if link_type == LINKTYPE_IEEE802_11_RADIOTAP {
            // Radiotap: version(1) pad(1) len(2, LE regardless of pcap order).
            if data.len() < 4 {
                truncated += 1;
                continue;
            }
            let rt_len = u16::from_le_bytes([data[2], data[3]]) as usize;
            if rt_len > data.len() {
                truncated += 1;
                continue;
            }
            (&data[rt_len..], orig.saturating_sub(rt_len as u32))
        } else {
            (data, orig)
        };

        packets.push(RawPacket {
            timestamp_us,
            frame_len,
            dot11: dot11.to_vec(),
        });
    }

    Ok(PcapFile {
        link_type,
        packets,
        truncated,
    })
}

pub fn read(path: &Path) -> Result<PcapFile> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse(path, &bytes)
}

/// Serialize 802.11 packets into a classic little-endian pcap buffer with a
/// fixed-size radiotap header. Used to build capture fixtures.
pub fn write_radiotap_pcap(packets: &[(i64, &[u8])]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&MAGIC_US_LE.to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes()); // major
    out.extend_from_slice(&4u16.to_le_bytes()); // minor
    out.extend_from_slice(&0u32.to_le_bytes()); // thiszone
    out.extend_from_slice(&0u32.to_le_bytes()); // sigfigs
    out.extend_from_slice(&65535u32.to_le_bytes()); // snaplen
    out.extend_from_slice(&LINKTYPE_IEEE802_11_RADIOTAP.to_le_bytes());

    // 8-byte radiotap header with an empty presence bitmap.
    let radiotap: [u8; 8] = [0, 0, 8, 0, 0, 0, 0, 0];
    for (ts, dot11) in packets {
        let sec = (ts / 1_000_000) as u32;
        let usec = (ts.rem_euclid(1_000_000)) as u32;
        let len = (radiotap.len() + dot11.len()) as u32;
        out.extend_from_slice(&sec.to_le_bytes());
        out.extend_from_slice(&usec.to_le_bytes());
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(&radiotap);
        out.extend_from_slice(dot11);
    }
    out
}
