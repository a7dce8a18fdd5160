//! 802.11 frame-control decoding, link-direction inference and the validated
//! per-frame metadata record the rest of the pipeline consumes.

use crate::error::Error;
use crate::mac::MacAddr;

/// Minimum length of an 802.11 data-frame MAC header (3 addresses + seq ctl).
pub const MIN_DATA_FRAME_BYTES: u16 = 24;

/// Link direction relative to the access point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Station to AP, encoded as +1.
    Uplink,
    /// AP to station, encoded as -1.
    Downlink,
}

impl Direction {
    pub fn sign(self) -> i8 {
        match self {
            Direction::Uplink => 1,
            Direction::Downlink => -1,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Self> {
        match sign {
            1 => Some(Direction::Uplink),
            -1 => Some(Direction::Downlink),
            _ => None,
        }
    }
}

/// The four top-level 802.11 frame types (2-bit field).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameType {
    Management,
    Control,
    Data,
    Extension,
}

impl FrameType {
    fn from_bits(bits: u8) -> Self {
        match bits & 0b11 {
            0 => FrameType::Management,
            1 => FrameType::Control,
            2 => FrameType::Data,
            _ => FrameType::Extension,
        }
    }

    fn to_bits(self) -> u8 {
        match self {
            FrameType::Management => 0,
            FrameType::Control => 1,
            FrameType::Data => 2,
            FrameType::Extension => 3,
        }
    }
}

/// Decoded 802.11 frame-control field.
///
/// All 16 bits are kept so that `encode(decode(b)) == b` for every 2-byte
/// value, including the flag bits the pipeline itself never inspects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrameControl {
    pub version: u8,
    pub frame_type: FrameType,
    pub subtype: u8,
    pub to_ds: bool,
    pub from_ds: bool,
    pub more_fragments: bool,
    pub retry: bool,
    pub power_mgmt: bool,
    pub more_data: bool,
    pub protected: bool,
    pub order: bool,
}

/// Decode the two frame-control bytes.
///
/// First byte: version in bits 0-1, type in bits 2-3, subtype in bits 4-7.
/// Second byte: ToDS bit 0, FromDS bit 1, then the six flag bits.
pub fn parse_frame_control(bytes: [u8; 2]) -> FrameControl {
    let b0 = bytes[0];
    let b1 = bytes[1];
    FrameControl {
        version: b0 & 0b11,
        frame_type: FrameType::from_bits((b0 >> 2) & 0b11),
        subtype: (b0 >> 4) & 0b1111,
        to_ds: b1 & 0x01 != 0,
        from_ds: b1 & 0x02 != 0,
        more_fragments: b1 & 0x04 != 0,
        retry: b1 & 0x08 != 0,
        power_mgmt: b1 & 0x10 != 0,
        more_data: b1 & 0x20 != 0,
        protected: b1 & 0x40 != 0,
        order: b1 & 0x80 != 0,
    }
}

impl FrameControl {
    /// Re-encode into the original two bytes.
    pub fn encode(&self) -> [u8; 2] {
        let b0 = (self.version & 0b11)
            | (self.frame_type.to_bits() << 2)
            | ((self.subtype & 0b1111) << 4);
        let mut b1 = 0u8;
        if self.to_ds {
            b1 |= 0x01;
        }
        if self.from_ds {
            b1 |= 0x02;
        }
        if self.more_fragments {
            b1 |= 0x04;
        }
        if self.retry {
            b1 |= 0x08;
        }
        if self.power_mgmt {
            b1 |= 0x10;
        }
        if self.more_data {
            b1 |= 0x20;
        }
        if self.protected {
            b1 |= 0x40;
        }
        if self.order {
            b1 |= 0x80;
        }
        [b0, b1]
    }
}

/// Why a data frame was not turned into a record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkipReason {
    /// Frame belongs to a different BSS.
    WrongBssid,
    /// Wireless distribution system frame (ToDS and FromDS both set).
    Wds,
    /// Neither DS bit set: ad-hoc / IBSS traffic, not to or from the AP.
    NotInfrastructure,
}

/// Outcome of matching a data frame against the target AP.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameDisposition {
    Keep {
        direction: Direction,
        station: MacAddr,
    },
    Skip(SkipReason),
}

/// Infer link direction and the non-AP endpoint from the DS bits and the
/// three MAC header addresses.
///
/// ToDS=1/FromDS=0 is uplink and the station is the transmitter (addr2, with
/// addr1 carrying the BSSID); ToDS=0/FromDS=1 is downlink and the station is
/// the receiver (addr1, with addr2 carrying the BSSID). Frames whose BSSID
/// field differs from `bssid`, WDS frames and IBSS frames are skipped.
pub fn infer_direction(
    fc: &FrameControl,
    addr1: MacAddr,
    addr2: MacAddr,
    _addr3: MacAddr,
    bssid: MacAddr,
) -> FrameDisposition {
    debug_assert_eq!(fc.frame_type, FrameType::Data);
    match (fc.to_ds, fc.from_ds) {
        (true, false) => {
            if addr1 != bssid {
                FrameDisposition::Skip(SkipReason::WrongBssid)
            } else {
                FrameDisposition::Keep {
                    direction: Direction::Uplink,
                    station: addr2,
                }
            }
        }
        (false, true) => {
            if addr2 != bssid {
                FrameDisposition::Skip(SkipReason::WrongBssid)
            } else {
                FrameDisposition::Keep {
                    direction: Direction::Downlink,
                    station: addr1,
                }
            }
        }
        (true, true) => FrameDisposition::Skip(SkipReason::Wds),
        (false, false) => FrameDisposition::Skip(SkipReason::NotInfrastructure),
    }
}

/// Plaintext metadata of one captured data frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrameRecord {
    /// Microseconds since the capture epoch.
    pub timestamp_us: i64,
    /// Full on-air MAC frame length in bytes, including headers.
    pub size_bytes: u16,
    pub direction: Direction,
    /// The non-AP endpoint.
    pub station: MacAddr,
    /// The AP.
    pub bssid: MacAddr,
}

impl FrameRecord {
    /// Validating constructor: enforces the size range and station != bssid.
    pub fn new(
        timestamp_us: i64,
        size_bytes: u32,
        direction: Direction,
        station: MacAddr,
        bssid: MacAddr,
    ) -> Result<Self, Error> {
        if size_bytes < MIN_DATA_FRAME_BYTES as u32 || size_bytes > u16::MAX as u32 {
            return Err(Error::Invalid(format!(
                "frame size {size_bytes} outside [{MIN_DATA_FRAME_BYTES}, {}]",
                u16::MAX
            )));
        }
        if station == bssid {
            return Err(Error::Invalid(format!(
                "station equals bssid ({station})"
            )));
        }
        Ok(FrameRecord {
            timestamp_us,
            size_bytes: size_bytes as u16,
            direction,
            station,
            bssid,
        })
    }

    pub fn time_s(&self) -> f64 {
        self.timestamp_us as f64 / 1e6
    }
}
