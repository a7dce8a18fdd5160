//! 48-bit MAC addresses.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A 48-bit IEEE MAC address. Displayed as lowercase colon-hex.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MacAddr(pub [u8; 6]);

impl MacAddr {
    pub const fn new(octets: [u8; 6]) -> Self {
        MacAddr(octets)
    }

    pub fn octets(&self) -> [u8; 6] {
        self.0
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        if bytes.len() < 6 {
            return None;
        }
        let mut o = [0u8; 6];
        o.copy_from_slice(&bytes[..6]);
        Some(MacAddr(o))
    }

    /// Filesystem-safe form, `aa-bb-cc-dd-ee-ff`.
    pub fn to_dir_name(&self) -> String {
        self.to_string().replace(':', "-")
    }
}

impl fmt::Display for MacAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = &self.0;
        write!(
            f,
            "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}",
            o[0], o[1], o[2], o[3], o[4], o[5]
        )
    }
}

impl fmt::Debug for MacAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MacAddr({})", self)
    }
}

impl FromStr for MacAddr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let sep = if s.contains(':') { ':' } else { '-' };
        let mut octets = [0u8; 6];
        let mut count = 0;
        for part in s.split(sep) {
            if count == 6 {
                return Err(Error::Invalid(format!("bad MAC address: {s}")));
            }
            octets[count] = u8::from_str_radix(part, 16)
                .map_err(|_| Error::Invalid(format!("bad MAC address: {s}")))?;
            count += 1;
        }
        if count != 6 {
            return Err(Error::Invalid(format!("bad MAC address: {s}")));
        }
        Ok(MacAddr(octets))
    }
}
