//! The RSTG coordinate payload file.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "RSTG"
//! 4       1     version (1)
//! 5       1     flags (reserved, 0)
//! 6       4     message length in bytes, u32 LE
//! 10      4*N   records: x u16 LE, y u16 LE; N = 4 * message length
//! ```

use crate::codec::{CHUNKS_PER_BYTE, CoordRecord};
use crate::error::PayloadError;
use crate::reference::Coord;

pub const MAGIC: [u8; 4] = *b"RSTG";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 10;
pub const RECORD_LEN: usize = 4;
/// Bytes of payload per message byte.
pub const BYTES_PER_MESSAGE_BYTE: usize = CHUNKS_PER_BYTE * RECORD_LEN;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayloadFile {
    version: u8,
    records: Vec<CoordRecord>,
}

impl PayloadFile {
    /// Wraps records produced by `hide`; their count must be a multiple of
    /// four and fit a 32-bit message length.
    pub fn new(records: Vec<CoordRecord>) -> Result<Self, PayloadError> {
        let message_length = records.len() / CHUNKS_PER_BYTE;
        if message_length > u32::MAX as usize {
            return Err(PayloadError::TooLong(message_length as u64));
        }
        if !records.len().is_multiple_of(CHUNKS_PER_BYTE) {
            return Err(PayloadError::RecordCount {
                message_length: message_length as u32,
                records: records.len(),
            });
        }
        Ok(Self {
            version: VERSION,
            records,
        })
    }

    pub fn version(&self) -> u8 {
        self.version
    }

    pub fn message_length(&self) -> u32 {
        (self.records.len() / CHUNKS_PER_BYTE) as u32
    }

    pub fn records(&self) -> &[CoordRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<CoordRecord> {
        self.records
    }

    /// Size of the serialized file.
    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + RECORD_LEN * self.records.len()
    }
}

/// Header fields without the record body.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PayloadHeader {
    pub version: u8,
    pub flags: u8,
    pub message_length: u32,
}

impl PayloadHeader {
    pub fn expected_len(&self) -> u64 {
        HEADER_LEN as u64 + BYTES_PER_MESSAGE_BYTE as u64 * self.message_length as u64
    }
}

pub fn serialize(p: &PayloadFile) -> Vec<u8> {
    let mut out = Vec::with_capacity(p.encoded_len());
    out.extend_from_slice(&MAGIC);
    out.push(p.version);
    out.push(0);
    out.extend_from_slice(&p.message_length().to_le_bytes());
    for r in &p.records {
        out.extend_from_slice(&r.x.to_le_bytes());
        out.extend_from_slice(&r.y.to_le_bytes());
    }
    out
}

pub fn parse_header(bytes: &[u8]) -> Result<PayloadHeader, PayloadError> {
    if bytes.len() < MAGIC.len() {
        return Err(PayloadError::Truncated {
            expected: HEADER_LEN as u64,
            actual: bytes.len() as u64,
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(PayloadError::BadMagic(magic));
    }
    if bytes.len() < HEADER_LEN {
        return Err(PayloadError::Truncated {
            expected: HEADER_LEN as u64,
            actual: bytes.len() as u64,
        });
    }
    let version = bytes[4];
    if version != VERSION {
        return Err(PayloadError::UnsupportedVersion(version));
    }
    Ok(PayloadHeader {
        version,
        flags: bytes[5],
        message_length: u32::from_le_bytes(bytes[6..10].try_into().unwrap()),
    })
}

pub fn deserialize(bytes: &[u8]) -> Result<PayloadFile, PayloadError> {
    let header = parse_header(bytes)?;
    let expected = header.expected_len();
    let actual = bytes.len() as u64;
    if actual < expected {
        return Err(PayloadError::Truncated { expected, actual });
    }
    if actual > expected {
        return Err(PayloadError::TrailingGarbage {
            extra: actual - expected,
        });
    }
    let records = bytes[HEADER_LEN..]
        .chunks_exact(RECORD_LEN)
        .map(|r| {
            Coord::new(
                u16::from_le_bytes([r[0], r[1]]),
                u16::from_le_bytes([r[2], r[3]]),
            )
        })
        .collect();
    Ok(PayloadFile {
        version: header.version,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: [u8; 26] = [
        0x52, 0x53, 0x54, 0x47, 0x01, 0x00, 0x01, 0x00, 0x00, 0x00, //
        0x01, 0x00, 0x00, 0x00, //
        0x00, 0x00, 0x00, 0x00, //
        0x00, 0x00, 0x00, 0x00, //
        0x01, 0x00, 0x00, 0x00,
    ];

    fn fixture_file() -> PayloadFile {
        PayloadFile::new(vec![
            Coord::new(1, 0),
            Coord::new(0, 0),
            Coord::new(0, 0),
            Coord::new(1, 0),
        ])
        .unwrap()
    }

    #[test]
    fn serializes_fixture() {
        let p = fixture_file();
        assert_eq!(p.message_length(), 1);
        assert_eq!(serialize(&p), FIXTURE);
        assert_eq!(p.encoded_len(), 26);
    }

    #[test]
    fn deserializes_fixture() {
        assert_eq!(deserialize(&FIXTURE).unwrap(), fixture_file());
    }

    #[test]
    fn empty_payload_is_header_only() {
        let p = PayloadFile::new(vec![]).unwrap();
        let bytes = serialize(&p);
        assert_eq!(bytes, [0x52, 0x53, 0x54, 0x47, 1, 0, 0, 0, 0, 0]);
        assert_eq!(deserialize(&bytes).unwrap(), p);
    }

    #[test]
    fn rejects_bad_magic_and_version() {
        let mut bytes = FIXTURE;
        bytes[..4].copy_from_slice(b"XXXX");
        assert_eq!(deserialize(&bytes), Err(PayloadError::BadMagic(*b"XXXX")));

        let mut bytes = FIXTURE;
        bytes[4] = 2;
        assert_eq!(
            deserialize(&bytes),
            Err(PayloadError::UnsupportedVersion(2))
        );
    }

    #[test]
    fn rejects_truncated_and_trailing() {
        let mut bytes = FIXTURE[..10].to_vec();
        bytes[6] = 5;
        bytes.extend_from_slice(&[0; 3 * RECORD_LEN]);
        assert_eq!(
            deserialize(&bytes),
            Err(PayloadError::Truncated {
                expected: 90,
                actual: 22
            })
        );
        assert!(matches!(
            deserialize(b"RSTG\x01"),
            Err(PayloadError::Truncated { .. })
        ));
        assert!(matches!(
            deserialize(b"RS"),
            Err(PayloadError::Truncated { .. })
        ));

        let mut long = FIXTURE.to_vec();
        long.push(0);
        assert_eq!(
            deserialize(&long),
            Err(PayloadError::TrailingGarbage { extra: 1 })
        );
    }

    #[test]
    fn huge_declared_length_does_not_allocate() {
        let bytes = [0x52, 0x53, 0x54, 0x47, 1, 0, 0xFF, 0xFF, 0xFF, 0xFF];
        assert_eq!(
            deserialize(&bytes),
            Err(PayloadError::Truncated {
                expected: 10 + 16 * u32::MAX as u64,
                actual: 10
            })
        );
    }

    #[test]
    fn record_count_must_be_whole_bytes() {
        assert!(matches!(
            PayloadFile::new(vec![Coord::new(0, 0); 3]),
            Err(PayloadError::RecordCount { records: 3, .. })
        ));
    }
}
