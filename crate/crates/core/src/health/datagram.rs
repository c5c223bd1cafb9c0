//! UDP framing of sealed files.
//!
//! ```text
//! version:u8 stream_type:u8 file_id:u32 seq:u32 total:u32 timestamp_us:u64 chunk_len:u16 chunk
//! ```
//!
//! All integers little-endian. `timestamp_us` is the time the measurement
//! file was closed. Stream type `0xFF` is the test-mode sidecar: a single
//! datagram whose chunk is the SHA-256 of the plaintext file.

use thiserror::Error;

pub const DATAGRAM_VERSION: u8 = 1;
pub const MAX_CHUNK: usize = 1400;
pub const HEADER_LEN: usize = 24;
pub const SIDECAR_TYPE: u8 = 0xFF;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatagramError {
    #[error("datagram too short")]
    Truncated,
    #[error("unsupported datagram version {0}")]
    Version(u8),
    #[error("chunk length does not match datagram size")]
    Length,
    #[error("sequence number out of range")]
    Sequence,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TelemetryDatagram {
    pub version: u8,
    pub stream_type: u8,
    pub file_id: u32,
    pub seq: u32,
    pub total_chunks: u32,
    pub timestamp_us: u64,
    pub chunk: Vec<u8>,
}

/// `(cycle << 8) | stream type`.
pub fn file_id(cycle: u32, stream_type: u8) -> u32 {
    (cycle << 8) | u32::from(stream_type)
}

pub fn split_file_id(id: u32) -> (u32, u8) {
    (id >> 8, id as u8)
}

impl TelemetryDatagram {
    pub fn to_bytes(&self) -> Vec<u8> {
        assert!(self.chunk.len() <= MAX_CHUNK);
        let mut b = Vec::with_capacity(HEADER_LEN + self.chunk.len());
        b.push(self.version);
        b.push(self.stream_type);
        b.extend_from_slice(&self.file_id.to_le_bytes());
        b.extend_from_slice(&self.seq.to_le_bytes());
        b.extend_from_slice(&self.total_chunks.to_le_bytes());
        b.extend_from_slice(&self.timestamp_us.to_le_bytes());
        b.extend_from_slice(&(self.chunk.len() as u16).to_le_bytes());
        b.extend_from_slice(&self.chunk);
        b
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, DatagramError> {
        if b.len() < HEADER_LEN {
            return Err(DatagramError::Truncated);
        }
        if b[0] != DATAGRAM_VERSION {
            return Err(DatagramError::Version(b[0]));
        }
        let u32_at = |i: usize| u32::from_le_bytes(b[i..i + 4].try_into().unwrap());
        let len = u16::from_le_bytes([b[22], b[23]]) as usize;
        if len > MAX_CHUNK || b.len() != HEADER_LEN + len {
            return Err(DatagramError::Length);
        }
        let d = TelemetryDatagram {
            version: b[0],
            stream_type: b[1],
            file_id: u32_at(2),
            seq: u32_at(6),
            total_chunks: u32_at(10),
            timestamp_us: u64::from_le_bytes(b[14..22].try_into().unwrap()),
            chunk: b[HEADER_LEN..].to_vec(),
        };
        if d.total_chunks == 0 || d.seq >= d.total_chunks {
            return Err(DatagramError::Sequence);
        }
        Ok(d)
    }
}

/// Cuts a sealed container into datagrams of at most [`MAX_CHUNK`] bytes.
pub fn chunk_container(stream_type: u8, file_id: u32, timestamp_us: u64, sealed: &[u8]) -> Vec<TelemetryDatagram> {
    let pieces: Vec<&[u8]> = if sealed.is_empty() { vec![&[][..]] } else { sealed.chunks(MAX_CHUNK).collect() };
    let total = pieces.len() as u32;
    pieces
        .into_iter()
        .enumerate()
        .map(|(i, c)| TelemetryDatagram {
            version: DATAGRAM_VERSION,
            stream_type,
            file_id,
            seq: i as u32,
            total_chunks: total,
            timestamp_us,
            chunk: c.to_vec(),
        })
        .collect()
}

pub fn sidecar(file_id: u32, timestamp_us: u64, sha256: [u8; 32]) -> TelemetryDatagram {
    TelemetryDatagram {
        version: DATAGRAM_VERSION,
        stream_type: SIDECAR_TYPE,
        file_id,
        seq: 0,
        total_chunks: 1,
        timestamp_us,
        chunk: sha256.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_little_endian_in_field_order() {
        let d = TelemetryDatagram {
            version: 1,
            stream_type: 5,
            file_id: 0x0102_0305,
            seq: 2,
            total_chunks: 3,
            timestamp_us: 0x1122_3344_5566_7788,
            chunk: vec![0xAA, 0xBB],
        };
        let b = d.to_bytes();
        assert_eq!(
            b,
            [
                1, 5, 0x05, 0x03, 0x02, 0x01, 2, 0, 0, 0, 3, 0, 0, 0, 0x88, 0x77, 0x66, 0x55, 0x44, 0x33, 0x22, 0x11,
                2, 0, 0xAA, 0xBB
            ]
        );
        assert_eq!(TelemetryDatagram::from_bytes(&b).unwrap(), d);
    }

    #[test]
    fn rejects_bad_frames() {
        let good = chunk_container(5, 7, 9, &[1, 2, 3]).remove(0).to_bytes();
        assert_eq!(TelemetryDatagram::from_bytes(&good[..10]), Err(DatagramError::Truncated));
        let mut v = good.clone();
        v[0] = 2;
        assert_eq!(TelemetryDatagram::from_bytes(&v), Err(DatagramError::Version(2)));
        let mut v = good.clone();
        v.push(0);
        assert_eq!(TelemetryDatagram::from_bytes(&v), Err(DatagramError::Length));
        let mut v = good;
        v[6] = 1; // seq 1 of 1
        assert_eq!(TelemetryDatagram::from_bytes(&v), Err(DatagramError::Sequence));
    }

    #[test]
    fn chunking_caps_and_reassembles() {
        let data: Vec<u8> = (0..3001u32).map(|i| i as u8).collect();
        let ds = chunk_container(5, file_id(3, 5), 0, &data);
        assert_eq!(ds.iter().map(|d| d.chunk.len()).collect::<Vec<_>>(), [1400, 1400, 201]);
        assert!(ds.iter().all(|d| d.total_chunks == 3));
        let joined: Vec<u8> = ds.iter().flat_map(|d| d.chunk.clone()).collect();
        assert_eq!(joined, data);
        assert_eq!(chunk_container(1, 1, 0, &[0u8; 1400]).len(), 1);
        assert_eq!(chunk_container(1, 1, 0, &[0u8; 1401]).len(), 2);
        assert_eq!(split_file_id(file_id(70_000, 4)), (70_000, 4));
    }
}
