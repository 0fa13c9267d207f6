//! MSB-first bit I/O and the `WZC1` container.
//!
//! Container layout (all multi-byte integers big-endian):
//!
//! | bytes | field                                            |
//! |-------|--------------------------------------------------|
//! | 4     | magic `WZC1`                                     |
//! | 1     | codec (0 = SPIHT, 1 = STW)                       |
//! | 1     | wavelet (0 = Haar, 1 = CDF 9/7)                  |
//! | 1     | flags (bit 0: RGB was converted to YCbCr)        |
//! | 1     | channel count                                    |
//! | 1     | decomposition levels                             |
//! | 1     | coding passes (loops)                            |
//! | 2     | width                                            |
//! | 2     | height                                           |
//! | 5 * C | per channel: `n0` (0xFF = empty), payload bits   |
//!
//! followed by each channel's payload, zero-padded to a whole byte.

use thiserror::Error;

use crate::dwt::Wavelet;

pub const MAGIC: &[u8; 4] = b"WZC1";
pub const FIXED_HEADER_LEN: usize = 14;
pub const CHANNEL_ENTRY_LEN: usize = 5;
pub const EMPTY_N0: u8 = 0xFF;
pub const FLAG_COLOR_TRANSFORM: u8 = 0x01;

/// Read past the declared end of a bit payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("bit stream truncated")]
pub struct Truncated;

/// A finished bit sequence: whole bytes plus the number of meaningful bits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitBuf {
    bytes: Vec<u8>,
    len: usize,
}

impl BitBuf {
    pub fn from_bytes(bytes: Vec<u8>, len: usize) -> Self {
        assert!(len <= bytes.len() * 8, "bit length exceeds buffer");
        Self { bytes, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.bytes[i / 8] >> (7 - i % 8) & 1 == 1
    }

    /// The first `bits` bits, re-padded with zeros.
    pub fn prefix(&self, bits: usize) -> BitBuf {
        let bits = bits.min(self.len);
        let mut bytes = self.bytes[..bits.div_ceil(8)].to_vec();
        if bits % 8 != 0 {
            if let Some(last) = bytes.last_mut() {
                *last &= 0xFFu8 << (8 - bits % 8);
            }
        }
        BitBuf { bytes, len: bits }
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader::new(&self.bytes, self.len)
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.bit(i)).collect()
    }
}

#[derive(Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    len: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn write_bit(&mut self, bit: bool) {
        let shift = 7 - (self.len % 8);
        if shift == 7 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 1 << shift;
        }
        self.len += 1;
    }

    pub fn write_bits(&mut self, bits: &[bool]) {
        bits.iter().for_each(|&b| self.write_bit(b));
    }

    /// Writes the low `count` bits of `value`, most significant first.
    pub fn write_value(&mut self, value: u64, count: u32) {
        for i in (0..count).rev() {
            self.write_bit(value >> i & 1 == 1);
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Pads the final byte with zero bits.
    pub fn finish(self) -> BitBuf {
        BitBuf {
            bytes: self.bytes,
            len: self.len,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    len: usize,
    pos: usize,
}

impl<'a> BitReader<'a> {
    /// Reads at most `len` bits (clamped to what `bytes` holds).
    pub fn new(bytes: &'a [u8], len: usize) -> Self {
        Self {
            bytes,
            len: len.min(bytes.len() * 8),
            pos: 0,
        }
    }

    #[inline]
    pub fn read_bit(&mut self) -> Result<bool, Truncated> {
        if self.pos >= self.len {
            return Err(Truncated);
        }
        let bit = self.bytes[self.pos / 8] >> (7 - self.pos % 8) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    /// Either reads all `count` bits or none.
    pub fn read_bits(&mut self, count: usize) -> Result<Vec<bool>, Truncated> {
        if count > self.remaining() {
            return Err(Truncated);
        }
        (0..count).map(|_| self.read_bit()).collect()
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.len - self.pos
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Codec {
    Spiht,
    Stw,
}

impl Codec {
    pub fn id(self) -> u8 {
        match self {
            Codec::Spiht => 0,
            Codec::Stw => 1,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(Codec::Spiht),
            1 => Some(Codec::Stw),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Codec::Spiht => "SPIHT",
            Codec::Stw => "STW",
        }
    }
}

fn wavelet_id(w: Wavelet) -> u8 {
    match w {
        Wavelet::Haar => 0,
        Wavelet::Cdf97 => 1,
    }
}

fn wavelet_from_id(id: u8) -> Option<Wavelet> {
    match id {
        0 => Some(Wavelet::Haar),
        1 => Some(Wavelet::Cdf97),
        _ => None,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContainerError {
    #[error("bad magic: expected WZC1")]
    BadMagic,
    #[error("unknown codec id {0}")]
    UnknownCodec(u8),
    #[error("unknown wavelet id {0}")]
    UnknownWavelet(u8),
    #[error("invalid header field {field}: {value}")]
    InvalidField { field: &'static str, value: u32 },
    #[error("length mismatch: expected {expected} bytes, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("truncated: need {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelEntry {
    /// Initial bit plane; `None` when the channel has no significant coefficient.
    pub n0: Option<u8>,
    pub bit_len: u32,
}

impl ChannelEntry {
    pub fn payload_bytes(&self) -> usize {
        (self.bit_len as usize).div_ceil(8)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainerHeader {
    pub codec: Codec,
    pub wavelet: Wavelet,
    pub color_transform: bool,
    pub levels: u8,
    pub loops: u8,
    pub width: u16,
    pub height: u16,
    pub channels: Vec<ChannelEntry>,
}

impl ContainerHeader {
    pub fn encoded_len(&self) -> usize {
        FIXED_HEADER_LEN + CHANNEL_ENTRY_LEN * self.channels.len()
    }

    pub fn payload_len(&self) -> usize {
        self.channels.iter().map(ChannelEntry::payload_bytes).sum()
    }

    fn validate(&self) -> Result<(), ContainerError> {
        let checks: [(&'static str, u32, bool); 5] = [
            (
                "channels",
                self.channels.len() as u32,
                matches!(self.channels.len(), 1 | 3),
            ),
            ("levels", u32::from(self.levels), self.levels >= 1),
            ("loops", u32::from(self.loops), self.loops >= 1),
            ("width", u32::from(self.width), self.width >= 1),
            ("height", u32::from(self.height), self.height >= 1),
        ];
        for (field, value, ok) in checks {
            if !ok {
                return Err(ContainerError::InvalidField { field, value });
            }
        }
        if self.color_transform && self.channels.len() != 3 {
            return Err(ContainerError::InvalidField {
                field: "flags",
                value: u32::from(FLAG_COLOR_TRANSFORM),
            });
        }
        for ch in &self.channels {
            if ch.n0 == Some(EMPTY_N0) {
                return Err(ContainerError::InvalidField {
                    field: "n0",
                    value: u32::from(EMPTY_N0),
                });
            }
            if ch.n0.is_none() && ch.bit_len != 0 {
                return Err(ContainerError::InvalidField {
                    field: "bit_len",
                    value: ch.bit_len,
                });
            }
        }
        Ok(())
    }
}

pub fn serialize_container(h: &ContainerHeader, payloads: &[Vec<u8>]) -> Result<Vec<u8>, ContainerError> {
    h.validate()?;
    if payloads.len() != h.channels.len() {
        return Err(ContainerError::InvalidField {
            field: "payload count",
            value: payloads.len() as u32,
        });
    }
    for (ch, p) in h.channels.iter().zip(payloads) {
        if p.len() != ch.payload_bytes() {
            return Err(ContainerError::LengthMismatch {
                expected: ch.payload_bytes(),
                found: p.len(),
            });
        }
    }
    let mut out = Vec::with_capacity(h.encoded_len() + h.payload_len());
    out.extend_from_slice(MAGIC);
    out.push(h.codec.id());
    out.push(wavelet_id(h.wavelet));
    out.push(if h.color_transform { FLAG_COLOR_TRANSFORM } else { 0 });
    out.push(h.channels.len() as u8);
    out.push(h.levels);
    out.push(h.loops);
    out.extend_from_slice(&h.width.to_be_bytes());
    out.extend_from_slice(&h.height.to_be_bytes());
    for ch in &h.channels {
        out.push(ch.n0.unwrap_or(EMPTY_N0));
        out.extend_from_slice(&ch.bit_len.to_be_bytes());
    }
    for p in payloads {
        out.extend_from_slice(p);
    }
    Ok(out)
}

fn parse_header(bytes: &[u8]) -> Result<ContainerHeader, ContainerError> {
    let need = |n: usize| {
        if bytes.len() < n {
            Err(ContainerError::Truncated {
                needed: n,
                available: bytes.len(),
            })
        } else {
            Ok(())
        }
    };
    need(4)?;
    if &bytes[..4] != MAGIC {
        return Err(ContainerError::BadMagic);
    }
    need(FIXED_HEADER_LEN)?;
    let codec = Codec::from_id(bytes[4]).ok_or(ContainerError::UnknownCodec(bytes[4]))?;
    let wavelet = wavelet_from_id(bytes[5]).ok_or(ContainerError::UnknownWavelet(bytes[5]))?;
    let flags = bytes[6];
    if flags & !FLAG_COLOR_TRANSFORM != 0 {
        return Err(ContainerError::InvalidField {
            field: "flags",
            value: u32::from(flags),
        });
    }
    let nch = bytes[7] as usize;
    need(FIXED_HEADER_LEN + CHANNEL_ENTRY_LEN * nch)?;
    let channels = bytes[FIXED_HEADER_LEN..FIXED_HEADER_LEN + CHANNEL_ENTRY_LEN * nch]
        .chunks_exact(CHANNEL_ENTRY_LEN)
        .map(|e| ChannelEntry {
            n0: (e[0] != EMPTY_N0).then_some(e[0]),
            bit_len: u32::from_be_bytes([e[1], e[2], e[3], e[4]]),
        })
        .collect();
    let h = ContainerHeader {
        codec,
        wavelet,
        color_transform: flags & FLAG_COLOR_TRANSFORM != 0,
        levels: bytes[8],
        loops: bytes[9],
        width: u16::from_be_bytes([bytes[10], bytes[11]]),
        height: u16::from_be_bytes([bytes[12], bytes[13]]),
        channels,
    };
    h.validate()?;
    Ok(h)
}

fn split_payloads(h: &ContainerHeader, body: &[u8]) -> Vec<Vec<u8>> {
    let mut rest = body;
    h.channels
        .iter()
        .map(|ch| {
            let take = ch.payload_bytes().min(rest.len());
            let (p, r) = rest.split_at(take);
            rest = r;
            p.to_vec()
        })
        .collect()
}

/// Strict parse: the byte count must match the header exactly.
pub fn parse_container(bytes: &[u8]) -> Result<(ContainerHeader, Vec<Vec<u8>>), ContainerError> {
    let h = parse_header(bytes)?;
    let expected = h.encoded_len() + h.payload_len();
    if bytes.len() < expected {
        return Err(ContainerError::Truncated {
            needed: expected,
            available: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(ContainerError::LengthMismatch {
            expected,
            found: bytes.len(),
        });
    }
    let payloads = split_payloads(&h, &bytes[h.encoded_len()..]);
    Ok((h, payloads))
}

/// A container whose payload section may be cut short.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialContainer {
    pub header: ContainerHeader,
    pub payloads: Vec<Vec<u8>>,
    pub truncated: bool,
}

/// Like [`parse_container`], but tolerates a truncated payload section so a
/// best-effort decode is possible. The header itself must be complete.
pub fn parse_container_partial(bytes: &[u8]) -> Result<PartialContainer, ContainerError> {
    let header = parse_header(bytes)?;
    let expected = header.encoded_len() + header.payload_len();
    if bytes.len() > expected {
        return Err(ContainerError::LengthMismatch {
            expected,
            found: bytes.len(),
        });
    }
    let payloads = split_payloads(&header, &bytes[header.encoded_len()..]);
    Ok(PartialContainer {
        header,
        payloads,
        truncated: bytes.len() < expected,
    })
}
