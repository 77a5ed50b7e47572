use std::io;

use thiserror::Error;

use crate::color_grey::GreyCode2;
use crate::transport::{Channel, FrameKind};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ColorError {
    #[error("{what} {value} is out of range")]
    OutOfRange { what: &'static str, value: u8 },
    #[error("{0} is not one of the grey shades 0, 7, 8, 15")]
    InvalidShade(u8),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum BmpError {
    #[error("not a BMP file (missing \"BM\" magic)")]
    NotBmp,
    #[error("unsupported bit depth {0}, only 4 bits per pixel is handled")]
    UnsupportedDepth(u16),
    #[error("unsupported header size {0}, expected a 40-byte BITMAPINFOHEADER")]
    UnsupportedHeader(u32),
    #[error("palette declares {0} colors, at most 16 fit a 4-bit image")]
    PaletteTooLarge(u32),
    #[error("unsupported compression method {0}")]
    UnsupportedCompression(u32),
    #[error("file truncated: {0}")]
    Truncated(&'static str),
    #[error("bad dimensions {width}x{height}")]
    BadDimensions { width: i64, height: i64 },
    #[error("pixel buffer holds {actual} values, expected {expected}")]
    PixelCount { expected: usize, actual: usize },
    #[error("pixel value {0} does not fit in 4 bits")]
    PixelOutOfRange(u8),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("reference image has no pixel with grey code {0}")]
    MissingShade(GreyCode2),
    #[error("record {position} at ({x}, {y}) lies outside the {width}x{height} reference image")]
    CoordOutOfBounds {
        position: usize,
        x: u16,
        y: u16,
        width: u32,
        height: u32,
    },
    #[error("record count {0} is not a multiple of four")]
    LengthNotMultipleOfFour(usize),
    #[error("message of {0} bytes exceeds the 4 GiB limit")]
    MessageTooLong(usize),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PayloadError {
    #[error("bad payload magic {0:02x?}, expected \"RSTG\"")]
    BadMagic([u8; 4]),
    #[error("unsupported payload version {0}")]
    UnsupportedVersion(u8),
    #[error("payload truncated: {actual} bytes, expected {expected}")]
    Truncated { expected: u64, actual: u64 },
    #[error("payload has {extra} trailing bytes")]
    TrailingGarbage { extra: u64 },
    #[error("message length {0} exceeds the 4 GiB limit")]
    TooLong(u64),
    #[error("{records} records do not match message length {message_length}")]
    RecordCount { message_length: u32, records: usize },
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("unknown frame kind 0x{0:02x}")]
    BadKind(u8),
    #[error("frame truncated")]
    Truncated,
    #[error("frame checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("frame body of {0} bytes exceeds the 4 GiB limit")]
    TooLong(usize),
    #[error("{0} trailing bytes after frame")]
    TrailingBytes(usize),
}

#[derive(Error, Debug)]
pub enum TransportError {
    #[error("session incomplete: image {}, payload {}", received(*.image), received(*.payload))]
    Incomplete { image: bool, payload: bool },
    #[error("channel {channel}: {source}")]
    Io {
        channel: Channel,
        #[source]
        source: io::Error,
    },
    #[error("channel {channel}: {source}")]
    Frame {
        channel: Channel,
        #[source]
        source: FrameError,
    },
    #[error("channel {channel}: second {kind} frame")]
    DuplicateFrame { channel: Channel, kind: FrameKind },
    #[error("channel {channel}: image: {source}")]
    Image {
        channel: Channel,
        #[source]
        source: BmpError,
    },
    #[error("channel {channel}: payload: {source}")]
    Payload {
        channel: Channel,
        #[source]
        source: PayloadError,
    },
    #[error("decode: {0}")]
    Decode(#[from] CodecError),
}

fn received(flag: bool) -> &'static str {
    if flag { "received" } else { "missing" }
}
