//! Hiding bytes as coordinate records against a reference image, and
//! recovering them.
//!
//! Each byte is split into four 2-bit chunks, most significant pair first.
//! For every chunk one coordinate whose grey code equals the chunk is
//! recorded. The reference image itself is only read.

use crate::color_grey::GreyCode2;
use crate::error::CodecError;
use crate::reference::{Coord, OccurrenceIndex, ReferenceImage};
use crate::rng::XorShift64Star;

/// A record is a pixel coordinate; its position in the stream is the chunk
/// number.
pub type CoordRecord = Coord;

pub const CHUNKS_PER_BYTE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionStrategy {
    /// Always the first pixel in scan order carrying the code.
    #[default]
    FirstOccurrence,
    /// A seeded pseudo-random pixel among those carrying the code.
    Random { seed: u64 },
}

pub fn byte_to_chunks(b: u8) -> [GreyCode2; 4] {
    [6, 4, 2, 0].map(|shift| GreyCode2::from_low_bits(b >> shift))
}

pub fn chunks_to_byte(c: [GreyCode2; 4]) -> u8 {
    c.iter().fold(0u8, |acc, chunk| (acc << 2) | chunk.value())
}

pub fn hide(
    msg: &[u8],
    index: &OccurrenceIndex,
    strategy: SelectionStrategy,
) -> Result<Vec<CoordRecord>, CodecError> {
    if msg.len() > u32::MAX as usize {
        return Err(CodecError::MessageTooLong(msg.len()));
    }

    // Fail before doing any work if a needed code has no pixel.
    let mut used = [false; 4];
    for &b in msg {
        for c in byte_to_chunks(b) {
            used[c.index()] = true;
        }
        if used.iter().all(|&u| u) {
            break;
        }
    }
    if let Some(missing) = GreyCode2::ALL
        .into_iter()
        .find(|c| used[c.index()] && index.bucket(*c).is_empty())
    {
        return Err(CodecError::MissingShade(missing));
    }

    let mut records = Vec::with_capacity(msg.len() * CHUNKS_PER_BYTE);
    let chunks = msg.iter().flat_map(|&b| byte_to_chunks(b));
    match strategy {
        SelectionStrategy::FirstOccurrence => {
            let firsts: [Option<Coord>; 4] =
                std::array::from_fn(|i| index.bucket(GreyCode2::ALL[i]).first().copied());
            records.extend(chunks.map(|c| firsts[c.index()].expect("checked above")));
        }
        SelectionStrategy::Random { seed } => {
            let mut rng = XorShift64Star::new(seed);
            records.extend(chunks.map(|c| {
                let bucket = index.bucket(c);
                bucket[rng.below(bucket.len())]
            }));
        }
    }
    Ok(records)
}

pub fn unhide(records: &[CoordRecord], reference: &ReferenceImage) -> Result<Vec<u8>, CodecError> {
    if !records.len().is_multiple_of(CHUNKS_PER_BYTE) {
        return Err(CodecError::LengthNotMultipleOfFour(records.len()));
    }
    let lookup = |position: usize, r: CoordRecord| {
        reference.code_at(r).ok_or(CodecError::CoordOutOfBounds {
            position,
            x: r.x,
            y: r.y,
            width: reference.width(),
            height: reference.height(),
        })
    };
    records
        .chunks_exact(CHUNKS_PER_BYTE)
        .enumerate()
        .map(|(i, group)| {
            let base = i * CHUNKS_PER_BYTE;
            Ok(chunks_to_byte([
                lookup(base, group[0])?,
                lookup(base + 1, group[1])?,
                lookup(base + 2, group[2])?,
                lookup(base + 3, group[3])?,
            ]))
        })
        .collect()
}
