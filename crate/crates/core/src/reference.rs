//! Reference images and the per-code occurrence index.

use std::str::FromStr;

use crate::bmp4::Bmp4Image;
use crate::color_grey::{
    ColorNumber, GreyCode2, GreyShade, Rgb, code2_to_grey_shade, color_number_to_code2,
    color_number_to_rgb, palette_entry_to_color_number,
};

/// How a pixel's palette index becomes a colour number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PaletteMode {
    /// The index is the colour number.
    RawIndex,
    /// The palette entry is matched to the nearest canonical CGA colour.
    #[default]
    MatchPalette,
}

impl FromStr for PaletteMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" | "raw-index" => Ok(Self::RawIndex),
            "match" | "match-palette" => Ok(Self::MatchPalette),
            other => Err(format!(
                "unknown palette mode {other:?}, expected raw or match"
            )),
        }
    }
}

/// Pixel coordinate; `(0, 0)` is the top-left corner, `x` is the column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coord {
    pub x: u16,
    pub y: u16,
}

impl Coord {
    pub const fn new(x: u16, y: u16) -> Self {
        Self { x, y }
    }
}

/// Row-major scan order: by row, then by column.
impl Ord for Coord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Coord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A 2-bit code per pixel. Never modified once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceImage {
    width: u32,
    height: u32,
    codes: Vec<GreyCode2>,
}

impl ReferenceImage {
    pub fn from_codes(width: u32, height: u32, codes: Vec<GreyCode2>) -> Option<Self> {
        let ok = (1..=65535).contains(&width)
            && (1..=65535).contains(&height)
            && codes.len() == width as usize * height as usize;
        ok.then_some(Self {
            width,
            height,
            codes,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn codes(&self) -> &[GreyCode2] {
        &self.codes
    }

    pub fn shades(&self) -> impl Iterator<Item = GreyShade> + '_ {
        self.codes.iter().map(|&c| code2_to_grey_shade(c))
    }

    pub fn code_at(&self, at: Coord) -> Option<GreyCode2> {
        let (x, y) = (at.x as u32, at.y as u32);
        (x < self.width && y < self.height)
            .then(|| self.codes[y as usize * self.width as usize + x as usize])
    }

    /// Pixel count per code.
    pub fn histogram(&self) -> [usize; 4] {
        let mut h = [0usize; 4];
        for c in &self.codes {
            h[c.index()] += 1;
        }
        h
    }
}

pub fn to_reference_image(image: &Bmp4Image, mode: PaletteMode) -> ReferenceImage {
    // Every slot resolves through the same chain, so do it once per palette entry.
    let lut: [GreyCode2; 16] = std::array::from_fn(|i| {
        let n = match mode {
            PaletteMode::RawIndex => ColorNumber::from_low_nibble(i as u8),
            PaletteMode::MatchPalette => palette_entry_to_color_number(image.palette()[i]),
        };
        color_number_to_code2(n)
    });
    let codes = image.pixels().iter().map(|&p| lut[p as usize]).collect();
    ReferenceImage {
        width: image.width(),
        height: image.height(),
        codes,
    }
}

/// Renders the reference as a BMP whose pixel indices are the shades
/// `0, 7, 8, 15` over the canonical palette, so both palette modes read it
/// back unchanged.
pub fn export_grey_bmp(reference: &ReferenceImage) -> Bmp4Image {
    let palette: [Rgb; 16] =
        std::array::from_fn(|i| color_number_to_rgb(ColorNumber::from_low_nibble(i as u8)));
    let pixels = reference.shades().map(GreyShade::value).collect();
    Bmp4Image::new(reference.width, reference.height, palette, pixels)
        .expect("reference dimensions are valid")
}

/// Coordinates of every pixel, bucketed by code and kept in scan order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceIndex {
    buckets: [Vec<Coord>; 4],
}

impl OccurrenceIndex {
    pub fn bucket(&self, code: GreyCode2) -> &[Coord] {
        &self.buckets[code.index()]
    }

    pub fn bucket_sizes(&self) -> [usize; 4] {
        std::array::from_fn(|i| self.buckets[i].len())
    }

    pub fn len(&self) -> usize {
        self.buckets.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Codes with no pixel at all.
    pub fn missing_codes(&self) -> impl Iterator<Item = GreyCode2> + '_ {
        GreyCode2::ALL
            .into_iter()
            .filter(|c| self.buckets[c.index()].is_empty())
    }

    /// True when every bucket is strictly increasing in scan order.
    pub fn is_scan_ordered(&self) -> bool {
        self.buckets
            .iter()
            .all(|b| b.windows(2).all(|w| w[0] < w[1]))
    }
}

pub fn build_index(reference: &ReferenceImage) -> OccurrenceIndex {
    let hist = reference.histogram();
    let mut buckets: [Vec<Coord>; 4] = std::array::from_fn(|i| Vec::with_capacity(hist[i]));
    let w = reference.width as usize;
    for (i, code) in reference.codes.iter().enumerate() {
        buckets[code.index()].push(Coord::new((i % w) as u16, (i / w) as u16));
    }
    OccurrenceIndex { buckets }
}
